pub mod codes;
pub mod field;
pub mod games;
pub mod linalg;
pub mod pauli;
pub mod presentation;
pub mod rng;
pub mod runner;
pub mod stability;
