//! Hadamard, Reed-Muller and composed codes with their local testers: parameters, brute-force
//! distance and exhaustive soundness.
//!
//! ```sh
//! cargo run --release --example codes_and_testers
//! ```

use std::sync::Arc;

use stabforge::codes::{
    code_distance, compose_with_hadamard, hadamard_code, reed_muller_code, rm_tester, tester_soundness, SoundnessOptions,
};
use stabforge::field::FieldSpec;
use stabforge::presentation::abelian_rank;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for t in 2..=3 {
        let (c, tester) = hadamard_code(t);
        let d = code_distance(&c, 1 << 20)?;
        println!("hadamard t={t}: [{}, {}, {d}] with {} tester rows", c.n, c.k, tester.rows.len());
    }

    let f4 = Arc::new(FieldSpec::new(2)?);
    let rm = reed_muller_code(&f4, 1, 1)?;
    let tester = rm_tester(&rm, 1, 1)?;
    println!("\nRM over F_4, m=1, d=1: n={}, k={}, distance {}", rm.n, rm.k, code_distance(&rm, 1 << 20)?);

    // every non-codeword is rejected at a rate proportional to its distance from the code
    let report = tester_soundness(&rm, &tester, &SoundnessOptions::default())?;
    println!(
        "soundness ρ = {} ≈ {:.4} ({:?}, witness {:?} at distance {})",
        report.rho_exact, report.rho, report.method, report.witness, report.witness_distance
    );

    // replace each F_4 symbol by its Hadamard encoding
    let (composed, ctester) = compose_with_hadamard(&rm, &tester)?;
    let h = ctester.bits(composed.n)?;
    println!(
        "\ncomposed: [{}, {}, {}], {} binary checks, abelian rank of h = {}",
        composed.n,
        composed.k,
        code_distance(&composed, 1 << 20)?,
        h.rows(),
        abelian_rank(&h)
    );
    let msg = [1, 0, 1, 1];
    let word = composed.encode(&msg);
    println!("encode({msg:?}) = {word:?}, in code: {}", composed.contains(&word));
    Ok(())
}
