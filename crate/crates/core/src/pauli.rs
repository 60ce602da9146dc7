//! Pauli observables on `k` qubits stored as signed permutations.
//!
//! Qubit `i` is bit `i` of the basis index, so `σ^X(a)` maps `e_x` to `e_{x⊕a}` and `σ^Z(b)` is
//! the diagonal `(−1)^{b·x}`.

use std::collections::{HashSet, VecDeque};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{op_norm, CMat};
use crate::presentation::{Permutation, Word};
use crate::stability::{Assignment, StabilityError, UnitaryAssignment};

pub const MAX_QUBITS: usize = 12;

#[derive(Debug, Error)]
pub enum PauliError {
    #[error("{0} qubits exceed the budget of {MAX_QUBITS}")]
    TooManyQubits(usize),
    #[error("label {a:#x} does not fit in {k} qubits")]
    LabelOutOfRange { a: u32, k: usize },
    #[error("group closure exceeded {0} elements")]
    Budget(usize),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum Basis {
    X,
    Z,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PauliLabel {
    pub basis: Basis,
    pub k: usize,
    /// `a ∈ F_2^k` as a bitmask, bit `i` for qubit `i`.
    pub a: u32,
}

impl PauliLabel {
    pub fn new(basis: Basis, k: usize, a: u32) -> Result<Self, PauliError> {
        check_k(k)?;
        if (a as u64) >> k != 0 {
            return Err(PauliError::LabelOutOfRange { a, k });
        }
        Ok(PauliLabel { basis, k, a })
    }

    pub fn x(k: usize, a: u32) -> Result<Self, PauliError> {
        Self::new(Basis::X, k, a)
    }

    pub fn z(k: usize, a: u32) -> Result<Self, PauliError> {
        Self::new(Basis::Z, k, a)
    }
}

fn check_k(k: usize) -> Result<(), PauliError> {
    if k > MAX_QUBITS {
        return Err(PauliError::TooManyQubits(k));
    }
    Ok(())
}

fn parity(x: u32) -> bool {
    x.count_ones() % 2 == 1
}

/// `O e_x = sign[x] · e_{perm[x]}` with `sign[x] ∈ {±1}`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct SignedPerm {
    pub perm: Vec<u32>,
    pub sign: Vec<i8>,
}

impl SignedPerm {
    pub fn identity(d: usize) -> Self {
        SignedPerm { perm: (0..d as u32).collect(), sign: vec![1; d] }
    }

    pub fn dim(&self) -> usize {
        self.perm.len()
    }

    pub fn negated(&self) -> Self {
        SignedPerm { perm: self.perm.clone(), sign: self.sign.iter().map(|s| -s).collect() }
    }

    /// `self · other` (`other` acts first).
    pub fn mul(&self, other: &SignedPerm) -> SignedPerm {
        let (perm, sign) = other
            .perm
            .iter()
            .zip(&other.sign)
            .map(|(&y, &s)| (self.perm[y as usize], s * self.sign[y as usize]))
            .unzip();
        SignedPerm { perm, sign }
    }

    pub fn inverse(&self) -> SignedPerm {
        let d = self.dim();
        let mut perm = vec![0u32; d];
        let mut sign = vec![1i8; d];
        for (x, (&y, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            perm[y as usize] = x as u32;
            sign[y as usize] = s;
        }
        SignedPerm { perm, sign }
    }

    /// `‖O − Id‖²_τ`: 2 for each moved basis vector, 4 for each fixed one with sign −1.
    pub fn defect(&self) -> f64 {
        let total: usize = self
            .perm
            .iter()
            .zip(&self.sign)
            .enumerate()
            .map(|(x, (&y, &s))| if y as usize != x { 2 } else if s < 0 { 4 } else { 0 })
            .sum();
        total as f64 / self.dim() as f64
    }

    pub fn to_dense(&self) -> CMat {
        let d = self.dim();
        let mut m = CMat::zeros(d, d);
        for (x, (&y, &s)) in self.perm.iter().zip(&self.sign).enumerate() {
            m[(y as usize, x)] = Complex64::new(s as f64, 0.0);
        }
        m
    }
}

/// `σ^X(a)` or `σ^Z(a)` as a signed permutation.
pub fn pauli_signed(label: &PauliLabel) -> SignedPerm {
    let d = 1u32 << label.k;
    match label.basis {
        Basis::X => SignedPerm { perm: (0..d).map(|x| x ^ label.a).collect(), sign: vec![1; d as usize] },
        Basis::Z => SignedPerm {
            perm: (0..d).collect(),
            sign: (0..d).map(|x| if parity(x & label.a) { -1 } else { 1 }).collect(),
        },
    }
}

/// Dense `2^k × 2^k` Hermitian unitary for the label.
pub fn pauli_observable(label: &PauliLabel) -> CMat {
    pauli_signed(label).to_dense()
}

/// `σ^W_u = E_α (−1)^{u·α} σ^W(α)`, built directly as the projector onto the matching basis.
///
/// For `Z` this is the coordinate projector onto `e_u`; for `X` it is the rank-one projector onto
/// the Hadamard vector `2^{−k/2} Σ_x (−1)^{u·x} e_x`.
pub fn pauli_projector(basis: Basis, k: usize, u: u32) -> Result<CMat, PauliError> {
    let label = PauliLabel::new(basis, k, u)?;
    let d = 1usize << k;
    Ok(match label.basis {
        Basis::Z => CMat::from_fn(d, d, |i, j| if i == j && i as u32 == u { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }),
        Basis::X => {
            let s = |x: usize| if parity(x as u32 & u) { -1.0 } else { 1.0 };
            CMat::from_fn(d, d, |i, j| Complex64::new(s(i) * s(j) / d as f64, 0.0))
        }
    })
}

/// All `2^k` projectors of one basis.
pub fn pauli_pvm(basis: Basis, k: usize) -> Result<Vec<CMat>, PauliError> {
    (0..1u32 << k).map(|u| pauli_projector(basis, k, u)).collect()
}

/// `‖σ^X(a)σ^Z(b) − (−1)^{a·b} σ^Z(b)σ^X(a)‖_op`.
pub fn braiding_relation_check(k: usize, a: u32, b: u32) -> Result<f64, PauliError> {
    let x = pauli_observable(&PauliLabel::x(k, a)?);
    let z = pauli_observable(&PauliLabel::z(k, b)?);
    let s = if parity(a & b) { -1.0 } else { 1.0 };
    Ok(op_norm(&(&x * &z - (&z * &x).scale(s))))
}

/// Size of the group generated by `{±σ^X(a)σ^Z(b)}`, found by closing the signed permutations.
pub fn pauli_group_order_check(k: usize) -> Result<usize, PauliError> {
    if k > 4 {
        return Err(PauliError::TooManyQubits(k));
    }
    let mut gens = Vec::new();
    for a in 0..1u32 << k {
        for b in 0..1u32 << k {
            let g = pauli_signed(&PauliLabel::x(k, a)?).mul(&pauli_signed(&PauliLabel::z(k, b)?));
            gens.push(g.negated());
            gens.push(g);
        }
    }
    let budget = 1usize << 12;
    let id = SignedPerm::identity(1 << k);
    let mut seen: HashSet<SignedPerm> = HashSet::from([id.clone()]);
    let mut queue = VecDeque::from([id]);
    while let Some(e) = queue.pop_front() {
        for g in &gens {
            let p = g.mul(&e);
            if seen.insert(p.clone()) {
                if seen.len() > budget {
                    return Err(PauliError::Budget(budget));
                }
                queue.push_back(p);
            }
        }
    }
    Ok(seen.len())
}

/// An assignment whose generators are signed permutations; defects are exact.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SignedPermAssignment {
    pub d: usize,
    pub ops: Vec<SignedPerm>,
}

impl SignedPermAssignment {
    pub fn evaluate(&self, w: &Word) -> Result<SignedPerm, StabilityError> {
        let mut acc = SignedPerm::identity(self.d);
        for &(g, e) in w.letters() {
            let op = self.ops.get(g).ok_or(StabilityError::MissingGenerator(g))?;
            acc = if e >= 0 { acc.mul(op) } else { acc.mul(&op.inverse()) };
        }
        Ok(acc)
    }

    pub fn to_dense(&self) -> UnitaryAssignment {
        UnitaryAssignment { d: self.d, generators: self.ops.iter().map(SignedPerm::to_dense).collect() }
    }
}

impl Assignment for SignedPermAssignment {
    fn dim(&self) -> usize {
        self.d
    }

    fn generator_count(&self) -> usize {
        self.ops.len()
    }

    fn word_defect(&self, w: &Word) -> Result<f64, StabilityError> {
        Ok(self.evaluate(w)?.defect())
    }

    fn amplified(&self, group: &[Permutation]) -> Self {
        let ops = (0..self.ops.len())
            .map(|s| {
                let mut perm = Vec::with_capacity(self.d * group.len());
                let mut sign = Vec::with_capacity(self.d * group.len());
                for (block, alpha) in group.iter().enumerate() {
                    let off = (block * self.d) as u32;
                    let op = &self.ops[alpha[s]];
                    perm.extend(op.perm.iter().map(|&y| y + off));
                    sign.extend_from_slice(&op.sign);
                }
                SignedPerm { perm, sign }
            })
            .collect();
        SignedPermAssignment { d: self.d * group.len(), ops }
    }
}

/// `x_i ↦ σ^X(e_i)`, `z_i ↦ σ^Z(e_i)`, `J ↦ −Id`, in the generator order of `pauli_small(k)`.
pub fn pauli_small_assignment(k: usize) -> Result<SignedPermAssignment, PauliError> {
    check_k(k)?;
    let mut ops = Vec::with_capacity(2 * k + 1);
    for i in 0..k {
        ops.push(pauli_signed(&PauliLabel::x(k, 1 << i)?));
    }
    for i in 0..k {
        ops.push(pauli_signed(&PauliLabel::z(k, 1 << i)?));
    }
    ops.push(SignedPerm::identity(1 << k).negated());
    Ok(SignedPermAssignment { d: 1 << k, ops })
}

/// `(a,0) ↦ σ^X(a)`, `(0,b) ↦ σ^Z(b)`, `J ↦ −Id`, in the generator order of `pauli_mult_like(k)`.
pub fn pauli_mult_like_assignment(k: usize) -> Result<SignedPermAssignment, PauliError> {
    check_k(k)?;
    let mut ops = Vec::with_capacity((2 << k) + 1);
    for a in 0..1u32 << k {
        ops.push(pauli_signed(&PauliLabel::x(k, a)?));
    }
    for b in 0..1u32 << k {
        ops.push(pauli_signed(&PauliLabel::z(k, b)?));
    }
    ops.push(SignedPerm::identity(1 << k).negated());
    Ok(SignedPermAssignment { d: 1 << k, ops })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{dist2_tau, identity, is_hermitian, is_pvm, tau};
    use crate::presentation::{pauli_mult_like, pauli_small};
    use crate::stability::{defect, fourier_observables, pvm_from_commuting_involutions, DefectMode};

    fn c(x: f64) -> Complex64 {
        Complex64::new(x, 0.0)
    }

    #[test]
    fn single_qubit_matrices() {
        let x = pauli_observable(&PauliLabel::x(1, 1).unwrap());
        assert_eq!(x, CMat::from_row_slice(2, 2, &[c(0.0), c(1.0), c(1.0), c(0.0)]));
        let z = pauli_observable(&PauliLabel::z(1, 1).unwrap());
        assert_eq!(z, CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(-1.0)]));
        assert_eq!(pauli_observable(&PauliLabel::x(3, 0).unwrap()), identity(8));
        assert!(PauliLabel::x(2, 4).is_err());
        assert!(PauliLabel::z(13, 0).is_err());
    }

    #[test]
    fn two_qubit_commutation() {
        let x = pauli_observable(&PauliLabel::x(2, 3).unwrap());
        let z = pauli_observable(&PauliLabel::z(2, 3).unwrap());
        assert_eq!(&x * &z, &z * &x);
        assert!(is_hermitian(&x, 0.0) && &x * &x == identity(4));
    }

    #[test]
    fn products_and_braiding() {
        for k in 1..=4usize {
            for a in 0..1u32 << k {
                for b in 0..1u32 << k {
                    assert!(braiding_relation_check(k, a, b).unwrap() < 1e-12);
                    for basis in [Basis::X, Basis::Z] {
                        let pa = pauli_signed(&PauliLabel::new(basis, k, a).unwrap());
                        let pb = pauli_signed(&PauliLabel::new(basis, k, b).unwrap());
                        assert_eq!(pa.mul(&pb), pauli_signed(&PauliLabel::new(basis, k, a ^ b).unwrap()));
                    }
                }
            }
        }
    }

    #[test]
    fn projectors_form_pvms() {
        let p0 = pauli_projector(Basis::Z, 1, 0).unwrap();
        assert_eq!(p0, CMat::from_row_slice(2, 2, &[c(1.0), c(0.0), c(0.0), c(0.0)]));
        for k in 1..=3 {
            for basis in [Basis::X, Basis::Z] {
                let pvm = pauli_pvm(basis, k).unwrap();
                assert!(is_pvm(&pvm, 1e-12));
                assert!(pvm.iter().all(|p| (tau(p).re - 1.0 / (1u32 << k) as f64).abs() < 1e-15));
            }
        }
    }

    #[test]
    fn projectors_match_fourier_sum() {
        let k = 3;
        for basis in [Basis::X, Basis::Z] {
            let gens: Vec<CMat> = (0..k).map(|i| pauli_observable(&PauliLabel::new(basis, k, 1 << i).unwrap())).collect();
            let fourier = pvm_from_commuting_involutions(&gens).unwrap();
            let direct = pauli_pvm(basis, k).unwrap();
            assert!(fourier.iter().zip(&direct).all(|(a, b)| dist2_tau(a, b) < 1e-24));
            let back = fourier_observables(&direct);
            for (a, m) in back.iter().enumerate() {
                assert!(dist2_tau(m, &pauli_observable(&PauliLabel::new(basis, k, a as u32).unwrap())) < 1e-24);
            }
        }
    }

    #[test]
    fn group_orders() {
        assert_eq!(pauli_group_order_check(1).unwrap(), 8);
        assert_eq!(pauli_group_order_check(2).unwrap(), 32);
        assert!(pauli_group_order_check(5).is_err());
    }

    #[test]
    fn perfect_assignments_have_zero_defect() {
        for k in 1..=4 {
            let a = pauli_small_assignment(k).unwrap();
            assert_eq!(defect(&a, &pauli_small(k), DefectMode::Exhaustive).unwrap().epsilon, 0.0);
        }
        for k in 1..=3 {
            let a = pauli_mult_like_assignment(k).unwrap();
            assert_eq!(defect(&a, &pauli_mult_like(k).unwrap(), DefectMode::Exhaustive).unwrap().epsilon, 0.0);
        }
        let dense = pauli_small_assignment(2).unwrap().to_dense();
        assert_eq!(defect(&dense, &pauli_small(2), DefectMode::Exhaustive).unwrap().epsilon, 0.0);
    }

    #[test]
    fn signed_defect_matches_dense() {
        let a = pauli_small_assignment(2).unwrap();
        let w = Word::new(vec![(0, 1), (2, 1)]);
        let dense = a.to_dense();
        assert!((a.word_defect(&w).unwrap() - dense.word_defect(&w).unwrap()).abs() < 1e-12);
        let j = Word::new(vec![(4, 1)]);
        assert_eq!(a.word_defect(&j).unwrap(), 4.0);
    }
}
