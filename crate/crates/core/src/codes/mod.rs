//! Linear codes, parity checks and local testers over F_{2^t}.

mod compose;
mod hadamard;
mod reed_muller;
mod soundness;

use std::sync::Arc;

use num_rational::Rational64;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::field::{BitMatrix, BitVector, FieldError, FieldSpec};

pub use compose::{brm_tester, compose_with_hadamard, hadamard_blocks_valid};
pub use hadamard::hadamard_code;
pub use reed_muller::{
    interpolation_coeffs, nodes, point_index, point_coords, reed_muller_code, rm_tester, MultiPoly,
};
pub use soundness::{code_distance, codewords, tester_soundness, SoundnessMethod, SoundnessOptions, SoundnessReport};

#[derive(Debug, Error)]
pub enum CodeError {
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error("degree {d} must be below field size {q}")]
    DegreeTooLarge { d: usize, q: u32 },
    #[error("interpolation nodes must be pairwise distinct")]
    RepeatedNodes,
    #[error("search space {needed} exceeds budget {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("operation requires a binary code")]
    NotBinary,
    #[error("row {0} has zero weight")]
    ZeroRow(usize),
    #[error("{0}")]
    Invalid(String),
}

/// Sparse row: `(column, coefficient)` pairs with nonzero coefficients, columns ascending.
pub type SparseRow = Vec<(usize, u32)>;

/// A linear code given by both a generator matrix and a parity check.
#[derive(Clone, Debug)]
pub struct LinearCode {
    pub field: Arc<FieldSpec>,
    pub n: usize,
    pub k: usize,
    /// `k × n`, rows span the code.
    pub generator: Vec<Vec<u32>>,
    /// Parity rows; the code is their common kernel.
    pub parity: Vec<SparseRow>,
    pub distance: Option<usize>,
}

/// Parity rows plus a distribution over them.
#[derive(Clone, Debug, PartialEq)]
pub struct LocalTester {
    pub rows: Vec<SparseRow>,
    pub nu: Vec<Rational64>,
}

/// F_2 as a field spec, used by binary codes.
pub fn binary_field() -> Arc<FieldSpec> {
    Arc::new(FieldSpec::new(1).expect("F_2 always builds"))
}

/// Merges duplicate columns by field addition, drops zeros, sorts by column.
pub(crate) fn normalize_row(mut entries: Vec<(usize, u32)>) -> SparseRow {
    entries.sort_unstable_by_key(|e| e.0);
    let mut out: SparseRow = Vec::with_capacity(entries.len());
    for (c, v) in entries {
        match out.last_mut() {
            Some(last) if last.0 == c => last.1 ^= v,
            _ => out.push((c, v)),
        }
    }
    out.retain(|e| e.1 != 0);
    out
}

/// `row · x` over the field.
pub fn row_eval(field: &FieldSpec, row: &[(usize, u32)], x: &[u32]) -> u32 {
    row.iter().fold(0, |acc, &(c, v)| acc ^ field.mul(v, x[c]))
}

/// Rank over F_q by Gaussian elimination on dense rows.
pub fn rank_fq(field: &FieldSpec, rows: &[Vec<u32>]) -> usize {
    let mut work: Vec<Vec<u32>> = rows.to_vec();
    let cols = work.first().map_or(0, Vec::len);
    let mut rank = 0;
    for col in 0..cols {
        let Some(p) = (rank..work.len()).find(|&r| work[r][col] != 0) else {
            continue;
        };
        work.swap(rank, p);
        let inv = field.inv(work[rank][col]).expect("pivot is nonzero");
        for v in work[rank].iter_mut() {
            *v = field.mul(*v, inv);
        }
        let pivot = work[rank].clone();
        for r in work.iter_mut().skip(rank + 1) {
            let f = r[col];
            if f != 0 {
                for (a, &b) in r.iter_mut().zip(&pivot) {
                    *a ^= field.mul(f, b);
                }
            }
        }
        rank += 1;
    }
    rank
}

pub(crate) fn densify(row: &[(usize, u32)], n: usize) -> Vec<u32> {
    let mut out = vec![0; n];
    for &(c, v) in row {
        out[c] = v;
    }
    out
}

impl LinearCode {
    pub fn q(&self) -> u32 {
        self.field.size()
    }

    pub fn is_binary(&self) -> bool {
        self.field.t() == 1
    }

    pub fn parity_dense(&self) -> Vec<Vec<u32>> {
        self.parity.iter().map(|r| densify(r, self.n)).collect()
    }

    pub fn parity_rank(&self) -> usize {
        rank_fq(&self.field, &self.parity_dense())
    }

    pub fn generator_rank(&self) -> usize {
        rank_fq(&self.field, &self.generator)
    }

    /// Encodes a message of length `k`.
    pub fn encode(&self, msg: &[u32]) -> Vec<u32> {
        assert_eq!(msg.len(), self.k, "message length");
        let mut out = vec![0u32; self.n];
        for (row, &m) in self.generator.iter().zip(msg) {
            if m != 0 {
                for (o, &g) in out.iter_mut().zip(row) {
                    *o ^= self.field.mul(m, g);
                }
            }
        }
        out
    }

    /// Whether every parity row annihilates `x`.
    pub fn contains(&self, x: &[u32]) -> bool {
        self.parity.iter().all(|r| row_eval(&self.field, r, x) == 0)
    }

    /// Checks `E hᵀ = 0`, `rank E = k` and `rank h = n − k`.
    pub fn check_consistency(&self) -> Result<(), CodeError> {
        for (i, g) in self.generator.iter().enumerate() {
            if !self.contains(g) {
                return Err(CodeError::Invalid(format!("generator row {i} violates a parity check")));
            }
        }
        if self.generator_rank() != self.k {
            return Err(CodeError::Invalid("generator rows are dependent".into()));
        }
        if self.parity_rank() != self.n - self.k {
            return Err(CodeError::Invalid("parity rank differs from n - k".into()));
        }
        Ok(())
    }

    /// Binary generator as a bit matrix.
    pub fn generator_bits(&self) -> Result<BitMatrix, CodeError> {
        if !self.is_binary() {
            return Err(CodeError::NotBinary);
        }
        let rows = self.generator.iter().map(|r| BitVector::from_bits(r.iter().map(|&v| v == 1))).collect();
        Ok(BitMatrix::from_rows(self.n, rows)?)
    }

    /// Binary parity check as a bit matrix.
    pub fn parity_bits(&self) -> Result<BitMatrix, CodeError> {
        if !self.is_binary() {
            return Err(CodeError::NotBinary);
        }
        sparse_to_bits(&self.parity, self.n)
    }

    /// Column `i` of the generator, packed as bits (requires a binary code, `k ≤ 64`).
    pub fn generator_column(&self, i: usize) -> u64 {
        self.generator.iter().enumerate().map(|(r, row)| u64::from(row[i] & 1) << r).sum()
    }
}

pub(crate) fn sparse_to_bits(rows: &[SparseRow], n: usize) -> Result<BitMatrix, CodeError> {
    let bits = rows
        .iter()
        .map(|r| {
            let mut v = BitVector::zeros(n);
            for &(c, _) in r {
                v.set(c, true);
            }
            v
        })
        .collect();
    Ok(BitMatrix::from_rows(n, bits)?)
}

impl LocalTester {
    /// Uniform distribution over the given rows.
    pub fn uniform(rows: Vec<SparseRow>) -> Self {
        let m = rows.len() as i64;
        LocalTester { nu: vec![Rational64::new(1, m); rows.len()], rows }
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// Largest row weight.
    pub fn locality(&self) -> usize {
        self.rows.iter().map(Vec::len).max().unwrap_or(0)
    }

    pub fn nu_f64(&self) -> Vec<f64> {
        self.nu.iter().map(|r| r.to_f64().unwrap_or(f64::NAN)).collect()
    }

    pub fn validate(&self) -> Result<(), CodeError> {
        if self.nu.len() != self.rows.len() {
            return Err(CodeError::Invalid("nu length differs from row count".into()));
        }
        if self.nu.iter().any(|w| *w < Rational64::zero()) {
            return Err(CodeError::Invalid("negative row weight".into()));
        }
        let total: Rational64 = self.nu.iter().sum();
        if total != Rational64::from_integer(1) {
            return Err(CodeError::Invalid(format!("row weights sum to {total}")));
        }
        Ok(())
    }

    pub fn bits(&self, n: usize) -> Result<BitMatrix, CodeError> {
        sparse_to_bits(&self.rows, n)
    }
}

#[derive(Serialize, Deserialize)]
struct CodeRepr {
    field: FieldSpec,
    n: usize,
    k: usize,
    #[serde(rename = "E")]
    e: Vec<Vec<u32>>,
    h: Vec<Vec<u32>>,
}

impl Serialize for LinearCode {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        CodeRepr {
            field: (*self.field).clone(),
            n: self.n,
            k: self.k,
            e: self.generator.clone(),
            h: self.parity_dense(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for LinearCode {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = CodeRepr::deserialize(d)?;
        let q = r.field.size();
        let well_formed = r.e.len() == r.k
            && r.e.iter().chain(&r.h).all(|row| row.len() == r.n && row.iter().all(|&v| v < q));
        if !well_formed {
            return Err(D::Error::custom("matrix shape or entries do not match n, k and the field"));
        }
        let parity = r
            .h
            .iter()
            .map(|row| row.iter().enumerate().filter(|e| *e.1 != 0).map(|(c, &v)| (c, v)).collect())
            .collect();
        let code = LinearCode {
            field: Arc::new(r.field),
            n: r.n,
            k: r.k,
            generator: r.e,
            parity,
            distance: None,
        };
        code.check_consistency().map_err(D::Error::custom)?;
        Ok(code)
    }
}

#[derive(Serialize, Deserialize)]
struct TesterRepr {
    rows: Vec<Vec<(usize, u32)>>,
    nu: Vec<f64>,
}

impl Serialize for LocalTester {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        TesterRepr { rows: self.rows.clone(), nu: self.nu_f64() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for LocalTester {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        use serde::de::Error;
        let r = TesterRepr::deserialize(d)?;
        if r.nu.len() != r.rows.len() {
            return Err(D::Error::custom("nu length differs from row count"));
        }
        let total: f64 = r.nu.iter().sum();
        if (total - 1.0).abs() > 1e-12 || r.nu.iter().any(|&w| !(w >= 0.0)) {
            return Err(D::Error::custom("nu must be a probability vector"));
        }
        let mut nu = r
            .nu
            .iter()
            .map(|&w| Rational64::approximate_float(w).ok_or_else(|| D::Error::custom("weight not representable")))
            .collect::<Result<Vec<_>, _>>()?;
        // absorb float rounding into the last weight so the exact total is one
        let exact: Rational64 = nu.iter().sum();
        if let Some(last) = nu.last_mut() {
            *last += Rational64::from_integer(1) - exact;
        }
        Ok(LocalTester { rows: r.rows.into_iter().map(normalize_row).collect(), nu })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn normalize_merges_and_drops() {
        assert_eq!(normalize_row(vec![(3, 1), (1, 2), (3, 1), (0, 0)]), vec![(1, 2)]);
        assert_eq!(normalize_row(vec![(0, 1), (0, 1), (0, 1)]), vec![(0, 1)]);
    }

    #[test]
    fn rank_over_f4() {
        let f = FieldSpec::new(2).unwrap();
        // second row is omega times the first
        let rows = vec![vec![1, 2, 3], vec![2, 3, 1], vec![0, 0, 1]];
        assert_eq!(rank_fq(&f, &rows), 2);
    }

    #[test]
    fn code_and_tester_json_roundtrip() {
        let (code, tester) = hadamard_code(2);
        let json = serde_json::to_string(&code).unwrap();
        let back: LinearCode = serde_json::from_str(&json).unwrap();
        assert_eq!(back.generator, code.generator);
        assert_eq!(back.parity, code.parity);
        let tj = serde_json::to_string(&tester).unwrap();
        let tb: LocalTester = serde_json::from_str(&tj).unwrap();
        assert_eq!(tb, tester);
    }
}
