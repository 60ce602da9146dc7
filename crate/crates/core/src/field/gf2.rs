//! Bit-packed vectors and matrices over F_2.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::FieldError;

const WORD: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(WORD)
}

/// A vector in F_2^n, packed 64 bits per word (bit `i` lives in word `i / 64`).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVector {
    len: usize,
    words: Vec<u64>,
}

impl BitVector {
    pub fn zeros(len: usize) -> Self {
        BitVector { len, words: vec![0; words_for(len)] }
    }

    /// Unit vector `e_i`.
    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bits<I: IntoIterator<Item = bool>>(bits: I) -> Self {
        let mut words = Vec::new();
        let mut len = 0;
        for b in bits {
            if len % WORD == 0 {
                words.push(0);
            }
            if b {
                words[len / WORD] |= 1 << (len % WORD);
            }
            len += 1;
        }
        BitVector { len, words }
    }

    /// Low `len` bits of `value`, bit `i` of the integer becoming coordinate `i`.
    pub fn from_u64(len: usize, value: u64) -> Self {
        assert!(len <= WORD, "from_u64 supports at most 64 coordinates");
        let mut v = Self::zeros(len);
        if len > 0 {
            let mask = if len == WORD { u64::MAX } else { (1u64 << len) - 1 };
            v.words[0] = value & mask;
        }
        v
    }

    /// Inverse of [`BitVector::from_u64`]; panics on vectors longer than 64.
    pub fn to_u64(&self) -> u64 {
        assert!(self.len <= WORD, "to_u64 supports at most 64 coordinates");
        self.words.first().copied().unwrap_or(0)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] >> (i % WORD) & 1 == 1
    }

    pub fn set(&mut self, i: usize, bit: bool) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        let mask = 1u64 << (i % WORD);
        if bit {
            self.words[i / WORD] |= mask;
        } else {
            self.words[i / WORD] &= !mask;
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "index {i} out of range for length {}", self.len);
        self.words[i / WORD] ^= 1 << (i % WORD);
    }

    /// Hamming weight.
    pub fn weight(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn xor_assign(&mut self, other: &BitVector) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a ^= b;
        }
    }

    pub fn xor(&self, other: &BitVector) -> BitVector {
        let mut out = self.clone();
        out.xor_assign(other);
        out
    }

    /// Inner product over F_2.
    pub fn dot(&self, other: &BitVector) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot product");
        let ones: u32 = self.words.iter().zip(&other.words).map(|(a, b)| (a & b).count_ones()).sum();
        ones % 2 == 1
    }

    pub fn hamming_distance(&self, other: &BitVector) -> usize {
        assert_eq!(self.len, other.len, "length mismatch in distance");
        self.words.iter().zip(&other.words).map(|(a, b)| (a ^ b).count_ones() as usize).sum()
    }

    pub fn iter(&self) -> impl Iterator<Item = bool> + '_ {
        (0..self.len).map(move |i| self.get(i))
    }

    /// Indices of the nonzero coordinates, ascending.
    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut rest = w;
            std::iter::from_fn(move || {
                if rest == 0 {
                    return None;
                }
                let b = rest.trailing_zeros() as usize;
                rest &= rest - 1;
                Some(wi * WORD + b)
            })
        })
    }

    /// Hex encoding: digit `i` carries coordinates `4i..4i+3`, lowest coordinate in the
    /// least significant bit of the digit.
    pub fn to_hex(&self) -> String {
        let digits = self.len.div_ceil(4);
        (0..digits)
            .map(|d| {
                let mut nib = 0u32;
                for b in 0..4 {
                    let i = 4 * d + b;
                    if i < self.len && self.get(i) {
                        nib |= 1 << b;
                    }
                }
                std::char::from_digit(nib, 16).unwrap()
            })
            .collect()
    }

    pub fn from_hex(len: usize, hex: &str) -> Result<Self, FieldError> {
        if hex.len() != len.div_ceil(4) {
            return Err(FieldError::Parse(format!(
                "hex row of {} digits cannot hold {len} bits",
                hex.len()
            )));
        }
        let mut v = Self::zeros(len);
        for (d, c) in hex.chars().enumerate() {
            let nib = c
                .to_digit(16)
                .ok_or_else(|| FieldError::Parse(format!("invalid hex digit {c:?}")))?;
            for b in 0..4 {
                if nib >> b & 1 == 1 {
                    let i = 4 * d + b;
                    if i >= len {
                        return Err(FieldError::Parse("padding bits must be zero".into()));
                    }
                    v.set(i, true);
                }
            }
        }
        Ok(v)
    }
}

impl fmt::Debug for BitVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s: String = self.iter().map(|b| if b { '1' } else { '0' }).collect();
        write!(f, "BitVector({s})")
    }
}

/// Row-major bit matrix over F_2.
#[derive(Clone, PartialEq, Eq)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BitVector>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        BitMatrix { rows, cols, data: vec![BitVector::zeros(cols); rows] }
    }

    pub fn identity(n: usize) -> Self {
        let data = (0..n).map(|i| BitVector::unit(n, i)).collect();
        BitMatrix { rows: n, cols: n, data }
    }

    /// Builds a matrix from rows; all rows must share the length `cols`.
    pub fn from_rows(cols: usize, rows: Vec<BitVector>) -> Result<Self, FieldError> {
        if let Some(bad) = rows.iter().find(|r| r.len() != cols) {
            return Err(FieldError::LengthMismatch { expected: cols, found: bad.len() });
        }
        Ok(BitMatrix { rows: rows.len(), cols, data: rows })
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn row(&self, i: usize) -> &BitVector {
        &self.data[i]
    }

    pub fn row_iter(&self) -> impl Iterator<Item = &BitVector> {
        self.data.iter()
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.data[i].get(j)
    }

    pub fn set(&mut self, i: usize, j: usize, bit: bool) {
        self.data[i].set(j, bit);
    }

    pub fn column(&self, j: usize) -> BitVector {
        BitVector::from_bits(self.data.iter().map(|r| r.get(j)))
    }

    pub fn transpose(&self) -> BitMatrix {
        let data = (0..self.cols).map(|j| self.column(j)).collect();
        BitMatrix { rows: self.cols, cols: self.rows, data }
    }

    /// `M x` for a column vector `x` of length `cols`.
    pub fn mul_vec(&self, x: &BitVector) -> BitVector {
        BitVector::from_bits(self.data.iter().map(|r| r.dot(x)))
    }

    /// `x^T M` for a row vector `x` of length `rows`.
    pub fn vec_mul(&self, x: &BitVector) -> BitVector {
        assert_eq!(x.len(), self.rows, "length mismatch in vec_mul");
        let mut out = BitVector::zeros(self.cols);
        for i in x.ones() {
            out.xor_assign(&self.data[i]);
        }
        out
    }

    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "inner dimension mismatch");
        let data = self.data.iter().map(|r| other.vec_mul(r)).collect();
        BitMatrix { rows: self.rows, cols: other.cols, data }
    }

    /// Rank over F_2 by Gaussian elimination.
    pub fn rank(&self) -> usize {
        let mut work = self.data.clone();
        let mut rank = 0;
        for col in 0..self.cols {
            let (w, bit) = (col / WORD, 1u64 << (col % WORD));
            let Some(p) = (rank..work.len()).find(|&r| work[r].words[w] & bit != 0) else {
                continue;
            };
            work.swap(rank, p);
            let pivot = work[rank].clone();
            for r in work.iter_mut().skip(rank + 1) {
                if r.words[w] & bit != 0 {
                    r.xor_assign(&pivot);
                }
            }
            rank += 1;
            if rank == work.len() {
                break;
            }
        }
        rank
    }

    /// A basis of `{x : M x = 0}` read off the reduced row echelon form.
    pub fn kernel_basis(&self) -> Vec<BitVector> {
        let mut work = self.data.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for col in 0..self.cols {
            let Some(p) = (r..work.len()).find(|&i| work[i].get(col)) else {
                continue;
            };
            work.swap(r, p);
            let pivot = work[r].clone();
            for (i, row) in work.iter_mut().enumerate() {
                if i != r && row.get(col) {
                    row.xor_assign(&pivot);
                }
            }
            pivots.push(col);
            r += 1;
        }
        let mut is_pivot = vec![false; self.cols];
        for &c in &pivots {
            is_pivot[c] = true;
        }
        (0..self.cols)
            .filter(|&c| !is_pivot[c])
            .map(|free| {
                let mut v = BitVector::unit(self.cols, free);
                for (row, &pc) in work.iter().zip(&pivots) {
                    if row.get(free) {
                        v.set(pc, true);
                    }
                }
                v
            })
            .collect()
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}x{}", self.rows, self.cols)?;
        for r in &self.data {
            let s: String = r.iter().map(|b| if b { '1' } else { '0' }).collect();
            writeln!(f, "  {s}")?;
        }
        Ok(())
    }
}

/// Rank of a bit matrix over F_2.
pub fn gf2_rank(m: &BitMatrix) -> usize {
    m.rank()
}

#[derive(Serialize, Deserialize)]
struct BitMatrixRepr {
    rows: usize,
    cols: usize,
    hex: Vec<String>,
}

impl Serialize for BitMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        BitMatrixRepr {
            rows: self.rows,
            cols: self.cols,
            hex: self.data.iter().map(BitVector::to_hex).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for BitMatrix {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let repr = BitMatrixRepr::deserialize(d)?;
        if repr.hex.len() != repr.rows {
            return Err(serde::de::Error::custom(format!(
                "expected {} hex rows, found {}",
                repr.rows,
                repr.hex.len()
            )));
        }
        let rows = repr
            .hex
            .iter()
            .map(|h| BitVector::from_hex(repr.cols, h))
            .collect::<Result<Vec<_>, _>>()
            .map_err(serde::de::Error::custom)?;
        BitMatrix::from_rows(repr.cols, rows).map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identity_has_full_rank() {
        for k in [1, 5, 64, 65, 130] {
            assert_eq!(gf2_rank(&BitMatrix::identity(k)), k);
        }
    }

    #[test]
    fn zero_matrix_has_rank_zero() {
        assert_eq!(gf2_rank(&BitMatrix::zeros(7, 9)), 0);
        assert_eq!(BitMatrix::zeros(3, 5).kernel_basis().len(), 5);
    }

    #[test]
    fn weight_and_dot() {
        let a = BitVector::from_bits([true, false, true, true]);
        let b = BitVector::from_bits([true, true, false, true]);
        assert_eq!(a.weight(), 3);
        assert!(!a.dot(&b));
        assert_eq!(a.hamming_distance(&b), 2);
        assert!(BitVector::zeros(4).is_zero());
        assert_eq!(a.ones().collect::<Vec<_>>(), vec![0, 2, 3]);
    }

    #[test]
    fn ones_iterates_across_words() {
        let mut v = BitVector::zeros(200);
        for i in [0, 63, 64, 127, 199] {
            v.set(i, true);
        }
        assert_eq!(v.ones().collect::<Vec<_>>(), vec![0, 63, 64, 127, 199]);
    }

    #[test]
    fn hex_roundtrip_and_padding() {
        let v = BitVector::from_bits([true, false, false, true, true]);
        assert_eq!(v.to_hex(), "91");
        assert_eq!(BitVector::from_hex(5, "91").unwrap(), v);
        assert!(BitVector::from_hex(5, "92").is_err());
        assert!(BitVector::from_hex(5, "9").is_err());
    }

    #[test]
    fn matrix_json_roundtrip() {
        let m = BitMatrix::from_rows(
            3,
            vec![BitVector::from_bits([true, true, false]), BitVector::from_bits([false, true, true])],
        )
        .unwrap();
        let json = serde_json::to_string(&m).unwrap();
        assert_eq!(json, r#"{"rows":2,"cols":3,"hex":["3","6"]}"#);
        let back: BitMatrix = serde_json::from_str(&json).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn kernel_vectors_are_annihilated() {
        let m = BitMatrix::from_rows(
            4,
            vec![
                BitVector::from_bits([true, true, false, false]),
                BitVector::from_bits([false, true, true, false]),
                BitVector::from_bits([true, false, true, false]),
            ],
        )
        .unwrap();
        let ker = m.kernel_basis();
        assert_eq!(m.rank(), 2);
        assert_eq!(ker.len(), 2);
        for v in &ker {
            assert!(m.mul_vec(v).is_zero());
        }
    }
}
