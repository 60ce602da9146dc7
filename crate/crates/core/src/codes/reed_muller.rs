use std::sync::Arc;

use rand::Rng;

use super::{normalize_row, CodeError, LinearCode, LocalTester, SparseRow};
use crate::field::FieldSpec;

/// Interpolation nodes `t_0..t_d`: the first `d+1` field elements in value order.
pub fn nodes(d: usize) -> Vec<u32> {
    (0..=d as u32).collect()
}

/// Index of a point of F_q^m; coordinate 0 is the least significant digit.
pub fn point_index(coords: &[u32], q: u32) -> usize {
    coords.iter().rev().fold(0usize, |acc, &c| acc * q as usize + c as usize)
}

pub fn point_coords(mut idx: usize, q: u32, m: usize) -> Vec<u32> {
    (0..m)
        .map(|_| {
            let c = (idx % q as usize) as u32;
            idx /= q as usize;
            c
        })
        .collect()
}

/// Lagrange weights `α_i = Π_{i'≠i} (v − (u + t_{i'})) / (t_i − t_{i'})`.
pub fn interpolation_coeffs(field: &FieldSpec, u: u32, v: u32, nodes: &[u32]) -> Result<Vec<u32>, CodeError> {
    for (a, &x) in nodes.iter().enumerate() {
        if nodes[..a].contains(&x) {
            return Err(CodeError::RepeatedNodes);
        }
    }
    Ok((0..nodes.len())
        .map(|i| {
            nodes.iter().enumerate().filter(|&(j, _)| j != i).fold(1, |acc, (_, &tj)| {
                let num = v ^ u ^ tj;
                let den = nodes[i] ^ tj;
                field.mul(acc, field.div(num, den).expect("distinct nodes"))
            })
        })
        .collect())
}

fn check_params(field: &FieldSpec, m: usize, d: usize) -> Result<(), CodeError> {
    if d as u64 >= u64::from(field.size()) {
        return Err(CodeError::DegreeTooLarge { d, q: field.size() });
    }
    let n = (field.size() as u128).checked_pow(m as u32).unwrap_or(u128::MAX);
    if n > 1 << 24 {
        return Err(CodeError::BudgetExceeded { needed: n, budget: 1 << 24 });
    }
    Ok(())
}

/// Rows `(u, j, s)` of the axis-parallel line test, in that nesting order.
fn rm_rows(field: &FieldSpec, m: usize, d: usize) -> Vec<SparseRow> {
    let q = field.size();
    let n = (q as usize).pow(m as u32);
    let ts = nodes(d);
    let mut rows = Vec::with_capacity(n * m * q as usize);
    for u in 0..n {
        let uc = point_coords(u, q, m);
        for j in 0..m {
            for s in 0..q {
                let vj = uc[j] ^ s;
                let alpha = interpolation_coeffs(field, uc[j], vj, &ts).expect("nodes are distinct");
                let mut entries: Vec<(usize, u32)> = ts
                    .iter()
                    .zip(&alpha)
                    .map(|(&ti, &a)| {
                        let mut p = uc.clone();
                        p[j] ^= ti;
                        (point_index(&p, q), a)
                    })
                    .collect();
                let mut vc = uc.clone();
                vc[j] = vj;
                // −1 = 1 in characteristic 2
                entries.push((point_index(&vc, q), 1));
                rows.push(normalize_row(entries));
            }
        }
    }
    rows
}

/// Exponent vectors `α ∈ {0..d}^m` in mixed-radix order (coordinate 0 fastest).
fn monomials(m: usize, d: usize) -> Vec<Vec<u32>> {
    let count = (d + 1).pow(m as u32);
    (0..count).map(|i| point_coords(i, d as u32 + 1, m)).collect()
}

/// Reed-Muller code of individual degree ≤ d on F_q^m, parity check from the line test.
pub fn reed_muller_code(field: &Arc<FieldSpec>, m: usize, d: usize) -> Result<LinearCode, CodeError> {
    check_params(field, m, d)?;
    let q = field.size();
    let n = (q as usize).pow(m as u32);
    let points: Vec<Vec<u32>> = (0..n).map(|p| point_coords(p, q, m)).collect();
    let generator = monomials(m, d)
        .iter()
        .map(|alpha| {
            points
                .iter()
                .map(|x| x.iter().zip(alpha).fold(1, |acc, (&xi, &ai)| field.mul(acc, field.pow(xi, u64::from(ai)))))
                .collect()
        })
        .collect::<Vec<Vec<u32>>>();
    Ok(LinearCode {
        field: Arc::clone(field),
        n,
        k: generator.len(),
        generator,
        parity: rm_rows(field, m, d),
        distance: None,
    })
}

/// Uniform tester over the `q^m · m · q` line-test rows.
pub fn rm_tester(code: &LinearCode, m: usize, d: usize) -> Result<LocalTester, CodeError> {
    check_params(&code.field, m, d)?;
    let q = code.q() as usize;
    if code.n != q.pow(m as u32) || code.k != (d + 1).pow(m as u32) {
        return Err(CodeError::Invalid("code does not match the given (m, d)".into()));
    }
    Ok(LocalTester::uniform(rm_rows(&code.field, m, d)))
}

/// A multivariate polynomial over F_q as a list of `(exponents, coefficient)` terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MultiPoly {
    pub m: usize,
    pub terms: Vec<(Vec<u32>, u32)>,
}

impl MultiPoly {
    /// Uniformly random polynomial of total degree ≤ d.
    pub fn random_total_degree<R: Rng + ?Sized>(field: &FieldSpec, m: usize, d: usize, rng: &mut R) -> Self {
        let terms = monomials(m, d)
            .into_iter()
            .filter(|a| a.iter().sum::<u32>() as usize <= d)
            .map(|a| (a, rng.random_range(0..field.size())))
            .collect();
        MultiPoly { m, terms }
    }

    pub fn eval(&self, field: &FieldSpec, x: &[u32]) -> u32 {
        self.terms.iter().fold(0, |acc, (a, c)| {
            let mono = x.iter().zip(a).fold(1, |p, (&xi, &ai)| field.mul(p, field.pow(xi, u64::from(ai))));
            acc ^ field.mul(*c, mono)
        })
    }

    /// Fraction of points of F_q^m where the two polynomials agree.
    pub fn agreement(&self, other: &MultiPoly, field: &FieldSpec) -> f64 {
        let q = field.size();
        let n = (q as usize).pow(self.m as u32);
        let agree = (0..n)
            .filter(|&p| {
                let x = point_coords(p, q, self.m);
                self.eval(field, &x) == other.eval(field, &x)
            })
            .count();
        agree as f64 / n as f64
    }
}
