//! Dense complex matrices with the dimension-normalized trace.

use nalgebra::{DMatrix, SymmetricEigen};
use num_complex::Complex64;
use rand::Rng;
use rand_distr::StandardNormal;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type CMat = DMatrix<Complex64>;

pub const ONE: Complex64 = Complex64::new(1.0, 0.0);
pub const ZERO: Complex64 = Complex64::new(0.0, 0.0);

pub fn identity(d: usize) -> CMat {
    CMat::identity(d, d)
}

/// `τ(x) = Tr(x)/d`.
pub fn tau(x: &CMat) -> Complex64 {
    x.trace() / x.nrows() as f64
}

/// `‖x‖²_τ = τ(x* x)`, the normalized Hilbert-Schmidt norm squared.
pub fn norm2_tau(x: &CMat) -> f64 {
    x.iter().map(|z| z.norm_sqr()).sum::<f64>() / x.nrows() as f64
}

/// `‖a − b‖²_τ`.
pub fn dist2_tau(a: &CMat, b: &CMat) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm_sqr()).sum::<f64>() / a.nrows() as f64
}

/// Largest singular value.
pub fn op_norm(x: &CMat) -> f64 {
    if x.is_empty() {
        return 0.0;
    }
    let frob = x.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    if frob == 0.0 {
        return 0.0;
    }
    let h = x.adjoint() * x;
    let eig = SymmetricEigen::new(h).eigenvalues;
    eig.iter().fold(0.0f64, |a, &v| a.max(v)).max(0.0).sqrt()
}

pub fn is_unitary(u: &CMat, tol: f64) -> bool {
    u.is_square() && op_norm(&(u.adjoint() * u - identity(u.nrows()))) <= tol
}

pub fn is_hermitian(h: &CMat, tol: f64) -> bool {
    h.is_square() && op_norm(&(h - h.adjoint())) <= tol
}

/// Eigen-decomposition `h = V diag(λ) V*` of a Hermitian matrix.
pub fn hermitian_eigen(h: &CMat) -> (Vec<f64>, CMat) {
    let herm = (h + h.adjoint()).scale(0.5);
    let e = SymmetricEigen::new(herm);
    (e.eigenvalues.iter().copied().collect(), e.eigenvectors)
}

/// `V diag(f(λ)) V*`.
pub fn hermitian_apply(h: &CMat, f: impl Fn(f64) -> Complex64) -> CMat {
    let (vals, vecs) = hermitian_eigen(h);
    let mut scaled = vecs.clone();
    for (j, &l) in vals.iter().enumerate() {
        let c = f(l);
        for z in scaled.column_mut(j).iter_mut() {
            *z *= c;
        }
    }
    scaled * vecs.adjoint()
}

/// `exp(iθH)` for Hermitian `H`.
pub fn expi(h: &CMat, theta: f64) -> CMat {
    hermitian_apply(h, |l| Complex64::from_polar(1.0, theta * l))
}

/// Haar-random unitary via QR of a complex Gaussian matrix with the phase correction.
pub fn haar_unitary<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let qr = g.qr();
    let (mut q, r) = (qr.q(), qr.r());
    for j in 0..d {
        let rjj = r[(j, j)];
        let phase = if rjj.norm() > 0.0 { rjj / rjj.norm() } else { ONE };
        for z in q.column_mut(j).iter_mut() {
            *z *= phase;
        }
    }
    q
}

/// Hermitian matrix with Gaussian entries, rescaled to operator norm 1.
pub fn random_hermitian<R: Rng + ?Sized>(d: usize, rng: &mut R) -> CMat {
    let g = CMat::from_fn(d, d, |_, _| {
        Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
    });
    let h = (&g + g.adjoint()).scale(0.5);
    let n = op_norm(&h);
    if n > 0.0 {
        h.unscale(n)
    } else {
        h
    }
}

/// Projective measurement with `outcomes` outcomes on `C^d`: a random orthonormal basis split
/// into consecutive groups of random (possibly zero) sizes.
pub fn random_pvm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Vec<CMat> {
    let u = haar_unitary(d, rng);
    let labels: Vec<usize> = (0..d).map(|_| rng.random_range(0..outcomes)).collect();
    (0..outcomes)
        .map(|a| {
            let mut p = CMat::zeros(d, d);
            for (j, _) in labels.iter().enumerate().filter(|(_, &l)| l == a) {
                let v = u.column(j);
                p += v * v.adjoint();
            }
            p
        })
        .collect()
}

/// Random POVM: `A_a = S^{-1/2} G_a S^{-1/2}` with `G_a = X_a X_a*` and `S = Σ G_a`.
pub fn random_povm<R: Rng + ?Sized>(d: usize, outcomes: usize, rng: &mut R) -> Vec<CMat> {
    let gs: Vec<CMat> = (0..outcomes)
        .map(|_| {
            let x = CMat::from_fn(d, d, |_, _| {
                Complex64::new(rng.sample::<f64, _>(StandardNormal), rng.sample::<f64, _>(StandardNormal))
            });
            &x * x.adjoint()
        })
        .collect();
    let s = gs.iter().fold(CMat::zeros(d, d), |acc, g| acc + g);
    let s_inv_half = hermitian_apply(&s, |l| Complex64::new(1.0 / l.max(1e-300).sqrt(), 0.0));
    gs.iter().map(|g| &s_inv_half * g * &s_inv_half).collect()
}

/// Kronecker product `a ⊗ b`.
pub fn kron(a: &CMat, b: &CMat) -> CMat {
    a.kronecker(b)
}

/// Block-diagonal direct sum.
pub fn direct_sum(blocks: &[CMat]) -> CMat {
    let d: usize = blocks.iter().map(|b| b.nrows()).sum();
    let mut out = CMat::zeros(d, d);
    let mut off = 0;
    for b in blocks {
        out.view_mut((off, off), (b.nrows(), b.ncols())).copy_from(b);
        off += b.nrows();
    }
    out
}

/// Whether `ps` is a PVM: Hermitian, idempotent, summing to the identity (within `tol`).
pub fn is_pvm(ps: &[CMat], tol: f64) -> bool {
    let Some(d) = ps.first().map(|p| p.nrows()) else { return false };
    let sum = ps.iter().fold(CMat::zeros(d, d), |acc, p| acc + p);
    op_norm(&(sum - identity(d))) <= tol
        && ps.iter().all(|p| p.nrows() == d && is_hermitian(p, tol) && op_norm(&(p * p - p)) <= tol)
}

/// Whether `ps` is a POVM: Hermitian, PSD, summing to the identity (within `tol`).
pub fn is_povm(ps: &[CMat], tol: f64) -> bool {
    let Some(d) = ps.first().map(|p| p.nrows()) else { return false };
    let sum = ps.iter().fold(CMat::zeros(d, d), |acc, p| acc + p);
    op_norm(&(sum - identity(d))) <= tol
        && ps.iter().all(|p| is_hermitian(p, tol) && hermitian_eigen(p).0.iter().all(|&l| l >= -tol))
}

/// Serde adapter: a matrix is an array of rows, each an array of `[re, im]` pairs.
pub mod matrix_serde {
    use super::*;

    pub fn to_rows(m: &CMat) -> Vec<Vec<[f64; 2]>> {
        (0..m.nrows()).map(|i| (0..m.ncols()).map(|j| [m[(i, j)].re, m[(i, j)].im]).collect()).collect()
    }

    pub fn from_rows(rows: &[Vec<[f64; 2]>]) -> Result<CMat, String> {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        if rows.iter().any(|x| x.len() != c) {
            return Err("ragged matrix rows".into());
        }
        Ok(CMat::from_fn(r, c, |i, j| Complex64::new(rows[i][j][0], rows[i][j][1])))
    }

    pub fn serialize<S: Serializer>(m: &CMat, s: S) -> Result<S::Ok, S::Error> {
        to_rows(m).serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<CMat, D::Error> {
        let rows = Vec::<Vec<[f64; 2]>>::deserialize(d)?;
        from_rows(&rows).map_err(serde::de::Error::custom)
    }
}

/// Serde adapter for a list of matrices.
pub mod matrix_vec_serde {
    use super::*;

    pub fn serialize<S: Serializer>(ms: &[CMat], s: S) -> Result<S::Ok, S::Error> {
        ms.iter().map(matrix_serde::to_rows).collect::<Vec<_>>().serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<CMat>, D::Error> {
        let all = Vec::<Vec<Vec<[f64; 2]>>>::deserialize(d)?;
        all.iter().map(|m| matrix_serde::from_rows(m).map_err(serde::de::Error::custom)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;

    #[test]
    fn haar_is_unitary_and_norms() {
        let mut rng = stream(1, "linalg");
        let u = haar_unitary(6, &mut rng);
        assert!(is_unitary(&u, 1e-10));
        assert!((norm2_tau(&u) - 1.0).abs() < 1e-12);
        assert!((op_norm(&u) - 1.0).abs() < 1e-10);
        assert!((tau(&identity(5)).re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn expi_of_hermitian() {
        let mut rng = stream(2, "linalg");
        let h = random_hermitian(5, &mut rng);
        assert!((op_norm(&h) - 1.0).abs() < 1e-10);
        let u = expi(&h, 0.3);
        assert!(is_unitary(&u, 1e-10));
        assert!(dist2_tau(&expi(&h, 0.0), &identity(5)) < 1e-24);
    }

    #[test]
    fn random_measurements_are_valid() {
        let mut rng = stream(3, "linalg");
        assert!(is_pvm(&random_pvm(6, 3, &mut rng), 1e-9));
        assert!(is_povm(&random_povm(4, 3, &mut rng), 1e-9));
        let m = direct_sum(&[identity(2), identity(1)]);
        assert_eq!(m, identity(3));
    }

    #[test]
    fn matrix_json_roundtrip() {
        let mut rng = stream(4, "linalg");
        let u = haar_unitary(3, &mut rng);
        let back = matrix_serde::from_rows(&matrix_serde::to_rows(&u)).unwrap();
        assert_eq!(u, back);
    }
}
