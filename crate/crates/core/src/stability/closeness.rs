use serde::{Deserialize, Serialize};

use super::{StabilityError, UnitaryAssignment};
use crate::linalg::{dist2_tau, identity, is_pvm, matrix_serde, op_norm, tau, CMat, ONE};

const TOL: f64 = 1e-9;

/// A contraction `w: C^d → C^{d'}`, the finite-dimensional stand-in for a partial isometry.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CornerEmbedding {
    #[serde(with = "matrix_serde")]
    pub w: CMat,
}

impl CornerEmbedding {
    pub fn new(w: CMat) -> Result<Self, StabilityError> {
        let n = op_norm(&w);
        if n > 1.0 + TOL {
            return Err(StabilityError::NotContraction(n));
        }
        Ok(CornerEmbedding { w })
    }

    pub fn identity(d: usize) -> Self {
        CornerEmbedding { w: identity(d) }
    }

    /// Inclusion of `C^d` as the first `d` coordinates of `C^{d'}`.
    pub fn inclusion(d: usize, d_target: usize) -> Result<Self, StabilityError> {
        if d_target < d {
            return Err(StabilityError::DimensionMismatch { expected: d, found: d_target });
        }
        Ok(CornerEmbedding { w: CMat::from_fn(d_target, d, |i, j| if i == j { ONE } else { Default::default() }) })
    }

    pub fn source_dim(&self) -> usize {
        self.w.ncols()
    }

    pub fn target_dim(&self) -> usize {
        self.w.nrows()
    }

    /// `τ(Id_d − w*w)`.
    pub fn source_deficit(&self) -> f64 {
        1.0 - tau(&(self.w.adjoint() * &self.w)).re
    }

    /// `τ'(Id_{d'} − ww*)`.
    pub fn target_deficit(&self) -> f64 {
        1.0 - tau(&(&self.w * self.w.adjoint())).re
    }

    pub fn max_deficit(&self) -> f64 {
        self.source_deficit().max(self.target_deficit())
    }

    /// `w* X w`.
    pub fn pull(&self, x: &CMat) -> CMat {
        self.w.adjoint() * x * &self.w
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessReport {
    /// `E_{i∼μ_S} ‖A_i − w* B_i w‖²_τ`.
    pub delta_dist: f64,
    /// `max(τ(Id − w*w), τ'(Id − ww*))`.
    pub delta_trace: f64,
    pub delta: f64,
}

/// Distance between two assignments through a caller-supplied embedding.
pub fn closeness(a: &UnitaryAssignment, b: &UnitaryAssignment, w: &CornerEmbedding, mu_s: &[f64]) -> Result<ClosenessReport, StabilityError> {
    if w.source_dim() != a.d {
        return Err(StabilityError::DimensionMismatch { expected: a.d, found: w.source_dim() });
    }
    if w.target_dim() != b.d {
        return Err(StabilityError::DimensionMismatch { expected: b.d, found: w.target_dim() });
    }
    if mu_s.len() > a.generators.len() || mu_s.len() > b.generators.len() {
        return Err(StabilityError::MissingGenerator(mu_s.len() - 1));
    }
    let delta_dist: f64 =
        mu_s.iter().enumerate().map(|(i, &m)| m * dist2_tau(&a.generators[i], &w.pull(&b.generators[i]))).sum();
    let delta_trace = w.max_deficit();
    Ok(ClosenessReport { delta_dist, delta_trace, delta: delta_dist.max(delta_trace) })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PullBackReport {
    /// `Σ_a τ(Q̃_a²)`.
    pub purity: f64,
    /// Largest trace deficit of the embedding.
    pub epsilon: f64,
    /// `1 − 3ε`.
    pub bound: f64,
    pub holds: bool,
}

/// `Q̃_a = w* T_a w + (Id − w*w)/|A|`, a POVM on the source space, with its purity.
pub fn pull_back_povm(t: &[CMat], w: &CornerEmbedding) -> Result<(Vec<CMat>, PullBackReport), StabilityError> {
    if !is_pvm(t, TOL) {
        return Err(StabilityError::NotPvm);
    }
    if t[0].nrows() != w.target_dim() {
        return Err(StabilityError::DimensionMismatch { expected: w.target_dim(), found: t[0].nrows() });
    }
    let d = w.source_dim();
    let fill = (identity(d) - w.w.adjoint() * &w.w).unscale(t.len() as f64);
    let q: Vec<CMat> = t.iter().map(|ta| w.pull(ta) + &fill).collect();
    let purity: f64 = q.iter().map(|qa| tau(&(qa * qa)).re).sum();
    let epsilon = w.max_deficit();
    let bound = 1.0 - 3.0 * epsilon;
    Ok((q, PullBackReport { purity, epsilon, bound, holds: purity >= bound - 1e-12 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::{direct_sum, expi, haar_unitary, is_povm, random_hermitian, random_pvm};
    use crate::rng::stream;

    fn random_assignment(d: usize, n: usize, seed: u64) -> UnitaryAssignment {
        let mut rng = stream(seed, "closeness");
        UnitaryAssignment::new((0..n).map(|_| haar_unitary(d, &mut rng)).collect()).unwrap()
    }

    #[test]
    fn identical_assignments() {
        let a = random_assignment(3, 2, 1);
        let r = closeness(&a, &a, &CornerEmbedding::identity(3), &[0.5, 0.5]).unwrap();
        assert!(r.delta_dist < 1e-24 && r.delta_trace.abs() < 1e-15);
    }

    #[test]
    fn block_inclusion_has_half_deficit() {
        let a = random_assignment(3, 2, 2);
        let b = UnitaryAssignment { d: 6, generators: a.generators.iter().map(|g| direct_sum(&[g.clone(), g.clone()])).collect() };
        let w = CornerEmbedding::inclusion(3, 6).unwrap();
        let r = closeness(&a, &b, &w, &[0.5, 0.5]).unwrap();
        assert!(r.delta_dist < 1e-24);
        assert!((r.delta_trace - 0.5).abs() < 1e-15);
        assert!(w.source_deficit().abs() < 1e-15);
    }

    #[test]
    fn small_perturbations() {
        let a = random_assignment(4, 1, 3);
        let mut rng = stream(4, "closeness/h");
        let h = random_hermitian(4, &mut rng);
        for theta in [0.01, 0.1] {
            let b = UnitaryAssignment { d: 4, generators: vec![&a.generators[0] * expi(&h, theta)] };
            let r = closeness(&a, &b, &CornerEmbedding::identity(4), &[1.0]).unwrap();
            assert!(r.delta_dist <= theta * theta + 1e-15, "{theta}: {}", r.delta_dist);
        }
    }

    #[test]
    fn pull_back_identity_and_inclusion() {
        let mut rng = stream(5, "pull");
        let t = random_pvm(4, 3, &mut rng);
        let (q, rep) = pull_back_povm(&t, &CornerEmbedding::identity(4)).unwrap();
        assert!(q.iter().zip(&t).all(|(a, b)| dist2_tau(a, b) < 1e-24));
        assert!((rep.purity - 1.0).abs() < 1e-12);

        let (q, rep) = pull_back_povm(&t, &CornerEmbedding::inclusion(2, 4).unwrap()).unwrap();
        assert!(is_povm(&q, 1e-9));
        assert!((rep.epsilon - 0.5).abs() < 1e-15);
        assert!(rep.holds && rep.purity >= 1.0 - 1.5);
        assert!(pull_back_povm(&[identity(2).scale(0.5), identity(2).scale(0.5)], &CornerEmbedding::identity(2)).is_err());
    }

    #[test]
    fn embedding_rejects_expansions() {
        assert!(CornerEmbedding::new(identity(2).scale(1.5)).is_err());
    }
}
