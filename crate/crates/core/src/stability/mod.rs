//! Defects, closeness, rounding and the permutation construction for lower bounds.

mod closeness;
mod graph;
mod spectral;

use std::collections::BTreeMap;

use num_complex::Complex64;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::linalg::{dist2_tau, identity, is_unitary, matrix_vec_serde, CMat};
use crate::presentation::{Permutation, Presentation, PresentationError, RelationSampler, Word};

pub use closeness::{closeness, pull_back_povm, ClosenessReport, CornerEmbedding, PullBackReport};
pub use graph::{
    automorphism_orbit_amplify, character_farness_partial, graph_rep, AmplificationReport, FarnessReport, MAX_GRAPH_BITS,
};
pub use spectral::{
    fourier_observables, inverse_spectral_gap, pvm_from_commuting_involutions, sign_round, SignRoundReport,
    SIGN_ROUND_CONSTANT,
};

pub const UNITARY_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum StabilityError {
    #[error("generator {0} is not covered by the assignment")]
    MissingGenerator(usize),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("matrix for generator {0} is not unitary")]
    NotUnitary(usize),
    #[error("embedding is not a contraction (operator norm {0})")]
    NotContraction(f64),
    #[error("input is not a projective measurement")]
    NotPvm,
    #[error("inputs do not pairwise commute and square to the identity (residual {0:.3e})")]
    NotCommutingInvolutions(f64),
    #[error("the walk is disconnected: a nonzero character has Fourier coefficient 1")]
    InfiniteKappa,
    #[error("distribution length {0} is not a power of two up to 2^20")]
    BadDistribution(usize),
    #[error("size budget exceeded: {0}")]
    Budget(String),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
}

/// Generators mapped to operators on a common space, evaluated through relation defects.
pub trait Assignment {
    fn dim(&self) -> usize;
    fn generator_count(&self) -> usize;
    /// `‖φ(w) − Id‖²_τ`.
    fn word_defect(&self, w: &Word) -> Result<f64, StabilityError>;
    /// `s ↦ ⊕_α φ(α(s))`.
    fn amplified(&self, group: &[Permutation]) -> Self
    where
        Self: Sized;
}

/// Dense unitaries, one per generator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct UnitaryAssignment {
    pub d: usize,
    #[serde(with = "matrix_vec_serde")]
    pub generators: Vec<CMat>,
}

impl UnitaryAssignment {
    pub fn new(generators: Vec<CMat>) -> Result<Self, StabilityError> {
        let d = generators.first().map_or(0, |g| g.nrows());
        let a = UnitaryAssignment { d, generators };
        a.validate()?;
        Ok(a)
    }

    pub fn validate(&self) -> Result<(), StabilityError> {
        for (i, g) in self.generators.iter().enumerate() {
            if g.nrows() != self.d || g.ncols() != self.d {
                return Err(StabilityError::DimensionMismatch { expected: self.d, found: g.nrows() });
            }
            if !is_unitary(g, UNITARY_TOL) {
                return Err(StabilityError::NotUnitary(i));
            }
        }
        Ok(())
    }

    /// Simultaneous conjugation `U_i ↦ V U_i V*`.
    pub fn conjugated(&self, v: &CMat) -> Self {
        UnitaryAssignment { d: self.d, generators: self.generators.iter().map(|g| v * g * v.adjoint()).collect() }
    }
}

/// Evaluates a word left to right; exponent −1 uses the adjoint. The empty word is the identity.
pub fn evaluate_word(w: &Word, a: &UnitaryAssignment) -> Result<CMat, StabilityError> {
    let mut acc = identity(a.d);
    for &(g, e) in w.letters() {
        let m = a.generators.get(g).ok_or(StabilityError::MissingGenerator(g))?;
        acc = if e >= 0 { acc * m } else { acc * m.adjoint() };
    }
    Ok(acc)
}

impl Assignment for UnitaryAssignment {
    fn dim(&self) -> usize {
        self.d
    }

    fn generator_count(&self) -> usize {
        self.generators.len()
    }

    fn word_defect(&self, w: &Word) -> Result<f64, StabilityError> {
        Ok(dist2_tau(&evaluate_word(w, self)?, &identity(self.d)))
    }

    fn amplified(&self, group: &[Permutation]) -> Self {
        let gens = (0..self.generators.len())
            .map(|s| crate::linalg::direct_sum(&group.iter().map(|alpha| self.generators[alpha[s]].clone()).collect::<Vec<_>>()))
            .collect();
        UnitaryAssignment { d: self.d * group.len(), generators: gens }
    }
}

/// Permutation matrices stored as maps: generator `g` sends basis vector `x` to `perms[g][x]`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PermutationAssignment {
    pub d: usize,
    pub perms: Vec<Vec<u32>>,
}

impl PermutationAssignment {
    fn inverse(p: &[u32]) -> Vec<u32> {
        let mut inv = vec![0u32; p.len()];
        for (x, &y) in p.iter().enumerate() {
            inv[y as usize] = x as u32;
        }
        inv
    }

    /// Basis map of `φ(w)`: `φ(w) e_x = e_{map[x]}`.
    pub fn word_map(&self, w: &Word) -> Result<Vec<u32>, StabilityError> {
        let mut map: Vec<u32> = (0..self.d as u32).collect();
        // the rightmost letter acts first
        for &(g, e) in w.letters().iter().rev() {
            let p = self.perms.get(g).ok_or(StabilityError::MissingGenerator(g))?;
            let p = if e >= 0 { p.clone() } else { Self::inverse(p) };
            for m in map.iter_mut() {
                *m = p[*m as usize];
            }
        }
        Ok(map)
    }

    /// Number of basis vectors moved by `φ(w)`; the defect is exactly `2·moved/d`.
    pub fn moved_points(&self, w: &Word) -> Result<usize, StabilityError> {
        Ok(self.word_map(w)?.iter().enumerate().filter(|&(x, &y)| x as u32 != y).count())
    }

    pub fn to_dense(&self, budget: usize) -> Result<UnitaryAssignment, StabilityError> {
        if self.d > budget {
            return Err(StabilityError::Budget(format!("dense dimension {} exceeds {budget}", self.d)));
        }
        let generators = self
            .perms
            .iter()
            .map(|p| {
                let mut m = CMat::zeros(self.d, self.d);
                for (x, &y) in p.iter().enumerate() {
                    m[(y as usize, x)] = Complex64::new(1.0, 0.0);
                }
                m
            })
            .collect();
        Ok(UnitaryAssignment { d: self.d, generators })
    }
}

impl Assignment for PermutationAssignment {
    fn dim(&self) -> usize {
        self.d
    }

    fn generator_count(&self) -> usize {
        self.perms.len()
    }

    fn word_defect(&self, w: &Word) -> Result<f64, StabilityError> {
        Ok(2.0 * self.moved_points(w)? as f64 / self.d as f64)
    }

    fn amplified(&self, group: &[Permutation]) -> Self {
        let perms = (0..self.perms.len())
            .map(|s| {
                group
                    .iter()
                    .enumerate()
                    .flat_map(|(block, alpha)| {
                        let off = (block * self.d) as u32;
                        self.perms[alpha[s]].iter().map(move |&y| y + off)
                    })
                    .collect()
            })
            .collect();
        PermutationAssignment { d: self.d * group.len(), perms }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DefectMode {
    Exhaustive,
    Sampled { samples: usize, seed: u64 },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DefectReport {
    /// `E_{r∼μ_R} ‖φ(r) − Id‖²_τ`.
    pub epsilon: f64,
    /// Contribution of each tag to `epsilon`.
    pub per_tag: BTreeMap<String, f64>,
    pub relations_evaluated: usize,
    pub max_relation_defect: f64,
    pub method: String,
    pub samples: Option<usize>,
    pub seed: Option<u64>,
}

fn check_cover<A: Assignment + ?Sized>(a: &A, p: &Presentation) -> Result<(), StabilityError> {
    if a.generator_count() < p.n {
        return Err(StabilityError::MissingGenerator(a.generator_count()));
    }
    Ok(())
}

/// Per-relation defects `‖φ(r) − Id‖²_τ`, in relation order.
pub fn relation_defects<A: Assignment + ?Sized>(a: &A, p: &Presentation) -> Result<Vec<f64>, StabilityError> {
    check_cover(a, p)?;
    p.relations.iter().map(|r| a.word_defect(&r.word)).collect()
}

/// The `μ_R`-weighted relation defect, exactly over all weighted relations or by seeded sampling.
pub fn defect<A: Assignment + ?Sized>(a: &A, p: &Presentation, mode: DefectMode) -> Result<DefectReport, StabilityError> {
    check_cover(a, p)?;
    let mut per_tag: BTreeMap<String, f64> = BTreeMap::new();
    let mut max_def = 0.0f64;
    match mode {
        DefectMode::Exhaustive => {
            let mut eps = 0.0;
            let mut count = 0;
            for r in p.relations.iter().filter(|r| r.weight > 0.0) {
                let x = a.word_defect(&r.word)?;
                eps += r.weight * x;
                *per_tag.entry(r.tag.name().to_string()).or_default() += r.weight * x;
                max_def = max_def.max(x);
                count += 1;
            }
            Ok(DefectReport {
                epsilon: eps,
                per_tag,
                relations_evaluated: count,
                max_relation_defect: max_def,
                method: "exhaustive".into(),
                samples: None,
                seed: None,
            })
        }
        DefectMode::Sampled { samples, seed } => {
            let sampler = RelationSampler::new(p)?;
            let mut rng = crate::rng::stream(seed, "stability/defect");
            let mut eps = 0.0;
            for _ in 0..samples {
                let r = sampler.sample(&mut rng);
                let x = a.word_defect(&r.word)?;
                eps += x;
                *per_tag.entry(r.tag.name().to_string()).or_default() += x;
                max_def = max_def.max(x);
            }
            let n = samples.max(1) as f64;
            per_tag.values_mut().for_each(|v| *v /= n);
            Ok(DefectReport {
                epsilon: eps / n,
                per_tag,
                relations_evaluated: samples,
                max_relation_defect: max_def,
                method: "sampled".into(),
                samples: Some(samples),
                seed: Some(seed),
            })
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::haar_unitary;
    use crate::presentation::std_z2k;
    use crate::rng::stream;

    fn diag(v: &[f64]) -> CMat {
        CMat::from_diagonal(&nalgebra::DVector::from_iterator(v.len(), v.iter().map(|&x| Complex64::new(x, 0.0))))
    }

    #[test]
    fn empty_word_and_commuting_diagonals() {
        let a = UnitaryAssignment::new(vec![diag(&[1.0, -1.0]), diag(&[-1.0, -1.0])]).unwrap();
        assert_eq!(evaluate_word(&Word::default(), &a).unwrap(), identity(2));
        let c = evaluate_word(&Word::commutator(0, 1), &a).unwrap();
        assert!(dist2_tau(&c, &identity(2)) < 1e-30);
        assert!(matches!(evaluate_word(&Word::square(5), &a), Err(StabilityError::MissingGenerator(5))));
    }

    #[test]
    fn characters_have_zero_defect() {
        let p = std_z2k(3);
        let a = UnitaryAssignment::new(vec![diag(&[1.0]), diag(&[-1.0]), diag(&[-1.0])]).unwrap();
        assert_eq!(defect(&a, &p, DefectMode::Exhaustive).unwrap().epsilon, 0.0);
    }

    #[test]
    fn haar_pairs_concentrate_near_two() {
        let p = std_z2k(4);
        let mut rng = stream(9, "haar-defect");
        let a = UnitaryAssignment::new((0..4).map(|_| haar_unitary(8, &mut rng)).collect()).unwrap();
        let rep = defect(&a, &p, DefectMode::Exhaustive).unwrap();
        assert!(rep.epsilon > 1.7 && rep.epsilon < 2.3, "{}", rep.epsilon);
        assert!(rep.epsilon <= 4.0);
    }

    #[test]
    fn defect_is_conjugation_invariant_and_sampling_is_seeded() {
        let p = std_z2k(3);
        let mut rng = stream(10, "conj");
        let a = UnitaryAssignment::new((0..3).map(|_| haar_unitary(4, &mut rng)).collect()).unwrap();
        let v = haar_unitary(4, &mut rng);
        let e1 = defect(&a, &p, DefectMode::Exhaustive).unwrap().epsilon;
        let e2 = defect(&a.conjugated(&v), &p, DefectMode::Exhaustive).unwrap().epsilon;
        assert!((e1 - e2).abs() < 1e-9);
        let mode = DefectMode::Sampled { samples: 200, seed: 5 };
        assert_eq!(defect(&a, &p, mode).unwrap(), defect(&a, &p, mode).unwrap());
    }

    #[test]
    fn assignment_json_roundtrip() {
        let a = UnitaryAssignment::new(vec![diag(&[1.0, -1.0])]).unwrap();
        let s = serde_json::to_string(&a).unwrap();
        assert!(s.starts_with("{\"d\":2,\"generators\":[[[[1.0,0.0],[0.0,0.0]]"));
        let b: UnitaryAssignment = serde_json::from_str(&s).unwrap();
        assert_eq!(a, b);
    }
}
