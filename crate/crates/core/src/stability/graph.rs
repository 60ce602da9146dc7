use serde::{Deserialize, Serialize};

use super::{closeness, relation_defects, Assignment, CornerEmbedding, PermutationAssignment, StabilityError, UnitaryAssignment};
use crate::linalg::identity;
use crate::presentation::{generate_group, is_automorphism, relation_orbits, Permutation, Presentation, PresentationError};

/// Largest `k + |E|` accepted by [`graph_rep`].
pub const MAX_GRAPH_BITS: usize = 24;

/// Involutions on `F_2^{[k] ∪ E}` that commute exactly along non-edges.
///
/// `A_i` flips vertex bit `i` and, for every edge `{i, j}` with `i < j`, adds `x_j` to the edge
/// bit. For an edge the two orders of `A_i A_j` disagree on the edge bit of every basis vector.
pub fn graph_rep(k: usize, edges: &[(usize, usize)]) -> Result<PermutationAssignment, StabilityError> {
    let bits = k + edges.len();
    if bits > MAX_GRAPH_BITS {
        return Err(StabilityError::Budget(format!("k + |E| = {bits} exceeds {MAX_GRAPH_BITS}")));
    }
    let mut norm = Vec::with_capacity(edges.len());
    for &(a, b) in edges {
        if a == b || a >= k || b >= k {
            return Err(PresentationError::BadGenerator { relation: norm.len(), generator: a.max(b), n: k }.into());
        }
        norm.push((a.min(b), a.max(b)));
    }
    let d = 1usize << bits;
    let perms = (0..k)
        .map(|i| {
            let owned: Vec<(usize, usize)> =
                norm.iter().enumerate().filter(|(_, &(a, _))| a == i).map(|(e, &(_, b))| (k + e, b)).collect();
            (0..d as u32)
                .map(|x| {
                    let mut y = x ^ (1 << i);
                    for &(ebit, j) in &owned {
                        y ^= ((x >> j) & 1) << ebit;
                    }
                    y
                })
                .collect()
        })
        .collect();
    Ok(PermutationAssignment { d, perms })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AmplificationReport {
    pub group_order: usize,
    pub orbit_weights: Vec<f64>,
    /// `|O_i| · min_{r ∈ O_i} μ_R(r)`; equals the orbit weight when `μ_R` is constant on orbits.
    pub effective_weights: Vec<f64>,
    /// Defect of the input assignment.
    pub epsilon: f64,
    /// `max_i(1/w_i) · ε`.
    pub bound: f64,
    /// Worst relation defect of the amplified assignment, over every relation.
    pub max_relation_defect: f64,
    pub holds: bool,
}

/// `ρ'(s) = ⊕_{α∈Φ} ρ(α(s))` over the group generated by `perms`, with the worst-case bound.
pub fn automorphism_orbit_amplify<A: Assignment>(
    a: &A,
    perms: &[Permutation],
    p: &Presentation,
    budget: usize,
) -> Result<(A, AmplificationReport), StabilityError> {
    for g in perms {
        if g.len() != p.n || !is_automorphism(p, g) {
            return Err(PresentationError::NotAutomorphism.into());
        }
    }
    let group = generate_group(p.n, perms, budget)?;
    let (orbits, orbit_weights) = relation_orbits(p, &group)?;
    let defects = relation_defects(a, p)?;
    let epsilon: f64 = p.relations.iter().zip(&defects).map(|(r, x)| r.weight * x).sum();
    let effective_weights: Vec<f64> = orbits
        .iter()
        .map(|o| o.len() as f64 * o.iter().map(|&j| p.relations[j].weight).fold(f64::INFINITY, f64::min))
        .collect();
    let inv_w = effective_weights.iter().fold(0.0f64, |m, &w| m.max(if w > 0.0 { 1.0 / w } else { f64::INFINITY }));
    let bound = if epsilon == 0.0 { 0.0 } else { inv_w * epsilon };
    let amplified = a.amplified(&group);
    let out = relation_defects(&amplified, p)?;
    let max_relation_defect = out.iter().fold(0.0f64, |m, &x| m.max(x));
    let report = AmplificationReport {
        group_order: group.len(),
        orbit_weights,
        effective_weights,
        epsilon,
        bound,
        max_relation_defect,
        holds: max_relation_defect <= bound + 1e-12,
    };
    Ok((amplified, report))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FarnessReport {
    pub characters_checked: usize,
    /// `min_χ E_{i∼μ_S} ‖A_i − χ(i) Id‖²_τ`.
    pub min_distance: f64,
    pub best_character: Vec<i8>,
    /// Only one-dimensional characters with `w = Id` are compared, never all representations.
    pub partial: bool,
}

/// Distance from `a` to every scalar character representation `x_i ↦ ±Id` on the same space.
pub fn character_farness_partial(a: &UnitaryAssignment, mu_s: &[f64]) -> Result<FarnessReport, StabilityError> {
    let k = mu_s.len();
    if k > 12 {
        return Err(StabilityError::Budget(format!("{k} generators give more than 2^12 characters")));
    }
    let w = CornerEmbedding::identity(a.d);
    let mut best = (f64::INFINITY, Vec::new());
    for c in 0..1u32 << k {
        let signs: Vec<i8> = (0..k).map(|i| if c >> i & 1 == 1 { -1 } else { 1 }).collect();
        let b = UnitaryAssignment { d: a.d, generators: signs.iter().map(|&s| identity(a.d).scale(s as f64)).collect() };
        let r = closeness(a, &b, &w, mu_s)?;
        if r.delta_dist < best.0 {
            best = (r.delta_dist, signs);
        }
    }
    Ok(FarnessReport { characters_checked: 1 << k, min_distance: best.0, best_character: best.1, partial: true })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::dist2_tau;
    use crate::presentation::{std_z2k, Word};
    use crate::stability::{defect, DefectMode};

    fn comm_norm(a: &PermutationAssignment, i: usize, j: usize) -> f64 {
        let dense = a.to_dense(1 << 12).unwrap();
        let (x, y) = (&dense.generators[i], &dense.generators[j]);
        dist2_tau(&(x * y), &(y * x))
    }

    #[test]
    fn commutator_norms() {
        let a = graph_rep(2, &[]).unwrap();
        assert_eq!(comm_norm(&a, 0, 1), 0.0);
        let a = graph_rep(2, &[(0, 1)]).unwrap();
        assert_eq!(comm_norm(&a, 0, 1), 2.0);
        let a = graph_rep(4, &[(0, 1), (2, 3), (1, 2)]).unwrap();
        assert_eq!(comm_norm(&a, 0, 2), 0.0);
        assert_eq!(comm_norm(&a, 2, 1), 2.0);
        for i in 0..4 {
            assert_eq!(a.word_defect(&Word::square(i)).unwrap(), 0.0);
        }
    }

    #[test]
    fn matching_defect() {
        let a = graph_rep(4, &[(0, 1), (2, 3)]).unwrap();
        let e = defect(&a, &std_z2k(4), DefectMode::Exhaustive).unwrap().epsilon;
        assert!((e - 2.0 / 6.0).abs() < 1e-12);
        let dense = a.to_dense(1 << 12).unwrap();
        let e2 = defect(&dense, &std_z2k(4), DefectMode::Exhaustive).unwrap().epsilon;
        assert!((e - e2).abs() < 1e-12);
    }

    #[test]
    fn budget_and_bad_edges() {
        assert!(graph_rep(20, &[(0, 1); 5]).is_err());
        assert!(graph_rep(3, &[(1, 1)]).is_err());
        assert!(graph_rep(3, &[(0, 3)]).is_err());
    }

    #[test]
    fn amplification_trivial_group() {
        let a = graph_rep(3, &[(0, 1)]).unwrap();
        let id: Permutation = vec![0, 1, 2];
        let (b, rep) = automorphism_orbit_amplify(&a, &[id], &std_z2k(3), 100).unwrap();
        assert_eq!(a, b);
        assert_eq!(rep.group_order, 1);
    }

    #[test]
    fn amplification_under_sym3() {
        let p = std_z2k(3);
        let a = graph_rep(3, &[(0, 1)]).unwrap();
        let (b, rep) = automorphism_orbit_amplify(&a, &[vec![1, 0, 2], vec![1, 2, 0]], &p, 100).unwrap();
        assert_eq!(rep.group_order, 6);
        assert_eq!(b.d, 6 * a.d);
        assert_eq!(rep.orbit_weights.len(), 2);
        assert!(rep.orbit_weights.iter().all(|w| (w - 0.5).abs() < 1e-12));
        assert!((rep.epsilon - 1.0 / 3.0).abs() < 1e-12);
        assert!((rep.bound - 2.0 / 3.0).abs() < 1e-12);
        // each commutator sees the edge in 2 of the 6 blocks
        assert!((rep.max_relation_defect - 2.0 / 3.0).abs() < 1e-12);
        assert!(rep.holds);
        assert!(automorphism_orbit_amplify(&a, &[vec![0, 0, 1]], &p, 100).is_err());
    }

    #[test]
    fn farness_against_characters() {
        let a = graph_rep(3, &[(0, 1)]).unwrap().to_dense(1 << 10).unwrap();
        let r = character_farness_partial(&a, &[1.0 / 3.0; 3]).unwrap();
        assert_eq!(r.characters_checked, 8);
        assert!((r.min_distance - 2.0).abs() < 1e-12);
        assert!(r.partial);
    }
}
