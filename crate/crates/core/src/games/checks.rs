use serde::{Deserialize, Serialize};

use super::{code_game, game_value, tau_product, Game, GameError, Strategy, PVM_TOL};
use crate::codes::{LinearCode, LocalTester};
use crate::linalg::{dist2_tau, hermitian_eigen, is_pvm, CMat};
use crate::presentation::{presentation_from_parity_check, MuSpec};
use crate::stability::{defect, CornerEmbedding, DefectMode, UnitaryAssignment};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InequalityCheck {
    pub lhs: f64,
    pub rhs: f64,
    pub holds: bool,
}

impl InequalityCheck {
    fn new(lhs: f64, rhs: f64) -> Self {
        InequalityCheck { lhs, rhs, holds: lhs <= rhs + 1e-9 }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosenessCheck {
    /// `E_{x∼μ} Σ_a ‖P^x_a − w* Q^x_a w‖²_τ`.
    pub delta_dist: f64,
    pub delta_trace: f64,
    pub delta: f64,
}

fn measured(game: &Game, s: &(impl Strategy + ?Sized), mu: &[f64]) -> Result<Vec<Option<Vec<CMat>>>, GameError> {
    if mu.len() != game.questions.len() {
        return Err(GameError::Invalid(format!("{} weights for {} questions", mu.len(), game.questions.len())));
    }
    (0..mu.len()).map(|q| if mu[q] > 0.0 { s.measurement(game, q).map(Some) } else { Ok(None) }).collect()
}

fn check_dims(s: &(impl Strategy + ?Sized), s2: &(impl Strategy + ?Sized), w: &CornerEmbedding) -> Result<(), GameError> {
    if w.source_dim() != s.dim() {
        return Err(GameError::DimensionMismatch { expected: s.dim(), found: w.source_dim() });
    }
    if w.target_dim() != s2.dim() {
        return Err(GameError::DimensionMismatch { expected: s2.dim(), found: w.target_dim() });
    }
    Ok(())
}

/// Closeness of two strategies for the same game under the question distribution `mu`.
pub fn strategy_closeness(
    game: &Game,
    s: &(impl Strategy + ?Sized),
    s2: &(impl Strategy + ?Sized),
    w: &CornerEmbedding,
    mu: &[f64],
) -> Result<ClosenessCheck, GameError> {
    check_dims(s, s2, w)?;
    let (p, q) = (measured(game, s, mu)?, measured(game, s2, mu)?);
    let mut delta_dist = 0.0;
    for (x, (px, qx)) in p.iter().zip(&q).enumerate() {
        if let (Some(px), Some(qx)) = (px, qx) {
            delta_dist += mu[x] * px.iter().zip(qx).map(|(a, b)| dist2_tau(a, &w.pull(b))).sum::<f64>();
        }
    }
    let delta_trace = w.max_deficit();
    Ok(ClosenessCheck { delta_dist, delta_trace, delta: delta_dist.max(delta_trace) })
}

fn trace_abs(h: &CMat) -> f64 {
    let (ev, _) = hermitian_eigen(h);
    ev.iter().map(|e| e.abs()).sum::<f64>() / h.nrows() as f64
}

/// `E_x Σ_a τ|P^x_a − w* Q^x_a w|` against `δ + 2√δ`.
pub fn l1_bound_check(
    game: &Game,
    s: &(impl Strategy + ?Sized),
    s2: &(impl Strategy + ?Sized),
    w: &CornerEmbedding,
    mu: &[f64],
) -> Result<(ClosenessCheck, InequalityCheck), GameError> {
    let c = strategy_closeness(game, s, s2, w, mu)?;
    let (p, q) = (measured(game, s, mu)?, measured(game, s2, mu)?);
    let mut lhs = 0.0;
    for (x, (px, qx)) in p.iter().zip(&q).enumerate() {
        if let (Some(px), Some(qx)) = (px, qx) {
            lhs += mu[x] * px.iter().zip(qx).map(|(a, b)| trace_abs(&(a - w.pull(b)))).sum::<f64>();
        }
    }
    let rhs = c.delta + 2.0 * c.delta.sqrt();
    Ok((c, InequalityCheck::new(lhs, rhs)))
}

/// `|ω(G;S) − ω(G;S')|` against `8√δ`, with closeness measured under the question marginal of `G`.
pub fn value_gap_check(
    game: &Game,
    s: &(impl Strategy + ?Sized),
    s2: &(impl Strategy + ?Sized),
    w: &CornerEmbedding,
) -> Result<(ClosenessCheck, InequalityCheck), GameError> {
    let mu = game.question_marginal();
    let c = strategy_closeness(game, s, s2, w, &mu)?;
    let gap = (game_value(game, s)?.value - game_value(game, s2)?.value).abs();
    Ok((c.clone(), InequalityCheck::new(gap, 8.0 * c.delta.sqrt())))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DataProcessingReport {
    /// `Σ_b ‖Σ_{a∈f⁻¹(b)} (P_a − Q_a)‖²_τ ≤ Σ_a ‖P_a − Q_a‖²_τ`.
    pub norm: InequalityCheck,
    /// `Σ_a τ(P_a Q_a) ≤ Σ_b τ(P'_b Q'_b)` for the coarse-grained measurements, stored as `(lhs, rhs)`
    /// in that order.
    pub overlap: InequalityCheck,
    /// Both families are projective. The norm form is only guaranteed in that case: the cross terms
    /// `τ(P_a P_a') + τ(Q_a Q_a')` vanish, leaving `−τ(P_a Q_a') − τ(Q_a P_a') ≤ 0`.
    pub projective: bool,
}

/// Coarse-graining both measurements through `f` in the squared-distance and overlap forms.
pub fn data_processing_check(p: &[CMat], q: &[CMat], f: &[usize]) -> Result<DataProcessingReport, GameError> {
    if f.len() < p.len() {
        return Err(GameError::NotTotal(f.len()));
    }
    if p.len() != q.len() || f.len() != p.len() {
        return Err(GameError::Invalid(format!("{} and {} outcomes with a map on {}", p.len(), q.len(), f.len())));
    }
    let d = p.first().map_or(0, |m| m.nrows());
    if p.iter().chain(q).any(|m| m.nrows() != d || m.ncols() != d) {
        return Err(GameError::DimensionMismatch { expected: d, found: q.first().map_or(0, |m| m.nrows()) });
    }
    let outcomes = f.iter().max().map_or(0, |m| m + 1);
    let mut cp = vec![CMat::zeros(d, d); outcomes];
    let mut cq = cp.clone();
    for (a, &b) in f.iter().enumerate() {
        cp[b] += &p[a];
        cq[b] += &q[a];
    }
    let lhs = cp.iter().zip(&cq).map(|(a, b)| dist2_tau(a, b)).sum();
    let rhs = p.iter().zip(q).map(|(a, b)| dist2_tau(a, b)).sum();
    let fine: f64 = p.iter().zip(q).map(|(a, b)| tau_product(a, b)).sum();
    let coarse: f64 = cp.iter().zip(&cq).map(|(a, b)| tau_product(a, b)).sum();
    Ok(DataProcessingReport {
        norm: InequalityCheck::new(lhs, rhs),
        overlap: InequalityCheck::new(fine, coarse),
        projective: is_pvm(p, PVM_TOL) && is_pvm(q, PVM_TOL),
    })
}

/// `2^k / (1 + c√δ + δ/(1−δ))`.
pub fn min_dimension_bound(k: usize, delta: f64, c: f64) -> Result<f64, GameError> {
    if !(0.0..1.0).contains(&delta) || c < 0.0 || !c.is_finite() {
        return Err(GameError::Invalid(format!("need 0 ≤ δ < 1 and c ≥ 0, got δ = {delta}, c = {c}")));
    }
    Ok(2f64.powi(k as i32) / (1.0 + c * delta.sqrt() + delta / (1.0 - delta)))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtractionReport {
    /// `1 − ω` on the code game.
    pub game_deficit: f64,
    /// Defect of the extracted observables on the parity-check presentation.
    pub defect: f64,
    pub locality: usize,
    /// `100 · r · ε`.
    pub bound: f64,
    pub holds: bool,
}

/// Observables `P_0 − P_1` of the variable questions, with their defect against the game deficit.
pub fn extract_homomorphism(
    code: &LinearCode,
    tester: &LocalTester,
    s: &(impl Strategy + ?Sized),
) -> Result<(UnitaryAssignment, ExtractionReport), GameError> {
    let game = code_game(code, tester)?;
    let game_deficit = (1.0 - game_value(&game, s)?.value).max(0.0);
    let generators = (0..code.n)
        .map(|i| {
            let q = game.question_index(&format!("var{i}")).ok_or(GameError::MissingQuestion(format!("var{i}")))?;
            let m = s.measurement(&game, q)?;
            Ok(&m[0] - &m[1])
        })
        .collect::<Result<Vec<_>, GameError>>()?;
    let a = UnitaryAssignment { d: s.dim(), generators };
    let p = presentation_from_parity_check(&tester.bits(code.n)?, false, &MuSpec::CodeGame)?;
    let eps = defect(&a, &p, DefectMode::Exhaustive)?.epsilon;
    let locality = tester.locality();
    let bound = 100.0 * locality as f64 * game_deficit;
    let report = ExtractionReport { game_deficit, defect: eps, locality, bound, holds: eps <= bound + 1e-9 };
    Ok((a, report))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::hadamard_code;
    use crate::games::{braiding_test, commutation_game, PauliStrategy, PerturbedStrategy};
    use crate::linalg::{identity, random_povm, random_pvm};
    use crate::rng::stream;
    use rand::Rng;

    #[test]
    fn identical_strategies() {
        let g = commutation_game();
        let s = PauliStrategy::new(2, 0);
        let w = CornerEmbedding::identity(4);
        let mu = g.question_marginal();
        let (c, l1) = l1_bound_check(&g, &s, &s, &w, &mu).unwrap();
        assert_eq!(c.delta, 0.0);
        assert!(l1.lhs.abs() < 1e-12);
        let (_, gap) = value_gap_check(&g, &s, &s, &w).unwrap();
        assert_eq!((gap.lhs, gap.rhs), (0.0, 0.0));
    }

    #[test]
    fn perturbed_braiding_gap() {
        let (code, tester) = hadamard_code(2);
        let g = braiding_test(&code, &tester).unwrap();
        let s = PauliStrategy::new(2, 1);
        let p = PerturbedStrategy { base: &s, theta: 0.1, seed: 3 };
        let w = CornerEmbedding::identity(s.dim());
        let (c, gap) = value_gap_check(&g, &s, &p, &w).unwrap();
        assert!(c.delta > 0.0);
        assert!(gap.lhs > 0.0 && gap.holds, "{gap:?}");
    }

    #[test]
    fn block_embedding_is_trace_dominated() {
        let g = commutation_game();
        let s = PauliStrategy::new(2, 0);
        let s2 = PauliStrategy::new(2, 1);
        // w = |ψ⟩ ↦ |ψ⟩|0⟩ intertwines the two strategies exactly
        let w = CornerEmbedding::new(crate::linalg::kron(&identity(4), &CMat::from_column_slice(2, 1, &[crate::linalg::ONE, crate::linalg::ZERO])))
            .unwrap();
        let c = strategy_closeness(&g, &s, &s2, &w, &g.question_marginal()).unwrap();
        assert!(c.delta_dist < 1e-24);
        assert!((c.delta_trace - 0.5).abs() < 1e-12);
    }

    #[test]
    fn data_processing_cases() {
        let mut rng = stream(5, "dp");
        for _ in 0..50 {
            let p = random_pvm(3, 4, &mut rng);
            let q = random_pvm(3, 4, &mut rng);
            let inj = data_processing_check(&p, &q, &[0, 1, 2, 3]).unwrap();
            assert!(inj.projective);
            assert!((inj.norm.lhs - inj.norm.rhs).abs() < 1e-12);
            let cst = data_processing_check(&p, &q, &[0; 4]).unwrap();
            assert!(cst.norm.lhs < 1e-20);
            let f: Vec<usize> = (0..4).map(|_| rng.random_range(0..3)).collect();
            assert!(data_processing_check(&p, &q, &f).unwrap().norm.holds);
            let (p, q) = (random_povm(3, 4, &mut rng), random_povm(3, 4, &mut rng));
            assert!(data_processing_check(&p, &q, &f).unwrap().overlap.holds);
        }
        let p0 = random_povm(2, 2, &mut rng);
        assert!(matches!(data_processing_check(&p0, &p0, &[0]), Err(GameError::NotTotal(1))));
    }

    #[test]
    fn norm_form_needs_projectivity() {
        let half = identity(2).scale(0.5);
        let zero = CMat::zeros(2, 2);
        let p = [half.clone(), half, zero.clone()];
        let q = [zero.clone(), zero, identity(2)];
        let r = data_processing_check(&p, &q, &[0, 0, 1]).unwrap();
        assert!(!r.projective);
        assert!((r.norm.lhs - 2.0).abs() < 1e-12 && (r.norm.rhs - 1.5).abs() < 1e-12);
        assert!(!r.norm.holds);
        assert!(r.overlap.holds);
    }

    #[test]
    fn dimension_bound() {
        assert_eq!(min_dimension_bound(4, 0.0, 3.0).unwrap(), 16.0);
        let v = min_dimension_bound(3, 0.25, 1.0).unwrap();
        assert!((v - 8.0 / (1.0 + 0.5 + 1.0 / 3.0)).abs() < 1e-12);
        assert!(min_dimension_bound(3, 1.0, 1.0).is_err());
    }

    #[test]
    fn extraction_from_perfect_and_perturbed() {
        let (code, tester) = hadamard_code(2);
        let s = PauliStrategy::new(2, 0);
        let (a, rep) = extract_homomorphism(&code, &tester, &s).unwrap();
        assert_eq!(a.generators.len(), 4);
        assert!(rep.defect < 1e-9 && rep.game_deficit < 1e-9);
        let p = PerturbedStrategy { base: &s, theta: 0.05, seed: 1 };
        let (_, rep) = extract_homomorphism(&code, &tester, &p).unwrap();
        assert!(rep.game_deficit > 0.0 && rep.holds, "{rep:?}");
    }
}
