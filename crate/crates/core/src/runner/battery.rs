use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{Check, RunError};
use crate::codes::hadamard_code;
use crate::games::{
    anticommutation_game, code_game, commutation_game, data_processing_check, l1_bound_check, value_gap_check, DenseStrategy,
    Game, GameBuilder, PerturbedStrategy, Rule, TestTag,
};
use crate::linalg::{direct_sum, expi, haar_unitary, random_hermitian, random_povm, random_pvm, CMat};
use crate::rng::stream;
use crate::stability::{pull_back_povm, sign_round, CornerEmbedding};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BatteryLine {
    pub name: String,
    pub trials: usize,
    pub violations: usize,
    /// Largest `lhs − rhs` seen; negative when every trial holds with room.
    pub worst_margin: f64,
    pub seed: u64,
}

impl BatteryLine {
    fn new(name: &str, trials: usize, seed: u64) -> Self {
        BatteryLine { name: name.into(), trials, violations: 0, worst_margin: f64::NEG_INFINITY, seed }
    }

    fn record(&mut self, lhs: f64, rhs: f64, holds: bool) {
        self.worst_margin = self.worst_margin.max(lhs - rhs);
        if !holds {
            self.violations += 1;
        }
    }

    pub fn check(&self) -> Check {
        Check::eq(&format!("{}: violations", self.name), self.violations as f64, 0.0, 0.0)
    }
}

/// Three questions with random alphabets, random pair weights and random tables.
fn random_table_game<R: Rng + ?Sized>(rng: &mut R) -> Game {
    let mut b = GameBuilder::default();
    let alph: Vec<usize> = (0..3).map(|_| rng.random_range(2..=3)).collect();
    let ids: Vec<usize> = alph.iter().enumerate().map(|(i, &a)| b.question(format!("q{i}"), a, None)).collect();
    let pairs = [(0, 1), (0, 2), (1, 2)];
    let raw: Vec<f64> = pairs.iter().map(|_| rng.random_range(0.05..1.0)).collect();
    let total: f64 = raw.iter().sum();
    for (&(x, y), w) in pairs.iter().zip(&raw) {
        let cells = alph[x] * alph[y];
        let table = (0..cells).map(|_| rng.random_range(0..2u8)).collect();
        b.push(ids[x], ids[y], w / total, Rule::Table { table }, TestTag::Game);
    }
    b.finish("random-table".into())
}

fn random_game<R: Rng + ?Sized>(trial: usize, rng: &mut R) -> Game {
    match trial % 4 {
        0 => commutation_game(),
        1 => anticommutation_game(),
        2 => {
            let (c, t) = hadamard_code(2);
            code_game(&c, &t).expect("hadamard code game builds")
        }
        _ => random_table_game(rng),
    }
}

/// `Q_a = P_a ⊕ R_a` on `d + e` dimensions: the inclusion of the first block intertwines exactly,
/// leaving only the trace deficit `e/(d + e)`.
fn padded(game: &Game, s: &DenseStrategy, e: usize, rng: &mut impl Rng) -> DenseStrategy {
    let mut out = DenseStrategy { d: s.d + e, pvms: Default::default() };
    for q in &game.questions {
        let extra = random_pvm(e, q.alphabet, rng);
        let p = &s.pvms[&q.id];
        out.pvms.insert(q.id.clone(), p.iter().zip(&extra).map(|(a, b)| direct_sum(&[a.clone(), b.clone()])).collect());
    }
    out
}

fn random_partial_isometry(d: usize, d_target: usize, rng: &mut impl Rng) -> CornerEmbedding {
    let u = haar_unitary(d_target, rng);
    let mut w = u.columns(0, d).into_owned();
    let dropped = rng.random_range(0..d);
    for c in 0..dropped {
        w.column_mut(c).fill(crate::linalg::ZERO);
    }
    CornerEmbedding::new(w).expect("isometry columns form a contraction")
}

/// Seeded randomized trials of the closeness, value, data-processing, pull-back and sign-rounding
/// inequalities. Every line must have zero violations.
pub fn inequality_battery(trials: usize, max_dim: usize, seed: u64) -> Result<Vec<BatteryLine>, RunError> {
    if trials == 0 || !(2..=8).contains(&max_dim) {
        return Err(RunError::Invalid(format!("need trials ≥ 1 and 2 ≤ max_dim ≤ 8, got {trials}, {max_dim}")));
    }
    let mut l1 = BatteryLine::new("l1 bound", trials, seed);
    let mut gap = BatteryLine::new("value gap", trials, seed);
    let mut dp = BatteryLine::new("data processing (projective, squared distance)", trials, seed);
    let mut dpo = BatteryLine::new("data processing (overlap)", trials, seed);
    let mut pb = BatteryLine::new("pull-back purity", trials, seed);
    let mut sr = BatteryLine::new("sign rounding", trials, seed);

    let mut rng = stream(seed, "battery/strategies");
    for trial in 0..trials {
        let game = random_game(trial, &mut rng);
        let d = rng.random_range(1..=max_dim.min(4));
        let s = DenseStrategy::random(&game, d, &mut rng);
        let mu = game.question_marginal();
        if trial % 2 == 0 {
            let theta = rng.random_range(0.0..0.6);
            let p = PerturbedStrategy { base: &s, theta, seed: seed ^ trial as u64 };
            let w = CornerEmbedding::identity(d);
            let (_, c) = l1_bound_check(&game, &s, &p, &w, &mu)?;
            l1.record(c.lhs, c.rhs, c.holds);
            let (_, c) = value_gap_check(&game, &s, &p, &w)?;
            gap.record(c.lhs, c.rhs, c.holds);
        } else {
            let e = rng.random_range(1..=2);
            let s2 = padded(&game, &s, e, &mut rng);
            let w = CornerEmbedding::inclusion(d, d + e)?;
            let (_, c) = l1_bound_check(&game, &s, &s2, &w, &mu)?;
            l1.record(c.lhs, c.rhs, c.holds);
            let (_, c) = value_gap_check(&game, &s, &s2, &w)?;
            gap.record(c.lhs, c.rhs, c.holds);
        }
    }

    let mut rng = stream(seed, "battery/data-processing");
    for _ in 0..trials {
        let d = rng.random_range(1..=max_dim);
        let outcomes = rng.random_range(2..=5);
        let f: Vec<usize> = (0..outcomes).map(|_| rng.random_range(0..outcomes)).collect();
        let (p, q) = (random_pvm(d, outcomes, &mut rng), random_pvm(d, outcomes, &mut rng));
        let r = data_processing_check(&p, &q, &f)?;
        dp.record(r.norm.lhs, r.norm.rhs, r.norm.holds && r.projective);
        let (p, q) = (random_povm(d, outcomes, &mut rng), random_povm(d, outcomes, &mut rng));
        let r = data_processing_check(&p, &q, &f)?;
        dpo.record(r.overlap.lhs, r.overlap.rhs, r.overlap.holds);
    }

    let mut rng = stream(seed, "battery/pull-back");
    for _ in 0..trials {
        let d = rng.random_range(1..=max_dim);
        let d_target = rng.random_range(d..=max_dim + 2);
        let w = random_partial_isometry(d, d_target, &mut rng);
        let t = random_pvm(d_target, rng.random_range(2..=4), &mut rng);
        let (_, r) = pull_back_povm(&t, &w)?;
        // the report stores the bound 1 − 3ε on the right; the inequality reads bound ≤ purity
        pb.record(r.bound, r.purity, r.holds);
    }

    let mut rng = stream(seed, "battery/sign-round");
    for _ in 0..trials {
        let d = rng.random_range(1..=max_dim);
        let v = haar_unitary(d, &mut rng);
        // eigenphases spread around ±1, including some far from both
        let phases: Vec<f64> = (0..d)
            .map(|_| {
                let base = if rng.random_bool(0.5) { 0.0 } else { std::f64::consts::PI };
                base + rng.random_range(-1.2..1.2)
            })
            .collect();
        let diag = CMat::from_diagonal(&nalgebra::DVector::from_iterator(
            d,
            phases.iter().map(|&p| num_complex::Complex64::from_polar(1.0, p)),
        ));
        let u = &v * diag * v.adjoint();
        let u = if rng.random_bool(0.2) { expi(&random_hermitian(d, &mut rng), 0.05) * u } else { u };
        let (_, r) = sign_round(&u);
        sr.record(r.lhs, r.rhs, r.lhs <= r.rhs + 1e-9);
    }
    Ok(vec![l1, gap, dp, dpo, pb, sr])
}
