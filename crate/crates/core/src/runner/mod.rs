//! Seeded experiments over every module, with JSON and CSV reports.

mod battery;
mod specs;
mod suite;

use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use serde::{Deserialize, Serialize};
use serde_json::{json, Value};
use thiserror::Error;

use crate::codes::{code_distance, tester_soundness, CodeError, SoundnessMethod, SoundnessOptions};
use crate::field::FieldError;
use crate::games::{
    extract_homomorphism, game_value, min_dimension_bound, validate_strategy, value_gap_check, DenseStrategy, Game, GameError,
    PerturbedStrategy, Strategy,
};
use crate::pauli::PauliError;
use crate::presentation::{presentation_length, std_z2k, Permutation, PresentationError, RelationSampler, Word};
use crate::rng::stream;
use crate::stability::{
    automorphism_orbit_amplify, character_farness_partial, defect, graph_rep, inverse_spectral_gap, Assignment,
    CornerEmbedding, DefectMode, StabilityError, UnitaryAssignment,
};

pub use battery::{inequality_battery, BatteryLine};
pub use specs::{
    describe_code, describe_tester, parse_bit_rows, perfect_strategy, CodeDescriptor, CodeSpec, FieldDescriptor, GameSpec,
    PresSpec, TesterDescriptor,
};
pub use suite::{verify_suite, SuiteName, SUITES};

/// Version of the configuration schema; bumped on incompatible changes.
pub const CONFIG_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum RunError {
    #[error("invalid input: {0}")]
    Invalid(String),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("malformed JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("csv: {0}")]
    Csv(#[from] csv::Error),
    #[error(transparent)]
    Field(#[from] FieldError),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
    #[error(transparent)]
    Game(#[from] GameError),
}

impl RunError {
    /// The violated invariant, when the input parsed but describes an invalid object.
    pub fn invariant(&self) -> Option<&'static str> {
        match self {
            RunError::Game(GameError::NotProjective { .. }) => Some("strategy measurements are projective and sum to Id"),
            RunError::Game(GameError::AlphabetMismatch { .. }) => Some("strategy alphabets match the game"),
            RunError::Game(GameError::BadDistribution(_)) => Some("game distribution sums to 1"),
            RunError::Stability(StabilityError::NotUnitary(_)) => Some("assignment generators are unitary"),
            RunError::Presentation(PresentationError::BadWeights(_)) => Some("relation weights sum to 1"),
            _ => None,
        }
    }

    /// 1 for a violated invariant, 2 for anything else.
    pub fn exit_code(&self) -> i32 {
        if self.invariant().is_some() {
            1
        } else {
            2
        }
    }

    pub fn to_json(&self) -> Value {
        let kind = match self.invariant() {
            Some(_) => "invariant",
            None => "invalid-input",
        };
        json!({ "error": kind, "invariant": self.invariant(), "message": self.to_string() })
    }
}

fn io<T>(path: &Path, r: std::io::Result<T>) -> Result<T, RunError> {
    r.map_err(|source| RunError::Io { path: path.to_path_buf(), source })
}

pub fn read_json<T: serde::de::DeserializeOwned>(path: &Path) -> Result<T, RunError> {
    let text = io(path, fs::read_to_string(path))?;
    Ok(serde_json::from_str(&text)?)
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Json,
    Csv,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "mode", rename_all = "lowercase", deny_unknown_fields)]
pub enum ModeSpec {
    #[default]
    Exhaustive,
    Sampled { samples: usize },
}

fn default_thetas() -> Vec<f64> {
    (1..=10).map(|i| 0.005 * i as f64).collect()
}

fn default_trials() -> usize {
    500
}

fn default_dim() -> usize {
    4
}

/// One experiment. Every CLI command maps to exactly one variant.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case", deny_unknown_fields)]
pub enum Experiment {
    CodeBuild { code: CodeSpec },
    CodeSoundness { code: CodeSpec, budget: Option<u64>, samples: Option<usize> },
    CodeDistance { code: CodeSpec, budget: Option<u64> },
    PresBuild { pres: PresSpec },
    PresLength { pres: PresSpec },
    PresSample { pres: PresSpec, count: usize },
    StabDefect {
        presentation: PathBuf,
        assignment: PathBuf,
        #[serde(default)]
        mode: ModeSpec,
    },
    /// The permutation construction: commutator norms, defect under the standard presentation and
    /// distance to scalar characters.
    GraphDefect { k: usize, edges: Vec<(usize, usize)> },
    /// Orbit amplification of the graph construction over `std_z2k(k)`; defaults to `Sym(k)`.
    Amplify {
        k: usize,
        edges: Vec<(usize, usize)>,
        generators: Option<Vec<Permutation>>,
        budget: Option<usize>,
    },
    Kappa { mu: Vec<f64> },
    GameBuild { game: GameSpec },
    GameValue { game: PathBuf, strategy: PathBuf },
    GamePerfect { game: GameSpec },
    DimBound { k: usize, delta: f64, c: f64 },
    PerturbationSweep {
        game: GameSpec,
        #[serde(default = "default_thetas")]
        thetas: Vec<f64>,
    },
    ExtractionSweep {
        #[serde(default)]
        code: CodeSpec,
        #[serde(default = "default_thetas")]
        thetas: Vec<f64>,
    },
    InequalityBattery {
        #[serde(default = "default_trials")]
        trials: usize,
        #[serde(default = "default_dim")]
        max_dim: usize,
    },
    Verify { suite: SuiteName },
}

impl Experiment {
    pub fn sampled(&self) -> bool {
        matches!(
            self,
            Experiment::CodeSoundness { samples: Some(_), .. }
                | Experiment::PresSample { .. }
                | Experiment::StabDefect { mode: ModeSpec::Sampled { .. }, .. }
                | Experiment::PerturbationSweep { .. }
                | Experiment::ExtractionSweep { .. }
                | Experiment::InequalityBattery { .. }
                | Experiment::Verify { .. }
        )
    }
}

fn default_version() -> u32 {
    CONFIG_VERSION
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    #[serde(default = "default_version")]
    pub version: u32,
    pub seed: Option<u64>,
    #[serde(default)]
    pub format: OutputFormat,
    pub experiment: Experiment,
}

impl ExperimentConfig {
    pub fn new(experiment: Experiment, seed: Option<u64>) -> Self {
        ExperimentConfig { version: CONFIG_VERSION, seed, format: OutputFormat::Json, experiment }
    }

    pub fn validate(&self) -> Result<(), RunError> {
        if self.version != CONFIG_VERSION {
            return Err(RunError::Invalid(format!("config version {} unsupported (expected {CONFIG_VERSION})", self.version)));
        }
        if self.experiment.sampled() && self.seed.is_none() {
            return Err(RunError::Invalid("this experiment samples and needs a seed".into()));
        }
        let positive = |name: &str, v: Option<u64>| match v {
            Some(0) => Err(RunError::Invalid(format!("{name} must be positive"))),
            _ => Ok(()),
        };
        match &self.experiment {
            Experiment::CodeSoundness { budget, samples, .. } => {
                positive("budget", *budget)?;
                positive("samples", samples.map(|s| s as u64))
            }
            Experiment::CodeDistance { budget, .. } => positive("budget", *budget),
            Experiment::PresSample { count, .. } => positive("count", Some(*count as u64)),
            Experiment::StabDefect { mode: ModeSpec::Sampled { samples }, .. } => positive("samples", Some(*samples as u64)),
            Experiment::Amplify { budget, .. } => positive("budget", budget.map(|b| b as u64)),
            Experiment::PerturbationSweep { thetas, .. } | Experiment::ExtractionSweep { thetas, .. } => {
                if thetas.is_empty() || thetas.iter().any(|t| !t.is_finite() || *t < 0.0) {
                    return Err(RunError::Invalid("thetas must be a nonempty list of finite nonnegative values".into()));
                }
                Ok(())
            }
            _ => Ok(()),
        }
    }
}

/// A numeric result compared against its expected value or bound.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Check {
    pub name: String,
    pub value: f64,
    /// One of `==`, `<=`, `>=`.
    pub relation: String,
    pub target: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl Check {
    pub fn eq(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = (value - target).abs() <= tolerance;
        Check { name: name.into(), value, relation: "==".into(), target, tolerance, pass }
    }

    pub fn le(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = value <= target + tolerance;
        Check { name: name.into(), value, relation: "<=".into(), target, tolerance, pass }
    }

    pub fn ge(name: &str, value: f64, target: f64, tolerance: f64) -> Self {
        let pass = value >= target - tolerance;
        Check { name: name.into(), value, relation: ">=".into(), target, tolerance, pass }
    }

    pub fn line(&self) -> String {
        format!(
            "[{}] {}: {:.12} {} {:.12} (tol {:e})",
            if self.pass { "PASS" } else { "FAIL" },
            self.name,
            self.value,
            self.relation,
            self.target,
            self.tolerance
        )
    }
}

/// Columns and rows for sweep experiments.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Table {
    pub columns: Vec<String>,
    pub rows: Vec<Vec<f64>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub tool: String,
    pub version: String,
    pub config: ExperimentConfig,
    pub result: Value,
    pub checks: Vec<Check>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table: Option<Table>,
    pub passed: bool,
    /// Excluded from reproducibility comparisons.
    pub wall_time_ms: f64,
}

impl Report {
    /// The report as JSON with the timing field removed.
    pub fn reproducible_json(&self) -> Result<String, RunError> {
        let mut v = serde_json::to_value(self)?;
        if let Some(o) = v.as_object_mut() {
            o.remove("wall_time_ms");
        }
        Ok(serde_json::to_string(&v)?)
    }

    pub fn to_csv(&self) -> Result<String, RunError> {
        let mut w = csv::Writer::from_writer(Vec::new());
        match &self.table {
            Some(t) => {
                let mut header = t.columns.clone();
                header.push("seed".into());
                w.write_record(&header)?;
                let seed = self.config.seed.map(|s| s.to_string()).unwrap_or_default();
                for row in &t.rows {
                    let mut rec: Vec<String> = row.iter().map(|x| format!("{x:e}")).collect();
                    rec.push(seed.clone());
                    w.write_record(&rec)?;
                }
            }
            None => {
                w.write_record(["name", "value", "relation", "target", "tolerance", "pass"])?;
                for c in &self.checks {
                    w.write_record([
                        c.name.clone(),
                        format!("{:e}", c.value),
                        c.relation.clone(),
                        format!("{:e}", c.target),
                        format!("{:e}", c.tolerance),
                        c.pass.to_string(),
                    ])?;
                }
            }
        }
        let bytes = w.into_inner().map_err(|e| RunError::Invalid(e.to_string()))?;
        String::from_utf8(bytes).map_err(|e| RunError::Invalid(e.to_string()))
    }

    pub fn render(&self) -> Result<String, RunError> {
        match self.config.format {
            OutputFormat::Json => Ok(serde_json::to_string_pretty(self)? + "\n"),
            OutputFormat::Csv => self.to_csv(),
        }
    }

    /// Writes the rendered report to `out`, or stdout when `out` is `None`.
    pub fn write(&self, out: Option<&Path>) -> Result<(), RunError> {
        let text = self.render()?;
        match out {
            Some(p) => io(p, fs::write(p, text)),
            None => {
                print!("{text}");
                Ok(())
            }
        }
    }
}

struct Outcome {
    result: Value,
    checks: Vec<Check>,
    table: Option<Table>,
}

impl Outcome {
    fn new(result: Value, checks: Vec<Check>) -> Self {
        Outcome { result, checks, table: None }
    }
}

fn seed_of(cfg: &ExperimentConfig) -> u64 {
    cfg.seed.unwrap_or(0)
}

/// Runs one experiment. Deterministic given the config; only `wall_time_ms` varies.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<Report, RunError> {
    cfg.validate()?;
    let start = Instant::now();
    let seed = seed_of(cfg);
    let out = match &cfg.experiment {
        Experiment::CodeBuild { code } => {
            let (c, tester) = code.build()?;
            c.check_consistency()?;
            let checks = vec![
                Check::eq("generator rank", c.generator_rank() as f64, c.k as f64, 0.0),
                Check::eq("parity rank", c.parity_rank() as f64, (c.n - c.k) as f64, 0.0),
            ];
            Outcome::new(json!({ "code": describe_code(&c), "tester": describe_tester(&tester) }), checks)
        }
        Experiment::CodeSoundness { code, budget, samples } => {
            let (c, tester) = code.build()?;
            let mut opts = SoundnessOptions { seed, ..Default::default() };
            if let Some(b) = budget {
                opts.budget = u128::from(*b);
            }
            if let Some(s) = samples {
                opts.samples = *s;
                opts.budget = 0;
            }
            let r = tester_soundness(&c, &tester, &opts)?;
            let mut checks = vec![Check::ge("rho", r.rho, 0.0, 0.0)];
            if r.method == SoundnessMethod::Exhaustive {
                // every non-codeword violates some row
                checks.push(Check::ge("rho bounded away from 0", r.rho, 1e-12, 0.0));
            }
            Outcome::new(serde_json::to_value(&r)?, checks)
        }
        Experiment::CodeDistance { code, budget } => {
            let (c, _) = code.build()?;
            let dist = code_distance(&c, budget.map_or(1 << 24, u128::from))?;
            let mut checks = Vec::new();
            if let Some(lb) = code.distance_lower_bound() {
                checks.push(Check::ge("distance", dist as f64, lb as f64, 0.0));
            }
            Outcome::new(json!({ "n": c.n, "k": c.k, "distance": dist }), checks)
        }
        Experiment::PresBuild { pres } => {
            let p = pres.build()?;
            p.validate()?;
            let total: f64 = p.relations.iter().map(|r| r.weight).sum();
            let checks = vec![Check::eq("relation weights sum", total, 1.0, 1e-12)];
            Outcome::new(serde_json::to_value(&p)?, checks)
        }
        Experiment::PresLength { pres } => {
            let p = pres.build()?;
            let len = presentation_length(&p);
            let mut checks = Vec::new();
            if let PresSpec::StdZ2k { k } = pres {
                checks.push(Check::eq("length closed form", len as f64, (3 * k + 2 * k * (k - 1)) as f64, 0.0));
            }
            Outcome::new(json!({ "generators": p.n, "relations": p.relations.len(), "length": len }), checks)
        }
        Experiment::PresSample { pres, count } => {
            let p = pres.build()?;
            let sampler = RelationSampler::new(&p)?;
            let mut rng = stream(seed, "pres/sample");
            let words: Vec<Word> = (0..*count).map(|_| sampler.sample(&mut rng).word.clone()).collect();
            Outcome::new(json!({ "samples": count, "seed": seed, "words": words }), Vec::new())
        }
        Experiment::StabDefect { presentation, assignment, mode } => {
            let p: crate::presentation::Presentation = read_json(presentation)?;
            p.validate()?;
            let a: UnitaryAssignment = read_json(assignment)?;
            a.validate()?;
            let mode = match *mode {
                ModeSpec::Exhaustive => DefectMode::Exhaustive,
                ModeSpec::Sampled { samples } => DefectMode::Sampled { samples, seed },
            };
            let r = defect(&a, &p, mode)?;
            let checks = vec![Check::ge("epsilon", r.epsilon, 0.0, 0.0), Check::le("epsilon", r.epsilon, 4.0, 1e-9)];
            Outcome::new(serde_json::to_value(&r)?, checks)
        }
        Experiment::GraphDefect { k, edges } => graph_defect(*k, edges)?,
        Experiment::Amplify { k, edges, generators, budget } => {
            let a = graph_rep(*k, edges)?;
            let gens = generators.clone().unwrap_or_else(|| sym_generators(*k));
            let (_, r) = automorphism_orbit_amplify(&a, &gens, &std_z2k(*k), budget.unwrap_or(5040))?;
            let checks = vec![Check::le("max amplified relation defect", r.max_relation_defect, r.bound, 1e-12)];
            Outcome::new(serde_json::to_value(&r)?, checks)
        }
        Experiment::Kappa { mu } => {
            let kappa = inverse_spectral_gap(mu)?;
            Outcome::new(json!({ "kappa": kappa }), vec![Check::ge("kappa", kappa, 1.0, 1e-12)])
        }
        Experiment::GameBuild { game } => {
            let (g, k) = game.build()?;
            g.validate()?;
            let total: f64 = g.mu.iter().map(|e| e.2).sum();
            let checks = vec![Check::eq("mu sum", total, 1.0, 1e-12)];
            Outcome::new(json!({ "k": k, "questions": g.questions.len(), "pairs": g.mu.len(), "game": g }), checks)
        }
        Experiment::GameValue { game, strategy } => {
            let g: Game = read_json(game)?;
            g.validate()?;
            let s: DenseStrategy = read_json(strategy)?;
            validate_strategy(&g, &s)?;
            let r = game_value(&g, &s)?;
            let checks = vec![Check::ge("value", r.value, 0.0, 1e-9), Check::le("value", r.value, 1.0, 1e-9)];
            Outcome::new(serde_json::to_value(&r)?, checks)
        }
        Experiment::GamePerfect { game } => {
            let (g, k) = game.build()?;
            let s = perfect_strategy(&g, k);
            let r = game_value(&g, &s)?;
            let bound = min_dimension_bound(k, 0.0, 1.0)?;
            let checks = vec![
                Check::eq("perfect value", r.value, 1.0, 1e-9),
                Check::ge("pauli dimension vs bound at delta = 0", s.pauli_dim() as f64, bound, 1e-9),
            ];
            let result = json!({
                "k": k,
                "pauli_dim": s.pauli_dim(),
                "dim": s.dim(),
                "ancilla_qubits": s.ancilla,
                "questions": g.questions.len(),
                "report": r,
            });
            Outcome::new(result, checks)
        }
        Experiment::DimBound { k, delta, c } => {
            let v = min_dimension_bound(*k, *delta, *c)?;
            Outcome::new(json!({ "bound": v }), Vec::new())
        }
        Experiment::PerturbationSweep { game, thetas } => perturbation_sweep(game, thetas, seed)?,
        Experiment::ExtractionSweep { code, thetas } => extraction_sweep(code, thetas, seed)?,
        Experiment::InequalityBattery { trials, max_dim } => {
            let lines = inequality_battery(*trials, *max_dim, seed)?;
            let checks = lines.iter().map(BatteryLine::check).collect();
            Outcome::new(json!({ "lines": lines }), checks)
        }
        Experiment::Verify { suite } => {
            let checks = verify_suite(*suite, seed)?;
            Outcome::new(json!({ "suite": suite }), checks)
        }
    };
    let passed = out.checks.iter().all(|c| c.pass);
    Ok(Report {
        tool: env!("CARGO_PKG_NAME").into(),
        version: env!("CARGO_PKG_VERSION").into(),
        config: cfg.clone(),
        result: out.result,
        checks: out.checks,
        table: out.table,
        passed,
        wall_time_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}

/// A transposition and a `k`-cycle.
pub fn sym_generators(k: usize) -> Vec<Permutation> {
    if k < 2 {
        return vec![(0..k).collect()];
    }
    let mut swap: Permutation = (0..k).collect();
    swap.swap(0, 1);
    let cycle: Permutation = (0..k).map(|i| (i + 1) % k).collect();
    vec![swap, cycle]
}

fn graph_defect(k: usize, edges: &[(usize, usize)]) -> Result<Outcome, RunError> {
    let a = graph_rep(k, edges)?;
    let p = std_z2k(k);
    let eps = defect(&a, &p, DefectMode::Exhaustive)?.epsilon;
    let is_edge = |i: usize, j: usize| edges.iter().any(|&(a, b)| (a, b) == (i, j) || (b, a) == (i, j));
    let mut checks = Vec::new();
    let mut norms = Vec::new();
    for i in 0..k {
        for j in i + 1..k {
            let n = a.word_defect(&Word::commutator(i, j))?;
            let expected = if is_edge(i, j) { 2.0 } else { 0.0 };
            checks.push(Check::eq(&format!("commutator norm ({i},{j})"), n, expected, 1e-12));
            norms.push(json!([i, j, n]));
        }
    }
    let mut distinct = edges.iter().map(|&(a, b)| (a.min(b), a.max(b))).collect::<Vec<_>>();
    distinct.sort_unstable();
    distinct.dedup();
    let pairs = (k * (k - 1) / 2).max(1) as f64;
    checks.push(Check::eq("defect under std_z2k", eps, distinct.len() as f64 / pairs, 1e-12));
    let farness = if a.d <= 1 << 10 {
        let dense = a.to_dense(1 << 10)?;
        Some(character_farness_partial(&dense, &vec![1.0 / k as f64; k])?)
    } else {
        None
    };
    Ok(Outcome::new(json!({ "dim": a.d, "epsilon": eps, "commutator_norms": norms, "farness": farness }), checks))
}

fn perturbation_sweep(spec: &GameSpec, thetas: &[f64], seed: u64) -> Result<Outcome, RunError> {
    let (g, k) = spec.build()?;
    let s = perfect_strategy(&g, k);
    let w = CornerEmbedding::identity(s.dim());
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &theta in thetas {
        let p = PerturbedStrategy { base: &s, theta, seed };
        let value = game_value(&g, &p)?.value;
        let (c, gap) = value_gap_check(&g, &s, &p, &w)?;
        checks.push(Check::le(&format!("value gap at theta = {theta}"), gap.lhs, gap.rhs, 1e-9));
        rows.push(vec![theta, value, 1.0 - value, c.delta, gap.lhs, gap.rhs]);
    }
    let columns = ["theta", "value", "deficit", "delta", "gap", "bound"].map(String::from).to_vec();
    Ok(Outcome {
        result: json!({ "game": g.name, "seed": seed, "points": thetas.len() }),
        checks,
        table: Some(Table { columns, rows }),
    })
}

fn extraction_sweep(code: &CodeSpec, thetas: &[f64], seed: u64) -> Result<Outcome, RunError> {
    let (c, tester) = code.build()?;
    let s = crate::games::PauliStrategy::new(c.k, 0);
    let mut rows = Vec::new();
    let mut checks = Vec::new();
    for &theta in thetas {
        let p = PerturbedStrategy { base: &s, theta, seed };
        let (_, r) = extract_homomorphism(&c, &tester, &p)?;
        checks.push(Check::le(&format!("defect vs 100 r eps at theta = {theta}"), r.defect, r.bound, 1e-12));
        rows.push(vec![theta, r.game_deficit, r.defect, r.bound]);
    }
    let mut by_eps = rows.clone();
    by_eps.sort_by(|a, b| a[1].total_cmp(&b[1]));
    let inversions = by_eps.windows(2).filter(|w| w[1][2] < w[0][2] - 1e-12).count();
    checks.push(Check::eq("defect nondecreasing in game deficit", inversions as f64, 0.0, 0.0));
    let ratio = by_eps.first().map_or(0.0, |r| r[2] / by_eps.last().map_or(1.0, |l| l[2]).max(f64::MIN_POSITIVE));
    checks.push(Check::le("defect at smallest deficit / defect at largest", ratio, 0.05, 0.0));
    let columns = ["theta", "game_deficit", "defect", "bound"].map(String::from).to_vec();
    Ok(Outcome {
        result: json!({ "locality": tester.locality(), "seed": seed, "points": thetas.len() }),
        checks,
        table: Some(Table { columns, rows }),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(json: &str) -> ExperimentConfig {
        serde_json::from_str(json).unwrap()
    }

    #[test]
    fn config_roundtrip_and_validation() {
        let c = cfg(r#"{"seed": 3, "experiment": {"kind": "dim-bound", "k": 2, "delta": 0.0, "c": 1.0}}"#);
        assert_eq!(c.version, CONFIG_VERSION);
        let back: ExperimentConfig = serde_json::from_str(&serde_json::to_string(&c).unwrap()).unwrap();
        assert_eq!(back, c);
        let r = run_experiment(&c).unwrap();
        assert_eq!(r.result["bound"], 4.0);
        assert!(serde_json::from_str::<ExperimentConfig>(r#"{"experiment": {"kind": "kappa", "mu": [1], "x": 1}}"#).is_err());
        let unseeded = ExperimentConfig::new(Experiment::InequalityBattery { trials: 1, max_dim: 2 }, None);
        assert!(matches!(run_experiment(&unseeded), Err(RunError::Invalid(_))));
    }

    #[test]
    fn graph_defect_matching() {
        let c = ExperimentConfig::new(Experiment::GraphDefect { k: 4, edges: vec![(0, 1), (2, 3)] }, None);
        let r = run_experiment(&c).unwrap();
        assert!(r.passed, "{:#?}", r.checks);
        assert!((r.result["epsilon"].as_f64().unwrap() - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn reports_reproduce() {
        let c = ExperimentConfig::new(
            Experiment::PerturbationSweep { game: GameSpec::Commutation, thetas: vec![0.1, 0.2] },
            Some(9),
        );
        let (a, b) = (run_experiment(&c).unwrap(), run_experiment(&c).unwrap());
        assert_eq!(a.reproducible_json().unwrap(), b.reproducible_json().unwrap());
        let csv = a.to_csv().unwrap();
        assert!(csv.starts_with("theta,value,deficit,delta,gap,bound,seed\n"));
        assert_eq!(csv.lines().count(), 3);
    }

    #[test]
    fn error_codes() {
        let e = RunError::Game(GameError::NotProjective { question: "q".into(), residual: 0.5 });
        assert_eq!(e.exit_code(), 1);
        assert_eq!(e.to_json()["error"], "invariant");
        assert_eq!(RunError::Invalid("x".into()).exit_code(), 2);
    }
}
