//! Synchronous nonlocal games with the code, braiding and low-degree constructions.

mod builders;
mod checks;
mod strategy;

use std::collections::{BTreeMap, HashMap};

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::codes::CodeError;
use crate::pauli::{Basis, PauliError, PauliLabel};
use crate::presentation::PresentationError;
use crate::stability::StabilityError;

pub use builders::{
    anticommutation_game, braiding_test, code_game, commutation_game, dls_game, generator_columns, qld_test, SubGame,
    MAX_BRAIDING_K, MAX_QLD_K,
};
pub use checks::{
    data_processing_check, extract_homomorphism, l1_bound_check, min_dimension_bound, strategy_closeness, value_gap_check,
    ClosenessCheck, DataProcessingReport, ExtractionReport, InequalityCheck,
};
pub use strategy::{
    deterministic_strategy, materialize, validate_strategy, DenseStrategy, PauliStrategy, PerturbedStrategy, Strategy,
    PVM_TOL,
};

#[derive(Debug, Error)]
pub enum GameError {
    #[error("question distribution sums to {0}, not 1")]
    BadDistribution(f64),
    #[error("invalid game: {0}")]
    Invalid(String),
    #[error("question {question}: expected {expected} outcomes, strategy has {found}")]
    AlphabetMismatch { question: String, expected: usize, found: usize },
    #[error("question {question}: measurement is not projective (residual {residual:.3e})")]
    NotProjective { question: String, residual: f64 },
    #[error("question {0} has no measurement in the strategy")]
    MissingQuestion(String),
    #[error("question {0} carries no role the strategy can interpret")]
    MissingRole(String),
    #[error("generator matrix has repeated columns {0} and {1}")]
    RepeatedColumns(usize, usize),
    #[error("tester row {0} is zero")]
    ZeroRow(usize),
    #[error("generator matrix has rank {rank}, expected {k}")]
    RankDeficient { rank: usize, k: usize },
    #[error("the code must be binary")]
    NotBinary,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("size budget exceeded: {0}")]
    Budget(String),
    #[error("outcome map is not total: outcome {0} has no image")]
    NotTotal(usize),
    #[error(transparent)]
    Code(#[from] CodeError),
    #[error(transparent)]
    Presentation(#[from] PresentationError),
    #[error(transparent)]
    Stability(#[from] StabilityError),
    #[error(transparent)]
    Pauli(#[from] PauliError),
}

/// Which part of a composite game a question pair belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TestTag {
    Code,
    Commutation,
    Consistency,
    PairwiseCommutation,
    Game,
}

impl TestTag {
    pub fn name(self) -> &'static str {
        match self {
            TestTag::Code => "code",
            TestTag::Commutation => "commutation",
            TestTag::Consistency => "consistency",
            TestTag::PairwiseCommutation => "pairwise_commutation",
            TestTag::Game => "game",
        }
    }
}

/// Decision predicate for one question pair `(x, y)`, with `a` answering `x` and `b` answering `y`.
///
/// Answers in `F_2^r` are bitmasks, bit `t` for coordinate `t`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "rule", rename_all = "snake_case")]
pub enum Rule {
    Accept,
    Equal,
    /// `a` has even parity and `a_pos = b`.
    CodeCheck { pos: usize },
    /// `a_pos = b`.
    Coord { pos: usize },
    /// `a` a row answer (even parity), `b` a column answer (odd parity), agreeing on the shared cell.
    MagicRowCol { row: usize, col: usize },
    /// `a` a line answer with the line's parity, `b` the single-cell answer at position `pos`.
    MagicCell { pos: usize, row_line: bool },
    /// `a · ω = b`.
    Dot { omega: u32 },
    /// Row-major `|A(x)| × |A(y)|` acceptance table.
    Table { table: Vec<u8> },
}

fn parity(x: usize) -> usize {
    (x.count_ones() & 1) as usize
}

impl Rule {
    pub fn accepts(&self, a: usize, b: usize, alphabet_y: usize) -> bool {
        match self {
            Rule::Accept => true,
            Rule::Equal => a == b,
            Rule::CodeCheck { pos } => parity(a) == 0 && (a >> pos & 1) == b,
            Rule::Coord { pos } => (a >> pos & 1) == b,
            Rule::MagicRowCol { row, col } => parity(a) == 0 && parity(b) == 1 && (a >> col & 1) == (b >> row & 1),
            Rule::MagicCell { pos, row_line } => parity(a) == usize::from(!row_line) && (a >> pos & 1) == b,
            Rule::Dot { omega } => parity(a & *omega as usize) == b,
            Rule::Table { table } => table[a * alphabet_y + b] != 0,
        }
    }
}

/// What a question asks, in terms the perfect Pauli strategy can answer.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(tag = "role", rename_all = "snake_case")]
pub enum Role {
    /// Joint eigenvalue bits of commuting Paulis `σ^basis(labels[t])`; answer bit `t` is 1 on the −1 eigenspace.
    PauliRow { basis: Basis, labels: Vec<u32> },
    /// Question `local` of a subgame whose special observables are `σ(u)` and `σ(v)`.
    Sub { game: SubGame, local: usize, u: PauliLabel, v: PauliLabel },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Question {
    pub id: String,
    pub alphabet: usize,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub role: Option<Role>,
}

/// `(X, μ, A, D)` with `μ` given as weighted question pairs, each carrying its predicate and test tag.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Game {
    #[serde(default)]
    pub name: String,
    pub questions: Vec<Question>,
    pub mu: Vec<(usize, usize, f64)>,
    pub predicate: Vec<Rule>,
    #[serde(default)]
    pub tags: Vec<TestTag>,
}

impl Game {
    pub fn validate(&self) -> Result<(), GameError> {
        if self.predicate.len() != self.mu.len() || (!self.tags.is_empty() && self.tags.len() != self.mu.len()) {
            return Err(GameError::Invalid("mu, predicate and tags must have equal length".into()));
        }
        let mut total = 0.0;
        for (e, &(x, y, w)) in self.mu.iter().enumerate() {
            if x >= self.questions.len() || y >= self.questions.len() {
                return Err(GameError::Invalid(format!("entry {e} names a missing question")));
            }
            if !(w >= 0.0) || !w.is_finite() {
                return Err(GameError::Invalid(format!("entry {e} has weight {w}")));
            }
            if let Rule::Table { table } = &self.predicate[e] {
                if table.len() != self.questions[x].alphabet * self.questions[y].alphabet {
                    return Err(GameError::Invalid(format!("entry {e}: table has {} cells", table.len())));
                }
            }
            total += w;
        }
        if (total - 1.0).abs() > 1e-12 {
            return Err(GameError::BadDistribution(total));
        }
        Ok(())
    }

    pub fn tag(&self, e: usize) -> TestTag {
        self.tags.get(e).copied().unwrap_or(TestTag::Game)
    }

    pub fn question_index(&self, id: &str) -> Option<usize> {
        self.questions.iter().position(|q| q.id == id)
    }

    /// Symmetrized marginal `μ(x) = Σ_y ½(μ(x,y) + μ(y,x))`.
    pub fn question_marginal(&self) -> Vec<f64> {
        let mut m = vec![0.0; self.questions.len()];
        for &(x, y, w) in &self.mu {
            m[x] += w / 2.0;
            m[y] += w / 2.0;
        }
        m
    }

    /// Copy with every predicate as an explicit table; fails beyond `budget` table cells.
    pub fn to_table_form(&self, budget: usize) -> Result<Game, GameError> {
        let cells: usize = self.mu.iter().map(|&(x, y, _)| self.questions[x].alphabet * self.questions[y].alphabet).sum();
        if cells > budget {
            return Err(GameError::Budget(format!("{cells} predicate cells exceed {budget}")));
        }
        let predicate = self
            .mu
            .iter()
            .zip(&self.predicate)
            .map(|(&(x, y, _), r)| {
                let (ax, ay) = (self.questions[x].alphabet, self.questions[y].alphabet);
                let table = (0..ax * ay).map(|c| u8::from(r.accepts(c / ay, c % ay, ay))).collect();
                Rule::Table { table }
            })
            .collect();
        Ok(Game { predicate, ..self.clone() })
    }

    /// The same game with every pair `(x, y)` replaced by `(y, x)` and the predicate transposed.
    pub fn transposed(&self) -> Result<Game, GameError> {
        let tables = self.to_table_form(1 << 22)?;
        let mut out = tables.clone();
        for (e, &(x, y, w)) in tables.mu.iter().enumerate() {
            let (ax, ay) = (self.questions[x].alphabet, self.questions[y].alphabet);
            let Rule::Table { table } = &tables.predicate[e] else { unreachable!() };
            let t = (0..ay * ax).map(|c| table[(c % ax) * ay + c / ax]).collect();
            out.mu[e] = (y, x, w);
            out.predicate[e] = Rule::Table { table: t };
        }
        Ok(out)
    }
}

/// Accumulates question pairs, interning questions by id and merging identical entries.
#[derive(Default)]
pub(crate) struct GameBuilder {
    questions: Vec<Question>,
    index: HashMap<String, usize>,
    entries: Vec<(usize, usize, f64, Rule, TestTag)>,
    entry_index: HashMap<(usize, usize, Rule, TestTag), usize>,
}

impl GameBuilder {
    pub fn question(&mut self, id: String, alphabet: usize, role: Option<Role>) -> usize {
        if let Some(&i) = self.index.get(&id) {
            return i;
        }
        self.questions.push(Question { id: id.clone(), alphabet, role });
        self.index.insert(id, self.questions.len() - 1);
        self.questions.len() - 1
    }

    pub fn push(&mut self, x: usize, y: usize, w: f64, rule: Rule, tag: TestTag) {
        if w == 0.0 {
            return;
        }
        let key = (x, y, rule.clone(), tag);
        match self.entry_index.get(&key) {
            Some(&e) => self.entries[e].2 += w,
            None => {
                self.entry_index.insert(key, self.entries.len());
                self.entries.push((x, y, w, rule, tag));
            }
        }
    }

    pub fn finish(self, name: String) -> Game {
        let mut mu = Vec::with_capacity(self.entries.len());
        let mut predicate = Vec::with_capacity(self.entries.len());
        let mut tags = Vec::with_capacity(self.entries.len());
        for (x, y, w, r, t) in self.entries {
            mu.push((x, y, w));
            predicate.push(r);
            tags.push(t);
        }
        Game { name, questions: self.questions, mu, predicate, tags }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TagValue {
    /// `μ` mass of the tag.
    pub weight: f64,
    /// Contribution to `ω`; `contribution / weight` is the pass rate within the tag.
    pub contribution: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ValueReport {
    pub value: f64,
    pub per_tag: BTreeMap<String, TagValue>,
    pub pairs: usize,
}

impl ValueReport {
    pub fn pass_rate(&self, tag: TestTag) -> Option<f64> {
        self.per_tag.get(tag.name()).map(|t| t.contribution / t.weight)
    }
}

/// `τ(P Q)` for Hermitian `P, Q`, in `O(d²)`.
pub(crate) fn tau_product(p: &crate::linalg::CMat, q: &crate::linalg::CMat) -> f64 {
    p.iter().zip(q.iter()).map(|(a, b)| (a * b.conj()).re).sum::<f64>() / p.nrows() as f64
}

fn is_zero(m: &crate::linalg::CMat) -> bool {
    m.iter().all(|z| z.norm_sqr() < 1e-30)
}

/// `ω(G; S) = Σ μ(x,y) Σ_{a,b} D(x,y,a,b) τ(P^x_a P^y_b)`.
///
/// Since `τ(P^x_a P^y_b)` is symmetric in the two factors and `D` is symmetric, the symmetrized
/// distribution gives the same sum as `μ` itself.
pub fn game_value<S: Strategy + ?Sized>(game: &Game, s: &S) -> Result<ValueReport, GameError> {
    game.validate()?;
    // group entries by the side with the larger alphabet so that measurement is built once
    let mut groups: BTreeMap<usize, Vec<(usize, usize, bool)>> = BTreeMap::new();
    for (e, &(x, y, _)) in game.mu.iter().enumerate() {
        let swap = game.questions[y].alphabet > game.questions[x].alphabet;
        let (big, other) = if swap { (y, x) } else { (x, y) };
        groups.entry(big).or_default().push((e, other, swap));
    }
    let fetch = |q: usize| -> Result<Vec<crate::linalg::CMat>, GameError> {
        let m = s.measurement(game, q)?;
        if m.len() != game.questions[q].alphabet {
            return Err(GameError::AlphabetMismatch {
                question: game.questions[q].id.clone(),
                expected: game.questions[q].alphabet,
                found: m.len(),
            });
        }
        if m.iter().any(|p| p.nrows() != s.dim()) {
            return Err(GameError::DimensionMismatch { expected: s.dim(), found: m[0].nrows() });
        }
        Ok(m)
    };
    let mut contributions = vec![0.0; game.mu.len()];
    for (big, list) in groups {
        let pb = fetch(big)?;
        let nonzero_b: Vec<usize> = (0..pb.len()).filter(|&a| !is_zero(&pb[a])).collect();
        for (e, other, swap) in list {
            let po = fetch(other)?;
            let (_, y, w) = game.mu[e];
            let ay = game.questions[y].alphabet;
            let rule = &game.predicate[e];
            let mut sum = 0.0;
            for &ab in &nonzero_b {
                for (ao, q) in po.iter().enumerate() {
                    let (a, b) = if swap { (ao, ab) } else { (ab, ao) };
                    if rule.accepts(a, b, ay) {
                        sum += tau_product(&pb[ab], q);
                    }
                }
            }
            contributions[e] = w * sum;
        }
    }
    let mut per_tag: BTreeMap<String, TagValue> = BTreeMap::new();
    for (e, c) in contributions.iter().enumerate() {
        let t = per_tag.entry(game.tag(e).name().to_string()).or_insert(TagValue { weight: 0.0, contribution: 0.0 });
        t.weight += game.mu[e].2;
        t.contribution += c;
    }
    Ok(ValueReport { value: contributions.iter().sum(), per_tag, pairs: game.mu.len() })
}

/// Pass probability of the deterministic strategy answering `answers[x]` to question `x`.
pub fn classical_pass_probability(game: &Game, answers: &[usize]) -> f64 {
    game.mu
        .iter()
        .zip(&game.predicate)
        .filter(|((x, y, _), r)| r.accepts(answers[*x], answers[*y], game.questions[*y].alphabet))
        .map(|((_, _, w), _)| w)
        .sum()
}

/// Best deterministic strategy over questions in the support of `μ`, by exhaustive search.
pub fn classical_value(game: &Game, budget: u64) -> Result<(f64, Vec<usize>), GameError> {
    game.validate()?;
    let marginal = game.question_marginal();
    let used: Vec<usize> = (0..game.questions.len()).filter(|&q| marginal[q] > 0.0).collect();
    let mut count: u64 = 1;
    for &q in &used {
        count = count.saturating_mul(game.questions[q].alphabet as u64);
        if count > budget {
            return Err(GameError::Budget(format!("more than {budget} deterministic strategies")));
        }
    }
    let mut answers = vec![0usize; game.questions.len()];
    let mut best = (classical_pass_probability(game, &answers), answers.clone());
    for _ in 1..count {
        for &q in &used {
            answers[q] += 1;
            if answers[q] < game.questions[q].alphabet {
                break;
            }
            answers[q] = 0;
        }
        let v = classical_pass_probability(game, &answers);
        if v > best.0 {
            best = (v, answers.clone());
        }
    }
    Ok(best)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::rng::stream;
    use rand::Rng;

    fn tiny_game() -> Game {
        let mut b = GameBuilder::default();
        let x = b.question("x".into(), 2, None);
        let y = b.question("y".into(), 2, None);
        b.push(x, y, 0.5, Rule::Equal, TestTag::Game);
        b.push(x, x, 0.25, Rule::Equal, TestTag::Game);
        b.push(y, x, 0.25, Rule::Table { table: vec![0, 1, 1, 0] }, TestTag::Game);
        b.finish("tiny".into())
    }

    #[test]
    fn accepting_game_has_value_one() {
        let mut b = GameBuilder::default();
        let x = b.question("x".into(), 3, None);
        let y = b.question("y".into(), 2, None);
        b.push(x, y, 1.0, Rule::Accept, TestTag::Game);
        let g = b.finish("accept".into());
        let mut rng = stream(1, "accept");
        let s = DenseStrategy::random(&g, 4, &mut rng);
        assert!((game_value(&g, &s).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn one_dimensional_strategies_match_enumeration() {
        let g = tiny_game();
        let (best, _) = classical_value(&g, 100).unwrap();
        assert!((best - 0.75).abs() < 1e-15);
        for a in 0..2 {
            for b in 0..2 {
                let ans = vec![a, b];
                let v = game_value(&g, &deterministic_strategy(&g, &ans).unwrap()).unwrap().value;
                assert!((v - classical_pass_probability(&g, &ans)).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn value_is_transpose_invariant() {
        let g = tiny_game();
        let t = g.transposed().unwrap();
        let mut rng = stream(2, "transpose");
        for _ in 0..5 {
            let s = DenseStrategy::random(&g, 3, &mut rng);
            let (a, b) = (game_value(&g, &s).unwrap().value, game_value(&t, &s).unwrap().value);
            assert!((a - b).abs() < 1e-12);
            assert!((-1e-12..=1.0 + 1e-9).contains(&a));
        }
    }

    #[test]
    fn table_form_agrees_with_rules() {
        let g = commutation_game();
        let t = g.to_table_form(1 << 20).unwrap();
        let mut rng = stream(3, "tables");
        for e in 0..g.mu.len() {
            let (x, y, _) = g.mu[e];
            let (ax, ay) = (g.questions[x].alphabet, g.questions[y].alphabet);
            for _ in 0..10 {
                let (a, b) = (rng.random_range(0..ax), rng.random_range(0..ay));
                assert_eq!(g.predicate[e].accepts(a, b, ay), t.predicate[e].accepts(a, b, ay));
            }
        }
    }

    #[test]
    fn validation_errors() {
        let mut g = tiny_game();
        g.mu[0].2 = 0.4;
        assert!(matches!(g.validate(), Err(GameError::BadDistribution(_))));
        let mut g = tiny_game();
        g.mu[0].0 = 9;
        assert!(g.validate().is_err());
    }

    #[test]
    fn game_json_roundtrip() {
        let g = tiny_game();
        let s = serde_json::to_string(&g).unwrap();
        assert!(s.contains("\"mu\":[[0,1,0.5]"));
        let back: Game = serde_json::from_str(&s).unwrap();
        assert_eq!(g, back);
    }
}
