use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::Rng;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use super::{Game, GameError, Role, SubGame};
use crate::linalg::{expi, identity, kron, matrix_serde, op_norm, random_hermitian, random_pvm, CMat, ONE, ZERO};
use crate::pauli::{pauli_observable, Basis, PauliLabel};
use crate::rng::stream;

pub const PVM_TOL: f64 = 1e-9;

/// A synchronous strategy: one projective measurement per question, on a common space.
pub trait Strategy {
    fn dim(&self) -> usize;
    fn measurement(&self, game: &Game, q: usize) -> Result<Vec<CMat>, GameError>;
}

/// Explicit measurements keyed by question id.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DenseStrategy {
    pub d: usize,
    #[serde(with = "pvm_map_serde")]
    pub pvms: BTreeMap<String, Vec<CMat>>,
}

mod pvm_map_serde {
    use super::*;

    type Rows = Vec<Vec<[f64; 2]>>;

    pub fn serialize<S: Serializer>(m: &BTreeMap<String, Vec<CMat>>, s: S) -> Result<S::Ok, S::Error> {
        let out: BTreeMap<&String, Vec<Rows>> =
            m.iter().map(|(k, v)| (k, v.iter().map(matrix_serde::to_rows).collect())).collect();
        out.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BTreeMap<String, Vec<CMat>>, D::Error> {
        let raw = BTreeMap::<String, Vec<Rows>>::deserialize(d)?;
        raw.into_iter()
            .map(|(k, v)| {
                let ms = v.iter().map(|r| matrix_serde::from_rows(r)).collect::<Result<Vec<_>, _>>();
                ms.map(|ms| (k, ms)).map_err(serde::de::Error::custom)
            })
            .collect()
    }
}

impl DenseStrategy {
    /// Independent random PVMs for every question.
    pub fn random<R: Rng + ?Sized>(game: &Game, d: usize, rng: &mut R) -> Self {
        let pvms = game.questions.iter().map(|q| (q.id.clone(), random_pvm(d, q.alphabet, rng))).collect();
        DenseStrategy { d, pvms }
    }
}

impl Strategy for DenseStrategy {
    fn dim(&self) -> usize {
        self.d
    }

    fn measurement(&self, game: &Game, q: usize) -> Result<Vec<CMat>, GameError> {
        let id = &game.questions[q].id;
        self.pvms.get(id).cloned().ok_or_else(|| GameError::MissingQuestion(id.clone()))
    }
}

/// The one-dimensional strategy answering `answers[x]` to question `x`.
pub fn deterministic_strategy(game: &Game, answers: &[usize]) -> Result<DenseStrategy, GameError> {
    if answers.len() != game.questions.len() {
        return Err(GameError::Invalid(format!("{} answers for {} questions", answers.len(), game.questions.len())));
    }
    let mut pvms = BTreeMap::new();
    for (q, &a) in game.questions.iter().zip(answers) {
        if a >= q.alphabet {
            return Err(GameError::Invalid(format!("answer {a} outside the alphabet of {}", q.id)));
        }
        pvms.insert(q.id.clone(), (0..q.alphabet).map(|b| CMat::from_element(1, 1, if a == b { ONE } else { ZERO })).collect());
    }
    Ok(DenseStrategy { d: 1, pvms })
}

/// Explicit copy of every measurement used by `game`.
pub fn materialize<S: Strategy + ?Sized>(game: &Game, s: &S) -> Result<DenseStrategy, GameError> {
    let marginal = game.question_marginal();
    let mut pvms = BTreeMap::new();
    for (q, question) in game.questions.iter().enumerate().filter(|&(q, _)| marginal[q] > 0.0) {
        pvms.insert(question.id.clone(), s.measurement(game, q)?);
    }
    Ok(DenseStrategy { d: s.dim(), pvms })
}

fn pvm_residual(ps: &[CMat]) -> f64 {
    let d = ps[0].nrows();
    let sum = ps.iter().fold(CMat::zeros(d, d), |acc, p| acc + p);
    ps.iter()
        .map(|p| op_norm(&(p - p.adjoint())).max(op_norm(&(p * p - p))))
        .fold(op_norm(&(sum - identity(d))), f64::max)
}

/// Checks alphabets and projectivity for every question in the support of `μ`.
pub fn validate_strategy<S: Strategy + ?Sized>(game: &Game, s: &S) -> Result<(), GameError> {
    game.validate()?;
    let marginal = game.question_marginal();
    for (q, question) in game.questions.iter().enumerate().filter(|&(q, _)| marginal[q] > 0.0) {
        let m = s.measurement(game, q)?;
        if m.len() != question.alphabet {
            return Err(GameError::AlphabetMismatch { question: question.id.clone(), expected: question.alphabet, found: m.len() });
        }
        if m.iter().any(|p| p.nrows() != s.dim() || p.ncols() != s.dim()) {
            return Err(GameError::DimensionMismatch { expected: s.dim(), found: m[0].nrows() });
        }
        let residual = pvm_residual(&m);
        if residual > PVM_TOL {
            return Err(GameError::NotProjective { question: question.id.clone(), residual });
        }
    }
    Ok(())
}

/// The perfect strategy on `C^{2^k} ⊗ C^{2^ancilla}` read off from question roles.
///
/// Row questions measure commuting Paulis on the first factor; subgame questions use the two
/// special observables, and the magic-square cells place the second qubit of the standard
/// operator table on the one-qubit ancilla.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct PauliStrategy {
    pub k: usize,
    pub ancilla: usize,
}

fn walsh(k: usize) -> CMat {
    let d = 1usize << k;
    let s = 1.0 / (d as f64).sqrt();
    CMat::from_fn(d, d, |i, j| Complex64::new(if (i & j).count_ones() % 2 == 1 { -s } else { s }, 0.0))
}

/// `½(Id + (−1)^b O)` for `b ∈ {0, 1}` and, for several commuting observables, their products.
fn joint(obs: &[CMat]) -> Vec<CMat> {
    let d = obs[0].nrows();
    (0..1usize << obs.len())
        .map(|a| {
            obs.iter().enumerate().fold(identity(d), |acc, (t, o)| {
                let half = if a >> t & 1 == 1 { (identity(d) - o).scale(0.5) } else { (identity(d) + o).scale(0.5) };
                acc * half
            })
        })
        .collect()
}

impl PauliStrategy {
    pub fn new(k: usize, ancilla: usize) -> Self {
        PauliStrategy { k, ancilla }
    }

    pub fn pauli_dim(&self) -> usize {
        1 << self.k
    }

    fn lift(&self, m: &CMat) -> CMat {
        if self.ancilla == 0 {
            m.clone()
        } else {
            kron(m, &identity(1 << self.ancilla))
        }
    }

    fn observable(&self, l: &PauliLabel) -> Result<CMat, GameError> {
        if l.k != self.k {
            return Err(GameError::DimensionMismatch { expected: self.k, found: l.k });
        }
        Ok(self.lift(&pauli_observable(l)))
    }

    fn ancilla_pauli(&self, basis: Basis) -> Result<CMat, GameError> {
        if self.ancilla == 0 {
            return Err(GameError::Invalid("magic-square questions need an ancilla qubit".into()));
        }
        let single = pauli_observable(&PauliLabel::new(basis, 1, 1)?);
        Ok(kron(&identity(1 << self.k), &kron(&single, &identity(1 << (self.ancilla - 1)))))
    }

    fn pauli_row(&self, basis: Basis, labels: &[u32]) -> Vec<CMat> {
        let d = 1usize << self.k;
        let bits = |u: usize| -> usize {
            labels.iter().enumerate().map(|(t, &c)| (((u as u32 & c).count_ones() & 1) as usize) << t).sum()
        };
        let h = walsh(self.k);
        (0..1usize << labels.len())
            .map(|a| {
                let diag = CMat::from_fn(d, d, |i, j| if i == j && bits(i) == a { ONE } else { ZERO });
                let p = match basis {
                    Basis::Z => diag,
                    Basis::X => &h * diag * &h,
                };
                self.lift(&p)
            })
            .collect()
    }

    fn magic_cells(&self, u: &CMat, v: &CMat) -> Result<[[CMat; 3]; 3], GameError> {
        let x = self.ancilla_pauli(Basis::X)?;
        let z = self.ancilla_pauli(Basis::Z)?;
        let last = |a: &CMat, b: &CMat| (a * b).adjoint();
        let c20 = -(u * &z);
        let c21 = -(v * &x);
        let c22 = last(&c20, &c21);
        Ok([[u.clone(), x.clone(), u * &x], [z.clone(), v.clone(), v * &z], [c20, c21, c22]])
    }

    fn sub(&self, game: SubGame, local: usize, u: &PauliLabel, v: &PauliLabel) -> Result<Vec<CMat>, GameError> {
        let (uo, vo) = (self.observable(u)?, self.observable(v)?);
        match game {
            SubGame::Commutation => Ok(match local {
                0 => joint(&[uo]),
                1 => joint(&[vo]),
                _ => joint(&[uo, vo]),
            }),
            SubGame::Anticommutation => {
                let c = self.magic_cells(&uo, &vo)?;
                Ok(match local {
                    0 => joint(&[c[0][0].clone()]),
                    1 => joint(&[c[1][1].clone()]),
                    2..=4 => joint(&c[local - 2]),
                    _ => {
                        let col = local - 5;
                        joint(&[c[0][col].clone(), c[1][col].clone(), c[2][col].clone()])
                    }
                })
            }
        }
    }
}

impl Strategy for PauliStrategy {
    fn dim(&self) -> usize {
        1 << (self.k + self.ancilla)
    }

    fn measurement(&self, game: &Game, q: usize) -> Result<Vec<CMat>, GameError> {
        let question = &game.questions[q];
        match &question.role {
            Some(Role::PauliRow { basis, labels }) => Ok(self.pauli_row(*basis, labels)),
            Some(Role::Sub { game: g, local, u, v }) => self.sub(*g, *local, u, v),
            None => Err(GameError::MissingRole(question.id.clone())),
        }
    }
}

/// `P^x_a ↦ U_x P^x_a U_x*` with `U_x = exp(iθ H_x)` and `H_x` drawn per question from the seed.
pub struct PerturbedStrategy<'a, S: Strategy + ?Sized> {
    pub base: &'a S,
    pub theta: f64,
    pub seed: u64,
}

impl<S: Strategy + ?Sized> PerturbedStrategy<'_, S> {
    pub fn unitary(&self, game: &Game, q: usize) -> CMat {
        let mut rng = stream(self.seed, &format!("perturb/{}", game.questions[q].id));
        expi(&random_hermitian(self.base.dim(), &mut rng), self.theta)
    }
}

impl<S: Strategy + ?Sized> Strategy for PerturbedStrategy<'_, S> {
    fn dim(&self) -> usize {
        self.base.dim()
    }

    fn measurement(&self, game: &Game, q: usize) -> Result<Vec<CMat>, GameError> {
        let u = self.unitary(game, q);
        Ok(self.base.measurement(game, q)?.iter().map(|p| &u * p * u.adjoint()).collect())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::games::{anticommutation_game, commutation_game, game_value};

    #[test]
    fn subgame_reference_strategies_are_perfect() {
        let g = commutation_game();
        let s = PauliStrategy::new(2, 0);
        validate_strategy(&g, &s).unwrap();
        assert!((game_value(&g, &s).unwrap().value - 1.0).abs() < 1e-12);

        let g = anticommutation_game();
        let s = PauliStrategy::new(1, 1);
        validate_strategy(&g, &s).unwrap();
        assert!((game_value(&g, &s).unwrap().value - 1.0).abs() < 1e-12);
        let u = s.measurement(&g, 0).unwrap();
        let v = s.measurement(&g, 1).unwrap();
        let (uo, vo) = (&u[0] - &u[1], &v[0] - &v[1]);
        assert!(op_norm(&(&uo * &vo + &vo * &uo)) < 1e-12);
    }

    #[test]
    fn perturbation_keeps_projectivity() {
        let g = anticommutation_game();
        let base = PauliStrategy::new(1, 1);
        let s = PerturbedStrategy { base: &base, theta: 0.1, seed: 4 };
        validate_strategy(&g, &s).unwrap();
        let v = game_value(&g, &s).unwrap().value;
        assert!(v < 1.0 && v > 0.9);
        assert_eq!(materialize(&g, &s).unwrap(), materialize(&g, &s).unwrap());
    }

    #[test]
    fn validation_names_the_question() {
        let g = commutation_game();
        let mut s = materialize(&g, &PauliStrategy::new(2, 0)).unwrap();
        s.pvms.get_mut("cc:pair").unwrap()[0][(0, 0)] = Complex64::new(0.5, 0.0);
        match validate_strategy(&g, &s) {
            Err(GameError::NotProjective { question, .. }) => assert_eq!(question, "cc:pair"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn strategy_json_roundtrip() {
        let g = commutation_game();
        let s = materialize(&g, &PauliStrategy::new(2, 0)).unwrap();
        let text = serde_json::to_string(&s).unwrap();
        let back: DenseStrategy = serde_json::from_str(&text).unwrap();
        assert_eq!(s, back);
    }
}
