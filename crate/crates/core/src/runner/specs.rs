use std::sync::Arc;

use num_traits::ToPrimitive;
use serde::{Deserialize, Serialize};

use super::RunError;
use crate::codes::{brm_tester, hadamard_code, reed_muller_code, rm_tester, LinearCode, LocalTester};
use crate::field::{BitMatrix, BitVector, FieldSpec};
use crate::games::{anticommutation_game, braiding_test, code_game, commutation_game, dls_game, qld_test, Game, Role, SubGame};
use crate::games::PauliStrategy;
use crate::presentation::{
    pauli_mult_like, pauli_small, presentation_from_parity_check, std_z2k, z2k_eff_presentation, MuSpec, Presentation,
};

/// A code family with its canonical tester.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum CodeSpec {
    Hadamard { t: u32 },
    /// Reed-Muller over `F_{2^t}` with the line tester.
    Rm { t: u32, m: usize, d: usize },
    /// Reed-Muller composed with Hadamard, with the combined tester.
    Brm { t: u32, m: usize, d: usize },
}

impl Default for CodeSpec {
    fn default() -> Self {
        CodeSpec::Hadamard { t: 2 }
    }
}

impl CodeSpec {
    pub fn build(&self) -> Result<(LinearCode, LocalTester), RunError> {
        match *self {
            CodeSpec::Hadamard { t } => {
                if !(1..=8).contains(&t) {
                    return Err(RunError::Invalid(format!("hadamard needs 1 ≤ t ≤ 8, got {t}")));
                }
                Ok(hadamard_code(t as usize))
            }
            CodeSpec::Rm { t, m, d } => {
                let field = Arc::new(FieldSpec::new(t)?);
                let code = reed_muller_code(&field, m, d)?;
                let tester = rm_tester(&code, m, d)?;
                Ok((code, tester))
            }
            CodeSpec::Brm { t, m, d } => Ok(brm_tester(t, m, d)?),
        }
    }

    /// Lower bound on the minimum distance from the construction.
    pub fn distance_lower_bound(&self) -> Option<usize> {
        let rm = |t: u32, m: usize, d: usize| {
            let q = 1usize << t;
            (q.pow(m as u32)).checked_sub(m * d * q.pow(m as u32 - 1))
        };
        match *self {
            CodeSpec::Hadamard { t } => Some(1 << (t - 1)),
            CodeSpec::Rm { t, m, d } => rm(t, m, d),
            CodeSpec::Brm { t, m, d } => rm(t, m, d).map(|x| x << (t - 1)),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FieldDescriptor {
    pub t: u32,
    pub poly: String,
    pub basis: Vec<u32>,
}

/// `{field, n, k, E, h}` with `h` as sparse `(column, coefficient)` rows.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CodeDescriptor {
    pub field: FieldDescriptor,
    pub n: usize,
    pub k: usize,
    #[serde(rename = "E")]
    pub e: Vec<Vec<u32>>,
    pub h: Vec<Vec<(usize, u32)>>,
    pub distance: Option<usize>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TesterDescriptor {
    pub rows: Vec<Vec<(usize, u32)>>,
    pub nu: Vec<f64>,
    /// `ν` as exact fractions.
    pub nu_exact: Vec<String>,
}

pub fn describe_code(code: &LinearCode) -> CodeDescriptor {
    CodeDescriptor {
        field: FieldDescriptor { t: code.field.t(), poly: code.field.poly_bitstring(), basis: code.field.basis().to_vec() },
        n: code.n,
        k: code.k,
        e: code.generator.clone(),
        h: code.parity.clone(),
        distance: code.distance,
    }
}

pub fn describe_tester(tester: &LocalTester) -> TesterDescriptor {
    TesterDescriptor {
        rows: tester.rows.clone(),
        nu: tester.nu.iter().map(|x| x.to_f64().unwrap_or(f64::NAN)).collect(),
        nu_exact: tester.nu.iter().map(|x| x.to_string()).collect(),
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "family", rename_all = "kebab-case", deny_unknown_fields)]
pub enum PresSpec {
    StdZ2k { k: usize },
    PauliSmall { k: usize },
    PauliMultLike { k: usize },
    Z2kEff { t: u32, m: usize, d: usize },
    /// `G(h)` for the tester rows of a code, with the code-game relation distribution.
    ParityCheck { code: CodeSpec },
}

impl PresSpec {
    pub fn build(&self) -> Result<Presentation, RunError> {
        let check = |k: usize, max: usize| {
            if k == 0 || k > max {
                Err(RunError::Invalid(format!("k = {k} outside 1..={max}")))
            } else {
                Ok(())
            }
        };
        Ok(match self {
            PresSpec::StdZ2k { k } => {
                check(*k, 64)?;
                std_z2k(*k)
            }
            PresSpec::PauliSmall { k } => {
                check(*k, 64)?;
                pauli_small(*k)
            }
            PresSpec::PauliMultLike { k } => pauli_mult_like(*k)?,
            PresSpec::Z2kEff { t, m, d } => z2k_eff_presentation(*t, *m, *d)?,
            PresSpec::ParityCheck { code } => {
                let (c, tester) = code.build()?;
                presentation_from_parity_check(&tester.bits(c.n)?, false, &MuSpec::CodeGame)?
            }
        })
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "game", rename_all = "kebab-case", deny_unknown_fields)]
pub enum GameSpec {
    Commutation,
    Anticommutation,
    Code { code: CodeSpec },
    Braiding { code: CodeSpec },
    Qld { t: u32, m: usize, d: usize },
    /// Rows of `E` as bit strings, e.g. `["101", "011"]`.
    Dls { e: Vec<String> },
}

pub fn parse_bit_rows(rows: &[String]) -> Result<BitMatrix, RunError> {
    let n = rows.first().map_or(0, |r| r.len());
    let parsed = rows
        .iter()
        .map(|r| {
            if r.len() != n || !r.chars().all(|c| c == '0' || c == '1') {
                return Err(RunError::Invalid(format!("bad matrix row {r:?}")));
            }
            Ok(BitVector::from_bits(r.chars().map(|c| c == '1')))
        })
        .collect::<Result<Vec<_>, _>>()?;
    Ok(BitMatrix::from_rows(n, parsed)?)
}

impl GameSpec {
    /// The game and the message length `k` of its Pauli leg.
    pub fn build(&self) -> Result<(Game, usize), RunError> {
        Ok(match self {
            GameSpec::Commutation => (commutation_game(), 2),
            GameSpec::Anticommutation => (anticommutation_game(), 1),
            GameSpec::Code { code } => {
                let (c, tester) = code.build()?;
                (code_game(&c, &tester)?, c.k)
            }
            GameSpec::Braiding { code } => {
                let (c, tester) = code.build()?;
                (braiding_test(&c, &tester)?, c.k)
            }
            GameSpec::Qld { t, m, d } => (qld_test(*t, *m, *d)?, *t as usize * (d + 1).pow(*m as u32)),
            GameSpec::Dls { e } => {
                let e = parse_bit_rows(e)?;
                (dls_game(&e)?, e.rows())
            }
        })
    }
}

/// The perfect Pauli strategy for a game built from a [`GameSpec`].
pub fn perfect_strategy(game: &Game, k: usize) -> PauliStrategy {
    let anc = game.questions.iter().any(|q| matches!(q.role, Some(Role::Sub { game: SubGame::Anticommutation, .. })));
    PauliStrategy::new(k, usize::from(anc))
}
