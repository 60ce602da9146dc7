use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{inequality_battery, BatteryLine, Check, CodeSpec, RunError};
use crate::codes::{code_distance, tester_soundness, SoundnessOptions};
use crate::field::{BitMatrix, BitVector, FieldSpec};
use crate::games::{
    anticommutation_game, braiding_test, classical_value, extract_homomorphism, game_value, qld_test, PauliStrategy,
};
use crate::pauli::{braiding_relation_check, pauli_group_order_check, pauli_mult_like_assignment, pauli_small_assignment};
use crate::presentation::{
    abelian_rank, pauli_mult_like, pauli_small, presentation_length, std_z2k, z2k_eff_presentation,
};
use crate::rng::stream;
use crate::stability::{automorphism_orbit_amplify, defect, graph_rep, inverse_spectral_gap, DefectMode};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SuiteName {
    Fields,
    Codes,
    Presentations,
    Stability,
    Pauli,
    Games,
    All,
}

pub const SUITES: [SuiteName; 6] =
    [SuiteName::Fields, SuiteName::Codes, SuiteName::Presentations, SuiteName::Stability, SuiteName::Pauli, SuiteName::Games];

impl SuiteName {
    pub fn name(self) -> &'static str {
        match self {
            SuiteName::Fields => "fields",
            SuiteName::Codes => "codes",
            SuiteName::Presentations => "presentations",
            SuiteName::Stability => "stability",
            SuiteName::Pauli => "pauli",
            SuiteName::Games => "games",
            SuiteName::All => "all",
        }
    }
}

impl fmt::Display for SuiteName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for SuiteName {
    type Err = RunError;

    fn from_str(s: &str) -> Result<Self, RunError> {
        SUITES
            .iter()
            .chain([SuiteName::All].iter())
            .find(|n| n.name() == s)
            .copied()
            .ok_or_else(|| RunError::Invalid(format!("unknown suite {s:?}")))
    }
}

/// Runs a module's invariant battery; the suite passes iff every returned check passes.
pub fn verify_suite(name: SuiteName, seed: u64) -> Result<Vec<Check>, RunError> {
    match name {
        SuiteName::All => {
            let mut out = Vec::new();
            for s in SUITES {
                out.extend(verify_suite(s, seed)?.into_iter().map(|c| Check { name: format!("{s}: {}", c.name), ..c }));
            }
            Ok(out)
        }
        SuiteName::Fields => fields(seed),
        SuiteName::Codes => codes(),
        SuiteName::Presentations => presentations(),
        SuiteName::Stability => stability(seed),
        SuiteName::Pauli => pauli(),
        SuiteName::Games => games(),
    }
}

fn fields(seed: u64) -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    for t in 1..=8 {
        let f = FieldSpec::new(t)?;
        let gram = f.gram();
        let off = (0..t as usize).flat_map(|i| (0..t as usize).map(move |j| (i, j))).filter(|&(i, j)| gram[i][j] != u8::from(i == j)).count();
        checks.push(Check::eq(&format!("self-dual basis t={t}"), off as f64, 0.0, 0.0));
        let bad = (1..f.size()).filter(|&a| f.inv(a).map(|b| f.mul(a, b)) != Some(1)).count();
        checks.push(Check::eq(&format!("inverses t={t}"), bad as f64, 0.0, 0.0));
    }
    let mut rng = stream(seed, "verify/fields");
    let mut bad = 0;
    for _ in 0..50 {
        let (r, c) = (rng.random_range(1..20), rng.random_range(1..20));
        let rows = (0..r).map(|_| BitVector::from_bits((0..c).map(|_| rng.random_bool(0.5)))).collect();
        let m = BitMatrix::from_rows(c, rows)?;
        let rank = m.rank();
        if rank > r.min(c) || rank + m.kernel_basis().len() != c || m.transpose().rank() != rank {
            bad += 1;
        }
    }
    checks.push(Check::eq("rank-nullity on random matrices", bad as f64, 0.0, 0.0));
    Ok(checks)
}

fn codes() -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    let specs = [
        CodeSpec::Hadamard { t: 2 },
        CodeSpec::Hadamard { t: 3 },
        CodeSpec::Rm { t: 2, m: 1, d: 1 },
        CodeSpec::Rm { t: 2, m: 2, d: 1 },
        CodeSpec::Brm { t: 2, m: 1, d: 1 },
    ];
    for spec in &specs {
        let (c, tester) = spec.build()?;
        let label = serde_json::to_string(spec)?;
        c.check_consistency()?;
        checks.push(Check::eq(&format!("{label} generator rank"), c.generator_rank() as f64, c.k as f64, 0.0));
        let dist = code_distance(&c, 1 << 24)?;
        if let Some(lb) = spec.distance_lower_bound() {
            checks.push(Check::ge(&format!("{label} distance"), dist as f64, lb as f64, 0.0));
        }
        if c.is_binary() {
            let h = tester.bits(c.n)?;
            checks.push(Check::eq(&format!("{label} abelian rank"), abelian_rank(&h) as f64, c.k as f64, 0.0));
        }
    }
    let (c, tester) = CodeSpec::Rm { t: 2, m: 1, d: 1 }.build()?;
    let r = tester_soundness(&c, &tester, &SoundnessOptions::default())?;
    checks.push(Check::ge("rm(4,1,1) soundness", r.rho, 1.0 / 6.0, 0.0));
    Ok(checks)
}

fn presentations() -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    for k in 1..=10 {
        checks.push(Check::eq(
            &format!("std_z2k({k}) length"),
            presentation_length(&std_z2k(k)) as f64,
            (3 * k + 2 * k * (k - 1)) as f64,
            0.0,
        ));
    }
    let mut all = vec![std_z2k(4), pauli_small(3), pauli_mult_like(2)?, z2k_eff_presentation(2, 1, 1)?];
    all.push(super::PresSpec::ParityCheck { code: CodeSpec::Hadamard { t: 2 } }.build()?);
    for p in &all {
        let total: f64 = p.relations.iter().map(|r| r.weight).sum();
        checks.push(Check::eq(&format!("{} weights", p.name), total, 1.0, 1e-12));
        checks.push(Check::eq(&format!("{} validates", p.name), f64::from(u8::from(p.validate().is_ok())), 1.0, 0.0));
    }
    Ok(checks)
}

fn stability(seed: u64) -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    let a = graph_rep(4, &[(0, 1), (2, 3)])?;
    let eps = defect(&a, &std_z2k(4), DefectMode::Exhaustive)?.epsilon;
    checks.push(Check::eq("graph_rep matching defect", eps, 1.0 / 3.0, 1e-12));
    let (_, amp) = automorphism_orbit_amplify(&graph_rep(3, &[(0, 1)])?, &super::sym_generators(3), &std_z2k(3), 100)?;
    checks.push(Check::le("Sym(3) amplification", amp.max_relation_defect, amp.bound, 1e-12));
    for k in 1..=10 {
        let n = 1usize << k;
        let uniform = inverse_spectral_gap(&vec![1.0 / n as f64; n])?;
        checks.push(Check::eq(&format!("kappa uniform k={k}"), uniform, 1.0, 1e-9));
        let mut basis = vec![0.0; n];
        for i in 0..k {
            basis[1 << i] = 1.0 / k as f64;
        }
        checks.push(Check::eq(&format!("kappa basis k={k}"), inverse_spectral_gap(&basis)?, k as f64 / 2.0, 1e-9));
    }
    let lines: Vec<BatteryLine> = inequality_battery(200, 4, seed)?;
    checks.extend(lines.iter().map(BatteryLine::check));
    Ok(checks)
}

fn pauli() -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    for k in 1..=4 {
        let mut worst = 0.0f64;
        for a in 0..1u32 << k {
            for b in 0..1u32 << k {
                worst = worst.max(braiding_relation_check(k, a, b)?);
            }
        }
        checks.push(Check::eq(&format!("braiding relations k={k}"), worst, 0.0, 1e-12));
        let order = pauli_group_order_check(k)?;
        checks.push(Check::eq(&format!("Pauli group order k={k}"), order as f64, (1usize << (2 * k + 1)) as f64, 0.0));
        let small = defect(&pauli_small_assignment(k)?, &pauli_small(k), DefectMode::Exhaustive)?.epsilon;
        checks.push(Check::eq(&format!("pauli_small({k}) perfect"), small, 0.0, 1e-12));
        let mult = defect(&pauli_mult_like_assignment(k)?, &pauli_mult_like(k)?, DefectMode::Exhaustive)?.epsilon;
        checks.push(Check::eq(&format!("pauli_mult_like({k}) perfect"), mult, 0.0, 1e-12));
    }
    Ok(checks)
}

fn games() -> Result<Vec<Check>, RunError> {
    let mut checks = Vec::new();
    let (code, tester) = CodeSpec::Hadamard { t: 2 }.build()?;
    let g = braiding_test(&code, &tester)?;
    checks.push(Check::eq("braiding perfect value", game_value(&g, &PauliStrategy::new(2, 1))?.value, 1.0, 1e-9));
    let g = qld_test(2, 1, 1)?;
    checks.push(Check::eq("qld perfect value", game_value(&g, &PauliStrategy::new(4, 1))?.value, 1.0, 1e-9));
    let (best, _) = classical_value(&anticommutation_game(), 1 << 21)?;
    checks.push(Check::eq("magic square classical value", best, 1.0 - 1.0 / 18.0, 1e-12));
    let (_, r) = extract_homomorphism(&code, &tester, &PauliStrategy::new(2, 0))?;
    checks.push(Check::eq("extraction from perfect strategy", r.defect, 0.0, 1e-9));
    Ok(checks)
}
