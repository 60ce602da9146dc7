use std::collections::HashMap;

use serde::{Deserialize, Serialize};

use super::{Game, GameBuilder, GameError, Role, Rule, TestTag};
use crate::codes::{brm_tester, LinearCode, LocalTester, SparseRow};
use crate::field::{gf2_rank, BitMatrix};
use crate::pauli::{Basis, PauliLabel};
use crate::presentation::{z2k_eff_presentation, Tag};

/// Largest message length accepted by [`braiding_test`].
pub const MAX_BRAIDING_K: usize = 8;
/// Largest message length accepted by [`qld_test`].
pub const MAX_QLD_K: usize = 8;
const MAX_ROW_WEIGHT: usize = 16;

/// The two building-block games with their distinguished questions.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SubGame {
    /// Questions: 0 = `x_{X,0}`, 1 = `x_{Z,0}`, 2 = the pair question answering in `F_2²`.
    Commutation,
    /// Magic square. Questions: 0 = `x_{X,1}` (cell (0,0)), 1 = `x_{Z,1}` (cell (1,1)),
    /// 2..=4 = rows, 5..=7 = columns.
    Anticommutation,
}

impl SubGame {
    pub fn question_count(self) -> usize {
        match self {
            SubGame::Commutation => 3,
            SubGame::Anticommutation => 8,
        }
    }

    pub fn alphabet(self, local: usize) -> usize {
        match (self, local) {
            (_, 0 | 1) => 2,
            (SubGame::Commutation, _) => 4,
            (SubGame::Anticommutation, _) => 8,
        }
    }

    pub fn local_name(self, local: usize) -> String {
        match (self, local) {
            (SubGame::Commutation, 0) => "cc:X".into(),
            (SubGame::Commutation, 1) => "cc:Z".into(),
            (SubGame::Commutation, _) => "cc:pair".into(),
            (SubGame::Anticommutation, 0) => "ac:X".into(),
            (SubGame::Anticommutation, 1) => "ac:Z".into(),
            (SubGame::Anticommutation, l @ 2..=4) => format!("ac:r{}", l - 2),
            (SubGame::Anticommutation, l) => format!("ac:c{}", l - 5),
        }
    }

    pub fn special(self, w: Basis) -> usize {
        match w {
            Basis::X => 0,
            Basis::Z => 1,
        }
    }

    /// `(x, y, μ, D)` over local question indices.
    pub fn entries(self) -> Vec<(usize, usize, f64, Rule)> {
        match self {
            SubGame::Commutation => vec![(2, 0, 0.5, Rule::Coord { pos: 0 }), (2, 1, 0.5, Rule::Coord { pos: 1 })],
            SubGame::Anticommutation => {
                let mut e = Vec::new();
                for r in 0..3 {
                    for c in 0..3 {
                        e.push((2 + r, 5 + c, 0.5 / 9.0, Rule::MagicRowCol { row: r, col: c }));
                    }
                }
                e.push((2, 0, 0.125, Rule::MagicCell { pos: 0, row_line: true }));
                e.push((5, 0, 0.125, Rule::MagicCell { pos: 0, row_line: false }));
                e.push((3, 1, 0.125, Rule::MagicCell { pos: 1, row_line: true }));
                e.push((6, 1, 0.125, Rule::MagicCell { pos: 1, row_line: false }));
                e
            }
        }
    }

    fn standalone(self, u: PauliLabel, v: PauliLabel) -> Game {
        let mut b = GameBuilder::default();
        let ids: Vec<usize> = (0..self.question_count())
            .map(|l| b.question(self.local_name(l), self.alphabet(l), Some(Role::Sub { game: self, local: l, u, v })))
            .collect();
        for (x, y, w, r) in self.entries() {
            b.push(ids[x], ids[y], w, r, TestTag::Game);
        }
        let name = match self {
            SubGame::Commutation => "commutation",
            SubGame::Anticommutation => "anticommutation",
        };
        b.finish(name.into())
    }
}

/// Three questions: two single observables and their joint measurement.
pub fn commutation_game() -> Game {
    SubGame::Commutation.standalone(PauliLabel { basis: Basis::Z, k: 2, a: 1 }, PauliLabel { basis: Basis::Z, k: 2, a: 2 })
}

/// The magic square game plus single-cell questions for the two anticommuting cells.
pub fn anticommutation_game() -> Game {
    SubGame::Anticommutation.standalone(PauliLabel { basis: Basis::X, k: 1, a: 1 }, PauliLabel { basis: Basis::Z, k: 1, a: 1 })
}

/// Columns `E e_i` of a binary generator matrix as bitmasks.
pub fn generator_columns(code: &LinearCode) -> Result<Vec<u32>, GameError> {
    if !code.is_binary() {
        return Err(GameError::NotBinary);
    }
    if code.k > 31 {
        return Err(GameError::Budget(format!("k = {} exceeds 31", code.k)));
    }
    Ok((0..code.n).map(|i| code.generator_column(i) as u32).collect())
}

fn row_labels(row: &SparseRow, cols: &[u32]) -> Vec<u32> {
    row.iter().map(|&(i, _)| cols[i]).collect()
}

/// Tester rows with their `ν` weights as floats, zero rows dropped and `ν` renormalized.
fn nonzero_rows(tester: &LocalTester) -> Result<Vec<(usize, f64)>, GameError> {
    let nu = tester.nu_f64();
    let rows: Vec<(usize, f64)> = (0..tester.rows.len()).filter(|&j| !tester.rows[j].is_empty()).map(|j| (j, nu[j])).collect();
    let total: f64 = rows.iter().map(|r| r.1).sum();
    if total <= 0.0 {
        return Err(GameError::Invalid("tester has no nonzero row with positive weight".into()));
    }
    if let Some(&(j, _)) = rows.iter().find(|&&(j, _)| tester.rows[j].len() > MAX_ROW_WEIGHT) {
        return Err(GameError::Budget(format!("row {j} has weight above {MAX_ROW_WEIGHT}")));
    }
    Ok(rows.into_iter().map(|(j, w)| (j, w / total)).collect())
}

fn prefix(w: Option<Basis>) -> String {
    match w {
        None => String::new(),
        Some(Basis::X) => "X:".into(),
        Some(Basis::Z) => "Z:".into(),
    }
}

fn var_question(b: &mut GameBuilder, w: Option<Basis>, i: usize, cols: &[u32]) -> usize {
    let basis = w.unwrap_or(Basis::Z);
    b.question(format!("{}var{i}", prefix(w)), 2, Some(Role::PauliRow { basis, labels: vec![cols[i]] }))
}

fn add_code_test(b: &mut GameBuilder, tester: &LocalTester, rows: &[(usize, f64)], cols: &[u32], w: Option<Basis>, scale: f64) {
    let basis = w.unwrap_or(Basis::Z);
    for &(j, nu) in rows {
        let row = &tester.rows[j];
        let eq = b.question(
            format!("{}eq{j}", prefix(w)),
            1 << row.len(),
            Some(Role::PauliRow { basis, labels: row_labels(row, cols) }),
        );
        for (pos, &(i, _)) in row.iter().enumerate() {
            let var = var_question(b, w, i, cols);
            b.push(eq, var, scale * nu / row.len() as f64, Rule::CodeCheck { pos }, TestTag::Code);
        }
    }
}

/// The code game: `(eq, j)` against `(var, i)` with `μ = ν_j / |h_j|` for `h_ji = 1`.
pub fn code_game(code: &LinearCode, tester: &LocalTester) -> Result<Game, GameError> {
    let cols = generator_columns(code)?;
    if let Some(j) = tester.rows.iter().position(|r| r.is_empty()) {
        return Err(GameError::ZeroRow(j));
    }
    let rows = nonzero_rows(tester)?;
    let mut b = GameBuilder::default();
    add_code_test(&mut b, tester, &rows, &cols, None, 1.0);
    // questions for every variable, even those outside all rows
    for i in 0..code.n {
        var_question(&mut b, None, i, &cols);
    }
    Ok(b.finish(format!("code_game[{},{}]", code.n, code.k)))
}

fn sub_question(b: &mut GameBuilder, game: SubGame, local: usize, u: PauliLabel, v: PauliLabel, tag: &str) -> usize {
    b.question(
        format!("{tag}{}@{:x},{:x}", game.local_name(local), u.a, v.a),
        game.alphabet(local),
        Some(Role::Sub { game, local, u, v }),
    )
}

fn omega_game(gamma: bool) -> SubGame {
    if gamma {
        SubGame::Anticommutation
    } else {
        SubGame::Commutation
    }
}

/// Code test, (anti-)commutation test and consistency test, each with weight `share`.
fn add_braiding_parts(b: &mut GameBuilder, code: &LinearCode, tester: &LocalTester, cols: &[u32], share: f64) -> Result<(), GameError> {
    let rows = nonzero_rows(tester)?;
    let k = code.k;
    for w in [Basis::X, Basis::Z] {
        add_code_test(b, tester, &rows, cols, Some(w), share / 2.0);
    }
    let n = code.n;
    let pair_w = share / (n * n) as f64;
    for ix in 0..n {
        for iz in 0..n {
            let (ox, oz) = (cols[ix], cols[iz]);
            let u = PauliLabel { basis: Basis::X, k, a: ox };
            let v = PauliLabel { basis: Basis::Z, k, a: oz };
            let sub = omega_game((ox & oz).count_ones() % 2 == 1);
            for (lx, ly, sw, rule) in sub.entries() {
                let qx = sub_question(b, sub, lx, u, v, "");
                let qy = sub_question(b, sub, ly, u, v, "");
                b.push(qx, qy, pair_w * sw, rule, TestTag::Commutation);
            }
            for (w, i) in [(Basis::X, ix), (Basis::Z, iz)] {
                let var = var_question(b, Some(w), i, cols);
                let special = sub_question(b, sub, sub.special(w), u, v, "");
                b.push(var, special, pair_w / 2.0, Rule::Equal, TestTag::Consistency);
            }
        }
    }
    Ok(())
}

fn check_k(code: &LinearCode, max: usize) -> Result<(), GameError> {
    if code.k > max {
        return Err(GameError::Budget(format!("k = {} exceeds {max}", code.k)));
    }
    Ok(())
}

/// Code test on both bases, (anti-)commutation test and consistency test, ⅓ each.
pub fn braiding_test(code: &LinearCode, tester: &LocalTester) -> Result<Game, GameError> {
    check_k(code, MAX_BRAIDING_K)?;
    let cols = generator_columns(code)?;
    let mut seen: HashMap<u32, usize> = HashMap::new();
    for (i, &c) in cols.iter().enumerate() {
        if let Some(&j) = seen.get(&c) {
            return Err(GameError::RepeatedColumns(j, i));
        }
        seen.insert(c, i);
    }
    let mut b = GameBuilder::default();
    add_braiding_parts(&mut b, code, tester, &cols, 1.0 / 3.0)?;
    Ok(b.finish(format!("braiding[{},{}]", code.n, code.k)))
}

/// The braiding test over the binary Reed-Muller code plus the pairwise commutation test, ¼ each.
///
/// Repeated generator columns are allowed here; questions that coincide as `(x, ω)` are merged.
pub fn qld_test(t: u32, m: usize, d: usize) -> Result<Game, GameError> {
    let k = t as usize * (d + 1).pow(m as u32);
    if k > MAX_QLD_K {
        return Err(GameError::Budget(format!("k = {k} exceeds {MAX_QLD_K}")));
    }
    let (code, tester) = brm_tester(t, m, d)?;
    let cols = generator_columns(&code)?;
    let mut b = GameBuilder::default();
    add_braiding_parts(&mut b, &code, &tester, &cols, 0.25)?;

    let p = z2k_eff_presentation(t, m, d)?;
    let comm: Vec<(usize, usize, f64)> = p
        .with_tag(Tag::Commutation)
        .filter(|r| r.weight > 0.0)
        .map(|r| (r.word.letters()[0].0, r.word.letters()[1].0, r.weight))
        .collect();
    let total: f64 = comm.iter().map(|c| c.2).sum();
    for &(i, i2, w) in &comm {
        for basis in [Basis::X, Basis::Z] {
            let u = PauliLabel { basis, k, a: cols[i] };
            let v = PauliLabel { basis, k, a: cols[i2] };
            let tag = format!("pc{}:", prefix(Some(basis)).trim_end_matches(':'));
            let pair = sub_question(&mut b, SubGame::Commutation, 2, u, v, &tag);
            let share = 0.25 * (w / total) * 0.5 * 0.5;
            let xi = var_question(&mut b, Some(basis), i, &cols);
            let xi2 = var_question(&mut b, Some(basis), i2, &cols);
            b.push(pair, xi, share, Rule::Coord { pos: 0 }, TestTag::PairwiseCommutation);
            b.push(pair, xi2, share, Rule::Coord { pos: 1 }, TestTag::PairwiseCommutation);
        }
    }
    Ok(b.finish(format!("qld({t},{m},{d})")))
}

/// The game checking (anti-)commutation between `σ^X(a)` and `σ^Z(b)` for `a, b` columns of `E`,
/// with the consistency test against full `k`-bit answers. The two tests get ½ each.
pub fn dls_game(e: &BitMatrix) -> Result<Game, GameError> {
    let (k, n) = (e.rows(), e.cols());
    if k == 0 || k > 12 {
        return Err(GameError::Budget(format!("k = {k} outside 1..=12")));
    }
    let rank = gf2_rank(e);
    if rank != k {
        return Err(GameError::RankDeficient { rank, k });
    }
    let mut s: Vec<u32> = Vec::new();
    for j in 0..n {
        let c = (0..k).map(|r| u32::from(e.get(r, j)) << r).sum();
        if !s.contains(&c) {
            s.push(c);
        }
    }
    let unit: Vec<u32> = (0..k).map(|t| 1 << t).collect();
    let mut b = GameBuilder::default();
    let big = |b: &mut GameBuilder, w: Basis| {
        b.question(prefix(Some(w)).trim_end_matches(':').to_string(), 1 << k, Some(Role::PauliRow { basis: w, labels: unit.clone() }))
    };
    let qx = big(&mut b, Basis::X);
    let qz = big(&mut b, Basis::Z);
    let single = |b: &mut GameBuilder, w: Basis, a: u32| {
        b.question(format!("{}{a:x}", prefix(Some(w))), 2, Some(Role::PauliRow { basis: w, labels: vec![a] }))
    };
    for &a in &s {
        single(&mut b, Basis::X, a);
        single(&mut b, Basis::Z, a);
    }
    let pair_w = 1.0 / (s.len() * s.len()) as f64;
    for &ox in &s {
        for &oz in &s {
            let u = PauliLabel { basis: Basis::X, k, a: ox };
            let v = PauliLabel { basis: Basis::Z, k, a: oz };
            let sub = omega_game((ox & oz).count_ones() % 2 == 1);
            let local: Vec<usize> = (0..sub.question_count()).map(|l| sub_question(&mut b, sub, l, u, v, "")).collect();
            let resolve = |b: &mut GameBuilder, l: usize| match l {
                0 => single(b, Basis::X, ox),
                1 => single(b, Basis::Z, oz),
                _ => local[l],
            };
            for (lx, ly, sw, rule) in sub.entries() {
                let (x, y) = (resolve(&mut b, lx), resolve(&mut b, ly));
                b.push(x, y, 0.5 * pair_w * sw, rule, TestTag::Commutation);
            }
            let sx = single(&mut b, Basis::X, ox);
            b.push(qx, sx, 0.25 * pair_w, Rule::Dot { omega: ox }, TestTag::Consistency);
            let sz = single(&mut b, Basis::Z, oz);
            b.push(qz, sz, 0.25 * pair_w, Rule::Dot { omega: oz }, TestTag::Consistency);
        }
    }
    Ok(b.finish(format!("dls[{k}x{n}]")))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{hadamard_code, SparseRow};
    use crate::field::BitVector;
    use crate::games::{classical_pass_probability, classical_value, game_value, validate_strategy, PauliStrategy, Strategy};
    use crate::linalg::{dist2_tau, op_norm};

    fn pauli_for(game: &Game, k: usize) -> PauliStrategy {
        let anc = game.questions.iter().any(|q| matches!(q.role, Some(Role::Sub { game: SubGame::Anticommutation, .. })));
        PauliStrategy::new(k, usize::from(anc))
    }

    #[test]
    fn hadamard_code_game() {
        let (code, tester) = hadamard_code(2);
        let g = code_game(&code, &tester).unwrap();
        g.validate().unwrap();
        assert_eq!(g.questions.len(), 16 + 4);
        let s = PauliStrategy::new(2, 0);
        validate_strategy(&g, &s).unwrap();
        assert!((game_value(&g, &s).unwrap().value - 1.0).abs() < 1e-12);
    }

    #[test]
    fn code_game_classical_deficit() {
        let (code, tester) = hadamard_code(2);
        let g = code_game(&code, &tester).unwrap();
        // codeword of message 1 is (0,1,0,1); flip position 0
        let word = [1usize, 1, 0, 1];
        let mut answers = vec![0usize; g.questions.len()];
        for (q, question) in g.questions.iter().enumerate() {
            if let Some(i) = question.id.strip_prefix("var") {
                answers[q] = word[i.parse::<usize>().unwrap()];
            } else {
                let j: usize = question.id[2..].parse().unwrap();
                answers[q] = tester.rows[j].iter().enumerate().map(|(t, &(i, _))| word[i] << t).sum();
            }
        }
        let v = classical_pass_probability(&g, &answers);
        // oracle: a row passes iff it avoids position 0, since the eq answers copy the word
        let mut oracle = 0.0;
        for row in &tester.rows {
            let par: usize = row.iter().map(|&(i, _)| word[i]).sum::<usize>() % 2;
            if par == 0 {
                oracle += 1.0 / tester.rows.len() as f64;
            }
        }
        assert!((v - oracle).abs() < 1e-12);
        assert!(v < 1.0);
    }

    #[test]
    fn code_game_rejects_zero_rows() {
        let (code, mut tester) = hadamard_code(2);
        tester.rows[3] = SparseRow::new();
        assert!(matches!(code_game(&code, &tester), Err(GameError::ZeroRow(3))));
    }

    #[test]
    fn braiding_hadamard_perfect() {
        let (code, tester) = hadamard_code(2);
        let g = braiding_test(&code, &tester).unwrap();
        g.validate().unwrap();
        let s = pauli_for(&g, 2);
        let rep = game_value(&g, &s).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9, "{rep:?}");
        for t in [TestTag::Code, TestTag::Commutation, TestTag::Consistency] {
            let share = rep.per_tag[t.name()].weight;
            assert!((share - 1.0 / 3.0).abs() < 1e-12);
            assert!((rep.pass_rate(t).unwrap() - 1.0).abs() < 1e-9);
        }
        // eq projectors are products of commuting var projectors
        let eq = g.question_index("X:eq7").unwrap();
        let p = s.measurement(&g, eq).unwrap();
        assert!(p.iter().all(|m| op_norm(&(m * m - m)) < 1e-12));
    }

    #[test]
    fn braiding_rejects_repeated_columns() {
        let (code, tester) = brm_tester(2, 1, 1).unwrap();
        assert!(matches!(braiding_test(&code, &tester), Err(GameError::RepeatedColumns(..))));
    }

    #[test]
    fn anticommutation_classical_gap() {
        let (best, _) = classical_value(&anticommutation_game(), 1 << 21).unwrap();
        assert!((best - (1.0 - 1.0 / 18.0)).abs() < 1e-12);
    }

    #[test]
    fn qld_perfect() {
        let g = qld_test(2, 1, 1).unwrap();
        g.validate().unwrap();
        let s = pauli_for(&g, 4);
        assert_eq!(s.pauli_dim(), 16);
        let rep = game_value(&g, &s).unwrap();
        assert!((rep.value - 1.0).abs() < 1e-9, "{rep:?}");
        assert!((rep.per_tag["pairwise_commutation"].weight - 0.25).abs() < 1e-12);
    }

    #[test]
    fn dls_counts_and_perfect_strategy() {
        let rows = [[1u8, 0, 1], [0, 1, 1]];
        let e = BitMatrix::from_rows(3, rows.iter().map(|r| BitVector::from_bits(r.iter().map(|&b| b == 1))).collect()).unwrap();
        let g = dls_game(&e).unwrap();
        g.validate().unwrap();
        // S = {01, 10, 11}: Ω₋ pairs have odd overlap
        let s: [u32; 3] = [1, 2, 3];
        let minus = s.iter().flat_map(|a| s.iter().map(move |b| (a & b).count_ones() % 2)).filter(|&g| g == 1).count();
        let plus = 9 - minus;
        assert_eq!(g.questions.len(), 2 + 3 * plus + 8 * minus + 2 * 3);
        let strat = pauli_for(&g, 2);
        let rep = game_value(&g, &strat).unwrap();
        assert!((rep.pass_rate(TestTag::Consistency).unwrap() - 1.0).abs() < 1e-12);
        assert!((rep.pass_rate(TestTag::Commutation).unwrap() - 1.0).abs() < 1e-12);
        let x = strat.measurement(&g, g.question_index("X:3").unwrap()).unwrap();
        let obs = &x[0] - &x[1];
        let direct = crate::pauli::pauli_observable(&PauliLabel { basis: Basis::X, k: 2, a: 3 });
        assert!(dist2_tau(&obs, &crate::linalg::kron(&direct, &crate::linalg::identity(2))) < 1e-24);
        let singular = BitMatrix::from_rows(3, vec![BitVector::from_bits([true, false, true]); 2]).unwrap();
        assert!(matches!(dls_game(&singular), Err(GameError::RankDeficient { .. })));
    }
}
