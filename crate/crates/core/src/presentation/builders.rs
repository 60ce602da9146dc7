use std::collections::HashMap;

use super::{Presentation, PresentationError, Relation, Tag, Word};
use crate::codes::{brm_tester, nodes, point_coords, point_index};
use crate::field::BitMatrix;

/// Largest `k` accepted by [`pauli_mult_like`] (the relation count grows like `3·4^k`).
pub const MAX_MULT_LIKE_K: usize = 8;

/// How `μ_R` is assigned to a presentation built from a parity check.
#[derive(Clone, Debug, Default, PartialEq)]
pub enum MuSpec {
    /// ⅓ uniform on involutions, ⅓ uniform on row indices, ⅓ uniform on commutators.
    #[default]
    Thirds,
    /// Induced by a row distribution `ν`: ⅓ `ν_S` on `x_i²`, ⅓ `ν` on rows, ⅓ on `[x_i, x_i']`
    /// with `j ∼ ν` and `i ≠ i'` uniform in the support of row `j`.
    TesterInduced(Vec<f64>),
    /// `j` uniform among rows of weight ≥ 2, `i ≠ i'` uniform in its support, then ⅓ each of
    /// `x_i²`, `R_j`, `[x_i, x_i']`.
    CodeGame,
    /// Uniform over the distinct relations.
    Uniform,
}

/// Accumulates relations, merging identical words.
#[derive(Default)]
struct Builder {
    relations: Vec<Relation>,
    index: HashMap<Word, usize>,
}

impl Builder {
    fn add(&mut self, word: Word, tag: Tag, weight: f64) {
        match self.index.get(&word) {
            Some(&i) => self.relations[i].weight += weight,
            None => {
                self.index.insert(word.clone(), self.relations.len());
                self.relations.push(Relation { word, tag, weight });
            }
        }
    }

    fn finish(self, name: String, n: usize) -> Presentation {
        Presentation { name, n, relations: self.relations }
    }
}

/// Scales each family to its share; families with no mass drop out and the rest renormalize.
fn mix(families: Vec<(Vec<(Word, f64)>, Tag, f64)>) -> Vec<(Word, Tag, f64)> {
    let live: Vec<_> = families
        .into_iter()
        .filter(|(items, _, share)| *share > 0.0 && items.iter().map(|i| i.1).sum::<f64>() > 0.0)
        .collect();
    let share_total: f64 = live.iter().map(|f| f.2).sum();
    let mut out = Vec::new();
    for (items, tag, share) in live {
        let total: f64 = items.iter().map(|i| i.1).sum();
        for (w, x) in items {
            out.push((w, tag, x / total * share / share_total));
        }
    }
    out
}

fn pairs(support: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    support.iter().enumerate().flat_map(move |(a, &i)| support[a + 1..].iter().map(move |&j| (i, j)))
}

/// `G(h)` and its all-commutators variant.
///
/// Zero rows of `h` give the trivial relation and are skipped. Identical relations (e.g. repeated
/// rows) are merged and their weights added.
pub fn presentation_from_parity_check(h: &BitMatrix, all_commutators: bool, mu: &MuSpec) -> Result<Presentation, PresentationError> {
    if h.rows() == 0 || h.cols() == 0 {
        return Err(PresentationError::EmptyMatrix);
    }
    let n = h.cols();
    let supports: Vec<Vec<usize>> = h.row_iter().map(|r| r.ones().collect()).collect();
    let nonzero: Vec<usize> = (0..supports.len()).filter(|&j| !supports[j].is_empty()).collect();

    let involutions: Vec<Word> = (0..n).map(Word::square).collect();
    let comm_pairs: Vec<(usize, usize)> = if all_commutators {
        (0..n).flat_map(|i| (i + 1..n).map(move |j| (i, j))).collect()
    } else {
        let mut seen = std::collections::BTreeSet::new();
        for s in &supports {
            seen.extend(pairs(s));
        }
        seen.into_iter().collect()
    };
    let row_word = |j: usize| Word::product(supports[j].iter().copied());

    let weighted: Vec<(Word, Tag, f64)> = match mu {
        MuSpec::Thirds => mix(vec![
            (involutions.iter().map(|w| (w.clone(), 1.0)).collect(), Tag::Involution, 1.0),
            (nonzero.iter().map(|&j| (row_word(j), 1.0)).collect(), Tag::Row, 1.0),
            (comm_pairs.iter().map(|&(a, b)| (Word::commutator(a, b), 1.0)).collect(), Tag::Commutation, 1.0),
        ]),
        MuSpec::Uniform => {
            let mut b = Builder::default();
            for w in &involutions {
                b.add(w.clone(), Tag::Involution, 0.0);
            }
            for &j in &nonzero {
                b.add(row_word(j), Tag::Row, 0.0);
            }
            for &(x, y) in &comm_pairs {
                b.add(Word::commutator(x, y), Tag::Commutation, 0.0);
            }
            let count = b.relations.len() as f64;
            b.relations.into_iter().map(|r| (r.word, r.tag, 1.0 / count)).collect()
        }
        MuSpec::TesterInduced(nu) => {
            if nu.len() != h.rows() || nu.iter().any(|&w| !(w >= 0.0)) {
                return Err(PresentationError::BadWeights(nu.iter().sum()));
            }
            let mut sq = vec![0.0; n];
            let mut rows = Vec::new();
            let mut comm = Vec::new();
            for &j in &nonzero {
                let s = &supports[j];
                for &i in s {
                    sq[i] += nu[j] / s.len() as f64;
                }
                rows.push((row_word(j), nu[j]));
                let np = (s.len() * (s.len() - 1) / 2) as f64;
                comm.extend(pairs(s).map(|(a, b)| (Word::commutator(a, b), nu[j] / np)));
            }
            mix(vec![
                (involutions.iter().cloned().zip(sq).collect(), Tag::Involution, 1.0),
                (rows, Tag::Row, 1.0),
                (comm, Tag::Commutation, 1.0),
            ])
        }
        MuSpec::CodeGame => {
            let eligible: Vec<usize> = nonzero.iter().copied().filter(|&j| supports[j].len() >= 2).collect();
            if eligible.is_empty() {
                return Err(PresentationError::TooLarge("no row of weight at least 2".into()));
            }
            let pj = 1.0 / eligible.len() as f64;
            let mut sq = vec![0.0; n];
            let mut rows = Vec::new();
            let mut comm = Vec::new();
            for &j in &eligible {
                let s = &supports[j];
                for &i in s {
                    sq[i] += pj / s.len() as f64;
                }
                rows.push((row_word(j), pj));
                let np = (s.len() * (s.len() - 1) / 2) as f64;
                comm.extend(pairs(s).map(|(a, b)| (Word::commutator(a, b), pj / np)));
            }
            mix(vec![
                (involutions.iter().cloned().zip(sq).collect(), Tag::Involution, 1.0),
                (rows, Tag::Row, 1.0),
                (comm, Tag::Commutation, 1.0),
            ])
        }
    };

    let mut b = Builder::default();
    // every generator keeps its involution, and every listed commutator appears, even at weight 0
    for w in involutions {
        b.add(w, Tag::Involution, 0.0);
    }
    for (w, tag, x) in weighted {
        b.add(w, tag, x);
    }
    for &(x, y) in &comm_pairs {
        b.add(Word::commutator(x, y), Tag::Commutation, 0.0);
    }
    for &j in &nonzero {
        b.add(row_word(j), Tag::Row, 0.0);
    }
    let name = if all_commutators { "G~(h)" } else { "G(h)" };
    Ok(b.finish(name.into(), n))
}

/// `n − rank(h)`: the rank of the abelian group presented with all commutators added.
pub fn abelian_rank(h: &BitMatrix) -> usize {
    h.cols() - h.rank()
}

/// `⟨x_1..x_k : [x_i,x_j], x_i²⟩` with `μ_R` ½ uniform on commutators, ½ uniform on involutions.
pub fn std_z2k(k: usize) -> Presentation {
    let comms: Vec<(Word, f64)> =
        (0..k).flat_map(|i| (i + 1..k).map(move |j| (Word::commutator(i, j), 1.0))).collect();
    let squares: Vec<(Word, f64)> = (0..k).map(|i| (Word::square(i), 1.0)).collect();
    let mut b = Builder::default();
    for (w, tag, x) in mix(vec![(comms, Tag::Commutation, 1.0), (squares, Tag::Involution, 1.0)]) {
        b.add(w, tag, x);
    }
    b.finish(format!("std_z2k({k})"), k)
}

/// Generator layout of [`pauli_small`]: `x_i = i`, `z_i = k + i`, `J = 2k`.
pub fn pauli_small(k: usize) -> Presentation {
    let (x, z, j) = (|i: usize| i, |i: usize| k + i, 2 * k);
    let squares: Vec<(Word, f64)> = (0..k).flat_map(|i| [x(i), z(i)]).map(|g| (Word::square(g), 1.0)).collect();
    let braids: Vec<(Word, f64)> =
        (0..k).map(|i| (Word::commutator(x(i), z(i)).concat(&Word(vec![(j, -1)])), 1.0)).collect();
    let types: [(fn(usize, usize) -> bool, &dyn Fn(usize) -> usize, &dyn Fn(usize) -> usize); 3] =
        [(|a, b| a < b, &x, &x), (|a, b| a < b, &z, &z), (|a, b| a != b, &x, &z)];
    let mut comm: Vec<(Word, f64)> = Vec::new();
    for (keep, f, g) in types {
        let family: Vec<Word> = (0..k)
            .flat_map(|a| (0..k).map(move |b| (a, b)))
            .filter(|&(a, b)| keep(a, b))
            .map(|(a, b)| Word::commutator(f(a), g(b)))
            .collect();
        let share = 1.0 / family.len().max(1) as f64;
        comm.extend(family.into_iter().map(|w| (w, share)));
    }
    let mut b = Builder::default();
    let weighted = mix(vec![
        (vec![(Word::square(j), 1.0)], Tag::Involution, 1.0),
        (squares, Tag::Involution, 1.0),
        (braids, Tag::Braiding, 1.0),
        (comm, Tag::Commutation, 1.0),
    ]);
    for (w, tag, wt) in weighted {
        b.add(w, tag, wt);
    }
    for i in 0..k {
        b.add(Word::commutator(x(i), j), Tag::Commutation, 0.0);
        b.add(Word::commutator(z(i), j), Tag::Commutation, 0.0);
    }
    b.finish(format!("pauli_small({k})"), 2 * k + 1)
}

/// The almost-multiplication-table presentation of the Pauli group, `μ_R` uniform.
///
/// Generators: `(a,0) = a`, `(0,b) = 2^k + b`, `J = 2^{k+1}`.
pub fn pauli_mult_like(k: usize) -> Result<Presentation, PresentationError> {
    if k == 0 || k > MAX_MULT_LIKE_K {
        return Err(PresentationError::TooLarge(format!("pauli_mult_like needs 1 <= k <= {MAX_MULT_LIKE_K}, got {k}")));
    }
    let size = 1usize << k;
    let (xa, zb, j) = (|a: usize| a, |b: usize| size + b, 2 * size);
    let mut words: Vec<(Word, Tag)> = Vec::new();
    words.push((Word::square(j), Tag::Involution));
    for a in 0..size {
        words.push((Word::square(xa(a)), Tag::Involution));
        words.push((Word::square(zb(a)), Tag::Involution));
    }
    for a in 0..size {
        words.push((Word::commutator(xa(a), j), Tag::Commutation));
        words.push((Word::commutator(zb(a), j), Tag::Commutation));
    }
    for a in 0..size {
        for b in 0..size {
            words.push((Word(vec![(xa(a), 1), (xa(b), 1), (xa(a ^ b), -1)]), Tag::Product));
            words.push((Word(vec![(zb(a), 1), (zb(b), 1), (zb(a ^ b), -1)]), Tag::Product));
        }
    }
    for a in 0..size {
        for b in 0..size {
            let mut w = Word::commutator(xa(a), zb(b));
            if (a & b).count_ones() % 2 == 1 {
                w = w.concat(&Word(vec![(j, -1)]));
            }
            words.push((w, Tag::Braiding));
        }
    }
    let mut b = Builder::default();
    let weight = 1.0 / words.len() as f64;
    for (w, tag) in words {
        b.add(w, tag, weight);
    }
    Ok(b.finish(format!("pauli_mult_like({k})"), 2 * size + 1))
}

/// The presentation of `Z_2^K` from the binary Reed-Muller tester with all commutators.
///
/// Generator `(u, α)` has index `u·q + α`. `μ_R` puts ¼ on each of the involutions, the
/// low-degree rows and the Hadamard rows (each weighted by its multiplicity among the tester
/// rows, zero rows dropped), and ¼ on commutators via the even mixture of the two sampling
/// procedures (each conditioned on the two generators being distinct).
pub fn z2k_eff_presentation(t: u32, m: usize, d: usize) -> Result<Presentation, PresentationError> {
    let (code, tester) = brm_tester(t, m, d)?;
    let q = 1usize << t;
    let points = q.pow(m as u32);
    let n = code.n;
    let ld_count = points * m * q * q;

    let row_family = |rows: &[Vec<(usize, u32)>]| -> Vec<(Word, f64)> {
        rows.iter().filter(|r| !r.is_empty()).map(|r| (Word::product(r.iter().map(|e| e.0)), 1.0)).collect()
    };
    let ld = row_family(&tester.rows[..ld_count]);
    let had = row_family(&tester.rows[ld_count..]);
    let squares: Vec<(Word, f64)> = (0..n).map(|g| (Word::square(g), 1.0)).collect();

    let gen = |p: &[u32], a: usize| point_index(p, q as u32) * q + a;
    let ts = nodes(d);
    let mut first: HashMap<(usize, usize), f64> = HashMap::new();
    if m >= 1 && d >= 1 {
        let w = 1.0 / (points * m * (d + 1) * d * q * q) as f64;
        for u in 0..points {
            let uc = point_coords(u, q as u32, m);
            for j in 0..m {
                for i in 0..=d {
                    for i2 in (0..=d).filter(|&i2| i2 != i) {
                        let mut p = uc.clone();
                        p[j] ^= ts[i];
                        let mut p2 = uc.clone();
                        p2[j] ^= ts[i2];
                        for a in 0..q {
                            for b in 0..q {
                                let (x, y) = (gen(&p, a), gen(&p2, b));
                                *first.entry((x.min(y), x.max(y))).or_default() += w;
                            }
                        }
                    }
                }
            }
        }
    }
    let mut second: HashMap<(usize, usize), f64> = HashMap::new();
    for j in 1..=m {
        // the last j−1 coordinates are shared; the first m−j+1 are free for v and v'
        let free = m - j + 1;
        let free_count = q.pow(free as u32);
        let w = 1.0 / (m * q.pow(j as u32 - 1) * free_count * free_count * q * q) as f64;
        for suffix in 0..q.pow(j as u32 - 1) {
            for v in 0..free_count {
                for v2 in 0..free_count {
                    let base = suffix * free_count;
                    let (pv, pv2) = (base + v, base + v2);
                    for a in 0..q {
                        for b in 0..q {
                            let (x, y) = (pv * q + a, pv2 * q + b);
                            if x != y {
                                *second.entry((x.min(y), x.max(y))).or_default() += w;
                            }
                        }
                    }
                }
            }
        }
    }
    let normalize = |map: HashMap<(usize, usize), f64>| -> HashMap<(usize, usize), f64> {
        let map: HashMap<_, _> = map.into_iter().filter(|(k, _)| k.0 != k.1).collect();
        let total: f64 = map.values().sum();
        map.into_iter().map(|(k, v)| (k, v / total)).collect()
    };
    let (first, second) = (normalize(first), normalize(second));
    let parts = [first, second].into_iter().filter(|p| !p.is_empty()).collect::<Vec<_>>();
    let mut comm: HashMap<(usize, usize), f64> = HashMap::new();
    for p in &parts {
        for (k, v) in p {
            *comm.entry(*k).or_default() += v / parts.len() as f64;
        }
    }
    let mut comm: Vec<_> = comm.into_iter().collect();
    comm.sort_by_key(|e| e.0);
    let comm_family: Vec<(Word, f64)> = comm.into_iter().map(|((x, y), w)| (Word::commutator(x, y), w)).collect();

    let mut b = Builder::default();
    for (w, tag, x) in mix(vec![
        (squares, Tag::Involution, 1.0),
        (ld, Tag::Row, 1.0),
        (had, Tag::Row, 1.0),
        (comm_family, Tag::Commutation, 1.0),
    ]) {
        b.add(w, tag, x);
    }
    Ok(b.finish(format!("z2k_eff({t},{m},{d})"), n))
}
