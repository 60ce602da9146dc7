use std::collections::VecDeque;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::ToPrimitive;
use rand::seq::index::sample;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::{row_eval, CodeError, LinearCode, LocalTester};
use crate::rng;

fn check_budget(q: u32, exp: usize, budget: u128) -> Result<u128, CodeError> {
    let needed = (q as u128).checked_pow(exp as u32).unwrap_or(u128::MAX);
    if needed > budget {
        return Err(CodeError::BudgetExceeded { needed, budget });
    }
    Ok(needed)
}

/// All `q^k` codewords, in message order (message digit 0 fastest).
pub fn codewords(code: &LinearCode, budget: u128) -> Result<Vec<Vec<u32>>, CodeError> {
    let total = check_budget(code.q(), code.k, budget)? as usize;
    let q = code.q();
    let mut msg = vec![0u32; code.k];
    let mut out = Vec::with_capacity(total);
    for _ in 0..total {
        out.push(code.encode(&msg));
        for digit in msg.iter_mut() {
            *digit += 1;
            if *digit < q {
                break;
            }
            *digit = 0;
        }
    }
    Ok(out)
}

/// Minimum weight of a nonzero codeword, by enumeration of all `q^k` codewords.
pub fn code_distance(code: &LinearCode, budget: u128) -> Result<usize, CodeError> {
    if code.k == 0 {
        return Err(CodeError::Invalid("the zero code has no distance".into()));
    }
    Ok(codewords(code, budget)?
        .iter()
        .skip(1)
        .map(|w| w.iter().filter(|&&v| v != 0).count())
        .min()
        .expect("k >= 1 gives a nonzero codeword"))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SoundnessMethod {
    Exhaustive,
    Sampled,
}

#[derive(Clone, Debug)]
pub struct SoundnessOptions {
    /// Largest word space `q^n` searched exhaustively.
    pub budget: u128,
    pub samples: usize,
    pub seed: u64,
}

impl Default for SoundnessOptions {
    fn default() -> Self {
        SoundnessOptions { budget: 1 << 24, samples: 20_000, seed: 0 }
    }
}

#[derive(Clone, Debug, Serialize, Deserialize, PartialEq)]
pub struct SoundnessReport {
    pub rho: f64,
    /// Exact minimum as `num/den`.
    pub rho_exact: String,
    pub witness: Vec<u32>,
    pub witness_distance: usize,
    pub method: SoundnessMethod,
    pub samples: u64,
    pub seed: Option<u64>,
    pub locality: usize,
    pub note: String,
}

struct Scorer<'a> {
    code: &'a LinearCode,
    tester: &'a LocalTester,
    weights: Vec<i128>,
    denom: i128,
}

impl<'a> Scorer<'a> {
    fn new(code: &'a LinearCode, tester: &'a LocalTester) -> Self {
        let denom = tester.nu.iter().fold(1i128, |acc, w| acc.lcm(&i128::from(*w.denom())));
        let weights = tester.nu.iter().map(|w| i128::from(*w.numer()) * (denom / i128::from(*w.denom()))).collect();
        Scorer { code, tester, weights, denom }
    }

    /// `(rejection probability) / (relative distance)` as an exact fraction.
    fn ratio(&self, x: &[u32], dist: usize) -> Ratio<i128> {
        let rej: i128 = self
            .tester
            .rows
            .iter()
            .zip(&self.weights)
            .filter(|(r, _)| row_eval(&self.code.field, r, x) != 0)
            .map(|(_, &w)| w)
            .sum();
        Ratio::new(rej * self.code.n as i128, self.denom * dist as i128)
    }
}

fn unpack(w: usize, n: usize, t: u32) -> Vec<u32> {
    let mask = (1usize << t) - 1;
    (0..n).map(|i| (w >> (t as usize * i) & mask) as u32).collect()
}

fn pack(x: &[u32], t: u32) -> usize {
    x.iter().enumerate().map(|(i, &v)| (v as usize) << (t as usize * i)).sum()
}

fn report(best: (Ratio<i128>, Vec<u32>, usize), method: SoundnessMethod, samples: u64, seed: Option<u64>, locality: usize, note: String) -> SoundnessReport {
    let (r, witness, witness_distance) = best;
    SoundnessReport {
        rho: r.to_f64().unwrap_or(f64::NAN),
        rho_exact: format!("{}/{}", r.numer(), r.denom()),
        witness,
        witness_distance,
        method,
        samples,
        seed,
        locality,
        note,
    }
}

/// Soundness `ρ = min_{x ∉ C} Pr_ν[row·x ≠ 0] / (d(x,C)/n)`.
///
/// Exhaustive when `q^n` fits the budget: distances to the code come from a multi-source
/// breadth-first search seeded at the codewords. Otherwise words are sampled as a random
/// codeword plus an error of uniformly random weight, and distances are found by scanning
/// all codewords; the reported minimum is then an upper estimate of the true ρ.
pub fn tester_soundness(code: &LinearCode, tester: &LocalTester, opts: &SoundnessOptions) -> Result<SoundnessReport, CodeError> {
    tester.validate()?;
    let scorer = Scorer::new(code, tester);
    let t = code.field.t();
    let q = code.q();
    let space = (q as u128).checked_pow(code.n as u32).unwrap_or(u128::MAX);
    if space <= opts.budget && space <= 1 << 30 {
        let size = space as usize;
        let mut dist = vec![u8::MAX; size];
        let mut queue = VecDeque::new();
        for c in codewords(code, opts.budget)? {
            let p = pack(&c, t);
            dist[p] = 0;
            queue.push_back(p);
        }
        while let Some(w) = queue.pop_front() {
            let dw = dist[w];
            for i in 0..code.n {
                for delta in 1..q as usize {
                    let nb = w ^ (delta << (t as usize * i));
                    if dist[nb] == u8::MAX {
                        dist[nb] = dw + 1;
                        queue.push_back(nb);
                    }
                }
            }
        }
        let mut best: Option<(Ratio<i128>, Vec<u32>, usize)> = None;
        let mut count = 0u64;
        for (w, &dw) in dist.iter().enumerate() {
            if dw == 0 {
                continue;
            }
            count += 1;
            let x = unpack(w, code.n, t);
            let r = scorer.ratio(&x, dw as usize);
            if best.as_ref().is_none_or(|b| r < b.0) {
                best = Some((r, x, dw as usize));
            }
        }
        let best = best.ok_or_else(|| CodeError::Invalid("code is the whole space".into()))?;
        return Ok(report(best, SoundnessMethod::Exhaustive, count, None, tester.locality(), format!("exact over all {count} non-codewords")));
    }

    let words = codewords(code, 1 << 16)?;
    let mut rng = rng::stream(opts.seed, "codes/soundness");
    let mut best: Option<(Ratio<i128>, Vec<u32>, usize)> = None;
    let mut used = 0u64;
    for _ in 0..opts.samples {
        let weight = rng.random_range(1..=code.n);
        let mut x = words[rng.random_range(0..words.len())].clone();
        for pos in sample(&mut rng, code.n, weight) {
            x[pos] ^= rng.random_range(1..q);
        }
        let d = words
            .iter()
            .map(|c| c.iter().zip(&x).filter(|(a, b)| a != b).count())
            .min()
            .expect("at least one codeword");
        if d == 0 {
            continue;
        }
        used += 1;
        let r = scorer.ratio(&x, d);
        if best.as_ref().is_none_or(|b| r < b.0) {
            best = Some((r, x, d));
        }
    }
    let best = best.ok_or_else(|| CodeError::Invalid("no non-codeword was sampled".into()))?;
    Ok(report(
        best,
        SoundnessMethod::Sampled,
        used,
        Some(opts.seed),
        tester.locality(),
        format!("minimum over {used} sampled non-codewords stratified by error weight; true rho is at most this value"),
    ))
}
