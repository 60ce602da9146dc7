use std::collections::{HashMap, HashSet, VecDeque};

use super::{Presentation, PresentationError, Word};

/// A relabelling of generators: generator `g` goes to `perm[g]`.
pub type Permutation = Vec<usize>;

fn free_reduce(letters: &[(usize, i8)]) -> Vec<(usize, i8)> {
    let mut out: Vec<(usize, i8)> = Vec::with_capacity(letters.len());
    for &l in letters {
        match out.last() {
            Some(&(g, e)) if g == l.0 && e == -l.1 => {
                out.pop();
            }
            _ => out.push(l),
        }
    }
    // cyclic reduction
    let mut lo = 0;
    let mut hi = out.len();
    while hi - lo >= 2 && out[lo].0 == out[hi - 1].0 && out[lo].1 == -out[hi - 1].1 {
        lo += 1;
        hi -= 1;
    }
    out[lo..hi].to_vec()
}

/// Representative of the set of words that impose the same relation: the minimum over all
/// cyclic rotations of the cyclically reduced word and of its inverse.
pub fn canonical_relator(w: &Word) -> Word {
    let reduced = free_reduce(w.letters());
    let inv = Word(reduced.clone()).inverse().0;
    let n = reduced.len();
    let mut best: Option<Vec<(usize, i8)>> = None;
    for base in [&reduced, &inv] {
        for s in 0..n.max(1) {
            let rot: Vec<_> = base[s.min(n)..].iter().chain(&base[..s.min(n)]).copied().collect();
            if best.as_ref().is_none_or(|b| rot < *b) {
                best = Some(rot);
            }
        }
    }
    Word(best.unwrap_or_default())
}

fn weight_key(x: f64) -> i64 {
    (x * 1e12).round() as i64
}

fn relator_profile(p: &Presentation, perm: Option<&[usize]>) -> HashMap<Word, i64> {
    let mut out: HashMap<Word, f64> = HashMap::new();
    for r in &p.relations {
        let w = match perm {
            Some(pm) => r.word.map(pm),
            None => r.word.clone(),
        };
        *out.entry(canonical_relator(&w)).or_default() += r.weight;
    }
    out.into_iter().map(|(k, v)| (k, weight_key(v))).filter(|(_, v)| *v != 0).collect()
}

fn is_permutation(perm: &[usize], n: usize) -> bool {
    perm.len() == n && {
        let mut seen = vec![false; n];
        perm.iter().all(|&g| g < n && !std::mem::replace(&mut seen[g], true))
    }
}

/// Whether relabelling generators by `perm` maps the weighted relation set onto itself.
pub fn is_automorphism(p: &Presentation, perm: &[usize]) -> bool {
    is_permutation(perm, p.n) && relator_profile(p, None) == relator_profile(p, Some(perm))
}

fn compose(a: &[usize], b: &[usize]) -> Permutation {
    // apply b first, then a
    b.iter().map(|&x| a[x]).collect()
}

/// Closure of `gens` under composition, identity first; errors past `budget` elements.
pub fn generate_group(n: usize, gens: &[Permutation], budget: usize) -> Result<Vec<Permutation>, PresentationError> {
    if let Some(bad) = gens.iter().find(|g| !is_permutation(g, n)) {
        return Err(PresentationError::TooLarge(format!("not a permutation of {n} generators: {bad:?}")));
    }
    let id: Permutation = (0..n).collect();
    let mut seen: HashSet<Permutation> = HashSet::from([id.clone()]);
    let mut order = vec![id.clone()];
    let mut queue = VecDeque::from([id]);
    while let Some(x) = queue.pop_front() {
        for g in gens {
            let y = compose(g, &x);
            if seen.insert(y.clone()) {
                if order.len() >= budget {
                    return Err(PresentationError::GroupTooLarge(budget));
                }
                order.push(y.clone());
                queue.push_back(y);
            }
        }
    }
    Ok(order)
}

/// Orbits of the relations under a permutation group, with the `μ_R` mass of each orbit.
///
/// Relations are identified up to [`canonical_relator`]; each orbit lists relation indices.
pub fn relation_orbits(p: &Presentation, group: &[Permutation]) -> Result<(Vec<Vec<usize>>, Vec<f64>), PresentationError> {
    for g in group {
        if !is_automorphism(p, g) {
            return Err(PresentationError::NotAutomorphism);
        }
    }
    let canon: Vec<Word> = p.relations.iter().map(|r| canonical_relator(&r.word)).collect();
    let mut by_canon: HashMap<&Word, Vec<usize>> = HashMap::new();
    for (i, c) in canon.iter().enumerate() {
        by_canon.entry(c).or_default().push(i);
    }
    let mut assigned = vec![false; p.relations.len()];
    let mut orbits = Vec::new();
    let mut weights = Vec::new();
    for i in 0..p.relations.len() {
        if assigned[i] {
            continue;
        }
        let mut orbit = Vec::new();
        for g in group {
            let image = canonical_relator(&p.relations[i].word.map(g));
            for &j in by_canon.get(&image).into_iter().flatten() {
                if !assigned[j] {
                    assigned[j] = true;
                    orbit.push(j);
                }
            }
        }
        orbit.sort_unstable();
        weights.push(orbit.iter().map(|&j| p.relations[j].weight).sum());
        orbits.push(orbit);
    }
    Ok((orbits, weights))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::presentation::std_z2k;

    fn sym3() -> Vec<Permutation> {
        vec![vec![1, 0, 2], vec![1, 2, 0]]
    }

    #[test]
    fn canonical_forms() {
        let c = Word::commutator(0, 1);
        assert_eq!(canonical_relator(&c), canonical_relator(&Word::commutator(1, 0)));
        assert_eq!(canonical_relator(&c), canonical_relator(&c.inverse()));
        let padded = Word(vec![(3, 1), (0, 1), (0, -1), (3, -1), (2, 1), (2, 1)]);
        assert_eq!(canonical_relator(&padded), canonical_relator(&Word::square(2)));
        assert_eq!(canonical_relator(&Word(vec![(1, 1), (1, -1)])), Word::default());
    }

    #[test]
    fn sym3_on_std_z2k() {
        let p = std_z2k(3);
        let group = generate_group(3, &sym3(), 100).unwrap();
        assert_eq!(group.len(), 6);
        assert!(group.iter().all(|g| is_automorphism(&p, g)));
        let (orbits, weights) = relation_orbits(&p, &group).unwrap();
        assert_eq!(orbits.len(), 2);
        let mut w = weights.clone();
        w.sort_by(f64::total_cmp);
        assert!((w[0] - 0.5).abs() < 1e-12 && (w[1] - 0.5).abs() < 1e-12);
    }

    #[test]
    fn non_automorphisms_and_budget() {
        let mut p = std_z2k(3);
        p.relations[0].weight += 0.1;
        p.relations[1].weight -= 0.1;
        assert!(!is_automorphism(&p, &[1, 2, 0]));
        assert!(!is_automorphism(&p, &[0, 0, 1]));
        assert!(matches!(generate_group(3, &sym3(), 3), Err(PresentationError::GroupTooLarge(3))));
        assert_eq!(generate_group(3, &[], 1).unwrap(), vec![vec![0, 1, 2]]);
    }
}
