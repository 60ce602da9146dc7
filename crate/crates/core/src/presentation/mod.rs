//! Finite presentations `⟨S : R⟩` with weighted relations.

mod builders;
mod symmetry;

use std::fmt;

use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution;
use rand::Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use builders::{
    abelian_rank, pauli_mult_like, pauli_small, presentation_from_parity_check, std_z2k, z2k_eff_presentation,
    MuSpec, MAX_MULT_LIKE_K,
};
pub use symmetry::{canonical_relator, generate_group, is_automorphism, relation_orbits, Permutation};

#[derive(Debug, Error)]
pub enum PresentationError {
    #[error("parity check matrix is empty")]
    EmptyMatrix,
    #[error("relation {0} has length zero")]
    EmptyRelation(usize),
    #[error("relation {relation} references generator {generator} outside 0..{n}")]
    BadGenerator { relation: usize, generator: usize, n: usize },
    #[error("relation weights must be nonnegative and sum to 1 (sum = {0})")]
    BadWeights(f64),
    #[error("parameter out of range: {0}")]
    TooLarge(String),
    #[error("permutation is not an automorphism of the presentation")]
    NotAutomorphism,
    #[error("generated group exceeds {0} elements")]
    GroupTooLarge(usize),
    #[error(transparent)]
    Code(#[from] crate::codes::CodeError),
}

/// A free-group word: `(generator, ±1)` letters, read left to right.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Word(pub Vec<(usize, i8)>);

impl Word {
    pub fn new(letters: Vec<(usize, i8)>) -> Self {
        Word(letters)
    }

    /// `x²`
    pub fn square(x: usize) -> Self {
        Word(vec![(x, 1), (x, 1)])
    }

    /// `[x, y] = x y x⁻¹ y⁻¹`
    pub fn commutator(x: usize, y: usize) -> Self {
        Word(vec![(x, 1), (y, 1), (x, -1), (y, -1)])
    }

    /// Product of the given generators in the given order.
    pub fn product<I: IntoIterator<Item = usize>>(gens: I) -> Self {
        Word(gens.into_iter().map(|g| (g, 1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[(usize, i8)] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|&(g, e)| (g, -e)).collect())
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Word(v)
    }

    /// Applies a generator relabelling.
    pub fn map(&self, perm: &[usize]) -> Word {
        Word(self.0.iter().map(|&(g, e)| (perm[g], e)).collect())
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> =
            self.0.iter().map(|&(g, e)| if e == 1 { format!("x{g}") } else { format!("x{g}^-1") }).collect();
        write!(f, "{}", if parts.is_empty() { "e".to_string() } else { parts.join(" ") })
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Tag {
    Involution,
    Commutation,
    Row,
    Braiding,
    Product,
}

impl Tag {
    pub const ALL: [Tag; 5] = [Tag::Involution, Tag::Commutation, Tag::Row, Tag::Braiding, Tag::Product];

    pub fn name(self) -> &'static str {
        match self {
            Tag::Involution => "involution",
            Tag::Commutation => "commutation",
            Tag::Row => "row",
            Tag::Braiding => "braiding",
            Tag::Product => "product",
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub word: Word,
    pub tag: Tag,
    pub weight: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Presentation {
    #[serde(default)]
    pub name: String,
    pub n: usize,
    pub relations: Vec<Relation>,
}

/// Per-generator probabilities.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GeneratorDistribution(pub Vec<f64>);

impl Presentation {
    /// Checks generator indices and that the weights form a probability vector.
    pub fn validate(&self) -> Result<(), PresentationError> {
        for (i, r) in self.relations.iter().enumerate() {
            if let Some(&(g, _)) = r.word.0.iter().find(|l| l.0 >= self.n) {
                return Err(PresentationError::BadGenerator { relation: i, generator: g, n: self.n });
            }
            if r.word.0.iter().any(|l| l.1 != 1 && l.1 != -1) {
                return Err(PresentationError::BadWeights(f64::NAN));
            }
        }
        let total: f64 = self.relations.iter().map(|r| r.weight).sum();
        if self.relations.iter().any(|r| !(r.weight >= 0.0)) || (total - 1.0).abs() > 1e-12 {
            return Err(PresentationError::BadWeights(total));
        }
        Ok(())
    }

    pub fn relation_count(&self) -> usize {
        self.relations.len()
    }

    pub fn with_tag(&self, tag: Tag) -> impl Iterator<Item = &Relation> {
        self.relations.iter().filter(move |r| r.tag == tag)
    }

    /// Total weight carried by each tag that occurs.
    pub fn tag_weights(&self) -> Vec<(Tag, f64)> {
        Tag::ALL
            .iter()
            .filter_map(|&t| {
                let rs: Vec<_> = self.with_tag(t).collect();
                (!rs.is_empty()).then(|| (t, rs.iter().map(|r| r.weight).sum()))
            })
            .collect()
    }
}

/// `ℓ = |S| + Σ_r |r|`.
pub fn presentation_length(p: &Presentation) -> usize {
    p.n + p.relations.iter().map(|r| r.word.len()).sum::<usize>()
}

/// `μ_S(s) = E_{r∼μ_R}[mult_r(s) / |r|]`.
pub fn induced_generator_distribution(p: &Presentation) -> Result<GeneratorDistribution, PresentationError> {
    let mut mu = vec![0.0; p.n];
    for (i, r) in p.relations.iter().enumerate() {
        if r.word.is_empty() {
            return Err(PresentationError::EmptyRelation(i));
        }
        let share = r.weight / r.word.len() as f64;
        for &(g, _) in r.word.letters() {
            mu[g] += share;
        }
    }
    Ok(GeneratorDistribution(mu))
}

/// Draws relations according to `μ_R`.
pub struct RelationSampler<'a> {
    presentation: &'a Presentation,
    index: WeightedIndex<f64>,
}

impl<'a> RelationSampler<'a> {
    pub fn new(p: &'a Presentation) -> Result<Self, PresentationError> {
        let index = WeightedIndex::new(p.relations.iter().map(|r| r.weight))
            .map_err(|_| PresentationError::BadWeights(p.relations.iter().map(|r| r.weight).sum()))?;
        Ok(RelationSampler { presentation: p, index })
    }

    pub fn sample_index<R: Rng + ?Sized>(&self, rng: &mut R) -> usize {
        self.index.sample(rng)
    }

    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> &'a Relation {
        &self.presentation.relations[self.index.sample(rng)]
    }
}

/// One relation drawn from `μ_R` with a seeded stream.
pub fn sample_relation(p: &Presentation, seed: u64) -> Result<Word, PresentationError> {
    let sampler = RelationSampler::new(p)?;
    let mut rng = crate::rng::stream(seed, "presentation/sample");
    Ok(sampler.sample(&mut rng).word.clone())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn length_counts() {
        let p = std_z2k(2);
        assert_eq!(presentation_length(&p), 10);
        let empty = Presentation { name: String::new(), n: 3, relations: vec![] };
        assert_eq!(presentation_length(&empty), 3);
    }

    #[test]
    fn length_of_z2_multiplication_table() {
        // generators e, g; relations a·b·(ab)⁻¹ for all four pairs
        let mul = |a: usize, b: usize| a ^ b;
        let relations = (0..2)
            .flat_map(|a| (0..2).map(move |b| (a, b)))
            .map(|(a, b)| Relation { word: Word(vec![(a, 1), (b, 1), (mul(a, b), -1)]), tag: Tag::Product, weight: 0.25 })
            .collect();
        let p = Presentation { name: "z2-table".into(), n: 2, relations };
        assert_eq!(presentation_length(&p), 14);
    }

    #[test]
    fn induced_mu_for_aba() {
        let p = Presentation {
            name: String::new(),
            n: 2,
            relations: vec![Relation { word: Word(vec![(0, 1), (1, 1), (0, 1)]), tag: Tag::Product, weight: 1.0 }],
        };
        let mu = induced_generator_distribution(&p).unwrap().0;
        assert!((mu[0] - 2.0 / 3.0).abs() < 1e-15 && (mu[1] - 1.0 / 3.0).abs() < 1e-15);
        let sq = Presentation {
            name: String::new(),
            n: 1,
            relations: vec![Relation { word: Word::square(0), tag: Tag::Involution, weight: 1.0 }],
        };
        assert_eq!(induced_generator_distribution(&sq).unwrap().0, vec![1.0]);
        let bad = Presentation {
            name: String::new(),
            n: 1,
            relations: vec![Relation { word: Word::default(), tag: Tag::Row, weight: 1.0 }],
        };
        assert!(induced_generator_distribution(&bad).is_err());
    }

    #[test]
    fn validation_catches_bad_generators_and_weights() {
        let mut p = std_z2k(3);
        p.validate().unwrap();
        p.relations[0].weight += 0.1;
        assert!(matches!(p.validate(), Err(PresentationError::BadWeights(_))));
        let mut q = std_z2k(3);
        q.relations[0].word.0[0].0 = 7;
        assert!(matches!(q.validate(), Err(PresentationError::BadGenerator { .. })));
    }

    #[test]
    fn sampling_is_seeded() {
        let p = std_z2k(4);
        assert_eq!(sample_relation(&p, 3).unwrap(), sample_relation(&p, 3).unwrap());
    }

    #[test]
    fn json_shape() {
        let p = std_z2k(2);
        let v: serde_json::Value = serde_json::to_value(&p).unwrap();
        assert_eq!(v["n"], 2);
        assert_eq!(v["relations"][0]["tag"], "commutation");
        assert_eq!(v["relations"][0]["word"], serde_json::json!([[0, 1], [1, 1], [0, -1], [1, -1]]));
        let back: Presentation = serde_json::from_value(v).unwrap();
        assert_eq!(back, p);
    }
}
