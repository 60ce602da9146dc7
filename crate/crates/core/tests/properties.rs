use std::sync::Arc;

use proptest::prelude::*;
use rand::Rng;

use stabforge::codes::{hadamard_code, reed_muller_code, rm_tester, row_eval};
use stabforge::field::{kappa, BitMatrix, BitVector, FieldSpec};
use stabforge::games::{
    anticommutation_game, classical_pass_probability, commutation_game, data_processing_check, deterministic_strategy,
    game_value, value_gap_check, DenseStrategy, PerturbedStrategy,
};
use stabforge::linalg::{haar_unitary, random_pvm};
use stabforge::pauli::braiding_relation_check;
use stabforge::presentation::{presentation_length, sample_relation, std_z2k};
use stabforge::rng::stream;
use stabforge::runner::{Experiment, ExperimentConfig};
use stabforge::stability::{defect, graph_rep, inverse_spectral_gap, sign_round, CornerEmbedding, DefectMode};

fn field(t: u32) -> Arc<FieldSpec> {
    Arc::new(FieldSpec::new(t).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, failure_persistence: None, ..ProptestConfig::default() })]

    #[test]
    fn field_axioms(t in 1u32..=8, a in any::<u32>(), b in any::<u32>(), c in any::<u32>()) {
        let f = field(t);
        let m = f.size();
        let (a, b, c) = (a % m, b % m, c % m);
        prop_assert_eq!(f.mul(a, f.mul(b, c)), f.mul(f.mul(a, b), c));
        prop_assert_eq!(f.mul(a, f.add(b, c)), f.add(f.mul(a, b), f.mul(a, c)));
        prop_assert_eq!(f.mul(a, b), f.mul(b, a));
        if a != 0 {
            prop_assert_eq!(f.mul(a, f.inv(a).unwrap()), 1);
        }
        prop_assert_eq!(f.trace(f.add(a, b)), f.trace(a) ^ f.trace(b));
        prop_assert_eq!(f.pow(a, u64::from(m)), a);
    }

    #[test]
    fn trace_form_is_dot_product(t in 1u32..=8, a in any::<u32>(), b in any::<u32>()) {
        let f = field(t);
        let (x, y) = (f.element(a % f.size()).unwrap(), f.element(b % f.size()).unwrap());
        prop_assert_eq!(u8::from(kappa(&x).dot(&kappa(&y))), x.mul(&y).unwrap().trace());
        prop_assert_eq!(kappa(&x.add(&y).unwrap()), kappa(&x).xor(&kappa(&y)));
    }

    #[test]
    fn rank_nullity(rows in 1usize..24, cols in 1usize..24, seed in any::<u64>()) {
        let mut rng = stream(seed, "properties");
        let m = BitMatrix::from_rows(cols, (0..rows).map(|_| BitVector::from_bits((0..cols).map(|_| rng.random_bool(0.4)))).collect()).unwrap();
        let kernel = m.kernel_basis();
        prop_assert!(m.rank() <= rows.min(cols));
        prop_assert_eq!(m.rank() + kernel.len(), cols);
        prop_assert_eq!(m.transpose().rank(), m.rank());
        for v in &kernel {
            prop_assert!(m.mul_vec(v).is_zero());
        }
    }

    #[test]
    fn hadamard_codewords_pass_every_check(t in 1usize..=5, msg in any::<u32>()) {
        let (c, tester) = hadamard_code(t);
        let msg: Vec<u32> = (0..t).map(|i| (msg >> i) & 1).collect();
        let word = c.encode(&msg);
        prop_assert!(c.contains(&word));
        for row in &tester.rows {
            prop_assert_eq!(row_eval(&c.field, row, &word), 0);
        }
        let weight = word.iter().filter(|&&x| x != 0).count();
        prop_assert!(weight == 0 || weight == 1 << (t - 1));
    }

    #[test]
    fn reed_muller_codewords_pass_every_check(m in 1usize..=2, d in 1usize..=2, seed in any::<u64>()) {
        let f = field(2);
        let c = reed_muller_code(&f, m, d).unwrap();
        let tester = rm_tester(&c, m, d).unwrap();
        let mut rng = stream(seed, "properties");
        let msg: Vec<u32> = (0..c.k).map(|_| rng.random_range(0..4)).collect();
        let word = c.encode(&msg);
        for row in &tester.rows {
            prop_assert_eq!(row_eval(&f, row, &word), 0);
        }
    }

    #[test]
    fn presentation_sampling_is_seeded(k in 2usize..=12, seed in any::<u64>()) {
        let p = std_z2k(k);
        prop_assert_eq!(presentation_length(&p), 3 * k + 2 * k * (k - 1));
        prop_assert!((p.relations.iter().map(|r| r.weight).sum::<f64>() - 1.0).abs() < 1e-12);
        prop_assert_eq!(sample_relation(&p, seed).unwrap(), sample_relation(&p, seed).unwrap());
    }

    #[test]
    fn graph_defect_counts_edges(k in 2usize..=5, mask in any::<u32>()) {
        let pairs: Vec<(usize, usize)> = (0..k).flat_map(|i| (i + 1..k).map(move |j| (i, j))).collect();
        let edges: Vec<(usize, usize)> = pairs.iter().enumerate().filter(|(i, _)| mask >> i & 1 == 1).map(|(_, &e)| e).collect();
        let p = std_z2k(k);
        let one = defect(&graph_rep(k, &[(0, 1)]).unwrap(), &p, DefectMode::Exhaustive).unwrap().epsilon;
        let eps = defect(&graph_rep(k, &edges).unwrap(), &p, DefectMode::Exhaustive).unwrap().epsilon;
        prop_assert!((eps - edges.len() as f64 * one).abs() < 1e-12);
    }

    #[test]
    fn spectral_gap_is_invariant_under_coordinate_swaps(k in 2usize..=6, seed in any::<u64>()) {
        let n = 1usize << k;
        let mut rng = stream(seed, "properties");
        let raw: Vec<f64> = (0..n).map(|_| rng.random_range(0.01..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let mu: Vec<f64> = raw.iter().map(|x| x / total).collect();
        // swapping bits 0 and 1 is a linear automorphism of Z_2^k
        let swap = |x: usize| (x & !3) | ((x & 1) << 1) | ((x >> 1) & 1);
        let swapped: Vec<f64> = (0..n).map(|x| mu[swap(x)]).collect();
        let (a, b) = (inverse_spectral_gap(&mu).unwrap(), inverse_spectral_gap(&swapped).unwrap());
        prop_assert!(a >= 0.5);
        prop_assert!((a - b).abs() < 1e-9 * a.max(1.0));
    }

    #[test]
    fn paulis_braid(k in 1usize..=5, a in any::<u32>(), b in any::<u32>()) {
        let mask = (1u32 << k) - 1;
        prop_assert!(braiding_relation_check(k, a & mask, b & mask).unwrap() < 1e-12);
    }

    #[test]
    fn deterministic_strategies_score_classically(seed in any::<u64>(), which in 0usize..2) {
        let game = if which == 0 { commutation_game() } else { anticommutation_game() };
        let mut rng = stream(seed, "properties");
        let answers: Vec<usize> = game.questions.iter().map(|q| rng.random_range(0..q.alphabet)).collect();
        let s = deterministic_strategy(&game, &answers).unwrap();
        let v = game_value(&game, &s).unwrap().value;
        prop_assert!((v - classical_pass_probability(&game, &answers)).abs() < 1e-12);
    }

    #[test]
    fn values_are_probabilities_and_gaps_are_bounded(seed in any::<u64>(), d in 1usize..=3, theta in 0.0f64..0.5) {
        let game = anticommutation_game();
        let mut rng = stream(seed, "properties");
        let s = DenseStrategy::random(&game, d, &mut rng);
        let v = game_value(&game, &s).unwrap().value;
        prop_assert!((-1e-12..=1.0 + 1e-12).contains(&v));
        let p = PerturbedStrategy { base: &s, theta, seed };
        let (_, gap) = value_gap_check(&game, &s, &p, &CornerEmbedding::identity(d)).unwrap();
        prop_assert!(gap.holds, "{} > {}", gap.lhs, gap.rhs);
    }

    #[test]
    fn coarse_graining_projective_measurements(seed in any::<u64>(), d in 1usize..=4, outcomes in 2usize..=5) {
        let mut rng = stream(seed, "properties");
        let f: Vec<usize> = (0..outcomes).map(|_| rng.random_range(0..outcomes)).collect();
        let (p, q) = (random_pvm(d, outcomes, &mut rng), random_pvm(d, outcomes, &mut rng));
        let r = data_processing_check(&p, &q, &f).unwrap();
        prop_assert!(r.projective && r.norm.holds && r.overlap.holds);
    }

    #[test]
    fn sign_rounding_of_unitaries(seed in any::<u64>(), d in 1usize..=5) {
        let mut rng = stream(seed, "properties");
        let u = haar_unitary(d, &mut rng);
        let (v, r) = sign_round(&u);
        prop_assert!(r.lhs <= r.rhs + 1e-9);
        let id = stabforge::linalg::identity(d);
        prop_assert!(stabforge::linalg::op_norm(&(&v * &v - id)) < 1e-9);
    }

    #[test]
    fn configs_roundtrip(k in 1usize..=6, seed in proptest::option::of(any::<u64>()), raw in proptest::collection::vec(0.01f64..1.0, 64)) {
        let n = 1usize << k;
        let total: f64 = raw[..n].iter().sum();
        let mu: Vec<f64> = raw[..n].iter().map(|x| x / total).collect();
        let cfg = ExperimentConfig::new(Experiment::Kappa { mu }, seed);
        let text = serde_json::to_string(&cfg).unwrap();
        prop_assert_eq!(serde_json::from_str::<ExperimentConfig>(&text).unwrap(), cfg);
    }
}
