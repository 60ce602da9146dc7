//! Small presentations of Z_2^k and the Pauli group: relation counts, lengths and the relation
//! sampler.
//!
//! ```sh
//! cargo run --example efficient_presentation
//! ```

use stabforge::presentation::{
    induced_generator_distribution, pauli_mult_like, pauli_small, presentation_length, std_z2k, z2k_eff_presentation,
    RelationSampler,
};
use stabforge::rng::stream;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    println!("{:<28} {:>5} {:>6} {:>7}", "presentation", "gens", "rels", "length");
    let all = [std_z2k(4), pauli_small(3), pauli_mult_like(2)?, z2k_eff_presentation(2, 1, 1)?, z2k_eff_presentation(2, 2, 1)?];
    for p in &all {
        println!("{:<28} {:>5} {:>6} {:>7}", p.name, p.n, p.relations.len(), presentation_length(p));
    }

    // row relations replace most pairwise commutators; at these sizes the two are still comparable
    let eff = z2k_eff_presentation(2, 2, 1)?;
    let naive = std_z2k(eff.n);
    println!(
        "\nn={}: length {} against {} for std_z2k({})",
        eff.n,
        presentation_length(&eff),
        presentation_length(&naive),
        eff.n
    );

    let mu = induced_generator_distribution(&eff)?;
    let (lo, hi) = mu.0.iter().fold((f64::MAX, 0.0f64), |(lo, hi), &x| (lo.min(x), hi.max(x)));
    println!("induced generator distribution ranges over [{lo:.4}, {hi:.4}]");

    let sampler = RelationSampler::new(&eff)?;
    let mut rng = stream(7, "example/sampler");
    for _ in 0..4 {
        let r = sampler.sample(&mut rng);
        println!("  sampled {:?} relation {:?}", r.tag, r.word);
    }
    Ok(())
}
