//! The quantitative inequalities behind stability: closeness of strategies bounds their value gap,
//! coarse-graining cannot increase distance, pulled-back measurements stay nearly projective,
//! and rounding a near-involution to its sign costs little.
//!
//! ```sh
//! cargo run --release --example stability_inequalities -- 300
//! ```

use stabforge::games::{commutation_game, data_processing_check, value_gap_check, DenseStrategy, PerturbedStrategy};
use stabforge::linalg::{random_povm, random_pvm, CMat};
use stabforge::rng::stream;
use stabforge::runner::inequality_battery;
use stabforge::stability::{inverse_spectral_gap, sign_round, CornerEmbedding};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let trials: usize = std::env::args().nth(1).map(|s| s.parse()).transpose()?.unwrap_or(300);
    let mut rng = stream(3, "example/inequalities");

    let game = commutation_game();
    let s = DenseStrategy::random(&game, 3, &mut rng);
    let w = CornerEmbedding::identity(3);
    println!("{:>6} {:>10} {:>10} {:>10}", "θ", "δ", "|Δω|", "8√δ");
    for theta in [0.01, 0.05, 0.1, 0.3] {
        let p = PerturbedStrategy { base: &s, theta, seed: 5 };
        let (c, gap) = value_gap_check(&game, &s, &p, &w)?;
        println!("{theta:>6} {:>10.5} {:>10.5} {:>10.5}", c.delta, gap.lhs, gap.rhs);
    }

    // PVMs satisfy the squared-distance form; general POVMs only the overlap form
    let f = [0, 0, 1];
    let r = data_processing_check(&random_pvm(4, 3, &mut rng), &random_pvm(4, 3, &mut rng), &f)?;
    println!("\nPVM coarse-graining: {:.4} ≤ {:.4}", r.norm.lhs, r.norm.rhs);
    let r = data_processing_check(&random_povm(4, 3, &mut rng), &random_povm(4, 3, &mut rng), &f)?;
    println!("POVM overlap: {:.4} ≤ {:.4} (projective: {})", r.overlap.lhs, r.overlap.rhs, r.projective);

    let u = CMat::from_diagonal(&nalgebra::DVector::from_vec(vec![
        num_complex::Complex64::from_polar(1.0, 0.2),
        num_complex::Complex64::from_polar(1.0, 3.0),
    ]));
    let (_, sr) = sign_round(&u);
    println!("sign rounding: ‖V − U‖² = {:.4} ≤ {:.4}", sr.lhs, sr.rhs);
    println!("κ(uniform on basis of F_2^6) = {}", inverse_spectral_gap(&{
        let mut mu = vec![0.0; 64];
        (0..6).for_each(|i| mu[1 << i] = 1.0 / 6.0);
        mu
    })?);

    println!("\nbattery, {trials} trials per line:");
    for line in inequality_battery(trials, 4, 42)? {
        println!("  {:<48} violations {} worst margin {:+.3e}", line.name, line.violations, line.worst_margin);
    }
    Ok(())
}
