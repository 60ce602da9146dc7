//! The quantum low-degree test over the composed Reed-Muller code: completeness of the Pauli
//! strategy, the dimension lower bound, and the value gap along a perturbation path.
//!
//! ```sh
//! cargo run --release --example quantum_low_degree_test
//! ```

use stabforge::games::{game_value, min_dimension_bound, qld_test, PauliStrategy, PerturbedStrategy, Strategy, TestTag};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let (t, m, d) = (2, 1, 1);
    let game = qld_test(t, m, d)?;
    let k = t as usize * (d + 1).pow(m as u32);
    let honest = PauliStrategy::new(k, 1);
    let report = game_value(&game, &honest)?;
    println!("qld(t={t}, m={m}, d={d}): {} questions, k={k}", game.questions.len());
    println!("  ω(honest) = {:.12}, Pauli leg dimension {}", report.value, honest.pauli_dim());
    for tag in [TestTag::Code, TestTag::Commutation, TestTag::Consistency, TestTag::PairwiseCommutation] {
        if let Some(rate) = report.pass_rate(tag) {
            println!("  {:<22} {rate:.9}", tag.name());
        }
    }

    println!("\nany strategy with ω ≥ 1 − δ needs dimension at least");
    for delta in [0.0, 1e-4, 1e-3, 1e-2] {
        println!("  δ={delta:<7} → {:.2}", min_dimension_bound(k, delta, 1.0)?);
    }

    println!("\n{:>6} {:>12} {:>12}", "θ", "1 − ω", "dim");
    for theta in [0.01, 0.05, 0.1] {
        let p = PerturbedStrategy { base: &honest, theta, seed: 11 };
        let v = game_value(&game, &p)?.value;
        println!("{theta:>6} {:>12.3e} {:>12}", 1.0 - v, p.dim());
    }
    Ok(())
}
