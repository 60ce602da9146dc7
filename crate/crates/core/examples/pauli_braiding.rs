//! k-qubit Pauli observables as signed permutations, the braiding relations, the group order,
//! and the braiding test played by the honest Pauli strategy.
//!
//! ```sh
//! cargo run --release --example pauli_braiding
//! ```

use stabforge::codes::hadamard_code;
use stabforge::games::{braiding_test, game_value, PauliStrategy, PerturbedStrategy};
use stabforge::pauli::{
    braiding_relation_check, pauli_group_order_check, pauli_observable, pauli_small_assignment, PauliLabel,
};
use stabforge::presentation::pauli_small;
use stabforge::stability::{defect, DefectMode};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let x = pauli_observable(&PauliLabel::x(2, 0b11)?);
    let z = pauli_observable(&PauliLabel::z(2, 0b01)?);
    println!("X(11) Z(01) = -Z(01) X(11): {}", (&x * &z + &z * &x).norm() < 1e-12);

    for k in 1..=3 {
        let mut worst = 0.0f64;
        for a in 0..1u32 << k {
            for b in 0..1u32 << k {
                worst = worst.max(braiding_relation_check(k, a, b)?);
            }
        }
        println!("k={k}: |P_k| = {}, worst braiding violation {worst:.1e}", pauli_group_order_check(k)?);
    }

    let a = pauli_small_assignment(3)?;
    println!("\npauli_small(3) defect: {}", defect(&a, &pauli_small(3), DefectMode::Exhaustive)?.epsilon);

    let (code, tester) = hadamard_code(2);
    let game = braiding_test(&code, &tester)?;
    let honest = PauliStrategy::new(code.k, 1);
    let report = game_value(&game, &honest)?;
    println!("\nbraiding test: {} questions, {} pairs, ω = {:.12}", game.questions.len(), report.pairs, report.value);
    for (tag, t) in &report.per_tag {
        println!("  {tag:<12} weight {:.4}, pass rate {:.6}", t.weight, t.contribution / t.weight);
    }
    for theta in [0.01, 0.05, 0.2] {
        let p = PerturbedStrategy { base: &honest, theta, seed: 1 };
        println!("  perturbed θ={theta}: ω = {:.6}", game_value(&game, &p)?.value);
    }
    Ok(())
}
