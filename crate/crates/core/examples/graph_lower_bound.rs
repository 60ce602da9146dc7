//! The permutation construction for a graph on k generators: commuting exactly off the edges,
//! anticommuting on them, far from every character, and amplified by the symmetric group.
//!
//! ```sh
//! cargo run --release --example graph_lower_bound
//! ```

use stabforge::linalg::op_norm;
use stabforge::presentation::{std_z2k, Permutation};
use stabforge::stability::{
    automorphism_orbit_amplify, character_farness_partial, defect, graph_rep, DefectMode,
};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let k = 4;
    let edges = [(0, 1), (2, 3)];
    let a = graph_rep(k, &edges)?;
    let dense = a.to_dense(1 << 12)?;
    println!("k={k}, edges {edges:?}, dimension {}", dense.d);
    for i in 0..k {
        for j in i + 1..k {
            let (x, y) = (&dense.generators[i], &dense.generators[j]);
            let comm = op_norm(&(x * y - y * x));
            println!("  ‖[A_{i}, A_{j}]‖ = {comm:.3}");
        }
    }
    let report = defect(&a, &std_z2k(k), DefectMode::Exhaustive)?;
    println!("defect under std_z2k({k}) = {:.6} (edges / C(k,2) = {:.6})", report.epsilon, 2.0 / 6.0);

    let uniform = vec![1.0 / k as f64; k];
    let far = character_farness_partial(&dense, &uniform)?;
    println!("closest character {:?} at distance {:.4} ({} checked)", far.best_character, far.min_distance, far.characters_checked);

    // Sym(3) acting on the generators of std_z2k(3)
    let k = 3;
    let gens: Vec<Permutation> = vec![vec![1, 0, 2], vec![1, 2, 0]];
    let (_, amp) = automorphism_orbit_amplify(&graph_rep(k, &[(0, 1)])?, &gens, &std_z2k(k), 100)?;
    println!(
        "\nSym(3): |Φ| = {}, orbit weights {:?}, ε = {:.4}, worst amplified relation {:.4} ≤ {:.4}: {}",
        amp.group_order, amp.orbit_weights, amp.epsilon, amp.max_relation_defect, amp.bound, amp.holds
    );
    Ok(())
}
