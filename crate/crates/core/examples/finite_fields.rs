//! F_{2^t} with a self-dual basis: arithmetic, the trace form and the coordinate map κ.
//!
//! ```sh
//! cargo run --example finite_fields
//! ```

use std::sync::Arc;

use stabforge::field::{field_trace, kappa, kappa_inv, BitMatrix, BitVector, FieldSpec};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    for t in 1..=4 {
        let f = Arc::new(FieldSpec::new(t)?);
        println!("F_{}: modulus {}, self-dual basis {:?}", f.size(), f.poly_bitstring(), f.basis());
        // tr(b_i b_j) = δ_ij
        for row in f.gram() {
            println!("    {row:?}");
        }
    }

    let f = Arc::new(FieldSpec::new(3)?);
    let a = f.element(5)?;
    let b = f.element(3)?;
    let prod = a.mul(&b)?;
    println!("\nin F_8: 5 * 3 = {prod:?}, 5^-1 = {:?}, tr(5) = {}", a.inv()?, field_trace(&a));

    // κ is F_2-linear and x·y over F_2 equals tr(xy) through κ
    let bits = kappa(&prod);
    assert_eq!(kappa_inv(&f, &bits)?, prod);
    for x in f.elements() {
        for y in f.elements() {
            let dot = kappa(&x).dot(&kappa(&y));
            assert_eq!(u8::from(dot), field_trace(&x.mul(&y)?));
        }
    }
    println!("κ(5·3) = {bits:?}; trace form matches the F_2 dot product on all 64 pairs");

    // packed F_2 linear algebra
    let rows = ["1101", "0110", "1011"].iter().map(|r| BitVector::from_bits(r.chars().map(|c| c == '1'))).collect();
    let m = BitMatrix::from_rows(4, rows)?;
    println!("\nrank {} with kernel basis {:?}", m.rank(), m.kernel_basis());
    Ok(())
}
