use num_rational::Rational64;

use super::reed_muller::{interpolation_coeffs, nodes, point_coords, point_index, reed_muller_code, rm_tester};
use super::{binary_field, normalize_row, CodeError, LinearCode, LocalTester, SparseRow};
use crate::field::find_self_dual_basis;

fn parity_bit(x: u32) -> u32 {
    x.count_ones() & 1
}

/// Hadamard check rows for one block of `q` columns starting at `base`.
fn hadamard_block(base: usize, q: usize) -> impl Iterator<Item = SparseRow> {
    (0..q).flat_map(move |x| {
        (0..q).map(move |y| normalize_row(vec![(base + x, 1), (base + y, 1), (base + (x ^ y), 1)]))
    })
}

/// Concatenates a code over F_{2^t} with the Hadamard code on each symbol.
///
/// Column `(i, x)` of the binary code has index `i·q + x`. The tester stacks the A-block
/// (`I_n ⊗ h_had`) and the B-block (rows `(p, γ)` hitting `(i, κ(γ h_{pi}))`); the row
/// distribution puts half its mass uniformly on A and half on B, with B weights `ν_p / q`.
pub fn compose_with_hadamard(code: &LinearCode, tester: &LocalTester) -> Result<(LinearCode, LocalTester), CodeError> {
    tester.validate()?;
    let field = &code.field;
    let t = field.t() as usize;
    let q = field.size() as usize;
    let n = code.n;

    let mut generator = Vec::with_capacity(code.k * t);
    for row in &code.generator {
        for &b in field.basis() {
            let kb: Vec<u32> = row.iter().map(|&e| field.kappa_bits(field.mul(b, e))).collect();
            generator.push(
                (0..n * q).map(|c| parity_bit(kb[c / q] & (c % q) as u32)).collect::<Vec<u32>>(),
            );
        }
    }

    let a_rows: Vec<SparseRow> = (0..n).flat_map(|i| hadamard_block(i * q, q)).collect();
    let mut b_rows = Vec::with_capacity(tester.len() * q);
    let mut b_nu = Vec::with_capacity(tester.len() * q);
    for (row, &w) in tester.rows.iter().zip(&tester.nu) {
        for gamma in 0..q as u32 {
            let entries = row.iter().map(|&(i, h)| (i * q + field.kappa_bits(field.mul(gamma, h)) as usize, 1)).collect();
            b_rows.push(normalize_row(entries));
            b_nu.push(w / Rational64::from_integer(q as i64));
        }
    }

    let a_share = if b_rows.is_empty() { Rational64::from_integer(1) } else { Rational64::new(1, 2) };
    let a_weight = a_share / Rational64::from_integer(a_rows.len() as i64);
    let mut nu = vec![a_weight; a_rows.len()];
    nu.extend(b_nu.into_iter().map(|w| w / Rational64::from_integer(2)));
    let mut rows = a_rows;
    rows.extend(b_rows);

    let composed = LinearCode {
        field: binary_field(),
        n: n * q,
        k: code.k * t,
        generator,
        parity: rows.clone(),
        distance: None,
    };
    Ok((composed, LocalTester { rows, nu }))
}

/// Whether each of the `q`-bit blocks of `word` is a Hadamard codeword.
pub fn hadamard_blocks_valid(word: &[u32], q: usize) -> bool {
    word.chunks(q).all(|block| {
        (0..q).all(|x| (0..q).all(|y| block[x] ^ block[y] ^ block[x ^ y] == 0))
    })
}

/// The binary Reed-Muller code over F_{2^t} with its combined low-degree/linearity tester,
/// built row-by-row from the two checks (low-degree rows first, then linearity rows).
pub fn brm_tester(t: u32, m: usize, d: usize) -> Result<(LinearCode, LocalTester), CodeError> {
    let field = find_self_dual_basis(t)?;
    let rm = reed_muller_code(&field, m, d)?;
    let (mut code, _) = compose_with_hadamard(&rm, &rm_tester(&rm, m, d)?)?;
    let q = field.size();
    let qs = q as usize;
    let points = rm.n;
    let ts = nodes(d);

    let mut ld = Vec::with_capacity(points * m * qs * qs);
    for u in 0..points {
        let uc = point_coords(u, q, m);
        for j in 0..m {
            for s in 0..q {
                let mut vc = uc.clone();
                vc[j] ^= s;
                let v = point_index(&vc, q);
                let alpha = interpolation_coeffs(&field, uc[j], vc[j], &ts)?;
                for gamma in 0..q {
                    let mut entries: Vec<(usize, u32)> = ts
                        .iter()
                        .zip(&alpha)
                        .filter(|(_, &a)| a != 0)
                        .map(|(&ti, &a)| {
                            let mut p = uc.clone();
                            p[j] ^= ti;
                            (point_index(&p, q) * qs + field.kappa_bits(field.mul(gamma, a)) as usize, 1)
                        })
                        .collect();
                    entries.push((v * qs + field.kappa_bits(gamma) as usize, 1));
                    ld.push(normalize_row(entries));
                }
            }
        }
    }
    let had: Vec<SparseRow> = (0..points).flat_map(|u| hadamard_block(u * qs, qs)).collect();

    let mut nu = Vec::with_capacity(ld.len() + had.len());
    let had_share = if ld.is_empty() { Rational64::from_integer(1) } else { Rational64::new(1, 2) };
    if !ld.is_empty() {
        nu.extend(std::iter::repeat_n(Rational64::new(1, 2 * ld.len() as i64), ld.len()));
    }
    nu.extend(std::iter::repeat_n(had_share / Rational64::from_integer(had.len() as i64), had.len()));
    let mut rows = ld;
    rows.extend(had);
    code.parity = rows.clone();
    Ok((code, LocalTester { rows, nu }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::{code_distance, codewords};
    use crate::field::find_self_dual_basis;

    fn composed_rs() -> (LinearCode, LocalTester) {
        let f = find_self_dual_basis(2).unwrap();
        let rs = reed_muller_code(&f, 1, 1).unwrap();
        let tester = rm_tester(&rs, 1, 1).unwrap();
        compose_with_hadamard(&rs, &tester).unwrap()
    }

    #[test]
    fn composed_parameters() {
        let (code, tester) = composed_rs();
        assert_eq!((code.n, code.k), (16, 4));
        code.check_consistency().unwrap();
        assert_eq!(code.parity_rank(), 12);
        assert!(code_distance(&code, 1 << 20).unwrap() >= 6);
        assert!(tester.locality() <= 3);
        tester.validate().unwrap();
        assert!(code.encode(&[0; 4]).iter().all(|&b| b == 0));
    }

    #[test]
    fn composed_codewords_decode_blockwise() {
        let (code, _) = composed_rs();
        for w in codewords(&code, 1 << 20).unwrap() {
            assert!(hadamard_blocks_valid(&w, 4));
        }
    }

    #[test]
    fn brm_matches_composition() {
        let (code, tester) = brm_tester(2, 1, 1).unwrap();
        assert_eq!((code.n, code.k), (16, 4));
        assert_eq!(tester.len(), 4 * 4 * 4 * 2);
        assert!(tester.locality() <= 3);
        tester.validate().unwrap();

        let (_, composed) = composed_rs();
        let mut direct: Vec<_> = tester.rows.iter().cloned().zip(tester.nu.iter().cloned()).collect();
        let mut via: Vec<_> = composed.rows.iter().cloned().zip(composed.nu.iter().cloned()).collect();
        direct.sort();
        via.sort();
        assert_eq!(direct, via);
    }

    #[test]
    fn brm_codewords_pass_all_rows() {
        let (code, tester) = brm_tester(2, 1, 1).unwrap();
        for w in codewords(&code, 1 << 20).unwrap() {
            assert!(tester.rows.iter().all(|r| crate::codes::row_eval(&code.field, r, &w) == 0));
        }
    }
}
