use super::{binary_field, normalize_row, LinearCode, LocalTester};

/// The `[2^t, t, 2^{t-1}]` Hadamard code with its 3-local linearity tester.
///
/// Coordinates are indexed by `x ∈ F_2^t` read as an integer; the codeword for message `b`
/// has entry `x · b` at position `x`. Tester row `(x, y)` (index `x·2^t + y`) checks
/// `g(x) + g(y) + g(x+y) = 0`; collisions cancel mod 2, so degenerate rows reduce to a
/// single check on position 0.
pub fn hadamard_code(t: usize) -> (LinearCode, LocalTester) {
    assert!((1..=16).contains(&t), "hadamard_code supports 1 <= t <= 16");
    let n = 1usize << t;
    let generator = (0..t).map(|i| (0..n).map(|x| (x >> i & 1) as u32).collect()).collect();
    let rows: Vec<_> = (0..n)
        .flat_map(|x| (0..n).map(move |y| normalize_row(vec![(x, 1), (y, 1), (x ^ y, 1)])))
        .collect();
    let code = LinearCode {
        field: binary_field(),
        n,
        k: t,
        generator,
        parity: rows.clone(),
        distance: Some(n / 2),
    };
    (code, LocalTester::uniform(rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::codes::code_distance;
    use crate::field::gf2_rank;

    #[test]
    fn parameters() {
        for t in 1..=4 {
            let (code, tester) = hadamard_code(t);
            assert_eq!((code.n, code.k), (1 << t, t));
            assert_eq!(code_distance(&code, 1 << 20).unwrap(), 1 << (t - 1));
            assert!(tester.locality() <= 3);
            tester.validate().unwrap();
            code.check_consistency().unwrap();
        }
    }

    #[test]
    fn rank_of_t2_parity_is_two() {
        let (code, _) = hadamard_code(2);
        let h = code.parity_bits().unwrap();
        assert_eq!((h.rows(), h.cols()), (16, 4));
        assert_eq!(gf2_rank(&h), 2);
    }

    #[test]
    fn degenerate_rows_hit_position_zero() {
        let (_, tester) = hadamard_code(2);
        // (x, x) for x = 3 collapses to the single check g(0) = 0
        assert_eq!(tester.rows[3 * 4 + 3], vec![(0, 1)]);
        assert_eq!(tester.rows[0], vec![(0, 1)]);
        assert_eq!(tester.rows[4 + 2], vec![(1, 1), (2, 1), (3, 1)]);
        let weight_one = tester.rows.iter().filter(|r| r.len() == 1).count();
        assert_eq!(weight_one, 10);
    }

    #[test]
    fn codewords_pass_every_row() {
        let (code, tester) = hadamard_code(2);
        for m in 0..4u32 {
            let w = code.encode(&[m & 1, m >> 1]);
            assert!(tester.rows.iter().all(|r| crate::codes::row_eval(&code.field, r, &w) == 0));
        }
    }
}
