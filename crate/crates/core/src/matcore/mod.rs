//! Dense complex matrices and matrix tuples.
//!
//! Direct sums and similarity conjugation, plus the block embedding
//! `[[X, H], [0, X]]` and its block extraction.

mod json;
mod matrix;
pub mod random;
mod similarity;
mod tuple;

pub(crate) use json::serialize_complex_vec;
pub use json::{MatrixJson, TupleJson};
pub use matrix::{Block, CMatrix};
pub use random::haar_unitary;
pub use similarity::{Similarity, MAX_CONDITION};
pub use tuple::{BlockGrid, MatrixTuple};

/// `S⁻¹ X S`.
pub fn conjugate(s: &Similarity, x: &MatrixTuple) -> crate::Result<MatrixTuple> {
    x.conjugate(s)
}

/// `X ⊕ Y`.
pub fn direct_sum(x: &MatrixTuple, y: &MatrixTuple) -> crate::Result<MatrixTuple> {
    x.direct_sum(y)
}

/// `[[X, H], [0, X]]`.
pub fn embed_upper(x: &MatrixTuple, h: &MatrixTuple) -> crate::Result<MatrixTuple> {
    x.embed_upper(h)
}

#[cfg(test)]
mod tests {
    use super::random::{random_tuple, upper_unipotent};
    use super::*;
    use crate::rng::SeedStream;
    use num_complex::Complex64;
    use proptest::prelude::*;

    #[test]
    fn identity_conjugation_is_trivial() {
        let mut rng = SeedStream::new(1).rng();
        let x = random_tuple(2, 3, 1.0, &mut rng);
        assert_eq!(conjugate(&Similarity::identity(3), &x).unwrap(), x);
    }

    #[test]
    fn inverse_pair_conjugation_round_trips() {
        let mut rng = SeedStream::new(2).rng();
        let x = random_tuple(2, 3, 1.0, &mut rng);
        let s = upper_unipotent(3, 100.0, &mut rng);
        let back = conjugate(&s, &conjugate(&s.inverted(), &x).unwrap()).unwrap();
        assert!(back.dist(&x) <= 1e-12 * (1.0 + x.frobenius_norm()));
    }

    #[test]
    fn conjugate_rejects_dimension_mismatch() {
        let x = MatrixTuple::zeros(1, 2);
        assert!(conjugate(&Similarity::identity(3), &x).is_err());
    }

    /// The permutation swapping the second and third blocks exchanges the
    /// roles of `H` and `K` in the 4×4 block point used for mixed partials.
    #[test]
    fn block_swap_exchanges_directions() {
        let mut rng = SeedStream::new(9).rng();
        let n = 2;
        let x = random_tuple(1, n, 1.0, &mut rng);
        let h = random_tuple(1, n, 1.0, &mut rng);
        let k = random_tuple(1, n, 1.0, &mut rng);
        // [[X, a, b, 0], [0, X, 0, b], [0, 0, X, a], [0, 0, 0, X]]
        let point = |a: &MatrixTuple, b: &MatrixTuple| {
            let (x, a, b) = (x.component(0), a.component(0), b.component(0));
            let zero = CMatrix::zeros(n);
            let layout = [[x, a, b, &zero], [&zero, x, &zero, b], [&zero, &zero, x, a], [&zero, &zero, &zero, x]];
            MatrixTuple::new(vec![CMatrix::from_fn(4 * n, |i, j| layout[i / n][j / n].get(i % n, j % n))]).unwrap()
        };
        let p_hk = point(&h, &k);
        let p_kh = point(&k, &h);
        // P(K, H) = U P(H, K) U⁻¹.
        let u = Similarity::new(CMatrix::block_permutation(n, &[0, 2, 1, 3])).unwrap();
        let swapped = conjugate(&u.inverted(), &p_hk).unwrap();
        assert!(swapped.dist(&p_kh) < 1e-14);
        assert!(p_hk.dist(&p_kh) > 0.1);
    }

    fn tuple_strategy(g: usize, n: usize) -> impl Strategy<Value = MatrixTuple> {
        proptest::collection::vec((-2.0f64..2.0, -2.0f64..2.0), g * n * n).prop_map(move |v| {
            let comps = v
                .chunks(n * n)
                .map(|c| {
                    CMatrix::from_row_major(n, c.iter().map(|&(re, im)| Complex64::new(re, im)).collect())
                        .unwrap()
                })
                .collect();
            MatrixTuple::new(comps).unwrap()
        })
    }

    proptest! {
        #[test]
        fn block_diagonal_conjugation_commutes_with_direct_sum(
            x in tuple_strategy(2, 2),
            y in tuple_strategy(2, 1),
            seed in any::<u64>(),
        ) {
            let mut rng = SeedStream::new(seed).rng();
            let s1 = upper_unipotent(2, 100.0, &mut rng);
            let s2 = upper_unipotent(1, 100.0, &mut rng);
            let s = Similarity::new(CMatrix::block_diag(&[s1.matrix(), s2.matrix()])).unwrap();
            let lhs = conjugate(&s, &direct_sum(&x, &y).unwrap()).unwrap();
            let rhs = direct_sum(&conjugate(&s1, &x).unwrap(), &conjugate(&s2, &y).unwrap()).unwrap();
            let scale = 1.0 + x.frobenius_norm() + y.frobenius_norm();
            prop_assert!(lhs.dist(&rhs) <= 1e-12 * scale * s.cond());
        }

        #[test]
        fn embed_then_extract_is_exact(x in tuple_strategy(2, 2), h in tuple_strategy(2, 2)) {
            let grid = embed_upper(&x, &h).unwrap().extract_blocks(&[2, 2]).unwrap();
            prop_assert_eq!(grid.tuple(0, 0).unwrap(), x.clone());
            prop_assert_eq!(grid.tuple(1, 1).unwrap(), x);
            prop_assert_eq!(grid.tuple(0, 1).unwrap(), h);
            prop_assert!(grid.block(1, 0).iter().all(|b| b.is_zero()));
        }
    }
}
