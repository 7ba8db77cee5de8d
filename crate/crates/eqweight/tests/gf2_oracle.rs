mod common;

use common::*;
use eqweight::gf2::{self, BitMatrix, BitVec, Subquotient, Subspace};
use proptest::prelude::*;

fn matrix(max_rows: usize, max_cols: usize) -> impl Strategy<Value = Rows> {
    (0..=max_rows, 1..=max_cols).prop_flat_map(|(r, c)| prop::collection::vec(prop::collection::vec(any::<bool>(), c), r))
}

fn bits(v: &[bool]) -> BitVec {
    BitVec::from_bools(v)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn rank_and_kernel_match_enumeration(rows in matrix(8, 9)) {
        let cols = rows.first().map_or(1, Vec::len);
        let m = from_dense(&rows, cols);
        prop_assert_eq!(m.rank(), rank(&rows));
        let k = gf2::kernel(&m);
        let brute = all_vectors(rows.len()).filter(|v| apply(v, &rows, cols).iter().all(|&b| !b)).count();
        prop_assert_eq!(1usize << k.dim(), brute);
        for v in k.basis().row_vecs() {
            prop_assert!(m.apply(&v).is_zero());
        }
        prop_assert_eq!(k.dim(), left_kernel(&rows).len());
    }

    #[test]
    fn preimage_matches_enumeration(rows in matrix(7, 7), w in prop::collection::vec(prop::collection::vec(any::<bool>(), 7), 0..4)) {
        let cols = rows.first().map_or(1, Vec::len);
        let m = from_dense(&rows, cols);
        let w: Rows = w.into_iter().map(|mut v| { v.truncate(cols); v.resize(cols, false); v }).collect();
        let ws = Subspace::from_rows(cols, &from_dense(&w, cols));
        let pre = gf2::preimage(&m, &ws);
        let brute: Vec<Vec<bool>> = all_vectors(rows.len()).filter(|v| in_span(&w, &apply(v, &rows, cols))).collect();
        prop_assert_eq!(1usize << pre.dim(), brute.len());
        for v in &brute {
            prop_assert!(pre.contains(&bits(v)));
        }
    }

    #[test]
    fn solve_finds_a_preimage_exactly_when_one_exists(rows in matrix(7, 7), b in prop::collection::vec(any::<bool>(), 7)) {
        let cols = rows.first().map_or(1, Vec::len);
        let m = from_dense(&rows, cols);
        let b = &b[..cols];
        let reachable = all_vectors(rows.len()).any(|v| apply(&v, &rows, cols) == b);
        match gf2::solve(&m, &bits(b)) {
            Some(x) => prop_assert_eq!(m.apply(&x), bits(b)),
            None => prop_assert!(!reachable),
        }
        prop_assert_eq!(gf2::solve(&m, &bits(b)).is_some(), reachable);
    }

    #[test]
    fn subquotient_projects_and_lifts(z in matrix(6, 8), extra in prop::collection::vec(any::<bool>(), 6)) {
        let cols = z.first().map_or(1, Vec::len);
        let zs = Subspace::from_rows(cols, &from_dense(&z, cols));
        // Boundaries: the rows picked by `extra`.
        let picked: Rows = z.iter().zip(&extra).filter(|(_, &e)| e).map(|(r, _)| r.clone()).collect();
        let bs = Subspace::from_rows(cols, &from_dense(&picked, cols));
        let sq = Subquotient::new(&zs, &bs).unwrap();
        prop_assert_eq!(sq.dim(), rank(&z) - rank(&picked));
        for i in 0..sq.dim() {
            let c = BitVec::unit(sq.dim(), i);
            prop_assert_eq!(sq.project(&sq.lift(&c)), Some(c));
        }
        for v in picked {
            prop_assert!(sq.project(&bits(&v)).unwrap().is_zero());
        }
    }

    #[test]
    fn products_agree_with_dense(a in matrix(6, 6), seed in prop::collection::vec(any::<bool>(), 36)) {
        let cols = a.first().map_or(1, Vec::len);
        let b: Rows = (0..cols).map(|i| seed[i * 6..i * 6 + 6].to_vec()).collect();
        let (ma, mb) = (from_dense(&a, cols), from_dense(&b, 6));
        prop_assert_eq!(dense(&ma.mul(&mb)), mul(&a, &b, 6));
        prop_assert_eq!(dense(&ma.transpose().transpose()), a.clone());
    }
}

#[test]
fn wide_matrices_cross_word_boundaries() {
    let m = BitMatrix::from_fn(70, 150, |i, j| (i * 7 + j * 3) % 11 < 3);
    assert_eq!(m.rank(), rank(&dense(&m)));
    let k = gf2::kernel(&m);
    assert_eq!(k.dim(), 70 - m.rank());
}
