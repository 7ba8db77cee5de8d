//! Spectral sequences of filtered complexes with known answers.
//!
//! A filtered complex that splits into singletons `x` (filtration `a`) and
//! pairs `x ↦ y` (filtrations `a ≤ b`) has a closed-form sequence: a singleton
//! survives forever at `(a, n − a)`, a pair lives at `(a, n − a)` and
//! `(b, n + 1 − b)` on pages `0..=b − a` and dies through `d_{b−a}`. A random
//! filtration-preserving change of basis hides the splitting from the engine.

mod common;

use std::collections::BTreeMap;

use common::*;
use eqweight::complex::Complex;
use eqweight::filtration::{canonical_filtration, spectral_sequence, FilteredComplex};
use eqweight::gf2::Subspace;
use proptest::prelude::*;

const TOP: i64 = 3;

#[derive(Clone, Debug)]
enum Piece {
    Single { n: i64, a: i64 },
    Pair { n: i64, a: i64, len: i64 },
}

fn piece() -> impl Strategy<Value = Piece> {
    prop_oneof![
        (0..=TOP, -2i64..=2).prop_map(|(n, a)| Piece::Single { n, a }),
        (0..TOP, -2i64..=2, 0i64..=3).prop_map(|(n, a, len)| Piece::Pair { n, a, len }),
    ]
}

struct Built {
    filtered: FilteredComplex,
    entries: Vec<BTreeMap<(i64, i64), usize>>,
    ranks: Vec<BTreeMap<(i64, i64), usize>>,
    cohomology: BTreeMap<i64, usize>,
    /// `(n, p) ↦ dim F^p H^n`.
    abutment: BTreeMap<(i64, i64), usize>,
}

fn inverse(t: &Rows) -> Rows {
    let n = t.len();
    let mut aug: Rows = t
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| j == i));
            v
        })
        .collect();
    reduce(&mut aug);
    aug.iter().map(|r| r[n..].to_vec()).collect()
}

fn build(pieces: &[Piece], mix: &[bool], pages: usize) -> Built {
    // Basis vectors per degree as (filtration, slot of its partner).
    let mut basis: Vec<Vec<i64>> = vec![Vec::new(); (TOP + 1) as usize];
    let mut edges = Vec::new();
    for p in pieces {
        match *p {
            Piece::Single { n, a } => basis[n as usize].push(a),
            Piece::Pair { n, a, len } => {
                basis[n as usize].push(a);
                basis[n as usize + 1].push(a + len);
                edges.push((n, basis[n as usize].len() - 1, basis[n as usize + 1].len() - 1));
            }
        }
    }
    // Sort each degree by descending filtration so every F^p is a prefix.
    let mut order: Vec<Vec<usize>> = Vec::new();
    for b in &mut basis {
        let mut idx: Vec<usize> = (0..b.len()).collect();
        idx.sort_by_key(|&i| std::cmp::Reverse(b[i]));
        let sorted: Vec<i64> = idx.iter().map(|&i| b[i]).collect();
        let mut pos = vec![0; idx.len()];
        for (new, &old) in idx.iter().enumerate() {
            pos[old] = new;
        }
        *b = sorted;
        order.push(pos);
    }
    let dims: Vec<usize> = basis.iter().map(Vec::len).collect();
    let mut d: Vec<Rows> = (0..=TOP as usize).map(|n| vec![vec![false; if n < TOP as usize { dims[n + 1] } else { 0 }]; dims[n]]).collect();
    for &(n, i, j) in &edges {
        let n = n as usize;
        d[n][order[n][i]][order[n + 1][j]] = true;
    }
    // Lower unitriangular changes of basis: vector i may absorb any earlier one.
    let mut bits = mix.iter().cycle();
    let t: Vec<Rows> = dims
        .iter()
        .map(|&k| (0..k).map(|i| (0..k).map(|j| j == i || (j < i && *bits.next().unwrap())).collect()).collect())
        .collect();
    let diffs = (0..=TOP as usize)
        .map(|n| {
            if n == TOP as usize {
                return from_dense(&vec![vec![]; dims[n]], 0);
            }
            let m = mul(&mul(&t[n], &d[n], dims[n + 1]), &inverse(&t[n + 1]), dims[n + 1]);
            from_dense(&m, dims[n + 1])
        })
        .collect();
    let complex = Complex::cochain(0, dims.clone(), diffs).unwrap();
    let filtered = FilteredComplex::from_fn(complex, -2, 5, |p, n| {
        let k = basis[n as usize].iter().filter(|&&a| a >= p).count();
        Subspace::coordinate(dims[n as usize], 0..k)
    })
    .unwrap();

    let mut entries = vec![BTreeMap::new(); pages + 1];
    let mut ranks = vec![BTreeMap::new(); pages + 1];
    let mut cohomology = BTreeMap::new();
    let mut abutment = BTreeMap::new();
    for p in pieces {
        match *p {
            Piece::Single { n, a } => {
                for page in entries.iter_mut() {
                    *page.entry((a, n - a)).or_insert(0) += 1;
                }
                *cohomology.entry(n).or_insert(0) += 1;
                for q in -3..=a {
                    *abutment.entry((n, q)).or_insert(0) += 1;
                }
            }
            Piece::Pair { n, a, len } => {
                let b = a + len;
                for r in 0..=(len as usize).min(pages) {
                    *entries[r].entry((a, n - a)).or_insert(0) += 1;
                    *entries[r].entry((b, n + 1 - b)).or_insert(0) += 1;
                }
                if (len as usize) <= pages {
                    *ranks[len as usize].entry((a, n - a)).or_insert(0) += 1;
                }
            }
        }
    }
    Built { filtered, entries, ranks, cohomology, abutment }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn pages_match_the_closed_form(pieces in prop::collection::vec(piece(), 0..7), mix in prop::collection::vec(any::<bool>(), 1..40)) {
        let pages = 6;
        let b = build(&pieces, &mix, pages);
        let ss = spectral_sequence(&b.filtered, 2).unwrap();
        ss.verify().unwrap();
        for r in 0..=pages {
            prop_assert_eq!(&ss.entries(r), &b.entries[r], "page {}", r);
            prop_assert_eq!(&ss.differential_ranks(r), &b.ranks[r], "d_{}", r);
        }
    }

    #[test]
    fn pages_obey_the_recursion(pieces in prop::collection::vec(piece(), 0..7), mix in prop::collection::vec(any::<bool>(), 1..40)) {
        let b = build(&pieces, &mix, 6);
        let ss = spectral_sequence(&b.filtered, 4).unwrap();
        for r in 0..ss.last_page() {
            let (dp, dq) = ss.differential_shift(r);
            for p in -6..=8 {
                for q in -8..=10 {
                    // d_r ∘ d_r = 0, read off the stored matrices.
                    if let (Some(d1), Some(d2)) = (ss.differential(r, p, q), ss.differential(r, p + dp, q + dq)) {
                        if d1.cols() == d2.rows() {
                            prop_assert!(d1.mul(d2).is_zero());
                        }
                    }
                    let out = ss.differential_rank(r, p, q);
                    let inc = ss.differential_rank(r, p - dp, q - dq);
                    prop_assert_eq!(ss.dim(r + 1, p, q), ss.dim(r, p, q) - out - inc);
                }
            }
        }
    }

    #[test]
    fn infinity_page_sums_to_the_abutment(pieces in prop::collection::vec(piece(), 0..7), mix in prop::collection::vec(any::<bool>(), 1..40)) {
        let b = build(&pieces, &mix, 6);
        let ss = spectral_sequence(&b.filtered, 1).unwrap();
        for n in 0..=TOP {
            let total: usize = ss.infinity_entries().iter().filter(|(k, _)| k.0 + k.1 == n).map(|(_, d)| d).sum();
            prop_assert_eq!(total, b.cohomology.get(&n).copied().unwrap_or(0));
            prop_assert_eq!(ss.homology_dim(n), total);
            for p in -3..=6 {
                let want = b.abutment.get(&(n, p)).copied().unwrap_or(0);
                prop_assert_eq!(ss.abutment_dim(n, p), want, "F^{} H^{}", p, n);
                let tail: usize = (p..=6).map(|s| ss.infinity_dim(s, n - s)).sum();
                prop_assert_eq!(tail, want);
            }
        }
    }

    #[test]
    fn canonical_filtration_degenerates_onto_cohomology(pieces in prop::collection::vec(piece(), 0..7), mix in prop::collection::vec(any::<bool>(), 1..40)) {
        let b = build(&pieces, &mix, 6);
        let k = b.filtered.complex();
        let ss = spectral_sequence(&canonical_filtration(k).unwrap(), 3).unwrap();
        prop_assert!(ss.degenerates_at(1));
        let want: BTreeMap<(i64, i64), usize> = k.degrees().filter(|&n| k.homology_dim(n) > 0).map(|n| ((-n, 2 * n), k.homology_dim(n))).collect();
        prop_assert_eq!(ss.entries(1), want);
    }

    #[test]
    fn repeated_runs_are_identical(pieces in prop::collection::vec(piece(), 0..7), mix in prop::collection::vec(any::<bool>(), 1..40)) {
        let b = build(&pieces, &mix, 6);
        let one = spectral_sequence(&b.filtered, 3).unwrap();
        let two = eqweight::par::sequential(|| spectral_sequence(&b.filtered, 3).unwrap());
        for r in 0..=one.last_page() {
            prop_assert_eq!(one.entries(r), two.entries(r));
            prop_assert_eq!(one.differential_ranks(r), two.differential_ranks(r));
        }
    }
}
