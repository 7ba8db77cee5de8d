//! Independent oracles: dense GF(2) elimination on `Vec<Vec<bool>>`,
//! written without touching the crate's own linear algebra.

#![allow(dead_code)]

use eqweight::gf2::BitMatrix;

pub type Rows = Vec<Vec<bool>>;

pub fn dense(m: &BitMatrix) -> Rows {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j)).collect()).collect()
}

pub fn from_dense(rows: &Rows, cols: usize) -> BitMatrix {
    BitMatrix::from_fn(rows.len(), cols, |i, j| rows[i][j])
}

fn xor_into(a: &mut [bool], b: &[bool]) {
    for (x, &y) in a.iter_mut().zip(b) {
        *x ^= y;
    }
}

/// Row-reduces in place; returns the pivot columns.
pub fn reduce(rows: &mut Rows) -> Vec<usize> {
    let cols = rows.first().map_or(0, Vec::len);
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..rows.len()).find(|&k| rows[k][c]) else { continue };
        rows.swap(r, k);
        let pivot = rows[r].clone();
        for (i, row) in rows.iter_mut().enumerate() {
            if i != r && row[c] {
                xor_into(row, &pivot);
            }
        }
        pivots.push(c);
        r += 1;
    }
    pivots
}

pub fn rank(rows: &Rows) -> usize {
    let mut m = rows.clone();
    reduce(&mut m).len()
}

/// A basis of `{v : v·m = 0}`, where `m` has `rows.len()` rows.
pub fn left_kernel(rows: &Rows) -> Rows {
    let n = rows.len();
    let cols = rows.first().map_or(0, Vec::len);
    let mut aug: Rows = rows
        .iter()
        .enumerate()
        .map(|(i, r)| {
            let mut v = r.clone();
            v.extend((0..n).map(|j| j == i));
            v
        })
        .collect();
    // Eliminate on the first `cols` columns only.
    let mut r = 0;
    for c in 0..cols {
        let Some(k) = (r..n).find(|&k| aug[k][c]) else { continue };
        aug.swap(r, k);
        let pivot = aug[r].clone();
        for (i, row) in aug.iter_mut().enumerate() {
            if i != r && row[c] {
                xor_into(row, &pivot);
            }
        }
        r += 1;
    }
    aug[r..].iter().map(|row| row[cols..].to_vec()).collect()
}

/// `v·m`.
pub fn apply(v: &[bool], m: &Rows, cols: usize) -> Vec<bool> {
    let mut out = vec![false; cols];
    for (i, &bit) in v.iter().enumerate() {
        if bit {
            xor_into(&mut out, &m[i]);
        }
    }
    out
}

pub fn mul(a: &Rows, b: &Rows, cols: usize) -> Rows {
    a.iter().map(|row| apply(row, b, cols)).collect()
}

/// Whether `v` lies in the row space of `rows`.
pub fn in_span(rows: &Rows, v: &[bool]) -> bool {
    let mut with = rows.clone();
    with.push(v.to_vec());
    rank(&with) == rank(rows)
}

/// Every vector of length `n`, for brute force over tiny spaces.
pub fn all_vectors(n: usize) -> impl Iterator<Item = Vec<bool>> {
    (0u64..1 << n).map(move |x| (0..n).map(|i| x >> i & 1 == 1).collect())
}
