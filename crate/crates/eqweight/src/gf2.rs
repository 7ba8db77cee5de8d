//! Exact linear algebra over GF(2).
//!
//! Matrices are dense and row-major with 64 bits per word. Subspaces are kept
//! in reduced row-echelon form, so two equal subspaces have identical bases
//! and derived `PartialEq` is subspace equality.

use std::fmt;

use crate::error::{Error, Result};
use crate::par;

const W: usize = 64;

fn words_for(bits: usize) -> usize {
    bits.div_ceil(W)
}

fn xor_into(dst: &mut [u64], src: &[u64]) {
    for (d, s) in dst.iter_mut().zip(src) {
        *d ^= *s;
    }
}

fn bit(words: &[u64], i: usize) -> bool {
    (words[i / W] >> (i % W)) & 1 == 1
}

/// A row vector over GF(2).
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitVec {
    len: usize,
    words: Vec<u64>,
}

impl BitVec {
    pub fn zeros(len: usize) -> Self {
        BitVec { len, words: vec![0; words_for(len)] }
    }

    pub fn unit(len: usize, i: usize) -> Self {
        let mut v = Self::zeros(len);
        v.set(i, true);
        v
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut v = Self::zeros(bits.len());
        for (i, &b) in bits.iter().enumerate() {
            if b {
                v.set(i, true);
            }
        }
        v
    }

    pub fn from_ones(len: usize, ones: impl IntoIterator<Item = usize>) -> Self {
        let mut v = Self::zeros(len);
        for i in ones {
            v.flip(i);
        }
        v
    }

    pub(crate) fn from_words(len: usize, words: &[u64]) -> Self {
        let mut w = words[..words_for(len)].to_vec();
        if len % W != 0 {
            if let Some(last) = w.last_mut() {
                *last &= (1u64 << (len % W)) - 1;
            }
        }
        BitVec { len, words: w }
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn words(&self) -> &[u64] {
        &self.words
    }

    pub fn get(&self, i: usize) -> bool {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        bit(&self.words, i)
    }

    pub fn set(&mut self, i: usize, value: bool) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        if value {
            self.words[i / W] |= 1 << (i % W);
        } else {
            self.words[i / W] &= !(1 << (i % W));
        }
    }

    pub fn flip(&mut self, i: usize) {
        assert!(i < self.len, "bit {i} out of range {}", self.len);
        self.words[i / W] ^= 1 << (i % W);
    }

    pub fn is_zero(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn xor_assign(&mut self, other: &BitVec) {
        assert_eq!(self.len, other.len, "length mismatch in xor");
        xor_into(&mut self.words, &other.words);
    }

    /// Standard bilinear pairing `Σ a_i b_i`.
    pub fn dot(&self, other: &BitVec) -> bool {
        assert_eq!(self.len, other.len, "length mismatch in dot");
        self.words
            .iter()
            .zip(&other.words)
            .fold(0u32, |acc, (a, b)| acc ^ (a & b).count_ones())
            & 1
            == 1
    }

    pub fn ones(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(wi, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let t = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(wi * W + t)
            })
        })
    }

    /// The sub-vector on `start..start+len`.
    pub fn slice(&self, start: usize, len: usize) -> BitVec {
        assert!(start + len <= self.len);
        let mut out = BitVec::zeros(len);
        for i in self.ones().filter(|&i| i >= start && i < start + len) {
            out.set(i - start, true);
        }
        out
    }

    /// Writes `src` into positions `start..start+src.len()` by XOR.
    pub fn xor_at(&mut self, start: usize, src: &BitVec) {
        assert!(start + src.len <= self.len);
        for i in src.ones() {
            self.flip(start + i);
        }
    }

    /// Concatenation `[self | other]`.
    pub fn concat(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len + other.len);
        out.xor_at(0, self);
        out.xor_at(self.len, other);
        out
    }

    /// Tensor product with coordinates `(i, j) ↦ i·other.len() + j`.
    pub fn kron(&self, other: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.len * other.len);
        for i in self.ones() {
            out.xor_at(i * other.len, other);
        }
        out
    }

    pub fn to_bools(&self) -> Vec<bool> {
        (0..self.len).map(|i| self.get(i)).collect()
    }
}

impl fmt::Debug for BitVec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for i in 0..self.len {
            write!(f, "{}", u8::from(self.get(i)))?;
        }
        write!(f, "]")
    }
}

/// A dense matrix over GF(2), acting on row vectors from the left: `v·m`.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct BitMatrix {
    rows: usize,
    cols: usize,
    stride: usize,
    data: Vec<u64>,
}

impl BitMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        let stride = words_for(cols);
        BitMatrix { rows, cols, stride, data: vec![0; rows * stride] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, true);
        }
        m
    }

    /// Builds from 0/1 rows; handy in tests and fixtures.
    pub fn from_dense(rows: &[&[u8]]) -> Self {
        let cols = rows.first().map_or(0, |r| r.len());
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "ragged dense matrix");
            for (j, &b) in r.iter().enumerate() {
                m.set(i, j, b & 1 == 1);
            }
        }
        m
    }

    pub fn from_rows(cols: usize, rows: &[BitVec]) -> Self {
        let mut m = Self::zeros(rows.len(), cols);
        for (i, r) in rows.iter().enumerate() {
            assert_eq!(r.len(), cols, "row length mismatch");
            m.row_words_mut(i).copy_from_slice(r.words());
        }
        m
    }

    pub fn from_fn(rows: usize, cols: usize, f: impl Fn(usize, usize) -> bool) -> Self {
        let mut m = Self::zeros(rows, cols);
        for i in 0..rows {
            for j in 0..cols {
                if f(i, j) {
                    m.set(i, j, true);
                }
            }
        }
        m
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}×{}", self.rows, self.cols);
        bit(self.row_words(i), j)
    }

    pub fn set(&mut self, i: usize, j: usize, value: bool) {
        assert!(i < self.rows && j < self.cols, "index ({i},{j}) out of {}×{}", self.rows, self.cols);
        let s = self.stride;
        let w = &mut self.data[i * s + j / W];
        if value {
            *w |= 1 << (j % W);
        } else {
            *w &= !(1 << (j % W));
        }
    }

    pub fn flip(&mut self, i: usize, j: usize) {
        let v = self.get(i, j);
        self.set(i, j, !v);
    }

    pub(crate) fn row_words(&self, i: usize) -> &[u64] {
        &self.data[i * self.stride..(i + 1) * self.stride]
    }

    pub(crate) fn row_words_mut(&mut self, i: usize) -> &mut [u64] {
        let s = self.stride;
        &mut self.data[i * s..(i + 1) * s]
    }

    pub fn row(&self, i: usize) -> BitVec {
        BitVec::from_words(self.cols, self.row_words(i))
    }

    pub fn row_vecs(&self) -> Vec<BitVec> {
        (0..self.rows).map(|i| self.row(i)).collect()
    }

    pub fn xor_row(&mut self, i: usize, v: &BitVec) {
        assert_eq!(v.len(), self.cols);
        xor_into(self.row_words_mut(i), v.words());
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&w| w == 0)
    }

    pub fn count_ones(&self) -> usize {
        self.data.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn transpose(&self) -> BitMatrix {
        let mut t = BitMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in BitVec::from_words(self.cols, self.row_words(i)).ones() {
                t.set(j, i, true);
            }
        }
        t
    }

    /// `v·self`.
    pub fn apply(&self, v: &BitVec) -> BitVec {
        assert_eq!(v.len(), self.rows, "vector length {} vs {} rows", v.len(), self.rows);
        let mut out = vec![0u64; self.stride];
        for i in v.ones() {
            xor_into(&mut out, self.row_words(i));
        }
        BitVec { len: self.cols, words: out }
    }

    /// Composite `self·other`: first `self`, then `other`.
    pub fn mul(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.rows, "product {}×{} · {}×{}", self.rows, self.cols, other.rows, other.cols);
        let mut out = BitMatrix::zeros(self.rows, other.cols);
        let stride = out.stride;
        par::for_each_row(&mut out.data, stride, |i, row| {
            for k in BitVec::from_words(self.cols, self.row_words(i)).ones() {
                xor_into(row, other.row_words(k));
            }
        });
        out
    }

    pub fn add(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum of different shapes");
        let mut out = self.clone();
        xor_into(&mut out.data, &other.data);
        out
    }

    pub fn add_assign(&mut self, other: &BitMatrix) {
        assert_eq!((self.rows, self.cols), (other.rows, other.cols), "sum of different shapes");
        xor_into(&mut self.data, &other.data);
    }

    /// Kronecker product: `(v⊗w)·(a⊗b) = (v·a)⊗(w·b)`.
    pub fn kron(&self, other: &BitMatrix) -> BitMatrix {
        let mut out = BitMatrix::zeros(self.rows * other.rows, self.cols * other.cols);
        for i in 0..self.rows {
            let ones: Vec<usize> = self.row(i).ones().collect();
            for k in 0..other.rows {
                let orow = other.row(k);
                let mut row = BitVec::zeros(out.cols);
                for &j in &ones {
                    row.xor_at(j * other.cols, &orow);
                }
                out.xor_row(i * other.rows + k, &row);
            }
        }
        out
    }

    /// Rows of `self` followed by rows of `other`.
    pub fn vstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.cols, other.cols, "vstack column mismatch");
        let mut data = self.data.clone();
        data.extend_from_slice(&other.data);
        BitMatrix { rows: self.rows + other.rows, cols: self.cols, stride: self.stride, data }
    }

    /// `[self | other]`.
    pub fn hstack(&self, other: &BitMatrix) -> BitMatrix {
        assert_eq!(self.rows, other.rows, "hstack row mismatch");
        let rows: Vec<BitVec> = (0..self.rows).map(|i| self.row(i).concat(&other.row(i))).collect();
        BitMatrix::from_rows(self.cols + other.cols, &rows)
    }

    pub fn select_rows(&self, idx: &[usize]) -> BitMatrix {
        let rows: Vec<BitVec> = idx.iter().map(|&i| self.row(i)).collect();
        BitMatrix::from_rows(self.cols, &rows)
    }

    /// The block `rows r0..r0+nr`, `cols c0..c0+nc`.
    pub fn block(&self, r0: usize, nr: usize, c0: usize, nc: usize) -> BitMatrix {
        let rows: Vec<BitVec> = (r0..r0 + nr).map(|i| self.row(i).slice(c0, nc)).collect();
        BitMatrix::from_rows(nc, &rows)
    }

    /// XORs `b` into the block whose top-left corner is `(r0, c0)`.
    pub fn xor_block(&mut self, r0: usize, c0: usize, b: &BitMatrix) {
        assert!(r0 + b.rows <= self.rows && c0 + b.cols <= self.cols, "block out of range");
        for i in 0..b.rows {
            for c in BitVec::from_words(b.cols, b.row_words(i)).ones() {
                self.flip(r0 + i, c0 + c);
            }
        }
    }

    pub fn rank(&self) -> usize {
        let mut work = self.clone();
        forward_eliminate(&mut work.data, self.rows, self.stride, self.cols)
    }
}

impl fmt::Debug for BitMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "BitMatrix {}×{}", self.rows, self.cols)?;
        for i in 0..self.rows {
            writeln!(f, "  {:?}", self.row(i))?;
        }
        Ok(())
    }
}

/// Row-echelon pass restricted to the first `ncols` columns; returns rank.
/// Rows are permuted so that pivot rows come first.
fn forward_eliminate(data: &mut [u64], rows: usize, stride: usize, ncols: usize) -> usize {
    let mut rank = 0;
    for col in 0..ncols {
        if rank == rows {
            break;
        }
        let Some(p) = (rank..rows).find(|&r| bit(&data[r * stride..], col)) else {
            continue;
        };
        swap_rows(data, stride, p, rank);
        let pivot = data[rank * stride..(rank + 1) * stride].to_vec();
        let below = &mut data[(rank + 1) * stride..];
        par::for_each_row(below, stride, |_, row| {
            if bit(row, col) {
                xor_into(row, &pivot);
            }
        });
        rank += 1;
    }
    rank
}

/// Full reduction on the first `ncols` columns; returns the pivot columns,
/// with pivot row `i` moved to position `i`.
fn reduce_rref(data: &mut [u64], rows: usize, stride: usize, ncols: usize) -> Vec<usize> {
    let mut pivots = Vec::new();
    for col in 0..ncols {
        let r = pivots.len();
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| bit(&data[i * stride..], col)) else {
            continue;
        };
        swap_rows(data, stride, p, r);
        let pivot = data[r * stride..(r + 1) * stride].to_vec();
        par::for_each_row(data, stride, |i, row| {
            if i != r && bit(row, col) {
                xor_into(row, &pivot);
            }
        });
        pivots.push(col);
    }
    pivots
}

fn swap_rows(data: &mut [u64], stride: usize, a: usize, b: usize) {
    if a == b {
        return;
    }
    let (lo, hi) = (a.min(b), a.max(b));
    let (head, tail) = data.split_at_mut(hi * stride);
    head[lo * stride..(lo + 1) * stride].swap_with_slice(&mut tail[..stride]);
}

/// Rank of `m`.
pub fn rank(m: &BitMatrix) -> usize {
    m.rank()
}

/// Left kernel `{v : v·m = 0}`.
pub fn kernel(m: &BitMatrix) -> Subspace {
    let aug = m.hstack(&BitMatrix::identity(m.rows));
    let mut work = aug;
    let r = forward_eliminate(&mut work.data, work.rows, work.stride, m.cols);
    let rows: Vec<BitVec> = (r..m.rows).map(|i| work.row(i).slice(m.cols, m.rows)).collect();
    Subspace::from_rows(m.rows, &BitMatrix::from_rows(m.rows, &rows))
}

/// Row space of `m`, i.e. the image of the map `v ↦ v·m`.
pub fn image(m: &BitMatrix) -> Subspace {
    Subspace::from_rows(m.cols, m)
}

/// `{v : v·m ∈ w}`.
pub fn preimage(m: &BitMatrix, w: &Subspace) -> Subspace {
    assert_eq!(m.cols, w.ambient, "preimage: target dims differ");
    kernel(&m.mul(&w.quotient_map()))
}

/// Some `x` with `x·m = b`, or `None`.
pub fn solve(m: &BitMatrix, b: &BitVec) -> Option<BitVec> {
    Solver::new(m).solve(b)
}

/// `dim(z/b)` and a section: rows of `section` are representatives of a
/// basis of `z/b`. Requires `b ⊆ z`.
pub fn subquotient(z: &Subspace, b: &Subspace) -> Result<(usize, BitMatrix)> {
    let sq = Subquotient::new(z, b)?;
    Ok((sq.dim(), sq.section().clone()))
}

/// Precomputed elimination for repeated solves of `x·m = b`.
///
/// The particular solution returned has zeros on every non-pivot row of the
/// elimination, so it is deterministic in `m` and `b`.
#[derive(Clone, Debug)]
pub struct Solver {
    nrows: usize,
    ncols: usize,
    reduced: BitMatrix,
    transform: BitMatrix,
    pivots: Vec<usize>,
}

impl Solver {
    pub fn new(m: &BitMatrix) -> Self {
        let mut work = m.hstack(&BitMatrix::identity(m.rows));
        let pivots = reduce_rref(&mut work.data, work.rows, work.stride, m.cols);
        let r = pivots.len();
        let idx: Vec<usize> = (0..r).collect();
        let top = work.select_rows(&idx);
        Solver {
            nrows: m.rows,
            ncols: m.cols,
            reduced: top.block(0, r, 0, m.cols),
            transform: top.block(0, r, m.cols, m.rows),
            pivots,
        }
    }

    pub fn rank(&self) -> usize {
        self.pivots.len()
    }

    pub fn solve(&self, b: &BitVec) -> Option<BitVec> {
        assert_eq!(b.len(), self.ncols, "solve: rhs length");
        let mut res = b.clone();
        let mut x = BitVec::zeros(self.nrows);
        for (i, &c) in self.pivots.iter().enumerate() {
            if res.get(c) {
                xor_into(&mut res.words, self.reduced.row_words(i));
                xor_into(&mut x.words, self.transform.row_words(i));
            }
        }
        res.is_zero().then_some(x)
    }
}

/// A linear subspace of `GF(2)^ambient` with a basis in reduced row-echelon form.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Subspace {
    ambient: usize,
    basis: BitMatrix,
    pivots: Vec<usize>,
}

impl fmt::Debug for Subspace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Subspace(dim {} in {}) ", self.dim(), self.ambient)?;
        f.debug_list().entries(self.basis.row_vecs()).finish()
    }
}

impl Subspace {
    pub fn zero(ambient: usize) -> Self {
        Subspace { ambient, basis: BitMatrix::zeros(0, ambient), pivots: vec![] }
    }

    pub fn full(ambient: usize) -> Self {
        Subspace { ambient, basis: BitMatrix::identity(ambient), pivots: (0..ambient).collect() }
    }

    /// Span of the rows of `m`.
    pub fn from_rows(ambient: usize, m: &BitMatrix) -> Self {
        assert_eq!(m.cols, ambient, "rows do not live in the ambient space");
        let mut work = m.clone();
        let pivots = reduce_rref(&mut work.data, work.rows, work.stride, ambient);
        let idx: Vec<usize> = (0..pivots.len()).collect();
        Subspace { ambient, basis: work.select_rows(&idx), pivots }
    }

    pub fn from_vecs(ambient: usize, vs: &[BitVec]) -> Self {
        Self::from_rows(ambient, &BitMatrix::from_rows(ambient, vs))
    }

    /// Span of the standard basis vectors `e_i`, `i ∈ range`.
    pub fn coordinate(ambient: usize, range: std::ops::Range<usize>) -> Self {
        let rows: Vec<BitVec> = range.map(|i| BitVec::unit(ambient, i)).collect();
        Self::from_vecs(ambient, &rows)
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    pub fn dim(&self) -> usize {
        self.pivots.len()
    }

    pub fn basis(&self) -> &BitMatrix {
        &self.basis
    }

    pub fn pivots(&self) -> &[usize] {
        &self.pivots
    }

    pub fn is_zero(&self) -> bool {
        self.pivots.is_empty()
    }

    pub fn is_full(&self) -> bool {
        self.dim() == self.ambient
    }

    /// Reduces `v` modulo the subspace; the result is zero exactly when `v ∈ self`.
    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (i, &c) in self.pivots.iter().enumerate() {
            if r.get(c) {
                xor_into(&mut r.words, self.basis.row_words(i));
            }
        }
        r
    }

    pub fn contains(&self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ambient, "contains: length mismatch");
        self.reduce(v).is_zero()
    }

    pub fn is_subspace_of(&self, other: &Subspace) -> bool {
        self.ambient == other.ambient && (0..self.dim()).all(|i| other.contains(&self.basis.row(i)))
    }

    pub fn sum(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "sum of subspaces in different spaces");
        Subspace::from_rows(self.ambient, &self.basis.vstack(&other.basis))
    }

    pub fn intersect(&self, other: &Subspace) -> Subspace {
        assert_eq!(self.ambient, other.ambient, "intersection of subspaces in different spaces");
        let coeffs = preimage(&self.basis, other);
        Subspace::from_rows(self.ambient, &coeffs.basis.mul(&self.basis))
    }

    /// A matrix `ambient × (ambient − dim)` whose left kernel is exactly `self`.
    pub fn quotient_map(&self) -> BitMatrix {
        let mut is_pivot = vec![usize::MAX; self.ambient];
        for (i, &c) in self.pivots.iter().enumerate() {
            is_pivot[c] = i;
        }
        let free: Vec<usize> = (0..self.ambient).filter(|&c| is_pivot[c] == usize::MAX).collect();
        let mut pos = vec![usize::MAX; self.ambient];
        for (k, &c) in free.iter().enumerate() {
            pos[c] = k;
        }
        let mut q = BitMatrix::zeros(self.ambient, free.len());
        for i in 0..self.ambient {
            if is_pivot[i] == usize::MAX {
                q.set(i, pos[i], true);
            } else {
                for c in self.basis.row(is_pivot[i]).ones() {
                    if pos[c] != usize::MAX {
                        q.set(i, pos[c], true);
                    }
                }
            }
        }
        q
    }

    /// `{φ : φ·w = 0 for all w ∈ self}` under the standard pairing.
    pub fn annihilator(&self) -> Subspace {
        kernel(&self.basis.transpose())
    }

    /// Image of the subspace under `v ↦ v·m`.
    pub fn map(&self, m: &BitMatrix) -> Subspace {
        assert_eq!(m.rows, self.ambient, "map: source dims differ");
        Subspace::from_rows(m.cols, &self.basis.mul(m))
    }

    /// Whether `v·m ∈ self` for every `v ∈ self`.
    pub fn is_invariant(&self, m: &BitMatrix) -> bool {
        (0..self.dim()).all(|i| self.contains(&m.apply(&self.basis.row(i))))
    }
}

/// Incremental row echelon: rows are kept reduced against earlier pivots.
#[derive(Clone, Debug)]
pub struct Echelon {
    ambient: usize,
    rows: Vec<BitVec>,
    pivots: Vec<usize>,
}

impl Echelon {
    pub fn new(ambient: usize) -> Self {
        Echelon { ambient, rows: Vec::new(), pivots: Vec::new() }
    }

    pub fn rank(&self) -> usize {
        self.rows.len()
    }

    pub fn reduce(&self, v: &BitVec) -> BitVec {
        let mut r = v.clone();
        for (row, &c) in self.rows.iter().zip(&self.pivots) {
            if r.get(c) {
                r.xor_assign(row);
            }
        }
        r
    }

    /// Adds `v`; returns whether it was independent of the rows so far.
    pub fn insert(&mut self, v: &BitVec) -> bool {
        assert_eq!(v.len(), self.ambient, "echelon: length mismatch");
        let r = self.reduce(v);
        let lead = r.ones().next();
        match lead {
            Some(c) => {
                self.rows.push(r);
                self.pivots.push(c);
                true
            }
            None => false,
        }
    }
}

/// The quotient `z/b` for `b ⊆ z`, with coordinates.
#[derive(Clone, Debug)]
pub struct Subquotient {
    dim: usize,
    ambient: usize,
    section: BitMatrix,
    solver: Solver,
}

impl Subquotient {
    pub fn new(z: &Subspace, b: &Subspace) -> Result<Self> {
        if z.ambient != b.ambient || !b.is_subspace_of(z) {
            return Err(Error::NotSubspace("subquotient denominator is not inside numerator".into()));
        }
        let mut running = Echelon::new(z.ambient);
        for i in 0..b.dim() {
            running.insert(&b.basis.row(i));
        }
        let mut reps = Vec::new();
        for i in 0..z.dim() {
            let v = z.basis.row(i);
            if running.insert(&v) {
                reps.push(v);
            }
        }
        let section = BitMatrix::from_rows(z.ambient, &reps);
        let solver = Solver::new(&section.vstack(&b.basis));
        Ok(Subquotient { dim: reps.len(), ambient: z.ambient, section, solver })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn ambient(&self) -> usize {
        self.ambient
    }

    /// Rows are representatives of the quotient basis.
    pub fn section(&self) -> &BitMatrix {
        &self.section
    }

    /// Quotient coordinates of `v ∈ z`, or `None` if `v ∉ z`.
    pub fn project(&self, v: &BitVec) -> Option<BitVec> {
        self.solver.solve(v).map(|x| x.slice(0, self.dim))
    }

    /// A representative of the class with coordinates `c`.
    pub fn lift(&self, c: &BitVec) -> BitVec {
        self.section.apply(c)
    }
}
