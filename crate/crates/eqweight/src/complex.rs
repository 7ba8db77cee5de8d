//! Bounded chain and cochain complexes of finite-dimensional GF(2) spaces.
//!
//! One type covers both variances: a chain complex has `∂_q : C_q → C_{q−1}`
//! and a cochain complex has `δ^q : C^q → C^{q+1}`. Switching between them is
//! always explicit, through [`Complex::dual`] or [`Complex::mirror`].

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVec, Subquotient, Subspace};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Variance {
    Chain,
    Cochain,
}

impl Variance {
    /// Degree change of the differential.
    pub fn step(self) -> i64 {
        match self {
            Variance::Chain => -1,
            Variance::Cochain => 1,
        }
    }

    pub fn flip(self) -> Variance {
        match self {
            Variance::Chain => Variance::Cochain,
            Variance::Cochain => Variance::Chain,
        }
    }
}

/// Dimensions on the degree range `lo..=hi`; zero outside.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GradedSpace {
    lo: i64,
    dims: Vec<usize>,
}

impl GradedSpace {
    pub fn new(lo: i64, dims: Vec<usize>) -> Self {
        GradedSpace { lo, dims }
    }

    pub fn lo(&self) -> i64 {
        self.lo
    }

    /// Top degree; `lo − 1` when empty.
    pub fn hi(&self) -> i64 {
        self.lo + self.dims.len() as i64 - 1
    }

    pub fn dim(&self, q: i64) -> usize {
        if q < self.lo || q > self.hi() {
            0
        } else {
            self.dims[(q - self.lo) as usize]
        }
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.lo..=self.hi()
    }

    pub fn total_dim(&self) -> usize {
        self.dims.iter().sum()
    }

    /// Degrees with nonzero dimension, as `(min, max)`.
    pub fn support(&self) -> Option<(i64, i64)> {
        let nz: Vec<i64> = self.degrees().filter(|&q| self.dim(q) > 0).collect();
        Some((*nz.first()?, *nz.last()?))
    }
}

/// Block layout of a graded tensor product `(A⊗B)^n = ⊕_{i+j=n} A^i ⊗ B^j`.
///
/// Blocks are ordered by `i` ascending; inside a block, `x⊗y` sits at
/// `x·dim(B^j) + y`.
#[derive(Clone, Debug)]
pub struct TensorLayout {
    a: GradedSpace,
    b: GradedSpace,
    offsets: BTreeMap<(i64, i64), usize>,
    space: GradedSpace,
}

impl TensorLayout {
    pub fn new(a: &GradedSpace, b: &GradedSpace) -> Self {
        let lo = a.lo() + b.lo();
        let hi = a.hi() + b.hi();
        let mut offsets = BTreeMap::new();
        let mut dims = Vec::new();
        for n in lo..=hi {
            let mut off = 0;
            for i in a.degrees() {
                let j = n - i;
                if j < b.lo() || j > b.hi() {
                    continue;
                }
                offsets.insert((i, j), off);
                off += a.dim(i) * b.dim(j);
            }
            dims.push(off);
        }
        if hi < lo {
            dims.clear();
        }
        TensorLayout { a: a.clone(), b: b.clone(), offsets, space: GradedSpace::new(lo, dims) }
    }

    pub fn space(&self) -> &GradedSpace {
        &self.space
    }

    pub fn offset(&self, i: i64, j: i64) -> Option<usize> {
        self.offsets.get(&(i, j)).copied()
    }

    /// `(i, j, offset)` for the blocks of total degree `n`.
    pub fn blocks(&self, n: i64) -> Vec<(i64, i64, usize)> {
        self.a
            .degrees()
            .filter_map(|i| self.offset(i, n - i).map(|o| (i, n - i, o)))
            .collect()
    }

    /// Embeds `x⊗y` with `x ∈ A^i`, `y ∈ B^j`.
    pub fn embed(&self, i: i64, x: &BitVec, j: i64, y: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.space.dim(i + j));
        if let Some(o) = self.offset(i, j) {
            out.xor_at(o, &x.kron(y));
        }
        out
    }

    pub fn left(&self) -> &GradedSpace {
        &self.a
    }

    pub fn right(&self) -> &GradedSpace {
        &self.b
    }
}

/// A bounded complex over GF(2).
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Complex {
    variance: Variance,
    spaces: GradedSpace,
    diffs: Vec<BitMatrix>,
}

/// Homology in one degree: dimension and cycle representatives.
#[derive(Clone, Debug)]
pub struct Homology {
    pub dim: usize,
    pub representatives: BitMatrix,
}

impl Complex {
    /// `diffs[i]` is the differential out of degree `lo + i`.
    pub fn new(variance: Variance, lo: i64, dims: Vec<usize>, diffs: Vec<BitMatrix>) -> Result<Self> {
        if dims.len() != diffs.len() {
            return Err(Error::InvalidComplex(format!(
                "{} degrees but {} differentials",
                dims.len(),
                diffs.len()
            )));
        }
        let spaces = GradedSpace::new(lo, dims);
        for (i, d) in diffs.iter().enumerate() {
            let q = lo + i as i64;
            let want = (spaces.dim(q), spaces.dim(q + variance.step()));
            if (d.rows(), d.cols()) != want {
                return Err(Error::InvalidComplex(format!(
                    "differential out of degree {q} is {}×{}, expected {}×{}",
                    d.rows(),
                    d.cols(),
                    want.0,
                    want.1
                )));
            }
        }
        let c = Complex { variance, spaces, diffs };
        for q in c.degrees() {
            if !c.differential(q).mul(&c.differential(q + variance.step())).is_zero() {
                return Err(Error::InvalidComplex(format!("d∘d ≠ 0 at degree {q}")));
            }
        }
        Ok(c)
    }

    pub fn chain(lo: i64, dims: Vec<usize>, diffs: Vec<BitMatrix>) -> Result<Self> {
        Self::new(Variance::Chain, lo, dims, diffs)
    }

    pub fn cochain(lo: i64, dims: Vec<usize>, diffs: Vec<BitMatrix>) -> Result<Self> {
        Self::new(Variance::Cochain, lo, dims, diffs)
    }

    pub(crate) fn new_unchecked(variance: Variance, lo: i64, dims: Vec<usize>, diffs: Vec<BitMatrix>) -> Self {
        Complex { variance, spaces: GradedSpace::new(lo, dims), diffs }
    }

    /// The complex with a single `GF(2)^dim` in degree `q`.
    pub fn concentrated(variance: Variance, q: i64, dim: usize) -> Self {
        let target = 0;
        Complex { variance, spaces: GradedSpace::new(q, vec![dim]), diffs: vec![BitMatrix::zeros(dim, target)] }
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    pub fn spaces(&self) -> &GradedSpace {
        &self.spaces
    }

    pub fn lo(&self) -> i64 {
        self.spaces.lo()
    }

    pub fn hi(&self) -> i64 {
        self.spaces.hi()
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i64> {
        self.spaces.degrees()
    }

    pub fn dim(&self, q: i64) -> usize {
        self.spaces.dim(q)
    }

    /// The differential out of degree `q` (a zero matrix outside the range).
    pub fn differential(&self, q: i64) -> BitMatrix {
        if q < self.lo() || q > self.hi() {
            return BitMatrix::zeros(self.dim(q), self.dim(q + self.variance.step()));
        }
        self.diffs[(q - self.lo()) as usize].clone()
    }

    pub(crate) fn differential_ref(&self, q: i64) -> Option<&BitMatrix> {
        if q < self.lo() || q > self.hi() {
            None
        } else {
            Some(&self.diffs[(q - self.lo()) as usize])
        }
    }

    /// The differential arriving in degree `q`.
    pub fn incoming(&self, q: i64) -> BitMatrix {
        self.differential(q - self.variance.step())
    }

    pub fn cycles(&self, q: i64) -> Subspace {
        gf2::kernel(&self.differential(q))
    }

    pub fn boundaries(&self, q: i64) -> Subspace {
        gf2::image(&self.incoming(q))
    }

    /// Homology dimension from ranks only.
    pub fn homology_dim(&self, q: i64) -> usize {
        let out = self.differential_ref(q).map_or(0, |d| d.rank());
        let inc = self.differential_ref(q - self.variance.step()).map_or(0, |d| d.rank());
        self.dim(q) - out - inc
    }

    pub fn homology(&self, q: i64) -> Homology {
        let sq = self.homology_quotient(q);
        Homology { dim: sq.dim(), representatives: sq.section().clone() }
    }

    pub fn homology_quotient(&self, q: i64) -> Subquotient {
        Subquotient::new(&self.cycles(q), &self.boundaries(q)).expect("boundaries are cycles")
    }

    pub fn euler_characteristic(&self) -> i64 {
        self.degrees().map(|q| if q.rem_euclid(2) == 0 { self.dim(q) as i64 } else { -(self.dim(q) as i64) }).sum()
    }

    /// The linear dual, with the opposite variance and the same degree labels.
    pub fn dual(&self) -> Complex {
        let s = self.variance.step();
        let diffs = self.degrees().map(|q| self.differential(q - s).transpose()).collect();
        Complex::new_unchecked(self.variance.flip(), self.lo(), self.spaces.dims.clone(), diffs)
    }

    /// Degree negation with the opposite variance and identical matrices.
    pub fn mirror(&self) -> Complex {
        let mut dims = self.spaces.dims.clone();
        dims.reverse();
        let mut diffs = self.diffs.clone();
        diffs.reverse();
        Complex::new_unchecked(self.variance.flip(), -self.hi(), dims, diffs)
    }

    /// Relabels degree `q` as `q + s`.
    pub fn shifted(&self, s: i64) -> Complex {
        Complex::new_unchecked(self.variance, self.lo() + s, self.spaces.dims.clone(), self.diffs.clone())
    }

    /// Only the degrees in `lo..=hi`; the differential leaving the range is dropped.
    pub fn truncated(&self, lo: i64, hi: i64) -> Complex {
        let lo = lo.max(self.lo());
        let hi = hi.min(self.hi());
        if hi < lo {
            return Complex::new_unchecked(self.variance, lo, vec![], vec![]);
        }
        let dims: Vec<usize> = (lo..=hi).map(|q| self.dim(q)).collect();
        let s = self.variance.step();
        let diffs = (lo..=hi)
            .map(|q| {
                let t = q + s;
                if t < lo || t > hi {
                    BitMatrix::zeros(self.dim(q), 0)
                } else {
                    self.differential(q)
                }
            })
            .collect();
        Complex::new_unchecked(self.variance, lo, dims, diffs)
    }

    /// Tensor product with the Leibniz differential `d(x⊗y) = dx⊗y + x⊗dy`.
    pub fn tensor(&self, other: &Complex) -> Result<Complex> {
        if self.variance != other.variance {
            return Err(Error::Variance("tensor of a chain and a cochain complex".into()));
        }
        let layout = TensorLayout::new(&self.spaces, &other.spaces);
        let s = self.variance.step();
        let sp = layout.space().clone();
        let diffs = sp
            .degrees()
            .map(|n| {
                let mut d = BitMatrix::zeros(sp.dim(n), sp.dim(n + s));
                for (i, j, off) in layout.blocks(n) {
                    let (da, db) = (self.dim(i), other.dim(j));
                    if let Some(t) = layout.offset(i + s, j) {
                        d.xor_block(off, t, &self.differential(i).kron(&BitMatrix::identity(db)));
                    }
                    if let Some(t) = layout.offset(i, j + s) {
                        d.xor_block(off, t, &BitMatrix::identity(da).kron(&other.differential(j)));
                    }
                }
                d
            })
            .collect();
        Ok(Complex::new_unchecked(self.variance, sp.lo(), sp.dims.clone(), diffs))
    }

    /// The subcomplex or quotient-like piece spanned by `subspaces`, which
    /// must be differential-stable; coordinates are the subspace bases.
    pub fn restrict_to(&self, subspaces: &BTreeMap<i64, Subspace>) -> Result<Complex> {
        let s = self.variance.step();
        let empty = |q: i64| Subspace::zero(self.dim(q));
        let get = |q: i64| subspaces.get(&q).cloned().unwrap_or_else(|| empty(q));
        let mut diffs = Vec::new();
        for q in self.degrees() {
            let src = get(q);
            let tgt = get(q + s);
            let solver = gf2::Solver::new(tgt.basis());
            let mut rows = Vec::new();
            for i in 0..src.dim() {
                let image = self.differential(q).apply(&src.basis().row(i));
                let c = solver
                    .solve(&image)
                    .ok_or_else(|| Error::InvalidComplex(format!("subspace in degree {q} is not d-stable")))?;
                rows.push(c);
            }
            diffs.push(BitMatrix::from_rows(tgt.dim(), &rows));
        }
        let dims = self.degrees().map(|q| get(q).dim()).collect();
        Ok(Complex::new_unchecked(self.variance, self.lo(), dims, diffs))
    }
}

/// A degree-preserving map of complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ComplexMap {
    source: Complex,
    target: Complex,
    maps: BTreeMap<i64, BitMatrix>,
}

impl ComplexMap {
    /// Builds and checks `d∘f = f∘d` in every degree.
    pub fn new(source: &Complex, target: &Complex, maps: BTreeMap<i64, BitMatrix>) -> Result<Self> {
        let f = Self::new_unchecked(source, target, maps)?;
        if let Some(q) = f.first_noncommuting_degree() {
            return Err(Error::InvalidComplex(format!("map does not commute with differentials at degree {q}")));
        }
        Ok(f)
    }

    /// Builds with shape checks only.
    pub fn new_unchecked(source: &Complex, target: &Complex, maps: BTreeMap<i64, BitMatrix>) -> Result<Self> {
        if source.variance() != target.variance() {
            return Err(Error::Variance("map between complexes of different variance".into()));
        }
        for (&q, m) in &maps {
            if (m.rows(), m.cols()) != (source.dim(q), target.dim(q)) {
                return Err(Error::Dimension(format!(
                    "map in degree {q} is {}×{}, expected {}×{}",
                    m.rows(),
                    m.cols(),
                    source.dim(q),
                    target.dim(q)
                )));
            }
        }
        Ok(ComplexMap { source: source.clone(), target: target.clone(), maps })
    }

    pub fn identity(c: &Complex) -> Self {
        let maps = c.degrees().map(|q| (q, BitMatrix::identity(c.dim(q)))).collect();
        ComplexMap { source: c.clone(), target: c.clone(), maps }
    }

    pub fn zero(source: &Complex, target: &Complex) -> Self {
        ComplexMap { source: source.clone(), target: target.clone(), maps: BTreeMap::new() }
    }

    pub fn source(&self) -> &Complex {
        &self.source
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn matrix(&self, q: i64) -> BitMatrix {
        self.maps
            .get(&q)
            .cloned()
            .unwrap_or_else(|| BitMatrix::zeros(self.source.dim(q), self.target.dim(q)))
    }

    pub fn first_noncommuting_degree(&self) -> Option<i64> {
        let s = self.source.variance().step();
        let lo = self.source.lo().min(self.target.lo()) - 1;
        let hi = self.source.hi().max(self.target.hi()) + 1;
        (lo..=hi).find(|&q| {
            let left = self.source.differential(q).mul(&self.matrix(q + s));
            let right = self.matrix(q).mul(&self.target.differential(q));
            left != right
        })
    }

    pub fn is_chain_map(&self) -> bool {
        self.first_noncommuting_degree().is_none()
    }

    /// `self` followed by `next`.
    pub fn then(&self, next: &ComplexMap) -> Result<ComplexMap> {
        if self.target != next.source {
            return Err(Error::Dimension("composite of non-composable maps".into()));
        }
        let maps = self.source.degrees().map(|q| (q, self.matrix(q).mul(&next.matrix(q)))).collect();
        Ok(ComplexMap { source: self.source.clone(), target: next.target.clone(), maps })
    }

    /// The same matrices between the mirrored complexes.
    pub fn mirror(&self) -> ComplexMap {
        let maps = self.maps.iter().map(|(&q, m)| (-q, m.clone())).collect();
        ComplexMap { source: self.source.mirror(), target: self.target.mirror(), maps }
    }

    /// Matrix of the induced map on homology in degree `q`, in the
    /// coordinates of [`Complex::homology_quotient`] on both sides.
    pub fn on_homology(&self, q: i64) -> BitMatrix {
        let src = self.source.homology_quotient(q);
        let tgt = self.target.homology_quotient(q);
        let rows: Vec<BitVec> = (0..src.dim())
            .map(|i| {
                let image = self.matrix(q).apply(&src.section().row(i));
                tgt.project(&image).expect("chain maps send cycles to cycles")
            })
            .collect();
        BitMatrix::from_rows(tgt.dim(), &rows)
    }
}

/// `f ⊗ g` between the tensor products of the sources and of the targets.
pub fn tensor_maps(f: &ComplexMap, g: &ComplexMap) -> Result<ComplexMap> {
    let source = f.source.tensor(&g.source)?;
    let target = f.target.tensor(&g.target)?;
    let ls = TensorLayout::new(f.source.spaces(), g.source.spaces());
    let lt = TensorLayout::new(f.target.spaces(), g.target.spaces());
    let mut maps = BTreeMap::new();
    for n in source.degrees() {
        let mut m = BitMatrix::zeros(source.dim(n), target.dim(n));
        for (i, j, off) in ls.blocks(n) {
            if let Some(to) = lt.offset(i, j) {
                m.xor_block(off, to, &f.matrix(i).kron(&g.matrix(j)));
            }
        }
        maps.insert(n, m);
    }
    ComplexMap::new(&source, &target, maps)
}

/// Whether `f` induces isomorphisms on homology in every degree.
pub fn is_quasi_iso(f: &ComplexMap) -> bool {
    if !f.is_chain_map() {
        return false;
    }
    let lo = f.source.lo().min(f.target.lo());
    let hi = f.source.hi().max(f.target.hi());
    (lo..=hi).all(|q| {
        let h = f.on_homology(q);
        h.rows() == h.cols() && h.rank() == h.rows()
    })
}

#[cfg(test)]
pub(crate) mod tests {
    use super::*;

    /// Four vertices, four edges, one cycle.
    pub(crate) fn circle_chains() -> Complex {
        let d1 = BitMatrix::from_dense(&[&[1, 1, 0, 0], &[0, 1, 1, 0], &[0, 0, 1, 1], &[1, 0, 0, 1]]);
        Complex::chain(0, vec![4, 4], vec![BitMatrix::zeros(4, 0), d1]).unwrap()
    }

    #[test]
    fn point_and_two_points() {
        let p = Complex::concentrated(Variance::Chain, 0, 1);
        assert_eq!(p.homology_dim(0), 1);
        assert_eq!(p.homology_dim(1), 0);
        let two = Complex::concentrated(Variance::Chain, 0, 2);
        assert_eq!(two.homology(0).dim, 2);
    }

    #[test]
    fn dual_is_transpose_and_involutive() {
        let c = circle_chains();
        let d = c.dual();
        assert_eq!(d.variance(), Variance::Cochain);
        assert_eq!(d.differential(0), c.differential(1).transpose());
        assert_eq!(d.dual(), c);
    }

    #[test]
    fn mirror_is_involutive() {
        let c = circle_chains();
        let m = c.mirror();
        assert_eq!(m.lo(), -1);
        assert_eq!(m.homology_dim(-1), 1);
        assert_eq!(m.mirror(), c);
    }

    #[test]
    fn tensor_with_point_is_unit() {
        let c = circle_chains();
        let p = Complex::concentrated(Variance::Chain, 0, 1);
        assert_eq!(p.tensor(&c).unwrap(), c);
        assert!(c.tensor(&c.dual()).is_err());
    }

    #[test]
    fn identity_is_quasi_iso_and_zero_is_not() {
        let c = circle_chains();
        assert!(is_quasi_iso(&ComplexMap::identity(&c)));
        assert!(!is_quasi_iso(&ComplexMap::zero(&c, &c)));
    }

    #[test]
    fn rejects_bad_shapes_and_nonzero_square() {
        assert!(Complex::chain(0, vec![2], vec![BitMatrix::zeros(3, 0)]).is_err());
        let d = BitMatrix::identity(1);
        assert!(Complex::cochain(0, vec![1, 1, 1], vec![d.clone(), d, BitMatrix::zeros(1, 0)]).is_err());
    }
}
