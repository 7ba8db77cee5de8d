//! Group cohomology with coefficients in a complex.
//!
//! For a cochain G-complex `K` and a free resolution `F`, `L^n(K)` is
//! `⊕_{p+q=n} Hom_G(F_p, K^q)` with differential `f ↦ f∘∂ + δ∘f`. A G-map
//! out of `F_p = GF(2)[G]^{r_p}` is determined by the images of the
//! generators, so `Hom_G(F_p, K^q)` is stored as `(K^q)^{r_p}` with
//! coordinate `j·dim K^q + i` for the `i`-th coordinate of `f(e_j)`.
//!
//! The homological version uses the mirror: for a chain G-complex `C`,
//! `L_k(C) = L^{−k}(C')` where `C'^n = C_{−n}`.
//!
//! Only degrees up to `window + 1` are assembled. A degree `k` is
//! certified when every block of `L^{k±1}` is present and the resolution
//! has two spare degrees beyond the width of `K`, or when the resolution
//! is complete (its last map is injective, as for the trivial group).

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, Variance};
use crate::error::{Error, Result};
use crate::filtration::{spectral_sequence, Filtered, FilteredChainComplex, FilteredComplex, SpectralSequence};
use crate::gf2::{BitMatrix, BitVec, Subspace};
use crate::group::GComplex;
use crate::par;
use crate::resolution::{ChainLift, FreeResolution};

/// `Hom_G(F_p, K^q)` inside `L^{p+q}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Block {
    pub p: usize,
    pub q: i64,
    pub offset: usize,
    /// `dim K^q`; the block has `r_p · width` coordinates.
    pub width: usize,
    pub rank: usize,
}

impl Block {
    pub fn dim(&self) -> usize {
        self.rank * self.width
    }
}

#[derive(Clone, Debug)]
pub struct LComplex {
    variance: Variance,
    /// The cochain G-complex actually resolved (the mirror, for chains).
    source: GComplex,
    resolution: FreeResolution,
    window: i64,
    complete: bool,
    total: Complex,
    blocks: BTreeMap<i64, Vec<Block>>,
}

/// `f ↦ f∘α` in generator coordinates, for `α(e_k) = Σ c_{k,j,g} g·e_j`
/// given by `images` (row `k`, entry `j·|G| + g`) and `g` acting on the
/// coefficients by `act[g]`.
pub(crate) fn precompose(images: &BitMatrix, act: &[BitMatrix], width: usize) -> BitMatrix {
    let n = act.len();
    let r_src = images.rows();
    let r_tgt = images.cols() / n.max(1);
    let mut out = BitMatrix::zeros(r_tgt * width, r_src * width);
    for k in 0..r_src {
        for idx in images.row(k).ones() {
            out.xor_block((idx / n) * width, k * width, &act[idx % n]);
        }
    }
    out
}

/// Smallest resolution depth certifying degrees up to `window` for `k`.
pub fn default_depth(k: &Complex, window: i64) -> usize {
    let (lo, hi) = match k.variance() {
        Variance::Cochain => (k.lo(), k.hi()),
        Variance::Chain => (-k.hi(), -k.lo()),
    };
    let width = (hi - lo).max(0);
    (window + width + 2).max(window + 1 - lo).max(0) as usize
}

impl LComplex {
    fn build(variance: Variance, source: GComplex, res: &FreeResolution, window: i64) -> Result<Self> {
        if source.group() != res.group() {
            return Err(Error::GroupMismatch("resolution is over a different group".into()));
        }
        let k = source.complex().clone();
        let depth = res.depth() as i64;
        let (lo, top) = (k.lo(), window + 1);
        let degrees: Vec<i64> = if top >= lo { (lo..=top).collect() } else { vec![] };
        let mut blocks = BTreeMap::new();
        let mut dims = Vec::new();
        for &n in &degrees {
            let mut off = 0;
            let mut list = Vec::new();
            for p in 0..=depth.min(n - lo) {
                let q = n - p;
                if q > k.hi() {
                    continue;
                }
                let b = Block { p: p as usize, q, offset: off, width: k.dim(q), rank: res.rank(p as usize) };
                off += b.dim();
                list.push(b);
            }
            dims.push(off);
            blocks.insert(n, list);
        }
        let act: BTreeMap<i64, Vec<BitMatrix>> = k.degrees().map(|q| (q, source.group().elements().map(|g| source.action(g, q)).collect())).collect();
        let diffs = par::map_slice(&degrees, |&n| {
            let src = &blocks[&n];
            let cols = blocks.get(&(n + 1)).map_or(0, |b: &Vec<Block>| b.iter().map(Block::dim).sum());
            let mut d = BitMatrix::zeros(src.iter().map(Block::dim).sum(), cols);
            if n + 1 > top {
                return d;
            }
            let tgt = &blocks[&(n + 1)];
            let find = |p: usize, q: i64| tgt.iter().find(|b| b.p == p && b.q == q);
            for b in src {
                if let Some(t) = find(b.p, b.q + 1) {
                    d.xor_block(b.offset, t.offset, &BitMatrix::identity(b.rank).kron(&k.differential(b.q)));
                }
                if let Some(t) = find(b.p + 1, b.q) {
                    d.xor_block(b.offset, t.offset, &precompose(res.generator_images(b.p + 1), &act[&b.q], b.width));
                }
            }
            d
        });
        let total = Complex::cochain(degrees.first().copied().unwrap_or(lo), dims, diffs)?;
        let complete = res.is_complete();
        Ok(LComplex { variance, source, resolution: res.clone(), window, complete, total, blocks })
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    /// The cochain G-complex behind the construction.
    pub fn source(&self) -> &GComplex {
        &self.source
    }

    pub fn resolution(&self) -> &FreeResolution {
        &self.resolution
    }

    /// Top certified-candidate degree, in the internal cochain grading.
    pub fn window(&self) -> i64 {
        self.window
    }

    /// The assembled total cochain complex (internal grading).
    pub fn total(&self) -> &Complex {
        &self.total
    }

    /// The total complex in the native grading: cochain, or its mirror chain.
    pub fn native_total(&self) -> Complex {
        match self.variance {
            Variance::Cochain => self.total.clone(),
            Variance::Chain => self.total.mirror(),
        }
    }

    /// Blocks of internal degree `n`, ordered by `p`.
    pub fn blocks(&self, n: i64) -> &[Block] {
        self.blocks.get(&n).map_or(&[], Vec::as_slice)
    }

    pub fn block(&self, n: i64, p: usize) -> Option<Block> {
        self.blocks(n).iter().copied().find(|b| b.p == p)
    }

    fn internal(&self, k: i64) -> i64 {
        match self.variance {
            Variance::Cochain => k,
            Variance::Chain => -k,
        }
    }

    fn native(&self, n: i64) -> i64 {
        self.internal(n)
    }

    fn certified_internal(&self, n: i64) -> bool {
        let k = self.source.complex();
        let depth = self.resolution.depth() as i64;
        let width = (k.hi() - k.lo()).max(0);
        let deep_enough = self.complete || (n + width + 2 <= depth && n + 1 - k.lo() <= depth);
        n >= k.lo() && n <= self.window && deep_enough
    }

    /// Whether native degree `k` is computed exactly.
    pub fn certified(&self, k: i64) -> bool {
        self.certified_internal(self.internal(k))
    }

    /// Assembled native degrees, ascending.
    pub fn degrees(&self) -> Vec<i64> {
        let mut d: Vec<i64> = self.total.degrees().filter(|&n| n <= self.window).map(|n| self.native(n)).collect();
        d.sort_unstable();
        d
    }

    /// `dim H^k(G; K)` (or `H_k`) for every assembled degree in the window,
    /// with its certification flag.
    pub fn cohomology(&self) -> BTreeMap<i64, (usize, bool)> {
        self.degrees()
            .into_iter()
            .map(|k| {
                let n = self.internal(k);
                (k, (self.total.homology_dim(n), self.certified_internal(n)))
            })
            .collect()
    }

    /// Certified dims only.
    pub fn certified_dims(&self) -> BTreeMap<i64, usize> {
        self.cohomology().into_iter().filter(|(_, (_, c))| *c).map(|(k, (d, _))| (k, d)).collect()
    }

    fn filtration_from_blocks(&self, p_min: i64, p_max: i64, keep: impl Fn(&Block, i64) -> Option<Subspace>) -> Result<LFiltration> {
        let inner = FilteredComplex::from_fn(self.total.clone(), p_min, p_max, |a, n| {
            let dim = self.total.dim(n);
            let mut rows = Vec::new();
            for b in self.blocks(n) {
                let Some(s) = keep(b, a) else { continue };
                for j in 0..b.rank {
                    for v in s.basis().row_vecs() {
                        let mut x = BitVec::zeros(dim);
                        x.xor_at(b.offset + j * b.width, &v);
                        rows.push(x);
                    }
                }
            }
            Subspace::from_vecs(dim, &rows)
        })?;
        Ok(LFiltration { inner, variance: self.variance })
    }

    /// First Hochschild–Serre filtration `⊕_{p ≥ a}`.
    pub fn hs_first(&self) -> Result<LFiltration> {
        self.filtration_from_blocks(0, self.resolution.depth() as i64, |b, a| (b.p as i64 >= a).then(|| Subspace::full(b.width)))
    }

    /// Second Hochschild–Serre filtration `⊕_{q ≥ a}`.
    pub fn hs_second(&self) -> Result<LFiltration> {
        let k = self.source.complex();
        self.filtration_from_blocks(k.lo(), k.hi(), |b, a| (b.q >= a).then(|| Subspace::full(b.width)))
    }

    /// The filtration `⊕_p Hom_G(F_p, J^α K^q)` induced by a G-stable
    /// decreasing filtration of the source.
    pub fn induced(&self, f: &FilteredComplex) -> Result<LFiltration> {
        if self.variance != Variance::Cochain {
            return Err(Error::Variance("use induced_chain for the homological complex".into()));
        }
        self.induced_internal(f)
    }

    /// The homological version, for an increasing filtration of the chains.
    pub fn induced_chain(&self, f: &FilteredChainComplex) -> Result<LFiltration> {
        if self.variance != Variance::Chain {
            return Err(Error::Variance("use induced for the cohomological complex".into()));
        }
        self.induced_internal(f.mirror())
    }

    fn induced_internal(&self, f: &FilteredComplex) -> Result<LFiltration> {
        if f.complex() != self.source.complex() {
            return Err(Error::Dimension("filtration is on a different complex".into()));
        }
        for a in f.p_min()..=f.p_max() {
            for q in f.complex().degrees() {
                if !self.source.is_stable(q, f.level(a, q)) {
                    return Err(Error::NotEquivariant(format!("filtration level {a} in degree {q} is not G-stable")));
                }
            }
        }
        self.filtration_from_blocks(f.p_min(), f.p_max(), |b, a| Some(f.level(a, b.q).clone()))
    }

    /// Hochschild–Serre spectral sequence. For the second filtration the
    /// entry `(a, b)` has `a` the degree in `K` and `b` the group degree.
    pub fn hochschild_serre(&self, which: HsFiltration, r_max: usize) -> Result<SpectralSequence> {
        let f = match which {
            HsFiltration::First => self.hs_first()?,
            HsFiltration::Second => self.hs_second()?,
        };
        spectral_sequence(&f, r_max)
    }

    /// Whether a native filtration-index/total-degree entry lies in the
    /// certified range.
    pub fn certified_total_degree(&self, k: i64) -> bool {
        self.certified(k)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum HsFiltration {
    First,
    Second,
}

/// A filtration of an L-complex, in its native variance.
#[derive(Clone, Debug)]
pub struct LFiltration {
    inner: FilteredComplex,
    variance: Variance,
}

impl LFiltration {
    pub fn cochain_form(&self) -> &FilteredComplex {
        &self.inner
    }
}

impl Filtered for LFiltration {
    fn cochain_form(&self) -> &FilteredComplex {
        &self.inner
    }
    fn variance(&self) -> Variance {
        self.variance
    }
}

/// `L^*(K)` for a cochain G-complex, assembled up to degree `window + 1`.
pub fn l_cochain(k: &GComplex, res: &FreeResolution, window: i64) -> Result<LComplex> {
    if k.variance() != Variance::Cochain {
        return Err(Error::Variance("l_cochain needs a cochain G-complex".into()));
    }
    LComplex::build(Variance::Cochain, k.clone(), res, window)
}

/// `L_*(C)` for a chain G-complex, assembled down to degree `−window − 1`.
pub fn l_chain(c: &GComplex, res: &FreeResolution, window: i64) -> Result<LComplex> {
    if c.variance() != Variance::Chain {
        return Err(Error::Variance("l_chain needs a chain G-complex".into()));
    }
    LComplex::build(Variance::Chain, c.mirror(), res, window)
}

/// Certified `dim H^k(G; K)`.
pub fn equivariant_cohomology(k: &GComplex, res: &FreeResolution, window: i64) -> Result<BTreeMap<i64, usize>> {
    Ok(l_cochain(k, res, window)?.certified_dims())
}

/// Certified `dim H_k(G; C)`.
pub fn equivariant_homology(c: &GComplex, res: &FreeResolution, window: i64) -> Result<BTreeMap<i64, usize>> {
    Ok(l_chain(c, res, window)?.certified_dims())
}

/// The spectral sequence of the induced filtration; read it through
/// [`SpectralSequence::weight_view`] for the reindexed pages.
pub fn equivariant_weight_ss(lc: &LComplex, f: &FilteredComplex, r_max: usize) -> Result<SpectralSequence> {
    spectral_sequence(&lc.induced(f)?, r_max)
}

pub fn equivariant_weight_ss_chain(lc: &LComplex, f: &FilteredChainComplex, r_max: usize) -> Result<SpectralSequence> {
    spectral_sequence(&lc.induced_chain(f)?, r_max)
}

/// Row `q` of the reindexed first page, `p ↦ gr^{−q} K^{p+q}`, as a
/// cochain G-complex in degrees `p`.
pub fn row_complex(k: &GComplex, f: &FilteredComplex, q: i64) -> Result<GComplex> {
    if f.complex() != k.complex() {
        return Err(Error::Dimension("filtration is on a different complex".into()));
    }
    let upper: BTreeMap<i64, Subspace> = k.complex().degrees().map(|n| (n, f.level(-q, n).clone())).collect();
    let lower: BTreeMap<i64, Subspace> = k.complex().degrees().map(|n| (n, f.level(-q + 1, n).clone())).collect();
    Ok(k.subquotient(&upper, &lower)?.0.shifted(-q))
}

/// Row `q` of the homological reindexed first page, `p ↦ gr_{−q} C_{p+q}`.
pub fn row_complex_chain(c: &GComplex, f: &FilteredChainComplex, q: i64) -> Result<GComplex> {
    if f.complex() != c.complex() {
        return Err(Error::Dimension("filtration is on a different complex".into()));
    }
    let upper: BTreeMap<i64, Subspace> = c.complex().degrees().map(|n| (n, f.level(-q, n).clone())).collect();
    let lower: BTreeMap<i64, Subspace> = c.complex().degrees().map(|n| (n, f.level(-q - 1, n).clone())).collect();
    Ok(c.subquotient(&upper, &lower)?.0.shifted(-q))
}

/// Hochschild–Serre sequence of `L` applied to row `q`; it abuts to the
/// row `q` of the reindexed second equivariant weight page.
pub fn auxiliary_ss(k: &GComplex, f: &FilteredComplex, q: i64, res: &FreeResolution, window: i64, which: HsFiltration, r_max: usize) -> Result<SpectralSequence> {
    let row = row_complex(k, f, q)?;
    l_cochain(&row, res, window)?.hochschild_serre(which, r_max)
}

/// `T : L_{G'}(K) → L_G(φ^*K)`, right composition with a lift `τ` of `φ`.
///
/// `target` is the L-complex over `G'`; `source` is over `G` with the
/// restricted coefficients. Both must have the same window, and the
/// resolution of `source` may not be deeper than the lift.
pub fn restrict_along(tau: &ChainLift, target: &LComplex, source: &LComplex) -> Result<ComplexMap> {
    let phi = tau.phi();
    if target.source().restrict(phi)? != *source.source() {
        return Err(Error::GroupMismatch("source coefficients are not the restriction of the target's".into()));
    }
    if target.window != source.window || target.variance != source.variance {
        return Err(Error::Argument("L-complexes must share window and variance".into()));
    }
    if source.resolution.depth() > tau.depth() {
        return Err(Error::Argument("lift is shallower than the source resolution".into()));
    }
    let k = target.source();
    let mut maps = BTreeMap::new();
    for n in target.total.degrees() {
        let mut m = BitMatrix::zeros(target.total.dim(n), source.total.dim(n));
        for b in source.blocks(n) {
            let Some(t) = target.block(n, b.p) else { continue };
            let act: Vec<BitMatrix> = k.group().elements().map(|g| k.action(g, b.q)).collect();
            m.xor_block(t.offset, b.offset, &precompose(tau.generator_images(b.p), &act, b.width));
        }
        maps.insert(n, m);
    }
    ComplexMap::new(&target.total, &source.total, maps)
}

/// `L(m)`: post-composition with a G-map `m : K → K'` of cochain G-complexes.
pub fn postcompose(m: &ComplexMap, source: &LComplex, target: &LComplex) -> Result<ComplexMap> {
    if m.source() != source.source().complex() || m.target() != target.source().complex() {
        return Err(Error::Dimension("coefficient map does not match the L-complexes".into()));
    }
    let mut maps = BTreeMap::new();
    for n in source.total.degrees() {
        let mut out = BitMatrix::zeros(source.total.dim(n), target.total.dim(n));
        for b in source.blocks(n) {
            if let Some(t) = target.block(n, b.p) {
                out.xor_block(b.offset, t.offset, &BitMatrix::identity(b.rank).kron(&m.matrix(b.q)));
            }
        }
        maps.insert(n, out);
    }
    ComplexMap::new(&source.total, &target.total, maps)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;
    use crate::spaces::SimplicialGSet;

    #[test]
    fn point_over_z2_has_one_class_per_degree() {
        let g = FiniteGroup::cyclic(2);
        let k = GComplex::trivial(&g, Complex::concentrated(Variance::Cochain, 0, 1));
        let res = FreeResolution::periodic(2, default_depth(k.complex(), 6));
        let dims = equivariant_cohomology(&k, &res, 6).unwrap();
        assert_eq!(dims, (0..=6).map(|k| (k, 1)).collect());
    }

    #[test]
    fn trivial_group_recovers_plain_cohomology() {
        let x = SimplicialGSet::torus();
        let k = x.cochains();
        let res = FreeResolution::trivial();
        let lc = l_cochain(&k, &res, 2).unwrap();
        for n in 0..=2 {
            assert_eq!(lc.total().differential(n), k.complex().differential(n));
        }
        assert_eq!(lc.total().dim(3), 0);
        assert_eq!(lc.certified_dims(), BTreeMap::from([(0, 1), (1, 2), (2, 1)]));
    }

    #[test]
    fn reflection_circle_window_four() {
        let k = SimplicialGSet::reflection_circle().cochains();
        let res = FreeResolution::periodic(2, default_depth(k.complex(), 4));
        let dims = equivariant_cohomology(&k, &res, 4).unwrap();
        assert_eq!(dims, BTreeMap::from([(0, 1), (1, 2), (2, 2), (3, 2), (4, 2)]));
    }

    #[test]
    fn certification_follows_depth() {
        let k = SimplicialGSet::reflection_circle().cochains();
        let lc = l_cochain(&k, &FreeResolution::periodic(2, 5), 4).unwrap();
        assert!(lc.certified(2));
        assert!(!lc.certified(3));
        assert_eq!(default_depth(k.complex(), 8), 11);
    }
}
