//! Filtered complexes and their spectral sequences.
//!
//! The engine works on cochain complexes with a decreasing filtration `F^p`.
//! A chain complex with an increasing filtration `F_p` is handled through its
//! mirror: degree `k` becomes `−k` and `F_p` becomes `F^{−p}`, so the
//! homological entry `E^r_{s,t}` is the cochain entry `E_r^{−s,−t}`. Public
//! accessors always take indices in the native convention of the input.

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, TensorLayout, Variance};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVec, Subquotient, Subspace};
use crate::par;

/// A cochain complex with a bounded decreasing filtration.
///
/// `F^p = K` for `p < p_min`, `F^p = 0` for `p > p_max`, and the stored
/// levels cover `p_min..=p_max` with `F^{p_min} = K` after normalization.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredComplex {
    complex: Complex,
    p_min: i64,
    levels: Vec<Vec<Subspace>>,
    full: Vec<Subspace>,
    zero: Vec<Subspace>,
    empty: Subspace,
}

fn all_full(level: &[Subspace]) -> bool {
    level.iter().all(Subspace::is_full)
}

fn all_zero(level: &[Subspace]) -> bool {
    level.iter().all(Subspace::is_zero)
}

impl FilteredComplex {
    /// `levels[i][n − lo]` is `F^{p_min+i} K^n`.
    pub fn new(complex: Complex, p_min: i64, levels: Vec<Vec<Subspace>>) -> Result<Self> {
        if complex.variance() != Variance::Cochain {
            return Err(Error::Variance("a decreasing filtration needs a cochain complex".into()));
        }
        let degrees: Vec<i64> = complex.degrees().collect();
        let full: Vec<Subspace> = degrees.iter().map(|&n| Subspace::full(complex.dim(n))).collect();
        let zero: Vec<Subspace> = degrees.iter().map(|&n| Subspace::zero(complex.dim(n))).collect();
        for (i, level) in levels.iter().enumerate() {
            if level.len() != degrees.len() {
                return Err(Error::InvalidFiltration(format!("level {} lists {} degrees, expected {}", p_min + i as i64, level.len(), degrees.len())));
            }
            for (s, &n) in level.iter().zip(&degrees) {
                if s.ambient() != complex.dim(n) {
                    return Err(Error::Dimension(format!("level {} in degree {n} lives in the wrong space", p_min + i as i64)));
                }
            }
        }
        let mut p_min = p_min;
        let mut levels = levels;
        if levels.first().map_or(true, |l| !all_full(l)) {
            levels.insert(0, full.clone());
            p_min -= 1;
        }
        while levels.len() > 1 && all_zero(levels.last().unwrap()) {
            levels.pop();
        }
        while levels.len() > 1 && all_full(&levels[1]) {
            levels.remove(0);
            p_min += 1;
        }
        let f = FilteredComplex { complex, p_min, levels, full, zero, empty: Subspace::zero(0) };
        f.check()?;
        Ok(f)
    }

    /// Levels from a closure, for `p_min ≤ p ≤ p_max`.
    pub fn from_fn(complex: Complex, p_min: i64, p_max: i64, level: impl Fn(i64, i64) -> Subspace) -> Result<Self> {
        let levels = (p_min..=p_max).map(|p| complex.degrees().map(|n| level(p, n)).collect()).collect();
        Self::new(complex, p_min, levels)
    }

    /// The filtration with a single jump: `F^0 = K`, `F^1 = 0`.
    pub fn trivial(complex: Complex) -> Result<Self> {
        Self::from_fn(complex.clone(), 0, 0, |_, n| Subspace::full(complex.dim(n)))
    }

    fn check(&self) -> Result<()> {
        for p in self.p_min..=self.p_max() {
            for n in self.complex.degrees() {
                let here = self.level(p, n);
                if !self.level(p + 1, n).is_subspace_of(here) {
                    return Err(Error::InvalidFiltration(format!("F^{} ⊄ F^{p} in degree {n}", p + 1)));
                }
                if let Some(d) = self.complex.differential_ref(n) {
                    if !here.map(d).is_subspace_of(self.level(p, n + 1)) {
                        return Err(Error::InvalidFiltration(format!("d does not preserve F^{p} in degree {n}")));
                    }
                }
            }
        }
        Ok(())
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn p_min(&self) -> i64 {
        self.p_min
    }

    pub fn p_max(&self) -> i64 {
        self.p_min + self.levels.len() as i64 - 1
    }

    /// Number of nontrivial steps, `p_max − p_min`.
    pub fn width(&self) -> usize {
        self.levels.len() - 1
    }

    /// `F^p K^n`.
    pub fn level(&self, p: i64, n: i64) -> &Subspace {
        if n < self.complex.lo() || n > self.complex.hi() {
            return &self.empty;
        }
        let i = (n - self.complex.lo()) as usize;
        if p < self.p_min {
            &self.full[i]
        } else if p > self.p_max() {
            &self.zero[i]
        } else {
            &self.levels[(p - self.p_min) as usize][i]
        }
    }

    /// `dim F^p K^n / F^{p+1} K^n`.
    pub fn graded_dim(&self, p: i64, n: i64) -> usize {
        self.level(p, n).dim() - self.level(p + 1, n).dim()
    }
}

/// A chain complex with a bounded increasing filtration, stored as its
/// mirror.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FilteredChainComplex {
    complex: Complex,
    mirror: FilteredComplex,
}

impl FilteredChainComplex {
    /// `F_p C_k = level(p, k)` for `p_min ≤ p ≤ p_max`; zero below, everything above.
    pub fn from_fn(complex: Complex, p_min: i64, p_max: i64, level: impl Fn(i64, i64) -> Subspace) -> Result<Self> {
        if complex.variance() != Variance::Chain {
            return Err(Error::Variance("an increasing filtration needs a chain complex".into()));
        }
        let mirror = FilteredComplex::from_fn(complex.mirror(), -p_max, -p_min, |p, n| level(-p, -n))?;
        Ok(FilteredChainComplex { complex, mirror })
    }

    pub fn from_mirror(mirror: FilteredComplex) -> Self {
        FilteredChainComplex { complex: mirror.complex().mirror(), mirror }
    }

    pub fn trivial(complex: Complex) -> Result<Self> {
        Self::from_fn(complex.clone(), 0, 0, |_, k| Subspace::full(complex.dim(k)))
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn mirror(&self) -> &FilteredComplex {
        &self.mirror
    }

    pub fn p_min(&self) -> i64 {
        -self.mirror.p_max()
    }

    pub fn p_max(&self) -> i64 {
        -self.mirror.p_min()
    }

    /// `F_p C_k`.
    pub fn level(&self, p: i64, k: i64) -> &Subspace {
        self.mirror.level(-p, -k)
    }

    /// `dim F_p C_k / F_{p−1} C_k`.
    pub fn graded_dim(&self, p: i64, k: i64) -> usize {
        self.level(p, k).dim() - self.level(p - 1, k).dim()
    }
}

/// Anything the engine can run on.
pub trait Filtered {
    fn cochain_form(&self) -> &FilteredComplex;
    fn variance(&self) -> Variance;
}

impl Filtered for FilteredComplex {
    fn cochain_form(&self) -> &FilteredComplex {
        self
    }
    fn variance(&self) -> Variance {
        Variance::Cochain
    }
}

impl Filtered for FilteredChainComplex {
    fn cochain_form(&self) -> &FilteredComplex {
        &self.mirror
    }
    fn variance(&self) -> Variance {
        Variance::Chain
    }
}

/// Truncation filtration on a cochain complex:
/// `F^p K^n = K^n` for `n < −p`, `Z^n` for `n = −p`, `0` for `n > −p`.
///
/// Each graded piece `F^{−k}/F^{−k+1}` is `K^{k−1}/Z^{k−1} → Z^k`, with
/// cohomology `H^k` in degree `k`, so the sequence degenerates at `E_1`
/// with `E_1^{−k,2k} = H^k`.
pub fn canonical_filtration(c: &Complex) -> Result<FilteredComplex> {
    FilteredComplex::from_fn(c.clone(), -c.hi(), -c.lo(), |p, n| {
        if n < -p {
            Subspace::full(c.dim(n))
        } else if n == -p {
            c.cycles(n)
        } else {
            Subspace::zero(c.dim(n))
        }
    })
}

/// Truncation filtration on a chain complex:
/// `F_p C_k = 0` for `p < −k`, `Z_k` for `p = −k`, `C_k` for `p > −k`.
pub fn canonical_filtration_chain(c: &Complex) -> Result<FilteredChainComplex> {
    FilteredChainComplex::from_fn(c.clone(), -c.hi(), -c.lo(), |p, k| {
        if p < -k {
            Subspace::zero(c.dim(k))
        } else if p == -k {
            c.cycles(k)
        } else {
            Subspace::full(c.dim(k))
        }
    })
}

/// Annihilator filtration `G^p C^q = {φ : φ = 0 on F_{p−1} C_q}` on the dual.
pub fn dual_filtration(f: &FilteredChainComplex) -> Result<FilteredComplex> {
    let dual = f.complex().dual();
    FilteredComplex::from_fn(dual, f.p_min() + 1, f.p_max() + 1, |p, q| f.level(p - 1, q).annihilator())
}

fn tensor_level(
    layout: &TensorLayout,
    n: i64,
    l: i64,
    a_range: (i64, i64),
    la: &dyn Fn(i64, i64) -> Subspace,
    lb: &dyn Fn(i64, i64) -> Subspace,
) -> Subspace {
    let total = layout.space().dim(n);
    let mut rows = BitMatrix::zeros(0, total);
    for (i, j, off) in layout.blocks(n) {
        for s in a_range.0..=a_range.1 {
            let (x, y) = (la(s, i), lb(l - s, j));
            if x.is_zero() || y.is_zero() {
                continue;
            }
            let kr = x.basis().kron(y.basis());
            let mut m = BitMatrix::zeros(kr.rows(), total);
            m.xor_block(0, off, &kr);
            rows = rows.vstack(&m);
        }
    }
    Subspace::from_rows(total, &rows)
}

/// `(A⊗B)^l = Σ_{s+t=l} F^s A ⊗ F^t B`, degreewise.
pub fn tensor_filtered(a: &FilteredComplex, b: &FilteredComplex) -> Result<FilteredComplex> {
    let complex = a.complex().tensor(b.complex())?;
    let layout = TensorLayout::new(a.complex().spaces(), b.complex().spaces());
    let la = |p: i64, n: i64| a.level(p, n).clone();
    let lb = |p: i64, n: i64| b.level(p, n).clone();
    let range = (a.p_min(), a.p_max());
    FilteredComplex::from_fn(complex, a.p_min() + b.p_min(), a.p_max() + b.p_max(), |l, n| {
        tensor_level(&layout, n, l, range, &la, &lb)
    })
}

/// `(A⊗B)_l = Σ_{s+t=l} F_s A ⊗ F_t B`, degreewise.
pub fn tensor_filtered_chain(a: &FilteredChainComplex, b: &FilteredChainComplex) -> Result<FilteredChainComplex> {
    let complex = a.complex().tensor(b.complex())?;
    let layout = TensorLayout::new(a.complex().spaces(), b.complex().spaces());
    let la = |p: i64, k: i64| a.level(p, k).clone();
    let lb = |p: i64, k: i64| b.level(p, k).clone();
    let range = (a.p_min(), a.p_max());
    FilteredChainComplex::from_fn(complex, a.p_min() + b.p_min(), a.p_max() + b.p_max(), |l, k| {
        tensor_level(&layout, k, l, range, &la, &lb)
    })
}

/// `{x ∈ v : x·d ∈ w}`, computed in the coordinates of `v`'s basis.
fn restricted_preimage(v: &Subspace, d: &BitMatrix, w: &Subspace) -> Subspace {
    if v.is_zero() || w.is_full() {
        return v.clone();
    }
    let m = v.basis().mul(d).mul(&w.quotient_map());
    let k = gf2::kernel(&m);
    Subspace::from_rows(v.ambient(), &k.basis().mul(v.basis()))
}

#[derive(Clone, Debug)]
struct Page {
    /// Keyed by internal `(p, n)`.
    entries: BTreeMap<(i64, i64), Subquotient>,
    diffs: BTreeMap<(i64, i64), BitMatrix>,
}

/// The pages `E_r`, `0 ≤ r ≤ last_page()`, of a filtered complex.
///
/// The last page is stable, so it is also `E_∞`. Pages are computed from
/// `Z_r^p = Z_{r−1}^p ∩ d^{−1}F^{p+r}` and
/// `E_r^p = Z_r^p / (Z_{r−1}^{p+1} + d Z_{r−1}^{p−r+1})`.
#[derive(Clone, Debug)]
pub struct SpectralSequence {
    variance: Variance,
    p_range: (i64, i64),
    n_range: (i64, i64),
    requested: usize,
    pages: Vec<Page>,
    /// `(n, p) ↦ dim F^p H^n`, internal indices.
    abutment: BTreeMap<(i64, i64), usize>,
    homology: BTreeMap<i64, usize>,
}

/// Computes pages `0..=max(r_max, width + 1)`.
pub fn spectral_sequence<F: Filtered + ?Sized>(f: &F, r_max: usize) -> Result<SpectralSequence> {
    if r_max < 1 {
        return Err(Error::Argument("r_max must be at least 1".into()));
    }
    let fc = f.cochain_form();
    let k = fc.complex();
    let (p_min, p_max) = (fc.p_min(), fc.p_max());
    let (lo, hi) = (k.lo(), k.hi());
    let r_top = r_max.max(fc.width() + 1);
    let keys: Vec<(i64, i64)> = (p_min..=p_max).flat_map(|p| (lo..=hi).map(move |n| (p, n))).collect();
    let zero_d = |n: i64| BitMatrix::zeros(k.dim(n), k.dim(n + 1));
    let diff = |n: i64| k.differential_ref(n).cloned().unwrap_or_else(|| zero_d(n));
    let d_by_degree: BTreeMap<i64, BitMatrix> = (lo - 1..=hi).map(|n| (n, diff(n))).collect();

    let mut z_prev: BTreeMap<(i64, i64), Subspace> = keys.iter().map(|&(p, n)| ((p, n), fc.level(p, n).clone())).collect();
    let mut pages = Vec::with_capacity(r_top + 1);
    for r in 0..=r_top {
        let ri = r as i64;
        let z_cur: Vec<Subspace> = par::map_slice(&keys, |&(p, n)| {
            if r == 0 {
                z_prev[&(p, n)].clone()
            } else {
                restricted_preimage(&z_prev[&(p, n)], &d_by_degree[&n], fc.level(p + ri, n + 1))
            }
        });
        // Z_{r−1}^{p,n} for any p; below p_min it is d^{−1} F^{p+r−1}.
        let z_prev_at = |p: i64, n: i64| -> Subspace {
            if n < lo || n > hi || p > p_max {
                Subspace::zero(k.dim(n))
            } else if p >= p_min {
                z_prev[&(p, n)].clone()
            } else if r == 0 {
                Subspace::full(k.dim(n))
            } else {
                restricted_preimage(&Subspace::full(k.dim(n)), &d_by_degree[&n], fc.level(p + ri - 1, n + 1))
            }
        };
        let entries: Vec<Result<Subquotient>> = par::map_range(keys.len(), |i| {
            let (p, n) = keys[i];
            let mut b = z_prev_at(p + 1, n);
            if n > lo {
                let src = z_prev_at(p - ri + 1, n - 1);
                if !src.is_zero() {
                    b = b.sum(&src.map(&d_by_degree[&(n - 1)]));
                }
            }
            Subquotient::new(&z_cur[i], &b).map_err(|_| Error::Inconsistent(format!("E_{r} denominator escapes at ({p}, {n})")))
        });
        let entries: BTreeMap<(i64, i64), Subquotient> =
            keys.iter().copied().zip(entries.into_iter().collect::<Result<Vec<_>>>()?).collect();
        let diffs: Vec<Result<BitMatrix>> = par::map_slice(&keys, |&(p, n)| {
            let sq = &entries[&(p, n)];
            let target = entries.get(&(p + ri, n + 1));
            let cols = target.map_or(0, Subquotient::dim);
            let mut rows = Vec::with_capacity(sq.dim());
            for i in 0..sq.dim() {
                let dx = d_by_degree[&n].apply(&sq.section().row(i));
                match target {
                    Some(t) => rows.push(t.project(&dx).ok_or_else(|| {
                        Error::Inconsistent(format!("d_{r} leaves Z_{r} at ({}, {})", p + ri, n + 1))
                    })?),
                    None => {
                        if !dx.is_zero() {
                            return Err(Error::Inconsistent(format!("d_{r} from ({p}, {n}) leaves the complex")));
                        }
                        rows.push(BitVec::zeros(0));
                    }
                }
            }
            Ok(BitMatrix::from_rows(cols, &rows))
        });
        let diffs = keys.iter().copied().zip(diffs.into_iter().collect::<Result<Vec<_>>>()?).collect();
        pages.push(Page { entries, diffs });
        z_prev = keys.iter().copied().zip(z_cur).collect();
    }

    let mut abutment = BTreeMap::new();
    let mut homology = BTreeMap::new();
    for n in lo..=hi {
        let b = k.boundaries(n);
        homology.insert(n, k.homology_dim(n));
        for p in p_min..=p_max {
            abutment.insert((n, p), z_prev[&(p, n)].sum(&b).dim() - b.dim());
        }
    }
    Ok(SpectralSequence {
        variance: f.variance(),
        p_range: (p_min, p_max),
        n_range: (lo, hi),
        requested: r_max,
        pages,
        abutment,
        homology,
    })
}

impl SpectralSequence {
    /// Native `(p, q)` to the engine's `(p, n)` on the cochain form.
    pub(crate) fn internal(&self, p: i64, q: i64) -> (i64, i64) {
        match self.variance {
            Variance::Cochain => (p, p + q),
            Variance::Chain => (-p, -(p + q)),
        }
    }

    pub(crate) fn native(&self, key: (i64, i64)) -> (i64, i64) {
        let (p, n) = key;
        match self.variance {
            Variance::Cochain => (p, n - p),
            Variance::Chain => (-p, p - n),
        }
    }

    fn page(&self, r: usize) -> &Page {
        &self.pages[r.min(self.pages.len() - 1)]
    }

    pub fn variance(&self) -> Variance {
        self.variance
    }

    /// Index of the last computed page; from here on the sequence is stable.
    pub fn last_page(&self) -> usize {
        self.pages.len() - 1
    }

    /// The `r_max` the sequence was requested with.
    pub fn requested_pages(&self) -> usize {
        self.requested
    }

    /// Filtration indices carrying entries, native convention.
    pub fn p_range(&self) -> (i64, i64) {
        match self.variance {
            Variance::Cochain => self.p_range,
            Variance::Chain => (-self.p_range.1, -self.p_range.0),
        }
    }

    /// Total degrees, native convention.
    pub fn degree_range(&self) -> (i64, i64) {
        match self.variance {
            Variance::Cochain => self.n_range,
            Variance::Chain => (-self.n_range.1, -self.n_range.0),
        }
    }

    /// Degree change `(Δp, Δq)` of `d_r`.
    pub fn differential_shift(&self, r: usize) -> (i64, i64) {
        let r = r as i64;
        match self.variance {
            Variance::Cochain => (r, 1 - r),
            Variance::Chain => (-r, r - 1),
        }
    }

    pub fn entry(&self, r: usize, p: i64, q: i64) -> Option<&Subquotient> {
        self.page(r).entries.get(&self.internal(p, q))
    }

    pub fn dim(&self, r: usize, p: i64, q: i64) -> usize {
        self.entry(r, p, q).map_or(0, Subquotient::dim)
    }

    pub fn infinity_dim(&self, p: i64, q: i64) -> usize {
        self.dim(self.last_page(), p, q)
    }

    /// Nonzero entries of `E_r` keyed by native `(p, q)`.
    pub fn entries(&self, r: usize) -> BTreeMap<(i64, i64), usize> {
        self.page(r)
            .entries
            .iter()
            .filter(|(_, sq)| sq.dim() > 0)
            .map(|(&key, sq)| (self.native(key), sq.dim()))
            .collect()
    }

    pub fn infinity_entries(&self) -> BTreeMap<(i64, i64), usize> {
        self.entries(self.last_page())
    }

    /// `d_r` leaving `(p, q)`, in the coordinates of the two entries.
    pub fn differential(&self, r: usize, p: i64, q: i64) -> Option<&BitMatrix> {
        if r > self.last_page() {
            return None;
        }
        self.pages[r].diffs.get(&self.internal(p, q))
    }

    pub fn differential_rank(&self, r: usize, p: i64, q: i64) -> usize {
        self.differential(r, p, q).map_or(0, BitMatrix::rank)
    }

    /// Nonzero ranks of `d_r`, keyed by the source entry.
    pub fn differential_ranks(&self, r: usize) -> BTreeMap<(i64, i64), usize> {
        if r > self.last_page() {
            return BTreeMap::new();
        }
        self.pages[r]
            .diffs
            .iter()
            .map(|(&key, d)| (self.native(key), d.rank()))
            .filter(|&(_, rk)| rk > 0)
            .collect()
    }

    /// Coordinates in `E_r^{p,q}` of a cochain `x`, or `None` when `x ∉ Z_r`.
    /// Entries outside the computed range are zero and yield an empty vector.
    pub fn project(&self, r: usize, p: i64, q: i64, x: &BitVec) -> Option<BitVec> {
        match self.entry(r, p, q) {
            Some(sq) => sq.project(x),
            None => Some(BitVec::zeros(0)),
        }
    }

    /// A representative of the class with coordinates `c` in `E_r^{p,q}`.
    pub fn lift(&self, r: usize, p: i64, q: i64, c: &BitVec) -> Option<BitVec> {
        self.entry(r, p, q).map(|sq| sq.lift(c))
    }

    /// `dim H^k` (or `H_k`) of the underlying complex.
    pub fn homology_dim(&self, k: i64) -> usize {
        let n = match self.variance {
            Variance::Cochain => k,
            Variance::Chain => -k,
        };
        self.homology.get(&n).copied().unwrap_or(0)
    }

    /// `dim F^p H^k` for a decreasing filtration, `dim F_p H_k` for an
    /// increasing one.
    pub fn abutment_dim(&self, k: i64, p: i64) -> usize {
        let (n, p) = match self.variance {
            Variance::Cochain => (k, p),
            Variance::Chain => (-k, -p),
        };
        if p < self.p_range.0 {
            self.homology.get(&n).copied().unwrap_or(0)
        } else {
            self.abutment.get(&(n, p)).copied().unwrap_or(0)
        }
    }

    /// Whether `d_s = 0` for every `s ≥ r`.
    pub fn degenerates_at(&self, r: usize) -> bool {
        (r..=self.last_page()).all(|s| self.pages[s].diffs.values().all(BitMatrix::is_zero))
    }

    /// Checks `d_r∘d_r = 0`, `E_{r+1} = H(E_r, d_r)` dimensionwise, that the
    /// last page is stable, and that `E_∞` sums to the abutment.
    pub fn verify(&self) -> Result<()> {
        for (r, page) in self.pages.iter().enumerate() {
            let ri = r as i64;
            for (&(p, n), d) in &page.diffs {
                if let Some(next) = page.diffs.get(&(p + ri, n + 1)) {
                    if !d.mul(next).is_zero() {
                        return Err(Error::Inconsistent(format!("d_{r}∘d_{r} ≠ 0 at ({p}, {n})")));
                    }
                }
                let out = d.rank();
                let inc = page.diffs.get(&(p - ri, n - 1)).map_or(0, BitMatrix::rank);
                let here = page.entries[&(p, n)].dim();
                let next = match self.pages.get(r + 1) {
                    Some(np) => np.entries[&(p, n)].dim(),
                    None => {
                        if out != 0 {
                            return Err(Error::Inconsistent(format!("last page has d_{r} ≠ 0 at ({p}, {n})")));
                        }
                        continue;
                    }
                };
                if next + out + inc != here {
                    return Err(Error::Inconsistent(format!("E_{} ≠ H(E_{r}) at ({p}, {n})", r + 1)));
                }
            }
        }
        let last = self.pages.last().expect("at least one page");
        for n in self.n_range.0..=self.n_range.1 {
            let mut total = 0;
            for p in self.p_range.0..=self.p_range.1 {
                let e = last.entries[&(p, n)].dim();
                total += e;
                let below = self.abutment.get(&(n, p + 1)).copied().unwrap_or(0);
                if self.abutment[&(n, p)] != e + below {
                    return Err(Error::Inconsistent(format!("F^{p}H^{n}/F^{} ≠ E_∞", p + 1)));
                }
            }
            if total != self.homology[&n] || self.abutment.get(&(n, self.p_range.0)).copied().unwrap_or(0) != total {
                return Err(Error::Inconsistent(format!("E_∞ in degree {n} does not sum to H^{n}")));
            }
        }
        Ok(())
    }

    /// The relabeling `Ẽ_r^{p,q} = E_{r−1}^{−q, p+2q}`.
    pub fn weight_view(&self) -> WeightView<'_> {
        WeightView { ss: self }
    }
}

/// The equivariant-weight indexing of a spectral sequence; pure relabeling.
#[derive(Clone, Copy, Debug)]
pub struct WeightView<'a> {
    ss: &'a SpectralSequence,
}

impl<'a> WeightView<'a> {
    pub fn inner(&self) -> &'a SpectralSequence {
        self.ss
    }

    /// The original index `(−q, p+2q)` behind `Ẽ^{p,q}`.
    pub fn source_index(p: i64, q: i64) -> (i64, i64) {
        (-q, p + 2 * q)
    }

    fn relabel(key: (i64, i64)) -> (i64, i64) {
        let (a, b) = key;
        (b + 2 * a, -a)
    }

    /// `dim Ẽ_r^{p,q}` for `r ≥ 1`.
    pub fn dim(&self, r: usize, p: i64, q: i64) -> usize {
        assert!(r >= 1, "the reindexed sequence starts at page 1");
        let (a, b) = Self::source_index(p, q);
        self.ss.dim(r - 1, a, b)
    }

    pub fn infinity_dim(&self, p: i64, q: i64) -> usize {
        let (a, b) = Self::source_index(p, q);
        self.ss.infinity_dim(a, b)
    }

    pub fn entries(&self, r: usize) -> BTreeMap<(i64, i64), usize> {
        assert!(r >= 1, "the reindexed sequence starts at page 1");
        self.ss.entries(r - 1).into_iter().map(|(k, v)| (Self::relabel(k), v)).collect()
    }

    pub fn infinity_entries(&self) -> BTreeMap<(i64, i64), usize> {
        self.ss.infinity_entries().into_iter().map(|(k, v)| (Self::relabel(k), v)).collect()
    }

    pub fn differential_ranks(&self, r: usize) -> BTreeMap<(i64, i64), usize> {
        assert!(r >= 1, "the reindexed sequence starts at page 1");
        self.ss.differential_ranks(r - 1).into_iter().map(|(k, v)| (Self::relabel(k), v)).collect()
    }

    /// `dim Ω^l H^k`, the abutment filtration at index `l`.
    pub fn omega_dim(&self, k: i64, l: i64) -> usize {
        self.ss.abutment_dim(k, l)
    }
}

/// A map of complexes respecting decreasing filtrations.
#[derive(Clone, Debug)]
pub struct FilteredMap {
    variance: Variance,
    source: FilteredComplex,
    target: FilteredComplex,
    map: ComplexMap,
}

impl FilteredMap {
    pub fn new(source: &FilteredComplex, target: &FilteredComplex, map: &ComplexMap) -> Result<Self> {
        Self::build(Variance::Cochain, source, target, map.clone())
    }

    /// A map of increasing filtrations, `F_p → F_p`.
    pub fn chain(source: &FilteredChainComplex, target: &FilteredChainComplex, map: &ComplexMap) -> Result<Self> {
        Self::build(Variance::Chain, source.mirror(), target.mirror(), map.mirror())
    }

    fn build(variance: Variance, source: &FilteredComplex, target: &FilteredComplex, map: ComplexMap) -> Result<Self> {
        if map.source() != source.complex() || map.target() != target.complex() {
            return Err(Error::Dimension("map does not connect the filtered complexes".into()));
        }
        let lo = source.p_min().min(target.p_min());
        let hi = source.p_max().max(target.p_max());
        for p in lo..=hi {
            for n in source.complex().degrees() {
                let image = source.level(p, n).map(&map.matrix(n));
                if !image.is_subspace_of(target.level(p, n)) {
                    return Err(Error::InvalidFiltration(format!("map is not filtered at level {p}, degree {n}")));
                }
            }
        }
        Ok(FilteredMap { variance, source: source.clone(), target: target.clone(), map })
    }

    /// The induced maps on `E_r`, keyed by native `(p, q)`.
    pub fn induced(&self, src: &SpectralSequence, tgt: &SpectralSequence, r: usize) -> Result<BTreeMap<(i64, i64), BitMatrix>> {
        let mut out = BTreeMap::new();
        for (&(p, n), sq) in &src.page(r).entries {
            let target = tgt.page(r).entries.get(&(p, n));
            let cols = target.map_or(0, Subquotient::dim);
            let mut rows = Vec::new();
            for i in 0..sq.dim() {
                let y = self.map.matrix(n).apply(&sq.section().row(i));
                rows.push(match target {
                    Some(t) => t.project(&y).ok_or_else(|| Error::Inconsistent(format!("image leaves Z_{r} at ({p}, {n})")))?,
                    None => BitVec::zeros(0),
                });
            }
            out.insert(src.native((p, n)), BitMatrix::from_rows(cols, &rows));
        }
        Ok(out)
    }

    /// Whether every induced map on `E_1` is bijective.
    pub fn is_filtered_qis(&self) -> Result<bool> {
        let src = spectral_sequence(&Tagged(&self.source, self.variance), 1)?;
        let tgt = spectral_sequence(&Tagged(&self.target, self.variance), 1)?;
        if src.entries(1) != tgt.entries(1) {
            return Ok(false);
        }
        Ok(self.induced(&src, &tgt, 1)?.values().all(|m| m.rows() == m.cols() && m.rank() == m.rows()))
    }
}

struct Tagged<'a>(&'a FilteredComplex, Variance);

impl Filtered for Tagged<'_> {
    fn cochain_form(&self) -> &FilteredComplex {
        self.0
    }
    fn variance(&self) -> Variance {
        self.1
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::complex::tests::circle_chains;

    #[test]
    fn trivial_filtration_has_one_column() {
        let k = circle_chains().dual();
        let f = FilteredComplex::trivial(k).unwrap();
        let ss = spectral_sequence(&f, 3).unwrap();
        ss.verify().unwrap();
        assert_eq!(ss.entries(1), BTreeMap::from([((0, 0), 1), ((0, 1), 1)]));
        assert!(ss.degenerates_at(1));
    }

    #[test]
    fn canonical_filtration_degenerates_on_cohomology() {
        let k = circle_chains().dual();
        let ss = spectral_sequence(&canonical_filtration(&k).unwrap(), 2).unwrap();
        ss.verify().unwrap();
        assert_eq!(ss.entries(1), BTreeMap::from([((0, 0), 1), ((-1, 2), 1)]));
        assert!(ss.degenerates_at(1));
    }

    #[test]
    fn two_step_filtration_with_nonzero_d1() {
        // 0 → GF(2) → GF(2) → 0 split across two filtration levels.
        let k = Complex::cochain(0, vec![1, 1], vec![BitMatrix::identity(1), BitMatrix::zeros(1, 0)]).unwrap();
        let f = FilteredComplex::from_fn(k.clone(), 0, 1, |p, n| {
            if p == 0 || n == 1 {
                Subspace::full(1)
            } else {
                Subspace::zero(1)
            }
        })
        .unwrap();
        let ss = spectral_sequence(&f, 2).unwrap();
        ss.verify().unwrap();
        assert_eq!(ss.entries(1), BTreeMap::from([((0, 0), 1), ((1, 0), 1)]));
        assert_eq!(ss.differential_rank(1, 0, 0), 1);
        assert!(ss.entries(2).is_empty());
    }

    #[test]
    fn chain_canonical_matches_homology() {
        let c = circle_chains();
        let ss = spectral_sequence(&canonical_filtration_chain(&c).unwrap(), 2).unwrap();
        ss.verify().unwrap();
        assert_eq!(ss.entries(1), BTreeMap::from([((0, 0), 1), ((-1, 2), 1)]));
        assert_eq!(ss.homology_dim(1), 1);
        assert_eq!(ss.abutment_dim(1, -1), 1);
        assert_eq!(ss.abutment_dim(1, -2), 0);
    }

    #[test]
    fn reindexing_is_a_relabeling() {
        assert_eq!(WeightView::source_index(0, 0), (0, 0));
        assert_eq!(WeightView::source_index(0, 1), (-1, 2));
        for (p, q) in [(3, -2), (-1, 4), (2, 2)] {
            let (a, b) = WeightView::source_index(p, q);
            assert_eq!(a + b, p + q);
            assert_eq!(WeightView::relabel((a, b)), (p, q));
        }
    }

    #[test]
    fn canonical_includes_into_dual_of_canonical() {
        let c = circle_chains();
        let can = canonical_filtration(&c.dual()).unwrap();
        let dual = dual_filtration(&canonical_filtration_chain(&c).unwrap()).unwrap();
        let id = ComplexMap::identity(can.complex());
        let f = FilteredMap::new(&can, &dual, &id).unwrap();
        assert!(f.is_filtered_qis().unwrap());
    }

    #[test]
    fn rejects_unfiltered_map() {
        let c = circle_chains().dual();
        let can = canonical_filtration(&c).unwrap();
        let triv = FilteredComplex::trivial(c.clone()).unwrap();
        let id = ComplexMap::identity(&c);
        assert!(FilteredMap::new(&triv, &can, &id).is_err());
    }
}
