//! Cross, cup and cap products, on chains, on L-complexes and on pages.
//!
//! Products of spaces use the Eilenberg–Zilber model: chains on `X × Y` are
//! `C(X) ⊗ C(Y)`, so the cross product of chains is the identity and the
//! diagonal is the Alexander–Whitney map. Cup and cap are then ordinary
//! pairings of coefficient complexes, [`Bilinear`].
//!
//! A G-equivariant pairing `m : A ⊗ B → T` induces `L(A) ⊗ L(B) → L(T)`
//! through a lift `τ : F → F ⊗ F` of the diagonal `G → G × G`: if
//! `τ(e_k) = Σ (g, g')·(e_j ⊗ e'_j')`, then
//! `(f·f')(e_k) = Σ m(f(e_j)·g ⊗ f'(e'_j')·g')`. This is the composite of
//! the cross product `L_G(A) ⊗ L_G(B) → L_{G×G}(A ⊗ B)`, restriction along
//! `τ` and post-composition with `m`, evaluated in one pass.
//!
//! Products of classes on a page are computed on representatives and
//! projected back. A product leaving `Z_r` is an error, never silently
//! truncated.

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, TensorLayout, Variance};
use crate::equivariant::{l_chain, l_cochain, postcompose, LComplex, LFiltration};
use crate::error::{Error, Result};
use crate::filtration::{
    canonical_filtration, canonical_filtration_chain, spectral_sequence, tensor_filtered, FilteredMap, SpectralSequence,
};
use crate::gf2::{BitMatrix, BitVec};
use crate::group::{check_equivariant, GComplex, GModule, GroupHom};
use crate::par;
use crate::resolution::{lift_chain_map, ChainLift, FreeResolution};
use crate::spaces::{EquivariantMap, SimplicialGSet};

/// A degree-additive bilinear map `A^a × B^b → T^{a+b}` of cochain complexes.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Bilinear {
    left: Complex,
    right: Complex,
    target: Complex,
    /// `(a, b)`: entry `x·dim B^b + y` is the image of `e_x ⊗ e_y`.
    tables: BTreeMap<(i64, i64), Vec<BitVec>>,
}

impl Bilinear {
    /// `f(a, x, b, y)` is the image of `e_x ⊗ e_y` for `e_x ∈ A^a`, `e_y ∈ B^b`.
    pub fn from_fn(left: &Complex, right: &Complex, target: &Complex, f: impl Fn(i64, usize, i64, usize) -> BitVec) -> Result<Self> {
        if left.variance() != right.variance() || left.variance() != target.variance() {
            return Err(Error::Variance("pairing between complexes of different variance".into()));
        }
        let mut tables = BTreeMap::new();
        for a in left.degrees() {
            for b in right.degrees() {
                let (da, db, dt) = (left.dim(a), right.dim(b), target.dim(a + b));
                if da * db == 0 || dt == 0 {
                    continue;
                }
                let mut rows = Vec::with_capacity(da * db);
                for x in 0..da {
                    for y in 0..db {
                        let v = f(a, x, b, y);
                        if v.len() != dt {
                            return Err(Error::Dimension(format!("pairing value in degree {} has length {}, expected {dt}", a + b, v.len())));
                        }
                        rows.push(v);
                    }
                }
                tables.insert((a, b), rows);
            }
        }
        Ok(Bilinear { left: left.clone(), right: right.clone(), target: target.clone(), tables })
    }

    pub fn left(&self) -> &Complex {
        &self.left
    }

    pub fn right(&self) -> &Complex {
        &self.right
    }

    pub fn target(&self) -> &Complex {
        &self.target
    }

    pub fn apply(&self, a: i64, u: &BitVec, b: i64, v: &BitVec) -> BitVec {
        let mut out = BitVec::zeros(self.target.dim(a + b));
        let Some(rows) = self.tables.get(&(a, b)) else { return out };
        let db = self.right.dim(b);
        for x in u.ones() {
            for y in v.ones() {
                out.xor_assign(&rows[x * db + y]);
            }
        }
        out
    }

    /// The linear map `A ⊗ B → T`, checked to be a chain map.
    pub fn as_map(&self) -> Result<ComplexMap> {
        let tensor = self.left.tensor(&self.right)?;
        let layout = TensorLayout::new(self.left.spaces(), self.right.spaces());
        let mut maps = BTreeMap::new();
        for n in tensor.degrees() {
            let mut m = BitMatrix::zeros(tensor.dim(n), self.target.dim(n));
            for (a, b, off) in layout.blocks(n) {
                if let Some(rows) = self.tables.get(&(a, b)) {
                    for (i, v) in rows.iter().enumerate() {
                        m.xor_row(off + i, v);
                    }
                }
            }
            maps.insert(n, m);
        }
        ComplexMap::new(&tensor, &self.target, maps)
    }

    /// Whether `m(u·g ⊗ v·g) = m(u ⊗ v)·g` on basis vectors for every `g`.
    pub fn is_equivariant(&self, left: &GComplex, right: &GComplex, target: &GComplex) -> Result<bool> {
        if left.complex() != &self.left || right.complex() != &self.right || target.complex() != &self.target {
            return Err(Error::Dimension("G-complexes do not match the pairing".into()));
        }
        if left.group() != right.group() || left.group() != target.group() {
            return Err(Error::GroupMismatch("diagonal pairing over different groups".into()));
        }
        for (&(a, b), rows) in &self.tables {
            let db = self.right.dim(b);
            for g in left.group().elements() {
                let (ga, gb, gt) = (left.action(g, a), right.action(g, b), target.action(g, a + b));
                for (i, v) in rows.iter().enumerate() {
                    let moved = self.apply(a, &ga.row(i / db), b, &gb.row(i % db));
                    if moved != gt.apply(v) {
                        return Ok(false);
                    }
                }
            }
        }
        Ok(true)
    }
}

/// `(φ ⌣ ψ)(σ) = φ(front_a σ)·ψ(back_b σ)` on the cochains of `x`.
pub fn alexander_whitney_cup(x: &SimplicialGSet) -> Bilinear {
    let k = x.cochains().complex().clone();
    let d = x.dim() as i64;
    let mut tables: BTreeMap<(i64, i64), Vec<BitVec>> = BTreeMap::new();
    for a in 0..=d {
        for b in 0..=(d - a) {
            let n = (a + b) as usize;
            let db = x.count(b as usize);
            let mut rows = vec![BitVec::zeros(x.count(n)); x.count(a as usize) * db];
            for s in 0..x.count(n) {
                rows[x.front(n, s, a as usize) * db + x.back(n, s, b as usize)].flip(s);
            }
            tables.insert((a, b), rows);
        }
    }
    Bilinear { left: k.clone(), right: k.clone(), target: k, tables }
}

/// `φ ⌢ σ = φ(back_a σ)·front_{k−a} σ`, as a pairing `C^* ⊗ C' → C'` with
/// `C'` the chains in the mirrored cochain grading.
pub fn cap_pairing(x: &SimplicialGSet) -> Bilinear {
    let k = x.cochains().complex().clone();
    let c = x.chains().complex().mirror();
    let d = x.dim();
    let mut tables: BTreeMap<(i64, i64), Vec<BitVec>> = BTreeMap::new();
    for a in 0..=d {
        for n in a..=d {
            let dn = x.count(n);
            let mut rows = vec![BitVec::zeros(x.count(n - a)); x.count(a) * dn];
            for s in 0..dn {
                rows[x.back(n, s, a) * dn + s].flip(x.front(n, s, n - a));
            }
            tables.insert((a as i64, -(n as i64)), rows);
        }
    }
    Bilinear { left: k, right: c.clone(), target: c, tables }
}

/// The Alexander–Whitney diagonal `C(X) → C(X) ⊗ C(X)`.
pub fn alexander_whitney_diagonal(x: &SimplicialGSet) -> Result<ComplexMap> {
    let c = x.chains().complex().clone();
    let cc = c.tensor(&c)?;
    let layout = TensorLayout::new(c.spaces(), c.spaces());
    let mut maps = BTreeMap::new();
    for n in c.degrees() {
        let nu = n as usize;
        let mut m = BitMatrix::zeros(c.dim(n), cc.dim(n));
        for s in 0..c.dim(n) {
            for i in 0..=nu {
                let off = layout.offset(i as i64, (nu - i) as i64).expect("block of the diagonal");
                m.flip(s, off + x.front(nu, s, i) * x.count(nu - i) + x.back(nu, s, nu - i));
            }
        }
        maps.insert(n, m);
    }
    ComplexMap::new(&c, &cc, maps)
}

/// `h : φ ⊗ (a ⊗ b) ↦ φ(a)·b`, from `C^* ⊗ (C ⊗ C)'` to `C'` (mirrored chains).
pub fn evaluation_pairing(x: &SimplicialGSet) -> Result<Bilinear> {
    let k = x.cochains().complex().clone();
    let c = x.chains().complex().clone();
    let cc = c.tensor(&c)?;
    let layout = TensorLayout::new(c.spaces(), c.spaces());
    Bilinear::from_fn(&k, &cc.mirror(), &c.mirror(), |a, s, m, z| {
        let n = -m;
        let mut out = BitVec::zeros(c.dim(n - a));
        if let Some(off) = layout.offset(a, n - a) {
            let db = c.dim(n - a);
            if z >= off && z < off + c.dim(a) * db && (z - off) / db == s {
                out.flip((z - off) % db);
            }
        }
        out
    })
}

/// The four chain-level maps behind the products, for spaces `x` and `y`:
/// the cross product `u`, the dual pairing `w`, the diagonal `aw` of `x`
/// and the evaluation `h` of `x`.
#[derive(Clone, Debug)]
pub struct PairingData {
    pub u: ComplexMap,
    pub w: ComplexMap,
    pub aw: ComplexMap,
    pub h: ComplexMap,
    /// G-complexes carrying the actions, as `(source, target)` for each map.
    actions: [(GComplex, GComplex); 4],
}

/// Outcome of the checks on one map of [`PairingData`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairingCheck {
    pub name: &'static str,
    pub chain_map: bool,
    pub equivariant: bool,
}

impl PairingData {
    pub fn new(x: &SimplicialGSet, y: &SimplicialGSet) -> Result<Self> {
        let (cx, cy) = (x.chains(), y.chains());
        let (kx, ky) = (x.cochains(), y.cochains());
        let cxy = cx.tensor_external(&cy)?;
        let u = ComplexMap::identity(cxy.complex());
        let kxy = kx.tensor_external(&ky)?;
        let dual = cxy.dual();
        let maps = kxy.complex().degrees().map(|n| (n, BitMatrix::identity(kxy.complex().dim(n)))).collect();
        let w = ComplexMap::new_unchecked(kxy.complex(), dual.complex(), maps)?;
        let aw = alexander_whitney_diagonal(x)?;
        let cxx = cx.tensor_diagonal(&cx)?;
        let h = evaluation_pairing(x)?.as_map()?;
        let hsrc = kx.tensor_diagonal(&cxx.mirror())?;
        let actions = [(cxy.clone(), cxy), (kxy, dual), (cx.clone(), cxx), (hsrc, cx.mirror())];
        Ok(PairingData { u, w, aw, h, actions })
    }

    pub fn check(&self) -> Result<Vec<PairingCheck>> {
        let maps = [("u", &self.u), ("w", &self.w), ("aw", &self.aw), ("h", &self.h)];
        maps.iter()
            .zip(&self.actions)
            .map(|((name, f), (s, t))| {
                Ok(PairingCheck { name, chain_map: f.is_chain_map(), equivariant: check_equivariant(f, s, t)? })
            })
            .collect()
    }
}

/// `Hom_G(B, A) ⊗ Hom_{G'}(B', A') → Hom_{G×G'}(B ⊗ B', A ⊗ A')` for free
/// `B`, `B'` of ranks `r`, `r2`, in generator coordinates: the matrix of
/// `f ⊗ f' ↦ (e_j ⊗ e'_j' ↦ f(e_j) ⊗ f'(e'_j'))`.
pub fn hom_tensor_iso(r: usize, a: &GModule, r2: usize, a2: &GModule) -> BitMatrix {
    let (da, db) = (a.dim(), a2.dim());
    let n = r * da * r2 * db;
    BitMatrix::from_fn(n, n, |row, col| {
        let (x, y) = (row / (r2 * db), row % (r2 * db));
        let (j, i) = (x / da.max(1), x % da.max(1));
        let (jj, ii) = (y / db.max(1), y % db.max(1));
        col == (j * r2 + jj) * da * db + i * db + ii
    })
}

/// Generator offset of the pairs `(p, p')` inside degree `p + p'` of `F ⊗ F'`.
fn pair_offset(a: &FreeResolution, b: &FreeResolution, total: usize, p: usize) -> usize {
    (0..p).map(|s| a.rank(s) * b.rank(total - s)).sum()
}

fn slot(v: &BitVec, offset: usize, width: usize, j: usize) -> BitVec {
    v.slice(offset + j * width, width)
}

/// The cross product `ψ : L_G(A) ⊗ L_{G'}(B) → L_{G×G'}(A ⊗ B)` with the
/// tensor resolution on the target.
#[derive(Clone, Debug)]
pub struct CrossProduct {
    left: LComplex,
    right: LComplex,
    target: LComplex,
    layout: TensorLayout,
}

impl CrossProduct {
    pub fn new(left: &LComplex, right: &LComplex, target: &LComplex) -> Result<Self> {
        if left.variance() != Variance::Cochain || right.variance() != Variance::Cochain || target.variance() != Variance::Cochain {
            return Err(Error::Variance("cross product is built on cochain L-complexes".into()));
        }
        if *target.source() != left.source().tensor_external(right.source())? {
            return Err(Error::Argument("target coefficients are not the external tensor product".into()));
        }
        if *target.resolution() != FreeResolution::tensor(left.resolution(), right.resolution()) {
            return Err(Error::InvalidResolution("target must use the tensor resolution".into()));
        }
        let layout = TensorLayout::new(left.source().complex().spaces(), right.source().complex().spaces());
        Ok(CrossProduct { left: left.clone(), right: right.clone(), target: target.clone(), layout })
    }

    pub fn target(&self) -> &LComplex {
        &self.target
    }

    /// `ψ(x ⊗ y)` for `x ∈ L^n(A)`, `y ∈ L^m(B)`.
    pub fn apply(&self, n: i64, x: &BitVec, m: i64, y: &BitVec) -> BitVec {
        let (ra, rb) = (self.left.resolution(), self.right.resolution());
        let mut out = BitVec::zeros(self.target.total().dim(n + m));
        for bl in self.left.blocks(n) {
            for br in self.right.blocks(m) {
                let big_p = bl.p + br.p;
                let Some(t) = self.target.block(n + m, big_p) else { continue };
                let base = pair_offset(ra, rb, big_p, bl.p);
                for j in 0..bl.rank {
                    let u = slot(x, bl.offset, bl.width, j);
                    if u.is_zero() {
                        continue;
                    }
                    for jj in 0..br.rank {
                        let v = slot(y, br.offset, br.width, jj);
                        if v.is_zero() {
                            continue;
                        }
                        let gen = base + j * br.rank + jj;
                        out.xor_at(t.offset + gen * t.width, &self.layout.embed(bl.q, &u, br.q, &v));
                    }
                }
            }
        }
        out
    }

    /// `ψ` in total degree `n` as a matrix from `(L(A) ⊗ L(B))^n`, with the
    /// tensor complex of the two totals.
    pub fn matrix(&self, n: i64) -> Result<(Complex, BitMatrix)> {
        let (la, lb) = (self.left.total(), self.right.total());
        let tensor = la.tensor(lb)?;
        let layout = TensorLayout::new(la.spaces(), lb.spaces());
        let mut rows = Vec::with_capacity(tensor.dim(n));
        for (i, j, _) in layout.blocks(n) {
            for x in 0..la.dim(i) {
                for y in 0..lb.dim(j) {
                    rows.push(self.apply(i, &BitVec::unit(la.dim(i), x), j, &BitVec::unit(lb.dim(j), y)));
                }
            }
        }
        Ok((tensor.clone(), BitMatrix::from_rows(self.target.total().dim(n), &rows)))
    }

    /// Whether `ψ` is bijective in degree `n` and commutes with the
    /// differentials out of degree `n`.
    pub fn check_degree(&self, n: i64) -> Result<bool> {
        let (tensor, m) = self.matrix(n)?;
        let (_, m1) = self.matrix(n + 1)?;
        let bijective = m.rows() == m.cols() && m.rank() == m.rows();
        let commutes = tensor.differential(n).mul(&m1) == m.mul(&self.target.total().differential(n));
        Ok(bijective && commutes)
    }
}

/// A product `L(A) ⊗ L(B) → L(T)` induced by an equivariant pairing.
#[derive(Clone, Debug)]
pub struct LProduct {
    left: LComplex,
    right: LComplex,
    target: LComplex,
    pairing: Bilinear,
    tau: ChainLift,
    tensor: FreeResolution,
    left_act: BTreeMap<i64, Vec<BitMatrix>>,
    right_act: BTreeMap<i64, Vec<BitMatrix>>,
}

fn actions(k: &GComplex) -> BTreeMap<i64, Vec<BitMatrix>> {
    k.complex().degrees().map(|q| (q, k.group().elements().map(|g| k.action(g, q)).collect())).collect()
}

impl LProduct {
    /// All three L-complexes must use the same resolution.
    pub fn new(left: &LComplex, right: &LComplex, target: &LComplex, pairing: &Bilinear) -> Result<Self> {
        let res = left.resolution();
        if right.resolution() != res || target.resolution() != res {
            return Err(Error::InvalidResolution("product factors use different resolutions".into()));
        }
        if !pairing.is_equivariant(left.source(), right.source(), target.source())? {
            return Err(Error::NotEquivariant("coefficient pairing is not equivariant for the diagonal action".into()));
        }
        pairing.as_map()?;
        let tensor = FreeResolution::tensor(res, res);
        let tau = lift_chain_map(&GroupHom::diagonal(res.group()), res, &tensor)?;
        Ok(LProduct {
            left: left.clone(),
            right: right.clone(),
            target: target.clone(),
            pairing: pairing.clone(),
            tau,
            tensor,
            left_act: actions(left.source()),
            right_act: actions(right.source()),
        })
    }

    pub fn left(&self) -> &LComplex {
        &self.left
    }

    pub fn right(&self) -> &LComplex {
        &self.right
    }

    pub fn target(&self) -> &LComplex {
        &self.target
    }

    /// The lift of the diagonal used by the product.
    pub fn diagonal_lift(&self) -> &ChainLift {
        &self.tau
    }

    pub fn pairing(&self) -> &Bilinear {
        &self.pairing
    }

    /// `x·y` for `x ∈ L^n(A)`, `y ∈ L^m(B)`, internal degrees.
    pub fn apply(&self, n: i64, x: &BitVec, m: i64, y: &BitVec) -> BitVec {
        let res = self.left.resolution();
        let order = res.group().order();
        let mut out = BitVec::zeros(self.target.total().dim(n + m));
        for bl in self.left.blocks(n) {
            if x.slice(bl.offset, bl.dim()).is_zero() {
                continue;
            }
            let moved_left = self.moved(&self.left_act, x, bl.offset, bl.width, bl.rank, bl.q);
            for br in self.right.blocks(m) {
                if y.slice(br.offset, br.dim()).is_zero() {
                    continue;
                }
                let big_p = bl.p + br.p;
                let Some(t) = self.target.block(n + m, big_p) else { continue };
                if big_p > self.tau.depth() {
                    continue;
                }
                let moved_right = self.moved(&self.right_act, y, br.offset, br.width, br.rank, br.q);
                let base = pair_offset(res, res, big_p, bl.p);
                let span = bl.rank * br.rank;
                let images = self.tau.generator_images(big_p);
                for k in 0..images.rows() {
                    let mut acc = BitVec::zeros(t.width);
                    for idx in images.row(k).ones() {
                        let gen = idx / (order * order);
                        if gen < base || gen >= base + span {
                            continue;
                        }
                        let (j, jj) = ((gen - base) / br.rank, (gen - base) % br.rank);
                        let (g, h) = ((idx % (order * order)) / order, idx % order);
                        let (u, v) = (&moved_left[j][g], &moved_right[jj][h]);
                        if !u.is_zero() && !v.is_zero() {
                            acc.xor_assign(&self.pairing.apply(bl.q, u, br.q, v));
                        }
                    }
                    out.xor_at(t.offset + k * t.width, &acc);
                }
            }
        }
        out
    }

    /// `f(e_j)·g` for every generator `j` and element `g`.
    fn moved(&self, act: &BTreeMap<i64, Vec<BitMatrix>>, x: &BitVec, offset: usize, width: usize, rank: usize, q: i64) -> Vec<Vec<BitVec>> {
        (0..rank)
            .map(|j| {
                let f = slot(x, offset, width, j);
                act[&q].iter().map(|a| if f.is_zero() { f.clone() } else { a.apply(&f) }).collect()
            })
            .collect()
    }

    /// The product on cohomology of the totals, `H^n ⊗ H^m → H^{n+m}`, with
    /// row `i·dim H^m + j` the product of the `i`-th and `j`-th basis classes.
    pub fn on_cohomology(&self, n: i64, m: i64) -> Result<BitMatrix> {
        let (ha, hb) = (self.left.total().homology_quotient(n), self.right.total().homology_quotient(m));
        let ht = self.target.total().homology_quotient(n + m);
        let mut rows = Vec::with_capacity(ha.dim() * hb.dim());
        for i in 0..ha.dim() {
            for j in 0..hb.dim() {
                let z = self.apply(n, &ha.section().row(i), m, &hb.section().row(j));
                rows.push(ht.project(&z).ok_or_else(|| Error::Inconsistent(format!("product of cocycles in degrees {n}, {m} is not a cocycle")))?);
            }
        }
        Ok(BitMatrix::from_rows(ht.dim(), &rows))
    }

    /// The tensor resolution the diagonal is lifted into.
    pub fn tensor_resolution(&self) -> &FreeResolution {
        &self.tensor
    }
}

/// The product of [`LProduct`] read on the pages of filtered L-complexes.
#[derive(Clone, Copy, Debug)]
pub struct PageProduct<'a> {
    pub product: &'a LProduct,
    pub left: &'a SpectralSequence,
    pub right: &'a SpectralSequence,
    pub target: &'a SpectralSequence,
}

impl PageProduct<'_> {
    /// Native index of the entry receiving products from `a` and `b`.
    pub fn target_key(&self, a: (i64, i64), b: (i64, i64)) -> (i64, i64) {
        let (pa, na) = self.left.internal(a.0, a.1);
        let (pb, nb) = self.right.internal(b.0, b.1);
        self.target.native((pa + pb, na + nb))
    }

    /// Whether both factors and the product sit in certified degrees.
    pub fn certified(&self, a: (i64, i64), b: (i64, i64)) -> bool {
        let t = self.target_key(a, b);
        self.product.left.certified(a.0 + a.1) && self.product.right.certified(b.0 + b.1) && self.product.target.certified(t.0 + t.1)
    }

    /// Product of classes with coordinates `ca` in `E_r^a` and `cb` in `E_r^b`.
    pub fn multiply(&self, r: usize, a: (i64, i64), ca: &BitVec, b: (i64, i64), cb: &BitVec) -> Result<BitVec> {
        let t = self.target_key(a, b);
        let (Some(xa), Some(xb)) = (self.left.lift(r, a.0, a.1, ca), self.right.lift(r, b.0, b.1, cb)) else {
            return Ok(BitVec::zeros(self.target.dim(r, t.0, t.1)));
        };
        let (na, nb) = (self.left.internal(a.0, a.1).1, self.right.internal(b.0, b.1).1);
        let z = self.product.apply(na, &xa, nb, &xb);
        self.target
            .project(r, t.0, t.1, &z)
            .ok_or_else(|| Error::Inconsistent(format!("product of E_{r} classes at {a:?} and {b:?} leaves Z_{r} at {t:?}")))
    }

    /// Matrix of the product `E_r^a ⊗ E_r^b → E_r^t`, row `i·dim E^b + j`.
    pub fn table(&self, r: usize, a: (i64, i64), b: (i64, i64)) -> Result<BitMatrix> {
        let (da, db) = (self.left.dim(r, a.0, a.1), self.right.dim(r, b.0, b.1));
        let t = self.target_key(a, b);
        let mut rows = Vec::with_capacity(da * db);
        for i in 0..da {
            for j in 0..db {
                rows.push(self.multiply(r, a, &BitVec::unit(da, i), b, &BitVec::unit(db, j))?);
            }
        }
        Ok(BitMatrix::from_rows(self.target.dim(r, t.0, t.1), &rows))
    }
}

/// The class `1 ∈ L^0(C^*(X))`: every generator goes to the sum of the vertices.
pub fn unit_cochain(lc: &LComplex) -> Result<BitVec> {
    let b = lc.block(0, 0).ok_or_else(|| Error::Argument("L-complex has no degree-0 block".into()))?;
    let mut v = BitVec::zeros(lc.total().dim(0));
    let aug = lc.resolution().augmentation();
    for j in aug.ones() {
        v.xor_at(b.offset + j * b.width, &BitVec::from_ones(b.width, 0..b.width));
    }
    Ok(v)
}

/// Cochain and chain towers of a G-space with the canonical filtrations,
/// and the cup and cap products on them.
#[derive(Clone, Debug)]
pub struct SpaceTowers {
    pub space: SimplicialGSet,
    pub cochain: LComplex,
    pub chain: LComplex,
    pub cochain_filtration: LFiltration,
    pub chain_filtration: LFiltration,
    pub cohomology: SpectralSequence,
    pub homology: SpectralSequence,
    pub cup: LProduct,
    pub cap: LProduct,
}

impl SpaceTowers {
    pub fn new(x: &SimplicialGSet, res: &FreeResolution, window: i64, r_max: usize) -> Result<Self> {
        let (k, c) = (x.cochains(), x.chains());
        let cochain = l_cochain(&k, res, window)?;
        let chain = l_chain(&c, res, window)?;
        let cochain_filtration = cochain.induced(&canonical_filtration(k.complex())?)?;
        let chain_filtration = chain.induced_chain(&canonical_filtration_chain(c.complex())?)?;
        let (cohomology, homology) = par::join(
            || spectral_sequence(&cochain_filtration, r_max),
            || spectral_sequence(&chain_filtration, r_max),
        );
        let cup = LProduct::new(&cochain, &cochain, &cochain, &alexander_whitney_cup(x))?;
        let cap = LProduct::new(&cochain, &chain, &chain, &cap_pairing(x))?;
        Ok(SpaceTowers {
            space: x.clone(),
            cochain,
            chain,
            cochain_filtration,
            chain_filtration,
            cohomology: cohomology?,
            homology: homology?,
            cup,
            cap,
        })
    }

    pub fn cup_pages(&self) -> PageProduct<'_> {
        PageProduct { product: &self.cup, left: &self.cohomology, right: &self.cohomology, target: &self.cohomology }
    }

    pub fn cap_pages(&self) -> PageProduct<'_> {
        PageProduct { product: &self.cap, left: &self.cohomology, right: &self.homology, target: &self.homology }
    }

    /// Nonzero cohomology entries of `E_r` in certified degrees.
    pub fn cohomology_entries(&self, r: usize) -> Vec<((i64, i64), usize)> {
        self.cohomology.entries(r).into_iter().filter(|&((p, q), _)| self.cochain.certified(p + q)).collect()
    }

    pub fn homology_entries(&self, r: usize) -> Vec<((i64, i64), usize)> {
        self.homology.entries(r).into_iter().filter(|&((p, q), _)| self.chain.certified(p + q)).collect()
    }
}

/// The map a filtered L-map induces on the classes of page `r`.
fn class_map(map: &ComplexMap, src: &SpectralSequence, tgt: &SpectralSequence, r: usize, key: (i64, i64), c: &BitVec) -> Result<BitVec> {
    let Some(x) = src.lift(r, key.0, key.1, c) else {
        return Ok(BitVec::zeros(tgt.dim(r, key.0, key.1)));
    };
    let n = src.internal(key.0, key.1).1;
    tgt.project(r, key.0, key.1, &map.matrix(n).apply(&x))
        .ok_or_else(|| Error::Inconsistent(format!("induced map leaves Z_{r} at {key:?}")))
}

/// Towers of the source and target of an equivariant map, with `f^*` and
/// `f_*` on the L-complexes.
#[derive(Clone, Debug)]
pub struct MapTowers {
    pub source: SpaceTowers,
    pub target: SpaceTowers,
    /// `f^* : L(C^*(Y)) → L(C^*(X))`.
    pub pullback: ComplexMap,
    /// `f_* : L(C(X)) → L(C(Y))`.
    pub pushforward: ComplexMap,
}

impl MapTowers {
    pub fn new(f: &EquivariantMap, res: &FreeResolution, window: i64, r_max: usize) -> Result<Self> {
        let source = SpaceTowers::new(f.source(), res, window, r_max)?;
        let target = SpaceTowers::new(f.target(), res, window, r_max)?;
        let pullback = postcompose(&f.pullback(), &target.cochain, &source.cochain)?;
        let pushforward = postcompose(&f.pushforward().mirror(), &source.chain, &target.chain)?;
        FilteredMap::new(target.cochain_filtration.cochain_form(), source.cochain_filtration.cochain_form(), &pullback)?;
        FilteredMap::new(source.chain_filtration.cochain_form(), target.chain_filtration.cochain_form(), &pushforward)?;
        Ok(MapTowers { source, target, pullback, pushforward })
    }

    fn pull(&self, r: usize, key: (i64, i64), c: &BitVec) -> Result<BitVec> {
        class_map(&self.pullback, &self.target.cohomology, &self.source.cohomology, r, key, c)
    }

    fn push(&self, r: usize, key: (i64, i64), c: &BitVec) -> Result<BitVec> {
        class_map(&self.pushforward, &self.source.homology, &self.target.homology, r, key, c)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Identity {
    /// `a ⌣ b = b ⌣ a`.
    Commutativity,
    /// `(a ⌣ b) ⌣ c = a ⌣ (b ⌣ c)`.
    Associativity,
    /// `f^*(a ⌣ b) = f^*a ⌣ f^*b`.
    CupFunctoriality,
    /// `(f × 1)^*(a × b) = f^*a × b` for the cross product with a second space.
    CrossNaturality,
    /// `ψ(φ ⌢ c) = (ψ ⌣ φ)(c)` on the underlying space.
    Pairing,
    /// `(ψ ⌣ φ) ⌢ c = ψ ⌢ (φ ⌢ c)`.
    Mixed,
    /// `φ ⌢ f_*c = f_*(f^*φ ⌢ c)`.
    Projection,
}

impl Identity {
    pub const ALL: [Identity; 7] = [
        Identity::Commutativity,
        Identity::Associativity,
        Identity::CupFunctoriality,
        Identity::CrossNaturality,
        Identity::Pairing,
        Identity::Mixed,
        Identity::Projection,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Identity::Commutativity => "commutativity",
            Identity::Associativity => "associativity",
            Identity::CupFunctoriality => "cup_functoriality",
            Identity::CrossNaturality => "cross_naturality",
            Identity::Pairing => "pairing",
            Identity::Mixed => "mixed",
            Identity::Projection => "projection",
        }
    }

    pub fn from_name(s: &str) -> Option<Identity> {
        Self::ALL.into_iter().find(|i| i.name() == s)
    }

    /// Whether the identity needs an equivariant map.
    pub fn needs_map(self) -> bool {
        matches!(self, Identity::CupFunctoriality | Identity::CrossNaturality | Identity::Projection)
    }
}

/// The first basis tuple where the two sides differ.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Witness {
    /// Page index; 0 marks a chain-level check.
    pub page: usize,
    pub entries: Vec<(i64, i64)>,
    pub basis: Vec<usize>,
    pub lhs: Vec<usize>,
    pub rhs: Vec<usize>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IdentityReport {
    pub identity: Identity,
    pub pages: Vec<usize>,
    /// Basis tuples on which both sides were evaluated.
    pub checked: usize,
    pub witness: Option<Witness>,
}

impl IdentityReport {
    pub fn passed(&self) -> bool {
        self.witness.is_none()
    }
}

/// Everything an identity check may need.
#[derive(Clone, Debug)]
pub struct IdentityInstance {
    pub space: SimplicialGSet,
    pub map: Option<EquivariantMap>,
    /// Second factor for the cross-product naturality.
    pub factor: Option<SimplicialGSet>,
    pub resolution: FreeResolution,
    pub window: i64,
    /// Pages to evaluate on; indices past the last page mean `E_∞`.
    pub pages: Vec<usize>,
}

struct Tally {
    checked: usize,
    witness: Option<Witness>,
}

impl Tally {
    fn new() -> Self {
        Tally { checked: 0, witness: None }
    }

    fn compare(&mut self, page: usize, entries: Vec<(i64, i64)>, basis: Vec<usize>, lhs: &BitVec, rhs: &BitVec) {
        self.checked += 1;
        if lhs != rhs && self.witness.is_none() {
            self.witness = Some(Witness { page, entries, basis, lhs: lhs.ones().collect(), rhs: rhs.ones().collect() });
        }
    }

    fn done(&self) -> bool {
        self.witness.is_some()
    }
}

fn units(dim: usize) -> impl Iterator<Item = (usize, BitVec)> {
    (0..dim).map(move |i| (i, BitVec::unit(dim, i)))
}

fn check_commutativity(t: &SpaceTowers, r: usize, tally: &mut Tally) -> Result<()> {
    let pp = t.cup_pages();
    let entries = t.cohomology_entries(r);
    for &(a, da) in &entries {
        for &(b, db) in &entries {
            if a > b || !pp.certified(a, b) {
                continue;
            }
            let (ab, ba) = (pp.table(r, a, b)?, pp.table(r, b, a)?);
            for i in 0..da {
                for j in 0..db {
                    tally.compare(r, vec![a, b], vec![i, j], &ab.row(i * db + j), &ba.row(j * da + i));
                }
            }
        }
    }
    Ok(())
}

fn check_associativity(t: &SpaceTowers, r: usize, tally: &mut Tally) -> Result<()> {
    let pp = t.cup_pages();
    let entries = t.cohomology_entries(r);
    for &(a, da) in &entries {
        for &(b, db) in &entries {
            if !pp.certified(a, b) {
                continue;
            }
            let ab_key = pp.target_key(a, b);
            let ab = pp.table(r, a, b)?;
            for &(c, dc) in &entries {
                if !pp.certified(ab_key, c) || !pp.certified(b, c) {
                    continue;
                }
                let bc_key = pp.target_key(b, c);
                let bc = pp.table(r, b, c)?;
                for i in 0..da {
                    for j in 0..db {
                        for (k, ek) in units(dc) {
                            let lhs = pp.multiply(r, ab_key, &ab.row(i * db + j), c, &ek)?;
                            let rhs = pp.multiply(r, a, &BitVec::unit(da, i), bc_key, &bc.row(j * dc + k))?;
                            tally.compare(r, vec![a, b, c], vec![i, j, k], &lhs, &rhs);
                        }
                    }
                }
                if tally.done() {
                    return Ok(());
                }
            }
        }
    }
    Ok(())
}

fn check_mixed(t: &SpaceTowers, r: usize, tally: &mut Tally) -> Result<()> {
    let (cup, cap) = (t.cup_pages(), t.cap_pages());
    let co = t.cohomology_entries(r);
    let ho = t.homology_entries(r);
    for &(a, da) in &co {
        for &(b, db) in &co {
            if !cup.certified(a, b) {
                continue;
            }
            let ab_key = cup.target_key(a, b);
            let ab = cup.table(r, a, b)?;
            for &(c, dc) in &ho {
                if !cap.certified(ab_key, c) || !cap.certified(b, c) {
                    continue;
                }
                let bc_key = cap.target_key(b, c);
                let bc = cap.table(r, b, c)?;
                for i in 0..da {
                    for j in 0..db {
                        for (k, ek) in units(dc) {
                            let lhs = cap.multiply(r, ab_key, &ab.row(i * db + j), c, &ek)?;
                            let rhs = cap.multiply(r, a, &BitVec::unit(da, i), bc_key, &bc.row(j * dc + k))?;
                            tally.compare(r, vec![a, b, c], vec![i, j, k], &lhs, &rhs);
                        }
                    }
                }
            }
        }
    }
    Ok(())
}

fn check_cup_functoriality(m: &MapTowers, r: usize, tally: &mut Tally) -> Result<()> {
    let (py, px) = (m.target.cup_pages(), m.source.cup_pages());
    let entries = m.target.cohomology_entries(r);
    for &(a, da) in &entries {
        for &(b, db) in &entries {
            if !py.certified(a, b) {
                continue;
            }
            let t = py.target_key(a, b);
            for (i, ea) in units(da) {
                for (j, eb) in units(db) {
                    let lhs = m.pull(r, t, &py.multiply(r, a, &ea, b, &eb)?)?;
                    let rhs = px.multiply(r, a, &m.pull(r, a, &ea)?, b, &m.pull(r, b, &eb)?)?;
                    tally.compare(r, vec![a, b], vec![i, j], &lhs, &rhs);
                }
            }
        }
    }
    Ok(())
}

fn check_projection(m: &MapTowers, r: usize, tally: &mut Tally) -> Result<()> {
    let (cy, cx) = (m.target.cap_pages(), m.source.cap_pages());
    for &(a, da) in &m.target.cohomology_entries(r) {
        for &(c, dc) in &m.source.homology_entries(r) {
            if !cy.certified(a, c) || !cx.certified(a, c) {
                continue;
            }
            let t = cx.target_key(a, c);
            for (i, ea) in units(da) {
                for (k, ec) in units(dc) {
                    let lhs = cy.multiply(r, a, &ea, c, &m.push(r, c, &ec)?)?;
                    let rhs = m.push(r, t, &cx.multiply(r, a, &m.pull(r, a, &ea)?, c, &ec)?)?;
                    tally.compare(r, vec![a, c], vec![i, k], &lhs, &rhs);
                }
            }
        }
    }
    Ok(())
}

/// `ψ(φ ⌢ c) = (ψ ⌣ φ)(c)` on chains and on homology classes of `x`.
fn check_pairing(x: &SimplicialGSet, tally: &mut Tally) {
    let (cup, cap) = (alexander_whitney_cup(x), cap_pairing(x));
    let k = x.cochains().complex().clone();
    let c = x.chains().complex().clone();
    let d = x.dim() as i64;
    let one = |v: bool| BitVec::from_bools(&[v]);
    for a in 0..=d {
        for b in 0..=(d - a) {
            let n = a + b;
            for (i, psi) in units(k.dim(a)) {
                for (j, phi) in units(k.dim(b)) {
                    for (s, sigma) in units(c.dim(n)) {
                        let lhs = psi.dot(&cap.apply(b, &phi, -n, &sigma));
                        let rhs = cup.apply(a, &psi, b, &phi).dot(&sigma);
                        tally.compare(0, vec![(a, b)], vec![i, j, s], &one(lhs), &one(rhs));
                    }
                }
            }
            let (ha, hb, hn) = (k.homology_quotient(a), k.homology_quotient(b), c.homology_quotient(n));
            for i in 0..ha.dim() {
                for j in 0..hb.dim() {
                    for s in 0..hn.dim() {
                        let (psi, phi, sigma) = (ha.section().row(i), hb.section().row(j), hn.section().row(s));
                        let lhs = psi.dot(&cap.apply(b, &phi, -n, &sigma));
                        let rhs = cup.apply(a, &psi, b, &phi).dot(&sigma);
                        tally.compare(1, vec![(a, b)], vec![i, j, s], &one(lhs), &one(rhs));
                    }
                }
            }
        }
    }
}

/// Cross naturality for `f : X → Y` and a second factor `Z`: the product
/// towers of `X × Z` and `Y × Z` over `G × H`, compared on `E_r` classes.
fn check_cross_naturality(f: &EquivariantMap, z: &SimplicialGSet, inst: &IdentityInstance, res_z: &FreeResolution, r: usize, r_max: usize, tally: &mut Tally) -> Result<()> {
    let res = &inst.resolution;
    let (kx, ky, kz) = (f.source().cochains(), f.target().cochains(), z.cochains());
    let w = inst.window;
    let (lx, ly, lz) = (l_cochain(&kx, res, w)?, l_cochain(&ky, res, w)?, l_cochain(&kz, res_z, w)?);
    let tres = FreeResolution::tensor(res, res_z);
    let (lxz, lyz) = (l_cochain(&kx.tensor_external(&kz)?, &tres, w)?, l_cochain(&ky.tensor_external(&kz)?, &tres, w)?);
    let (cx, cy, cz) = (canonical_filtration(kx.complex())?, canonical_filtration(ky.complex())?, canonical_filtration(kz.complex())?);
    let ss = |l: &LComplex, fl| -> Result<SpectralSequence> { spectral_sequence(&l.induced(fl)?, r_max) };
    let (sy, sz) = (ss(&ly, &cy)?, ss(&lz, &cz)?);
    let (fxz, fyz) = (tensor_filtered(&cx, &cz)?, tensor_filtered(&cy, &cz)?);
    let (sxz, syz) = (ss(&lxz, &fxz)?, ss(&lyz, &fyz)?);
    let pull = postcompose(&f.pullback(), &ly, &lx)?;
    let pull_z = {
        let m = ComplexMap::identity(kz.complex());
        let fz = f.pullback();
        let tensor_map = crate::complex::tensor_maps(&fz, &m)?;
        postcompose(&tensor_map, &lyz, &lxz)?
    };
    let (px, py) = (CrossProduct::new(&lx, &lz, &lxz)?, CrossProduct::new(&ly, &lz, &lyz)?);
    for (a, da) in sy.entries(r) {
        if !ly.certified(a.0 + a.1) {
            continue;
        }
        for (b, db) in sz.entries(r) {
            let (pa, na) = sy.internal(a.0, a.1);
            let (pb, nb) = sz.internal(b.0, b.1);
            let key = syz.native((pa + pb, na + nb));
            if !lyz.certified(key.0 + key.1) {
                continue;
            }
            for (i, ea) in units(da) {
                for (j, eb) in units(db) {
                    let (ya, zb) = (sy.lift(r, a.0, a.1, &ea).expect("entry"), sz.lift(r, b.0, b.1, &eb).expect("entry"));
                    let cross = py.apply(na, &ya, nb, &zb);
                    let lhs_chain = pull_z.matrix(na + nb).apply(&cross);
                    let xa = pull.matrix(na).apply(&ya);
                    let rhs_chain = px.apply(na, &xa, nb, &zb);
                    let proj = |v: &BitVec| {
                        sxz.project(r, key.0, key.1, v)
                            .ok_or_else(|| Error::Inconsistent(format!("cross product leaves Z_{r} at {key:?}")))
                    };
                    tally.compare(r, vec![a, b], vec![i, j], &proj(&lhs_chain)?, &proj(&rhs_chain)?);
                }
            }
        }
    }
    Ok(())
}

/// Evaluates `identity` on full bases of every certified entry of the
/// requested pages.
pub fn check_identity(identity: Identity, inst: &IdentityInstance) -> Result<IdentityReport> {
    let mut tally = Tally::new();
    let r_max = inst.pages.iter().copied().max().unwrap_or(1).clamp(1, 8);
    let pages = inst.pages.clone();
    let need_map = || inst.map.as_ref().ok_or_else(|| Error::Argument(format!("{} needs an equivariant map", identity.name())));
    match identity {
        Identity::Commutativity | Identity::Associativity | Identity::Mixed => {
            let t = SpaceTowers::new(&inst.space, &inst.resolution, inst.window, r_max)?;
            for &r in &pages {
                match identity {
                    Identity::Commutativity => check_commutativity(&t, r, &mut tally)?,
                    Identity::Associativity => check_associativity(&t, r, &mut tally)?,
                    _ => check_mixed(&t, r, &mut tally)?,
                }
            }
        }
        Identity::CupFunctoriality | Identity::Projection => {
            let m = MapTowers::new(need_map()?, &inst.resolution, inst.window, r_max)?;
            for &r in &pages {
                if identity == Identity::Projection {
                    check_projection(&m, r, &mut tally)?;
                } else {
                    check_cup_functoriality(&m, r, &mut tally)?;
                }
            }
        }
        Identity::CrossNaturality => {
            let f = need_map()?;
            let z = inst.factor.clone().unwrap_or_else(|| SimplicialGSet::point_trivial(inst.resolution.group()));
            let res_z = inst.resolution.clone();
            if z.group() != res_z.group() {
                return Err(Error::GroupMismatch("second factor must be over the instance's group".into()));
            }
            for &r in &pages {
                check_cross_naturality(f, &z, inst, &res_z, r, r_max, &mut tally)?;
            }
        }
        Identity::Pairing => {
            check_pairing(&inst.space, &mut tally);
            if let Some(f) = &inst.map {
                check_pairing(f.source(), &mut tally);
                check_pairing(f.target(), &mut tally);
            }
        }
    }
    Ok(IdentityReport { identity, pages, checked: tally.checked, witness: tally.witness })
}

/// Per-entry dims of `E_1` and `E_∞` and the graded `Ω` dims for the product
/// tower of `X × Y` and for the tensor product of the two single towers.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct KunnethReport {
    pub window: i64,
    pub e1_product: BTreeMap<(i64, i64), usize>,
    pub e1_tensor: BTreeMap<(i64, i64), usize>,
    pub einf_product: BTreeMap<(i64, i64), usize>,
    pub einf_tensor: BTreeMap<(i64, i64), usize>,
    /// `(k, l) ↦ dim Ω^l H^k`.
    pub omega_product: BTreeMap<(i64, i64), usize>,
    pub omega_tensor: BTreeMap<(i64, i64), usize>,
}

impl KunnethReport {
    pub fn agrees(&self) -> bool {
        self.e1_product == self.e1_tensor && self.einf_product == self.einf_tensor && self.omega_product == self.omega_tensor
    }
}

fn tensor_entries(a: &BTreeMap<(i64, i64), usize>, b: &BTreeMap<(i64, i64), usize>, top: i64) -> BTreeMap<(i64, i64), usize> {
    let mut out = BTreeMap::new();
    for (&(p, q), &x) in a {
        for (&(s, t), &y) in b {
            if p + q + s + t <= top {
                *out.entry((p + s, q + t)).or_insert(0) += x * y;
            }
        }
    }
    out
}

/// Compares the weight tower of `X × Y` over `G × G'` (tensor resolution,
/// tensor of canonical filtrations) with the tensor of the two towers, in
/// the degrees the product tower certifies up to `window`.
pub fn kunneth(x: &SimplicialGSet, res_x: &FreeResolution, y: &SimplicialGSet, res_y: &FreeResolution, window: i64) -> Result<KunnethReport> {
    let (kx, ky) = (x.cochains(), y.cochains());
    let (fx, fy) = (canonical_filtration(kx.complex())?, canonical_filtration(ky.complex())?);
    let kxy = kx.tensor_external(&ky)?;
    let res = FreeResolution::tensor(res_x, res_y);
    let lxy = l_cochain(&kxy, &res, window)?;
    let top = (0..=window).take_while(|&k| lxy.certified(k)).last().unwrap_or(-1);
    let (lx, ly) = (l_cochain(&kx, res_x, window)?, l_cochain(&ky, res_y, window)?);
    if (0..=top).any(|k| !lx.certified(k) || !ly.certified(k)) {
        return Err(Error::Argument("factor resolutions do not certify the product window".into()));
    }
    let fxy = tensor_filtered(&fx, &fy)?;
    let ((sx, sy), sxy) = par::join(
        || par::join(|| spectral_sequence(&lx.induced(&fx)?, 1), || spectral_sequence(&ly.induced(&fy)?, 1)),
        || spectral_sequence(&lxy.induced(&fxy)?, 1),
    );
    let (sx, sy, sxy) = (sx?, sy?, sxy?);
    let within = |m: BTreeMap<(i64, i64), usize>| -> BTreeMap<(i64, i64), usize> { m.into_iter().filter(|&((p, q), _)| p + q <= top).collect() };
    let mut report = KunnethReport {
        window: top,
        e1_product: within(sxy.entries(1)),
        e1_tensor: tensor_entries(&within(sx.entries(1)), &within(sy.entries(1)), top),
        einf_product: within(sxy.infinity_entries()),
        einf_tensor: tensor_entries(&within(sx.infinity_entries()), &within(sy.infinity_entries()), top),
        ..Default::default()
    };
    let (lo, hi) = {
        let (a, b) = (sx.p_range(), sy.p_range());
        (a.0 + b.0 - 1, a.1 + b.1 + 1)
    };
    for k in 0..=top {
        for l in lo..=hi {
            report.omega_product.insert((k, l), sxy.abutment_dim(k, l));
            let graded: usize = report.einf_tensor.iter().filter(|&(&(p, q), _)| p + q == k && p >= l).map(|(_, &d)| d).sum();
            report.omega_tensor.insert((k, l), graded);
        }
    }
    Ok(report)
}

/// Cap with the fundamental class on one entry of the cohomology page.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityEntry {
    pub source: (i64, i64),
    pub target: (i64, i64),
    pub source_dim: usize,
    pub target_dim: usize,
    pub rank: usize,
}

impl DualityEntry {
    pub fn bijective(&self) -> bool {
        self.source_dim == self.target_dim && self.rank == self.source_dim
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct DualityReport {
    pub page: usize,
    /// Native index of `[X]` on the homology page.
    pub class_key: (i64, i64),
    pub entries: Vec<DualityEntry>,
    /// Certified `dim H^k(X; G)` and `dim H_k(X; G)`.
    pub cohomology: BTreeMap<i64, usize>,
    pub homology: BTreeMap<i64, usize>,
}

impl DualityReport {
    pub fn all_bijective(&self) -> bool {
        self.entries.iter().all(DualityEntry::bijective)
    }
}

/// `D_G = − ⌢ [X]` on page `r` of the canonical towers, entry by entry.
/// Entries whose source or target degree is not certified are skipped.
pub fn equivariant_duality(t: &SpaceTowers, r: usize) -> Result<DualityReport> {
    let fundamental = t.space.fundamental_class()?;
    let d = t.space.dim() as i64;
    let n = -d;
    let b = t.chain.block(n, 0).ok_or_else(|| Error::Argument("no block for the fundamental class".into()))?;
    let mut x = BitVec::zeros(t.chain.total().dim(n));
    for j in t.chain.resolution().augmentation().ones() {
        x.xor_at(b.offset + j * b.width, &fundamental);
    }
    if !t.chain.total().differential(n).apply(&x).is_zero() {
        return Err(Error::Inconsistent("the fundamental class is not a cycle of the L-complex".into()));
    }
    let f = t.chain_filtration.cochain_form();
    let p = (f.p_min()..=f.p_max()).rev().find(|&p| f.level(p, n).contains(&x)).unwrap_or(f.p_min());
    let class_key = t.homology.native((p, n));
    let cx = t
        .homology
        .project(r, class_key.0, class_key.1, &x)
        .ok_or_else(|| Error::Inconsistent("the fundamental class leaves Z_r".into()))?;
    let pp = t.cap_pages();
    let mut entries = Vec::new();
    for (a, da) in t.cohomology_entries(r) {
        if !pp.certified(a, class_key) {
            continue;
        }
        let target = pp.target_key(a, class_key);
        let rows: Vec<BitVec> = units(da).map(|(_, e)| pp.multiply(r, a, &e, class_key, &cx)).collect::<Result<_>>()?;
        let td = t.homology.dim(r, target.0, target.1);
        let m = BitMatrix::from_rows(td, &rows);
        entries.push(DualityEntry { source: a, target, source_dim: da, target_dim: td, rank: m.rank() });
    }
    for (c, dc) in t.homology_entries(r) {
        let covered = entries.iter().any(|e| e.target == c);
        let a = (c.0 - class_key.0, c.1 - class_key.1);
        let a = (-a.0, -a.1);
        if !covered && t.cochain.certified(a.0 + a.1) && pp.certified(a, class_key) {
            entries.push(DualityEntry { source: a, target: c, source_dim: 0, target_dim: dc, rank: 0 });
        }
    }
    Ok(DualityReport { page: r, class_key, entries, cohomology: t.cochain.certified_dims(), homology: t.chain.certified_dims() })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::group::FiniteGroup;

    #[test]
    fn pairing_maps_are_equivariant_chain_maps() {
        let x = SimplicialGSet::reflection_circle();
        let data = PairingData::new(&x, &SimplicialGSet::antipodal_circle()).unwrap();
        for c in data.check().unwrap() {
            assert!(c.chain_map && c.equivariant, "{c:?}");
        }
    }

    #[test]
    fn cup_and_cap_are_chain_level_pairings() {
        for x in [SimplicialGSet::torus(), SimplicialGSet::reflection_circle()] {
            assert!(alexander_whitney_cup(&x).as_map().is_ok());
            assert!(cap_pairing(&x).as_map().is_ok());
        }
    }

    #[test]
    fn unit_is_two_sided_on_cohomology() {
        let x = SimplicialGSet::reflection_circle();
        let res = FreeResolution::periodic(2, 6);
        let t = SpaceTowers::new(&x, &res, 3, 2).unwrap();
        let one = unit_cochain(&t.cochain).unwrap();
        assert!(t.cochain.total().differential(0).apply(&one).is_zero());
        let h = t.cochain.total().homology_quotient(1);
        for i in 0..h.dim() {
            let z = h.section().row(i);
            assert_eq!(h.project(&t.cup.apply(0, &one, 1, &z)), Some(BitVec::unit(h.dim(), i)));
            assert_eq!(h.project(&t.cup.apply(1, &z, 0, &one)), Some(BitVec::unit(h.dim(), i)));
        }
    }

    #[test]
    fn hom_tensor_iso_is_a_permutation() {
        let g = FiniteGroup::cyclic(2);
        let m = hom_tensor_iso(2, &GModule::regular(&g), 1, &GModule::trivial(&g, 3));
        assert_eq!(m.rows(), 12);
        assert_eq!(m.rank(), 12);
        assert_eq!(m.count_ones(), 12);
    }
}
