//! Truncated free resolutions of the trivial module GF(2) over GF(2)[G].
//!
//! `F_p ≅ GF(2)[G]^{r_p}`. An element of `F_p` is a vector indexed by
//! `j·|G| + g`, the coordinate of `g·e_j` for generator `e_j`. A G-map out
//! of a free module is stored by its generator images only: row `j` is the
//! image of `e_j`.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec, Solver};
use crate::group::{FiniteGroup, GroupHom};
use crate::par;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ResolutionKind {
    Bar,
    Periodic,
    Tensor(Box<ResolutionKind>, Box<ResolutionKind>),
    Trivial,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FreeResolution {
    group: FiniteGroup,
    kind: ResolutionKind,
    ranks: Vec<usize>,
    /// `boundary[p]` for `p ≥ 1`: generator images in `F_{p−1}`.
    boundary: Vec<BitMatrix>,
    augmentation: BitVec,
}

/// Translates `v ∈ GF(2)[G]^r` by `h` on the left.
pub fn act_free(group: &FiniteGroup, h: usize, v: &BitVec) -> BitVec {
    let n = group.order();
    let mut out = BitVec::zeros(v.len());
    for i in v.ones() {
        out.flip((i / n) * n + group.mul(h, i % n));
    }
    out
}

/// Extends generator images `images` (one row per generator) to the full
/// matrix of the φ-equivariant map `GF(2)[G]^r → GF(2)[G']^{r'}`.
pub fn expand_equivariant(source: &FiniteGroup, target: &FiniteGroup, phi: &[usize], images: &BitMatrix) -> BitMatrix {
    let n = source.order();
    let rows: Vec<BitVec> = par::map_range(images.rows() * n, |x| {
        let (j, g) = (x / n, x % n);
        act_free(target, phi[g], &images.row(j))
    });
    BitMatrix::from_rows(images.cols(), &rows)
}

impl FreeResolution {
    pub fn new(group: &FiniteGroup, kind: ResolutionKind, ranks: Vec<usize>, boundary: Vec<BitMatrix>, augmentation: BitVec) -> Result<Self> {
        let n = group.order();
        if ranks.is_empty() || boundary.len() != ranks.len() || augmentation.len() != ranks[0] {
            return Err(Error::InvalidResolution("ranks, boundaries and augmentation disagree".into()));
        }
        for p in 1..ranks.len() {
            let b = &boundary[p];
            if (b.rows(), b.cols()) != (ranks[p], ranks[p - 1] * n) {
                return Err(Error::InvalidResolution(format!("boundary {p} has the wrong shape")));
            }
        }
        Ok(FreeResolution { group: group.clone(), kind, ranks, boundary, augmentation })
    }

    /// Bar resolution to `depth`, refusing when `|G|^depth > max_rank`.
    pub fn bar(group: &FiniteGroup, depth: usize, max_rank: usize) -> Result<Self> {
        let n = group.order();
        let mut ranks = vec![1usize];
        for p in 1..=depth {
            let r = ranks[p - 1].checked_mul(n).filter(|&r| r <= max_rank).ok_or_else(|| {
                Error::Budget(format!("bar resolution rank |G|^{p} exceeds the budget {max_rank}"))
            })?;
            ranks.push(r);
        }
        let mut boundary = vec![BitMatrix::zeros(1, 0)];
        for p in 1..=depth {
            let rp = ranks[p];
            let cols = ranks[p - 1] * n;
            let rows = par::map_range(rp, |idx| {
                // idx encodes (g_1, ..., g_p) in base |G|, g_1 most significant.
                let mut g = vec![0usize; p];
                let mut x = idx;
                for k in (0..p).rev() {
                    g[k] = x % n;
                    x /= n;
                }
                let encode = |t: &[usize]| t.iter().fold(0usize, |a, &d| a * n + d);
                let mut v = BitVec::zeros(cols);
                v.flip(encode(&g[1..]) * n + g[0]);
                for i in 0..p - 1 {
                    let mut t: Vec<usize> = g[..i].to_vec();
                    t.push(group.mul(g[i], g[i + 1]));
                    t.extend_from_slice(&g[i + 2..]);
                    v.flip(encode(&t) * n + group.identity());
                }
                v.flip(encode(&g[..p - 1]) * n + group.identity());
                v
            });
            boundary.push(BitMatrix::from_rows(cols, &rows));
        }
        Self::new(group, ResolutionKind::Bar, ranks, boundary, BitVec::from_ones(1, [0]))
    }

    /// Rank-one resolution of `Z/n` with maps alternating `1+σ` and `Σσ^i`.
    pub fn periodic(n: usize, depth: usize) -> Self {
        let group = FiniteGroup::cyclic(n);
        let mut boundary = vec![BitMatrix::zeros(1, 0)];
        for p in 1..=depth {
            let v = if p % 2 == 1 {
                BitVec::from_ones(n, [0, 1 % n])
            } else {
                BitVec::from_ones(n, 0..n)
            };
            boundary.push(BitMatrix::from_rows(n, &[v]));
        }
        Self::new(&group, ResolutionKind::Periodic, vec![1; depth + 1], boundary, BitVec::from_ones(1, [0]))
            .expect("periodic resolution shapes")
    }

    /// The resolution `GF(2)` of the trivial group.
    pub fn trivial() -> Self {
        Self::new(&FiniteGroup::trivial(), ResolutionKind::Trivial, vec![1], vec![BitMatrix::zeros(1, 0)], BitVec::from_ones(1, [0]))
            .expect("trivial resolution shapes")
    }

    /// `B ⊗ B'` over `G × G'`, truncated at the smaller depth.
    ///
    /// Generators of degree `k` are the pairs `e_j ⊗ e'_{j'}` with
    /// `p + p' = k`, ordered by `p` and then `j·r'_{p'} + j'`.
    pub fn tensor(a: &FreeResolution, b: &FreeResolution) -> Self {
        let group = FiniteGroup::product(&a.group, &b.group);
        let (na, nb) = (a.group.order(), b.group.order());
        let depth = a.depth().min(b.depth());
        let ranks: Vec<usize> = (0..=depth).map(|k| (0..=k).map(|p| a.rank(p) * b.rank(k - p)).sum()).collect();
        let offset = |k: usize, p: usize| -> usize { (0..p).map(|s| a.rank(s) * b.rank(k - s)).sum() };
        let mut boundary = vec![BitMatrix::zeros(ranks[0], 0)];
        for k in 1..=depth {
            let cols = ranks[k - 1] * na * nb;
            let mut rows = Vec::with_capacity(ranks[k]);
            for p in 0..=k {
                let q = k - p;
                for j in 0..a.rank(p) {
                    for jj in 0..b.rank(q) {
                        let mut v = BitVec::zeros(cols);
                        if p > 0 {
                            let base = offset(k - 1, p - 1);
                            for i in a.boundary[p].row(j).ones() {
                                let (m, g) = (i / na, i % na);
                                let gen = base + m * b.rank(q) + jj;
                                v.flip(gen * na * nb + g * nb + b.group.identity());
                            }
                        }
                        if q > 0 {
                            let base = offset(k - 1, p);
                            for i in b.boundary[q].row(jj).ones() {
                                let (m, h) = (i / nb, i % nb);
                                let gen = base + j * b.rank(q - 1) + m;
                                v.flip(gen * na * nb + a.group.identity() * nb + h);
                            }
                        }
                        rows.push(v);
                    }
                }
            }
            boundary.push(BitMatrix::from_rows(cols, &rows));
        }
        let aug = a.augmentation.kron(&b.augmentation);
        let kind = ResolutionKind::Tensor(Box::new(a.kind.clone()), Box::new(b.kind.clone()));
        Self::new(&group, kind, ranks, boundary, aug).expect("tensor resolution shapes")
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn kind(&self) -> &ResolutionKind {
        &self.kind
    }

    pub fn depth(&self) -> usize {
        self.ranks.len() - 1
    }

    pub fn ranks(&self) -> &[usize] {
        &self.ranks
    }

    /// `r_p`, zero beyond the depth.
    pub fn rank(&self, p: usize) -> usize {
        self.ranks.get(p).copied().unwrap_or(0)
    }

    /// Generator images of `∂_p`, for `1 ≤ p ≤ depth`.
    pub fn generator_images(&self, p: usize) -> &BitMatrix {
        &self.boundary[p]
    }

    pub fn augmentation(&self) -> &BitVec {
        &self.augmentation
    }

    /// Full GF(2) matrix of `∂_p : F_p → F_{p−1}`.
    pub fn full_boundary(&self, p: usize) -> BitMatrix {
        let ids: Vec<usize> = self.group.elements().collect();
        expand_equivariant(&self.group, &self.group, &ids, &self.boundary[p])
    }

    /// Full matrix of `ε : F_0 → GF(2)`.
    pub fn full_augmentation(&self) -> BitMatrix {
        let n = self.group.order();
        BitMatrix::from_fn(self.ranks[0] * n, 1, |i, _| self.augmentation.get(i / n))
    }

    /// Whether the last map is injective, so nothing is lost by truncating.
    pub fn is_complete(&self) -> bool {
        let n = self.depth();
        if n == 0 {
            return self.full_augmentation().rank() == self.ranks[0] * self.group.order();
        }
        self.ranks[n] <= self.ranks[n - 1] && self.full_boundary(n).rank() == self.ranks[n] * self.group.order()
    }

    /// Checks `∂∘∂ = 0`, `ε∘∂_1 = 0` and exactness up to the depth.
    pub fn verify(&self) -> Result<()> {
        let depth = self.depth();
        let full: Vec<BitMatrix> = (1..=depth).map(|p| self.full_boundary(p)).collect();
        let eps = self.full_augmentation();
        if eps.rank() != 1 {
            return Err(Error::InvalidResolution("augmentation is not onto".into()));
        }
        let incoming = |p: usize| -> &BitMatrix { &full[p - 1] };
        for p in 0..depth {
            let out = if p == 0 { eps.clone() } else { incoming(p).clone() };
            let inc = incoming(p + 1);
            if !inc.mul(&out).is_zero() {
                return Err(Error::InvalidResolution(format!("composite into degree {p} is not zero")));
            }
            let dim = self.ranks[p] * self.group.order();
            if dim - out.rank() != inc.rank() {
                return Err(Error::InvalidResolution(format!("not exact in degree {p}")));
            }
        }
        Ok(())
    }
}

/// A φ-equivariant augmentation-preserving chain map `τ : F → F'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainLift {
    phi: GroupHom,
    /// `images[p]`: generator images of `τ_p` in `F'_p`.
    images: Vec<BitMatrix>,
}

impl ChainLift {
    pub fn phi(&self) -> &GroupHom {
        &self.phi
    }

    pub fn depth(&self) -> usize {
        self.images.len() - 1
    }

    pub fn generator_images(&self, p: usize) -> &BitMatrix {
        &self.images[p]
    }

    pub fn full_matrix(&self, p: usize) -> BitMatrix {
        let phi: Vec<usize> = self.phi.source().elements().map(|g| self.phi.apply(g)).collect();
        expand_equivariant(self.phi.source(), self.phi.target(), &phi, &self.images[p])
    }

    /// Re-checks augmentation, equivariance and commutation with boundaries.
    pub fn verify(&self, f: &FreeResolution, ft: &FreeResolution) -> Result<()> {
        let t0 = self.full_matrix(0);
        if t0.mul(&ft.full_augmentation()) != f.full_augmentation() {
            return Err(Error::InvalidResolution("lift does not preserve augmentation".into()));
        }
        for p in 0..=self.depth() {
            let t = self.full_matrix(p);
            for g in f.group().elements() {
                let h = self.phi.apply(g);
                for i in 0..t.rows() {
                    let moved = act_free(f.group(), g, &BitVec::unit(t.rows(), i));
                    let lhs = t.apply(&moved);
                    if lhs != act_free(ft.group(), h, &t.row(i)) {
                        return Err(Error::NotEquivariant(format!("lift is not equivariant in degree {p}")));
                    }
                }
            }
            if p > 0 && f.full_boundary(p).mul(&self.full_matrix(p - 1)) != t.mul(&ft.full_boundary(p)) {
                return Err(Error::InvalidResolution(format!("lift does not commute with ∂ in degree {p}")));
            }
        }
        Ok(())
    }
}

fn image_under_lift(f: &FreeResolution, phi: &GroupHom, prev: &BitMatrix, p: usize, j: usize, target_dim: usize) -> BitVec {
    // τ_{p−1}(∂ e_j) = Σ c_{k,g} φ(g)·τ_{p−1}(e_k)
    let n = f.group().order();
    let mut v = BitVec::zeros(target_dim);
    for i in f.generator_images(p).row(j).ones() {
        v.xor_assign(&act_free(phi.target(), phi.apply(i % n), &prev.row(i / n)));
    }
    v
}

/// Lifts `φ : G → G'` to `τ : F → F'` degree by degree by linear solves, up
/// to the smaller depth.
pub fn lift_chain_map(phi: &GroupHom, f: &FreeResolution, ft: &FreeResolution) -> Result<ChainLift> {
    if phi.source() != f.group() || phi.target() != ft.group() {
        return Err(Error::GroupMismatch("resolutions are not over the homomorphism's groups".into()));
    }
    let depth = f.depth().min(ft.depth());
    let nt = ft.group().order();
    let eps = Solver::new(&ft.full_augmentation());
    let mut images = Vec::with_capacity(depth + 1);
    let rows: Vec<BitVec> = (0..f.rank(0))
        .map(|j| {
            let want = BitVec::from_bools(&[f.augmentation().get(j)]);
            eps.solve(&want).ok_or_else(|| Error::Unsolvable("augmentation of the target is zero".into()))
        })
        .collect::<Result<_>>()?;
    images.push(BitMatrix::from_rows(ft.rank(0) * nt, &rows));
    for p in 1..=depth {
        let solver = Solver::new(&ft.full_boundary(p));
        let prev = &images[p - 1];
        let dim = ft.rank(p - 1) * nt;
        let rows: Vec<BitVec> = par::map_range(f.rank(p), |j| {
            let want = image_under_lift(f, phi, prev, p, j, dim);
            solver
                .solve(&want)
                .ok_or_else(|| Error::Unsolvable(format!("no lift in degree {p}; target not exact here")))
        })
        .into_iter()
        .collect::<Result<_>>()?;
        images.push(BitMatrix::from_rows(ft.rank(p) * nt, &rows));
    }
    Ok(ChainLift { phi: phi.clone(), images })
}

/// A φ-equivariant homotopy `s` with `τ − τ' = ∂'s + s∂`, as generator
/// images `s_p : F_p → F'_{p+1}`, for `p` up to one below the target depth.
pub fn lift_homotopy(a: &ChainLift, b: &ChainLift, f: &FreeResolution, ft: &FreeResolution) -> Result<Vec<BitMatrix>> {
    if a.phi != b.phi {
        return Err(Error::GroupMismatch("homotopy between lifts of different homomorphisms".into()));
    }
    let nt = ft.group().order();
    let top = a.depth().min(b.depth()).min(ft.depth().saturating_sub(1));
    let mut s: Vec<BitMatrix> = Vec::new();
    for p in 0..=top {
        if ft.depth() < p + 1 {
            break;
        }
        let solver = Solver::new(&ft.full_boundary(p + 1));
        let dim = ft.rank(p) * nt;
        let mut rows = Vec::new();
        for j in 0..f.rank(p) {
            let mut want = a.images[p].row(j);
            want.xor_assign(&b.images[p].row(j));
            if p > 0 {
                want.xor_assign(&image_under_lift(f, &a.phi, &s[p - 1], p, j, dim));
            }
            rows.push(solver.solve(&want).ok_or_else(|| Error::Unsolvable(format!("no homotopy in degree {p}")))?);
        }
        s.push(BitMatrix::from_rows(ft.rank(p + 1) * nt, &rows));
    }
    Ok(s)
}
