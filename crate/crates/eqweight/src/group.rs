//! Finite groups, modules over GF(2)[G], and G-complexes.
//!
//! Groups are multiplication tables on `0..order`. Actions are left actions
//! written in the row-vector convention: `g·v = v·A_g`. With that convention
//! the composition law reads `A_{gh} = A_h·A_g`.

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap, Variance};
use crate::error::{Error, Result};
use crate::gf2::{self, BitMatrix, BitVec, Subquotient, Subspace};

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct FiniteGroup {
    order: usize,
    mult: Vec<usize>,
    identity: usize,
    inverse: Vec<usize>,
}

impl FiniteGroup {
    /// Validates associativity, the identity law and inverses exhaustively.
    pub fn from_table(table: Vec<Vec<usize>>) -> Result<Self> {
        let n = table.len();
        if n == 0 {
            return Err(Error::InvalidGroup("empty table".into()));
        }
        if table.iter().any(|r| r.len() != n || r.iter().any(|&x| x >= n)) {
            return Err(Error::InvalidGroup("table is not n×n over 0..n".into()));
        }
        let mult: Vec<usize> = table.into_iter().flatten().collect();
        let m = |a: usize, b: usize| mult[a * n + b];
        let identity = (0..n)
            .find(|&e| (0..n).all(|a| m(e, a) == a && m(a, e) == a))
            .ok_or_else(|| Error::InvalidGroup("no identity element".into()))?;
        let mut inverse = vec![0; n];
        for (a, inv) in inverse.iter_mut().enumerate() {
            *inv = (0..n)
                .find(|&b| m(a, b) == identity && m(b, a) == identity)
                .ok_or_else(|| Error::InvalidGroup(format!("element {a} has no inverse")))?;
        }
        for a in 0..n {
            for b in 0..n {
                for c in 0..n {
                    if m(m(a, b), c) != m(a, m(b, c)) {
                        return Err(Error::InvalidGroup(format!("({a}·{b})·{c} ≠ {a}·({b}·{c})")));
                    }
                }
            }
        }
        Ok(FiniteGroup { order: n, mult, identity, inverse })
    }

    pub fn trivial() -> Self {
        Self::cyclic(1)
    }

    /// `Z/n` with element `k` standing for `σ^k`.
    pub fn cyclic(n: usize) -> Self {
        assert!(n > 0, "cyclic group of order 0");
        let table = (0..n).map(|a| (0..n).map(|b| (a + b) % n).collect()).collect();
        Self::from_table(table).expect("cyclic table is a group")
    }

    /// Dihedral group of order `2n`; element `k + n·e` stands for `r^k s^e`.
    pub fn dihedral(n: usize) -> Self {
        assert!(n > 0);
        let idx = |k: usize, e: usize| k % n + n * e;
        let table = (0..2 * n)
            .map(|x| {
                let (a, e) = (x % n, x / n);
                (0..2 * n)
                    .map(|y| {
                        let (b, f) = (y % n, y / n);
                        let k = if e == 0 { a + b } else { a + n - b };
                        idx(k, (e + f) % 2)
                    })
                    .collect()
            })
            .collect();
        Self::from_table(table).expect("dihedral table is a group")
    }

    /// `G × H` with `(g, h)` at index `g·|H| + h`.
    pub fn product(g: &FiniteGroup, h: &FiniteGroup) -> Self {
        let (m, n) = (g.order, h.order);
        let table = (0..m * n)
            .map(|x| (0..m * n).map(|y| g.mul(x / n, y / n) * n + h.mul(x % n, y % n)).collect())
            .collect();
        Self::from_table(table).expect("product of groups is a group")
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn identity(&self) -> usize {
        self.identity
    }

    pub fn mul(&self, a: usize, b: usize) -> usize {
        self.mult[a * self.order + b]
    }

    pub fn inv(&self, a: usize) -> usize {
        self.inverse[a]
    }

    pub fn elements(&self) -> std::ops::Range<usize> {
        0..self.order
    }

    pub fn element_order(&self, a: usize) -> usize {
        let mut x = a;
        let mut k = 1;
        while x != self.identity {
            x = self.mul(x, a);
            k += 1;
        }
        k
    }

    /// Least common multiple of element orders.
    pub fn exponent(&self) -> usize {
        fn gcd(a: usize, b: usize) -> usize {
            if b == 0 {
                a
            } else {
                gcd(b, a % b)
            }
        }
        self.elements().map(|a| self.element_order(a)).fold(1, |l, o| l / gcd(l, o) * o)
    }

    pub fn is_abelian(&self) -> bool {
        self.elements().all(|a| self.elements().all(|b| self.mul(a, b) == self.mul(b, a)))
    }
}

/// A homomorphism given by the image of each element.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GroupHom {
    source: FiniteGroup,
    target: FiniteGroup,
    image: Vec<usize>,
}

impl GroupHom {
    pub fn new(source: &FiniteGroup, target: &FiniteGroup, image: Vec<usize>) -> Result<Self> {
        if image.len() != source.order() || image.iter().any(|&x| x >= target.order()) {
            return Err(Error::InvalidGroup("homomorphism image has the wrong shape".into()));
        }
        for a in source.elements() {
            for b in source.elements() {
                if image[source.mul(a, b)] != target.mul(image[a], image[b]) {
                    return Err(Error::InvalidGroup(format!("φ({a}·{b}) ≠ φ({a})·φ({b})")));
                }
            }
        }
        Ok(GroupHom { source: source.clone(), target: target.clone(), image })
    }

    pub fn identity(g: &FiniteGroup) -> Self {
        GroupHom { source: g.clone(), target: g.clone(), image: g.elements().collect() }
    }

    /// `g ↦ (g, g)` into [`FiniteGroup::product`]`(g, g)`.
    pub fn diagonal(g: &FiniteGroup) -> Self {
        let n = g.order();
        let target = FiniteGroup::product(g, g);
        GroupHom { source: g.clone(), target, image: g.elements().map(|a| a * n + a).collect() }
    }

    /// The inclusion of the trivial group.
    pub fn from_trivial(g: &FiniteGroup) -> Self {
        GroupHom { source: FiniteGroup::trivial(), target: g.clone(), image: vec![g.identity()] }
    }

    pub fn source(&self) -> &FiniteGroup {
        &self.source
    }

    pub fn target(&self) -> &FiniteGroup {
        &self.target
    }

    pub fn apply(&self, a: usize) -> usize {
        self.image[a]
    }
}

fn check_action(group: &FiniteGroup, action: &[BitMatrix], dim: usize) -> Result<()> {
    if action.len() != group.order() {
        return Err(Error::InvalidGroup("one action matrix per element required".into()));
    }
    if action.iter().any(|a| a.rows() != dim || a.cols() != dim) {
        return Err(Error::Dimension("action matrices must be square of the module dimension".into()));
    }
    if action[group.identity()] != BitMatrix::identity(dim) {
        return Err(Error::InvalidGroup("identity does not act trivially".into()));
    }
    for g in group.elements() {
        for h in group.elements() {
            if action[group.mul(g, h)] != action[h].mul(&action[g]) {
                return Err(Error::InvalidGroup(format!("action law fails for ({g}, {h})")));
            }
        }
    }
    Ok(())
}

/// A finite-dimensional GF(2)[G]-module.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GModule {
    group: FiniteGroup,
    dim: usize,
    action: Vec<BitMatrix>,
}

impl GModule {
    pub fn new(group: &FiniteGroup, dim: usize, action: Vec<BitMatrix>) -> Result<Self> {
        check_action(group, &action, dim)?;
        Ok(GModule { group: group.clone(), dim, action })
    }

    pub fn trivial(group: &FiniteGroup, dim: usize) -> Self {
        GModule { group: group.clone(), dim, action: vec![BitMatrix::identity(dim); group.order()] }
    }

    /// GF(2)[G] with `g·e_h = e_{gh}`.
    pub fn regular(group: &FiniteGroup) -> Self {
        let n = group.order();
        let action = group.elements().map(|g| BitMatrix::from_fn(n, n, |h, k| group.mul(g, h) == k)).collect();
        GModule { group: group.clone(), dim: n, action }
    }

    /// Permutation module: `perm[g][i]` is the image of basis vector `i` under `g`.
    pub fn permutation(group: &FiniteGroup, perm: &[Vec<usize>]) -> Result<Self> {
        let n = perm.first().map_or(0, |p| p.len());
        let action = perm.iter().map(|p| BitMatrix::from_fn(n, n, |i, j| p[i] == j)).collect();
        Self::new(group, n, action)
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn action(&self, g: usize) -> &BitMatrix {
        &self.action[g]
    }

    pub fn restrict(&self, phi: &GroupHom) -> Result<GModule> {
        if phi.target() != &self.group {
            return Err(Error::GroupMismatch("restriction along a map into another group".into()));
        }
        let action = phi.source().elements().map(|h| self.action[phi.apply(h)].clone()).collect();
        Ok(GModule { group: phi.source().clone(), dim: self.dim, action })
    }
}

/// `A ⊗ B` over `G × G'` with `(g, g')` acting by `A_g ⊗ B_{g'}`.
pub fn tensor_gmodule(a: &GModule, b: &GModule) -> GModule {
    let group = FiniteGroup::product(&a.group, &b.group);
    let n = b.group.order();
    let action = group.elements().map(|x| a.action[x / n].kron(&b.action[x % n])).collect();
    GModule { group, dim: a.dim * b.dim, action }
}

/// Fixed vectors `{v : g·v = v for all g}`.
pub fn invariants(m: &GModule) -> Subspace {
    let id = BitMatrix::identity(m.dim);
    let mut stacked = BitMatrix::zeros(m.dim, 0);
    for g in m.group.elements() {
        stacked = stacked.hstack(&m.action[g].add(&id));
    }
    gf2::kernel(&stacked)
}

/// A complex with a G-action by chain automorphisms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GComplex {
    group: FiniteGroup,
    complex: Complex,
    action: Vec<Vec<BitMatrix>>,
}

impl GComplex {
    /// `action[g][i]` acts on degree `complex.lo() + i`.
    pub fn new(group: &FiniteGroup, complex: Complex, action: Vec<Vec<BitMatrix>>) -> Result<Self> {
        if action.len() != group.order() {
            return Err(Error::InvalidGroup("one action per element required".into()));
        }
        let n = complex.degrees().count();
        for (i, q) in complex.degrees().enumerate() {
            let per: Vec<BitMatrix> = action
                .iter()
                .map(|a| a.get(i).cloned().ok_or_else(|| Error::Dimension("missing action degree".into())))
                .collect::<Result<_>>()?;
            check_action(group, &per, complex.dim(q))?;
        }
        if action.iter().any(|a| a.len() != n) {
            return Err(Error::Dimension("action degrees do not match the complex".into()));
        }
        let gc = GComplex { group: group.clone(), complex, action };
        for g in group.elements() {
            let f = ComplexMap::new_unchecked(&gc.complex, &gc.complex, gc.action_map_matrices(g))?;
            if let Some(q) = f.first_noncommuting_degree() {
                return Err(Error::NotEquivariant(format!("element {g} does not commute with d at degree {q}")));
            }
        }
        Ok(gc)
    }

    /// Every element acts as the identity.
    pub fn trivial(group: &FiniteGroup, complex: Complex) -> Self {
        let per: Vec<BitMatrix> = complex.degrees().map(|q| BitMatrix::identity(complex.dim(q))).collect();
        GComplex { group: group.clone(), complex, action: vec![per; group.order()] }
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    pub fn complex(&self) -> &Complex {
        &self.complex
    }

    pub fn variance(&self) -> Variance {
        self.complex.variance()
    }

    pub fn action(&self, g: usize, q: i64) -> BitMatrix {
        let c = &self.complex;
        if q < c.lo() || q > c.hi() {
            return BitMatrix::zeros(c.dim(q), c.dim(q));
        }
        self.action[g][(q - c.lo()) as usize].clone()
    }

    fn action_map_matrices(&self, g: usize) -> BTreeMap<i64, BitMatrix> {
        self.complex.degrees().map(|q| (q, self.action(g, q))).collect()
    }

    pub fn module(&self, q: i64) -> GModule {
        let dim = self.complex.dim(q);
        let action = self.group.elements().map(|g| self.action(g, q)).collect();
        GModule { group: self.group.clone(), dim, action }
    }

    /// Dual complex with the contragredient action `g·φ = φ∘g⁻¹`.
    pub fn dual(&self) -> GComplex {
        let complex = self.complex.dual();
        let action = self
            .group
            .elements()
            .map(|g| self.complex.degrees().map(|q| self.action(self.group.inv(g), q).transpose()).collect())
            .collect();
        GComplex { group: self.group.clone(), complex, action }
    }

    /// Degree negation; the action is unchanged.
    pub fn mirror(&self) -> GComplex {
        let action = self
            .action
            .iter()
            .map(|per| {
                let mut p = per.clone();
                p.reverse();
                p
            })
            .collect();
        GComplex { group: self.group.clone(), complex: self.complex.mirror(), action }
    }

    pub fn shifted(&self, s: i64) -> GComplex {
        GComplex { group: self.group.clone(), complex: self.complex.shifted(s), action: self.action.clone() }
    }

    pub fn restrict(&self, phi: &GroupHom) -> Result<GComplex> {
        if phi.target() != &self.group {
            return Err(Error::GroupMismatch("restriction along a map into another group".into()));
        }
        let action = phi.source().elements().map(|h| self.action[phi.apply(h)].clone()).collect();
        Ok(GComplex { group: phi.source().clone(), complex: self.complex.clone(), action })
    }

    /// `self ⊗ other` over `G × G'`.
    pub fn tensor_external(&self, other: &GComplex) -> Result<GComplex> {
        let complex = self.complex.tensor(&other.complex)?;
        let group = FiniteGroup::product(&self.group, &other.group);
        let n = other.group.order();
        let action = group
            .elements()
            .map(|x| self.tensor_action(other, x / n, x % n, &complex))
            .collect();
        Ok(GComplex { group, complex, action })
    }

    /// `self ⊗ other` over `G` with the diagonal action.
    pub fn tensor_diagonal(&self, other: &GComplex) -> Result<GComplex> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("diagonal tensor over different groups".into()));
        }
        let complex = self.complex.tensor(&other.complex)?;
        let action = self.group.elements().map(|g| self.tensor_action(other, g, g, &complex)).collect();
        Ok(GComplex { group: self.group.clone(), complex, action })
    }

    fn tensor_action(&self, other: &GComplex, g: usize, h: usize, complex: &Complex) -> Vec<BitMatrix> {
        let layout = crate::complex::TensorLayout::new(self.complex.spaces(), other.complex.spaces());
        complex
            .degrees()
            .map(|n| {
                let mut m = BitMatrix::zeros(complex.dim(n), complex.dim(n));
                for (i, j, off) in layout.blocks(n) {
                    m.xor_block(off, off, &self.action(g, i).kron(&other.action(h, j)));
                }
                m
            })
            .collect()
    }

    /// Whether `w ⊆ K^q` is preserved by every element.
    pub fn is_stable(&self, q: i64, w: &Subspace) -> bool {
        self.group.elements().all(|g| w.is_invariant(&self.action(g, q)))
    }

    /// The fixed subcomplex `K^G`, in the coordinates of the invariant bases.
    pub fn fixed_subcomplex(&self) -> (Complex, BTreeMap<i64, Subspace>) {
        let fixed: BTreeMap<i64, Subspace> = self.complex.degrees().map(|q| (q, invariants(&self.module(q)))).collect();
        let c = self.complex.restrict_to(&fixed).expect("fixed vectors form a subcomplex");
        (c, fixed)
    }

    /// The G-complex `upper/lower`, degreewise, with induced differential and
    /// action. Both families must be d-stable and G-stable with `lower ⊆ upper`.
    pub fn subquotient(&self, upper: &BTreeMap<i64, Subspace>, lower: &BTreeMap<i64, Subspace>) -> Result<(GComplex, Vec<Subquotient>)> {
        let c = &self.complex;
        let s = c.variance().step();
        let get = |m: &BTreeMap<i64, Subspace>, q: i64| m.get(&q).cloned().unwrap_or_else(|| Subspace::zero(c.dim(q)));
        let quotients: Vec<Subquotient> = c
            .degrees()
            .map(|q| Subquotient::new(&get(upper, q), &get(lower, q)))
            .collect::<Result<_>>()?;
        let sq = |q: i64| -> Option<&Subquotient> {
            if q < c.lo() || q > c.hi() {
                None
            } else {
                Some(&quotients[(q - c.lo()) as usize])
            }
        };
        let induced = |m: &BitMatrix, from: &Subquotient, to: Option<&Subquotient>| -> Result<BitMatrix> {
            let cols = to.map_or(0, |t| t.dim());
            let rows: Vec<BitVec> = (0..from.dim())
                .map(|i| {
                    let v = m.apply(&from.section().row(i));
                    match to {
                        Some(t) => t.project(&v).ok_or_else(|| Error::InvalidFiltration("piece is not stable".into())),
                        None if v.is_zero() => Ok(BitVec::zeros(0)),
                        None => Err(Error::InvalidFiltration("piece is not stable".into())),
                    }
                })
                .collect::<Result<_>>()?;
            Ok(BitMatrix::from_rows(cols, &rows))
        };
        let mut diffs = Vec::new();
        for q in c.degrees() {
            diffs.push(induced(&c.differential(q), sq(q).unwrap(), sq(q + s))?);
        }
        let dims = quotients.iter().map(|x| x.dim()).collect();
        let complex = Complex::new_unchecked(c.variance(), c.lo(), dims, diffs);
        let mut action = Vec::new();
        for g in self.group.elements() {
            let per = c
                .degrees()
                .map(|q| induced(&self.action(g, q), sq(q).unwrap(), sq(q)))
                .collect::<Result<Vec<_>>>()?;
            action.push(per);
        }
        Ok((GComplex { group: self.group.clone(), complex, action }, quotients))
    }
}

/// Whether `f` commutes with the actions: `f(g·x) = g·f(x)` in every degree.
pub fn check_equivariant(f: &ComplexMap, gx: &GComplex, gy: &GComplex) -> Result<bool> {
    if f.source() != gx.complex() || f.target() != gy.complex() {
        return Err(Error::Dimension("map does not go between the given complexes".into()));
    }
    if gx.group != gy.group {
        return Err(Error::GroupMismatch("equivariance across different groups".into()));
    }
    let lo = gx.complex.lo().min(gy.complex.lo());
    let hi = gx.complex.hi().max(gy.complex.hi());
    Ok(gx.group.elements().all(|g| {
        (lo..=hi).all(|q| gx.action(g, q).mul(&f.matrix(q)) == f.matrix(q).mul(&gy.action(g, q)))
    }))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn klein_four_group() {
        let v = FiniteGroup::product(&FiniteGroup::cyclic(2), &FiniteGroup::cyclic(2));
        assert_eq!(v.order(), 4);
        assert_eq!(v.exponent(), 2);
    }

    #[test]
    fn rejects_non_groups() {
        assert!(FiniteGroup::from_table(vec![vec![0, 1], vec![1, 1]]).is_err());
        assert!(FiniteGroup::from_table(vec![vec![0, 0], vec![0, 0]]).is_err());
    }

    #[test]
    fn dihedral_is_nonabelian() {
        let d3 = FiniteGroup::dihedral(3);
        assert_eq!(d3.order(), 6);
        assert!(!d3.is_abelian());
    }

    #[test]
    fn diagonal_is_a_homomorphism() {
        let g = FiniteGroup::dihedral(3);
        let d = GroupHom::diagonal(&g);
        assert!(GroupHom::new(d.source(), d.target(), (0..6).map(|a| d.apply(a)).collect()).is_ok());
    }

    #[test]
    fn invariants_of_small_modules() {
        let z2 = FiniteGroup::cyclic(2);
        assert_eq!(invariants(&GModule::trivial(&z2, 3)), Subspace::full(3));
        let reg = invariants(&GModule::regular(&z2));
        assert_eq!(reg.dim(), 1);
        assert!(reg.contains(&BitVec::from_ones(2, [0, 1])));
        let swap = GModule::permutation(&z2, &[vec![0, 1], vec![1, 0]]).unwrap();
        assert_eq!(invariants(&swap).dim(), 1);
    }

    #[test]
    fn regular_module_respects_the_action_law_on_nonabelian_groups() {
        let g = FiniteGroup::dihedral(3);
        let m = GModule::regular(&g);
        assert!(GModule::new(&g, m.dim(), (0..6).map(|x| m.action(x).clone()).collect()).is_ok());
    }

    #[test]
    fn tensor_of_trivial_modules_is_trivial() {
        let z2 = FiniteGroup::cyclic(2);
        let t = tensor_gmodule(&GModule::trivial(&z2, 2), &GModule::trivial(&z2, 3));
        assert_eq!(t, GModule::trivial(&FiniteGroup::product(&z2, &z2), 6));
    }

    #[test]
    fn regular_tensor_regular_is_regular() {
        let z2 = FiniteGroup::cyclic(2);
        let t = tensor_gmodule(&GModule::regular(&z2), &GModule::regular(&z2));
        assert_eq!(t, GModule::regular(&FiniteGroup::product(&z2, &z2)));
    }
}
