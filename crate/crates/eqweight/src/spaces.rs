//! Finite semi-simplicial sets with a group acting by simplex bijections.
//!
//! Each simplex carries its own vertex order through its faces
//! `d_0, …, d_k`, so an action may swap vertices of a simplex only by moving
//! the whole simplex. Chains are over GF(2) on the listed simplices.

use std::collections::BTreeMap;

use crate::complex::{Complex, ComplexMap};
use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::group::{check_equivariant, FiniteGroup, GComplex};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SimplicialGSet {
    name: String,
    group: FiniteGroup,
    /// `counts[k]`: number of `k`-simplices.
    counts: Vec<usize>,
    /// `faces[k][i]`: the `k+1` faces `d_0..d_k` of simplex `i` in dimension
    /// `k ≥ 1`; empty for vertices.
    faces: Vec<Vec<Vec<usize>>>,
    /// `action[g][k][i]`: the image of simplex `i` of dimension `k`.
    action: Vec<Vec<Vec<usize>>>,
}

impl SimplicialGSet {
    /// Validates face ranges, the simplicial identities
    /// `d_i d_j = d_{j−1} d_i` (`i < j`), and that the action is a group
    /// action by face-preserving bijections.
    pub fn new(name: &str, group: &FiniteGroup, counts: Vec<usize>, faces: Vec<Vec<Vec<usize>>>, action: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        let err = |m: String| Err(Error::InvalidSpace(format!("{name}: {m}")));
        if faces.len() != counts.len() {
            return err(format!("{} face tables for {} dimensions", faces.len(), counts.len()));
        }
        for (k, table) in faces.iter().enumerate() {
            if table.len() != counts[k] {
                return err(format!("dimension {k} lists {} simplices, expected {}", table.len(), counts[k]));
            }
            for (i, f) in table.iter().enumerate() {
                let want = if k == 0 { 0 } else { k + 1 };
                if f.len() != want {
                    return err(format!("simplex {k}/{i} has {} faces, expected {want}", f.len()));
                }
                if let Some(j) = f.iter().position(|&x| x >= counts[k - 1]) {
                    return err(format!("face {j} of simplex {k}/{i} is out of range"));
                }
            }
        }
        for k in 2..counts.len() {
            for (s, f) in faces[k].iter().enumerate() {
                for j in 1..=k {
                    for i in 0..j {
                        let left = faces[k - 1][f[j]][i];
                        let right = faces[k - 1][f[i]][j - 1];
                        if left != right {
                            return err(format!("simplex {k}/{s} violates d_{i}d_{j} = d_{}d_{i}", j - 1));
                        }
                    }
                }
            }
        }
        if action.len() != group.order() {
            return err(format!("{} action tables for a group of order {}", action.len(), group.order()));
        }
        for (g, per) in action.iter().enumerate() {
            if per.len() != counts.len() {
                return err(format!("action of element {g} covers {} dimensions", per.len()));
            }
            for (k, map) in per.iter().enumerate() {
                let mut seen = vec![false; counts[k]];
                if map.len() != counts[k] {
                    return err(format!("action of element {g} in dimension {k} has the wrong length"));
                }
                for (i, &t) in map.iter().enumerate() {
                    if t >= counts[k] || std::mem::replace(&mut seen[t], true) {
                        return err(format!("element {g} does not permute the {k}-simplices (at {i})"));
                    }
                    if k > 0 {
                        for (j, &fj) in faces[k][i].iter().enumerate() {
                            if faces[k][t][j] != per[k - 1][fj] {
                                return err(format!("element {g} does not commute with d_{j} on simplex {k}/{i}"));
                            }
                        }
                    }
                }
            }
        }
        for k in 0..counts.len() {
            for i in 0..counts[k] {
                if action[group.identity()][k][i] != i {
                    return err("the identity moves a simplex".into());
                }
                for g in group.elements() {
                    for h in group.elements() {
                        if action[group.mul(g, h)][k][i] != action[g][k][action[h][k][i]] {
                            return err(format!("action law fails for ({g}, {h}) on simplex {k}/{i}"));
                        }
                    }
                }
            }
        }
        Ok(SimplicialGSet { name: name.into(), group: group.clone(), counts, faces, action })
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn group(&self) -> &FiniteGroup {
        &self.group
    }

    /// Top dimension; `0` for an empty set.
    pub fn dim(&self) -> usize {
        self.counts.len().saturating_sub(1)
    }

    pub fn count(&self, k: usize) -> usize {
        self.counts.get(k).copied().unwrap_or(0)
    }

    /// `d_j` of simplex `i` in dimension `k ≥ 1`.
    pub fn face(&self, k: usize, i: usize, j: usize) -> usize {
        self.faces[k][i][j]
    }

    pub fn act(&self, g: usize, k: usize, i: usize) -> usize {
        self.action[g][k][i]
    }

    /// The face spanned by the first `m+1` vertices.
    pub fn front(&self, k: usize, i: usize, m: usize) -> usize {
        let mut s = i;
        for dim in ((m + 1)..=k).rev() {
            s = self.faces[dim][s][dim];
        }
        s
    }

    /// The face spanned by the last `m+1` vertices.
    pub fn back(&self, k: usize, i: usize, m: usize) -> usize {
        let mut s = i;
        for dim in ((m + 1)..=k).rev() {
            s = self.faces[dim][s][0];
        }
        s
    }

    /// The face on the vertex positions `keep` (ascending) of simplex `i`.
    pub fn restrict_to_vertices(&self, k: usize, i: usize, keep: &[usize]) -> usize {
        let mut s = i;
        let mut dim = k;
        for j in (0..=k).rev() {
            if !keep.contains(&j) {
                s = self.faces[dim][s][j];
                dim -= 1;
            }
        }
        s
    }

    /// Chains `C_k` with `∂σ = Σ d_j σ` and `g` acting by permutation.
    pub fn chains(&self) -> GComplex {
        let top = self.counts.len();
        let diffs: Vec<BitMatrix> = (0..top)
            .map(|k| {
                if k == 0 {
                    BitMatrix::zeros(self.counts[0], 0)
                } else {
                    let mut d = BitMatrix::zeros(self.counts[k], self.counts[k - 1]);
                    for (i, f) in self.faces[k].iter().enumerate() {
                        for &x in f {
                            d.flip(i, x);
                        }
                    }
                    d
                }
            })
            .collect();
        let complex = Complex::chain(0, self.counts.clone(), diffs).expect("face identities give ∂∂ = 0");
        let action = self
            .group
            .elements()
            .map(|g| (0..top).map(|k| BitMatrix::from_fn(self.counts[k], self.counts[k], |i, j| self.action[g][k][i] == j)).collect())
            .collect();
        GComplex::new(&self.group, complex, action).expect("simplicial action commutes with ∂")
    }

    /// The dual cochains with the contragredient action.
    pub fn cochains(&self) -> GComplex {
        self.chains().dual()
    }

    /// Sum of the top simplices, if it is a G-invariant cycle.
    pub fn fundamental_class(&self) -> Result<BitVec> {
        let d = self.dim();
        let c = BitVec::from_ones(self.count(d), 0..self.count(d));
        let chains = self.chains();
        if !chains.complex().differential(d as i64).apply(&c).is_zero() {
            return Err(Error::InvalidSpace(format!("{}: the sum of top simplices is not a cycle", self.name)));
        }
        for g in self.group.elements() {
            if chains.action(g, d as i64).apply(&c) != c {
                return Err(Error::InvalidSpace(format!("{}: the fundamental cycle is not invariant", self.name)));
            }
        }
        Ok(c)
    }

    /// Disjoint union over the same group; simplices of `other` come after.
    pub fn disjoint_union(&self, other: &SimplicialGSet, name: &str) -> Result<Self> {
        if self.group != other.group {
            return Err(Error::GroupMismatch("disjoint union over different groups".into()));
        }
        let top = self.counts.len().max(other.counts.len());
        let counts: Vec<usize> = (0..top).map(|k| self.count(k) + other.count(k)).collect();
        let faces = (0..top)
            .map(|k| {
                let mut t: Vec<Vec<usize>> = self.faces.get(k).cloned().unwrap_or_default();
                if let Some(of) = other.faces.get(k) {
                    let shift = if k == 0 { 0 } else { self.count(k - 1) };
                    t.extend(of.iter().map(|f| f.iter().map(|&x| x + shift).collect()));
                }
                t
            })
            .collect();
        let action = self
            .group
            .elements()
            .map(|g| {
                (0..top)
                    .map(|k| {
                        let mut m: Vec<usize> = self.action[g].get(k).cloned().unwrap_or_default();
                        if let Some(om) = other.action[g].get(k) {
                            m.extend(om.iter().map(|&x| x + self.count(k)));
                        }
                        m
                    })
                    .collect()
            })
            .collect();
        Self::new(name, &self.group, counts, faces, action)
    }

    /// Barycentric subdivision.
    ///
    /// An `m`-simplex is a simplex `τ` with a strict chain of vertex-position
    /// sets `S_0 ⊂ … ⊂ S_m = all positions of τ`; `d_i` drops `S_i`, and
    /// dropping the top passes to the face of `τ` spanned by `S_{m−1}`.
    pub fn subdivide(&self) -> Result<Self> {
        type Flag = (usize, usize, Vec<Vec<usize>>);
        let mut index: Vec<BTreeMap<Flag, usize>> = Vec::new();
        let mut flags: Vec<Vec<Flag>> = Vec::new();
        for k in 0..self.counts.len() {
            for i in 0..self.counts[k] {
                let all: Vec<usize> = (0..=k).collect();
                for chain in strict_chains_ending_at(&all) {
                    let m = chain.len() - 1;
                    while flags.len() <= m {
                        flags.push(Vec::new());
                        index.push(BTreeMap::new());
                    }
                    index[m].insert((k, i, chain.clone()), flags[m].len());
                    flags[m].push((k, i, chain));
                }
            }
        }
        let canonical = |k: usize, i: usize, chain: &[Vec<usize>]| -> Flag {
            let top = chain.last().expect("nonempty chain").clone();
            let face = self.restrict_to_vertices(k, i, &top);
            let relabel = |s: &Vec<usize>| s.iter().map(|x| top.iter().position(|y| y == x).unwrap()).collect();
            (top.len() - 1, face, chain.iter().map(relabel).collect())
        };
        let counts: Vec<usize> = flags.iter().map(Vec::len).collect();
        let faces: Vec<Vec<Vec<usize>>> = flags
            .iter()
            .enumerate()
            .map(|(m, level)| {
                level
                    .iter()
                    .map(|(k, i, chain)| {
                        if m == 0 {
                            return vec![];
                        }
                        (0..=m)
                            .map(|j| {
                                let mut c = chain.clone();
                                c.remove(j);
                                index[m - 1][&canonical(*k, *i, &c)]
                            })
                            .collect()
                    })
                    .collect()
            })
            .collect();
        let action = self
            .group
            .elements()
            .map(|g| {
                flags
                    .iter()
                    .enumerate()
                    .map(|(m, level)| level.iter().map(|(k, i, chain)| index[m][&(*k, self.action[g][*k][*i], chain.clone())]).collect())
                    .collect()
            })
            .collect();
        Self::new(&format!("sd({})", self.name), &self.group, counts, faces, action)
    }
}

/// Strict chains of nonempty subsets `S_0 ⊂ … ⊂ S_m = top`.
fn strict_chains_ending_at(top: &[usize]) -> Vec<Vec<Vec<usize>>> {
    let mut out = vec![vec![top.to_vec()]];
    if top.len() > 1 {
        let n = top.len();
        for mask in 1..(1usize << n) - 1 {
            let sub: Vec<usize> = (0..n).filter(|b| mask >> b & 1 == 1).map(|b| top[b]).collect();
            for mut chain in strict_chains_ending_at(&sub) {
                chain.push(top.to_vec());
                out.push(chain);
            }
        }
    }
    out.sort();
    out
}

/// An equivariant map given on simplices; `None` sends a simplex to a
/// degenerate one, which is zero in normalized chains.
#[derive(Clone, Debug)]
pub struct EquivariantMap {
    source: SimplicialGSet,
    target: SimplicialGSet,
    assignment: Vec<Vec<Option<usize>>>,
    push: ComplexMap,
}

impl EquivariantMap {
    pub fn new(source: &SimplicialGSet, target: &SimplicialGSet, assignment: Vec<Vec<Option<usize>>>) -> Result<Self> {
        if source.group != target.group {
            return Err(Error::GroupMismatch("map between spaces over different groups".into()));
        }
        if assignment.len() != source.counts.len() || assignment.iter().zip(&source.counts).any(|(a, &c)| a.len() != c) {
            return Err(Error::InvalidSpace("assignment does not cover every simplex".into()));
        }
        for (k, level) in assignment.iter().enumerate() {
            for (i, &img) in level.iter().enumerate() {
                let Some(t) = img else {
                    if k == 0 {
                        return Err(Error::InvalidSpace(format!("vertex {i} has no image")));
                    }
                    continue;
                };
                if t >= target.count(k) {
                    return Err(Error::InvalidSpace(format!("image of simplex {k}/{i} is out of range")));
                }
                if k > 0 {
                    for j in 0..=k {
                        if assignment[k - 1][source.face(k, i, j)] != Some(target.face(k, t, j)) {
                            return Err(Error::InvalidSpace(format!("map does not commute with d_{j} on simplex {k}/{i}")));
                        }
                    }
                }
            }
        }
        let (cx, cy) = (source.chains(), target.chains());
        let maps = (0..source.counts.len())
            .map(|k| {
                let m = BitMatrix::from_fn(source.count(k), target.count(k), |i, j| assignment[k][i] == Some(j));
                (k as i64, m)
            })
            .collect();
        let push = ComplexMap::new(cx.complex(), cy.complex(), maps)?;
        if !check_equivariant(&push, &cx, &cy)? {
            return Err(Error::NotEquivariant("simplex assignment is not equivariant".into()));
        }
        Ok(EquivariantMap { source: source.clone(), target: target.clone(), assignment, push })
    }

    pub fn source(&self) -> &SimplicialGSet {
        &self.source
    }

    pub fn target(&self) -> &SimplicialGSet {
        &self.target
    }

    pub fn image(&self, k: usize, i: usize) -> Option<usize> {
        self.assignment[k][i]
    }

    /// `f_*` on chains.
    pub fn pushforward(&self) -> &ComplexMap {
        &self.push
    }

    /// `f^*` on cochains, the transpose of `f_*`.
    pub fn pullback(&self) -> ComplexMap {
        let maps = self.source.chains().complex().degrees().map(|k| (k, self.push.matrix(k).transpose())).collect();
        ComplexMap::new(self.target.cochains().complex(), self.source.cochains().complex(), maps)
            .expect("transpose of a chain map is a cochain map")
    }
}

fn cyclic_action(group: &FiniteGroup, counts: &[usize], step: &[usize]) -> Vec<Vec<Vec<usize>>> {
    group
        .elements()
        .map(|g| counts.iter().zip(step).map(|(&c, &s)| (0..c).map(|i| (i + g * s) % c).collect()).collect())
        .collect()
}

fn polygon(name: &str, group: &FiniteGroup, n: usize, step: usize) -> SimplicialGSet {
    let faces = vec![vec![vec![]; n], (0..n).map(|i| vec![(i + 1) % n, i]).collect()];
    let action = cyclic_action(group, &[n, n], &[step, step]);
    SimplicialGSet::new(name, group, vec![n, n], faces, action).expect("builtin polygon is valid")
}

impl SimplicialGSet {
    pub fn point() -> Self {
        Self::point_trivial(&FiniteGroup::trivial())
    }

    /// One vertex with `G` acting trivially.
    pub fn point_trivial(group: &FiniteGroup) -> Self {
        let action = vec![vec![vec![0]]; group.order()];
        Self::new("point", group, vec![1], vec![vec![vec![]]], action).expect("a point is valid")
    }

    /// A square `p1 → a → p2`, `p1 → b → p2` with `Z/2` swapping `a` and `b`
    /// and fixing `p1`, `p2`.
    pub fn reflection_circle() -> Self {
        let g = FiniteGroup::cyclic(2);
        // vertices p1, a, p2, b; edges p1→a, a→p2, p1→b, b→p2
        let faces = vec![vec![vec![]; 4], vec![vec![1, 0], vec![2, 1], vec![3, 0], vec![2, 3]]];
        let sigma = vec![vec![0, 3, 2, 1], vec![2, 3, 0, 1]];
        let action = vec![vec![(0..4).collect(), (0..4).collect()], sigma];
        Self::new("reflection_circle", &g, vec![4, 4], faces, action).expect("builtin is valid")
    }

    /// Four vertices in a cycle with `Z/2` rotating by half a turn.
    pub fn antipodal_circle() -> Self {
        polygon("antipodal_circle", &FiniteGroup::cyclic(2), 4, 2)
    }

    /// A triangle with `Z/3` rotating it.
    pub fn rotation_circle_z3() -> Self {
        polygon("rotation_circle_z3", &FiniteGroup::cyclic(3), 3, 1)
    }

    /// A square with `Z/4` rotating it.
    pub fn rotation_circle_z4() -> Self {
        polygon("rotation_circle_z4", &FiniteGroup::cyclic(4), 4, 1)
    }

    /// Four vertices in a cycle, trivial group.
    pub fn circle() -> Self {
        polygon("circle", &FiniteGroup::trivial(), 4, 0)
    }

    fn torus_with(name: &str, group: &FiniteGroup, swap: bool) -> Self {
        // one vertex; edges a, b, c; T1 = (a, c, b), T2 = (b, c, a)
        let faces = vec![vec![vec![]], vec![vec![0, 0]; 3], vec![vec![0, 2, 1], vec![1, 2, 0]]];
        let id = vec![vec![0], vec![0, 1, 2], vec![0, 1]];
        let sw = vec![vec![0], vec![1, 0, 2], vec![1, 0]];
        let action = group.elements().map(|g| if swap && g == 1 { sw.clone() } else { id.clone() }).collect();
        Self::new(name, group, vec![1, 3, 2], faces, action).expect("builtin torus is valid")
    }

    /// One vertex, three edges, two triangles; trivial group.
    pub fn torus() -> Self {
        Self::torus_with("torus", &FiniteGroup::trivial(), false)
    }

    /// The torus with `Z/2` exchanging the two circle factors.
    pub fn torus_swap() -> Self {
        Self::torus_with("torus_swap", &FiniteGroup::cyclic(2), true)
    }

    pub fn two_reflection_circles() -> Self {
        let c = Self::reflection_circle();
        c.disjoint_union(&c, "two_reflection_circles").expect("same group")
    }

    pub fn two_circles() -> Self {
        let c = Self::circle();
        c.disjoint_union(&c, "two_circles").expect("same group")
    }

    pub fn subdivided_reflection_circle() -> Self {
        let mut s = Self::reflection_circle().subdivide().expect("subdivision of a valid set");
        s.name = "subdivided_reflection_circle".into();
        s
    }
}

/// Names accepted by [`builtin`].
pub const BUILTINS: &[&str] = &[
    "antipodal_circle",
    "circle",
    "point",
    "point_z2",
    "point_z3",
    "point_z4",
    "reflection_circle",
    "rotation_circle_z3",
    "rotation_circle_z4",
    "subdivided_reflection_circle",
    "torus",
    "torus_swap",
    "two_circles",
    "two_reflection_circles",
];

pub fn builtin(name: &str) -> Result<SimplicialGSet> {
    Ok(match name {
        "antipodal_circle" => SimplicialGSet::antipodal_circle(),
        "circle" => SimplicialGSet::circle(),
        "point" => SimplicialGSet::point(),
        "point_z2" => SimplicialGSet::point_trivial(&FiniteGroup::cyclic(2)),
        "point_z3" => SimplicialGSet::point_trivial(&FiniteGroup::cyclic(3)),
        "point_z4" => SimplicialGSet::point_trivial(&FiniteGroup::cyclic(4)),
        "reflection_circle" => SimplicialGSet::reflection_circle(),
        "rotation_circle_z3" => SimplicialGSet::rotation_circle_z3(),
        "rotation_circle_z4" => SimplicialGSet::rotation_circle_z4(),
        "subdivided_reflection_circle" => SimplicialGSet::subdivided_reflection_circle(),
        "torus" => SimplicialGSet::torus(),
        "torus_swap" => SimplicialGSet::torus_swap(),
        "two_circles" => SimplicialGSet::two_circles(),
        "two_reflection_circles" => SimplicialGSet::two_reflection_circles(),
        other => return Err(Error::UnknownBuiltin(other.into())),
    })
}

/// The fold `X ⊔ X → X` for a space built by [`SimplicialGSet::disjoint_union`] of `x` with itself.
pub fn fold_map(x: &SimplicialGSet, doubled: &SimplicialGSet) -> Result<EquivariantMap> {
    let assignment = (0..doubled.counts.len())
        .map(|k| (0..doubled.count(k)).map(|i| Some(i % x.count(k).max(1))).collect())
        .collect();
    EquivariantMap::new(doubled, x, assignment)
}

/// The map sending every vertex to the vertex `v` and every other simplex to
/// a degenerate one. `v` must be fixed by the group.
pub fn constant_map(x: &SimplicialGSet, y: &SimplicialGSet, v: usize) -> Result<EquivariantMap> {
    let assignment = (0..x.counts.len())
        .map(|k| (0..x.count(k)).map(|_| if k == 0 { Some(v) } else { None }).collect())
        .collect();
    EquivariantMap::new(x, y, assignment)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn homology_dims(x: &SimplicialGSet) -> Vec<usize> {
        let c = x.chains();
        (0..=x.dim() as i64).map(|k| c.complex().homology_dim(k)).collect()
    }

    #[test]
    fn builtins_load_with_expected_homology() {
        let table: &[(&str, &[usize])] = &[
            ("point", &[1]),
            ("reflection_circle", &[1, 1]),
            ("antipodal_circle", &[1, 1]),
            ("rotation_circle_z3", &[1, 1]),
            ("torus", &[1, 2, 1]),
            ("torus_swap", &[1, 2, 1]),
            ("two_reflection_circles", &[2, 2]),
            ("subdivided_reflection_circle", &[1, 1]),
        ];
        for (name, dims) in table {
            assert_eq!(homology_dims(&builtin(name).unwrap()), *dims, "{name}");
        }
        assert!(matches!(builtin("klein_bottle"), Err(Error::UnknownBuiltin(_))));
    }

    #[test]
    fn reflection_fixes_the_poles() {
        let x = SimplicialGSet::reflection_circle();
        assert_eq!(x.act(1, 0, 0), 0);
        assert_eq!(x.act(1, 0, 2), 2);
        assert_eq!(x.act(1, 0, 1), 3);
    }

    #[test]
    fn rejects_action_that_breaks_faces() {
        let g = FiniteGroup::cyclic(2);
        let faces = vec![vec![vec![]; 2], vec![vec![1, 0]]];
        let action = vec![vec![vec![0, 1], vec![0]], vec![vec![1, 0], vec![0]]];
        assert!(SimplicialGSet::new("bad", &g, vec![2, 1], faces, action).is_err());
    }

    #[test]
    fn subdivision_counts() {
        let sd = SimplicialGSet::torus().subdivide().unwrap();
        assert_eq!(sd.count(0), 1 + 3 + 2);
        assert_eq!(sd.count(2), 12);
        assert_eq!(homology_dims(&sd), vec![1, 2, 1]);
    }

    #[test]
    fn fold_is_onto_in_degree_zero() {
        let x = SimplicialGSet::reflection_circle();
        let f = fold_map(&x, &SimplicialGSet::two_reflection_circles()).unwrap();
        assert_eq!(f.pushforward().on_homology(0).rank(), 1);
    }

    #[test]
    fn constant_map_kills_positive_cohomology() {
        let x = SimplicialGSet::reflection_circle();
        let f = constant_map(&x, &x, 0).unwrap();
        assert!(f.pullback().on_homology(1).is_zero());
        assert_eq!(f.pullback().on_homology(0).rank(), 1);
    }

    #[test]
    fn fundamental_class_is_invariant() {
        assert_eq!(SimplicialGSet::reflection_circle().fundamental_class().unwrap().count_ones(), 4);
        assert_eq!(SimplicialGSet::torus_swap().fundamental_class().unwrap().count_ones(), 2);
    }
}
