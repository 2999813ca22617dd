//! Z/2 boundary algebra on plaquette sets, the external edge-boundary
//! construction `Π(A)`, hole filling, separation, and limits of `Π(W_n)`
//! along nested sequences.
//!
//! "Infinity" is the boundary of an explicit [`Window`]. A set `A` lying in
//! `B_{m-1}` (one layer inside the window `B_m`) reaches infinity in `Z^d`
//! exactly when it reaches `∂B_m`, so every result here is exact for such `A`.

use std::collections::{BTreeMap, BTreeSet, HashMap, HashSet, VecDeque};

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::geometry::{Cuboid, FacetKey, Lattice, LatticeBox, Vertex};

/// A finite set of plaquettes of one lattice.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct PlaquetteSet {
    items: BTreeSet<FacetKey>,
}

impl PlaquetteSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn try_from_iter(it: impl IntoIterator<Item = FacetKey>) -> Result<Self> {
        let mut set = Self::new();
        for p in it {
            set.insert(p)?;
        }
        Ok(set)
    }

    fn check(&self, p: &FacetKey) -> Result<()> {
        if !p.is_plaquette() {
            return Err(Error::NotAPlaquette);
        }
        if let Some(first) = self.items.first() {
            if first.lattice() != p.lattice() {
                return Err(Error::LatticeMismatch(first.lattice(), p.lattice()));
            }
            if first.ambient_dim() != p.ambient_dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.ambient_dim(),
                    got: p.ambient_dim(),
                });
            }
        }
        Ok(())
    }

    /// Returns whether the plaquette was newly inserted.
    pub fn insert(&mut self, p: FacetKey) -> Result<bool> {
        self.check(&p)?;
        Ok(self.items.insert(p))
    }

    pub fn remove(&mut self, p: &FacetKey) -> bool {
        self.items.remove(p)
    }

    pub fn contains(&self, p: &FacetKey) -> bool {
        self.items.contains(p)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &FacetKey> + '_ {
        self.items.iter()
    }

    pub fn lattice(&self) -> Option<Lattice> {
        self.items.first().map(|p| p.lattice())
    }

    pub fn symmetric_difference(&self, other: &PlaquetteSet) -> Result<PlaquetteSet> {
        PlaquetteSet::try_from_iter(self.items.symmetric_difference(&other.items).copied())
    }

    pub fn is_subset(&self, other: &PlaquetteSet) -> bool {
        self.items.is_subset(&other.items)
    }

    pub fn retain(&mut self, f: impl FnMut(&FacetKey) -> bool) {
        self.items.retain(f)
    }

    pub(crate) fn from_set_unchecked(items: BTreeSet<FacetKey>) -> Self {
        PlaquetteSet { items }
    }
}

impl<'a> IntoIterator for &'a PlaquetteSet {
    type Item = &'a FacetKey;
    type IntoIter = std::collections::btree_set::Iter<'a, FacetKey>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// A finite set of vertices of `Z^d`.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct VertexSet {
    items: BTreeSet<Vertex>,
}

impl VertexSet {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn try_from_iter(it: impl IntoIterator<Item = Vertex>) -> Result<Self> {
        let mut set = Self::new();
        for v in it {
            set.insert(v)?;
        }
        Ok(set)
    }

    pub fn from_coords(points: &[&[i32]]) -> Result<Self> {
        Self::try_from_iter(points.iter().map(|c| Vertex::new(c)).collect::<Result<Vec<_>>>()?)
    }

    pub fn insert(&mut self, v: Vertex) -> Result<bool> {
        if let Some(first) = self.items.first() {
            if first.dim() != v.dim() {
                return Err(Error::DimensionMismatch {
                    expected: first.dim(),
                    got: v.dim(),
                });
            }
        }
        Ok(self.items.insert(v))
    }

    pub fn remove(&mut self, v: &Vertex) -> bool {
        self.items.remove(v)
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.items.contains(v)
    }

    pub fn len(&self) -> usize {
        self.items.len()
    }

    pub fn is_empty(&self) -> bool {
        self.items.is_empty()
    }

    pub fn iter(&self) -> impl Iterator<Item = &Vertex> + '_ {
        self.items.iter()
    }

    pub fn dim(&self) -> Option<usize> {
        self.items.first().map(|v| v.dim())
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.items.is_subset(&other.items)
    }

    pub fn union(&self, other: &VertexSet) -> Result<VertexSet> {
        VertexSet::try_from_iter(self.items.union(&other.items).copied())
    }

    pub fn first(&self) -> Option<&Vertex> {
        self.items.first()
    }

    /// Connected in the nearest-neighbour lattice. The empty set is not.
    pub fn is_connected(&self) -> bool {
        let Some(&start) = self.items.first() else {
            return false;
        };
        let mut seen = HashSet::from([start]);
        let mut queue = VecDeque::from([start]);
        while let Some(x) = queue.pop_front() {
            for y in x.neighbors() {
                if self.items.contains(&y) && seen.insert(y) {
                    queue.push_back(y);
                }
            }
        }
        seen.len() == self.items.len()
    }

    pub(crate) fn from_set_unchecked(items: BTreeSet<Vertex>) -> Self {
        VertexSet { items }
    }
}

impl<'a> IntoIterator for &'a VertexSet {
    type Item = &'a Vertex;
    type IntoIter = std::collections::btree_set::Iter<'a, Vertex>;
    fn into_iter(self) -> Self::IntoIter {
        self.items.iter()
    }
}

/// The box `B_m` standing in for `Z^d`; its boundary is "infinity".
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Window {
    pub bx: LatticeBox,
}

impl Window {
    pub fn new(d: usize, m: u32) -> Result<Self> {
        Ok(Window {
            bx: LatticeBox::new(d, m)?,
        })
    }

    /// Smallest window holding `a` with a margin of one layer.
    pub fn fitting(a: &VertexSet, margin: u32) -> Result<Self> {
        let d = a
            .dim()
            .ok_or_else(|| Error::InvalidParameter("empty vertex set".into()))?;
        Window::new(d, Self::radius_needed(a) + margin.max(1))
    }

    /// Smallest `r` with `a ⊆ B_r`.
    fn radius_needed(a: &VertexSet) -> u32 {
        a.iter()
            .flat_map(|v| {
                v.coords()
                    .iter()
                    .map(|&c| if c > 0 { c as u32 } else { (1 - c) as u32 })
            })
            .max()
            .unwrap_or(1)
    }

    /// Requires `a ⊆ B_{m-1}`.
    pub fn check(&self, a: &VertexSet) -> Result<()> {
        if let Some(d) = a.dim() {
            if d != self.bx.d {
                return Err(Error::DimensionMismatch {
                    expected: self.bx.d,
                    got: d,
                });
            }
        }
        let need = Self::radius_needed(a) + 1;
        if need > self.bx.n {
            return Err(Error::WindowTooSmall { need, have: self.bx.n });
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Adjacency {
    /// `~`: sharing a (d-2)-facet.
    Face,
    /// `~1`: sharing a 1-facet.
    Edge,
}

/// (d-2)-facets incident to an odd number of plaquettes of `p`.
pub fn boundary(p: &PlaquetteSet) -> BTreeSet<FacetKey> {
    let mut odd: HashSet<FacetKey> = HashSet::new();
    for q in p {
        for f in q.faces() {
            if !odd.remove(&f) {
                odd.insert(f);
            }
        }
    }
    odd.into_iter().collect()
}

/// Connected components under the chosen adjacency, ordered by their
/// smallest plaquette.
pub fn components(p: &PlaquetteSet, adjacency: Adjacency) -> Vec<PlaquetteSet> {
    let items: Vec<FacetKey> = p.iter().copied().collect();
    if items.is_empty() {
        return Vec::new();
    }
    let d = items[0].ambient_dim();
    let key_dim = match adjacency {
        Adjacency::Face => d - 2,
        Adjacency::Edge => 1,
    };
    let mut uf = UnionFind::new(items.len());
    if key_dim < d {
        let mut owner: HashMap<FacetKey, usize> = HashMap::new();
        for (i, q) in items.iter().enumerate() {
            let keys = if key_dim == d - 2 {
                q.faces().collect()
            } else {
                q.subfacets(key_dim).expect("key dimension below plaquette dimension")
            };
            for f in keys {
                match owner.get(&f) {
                    Some(&j) => {
                        uf.union(i, j);
                    }
                    None => {
                        owner.insert(f, i);
                    }
                }
            }
        }
    }
    let (labels, k) = uf.labels();
    let mut parts = vec![BTreeSet::new(); k];
    for (q, l) in items.into_iter().zip(labels) {
        parts[l as usize].insert(q);
    }
    parts.into_iter().map(PlaquetteSet::from_set_unchecked).collect()
}

/// Nonempty, `~`-connected, and with empty boundary.
pub fn is_surface(p: &PlaquetteSet) -> bool {
    !p.is_empty() && boundary(p).is_empty() && components(p, Adjacency::Face).len() == 1
}

const IN_A: u8 = 0;
const OUTSIDE: u8 = 1;
const HOLE: u8 = 2;

/// Exterior reachability of a finite vertex set, computed on its bounding
/// box grown by one layer: every vertex outside the bounding box reaches
/// infinity off `A`.
pub(crate) struct Exterior {
    region: Cuboid,
    state: Vec<u8>,
}

impl Exterior {
    pub(crate) fn of(a: &VertexSet) -> Option<Exterior> {
        let region = Cuboid::bounding(a.iter())?.expanded(1);
        let mut state = vec![HOLE; region.len()];
        for v in a {
            state[region.index(v)] = IN_A;
        }
        let mut queue = VecDeque::new();
        for (i, v) in region.iter().enumerate() {
            if region.on_face(&v) {
                state[i] = OUTSIDE;
                queue.push_back(i);
            }
        }
        while let Some(i) = queue.pop_front() {
            let v = region.vertex(i);
            for axis in 0..region.dim() {
                for dir in [-1, 1] {
                    if let Some(j) = region.step(&v, i, axis, dir) {
                        if state[j] == HOLE {
                            state[j] = OUTSIDE;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        Some(Exterior { region, state })
    }

    /// `v ∉ A` and `v` is joined to infinity off `A`.
    pub(crate) fn is_outside(&self, v: &Vertex) -> bool {
        self.region.try_index(v).is_none_or(|i| self.state[i] == OUTSIDE)
    }

    fn holes(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.state
            .iter()
            .enumerate()
            .filter(|(_, &s)| s == HOLE)
            .map(|(i, _)| self.region.vertex(i))
    }
}

/// `Δ_e A`: edges `<x, y>` with `x ∈ A` and `y` outside `A`, adjacent to `A`,
/// and joined to infinity off `A`.
pub fn external_boundary_edges(a: &VertexSet, w: &Window) -> Result<BTreeSet<FacetKey>> {
    w.check(a)?;
    let Some(ext) = Exterior::of(a) else {
        return Ok(BTreeSet::new());
    };
    Ok(boundary_edges_with(a, &ext))
}

fn boundary_edges_with(a: &VertexSet, ext: &Exterior) -> BTreeSet<FacetKey> {
    let mut out = BTreeSet::new();
    for x in a {
        for axis in 0..x.dim() {
            let down = x.shifted(axis, -1);
            if ext.is_outside(&down) {
                out.insert(FacetKey::edge(&down, axis));
            }
            if ext.is_outside(&x.shifted(axis, 1)) {
                out.insert(FacetKey::edge(x, axis));
            }
        }
    }
    out
}

/// `Π(A)`: the plaquettes dual to the external edge-boundary of `A`.
pub fn pi_of(a: &VertexSet, w: &Window) -> Result<PlaquetteSet> {
    let edges = external_boundary_edges(a, w)?;
    Ok(PlaquetteSet::from_set_unchecked(
        edges.iter().map(FacetKey::dual).collect(),
    ))
}

/// `Ā`: `A` together with its holes (finite components of the complement).
pub fn fill_holes(a: &VertexSet, w: &Window) -> Result<VertexSet> {
    w.check(a)?;
    let Some(ext) = Exterior::of(a) else {
        return Ok(VertexSet::new());
    };
    let mut items: BTreeSet<Vertex> = a.iter().copied().collect();
    items.extend(ext.holes());
    Ok(VertexSet::from_set_unchecked(items))
}

/// Plaquettes dual to edges with exactly one endpoint in `A`.
pub fn cut_plaquettes(a: &VertexSet) -> PlaquetteSet {
    let mut out = BTreeSet::new();
    for x in a {
        for axis in 0..x.dim() {
            let down = x.shifted(axis, -1);
            if !a.contains(&down) {
                out.insert(FacetKey::edge(&down, axis).dual());
            }
            if !a.contains(&x.shifted(axis, 1)) {
                out.insert(FacetKey::edge(x, axis).dual());
            }
        }
    }
    PlaquetteSet::from_set_unchecked(out)
}

/// Whether every path from `A` to the window boundary uses an edge whose
/// dual plaquette lies in `p`.
pub fn separates_from_infinity(p: &PlaquetteSet, a: &VertexSet, w: &Window) -> Result<bool> {
    w.check(a)?;
    if a.is_empty() {
        return Ok(true);
    }
    let blocked: HashSet<FacetKey> = p
        .iter()
        .filter(|q| q.lattice() == Lattice::Dual)
        .map(FacetKey::dual)
        .filter(|e| e.ambient_dim() == w.bx.d)
        .collect();
    let mut ends: Vec<Vertex> = a.iter().copied().collect();
    for e in &blocked {
        let (x, y) = e.edge_endpoints()?;
        ends.push(x);
        ends.push(y);
    }
    let region = Cuboid::bounding(ends.iter())
        .expect("nonempty")
        .expanded(1)
        .intersect(&w.bx.cuboid())
        .expect("A lies in the window");
    let mut seen = vec![false; region.len()];
    let mut queue = VecDeque::new();
    for x in a {
        let i = region.index(x);
        seen[i] = true;
        queue.push_back(i);
    }
    while let Some(i) = queue.pop_front() {
        let v = region.vertex(i);
        if region.on_face(&v) {
            return Ok(false);
        }
        for axis in 0..region.dim() {
            for dir in [-1, 1] {
                let Some(j) = region.step(&v, i, axis, dir) else {
                    continue;
                };
                if seen[j] {
                    continue;
                }
                let lo = if dir > 0 { v } else { v.shifted(axis, -1) };
                if blocked.contains(&FacetKey::edge(&lo, axis)) {
                    continue;
                }
                seen[j] = true;
                queue.push_back(j);
            }
        }
    }
    Ok(true)
}

/// Presence pattern of a plaquette along `Π(W_1), Π(W_2), ...` (steps count
/// from 1).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PlaquetteClass {
    Never,
    /// In `Π(W_n)` iff `n >= from`.
    AppearsAndStays {
        from: usize,
    },
    /// In `Π(W_n)` iff `from <= n < until`.
    AppearsThenLeaves {
        from: usize,
        until: usize,
    },
}

#[derive(Clone, Debug)]
pub struct LimitReport {
    pub steps: usize,
    /// Plaquettes present from some step up to the last one.
    pub limit_set: PlaquetteSet,
    classes: BTreeMap<FacetKey, PlaquetteClass>,
}

impl LimitReport {
    pub fn class_of(&self, p: &FacetKey) -> PlaquetteClass {
        self.classes.get(p).copied().unwrap_or(PlaquetteClass::Never)
    }

    pub fn classes(&self) -> impl Iterator<Item = (&FacetKey, &PlaquetteClass)> + '_ {
        self.classes.iter()
    }

    /// Members of the limit set present since step `since` or earlier.
    pub fn settled(&self, since: usize) -> PlaquetteSet {
        let items = self
            .classes
            .iter()
            .filter(|(_, c)| matches!(c, PlaquetteClass::AppearsAndStays { from } if *from <= since))
            .map(|(p, _)| *p)
            .collect();
        PlaquetteSet::from_set_unchecked(items)
    }
}

/// Tracks `Π(W_n)` along a nested sequence of finite connected sets and
/// classifies every plaquette that ever appears.
pub fn pi_limit(seq: &[VertexSet], w: &Window) -> Result<LimitReport> {
    let mut classes: BTreeMap<FacetKey, PlaquetteClass> = BTreeMap::new();
    let mut prev: Option<PlaquetteSet> = None;
    for (i, wn) in seq.iter().enumerate() {
        let step = i + 1;
        if !wn.is_connected() {
            return Err(Error::NotConnected(step));
        }
        if i > 0 && !seq[i - 1].is_subset(wn) {
            return Err(Error::NotNested(step));
        }
        let current = pi_of(wn, w)?;
        for p in &current {
            match classes.get(p) {
                None => {
                    classes.insert(*p, PlaquetteClass::AppearsAndStays { from: step });
                }
                Some(PlaquetteClass::AppearsAndStays { .. }) => {}
                Some(_) => return Err(Error::TrichotomyViolation(p.to_string())),
            }
        }
        if let Some(prev) = &prev {
            for p in prev.iter().filter(|p| !current.contains(p)) {
                if let Some(PlaquetteClass::AppearsAndStays { from }) = classes.get(p).copied() {
                    classes.insert(*p, PlaquetteClass::AppearsThenLeaves { from, until: step });
                }
            }
        }
        prev = Some(current);
    }
    Ok(LimitReport {
        steps: seq.len(),
        limit_set: prev.unwrap_or_default(),
        classes,
    })
}

/// Outcome of checking one connected set against the structural properties
/// of `Π(A)`.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct LemmaCheck {
    pub surface: bool,
    pub separates: bool,
    /// Removing any one plaquette breaks separation; `None` when not checked.
    pub minimal: Option<bool>,
    /// `Π(Ā) = Π(A)`.
    pub fill_invariant: bool,
}

impl LemmaCheck {
    pub fn passed(&self) -> bool {
        self.surface && self.separates && self.minimal != Some(false) && self.fill_invariant
    }
}

/// Checks `Π(A)` for a finite connected `A` in a window of margin `margin`
/// around it.
pub fn lemma_check(a: &VertexSet, margin: u32, minimality: bool) -> Result<LemmaCheck> {
    if !a.is_connected() {
        return Err(Error::NotConnected(1));
    }
    let w = Window::fitting(a, margin)?;
    let pi = pi_of(a, &w)?;
    let separates = separates_from_infinity(&pi, a, &w)?;
    let minimal = if minimality {
        let mut all = true;
        for q in pi.iter() {
            let mut fewer = pi.clone();
            fewer.remove(q);
            if separates_from_infinity(&fewer, a, &w)? {
                all = false;
                break;
            }
        }
        Some(all)
    } else {
        None
    };
    let filled = fill_holes(a, &w)?;
    Ok(LemmaCheck {
        surface: is_surface(&pi),
        separates,
        minimal,
        fill_invariant: pi_of(&filled, &w)? == pi,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vs(points: &[&[i32]]) -> VertexSet {
        VertexSet::from_coords(points).unwrap()
    }

    fn cube_shell(centre: &[i32]) -> PlaquetteSet {
        let c = Vertex::new(centre).unwrap();
        PlaquetteSet::try_from_iter(FacetKey::dual_cube(&c).faces()).unwrap()
    }

    fn solid(lo: i32, hi: i32) -> VertexSet {
        let c = Cuboid::new(&Vertex::new(&[lo; 3]).unwrap(), &Vertex::new(&[hi; 3]).unwrap()).unwrap();
        VertexSet::try_from_iter(c.iter()).unwrap()
    }

    #[test]
    fn boundary_of_single_plaquette_is_its_sides() {
        let p = FacetKey::edge(&Vertex::origin(3).unwrap(), 0).dual();
        let set = PlaquetteSet::try_from_iter([p]).unwrap();
        let b = boundary(&set);
        assert_eq!(b.len(), 4);
        assert!(b.iter().all(|f| p.contains(f)));
        assert!(!is_surface(&set));
    }

    #[test]
    fn cube_shell_is_a_surface() {
        let shell = cube_shell(&[0, 0, 0]);
        assert!(boundary(&shell).is_empty());
        assert!(is_surface(&shell));
        let comps = components(&shell, Adjacency::Face);
        assert_eq!(comps.len(), 1);
        assert_eq!(comps[0].len(), 6);
    }

    #[test]
    fn two_adjacent_plaquettes_have_six_boundary_facets() {
        let o = Vertex::origin(3).unwrap();
        let p = FacetKey::edge(&o, 0).dual();
        let q = FacetKey::edge(&o, 1).dual();
        assert!(crate::geometry::plaquettes_adjacent(&p, &q).unwrap());
        let set = PlaquetteSet::try_from_iter([p, q]).unwrap();
        assert_eq!(boundary(&set).len(), 6);
    }

    #[test]
    fn disjoint_shells_are_not_a_surface() {
        let mut both = cube_shell(&[0, 0, 0]);
        for p in cube_shell(&[3, 0, 0]).iter() {
            both.insert(*p).unwrap();
        }
        assert!(boundary(&both).is_empty());
        assert!(!is_surface(&both));
        assert_eq!(components(&both, Adjacency::Face).len(), 2);
        assert_eq!(components(&both, Adjacency::Edge).len(), 2);
        assert!(components(&PlaquetteSet::new(), Adjacency::Face).is_empty());
    }

    #[test]
    fn empty_set_conventions() {
        let w = Window::new(3, 3).unwrap();
        let empty = VertexSet::new();
        assert!(pi_of(&empty, &w).unwrap().is_empty());
        assert!(!is_surface(&PlaquetteSet::new()));
    }

    #[test]
    fn plaquette_sets_reject_mixed_members() {
        let o = Vertex::origin(3).unwrap();
        let mut set = PlaquetteSet::new();
        set.insert(FacetKey::edge(&o, 0).dual()).unwrap();
        assert!(set.insert(FacetKey::edge(&o, 0)).is_err());
        let primal_plaquette = FacetKey::new(Lattice::Primal, &[0, 0, 0], 0b011).unwrap();
        assert!(matches!(set.insert(primal_plaquette), Err(Error::LatticeMismatch(..))));
    }

    #[test]
    fn single_vertex_and_domino() {
        let w = Window::new(3, 4).unwrap();
        let a = vs(&[&[0, 0, 0]]);
        assert_eq!(external_boundary_edges(&a, &w).unwrap().len(), 6);
        let pi = pi_of(&a, &w).unwrap();
        assert_eq!(pi, cube_shell(&[0, 0, 0]));

        let domino = vs(&[&[0, 0, 0], &[1, 0, 0]]);
        assert_eq!(external_boundary_edges(&domino, &w).unwrap().len(), 10);
        let pi = pi_of(&domino, &w).unwrap();
        assert_eq!(pi.len(), 10);
        assert!(is_surface(&pi));
    }

    #[test]
    fn hollow_cube_excludes_its_centre() {
        let w = Window::new(3, 4).unwrap();
        let mut a = solid(-1, 1);
        a.remove(&Vertex::origin(3).unwrap());
        let edges = external_boundary_edges(&a, &w).unwrap();
        assert_eq!(edges.len(), 54);
        assert!(edges.iter().all(|e| {
            let (x, y) = e.edge_endpoints().unwrap();
            x.linf_norm() > 0 && y.linf_norm() > 0
        }));
        let filled = fill_holes(&a, &w).unwrap();
        assert_eq!(filled, solid(-1, 1));
    }

    #[test]
    fn hollow_five_cube_fills_and_keeps_pi() {
        let w = Window::new(3, 5).unwrap();
        let full = solid(-2, 2);
        let shell = VertexSet::try_from_iter(full.iter().copied().filter(|v| v.linf_norm() == 2)).unwrap();
        let filled = fill_holes(&shell, &w).unwrap();
        assert_eq!(filled, full);
        assert_eq!(pi_of(&filled, &w).unwrap(), pi_of(&shell, &w).unwrap());
        assert_eq!(cut_plaquettes(&filled), pi_of(&filled, &w).unwrap());
    }

    #[test]
    fn window_too_small() {
        let w = Window::new(3, 2).unwrap();
        let a = vs(&[&[0, 0, 0], &[2, 0, 0]]);
        assert!(matches!(pi_of(&a, &w), Err(Error::WindowTooSmall { .. })));
        let a = vs(&[&[0, 0, 0], &[-1, 0, 0]]);
        assert!(matches!(pi_of(&a, &w), Err(Error::WindowTooSmall { .. })));
        let a = vs(&[&[1, 1, 1], &[0, 0, 0]]);
        assert!(pi_of(&a, &w).is_ok());
    }

    #[test]
    fn separation_examples() {
        let w = Window::new(3, 4).unwrap();
        let a = vs(&[&[0, 0, 0], &[0, 1, 0]]);
        let pi = pi_of(&a, &w).unwrap();
        assert!(separates_from_infinity(&pi, &a, &w).unwrap());
        for p in pi.iter() {
            let mut broken = pi.clone();
            broken.remove(p);
            assert!(!separates_from_infinity(&broken, &a, &w).unwrap());
        }
        assert!(!separates_from_infinity(&PlaquetteSet::new(), &a, &w).unwrap());
    }

    #[test]
    fn limit_of_constant_sequence() {
        let w = Window::new(3, 3).unwrap();
        let a = vs(&[&[0, 0, 0]]);
        let report = pi_limit(&[a.clone(), a.clone(), a.clone()], &w).unwrap();
        assert_eq!(report.limit_set, cube_shell(&[0, 0, 0]));
        for p in report.limit_set.iter() {
            assert_eq!(report.class_of(p), PlaquetteClass::AppearsAndStays { from: 1 });
        }
    }

    #[test]
    fn limit_of_growing_boxes_is_empty_inside() {
        let w = Window::new(3, 6).unwrap();
        let seq: Vec<VertexSet> = (0..5).map(|k| solid(-k, k)).collect();
        let report = pi_limit(&seq, &w).unwrap();
        // everything seen before the last step has left
        assert!(report.settled(seq.len() - 1).is_empty());
        for (_, c) in report.classes() {
            assert!(!matches!(c, PlaquetteClass::Never));
        }
    }

    #[test]
    fn limit_rejects_bad_sequences() {
        let w = Window::new(3, 4).unwrap();
        let a = vs(&[&[0, 0, 0]]);
        let b = vs(&[&[1, 1, 1]]);
        assert_eq!(pi_limit(&[a.clone(), b], &w).unwrap_err(), Error::NotNested(2));
        let gap = vs(&[&[0, 0, 0], &[2, 0, 0]]);
        assert_eq!(pi_limit(&[a, gap], &w).unwrap_err(), Error::NotConnected(2));
    }
}
