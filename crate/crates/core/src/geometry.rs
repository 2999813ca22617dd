//! Facets of the hypercubic lattice `Z^d` and of the shifted lattice
//! `Z^d + h`, `h = (1/2, ..., 1/2)`.
//!
//! A facet is `x + (A_1 x ... x A_d)` with each `A_i` either `{0}` or `{0, 1}`.
//! [`FacetKey`] stores the minimal corner and the set of axes where the facet
//! extends. Dual corners are kept as their integer part, so `h` never appears
//! as a float; [`FacetKey::doubled_corner`] and [`FacetKey::doubled_centre`]
//! give exact coordinates in units of one half.

use std::fmt;

use crate::error::{Error, Result};

pub const MIN_DIM: usize = 2;
pub const MAX_DIM: usize = 8;

pub(crate) fn check_dim(d: usize) -> Result<()> {
    if (MIN_DIM..=MAX_DIM).contains(&d) {
        Ok(())
    } else {
        Err(Error::InvalidDimension(d))
    }
}

/// A point of `Z^d`.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Vertex {
    d: u8,
    coords: [i32; MAX_DIM],
}

impl Vertex {
    pub fn new(coords: &[i32]) -> Result<Self> {
        check_dim(coords.len())?;
        let mut c = [0; MAX_DIM];
        c[..coords.len()].copy_from_slice(coords);
        Ok(Vertex {
            d: coords.len() as u8,
            coords: c,
        })
    }

    pub fn origin(d: usize) -> Result<Self> {
        check_dim(d)?;
        Ok(Vertex {
            d: d as u8,
            coords: [0; MAX_DIM],
        })
    }

    /// Unit vector `u_axis` (axes are numbered from zero).
    pub fn unit(d: usize, axis: usize) -> Result<Self> {
        let mut v = Vertex::origin(d)?;
        if axis >= d {
            return Err(Error::InvalidParameter(format!("axis {axis} in dimension {d}")));
        }
        v.coords[axis] = 1;
        Ok(v)
    }

    pub(crate) fn from_array(d: usize, coords: [i32; MAX_DIM]) -> Self {
        debug_assert!(coords[d..].iter().all(|&c| c == 0));
        Vertex { d: d as u8, coords }
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn coords(&self) -> &[i32] {
        &self.coords[..self.dim()]
    }

    #[inline]
    pub fn coord(&self, axis: usize) -> i32 {
        self.coords[axis]
    }

    #[inline]
    pub fn shifted(&self, axis: usize, delta: i32) -> Vertex {
        let mut v = *self;
        v.coords[axis] += delta;
        v
    }

    pub fn offset_by(&self, delta: &[i32]) -> Vertex {
        let mut v = *self;
        for (c, dc) in v.coords.iter_mut().zip(delta) {
            *c += dc;
        }
        v
    }

    pub fn linf_norm(&self) -> u32 {
        self.coords().iter().map(|c| c.unsigned_abs()).max().unwrap_or(0)
    }

    pub fn linf_distance(&self, other: &Vertex) -> u32 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a.abs_diff(*b))
            .max()
            .unwrap_or(0)
    }

    pub fn l1_distance(&self, other: &Vertex) -> u32 {
        self.coords()
            .iter()
            .zip(other.coords())
            .map(|(a, b)| a.abs_diff(*b))
            .sum()
    }

    /// `s(x) = x_1 + ... + x_d`.
    pub fn coord_sum(&self) -> i64 {
        self.coords().iter().map(|&c| c as i64).sum()
    }

    /// The `2d` nearest neighbours, ordered `-u_1, +u_1, -u_2, ...`.
    pub fn neighbors(&self) -> impl Iterator<Item = Vertex> + '_ {
        (0..self.dim()).flat_map(move |axis| [self.shifted(axis, -1), self.shifted(axis, 1)])
    }
}

impl fmt::Debug for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for Vertex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, c) in self.coords().iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, ")")
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Lattice {
    Primal,
    /// `Z^d + (1/2, ..., 1/2)`.
    Dual,
}

impl Lattice {
    pub fn other(self) -> Lattice {
        match self {
            Lattice::Primal => Lattice::Dual,
            Lattice::Dual => Lattice::Primal,
        }
    }

    #[inline]
    fn half_shift(self) -> i32 {
        match self {
            Lattice::Primal => 0,
            Lattice::Dual => 1,
        }
    }

    pub fn as_str(self) -> &'static str {
        match self {
            Lattice::Primal => "primal",
            Lattice::Dual => "dual",
        }
    }
}

/// Canonical key of a facet of either lattice.
///
/// Two keys are equal iff they denote the same point set.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct FacetKey {
    d: u8,
    lattice: Lattice,
    /// Integer part of the minimal corner.
    base: [i32; MAX_DIM],
    axes: u8,
}

impl FacetKey {
    /// `base` is the minimal corner for the primal lattice, and the minimal
    /// corner minus `h` for the dual lattice.
    pub fn new(lattice: Lattice, base: &[i32], axes: u8) -> Result<Self> {
        let d = base.len();
        check_dim(d)?;
        if d < 8 && axes >> d != 0 {
            return Err(Error::InvalidAxes { mask: axes as u16, d });
        }
        let mut b = [0; MAX_DIM];
        b[..d].copy_from_slice(base);
        Ok(FacetKey {
            d: d as u8,
            lattice,
            base: b,
            axes,
        })
    }

    /// Builds a key from the minimal corner in doubled coordinates (even for
    /// the primal lattice, odd for the dual one).
    pub fn from_doubled_corner(lattice: Lattice, doubled: &[i32], axes: u8) -> Result<Self> {
        let shift = lattice.half_shift();
        if doubled.iter().any(|c| c.rem_euclid(2) != shift) {
            return Err(Error::Parity(lattice));
        }
        let base: Vec<i32> = doubled.iter().map(|c| (c - shift).div_euclid(2)).collect();
        FacetKey::new(lattice, &base, axes)
    }

    /// The 0-facet `{v}` of the primal lattice.
    pub fn vertex(v: &Vertex) -> FacetKey {
        FacetKey {
            d: v.d,
            lattice: Lattice::Primal,
            base: v.coords,
            axes: 0,
        }
    }

    /// The primal edge `<x, x + u_axis>`.
    pub fn edge(x: &Vertex, axis: usize) -> FacetKey {
        debug_assert!(axis < x.dim());
        FacetKey {
            d: x.d,
            lattice: Lattice::Primal,
            base: x.coords,
            axes: 1 << axis,
        }
    }

    /// The primal edge joining two nearest neighbours.
    pub fn edge_between(x: &Vertex, y: &Vertex) -> Result<FacetKey> {
        if x.dim() != y.dim() {
            return Err(Error::DimensionMismatch {
                expected: x.dim(),
                got: y.dim(),
            });
        }
        if x.l1_distance(y) != 1 {
            return Err(Error::NotAnEdge);
        }
        let axis = (0..x.dim()).find(|&i| x.coord(i) != y.coord(i)).unwrap();
        let lo = if x.coord(axis) < y.coord(axis) { x } else { y };
        Ok(FacetKey::edge(lo, axis))
    }

    /// The dual d-cube `v + {-1/2, 1/2}^d` centred on a primal vertex.
    pub fn dual_cube(v: &Vertex) -> FacetKey {
        FacetKey::vertex(v).dual()
    }

    #[inline]
    pub fn ambient_dim(&self) -> usize {
        self.d as usize
    }

    #[inline]
    pub fn lattice(&self) -> Lattice {
        self.lattice
    }

    /// Number of axes along which the facet extends.
    #[inline]
    pub fn dim(&self) -> usize {
        self.axes.count_ones() as usize
    }

    #[inline]
    pub fn axes(&self) -> u8 {
        self.axes
    }

    #[inline]
    pub fn has_axis(&self, axis: usize) -> bool {
        self.axes >> axis & 1 == 1
    }

    pub fn base(&self) -> &[i32] {
        &self.base[..self.ambient_dim()]
    }

    pub fn is_plaquette(&self) -> bool {
        self.dim() + 1 == self.ambient_dim()
    }

    pub fn is_primal_edge(&self) -> bool {
        self.lattice == Lattice::Primal && self.dim() == 1
    }

    pub fn doubled_corner(&self) -> Vec<i32> {
        let s = self.lattice.half_shift();
        self.base().iter().map(|b| 2 * b + s).collect()
    }

    /// Centre of mass in units of one half.
    pub fn doubled_centre(&self) -> Vec<i32> {
        let mut c = [0; MAX_DIM];
        self.doubled_centre_into(&mut c);
        c[..self.ambient_dim()].to_vec()
    }

    pub(crate) fn doubled_centre_into(&self, out: &mut [i32; MAX_DIM]) {
        let s = self.lattice.half_shift();
        for i in 0..self.ambient_dim() {
            out[i] = 2 * self.base[i] + s + (self.axes >> i & 1) as i32;
        }
    }

    /// The unique facet of the other lattice with the same centre of mass.
    ///
    /// Axes of `f` collapse to a point, the remaining axes open up to
    /// `{-1/2, 1/2}`.
    pub fn dual(&self) -> FacetKey {
        let d = self.ambient_dim();
        let mask = if d == 8 { 0xff } else { (1u8 << d) - 1 };
        let mut base = self.base;
        for (i, b) in base.iter_mut().enumerate().take(d) {
            let along = self.axes >> i & 1 == 1;
            match (self.lattice, along) {
                (Lattice::Primal, false) => *b -= 1,
                (Lattice::Dual, true) => *b += 1,
                _ => {}
            }
        }
        FacetKey {
            d: self.d,
            lattice: self.lattice.other(),
            base,
            axes: !self.axes & mask,
        }
    }

    /// Both endpoints of a primal edge, lower one first.
    pub fn edge_endpoints(&self) -> Result<(Vertex, Vertex)> {
        if !self.is_primal_edge() {
            return Err(Error::NotAnEdge);
        }
        let axis = self.axes.trailing_zeros() as usize;
        let lo = Vertex {
            d: self.d,
            coords: self.base,
        };
        Ok((lo, lo.shifted(axis, 1)))
    }

    /// All `k`-facets contained in this facet.
    pub fn subfacets(&self, k: usize) -> Result<Vec<FacetKey>> {
        let dim = self.dim();
        if k > dim {
            return Err(Error::SubfacetDimension { k, dim });
        }
        let own: Vec<usize> = (0..self.ambient_dim()).filter(|&i| self.has_axis(i)).collect();
        let mut out = Vec::new();
        // choose which of the facet's axes to keep, then an offset 0/1 on each dropped one
        for keep in 0u32..(1 << dim) {
            if keep.count_ones() as usize != k {
                continue;
            }
            let dropped: Vec<usize> = (0..dim).filter(|j| keep >> j & 1 == 0).map(|j| own[j]).collect();
            let axes = (0..dim)
                .filter(|j| keep >> j & 1 == 1)
                .fold(0u8, |m, j| m | 1 << own[j]);
            for offs in 0u32..(1 << dropped.len()) {
                let mut base = self.base;
                for (t, &axis) in dropped.iter().enumerate() {
                    base[axis] += (offs >> t & 1) as i32;
                }
                out.push(FacetKey {
                    d: self.d,
                    lattice: self.lattice,
                    base,
                    axes,
                });
            }
        }
        Ok(out)
    }

    /// Subfacets of codimension one, `2 * dim` of them.
    pub(crate) fn faces(&self) -> impl Iterator<Item = FacetKey> + '_ {
        (0..self.ambient_dim())
            .filter(|&i| self.has_axis(i))
            .flat_map(move |axis| {
                let axes = self.axes & !(1 << axis);
                let lo = FacetKey { axes, ..*self };
                let mut hi = lo;
                hi.base[axis] += 1;
                [lo, hi]
            })
    }

    /// Intersection of two facets of the same lattice, if nonempty.
    pub fn intersection(&self, other: &FacetKey) -> Option<FacetKey> {
        if self.lattice != other.lattice || self.d != other.d {
            return None;
        }
        let mut base = [0; MAX_DIM];
        let mut axes = 0u8;
        for i in 0..self.ambient_dim() {
            let (a0, a1) = (self.base[i], self.base[i] + (self.axes >> i & 1) as i32);
            let (b0, b1) = (other.base[i], other.base[i] + (other.axes >> i & 1) as i32);
            let lo = a0.max(b0);
            let hi = a1.min(b1);
            if lo > hi {
                return None;
            }
            base[i] = lo;
            if hi > lo {
                axes |= 1 << i;
            }
        }
        Some(FacetKey {
            d: self.d,
            lattice: self.lattice,
            base,
            axes,
        })
    }

    /// True iff `other` is a subset of this facet.
    pub fn contains(&self, other: &FacetKey) -> bool {
        self.intersection(other).as_ref() == Some(other)
    }
}

impl fmt::Debug for FacetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl fmt::Display for FacetKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::format::facet_to_line(self))
    }
}

/// `pi(e)`: the plaquette of the dual lattice crossing the primal edge `e`.
pub fn pi_of_edge(e: &FacetKey) -> Result<FacetKey> {
    if !e.is_primal_edge() {
        return Err(Error::NotAnEdge);
    }
    Ok(e.dual())
}

pub fn dual_facet(f: &FacetKey) -> FacetKey {
    f.dual()
}

pub fn incident_subfacets(f: &FacetKey, k: usize) -> Result<Vec<FacetKey>> {
    f.subfacets(k)
}

fn check_plaquette_pair(p1: &FacetKey, p2: &FacetKey) -> Result<()> {
    if p1.lattice != p2.lattice {
        return Err(Error::LatticeMismatch(p1.lattice, p2.lattice));
    }
    if p1.d != p2.d {
        return Err(Error::DimensionMismatch {
            expected: p1.ambient_dim(),
            got: p2.ambient_dim(),
        });
    }
    if !p1.is_plaquette() || !p2.is_plaquette() {
        return Err(Error::NotAPlaquette);
    }
    Ok(())
}

/// `p1 ~ p2`: distinct plaquettes sharing a (d-2)-facet.
pub fn plaquettes_adjacent(p1: &FacetKey, p2: &FacetKey) -> Result<bool> {
    check_plaquette_pair(p1, p2)?;
    Ok(p1 != p2 && p1.intersection(p2).is_some_and(|f| f.dim() + 2 >= p1.ambient_dim()))
}

/// `p1 ~1 p2`: distinct plaquettes sharing a 1-facet.
pub fn plaquettes_adjacent1(p1: &FacetKey, p2: &FacetKey) -> Result<bool> {
    check_plaquette_pair(p1, p2)?;
    Ok(p1 != p2 && p1.intersection(p2).is_some_and(|f| f.dim() >= 1))
}

/// Neighbours of `x` in the spread-out model of range `range`
/// (`0 < |x - y|_inf <= range`). Range 0 is the nearest-neighbour lattice.
pub fn spread_out_neighbors(x: &Vertex, range: u32) -> Vec<Vertex> {
    if range == 0 {
        return x.neighbors().collect();
    }
    let d = x.dim();
    let side = 2 * range as i64 + 1;
    let total = side.pow(d as u32);
    let mut out = Vec::with_capacity(total as usize - 1);
    for t in 0..total {
        let mut rem = t;
        let mut delta = [0i32; MAX_DIM];
        for i in (0..d).rev() {
            delta[i] = (rem % side) as i32 - range as i32;
            rem /= side;
        }
        if delta.iter().all(|&c| c == 0) {
            continue;
        }
        out.push(x.offset_by(&delta[..d]));
    }
    out
}

/// The box `B_n = (-n, n]^d`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct LatticeBox {
    pub d: usize,
    pub n: u32,
}

impl LatticeBox {
    pub fn new(d: usize, n: u32) -> Result<Self> {
        check_dim(d)?;
        if n == 0 {
            return Err(Error::InvalidParameter("box radius must be positive".into()));
        }
        Ok(LatticeBox { d, n })
    }

    pub fn len(&self) -> usize {
        (2 * self.n as usize).pow(self.d as u32)
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        let n = self.n as i32;
        v.coords().iter().all(|&c| c > -n && c <= n)
    }

    /// `v` is in `∂B_n = B_n \ B_{n-1}`.
    pub fn on_boundary(&self, v: &Vertex) -> bool {
        let n = self.n as i32;
        self.contains(v) && v.coords().iter().any(|&c| c == n || c == -n + 1)
    }

    pub fn cuboid(&self) -> Cuboid {
        let n = self.n as i32;
        Cuboid::new_unchecked(self.d, [-n + 1; MAX_DIM], [n; MAX_DIM])
    }

    /// `B_n + shift`.
    pub fn translated(&self, shift: &Vertex) -> Cuboid {
        self.cuboid().translated(shift)
    }
}

/// Axis-aligned box of lattice points `lo_i <= x_i <= hi_i`, indexed in
/// lexicographic order (first coordinate slowest).
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Cuboid {
    d: usize,
    lo: [i32; MAX_DIM],
    hi: [i32; MAX_DIM],
    strides: [usize; MAX_DIM],
    len: usize,
}

impl Cuboid {
    pub fn new(lo: &Vertex, hi: &Vertex) -> Result<Self> {
        if lo.dim() != hi.dim() {
            return Err(Error::DimensionMismatch {
                expected: lo.dim(),
                got: hi.dim(),
            });
        }
        if lo.coords().iter().zip(hi.coords()).any(|(a, b)| a > b) {
            return Err(Error::InvalidParameter("empty cuboid".into()));
        }
        Ok(Cuboid::new_unchecked(lo.dim(), lo.coords, hi.coords))
    }

    pub(crate) fn new_unchecked(d: usize, mut lo: [i32; MAX_DIM], mut hi: [i32; MAX_DIM]) -> Self {
        for i in d..MAX_DIM {
            lo[i] = 0;
            hi[i] = 0;
        }
        let mut strides = [0; MAX_DIM];
        let mut len = 1usize;
        for i in (0..d).rev() {
            strides[i] = len;
            len *= (hi[i] - lo[i] + 1) as usize;
        }
        Cuboid {
            d,
            lo,
            hi,
            strides,
            len,
        }
    }

    /// Smallest cuboid containing all the given vertices.
    pub fn bounding<'a>(vertices: impl IntoIterator<Item = &'a Vertex>) -> Option<Cuboid> {
        let mut it = vertices.into_iter();
        let first = it.next()?;
        let (mut lo, mut hi) = (first.coords, first.coords);
        for v in it {
            for i in 0..first.dim() {
                lo[i] = lo[i].min(v.coords[i]);
                hi[i] = hi[i].max(v.coords[i]);
            }
        }
        Some(Cuboid::new_unchecked(first.dim(), lo, hi))
    }

    #[inline]
    pub fn dim(&self) -> usize {
        self.d
    }

    #[inline]
    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn lo(&self) -> Vertex {
        Vertex::from_array(self.d, self.lo)
    }

    pub fn hi(&self) -> Vertex {
        Vertex::from_array(self.d, self.hi)
    }

    #[inline]
    pub fn lo_at(&self, axis: usize) -> i32 {
        self.lo[axis]
    }

    #[inline]
    pub fn hi_at(&self, axis: usize) -> i32 {
        self.hi[axis]
    }

    #[inline]
    pub fn stride(&self, axis: usize) -> usize {
        self.strides[axis]
    }

    pub fn side(&self, axis: usize) -> usize {
        (self.hi[axis] - self.lo[axis] + 1) as usize
    }

    pub fn translated(&self, shift: &Vertex) -> Cuboid {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for i in 0..self.d {
            lo[i] += shift.coord(i);
            hi[i] += shift.coord(i);
        }
        Cuboid::new_unchecked(self.d, lo, hi)
    }

    pub fn expanded(&self, k: i32) -> Cuboid {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for i in 0..self.d {
            lo[i] -= k;
            hi[i] += k;
        }
        Cuboid::new_unchecked(self.d, lo, hi)
    }

    pub fn intersect(&self, other: &Cuboid) -> Option<Cuboid> {
        let mut lo = self.lo;
        let mut hi = self.hi;
        for i in 0..self.d {
            lo[i] = lo[i].max(other.lo[i]);
            hi[i] = hi[i].min(other.hi[i]);
            if lo[i] > hi[i] {
                return None;
            }
        }
        Some(Cuboid::new_unchecked(self.d, lo, hi))
    }

    pub fn contains_cuboid(&self, other: &Cuboid) -> bool {
        (0..self.d).all(|i| other.lo[i] >= self.lo[i] && other.hi[i] <= self.hi[i])
    }

    #[inline]
    pub fn contains(&self, v: &Vertex) -> bool {
        (0..self.d).all(|i| v.coords[i] >= self.lo[i] && v.coords[i] <= self.hi[i])
    }

    #[inline]
    pub fn index(&self, v: &Vertex) -> usize {
        debug_assert!(self.contains(v));
        (0..self.d)
            .map(|i| (v.coords[i] - self.lo[i]) as usize * self.strides[i])
            .sum()
    }

    pub fn try_index(&self, v: &Vertex) -> Option<usize> {
        self.contains(v).then(|| self.index(v))
    }

    pub fn vertex(&self, mut idx: usize) -> Vertex {
        let mut c = [0; MAX_DIM];
        for i in 0..self.d {
            c[i] = self.lo[i] + (idx / self.strides[i]) as i32;
            idx %= self.strides[i];
        }
        Vertex::from_array(self.d, c)
    }

    /// Distance (in steps) from `v` to the complement: 1 on the faces.
    pub fn depth(&self, v: &Vertex) -> u32 {
        (0..self.d)
            .map(|i| (v.coords[i] - self.lo[i]).min(self.hi[i] - v.coords[i]) + 1)
            .min()
            .unwrap_or(0)
            .max(0) as u32
    }

    pub fn on_face(&self, v: &Vertex) -> bool {
        self.depth(v) == 1
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        let mut next = self.lo;
        (0..self.len).map(move |_| {
            let v = Vertex::from_array(self.d, next);
            for i in (0..self.d).rev() {
                if next[i] < self.hi[i] {
                    next[i] += 1;
                    break;
                }
                next[i] = self.lo[i];
            }
            v
        })
    }

    /// Neighbour index of `idx` along `axis` in direction `dir` (±1), if inside.
    #[inline]
    pub(crate) fn step(&self, v: &Vertex, idx: usize, axis: usize, dir: i32) -> Option<usize> {
        let c = v.coords[axis] + dir;
        if c < self.lo[axis] || c > self.hi[axis] {
            None
        } else if dir > 0 {
            Some(idx + self.strides[axis])
        } else {
            Some(idx - self.strides[axis])
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn v(c: &[i32]) -> Vertex {
        Vertex::new(c).unwrap()
    }

    fn centre_matches(f: &FacetKey) -> bool {
        f.doubled_centre() == f.dual().doubled_centre()
    }

    #[test]
    fn pi_of_unit_edge_in_three_dimensions() {
        let e = FacetKey::edge(&v(&[0, 0, 0]), 0);
        let p = pi_of_edge(&e).unwrap();
        assert_eq!(p.lattice(), Lattice::Dual);
        assert_eq!(p.doubled_corner(), vec![1, -1, -1]);
        assert_eq!(p.axes(), 0b110);
        assert!(centre_matches(&e));
    }

    #[test]
    fn pi_of_vertical_edge_in_two_dimensions() {
        let e = FacetKey::edge(&v(&[0, 0]), 1);
        let p = pi_of_edge(&e).unwrap();
        // {-1/2, 1/2} x {1/2}
        assert_eq!(p.doubled_corner(), vec![-1, 1]);
        assert_eq!(p.axes(), 0b01);
    }

    #[test]
    fn pi_of_edge_in_four_dimensions_keeps_centre() {
        let e = FacetKey::edge_between(&v(&[1, 1, 1, 1]), &v(&[1, 1, 1, 2])).unwrap();
        let p = pi_of_edge(&e).unwrap();
        assert_eq!(p.doubled_centre(), vec![2, 2, 2, 3]);
        assert_eq!(p.axes(), 0b0111);
        assert_eq!(p.dim(), 3);
    }

    #[test]
    fn vertex_dual_is_unit_square() {
        let f = FacetKey::vertex(&v(&[0, 0]));
        let g = f.dual();
        assert_eq!(g.dim(), 2);
        assert_eq!(g.doubled_corner(), vec![-1, -1]);
    }

    #[test]
    fn pi_of_rejects_non_edges() {
        let f = FacetKey::vertex(&v(&[0, 0, 0]));
        assert_eq!(pi_of_edge(&f), Err(Error::NotAnEdge));
        assert_eq!(
            pi_of_edge(&FacetKey::edge(&v(&[0, 0, 0]), 1).dual()),
            Err(Error::NotAnEdge)
        );
    }

    #[test]
    fn dimension_bounds() {
        assert!(Vertex::new(&[1]).is_err());
        assert!(Vertex::new(&[0; 9]).is_err());
        assert!(FacetKey::new(Lattice::Primal, &[0, 0], 0b100).is_err());
    }

    #[test]
    fn duality_exhaustive_small_window() {
        for d in 2..=4 {
            let window = LatticeBox::new(d, 1).unwrap().cuboid();
            for x in window.iter() {
                for axes in 0..(1u8 << d) {
                    for lattice in [Lattice::Primal, Lattice::Dual] {
                        let f = FacetKey::new(lattice, x.coords(), axes).unwrap();
                        let g = f.dual();
                        assert_eq!(g.dual(), f);
                        assert_eq!(g.dim(), d - f.dim());
                        assert!(centre_matches(&f));
                    }
                }
            }
        }
    }

    #[test]
    fn plaquette_subfacet_counts() {
        for d in 2..=6 {
            let p = FacetKey::edge(&Vertex::origin(d).unwrap(), 0).dual();
            assert_eq!(p.subfacets(d - 2).unwrap().len(), 2 * (d - 1));
            assert_eq!(p.subfacets(d - 1).unwrap(), vec![p]);
        }
        let p = FacetKey::edge(&v(&[0, 0, 0]), 2).dual();
        let corners = p.subfacets(0).unwrap();
        assert_eq!(corners.len(), 4);
        assert!(p.subfacets(3).is_err());
        let sides = p.subfacets(1).unwrap();
        assert_eq!(sides.len(), 4);
        assert!(sides.iter().all(|s| p.contains(s)));
    }

    #[test]
    fn subfacets_match_point_set_enumeration() {
        // brute force: a k-facet is inside f iff all of its corners are corners of f
        let d = 3;
        let f = FacetKey::new(Lattice::Dual, &[0, 1, -1], 0b011).unwrap();
        let points = corners(&f);
        for k in 0..=f.dim() {
            let mut brute = Vec::new();
            let window = Cuboid::new(&v(&[-1, 0, -2]), &v(&[2, 3, 1])).unwrap();
            for x in window.iter() {
                for axes in 0..(1u8 << d) {
                    if axes.count_ones() as usize != k {
                        continue;
                    }
                    let g = FacetKey::new(Lattice::Dual, x.coords(), axes).unwrap();
                    if corners(&g).iter().all(|c| points.contains(c)) {
                        brute.push(g);
                    }
                }
            }
            let mut fast = f.subfacets(k).unwrap();
            fast.sort();
            brute.sort();
            assert_eq!(fast, brute, "k = {k}");
        }
    }

    fn corners(f: &FacetKey) -> Vec<Vec<i32>> {
        let base = f.doubled_corner();
        let axes: Vec<usize> = (0..f.ambient_dim()).filter(|&i| f.has_axis(i)).collect();
        (0..1u32 << axes.len())
            .map(|m| {
                let mut c = base.clone();
                for (t, &a) in axes.iter().enumerate() {
                    c[a] += 2 * (m >> t & 1) as i32;
                }
                c
            })
            .collect()
    }

    #[test]
    fn adjacency_on_unit_cube_faces() {
        let cube = FacetKey::dual_cube(&v(&[0, 0, 0]));
        let faces: Vec<FacetKey> = cube.faces().collect();
        assert_eq!(faces.len(), 6);
        let (bottom, top) = (faces[0], faces[1]);
        assert!(!plaquettes_adjacent(&bottom, &top).unwrap());
        assert!(plaquettes_adjacent(&bottom, &faces[2]).unwrap());
        assert!(!plaquettes_adjacent(&bottom, &bottom).unwrap());
        assert!(!plaquettes_adjacent1(&bottom, &bottom).unwrap());
    }

    #[test]
    fn adjacency_relations_coincide_in_three_dimensions() {
        let window = LatticeBox::new(3, 1).unwrap().cuboid();
        let plaquettes: Vec<FacetKey> = window
            .iter()
            .flat_map(|x| (0..3).map(move |a| FacetKey::edge(&x, a).dual()))
            .collect();
        for p in &plaquettes {
            for q in &plaquettes {
                assert_eq!(plaquettes_adjacent(p, q).unwrap(), plaquettes_adjacent1(p, q).unwrap());
            }
        }
    }

    #[test]
    fn four_dimensional_pair_adjacent_only_through_an_edge() {
        // search a small window for a pair with ~1 but not ~
        let o = Vertex::origin(4).unwrap();
        let p = FacetKey::edge(&o, 0).dual();
        let window = LatticeBox::new(4, 1).unwrap().cuboid();
        let mut found = None;
        'outer: for x in window.iter() {
            for axis in 0..4 {
                let q = FacetKey::edge(&x, axis).dual();
                if plaquettes_adjacent1(&p, &q).unwrap() && !plaquettes_adjacent(&p, &q).unwrap() {
                    found = Some(q);
                    break 'outer;
                }
            }
        }
        let q = found.expect("a pair sharing only a 1-facet exists in d = 4");
        assert_eq!(p.intersection(&q).unwrap().dim(), 1);
    }

    #[test]
    fn mixed_lattices_rejected() {
        let p = FacetKey::edge(&v(&[0, 0, 0]), 0).dual();
        let q = FacetKey::new(Lattice::Primal, &[0, 0, 0], 0b011).unwrap();
        assert!(matches!(plaquettes_adjacent(&p, &q), Err(Error::LatticeMismatch(..))));
    }

    #[test]
    fn spread_out_counts() {
        assert_eq!(spread_out_neighbors(&v(&[0, 0]), 1).len(), 8);
        assert_eq!(spread_out_neighbors(&v(&[0, 0, 0]), 0).len(), 6);
        let n = spread_out_neighbors(&v(&[0, 0]), 2);
        assert_eq!(n.len(), 24);
        assert!(n.iter().all(|y| y.linf_norm() <= 2 && y.linf_norm() > 0));
    }

    #[test]
    fn box_geometry() {
        let b = LatticeBox::new(3, 2).unwrap();
        assert_eq!(b.len(), 64);
        assert_eq!(b.cuboid().len(), 64);
        assert!(b.contains(&v(&[2, -1, 0])));
        assert!(!b.contains(&v(&[-2, 0, 0])));
        assert!(b.on_boundary(&v(&[-1, 0, 2])));
        assert!(!b.on_boundary(&v(&[0, 1, 0])));
        let c = b.cuboid();
        for (i, x) in c.iter().enumerate() {
            assert_eq!(c.index(&x), i);
        }
    }
}
