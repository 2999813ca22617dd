//! The surface over the hyperplane `H_0 = {s(x) = 0}`, `s(x) = x_1 + ... + x_d`,
//! built from good paths in a finite slab of the half-space `H_+`.

use std::collections::VecDeque;

use crate::error::{Error, Result};
use crate::geometry::{Cuboid, FacetKey, Lattice, Vertex, MAX_DIM};
use crate::topology::{boundary, PlaquetteSet};

use super::config::Configuration;
use super::fatten::VertexMask;

/// `{x : 0 <= s(x) <= height, |x_i - s(x)/d| <= half_width for all i}`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Slab {
    pub d: usize,
    pub height: u32,
    pub half_width: u32,
}

impl Slab {
    pub fn new(d: usize, height: u32, half_width: u32) -> Result<Self> {
        crate::geometry::check_dim(d)?;
        if height == 0 {
            return Err(Error::InvalidParameter("slab height must be positive".into()));
        }
        Ok(Slab { d, height, half_width })
    }

    pub fn level(v: &Vertex) -> i64 {
        v.coord_sum()
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        let s = v.coord_sum();
        if s < 0 || s > self.height as i64 {
            return false;
        }
        let d = self.d as i64;
        let bound = d * self.half_width as i64;
        v.coords().iter().all(|&c| (d * c as i64 - s).abs() <= bound)
    }

    /// Bounding cuboid of the slab.
    pub fn cuboid(&self) -> Cuboid {
        let w = self.half_width as i32;
        let top = w + (self.height as usize / self.d) as i32;
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..self.d {
            lo[i] = -w;
            hi[i] = top;
        }
        Cuboid::new_unchecked(self.d, lo, hi)
    }

    fn check(&self, c: &Configuration) -> Result<()> {
        if c.params().d != self.d {
            return Err(Error::DimensionMismatch {
                expected: self.d,
                got: c.params().d,
            });
        }
        if c.params().s != 0 {
            return Err(Error::Precondition(
                "good paths need the nearest-neighbour model".into(),
            ));
        }
        if !c.region().contains_cuboid(&self.cuboid()) {
            return Err(Error::OutsideBox("slab exceeds the configuration region".into()));
        }
        Ok(())
    }
}

#[derive(Clone, Debug)]
pub struct GoodPathCluster {
    pub slab: Slab,
    /// `K`, as a mask over the slab's bounding cuboid.
    pub k: VertexMask,
    /// `K` reaches the top level of the slab.
    pub censored: bool,
}

/// `K`: vertices reachable from `H_0` by paths in the slab whose
/// `s`-increasing steps use open edges (decreasing steps are free).
pub fn good_path_cluster(c: &Configuration, slab: &Slab) -> Result<GoodPathCluster> {
    slab.check(c)?;
    let region = slab.cuboid();
    let mut k = VertexMask::empty(region);
    let mut queue = VecDeque::new();
    for (idx, v) in region.iter().enumerate() {
        if v.coord_sum() == 0 && slab.contains(&v) {
            k.set(idx, true);
            queue.push_back(idx);
        }
    }
    let mut censored = false;
    while let Some(idx) = queue.pop_front() {
        let v = region.vertex(idx);
        if v.coord_sum() == slab.height as i64 {
            censored = true;
        }
        for axis in 0..slab.d {
            for dir in [1, -1] {
                let w = v.shifted(axis, dir);
                if !slab.contains(&w) {
                    continue;
                }
                let j = region.index(&w);
                if k.get(j) {
                    continue;
                }
                if dir > 0 && c.is_open(&v, &w) != Some(true) {
                    continue;
                }
                k.set(j, true);
                queue.push_back(j);
            }
        }
    }
    Ok(GoodPathCluster {
        slab: *slab,
        k,
        censored,
    })
}

/// `S`: plaquettes `π(<u, v>)` with `u ∈ K`, `v ∉ K` in the slab and
/// `s(u) < s(v)`. Every such edge is closed, so every member is open.
pub fn hyperplane_surface(c: &Configuration, k: &GoodPathCluster) -> Result<PlaquetteSet> {
    let mut out = PlaquetteSet::new();
    for u in k.k.iter() {
        for axis in 0..k.slab.d {
            let v = u.shifted(axis, 1);
            if !k.slab.contains(&v) || k.k.contains(&v) {
                continue;
            }
            if c.is_open(&u, &v) != Some(false) {
                return Err(Error::Internal(format!("edge {u}-{v} leaving K is not closed")));
            }
            out.insert(FacetKey::edge(&u, axis).dual())?;
        }
    }
    Ok(out)
}

/// Boundary facets of `s` whose dual 2-face has all four corners in the slab.
pub fn interior_boundary(slab: &Slab, s: &PlaquetteSet) -> Vec<FacetKey> {
    boundary(s)
        .into_iter()
        .filter(|f| {
            let face = f.dual();
            let base = Vertex::new(face.base()).expect("valid base");
            let axes: Vec<usize> = (0..slab.d).filter(|&i| face.has_axis(i)).collect();
            (0..4).all(|m| {
                let mut v = base;
                for (t, &a) in axes.iter().enumerate() {
                    if m >> t & 1 == 1 {
                        v = v.shifted(a, 1);
                    }
                }
                slab.contains(&v)
            })
        })
        .collect()
}

/// A point of `H_0` with rational coordinates `num[i] / denom`.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PhiPoint {
    pub num: Vec<i64>,
    pub denom: i64,
}

impl PhiPoint {
    pub fn to_f64(&self) -> Vec<f64> {
        self.num.iter().map(|&n| n as f64 / self.denom as f64).collect()
    }
}

/// `φ(z) = z - (s(z)/d) e` for a point given by its doubled coordinates
/// `2z`, computed exactly over the common denominator `2d`.
pub fn project_phi(doubled: &[i32]) -> PhiPoint {
    let d = doubled.len() as i64;
    let total: i64 = doubled.iter().map(|&c| c as i64).sum();
    PhiPoint {
        num: doubled.iter().map(|&c| d * c as i64 - total).collect(),
        denom: 2 * d,
    }
}

/// Whether the dual `d`-cube has all `2d` faces open, i.e. all edges at its
/// centre vertex are closed.
pub fn good_cube(c: &Configuration, cube: &FacetKey) -> Result<bool> {
    let d = c.params().d;
    if cube.lattice() != Lattice::Dual || cube.dim() != d || cube.ambient_dim() != d {
        return Err(Error::NotACube);
    }
    let x = Vertex::new(cube.dual().base())?;
    if c.region().depth(&x) < 2 {
        return Err(Error::OutsideBox(x.to_string()));
    }
    let good = x.neighbors().all(|y| c.is_open(&x, &y) == Some(false));
    Ok(good)
}
