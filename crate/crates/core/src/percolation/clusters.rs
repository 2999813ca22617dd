//! Open clusters of a configuration.

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::geometry::{Cuboid, Vertex, MAX_DIM};

use super::config::{for_each_vertex, Configuration};

/// Open clusters within the configuration's region. A cluster "touches the
/// boundary" when one of its vertices has an open edge leaving the region;
/// such clusters are treated as infinite, and the others are exactly the
/// open clusters of the whole lattice.
#[derive(Clone, Debug)]
pub struct ClusterLabeling {
    region: Cuboid,
    labels: Vec<u32>,
    sizes: Vec<u32>,
    touches: Vec<bool>,
}

pub fn cluster_labels(c: &Configuration) -> ClusterLabeling {
    let region = *c.region();
    let n_off = c.offsets().len();
    let deltas: Vec<isize> = c
        .offsets()
        .iter()
        .map(|o| {
            (0..region.dim())
                .map(|i| o[i] as isize * region.stride(i) as isize)
                .sum()
        })
        .collect();
    let mut uf = UnionFind::new(region.len());
    for (w, &word) in c.slot_words().iter().enumerate() {
        let mut m = word;
        while m != 0 {
            let slot = w * 64 + m.trailing_zeros() as usize;
            m &= m - 1;
            let (idx, k) = (slot / n_off, slot % n_off);
            uf.union(idx, (idx as isize + deltas[k]) as usize);
        }
    }
    let (labels, count) = uf.labels();
    let mut sizes = vec![0u32; count];
    let mut touches = vec![false; count];
    for (&l, &exit) in labels.iter().zip(c.exit_flags()) {
        sizes[l as usize] += 1;
        touches[l as usize] |= exit;
    }
    ClusterLabeling {
        region,
        labels,
        sizes,
        touches,
    }
}

impl ClusterLabeling {
    pub fn region(&self) -> &Cuboid {
        &self.region
    }

    pub fn cluster_count(&self) -> usize {
        self.sizes.len()
    }

    pub fn label_at(&self, idx: usize) -> u32 {
        self.labels[idx]
    }

    pub fn label(&self, v: &Vertex) -> Option<u32> {
        self.region.try_index(v).map(|i| self.labels[i])
    }

    pub fn labels(&self) -> &[u32] {
        &self.labels
    }

    pub fn size(&self, label: u32) -> u32 {
        self.sizes[label as usize]
    }

    pub fn sizes(&self) -> &[u32] {
        &self.sizes
    }

    pub fn touches_boundary(&self, label: u32) -> bool {
        self.touches[label as usize]
    }

    pub fn touching(&self) -> &[bool] {
        &self.touches
    }

    pub fn connected(&self, x: &Vertex, y: &Vertex) -> bool {
        matches!((self.label(x), self.label(y)), (Some(a), Some(b)) if a == b)
    }

    /// Vertices of the cluster with the given label, in index order.
    pub fn members(&self, label: u32) -> Vec<Vertex> {
        self.labels
            .iter()
            .enumerate()
            .filter(|(_, &l)| l == label)
            .map(|(i, _)| self.region.vertex(i))
            .collect()
    }

    /// Per label: whether the cluster has a vertex outside `inner`.
    pub fn reaching_outside(&self, inner: &Cuboid) -> Vec<bool> {
        let mut out = vec![false; self.sizes.len()];
        for_each_vertex(&self.region, |idx, x| {
            let l = self.labels[idx] as usize;
            if !out[l] && !(0..inner.dim()).all(|i| x[i] >= inner.lo_at(i) && x[i] <= inner.hi_at(i)) {
                out[l] = true;
            }
        });
        out
    }

    /// Bounding cuboid of every cluster.
    pub fn bounding_boxes(&self) -> Vec<Cuboid> {
        let d = self.region.dim();
        let mut lo = vec![[i32::MAX; MAX_DIM]; self.sizes.len()];
        let mut hi = vec![[i32::MIN; MAX_DIM]; self.sizes.len()];
        for_each_vertex(&self.region, |idx, x| {
            let l = self.labels[idx] as usize;
            for i in 0..d {
                lo[l][i] = lo[l][i].min(x[i]);
                hi[l][i] = hi[l][i].max(x[i]);
            }
        });
        lo.into_iter()
            .zip(hi)
            .map(|(a, b)| Cuboid::new_unchecked(d, a, b))
            .collect()
    }
}

/// Radius of the open cluster of a vertex, or a censoring marker when the
/// cluster leaves the region.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Radius {
    Exact(u32),
    /// The cluster reaches the boundary: the radius is at least this.
    Censored {
        at_least: u32,
    },
}

impl Radius {
    pub fn at_least(&self, n: u32) -> bool {
        match *self {
            Radius::Exact(r) => r >= n,
            Radius::Censored { at_least } => at_least >= n,
        }
    }
}

/// `max ‖x - origin‖_∞` over the open cluster of `origin`.
pub fn radius(c: &Configuration, labeling: &ClusterLabeling, origin: &Vertex) -> Result<Radius> {
    let region = c.region();
    let Some(l) = labeling.label(origin) else {
        return Err(Error::OutsideBox(origin.to_string()));
    };
    if labeling.touches_boundary(l) {
        let to_face = (0..region.dim())
            .map(|i| (origin.coord(i) - region.lo_at(i)).min(region.hi_at(i) - origin.coord(i)))
            .min()
            .unwrap_or(0)
            .max(0) as u32;
        let at_least = to_face + 1;
        return Ok(Radius::Censored { at_least });
    }
    let mut r = 0;
    for_each_vertex(region, |idx, x| {
        if labeling.labels[idx] == l {
            let dist = (0..region.dim())
                .map(|i| (x[i] - origin.coord(i)).unsigned_abs())
                .max()
                .unwrap_or(0);
            r = r.max(dist);
        }
    });
    Ok(Radius::Exact(r))
}

/// Whether an open cluster joins the two faces of the region orthogonal to `axis`.
pub fn has_crossing(labeling: &ClusterLabeling, axis: usize) -> bool {
    let region = labeling.region;
    let mut low = vec![false; labeling.cluster_count()];
    for_each_vertex(&region, |idx, x| {
        if x[axis] == region.lo_at(axis) {
            low[labeling.labels[idx] as usize] = true;
        }
    });
    let mut found = false;
    for_each_vertex(&region, |idx, x| {
        if x[axis] == region.hi_at(axis) && low[labeling.labels[idx] as usize] {
            found = true;
        }
    });
    found
}
