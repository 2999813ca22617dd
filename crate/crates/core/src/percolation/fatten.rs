//! `R_n`, the fattened complement `X^F`, and spanning components of vertex masks.

use std::collections::VecDeque;

use crate::dsu::UnionFind;
use crate::error::{Error, Result};
use crate::geometry::{Cuboid, LatticeBox, Vertex};
use crate::topology::VertexSet;

use super::clusters::ClusterLabeling;
use super::config::{for_each_vertex, Configuration};

/// A vertex subset of a cuboid, stored densely.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VertexMask {
    region: Cuboid,
    bits: Vec<bool>,
}

impl VertexMask {
    pub fn empty(region: Cuboid) -> Self {
        VertexMask {
            region,
            bits: vec![false; region.len()],
        }
    }

    pub fn full(region: Cuboid) -> Self {
        VertexMask {
            region,
            bits: vec![true; region.len()],
        }
    }

    pub fn from_bits(region: Cuboid, bits: Vec<bool>) -> Self {
        assert_eq!(bits.len(), region.len());
        VertexMask { region, bits }
    }

    pub fn region(&self) -> &Cuboid {
        &self.region
    }

    pub fn bits(&self) -> &[bool] {
        &self.bits
    }

    pub fn contains(&self, v: &Vertex) -> bool {
        self.region.try_index(v).is_some_and(|i| self.bits[i])
    }

    pub fn get(&self, idx: usize) -> bool {
        self.bits[idx]
    }

    pub fn set(&mut self, idx: usize, value: bool) {
        self.bits[idx] = value;
    }

    pub fn count(&self) -> usize {
        self.bits.iter().filter(|&&b| b).count()
    }

    pub fn is_empty(&self) -> bool {
        !self.bits.iter().any(|&b| b)
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.bits
            .iter()
            .enumerate()
            .filter(|(_, &b)| b)
            .map(|(i, _)| self.region.vertex(i))
    }

    pub fn to_vertex_set(&self) -> VertexSet {
        VertexSet::from_set_unchecked(self.iter().collect())
    }

    pub fn is_subset(&self, other: &VertexMask) -> bool {
        self.iter().all(|v| other.contains(&v))
    }

    pub fn complement(&self) -> VertexMask {
        VertexMask {
            region: self.region,
            bits: self.bits.iter().map(|b| !b).collect(),
        }
    }

    /// L∞ dilation by `r` within the region (exact for points whose ball
    /// lies in the region).
    pub fn dilated(&self, r: u32) -> VertexMask {
        let mut bits = self.bits.clone();
        if r == 0 {
            return VertexMask {
                region: self.region,
                bits,
            };
        }
        let r = r as usize;
        for axis in 0..self.region.dim() {
            let side = self.region.side(axis);
            let stride = self.region.stride(axis);
            let mut line = vec![false; side];
            let mut prefix = vec![0u32; side + 1];
            for start in 0..self.region.len() {
                // visit each line once, from its first vertex
                if !(start / stride).is_multiple_of(side) {
                    continue;
                }
                for t in 0..side {
                    line[t] = bits[start + t * stride];
                    prefix[t + 1] = prefix[t] + line[t] as u32;
                }
                for t in 0..side {
                    let lo = t.saturating_sub(r);
                    let hi = (t + r + 1).min(side);
                    bits[start + t * stride] = prefix[hi] > prefix[lo];
                }
            }
        }
        VertexMask {
            region: self.region,
            bits,
        }
    }

    /// Restriction to a sub-cuboid.
    pub fn restricted(&self, sub: &Cuboid) -> VertexMask {
        let bits = sub.iter().map(|v| self.contains(&v)).collect();
        VertexMask { region: *sub, bits }
    }

    /// Nearest-neighbour connected components, as labels per vertex
    /// (`u32::MAX` outside the mask) and a count.
    pub fn components(&self) -> (Vec<u32>, usize) {
        let mut uf = UnionFind::new(self.region.len());
        let d = self.region.dim();
        for_each_vertex(&self.region, |idx, x| {
            if !self.bits[idx] {
                return;
            }
            for i in 0..d {
                if x[i] < self.region.hi_at(i) && self.bits[idx + self.region.stride(i)] {
                    uf.union(idx, idx + self.region.stride(i));
                }
            }
        });
        let mut label_of_root = vec![u32::MAX; self.region.len()];
        let mut labels = vec![u32::MAX; self.region.len()];
        let mut next = 0u32;
        for idx in 0..self.region.len() {
            if self.bits[idx] {
                let r = uf.find(idx);
                if label_of_root[r] == u32::MAX {
                    label_of_root[r] = next;
                    next += 1;
                }
                labels[idx] = label_of_root[r];
            }
        }
        (labels, next as usize)
    }

    /// Number of components joining the two faces orthogonal to `axis`.
    pub fn spanning_components(&self, axis: usize) -> usize {
        let (labels, k) = self.components();
        let mut low = vec![false; k];
        let mut high = vec![false; k];
        for_each_vertex(&self.region, |idx, x| {
            let l = labels[idx];
            if l == u32::MAX {
                return;
            }
            if x[axis] == self.region.lo_at(axis) {
                low[l as usize] = true;
            }
            if x[axis] == self.region.hi_at(axis) {
                high[l as usize] = true;
            }
        });
        low.iter().zip(&high).filter(|(a, b)| **a && **b).count()
    }

    /// Vertices of the mask reachable from `start` inside it.
    pub fn component_of(&self, start: &Vertex) -> Vec<Vertex> {
        let Some(s) = self.region.try_index(start).filter(|&i| self.bits[i]) else {
            return Vec::new();
        };
        let mut seen = vec![false; self.region.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        let mut out = Vec::new();
        while let Some(i) = queue.pop_front() {
            let v = self.region.vertex(i);
            out.push(v);
            for axis in 0..self.region.dim() {
                for dir in [-1, 1] {
                    if let Some(j) = self.region.step(&v, i, axis, dir) {
                        if self.bits[j] && !seen[j] {
                            seen[j] = true;
                            queue.push_back(j);
                        }
                    }
                }
            }
        }
        out
    }
}

/// Radius of the configuration box needed for `R_n`: `2n + 2F - 1 + max(S, 1)`.
pub fn rn_box_radius(n: u32, s: u32, f: u32) -> u32 {
    2 * n + 2 * f - 1 + s.max(1)
}

/// `R_n(z)`: vertices `x` of `B_n + centre` within L∞ distance `F` of a
/// cluster having a vertex outside `B_{2n+2F-1} + centre`.
pub fn rn_at(c: &Configuration, labeling: &ClusterLabeling, centre: &Vertex, n: u32) -> Result<VertexMask> {
    let params = c.params();
    let d = params.d;
    let f = params.f;
    let outer = LatticeBox::new(d, rn_box_radius(n, params.s, f))?.translated(centre);
    if !c.region().contains_cuboid(&outer) {
        return Err(Error::BoxTooSmall {
            need: rn_box_radius(n, params.s, f),
            have: (c.region().side(0) / 2) as u32,
        });
    }
    let far = LatticeBox::new(d, 2 * n + 2 * f - 1)?.translated(centre);
    let reach = labeling.reaching_outside(&far);
    rn_from_reach(labeling, &reach, centre, n, f)
}

/// `R_n` for the box centred at the origin.
pub fn compute_rn(c: &Configuration, labeling: &ClusterLabeling, n: u32) -> Result<VertexMask> {
    rn_at(c, labeling, &Vertex::origin(c.params().d)?, n)
}

pub(crate) fn rn_from_reach(
    labeling: &ClusterLabeling,
    reach: &[bool],
    centre: &Vertex,
    n: u32,
    f: u32,
) -> Result<VertexMask> {
    let d = centre.dim();
    let grown = LatticeBox::new(d, n + f)?.translated(centre);
    let region = labeling.region();
    let bits = grown
        .iter()
        .map(|y| reach[labeling.label_at(region.index(&y)) as usize])
        .collect();
    let block = LatticeBox::new(d, n)?.translated(centre);
    Ok(VertexMask::from_bits(grown, bits).dilated(f).restricted(&block))
}

/// `X^F` within the configuration region: vertices at L∞ distance more than
/// `F` from every boundary-touching cluster.
pub fn finite_complement(c: &Configuration, labeling: &ClusterLabeling, f: u32) -> VertexMask {
    let region = *c.region();
    let bits = labeling
        .labels()
        .iter()
        .map(|&l| labeling.touches_boundary(l))
        .collect();
    VertexMask::from_bits(region, bits).dilated(f).complement()
}

/// `X^F ∩ B_n = B_n ∖ R_n`.
pub fn x_in_box(c: &Configuration, labeling: &ClusterLabeling, n: u32) -> Result<VertexMask> {
    Ok(compute_rn(c, labeling, n)?.complement())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::percolation::{cluster_labels, ModelParams};

    fn sample(d: usize, p: f64, s: u32, f: u32, n: u32, seed: u64) -> (Configuration, ClusterLabeling) {
        let params = ModelParams::new(d, p, s, f).unwrap();
        let c = Configuration::sample(params, LatticeBox::new(d, n).unwrap(), seed).unwrap();
        let lab = cluster_labels(&c);
        (c, lab)
    }

    #[test]
    fn rn_extremes() {
        let (c, lab) = sample(2, 0.0, 0, 0, 8, 1);
        assert!(compute_rn(&c, &lab, 4).unwrap().is_empty());
        let (c, lab) = sample(2, 1.0, 0, 0, 8, 1);
        assert_eq!(compute_rn(&c, &lab, 4).unwrap().count(), 64);
        let (c, lab) = sample(2, 1.0, 0, 2, 12, 1);
        assert_eq!(compute_rn(&c, &lab, 4).unwrap().count(), 64);
    }

    #[test]
    fn rn_box_check() {
        let (c, lab) = sample(2, 0.5, 0, 0, 7, 1);
        assert!(matches!(compute_rn(&c, &lab, 4), Err(Error::BoxTooSmall { .. })));
    }

    #[test]
    fn rn_matches_touching_clusters_on_double_box() {
        for seed in 0..20 {
            let n = 5;
            let (c, lab) = sample(2, 0.5, 0, 0, 2 * n, seed);
            let rn = compute_rn(&c, &lab, n).unwrap();
            let bn = LatticeBox::new(2, n).unwrap();
            let shell: Vec<Vertex> = c.region().iter().filter(|y| c.region().on_face(y)).collect();
            for x in bn.cuboid().iter() {
                let touches = shell.iter().any(|y| lab.connected(&x, y));
                assert_eq!(rn.contains(&x), touches);
            }
        }
    }

    #[test]
    fn fattening_only_grows_rn() {
        for seed in 0..10 {
            let n = 4;
            let params0 = ModelParams::new(2, 0.5, 0, 0).unwrap();
            let params2 = ModelParams::new(2, 0.5, 0, 2).unwrap();
            let region = LatticeBox::new(2, rn_box_radius(n, 0, 2)).unwrap();
            let c0 = Configuration::sample(params0, region, seed).unwrap();
            let c2 = Configuration::sample(params2, region, seed).unwrap();
            let r0 = compute_rn(&c0, &cluster_labels(&c0), n).unwrap();
            let r2 = compute_rn(&c2, &cluster_labels(&c2), n).unwrap();
            // farther target, but fattened: compare against the L∞-fattening
            // of clusters reaching the farther shell
            let far = LatticeBox::new(2, 2 * n + 3).unwrap().cuboid();
            let lab = cluster_labels(&c2);
            let reach = lab.reaching_outside(&far);
            for x in r2.region().iter() {
                let brute = lab
                    .region()
                    .iter()
                    .any(|y| y.linf_distance(&x) <= 2 && reach[lab.label(&y).unwrap() as usize]);
                assert_eq!(r2.contains(&x), brute);
            }
            assert_eq!(r0.region(), r2.region());
        }
    }

    #[test]
    fn x_shrinks_with_fattening() {
        for seed in 0..10 {
            let (c, lab) = sample(3, 0.3, 0, 0, 5, seed);
            let x0 = finite_complement(&c, &lab, 0);
            let x1 = finite_complement(&c, &lab, 1);
            assert!(x1.is_subset(&x0));
            for v in c.region().iter() {
                let brute = !c
                    .region()
                    .iter()
                    .any(|y| y.linf_distance(&v) <= 1 && lab.touches_boundary(lab.label(&y).unwrap()));
                assert_eq!(x1.contains(&v), brute);
            }
        }
        let (c, lab) = sample(2, 0.0, 0, 0, 4, 0);
        assert_eq!(finite_complement(&c, &lab, 2).count(), 64);
        let (c, lab) = sample(2, 1.0, 0, 0, 4, 0);
        assert!(finite_complement(&c, &lab, 1).is_empty());
    }

    #[test]
    fn spanning_components_of_stripes() {
        let region = LatticeBox::new(2, 3).unwrap().cuboid();
        let bits = region.iter().map(|v| v.coord(1) % 2 == 0).collect();
        let mask = VertexMask::from_bits(region, bits);
        assert_eq!(mask.spanning_components(0), 3);
        assert_eq!(mask.spanning_components(1), 0);
        assert_eq!(mask.components().1, 3);
    }
}
