//! Coarse-graining into blocks `B_n(z) = B_n + nz`: deletion of `R_n(z)`,
//! the event `L_n(z)`, green sets, the good-block field, and overlaps of
//! neighbouring green sets.

use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Cuboid, LatticeBox, Vertex, MAX_DIM};
use crate::percolation::{
    cluster_labels, rn_at, rn_box_radius, rn_from_reach, ClusterLabeling, Configuration, ModelParams, VertexMask,
};
use crate::rng::derive_seed;
use crate::stats::Estimate;
use crate::topology::{Exterior, VertexSet};

/// Analysis of one block.
#[derive(Clone, Debug)]
pub struct BlockReport {
    pub z: Vertex,
    pub n: u32,
    pub block: Cuboid,
    /// `R_n(z)`, over the block.
    pub rn: VertexMask,
    /// Sizes of the components `C_1, ..., C_m` of `B_n(z) ∖ R_n(z)`, ordered
    /// by their lexicographically smallest vertex.
    pub component_sizes: Vec<usize>,
    /// `|∂_i C_i|` for each component.
    pub boundary_sizes: Vec<usize>,
    /// `L_n(z)`: some component covers at least 4/5 of the block.
    pub good: bool,
    /// The green set: a largest component (the first among ties) when good.
    pub green: Option<VertexMask>,
}

impl BlockReport {
    pub fn block_size(&self) -> usize {
        self.block.len()
    }

    pub fn rn_size(&self) -> usize {
        self.rn.count()
    }

    pub fn max_component(&self) -> usize {
        self.component_sizes.iter().copied().max().unwrap_or(0)
    }

    pub fn green_size(&self) -> usize {
        self.green.as_ref().map_or(0, |g| g.count())
    }

    /// `Σ|C_i| + |R_n| = |B_n|`.
    pub fn identity_holds(&self) -> bool {
        self.component_sizes.iter().sum::<usize>() + self.rn_size() == self.block_size()
    }

    /// `2d |R_n| >= Σ |∂_i C_i|`.
    pub fn counting_inequality_holds(&self) -> bool {
        2 * self.block.dim() * self.rn_size() >= self.boundary_sizes.iter().sum::<usize>()
    }

    /// `M_n = {|R_n| < |B_n| / 2}`.
    pub fn m_event(&self) -> bool {
        2 * self.rn_size() < self.block_size()
    }
}

/// `L_n` requires a component of at least `4/5 |B_n|` vertices.
pub fn good_threshold(block_size: usize) -> usize {
    (4 * block_size).div_ceil(5)
}

/// Report for a block given `R_n(z)` as a mask over the block.
pub fn analyze_mask(z: Vertex, n: u32, rn: VertexMask) -> BlockReport {
    let block = *rn.region();
    let rest = rn.complement();
    let (labels, m) = rest.components();
    let mut component_sizes = vec![0usize; m];
    for &l in &labels {
        if l != u32::MAX {
            component_sizes[l as usize] += 1;
        }
    }
    let boundary_sizes = (0..m as u32)
        .map(|l| internal_boundary_of_label(&block, &labels, l))
        .collect();
    let threshold = good_threshold(block.len());
    let largest = component_sizes.iter().copied().max().unwrap_or(0);
    let good = m > 0 && largest >= threshold;
    let green = good.then(|| {
        let pick = component_sizes.iter().position(|&s| s == largest).unwrap() as u32;
        VertexMask::from_bits(block, labels.iter().map(|&l| l == pick).collect())
    });
    BlockReport {
        z,
        n,
        block,
        rn,
        component_sizes,
        boundary_sizes,
        good,
        green,
    }
}

/// `|ΔC ∩ block|` for the component with label `l`, by exterior search on
/// the block grown by one layer.
fn internal_boundary_of_label(block: &Cuboid, labels: &[u32], l: u32) -> usize {
    let outer = block.expanded(1);
    let in_c = |v: &Vertex| block.try_index(v).is_some_and(|i| labels[i] == l);
    let mut outside = vec![false; outer.len()];
    let mut queue = VecDeque::new();
    for (i, v) in outer.iter().enumerate() {
        if outer.on_face(&v) {
            outside[i] = true;
            queue.push_back(i);
        }
    }
    while let Some(i) = queue.pop_front() {
        let v = outer.vertex(i);
        for axis in 0..outer.dim() {
            for dir in [-1, 1] {
                if let Some(j) = outer.step(&v, i, axis, dir) {
                    if !outside[j] && !in_c(&outer.vertex(j)) {
                        outside[j] = true;
                        queue.push_back(j);
                    }
                }
            }
        }
    }
    block
        .iter()
        .filter(|v| !in_c(v) && outside[outer.index(v)] && v.neighbors().any(|w| in_c(&w)))
        .count()
}

fn block_centre(z: &Vertex, n: u32) -> Vertex {
    let shift: Vec<i32> = z.coords().iter().map(|&c| c * n as i32).collect();
    Vertex::new(&shift).expect("same dimension")
}

/// Analyzes `B_n(z)` in a configuration covering `B_{2n+2F-1+max(S,1)} + nz`.
pub fn analyze_block(c: &Configuration, labeling: &ClusterLabeling, z: &Vertex, n: u32) -> Result<BlockReport> {
    let rn = rn_at(c, labeling, &block_centre(z, n), n)?;
    Ok(analyze_mask(*z, n, rn))
}

/// `|∂_i C| = |ΔC ∩ B_n|`.
pub fn edge_boundary_internal(c: &VertexSet, n: u32) -> Result<usize> {
    let Some(d) = c.dim() else {
        return Ok(0);
    };
    let bx = LatticeBox::new(d, n)?;
    if let Some(v) = c.iter().find(|v| !bx.contains(v)) {
        return Err(Error::OutsideBox(v.to_string()));
    }
    let ext = Exterior::of(c).expect("nonempty");
    let mut count = 0;
    for v in bx.cuboid().iter() {
        if ext.is_outside(&v) && v.neighbors().any(|w| c.contains(&w)) {
            count += 1;
        }
    }
    Ok(count)
}

/// `|∂_i C| >= K |C|^{(d-1)/d}` for connected `C ⊆ B_n` with `|C| <= 4/5 |B_n|`.
pub fn isoperimetric_check(c: &VertexSet, n: u32, k: f64) -> Result<bool> {
    let d = c.dim().ok_or_else(|| Error::Precondition("empty set".into()))?;
    let bx = LatticeBox::new(d, n)?;
    if !c.is_connected() {
        return Err(Error::Precondition("set is not connected".into()));
    }
    if 5 * c.len() > 4 * bx.len() {
        return Err(Error::Precondition("set exceeds 4/5 of the box".into()));
    }
    let b = edge_boundary_internal(c, n)? as f64;
    Ok(b >= k * (c.len() as f64).powf((d as f64 - 1.0) / d as f64))
}

/// `min |∂_i C| / |C|^{(d-1)/d}` over connected `C ⊆ B_n` with
/// `|C| <= min(max_size, 4/5 |B_n|)`, by exhaustive enumeration.
pub fn measured_isoperimetric_constant(d: usize, n: u32, max_size: usize) -> Result<f64> {
    let bx = LatticeBox::new(d, n)?;
    let cap = max_size.min(4 * bx.len() / 5);
    let mut best = f64::INFINITY;
    let mut err = None;
    crate::animals::connected_subsets_of_box(d, n, cap, |set| {
        if err.is_some() {
            return;
        }
        let c = VertexSet::from_set_unchecked(set.iter().copied().collect());
        match edge_boundary_internal(&c, n) {
            Ok(b) => {
                let ratio = b as f64 / (set.len() as f64).powf((d as f64 - 1.0) / d as f64);
                best = best.min(ratio);
            }
            Err(e) => err = Some(e),
        }
    })?;
    match err {
        Some(e) => Err(e),
        None => Ok(best),
    }
}

/// A configuration with all blocks `B_n(z)`, `z ∈ [-r, r]^d`.
#[derive(Clone, Debug)]
pub struct BlockGrid {
    pub params: ModelParams,
    pub n: u32,
    pub r: u32,
    config: Configuration,
    labeling: ClusterLabeling,
    bboxes: Vec<Cuboid>,
}

/// Radius of the configuration box needed by a block grid.
pub fn grid_config_radius(n: u32, r: u32, s: u32, f: u32) -> u32 {
    n * r + rn_box_radius(n, s, f)
}

impl BlockGrid {
    pub fn sample(params: ModelParams, n: u32, r: u32, seed: u64) -> Result<Self> {
        let bx = LatticeBox::new(params.d, grid_config_radius(n, r, params.s, params.f))?;
        Self::from_config(Configuration::sample(params, bx, seed)?, n, r)
    }

    pub fn from_config(config: Configuration, n: u32, r: u32) -> Result<Self> {
        let params = *config.params();
        let need = grid_config_radius(n, r, params.s, params.f);
        let cover = LatticeBox::new(params.d, need)?.cuboid();
        if !config.region().contains_cuboid(&cover) {
            return Err(Error::BoxTooSmall {
                need,
                have: (config.region().side(0) / 2) as u32,
            });
        }
        let labeling = cluster_labels(&config);
        let bboxes = labeling.bounding_boxes();
        Ok(BlockGrid {
            params,
            n,
            r,
            config,
            labeling,
            bboxes,
        })
    }

    pub fn config(&self) -> &Configuration {
        &self.config
    }

    /// The block indices `[-r, r]^d`.
    pub fn indices(&self) -> Cuboid {
        let r = self.r as i32;
        let mut lo = [0; MAX_DIM];
        let mut hi = [0; MAX_DIM];
        for i in 0..self.params.d {
            lo[i] = -r;
            hi[i] = r;
        }
        Cuboid::new_unchecked(self.params.d, lo, hi)
    }

    pub fn analyze(&self, z: &Vertex) -> Result<BlockReport> {
        if !self.indices().contains(z) {
            return Err(Error::OutsideBox(z.to_string()));
        }
        let centre = block_centre(z, self.n);
        let f = self.params.f;
        let far = LatticeBox::new(self.params.d, 2 * self.n + 2 * f - 1)?.translated(&centre);
        let reach: Vec<bool> = self.bboxes.iter().map(|b| !far.contains_cuboid(b)).collect();
        let rn = rn_from_reach(&self.labeling, &reach, &centre, self.n, f)?;
        Ok(analyze_mask(*z, self.n, rn))
    }

    /// Reports for every block, in index order.
    pub fn analyze_all(&self) -> Result<Vec<BlockReport>> {
        let idx = self.indices();
        (0..idx.len())
            .into_par_iter()
            .map(|i| self.analyze(&idx.vertex(i)))
            .collect()
    }
}

/// Good flags over the block indices and whether a good component (blocks
/// adjacent when their indices are at L∞ distance 1) joins the faces
/// `z_1 = -r` and `z_1 = r`.
#[derive(Clone, Debug)]
pub struct GoodBlockField {
    pub indices: Cuboid,
    pub good: Vec<bool>,
    pub spanning: bool,
}

pub fn good_block_field(indices: &Cuboid, reports: &[BlockReport]) -> GoodBlockField {
    let good: Vec<bool> = reports.iter().map(|r| r.good).collect();
    let d = indices.dim();
    let mut seen = vec![false; indices.len()];
    let mut queue = VecDeque::new();
    for (i, v) in indices.iter().enumerate() {
        if good[i] && v.coord(0) == indices.lo_at(0) {
            seen[i] = true;
            queue.push_back(i);
        }
    }
    let mut spanning = false;
    let steps: Vec<Vec<i32>> = (0..3usize.pow(d as u32))
        .map(|t| {
            (0..d)
                .map(|i| (t / 3usize.pow(i as u32) % 3) as i32 - 1)
                .collect::<Vec<i32>>()
        })
        .filter(|s| s.iter().any(|&c| c != 0))
        .collect();
    while let Some(i) = queue.pop_front() {
        let v = indices.vertex(i);
        if v.coord(0) == indices.hi_at(0) {
            spanning = true;
            break;
        }
        for s in &steps {
            let w = v.offset_by(s);
            if let Some(j) = indices.try_index(&w) {
                if good[j] && !seen[j] {
                    seen[j] = true;
                    queue.push_back(j);
                }
            }
        }
    }
    GoodBlockField {
        indices: *indices,
        good,
        spanning,
    }
}

/// Bi-green vertices in the overlap of two good neighbouring blocks.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Overlap {
    pub overlap_size: usize,
    pub bi_green: usize,
    pub fraction: f64,
    /// The blocks differ along a single axis: the overlap is half a block
    /// and two green sets of 4/5 of a block must meet in at least 1/10 of it.
    pub axis_neighbours: bool,
}

impl Overlap {
    pub fn nonempty(&self) -> bool {
        self.bi_green > 0
    }
}

pub fn green_overlap_check(a: &BlockReport, b: &BlockReport) -> Result<Overlap> {
    if a.z.linf_distance(&b.z) != 1 {
        return Err(Error::Precondition(format!(
            "blocks {} and {} are not adjacent",
            a.z, b.z
        )));
    }
    let (Some(ga), Some(gb)) = (&a.green, &b.green) else {
        return Err(Error::Precondition("both blocks must be good".into()));
    };
    let overlap = a.block.intersect(&b.block).expect("adjacent blocks intersect");
    let bi_green = overlap.iter().filter(|v| ga.contains(v) && gb.contains(v)).count();
    Ok(Overlap {
        overlap_size: overlap.len(),
        bi_green,
        fraction: bi_green as f64 / overlap.len() as f64,
        axis_neighbours: a.z.l1_distance(&b.z) == 1,
    })
}

/// Monte Carlo frequency of `L_n` for the block at the origin.
pub fn estimate_ln_probability(params: ModelParams, n: u32, samples: u64, seed: u64) -> Result<Estimate> {
    let bx = LatticeBox::new(params.d, rn_box_radius(n, params.s, params.f))?;
    let origin = Vertex::origin(params.d)?;
    let hits = (0..samples)
        .into_par_iter()
        .map(|i| -> Result<u64> {
            let c = Configuration::sample(params, bx, derive_seed(seed, i))?;
            let lab = cluster_labels(&c);
            Ok(analyze_block(&c, &lab, &origin, n)?.good as u64)
        })
        .try_reduce(|| 0, |a, b| Ok(a + b))?;
    Ok(Estimate::proportion(hits, samples, seed))
}

/// Tallies over all blocks of one sampled grid.
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize)]
pub struct GridSummary {
    pub seed: u64,
    pub blocks: u64,
    pub good: u64,
    pub identity_failures: u64,
    pub counting_failures: u64,
    /// Pairs of good blocks whose indices differ along one axis.
    pub axis_pairs: u64,
    pub axis_empty_overlaps: u64,
    /// Pairs of good blocks at index distance 1 along several axes.
    pub diagonal_pairs: u64,
    pub diagonal_empty_overlaps: u64,
    pub min_axis_fraction: f64,
    pub spanning: bool,
}

/// Samples a grid and checks every block and every pair of good neighbours.
pub fn grid_summary(params: ModelParams, n: u32, r: u32, seed: u64) -> Result<GridSummary> {
    let grid = BlockGrid::sample(params, n, r, seed)?;
    let reports = grid.analyze_all()?;
    let idx = grid.indices();
    let field = good_block_field(&idx, &reports);
    let mut s = GridSummary {
        seed,
        blocks: reports.len() as u64,
        min_axis_fraction: 1.0,
        spanning: field.spanning,
        ..Default::default()
    };
    for (i, a) in reports.iter().enumerate() {
        s.good += a.good as u64;
        s.identity_failures += !a.identity_holds() as u64;
        s.counting_failures += !a.counting_inequality_holds() as u64;
        if !a.good {
            continue;
        }
        for (j, b) in reports.iter().enumerate().skip(i + 1) {
            if !b.good || idx.vertex(i).linf_distance(&idx.vertex(j)) != 1 {
                continue;
            }
            let o = green_overlap_check(a, b)?;
            if o.axis_neighbours {
                s.axis_pairs += 1;
                s.axis_empty_overlaps += !o.nonempty() as u64;
                s.min_axis_fraction = s.min_axis_fraction.min(o.fraction);
            } else {
                s.diagonal_pairs += 1;
                s.diagonal_empty_overlaps += !o.nonempty() as u64;
            }
        }
    }
    Ok(s)
}

/// Pooled correlation of good flags between blocks at index distance `dist`.
pub fn good_flag_correlation(fields: &[GoodBlockField], dist: u32) -> Option<f64> {
    let (mut sx, mut sy, mut sxy, mut sxx, mut syy, mut n) = (0.0, 0.0, 0.0, 0.0, 0.0, 0.0);
    for f in fields {
        for (i, v) in f.indices.iter().enumerate() {
            let w = v.shifted(0, dist as i32);
            if let Some(j) = f.indices.try_index(&w) {
                let (x, y) = (f.good[i] as u8 as f64, f.good[j] as u8 as f64);
                sx += x;
                sy += y;
                sxy += x * y;
                sxx += x * x;
                syy += y * y;
                n += 1.0;
            }
        }
    }
    let cov = sxy / n - sx / n * sy / n;
    let vx = sxx / n - (sx / n).powi(2);
    let vy = syy / n - (sy / n).powi(2);
    (n > 0.0 && vx > 0.0 && vy > 0.0).then(|| cov / (vx * vy).sqrt())
}
