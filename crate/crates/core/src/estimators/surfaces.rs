use std::collections::{BTreeSet, HashMap, VecDeque};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{FacetKey, Vertex};
use crate::percolation::{
    cluster_labels, good_path_cluster, hyperplane_surface, interior_boundary, project_phi, ClusterLabeling,
    Configuration, EdgeField, ModelParams, PhiPoint, Slab, VertexMask,
};
use crate::rng::derive_seed;
use crate::topology::{pi_limit, pi_of, LimitReport, PlaquetteSet, VertexSet, Window};

/// Outcome of one run of the rightmost-growth construction.
#[derive(Clone, Debug)]
pub struct PiInfinityReport {
    /// Number of sets `V_1 ⊆ V_2 ⊆ ...` built inside the window.
    pub steps: usize,
    /// The settled part of `lim Π(V_n)` (present since the halfway step) is
    /// nonempty.
    pub nonempty: bool,
    /// `f_n` did not change over the second half of the steps.
    pub f_stabilized: bool,
    /// The last `f_n`: an edge `<-r-1, -r>` of the negative first axis.
    pub f: Option<FacetKey>,
    /// `r_n` at every step.
    pub r: Vec<i32>,
    /// The window was exhausted before two steps could be taken.
    pub censored: bool,
    pub limit: Option<LimitReport>,
}

/// Rightmost vertex of `v`: largest first coordinate, ties broken by the
/// lexicographically smallest remaining coordinates.
fn rightmost(v: &VertexSet) -> Vertex {
    *v.iter()
        .max_by(|a, b| {
            a.coord(0)
                .cmp(&b.coord(0))
                .then_with(|| b.coords()[1..].cmp(&a.coords()[1..]))
        })
        .expect("nonempty")
}

/// The open cluster of `start`, or `None` once it leaves the window interior.
fn cluster_in_window(field: &EdgeField, start: Vertex, w: &Window) -> Option<Vec<Vertex>> {
    let mut seen: BTreeSet<Vertex> = BTreeSet::from([start]);
    let mut queue = VecDeque::from([start]);
    let mut nbrs = Vec::new();
    let single = |x: Vertex| VertexSet::try_from_iter([x]).expect("valid vertex");
    if w.check(&single(start)).is_err() {
        return None;
    }
    while let Some(x) = queue.pop_front() {
        field.open_neighbors(&x, &mut nbrs);
        for &y in &nbrs {
            if seen.insert(y) {
                if w.check(&single(y)).is_err() {
                    return None;
                }
                queue.push_back(y);
            }
        }
    }
    Some(seen.into_iter().collect())
}

/// `r_n`: the largest `r >= 0` with `π(<-r-1, -r>) ∈ Π_n`, on the line
/// `L = (-∞, 0] × {0}^{d-1}`.
fn line_edge(pi: &PlaquetteSet) -> Option<i32> {
    pi.iter()
        .map(FacetKey::dual)
        .filter(|e| e.has_axis(0))
        .filter_map(|e| {
            let (x, _) = e.edge_endpoints().ok()?;
            let on_line = x.coords()[1..].iter().all(|&c| c == 0) && x.coord(0) <= -1;
            on_line.then(|| -x.coord(0) - 1)
        })
        .max()
}

/// Grows `V_1 = C_0`, `V_{n+1} = V_n ∪ C_{v + e_1}` for a rightmost `v ∈ V_n`
/// inside the window `B_window` and tracks the edge `f_n` of the negative
/// first axis with `π(f_n) ∈ Π(V_n)`.
pub fn pi_infinity_experiment(d: usize, p: f64, window: u32, seed: u64) -> Result<PiInfinityReport> {
    let params = ModelParams::nearest(d, p)?;
    let field = EdgeField::new(params, seed);
    let w = Window::new(d, window)?;
    let mut seq: Vec<VertexSet> = Vec::new();
    let mut current = VertexSet::new();
    let mut start = Vertex::origin(d)?;
    while let Some(cluster) = cluster_in_window(&field, start, &w) {
        for v in cluster {
            current.insert(v)?;
        }
        seq.push(current.clone());
        start = rightmost(&current).shifted(0, 1);
    }
    let steps = seq.len();
    if steps < 2 {
        return Ok(PiInfinityReport {
            steps,
            nonempty: false,
            f_stabilized: false,
            f: None,
            r: Vec::new(),
            censored: true,
            limit: None,
        });
    }
    let mut r = Vec::with_capacity(steps);
    for v in &seq {
        let pi = pi_of(v, &w)?;
        r.push(line_edge(&pi).ok_or_else(|| Error::Internal("Π(V_n) misses the negative axis".into()))?);
    }
    let half = steps / 2;
    let f_stabilized = r[half..].iter().all(|&x| x == r[steps - 1]);
    let last = r[steps - 1];
    let f = Some(FacetKey::edge(&Vertex::origin(d)?.shifted(0, -last - 1), 0));
    let limit = pi_limit(&seq, &w)?;
    let nonempty = !limit.settled(half.max(1)).is_empty();
    Ok(PiInfinityReport {
        steps,
        nonempty,
        f_stabilized,
        f,
        r,
        censored: false,
        limit: Some(limit),
    })
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct PiInfinitySummary {
    pub runs: u64,
    pub stabilized: u64,
    pub nonempty: u64,
    pub stabilized_nonempty: u64,
    pub censored: u64,
}

/// Runs the experiment for seeds `derive_seed(seed, i)`, `i < runs`.
pub fn pi_infinity_runs(d: usize, p: f64, window: u32, runs: u64, seed: u64) -> Result<Vec<PiInfinityReport>> {
    (0..runs)
        .into_par_iter()
        .map(|i| pi_infinity_experiment(d, p, window, derive_seed(seed, i)))
        .collect()
}

pub fn summarize(reports: &[PiInfinityReport]) -> PiInfinitySummary {
    let count = |f: &dyn Fn(&PiInfinityReport) -> bool| reports.iter().filter(|r| f(r)).count() as u64;
    PiInfinitySummary {
        runs: reports.len() as u64,
        stabilized: count(&|r| r.f_stabilized),
        nonempty: count(&|r| r.nonempty),
        stabilized_nonempty: count(&|r| r.f_stabilized && r.nonempty),
        censored: count(&|r| r.censored),
    }
}

/// Result of [`sep_surface`].
#[derive(Clone, Debug)]
pub struct SepSurface {
    /// Plaquettes of the limit approximant dual to edges inside the box.
    pub surface: PlaquetteSet,
    /// Some component of the box minus `A` joins two opposite faces.
    pub complement_crossing: bool,
    pub limit: LimitReport,
}

/// The surface separating the boundary-touching cluster `A` of `x` from the
/// rest of the box: `lim Π(A_n)` with `A_n` the component of `A ∩ B_n`
/// containing `x`, for `n` from the first box containing `x` to the box
/// radius. Only plaquettes dual to edges with both endpoints in the box are
/// kept.
pub fn sep_surface(c: &Configuration, labeling: &ClusterLabeling, x: &Vertex) -> Result<SepSurface> {
    let radius = c
        .box_radius()
        .ok_or_else(|| Error::Precondition("configuration region must be a centred box".into()))?;
    let l = labeling.label(x).ok_or_else(|| Error::OutsideBox(x.to_string()))?;
    if !labeling.touches_boundary(l) {
        return Err(Error::Precondition(format!(
            "{x} is not in a boundary-touching cluster"
        )));
    }
    let region = *c.region();
    let d = region.dim();
    let a = VertexMask::from_bits(region, labeling.labels().iter().map(|&k| k == l).collect());
    let mut seq = Vec::new();
    // smallest n with x ∈ B_n = (-n, n]^d
    let first = x
        .coords()
        .iter()
        .map(|&c| if c > 0 { c } else { 1 - c })
        .max()
        .unwrap_or(1) as u32;
    for n in first..=radius {
        let bx = crate::geometry::LatticeBox::new(d, n)?.cuboid();
        let comp = a.restricted(&bx).component_of(x);
        seq.push(VertexSet::try_from_iter(comp)?);
    }
    let w = Window::new(d, radius + 2)?;
    let limit = pi_limit(&seq, &w)?;
    let mut surface = limit.limit_set.clone();
    surface.retain(|q| {
        let (u, v) = q.dual().edge_endpoints().expect("plaquettes are dual to edges");
        region.contains(&u) && region.contains(&v)
    });
    let rest = a.complement();
    let complement_crossing = (0..d).any(|axis| rest.spanning_components(axis) > 0);
    Ok(SepSurface {
        surface,
        complement_crossing,
        limit,
    })
}

/// Outcome of the hyperplane-surface construction on one configuration.
#[derive(Clone, Debug, Serialize)]
pub struct HyperplaneReport {
    pub seed: u64,
    pub plaquettes: usize,
    pub interior_boundary: usize,
    pub interior_plaquettes: usize,
    /// `φ` is injective on the centres of interior plaquettes.
    pub phi_injective: bool,
    /// `K` reached the top of the slab.
    pub censored: bool,
}

/// The plaquettes dual to the edges from level 0 to level 1 of the slab.
pub fn flat_sheet(slab: &Slab) -> Result<PlaquetteSet> {
    let mut out = PlaquetteSet::new();
    for u in slab.cuboid().iter().filter(|u| u.coord_sum() == 0 && slab.contains(u)) {
        for axis in 0..slab.d {
            if slab.contains(&u.shifted(axis, 1)) {
                out.insert(FacetKey::edge(&u, axis).dual())?;
            }
        }
    }
    Ok(out)
}

/// Whether a plaquette's dual edge keeps a lateral margin of two from the
/// slab's sides.
fn interior_plaquette(slab: &Slab, q: &FacetKey) -> bool {
    let Ok((u, v)) = q.dual().edge_endpoints() else {
        return false;
    };
    let d = slab.d as i64;
    let bound = d * (slab.half_width as i64 - 2);
    [u, v].iter().all(|x| {
        let s = x.coord_sum();
        x.coords().iter().all(|&c| (d * c as i64 - s).abs() <= bound)
    })
}

pub fn hyperplane_experiment(p: f64, slab: &Slab, seed: u64) -> Result<(HyperplaneReport, PlaquetteSet)> {
    let params = ModelParams::nearest(slab.d, p)?;
    let c = Configuration::sample_cuboid(params, slab.cuboid().expanded(1), seed)?;
    let k = good_path_cluster(&c, slab)?;
    let s = hyperplane_surface(&c, &k)?;
    let ib = interior_boundary(slab, &s);
    let mut seen: HashMap<PhiPoint, FacetKey> = HashMap::new();
    let mut injective = true;
    let mut interior = 0;
    for q in s.iter().filter(|q| interior_plaquette(slab, q)) {
        interior += 1;
        if seen.insert(project_phi(&q.doubled_centre()), *q).is_some() {
            injective = false;
        }
    }
    let report = HyperplaneReport {
        seed,
        plaquettes: s.len(),
        interior_boundary: ib.len(),
        interior_plaquettes: interior,
        phi_injective: injective,
        censored: k.censored,
    };
    Ok((report, s))
}

/// Labels every vertex of a sampled box and returns the configuration with
/// its labeling; a convenience for [`sep_surface`].
pub fn sample_labeled(params: ModelParams, radius: u32, seed: u64) -> Result<(Configuration, ClusterLabeling)> {
    let c = Configuration::sample(params, crate::geometry::LatticeBox::new(params.d, radius)?, seed)?;
    let lab = cluster_labels(&c);
    Ok((c, lab))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::topology::is_surface;

    #[test]
    fn growth_at_p_zero_is_a_ray() {
        let r = pi_infinity_experiment(3, 0.0, 8, 1).unwrap();
        assert!(!r.censored);
        assert!(r.f_stabilized && r.nonempty);
        assert!(r.r.iter().all(|&x| x == 0));
        assert_eq!(r.f, Some(FacetKey::edge(&Vertex::new(&[-1, 0, 0]).unwrap(), 0)));
        // V_n = {0, e_1, ..., (n-1) e_1}
        assert_eq!(r.steps, 8);
    }

    #[test]
    fn subcritical_growth() {
        let reports = pi_infinity_runs(3, 0.15, 24, 10, 3).unwrap();
        let s = summarize(&reports);
        assert_eq!(s.runs, 10);
        assert!(s.stabilized >= 7, "{s:?}");
        for r in &reports {
            if let Some(limit) = &r.limit {
                assert!(!limit.limit_set.is_empty());
            }
        }
    }

    #[test]
    fn sep_at_extremes() {
        let params = ModelParams::nearest(3, 1.0).unwrap();
        let (c, lab) = sample_labeled(params, 3, 0).unwrap();
        let s = sep_surface(&c, &lab, &Vertex::origin(3).unwrap()).unwrap();
        assert!(s.surface.is_empty());
        assert!(!s.complement_crossing);
        let (c, lab) = sample_labeled(params.with_p(0.0).unwrap(), 3, 0).unwrap();
        assert!(sep_surface(&c, &lab, &Vertex::origin(3).unwrap()).is_err());
    }

    #[test]
    fn sep_open_slab() {
        // the plane {x_3 = 0} fully open, everything else closed
        let params = ModelParams::nearest(3, 0.5).unwrap();
        let bx = crate::geometry::LatticeBox::new(3, 4).unwrap();
        let c = Configuration::from_fn(params, bx.cuboid(), |x, y| x.coord(2) == 0 && y.coord(2) == 0).unwrap();
        let lab = cluster_labels(&c);
        let s = sep_surface(&c, &lab, &Vertex::origin(3).unwrap()).unwrap();
        assert!(s.complement_crossing);
        // two sheets, above and below the plane, each 8^2 plaquettes
        assert_eq!(s.surface.len(), 2 * 64);
        let x2 = Vertex::new(&[3, -2, 0]).unwrap();
        let s2 = sep_surface(&c, &lab, &x2).unwrap();
        assert_eq!(s.surface, s2.surface);
        let full = &s.limit.limit_set;
        assert!(is_surface(full));
    }

    #[test]
    fn base_point_independence() {
        let params = ModelParams::nearest(3, 0.35).unwrap();
        for seed in 0..5 {
            let (c, lab) = sample_labeled(params, 5, seed).unwrap();
            let big = (0..lab.cluster_count() as u32)
                .filter(|&l| lab.touches_boundary(l))
                .max_by_key(|&l| lab.size(l))
                .unwrap();
            let members = lab.members(big);
            let a = sep_surface(&c, &lab, &members[0]).unwrap();
            let b = sep_surface(&c, &lab, &members[members.len() - 1]).unwrap();
            assert_eq!(a.surface, b.surface);
        }
    }

    #[test]
    fn hyperplane_flat_and_random() {
        let slab = Slab::new(3, 8, 6).unwrap();
        let (rep, s) = hyperplane_experiment(0.0, &slab, 1).unwrap();
        assert_eq!(s, flat_sheet(&slab).unwrap());
        assert!(rep.phi_injective);
        for seed in 0..5 {
            let (rep, _) = hyperplane_experiment(0.04, &slab, seed).unwrap();
            assert_eq!(rep.interior_boundary, 0);
            assert!(rep.phi_injective);
        }
    }
}
