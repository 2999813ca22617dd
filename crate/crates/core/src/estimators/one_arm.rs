use std::collections::VecDeque;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::{Cuboid, LatticeBox, Vertex};
use crate::percolation::{EdgeField, ModelParams};
use crate::rng::derive_seed;
use crate::stats::{linear_fit, Estimate, LinearFit};

/// Reusable exploration state: visit stamps over `B_cap`, which holds every
/// vertex at L∞ distance below `cap`.
struct Explorer {
    region: Cuboid,
    stamp: Vec<u32>,
    round: u32,
    queue: VecDeque<Vertex>,
    nbrs: Vec<Vertex>,
}

impl Explorer {
    fn new(d: usize, cap: u32) -> Result<Self> {
        let region = LatticeBox::new(d, cap.max(1))?.cuboid();
        Ok(Explorer {
            stamp: vec![0; region.len()],
            region,
            round: 0,
            queue: VecDeque::new(),
            nbrs: Vec::new(),
        })
    }

    /// `min(rad(C_0), cap)` for the infinite-volume configuration `field`.
    fn radius(&mut self, field: &EdgeField, cap: u32) -> u32 {
        let d = field.params().d;
        if cap == 0 {
            return 0;
        }
        self.round += 1;
        let origin = Vertex::origin(d).expect("valid dimension");
        self.queue.clear();
        self.queue.push_back(origin);
        self.stamp[self.region.index(&origin)] = self.round;
        let mut best = 0;
        while let Some(x) = self.queue.pop_front() {
            field.open_neighbors(&x, &mut self.nbrs);
            for y in self.nbrs.drain(..) {
                let r = y.linf_norm();
                if r >= cap {
                    return cap;
                }
                let i = self.region.index(&y);
                if self.stamp[i] != self.round {
                    self.stamp[i] = self.round;
                    best = best.max(r);
                    self.queue.push_back(y);
                }
            }
        }
        best
    }
}

/// Radii of the origin's cluster, capped at `cap`, for `samples` independent
/// configurations seeded by `derive_seed(seed, i)`.
pub fn capped_radii(params: ModelParams, cap: u32, samples: u64, seed: u64) -> Result<Vec<u32>> {
    Explorer::new(params.d, cap)?;
    Ok((0..samples)
        .into_par_iter()
        .map_init(
            || Explorer::new(params.d, cap).expect("checked above"),
            |ex, i| ex.radius(&EdgeField::new(params, derive_seed(seed, i)), cap),
        )
        .collect())
}

/// Frequency of `rad(C_0) >= n`. Clusters are explored in the infinite
/// lattice, so no box and no censoring are involved.
pub fn one_arm_probability(params: ModelParams, n: u32, samples: u64, seed: u64) -> Result<Estimate> {
    let radii = capped_radii(params, n, samples, seed)?;
    let hits = radii.iter().filter(|&&r| r >= n).count() as u64;
    Ok(Estimate::proportion(hits, samples, seed))
}

#[derive(Clone, Debug, Serialize)]
pub struct OneArmPoint {
    pub n: u32,
    pub estimate: Estimate,
}

/// `P(rad(C_0) >= n)` over a list of `n`, all from the same samples.
#[derive(Clone, Debug)]
pub struct OneArmCurve {
    pub params: ModelParams,
    pub points: Vec<OneArmPoint>,
}

impl OneArmCurve {
    /// Whether the estimates are non-increasing in `n` up to CI slack.
    pub fn is_monotone(&self) -> bool {
        self.points.windows(2).all(|w| w[1].estimate.lo() <= w[0].estimate.hi())
    }
}

pub fn one_arm_curve(params: ModelParams, ns: &[u32], samples: u64, seed: u64) -> Result<OneArmCurve> {
    let mut ns = ns.to_vec();
    ns.sort_unstable();
    ns.dedup();
    let cap = ns.last().copied().unwrap_or(0);
    let radii = capped_radii(params, cap, samples, seed)?;
    let points = ns
        .iter()
        .map(|&n| {
            let hits = radii.iter().filter(|&&r| r >= n).count() as u64;
            OneArmPoint {
                n,
                estimate: Estimate::proportion(hits, samples, seed),
            }
        })
        .collect();
    Ok(OneArmCurve { params, points })
}

/// Power-law and exponential fits of a one-arm curve.
#[derive(Clone, Debug, Serialize)]
pub struct OneArmFit {
    /// `log P` against `log n`; the slope estimates `-1/ρ`.
    pub power: LinearFit,
    /// `log P` against `n`.
    pub exponential: LinearFit,
    /// The exponential model has the smaller residual sum of squares.
    pub exponential_decay: bool,
    pub n_min: u32,
    pub n_max: u32,
}

impl OneArmFit {
    pub fn slope(&self) -> f64 {
        self.power.slope
    }
}

/// Least-squares fits over the points with a positive estimate.
pub fn fit_one_arm_exponent(curve: &OneArmCurve) -> Result<OneArmFit> {
    let pts: Vec<&OneArmPoint> = curve
        .points
        .iter()
        .filter(|p| p.estimate.value > 0.0 && p.n > 0)
        .collect();
    if pts.len() < 3 {
        return Err(Error::Precondition(format!(
            "need 3 points with positive estimates, have {}",
            pts.len()
        )));
    }
    let n: Vec<f64> = pts.iter().map(|p| p.n as f64).collect();
    let logn: Vec<f64> = n.iter().map(|v| v.ln()).collect();
    let logp: Vec<f64> = pts.iter().map(|p| p.estimate.value.ln()).collect();
    let degenerate = || Error::Precondition("degenerate one-arm curve".into());
    let power = linear_fit(&logn, &logp).ok_or_else(degenerate)?;
    let exponential = linear_fit(&n, &logp).ok_or_else(degenerate)?;
    Ok(OneArmFit {
        power,
        exponential,
        exponential_decay: exponential.rss < power.rss,
        n_min: pts[0].n,
        n_max: pts[pts.len() - 1].n,
    })
}
