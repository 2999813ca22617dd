use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::geometry::LatticeBox;
use crate::percolation::{
    cluster_labels, finite_complement, has_crossing, rn_box_radius, x_in_box, ClusterLabeling, Configuration,
    ModelParams,
};
use crate::rng::derive_seed;
use crate::stats::{linear_fit, Estimate};

/// Settings shared by the threshold bisections.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct Bisection {
    /// Stop once the bracket is narrower than this.
    pub tol: f64,
    pub samples: u64,
    pub lo: f64,
    pub hi: f64,
    /// Also stop as soon as the midpoint's 95% interval covers ½.
    pub stop_when_ci_covers: bool,
}

impl Bisection {
    pub fn new(tol: f64, samples: u64) -> Self {
        Bisection {
            tol,
            samples,
            lo: 0.0,
            hi: 1.0,
            stop_when_ci_covers: false,
        }
    }

    fn check(&self) -> Result<()> {
        if self.tol.is_nan()
            || self.tol <= 0.0
            || self.samples == 0
            || !(0.0 <= self.lo && self.lo < self.hi && self.hi <= 1.0)
        {
            return Err(Error::InvalidParameter(format!("bad bisection settings {self:?}")));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, Serialize)]
pub struct BisectionStep {
    pub p: f64,
    pub estimate: Estimate,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum StopReason {
    Tolerance,
    CiCoversHalf,
}

#[derive(Clone, Debug, Serialize)]
pub struct ThresholdEstimate {
    /// Final midpoint; the half-width adds the bracket half-width to the
    /// statistical spread propagated through the fitted slope.
    pub estimate: Estimate,
    pub steps: Vec<BisectionStep>,
    pub stop: StopReason,
    pub lo: f64,
    pub hi: f64,
    /// Always set: the crossing point of a finite box is not the
    /// infinite-volume threshold.
    pub finite_size_caveat: bool,
}

/// Bisection for the point where an event frequency crosses ½. The
/// frequency is non-decreasing in `p` when `increasing`, otherwise
/// non-increasing.
fn bisect(
    settings: &Bisection,
    seed: u64,
    increasing: bool,
    mut freq: impl FnMut(f64) -> Result<Estimate>,
) -> Result<ThresholdEstimate> {
    settings.check()?;
    let (mut lo, mut hi) = (settings.lo, settings.hi);
    let mut steps = Vec::new();
    let mut stop = StopReason::Tolerance;
    while hi - lo >= settings.tol {
        let mid = 0.5 * (lo + hi);
        let est = freq(mid)?;
        steps.push(BisectionStep { p: mid, estimate: est });
        if settings.stop_when_ci_covers && est.covers(0.5) {
            stop = StopReason::CiCoversHalf;
            lo = mid;
            hi = mid;
            break;
        }
        if (est.value < 0.5) == increasing {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    let value = 0.5 * (lo + hi);
    // statistical part: interval half-width divided by the local slope of
    // the frequency curve, fitted through the interior steps
    let inner: Vec<&BisectionStep> = steps
        .iter()
        .filter(|s| s.estimate.value > 0.05 && s.estimate.value < 0.95)
        .collect();
    let stat = if inner.len() >= 2 {
        let xs: Vec<f64> = inner.iter().map(|s| s.p).collect();
        let ys: Vec<f64> = inner.iter().map(|s| s.estimate.value).collect();
        match linear_fit(&xs, &ys) {
            Some(fit) if fit.slope.abs() > 1e-9 => {
                let w = inner.iter().map(|s| s.estimate.ci_half_width).fold(0.0, f64::max);
                w / fit.slope.abs()
            }
            _ => 0.5 * (settings.hi - settings.lo),
        }
    } else {
        0.5 * (settings.hi - settings.lo)
    };
    let samples = steps.len() as u64 * settings.samples;
    Ok(ThresholdEstimate {
        estimate: Estimate {
            value,
            ci_half_width: 0.5 * (hi - lo) + stat,
            samples,
            seed,
        },
        steps,
        stop,
        lo,
        hi,
        finite_size_caveat: true,
    })
}

fn frequency(samples: u64, seed: u64, event: impl Fn(u64) -> Result<bool> + Sync) -> Result<Estimate> {
    let hits: Vec<Result<bool>> = (0..samples)
        .into_par_iter()
        .map(|i| event(derive_seed(seed, i)))
        .collect();
    let mut count = 0;
    for h in hits {
        if h? {
            count += 1;
        }
    }
    Ok(Estimate::proportion(count, samples, seed))
}

/// Frequency of an open left-right crossing of `B_n`.
pub fn crossing_probability(params: ModelParams, n: u32, samples: u64, seed: u64) -> Result<Estimate> {
    let bx = LatticeBox::new(params.d, n)?;
    frequency(samples, seed, |s| {
        let c = Configuration::sample(params, bx, s)?;
        Ok(has_crossing(&cluster_labels(&c), 0))
    })
}

/// `p_c` estimate: bisection on the crossing frequency of `B_n` = ½.
pub fn estimate_pc(d: usize, s: u32, n: u32, settings: &Bisection, seed: u64) -> Result<ThresholdEstimate> {
    if n < 8 {
        return Err(Error::InvalidParameter(format!("box radius {n} < 8")));
    }
    let base = ModelParams::new(d, 0.0, s, 0)?;
    bisect(settings, seed, true, |p| {
        crossing_probability(base.with_p(p)?, n, settings.samples, seed)
    })
}

/// Number of components of `X^F ∩ B_n = B_n ∖ R_n` joining the two faces
/// orthogonal to the first axis.
fn spanning_x_in_box(c: &Configuration, lab: &ClusterLabeling, n: u32) -> Result<usize> {
    Ok(x_in_box(c, lab, n)?.spanning_components(0))
}

/// Frequency that `X^F ∩ B_n` has a component joining opposite faces.
pub fn xfin_spanning_probability(params: ModelParams, n: u32, samples: u64, seed: u64) -> Result<Estimate> {
    let bx = LatticeBox::new(params.d, rn_box_radius(n, params.s, params.f))?;
    frequency(samples, seed, |s| {
        let c = Configuration::sample(params, bx, s)?;
        Ok(spanning_x_in_box(&c, &cluster_labels(&c), n)? > 0)
    })
}

/// `p_fin` estimate: bisection on the `X^F` spanning frequency = ½.
pub fn estimate_pfin(d: usize, s: u32, f: u32, n: u32, settings: &Bisection, seed: u64) -> Result<ThresholdEstimate> {
    let base = ModelParams::new(d, 0.0, s, f)?;
    bisect(settings, seed, false, |p| {
        xfin_spanning_probability(base.with_p(p)?, n, settings.samples, seed)
    })
}

/// Distinct components of `X^F` (within the whole configuration region)
/// joining the two faces orthogonal to the first axis.
pub fn count_spanning_x_components(c: &Configuration, labeling: &ClusterLabeling, f: u32) -> usize {
    finite_complement(c, labeling, f).spanning_components(0)
}

#[derive(Clone, Debug, Serialize)]
pub struct UniquenessRow {
    pub n: u32,
    pub p: f64,
    pub samples: u64,
    /// `histogram[k]`: samples with `k` spanning components (the last bin
    /// collects everything larger).
    pub histogram: Vec<u64>,
    /// Frequency of two or more spanning components.
    pub multiple: Estimate,
}

/// Distribution of the number of spanning `X^F` components in `B_n` over a
/// grid of `p`. The same seeds are used at every `p`.
pub fn uniqueness_experiment(
    base: ModelParams,
    ns: &[u32],
    ps: &[f64],
    samples: u64,
    seed: u64,
) -> Result<Vec<UniquenessRow>> {
    const BINS: usize = 5;
    let mut rows = Vec::new();
    for &n in ns {
        let bx = LatticeBox::new(base.d, n)?;
        for &p in ps {
            let params = base.with_p(p)?;
            let counts: Vec<Result<usize>> = (0..samples)
                .into_par_iter()
                .map(|i| {
                    let c = Configuration::sample(params, bx, derive_seed(seed, i))?;
                    Ok(count_spanning_x_components(&c, &cluster_labels(&c), params.f))
                })
                .collect();
            let mut histogram = vec![0u64; BINS];
            for k in counts {
                histogram[k?.min(BINS - 1)] += 1;
            }
            let multi: u64 = histogram[2..].iter().sum();
            rows.push(UniquenessRow {
                n,
                p,
                samples,
                histogram,
                multiple: Estimate::proportion(multi, samples, seed),
            });
        }
    }
    Ok(rows)
}

/// Pooled frequency of two or more spanning components over the rows with
/// box radius `n`.
pub fn pooled_multiple(rows: &[UniquenessRow], n: u32) -> Estimate {
    let (mut hits, mut total, mut seed) = (0, 0, 0);
    for r in rows.iter().filter(|r| r.n == n) {
        hits += r.histogram[2..].iter().sum::<u64>();
        total += r.samples;
        seed = r.multiple.seed;
    }
    Estimate::proportion(hits, total, seed)
}
