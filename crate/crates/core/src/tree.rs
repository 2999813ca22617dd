//! Percolation of the finite-cluster set `X` on the rooted tree `T_b`
//! (root degree `b`, other degrees `b + 1`), in double-double arithmetic.
//!
//! The open cluster of the root is a Galton-Watson process with offspring
//! pgf `G(s) = (1 - p + ps)^b`. Conditioned on extinction its offspring pgf
//! is `H(s) = G(sη)/η` and its total size has pgf `T(s) = sH(T(s))`. The
//! boundary edges of finite clusters form a branching process with pgf
//! `K(s) = 1 - η + ηsT(s^{b-1})`, which survives exactly when the root lies
//! in an infinite component of `X`.

use rand::{RngExt, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use twofloat::TwoFloat;

use crate::error::{Error, Result};
use crate::rng::derive_seed;
use crate::stats::Estimate;

pub type Real = TwoFloat;

const FIXED_POINT_TOL: f64 = 1e-30;
const FIXED_POINT_CAP: usize = 1_000_000;

fn real(x: f64) -> Real {
    Real::from(x)
}

fn to_f64(x: Real) -> f64 {
    x.hi() + x.lo()
}

/// `a / b` refined by two correction steps. The crate's own quotient forms
/// its residual without a fused multiply-add and loses about half the bits.
fn div(a: Real, b: Real) -> Real {
    let q1 = a.hi() / b.hi();
    let r = a - b * q1;
    let q2 = r.hi() / b.hi();
    let r = r - b * q2;
    let q3 = r.hi() / b.hi();
    Real::from(q1) + q2 + q3
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize)]
pub struct TreeModel {
    pub b: u32,
    pub p: f64,
}

impl TreeModel {
    pub fn new(b: u32, p: f64) -> Result<Self> {
        if b < 2 {
            return Err(Error::InvalidParameter(format!("tree branching number {b} < 2")));
        }
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::InvalidProbability(p));
        }
        Ok(TreeModel { b, p })
    }

    /// `p <= 1/b`: every open cluster is finite.
    pub fn subcritical(&self) -> bool {
        self.p * self.b as f64 <= 1.0
    }
}

/// `G(s) = (1 - p + ps)^b`.
pub fn offspring_pgf(s: Real, b: u32, p: f64) -> Result<Real> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "pgf argument {} outside [0, 1]",
            to_f64(s)
        )));
    }
    Ok(g(s, b, p))
}

fn g(s: Real, b: u32, p: f64) -> Real {
    (real(1.0 - p) + s * p).powi(b as i32)
}

/// `G'(s) = bp(1 - p + ps)^{b-1}`.
pub fn offspring_pgf_d1(s: Real, b: u32, p: f64) -> Real {
    (real(1.0 - p) + s * p).powi(b as i32 - 1) * (b as f64 * p)
}

/// `G''(s) = b(b-1)p^2 (1 - p + ps)^{b-2}`.
pub fn offspring_pgf_d2(s: Real, b: u32, p: f64) -> Real {
    (real(1.0 - p) + s * p).powi(b as i32 - 2) * (b as f64 * (b as f64 - 1.0)) * (real(p) * p)
}

/// Smallest nonnegative root of `G(s) = s`.
pub fn extinction_eta(b: u32, p: f64) -> Real {
    if p * b as f64 <= 1.0 {
        return real(1.0);
    }
    if p >= 1.0 {
        return real(0.0);
    }
    // G(s) - s is positive at 0 and negative just below 1; the root between
    // is unique by convexity
    let mut lo = real(0.0);
    let mut hi = real(1.0 - 1e-16);
    if g(hi, b, p) - hi >= 0.0 {
        hi = real(1.0) - real(1e-30);
    }
    for _ in 0..200 {
        let mid = (lo + hi) / 2.0;
        if g(mid, b, p) - mid > 0.0 {
            lo = mid;
        } else {
            hi = mid;
        }
        if hi - lo < 1e-33 {
            break;
        }
    }
    // polish with Newton steps on G(s) - s
    let mut s = (lo + hi) / 2.0;
    for _ in 0..3 {
        let f = g(s, b, p) - s;
        let fp = offspring_pgf_d1(s, b, p) - 1.0;
        if fp == 0.0 {
            break;
        }
        let next = s - div(f, fp);
        if next >= lo && next <= hi {
            s = next;
        }
    }
    s
}

/// `G'(η) = bpη/(1 - p + pη)` above criticality, `bp` otherwise.
pub fn g_prime_at_eta(b: u32, p: f64, eta: Real) -> Real {
    if p * b as f64 <= 1.0 {
        return real(b as f64 * p);
    }
    div(eta * (b as f64 * p), real(1.0 - p) + eta * p)
}

/// `G''(η) = p^2 ηb(b-1)/(1 - p + pη)^2` above criticality, `G''(1)` otherwise.
pub fn g_double_prime_at_eta(b: u32, p: f64, eta: Real) -> Real {
    if p * b as f64 <= 1.0 {
        return real(b as f64 * (b as f64 - 1.0) * p * p);
    }
    let den = real(1.0 - p) + eta * p;
    div(real(p) * p * eta * (b as f64 * (b as f64 - 1.0)), den * den)
}

#[derive(Clone, Copy, Debug)]
pub struct TreeSolution {
    pub model: TreeModel,
    pub eta: Real,
    pub gp: Real,
    pub gpp: Real,
    /// `T'(1)`; absent at the singular point `G'(η) = 1`.
    pub t1: Option<Real>,
    pub t2: Option<Real>,
    pub percolates_x: bool,
}

impl TreeSolution {
    /// `K'(1) = η(1 + (b - 1)T'(1))`.
    pub fn k1(&self) -> Option<Real> {
        self.t1.map(|t1| self.eta * (t1 * (self.model.b as f64 - 1.0) + 1.0))
    }

    /// `K''(1) = η(b - 1)(bT'(1) + (b - 1)T''(1))`.
    pub fn k2(&self) -> Option<Real> {
        let b = self.model.b as f64;
        match (self.t1, self.t2) {
            (Some(t1), Some(t2)) => Some(self.eta * (b - 1.0) * (t1 * b + t2 * (b - 1.0))),
            _ => None,
        }
    }
}

pub fn solve(b: u32, p: f64) -> Result<TreeSolution> {
    let model = TreeModel::new(b, p)?;
    let eta = extinction_eta(b, p);
    let gp = g_prime_at_eta(b, p, eta);
    let gpp = g_double_prime_at_eta(b, p, eta);
    let (t1, t2) = match derivs(eta, gp, gpp) {
        Ok((a, c)) => (Some(a), Some(c)),
        Err(_) => (None, None),
    };
    Ok(TreeSolution {
        model,
        eta,
        gp,
        gpp,
        t1,
        t2,
        percolates_x: x_percolates(b, p)?,
    })
}

fn derivs(eta: Real, gp: Real, gpp: Real) -> Result<(Real, Real)> {
    let gap = real(1.0) - gp;
    if gap <= 0.0 {
        return Err(Error::CriticalSingularity);
    }
    let t1 = div(real(1.0), gap);
    let t2 = div(gp * gap * 2.0 + eta * gpp, gap * gap * gap);
    Ok((t1, t2))
}

/// `(T'(1), T''(1))` from the closed forms.
pub fn total_size_derivs(sol: &TreeSolution) -> Result<(Real, Real)> {
    derivs(sol.eta, sol.gp, sol.gpp)
}

/// `H(t) = G(tη)/η`; the limit `t^b`-free form is used at `η = 0`.
fn h(t: Real, sol: &TreeSolution) -> Real {
    if sol.eta == 0.0 {
        return real(0.0);
    }
    div(g(t * sol.eta, sol.model.b, sol.model.p), sol.eta)
}

fn h_prime(t: Real, sol: &TreeSolution) -> Real {
    offspring_pgf_d1(t * sol.eta, sol.model.b, sol.model.p)
}

/// `T(s)` by the monotone iteration `t <- sH(t)` from `t = 0`.
pub fn total_size_pgf(s: Real, sol: &TreeSolution) -> Result<Real> {
    if !(0.0..=1.0).contains(&s) {
        return Err(Error::InvalidParameter(format!(
            "pgf argument {} outside [0, 1]",
            to_f64(s)
        )));
    }
    let mut t = real(0.0);
    for _ in 0..FIXED_POINT_CAP {
        let next = s * h(t, sol);
        if (next - t).abs() <= FIXED_POINT_TOL {
            return Ok(next);
        }
        t = next;
    }
    Err(Error::NonConvergent(format!("T({}) did not converge", to_f64(s))))
}

/// `T'(s) = H(T)/(1 - sH'(T))`, differentiating `T = sH(T)`.
fn total_size_pgf_d1(s: Real, t: Real, sol: &TreeSolution) -> Real {
    div(h(t, sol), real(1.0) - s * h_prime(t, sol))
}

/// `K(s) = 1 - η + ηsT(s^{b-1})`.
pub fn boundary_edge_pgf(s: Real, sol: &TreeSolution) -> Result<Real> {
    let u = s.powi(sol.model.b as i32 - 1);
    Ok(real(1.0) - sol.eta + sol.eta * s * total_size_pgf(u, sol)?)
}

/// `(K(s), K'(s))`.
fn boundary_edge_pgf_with_d1(s: Real, sol: &TreeSolution) -> Result<(Real, Real)> {
    let b = sol.model.b as i32;
    let u = s.powi(b - 1);
    let t = total_size_pgf(u, sol)?;
    let tp = total_size_pgf_d1(u, t, sol);
    let k = real(1.0) - sol.eta + sol.eta * s * t;
    let kp = sol.eta * (t + tp * u * (b as f64 - 1.0));
    Ok((k, kp))
}

/// Margins of the two equivalent percolation criteria for `X`:
/// `G'(η) - (1 - bη)/(1 - η)` and `η - (1 - p)/(b - p)`. Both are positive
/// exactly when `X` percolates (for `p > 1/b`).
pub fn criteria_margins(b: u32, p: f64) -> (Real, Real) {
    let eta = extinction_eta(b, p);
    let gp = g_prime_at_eta(b, p, eta);
    let bf = b as f64;
    let v1 = gp - div(real(1.0) - eta * bf, real(1.0) - eta);
    let v2 = eta - real(1.0 - p) / (bf - p);
    (v1, v2)
}

/// Whether `X` has an infinite component with positive probability.
pub fn x_percolates(b: u32, p: f64) -> Result<bool> {
    let model = TreeModel::new(b, p)?;
    if model.subcritical() {
        return Ok(true);
    }
    let (v1, v2) = criteria_margins(b, p);
    // the forms agree away from the switch point; rounding decides at it
    if v1.abs() > 1e-25 && v2.abs() > 1e-25 && (v1 > 0.0) != (v2 > 0.0) {
        return Err(Error::Internal(format!("criteria disagree at b={b}, p={p}")));
    }
    Ok(v2 > 0.0)
}

/// `b^{1/(b-1)}` by Newton's method on `x^{b-1} = b`.
fn root_b(b: u32) -> Real {
    let bf = b as f64;
    let k = b as i32 - 1;
    let mut x = real(bf.powf(1.0 / (bf - 1.0)));
    for _ in 0..4 {
        let xk = x.powi(k);
        x -= div(xk - bf, div(xk, x) * (k as f64));
    }
    x
}

/// `p_fin(T_b) = (b^{b/(b-1)} - b)/(b^{b/(b-1)} - 1)`.
pub fn pfin_tree(b: u32) -> Result<Real> {
    if b < 2 {
        return Err(Error::InvalidParameter(format!("tree branching number {b} < 2")));
    }
    let c = root_b(b) * b as f64;
    Ok(div(c - b as f64, c - 1.0))
}

/// The switch point of [`x_percolates`], by bisection in `p`.
pub fn pfin_by_bisection(b: u32, tol: f64) -> Result<f64> {
    let mut lo = 1.0 / b as f64;
    let mut hi = 1.0;
    while hi - lo > tol {
        let mid = 0.5 * (lo + hi);
        if x_percolates(b, mid)? {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// `κ(p)`: probability that the root lies in an infinite component of `X`,
/// i.e. `1 - q` with `q` the smallest root of `K(q) = q`.
pub fn kappa(b: u32, p: f64) -> Result<Real> {
    let sol = solve(b, p)?;
    kappa_of(&sol)
}

pub fn kappa_of(sol: &TreeSolution) -> Result<Real> {
    if sol.model.subcritical() {
        return Ok(real(1.0));
    }
    match sol.k1() {
        Some(k1) if k1 > 1.0 => {}
        _ => return Ok(real(0.0)),
    }
    // Newton from q = 0 increases monotonically to the smallest root of the
    // convex function K(q) - q
    let mut q = real(0.0);
    for _ in 0..500 {
        let (k, kp) = boundary_edge_pgf_with_d1(q, sol)?;
        let f = k - q;
        let fp = kp - 1.0;
        if fp >= 0.0 {
            return Err(Error::NonConvergent("K(q) - q lost its slope".into()));
        }
        let next = q - div(f, fp);
        if (next - q).abs() <= 1e-29 || f.abs() <= 1e-31 {
            return Ok(real(1.0) - next);
        }
        q = next;
    }
    Err(Error::NonConvergent(format!(
        "kappa at b={}, p={}",
        sol.model.b, sol.model.p
    )))
}

/// Diagnostics of the extrapolation ladder for `c_b`.
#[derive(Clone, Debug, Serialize)]
pub struct CbLadder {
    pub eps: Vec<f64>,
    /// `κ(p_fin - ε)/ε` along the ladder.
    pub ratios: Vec<f64>,
    /// Richardson columns (first-order, second-order, ...).
    pub extrapolated: Vec<Vec<f64>>,
    pub value: f64,
}

/// `c_b = lim κ(p_fin - ε)/ε`, by Richardson extrapolation of the ratios at
/// `ε = 10^{-3} 2^{-k}`.
pub fn c_b(b: u32) -> Result<CbLadder> {
    let pfin = pfin_tree(b)?;
    let levels = 6;
    let mut eps = Vec::new();
    let mut ratios = Vec::new();
    for k in 0..levels {
        let e = 1e-3 / (1u64 << k) as f64;
        let p = to_f64(pfin - e);
        // use the exact gap to the representable p
        let gap = to_f64(pfin - p);
        let kap = kappa(b, p)?;
        if kap <= 0.0 {
            return Err(Error::NonConvergent(format!("κ vanished below p_fin at ε = {e}")));
        }
        eps.push(gap);
        ratios.push(to_f64(kap) / gap);
    }
    let mut extrapolated = Vec::new();
    let mut col = ratios.clone();
    for order in 1..levels {
        let f = (1u64 << order) as f64;
        col = col.windows(2).map(|w| (f * w[1] - w[0]) / (f - 1.0)).collect();
        extrapolated.push(col.clone());
    }
    // the ratios carry an O(ε) term, so the second column is the first to
    // converge at O(ε^2); compare it with the third
    let second = &extrapolated[1];
    let value = second[second.len() - 1];
    let third = &extrapolated[2];
    let check = third[third.len() - 1];
    if !value.is_finite() || value <= 0.0 || ((value - check) / value).abs() > 1e-8 {
        return Err(Error::NonConvergent(format!(
            "c_b ladder unstable for b={b}: {second:?}"
        )));
    }
    Ok(CbLadder {
        eps,
        ratios,
        extrapolated,
        value,
    })
}

/// `c_b = -2 ∂_p K'(1) / K''(1)` at `p_fin`, from the quadratic expansion of
/// `1 - κ = K(1 - κ)`.
pub fn c_b_analytic(b: u32) -> Result<f64> {
    let pfin = to_f64(pfin_tree(b)?);
    let h = 1e-7;
    let k1 = |p: f64| -> Result<f64> { Ok(to_f64(solve(b, p)?.k1().ok_or(Error::CriticalSingularity)?)) };
    let dk1 = (k1(pfin + h)? - k1(pfin - h)?) / (2.0 * h);
    let k2 = to_f64(solve(b, pfin)?.k2().ok_or(Error::CriticalSingularity)?);
    Ok(-2.0 * dk1 / k2)
}

/// Total progeny of a Galton-Watson tree with `Bin(b, p)` offspring, or
/// `None` once `active` individuals are alive at once (then extinction has
/// probability at most `η^active`).
fn cluster_size(rng: &mut ChaCha8Rng, b: u32, p: f64, active_cap: u64) -> Option<u64> {
    let mut alive = 1u64;
    let mut total = 1u64;
    while alive > 0 {
        if alive >= active_cap {
            return None;
        }
        let kids = (0..b).filter(|_| rng.random_bool(p)).count() as u64;
        alive = alive - 1 + kids;
        total += kids;
    }
    Some(total)
}

/// Parameters of the tree simulation.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct TreeSimulation {
    pub depth: u64,
    pub runs: u64,
    /// A cluster with this many simultaneously open frontier vertices is
    /// declared infinite.
    pub cluster_cap: u64,
    /// A boundary-edge population of this size is declared surviving.
    pub population_cap: u64,
}

impl TreeSimulation {
    pub fn new(depth: u64, runs: u64) -> Self {
        TreeSimulation {
            depth,
            runs,
            cluster_cap: 64,
            population_cap: 200,
        }
    }
}

/// Monte Carlo frequency that the boundary-edge process of finite clusters
/// survives `depth` generations. Clusters are grown directly from
/// `Bin(b, p)` offspring, independently of the solver.
pub fn simulate_tree_x(b: u32, p: f64, sim: TreeSimulation, seed: u64) -> Result<Estimate> {
    let model = TreeModel::new(b, p)?;
    if sim.depth == 0 {
        return Err(Error::InvalidParameter("depth must be positive".into()));
    }
    if model.subcritical() {
        return Ok(Estimate {
            value: 1.0,
            ci_half_width: 0.0,
            samples: sim.runs,
            seed,
        });
    }
    let survived: u64 = (0..sim.runs)
        .into_par_iter()
        .map(|run| {
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(seed, run));
            let mut population = 1u64;
            for _ in 0..sim.depth {
                if population >= sim.population_cap {
                    return 1;
                }
                let mut next = 0u64;
                for _ in 0..population {
                    if let Some(size) = cluster_size(&mut rng, b, p, sim.cluster_cap) {
                        next += 1 + size * (b as u64 - 1);
                    }
                }
                population = next;
                if population == 0 {
                    return 0;
                }
            }
            1
        })
        .sum();
    Ok(Estimate::proportion(survived, sim.runs, seed))
}

/// One row of the tree table.
#[derive(Clone, Debug, Serialize)]
pub struct TreeRow {
    pub b: u32,
    pub p: f64,
    pub eta: f64,
    pub t1: Option<f64>,
    pub k1: Option<f64>,
    pub percolates: bool,
    pub kappa: f64,
}

pub fn tree_row(b: u32, p: f64) -> Result<TreeRow> {
    let sol = solve(b, p)?;
    Ok(TreeRow {
        b,
        p,
        eta: to_f64(sol.eta),
        t1: sol.t1.map(to_f64),
        k1: sol.k1().map(to_f64),
        percolates: sol.percolates_x,
        kappa: to_f64(kappa_of(&sol)?),
    })
}

pub fn real_to_f64(x: Real) -> f64 {
    to_f64(x)
}

/// Frozen values of `p_fin(T_b)` and `c_b` for `b = 2..=10`.
pub const GOLDENS_CSV: &str = include_str!("../data/tree_goldens.csv");

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct TreeGolden {
    pub b: u32,
    pub pfin: f64,
    pub c_b: f64,
}

pub fn goldens() -> Result<Vec<TreeGolden>> {
    let mut rdr = csv::Reader::from_reader(GOLDENS_CSV.as_bytes());
    rdr.deserialize()
        .map(|r| r.map_err(|e| Error::Parse(e.to_string())))
        .collect()
}

pub fn golden(b: u32) -> Result<Option<TreeGolden>> {
    Ok(goldens()?.into_iter().find(|g| g.b == b))
}
