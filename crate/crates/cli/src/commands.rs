use std::ffi::OsString;

use clap::{ArgMatches, Args, CommandFactory, FromArgMatches};
use percolab::animals::{for_each_fixed_animal, random_animal};
use percolab::block::{estimate_ln_probability, grid_summary, GridSummary};
use percolab::estimators::{
    estimate_pc, estimate_pfin, fit_one_arm_exponent, flat_sheet, hyperplane_experiment, one_arm_curve,
    pi_infinity_runs, pooled_multiple, summarize, uniqueness_experiment, Bisection, ThresholdEstimate,
};
use percolab::format::facet_to_line;
use percolab::geometry::LatticeBox;
use percolab::percolation::{cluster_labels, Configuration, ModelParams, Slab};
use percolab::rng::derive_seed;
use percolab::topology::{lemma_check, LemmaCheck, VertexSet};
use percolab::tree::{
    c_b, golden, kappa, pfin_by_bisection, pfin_tree, real_to_f64, simulate_tree_x, tree_row, TreeSimulation,
};
use percolab::Error;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{Map, Value};

use crate::output::Run;
use crate::{Cli, Command};

pub const EXIT_OK: u8 = 0;
pub const EXIT_FAILED: u8 = 1;
pub const EXIT_PARAM: u8 = 2;
pub const EXIT_CENSORED: u8 = 3;

/// Outcome of a subcommand whose outputs were written.
enum Outcome {
    Ok,
    /// A checked property failed.
    Failed(String),
    /// Censored or insufficient data; outputs are partial.
    Censored(String),
}

enum Failure {
    Param(String),
    Other(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        match e {
            Error::InvalidDimension(_)
            | Error::DimensionMismatch { .. }
            | Error::InvalidProbability(_)
            | Error::InvalidParameter(_)
            | Error::Precondition(_)
            | Error::BoxTooSmall { .. }
            | Error::WindowTooSmall { .. } => Failure::Param(e.to_string()),
            _ => Failure::Other(e.to_string()),
        }
    }
}

impl From<String> for Failure {
    fn from(e: String) -> Self {
        Failure::Other(e)
    }
}

type CmdResult = std::result::Result<Outcome, Failure>;

#[derive(Args, Debug)]
pub struct TreeArgs {
    /// Branching numbers.
    #[arg(long, value_delimiter = ',', default_value = "2")]
    pub b: Vec<u32>,
    /// Grid of p (default 0.01, 0.02, ..., 0.99).
    #[arg(long, value_delimiter = ',')]
    pub p: Vec<f64>,
    /// Simulation runs per b; 0 skips the simulation.
    #[arg(long, default_value_t = 0)]
    pub sim_runs: u64,
    #[arg(long, default_value_t = 10_000)]
    pub sim_depth: u64,
    #[arg(long, default_value_t = 0.6)]
    pub sim_p: f64,
}

#[derive(Args, Debug)]
pub struct TopologyArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    /// Largest set size in the exhaustive suite.
    #[arg(long, default_value_t = 6)]
    pub max_size: usize,
    /// Run the exhaustive suite (with the minimality check).
    #[arg(long)]
    pub exhaustive: bool,
    /// Number of random connected sets.
    #[arg(long, default_value_t = 0)]
    pub random: u64,
    /// Largest size of a random set.
    #[arg(long, default_value_t = 40)]
    pub random_max_size: usize,
    #[arg(long, default_value_t = 4)]
    pub margin: u32,
}

#[derive(Args, Debug)]
pub struct ModelArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    /// Spread-out range (0 = nearest neighbour).
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    /// Fattening radius F.
    #[arg(long, default_value_t = 0)]
    pub f: u32,
}

#[derive(Args, Debug)]
pub struct SampleArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub p: f64,
    /// Box radius n of B_n = (-n, n]^d.
    #[arg(long)]
    pub n: u32,
}

#[derive(Args, Debug)]
pub struct OneArmArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub p: f64,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    pub n: Vec<u32>,
    #[arg(long, default_value_t = 10_000)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct BisectionArgs {
    #[arg(long, default_value_t = 64)]
    pub n: u32,
    #[arg(long, default_value_t = 0.002)]
    pub tol: f64,
    /// Samples per bisection step.
    #[arg(long, default_value_t = 2000)]
    pub samples: u64,
    #[arg(long, default_value_t = 0.0)]
    pub lo: f64,
    #[arg(long, default_value_t = 1.0)]
    pub hi: f64,
    /// Also stop when the midpoint's interval covers 1/2.
    #[arg(long)]
    pub stop_on_ci: bool,
}

impl BisectionArgs {
    fn settings(&self) -> Bisection {
        Bisection {
            tol: self.tol,
            samples: self.samples,
            lo: self.lo,
            hi: self.hi,
            stop_when_ci_covers: self.stop_on_ci,
        }
    }
}

#[derive(Args, Debug)]
pub struct PcArgs {
    #[arg(long, default_value_t = 2)]
    pub d: usize,
    #[arg(long, default_value_t = 0)]
    pub s: u32,
    #[command(flatten)]
    pub bisection: BisectionArgs,
}

#[derive(Args, Debug)]
pub struct PfinArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[command(flatten)]
    pub bisection: BisectionArgs,
}

#[derive(Args, Debug)]
pub struct BlockArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long)]
    pub p: f64,
    /// Block radius.
    #[arg(long, default_value_t = 1)]
    pub n: u32,
    /// Block index radius of each grid.
    #[arg(long, default_value_t = 2)]
    pub r: u32,
    /// Number of sampled grids.
    #[arg(long, default_value_t = 10)]
    pub grids: u64,
    /// Samples for the P(L_n) estimate; 0 skips it.
    #[arg(long, default_value_t = 0)]
    pub samples: u64,
}

#[derive(Args, Debug)]
pub struct SurfaceArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.04)]
    pub p: f64,
    #[arg(long, default_value_t = 16)]
    pub height: u32,
    #[arg(long, default_value_t = 16)]
    pub half_width: u32,
    #[arg(long, default_value_t = 50)]
    pub seeds: u64,
}

#[derive(Args, Debug)]
pub struct PiLimitArgs {
    #[arg(long, default_value_t = 3)]
    pub d: usize,
    #[arg(long, default_value_t = 0.15)]
    pub p: f64,
    #[arg(long, default_value_t = 64)]
    pub window: u32,
    #[arg(long, default_value_t = 100)]
    pub runs: u64,
}

#[derive(Args, Debug)]
pub struct UniquenessArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_delimiter = ',', default_value = "32,64")]
    pub n: Vec<u32>,
    #[arg(long, value_delimiter = ',', default_value = "0.48,0.5,0.52")]
    pub p: Vec<f64>,
    #[arg(long, default_value_t = 1000)]
    pub samples: u64,
}

/// Parses `argv` (program name first), runs the subcommand and returns the
/// process exit code.
pub fn run(argv: Vec<String>) -> u8 {
    let argv = match apply_config(argv) {
        Ok(a) => a,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_PARAM;
        }
    };
    let matches = match Cli::command().try_get_matches_from(argv.iter().map(OsString::from)) {
        Ok(m) => m,
        Err(e) => {
            let _ = e.print();
            return e.exit_code().clamp(0, 255) as u8;
        }
    };
    let cli = match Cli::from_arg_matches(&matches) {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return EXIT_PARAM;
        }
    };
    let (name, sub) = matches.subcommand().expect("subcommand is required");
    let def = Cli::command();
    let def = def.find_subcommand(name).expect("parsed subcommand exists");
    let mut params = param_map(def, sub);
    params.insert("out".into(), Value::String(cli.common.out.display().to_string()));
    params.insert("seed".into(), Value::String(cli.common.seed.to_string()));
    let jobs = cli
        .common
        .jobs
        .unwrap_or_else(|| std::thread::available_parallelism().map(|n| n.get()).unwrap_or(1));
    if jobs == 0 {
        eprintln!("error: --jobs must be positive");
        return EXIT_PARAM;
    }
    let pool = match rayon::ThreadPoolBuilder::new().num_threads(jobs).build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return EXIT_FAILED;
        }
    };
    let mut out = match Run::new(&cli.common.out, name, params, cli.common.seed, jobs) {
        Ok(r) => r,
        Err(e) => {
            eprintln!("error: cannot create {}: {e}", cli.common.out.display());
            return EXIT_FAILED;
        }
    };
    let seed = cli.common.seed;
    let result = pool.install(|| match &cli.command {
        Command::Tree(a) => tree(a, seed, &mut out),
        Command::TopologyCheck(a) => topology(a, seed, &mut out),
        Command::Sample(a) => sample(a, seed, &mut out),
        Command::OneArm(a) => one_arm(a, seed, &mut out),
        Command::Pc(a) => pc(a, seed, &mut out),
        Command::Pfin(a) => pfin(a, seed, &mut out),
        Command::Block(a) => block(a, seed, &mut out),
        Command::Surface(a) => surface(a, seed, &mut out),
        Command::PiLimit(a) => pi_limit(a, seed, &mut out),
        Command::Uniqueness(a) => uniqueness(a, seed, &mut out),
    });
    let (code, status) = match result {
        Ok(Outcome::Ok) => (EXIT_OK, "ok".to_string()),
        Ok(Outcome::Failed(m)) => {
            eprintln!("check failed: {m}");
            (EXIT_FAILED, format!("failed: {m}"))
        }
        Ok(Outcome::Censored(m)) => {
            eprintln!("censored: {m}");
            (EXIT_CENSORED, format!("censored: {m}"))
        }
        Err(Failure::Param(m)) => {
            eprintln!("error: {m}");
            (EXIT_PARAM, format!("parameter error: {m}"))
        }
        Err(Failure::Other(m)) => {
            eprintln!("error: {m}");
            (EXIT_FAILED, format!("error: {m}"))
        }
    };
    if let Err(e) = out.finish(&status) {
        eprintln!("error: cannot write manifest: {e}");
        return EXIT_FAILED;
    }
    code
}

/// Appends `--key value` for every key of the `--config` JSON object that is
/// not already given on the command line.
fn apply_config(mut argv: Vec<String>) -> std::result::Result<Vec<String>, String> {
    let mut path = None;
    for (i, a) in argv.iter().enumerate() {
        if a == "--config" {
            path = argv.get(i + 1).cloned();
        } else if let Some(p) = a.strip_prefix("--config=") {
            path = Some(p.to_string());
        }
    }
    let Some(path) = path else { return Ok(argv) };
    let text = std::fs::read_to_string(&path).map_err(|e| format!("cannot read config {path}: {e}"))?;
    let value: Value = serde_json::from_str(&text).map_err(|e| format!("bad config {path}: {e}"))?;
    let Value::Object(map) = value else {
        return Err(format!("config {path} is not a JSON object"));
    };
    for (key, v) in map {
        let flag = format!("--{}", key.replace('_', "-"));
        let given = argv.iter().any(|a| *a == flag || a.starts_with(&format!("{flag}=")));
        if given {
            continue;
        }
        let text = match v {
            Value::Bool(true) => {
                argv.push(flag);
                continue;
            }
            Value::Bool(false) | Value::Null => continue,
            Value::String(s) => s,
            Value::Number(n) => n.to_string(),
            Value::Array(items) => items
                .iter()
                .map(|x| match x {
                    Value::String(s) => s.clone(),
                    other => other.to_string(),
                })
                .collect::<Vec<_>>()
                .join(","),
            Value::Object(_) => return Err(format!("config key {key} has an object value")),
        };
        argv.push(flag);
        argv.push(text);
    }
    Ok(argv)
}

fn param_map(def: &clap::Command, m: &ArgMatches) -> Map<String, Value> {
    let mut out = Map::new();
    for arg in def.get_arguments() {
        let id = arg.get_id().as_str();
        if let Ok(Some(raw)) = m.try_get_raw(id) {
            let vals: Vec<String> = raw.map(|v| v.to_string_lossy().into_owned()).collect();
            out.insert(id.replace('_', "-"), Value::String(vals.join(",")));
        }
    }
    out
}

#[derive(Serialize)]
struct PfinRow {
    b: u32,
    pfin: f64,
    pfin_bisection: f64,
    c_b: f64,
    golden_pfin: Option<f64>,
    golden_c_b: Option<f64>,
    golden_match: Option<bool>,
}

#[derive(Serialize)]
struct TreeSimRow {
    b: u32,
    p: f64,
    kappa: f64,
    value: f64,
    ci_half_width: f64,
    samples: u64,
    seed: u64,
    depth: u64,
    within_3_sigma: bool,
}

fn tree(a: &TreeArgs, seed: u64, out: &mut Run) -> CmdResult {
    let grid: Vec<f64> = if a.p.is_empty() {
        (1..100).map(|i| i as f64 / 100.0).collect()
    } else {
        a.p.clone()
    };
    let mut rows = Vec::new();
    for &b in &a.b {
        for &p in &grid {
            rows.push(tree_row(b, p)?);
        }
    }
    out.csv("tree.csv", &rows)?;
    let mut summary = Vec::new();
    let mut mismatch = Vec::new();
    for &b in &a.b {
        let pfin = real_to_f64(pfin_tree(b)?);
        let cb = c_b(b)?.value;
        let g = golden(b)?;
        let matched = g.map(|g| (g.pfin - pfin).abs() <= 1e-12 && ((g.c_b - cb) / g.c_b).abs() <= 1e-7);
        let verdict = match matched {
            Some(true) => "match",
            Some(false) => "MISMATCH",
            None => "no golden value",
        };
        println!("b = {b}: pfin = {pfin:.15}, c_b = {cb:.9}, golden: {verdict}");
        if matched == Some(false) {
            mismatch.push(b);
        }
        summary.push(PfinRow {
            b,
            pfin,
            pfin_bisection: pfin_by_bisection(b, 1e-12)?,
            c_b: cb,
            golden_pfin: g.map(|g| g.pfin),
            golden_c_b: g.map(|g| g.c_b),
            golden_match: matched,
        });
    }
    out.csv("tree_pfin.csv", &summary)?;
    if a.sim_runs > 0 {
        let sim = TreeSimulation::new(a.sim_depth, a.sim_runs);
        let mut sims = Vec::new();
        for &b in &a.b {
            let k = real_to_f64(kappa(b, a.sim_p)?);
            let e = simulate_tree_x(b, a.sim_p, sim, seed)?;
            let sigma = e.ci_half_width / percolab::stats::Z95;
            sims.push(TreeSimRow {
                b,
                p: a.sim_p,
                kappa: k,
                value: e.value,
                ci_half_width: e.ci_half_width,
                samples: e.samples,
                seed,
                depth: a.sim_depth,
                within_3_sigma: (e.value - k).abs() <= 3.0 * sigma.max(1e-12),
            });
        }
        out.csv("tree_sim.csv", &sims)?;
    }
    if mismatch.is_empty() {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed(format!("golden mismatch for b in {mismatch:?}")))
    }
}

#[derive(Serialize, Default)]
struct TopologyRow {
    suite: String,
    size: usize,
    sets: u64,
    surface_failures: u64,
    separation_failures: u64,
    minimality_failures: u64,
    fill_failures: u64,
}

impl TopologyRow {
    fn add(&mut self, c: &LemmaCheck) {
        self.sets += 1;
        self.surface_failures += !c.surface as u64;
        self.separation_failures += !c.separates as u64;
        self.minimality_failures += (c.minimal == Some(false)) as u64;
        self.fill_failures += !c.fill_invariant as u64;
    }

    fn failures(&self) -> u64 {
        self.surface_failures + self.separation_failures + self.minimality_failures + self.fill_failures
    }
}

fn topology(a: &TopologyArgs, seed: u64, out: &mut Run) -> CmdResult {
    if !a.exhaustive && a.random == 0 {
        return Err(Failure::Param(
            "nothing to do: pass --exhaustive and/or --random N".into(),
        ));
    }
    let mut rows = Vec::new();
    if a.exhaustive {
        let mut sets: Vec<Vec<percolab::geometry::Vertex>> = Vec::new();
        for_each_fixed_animal(a.d, a.max_size, |s| sets.push(s.to_vec()))?;
        let checks: Vec<(usize, percolab::Result<LemmaCheck>)> = sets
            .par_iter()
            .map(|s| {
                let set = VertexSet::try_from_iter(s.iter().copied());
                (s.len(), set.and_then(|set| lemma_check(&set, a.margin, true)))
            })
            .collect();
        let mut by_size: Vec<TopologyRow> = (1..=a.max_size)
            .map(|size| TopologyRow {
                suite: "exhaustive".into(),
                size,
                ..Default::default()
            })
            .collect();
        for (size, c) in checks {
            by_size[size - 1].add(&c?);
        }
        rows.extend(by_size);
    }
    if a.random > 0 {
        let max = a.random_max_size.max(1) as u64;
        let checks: Vec<(usize, percolab::Result<LemmaCheck>)> = (0..a.random)
            .into_par_iter()
            .map(|i| {
                let s = derive_seed(seed, i);
                let size = (1 + s % max) as usize;
                (
                    size,
                    random_animal(a.d, size, s).and_then(|set| lemma_check(&set, a.margin, false)),
                )
            })
            .collect();
        let mut by_size: Vec<TopologyRow> = (1..=max as usize)
            .map(|size| TopologyRow {
                suite: "random".into(),
                size,
                ..Default::default()
            })
            .collect();
        for (size, c) in checks {
            by_size[size - 1].add(&c?);
        }
        rows.extend(by_size.into_iter().filter(|r| r.sets > 0));
    }
    out.csv("topology_check.csv", &rows)?;
    let total: u64 = rows.iter().map(|r| r.sets).sum();
    let failed: u64 = rows.iter().map(TopologyRow::failures).sum();
    println!("checked {total} sets, {failed} failures");
    if failed == 0 {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed(format!("{failed} property failures")))
    }
}

#[derive(Serialize)]
struct SampleRow {
    d: usize,
    p: f64,
    s: u32,
    f: u32,
    n: u32,
    seed: u64,
    edges: usize,
    open_edges: usize,
    clusters: usize,
    largest_cluster: u32,
    touching_clusters: usize,
}

fn sample(a: &SampleArgs, seed: u64, out: &mut Run) -> CmdResult {
    let params = ModelParams::new(a.model.d, a.p, a.model.s, a.model.f)?;
    let c = Configuration::sample(params, LatticeBox::new(a.model.d, a.n)?, seed)?;
    let mut bytes = Vec::new();
    c.write_to(&mut bytes)?;
    out.bytes("sample.plcf", &bytes)?;
    let lab = cluster_labels(&c);
    let row = SampleRow {
        d: params.d,
        p: params.p,
        s: params.s,
        f: params.f,
        n: a.n,
        seed,
        edges: c.edge_count(),
        open_edges: c.open_count(),
        clusters: lab.cluster_count(),
        largest_cluster: lab.sizes().iter().copied().max().unwrap_or(0),
        touching_clusters: lab.touching().iter().filter(|&&t| t).count(),
    };
    out.csv("sample.csv", &[row])?;
    Ok(Outcome::Ok)
}

#[derive(Serialize)]
struct EstimateRow {
    n: u32,
    p: f64,
    value: f64,
    ci_half_width: f64,
    samples: u64,
    seed: u64,
}

#[derive(Serialize)]
struct FitRow {
    n_min: u32,
    n_max: u32,
    power_slope: f64,
    power_slope_se: f64,
    power_intercept: f64,
    power_rss: f64,
    exponential_slope: f64,
    exponential_rss: f64,
    exponential_decay: bool,
    points: usize,
}

fn one_arm(a: &OneArmArgs, seed: u64, out: &mut Run) -> CmdResult {
    let params = ModelParams::new(a.model.d, a.p, a.model.s, a.model.f)?;
    let curve = one_arm_curve(params, &a.n, a.samples, seed)?;
    let rows: Vec<EstimateRow> = curve
        .points
        .iter()
        .map(|pt| EstimateRow {
            n: pt.n,
            p: a.p,
            value: pt.estimate.value,
            ci_half_width: pt.estimate.ci_half_width,
            samples: pt.estimate.samples,
            seed: pt.estimate.seed,
        })
        .collect();
    out.csv("one_arm.csv", &rows)?;
    match fit_one_arm_exponent(&curve) {
        Ok(fit) => {
            let row = FitRow {
                n_min: fit.n_min,
                n_max: fit.n_max,
                power_slope: fit.power.slope,
                power_slope_se: fit.power.slope_se,
                power_intercept: fit.power.intercept,
                power_rss: fit.power.rss,
                exponential_slope: fit.exponential.slope,
                exponential_rss: fit.exponential.rss,
                exponential_decay: fit.exponential_decay,
                points: fit.power.points,
            };
            println!(
                "fit over n in [{}, {}]: slope {:.4} ± {:.4}, exponential decay: {}",
                fit.n_min, fit.n_max, fit.power.slope, fit.power.slope_se, fit.exponential_decay
            );
            out.csv("one_arm_fit.csv", &[row])?;
            Ok(Outcome::Ok)
        }
        Err(e) => Ok(Outcome::Censored(format!("no exponent fit: {e}"))),
    }
}

#[derive(Serialize)]
struct ThresholdRow {
    kind: &'static str,
    step: usize,
    p: f64,
    value: f64,
    ci_half_width: f64,
    samples: u64,
    seed: u64,
    lo: f64,
    hi: f64,
    stop: String,
    finite_size_caveat: bool,
}

fn threshold_rows(t: &ThresholdEstimate) -> Vec<ThresholdRow> {
    let mut rows: Vec<ThresholdRow> = t
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| ThresholdRow {
            kind: "step",
            step: i,
            p: s.p,
            value: s.estimate.value,
            ci_half_width: s.estimate.ci_half_width,
            samples: s.estimate.samples,
            seed: s.estimate.seed,
            lo: f64::NAN,
            hi: f64::NAN,
            stop: String::new(),
            finite_size_caveat: t.finite_size_caveat,
        })
        .collect();
    rows.push(ThresholdRow {
        kind: "estimate",
        step: t.steps.len(),
        p: t.estimate.value,
        value: t.estimate.value,
        ci_half_width: t.estimate.ci_half_width,
        samples: t.estimate.samples,
        seed: t.estimate.seed,
        lo: t.lo,
        hi: t.hi,
        stop: format!("{:?}", t.stop),
        finite_size_caveat: t.finite_size_caveat,
    });
    rows
}

fn pc(a: &PcArgs, seed: u64, out: &mut Run) -> CmdResult {
    let t = estimate_pc(a.d, a.s, a.bisection.n, &a.bisection.settings(), seed)?;
    out.csv("pc.csv", &threshold_rows(&t))?;
    println!(
        "pc estimate (B_{}): {:.5} ± {:.5}",
        a.bisection.n, t.estimate.value, t.estimate.ci_half_width
    );
    Ok(Outcome::Ok)
}

fn pfin(a: &PfinArgs, seed: u64, out: &mut Run) -> CmdResult {
    let t = estimate_pfin(
        a.model.d,
        a.model.s,
        a.model.f,
        a.bisection.n,
        &a.bisection.settings(),
        seed,
    )?;
    out.csv("pfin.csv", &threshold_rows(&t))?;
    println!(
        "pfin estimate (B_{}): {:.5} ± {:.5}",
        a.bisection.n, t.estimate.value, t.estimate.ci_half_width
    );
    Ok(Outcome::Ok)
}

fn block(a: &BlockArgs, seed: u64, out: &mut Run) -> CmdResult {
    let params = ModelParams::new(a.model.d, a.p, a.model.s, a.model.f)?;
    let rows: Vec<GridSummary> = (0..a.grids)
        .into_par_iter()
        .map(|i| grid_summary(params, a.n, a.r, derive_seed(seed, i)))
        .collect::<percolab::Result<_>>()?;
    out.csv("block.csv", &rows)?;
    if a.samples > 0 {
        let e = estimate_ln_probability(params, a.n, a.samples, seed)?;
        let row = EstimateRow {
            n: a.n,
            p: a.p,
            value: e.value,
            ci_half_width: e.ci_half_width,
            samples: e.samples,
            seed,
        };
        println!("P(L_{}) = {:.5} ± {:.5}", a.n, e.value, e.ci_half_width);
        out.csv("block_ln.csv", &[row])?;
    }
    let identity: u64 = rows.iter().map(|r| r.identity_failures).sum();
    let counting: u64 = rows.iter().map(|r| r.counting_failures).sum();
    let empty: u64 = rows.iter().map(|r| r.axis_empty_overlaps).sum();
    let pairs: u64 = rows.iter().map(|r| r.axis_pairs).sum();
    println!(
        "{} blocks, {pairs} good axis pairs, {empty} empty overlaps",
        rows.iter().map(|r| r.blocks).sum::<u64>()
    );
    if identity + counting + empty == 0 {
        Ok(Outcome::Ok)
    } else {
        Ok(Outcome::Failed(format!(
            "{identity} identity failures, {counting} counting failures, {empty} empty overlaps"
        )))
    }
}

#[derive(Serialize)]
struct SurfaceRow {
    seed: u64,
    p: f64,
    plaquettes: usize,
    interior_boundary: usize,
    interior_plaquettes: usize,
    phi_injective: bool,
    censored: bool,
    flat: bool,
}

fn surface(a: &SurfaceArgs, seed: u64, out: &mut Run) -> CmdResult {
    let slab = Slab::new(a.d, a.height, a.half_width)?;
    let sheet = flat_sheet(&slab)?;
    let rows: Vec<SurfaceRow> = (0..a.seeds)
        .into_par_iter()
        .map(|i| {
            let (r, s) = hyperplane_experiment(a.p, &slab, derive_seed(seed, i))?;
            Ok(SurfaceRow {
                seed: r.seed,
                p: a.p,
                plaquettes: r.plaquettes,
                interior_boundary: r.interior_boundary,
                interior_plaquettes: r.interior_plaquettes,
                phi_injective: r.phi_injective,
                censored: r.censored,
                flat: s == sheet,
            })
        })
        .collect::<percolab::Result<_>>()?;
    out.csv("surface.csv", &rows)?;
    let bad = rows
        .iter()
        .filter(|r| r.interior_boundary > 0 || !r.phi_injective)
        .count();
    let censored = rows.iter().filter(|r| r.censored).count();
    println!("{} seeds, {bad} failures, {censored} censored", rows.len());
    if bad > 0 {
        Ok(Outcome::Failed(format!(
            "{bad} seeds with interior boundary or non-injective φ"
        )))
    } else if censored > 0 {
        Ok(Outcome::Censored(format!(
            "{censored} seeds reached the top of the slab"
        )))
    } else {
        Ok(Outcome::Ok)
    }
}

#[derive(Serialize)]
struct PiLimitRow {
    run: u64,
    seed: u64,
    steps: usize,
    f_stabilized: bool,
    nonempty: bool,
    censored: bool,
    r_final: Option<i32>,
    f: String,
    settled_plaquettes: usize,
}

fn pi_limit(a: &PiLimitArgs, seed: u64, out: &mut Run) -> CmdResult {
    let reports = pi_infinity_runs(a.d, a.p, a.window, a.runs, seed)?;
    let rows: Vec<PiLimitRow> = reports
        .iter()
        .enumerate()
        .map(|(i, r)| PiLimitRow {
            run: i as u64,
            seed: derive_seed(seed, i as u64),
            steps: r.steps,
            f_stabilized: r.f_stabilized,
            nonempty: r.nonempty,
            censored: r.censored,
            r_final: r.r.last().copied(),
            f: r.f.as_ref().map(facet_to_line).unwrap_or_default(),
            settled_plaquettes: r.limit.as_ref().map(|l| l.settled(r.steps / 2).len()).unwrap_or(0),
        })
        .collect();
    out.csv("pi_limit.csv", &rows)?;
    let s = summarize(&reports);
    out.csv("pi_limit_summary.csv", &[s])?;
    println!(
        "{} runs: {} stabilized with nonempty limit, {} censored",
        s.runs, s.stabilized_nonempty, s.censored
    );
    if s.censored > 0 {
        Ok(Outcome::Censored(format!("{} runs exhausted the window", s.censored)))
    } else {
        Ok(Outcome::Ok)
    }
}

#[derive(Serialize)]
struct UniquenessCsvRow {
    n: u32,
    p: String,
    samples: u64,
    h0: u64,
    h1: u64,
    h2: u64,
    h3: u64,
    h4_plus: u64,
    multiple: f64,
    ci_half_width: f64,
    seed: u64,
}

fn uniqueness(a: &UniquenessArgs, seed: u64, out: &mut Run) -> CmdResult {
    let base = ModelParams::new(a.model.d, a.p.first().copied().unwrap_or(0.5), a.model.s, a.model.f)?;
    let rows = uniqueness_experiment(base, &a.n, &a.p, a.samples, seed)?;
    let mut csv_rows: Vec<UniquenessCsvRow> = rows
        .iter()
        .map(|r| UniquenessCsvRow {
            n: r.n,
            p: r.p.to_string(),
            samples: r.samples,
            h0: r.histogram[0],
            h1: r.histogram[1],
            h2: r.histogram[2],
            h3: r.histogram[3],
            h4_plus: r.histogram[4],
            multiple: r.multiple.value,
            ci_half_width: r.multiple.ci_half_width,
            seed: r.multiple.seed,
        })
        .collect();
    for &n in &a.n {
        let e = pooled_multiple(&rows, n);
        println!(
            "n = {n}: frequency of >= 2 spanning components {:.4} ± {:.4}",
            e.value, e.ci_half_width
        );
        csv_rows.push(UniquenessCsvRow {
            n,
            p: "pooled".into(),
            samples: e.samples,
            h0: 0,
            h1: 0,
            h2: 0,
            h3: 0,
            h4_plus: 0,
            multiple: e.value,
            ci_half_width: e.ci_half_width,
            seed: e.seed,
        });
    }
    out.csv("uniqueness.csv", &csv_rows)?;
    Ok(Outcome::Ok)
}
