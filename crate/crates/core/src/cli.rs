//! Commands behind the `heatcheb` binary.
//!
//! Every command writes CSV with `#`-prefixed metadata lines. Exit codes:
//! `0` success, `2` usage or input error, `3` numerical failure.

use std::fmt::Write as _;
use std::io::Write;
use std::path::PathBuf;
use std::str::FromStr;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::bounds::{min_order, true_min_order_with_spectrum, BoundKind, BoundPolicy, SignalStats};
use crate::diffusion::{estimate_lambda_max, DiffusionOptions, DiffusionPlan};
use crate::error::{Error, Result};
use crate::oracle::{DenseSpectrum, DENSE_LIMIT};
use crate::sparse::{
    build_laplacian, erdos_renyi, load_graph, load_signal, write_edge_list, GraphFormat,
    GraphSignal, LaplacianKind, SparseSymMatrix,
};

#[derive(Debug, Parser)]
#[command(
    name = "heatcheb",
    version,
    about = "Multiscale graph heat diffusion with Chebyshev expansions"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Diffuse a signal at one or more scales.
    Diffuse(DiffuseArgs),
    /// Minimum orders (true and per bound) over random Erdős–Rényi graphs.
    BoundTable(BoundTableArgs),
    /// Time basis construction against per-scale combination.
    Bench(BenchArgs),
    /// Write an Erdős–Rényi graph as an edge list.
    GenGraph(GenGraphArgs),
}

/// Where a graph comes from: a file or `er:n:p:seed`.
#[derive(Debug, Clone, PartialEq)]
pub enum GraphSource {
    File(PathBuf),
    ErdosRenyi { n: usize, p: f64, seed: u64 },
}

impl FromStr for GraphSource {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let Some(rest) = s.strip_prefix("er:") else {
            return Ok(GraphSource::File(PathBuf::from(s)));
        };
        let parts: Vec<&str> = rest.split(':').collect();
        let bad = || Error::InvalidArgument(format!("expected er:n:p:seed, got `{s}`"));
        if parts.len() != 3 {
            return Err(bad());
        }
        Ok(GraphSource::ErdosRenyi {
            n: parts[0].parse().map_err(|_| bad())?,
            p: parts[1].parse().map_err(|_| bad())?,
            seed: parts[2].parse().map_err(|_| bad())?,
        })
    }
}

impl std::fmt::Display for GraphSource {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            GraphSource::File(p) => write!(f, "{}", p.display()),
            GraphSource::ErdosRenyi { n, p, seed } => write!(f, "er:{n}:{p}:{seed}"),
        }
    }
}

impl GraphSource {
    pub fn load(&self, kind: LaplacianKind) -> Result<SparseSymMatrix> {
        let (edges, n) = match self {
            GraphSource::File(path) => load_graph(path, GraphFormat::from_path(path))?,
            GraphSource::ErdosRenyi { n, p, seed } => (erdos_renyi(*n, *p, *seed)?, *n),
        };
        build_laplacian(&edges, n, kind)
    }
}

/// Scale list: `lin:a:b:m`, `log:a:b:m`, `rand:a:b:m` (uniform, seeded by
/// `--seed`) or an explicit comma-separated list.
#[derive(Debug, Clone, PartialEq)]
pub enum ScaleSpec {
    Linear { from: f64, to: f64, count: usize },
    Log { from: f64, to: f64, count: usize },
    Random { from: f64, to: f64, count: usize },
    List(Vec<f64>),
}

impl FromStr for ScaleSpec {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let bad = |why: &str| Error::InvalidArgument(format!("scale spec `{s}`: {why}"));
        let grid = |rest: &str| -> Result<(f64, f64, usize)> {
            let parts: Vec<&str> = rest.split(':').collect();
            if parts.len() != 3 {
                return Err(bad("expected a:b:m"));
            }
            let from: f64 = parts[0].parse().map_err(|_| bad("bad start"))?;
            let to: f64 = parts[1].parse().map_err(|_| bad("bad end"))?;
            let count: usize = parts[2].parse().map_err(|_| bad("bad count"))?;
            if count == 0 {
                return Err(bad("count must be at least 1"));
            }
            if !(from >= 0.0 && to >= from) {
                return Err(bad("need 0 <= a <= b"));
            }
            Ok((from, to, count))
        };
        if let Some(rest) = s.strip_prefix("lin:") {
            let (from, to, count) = grid(rest)?;
            return Ok(ScaleSpec::Linear { from, to, count });
        }
        if let Some(rest) = s.strip_prefix("log:") {
            let (from, to, count) = grid(rest)?;
            if from <= 0.0 {
                return Err(bad("log grids need a > 0"));
            }
            return Ok(ScaleSpec::Log { from, to, count });
        }
        if let Some(rest) = s.strip_prefix("rand:") {
            let (from, to, count) = grid(rest)?;
            return Ok(ScaleSpec::Random { from, to, count });
        }
        let values = s
            .split(',')
            .map(|v| v.trim().parse::<f64>())
            .collect::<std::result::Result<Vec<_>, _>>()
            .map_err(|_| bad("expected comma-separated numbers"))?;
        if let Some(v) = values.iter().find(|v| !(**v >= 0.0) || !v.is_finite()) {
            return Err(Error::NegativeScale(*v));
        }
        Ok(ScaleSpec::List(values))
    }
}

impl ScaleSpec {
    pub fn values(&self, seed: u64) -> Vec<f64> {
        let spaced = |count: usize, f: &dyn Fn(f64) -> f64| -> Vec<f64> {
            if count == 1 {
                return vec![f(0.0)];
            }
            (0..count)
                .map(|i| f(i as f64 / (count - 1) as f64))
                .collect()
        };
        match *self {
            ScaleSpec::Linear { from, to, count } => spaced(count, &|s| from + s * (to - from)),
            ScaleSpec::Log { from, to, count } => {
                let (a, b) = (from.ln(), to.ln());
                spaced(count, &|s| (a + s * (b - a)).exp())
            }
            ScaleSpec::Random { from, to, count } => {
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                (0..count).map(|_| rng.random_range(from..=to)).collect()
            }
            ScaleSpec::List(ref v) => v.clone(),
        }
    }
}

fn positive_tol(s: &str) -> std::result::Result<f64, String> {
    let v: f64 = s.parse().map_err(|_| format!("`{s}` is not a number"))?;
    if v > 0.0 {
        Ok(v)
    } else {
        Err(format!("tolerance must be positive, got {v}"))
    }
}

#[derive(Debug, Args)]
pub struct DiffuseArgs {
    /// Graph file (edge list, or `.mtx`) or `er:n:p:seed`.
    #[arg(long)]
    pub graph: GraphSource,
    /// `combinatorial` (D - A) or `normalized` (I - D^-1/2 A D^-1/2).
    #[arg(long, default_value = "combinatorial")]
    pub laplacian: LaplacianKind,
    /// `dirac:<node>`, `normal:<seed>`, `const:<v>` or a file with one value per line.
    #[arg(long, default_value = "dirac:0")]
    pub signal: String,
    /// `lin:a:b:m`, `log:a:b:m`, `rand:a:b:m` (seeded by `--seed`) or a comma list.
    #[arg(long)]
    pub scales: ScaleSpec,
    /// Target for the squared output-relative error.
    #[arg(long, default_value_t = 1e-5, value_parser = positive_tol)]
    pub tol: f64,
    /// `auto`, `new-generic`, `new-specific`, `base-generic` or `base-specific`.
    #[arg(long, default_value = "auto")]
    pub bound: BoundPolicy,
    /// Use this λ_max instead of estimating it.
    #[arg(long)]
    pub lambda_max: Option<f64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BoundTableArgs {
    #[arg(long, default_value = "log:1e-2:1e2:25")]
    pub scales: ScaleSpec,
    /// Target for the squared output-relative error.
    #[arg(long, default_value_t = 1e-5, value_parser = positive_tol)]
    pub tol: f64,
    #[arg(long, default_value_t = 200)]
    pub n: usize,
    #[arg(long, default_value_t = 0.05)]
    pub p: f64,
    /// Number of random graphs.
    #[arg(long, default_value_t = 100)]
    pub trials: usize,
    /// Signal per graph; a `normal:<s>` seed is offset by the trial index.
    #[arg(long, default_value = "normal:0")]
    pub signal: String,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    /// Graph file (edge list, or `.mtx`) or `er:n:p:seed`.
    #[arg(long)]
    pub graph: GraphSource,
    /// `combinatorial` (D - A) or `normalized` (I - D^-1/2 A D^-1/2).
    #[arg(long, default_value = "combinatorial")]
    pub laplacian: LaplacianKind,
    #[arg(long, default_value = "dirac:0")]
    pub signal: String,
    /// Pool of scales; the run with `m` scales uses the first `m`.
    #[arg(long, default_value = "rand:1e-3:1e1:20")]
    pub scales: ScaleSpec,
    /// Comma-separated numbers of scales to time.
    #[arg(long, value_delimiter = ',', default_value = "1,2,5,10,20")]
    pub counts: Vec<usize>,
    /// Target for the squared output-relative error.
    #[arg(long, default_value_t = 1e-5, value_parser = positive_tol)]
    pub tol: f64,
    /// `auto`, `new-generic`, `new-specific`, `base-generic` or `base-specific`.
    #[arg(long, default_value = "auto")]
    pub bound: BoundPolicy,
    #[arg(long)]
    pub lambda_max: Option<f64>,
    /// Timed repetitions per row (median reported), after one warm-up.
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GenGraphArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub p: f64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout when omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Exit code for a failed command.
pub fn exit_code(err: &Error) -> i32 {
    if err.is_numerical() {
        3
    } else {
        2
    }
}

pub fn run(cli: Cli) -> Result<()> {
    match cli.command {
        Command::Diffuse(a) => {
            let csv = cmd_diffuse(&a)?;
            emit(a.out.as_ref(), &csv)
        }
        Command::BoundTable(a) => {
            let csv = cmd_bound_table(&a)?;
            emit(a.out.as_ref(), &csv)
        }
        Command::Bench(a) => {
            let csv = cmd_bench(&a)?;
            emit(a.out.as_ref(), &csv)
        }
        Command::GenGraph(a) => {
            let text = cmd_gen_graph(&a)?;
            emit(a.out.as_ref(), &text)
        }
    }
}

fn emit(out: Option<&PathBuf>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => std::io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn options(tol: f64, policy: BoundPolicy, lambda_max: Option<f64>, seed: u64) -> DiffusionOptions {
    DiffusionOptions {
        tol,
        policy,
        lambda_max,
        seed,
        ..DiffusionOptions::default()
    }
}

/// One column per scale plus metadata (order, λ_max, bound, matvec count).
pub fn cmd_diffuse(args: &DiffuseArgs) -> Result<String> {
    let l = args.graph.load(args.laplacian)?;
    let x = load_signal(&args.signal, l.n())?;
    let scales = args.scales.values(args.seed);
    let opts = options(args.tol, args.bound, args.lambda_max, args.seed);
    let plan = DiffusionPlan::new(&l, &x, &scales, &opts)?;
    let cache = plan.build_basis(&l, &x)?;
    let columns = (0..scales.len())
        .map(|i| plan.diffuse(&cache, i))
        .collect::<Result<Vec<_>>>()?;

    let mut csv = String::new();
    writeln!(csv, "# command=diffuse").unwrap();
    writeln!(
        csv,
        "# graph={} laplacian={:?} n={}",
        args.graph,
        args.laplacian,
        l.n()
    )
    .unwrap();
    writeln!(csv, "# signal={}", args.signal).unwrap();
    writeln!(csv, "# order={}", plan.order).unwrap();
    writeln!(
        csv,
        "# lambda_max={} source={}",
        plan.lambda_max,
        if args.lambda_max.is_some() {
            "override"
        } else {
            "estimate"
        }
    )
    .unwrap();
    writeln!(csv, "# bound={} policy={}", plan.bound_kind, args.bound).unwrap();
    writeln!(csv, "# bound_value={:e}", plan.bound_value).unwrap();
    writeln!(csv, "# tol={:e}", args.tol).unwrap();
    writeln!(csv, "# matvecs={}", cache.matvecs()).unwrap();
    let header: Vec<String> = scales.iter().map(|t| format!("tau={t}")).collect();
    writeln!(csv, "{}", header.join(",")).unwrap();
    for row in 0..l.n() {
        let cells: Vec<String> = columns.iter().map(|c| format!("{}", c[row])).collect();
        writeln!(csv, "{}", cells.join(",")).unwrap();
    }
    Ok(csv)
}

/// Quartiles with linear interpolation between order statistics.
pub fn quartiles(values: &[f64]) -> (f64, f64, f64) {
    let mut v = values.to_vec();
    v.sort_by(f64::total_cmp);
    let at = |q: f64| {
        let pos = q * (v.len() - 1) as f64;
        let lo = pos.floor() as usize;
        let hi = pos.ceil() as usize;
        v[lo] + (pos - lo as f64) * (v[hi] - v[lo])
    };
    (at(0.25), at(0.5), at(0.75))
}

/// Minimum orders at one scale for one graph.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OrderSample {
    pub tau_eff: f64,
    pub k_true: usize,
    /// Indexed like [`BoundKind::ALL`].
    pub k_bounds: [usize; 4],
}

/// Per-scale summary across graphs: `(q1, median, q3)` of each column.
#[derive(Debug, Clone, PartialEq)]
pub struct BoundTableRow {
    pub tau: f64,
    pub tau_eff: (f64, f64, f64),
    pub k_true: (f64, f64, f64),
    pub k_bounds: [(f64, f64, f64); 4],
    pub samples: Vec<OrderSample>,
}

impl BoundTableRow {
    pub fn median(&self, kind: BoundKind) -> f64 {
        let idx = BoundKind::ALL.iter().position(|k| *k == kind).unwrap();
        self.k_bounds[idx].1
    }
}

fn trial_signal(spec: &str, n: usize, trial: usize) -> Result<GraphSignal> {
    if let Some(rest) = spec.strip_prefix("normal:") {
        let seed: u64 = rest
            .parse()
            .map_err(|_| Error::InvalidArgument(format!("bad normal seed `{rest}`")))?;
        return Ok(GraphSignal::standard_normal(
            n,
            seed.wrapping_add(trial as u64),
        ));
    }
    load_signal(spec, n)
}

/// Orders for every scale on one graph `ER(n, p, seed + trial)`.
pub fn bound_table_trial(
    scales: &[f64],
    tol: f64,
    n: usize,
    p: f64,
    signal: &str,
    seed: u64,
    trial: usize,
) -> Result<Vec<OrderSample>> {
    let graph_seed = seed.wrapping_add(trial as u64);
    let edges = erdos_renyi(n, p, graph_seed)?;
    let l = build_laplacian(&edges, n, LaplacianKind::Combinatorial)?;
    let x = trial_signal(signal, n, trial)?;
    let stats = SignalStats::from_signal(&x)?;
    let lambda_max = estimate_lambda_max(&l, 1e-4, graph_seed)?;
    let spectrum = DenseSpectrum::of(&l)?;
    scales
        .iter()
        .map(|&tau| {
            let tau_eff = lambda_max * tau / 2.0;
            let k_true = true_min_order_with_spectrum(&spectrum, &x, tau, tol, lambda_max)?;
            let mut k_bounds = [0usize; 4];
            for (slot, kind) in k_bounds.iter_mut().zip(BoundKind::ALL) {
                *slot = min_order(kind, tau_eff, tol, Some(&stats))?;
            }
            Ok(OrderSample {
                tau_eff,
                k_true,
                k_bounds,
            })
        })
        .collect()
}

/// Runs every trial (in parallel, ordered reduction) and summarizes per scale.
pub fn bound_table(args: &BoundTableArgs) -> Result<Vec<BoundTableRow>> {
    if args.n > DENSE_LIMIT {
        return Err(Error::TooLarge {
            n: args.n,
            limit: DENSE_LIMIT,
        });
    }
    if args.trials == 0 {
        return Err(Error::InvalidArgument("--trials must be at least 1".into()));
    }
    let scales = args.scales.values(args.seed);
    let per_trial = (0..args.trials)
        .into_par_iter()
        .map(|t| {
            bound_table_trial(
                &scales,
                args.tol,
                args.n,
                args.p,
                &args.signal,
                args.seed,
                t,
            )
        })
        .collect::<Result<Vec<_>>>()?;

    Ok(scales
        .iter()
        .enumerate()
        .map(|(i, &tau)| {
            let samples: Vec<OrderSample> = per_trial.iter().map(|t| t[i]).collect();
            let col = |f: &dyn Fn(&OrderSample) -> f64| {
                quartiles(&samples.iter().map(f).collect::<Vec<_>>())
            };
            let mut k_bounds = [(0.0, 0.0, 0.0); 4];
            for (j, slot) in k_bounds.iter_mut().enumerate() {
                *slot = col(&|s| s.k_bounds[j] as f64);
            }
            BoundTableRow {
                tau,
                tau_eff: col(&|s| s.tau_eff),
                k_true: col(&|s| s.k_true as f64),
                k_bounds,
                samples,
            }
        })
        .collect())
}

pub fn cmd_bound_table(args: &BoundTableArgs) -> Result<String> {
    let rows = bound_table(args)?;
    let mut csv = String::new();
    writeln!(csv, "# command=bound-table").unwrap();
    writeln!(
        csv,
        "# n={} p={} trials={} seed={} tol={:e} signal={}",
        args.n, args.p, args.trials, args.seed, args.tol, args.signal
    )
    .unwrap();
    writeln!(
        csv,
        "# columns are median, q1, q3 over graphs; tau_eff = lambda_max * tau / 2"
    )
    .unwrap();
    let mut header = vec!["tau".to_string()];
    let names = std::iter::once("tau_eff".to_string())
        .chain(std::iter::once("k_true".to_string()))
        .chain(
            BoundKind::ALL
                .iter()
                .map(|k| format!("k_{}", k.name().replace('-', "_"))),
        );
    for name in names {
        header.extend([
            format!("{name}_median"),
            format!("{name}_q1"),
            format!("{name}_q3"),
        ]);
    }
    writeln!(csv, "{}", header.join(",")).unwrap();
    for row in rows {
        let mut cells = vec![format!("{}", row.tau)];
        let groups = std::iter::once(row.tau_eff)
            .chain(std::iter::once(row.k_true))
            .chain(row.k_bounds);
        for (q1, med, q3) in groups {
            cells.extend([format!("{med}"), format!("{q1}"), format!("{q3}")]);
        }
        writeln!(csv, "{}", cells.join(",")).unwrap();
    }
    Ok(csv)
}

/// Timings of one multiscale run.
#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub scales: usize,
    pub order: usize,
    pub matvecs: usize,
    /// λ_max estimation and planning.
    pub setup_s: f64,
    pub basis_s: f64,
    pub combine_total_s: f64,
}

impl BenchRow {
    pub fn combine_per_scale_s(&self) -> f64 {
        self.combine_total_s / self.scales as f64
    }
}

/// One timed multiscale run on already-loaded inputs.
pub fn bench_once(
    l: &SparseSymMatrix,
    x: &GraphSignal,
    scales: &[f64],
    opts: &DiffusionOptions,
) -> Result<BenchRow> {
    let t0 = Instant::now();
    let plan = DiffusionPlan::new(l, x, scales, opts)?;
    let t1 = Instant::now();
    let cache = plan.build_basis(l, x)?;
    let t2 = Instant::now();
    for i in 0..scales.len() {
        std::hint::black_box(plan.diffuse(&cache, i)?);
    }
    let t3 = Instant::now();
    Ok(BenchRow {
        scales: scales.len(),
        order: plan.order,
        matvecs: cache.matvecs(),
        setup_s: (t1 - t0).as_secs_f64(),
        basis_s: (t2 - t1).as_secs_f64(),
        combine_total_s: (t3 - t2).as_secs_f64(),
    })
}

fn median(values: &mut [f64]) -> f64 {
    quartiles(values).1
}

pub fn bench(args: &BenchArgs) -> Result<Vec<BenchRow>> {
    let l = args.graph.load(args.laplacian)?;
    let x = load_signal(&args.signal, l.n())?;
    let pool = args.scales.values(args.seed);
    let opts = options(args.tol, args.bound, args.lambda_max, args.seed);
    let repeats = args.trials.max(1);
    args.counts
        .iter()
        .map(|&m| {
            if m == 0 || m > pool.len() {
                return Err(Error::InvalidArgument(format!(
                    "--counts entry {m} must lie in 1..={}",
                    pool.len()
                )));
            }
            let scales = &pool[..m];
            bench_once(&l, &x, scales, &opts)?; // warm-up
            let runs = (0..repeats)
                .map(|_| bench_once(&l, &x, scales, &opts))
                .collect::<Result<Vec<_>>>()?;
            let pick =
                |f: fn(&BenchRow) -> f64| median(&mut runs.iter().map(f).collect::<Vec<_>>());
            Ok(BenchRow {
                scales: m,
                order: runs[0].order,
                matvecs: runs[0].matvecs,
                setup_s: pick(|r| r.setup_s),
                basis_s: pick(|r| r.basis_s),
                combine_total_s: pick(|r| r.combine_total_s),
            })
        })
        .collect()
}

pub fn cmd_bench(args: &BenchArgs) -> Result<String> {
    let rows = bench(args)?;
    let mut csv = String::new();
    writeln!(csv, "# command=bench").unwrap();
    writeln!(
        csv,
        "# graph={} signal={} tol={:e} bound={} repeats={} seed={}",
        args.graph, args.signal, args.tol, args.bound, args.trials, args.seed
    )
    .unwrap();
    writeln!(
        csv,
        "# times in seconds, median over repeats, warm-up excluded"
    )
    .unwrap();
    writeln!(
        csv,
        "scales,order,matvecs,setup_s,basis_s,combine_total_s,combine_per_scale_s"
    )
    .unwrap();
    for r in rows {
        writeln!(
            csv,
            "{},{},{},{:.6e},{:.6e},{:.6e},{:.6e}",
            r.scales,
            r.order,
            r.matvecs,
            r.setup_s,
            r.basis_s,
            r.combine_total_s,
            r.combine_per_scale_s()
        )
        .unwrap();
    }
    Ok(csv)
}

pub fn cmd_gen_graph(args: &GenGraphArgs) -> Result<String> {
    let edges = erdos_renyi(args.n, args.p, args.seed)?;
    let mut buf = Vec::new();
    write_edge_list(
        &mut buf,
        &edges,
        args.n,
        &[format!(
            "erdos-renyi n={} p={} seed={}",
            args.n, args.p, args.seed
        )],
    )?;
    Ok(String::from_utf8(buf).expect("edge lists are ASCII"))
}
