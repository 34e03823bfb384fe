//! Command-line front end: outage curves, eigenvalue density tables and
//! ergodic summaries as CSV or JSON.
//!
//! Rates on the command line and in the output are per transmit channel of
//! the configuration as given (nats, or bits with `--bits`). Internally they
//! are mapped to the normalized frame of [`ChannelDims`].

use std::f64::consts::LN_2;
use std::fmt;
use std::time::{Instant, SystemTime, UNIX_EPOCH};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;
use serde_json::{json, Value};

use jacobi_outage::coulomb::{
    ergodic_summary, gaussian_outage, outage_asymptotic, solve_at_multiplier, solve_regime, ErgodicSummary,
    GasParams, Profile,
};
use jacobi_outage::ensemble::{normalize_dims, ChannelDims, SnrParam};
use jacobi_outage::exact::{outage_exact, ExactConfig, DEFAULT_PRECISION_BITS};
use jacobi_outage::montecarlo::{outage_curve, McConfig, OutageEstimate};
use jacobi_outage::Error;

pub const THREADS_ENV: &str = "JACOBI_OUTAGE_THREADS";

#[derive(Debug, Parser)]
#[command(name = "jacobi-outage", version, about = "Outage probability of the Jacobi MIMO channel")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Outage probability over a rate grid.
    Outage(OutageArgs),
    /// Eigenvalue density on its support.
    Density(DensityArgs),
    /// Ergodic rate, variance and support.
    Ergodic(ErgodicArgs),
}

#[derive(Debug, Clone, Args)]
pub struct ChannelArgs {
    /// Number of modes of the unitary.
    #[arg(long = "N")]
    pub n: usize,
    /// Transmit channels.
    #[arg(long = "Nt")]
    pub nt: usize,
    /// Receive channels.
    #[arg(long = "Nr")]
    pub nr: usize,
    /// Linear signal-to-noise ratio.
    #[arg(long)]
    pub rho: f64,
    /// Rates are read and written in bits instead of nats.
    #[arg(long)]
    pub bits: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, ValueEnum)]
pub enum MethodArg {
    Mc,
    Exact,
    Ld,
    Gauss,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Csv,
    Json,
}

#[derive(Debug, Clone, Args)]
pub struct OutputArgs {
    #[arg(long, value_enum, default_value = "csv")]
    pub format: Format,
    /// Output file; standard output when absent.
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    /// Omit timestamps and timings so identical runs give identical bytes.
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Debug, Clone, Args)]
pub struct OutageArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    /// Lowest rate; defaults to just above the smallest achievable rate.
    #[arg(long = "r-min")]
    pub r_min: Option<f64>,
    /// Highest rate; defaults to just below the largest achievable rate.
    #[arg(long = "r-max")]
    pub r_max: Option<f64>,
    #[arg(long, default_value_t = 20)]
    pub points: usize,
    /// Explicit comma-separated rates, overriding the grid.
    #[arg(long, value_delimiter = ',')]
    pub rates: Option<Vec<f64>>,
    #[arg(long, value_enum, value_delimiter = ',', default_value = "mc,ld,gauss")]
    pub methods: Vec<MethodArg>,
    #[arg(long, default_value_t = 100_000)]
    pub trials: u64,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Worker threads; capped by the JACOBI_OUTAGE_THREADS environment variable.
    #[arg(long)]
    pub workers: Option<usize>,
    /// Working precision of the exact solver in bits.
    #[arg(long, default_value_t = DEFAULT_PRECISION_BITS)]
    pub precision: u32,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DensityMethod {
    Ergodic,
    Constrained,
}

#[derive(Debug, Clone, Args)]
pub struct DensityArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value = "ergodic")]
    pub method: DensityMethod,
    /// Target rate of the constrained density.
    #[arg(long, conflicts_with = "k")]
    pub r: Option<f64>,
    /// Multiplier of the constrained density.
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long, default_value_t = 512)]
    pub points: usize,
    #[command(flatten)]
    pub output: OutputArgs,
}

#[derive(Debug, Clone, Args)]
pub struct ErgodicArgs {
    #[command(flatten)]
    pub channel: ChannelArgs,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub output: Option<std::path::PathBuf>,
    #[arg(long)]
    pub reproducible: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub enum CliError {
    /// Bad flags or configuration; exit code 2.
    Usage(String),
    /// Every requested computation failed; exit code 1.
    Solver(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Solver(_) => 1,
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::Usage(m) => write!(f, "usage error: {m}"),
            CliError::Solver(m) => write!(f, "solver failure: {m}"),
        }
    }
}

impl std::error::Error for CliError {}

fn usage(e: impl fmt::Display) -> CliError {
    CliError::Usage(e.to_string())
}

/// Rendered output plus warnings for standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct Report {
    pub body: String,
    pub warnings: Vec<String>,
}

/// Validated channel configuration.
struct Channel {
    dims: ChannelDims,
    snr: SnrParam,
    gas: GasParams,
    /// Multiply an external rate by this to get nats in the normalized frame.
    to_internal: f64,
    echo: Value,
}

impl Channel {
    fn new(args: &ChannelArgs) -> Result<Self, CliError> {
        let snr = SnrParam::new(args.rho).map_err(usage)?;
        let dims = match normalize_dims(args.n, args.nt, args.nr) {
            Ok(d) => d,
            Err(Error::Deterministic { pinned_modes, nt }) => {
                let rate = pinned_modes as f64 * snr.capacity() / nt as f64;
                return Err(CliError::Usage(format!(
                    "the channel is deterministic: every eigenvalue is pinned at 1 and the rate is {} {}",
                    if args.bits { rate / LN_2 } else { rate },
                    if args.bits { "bits" } else { "nats" }
                )));
            }
            Err(e) => return Err(usage(e)),
        };
        let unit = if args.bits { LN_2 } else { 1.0 };
        let echo = json!({
            "N": args.n, "Nt": args.nt, "Nr": args.nr, "rho": args.rho,
            "units": if args.bits { "bits" } else { "nats" },
            "normalized": { "Nt": dims.nt, "Nr": dims.nr, "N0": dims.n0, "pinned": dims.pinned },
        });
        Ok(Self { dims, snr, gas: GasParams::from_dims(&dims, snr), to_internal: unit / dims.rate_scale(), echo })
    }

    fn internal(&self, r: f64) -> f64 {
        r * self.to_internal
    }

    fn external(&self, r: f64) -> f64 {
        r / self.to_internal
    }
}

/// Worker count: the flag (or available parallelism), capped by the environment.
pub fn resolve_workers(flag: Option<usize>, env: Option<&str>) -> Result<usize, CliError> {
    let mut workers = flag.unwrap_or_else(|| std::thread::available_parallelism().map_or(1, |n| n.get()));
    if workers == 0 {
        return Err(CliError::Usage("--workers must be at least 1".into()));
    }
    if let Some(cap) = env {
        let cap: usize = cap
            .trim()
            .parse()
            .map_err(|_| CliError::Usage(format!("{THREADS_ENV} must be a positive integer, got {cap:?}")))?;
        if cap == 0 {
            return Err(CliError::Usage(format!("{THREADS_ENV} must be a positive integer")));
        }
        workers = workers.min(cap);
    }
    Ok(workers)
}

fn metadata(command: &str, config: Value, reproducible: bool, started: Instant) -> Value {
    let mut meta = json!({
        "command": command,
        "version": env!("CARGO_PKG_VERSION"),
        "config": config,
    });
    if !reproducible {
        let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
        meta["timestamp"] = json!(now);
        meta["wall_time_s"] = json!(started.elapsed().as_secs_f64());
    }
    meta
}

fn to_json(value: &Value) -> String {
    let mut s = serde_json::to_string_pretty(value).expect("JSON values serialize");
    s.push('\n');
    s
}

/// One outage-table cell: a value, a failure reason, or not requested.
#[derive(Debug, Clone, PartialEq)]
pub enum Cell {
    Off,
    Value(OutageEstimate),
    Failed(String),
}

impl Cell {
    fn from_result(r: jacobi_outage::Result<OutageEstimate>) -> Self {
        match r {
            Ok(e) => Cell::Value(e),
            Err(e) => Cell::Failed(e.to_string()),
        }
    }

    fn p(&self) -> Option<f64> {
        match self {
            Cell::Value(e) => Some(e.p),
            _ => None,
        }
    }

    fn json(&self) -> Value {
        match self {
            Cell::Off => Value::Null,
            Cell::Value(e) => json!({ "p": e.p, "ci_lo": e.ci_low, "ci_hi": e.ci_high, "precision": e.precision }),
            Cell::Failed(reason) => json!({ "p": null, "error": reason }),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct OutageRow {
    /// Rate in the caller's frame and units.
    pub r: f64,
    pub mc: Cell,
    pub exact: Cell,
    pub ld: Cell,
    pub gauss: Cell,
}

fn rate_grid(args: &OutageArgs, ch: &Channel) -> Result<Vec<f64>, CliError> {
    let (low, high) = ch.gas.rate_range();
    let (low, high) = (ch.external(low), ch.external(high));
    let mut rates = match &args.rates {
        Some(list) => list.clone(),
        None => {
            if args.points == 0 {
                return Err(CliError::Usage("--points must be at least 1".into()));
            }
            let lo = args.r_min.unwrap_or(low);
            let hi = args.r_max.unwrap_or(high);
            if (hi.is_nan() || lo.is_nan() || hi <= lo) && args.points > 1 {
                return Err(CliError::Usage(format!("empty rate grid [{lo}, {hi}]")));
            }
            // Open ends default to interior points; explicit ends are included.
            let n = args.points;
            let (start, stop, denom) = match (args.r_min.is_some(), args.r_max.is_some()) {
                (true, true) => (0, n - 1, (n - 1).max(1)),
                (true, false) => (0, n - 1, n),
                (false, true) => (1, n, n),
                (false, false) => (1, n, n + 1),
            };
            (start..=stop).map(|i| lo + (hi - lo) * i as f64 / denom as f64).collect()
        }
    };
    if rates.is_empty() {
        return Err(CliError::Usage("no rates requested".into()));
    }
    if let Some(r) = rates.iter().find(|r| !(**r > low && **r < high)) {
        return Err(CliError::Usage(format!("rate {r} outside the achievable interval ({low}, {high})")));
    }
    rates.sort_by(|a, b| a.total_cmp(b));
    Ok(rates)
}

fn pool(workers: usize) -> rayon::ThreadPool {
    rayon::ThreadPoolBuilder::new().num_threads(workers).build().expect("thread pool")
}

/// Evaluate every requested method on the grid.
pub fn compute_outage(args: &OutageArgs, workers: usize) -> Result<(Vec<OutageRow>, Vec<String>), CliError> {
    if args.methods.is_empty() {
        return Err(CliError::Usage("--methods must name at least one method".into()));
    }
    let ch = Channel::new(&args.channel)?;
    let rates = rate_grid(args, &ch)?;
    let internal: Vec<f64> = rates.iter().map(|&r| ch.internal(r)).collect();
    let wants = |m| args.methods.contains(&m);
    let mut warnings = Vec::new();

    let mc: Vec<Cell> = if wants(MethodArg::Mc) {
        let cfg = McConfig::new(ch.dims, ch.snr, args.trials, args.seed, workers).map_err(usage)?;
        let est = outage_curve(&cfg, &internal).map_err(usage)?;
        for (r, e) in rates.iter().zip(&est) {
            if e.p * (args.trials as f64) < 10.0 {
                warnings.push(format!(
                    "r = {r}: fewer than 10 expected Monte Carlo outages; the estimate has little power"
                ));
            }
        }
        est.into_iter().map(Cell::Value).collect()
    } else {
        vec![Cell::Off; rates.len()]
    };

    let exact_cfg = ExactConfig::new(ch.dims, ch.snr).with_precision(args.precision);
    let exact_refusal = if wants(MethodArg::Exact) {
        match exact_cfg.term_count() {
            Ok(_) => None,
            Err(e) => {
                warnings.push(format!("exact method disabled: {e}"));
                Some(e.to_string())
            }
        }
    } else {
        None
    };
    let erg = if wants(MethodArg::Gauss) || wants(MethodArg::Ld) {
        Some(ergodic_summary(&ch.gas))
    } else {
        None
    };

    let nt = ch.dims.nt;
    let per_row: Vec<(Cell, Cell, Cell)> = pool(workers).install(|| {
        internal
            .par_iter()
            .map(|&r| {
                let exact = match (&exact_refusal, wants(MethodArg::Exact)) {
                    (_, false) => Cell::Off,
                    (Some(reason), true) => Cell::Failed(reason.clone()),
                    (None, true) => Cell::from_result(outage_exact(&exact_cfg, r)),
                };
                let ld = if wants(MethodArg::Ld) {
                    match &erg {
                        Some(Err(e)) => Cell::Failed(e.to_string()),
                        _ => Cell::from_result(outage_asymptotic(&ch.gas, nt, r)),
                    }
                } else {
                    Cell::Off
                };
                let gauss = match (&erg, wants(MethodArg::Gauss)) {
                    (_, false) => Cell::Off,
                    (Some(Ok(e)), true) => Cell::Value(gaussian_outage(e, nt, r)),
                    (Some(Err(e)), true) => Cell::Failed(e.to_string()),
                    (None, true) => unreachable!("summary computed when gauss is requested"),
                };
                (exact, ld, gauss)
            })
            .collect()
    });

    let rows: Vec<OutageRow> = rates
        .iter()
        .zip(mc)
        .zip(per_row)
        .map(|((&r, mc), (exact, ld, gauss))| OutageRow { r, mc, exact, ld, gauss })
        .collect();
    let all_failed = rows.iter().all(|row| {
        [&row.mc, &row.exact, &row.ld, &row.gauss].iter().all(|c| !matches!(c, Cell::Value(_)))
    });
    if all_failed {
        let reason = rows
            .iter()
            .flat_map(|row| [&row.mc, &row.exact, &row.ld, &row.gauss])
            .find_map(|c| match c {
                Cell::Failed(m) => Some(m.clone()),
                _ => None,
            })
            .unwrap_or_default();
        return Err(CliError::Solver(format!("no row produced a value: {reason}")));
    }
    for row in &rows {
        for (name, cell) in [("exact", &row.exact), ("ld", &row.ld), ("gauss", &row.gauss)] {
            if let Cell::Failed(m) = cell {
                if exact_refusal.is_none() || name != "exact" {
                    warnings.push(format!("r = {}: {name} failed: {m}", row.r));
                }
            }
        }
    }
    Ok((rows, warnings))
}

fn fmt_opt(v: Option<f64>) -> String {
    v.map_or_else(String::new, |x| format!("{x:e}"))
}

fn write_csv(header: &[&str], rows: impl Iterator<Item = Vec<String>>) -> String {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header).expect("in-memory write");
    for row in rows {
        w.write_record(&row).expect("in-memory write");
    }
    String::from_utf8(w.into_inner().expect("in-memory flush")).expect("CSV is UTF-8")
}

pub fn cmd_outage(args: &OutageArgs, workers: usize) -> Result<Report, CliError> {
    let started = Instant::now();
    let (rows, warnings) = compute_outage(args, workers)?;
    let body = match args.output.format {
        Format::Csv => write_csv(
            &["r", "pout_mc", "ci_lo", "ci_hi", "pout_exact", "pout_ld", "pout_gauss"],
            rows.iter().map(|row| {
                let (lo, hi) = match &row.mc {
                    Cell::Value(e) => (Some(e.ci_low), Some(e.ci_high)),
                    _ => (None, None),
                };
                vec![
                    format!("{:e}", row.r),
                    fmt_opt(row.mc.p()),
                    fmt_opt(lo),
                    fmt_opt(hi),
                    fmt_opt(row.exact.p()),
                    fmt_opt(row.ld.p()),
                    fmt_opt(row.gauss.p()),
                ]
            }),
        ),
        Format::Json => {
            let ch = Channel::new(&args.channel)?;
            let methods: Vec<String> = args
                .methods
                .iter()
                .map(|m| m.to_possible_value().expect("named variant").get_name().to_string())
                .collect();
            let config = json!({
                "channel": ch.echo,
                "methods": methods,
                "trials": args.trials,
                "seed": args.seed,
                "precision_bits": args.precision,
            });
            let rows: Vec<Value> = rows
                .iter()
                .map(|row| {
                    json!({
                        "r": row.r,
                        "mc": row.mc.json(),
                        "exact": row.exact.json(),
                        "ld": row.ld.json(),
                        "gauss": row.gauss.json(),
                    })
                })
                .collect();
            to_json(&json!({ "meta": metadata("outage", config, args.output.reproducible, started), "rows": rows }))
        }
    };
    Ok(Report { body, warnings })
}

/// Density table on the support `[a, b]`.
///
/// Nodes are `x_i = a + (b - a) sin^2(theta_i)` at midpoints of a uniform
/// `theta` grid, so the columns stay finite at hard edges and
/// `sum weight_i p_i` integrates the density accurately.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityTable {
    pub x: Vec<f64>,
    pub p: Vec<f64>,
    pub weight: Vec<f64>,
}

impl DensityTable {
    fn sample(a: f64, b: f64, points: usize, density: impl Fn(f64) -> f64) -> Self {
        let step = std::f64::consts::FRAC_PI_2 / points as f64;
        let (mut x, mut p, mut weight) = (Vec::new(), Vec::new(), Vec::new());
        for i in 0..points {
            let theta = (i as f64 + 0.5) * step;
            let (s, c) = theta.sin_cos();
            let xi = a + (b - a) * s * s;
            x.push(xi);
            p.push(density(xi));
            weight.push((b - a) * 2.0 * s * c * step);
        }
        Self { x, p, weight }
    }

    pub fn mass(&self) -> f64 {
        self.p.iter().zip(&self.weight).map(|(p, w)| p * w).sum()
    }
}

/// Density table plus `{config, solution}` metadata.
pub fn compute_density(args: &DensityArgs) -> Result<(DensityTable, Value), CliError> {
    if args.points < 2 {
        return Err(CliError::Usage("--points must be at least 2".into()));
    }
    let ch = Channel::new(&args.channel)?;
    let info;
    let table = match args.method {
        DensityMethod::Ergodic => {
            if args.r.is_some() || args.k.is_some() {
                return Err(CliError::Usage("--r and --k apply to the constrained density only".into()));
            }
            let erg = ergodic_summary(&ch.gas).map_err(|e| CliError::Solver(e.to_string()))?;
            let regime = solve_at_multiplier(&ch.gas, 0.0).map_err(|e| CliError::Solver(e.to_string()))?.regime;
            info = json!({ "a": erg.a0, "b": erg.b0, "regime": regime.to_string(), "k": 0.0, "r": ch.external(erg.r_erg) });
            DensityTable::sample(erg.a0, erg.b0, args.points, |x| erg.density(x))
        }
        DensityMethod::Constrained => {
            let sol = match (args.r, args.k) {
                (Some(r), None) => solve_regime(&ch.gas, ch.internal(r)),
                (None, Some(k)) => solve_at_multiplier(&ch.gas, k),
                _ => return Err(CliError::Usage("the constrained density needs exactly one of --r or --k".into())),
            }
            .map_err(|e| match e {
                Error::RateOutOfRange { .. } | Error::Domain(_) => usage(e),
                e => CliError::Solver(e.to_string()),
            })?;
            info = json!({
                "a": sol.a, "b": sol.b, "regime": sol.regime.to_string(), "k": sol.k,
                "r": ch.external(sol.r), "exponent": sol.exponent,
            });
            let profile: Profile = sol.profile;
            DensityTable::sample(profile.a, profile.b, args.points, |x| profile.density(x))
        }
    };
    let config = json!({
        "channel": ch.echo,
        "method": match args.method {
            DensityMethod::Ergodic => "ergodic",
            DensityMethod::Constrained => "constrained",
        },
        "r": args.r,
        "k": args.k,
        "points": args.points,
    });
    Ok((table, json!({ "config": config, "solution": info })))
}

pub fn cmd_density(args: &DensityArgs) -> Result<Report, CliError> {
    let started = Instant::now();
    let (table, info) = compute_density(args)?;
    let body = match args.output.format {
        Format::Csv => write_csv(
            &["x", "p", "weight"],
            (0..table.x.len()).map(|i| vec![format!("{:e}", table.x[i]), format!("{:e}", table.p[i]), format!("{:e}", table.weight[i])]),
        ),
        Format::Json => {
            let rows: Vec<Value> = (0..table.x.len())
                .map(|i| json!({ "x": table.x[i], "p": table.p[i], "weight": table.weight[i] }))
                .collect();
            let mut meta = metadata("density", info["config"].clone(), args.output.reproducible, started);
            meta["solution"] = info["solution"].clone();
            to_json(&json!({ "meta": meta, "rows": rows }))
        }
    };
    Ok(Report { body, warnings: Vec::new() })
}

/// Ergodic record in the caller's rate units.
pub fn compute_ergodic(args: &ChannelArgs) -> Result<(ErgodicSummary, Value), CliError> {
    let ch = Channel::new(args)?;
    let erg = ergodic_summary(&ch.gas).map_err(|e| CliError::Solver(e.to_string()))?;
    let regime = solve_at_multiplier(&ch.gas, 0.0).map_err(|e| CliError::Solver(e.to_string()))?.regime;
    // Nt r is the same in every frame, so v_erg only changes with the unit.
    let unit = if args.bits { LN_2 } else { 1.0 };
    let record = json!({
        "a0": erg.a0,
        "b0": erg.b0,
        "r_erg": ch.external(erg.r_erg),
        "v_erg": erg.v_erg / (unit * unit),
        "E0": erg.e0,
        "regime": regime.to_string(),
    });
    Ok((erg, json!({ "record": record, "channel": ch.echo })))
}

pub fn cmd_ergodic(args: &ErgodicArgs) -> Result<Report, CliError> {
    let started = Instant::now();
    let (_, out) = compute_ergodic(&args.channel)?;
    let record = &out["record"];
    let body = match args.format {
        Format::Json => to_json(&json!({
            "meta": metadata("ergodic", out["channel"].clone(), args.reproducible, started),
            "record": record,
        })),
        Format::Csv => {
            let keys = ["a0", "b0", "r_erg", "v_erg", "E0", "regime"];
            let row = keys
                .iter()
                .map(|k| match &record[*k] {
                    Value::String(s) => s.clone(),
                    v => format!("{:e}", v.as_f64().unwrap_or(f64::NAN)),
                })
                .collect();
            write_csv(&keys, std::iter::once(row))
        }
    };
    Ok(Report { body, warnings: Vec::new() })
}

/// Run a parsed command and return the rendered output with its destination.
pub fn run(cli: &Cli, threads_env: Option<&str>) -> Result<(Report, Option<std::path::PathBuf>), CliError> {
    match &cli.command {
        Command::Outage(a) => {
            let workers = resolve_workers(a.workers, threads_env)?;
            Ok((cmd_outage(a, workers)?, a.output.output.clone()))
        }
        Command::Density(a) => Ok((cmd_density(a)?, a.output.output.clone())),
        Command::Ergodic(a) => Ok((cmd_ergodic(a)?, a.output.clone())),
    }
}
