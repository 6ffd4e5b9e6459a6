//! Command-line front end. Data goes to stdout (or `--out`), diagnostics to
//! stderr. Exit codes: 0 success, 2 usage or infeasible input, 3 numerical
//! failure.

use std::io::Write;
use std::path::PathBuf;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};

use crate::allocation::{
    allocate, enumerate_partitions, inefficiency_i0, inefficiency_i1, minimax_gamma, rate_grid, AllocationRule, Ansatz,
    PartitionCatalogue, Rate,
};
use crate::discrepancy::{min_t, verify_net, verify_stratified};
use crate::error::{Error, Result};
use crate::estimators::{fit_log2_slope, replicate_variance, EstimatorKind, Prepared, SamplerConfig};
use crate::models::Model;
use crate::qmc::{load_direction_numbers, scrambled_sobol, DirectionNumbers, NetParams, ScrambleKind, EMBEDDED_DIMS};

pub const EXIT_USAGE: i32 = 2;
pub const EXIT_NUMERIC: i32 = 3;

/// Exit status for a library error.
pub fn exit_code(err: &Error) -> i32 {
    match err {
        Error::Numeric(_) => EXIT_NUMERIC,
        _ => EXIT_USAGE,
    }
}

#[derive(Debug, Parser)]
#[command(name = "mixqmc", version, about = "RQMC sampling for mixture distributions")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Sample sizes per stratum for a given total.
    Allocate(AllocateArgs),
    /// Partitions of unity into L negative powers of two.
    Partitions(PartitionsArgs),
    /// Inefficiency of designing with rate γ when the true rate is ρ.
    Inefficiency(InefficiencyArgs),
    /// Replicate-variance experiment over n = 2^m.
    Experiment(ExperimentArgs),
    /// Net and stratification diagnostics for scrambled Sobol' points.
    Netcheck(NetcheckArgs),
}

#[derive(Debug, Args)]
pub struct WeightsArgs {
    /// Comma-separated mixture weights.
    #[arg(long, value_delimiter = ',', conflicts_with = "model")]
    pub alpha: Option<Vec<f64>>,
    /// Take the weights from a model (toy, flood, file:<path>).
    #[arg(long)]
    pub model: Option<String>,
}

impl WeightsArgs {
    fn resolve(&self) -> Result<Vec<f64>> {
        match (&self.alpha, &self.model) {
            (Some(a), _) => Ok(a.clone()),
            (None, Some(m)) => Ok(Model::by_name(m)?.spec.alpha()),
            (None, None) => Err(Error::Validation("give --alpha or --model".into())),
        }
    }
}

#[derive(Debug, Args)]
pub struct AllocateArgs {
    #[command(flatten)]
    pub weights: WeightsArgs,
    /// Total sample size.
    #[arg(short, long)]
    pub n: u64,
    #[arg(long, default_value = "2")]
    pub rho: Rate,
    #[arg(long, default_value_t = 0)]
    pub ansatz: u8,
    /// Restrict sizes to powers of two (forward doubling).
    #[arg(long)]
    pub pow2: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct PartitionsArgs {
    /// Number of strata L.
    #[arg(short = 'l', long = "strata")]
    pub strata: usize,
}

#[derive(Debug, Args)]
pub struct InefficiencyArgs {
    #[command(flatten)]
    pub weights: WeightsArgs,
    #[arg(long, default_value_t = 1.0)]
    pub gamma_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub gamma_max: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rho_min: f64,
    #[arg(long, default_value_t = 3.0)]
    pub rho_max: f64,
    /// Spacing of the printed γ and ρ grids.
    #[arg(long, default_value_t = 0.25)]
    pub step: f64,
    /// Spacing of the grid searched for the minimax γ.
    #[arg(long, default_value_t = 0.01)]
    pub minimax_step: f64,
    /// Also print the ansatz-1 matrix.
    #[arg(long)]
    pub i1: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExperimentArgs {
    /// toy, flood or file:<path>.
    #[arg(long, default_value = "toy")]
    pub model: String,
    #[arg(long, default_value_t = 3)]
    pub m_min: u32,
    #[arg(long, default_value_t = 12)]
    pub m_max: u32,
    #[arg(long, default_value_t = 500)]
    pub reps: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Rates for the allocation estimators (comma-separated, `inf` allowed).
    /// Defaults to the model's rates.
    #[arg(long, value_delimiter = ',')]
    pub rho: Option<Vec<Rate>>,
    #[arg(long, default_value_t = 0)]
    pub ansatz: u8,
    /// Comma-separated subset of mc, rqmc, rqmc-adj, rqmc-2, rqmc-l.
    #[arg(long, value_delimiter = ',', default_value = "mc,rqmc,rqmc-adj,rqmc-2,rqmc-l")]
    pub estimators: Vec<String>,
    /// Force power-of-two sizes for rqmc-adj (equivalent to rqmc-2).
    #[arg(long)]
    pub pow2: bool,
    #[arg(long, default_value = "nested-uniform")]
    pub scramble: ScrambleKind,
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Worker threads for the replicate loop (default: all cores).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Joe–Kuo style direction-number file.
    #[arg(long)]
    pub dirs: Option<PathBuf>,
    /// Fill the wall_ms column (otherwise left empty so output is reproducible).
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct NetcheckArgs {
    #[arg(short, long, default_value_t = 2)]
    pub d: usize,
    #[arg(short, long, default_value_t = 8)]
    pub m: u32,
    #[arg(long, default_value = "nested-uniform")]
    pub scramble: ScrambleKind,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Sampling fractions for the first coordinate, e.g. 1/2,1/4,1/8,1/8.
    #[arg(long, value_delimiter = ',')]
    pub beta: Option<Vec<String>>,
    /// Fail unless every fraction is a power of two.
    #[arg(long)]
    pub require_nets: bool,
    #[arg(long)]
    pub dirs: Option<PathBuf>,
}

/// Parses arguments, runs the command and returns the exit status.
pub fn run_from_args<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 { stdout.write_all(text.as_bytes()) } else { stderr.write_all(text.as_bytes()) };
            return code;
        }
    };
    match run(&cli.command, stdout, stderr) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(stderr, "error: {e}");
            exit_code(&e)
        }
    }
}

pub fn run(command: &Command, stdout: &mut dyn Write, stderr: &mut dyn Write) -> Result<()> {
    match command {
        Command::Allocate(a) => with_output(&a.out, stdout, |w| cmd_allocate(a, w)),
        Command::Partitions(a) => cmd_partitions(a.strata, stdout),
        Command::Inefficiency(a) => with_output(&a.out, stdout, |w| cmd_inefficiency(a, w)),
        Command::Experiment(a) => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(a.threads.unwrap_or(0))
                .build()
                .map_err(|e| Error::Validation(format!("thread pool: {e}")))?;
            let (model, rows) = pool.install(|| run_experiment(a))?;
            with_output(&a.out, stdout, |w| write_experiment(a, &model, &rows, w, stderr))
        }
        Command::Netcheck(a) => cmd_netcheck(a, stdout),
    }
}

fn with_output(
    out: &Option<PathBuf>,
    stdout: &mut dyn Write,
    body: impl FnOnce(&mut dyn Write) -> Result<()>,
) -> Result<()> {
    match out {
        None => body(stdout),
        Some(path) => {
            // render fully before touching the file so failures leave no partial CSV
            let mut buf = Vec::new();
            body(&mut buf)?;
            std::fs::write(path, buf).map_err(|e| Error::Validation(format!("cannot write {}: {e}", path.display())))
        }
    }
}

fn io(e: std::io::Error) -> Error {
    Error::Validation(format!("write failed: {e}"))
}

fn load_dirs(path: &Option<PathBuf>, dims: usize) -> Result<DirectionNumbers> {
    match path {
        None => DirectionNumbers::embedded(dims.min(EMBEDDED_DIMS).max(1)),
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| Error::Validation(format!("cannot read {}: {e}", p.display())))?;
            load_direction_numbers(&text, dims)
        }
    }
}

pub fn cmd_allocate(a: &AllocateArgs, w: &mut dyn Write) -> Result<()> {
    let alpha = a.weights.resolve()?;
    let rule = AllocationRule::new(Ansatz::from_index(a.ansatz)?, a.rho).pow2(a.pow2);
    let plan = allocate(&alpha, &rule, a.n)?;
    writeln!(w, "stratum,alpha,xi,beta,n,omega").map_err(io)?;
    for l in 0..plan.num_strata() {
        writeln!(
            w,
            "{},{},{},{},{},{}",
            l + 1,
            plan.alpha[l],
            plan.xi[l],
            plan.beta[l],
            plan.sizes[l],
            plan.weights[l]
        )
        .map_err(io)?;
    }
    Ok(())
}

pub fn cmd_partitions(strata: usize, w: &mut dyn Write) -> Result<()> {
    let cat = enumerate_partitions(strata)?;
    for kappa in &cat.partitions {
        writeln!(w, "{}", PartitionCatalogue::format(kappa)).map_err(io)?;
    }
    writeln!(w, "count {}", cat.len()).map_err(io)
}

pub fn cmd_inefficiency(a: &InefficiencyArgs, w: &mut dyn Write) -> Result<()> {
    let alpha = a.weights.resolve()?;
    for (lo, hi) in [(a.gamma_min, a.gamma_max), (a.rho_min, a.rho_max)] {
        if !(lo >= 1.0 && hi <= 3.0 && lo <= hi) {
            return Err(Error::Validation(format!("rate grid [{lo}, {hi}] must lie in [1, 3]")));
        }
    }
    let gammas = rate_grid(a.gamma_min, a.gamma_max, a.step)?;
    let rhos = rate_grid(a.rho_min, a.rho_max, a.step)?;
    write!(w, "criterion,gamma").map_err(io)?;
    for r in &rhos {
        write!(w, ",rho={}", fmt_grid(*r)).map_err(io)?;
    }
    writeln!(w).map_err(io)?;
    let mut criteria: Vec<(&str, fn(f64, f64, &[f64]) -> Result<f64>)> = vec![("I0", inefficiency_i0)];
    if a.i1 {
        criteria.push(("I1", inefficiency_i1));
    }
    for (name, f) in criteria {
        for &g in &gammas {
            write!(w, "{name},{}", fmt_grid(g)).map_err(io)?;
            for &r in &rhos {
                write!(w, ",{:.10}", f(g, r, &alpha)?).map_err(io)?;
            }
            writeln!(w).map_err(io)?;
        }
    }
    let mm = minimax_gamma(&alpha, (a.gamma_min, a.gamma_max), (a.rho_min, a.rho_max), a.minimax_step)?;
    writeln!(
        w,
        "gamma0,{},max_I0,{:.10},worst_rho,{}",
        fmt_grid(mm.gamma),
        mm.max_inefficiency,
        fmt_grid(mm.worst_rho)
    )
    .map_err(io)
}

fn fmt_grid(v: f64) -> String {
    let r = (v * 1e6).round() / 1e6;
    format!("{r}")
}

/// One (estimator, m) result row.
#[derive(Clone, Debug, PartialEq)]
pub struct ExperimentRow {
    pub estimator: EstimatorKind,
    pub m: u32,
    pub n: u64,
    pub variance: f64,
    pub mean: f64,
    pub wall_ms: f64,
}

/// The estimator list of an experiment, expanded over the requested rates
/// and sorted into reporting order.
pub fn experiment_estimators(a: &ExperimentArgs, model: &Model) -> Result<Vec<EstimatorKind>> {
    let mut kinds = Vec::new();
    for name in &a.estimators {
        let mut base = EstimatorKind::parse_for(name.trim(), model)?;
        if a.pow2 {
            if let EstimatorKind::RqmcAdjusted(r) = base {
                base = EstimatorKind::RqmcPow2(r);
            }
        }
        match (&a.rho, base.rate(), name.contains(":rho=")) {
            (Some(rates), Some(_), false) => kinds.extend(rates.iter().map(|&r| base.with_rate(r))),
            _ => kinds.push(base),
        }
    }
    kinds.sort_by(|x, y| {
        let key = |k: &EstimatorKind| match k.rate() {
            Some(Rate::Finite(r)) => r,
            Some(Rate::Infinite) => f64::INFINITY,
            None => 0.0,
        };
        x.rank().cmp(&y.rank()).then(key(x).total_cmp(&key(y)))
    });
    kinds.dedup();
    Ok(kinds)
}

/// Runs the replicate loop for every (estimator, m) pair.
pub fn run_experiment(a: &ExperimentArgs) -> Result<(Model, Vec<ExperimentRow>)> {
    if a.m_min > a.m_max {
        return Err(Error::Validation(format!("empty m range {}..={}", a.m_min, a.m_max)));
    }
    if a.m_max > crate::qmc::MAX_MATERIALIZED_M {
        return Err(Error::Capability(format!("m = {} is too large", a.m_max)));
    }
    if a.reps < 2 {
        return Err(Error::Validation("--reps must be at least 2".into()));
    }
    let model = Model::by_name(&a.model)?;
    let kinds = experiment_estimators(a, &model)?;
    let dims = model.rqmc_dim();
    let mut cfg = SamplerConfig::new(load_dirs(&a.dirs, dims)?);
    cfg.scramble = a.scramble;
    cfg.ansatz = Ansatz::from_index(a.ansatz)?;
    let mut rows = Vec::new();
    for (k, kind) in kinds.iter().enumerate() {
        for m in a.m_min..=a.m_max {
            let start = Instant::now();
            let prepared = Prepared::new(&model.spec, &model.integrand, *kind, m, &cfg)?;
            let master = crate::seed::split(crate::seed::split(a.seed, k as u64), m as u64);
            let report = replicate_variance(&kind.to_string(), prepared.n(), a.reps, master, |s| prepared.sample(s))?;
            rows.push(ExperimentRow {
                estimator: *kind,
                m,
                n: prepared.n(),
                variance: report.variance,
                mean: report.mean,
                wall_ms: start.elapsed().as_secs_f64() * 1e3,
            });
        }
    }
    Ok((model, rows))
}

/// CSV rows to `w`, fitted slopes to `log`.
pub fn write_experiment(
    a: &ExperimentArgs,
    model: &Model,
    rows: &[ExperimentRow],
    w: &mut dyn Write,
    log: &mut dyn Write,
) -> Result<()> {
    writeln!(w, "estimator,m,n,variance,mean,wall_ms").map_err(io)?;
    for r in rows {
        let wall = if a.timing { format!("{:.1}", r.wall_ms) } else { String::new() };
        writeln!(w, "{},{},{},{:e},{:.15e},{wall}", r.estimator, r.m, r.n, r.variance, r.mean).map_err(io)?;
    }
    let lo = a.m_min.max(7.min(a.m_max.saturating_sub(2)));
    let _ = writeln!(log, "model {} slopes over m = {lo}..={}:", model.name, a.m_max);
    let mut current: Option<EstimatorKind> = None;
    let mut pts = Vec::new();
    let flush = |kind: Option<EstimatorKind>, pts: &mut Vec<(f64, f64)>, log: &mut dyn Write| {
        if let Some(k) = kind {
            match fit_log2_slope(pts) {
                Ok(s) => {
                    let _ = writeln!(log, "  {k}: {s:.3}");
                }
                Err(e) => {
                    let _ = writeln!(log, "  {k}: no slope ({e})");
                }
            }
        }
        pts.clear();
    };
    for r in rows {
        if current != Some(r.estimator) {
            flush(current, &mut pts, log);
            current = Some(r.estimator);
        }
        if r.m >= lo && r.variance > 0.0 {
            pts.push((r.n as f64, r.variance));
        }
    }
    flush(current, &mut pts, log);
    Ok(())
}

/// Parses "1/8", "0.125" or "0.5".
fn parse_fraction(s: &str) -> Result<f64> {
    let bad = || Error::Validation(format!("bad fraction {s:?}"));
    let v = match s.trim().split_once('/') {
        Some((p, q)) => p.trim().parse::<f64>().map_err(|_| bad())? / q.trim().parse::<f64>().map_err(|_| bad())?,
        None => s.trim().parse::<f64>().map_err(|_| bad())?,
    };
    if !(v > 0.0 && v <= 1.0) {
        return Err(bad());
    }
    Ok(v)
}

pub fn cmd_netcheck(a: &NetcheckArgs, w: &mut dyn Write) -> Result<()> {
    if a.d == 0 || a.d > 6 || a.m > 12 {
        return Err(Error::Validation("netcheck supports 1 <= d <= 6 and m <= 12".into()));
    }
    let dirs = load_dirs(&a.dirs, a.d)?;
    let pts = scrambled_sobol(&dirs, a.d, a.m, a.scramble, a.seed)?.to_unit_cube();
    let t = min_t(&pts, a.m, a.d)?;
    writeln!(w, "d {} m {} scramble {} seed {}", a.d, a.m, a.scramble, a.seed).map_err(io)?;
    writeln!(w, "min_t {t}").map_err(io)?;
    let stratified = verify_stratified(&pts)?;
    writeln!(w, "stratified {}", if stratified { "yes" } else { "no" }).map_err(io)?;
    let Some(raw) = &a.beta else { return Ok(()) };
    let beta: Vec<f64> = raw.iter().map(|s| parse_fraction(s)).collect::<Result<_>>()?;
    let selector = crate::mixture::build_selector(&beta)?;
    let dyadic: Vec<Option<u32>> = beta
        .iter()
        .map(|&b| {
            let k = (-b.log2()).round();
            (k >= 0.0 && (2f64.powf(-k) - b).abs() < 1e-15).then_some(k as u32)
        })
        .collect();
    if a.require_nets && dyadic.iter().any(|k| k.is_none()) {
        return Err(Error::Validation("--require-nets needs every fraction to be a power of two".into()));
    }
    if a.d < 2 {
        return Err(Error::Validation("per-stratum checks need d >= 2".into()));
    }
    let n = pts.len() as f64;
    for (l, kappa) in dyadic.iter().enumerate() {
        let sub: Vec<Vec<f64>> =
            pts.iter().filter(|p| selector.select(p[0]) == l).map(|p| p[1..].to_vec()).collect();
        match kappa {
            Some(k) if *k <= a.m => {
                let ml = a.m - k;
                let ok_count = sub.len() == 1usize << ml;
                let tl = t.min(ml);
                let verdict = ok_count && verify_net(&sub, NetParams::new(tl, ml, a.d - 1)?)?.holds;
                let measured = if ok_count { min_t(&sub, ml, a.d - 1)?.to_string() } else { "-".into() };
                writeln!(
                    w,
                    "stratum {} beta {} count {} m_l {ml} t_l {tl} min_t {measured} net {}",
                    l + 1,
                    beta[l],
                    sub.len(),
                    if verdict { "pass" } else { "fail" }
                )
                .map_err(io)?;
            }
            _ => {
                writeln!(w, "stratum {} beta {} count {} expected {:.3} net n/a", l + 1, beta[l], sub.len(), n * beta[l])
                    .map_err(io)?;
            }
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run_ok(args: &[&str]) -> String {
        let mut out = Vec::new();
        let mut err = Vec::new();
        let code = run_from_args(std::iter::once("mixqmc").chain(args.iter().copied()), &mut out, &mut err);
        assert_eq!(code, 0, "{}", String::from_utf8_lossy(&err));
        String::from_utf8(out).unwrap()
    }

    fn run_code(args: &[&str]) -> i32 {
        let mut sink = Vec::new();
        let mut err = Vec::new();
        run_from_args(std::iter::once("mixqmc").chain(args.iter().copied()), &mut sink, &mut err)
    }

    #[test]
    fn allocate_pow2_example() {
        let out = run_ok(&["allocate", "--alpha", "0.9,0.05,0.05", "--rho", "3", "-n", "8", "--pow2"]);
        let sizes: Vec<&str> = out.lines().skip(1).map(|l| l.split(',').nth(4).unwrap()).collect();
        assert_eq!(sizes, ["4", "2", "2"]);
        assert_eq!(run_code(&["allocate", "--alpha", "0.5,0.25,0.25", "-n", "2"]), 2);
    }

    #[test]
    fn partitions_listing() {
        assert_eq!(run_ok(&["partitions", "--strata", "2"]), "1/2 1/2\ncount 1\n");
        assert_eq!(run_ok(&["partitions", "--strata", "4"]).lines().count(), 3);
        assert_eq!(run_code(&["partitions", "--strata", "30"]), 2);
    }

    #[test]
    fn inefficiency_table() {
        let out = run_ok(&["inefficiency", "--alpha", "0.75,0.25", "--step", "1"]);
        let row: Vec<&str> = out.lines().find(|l| l.starts_with("I0,2,")).unwrap().split(',').collect();
        let v: f64 = row[2].parse().unwrap();
        assert!((v - 1.0254).abs() < 5e-5);
        assert!(out.lines().last().unwrap().starts_with("gamma0,"));
        assert_eq!(run_code(&["inefficiency", "--alpha", "0.5,0.5", "--gamma-max", "4"]), 2);
    }

    #[test]
    fn experiment_expands_rates_in_order() {
        let args = Cli::try_parse_from([
            "mixqmc", "experiment", "--model", "flood", "--rho", "inf,1,3", "--estimators", "rqmc-adj,mc",
        ])
        .unwrap();
        let Command::Experiment(a) = args.command else { panic!() };
        let names: Vec<String> =
            experiment_estimators(&a, &Model::flood()).unwrap().iter().map(|k| k.to_string()).collect();
        assert_eq!(names, ["mc", "rqmc-adj:rho=1", "rqmc-adj:rho=3", "rqmc-adj:rho=inf"]);
    }

    #[test]
    fn fractions() {
        assert_eq!(parse_fraction("1/8").unwrap(), 0.125);
        assert_eq!(parse_fraction("0.3").unwrap(), 0.3);
        assert!(parse_fraction("3/2").is_err());
        assert!(parse_fraction("x").is_err());
    }

    #[test]
    fn numeric_errors_map_to_three() {
        assert_eq!(exit_code(&Error::Numeric("x".into())), 3);
        assert_eq!(exit_code(&Error::Infeasible("x".into())), 2);
    }
}
