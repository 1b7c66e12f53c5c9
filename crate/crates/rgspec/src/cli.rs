//! Command-line front end.
//!
//! Exit status: 0 on success, 1 on a domain failure (failed construction
//! under `--strict`, refused enumeration, unreadable input, IO error), 2 on a
//! usage error (bad flags, parameters outside their domain).

use std::ffi::OsString;
use std::fs;
use std::io::Write;
use std::path::PathBuf;

use anyhow::{anyhow, bail, Context, Result};
use clap::{Args, Parser, Subcommand};
use rgspec_core::constructor::{construct_exact, ConstructConfig, StageRecord};
use rgspec_core::prob::{
    binom_cdf, binom_point, chernoff_interval_bound, log_binom, m_of_k, maxdeg_bound, mills_tail,
    phi, DEFAULT_EPS,
};
use rgspec_core::spectrum::{exact_spectrum, sampled_spectrum, DEFAULT_BUDGET};
use rgspec_core::{EdgeTarget, Graph, Offset, Spectrum, VertexSet};
use serde::Serialize;

use crate::experiments::{
    default_k_values, mu_csv, mu_for_graph, report_mu, report_xn, run_mu, run_xn, scale,
    summarize_xn, ExperimentConfig, TargetSpec,
};
use crate::io::{read_graph, write_graph};

pub const CONSTRUCT_SCHEMA: &str = "rgspec-construct/1";

#[derive(Debug, Parser)]
#[command(name = "rgspec", version, about = "Edge counts of induced subgraphs of G(n, p)")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a seeded G(n, p) graph file.
    Gen(GenArgs),
    /// Print the edge-count spectrum of every order k of a stored graph.
    Spectrum(SpectrumArgs),
    /// Find a vertex subset inducing exactly e(k) edges.
    Construct(ConstructArgs),
    /// Run a construction campaign over n and seeds.
    Xn(XnArgs),
    /// Estimate the longest full interval of order-k edge counts.
    Mu(MuArgs),
    /// Evaluate probability utilities.
    Probe(ProbeArgs),
}

#[derive(Debug, Args)]
pub struct GenArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long)]
    pub seed: u64,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct SpectrumArgs {
    #[arg(long = "in")]
    pub input: PathBuf,
    /// Orders to report (comma separated); all of 1..=n by default.
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    /// Largest number of subsets enumerated per order.
    #[arg(long, default_value_t = DEFAULT_BUDGET)]
    pub budget: u128,
    /// Sample this many random subsets when an order exceeds the budget.
    #[arg(long, requires = "seed")]
    pub trials: Option<u64>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ConstructArgs {
    /// Read the graph from a file instead of generating one.
    #[arg(long = "in", conflicts_with = "n", required_unless_present = "n")]
    pub input: Option<PathBuf>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    /// Graph seed (with --n) and key of the fallback search.
    #[arg(long)]
    pub seed: u64,
    /// Offset f(k): "zero", "linear:C" or a comma-separated table f(0),f(1),...
    #[arg(long, default_value = "zero")]
    pub f: String,
    #[arg(long)]
    pub fallback_iters: Option<u64>,
    #[arg(long)]
    pub greedy_budget: Option<usize>,
    #[arg(long)]
    pub min_n: Option<usize>,
    /// Exit with status 1 when no exact subset is found.
    #[arg(long)]
    pub strict: bool,
    /// Write the JSON result here.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct CampaignArgs {
    /// JSON experiment config; flags override its fields.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub n: Vec<usize>,
    #[arg(long)]
    pub p: Option<f64>,
    /// Base seed (required unless the config supplies one).
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub threads: Option<usize>,
    /// Record wall-clock times (output is then not reproducible).
    #[arg(long)]
    pub timing: bool,
    /// CSV output; the summary goes to the same path with extension .summary.json.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct XnArgs {
    #[command(flatten)]
    pub common: CampaignArgs,
    #[arg(long)]
    pub fallback_iters: Option<u64>,
    #[arg(long)]
    pub f: Option<String>,
    /// Exit with status 1 when any trial ends with a nonzero residual.
    #[arg(long)]
    pub strict: bool,
}

#[derive(Debug, Args)]
pub struct MuArgs {
    #[command(flatten)]
    pub common: CampaignArgs,
    /// Single stored graph instead of a campaign.
    #[arg(long = "in", conflicts_with_all = ["config", "n", "trials"])]
    pub input: Option<PathBuf>,
    #[arg(long, value_delimiter = ',')]
    pub k: Vec<usize>,
    #[arg(long)]
    pub slack: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ProbeArgs {
    /// Standard normal CDF at x.
    #[arg(long, allow_hyphen_values = true)]
    pub phi: Option<f64>,
    /// Mills-ratio tail approximation at x > 0.
    #[arg(long)]
    pub mills: Option<f64>,
    /// ln C(n, k) (needs --n and --k).
    #[arg(long)]
    pub log_binom: bool,
    /// Interval scale m(k) (needs --n and --k).
    #[arg(long)]
    pub m_of_k: bool,
    /// Upper prediction 3√p m(k) (needs --n, --k).
    #[arg(long)]
    pub bound: bool,
    /// Maximum-degree bound (needs --n).
    #[arg(long)]
    pub maxdeg: bool,
    /// P[Bin(n, p) = k].
    #[arg(long)]
    pub binom_point: bool,
    /// P[Bin(n, p) <= k].
    #[arg(long)]
    pub binom_cdf: bool,
    #[arg(long)]
    pub n: Option<u64>,
    #[arg(long, allow_hyphen_values = true)]
    pub k: Option<i64>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = DEFAULT_EPS)]
    pub eps: f64,
}

/// Errors caused by the invocation rather than the data.
#[derive(Debug, thiserror::Error)]
#[error("{0}")]
pub struct UsageError(pub String);

fn usage(msg: impl Into<String>) -> anyhow::Error {
    UsageError(msg.into()).into()
}

fn exit_code(e: &anyhow::Error) -> i32 {
    for cause in e.chain() {
        if cause.is::<UsageError>() {
            return 2;
        }
        if let Some(rgspec_core::Error::Parameter(_)) = cause.downcast_ref() {
            return 2;
        }
    }
    1
}

/// Parses `args` (including the program name) and runs the command.
pub fn run<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(err, "{text}");
            } else {
                let _ = write!(out, "{text}");
            }
            return e.exit_code();
        }
    };
    match dispatch(cli.command, out) {
        Ok(code) => code,
        Err(e) => {
            let _ = writeln!(err, "error: {e:#}");
            exit_code(&e)
        }
    }
}

pub fn dispatch(cmd: Command, out: &mut dyn Write) -> Result<i32> {
    match cmd {
        Command::Gen(a) => gen(a, out),
        Command::Spectrum(a) => spectrum(a, out),
        Command::Construct(a) => construct(a, out),
        Command::Xn(a) => xn(a, out),
        Command::Mu(a) => mu(a, out),
        Command::Probe(a) => probe(a, out),
    }
}

fn gen(a: GenArgs, out: &mut dyn Write) -> Result<i32> {
    let g = Graph::gnp(a.n, a.p, a.seed)?;
    write_graph(&a.out, &g)?;
    writeln!(out, "n={} m={}", g.n(), g.edge_count())?;
    Ok(0)
}

fn spectrum_line(s: &Spectrum) -> String {
    let opt = |v: Option<u64>| v.map(|x| x.to_string()).unwrap_or_default();
    format!(
        "{},{},{},{},{}",
        s.k,
        opt(s.min()),
        opt(s.max()),
        s.mu,
        s.counts.len()
    )
}

fn spectrum(a: SpectrumArgs, out: &mut dyn Write) -> Result<i32> {
    let g = read_graph(&a.input)?;
    let n = g.n();
    let ks = if a.k.is_empty() {
        (1..=n).collect()
    } else {
        a.k.clone()
    };
    let mut text = String::new();
    for k in ks {
        let s = match exact_spectrum(&g, k, a.budget) {
            Err(rgspec_core::Error::BudgetExceeded { .. }) if a.trials.is_some() => {
                let seed = a.seed.expect("enforced by clap");
                sampled_spectrum(&g, k, a.trials.unwrap(), seed)?
            }
            r => r?,
        };
        text.push_str(&spectrum_line(&s));
        text.push('\n');
    }
    out.write_all(text.as_bytes())?;
    if let Some(path) = &a.out {
        fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(0)
}

/// Parses an offset description: `zero`, `linear:C`, or `f0,f1,...`.
pub fn parse_offset(spec: &str) -> Result<TargetSpec> {
    let spec = spec.trim();
    if spec == "zero" {
        return Ok(TargetSpec::default());
    }
    if let Some(c) = spec.strip_prefix("linear:") {
        let c: i64 = c
            .parse()
            .map_err(|_| usage(format!("bad slope in offset {spec:?}")))?;
        return Ok(TargetSpec {
            offset: Offset::Linear(c),
            q_bound: c.unsigned_abs() as f64,
        });
    }
    let table: Vec<i64> = spec
        .split(',')
        .map(|s| s.trim().parse())
        .collect::<Result<_, _>>()
        .map_err(|_| usage(format!("offset {spec:?} is not zero, linear:C or an integer list")))?;
    let q_bound = table
        .iter()
        .enumerate()
        .skip(1)
        .map(|(k, f)| f.unsigned_abs() as f64 / k as f64)
        .fold(0.0, f64::max);
    Ok(TargetSpec {
        offset: Offset::Table(table),
        q_bound,
    })
}

fn one_based(s: &VertexSet) -> Vec<usize> {
    s.iter().map(|v| v + 1).collect()
}

#[derive(Debug, Serialize)]
struct ConstructEcho {
    source: String,
    n: usize,
    p: f64,
    seed: u64,
    f: String,
    construct: ConstructConfig,
}

#[derive(Debug, Serialize)]
struct ConstructReport {
    schema: &'static str,
    config: ConstructEcho,
    subset_size: usize,
    achieved: u64,
    target: i64,
    success: bool,
    residual: i64,
    path: &'static str,
    complemented: bool,
    failure: Option<&'static str>,
    fallback_moves: u64,
    stages: Vec<StageRecord>,
    subset: Vec<usize>,
    removed: Vec<usize>,
    stage1_swap: Vec<usize>,
    stage2_triple: Vec<usize>,
}

fn construct(a: ConstructArgs, out: &mut dyn Write) -> Result<i32> {
    let (g, source) = match (&a.input, a.n) {
        (Some(path), _) => (read_graph(path)?, path.display().to_string()),
        (None, Some(n)) => (Graph::gnp(n, a.p, a.seed)?, "gnp".to_string()),
        (None, None) => bail!(usage("one of --in or --n is required")),
    };
    let spec = parse_offset(&a.f)?;
    let target = EdgeTarget::new(a.p, spec.offset, spec.q_bound)?;
    let mut cc = ConstructConfig {
        seed: a.seed,
        ..ConstructConfig::default()
    };
    if let Some(it) = a.fallback_iters {
        cc.fallback_iters = it;
    }
    if let Some(b) = a.greedy_budget {
        cc.greedy_budget = Some(b);
    }
    if let Some(m) = a.min_n {
        cc.min_n = m;
    }
    let r = construct_exact(&g, &target, &cc)?;
    writeln!(
        out,
        "subset_size={} achieved={} target={} success={} path={}",
        r.subset.len(),
        r.achieved_edges,
        r.target_edges,
        r.success,
        r.path.as_str()
    )?;
    if let Some(path) = &a.out {
        let report = ConstructReport {
            schema: CONSTRUCT_SCHEMA,
            config: ConstructEcho {
                source,
                n: g.n(),
                p: a.p,
                seed: a.seed,
                f: a.f.clone(),
                construct: cc,
            },
            subset_size: r.subset.len(),
            achieved: r.achieved_edges,
            target: r.target_edges,
            success: r.success,
            residual: r.residual,
            path: r.path.as_str(),
            complemented: r.complemented,
            failure: r.failure.map(|f| f.as_str()),
            fallback_moves: r.fallback_moves,
            stages: r.stage_trace.clone(),
            subset: one_based(&r.subset),
            removed: one_based(&r.removed),
            stage1_swap: one_based(&r.stage1_swap),
            stage2_triple: one_based(&r.stage2_triple),
        };
        let mut json = serde_json::to_string_pretty(&report)?;
        json.push('\n');
        fs::write(path, json).with_context(|| format!("writing {}", path.display()))?;
    }
    Ok(if a.strict && !r.success { 1 } else { 0 })
}

fn campaign_config(a: &CampaignArgs) -> Result<ExperimentConfig> {
    let mut cfg = match &a.config {
        Some(path) => {
            let text = fs::read_to_string(path)
                .with_context(|| format!("reading {}", path.display()))?;
            ExperimentConfig::from_json(&text)
                .map_err(|e| usage(format!("{}: {e:#}", path.display())))?
        }
        None => {
            let seed = a
                .seed
                .ok_or_else(|| usage("--seed is required (or a config with base_seed)"))?;
            ExperimentConfig::new(seed)
        }
    };
    if let Some(s) = a.seed {
        cfg.base_seed = s;
    }
    if !a.n.is_empty() {
        cfg.n_values = a.n.clone();
    }
    if let Some(p) = a.p {
        cfg.p = p;
    }
    if let Some(t) = a.trials {
        cfg.trials_per_n = t;
    }
    if let Some(t) = a.threads {
        cfg.threads = t;
    }
    if a.timing {
        cfg.timing = true;
    }
    Ok(cfg)
}

fn validated(cfg: ExperimentConfig) -> Result<ExperimentConfig> {
    cfg.validate().map_err(|e| usage(format!("{e:#}")))?;
    Ok(cfg)
}

fn xn(a: XnArgs, out: &mut dyn Write) -> Result<i32> {
    let mut cfg = campaign_config(&a.common)?;
    if let Some(it) = a.fallback_iters {
        cfg.construct.fallback_iters = it;
    }
    if let Some(f) = &a.f {
        cfg.target = parse_offset(f)?;
    }
    let cfg = validated(cfg)?;
    let records = run_xn(&cfg)?;
    let summary = summarize_xn(&records, &cfg);
    writeln!(out, "n,trials,success_rate,pipeline_rate,removed_median,scaled_median")?;
    for g in &summary.groups {
        writeln!(
            out,
            "{},{},{:.3},{:.3},{},{:.3}",
            g.n,
            g.count,
            g.success_rate,
            g.pipeline_success_rate,
            g.removed_median.unwrap_or(f64::NAN),
            g.removed_median.unwrap_or(f64::NAN) / scale(g.n)
        )?;
    }
    if let Some(path) = &a.common.out {
        report_xn(&records, &cfg, path)?;
    }
    let failed = records.iter().any(|r| r.residual != 0);
    Ok(if a.strict && failed { 1 } else { 0 })
}

fn mu_line(r: &crate::experiments::MuRecord) -> String {
    format!("{},{},{},{},{}", r.k, r.mu_lower, r.m_k, r.ratio(), r.method)
}

fn mu(a: MuArgs, out: &mut dyn Write) -> Result<i32> {
    if let Some(path) = &a.input {
        let g = read_graph(path)?;
        let seed = a.common.seed.ok_or_else(|| usage("--seed is required"))?;
        let p = a.common.p.unwrap_or(0.5);
        let mut wc = rgspec_core::walker::WalkerConfig::default();
        if let Some(s) = a.slack {
            wc.slack = s;
        }
        if let Some(e) = a.eps {
            wc.eps = e;
        }
        let ks = if a.k.is_empty() {
            default_k_values(g.n())
        } else {
            a.k.clone()
        };
        if let Some(&bad) = ks.iter().find(|&&k| k == 0 || k >= g.n()) {
            bail!(usage(format!("order {bad} not in 1..{}", g.n())));
        }
        let records = mu_for_graph(&g, p, &ks, &wc, seed)?;
        for r in &records {
            writeln!(out, "{}", mu_line(r))?;
        }
        if let Some(o) = &a.common.out {
            fs::write(o, mu_csv(&records)).with_context(|| format!("writing {}", o.display()))?;
        }
        return Ok(0);
    }
    let mut cfg = campaign_config(&a.common)?;
    if !a.k.is_empty() {
        cfg.k_values = a.k.clone();
    }
    if let Some(s) = a.slack {
        cfg.walker.slack = s;
    }
    if let Some(e) = a.eps {
        cfg.walker.eps = e;
    }
    let cfg = validated(cfg)?;
    let records = run_mu(&cfg)?;
    for r in &records {
        writeln!(out, "{}", mu_line(r))?;
    }
    if let Some(path) = &a.common.out {
        report_mu(&records, &cfg, path)?;
    }
    Ok(0)
}

fn need<T: Copy>(v: Option<T>, flag: &str, what: &str) -> Result<T> {
    v.ok_or_else(|| usage(format!("{what} needs {flag}")))
}

fn probe(a: ProbeArgs, out: &mut dyn Write) -> Result<i32> {
    let mut values = Vec::new();
    if let Some(x) = a.phi {
        values.push(phi(x));
    }
    if let Some(x) = a.mills {
        values.push(mills_tail(x)?);
    }
    let nk = |what: &str| -> Result<(u64, i64)> {
        Ok((need(a.n, "--n", what)?, need(a.k, "--k", what)?))
    };
    let unsigned = |k: i64| -> Result<u64> {
        u64::try_from(k).map_err(|_| usage(format!("--k {k} must be non-negative")))
    };
    if a.log_binom {
        let (n, k) = nk("--log-binom")?;
        values.push(log_binom(n, unsigned(k)?)?);
    }
    if a.m_of_k {
        let (n, k) = nk("--m-of-k")?;
        values.push(m_of_k(n, unsigned(k)?, a.eps)?);
    }
    if a.bound {
        let (n, k) = nk("--bound")?;
        values.push(chernoff_interval_bound(n, unsigned(k)?, a.p)?);
    }
    if a.maxdeg {
        values.push(maxdeg_bound(need(a.n, "--n", "--maxdeg")?, a.p)?);
    }
    if a.binom_point {
        let (n, k) = nk("--binom-point")?;
        values.push(binom_point(n, a.p, k)?);
    }
    if a.binom_cdf {
        let (n, k) = nk("--binom-cdf")?;
        values.push(binom_cdf(n, a.p, k)?);
    }
    if values.is_empty() {
        return Err(anyhow!(usage("probe needs at least one quantity flag")));
    }
    for v in values {
        writeln!(out, "{v}")?;
    }
    Ok(0)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn offsets_parse() {
        assert_eq!(parse_offset("zero").unwrap(), TargetSpec::default());
        let l = parse_offset("linear:-2").unwrap();
        assert_eq!(l.offset, Offset::Linear(-2));
        assert_eq!(l.q_bound, 2.0);
        let t = parse_offset("0,0,1,-3").unwrap();
        assert_eq!(t.offset, Offset::Table(vec![0, 0, 1, -3]));
        assert_eq!(t.q_bound, 1.0);
        assert!(parse_offset("linear:x").is_err());
        assert!(parse_offset("1,,2").is_err());
    }

    #[test]
    fn usage_errors_map_to_two() {
        let e = usage("x");
        assert_eq!(exit_code(&e), 2);
        let e: anyhow::Error = rgspec_core::Error::Parameter("p".into()).into();
        assert_eq!(exit_code(&e), 2);
        assert_eq!(exit_code(&anyhow!("io")), 1);
    }
}
