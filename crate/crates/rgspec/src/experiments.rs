//! Seeded Monte Carlo campaigns over `G(n, p)`.
//!
//! Every trial is keyed by `trial_seed(base_seed, n, index)`; the graph is
//! generated from that key and every randomized step inside the trial uses a
//! key derived from it. Results are collected in `(n, index)` order, so the
//! worker count never changes the output.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{bail, ensure, Context, Result};
use rayon::prelude::*;
use rgspec_core::constructor::{construct_exact, ConstructConfig};
use rgspec_core::prob::{chernoff_interval_bound, m_of_k};
use rgspec_core::rng::{derive_key, PRNG_VERSION};
use rgspec_core::walker::{mu_lower_bound, WalkerConfig};
use rgspec_core::{choose2, EdgeTarget, Graph, Offset};
use serde::{Deserialize, Serialize};

use crate::stats::{fit_power_law, mean, median, pearson, quantile, PowerFit};

pub const CONFIG_SCHEMA: &str = "rgspec-config/1";
pub const SUMMARY_SCHEMA: &str = "rgspec-summary/1";
pub const XN_HEADER: &str =
    "n,seed,edge_excess,pipeline_success,fallback_used,removed_count,residual,wall_time_ms";
pub const MU_HEADER: &str = "n,k,seed,mu_lower,m_k,bound_upper,method";

/// Key of trial `index` at order `n`.
pub fn trial_seed(base_seed: u64, n: usize, index: usize) -> u64 {
    derive_key(base_seed, n as u64, index as u64)
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TargetSpec {
    pub offset: Offset,
    pub q_bound: f64,
}

impl Default for TargetSpec {
    fn default() -> Self {
        TargetSpec {
            offset: Offset::Zero,
            q_bound: 0.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub schema: String,
    pub base_seed: u64,
    #[serde(default = "default_n_values")]
    pub n_values: Vec<usize>,
    #[serde(default = "default_p")]
    pub p: f64,
    #[serde(default = "default_trials")]
    pub trials_per_n: usize,
    #[serde(default)]
    pub target: TargetSpec,
    #[serde(default)]
    pub construct: ConstructConfig,
    #[serde(default)]
    pub walker: WalkerConfig,
    /// Orders for `run_mu`. Empty selects [`default_k_values`].
    #[serde(default)]
    pub k_values: Vec<usize>,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Record wall-clock time. Off by default since it makes output
    /// non-reproducible.
    #[serde(default)]
    pub timing: bool,
}

fn default_n_values() -> Vec<usize> {
    vec![250, 500, 1000, 2000, 4000]
}

fn default_p() -> f64 {
    0.5
}

fn default_trials() -> usize {
    200
}

fn default_threads() -> usize {
    1
}

impl ExperimentConfig {
    pub fn new(base_seed: u64) -> Self {
        ExperimentConfig {
            schema: CONFIG_SCHEMA.to_string(),
            base_seed,
            n_values: default_n_values(),
            p: default_p(),
            trials_per_n: default_trials(),
            target: TargetSpec::default(),
            construct: ConstructConfig::default(),
            walker: WalkerConfig::default(),
            k_values: Vec::new(),
            threads: default_threads(),
            timing: false,
        }
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let c: ExperimentConfig = serde_json::from_str(text).context("parsing config")?;
        c.validate()?;
        Ok(c)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text =
            fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        Self::from_json(&text).with_context(|| format!("in {}", path.display()))
    }

    pub fn validate(&self) -> Result<()> {
        ensure!(
            self.schema == CONFIG_SCHEMA,
            "config schema {:?} is not {CONFIG_SCHEMA:?}",
            self.schema
        );
        ensure!(!self.n_values.is_empty(), "n_values is empty");
        ensure!(
            self.n_values.windows(2).all(|w| w[0] < w[1]),
            "n_values must be strictly increasing"
        );
        ensure!(self.n_values[0] >= 1, "n_values must be positive");
        ensure!(self.trials_per_n >= 1, "trials_per_n must be at least 1");
        ensure!(self.threads >= 1, "threads must be at least 1");
        self.edge_target()?;
        Ok(())
    }

    pub fn edge_target(&self) -> Result<EdgeTarget> {
        Ok(EdgeTarget::new(
            self.p,
            self.target.offset.clone(),
            self.target.q_bound,
        )?)
    }

    fn pool(&self) -> Result<rayon::ThreadPool> {
        rayon::ThreadPoolBuilder::new()
            .num_threads(self.threads)
            .build()
            .context("building worker pool")
    }

    fn jobs(&self) -> Vec<(usize, usize)> {
        self.n_values
            .iter()
            .flat_map(|&n| (0..self.trials_per_n).map(move |i| (n, i)))
            .collect()
    }
}

/// Orders sampled when none are configured: a few tiny orders, quarters of
/// `n`, and the two largest proper orders.
pub fn default_k_values(n: usize) -> Vec<usize> {
    let mut ks: Vec<usize> = [1, 2, 3, 4, n / 4, n / 2, 3 * n / 4, n.saturating_sub(2), n.saturating_sub(1)]
        .into_iter()
        .filter(|&k| k >= 1 && k < n)
        .collect();
    ks.sort_unstable();
    ks.dedup();
    ks
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub n: usize,
    pub seed: u64,
    /// `e(G) - round(p C(n, 2))`.
    pub edge_excess: i64,
    pub pipeline_success: bool,
    pub fallback_used: bool,
    pub removed_count: usize,
    pub residual: i64,
    pub wall_time_ms: u64,
}

fn xn_trial(cfg: &ExperimentConfig, target: &EdgeTarget, n: usize, index: usize) -> Result<TrialRecord> {
    let start = Instant::now();
    let seed = trial_seed(cfg.base_seed, n, index);
    let g = Graph::gnp(n, cfg.p, seed)?;
    let mut cc = cfg.construct.clone();
    cc.seed = derive_key(seed, 1, 0);
    let r = construct_exact(&g, target, &cc)?;
    let recount = g.induced_edges(&r.subset)? as i64 - target.value(r.subset.len() as u64);
    ensure!(
        recount == r.residual,
        "n={n} seed={seed}: residual {} does not match recount {recount}",
        r.residual
    );
    let base = (cfg.p * choose2(n as u64) as f64).round_ties_even() as i64;
    Ok(TrialRecord {
        n,
        seed,
        edge_excess: g.edge_count() as i64 - base,
        pipeline_success: r.pipeline_success(),
        fallback_used: r.fallback_used(),
        removed_count: n - r.subset.len(),
        residual: recount,
        wall_time_ms: if cfg.timing {
            start.elapsed().as_millis() as u64
        } else {
            0
        },
    })
}

/// One construction per `(n, trial)`.
pub fn run_xn(cfg: &ExperimentConfig) -> Result<Vec<TrialRecord>> {
    cfg.validate()?;
    let target = cfg.edge_target()?;
    let jobs = cfg.jobs();
    cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(n, i)| xn_trial(cfg, &target, n, i))
            .collect()
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuRecord {
    pub n: usize,
    pub k: usize,
    pub seed: u64,
    pub mu_lower: u64,
    pub m_k: f64,
    pub bound_upper: f64,
    pub method: String,
}

impl MuRecord {
    pub fn ratio(&self) -> f64 {
        self.mu_lower as f64 / self.m_k
    }
}

/// Interval-length estimates for one graph at the given orders.
pub fn mu_for_graph(
    g: &Graph,
    p: f64,
    ks: &[usize],
    walker: &WalkerConfig,
    seed: u64,
) -> Result<Vec<MuRecord>> {
    let n = g.n();
    ks.iter()
        .map(|&k| {
            ensure!(k >= 1 && k < n, "order {k} not in 1..{n}");
            let mut wc = walker.clone();
            wc.seed = derive_key(seed, 2, k as u64);
            let est = mu_lower_bound(g, k, p, &wc)?;
            Ok(MuRecord {
                n,
                k,
                seed,
                mu_lower: est.mu_lower,
                m_k: m_of_k(n as u64, k as u64, walker.eps)?,
                bound_upper: chernoff_interval_bound(n as u64, k as u64, p)?,
                method: est.method.as_str().to_string(),
            })
        })
        .collect()
}

/// Lower bounds on `μ(k)` with the upper prediction, per `(n, trial, k)`.
pub fn run_mu(cfg: &ExperimentConfig) -> Result<Vec<MuRecord>> {
    cfg.validate()?;
    let jobs = cfg.jobs();
    let per_trial: Result<Vec<Vec<MuRecord>>> = cfg.pool()?.install(|| {
        jobs.par_iter()
            .map(|&(n, i)| {
                let seed = trial_seed(cfg.base_seed, n, i);
                let g = Graph::gnp(n, cfg.p, seed)?;
                let ks = if cfg.k_values.is_empty() {
                    default_k_values(n)
                } else {
                    cfg.k_values.iter().copied().filter(|&k| k < n).collect()
                };
                mu_for_graph(&g, cfg.p, &ks, &cfg.walker, seed)
            })
            .collect()
    });
    Ok(per_trial?.into_iter().flatten().collect())
}

pub fn xn_csv(records: &[TrialRecord]) -> String {
    let mut s = String::from(XN_HEADER);
    s.push('\n');
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{},{},{}",
            r.n,
            r.seed,
            r.edge_excess,
            r.pipeline_success,
            r.fallback_used,
            r.removed_count,
            r.residual,
            r.wall_time_ms
        )
        .unwrap();
    }
    s
}

pub fn mu_csv(records: &[MuRecord]) -> String {
    let mut s = String::from(MU_HEADER);
    s.push('\n');
    for r in records {
        writeln!(
            s,
            "{},{},{},{},{},{},{}",
            r.n, r.k, r.seed, r.mu_lower, r.m_k, r.bound_upper, r.method
        )
        .unwrap();
    }
    s
}

fn fields<'a>(line: &'a str, want: usize, row: usize) -> Result<Vec<&'a str>> {
    let f: Vec<&str> = line.split(',').collect();
    if f.len() != want {
        bail!("row {row}: expected {want} fields, found {}", f.len());
    }
    Ok(f)
}

fn body<'a>(text: &'a str, header: &str) -> Result<impl Iterator<Item = (usize, &'a str)>> {
    let mut lines = text.lines();
    match lines.next() {
        Some(h) if h == header => {}
        other => bail!("unexpected header {other:?}"),
    }
    Ok(lines.enumerate().map(|(i, l)| (i + 2, l)))
}

pub fn parse_xn_csv(text: &str) -> Result<Vec<TrialRecord>> {
    body(text, XN_HEADER)?
        .map(|(row, line)| {
            let f = fields(line, 8, row)?;
            let ctx = || format!("row {row}");
            Ok(TrialRecord {
                n: f[0].parse().with_context(ctx)?,
                seed: f[1].parse().with_context(ctx)?,
                edge_excess: f[2].parse().with_context(ctx)?,
                pipeline_success: f[3].parse().with_context(ctx)?,
                fallback_used: f[4].parse().with_context(ctx)?,
                removed_count: f[5].parse().with_context(ctx)?,
                residual: f[6].parse().with_context(ctx)?,
                wall_time_ms: f[7].parse().with_context(ctx)?,
            })
        })
        .collect()
}

pub fn parse_mu_csv(text: &str) -> Result<Vec<MuRecord>> {
    body(text, MU_HEADER)?
        .map(|(row, line)| {
            let f = fields(line, 7, row)?;
            let ctx = || format!("row {row}");
            Ok(MuRecord {
                n: f[0].parse().with_context(ctx)?,
                k: f[1].parse().with_context(ctx)?,
                seed: f[2].parse().with_context(ctx)?,
                mu_lower: f[3].parse().with_context(ctx)?,
                m_k: f[4].parse().with_context(ctx)?,
                bound_upper: f[5].parse().with_context(ctx)?,
                method: f[6].to_string(),
            })
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XnGroup {
    pub n: usize,
    pub count: usize,
    pub success_rate: f64,
    pub pipeline_success_rate: f64,
    pub removed_median: Option<f64>,
    pub removed_q1: Option<f64>,
    pub removed_q3: Option<f64>,
    /// Median removals in units of `√(n / ln n)`.
    pub removed_median_scaled: Option<f64>,
    pub excess_removed_pearson: Option<f64>,
    pub abs_excess_removed_pearson: Option<f64>,
    /// Mean removals in the top `edge_excess` quartile minus the bottom one.
    pub quartile_gap: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct XnSummary {
    pub schema: String,
    pub kind: String,
    pub prng_version: String,
    pub count: usize,
    pub groups: Vec<XnGroup>,
    /// Median removals against `n`.
    pub fit_removed_vs_n: Option<PowerFit>,
    pub config: ExperimentConfig,
}

pub fn scale(n: usize) -> f64 {
    let nf = n as f64;
    (nf / nf.ln()).sqrt()
}

/// Mean `y` of the records whose `x` falls in the lowest and the highest
/// quarter (by rank; ties broken by position).
pub fn quartile_gap(xs: &[f64], ys: &[f64]) -> Option<f64> {
    let q = xs.len() / 4;
    if q == 0 || xs.len() != ys.len() {
        return None;
    }
    let mut idx: Vec<usize> = (0..xs.len()).collect();
    idx.sort_by(|&a, &b| xs[a].total_cmp(&xs[b]));
    let lo: Vec<f64> = idx[..q].iter().map(|&i| ys[i]).collect();
    let hi: Vec<f64> = idx[idx.len() - q..].iter().map(|&i| ys[i]).collect();
    Some(mean(&hi)? - mean(&lo)?)
}

fn distinct_ns<T>(records: &[T], n: impl Fn(&T) -> usize) -> Vec<usize> {
    let mut ns: Vec<usize> = records.iter().map(n).collect();
    ns.sort_unstable();
    ns.dedup();
    ns
}

pub fn summarize_xn(records: &[TrialRecord], config: &ExperimentConfig) -> XnSummary {
    let groups: Vec<XnGroup> = distinct_ns(records, |r| r.n)
        .into_iter()
        .map(|n| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.n == n).collect();
            let count = rs.len() as f64;
            let removed: Vec<f64> = rs.iter().map(|r| r.removed_count as f64).collect();
            let excess: Vec<f64> = rs.iter().map(|r| r.edge_excess as f64).collect();
            let abs_excess: Vec<f64> = excess.iter().map(|e| e.abs()).collect();
            let med = median(&removed);
            XnGroup {
                n,
                count: rs.len(),
                success_rate: rs.iter().filter(|r| r.residual == 0).count() as f64 / count,
                pipeline_success_rate: rs.iter().filter(|r| r.pipeline_success).count() as f64
                    / count,
                removed_median: med,
                removed_q1: quantile(&removed, 0.25),
                removed_q3: quantile(&removed, 0.75),
                removed_median_scaled: med.map(|m| m / scale(n)),
                excess_removed_pearson: pearson(&excess, &removed),
                abs_excess_removed_pearson: pearson(&abs_excess, &removed),
                quartile_gap: quartile_gap(&excess, &removed),
            }
        })
        .collect();
    let pts: Vec<(f64, f64)> = groups
        .iter()
        .filter_map(|g| Some((g.n as f64, g.removed_median?)))
        .collect();
    XnSummary {
        schema: SUMMARY_SCHEMA.to_string(),
        kind: "xn".to_string(),
        prng_version: PRNG_VERSION.to_string(),
        count: records.len(),
        fit_removed_vs_n: fit_power_law(&pts),
        groups,
        config: config.clone(),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuGroup {
    pub n: usize,
    pub k: usize,
    pub count: usize,
    pub mu_lower_median: Option<f64>,
    pub ratio_median: Option<f64>,
    pub ratio_min: Option<f64>,
    pub ratio_max: Option<f64>,
    /// Fraction of records with `mu_lower <= bound_upper`.
    pub below_bound_rate: f64,
    pub methods: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MuSummary {
    pub schema: String,
    pub kind: String,
    pub prng_version: String,
    pub count: usize,
    pub groups: Vec<MuGroup>,
    pub config: ExperimentConfig,
}

pub fn summarize_mu(records: &[MuRecord], config: &ExperimentConfig) -> MuSummary {
    let mut keys: Vec<(usize, usize)> = records.iter().map(|r| (r.n, r.k)).collect();
    keys.sort_unstable();
    keys.dedup();
    let groups = keys
        .into_iter()
        .map(|(n, k)| {
            let rs: Vec<&MuRecord> = records.iter().filter(|r| r.n == n && r.k == k).collect();
            let mus: Vec<f64> = rs.iter().map(|r| r.mu_lower as f64).collect();
            let ratios: Vec<f64> = rs.iter().map(|r| r.ratio()).collect();
            let mut methods: Vec<String> = rs.iter().map(|r| r.method.clone()).collect();
            methods.sort();
            methods.dedup();
            MuGroup {
                n,
                k,
                count: rs.len(),
                mu_lower_median: median(&mus),
                ratio_median: median(&ratios),
                ratio_min: quantile(&ratios, 0.0),
                ratio_max: quantile(&ratios, 1.0),
                below_bound_rate: rs
                    .iter()
                    .filter(|r| r.mu_lower as f64 <= r.bound_upper)
                    .count() as f64
                    / rs.len() as f64,
                methods,
            }
        })
        .collect();
    MuSummary {
        schema: SUMMARY_SCHEMA.to_string(),
        kind: "mu".to_string(),
        prng_version: PRNG_VERSION.to_string(),
        count: records.len(),
        groups,
        config: config.clone(),
    }
}

/// `results.csv` -> `results.summary.json`.
pub fn summary_path(csv: &Path) -> PathBuf {
    csv.with_extension("summary.json")
}

fn write_pair(csv_path: &Path, csv: &str, summary: &impl Serialize) -> Result<()> {
    fs::write(csv_path, csv).with_context(|| format!("writing {}", csv_path.display()))?;
    let sp = summary_path(csv_path);
    let mut json = serde_json::to_string_pretty(summary)?;
    json.push('\n');
    fs::write(&sp, json).with_context(|| format!("writing {}", sp.display()))?;
    Ok(())
}

/// Writes the CSV and its JSON summary next to it.
pub fn report_xn(records: &[TrialRecord], config: &ExperimentConfig, path: &Path) -> Result<()> {
    write_pair(path, &xn_csv(records), &summarize_xn(records, config))
}

pub fn report_mu(records: &[MuRecord], config: &ExperimentConfig, path: &Path) -> Result<()> {
    write_pair(path, &mu_csv(records), &summarize_mu(records, config))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_round_trips_through_json() {
        let mut c = ExperimentConfig::new(7);
        c.n_values = vec![64, 128];
        c.target.offset = Offset::Linear(-1);
        c.target.q_bound = 1.0;
        let text = serde_json::to_string(&c).unwrap();
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn config_rejects_bad_input() {
        let bad = [
            r#"{"schema":"rgspec-config/1"}"#,
            r#"{"schema":"rgspec-config/2","base_seed":1}"#,
            r#"{"schema":"rgspec-config/1","base_seed":1,"bogus":3}"#,
            r#"{"schema":"rgspec-config/1","base_seed":1,"n_values":[100,50]}"#,
            r#"{"schema":"rgspec-config/1","base_seed":1,"trials_per_n":0}"#,
            r#"{"schema":"rgspec-config/1","base_seed":1,"p":1.5}"#,
        ];
        for b in bad {
            assert!(ExperimentConfig::from_json(b).is_err(), "{b}");
        }
        let ok = ExperimentConfig::from_json(r#"{"schema":"rgspec-config/1","base_seed":1}"#)
            .unwrap();
        assert_eq!(ok.n_values, [250, 500, 1000, 2000, 4000]);
        assert_eq!(ok.trials_per_n, 200);
    }

    #[test]
    fn csv_round_trip() {
        let recs = vec![TrialRecord {
            n: 100,
            seed: 5,
            edge_excess: -12,
            pipeline_success: false,
            fallback_used: true,
            removed_count: 9,
            residual: 0,
            wall_time_ms: 0,
        }];
        assert_eq!(parse_xn_csv(&xn_csv(&recs)).unwrap(), recs);
        assert_eq!(xn_csv(&[]), format!("{XN_HEADER}\n"));
        let mu = vec![MuRecord {
            n: 10,
            k: 5,
            seed: 1,
            mu_lower: 7,
            m_k: 12.345678901234567,
            bound_upper: 0.1 + 0.2,
            method: "exact".into(),
        }];
        assert_eq!(parse_mu_csv(&mu_csv(&mu)).unwrap(), mu);
    }

    #[test]
    fn quartile_gap_examples() {
        let xs = [1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0];
        let ys = [0.0, 2.0, 5.0, 5.0, 5.0, 5.0, 10.0, 12.0];
        assert_eq!(quartile_gap(&xs, &ys), Some(10.0));
        assert_eq!(quartile_gap(&xs[..3], &ys[..3]), None);
    }

    #[test]
    fn default_orders_are_proper() {
        assert_eq!(default_k_values(12), [1, 2, 3, 4, 6, 9, 10, 11]);
        assert!(default_k_values(2).iter().all(|&k| k == 1));
    }
}
