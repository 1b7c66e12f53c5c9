//! Chains of equal-size vertex subsets whose edge counts sweep long runs of
//! consecutive integers, giving certified lower bounds on the longest full
//! interval `μ(k)` of the order-`k` spectrum.
//!
//! Every bound reported here is backed by explicit subsets: the values are
//! recounted from the graph, never inferred from probabilistic estimates.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use libm::{ceil, floor, log, pow, sqrt};

use crate::choose2;
use crate::cursor::SubgraphCursor;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::prob::DEFAULT_EPS;
use crate::spectrum::{binomial, exact_spectrum, longest_interval, longest_run, sampled_spectrum};

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct WalkerConfig {
    /// Orders `k >= eps * n` use the removal chain.
    pub eps: f64,
    /// Multiplier applied to the asymptotic windows and step bounds.
    pub slack: f64,
    /// Exhaustive enumeration is used when `C(n, k)` is at most this.
    pub exact_budget: u128,
    pub sample_trials: u64,
    pub seed: u64,
}

impl Default for WalkerConfig {
    fn default() -> Self {
        WalkerConfig {
            eps: DEFAULT_EPS,
            slack: 2.0,
            exact_budget: 1_000_000,
            sample_trials: 10_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalkStep {
    pub set: VertexSet,
    /// Induced edges for removal chains, `δ(U)` for degree walks.
    pub value: i64,
}

#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct WalkChain {
    /// Size of every set in the chain.
    pub k: usize,
    pub steps: Vec<WalkStep>,
    pub max_step_gap: u64,
}

impl WalkChain {
    fn new(k: usize, steps: Vec<WalkStep>) -> Self {
        let max_step_gap = steps
            .windows(2)
            .map(|w| w[0].value.abs_diff(w[1].value))
            .max()
            .unwrap_or(0);
        WalkChain {
            k,
            steps,
            max_step_gap,
        }
    }

    /// Moves made (the first entry is the starting set).
    pub fn moves(&self) -> usize {
        self.steps.len().saturating_sub(1)
    }
}

fn check_p(p: f64) -> Result<()> {
    if p > 0.0 && p < 1.0 {
        Ok(())
    } else {
        Err(Error::param(format!("probability {p} not in (0, 1)")))
    }
}

/// Output of [`removal_chain`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct RemovalChain {
    pub chain: WalkChain,
    /// High-degree vertices taken out of the top block, in order.
    pub removed: Vec<usize>,
    /// Low-id vertices brought in, in order.
    pub added: Vec<usize>,
    pub min_steps: usize,
    pub max_steps: usize,
    pub success: bool,
    pub failure: Option<String>,
    /// Acceptance window for the neighbor count of an added vertex.
    pub window: (f64, f64),
    /// Per-move decrease bound `(√2 + √6) √(ñ p (1 - p) ln ñ)`.
    pub step_bound: f64,
    /// Moves whose decrease is within `step_bound`.
    pub strict_ok: usize,
    /// Moves whose decrease is within `slack * step_bound`.
    pub slack_ok: usize,
}

/// Sets of size `ñ = k + 14`: start from the top `ñ` ids, then at each move
/// drop the next highest-degree vertex of that block and bring in the
/// smallest-id vertex of the first third of the low ids whose neighbor count
/// into the current set lies in `[(ñ-1)p - slack √(2ñp(1-p) ln ñ), (ñ-1)p]`.
pub fn removal_chain(g: &Graph, k: usize, p: f64, config: &WalkerConfig) -> Result<RemovalChain> {
    check_p(p)?;
    let n = g.n();
    if k == 0 || k + 17 > n {
        return Err(Error::param(format!(
            "removal chain needs 1 <= k <= n - 17, got n = {n}, k = {k}"
        )));
    }
    let nt = k + 14;
    let low = n - nt;
    let v1_len = low.div_ceil(3);
    let main = VertexSet::range(low, n);
    let main_bits = main.to_bits(n)?;
    let mut order: Vec<(u32, usize)> = main
        .iter()
        .map(|v| (g.deg_into(v, &main_bits), v))
        .collect();
    order.sort_by(|a, b| b.0.cmp(&a.0).then(a.1.cmp(&b.1)));

    let ntf = nt as f64;
    let sd = sqrt(ntf * p * (1.0 - p));
    let hi = (ntf - 1.0) * p;
    let lo = hi - config.slack * sqrt(2.0 * ntf * p * (1.0 - p) * log(ntf));
    let step_bound = (sqrt(2.0) + sqrt(6.0)) * sd * sqrt(log(ntf));
    let spread = (n - k) as f64 * config.eps;
    let max_steps = (ceil(spread / 5.0) as usize).min(v1_len);
    let min_steps = ceil(spread / 15.0) as usize;

    let mut cursor = SubgraphCursor::new(g, &main)?;
    let mut steps = vec![WalkStep {
        set: main,
        value: cursor.edges() as i64,
    }];
    let mut removed = Vec::new();
    let mut added = Vec::new();
    let mut failure = None;
    let mut in_v1 = vec![false; v1_len];
    for i in 0..max_steps {
        let v = order[i].1;
        cursor.remove(v)?;
        let pick = (0..v1_len).find(|&u| {
            let d = cursor.deg_to_selected(u) as f64;
            !in_v1[u] && d >= lo && d <= hi
        });
        match pick {
            Some(u) => {
                cursor.add(u)?;
                in_v1[u] = true;
                removed.push(v);
                added.push(u);
                steps.push(WalkStep {
                    set: cursor.selected(),
                    value: cursor.edges() as i64,
                });
            }
            None => {
                failure = Some(format!("no vertex in the window at move {}", i + 1));
                break;
            }
        }
    }
    let mut strict_ok = 0;
    let mut slack_ok = 0;
    for w in steps.windows(2) {
        let drop = (w[0].value - w[1].value) as f64;
        strict_ok += (drop <= step_bound) as usize;
        slack_ok += (drop <= config.slack * step_bound) as usize;
    }
    let chain = WalkChain::new(nt, steps);
    let success = chain.moves() >= min_steps;
    if !success && failure.is_none() {
        failure = Some(format!(
            "only {} moves available, {min_steps} needed",
            chain.moves()
        ));
    }
    Ok(RemovalChain {
        chain,
        removed,
        added,
        min_steps,
        max_steps,
        success,
        failure,
        window: (lo, hi),
        step_bound,
        strict_ok,
        slack_ok,
    })
}

/// Looks up single swaps `a -> b` that move a set's edge count to a given
/// value, using buckets of outside vertices keyed by their neighbor count
/// into the set.
struct SwapIndex<'g> {
    cursor: SubgraphCursor<'g>,
    members: Vec<usize>,
    buckets: Vec<Vec<usize>>,
}

impl<'g> SwapIndex<'g> {
    fn new(g: &'g Graph, set: &VertexSet) -> Result<Self> {
        let cursor = SubgraphCursor::new(g, set)?;
        let mut buckets = vec![Vec::new(); set.len() + 2];
        for v in 0..g.n() {
            if !cursor.contains(v) {
                buckets[cursor.deg_to_selected(v) as usize].push(v);
            }
        }
        Ok(SwapIndex {
            members: set.iter().collect(),
            cursor,
            buckets,
        })
    }

    fn find(&self, value: i64) -> Option<(usize, usize)> {
        let g = self.cursor.graph();
        let e = self.cursor.edges() as i64;
        for &a in &self.members {
            let need = value - e + self.cursor.deg_to_selected(a) as i64;
            for (want, adjacent) in [(need, false), (need + 1, true)] {
                if want < 0 || want as usize >= self.buckets.len() {
                    continue;
                }
                if let Some(&b) = self.buckets[want as usize]
                    .iter()
                    .find(|&&b| g.has_edge(a, b) == adjacent)
                {
                    return Some((a, b));
                }
            }
        }
        None
    }
}

/// Edge counts certified by a removal chain: the chain's own values plus, for
/// every integer strictly between consecutive values, a single swap from
/// either neighboring set that lands on it. Sorted, without duplicates.
pub fn fill_gaps(g: &Graph, chain: &WalkChain) -> Result<Vec<u64>> {
    let mut values: Vec<u64> = chain.steps.iter().map(|s| s.value as u64).collect();
    let mut indexes: Vec<Option<SwapIndex<'_>>> = (0..chain.steps.len()).map(|_| None).collect();
    for i in 1..chain.steps.len() {
        let (a, b) = (chain.steps[i - 1].value, chain.steps[i].value);
        let (lo, hi) = (a.min(b), a.max(b));
        for c in lo + 1..hi {
            let mut hit = false;
            for j in [i - 1, i] {
                if indexes[j].is_none() {
                    indexes[j] = Some(SwapIndex::new(g, &chain.steps[j].set)?);
                }
                if let Some(idx) = &indexes[j] {
                    if idx.find(c).is_some() {
                        hit = true;
                        break;
                    }
                }
            }
            if hit {
                values.push(c as u64);
            }
        }
        indexes[i - 1] = None;
    }
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

/// A single swap turning `set` into an equal-size set with exactly `value`
/// induced edges, if one exists.
pub fn find_swap(g: &Graph, set: &VertexSet, value: u64) -> Result<Option<(usize, usize)>> {
    Ok(SwapIndex::new(g, set)?.find(value as i64))
}

/// The degree band `[d_lo, d_hi]` with `d_hi = floor((n-1)p + r)` and
/// `d_lo = ceil((n-1)p - r)`, `r = √(n ln n p(1-p) / 5)`.
pub fn degree_band(n: usize, p: f64) -> Result<(i64, i64)> {
    check_p(p)?;
    if n < 2 {
        return Err(Error::param("degree band needs n >= 2"));
    }
    let nf = n as f64;
    let mid = (nf - 1.0) * p;
    let r = sqrt(nf * log(nf) * p * (1.0 - p) / 5.0);
    Ok((ceil(mid - r) as i64, floor(mid + r) as i64))
}

/// Output of [`degree_multiplicity_check`].
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MultiplicityReport {
    pub d_lo: i64,
    pub d_hi: i64,
    /// `(d, number of vertices of degree d)` for every `d` in the band.
    pub counts: Vec<(i64, usize)>,
    pub threshold: usize,
    /// Degrees whose multiplicity is below the threshold.
    pub flagged: Vec<i64>,
}

/// Multiplicity of every degree in [`degree_band`]; degrees with fewer than
/// `max(1, floor(n^{3/10} / ln² n))` vertices are flagged.
pub fn degree_multiplicity_check(g: &Graph, p: f64) -> Result<MultiplicityReport> {
    let n = g.n();
    let (d_lo, d_hi) = degree_band(n, p)?;
    let mut hist = vec![0usize; n];
    for &d in g.degrees() {
        hist[d as usize] += 1;
    }
    let nf = n as f64;
    let ln = log(nf);
    let threshold = (floor(pow(nf, 0.3) / (ln * ln)) as usize).max(1);
    let mut counts = Vec::new();
    let mut flagged = Vec::new();
    for d in d_lo..=d_hi {
        let c = if d >= 0 && (d as usize) < n {
            hist[d as usize]
        } else {
            0
        };
        counts.push((d, c));
        if c < threshold {
            flagged.push(d);
        }
    }
    Ok(MultiplicityReport {
        d_lo,
        d_hi,
        counts,
        threshold,
        flagged,
    })
}

/// Output of [`degree_walk`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct DegreeWalk {
    /// Step values are `δ(U)`.
    pub chain: WalkChain,
    /// `δ(U) - (C(s,2) + s(n-s)) p` per step.
    pub delta0: Vec<f64>,
    pub d_hi: i64,
    pub d_lo: i64,
    pub success: bool,
    pub failure: Option<String>,
}

/// Walk over [`degree_band`]; see [`degree_walk_between`].
pub fn degree_walk(g: &Graph, set_size: usize, p: f64) -> Result<DegreeWalk> {
    let (d_lo, d_hi) = degree_band(g.n(), p)?;
    degree_walk_between(g, set_size, p, d_hi, d_lo)
}

/// Starts from the `set_size` smallest-id vertices of degree `d_hi` and
/// lowers the members one at a time, each by repeatedly swapping it for an
/// outside vertex of degree one less, until every member has degree `d_lo`.
/// Among the candidates the one keeping `δ(U)` smallest is taken; the walk
/// stops if a degree is missing or `δ(U)` would increase.
pub fn degree_walk_between(
    g: &Graph,
    set_size: usize,
    p: f64,
    d_hi: i64,
    d_lo: i64,
) -> Result<DegreeWalk> {
    check_p(p)?;
    let n = g.n();
    if set_size == 0 || set_size >= n {
        return Err(Error::param(format!(
            "walk set size must be in 1..{n}, got {set_size}"
        )));
    }
    if d_lo > d_hi {
        return Err(Error::param(format!("empty degree range [{d_lo}, {d_hi}]")));
    }
    let s = set_size as f64;
    let mean = (choose2(set_size as u64) as f64 + s * (n - set_size) as f64) * p;
    let mut by_degree: Vec<Vec<usize>> = vec![Vec::new(); n];
    for v in 0..n {
        by_degree[g.degree(v) as usize].push(v);
    }
    let bucket = |d: i64| -> &[usize] {
        if d >= 0 && (d as usize) < n {
            &by_degree[d as usize]
        } else {
            &[]
        }
    };

    let start: Vec<usize> = bucket(d_hi).iter().copied().take(set_size).collect();
    let mut out = DegreeWalk {
        chain: WalkChain::new(set_size, Vec::new()),
        delta0: Vec::new(),
        d_hi,
        d_lo,
        success: false,
        failure: None,
    };
    if start.len() < set_size {
        out.failure = Some(format!("degree {d_hi} has only {} vertices", start.len()));
        return Ok(out);
    }
    let mut cursor = SubgraphCursor::new(g, &VertexSet::new(start.clone()))?;
    let deg_sum = |c: &SubgraphCursor<'_>| -> i64 {
        c.selected_iter().map(|v| g.degree(v) as i64).sum::<i64>()
    };
    let mut delta = deg_sum(&cursor) - cursor.edges() as i64;
    let mut steps = vec![WalkStep {
        set: cursor.selected(),
        value: delta,
    }];
    let mut members = start;
    'outer: for slot in 0..set_size {
        while (g.degree(members[slot]) as i64) > d_lo {
            let v = members[slot];
            let d = g.degree(v) as i64 - 1;
            let nv = cursor.deg_to_selected(v) as i64;
            let mut best: Option<(i64, usize)> = None;
            for &w in bucket(d) {
                if cursor.contains(w) {
                    continue;
                }
                let nw = cursor.deg_to_selected(w) as i64 - g.has_edge(v, w) as i64;
                if best.map_or(true, |(b, _)| nw > b) {
                    best = Some((nw, w));
                }
            }
            let Some((nw, w)) = best else {
                out.failure = Some(format!("no free vertex of degree {d}"));
                break 'outer;
            };
            let next = delta - 1 - (nw - nv);
            if next > delta {
                out.failure = Some(format!("set degree would rise from {delta} to {next}"));
                break 'outer;
            }
            cursor.swap(v, w)?;
            members[slot] = w;
            delta = next;
            steps.push(WalkStep {
                set: cursor.selected(),
                value: delta,
            });
        }
    }
    debug_assert_eq!(delta, deg_sum(&cursor) - cursor.edges() as i64);
    out.delta0 = steps.iter().map(|s| s.value as f64 - mean).collect();
    out.success = out.failure.is_none();
    out.chain = WalkChain::new(set_size, steps);
    Ok(out)
}

/// Edge counts of order-`(n - s - 1)` subsets certified by a degree walk with
/// sets of size `s`: for each walk set `U`, the values
/// `e(G) - δ(U) - t` where `t` ranges over the neighbor counts of vertices
/// `z ∉ U` inside `V \ U` (drop `z` from `V \ U`).
pub fn certify_degree_walk(g: &Graph, walk: &DegreeWalk) -> Result<Vec<u64>> {
    let n = g.n();
    let total = g.edge_count() as i64;
    let mut values = Vec::new();
    for step in &walk.chain.steps {
        let rest = step.set.complement(n);
        let bits = rest.to_bits(n)?;
        let inside = total - step.value;
        for z in rest.iter() {
            values.push((inside - g.deg_into(z, &bits) as i64) as u64);
        }
    }
    values.sort_unstable();
    values.dedup();
    Ok(values)
}

/// For each target `t`, the smallest `z ∉ U` with exactly `t` neighbors in
/// `V \ U`.
pub fn exact_neighbor_search(
    g: &Graph,
    set: &VertexSet,
    targets: &[i64],
) -> Result<Vec<Option<usize>>> {
    let n = g.n();
    if set.len() >= n {
        return Err(Error::param("the set must leave at least one vertex out"));
    }
    let rest = set.complement(n);
    let bits = rest.to_bits(n)?;
    let mut first: Vec<Option<usize>> = vec![None; n];
    for z in rest.iter() {
        let d = g.deg_into(z, &bits) as usize;
        if first[d].is_none() {
            first[d] = Some(z);
        }
    }
    Ok(targets
        .iter()
        .map(|&t| {
            if t >= 0 && (t as usize) < n {
                first[t as usize]
            } else {
                None
            }
        })
        .collect())
}

/// Longest run of consecutive integers among the vertex degrees, as
/// `(first degree, length)`.
pub fn degree_interval(g: &Graph) -> (u64, u64) {
    let mut degs: Vec<u64> = g.degrees().iter().map(|&d| d as u64).collect();
    degs.sort_unstable();
    degs.dedup();
    longest_run(&degs).unwrap_or((0, 0))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum MuMethod {
    Exact,
    DegreeInterval,
    DegreeWalk,
    RemovalChain,
    Sampled,
}

impl MuMethod {
    pub fn as_str(self) -> &'static str {
        match self {
            MuMethod::Exact => "exact",
            MuMethod::DegreeInterval => "degree_interval",
            MuMethod::DegreeWalk => "degree_walk",
            MuMethod::RemovalChain => "removal_chain",
            MuMethod::Sampled => "sampled",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct MuEstimate {
    pub k: usize,
    pub mu_lower: u64,
    pub method: MuMethod,
}

/// `n - n^{1/4} ln² n`: orders at or above it use the degree walk.
pub fn walk_threshold(n: usize) -> f64 {
    let nf = n as f64;
    let ln = log(nf);
    nf - sqrt(sqrt(nf)) * ln * ln
}

/// Certified lower bound on `μ(k)`: exhaustive when affordable, otherwise the
/// degree interval (`k = n - 1`), a degree walk (`k` near `n`), a removal
/// chain (`k >= εn`) or random sampling, in that order of preference.
pub fn mu_lower_bound(g: &Graph, k: usize, p: f64, config: &WalkerConfig) -> Result<MuEstimate> {
    check_p(p)?;
    let n = g.n();
    if k == 0 || k > n {
        return Err(Error::param(format!("order {k} not in 1..={n}")));
    }
    let est = |mu_lower, method| MuEstimate {
        k,
        mu_lower,
        method,
    };
    if binomial(n as u64, k as u64) <= config.exact_budget {
        let s = exact_spectrum(g, k, config.exact_budget)?;
        return Ok(est(s.mu, MuMethod::Exact));
    }
    if k + 1 == n {
        return Ok(est(degree_interval(g).1, MuMethod::DegreeInterval));
    }
    if (k as f64) >= walk_threshold(n) && k + 2 <= n {
        let walk = degree_walk(g, n - k - 1, p)?;
        if !walk.chain.steps.is_empty() {
            let values = certify_degree_walk(g, &walk)?;
            return Ok(est(longest_interval(&values), MuMethod::DegreeWalk));
        }
    }
    if (k as f64) >= config.eps * n as f64 && k >= 15 && k + 3 <= n {
        let chain = removal_chain(g, k - 14, p, config)?;
        let values = fill_gaps(g, &chain.chain)?;
        return Ok(est(longest_interval(&values), MuMethod::RemovalChain));
    }
    let s = sampled_spectrum(g, k, config.sample_trials, config.seed)?;
    Ok(est(s.mu, MuMethod::Sampled))
}
