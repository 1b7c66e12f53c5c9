//! Construction of an induced subgraph with exactly `e(k)` edges for some
//! large `k`.
//!
//! The vertex set is split into two small supplementary blocks `V1`, `V2`
//! (lowest ids) and a main block. High-degree vertices of the main block are
//! removed greedily while the remaining edge count stays at or above the
//! target, a few low-degree vertices of `V1` are added to push the excess to
//! at most zero, and finally one vertex of `V2` chosen by a degree window plus
//! a pair of `V2` vertices with an exact joint count close the gap. When a
//! stage fails, an optional randomized swap search takes over from the last
//! set reached.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use libm::{floor, log, pow, sqrt};

use crate::cursor::SubgraphCursor;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::CounterRng;
use crate::target::EdgeTarget;

/// The split `V1 | V2 | main` of `0..n` by id.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct SupplementaryPartition {
    pub n0: usize,
    pub v1: VertexSet,
    pub v2: VertexSet,
    pub main: VertexSet,
}

/// `n0 = floor(√n / ln n)`, `V1 = [0, n0)`, `V2 = [n0, 2 n0)`, main the rest.
pub fn partition_supplementary(n: usize) -> Result<SupplementaryPartition> {
    if n < 8 {
        return Err(Error::param(format!("partition needs n >= 8, got {n}")));
    }
    let nf = n as f64;
    let n0 = floor(sqrt(nf) / log(nf)) as usize;
    Ok(SupplementaryPartition {
        n0,
        v1: VertexSet::range(0, n0),
        v2: VertexSet::range(n0, 2 * n0),
        main: VertexSet::range(2 * n0, n),
    })
}

/// Tunables of [`construct_exact`].
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(default))]
pub struct ConstructConfig {
    pub min_n: usize,
    /// Cap on greedy removals; `None` means the whole main block.
    pub greedy_budget: Option<usize>,
    /// Initial pool in `V1` has `max(1, floor(n^beta))` vertices.
    pub beta: f64,
    /// Largest number of `V1` vertices added.
    pub h_max: usize,
    /// Largest `|γ|` accepted by the last stage, in units of `√n (ln n)^{-1/4}`.
    pub gamma_max_coef: f64,
    /// Window width for the single vertex, in units of `n^{1/4}`.
    pub window_scale: f64,
    pub fallback_iters: u64,
    /// Stream key of the fallback search.
    pub seed: u64,
}

impl Default for ConstructConfig {
    fn default() -> Self {
        ConstructConfig {
            min_n: 64,
            greedy_budget: None,
            beta: 0.09,
            h_max: 7,
            gamma_max_coef: 4.0,
            window_scale: 1.0,
            fallback_iters: 100_000,
            seed: 0,
        }
    }
}

/// Why a pipeline stage gave up.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub enum StageFailure {
    GreedyBudget,
    Stage1,
    Stage2Range,
    Stage2W1,
    Stage2Pair,
}

impl StageFailure {
    pub fn as_str(self) -> &'static str {
        match self {
            StageFailure::GreedyBudget => "greedy-budget",
            StageFailure::Stage1 => "stage1",
            StageFailure::Stage2Range => "stage2-range",
            StageFailure::Stage2W1 => "stage2-w1",
            StageFailure::Stage2Pair => "stage2-pair",
        }
    }
}

pub type StageResult<T> = core::result::Result<T, StageFailure>;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Stage {
    Start,
    Greedy,
    Stage1,
    Stage2,
    Fallback,
}

/// Subset size and edge excess (achieved minus target) after a stage.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct StageRecord {
    pub stage: Stage,
    pub size: usize,
    pub excess: i64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Path {
    /// The whole vertex set already matches.
    Trivial,
    Pipeline,
    Fallback,
    Failed,
}

impl Path {
    pub fn as_str(self) -> &'static str {
        match self {
            Path::Trivial => "trivial",
            Path::Pipeline => "pipeline",
            Path::Fallback => "fallback",
            Path::Failed => "failed",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct ConstructionResult {
    pub subset: VertexSet,
    pub achieved_edges: u64,
    pub target_edges: i64,
    pub removed: VertexSet,
    pub stage1_swap: VertexSet,
    pub stage2_triple: VertexSet,
    pub success: bool,
    pub residual: i64,
    pub path: Path,
    /// The pipeline ran on the complement graph (the main block started below
    /// its target).
    pub complemented: bool,
    pub failure: Option<StageFailure>,
    pub stage_trace: Vec<StageRecord>,
    /// Swaps accepted by the fallback search.
    pub fallback_moves: u64,
}

impl ConstructionResult {
    pub fn pipeline_success(&self) -> bool {
        matches!(self.path, Path::Trivial | Path::Pipeline)
    }

    pub fn fallback_used(&self) -> bool {
        self.failure.is_some()
    }
}

/// Output of [`greedy_remove`].
#[derive(Debug, Clone, PartialEq)]
pub struct GreedyOutcome {
    pub removed: VertexSet,
    /// `(vertex, degree in the main block)` in removal order.
    pub order: Vec<(usize, u32)>,
    /// Edges induced by `main \ removed`.
    pub remaining_edges: u64,
    /// Stopped by the budget rather than by the overshoot test.
    pub exhausted: bool,
}

fn excess(edges: u64, target: &EdgeTarget, size: usize) -> i64 {
    edges as i64 - target.value(size as u64)
}

/// Removes vertices of the main block in order of decreasing degree inside it
/// (ties by smallest id) for as long as the remaining edge count stays at or
/// above `e(size)`; stops early on an exact hit.
pub fn greedy_remove(
    g: &Graph,
    part: &SupplementaryPartition,
    target: &EdgeTarget,
    budget: usize,
) -> Result<GreedyOutcome> {
    let main_bits = part.main.to_bits(g.n())?;
    let mut order: Vec<(usize, u32)> = part
        .main
        .iter()
        .map(|v| (v, g.deg_into(v, &main_bits)))
        .collect();
    order.sort_by(|a, b| b.1.cmp(&a.1).then(a.0.cmp(&b.0)));

    let mut cursor = SubgraphCursor::new(g, &part.main)?;
    let mut taken = Vec::new();
    let mut exhausted = false;
    for &(v, d) in &order {
        if excess(cursor.edges(), target, cursor.len()) == 0 {
            break;
        }
        if taken.len() >= budget {
            exhausted = true;
            break;
        }
        let after = cursor.edges() - cursor.deg_to_selected(v) as u64;
        if excess(after, target, cursor.len() - 1) < 0 {
            break;
        }
        cursor.remove(v)?;
        taken.push((v, d));
    }
    Ok(GreedyOutcome {
        removed: taken.iter().map(|&(v, _)| v).collect(),
        order: taken,
        remaining_edges: cursor.edges(),
        exhausted,
    })
}

/// Output of [`stage1_adjust`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stage1Outcome {
    pub swap: VertexSet,
    /// Pool size of `V1` when the test passed.
    pub pool: usize,
    pub excess_after: i64,
}

/// Chooses the fewest vertices of a growing prefix of `V1`, taken in order of
/// fewest neighbors in `current`, whose addition brings the excess to at most
/// zero.
pub fn stage1_adjust(
    g: &Graph,
    part: &SupplementaryPartition,
    current: &VertexSet,
    target: &EdgeTarget,
    config: &ConstructConfig,
) -> Result<StageResult<Stage1Outcome>> {
    let bits = current.to_bits(g.n())?;
    let s = current.len();
    let edges = g.induced_edges_bits(current.as_slice(), &bits);
    let r = excess(edges, target, s);
    if r <= 0 {
        return Ok(Ok(Stage1Outcome {
            swap: VertexSet::empty(),
            pool: 0,
            excess_after: r,
        }));
    }
    let v1 = part.v1.as_slice();
    let start = (floor(pow(g.n() as f64, config.beta)) as usize).max(1);
    let mut pool: Vec<(u32, usize)> = Vec::with_capacity(v1.len());
    for (idx, &v) in v1.iter().enumerate() {
        pool.push((g.deg_into(v, &bits), v));
        if idx + 1 < start.min(v1.len()) {
            continue;
        }
        pool.sort_unstable();
        let mut added = 0u64;
        for h in 1..=config.h_max.min(pool.len()) {
            let (d, v) = pool[h - 1];
            added += d as u64 + pool[..h - 1].iter().filter(|&&(_, u)| g.has_edge(u, v)).count() as u64;
            let after = excess(edges + added, target, s + h);
            if after <= 0 {
                return Ok(Ok(Stage1Outcome {
                    swap: pool[..h].iter().map(|&(_, u)| u).collect(),
                    pool: pool.len(),
                    excess_after: after,
                }));
            }
        }
    }
    Ok(Err(StageFailure::Stage1))
}

/// Output of [`stage2_correct`].
#[derive(Debug, Clone, PartialEq)]
pub struct Stage2Outcome {
    pub triple: VertexSet,
    /// Extra edges, relative to the mean `p (3t + 3)`, the triple had to add.
    pub gamma: f64,
    pub sigma: i64,
}

/// Adds one vertex of the first half of `V2` whose neighbor count falls in
/// the window selected by `γ`, then a pair from the second half that makes
/// the edge count exactly `e(t + 3)`.
pub fn stage2_correct(
    g: &Graph,
    part: &SupplementaryPartition,
    current: &VertexSet,
    target: &EdgeTarget,
    config: &ConstructConfig,
) -> Result<StageResult<Stage2Outcome>> {
    let n = g.n() as f64;
    let bits = current.to_bits(g.n())?;
    let t = current.len();
    let edges = g.induced_edges_bits(current.as_slice(), &bits) as i64;
    let needed = target.value(t as u64 + 3) - edges;
    let p = target.p;
    let gamma = needed as f64 - p * (3 * t + 3) as f64;
    let gamma_max = config.gamma_max_coef * sqrt(n) / sqrt(sqrt(log(n)));
    if gamma.abs() > gamma_max {
        return Ok(Err(StageFailure::Stage2Range));
    }
    let w = config.window_scale * sqrt(sqrt(n));
    let sigma = floor(gamma / w);
    let lo = p * t as f64 + sigma * w;
    let hi = lo + w;

    let v2 = part.v2.as_slice();
    let half = v2.len().div_ceil(2);
    let (first, second) = v2.split_at(half);
    let mut any_w1 = false;
    for &w1 in first {
        let d1 = g.deg_into(w1, &bits) as i64;
        if !((d1 as f64) >= lo && (d1 as f64) < hi) {
            continue;
        }
        any_w1 = true;
        let rest = needed - d1;
        for (i, &a) in second.iter().enumerate() {
            let da = g.deg_into(a, &bits) as i64 + g.has_edge(a, w1) as i64;
            for &b in &second[i + 1..] {
                let db = g.deg_into(b, &bits) as i64 + g.has_edge(b, w1) as i64;
                if da + db + g.has_edge(a, b) as i64 == rest {
                    return Ok(Ok(Stage2Outcome {
                        triple: VertexSet::new(alloc::vec![w1, a, b]),
                        gamma,
                        sigma: sigma as i64,
                    }));
                }
            }
        }
    }
    Ok(Err(if any_w1 {
        StageFailure::Stage2Pair
    } else {
        StageFailure::Stage2W1
    }))
}

/// Single-vertex swaps between `start` and its complement, each time pairing
/// a random member with the outsider that brings the excess closest to zero;
/// a swap is kept only if it strictly helps. Returns the final set and the
/// number of accepted swaps.
pub fn swap_search(
    g: &Graph,
    start: &VertexSet,
    target: &EdgeTarget,
    iters: u64,
    seed: u64,
) -> Result<(VertexSet, u64)> {
    let mut cursor = SubgraphCursor::new(g, start)?;
    let size = cursor.len();
    let goal = target.value(size as u64);
    let mut inside: Vec<usize> = start.iter().collect();
    let mut outside: Vec<usize> = start.complement(g.n()).into_vec();
    let mut rng = CounterRng::new(seed);
    let mut moves = 0;
    if inside.is_empty() || outside.is_empty() {
        return Ok((cursor.selected(), 0));
    }
    for _ in 0..iters {
        let res = cursor.edges() as i64 - goal;
        if res == 0 {
            break;
        }
        let ai = rng.below(inside.len() as u64) as usize;
        let a = inside[ai];
        let da = cursor.deg_to_selected(a) as i64;
        let mut best: Option<(i64, usize)> = None;
        for (bi, &b) in outside.iter().enumerate() {
            let delta = cursor.deg_to_selected(b) as i64 - da - g.has_edge(a, b) as i64;
            let cand = (res + delta).abs();
            if best.map_or(true, |(v, _)| cand < v) {
                best = Some((cand, bi));
            }
        }
        if let Some((v, bi)) = best {
            if v < res.abs() {
                let b = outside[bi];
                cursor.swap(a, b)?;
                inside[ai] = b;
                outside[bi] = a;
                moves += 1;
            }
        }
    }
    Ok((cursor.selected(), moves))
}

struct Pipeline {
    subset: VertexSet,
    removed: VertexSet,
    stage1_swap: VertexSet,
    stage2_triple: VertexSet,
    failure: Option<StageFailure>,
    trace: Vec<StageRecord>,
}

/// Runs partition, greedy removal and both correction stages on `g`, whose
/// main block is assumed to start at or above its target.
fn run_pipeline(
    g: &Graph,
    part: &SupplementaryPartition,
    target: &EdgeTarget,
    config: &ConstructConfig,
) -> Result<Pipeline> {
    let mut out = Pipeline {
        subset: part.main.clone(),
        removed: VertexSet::empty(),
        stage1_swap: VertexSet::empty(),
        stage2_triple: VertexSet::empty(),
        failure: None,
        trace: Vec::new(),
    };
    let record = |out: &mut Pipeline, stage: Stage| -> Result<i64> {
        let e = excess(g.induced_edges(&out.subset)?, target, out.subset.len());
        out.trace.push(StageRecord {
            stage,
            size: out.subset.len(),
            excess: e,
        });
        Ok(e)
    };
    if record(&mut out, Stage::Start)? == 0 {
        return Ok(out);
    }

    let budget = config.greedy_budget.unwrap_or(part.main.len());
    let greedy = greedy_remove(g, part, target, budget)?;
    out.subset = part.main.difference(&greedy.removed);
    out.removed = greedy.removed;
    let e = record(&mut out, Stage::Greedy)?;
    if greedy.exhausted && e != 0 {
        out.failure = Some(StageFailure::GreedyBudget);
        return Ok(out);
    }
    if e == 0 {
        return Ok(out);
    }

    match stage1_adjust(g, part, &out.subset, target, config)? {
        Ok(s1) => {
            out.subset = out.subset.union(&s1.swap);
            out.stage1_swap = s1.swap;
        }
        Err(f) => {
            out.failure = Some(f);
            return Ok(out);
        }
    }
    if record(&mut out, Stage::Stage1)? == 0 {
        return Ok(out);
    }

    match stage2_correct(g, part, &out.subset, target, config)? {
        Ok(s2) => {
            out.subset = out.subset.union(&s2.triple);
            out.stage2_triple = s2.triple;
            record(&mut out, Stage::Stage2)?;
        }
        Err(f) => out.failure = Some(f),
    }
    Ok(out)
}

/// Finds a vertex subset inducing exactly `e(|subset|)` edges, with `|subset|`
/// as large as the pipeline allows.
pub fn construct_exact(
    g: &Graph,
    target: &EdgeTarget,
    config: &ConstructConfig,
) -> Result<ConstructionResult> {
    let n = g.n();
    if n < config.min_n {
        return Err(Error::param(format!(
            "construction needs n >= {}, got {n}",
            config.min_n
        )));
    }
    if excess(g.edge_count(), target, n) == 0 {
        let full = VertexSet::full(n);
        return Ok(ConstructionResult {
            subset: full,
            achieved_edges: g.edge_count(),
            target_edges: target.value(n as u64),
            removed: VertexSet::empty(),
            stage1_swap: VertexSet::empty(),
            stage2_triple: VertexSet::empty(),
            success: true,
            residual: 0,
            path: Path::Trivial,
            complemented: false,
            failure: None,
            stage_trace: Vec::new(),
            fallback_moves: 0,
        });
    }
    let part = partition_supplementary(n)?;
    let main_excess = excess(g.induced_edges(&part.main)?, target, part.main.len());
    let complemented = main_excess < 0;
    let mut pipe = if complemented {
        let gc = g.complement();
        let tc = target.complement(n as u64)?;
        let mut pipe = run_pipeline(&gc, &part, &tc, config)?;
        for r in &mut pipe.trace {
            r.excess = -r.excess;
        }
        pipe
    } else {
        run_pipeline(g, &part, target, config)?
    };

    let mut subset = pipe.subset.clone();
    let mut moves = 0;
    let mut path = Path::Pipeline;
    let pipeline_edges = g.induced_edges(&subset)?;
    if excess(pipeline_edges, target, subset.len()) != 0 {
        // Only reachable when a stage failed.
        debug_assert!(pipe.failure.is_some());
        let (s, m) = swap_search(g, &subset, target, config.fallback_iters, config.seed)?;
        subset = s;
        moves = m;
        path = Path::Fallback;
        let e = excess(g.induced_edges(&subset)?, target, subset.len());
        pipe.trace.push(StageRecord {
            stage: Stage::Fallback,
            size: subset.len(),
            excess: e,
        });
    }

    let achieved = g.induced_edges(&subset)?;
    let residual = excess(achieved, target, subset.len());
    if residual != 0 {
        path = Path::Failed;
    }
    Ok(ConstructionResult {
        target_edges: target.value(subset.len() as u64),
        subset,
        achieved_edges: achieved,
        removed: pipe.removed,
        stage1_swap: pipe.stage1_swap,
        stage2_triple: pipe.stage2_triple,
        success: residual == 0,
        residual,
        path,
        complemented,
        failure: pipe.failure,
        stage_trace: pipe.trace,
        fallback_moves: moves,
    })
}

/// Human-readable summary of a failure, if any.
pub fn describe_failure(r: &ConstructionResult) -> Option<String> {
    r.failure.map(|f| {
        format!(
            "{} (path {}, residual {})",
            f.as_str(),
            r.path.as_str(),
            r.residual
        )
    })
}
