//! Edge-count spectra of `k`-vertex induced subgraphs.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::choose2;
use crate::cursor::SubgraphCursor;
use crate::error::{Error, Result};
use crate::graph::{Graph, VertexSet};
use crate::rng::CounterRng;
use crate::target::EdgeTarget;

/// Default cap on the number of subsets an exhaustive search may visit.
pub const DEFAULT_BUDGET: u128 = 100_000_000;

/// Achievable edge counts of `k`-vertex induced subgraphs.
#[derive(Debug, Clone, PartialEq, Eq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct Spectrum {
    pub k: usize,
    /// Sorted, without duplicates.
    pub counts: Vec<u64>,
    /// Length of the longest run of consecutive integers in `counts`.
    pub mu: u64,
}

impl Spectrum {
    pub fn from_counts(k: usize, mut counts: Vec<u64>) -> Self {
        counts.sort_unstable();
        counts.dedup();
        let mu = longest_interval(&counts);
        Spectrum { k, counts, mu }
    }

    fn from_hits(k: usize, hits: &[bool]) -> Self {
        let counts: Vec<u64> = hits
            .iter()
            .enumerate()
            .filter(|(_, &h)| h)
            .map(|(c, _)| c as u64)
            .collect();
        let mu = longest_interval(&counts);
        Spectrum { k, counts, mu }
    }

    pub fn min(&self) -> Option<u64> {
        self.counts.first().copied()
    }

    pub fn max(&self) -> Option<u64> {
        self.counts.last().copied()
    }

    pub fn contains(&self, c: u64) -> bool {
        self.counts.binary_search(&c).is_ok()
    }

    pub fn is_full(&self) -> bool {
        self.mu == choose2(self.k as u64) + 1
    }
}

/// Length of the longest block of consecutive integers in a sorted,
/// duplicate-free slice.
pub fn longest_interval(counts: &[u64]) -> u64 {
    longest_run(counts).map_or(0, |(_, len)| len)
}

/// Start and length of the first longest block of consecutive integers.
pub fn longest_run(counts: &[u64]) -> Option<(u64, u64)> {
    let first = *counts.first()?;
    let (mut best_start, mut best_len) = (first, 1);
    let (mut start, mut len) = (first, 1);
    for w in counts.windows(2) {
        if w[1] == w[0] + 1 {
            len += 1;
        } else {
            start = w[1];
            len = 1;
        }
        if len > best_len {
            best_start = start;
            best_len = len;
        }
    }
    Some((best_start, best_len))
}

/// `C(n, k)`, saturating at `u128::MAX`.
pub fn binomial(n: u64, k: u64) -> u128 {
    if k > n {
        return 0;
    }
    let k = k.min(n - k);
    let mut acc: u128 = 1;
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) after the multiplication.
        acc = match acc.checked_mul((n - i) as u128) {
            Some(v) => v / (i as u128 + 1),
            None => return u128::MAX,
        };
    }
    acc
}

/// Minimal-change enumeration of the `k`-subsets of `0..n` (revolving-door
/// order): consecutive subsets differ by exactly one swap.
#[derive(Debug, Clone)]
pub struct RevolvingDoor {
    /// `c[1..=k]` ascending, `c[k + 1] = n`; `c[0]` unused.
    c: Vec<usize>,
    k: usize,
    n: usize,
    done: bool,
}

impl RevolvingDoor {
    pub fn new(n: usize, k: usize) -> Result<Self> {
        if k > n {
            return Err(Error::param(format!("subset size {k} exceeds n = {n}")));
        }
        let mut c = vec![0; k + 2];
        for (j, slot) in c.iter_mut().enumerate().skip(1).take(k) {
            *slot = j - 1;
        }
        c[k + 1] = n;
        Ok(RevolvingDoor {
            c,
            k,
            n,
            done: k == 0 || k == n,
        })
    }

    /// The current subset, ascending.
    pub fn current(&self) -> &[usize] {
        &self.c[1..=self.k]
    }

    /// Advances to the next subset and returns `(removed, added)`, or `None`
    /// once every subset has been visited.
    pub fn advance(&mut self) -> Option<(usize, usize)> {
        if self.done {
            return None;
        }
        let t = self.k;
        let c = &mut self.c;
        if t == 1 {
            let old = c[1];
            if old + 1 < self.n {
                c[1] = old + 1;
                return Some((old, old + 1));
            }
            self.done = true;
            return None;
        }
        let mut j;
        if t % 2 == 1 {
            if c[1] + 1 < c[2] {
                c[1] += 1;
                return Some((c[1] - 1, c[1]));
            }
            j = 2;
        } else {
            if c[1] > 0 {
                c[1] -= 1;
                return Some((c[1] + 1, c[1]));
            }
            j = 2;
            // Starts at the "increase" step.
            if let Some(s) = Self::increase(c, &mut j, t) {
                return Some(s);
            }
            if j > t {
                self.done = true;
                return None;
            }
        }
        loop {
            // Try to decrease c[j]; here c[j] = c[j - 1] + 1.
            if c[j] >= j {
                let removed = c[j];
                c[j] = c[j - 1];
                c[j - 1] = j - 2;
                return Some((removed, j - 2));
            }
            j += 1;
            if let Some(s) = Self::increase(c, &mut j, t) {
                return Some(s);
            }
            if j > t {
                self.done = true;
                return None;
            }
        }
    }

    /// Try to increase `c[j]`; here `c[j - 1] = j - 2`. On failure `j` is
    /// advanced by one.
    fn increase(c: &mut [usize], j: &mut usize, t: usize) -> Option<(usize, usize)> {
        if *j > t {
            return None;
        }
        if c[*j] + 1 < c[*j + 1] {
            let removed = c[*j - 1];
            c[*j - 1] = c[*j];
            c[*j] += 1;
            return Some((removed, c[*j]));
        }
        *j += 1;
        None
    }
}

fn check_order(g: &Graph, k: usize) -> Result<()> {
    if k == 0 || k > g.n() {
        return Err(Error::param(format!(
            "subset size {k} not in 1..={}",
            g.n()
        )));
    }
    Ok(())
}

/// Every edge count of a `k`-vertex induced subgraph, by exhaustive
/// enumeration. Refuses when `C(n, k)` exceeds `budget`.
pub fn exact_spectrum(g: &Graph, k: usize, budget: u128) -> Result<Spectrum> {
    check_order(g, k)?;
    let total = binomial(g.n() as u64, k as u64);
    if total > budget {
        return Err(Error::BudgetExceeded {
            required: total,
            budget,
        });
    }
    let mut hits = vec![false; choose2(k as u64) as usize + 1];
    let _ = scan(g, k, |c| {
        hits[c as usize] = true;
        false
    })?;
    Ok(Spectrum::from_hits(k, &hits))
}

/// Visits every `k`-subset in revolving-door order; `visit` receives the
/// induced edge count and returns `true` to stop. Returns the subset at which
/// the scan stopped.
fn scan(g: &Graph, k: usize, mut visit: impl FnMut(u64) -> bool) -> Result<Option<VertexSet>> {
    let mut door = RevolvingDoor::new(g.n(), k)?;
    let mut cursor = SubgraphCursor::new(g, &VertexSet::range(0, k))?;
    loop {
        if visit(cursor.edges()) {
            return Ok(Some(VertexSet::new(door.current().to_vec())));
        }
        match door.advance() {
            Some((out, inn)) => cursor.swap(out, inn)?,
            None => return Ok(None),
        }
    }
}

/// Largest `k` for which some `k`-subset induces exactly `e(k)` edges,
/// together with a witness. The search runs from `k = n` downwards and the
/// budget caps the total number of subsets visited.
pub fn exact_xn(
    g: &Graph,
    target: &EdgeTarget,
    budget: u128,
) -> Result<Option<(usize, VertexSet)>> {
    let n = g.n();
    let mut spent: u128 = 0;
    for k in (1..=n).rev() {
        let want = target.value(k as u64);
        if want < 0 || want as u64 > choose2(k as u64) {
            continue;
        }
        let cost = binomial(n as u64, k as u64);
        spent = spent.saturating_add(cost);
        if spent > budget {
            return Err(Error::BudgetExceeded {
                required: spent,
                budget,
            });
        }
        if let Some(w) = scan(g, k, |c| c == want as u64)? {
            return Ok(Some((k, w)));
        }
    }
    Ok(None)
}

/// Edge counts of `trials` uniformly random `k`-subsets. The draws for a
/// shorter run are a prefix of those of a longer one with the same seed.
pub fn sampled_spectrum(g: &Graph, k: usize, trials: u64, seed: u64) -> Result<Spectrum> {
    check_order(g, k)?;
    let n = g.n();
    let mut hits = vec![false; choose2(k as u64) as usize + 1];
    let mut perm: Vec<usize> = (0..n).collect();
    let mut rng = CounterRng::new(seed);
    let mut bits = vec![0u64; crate::graph::words_for(n)];
    for _ in 0..trials {
        for i in 0..k {
            let j = i + rng.below((n - i) as u64) as usize;
            perm.swap(i, j);
        }
        let chosen = &perm[..k];
        let edges = if k <= 16 {
            let mut e = 0u64;
            for (a, &u) in chosen.iter().enumerate() {
                for &v in &chosen[a + 1..] {
                    e += g.has_edge(u, v) as u64;
                }
            }
            e
        } else {
            for &v in chosen {
                crate::graph::bit_set(&mut bits, v);
            }
            let e = g.induced_edges_bits(chosen, &bits);
            for &v in chosen {
                crate::graph::bit_clear(&mut bits, v);
            }
            e
        };
        hits[edges as usize] = true;
    }
    Ok(Spectrum::from_hits(k, &hits))
}
