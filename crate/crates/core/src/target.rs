//! Edge-count targets `e(k) = round(p * C(k, 2)) + f(k)`.

use alloc::format;
use alloc::vec::Vec;

use libm::rint;

use crate::choose2;
use crate::error::{Error, Result};

/// The integer offset `f(k)`.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(rename_all = "snake_case"))]
pub enum Offset {
    Zero,
    /// `f(k) = c * k`.
    Linear(i64),
    /// `f(k) = table[k]`, zero past the end.
    Table(Vec<i64>),
}

impl Offset {
    pub fn at(&self, k: u64) -> i64 {
        match self {
            Offset::Zero => 0,
            Offset::Linear(c) => c * k as i64,
            Offset::Table(t) => t.get(k as usize).copied().unwrap_or(0),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct EdgeTarget {
    pub p: f64,
    pub offset: Offset,
    /// Declared `Q` with `|f(k)| <= Q k`.
    pub q_bound: f64,
}

impl EdgeTarget {
    pub fn new(p: f64, offset: Offset, q_bound: f64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("probability {p} not in (0, 1)")));
        }
        if !(q_bound >= 0.0) {
            return Err(Error::param(format!("offset bound {q_bound} must be non-negative")));
        }
        if let Offset::Linear(c) = offset {
            if c.unsigned_abs() as f64 > q_bound {
                return Err(Error::param(format!(
                    "slope {c} exceeds the declared bound {q_bound}"
                )));
            }
        }
        if let Offset::Table(t) = &offset {
            for (k, &f) in t.iter().enumerate() {
                if f.unsigned_abs() as f64 > q_bound * k as f64 {
                    return Err(Error::param(format!(
                        "|f({k})| = {} exceeds {q_bound} * {k}",
                        f.unsigned_abs()
                    )));
                }
            }
        }
        Ok(EdgeTarget { p, offset, q_bound })
    }

    /// `f ≡ 0`.
    pub fn zero(p: f64) -> Result<Self> {
        Self::new(p, Offset::Zero, 0.0)
    }

    /// Target whose value at every `k < counts.len()` is `counts[k]`; the
    /// smallest admissible `Q` is derived from the table.
    pub fn from_counts(p: f64, counts: &[u64]) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("probability {p} not in (0, 1)")));
        }
        let mut table = Vec::with_capacity(counts.len());
        let mut q: f64 = 0.0;
        for (k, &c) in counts.iter().enumerate() {
            if k < 2 && c != 0 {
                return Err(Error::param(format!("e({k}) must be 0, got {c}")));
            }
            let f = c as i64 - base(p, k as u64) as i64;
            if k > 0 {
                q = q.max(f.unsigned_abs() as f64 / k as f64);
            }
            table.push(f);
        }
        Self::new(p, Offset::Table(table), q)
    }

    /// Zero offset except at `k`, where the value is `edges`.
    pub fn matching(p: f64, k: u64, edges: u64) -> Result<Self> {
        let mut counts: Vec<u64> = (0..k).map(|j| base(p, j)).collect();
        counts.push(edges);
        Self::from_counts(p, &counts)
    }

    /// `round(p C(k,2)) + f(k)` without the sign check.
    pub fn value(&self, k: u64) -> i64 {
        base(self.p, k) as i64 + self.offset.at(k)
    }

    /// `e(k)`, which must be a count in `0..=C(k,2)`.
    pub fn e(&self, k: u64) -> Result<u64> {
        let v = self.value(k);
        if v < 0 || v as u64 > choose2(k) {
            return Err(Error::param(format!("e({k}) = {v} is not in [0, C({k},2)]")));
        }
        Ok(v as u64)
    }

    /// `f(k)`.
    pub fn f(&self, k: u64) -> i64 {
        self.offset.at(k)
    }

    /// Target for the complement graph: `p -> 1 - p`, `e(k) -> C(k,2) - e(k)`,
    /// tabulated for `k <= max_k`.
    pub fn complement(&self, max_k: u64) -> Result<Self> {
        let q = 1.0 - self.p;
        let mut table = Vec::with_capacity(max_k as usize + 1);
        let mut bound: f64 = 0.0;
        for k in 0..=max_k {
            let v = choose2(k) as i64 - self.value(k);
            let f = v - base(q, k) as i64;
            if k > 0 {
                bound = bound.max(f.unsigned_abs() as f64 / k as f64);
            }
            table.push(f);
        }
        Self::new(q, Offset::Table(table), bound.max(self.q_bound))
    }
}

/// `round(p C(k,2))`, ties to even.
fn base(p: f64, k: u64) -> u64 {
    rint(p * choose2(k) as f64) as u64
}
