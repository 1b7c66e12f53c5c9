//! Kernels for studying the edge counts of induced subgraphs of dense
//! binomial random graphs `G(n, p)`.
//!
//! The crate is `no_std` (it needs `alloc`) and contains no IO. It provides:
//!
//! * [`graph`]: dense bit-row graphs, seeded `G(n, p)` generation, set queries;
//! * [`cursor`]: an incrementally maintained induced subgraph;
//! * [`prob`]: normal and binomial tail utilities and the interval-scale functions;
//! * [`spectrum`]: exhaustive and sampled edge-count spectra of `k`-vertex subsets;
//! * [`target`]: edge-count targets `e(k) = round(p * C(k,2)) + f(k)`;
//! * [`constructor`]: the greedy + supplementary-set construction of a subset with
//!   exactly `e(k)` edges;
//! * [`walker`]: chains of subsets whose edge counts sweep full intervals.
//!
//! Vertex ids in this crate are zero-based. Text formats built on top of it
//! (graph files, CLI output) use one-based ids.

#![no_std]
#![forbid(unsafe_code)]

extern crate alloc;
#[cfg(test)]
extern crate std;

pub mod constructor;
pub mod cursor;
mod error;
pub mod graph;
pub mod prob;
pub mod rng;
pub mod spectrum;
pub mod target;
pub mod walker;

pub use crate::cursor::SubgraphCursor;
pub use crate::error::{Error, Result};
pub use crate::graph::{GenMeta, Graph, VertexSet};
pub use crate::spectrum::Spectrum;
pub use crate::target::{EdgeTarget, Offset};

/// `C(k, 2)` as an integer.
#[inline]
pub const fn choose2(k: u64) -> u64 {
    if k < 2 {
        0
    } else {
        k * (k - 1) / 2
    }
}
