//! Dense simple graphs stored as bit rows, and seeded `G(n, p)` generation.

use alloc::format;
use alloc::string::String;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::rng::{self, PRNG_VERSION};

pub(crate) const WORD: usize = 64;

#[inline]
pub(crate) fn words_for(n: usize) -> usize {
    n.div_ceil(WORD)
}

#[inline]
pub(crate) fn bit_get(words: &[u64], v: usize) -> bool {
    words[v / WORD] >> (v % WORD) & 1 == 1
}

#[inline]
pub(crate) fn bit_set(words: &mut [u64], v: usize) {
    words[v / WORD] |= 1 << (v % WORD);
}

#[inline]
pub(crate) fn bit_clear(words: &mut [u64], v: usize) {
    words[v / WORD] &= !(1 << (v % WORD));
}

#[inline]
pub(crate) fn and_count(a: &[u64], b: &[u64]) -> u32 {
    a.iter().zip(b).map(|(x, y)| (x & y).count_ones()).sum()
}

/// Iterator over the set bits of a word slice, ascending.
pub(crate) struct Ones<'a> {
    words: &'a [u64],
    idx: usize,
    cur: u64,
}

impl<'a> Ones<'a> {
    pub(crate) fn new(words: &'a [u64]) -> Self {
        Ones {
            words,
            idx: 0,
            cur: words.first().copied().unwrap_or(0),
        }
    }
}

impl Iterator for Ones<'_> {
    type Item = usize;

    #[inline]
    fn next(&mut self) -> Option<usize> {
        loop {
            if self.cur != 0 {
                let t = self.cur.trailing_zeros() as usize;
                self.cur &= self.cur - 1;
                return Some(self.idx * WORD + t);
            }
            self.idx += 1;
            if self.idx >= self.words.len() {
                return None;
            }
            self.cur = self.words[self.idx];
        }
    }
}

/// How a graph was generated.
#[derive(Debug, Clone, PartialEq)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
pub struct GenMeta {
    pub p: f64,
    pub seed: u64,
    pub prng_version: String,
}

/// Sorted, duplicate-free set of zero-based vertex ids.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash)]
#[cfg_attr(feature = "serde", derive(serde::Serialize, serde::Deserialize))]
#[cfg_attr(feature = "serde", serde(transparent))]
pub struct VertexSet(Vec<usize>);

impl VertexSet {
    pub const fn empty() -> Self {
        VertexSet(Vec::new())
    }

    /// Sorts and deduplicates `members`.
    pub fn new(mut members: Vec<usize>) -> Self {
        members.sort_unstable();
        members.dedup();
        VertexSet(members)
    }

    /// `{start, ..., end - 1}`.
    pub fn range(start: usize, end: usize) -> Self {
        VertexSet((start..end).collect())
    }

    pub fn full(n: usize) -> Self {
        Self::range(0, n)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn as_slice(&self) -> &[usize] {
        &self.0
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.0.iter().copied()
    }

    pub fn contains(&self, v: usize) -> bool {
        self.0.binary_search(&v).is_ok()
    }

    /// `{0..n} \ self`.
    pub fn complement(&self, n: usize) -> Self {
        let mut out = Vec::with_capacity(n.saturating_sub(self.len()));
        let mut it = self.0.iter().peekable();
        for v in 0..n {
            if it.peek() == Some(&&v) {
                it.next();
            } else {
                out.push(v);
            }
        }
        VertexSet(out)
    }

    pub fn union(&self, other: &VertexSet) -> Self {
        let mut v = self.0.clone();
        v.extend_from_slice(&other.0);
        Self::new(v)
    }

    pub fn difference(&self, other: &VertexSet) -> Self {
        VertexSet(self.0.iter().copied().filter(|v| !other.contains(*v)).collect())
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|v| !other.contains(*v))
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.0.iter().all(|v| other.contains(*v))
    }

    pub fn into_vec(self) -> Vec<usize> {
        self.0
    }

    pub(crate) fn to_bits(&self, n: usize) -> Result<Vec<u64>> {
        let mut bits = vec![0u64; words_for(n)];
        for &v in &self.0 {
            if v >= n {
                return Err(Error::param(format!("vertex {v} out of range for n = {n}")));
            }
            bit_set(&mut bits, v);
        }
        Ok(bits)
    }
}

impl FromIterator<usize> for VertexSet {
    fn from_iter<I: IntoIterator<Item = usize>>(iter: I) -> Self {
        Self::new(iter.into_iter().collect())
    }
}

/// Immutable simple graph on `n` vertices with one adjacency bit row per vertex.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph {
    n: usize,
    stride: usize,
    adj: Vec<u64>,
    degrees: Vec<u32>,
    edges: u64,
    meta: Option<GenMeta>,
}

impl Graph {
    pub fn empty(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::param("graph needs at least one vertex"));
        }
        let stride = words_for(n);
        Ok(Graph {
            n,
            stride,
            adj: vec![0; n * stride],
            degrees: vec![0; n],
            edges: 0,
            meta: None,
        })
    }

    pub fn complete(n: usize) -> Result<Self> {
        let mut g = Self::empty(n)?;
        for u in 0..n {
            for v in u + 1..n {
                g.insert(u, v);
            }
        }
        Ok(g)
    }

    /// Builds a graph from zero-based edge pairs. Rejects self-loops,
    /// out-of-range ids and repeated pairs.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        let mut g = Self::empty(n)?;
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(Error::param(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(Error::param(format!("self-loop at vertex {u}")));
            }
            if g.has_edge(u, v) {
                return Err(Error::param(format!("duplicate edge ({u}, {v})")));
            }
            g.insert(u, v);
        }
        Ok(g)
    }

    /// Samples `G(n, p)`.
    ///
    /// Pairs `{u, v}` with `u < v` are visited in lexicographic order and pair
    /// number `i` consumes draw `i` of the counter stream keyed by `seed`; it
    /// is an edge iff the draw is below `floor(p * 2^64)`.
    pub fn gnp(n: usize, p: f64, seed: u64) -> Result<Self> {
        if !(p > 0.0 && p < 1.0) {
            return Err(Error::param(format!("edge probability {p} not in (0, 1)")));
        }
        let mut g = Self::empty(n)?;
        let threshold = edge_threshold(p);
        let mut index = 0u64;
        for u in 0..n {
            for v in u + 1..n {
                if rng::draw(seed, index) < threshold {
                    g.insert(u, v);
                }
                index += 1;
            }
        }
        g.meta = Some(GenMeta {
            p,
            seed,
            prng_version: PRNG_VERSION.into(),
        });
        Ok(g)
    }

    #[inline]
    fn insert(&mut self, u: usize, v: usize) {
        bit_set(&mut self.adj[u * self.stride..(u + 1) * self.stride], v);
        bit_set(&mut self.adj[v * self.stride..(v + 1) * self.stride], u);
        self.degrees[u] += 1;
        self.degrees[v] += 1;
        self.edges += 1;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn edge_count(&self) -> u64 {
        self.edges
    }

    pub fn meta(&self) -> Option<&GenMeta> {
        self.meta.as_ref()
    }

    pub fn with_meta(mut self, meta: Option<GenMeta>) -> Self {
        self.meta = meta;
        self
    }

    #[inline]
    pub fn degree(&self, v: usize) -> u32 {
        self.degrees[v]
    }

    pub fn degrees(&self) -> &[u32] {
        &self.degrees
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        bit_get(self.row(u), v)
    }

    /// Adjacency bit row of `v` (`stride` words).
    #[inline]
    pub fn row(&self, v: usize) -> &[u64] {
        &self.adj[v * self.stride..(v + 1) * self.stride]
    }

    pub fn neighbors(&self, v: usize) -> impl Iterator<Item = usize> + '_ {
        Ones::new(self.row(v))
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            Ones::new(self.row(u)).filter(move |&v| v > u).map(move |v| (u, v))
        })
    }

    pub fn max_degree(&self) -> u32 {
        self.degrees.iter().copied().max().unwrap_or(0)
    }

    /// The complement graph. Generation metadata is dropped.
    pub fn complement(&self) -> Graph {
        let mut adj = vec![0u64; self.adj.len()];
        let tail = self.n % WORD;
        let last_mask = if tail == 0 { u64::MAX } else { (1u64 << tail) - 1 };
        for v in 0..self.n {
            let src = self.row(v);
            let dst = &mut adj[v * self.stride..(v + 1) * self.stride];
            for (i, (d, s)) in dst.iter_mut().zip(src).enumerate() {
                *d = !s;
                if i + 1 == self.stride {
                    *d &= last_mask;
                }
            }
            bit_clear(dst, v);
        }
        let n1 = (self.n - 1) as u32;
        Graph {
            n: self.n,
            stride: self.stride,
            adj,
            degrees: self.degrees.iter().map(|d| n1 - d).collect(),
            edges: crate::choose2(self.n as u64) - self.edges,
            meta: None,
        }
    }

    /// Number of neighbors of `v` inside the bit set `set`.
    #[inline]
    pub(crate) fn deg_into(&self, v: usize, set: &[u64]) -> u32 {
        and_count(self.row(v), set)
    }

    /// Number of edges with both endpoints in `set`.
    pub fn induced_edges(&self, set: &VertexSet) -> Result<u64> {
        let bits = set.to_bits(self.n)?;
        Ok(self.induced_edges_bits(set.as_slice(), &bits))
    }

    pub(crate) fn induced_edges_bits(&self, members: &[usize], bits: &[u64]) -> u64 {
        let twice: u64 = members.iter().map(|&v| self.deg_into(v, bits) as u64).sum();
        twice / 2
    }

    /// `δ(U)`: number of edges with at least one endpoint in `set`.
    pub fn set_degree(&self, set: &VertexSet) -> Result<u64> {
        let inside = self.induced_edges(set)?;
        let deg_sum: u64 = set.iter().map(|v| self.degrees[v] as u64).sum();
        Ok(deg_sum - inside)
    }
}

/// `floor(p * 2^64)`, saturating at `u64::MAX`.
pub fn edge_threshold(p: f64) -> u64 {
    // Scaling by a power of two is exact; the cast truncates and saturates.
    (p * 18_446_744_073_709_551_616.0) as u64
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cycle5() -> Graph {
        Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (0, 4)]).unwrap()
    }

    #[test]
    fn single_vertex_has_no_edges() {
        let g = Graph::gnp(1, 0.5, 7).unwrap();
        assert_eq!(g.edge_count(), 0);
    }

    #[test]
    fn gnp_is_deterministic() {
        let a = Graph::gnp(4, 0.5, 42).unwrap();
        let b = Graph::gnp(4, 0.5, 42).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.meta().unwrap().prng_version, PRNG_VERSION);
    }

    #[test]
    fn gnp_rejects_bad_parameters() {
        assert!(Graph::gnp(0, 0.5, 1).is_err());
        assert!(Graph::gnp(5, 0.0, 1).is_err());
        assert!(Graph::gnp(5, 1.0, 1).is_err());
        assert!(Graph::gnp(5, f64::NAN, 1).is_err());
    }

    #[test]
    fn gnp_pair_order_follows_draw_index() {
        let seed = 11;
        let g = Graph::gnp(6, 0.3, seed).unwrap();
        let t = edge_threshold(0.3);
        let mut i = 0;
        for u in 0..6 {
            for v in u + 1..6 {
                assert_eq!(g.has_edge(u, v), rng::draw(seed, i) < t);
                i += 1;
            }
        }
    }

    #[test]
    fn threshold_is_exact_floor() {
        assert_eq!(edge_threshold(0.5), 1u64 << 63);
        assert_eq!(edge_threshold(0.25), 1u64 << 62);
    }

    #[test]
    fn set_degree_examples() {
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(k4.set_degree(&VertexSet::new(vec![0])).unwrap(), 3);
        assert_eq!(k4.set_degree(&VertexSet::empty()).unwrap(), 0);
        assert_eq!(cycle5().set_degree(&VertexSet::new(vec![0, 1])).unwrap(), 3);
        assert!(k4.set_degree(&VertexSet::new(vec![4])).is_err());
    }

    #[test]
    fn induced_edges_examples() {
        let k4 = Graph::complete(4).unwrap();
        assert_eq!(k4.induced_edges(&VertexSet::new(vec![0, 1, 2])).unwrap(), 3);
        let path = Graph::from_edges(3, [(0, 1), (1, 2)]).unwrap();
        assert_eq!(path.induced_edges(&VertexSet::new(vec![0, 2])).unwrap(), 0);
        assert_eq!(cycle5().induced_edges(&VertexSet::new(vec![0, 1, 2])).unwrap(), 2);
        assert_eq!(k4.induced_edges(&VertexSet::full(4)).unwrap(), 6);
    }

    #[test]
    fn max_degree_examples() {
        assert_eq!(Graph::complete(4).unwrap().max_degree(), 3);
        assert_eq!(Graph::empty(9).unwrap().max_degree(), 0);
    }

    #[test]
    fn from_edges_validates() {
        assert!(Graph::from_edges(3, [(0, 0)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        assert!(Graph::from_edges(3, [(0, 1), (1, 0)]).is_err());
    }

    #[test]
    fn complement_of_complete_is_empty() {
        for n in [1, 5, 64, 65, 130] {
            let c = Graph::complete(n).unwrap().complement();
            assert_eq!(c.edge_count(), 0);
            assert_eq!(c, Graph::empty(n).unwrap());
        }
    }

    #[test]
    fn edges_iterate_lexicographically() {
        let g = cycle5();
        let e: Vec<_> = g.edges().collect();
        assert_eq!(e, vec![(0, 1), (0, 4), (1, 2), (2, 3), (3, 4)]);
    }

    #[test]
    fn vertex_set_helpers() {
        let s = VertexSet::new(vec![3, 1, 3, 0]);
        assert_eq!(s.as_slice(), &[0, 1, 3]);
        assert_eq!(s.complement(5).as_slice(), &[2, 4]);
        assert!(s.contains(3) && !s.contains(2));
        let t = VertexSet::range(2, 4);
        assert_eq!(s.union(&t).as_slice(), &[0, 1, 2, 3]);
        assert_eq!(s.difference(&t).as_slice(), &[0, 1]);
    }
}
