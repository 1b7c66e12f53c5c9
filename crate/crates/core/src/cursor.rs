//! Mutable view of a vertex subset with incrementally maintained counts.

use alloc::format;
use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::graph::{bit_clear, bit_get, bit_set, words_for, Graph, Ones, VertexSet};

/// A subset of a graph's vertices together with the number of edges it
/// induces and, for every vertex of the graph, the number of its neighbors
/// inside the subset.
///
/// `add` and `remove` cost `O(n / 64 + deg(v))`.
#[derive(Debug, Clone)]
pub struct SubgraphCursor<'g> {
    graph: &'g Graph,
    selected: Vec<u64>,
    size: usize,
    inside_edges: u64,
    deg_to_selected: Vec<u32>,
}

impl<'g> SubgraphCursor<'g> {
    pub fn new(graph: &'g Graph, set: &VertexSet) -> Result<Self> {
        let mut c = SubgraphCursor {
            graph,
            selected: vec![0; words_for(graph.n())],
            size: 0,
            inside_edges: 0,
            deg_to_selected: vec![0; graph.n()],
        };
        for v in set.iter() {
            c.add(v)?;
        }
        Ok(c)
    }

    pub fn graph(&self) -> &'g Graph {
        self.graph
    }

    pub fn add(&mut self, v: usize) -> Result<()> {
        self.check_range(v)?;
        if bit_get(&self.selected, v) {
            return Err(Error::State(format!("vertex {v} is already selected")));
        }
        self.inside_edges += self.deg_to_selected[v] as u64;
        for w in Ones::new(self.graph.row(v)) {
            self.deg_to_selected[w] += 1;
        }
        bit_set(&mut self.selected, v);
        self.size += 1;
        Ok(())
    }

    pub fn remove(&mut self, v: usize) -> Result<()> {
        self.check_range(v)?;
        if !bit_get(&self.selected, v) {
            return Err(Error::State(format!("vertex {v} is not selected")));
        }
        self.inside_edges -= self.deg_to_selected[v] as u64;
        for w in Ones::new(self.graph.row(v)) {
            self.deg_to_selected[w] -= 1;
        }
        bit_clear(&mut self.selected, v);
        self.size -= 1;
        Ok(())
    }

    /// Replaces `out` (selected) by `inn` (not selected).
    pub fn swap(&mut self, out: usize, inn: usize) -> Result<()> {
        self.check_range(inn)?;
        if out == inn || bit_get(&self.selected, inn) {
            return Err(Error::State(format!("vertex {inn} is already selected")));
        }
        self.remove(out)?;
        self.add(inn)
    }

    fn check_range(&self, v: usize) -> Result<()> {
        if v >= self.graph.n() {
            Err(Error::param(format!(
                "vertex {v} out of range for n = {}",
                self.graph.n()
            )))
        } else {
            Ok(())
        }
    }

    /// Number of edges induced by the selection.
    pub fn edges(&self) -> u64 {
        self.inside_edges
    }

    pub fn len(&self) -> usize {
        self.size
    }

    pub fn is_empty(&self) -> bool {
        self.size == 0
    }

    pub fn contains(&self, v: usize) -> bool {
        bit_get(&self.selected, v)
    }

    /// Neighbors of `v` inside the selection (for any `v`, selected or not).
    #[inline]
    pub fn deg_to_selected(&self, v: usize) -> u32 {
        self.deg_to_selected[v]
    }

    pub fn deg_to_selected_all(&self) -> &[u32] {
        &self.deg_to_selected
    }

    pub fn selected(&self) -> VertexSet {
        Ones::new(&self.selected).collect()
    }

    pub fn selected_iter(&self) -> impl Iterator<Item = usize> + '_ {
        Ones::new(&self.selected)
    }
}
