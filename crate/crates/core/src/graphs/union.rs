use serde::{Deserialize, Serialize};

use super::{check_same_order, Adjacency, Graph};
use crate::error::Result;

/// Which input graph(s) an edge of a union comes from.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum EdgeSource {
    H,
    G,
    Both,
}

/// `H ∪ G` as a view over its two inputs.
#[derive(Debug, Clone, Copy)]
pub struct UnionGraph<'a, A: ?Sized, B: ?Sized> {
    h: &'a A,
    g: &'a B,
}

/// The union of two graphs on the same vertex set.
pub fn union_graph<'a, A, B>(h: &'a A, g: &'a B) -> Result<UnionGraph<'a, A, B>>
where
    A: Adjacency + ?Sized,
    B: Adjacency + ?Sized,
{
    check_same_order(h.vertex_count(), g.vertex_count())?;
    Ok(UnionGraph { h, g })
}

impl<A: Adjacency + ?Sized, B: Adjacency + ?Sized> UnionGraph<'_, A, B> {
    /// Provenance of the edge `uv`, or `None` when it is not an edge.
    pub fn provenance(&self, u: usize, v: usize) -> Option<EdgeSource> {
        match (self.h.has_edge(u, v), self.g.has_edge(u, v)) {
            (true, true) => Some(EdgeSource::Both),
            (true, false) => Some(EdgeSource::H),
            (false, true) => Some(EdgeSource::G),
            (false, false) => None,
        }
    }

    pub fn to_graph(&self) -> Graph {
        Graph::from_adjacency(self)
    }
}

impl<A: Adjacency + ?Sized, B: Adjacency + ?Sized> Adjacency for UnionGraph<'_, A, B> {
    fn vertex_count(&self) -> usize {
        self.h.vertex_count()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        self.h.has_edge(u, v) || self.g.has_edge(u, v)
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = self.h.neighbors(v);
        out.extend(self.g.neighbors(v));
        out.sort_unstable();
        out.dedup();
        out
    }
}
