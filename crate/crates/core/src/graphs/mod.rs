//! Undirected simple graphs on the vertex set `0..n`.
//!
//! [`Adjacency`] is the query surface shared by every representation: the
//! explicit [`Graph`], the implicit host families in [`families`], the
//! distance-defined [`GeometricGraph`] and the [`UnionGraph`] view. Dense
//! hosts at large `n` cannot be stored edge by edge, so the builder only
//! ever talks to this trait.

use std::io::{BufRead, Write};

use crate::error::{invalid, parse_err, Error, Result};

pub mod families;
pub mod geometric;
pub mod union;

pub use families::{gen_bipartite_counterexample, gen_min_degree_h, HostFamily, HostGraph};
pub use geometric::{build_rgg, build_rgg_brute_force, sample_positions, GeometricGraph};
pub use union::{union_graph, EdgeSource, UnionGraph};

/// Read access to an undirected simple graph on `0..vertex_count()`.
pub trait Adjacency {
    fn vertex_count(&self) -> usize;

    /// Edge membership; `false` for `u == v`.
    fn has_edge(&self, u: usize, v: usize) -> bool;

    /// Neighbors of `v` in ascending order.
    fn neighbors(&self, v: usize) -> Vec<usize>;

    fn degree(&self, v: usize) -> usize {
        self.neighbors(v).len()
    }

    fn is_isolated(&self, v: usize) -> bool {
        self.degree(v) == 0
    }

    /// All edges `(u, v)` with `u < v`, sorted lexicographically.
    fn edges(&self) -> Vec<(usize, usize)> {
        let mut out = Vec::new();
        for u in 0..self.vertex_count() {
            out.extend(
                self.neighbors(u)
                    .into_iter()
                    .filter(|&v| v > u)
                    .map(|v| (u, v)),
            );
        }
        out
    }

    fn edge_count(&self) -> usize {
        (0..self.vertex_count())
            .map(|v| self.degree(v))
            .sum::<usize>()
            / 2
    }
}

/// Minimum degree over all vertices (0 for the empty graph).
pub fn min_degree<G: Adjacency + ?Sized>(g: &G) -> usize {
    (0..g.vertex_count())
        .map(|v| g.degree(v))
        .min()
        .unwrap_or(0)
}

/// Edge-membership index: a bit matrix for small or dense graphs, binary
/// search in the sorted adjacency lists otherwise.
#[derive(Debug, Clone)]
enum EdgeIndex {
    Bits { n: usize, words: Vec<u64> },
    Sorted,
}

const BIT_MATRIX_ALWAYS: usize = 4096;
const BIT_MATRIX_MAX: usize = 16384;

impl EdgeIndex {
    fn build(n: usize, offsets: &[usize], targets: &[u32]) -> Self {
        let dense_enough = (targets.len() as u128) * 32 >= (n as u128 * n as u128) / 8;
        if n <= BIT_MATRIX_ALWAYS || (n <= BIT_MATRIX_MAX && dense_enough) {
            let mut words = vec![0u64; (n * n).div_ceil(64)];
            for u in 0..n {
                for &v in &targets[offsets[u]..offsets[u + 1]] {
                    let bit = u * n + v as usize;
                    words[bit / 64] |= 1 << (bit % 64);
                }
            }
            EdgeIndex::Bits { n, words }
        } else {
            EdgeIndex::Sorted
        }
    }

    fn bit(&self, u: usize, v: usize) -> Option<bool> {
        match self {
            EdgeIndex::Bits { n, words } => {
                let bit = u * n + v;
                Some(words[bit / 64] >> (bit % 64) & 1 == 1)
            }
            EdgeIndex::Sorted => None,
        }
    }
}

/// An explicit graph: sorted adjacency lists in compressed form, with a bit matrix
/// for edge membership when `n` is small or the graph dense.
#[derive(Debug, Clone)]
pub struct Graph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
    index: EdgeIndex,
}

impl Graph {
    pub fn empty(n: usize) -> Self {
        Graph::from_pairs(n, Vec::new())
    }

    /// Builds a graph from an edge list. Duplicates (in either orientation)
    /// collapse; self-loops and out-of-range endpoints are rejected.
    pub fn from_edges<I>(n: usize, edges: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize)>,
    {
        if n > u32::MAX as usize {
            return Err(invalid(format!("n = {n} exceeds the u32 vertex id range")));
        }
        let mut list = Vec::new();
        for (u, v) in edges {
            if u >= n || v >= n {
                return Err(invalid(format!("edge ({u}, {v}) out of range for n = {n}")));
            }
            if u == v {
                return Err(invalid(format!("self-loop at vertex {u}")));
            }
            list.push((u as u32, v as u32));
        }
        Ok(Graph::from_pairs(n, list))
    }

    /// Compressed adjacency from `u != v` pairs; lists are sorted and
    /// deduplicated in place.
    fn from_pairs(n: usize, edges: Vec<(u32, u32)>) -> Self {
        let mut offsets = vec![0usize; n + 1];
        for &(u, v) in &edges {
            offsets[u as usize + 1] += 1;
            offsets[v as usize + 1] += 1;
        }
        for i in 0..n {
            offsets[i + 1] += offsets[i];
        }
        let mut fill = offsets[..n].to_vec();
        let mut targets = vec![0u32; offsets[n]];
        for (u, v) in edges {
            targets[fill[u as usize]] = v;
            fill[u as usize] += 1;
            targets[fill[v as usize]] = u;
            fill[v as usize] += 1;
        }
        let mut write = 0;
        for v in 0..n {
            let (start, end) = (offsets[v], offsets[v + 1]);
            targets[start..end].sort_unstable();
            offsets[v] = write;
            let mut last = None;
            for i in start..end {
                let t = targets[i];
                if last != Some(t) {
                    targets[write] = t;
                    write += 1;
                    last = Some(t);
                }
            }
        }
        offsets[n] = write;
        targets.truncate(write);
        let index = EdgeIndex::build(n, &offsets, &targets);
        Graph {
            offsets,
            targets,
            index,
        }
    }

    /// Materializes any graph behind the [`Adjacency`] trait.
    pub fn from_adjacency<G: Adjacency + ?Sized>(g: &G) -> Self {
        let edges = g
            .edges()
            .into_iter()
            .map(|(u, v)| (u as u32, v as u32))
            .collect();
        Graph::from_pairs(g.vertex_count(), edges)
    }

    pub fn adjacent(&self, v: usize) -> &[u32] {
        &self.targets[self.offsets[v]..self.offsets[v + 1]]
    }

    /// Writes the graph file format: `n m`, then one `u v` line per edge
    /// with `u < v`, sorted lexicographically.
    pub fn write_to<W: Write>(&self, w: W) -> Result<()> {
        write_graph(self, w)
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines().enumerate().filter_map(|(i, l)| match l {
            Ok(l) if l.trim().is_empty() => None,
            other => Some((i + 1, other)),
        });
        let (lineno, header) = lines.next().ok_or_else(|| parse_err(1, "missing header"))?;
        let header = header?;
        let (n, m) = parse_pair(&header, lineno)?;
        let mut edges = Vec::with_capacity(m);
        let mut last = None;
        for _ in 0..m {
            let (lineno, line) = lines
                .next()
                .ok_or_else(|| parse_err(lineno, format!("expected {m} edge lines")))?;
            let (u, v) = parse_pair(&line?, lineno)?;
            if u >= v || v >= n {
                return Err(parse_err(
                    lineno,
                    format!("edge ({u}, {v}) must satisfy u < v < n"),
                ));
            }
            if last.is_some_and(|prev| prev >= (u, v)) {
                return Err(parse_err(lineno, "edges must be strictly increasing"));
            }
            last = Some((u, v));
            edges.push((u as u32, v as u32));
        }
        if let Some((lineno, _)) = lines.next() {
            return Err(parse_err(lineno, "trailing data after the last edge"));
        }
        if n > u32::MAX as usize {
            return Err(invalid(format!("n = {n} exceeds the u32 vertex id range")));
        }
        Ok(Graph::from_pairs(n, edges))
    }
}

fn parse_pair(line: &str, lineno: usize) -> Result<(usize, usize)> {
    let mut it = line.split_whitespace().map(|t| {
        t.parse::<usize>()
            .map_err(|_| parse_err(lineno, format!("bad integer {t:?}")))
    });
    let a = it
        .next()
        .ok_or_else(|| parse_err(lineno, "expected two integers"))??;
    let b = it
        .next()
        .ok_or_else(|| parse_err(lineno, "expected two integers"))??;
    if it.next().is_some() {
        return Err(parse_err(lineno, "expected exactly two integers"));
    }
    Ok((a, b))
}

/// Writes any [`Adjacency`] in the graph file format.
pub fn write_graph<G: Adjacency + ?Sized, W: Write>(g: &G, mut w: W) -> Result<()> {
    let edges = g.edges();
    writeln!(w, "{} {}", g.vertex_count(), edges.len())?;
    for (u, v) in edges {
        writeln!(w, "{u} {v}")?;
    }
    Ok(())
}

impl Adjacency for Graph {
    fn vertex_count(&self) -> usize {
        self.offsets.len() - 1
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        let n = self.vertex_count();
        if u == v || u >= n || v >= n {
            return false;
        }
        self.index.bit(u, v).unwrap_or_else(|| {
            let (a, b) = if self.adjacent(u).len() <= self.adjacent(v).len() {
                (u, v)
            } else {
                (v, u)
            };
            self.adjacent(a).binary_search(&(b as u32)).is_ok()
        })
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        self.adjacent(v).iter().map(|&u| u as usize).collect()
    }

    fn degree(&self, v: usize) -> usize {
        self.offsets[v + 1] - self.offsets[v]
    }

    fn edge_count(&self) -> usize {
        self.targets.len() / 2
    }
}

impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.offsets == other.offsets && self.targets == other.targets
    }
}

impl Eq for Graph {}

pub(crate) fn check_same_order(a: usize, b: usize) -> Result<()> {
    if a == b {
        Ok(())
    } else {
        Err(Error::DimensionMismatch {
            expected: a,
            found: b,
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)))).unwrap()
    }

    #[test]
    fn min_degree_examples() {
        assert_eq!(min_degree(&Graph::empty(4)), 0);
        assert_eq!(min_degree(&complete(5)), 4);
        let k37 = Graph::from_edges(10, (0..3).flat_map(|a| (3..10).map(move |b| (a, b)))).unwrap();
        assert_eq!(min_degree(&k37), 3);
    }

    #[test]
    fn adjacency_is_sorted_and_symmetric() {
        let g = Graph::from_edges(6, [(4, 1), (0, 5), (1, 0), (3, 1), (1, 4), (2, 5)]).unwrap();
        assert_eq!(g.edge_count(), 5);
        assert_eq!(g.adjacent(1), &[0, 3, 4]);
        for u in 0..6 {
            assert!(g.adjacent(u).windows(2).all(|w| w[0] < w[1]));
            for &v in g.adjacent(u) {
                assert!(g.has_edge(v as usize, u));
            }
            assert!(!g.has_edge(u, u));
        }
        assert!(!g.has_edge(2, 3));
    }

    #[test]
    fn rejects_self_loops_and_out_of_range() {
        assert!(Graph::from_edges(3, [(1, 1)]).is_err());
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
    }

    #[test]
    fn sorted_index_matches_bits() {
        let n = 20_000;
        let edges: Vec<_> = (0..n - 1).map(|i| (i, i + 1)).chain([(0, n - 1)]).collect();
        let g = Graph::from_edges(n, edges).unwrap();
        assert!(matches!(g.index, EdgeIndex::Sorted));
        assert!(g.has_edge(0, n - 1) && g.has_edge(n - 1, 0) && g.has_edge(17, 18));
        assert!(!g.has_edge(0, 2));
        assert_eq!(min_degree(&g), 2);
    }

    #[test]
    fn graph_file_round_trip() {
        let g = Graph::from_edges(5, [(3, 4), (0, 2), (1, 2)]).unwrap();
        let mut buf = Vec::new();
        g.write_to(&mut buf).unwrap();
        assert_eq!(
            String::from_utf8(buf.clone()).unwrap(),
            "5 3\n0 2\n1 2\n3 4\n"
        );
        assert_eq!(Graph::read_from(&buf[..]).unwrap(), g);
    }

    #[test]
    fn graph_file_rejects_malformed_input() {
        assert!(Graph::read_from(&b"3 1\n1 0\n"[..]).is_err());
        assert!(Graph::read_from(&b"3 2\n0 1\n0 1\n"[..]).is_err());
        assert!(Graph::read_from(&b"3 1\n0 3\n"[..]).is_err());
        assert!(Graph::read_from(&b"3 2\n0 1\n"[..]).is_err());
        assert!(Graph::read_from(&b"3 1\n0 1\n1 2\n"[..]).is_err());
    }
}
