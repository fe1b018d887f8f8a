//! Host graphs `H` with a prescribed minimum degree.
//!
//! Structured families are kept implicit: a complete bipartite graph or a
//! blown-up cycle on 10^5 vertices has billions of edges but answers
//! membership queries in constant time from a cluster label.

use std::fmt;
use std::str::FromStr;

use rand::Rng as _;
use serde::{Deserialize, Serialize};

use super::{Adjacency, Graph};
use crate::error::{invalid, Error, Result};
use crate::rng::rng_from_seed;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum HostFamily {
    /// Binomial random graph with degree deficits patched afterwards.
    RandomSupergraph,
    /// Cycle of `⌈1/α⌉` cliques, consecutive cliques completely joined.
    BlownUpCycle,
    /// Complete bipartite graph with parts of sizes `⌊αn⌋` and the rest.
    Bipartite,
}

impl HostFamily {
    pub const ALL: [HostFamily; 3] = [
        HostFamily::RandomSupergraph,
        HostFamily::BlownUpCycle,
        HostFamily::Bipartite,
    ];

    pub fn name(self) -> &'static str {
        match self {
            HostFamily::RandomSupergraph => "random-supergraph",
            HostFamily::BlownUpCycle => "blown-up-cycle",
            HostFamily::Bipartite => "bipartite",
        }
    }
}

impl fmt::Display for HostFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for HostFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        HostFamily::ALL
            .into_iter()
            .find(|f| f.name() == s)
            .ok_or_else(|| invalid(format!("unknown host family {s:?}")))
    }
}

/// A host graph, explicit or given by structure.
#[derive(Debug, Clone)]
pub enum HostGraph {
    Explicit(Graph),
    Complete {
        n: usize,
    },
    /// Part A is `0..part_a`, part B is `part_a..n`.
    CompleteBipartite {
        n: usize,
        part_a: usize,
    },
    /// `cluster[v]` is the clique index of `v`; cliques `i` and `i ± 1 (mod k)`
    /// are completely joined.
    BlownUpCycle {
        cluster: Vec<u32>,
        cluster_sizes: Vec<usize>,
    },
}

impl HostGraph {
    pub fn to_graph(&self) -> Graph {
        match self {
            HostGraph::Explicit(g) => g.clone(),
            other => Graph::from_adjacency(other),
        }
    }

    fn clusters_adjacent(k: usize, a: usize, b: usize) -> bool {
        let diff = a.abs_diff(b);
        k <= 3 || diff <= 1 || diff == k - 1
    }
}

impl From<Graph> for HostGraph {
    fn from(g: Graph) -> Self {
        HostGraph::Explicit(g)
    }
}

impl Adjacency for HostGraph {
    fn vertex_count(&self) -> usize {
        match self {
            HostGraph::Explicit(g) => g.vertex_count(),
            HostGraph::Complete { n } | HostGraph::CompleteBipartite { n, .. } => *n,
            HostGraph::BlownUpCycle { cluster, .. } => cluster.len(),
        }
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        let n = self.vertex_count();
        if u == v || u >= n || v >= n {
            return false;
        }
        match self {
            HostGraph::Explicit(g) => g.has_edge(u, v),
            HostGraph::Complete { .. } => true,
            HostGraph::CompleteBipartite { part_a, .. } => (u < *part_a) != (v < *part_a),
            HostGraph::BlownUpCycle {
                cluster,
                cluster_sizes,
            } => Self::clusters_adjacent(
                cluster_sizes.len(),
                cluster[u] as usize,
                cluster[v] as usize,
            ),
        }
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        match self {
            HostGraph::Explicit(g) => g.neighbors(v),
            _ => (0..self.vertex_count())
                .filter(|&u| self.has_edge(u, v))
                .collect(),
        }
    }

    fn degree(&self, v: usize) -> usize {
        match self {
            HostGraph::Explicit(g) => g.degree(v),
            HostGraph::Complete { n } => n - 1,
            HostGraph::CompleteBipartite { n, part_a } => {
                if v < *part_a {
                    n - part_a
                } else {
                    *part_a
                }
            }
            HostGraph::BlownUpCycle {
                cluster,
                cluster_sizes,
            } => {
                let k = cluster_sizes.len();
                let c = cluster[v] as usize;
                (0..k)
                    .filter(|&j| Self::clusters_adjacent(k, c, j))
                    .map(|j| cluster_sizes[j])
                    .sum::<usize>()
                    - 1
            }
        }
    }
}

fn check_alpha(alpha: f64) -> Result<()> {
    if alpha > 0.0 && alpha < 0.5 {
        Ok(())
    } else {
        Err(invalid(format!("alpha = {alpha} must lie in (0, 1/2)")))
    }
}

fn floor_alpha_n(alpha: f64, n: usize) -> usize {
    (alpha * n as f64).floor() as usize
}

/// Complete bipartite graph with part A = `0..⌊αn⌋` and part B the rest.
pub fn gen_bipartite_counterexample(n: usize, alpha: f64) -> Result<HostGraph> {
    check_alpha(alpha)?;
    let part_a = floor_alpha_n(alpha, n);
    if part_a < 1 {
        return Err(invalid(format!("⌊αn⌋ = 0 for n = {n}, alpha = {alpha}")));
    }
    Ok(HostGraph::CompleteBipartite { n, part_a })
}

fn blown_up_cycle(n: usize, alpha: f64) -> Result<HostGraph> {
    if n < 1 {
        return Err(invalid("n must be at least 1"));
    }
    let target = floor_alpha_n(alpha, n);
    let mut k = ((1.0 / alpha).ceil() as usize).clamp(1, n);
    loop {
        // Near-equal cluster sizes, larger clusters first.
        let cluster_sizes: Vec<usize> = (0..k).map(|i| n / k + usize::from(i < n % k)).collect();
        let cluster = cluster_sizes
            .iter()
            .enumerate()
            .flat_map(|(i, &size)| std::iter::repeat_n(i as u32, size))
            .collect();
        let h = HostGraph::BlownUpCycle {
            cluster,
            cluster_sizes,
        };
        // Very small n can leave the rounded clusters short of the bound;
        // fewer, larger clusters always fix that (k <= 3 is complete).
        if k <= 3 || super::min_degree(&h) >= target {
            return Ok(h);
        }
        k -= 1;
    }
}

fn random_supergraph(n: usize, alpha: f64, seed: u64) -> Result<HostGraph> {
    if n < 2 {
        return Err(invalid("the random-supergraph family needs n >= 2"));
    }
    let target = floor_alpha_n(alpha, n);
    let nf = n as f64;
    let p = (alpha * nf / (nf - 1.0) + 3.0 * ((nf + 1.0).ln() / nf).sqrt()).min(1.0);
    let mut rng = rng_from_seed(seed);
    let mut adj = vec![Vec::new(); n];
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                adj[u].push(v);
                adj[v].push(u);
            }
        }
    }
    // Patch deficient vertices in id order with uniformly chosen
    // non-neighbors.
    for v in 0..n {
        while adj[v].len() < target {
            let u = rng.gen_range(0..n);
            if u != v && !adj[v].contains(&u) {
                adj[v].push(u);
                adj[u].push(v);
            }
        }
    }
    let edges = adj
        .iter()
        .enumerate()
        .flat_map(|(u, list)| list.iter().filter(move |&&v| v > u).map(move |&v| (u, v)));
    Ok(HostGraph::Explicit(Graph::from_edges(n, edges)?))
}

/// A host graph from `family` with minimum degree at least `⌊αn⌋`.
pub fn gen_min_degree_h(n: usize, alpha: f64, family: HostFamily, seed: u64) -> Result<HostGraph> {
    check_alpha(alpha)?;
    let h = match family {
        HostFamily::Bipartite => gen_bipartite_counterexample(n, alpha)?,
        HostFamily::BlownUpCycle => blown_up_cycle(n, alpha)?,
        HostFamily::RandomSupergraph => random_supergraph(n, alpha, seed)?,
    };
    debug_assert!(super::min_degree(&h) >= floor_alpha_n(alpha, n));
    Ok(h)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::min_degree;
    use crate::oracle::exact_hamilton;

    #[test]
    fn bipartite_examples() {
        let h = gen_bipartite_counterexample(10, 0.3).unwrap();
        assert_eq!(min_degree(&h), 3);
        assert_eq!(h.edge_count(), 21);
        assert!(h.has_edge(0, 3) && !h.has_edge(0, 1) && !h.has_edge(5, 9));

        let star = gen_bipartite_counterexample(4, 0.25).unwrap().to_graph();
        assert_eq!(star.neighbors(0), vec![1, 2, 3]);
        assert_eq!(star.edge_count(), 3);

        let big = gen_bipartite_counterexample(1000, 0.3).unwrap();
        assert_eq!(min_degree(&big), 300);

        assert!(gen_bipartite_counterexample(3, 0.2).is_err());
        assert!(gen_bipartite_counterexample(10, 0.5).is_err());
    }

    #[test]
    fn unbalanced_bipartite_is_not_hamiltonian() {
        let h = gen_bipartite_counterexample(12, 0.3).unwrap().to_graph();
        assert!(!exact_hamilton(&h, 20).unwrap().hamiltonian);
    }

    #[test]
    fn bipartite_family_delegates() {
        let a = gen_min_degree_h(100, 0.3, HostFamily::Bipartite, 0)
            .unwrap()
            .to_graph();
        let b = gen_bipartite_counterexample(100, 0.3).unwrap().to_graph();
        assert_eq!(a, b);
    }

    #[test]
    fn blown_up_cycle_degree_scan() {
        let h = gen_min_degree_h(50, 0.3, HostFamily::BlownUpCycle, 0).unwrap();
        let explicit = h.to_graph();
        let scanned = (0..50).map(|v| explicit.neighbors(v).len()).min().unwrap();
        assert!(scanned >= 15, "min degree {scanned}");
        for v in 0..50 {
            assert_eq!(h.degree(v), explicit.degree(v));
        }
    }

    #[test]
    fn every_family_meets_its_degree_bound() {
        for family in HostFamily::ALL {
            for n in [4, 5, 7, 12, 31, 200] {
                for alpha in [0.05, 0.1, 0.26, 0.3, 0.34, 0.49] {
                    let Ok(h) = gen_min_degree_h(n, alpha, family, n as u64) else {
                        assert_eq!(family, HostFamily::Bipartite);
                        continue;
                    };
                    let bound = (alpha * n as f64).floor() as usize;
                    assert!(min_degree(&h) >= bound, "{family} n={n} alpha={alpha}");
                    assert_eq!(h.to_graph().edge_count(), h.edge_count());
                }
            }
        }
    }

    #[test]
    fn random_supergraph_is_seeded() {
        let a = gen_min_degree_h(60, 0.3, HostFamily::RandomSupergraph, 4)
            .unwrap()
            .to_graph();
        let b = gen_min_degree_h(60, 0.3, HostFamily::RandomSupergraph, 4)
            .unwrap()
            .to_graph();
        assert_eq!(a, b);
    }

    #[test]
    fn rejects_alpha_out_of_range() {
        for alpha in [0.0, -0.1, 0.5, 0.7] {
            for family in HostFamily::ALL {
                assert!(gen_min_degree_h(100, alpha, family, 0).is_err());
            }
        }
    }

    #[test]
    fn family_names_round_trip() {
        for f in HostFamily::ALL {
            assert_eq!(f.name().parse::<HostFamily>().unwrap(), f);
        }
    }
}
