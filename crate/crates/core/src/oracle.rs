//! Exact Hamiltonicity for small graphs, used as ground truth.

use rand::Rng as _;
use serde::Serialize;

use crate::builder::{
    find_hamilton, verify, verify_with, CycleCertificate, FailureStage, Provenance,
};
use crate::error::{invalid, Error, Result};
use crate::geometry::Norm;
use crate::graphs::{gen_min_degree_h, sample_positions, Adjacency, Graph, HostFamily};
use crate::instance::PerturbedInstance;
use crate::rng::{derive_seed, rng_from_seed};

pub const DEFAULT_LIMIT: usize = 20;

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct OracleResult {
    pub hamiltonian: bool,
    /// A Hamilton cycle starting at vertex 0, when one exists.
    pub cycle: Option<Vec<usize>>,
}

/// Decides Hamiltonicity by dynamic programming over vertex subsets
/// containing vertex 0; `reach[S]` is the set of endpoints of paths from 0
/// covering exactly `S`.
pub fn exact_hamilton<G: Adjacency + ?Sized>(graph: &G, limit: usize) -> Result<OracleResult> {
    let n = graph.vertex_count();
    if n > limit || n > 31 {
        return Err(Error::TooLarge {
            n,
            limit: limit.min(31),
        });
    }
    let no = OracleResult {
        hamiltonian: false,
        cycle: None,
    };
    if n < 3 {
        return Ok(no);
    }
    let adj: Vec<u32> = (0..n)
        .map(|v| graph.neighbors(v).iter().fold(0u32, |m, &w| m | 1 << w))
        .collect();
    let full = (1usize << n) - 1;
    let mut reach = vec![0u32; 1 << n];
    reach[1] = 1;
    for mask in (1..=full).step_by(2) {
        let ends = reach[mask];
        if ends == 0 {
            continue;
        }
        for v in BitIter(ends) {
            for w in BitIter(adj[v] & !(mask as u32)) {
                reach[mask | 1 << w] |= 1 << w;
            }
        }
    }
    let Some(last) = BitIter(reach[full] & adj[0]).next() else {
        return Ok(no);
    };

    let mut cycle = vec![last];
    let mut mask = full;
    let mut cur = last;
    while cur != 0 {
        mask &= !(1 << cur);
        cur = BitIter(reach[mask] & adj[cur])
            .next()
            .expect("a predecessor exists on a reachable path");
        cycle.push(cur);
    }
    cycle.reverse();
    assert!(
        is_hamilton_cycle(graph, &cycle),
        "extracted cycle must verify"
    );
    Ok(OracleResult {
        hamiltonian: true,
        cycle: Some(cycle),
    })
}

struct BitIter(u32);

impl Iterator for BitIter {
    type Item = usize;

    fn next(&mut self) -> Option<usize> {
        if self.0 == 0 {
            return None;
        }
        let i = self.0.trailing_zeros() as usize;
        self.0 &= self.0 - 1;
        Some(i)
    }
}

/// Whether `cycle` visits every vertex once along edges of `graph`.
pub fn is_hamilton_cycle<G: Adjacency + ?Sized>(graph: &G, cycle: &[usize]) -> bool {
    let order: Vec<u32> = cycle.iter().map(|&v| v as u32).collect();
    let cert = CycleCertificate {
        provenance: vec![Provenance::H; order.len()],
        order,
    };
    verify_with(&cert, graph, &Graph::empty(graph.vertex_count()))
}

/// Settings for [`cross_validate`]. Per trial, `alpha`, the host family and
/// the radius are drawn at random.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CrossValidateParams {
    pub dim: usize,
    pub norm: Norm,
    pub alpha_range: (f64, f64),
    /// Radius range as fractions of the unit cube's diameter.
    pub radius_range: (f64, f64),
}

impl CrossValidateParams {
    pub fn new(dim: usize, norm: Norm) -> Self {
        CrossValidateParams {
            dim,
            norm,
            alpha_range: (0.1, 0.45),
            radius_range: (0.05, 1.2),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CrossValidateRecord {
    pub seed: u64,
    pub alpha: f64,
    pub family: HostFamily,
    pub radius: f64,
    pub builder_success: bool,
    pub failure_stage: Option<FailureStage>,
    pub certificate_verified: bool,
    pub oracle_hamiltonian: bool,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct CrossValidateReport {
    pub trials: usize,
    pub builder_successes: usize,
    pub oracle_hamiltonian: usize,
    /// Builder returned a certificate on a non-Hamiltonian instance.
    pub unsound: usize,
    /// Certificates that did not verify.
    pub verify_failures: usize,
    /// Hamiltonian instances the builder gave up on.
    pub builder_misses: usize,
    pub records: Vec<CrossValidateRecord>,
}

/// Runs the builder and the exact oracle side by side on `trials` random
/// instances of order `n`; trial `t` uses seed `derive_seed(seed, [t])`.
pub fn cross_validate(
    n: usize,
    trials: usize,
    params: &CrossValidateParams,
    seed: u64,
) -> Result<CrossValidateReport> {
    if n > DEFAULT_LIMIT {
        return Err(invalid(format!(
            "cross validation needs n <= {DEFAULT_LIMIT}, got {n}"
        )));
    }
    let mut report = CrossValidateReport::default();
    for t in 0..trials {
        let trial_seed = derive_seed(seed, &[t as u64]);
        let mut rng = rng_from_seed(derive_seed(trial_seed, &[2]));
        let alpha = rng.gen_range(params.alpha_range.0..=params.alpha_range.1);
        let family = HostFamily::ALL[rng.gen_range(0..HostFamily::ALL.len())];
        let diameter = params.norm.unit_diagonal(params.dim);
        let radius = diameter * rng.gen_range(params.radius_range.0..=params.radius_range.1);

        let positions = sample_positions(n, params.dim, derive_seed(trial_seed, &[0]))?;
        let host = gen_min_degree_h(n, alpha, family, derive_seed(trial_seed, &[1]))?;
        let instance = PerturbedInstance::new(positions, host, radius, params.norm, trial_seed)?;
        let truth = exact_hamilton(&instance.union(), DEFAULT_LIMIT)?.hamiltonian;
        let built = find_hamilton(&instance);
        let verified = built.as_ref().is_ok_and(|c| verify(c, &instance));

        report.trials += 1;
        report.oracle_hamiltonian += truth as usize;
        if built.is_ok() {
            report.builder_successes += 1;
            report.unsound += !truth as usize;
            report.verify_failures += !verified as usize;
        } else {
            report.builder_misses += truth as usize;
        }
        report.records.push(CrossValidateRecord {
            seed: trial_seed,
            alpha,
            family,
            radius,
            builder_success: built.is_ok(),
            failure_stage: built.as_ref().err().map(|f| f.stage),
            certificate_verified: verified,
            oracle_hamiltonian: truth,
        });
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn graph(n: usize, edges: &[(usize, usize)]) -> Graph {
        Graph::from_edges(n, edges.iter().copied()).unwrap()
    }

    /// Tries every cyclic order that starts at 0.
    fn brute_force(g: &Graph) -> bool {
        fn extend(g: &Graph, path: &mut Vec<usize>, used: &mut [bool]) -> bool {
            let n = used.len();
            if path.len() == n {
                return g.has_edge(path[n - 1], path[0]);
            }
            for w in 0..n {
                if !used[w] && g.has_edge(*path.last().unwrap(), w) {
                    used[w] = true;
                    path.push(w);
                    if extend(g, path, used) {
                        return true;
                    }
                    path.pop();
                    used[w] = false;
                }
            }
            false
        }
        let n = g.vertex_count();
        if n < 3 {
            return false;
        }
        let mut used = vec![false; n];
        used[0] = true;
        extend(g, &mut vec![0], &mut used)
    }

    #[test]
    fn small_examples() {
        let k3 = graph(3, &[(0, 1), (1, 2), (0, 2)]);
        let r = exact_hamilton(&k3, 20).unwrap();
        assert!(r.hamiltonian);
        assert_eq!(r.cycle.unwrap().len(), 3);

        assert!(
            !exact_hamilton(&graph(3, &[(0, 1), (1, 2)]), 20)
                .unwrap()
                .hamiltonian
        );

        let c5 = graph(5, &[(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)]);
        let cycle = exact_hamilton(&c5, 20).unwrap().cycle.unwrap();
        assert!(cycle == [0, 1, 2, 3, 4] || cycle == [0, 4, 3, 2, 1]);

        assert!(
            !exact_hamilton(&graph(2, &[(0, 1)]), 20)
                .unwrap()
                .hamiltonian
        );
        assert!(!exact_hamilton(&Graph::empty(0), 20).unwrap().hamiltonian);
    }

    #[test]
    fn petersen_is_not_hamiltonian() {
        let mut edges = Vec::new();
        for i in 0..5 {
            edges.push((i, (i + 1) % 5));
            edges.push((i, i + 5));
            edges.push((i + 5, (i + 2) % 5 + 5));
        }
        assert!(!exact_hamilton(&graph(10, &edges), 20).unwrap().hamiltonian);
    }

    #[test]
    fn limit_is_enforced() {
        let g = Graph::empty(21);
        assert!(matches!(
            exact_hamilton(&g, 20),
            Err(Error::TooLarge { n: 21, limit: 20 })
        ));
        assert!(exact_hamilton(&g, 21).is_ok());
    }

    proptest! {
        #[test]
        fn agrees_with_enumeration(n in 0usize..=7, bits in proptest::collection::vec(any::<bool>(), 21)) {
            let pairs = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v)));
            let edges: Vec<_> = pairs.zip(&bits).filter(|(_, &b)| b).map(|(e, _)| e).collect();
            let g = graph(n, &edges);
            let r = exact_hamilton(&g, 20).unwrap();
            prop_assert_eq!(r.hamiltonian, brute_force(&g));
            if let Some(c) = r.cycle {
                prop_assert!(is_hamilton_cycle(&g, &c));
            }
        }
    }

    #[test]
    fn cross_validate_basics() {
        let params = CrossValidateParams::new(2, Norm::L2);
        let empty = cross_validate(10, 0, &params, 1).unwrap();
        assert_eq!(empty.trials, 0);
        assert!(empty.records.is_empty());

        let report = cross_validate(10, 20, &CrossValidateParams::new(1, Norm::L2), 5).unwrap();
        assert_eq!(report.trials, 20);
        assert_eq!(report.unsound, 0);
        assert_eq!(report.verify_failures, 0);
    }

    #[test]
    fn complete_union_is_hamiltonian() {
        for n in [3, 10] {
            let g = graph(
                n,
                &(0..n)
                    .flat_map(|u| (u + 1..n).map(move |v| (u, v)))
                    .collect::<Vec<_>>(),
            );
            assert!(exact_hamilton(&g, 20).unwrap().hamiltonian);
        }
    }
}
