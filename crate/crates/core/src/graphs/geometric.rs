//! Random geometric graphs: uniform points in `[0,1]^d`, joined when their
//! ℓp distance is at most `r`.

use rand::Rng as _;

use super::{Adjacency, Graph};
use crate::error::{invalid, Result};
use crate::geometry::{lp_distance, CellId, CubeGrid, Norm, Positions};
use crate::rng::rng_from_seed;

/// `n` independent uniform points of `[0,1]^d` drawn from the seeded
/// generator, coordinates in vertex-major order.
pub fn sample_positions(n: usize, dim: usize, seed: u64) -> Result<Positions> {
    if n < 1 || dim < 1 {
        return Err(invalid(format!(
            "need n >= 1 and d >= 1, got n = {n}, d = {dim}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let coords = (0..n * dim).map(|_| rng.gen::<f64>()).collect();
    Positions::from_flat(dim, coords)
}

/// Points bucketed into a grid of cubes whose side is at least `r`, so
/// every pair within distance `r` lies in the same or in adjacent buckets.
#[derive(Debug, Clone)]
struct Buckets {
    grid: CubeGrid,
    starts: Vec<u32>,
    members: Vec<u32>,
}

impl Buckets {
    fn new(positions: &Positions, radius: f64) -> Self {
        let n = positions.len();
        let dim = positions.dim();
        // Bucket side must be >= r; the (1 - 1e-9) keeps floor(1/r) from
        // landing a hair above that bound. Total buckets are capped near 2n.
        let by_radius = ((1.0 / radius) * (1.0 - 1e-9)).floor().max(1.0);
        let by_count = ((2 * n) as f64).powf(1.0 / dim as f64).floor().max(1.0);
        let per_axis = by_radius.min(by_count) as usize;
        let grid = CubeGrid::new(dim, per_axis).expect("bucket grid is capped near 2n cells");
        let cell_of: Vec<usize> = positions.iter().map(|p| grid.locate(p).index()).collect();
        let mut starts = vec![0u32; grid.cell_count() + 1];
        for &c in &cell_of {
            starts[c + 1] += 1;
        }
        for i in 0..grid.cell_count() {
            starts[i + 1] += starts[i];
        }
        let mut fill: Vec<u32> = starts[..grid.cell_count()].to_vec();
        let mut members = vec![0u32; n];
        for (v, &c) in cell_of.iter().enumerate() {
            members[fill[c] as usize] = v as u32;
            fill[c] += 1;
        }
        Buckets {
            grid,
            starts,
            members,
        }
    }

    fn bucket(&self, c: CellId) -> &[u32] {
        &self.members[self.starts[c.index()] as usize..self.starts[c.index() + 1] as usize]
    }

    /// Calls `f` for every point in the bucket of `c` and its neighbours.
    fn for_each_nearby(&self, c: CellId, mut f: impl FnMut(usize) -> bool) {
        for &v in self.bucket(c) {
            if !f(v as usize) {
                return;
            }
        }
        let mut stop = false;
        self.grid.for_each_friend(c, |b| {
            if stop {
                return;
            }
            for &v in self.bucket(b) {
                if !f(v as usize) {
                    stop = true;
                    return;
                }
            }
        });
    }
}

/// `G^d(n, r)` under an ℓp norm, represented by its point set.
///
/// Edge membership is a distance computation; neighbor queries go through
/// a bucket grid. Nothing is materialized, so this scales to instances whose
/// edge count would not fit in memory.
#[derive(Debug, Clone)]
pub struct GeometricGraph {
    positions: Positions,
    radius: f64,
    norm: Norm,
    buckets: Buckets,
}

impl GeometricGraph {
    pub fn new(positions: Positions, radius: f64, norm: Norm) -> Result<Self> {
        if positions.is_empty() {
            return Err(invalid("a geometric graph needs at least one point"));
        }
        if radius.is_nan() || radius < 0.0 {
            return Err(invalid(format!(
                "radius must be non-negative, got {radius}"
            )));
        }
        if positions.len() > u32::MAX as usize {
            return Err(invalid("too many points for u32 vertex ids"));
        }
        let buckets = Buckets::new(&positions, radius.max(f64::MIN_POSITIVE));
        Ok(GeometricGraph {
            positions,
            radius,
            norm,
            buckets,
        })
    }

    pub fn positions(&self) -> &Positions {
        &self.positions
    }

    pub fn radius(&self) -> f64 {
        self.radius
    }

    pub fn norm(&self) -> Norm {
        self.norm
    }

    pub fn distance(&self, u: usize, v: usize) -> f64 {
        lp_distance(self.positions.point(u), self.positions.point(v), self.norm)
    }

    fn bucket_of(&self, v: usize) -> CellId {
        self.buckets.grid.locate(self.positions.point(v))
    }

    /// Number of vertices with no neighbor within `r`, stopping each scan at
    /// the first neighbor found.
    pub fn isolated_count(&self) -> usize {
        (0..self.positions.len())
            .filter(|&v| self.is_isolated(v))
            .count()
    }

    /// Materializes the edge set.
    pub fn to_graph(&self) -> Graph {
        let mut edges = Vec::new();
        for c in self.buckets.grid.cells() {
            let here = self.buckets.bucket(c);
            for (i, &u) in here.iter().enumerate() {
                for &v in &here[i + 1..] {
                    if self.has_edge(u as usize, v as usize) {
                        edges.push((u as usize, v as usize));
                    }
                }
            }
            self.buckets.grid.for_each_friend(c, |b| {
                if b <= c {
                    return;
                }
                for &u in here {
                    for &v in self.buckets.bucket(b) {
                        if self.has_edge(u as usize, v as usize) {
                            edges.push((u as usize, v as usize));
                        }
                    }
                }
            });
        }
        Graph::from_edges(self.positions.len(), edges).expect("geometric edges are valid")
    }
}

impl Adjacency for GeometricGraph {
    fn vertex_count(&self) -> usize {
        self.positions.len()
    }

    fn has_edge(&self, u: usize, v: usize) -> bool {
        u != v && self.distance(u, v) <= self.radius
    }

    fn neighbors(&self, v: usize) -> Vec<usize> {
        let mut out = Vec::new();
        self.buckets.for_each_nearby(self.bucket_of(v), |u| {
            if self.has_edge(u, v) {
                out.push(u);
            }
            true
        });
        out.sort_unstable();
        out
    }

    fn is_isolated(&self, v: usize) -> bool {
        let mut isolated = true;
        self.buckets.for_each_nearby(self.bucket_of(v), |u| {
            if self.has_edge(u, v) {
                isolated = false;
            }
            isolated
        });
        isolated
    }
}

/// The random geometric graph on `positions` at radius `r` (closed
/// inequality), built with grid bucketing in expected `O(n + |E|)` work.
pub fn build_rgg(positions: &Positions, radius: f64, norm: Norm) -> Result<Graph> {
    Ok(GeometricGraph::new(positions.clone(), radius, norm)?.to_graph())
}

/// All-pairs reference for [`build_rgg`].
pub fn build_rgg_brute_force(positions: &Positions, radius: f64, norm: Norm) -> Result<Graph> {
    let n = positions.len();
    let mut edges = Vec::new();
    for u in 0..n {
        for v in u + 1..n {
            if lp_distance(positions.point(u), positions.point(v), norm) <= radius {
                edges.push((u, v));
            }
        }
    }
    Graph::from_edges(n, edges)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::min_degree;
    use proptest::prelude::*;

    #[test]
    fn sample_positions_shape_and_determinism() {
        let p = sample_positions(1, 3, 99).unwrap();
        assert_eq!((p.len(), p.dim()), (1, 3));
        assert!(p.point(0).iter().all(|c| (0.0..=1.0).contains(c)));
        assert_eq!(
            sample_positions(50, 2, 5).unwrap(),
            sample_positions(50, 2, 5).unwrap()
        );
        assert_ne!(
            sample_positions(50, 2, 5).unwrap(),
            sample_positions(50, 2, 6).unwrap()
        );
        assert!(sample_positions(0, 2, 1).is_err());
        assert!(sample_positions(3, 0, 1).is_err());
    }

    #[test]
    fn sample_positions_coordinate_means() {
        let p = sample_positions(100_000, 2, 2024).unwrap();
        for axis in 0..2 {
            let mean = p.iter().map(|x| x[axis]).sum::<f64>() / p.len() as f64;
            assert!((mean - 0.5).abs() < 0.01, "axis {axis} mean {mean}");
        }
    }

    #[test]
    fn closed_inequality_at_exact_radius() {
        let pos = Positions::from_flat(1, vec![0.25, 0.75]).unwrap();
        let g = build_rgg(&pos, 0.5, Norm::L2).unwrap();
        assert!(g.has_edge(0, 1));
        let pos = Positions::from_flat(2, vec![0.0, 0.0, 0.6, 0.8]).unwrap();
        assert!(build_rgg(&pos, 1.0, Norm::L2).unwrap().has_edge(0, 1));
        assert!(!build_rgg(&pos, 0.999, Norm::L2).unwrap().has_edge(0, 1));
    }

    #[test]
    fn single_point_is_edgeless() {
        let pos = Positions::from_flat(2, vec![0.5, 0.5]).unwrap();
        let g = build_rgg(&pos, 0.3, Norm::L2).unwrap();
        assert_eq!(g.edge_count(), 0);
        assert_eq!(min_degree(&g), 0);
    }

    #[test]
    fn matches_brute_force_on_200_points() {
        let pos = sample_positions(200, 2, 17).unwrap();
        assert_eq!(
            build_rgg(&pos, 0.2, Norm::L2).unwrap(),
            build_rgg_brute_force(&pos, 0.2, Norm::L2).unwrap()
        );
    }

    #[test]
    fn implicit_queries_match_materialized_graph() {
        let pos = sample_positions(300, 3, 8).unwrap();
        let g = GeometricGraph::new(pos, 0.15, Norm::L1).unwrap();
        let explicit = g.to_graph();
        for v in 0..300 {
            assert_eq!(g.neighbors(v), explicit.neighbors(v));
            assert_eq!(g.is_isolated(v), explicit.degree(v) == 0);
        }
        let isolated = (0..300).filter(|&v| explicit.degree(v) == 0).count();
        assert_eq!(g.isolated_count(), isolated);
    }

    fn norm_strategy() -> impl Strategy<Value = Norm> {
        prop_oneof![
            Just(Norm::L1),
            Just(Norm::L2),
            Just(Norm::LINF),
            Just(Norm::new(3.5).unwrap())
        ]
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn bucketed_equals_brute_force(
            n in 1usize..400, d in 1usize..4, r in 0.0f64..0.6, seed: u64, norm in norm_strategy()
        ) {
            let pos = sample_positions(n, d, seed).unwrap();
            prop_assert_eq!(
                build_rgg(&pos, r, norm).unwrap(),
                build_rgg_brute_force(&pos, r, norm).unwrap()
            );
        }

        #[test]
        fn permuting_points_relabels_edges(n in 2usize..120, seed: u64, shift in 1usize..50) {
            let pos = sample_positions(n, 2, seed).unwrap();
            let perm: Vec<usize> = (0..n).map(|i| (i + shift) % n).collect();
            let mut flat = Vec::new();
            for &i in &perm {
                flat.extend_from_slice(pos.point(i));
            }
            let permuted = Positions::from_flat(2, flat).unwrap();
            let a = build_rgg(&pos, 0.2, Norm::L2).unwrap();
            let b = build_rgg(&permuted, 0.2, Norm::L2).unwrap();
            prop_assert_eq!(a.edge_count(), b.edge_count());
            for (u, v) in b.edges() {
                prop_assert!(a.has_edge(perm[u], perm[v]));
            }
        }
    }
}
