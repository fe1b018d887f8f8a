//! A perturbed instance: host graph `H`, point set, and the geometric graph
//! `G` and tessellation they induce.

use serde::{Deserialize, Serialize};

use crate::error::{invalid, Result};
use crate::geometry::{Norm, Positions, Tessellation};
use crate::graphs::{
    check_same_order, gen_min_degree_h, sample_positions, union_graph, Adjacency, GeometricGraph,
    HostFamily, HostGraph, UnionGraph,
};
use crate::rng::derive_seed;

/// How the connection radius is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadiusSpec {
    /// The radius itself.
    Radius(f64),
    /// The constant `C` of `r = (C/n)^(1/d)`.
    Constant(f64),
}

impl RadiusSpec {
    pub fn resolve(self, n: usize, dim: usize) -> Result<f64> {
        match self {
            RadiusSpec::Radius(r) => Ok(r),
            RadiusSpec::Constant(c) => radius_from_constant(c, n, dim),
        }
    }
}

/// `r = (C/n)^(1/d)`.
pub fn radius_from_constant(c: f64, n: usize, dim: usize) -> Result<f64> {
    if c.is_nan() || c <= 0.0 || n == 0 || dim == 0 {
        return Err(invalid(format!(
            "need C > 0, n >= 1, d >= 1 (C = {c}, n = {n}, d = {dim})"
        )));
    }
    let x = c / n as f64;
    Ok(match dim {
        1 => x,
        2 => x.sqrt(),
        _ => x.powf(1.0 / dim as f64),
    })
}

/// Inverse of [`radius_from_constant`]: `C = n·r^d`.
pub fn constant_from_radius(r: f64, n: usize, dim: usize) -> f64 {
    n as f64 * r.powi(dim as i32)
}

#[derive(Debug, Clone)]
pub struct PerturbedInstance {
    host: HostGraph,
    geometric: GeometricGraph,
    tessellation: Tessellation,
    seed: u64,
}

impl PerturbedInstance {
    pub fn new(
        positions: Positions,
        host: HostGraph,
        radius: f64,
        norm: Norm,
        seed: u64,
    ) -> Result<Self> {
        check_same_order(host.vertex_count(), positions.len())?;
        let tessellation = Tessellation::new(positions.dim(), radius, norm, positions.len())?;
        let geometric = GeometricGraph::new(positions, radius, norm)?;
        Ok(PerturbedInstance {
            host,
            geometric,
            tessellation,
            seed,
        })
    }

    /// Draws an instance from `seed`: positions from
    /// `derive_seed(seed, [0])`, a random host (if the family is random)
    /// from `derive_seed(seed, [1])`.
    pub fn generate(spec: &InstanceSpec, seed: u64) -> Result<Self> {
        let positions = sample_positions(spec.n, spec.dim, derive_seed(seed, &[0]))?;
        let host = gen_min_degree_h(spec.n, spec.alpha, spec.family, derive_seed(seed, &[1]))?;
        let radius = spec.radius.resolve(spec.n, spec.dim)?;
        PerturbedInstance::new(positions, host, radius, spec.norm, seed)
    }

    pub fn n(&self) -> usize {
        self.host.vertex_count()
    }

    pub fn host(&self) -> &HostGraph {
        &self.host
    }

    pub fn geometric(&self) -> &GeometricGraph {
        &self.geometric
    }

    pub fn positions(&self) -> &Positions {
        self.geometric.positions()
    }

    pub fn tessellation(&self) -> &Tessellation {
        &self.tessellation
    }

    pub fn seed(&self) -> u64 {
        self.seed
    }

    pub fn union(&self) -> UnionGraph<'_, HostGraph, GeometricGraph> {
        union_graph(&self.host, &self.geometric).expect("orders checked at construction")
    }
}

/// Parameters for generating a [`PerturbedInstance`].
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct InstanceSpec {
    pub n: usize,
    pub dim: usize,
    pub norm: Norm,
    pub alpha: f64,
    pub family: HostFamily,
    pub radius: RadiusSpec,
}
