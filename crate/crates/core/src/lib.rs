//! Hamilton cycles in a dense graph perturbed by a random geometric graph.
//!
//! Given a host graph `H` on `n` vertices with minimum degree at least `αn`
//! and `n` uniform points in `[0, 1]^d`, [`find_hamilton`] builds a Hamilton
//! cycle of `H ∪ G`, where `G` joins points at `ℓ_p` distance at most `r`.
//! The construction works on a tessellation of the unit cube into cells
//! small enough that each cell is a clique of `G`, links the components of
//! dense cells through edges of `H` and absorbs the vertices of sparse cells
//! with short detours through `H`.
//!
//! Every returned [`CycleCertificate`] has been checked by [`verify`]; when
//! the construction cannot complete, a [`BuildFailure`] names the stage.
//!
//! ```
//! use perturbed_hamilton::{find_hamilton, verify, HostFamily, InstanceSpec, Norm,
//!     PerturbedInstance, RadiusSpec};
//!
//! let spec = InstanceSpec {
//!     n: 2000,
//!     dim: 2,
//!     norm: Norm::L2,
//!     alpha: 0.3,
//!     family: HostFamily::BlownUpCycle,
//!     radius: RadiusSpec::Constant(400.0),
//! };
//! let instance = PerturbedInstance::generate(&spec, 7).unwrap();
//! let cycle = find_hamilton(&instance).unwrap();
//! assert!(verify(&cycle, &instance));
//! ```

pub mod builder;
pub mod cells;
pub mod error;
pub mod experiments;
pub mod geometry;
pub mod graphs;
pub mod instance;
pub mod oracle;
pub mod rng;
#[cfg(test)]
mod test_support;
pub mod union_find;

pub use builder::{
    build, find_hamilton, verify, BuildFailure, BuildOutcome, BuildStats, CycleCertificate,
    FailureStage, Provenance,
};
pub use cells::{
    build_gamma, claim1_bounds, classify_cells, CellClass, CellClassification, ClaimBounds,
    GammaGraph,
};
pub use error::{Error, Result};
pub use geometry::{CellId, Norm, Point, Positions, Tessellation};
pub use graphs::{
    build_rgg, gen_bipartite_counterexample, gen_min_degree_h, sample_positions, Adjacency,
    GeometricGraph, Graph, HostFamily, HostGraph,
};
pub use instance::{radius_from_constant, InstanceSpec, PerturbedInstance, RadiusSpec};
pub use oracle::{exact_hamilton, OracleResult};
