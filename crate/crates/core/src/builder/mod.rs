//! Constructs a Hamilton cycle of `H ∪ G` from the cell structure, or
//! reports which stage of the construction broke down.

mod assemble;
mod certificate;
mod state;
mod steps;
mod traverse;

use std::fmt;

use serde::{Deserialize, Serialize};

pub use assemble::{assemble, assemble_parts};
pub use certificate::{verify, verify_with, CycleCertificate, Provenance};
pub use state::{AbsorberPath, BuildState, ComponentLink, GammaPrime};
pub use steps::{build_absorbers, connect_components};
pub use traverse::{euler_tour, traverse_component};

use crate::cells::{build_gamma, classify_cells, CellClass, CellClassification, GammaGraph};
use crate::instance::PerturbedInstance;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum FailureStage {
    NoDenseCells,
    ComponentLinkExhausted,
    AbsorberLinkExhausted,
    TraversalStarved,
    AssemblyInconsistent,
}

impl FailureStage {
    pub fn name(self) -> &'static str {
        match self {
            FailureStage::NoDenseCells => "no-dense-cells",
            FailureStage::ComponentLinkExhausted => "component-link-exhausted",
            FailureStage::AbsorberLinkExhausted => "absorber-link-exhausted",
            FailureStage::TraversalStarved => "traversal-starved",
            FailureStage::AssemblyInconsistent => "assembly-inconsistent",
        }
    }
}

impl fmt::Display for FailureStage {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// Cells and vertices implicated in a failure.
#[derive(Debug, Clone, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Witness {
    pub cells: Vec<usize>,
    pub vertices: Vec<usize>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize, thiserror::Error)]
#[error("{stage}: {detail}")]
pub struct BuildFailure {
    pub stage: FailureStage,
    pub detail: String,
    pub witness: Witness,
}

impl BuildFailure {
    pub fn new(stage: FailureStage, detail: impl Into<String>) -> Self {
        BuildFailure {
            stage,
            detail: detail.into(),
            witness: Witness::default(),
        }
    }

    pub fn with_cells(mut self, cells: impl IntoIterator<Item = usize>) -> Self {
        self.witness.cells.extend(cells);
        self
    }

    pub fn with_vertices(mut self, vertices: impl IntoIterator<Item = usize>) -> Self {
        self.witness.vertices.extend(vertices);
        self
    }
}

/// Summary of one build attempt.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BuildStats {
    pub n: usize,
    pub cells: usize,
    /// Expected occupancy `K` of a cell.
    pub expected_occupancy: f64,
    pub sparse_cells: usize,
    pub single_cells: usize,
    pub few_cells: usize,
    pub gamma_components: usize,
    pub links: usize,
    pub absorbers: usize,
    /// Largest `|𝓕 ∪ 𝓕*|` reached.
    pub forbidden_peak: usize,
    /// `e^{-K/6} n`.
    pub forbidden_budget: f64,
    pub warnings: Vec<String>,
}

/// A build result together with its statistics.
#[derive(Debug, Clone)]
pub struct BuildOutcome {
    pub result: Result<CycleCertificate, BuildFailure>,
    pub stats: BuildStats,
}

/// Runs the full construction on `instance`. Every certificate returned
/// has passed [`verify`].
pub fn find_hamilton(instance: &PerturbedInstance) -> Result<CycleCertificate, BuildFailure> {
    build(instance).result
}

/// [`find_hamilton`] with statistics about the cell structure and the
/// bookkeeping.
pub fn build(instance: &PerturbedInstance) -> BuildOutcome {
    let classification = classify_cells(instance);
    let gamma = build_gamma(&classification);
    let n = instance.n();
    let k = instance.tessellation().expected_occupancy();
    let mut stats = BuildStats {
        n,
        cells: classification.cell_count(),
        expected_occupancy: k,
        sparse_cells: classification.sparse_count(),
        single_cells: classification.count(CellClass::Single),
        few_cells: classification.count(CellClass::Few),
        gamma_components: gamma.component_count(),
        links: 0,
        absorbers: 0,
        forbidden_peak: 0,
        forbidden_budget: (-k / 6.0).exp() * n as f64,
        warnings: Vec::new(),
    };
    let mut state = BuildState::new(&classification, &gamma);
    let result = run(instance, &classification, &gamma, &mut state);
    stats.links = state.links.len();
    stats.absorbers = state.absorbers.len();
    stats.forbidden_peak = state.forbidden_peak;
    if state.forbidden_peak as f64 > stats.forbidden_budget {
        stats.warnings.push(format!(
            "forbidden cells peaked at {} against a budget of {:.3}",
            state.forbidden_peak, stats.forbidden_budget
        ));
    }
    BuildOutcome { result, stats }
}

fn audit(
    state: &BuildState,
    classification: &CellClassification,
    gamma: &GammaGraph,
) -> Result<(), BuildFailure> {
    if cfg!(debug_assertions) {
        state.audit(classification, gamma).map_err(|e| {
            BuildFailure::new(FailureStage::AssemblyInconsistent, format!("audit: {e}"))
        })?;
    }
    Ok(())
}

fn run(
    instance: &PerturbedInstance,
    classification: &CellClassification,
    gamma: &GammaGraph,
    state: &mut BuildState,
) -> Result<CycleCertificate, BuildFailure> {
    audit(state, classification, gamma)?;
    connect_components(state, gamma, classification, instance)?;
    audit(state, classification, gamma)?;
    build_absorbers(state, classification, instance)?;
    audit(state, classification, gamma)?;

    let n = instance.n();
    let mut used = vec![false; n];
    let cycles = gamma
        .components()
        .iter()
        .map(|comp| traverse_component(comp, state, classification, &mut used))
        .collect::<Result<Vec<_>, _>>()?;
    let cert = assemble(state, n, &cycles)?;
    if !verify(&cert, instance) {
        return Err(BuildFailure::new(
            FailureStage::AssemblyInconsistent,
            "assembled cycle failed verification",
        ));
    }
    Ok(cert)
}

#[cfg(test)]
mod tests;
