use std::collections::{BTreeSet, HashMap};

use serde::Serialize;

use super::certificate::Provenance;
use super::{BuildFailure, FailureStage};
use crate::cells::{CellClassification, CellSet, GammaGraph};
use crate::geometry::CellId;
use crate::union_find::UnionFind;

/// One step-1 link: `c` and the `{u, v}`-linked cell `c′` it was joined to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct ComponentLink {
    pub cell: CellId,
    pub linked_cell: CellId,
    pub u: u32,
    pub v: u32,
    pub x: u32,
    pub y: u32,
}

impl ComponentLink {
    /// Edges removed from the component cycles: `uv` and `xy`.
    pub fn deleted(&self) -> [(u32, u32); 2] {
        [(self.u, self.v), (self.x, self.y)]
    }

    /// Host edges added in their place: `ux` and `vy`.
    pub fn replacement(&self) -> [(u32, u32); 2] {
        [(self.u, self.x), (self.v, self.y)]
    }
}

/// Path `P_c` through the occupants of a sparse cell, spliced into the
/// final cycle in place of the anchor edge `e_c = xy`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct AbsorberPath {
    pub cell: CellId,
    pub linked_cell: CellId,
    pub anchor: (u32, u32),
    /// Runs from `anchor.0` to `anchor.1`.
    pub path: Vec<u32>,
    /// One entry per consecutive pair of `path`.
    pub provenance: Vec<Provenance>,
}

/// Γ′: the components of Γ joined by the step-1 link edges.
#[derive(Debug, Clone)]
pub struct GammaPrime {
    uf: UnionFind,
    /// Γ-components merged into each root.
    members: Vec<Vec<usize>>,
    cells: Vec<usize>,
    unforbidden: Vec<usize>,
    min_cell: Vec<CellId>,
    /// `(cells, min cell, root)` of every live component.
    by_size: BTreeSet<(usize, CellId, usize)>,
    links: Vec<(CellId, CellId)>,
}

impl GammaPrime {
    fn new(gamma: &GammaGraph, forbidden: &CellSet) -> Self {
        let t = gamma.component_count();
        let comps = gamma.components();
        let cells: Vec<usize> = comps.iter().map(Vec::len).collect();
        let unforbidden = comps
            .iter()
            .map(|cs| cs.iter().filter(|&&c| !forbidden.contains(c)).count())
            .collect();
        let min_cell: Vec<CellId> = comps.iter().map(|cs| cs[0]).collect();
        let by_size = (0..t).map(|i| (cells[i], min_cell[i], i)).collect();
        GammaPrime {
            uf: UnionFind::new(t),
            members: (0..t).map(|i| vec![i]).collect(),
            cells,
            unforbidden,
            min_cell,
            by_size,
            links: Vec::new(),
        }
    }

    pub fn component_count(&self) -> usize {
        self.by_size.len()
    }

    pub fn is_connected(&self) -> bool {
        self.by_size.len() <= 1
    }

    /// Link edges added so far, in order.
    pub fn links(&self) -> &[(CellId, CellId)] {
        &self.links
    }

    /// Γ′-component (by root) of the Γ-component `gc`.
    pub fn root_of(&mut self, gc: usize) -> usize {
        self.uf.find(gc)
    }

    /// Γ-components making up the Γ′-component with root `root`.
    pub fn members(&self, root: usize) -> &[usize] {
        &self.members[root]
    }

    pub fn unforbidden(&self, root: usize) -> usize {
        self.unforbidden[root]
    }

    /// Root of the smallest component, ties to the smallest minimum cell.
    pub(super) fn smallest(&self) -> Option<usize> {
        self.by_size.first().map(|&(_, _, root)| root)
    }

    pub(super) fn mark_forbidden(&mut self, root: usize) {
        self.unforbidden[root] -= 1;
    }

    /// Adds the link edge `{a, b}` between the components rooted at `ra`
    /// and `rb`; returns the merged root.
    pub(super) fn link(&mut self, a: CellId, b: CellId, ra: usize, rb: usize) -> usize {
        self.links.push((a, b));
        self.by_size
            .remove(&(self.cells[ra], self.min_cell[ra], ra));
        self.by_size
            .remove(&(self.cells[rb], self.min_cell[rb], rb));
        let root = self
            .uf
            .union(ra, rb)
            .expect("linked components are distinct");
        let other = if root == ra { rb } else { ra };
        let moved = std::mem::take(&mut self.members[other]);
        self.members[root].extend(moved);
        self.cells[root] = self.cells[ra] + self.cells[rb];
        self.unforbidden[root] = self.unforbidden[ra] + self.unforbidden[rb];
        self.min_cell[root] = self.min_cell[ra].min(self.min_cell[rb]);
        self.by_size
            .insert((self.cells[root], self.min_cell[root], root));
        root
    }

    fn roots(&self) -> impl Iterator<Item = usize> + '_ {
        self.by_size.iter().map(|&(_, _, r)| r)
    }
}

/// Bookkeeping shared by the build stages.
#[derive(Debug, Clone)]
pub struct BuildState {
    pub gamma_prime: GammaPrime,
    /// 𝓕.
    pub forbidden: CellSet,
    /// 𝓕*.
    pub starved: CellSet,
    /// F = F_s ∪ F_d, indexed by vertex.
    reserved: Vec<bool>,
    reserved_count: usize,
    pub links: Vec<ComponentLink>,
    pub absorbers: Vec<AbsorberPath>,
    /// The one E-edge each cell may span.
    cell_edges: HashMap<CellId, (u32, u32)>,
    /// Largest `|𝓕 ∪ 𝓕*|` seen.
    pub forbidden_peak: usize,
}

impl BuildState {
    /// 𝓕 = sparse cells, 𝓕* = dense cells forming a component on their own.
    pub fn new(classification: &CellClassification, gamma: &GammaGraph) -> Self {
        let cell_count = classification.cell_count();
        let mut forbidden = CellSet::new(cell_count);
        for c in classification.sparse_cells() {
            forbidden.insert(c);
        }
        let mut starved = CellSet::new(cell_count);
        for comp in gamma.components() {
            if let [only] = comp[..] {
                starved.insert(only);
            }
        }
        let gamma_prime = GammaPrime::new(gamma, &forbidden);
        let forbidden_peak = forbidden.len() + starved.len();
        BuildState {
            gamma_prime,
            forbidden,
            starved,
            reserved: vec![false; classification.vertex_count()],
            reserved_count: 0,
            links: Vec::new(),
            absorbers: Vec::new(),
            cell_edges: HashMap::new(),
            forbidden_peak,
        }
    }

    pub fn is_reserved(&self, v: usize) -> bool {
        self.reserved[v]
    }

    pub fn reserved_count(&self) -> usize {
        self.reserved_count
    }

    /// Reserved vertices, ascending.
    pub fn reserved_vertices(&self) -> Vec<usize> {
        (0..self.reserved.len())
            .filter(|&v| self.reserved[v])
            .collect()
    }

    /// E_d.
    pub fn deleted_edges(&self) -> Vec<(u32, u32)> {
        self.links.iter().flat_map(ComponentLink::deleted).collect()
    }

    /// E_d*.
    pub fn replacement_edges(&self) -> Vec<(u32, u32)> {
        self.links
            .iter()
            .flat_map(ComponentLink::replacement)
            .collect()
    }

    /// E_s.
    pub fn absorber_edges(&self) -> Vec<(u32, u32)> {
        self.absorbers.iter().map(|a| a.anchor).collect()
    }

    /// The E-edge spanned inside `c`, if any.
    pub fn cell_edge(&self, c: CellId) -> Option<(u32, u32)> {
        self.cell_edges.get(&c).copied()
    }

    pub fn forbidden_and_starved(&self) -> usize {
        self.forbidden.len() + self.starved.len()
    }

    pub(super) fn reserve(&mut self, v: u32) {
        if !std::mem::replace(&mut self.reserved[v as usize], true) {
            self.reserved_count += 1;
        }
    }

    pub(super) fn set_cell_edge(
        &mut self,
        c: CellId,
        edge: (u32, u32),
        stage: FailureStage,
    ) -> Result<(), BuildFailure> {
        if let Some(old) = self.cell_edges.insert(c, edge) {
            return Err(BuildFailure::new(
                stage,
                format!("cell {} already spans the reserved edge {old:?}", c.index()),
            )
            .with_cells([c.index()]));
        }
        Ok(())
    }

    pub(super) fn note_budget(&mut self) {
        self.forbidden_peak = self.forbidden_peak.max(self.forbidden_and_starved());
    }

    /// Checks the bookkeeping invariants, returning the first violation.
    pub fn audit(
        &self,
        classification: &CellClassification,
        gamma: &GammaGraph,
    ) -> Result<(), String> {
        if let Some(c) = self.starved.iter().find(|&c| self.forbidden.contains(c)) {
            return Err(format!("cell {} is both forbidden and starved", c.index()));
        }
        if let Some(c) = classification
            .sparse_cells()
            .find(|&c| !self.forbidden.contains(c))
        {
            return Err(format!("sparse cell {} is not forbidden", c.index()));
        }
        let mut per_cell: HashMap<CellId, usize> = HashMap::new();
        for v in self.reserved_vertices() {
            let c = classification.cell_of_vertex(v);
            let k = per_cell.entry(c).or_default();
            *k += 1;
            if *k > 2 {
                return Err(format!(
                    "cell {} holds more than 2 reserved vertices",
                    c.index()
                ));
            }
        }
        for (&c, &(a, b)) in &self.cell_edges {
            let (ca, cb) = (
                classification.cell_of_vertex(a as usize),
                classification.cell_of_vertex(b as usize),
            );
            if ca != c || cb != c || !self.reserved[a as usize] || !self.reserved[b as usize] {
                return Err(format!(
                    "edge {a}-{b} is not a reserved edge inside cell {}",
                    c.index()
                ));
            }
        }
        if !self.gamma_prime.is_connected() {
            let mut starved_per_root: HashMap<usize, usize> = HashMap::new();
            let mut uf = self.gamma_prime.uf.clone();
            for c in self.starved.iter() {
                let Some(gc) = gamma.component_of(c) else {
                    return Err(format!("starved cell {} is not dense", c.index()));
                };
                *starved_per_root.entry(uf.find(gc)).or_default() += 1;
            }
            for root in self.gamma_prime.roots() {
                if self.gamma_prime.unforbidden[root] == 0 {
                    return Err(format!("a component of Γ′ (root {root}) lies inside 𝓕"));
                }
                if starved_per_root.get(&root).copied().unwrap_or(0) > 1 {
                    return Err(format!(
                        "a component of Γ′ (root {root}) has several starved cells"
                    ));
                }
            }
        }
        Ok(())
    }
}
