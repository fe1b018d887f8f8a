//! Cell occupancy, sparse/dense classification, linked cells and the
//! auxiliary graph Γ on dense cells.

use std::io::Write;

use serde::Serialize;

use crate::error::{invalid, Result};
use crate::geometry::{CellId, CubeGrid};
use crate::graphs::Adjacency;
use crate::instance::PerturbedInstance;
use crate::union_find::UnionFind;

/// Occupancy class of a cell. `Empty`, `Single` and `Few` are the sparse
/// classes (at most `R = 2·3^d` occupants).
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum CellClass {
    Empty,
    Single,
    Few,
    Dense,
}

impl CellClass {
    pub fn is_sparse(self) -> bool {
        self != CellClass::Dense
    }

    pub fn label(self) -> &'static str {
        match self {
            CellClass::Empty => "c0",
            CellClass::Single => "c1",
            CellClass::Few => "c2",
            CellClass::Dense => "dense",
        }
    }
}

/// `R = 2·3^d`, the largest occupancy of a sparse cell.
pub fn sparse_threshold(dim: usize) -> usize {
    (0..dim).fold(2usize, |acc, _| acc.saturating_mul(3))
}

/// A fixed-size set of cells.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CellSet {
    words: Vec<u64>,
    len: usize,
}

impl CellSet {
    pub fn new(cell_count: usize) -> Self {
        CellSet {
            words: vec![0; cell_count.div_ceil(64)],
            len: 0,
        }
    }

    pub fn contains(&self, c: CellId) -> bool {
        self.words[c.index() / 64] >> (c.index() % 64) & 1 == 1
    }

    /// Returns whether `c` was newly inserted.
    pub fn insert(&mut self, c: CellId) -> bool {
        let (w, b) = (c.index() / 64, c.index() % 64);
        let fresh = self.words[w] >> b & 1 == 0;
        self.words[w] |= 1 << b;
        self.len += usize::from(fresh);
        fresh
    }

    pub fn remove(&mut self, c: CellId) -> bool {
        let (w, b) = (c.index() / 64, c.index() % 64);
        let present = self.words[w] >> b & 1 == 1;
        self.words[w] &= !(1 << b);
        self.len -= usize::from(present);
        present
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
        self.len = 0;
    }

    pub fn iter(&self) -> impl Iterator<Item = CellId> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            (0..64)
                .filter(move |b| w >> b & 1 == 1)
                .map(move |b| CellId(i * 64 + b))
        })
    }

    pub fn union_len(&self, other: &CellSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a | b).count_ones() as usize)
            .sum()
    }
}

/// Per-cell occupants and classes for one instance.
#[derive(Debug, Clone)]
pub struct CellClassification {
    grid: CubeGrid,
    threshold: usize,
    starts: Vec<u32>,
    occupants: Vec<u32>,
    classes: Vec<CellClass>,
    vertex_cell: Vec<u32>,
}

impl CellClassification {
    pub fn new(instance: &PerturbedInstance) -> Self {
        let t = instance.tessellation();
        let grid = *t.grid();
        let cell_count = grid.cell_count();
        let vertex_cell: Vec<u32> = instance
            .positions()
            .iter()
            .map(|p| grid.locate(p).index() as u32)
            .collect();
        let mut starts = vec![0u32; cell_count + 1];
        for &c in &vertex_cell {
            starts[c as usize + 1] += 1;
        }
        for i in 0..cell_count {
            starts[i + 1] += starts[i];
        }
        let mut fill = starts[..cell_count].to_vec();
        let mut occupants = vec![0u32; vertex_cell.len()];
        // Vertices are visited in id order, so every occupant list is sorted.
        for (v, &c) in vertex_cell.iter().enumerate() {
            occupants[fill[c as usize] as usize] = v as u32;
            fill[c as usize] += 1;
        }
        let threshold = sparse_threshold(grid.dim());
        let classes = (0..cell_count)
            .map(|c| match (starts[c + 1] - starts[c]) as usize {
                0 => CellClass::Empty,
                1 => CellClass::Single,
                k if k <= threshold => CellClass::Few,
                _ => CellClass::Dense,
            })
            .collect();
        CellClassification {
            grid,
            threshold,
            starts,
            occupants,
            classes,
            vertex_cell,
        }
    }

    pub fn grid(&self) -> &CubeGrid {
        &self.grid
    }

    pub fn cell_count(&self) -> usize {
        self.classes.len()
    }

    /// `R = 2·3^d`.
    pub fn threshold(&self) -> usize {
        self.threshold
    }

    /// Occupants of `c` in ascending vertex order.
    pub fn occupants(&self, c: CellId) -> &[u32] {
        &self.occupants[self.starts[c.index()] as usize..self.starts[c.index() + 1] as usize]
    }

    pub fn occupancy(&self, c: CellId) -> usize {
        (self.starts[c.index() + 1] - self.starts[c.index()]) as usize
    }

    pub fn class(&self, c: CellId) -> CellClass {
        self.classes[c.index()]
    }

    pub fn is_dense(&self, c: CellId) -> bool {
        self.class(c) == CellClass::Dense
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_cell.len()
    }

    pub fn cell_of_vertex(&self, v: usize) -> CellId {
        CellId(self.vertex_cell[v] as usize)
    }

    pub fn cells_of_class(&self, class: CellClass) -> impl Iterator<Item = CellId> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(move |(_, &k)| k == class)
            .map(|(i, _)| CellId(i))
    }

    pub fn sparse_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.classes
            .iter()
            .enumerate()
            .filter(|(_, k)| k.is_sparse())
            .map(|(i, _)| CellId(i))
    }

    pub fn dense_cells(&self) -> impl Iterator<Item = CellId> + '_ {
        self.cells_of_class(CellClass::Dense)
    }

    pub fn count(&self, class: CellClass) -> usize {
        self.classes.iter().filter(|&&k| k == class).count()
    }

    pub fn sparse_count(&self) -> usize {
        self.cell_count() - self.count(CellClass::Dense)
    }

    /// Writes the per-cell census: `cell,coords,occupants,class`, with
    /// coordinates joined by `:`.
    pub fn write_census_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "cell,coords,occupants,class")?;
        for c in self.grid.cells() {
            let coords: Vec<String> = self
                .grid
                .cell_coords(c)
                .iter()
                .map(ToString::to_string)
                .collect();
            writeln!(
                w,
                "{},{},{},{}",
                c.index(),
                coords.join(":"),
                self.occupancy(c),
                self.class(c).label()
            )?;
        }
        Ok(())
    }
}

/// A linked cell together with the witnesses `x ~ u`, `y ~ v` it contains.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub struct LinkedCell {
    pub cell: CellId,
    pub x: usize,
    pub y: usize,
}

/// Witness pair for `{u, v}`-linkedness of `cell`: distinct occupants
/// `x, y ∉ {u, v}` with `ux, vy ∈ E(H)`. Picks the lowest `x`, then the
/// lowest `y ≠ x`.
pub fn linked_pair<H: Adjacency + ?Sized>(
    cell: CellId,
    u: usize,
    v: usize,
    host: &H,
    classification: &CellClassification,
) -> Option<(usize, usize)> {
    let candidates = || {
        classification
            .occupants(cell)
            .iter()
            .map(|&w| w as usize)
            .filter(|&w| w != u && w != v)
    };
    for x in candidates().filter(|&x| host.has_edge(u, x)) {
        if let Some(y) = candidates().find(|&y| y != x && host.has_edge(v, y)) {
            return Some((x, y));
        }
    }
    None
}

/// Whether `cell` is `{u, v}`-linked with respect to `host`.
pub fn is_linked<H: Adjacency + ?Sized>(
    cell: CellId,
    u: usize,
    v: usize,
    host: &H,
    classification: &CellClassification,
) -> bool {
    linked_pair(cell, u, v, host, classification).is_some()
}

/// First `{u, v}`-linked cell in ascending id order for which `excluded`
/// is false.
pub fn find_linked_cell<H, F>(
    u: usize,
    v: usize,
    excluded: F,
    host: &H,
    classification: &CellClassification,
) -> Option<LinkedCell>
where
    H: Adjacency + ?Sized,
    F: Fn(CellId) -> bool,
{
    classification
        .grid()
        .cells()
        .filter(|&c| classification.occupancy(c) >= 2 && !excluded(c))
        .find_map(|cell| {
            linked_pair(cell, u, v, host, classification).map(|(x, y)| LinkedCell { cell, x, y })
        })
}

/// Number of `{u, v}`-unlinked cells.
pub fn count_unlinked<H: Adjacency + ?Sized>(
    u: usize,
    v: usize,
    host: &H,
    classification: &CellClassification,
) -> usize {
    classification
        .grid()
        .cells()
        .filter(|&c| !is_linked(c, u, v, host, classification))
        .count()
}

/// The graph Γ on dense cells, friends joined, with its components.
#[derive(Debug, Clone)]
pub struct GammaGraph {
    /// Component index per cell; `u32::MAX` for sparse cells.
    component_of: Vec<u32>,
    /// Components ordered by their smallest cell; cells ascending.
    components: Vec<Vec<CellId>>,
    edge_count: usize,
    max_degree: usize,
}

const NO_COMPONENT: u32 = u32::MAX;

impl GammaGraph {
    pub fn new(classification: &CellClassification) -> Self {
        let grid = classification.grid();
        let mut uf = UnionFind::new(grid.cell_count());
        let mut edge_count = 0;
        let mut max_degree = 0;
        for c in classification.dense_cells() {
            let mut degree = 0;
            grid.for_each_friend(c, |f| {
                if classification.is_dense(f) {
                    degree += 1;
                    if f > c {
                        edge_count += 1;
                        uf.union(c.index(), f.index());
                    }
                }
            });
            max_degree = max_degree.max(degree);
        }
        let mut component_of = vec![NO_COMPONENT; grid.cell_count()];
        let mut root_to_component = vec![NO_COMPONENT; grid.cell_count()];
        let mut components: Vec<Vec<CellId>> = Vec::new();
        for c in classification.dense_cells() {
            let root = uf.find(c.index());
            if root_to_component[root] == NO_COMPONENT {
                root_to_component[root] = components.len() as u32;
                components.push(Vec::new());
            }
            let id = root_to_component[root];
            component_of[c.index()] = id;
            components[id as usize].push(c);
        }
        GammaGraph {
            component_of,
            components,
            edge_count,
            max_degree,
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.components.iter().map(Vec::len).sum()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    pub fn component_count(&self) -> usize {
        self.components.len()
    }

    pub fn components(&self) -> &[Vec<CellId>] {
        &self.components
    }

    pub fn component_of(&self, c: CellId) -> Option<usize> {
        match self.component_of[c.index()] {
            NO_COMPONENT => None,
            id => Some(id as usize),
        }
    }

    /// Dense friends of a dense cell, ascending.
    pub fn neighbors(&self, c: CellId, grid: &CubeGrid) -> Vec<CellId> {
        let mut out = Vec::new();
        grid.for_each_friend(c, |f| {
            if self.component_of[f.index()] != NO_COMPONENT {
                out.push(f);
            }
        });
        out
    }
}

/// Classifies the cells of `instance`.
pub fn classify_cells(instance: &PerturbedInstance) -> CellClassification {
    CellClassification::new(instance)
}

pub fn build_gamma(classification: &CellClassification) -> GammaGraph {
    GammaGraph::new(classification)
}

/// Asymptotic bounds on the structures the builder depends on.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ClaimBounds {
    /// `e^{-K/2} n`: sparse cells.
    pub sparse: f64,
    /// `4 e^{-αK/4} n`: `{u, v}`-unlinked cells for any pair.
    pub unlinked: f64,
    /// `e^{-K/3} n`: components of Γ.
    pub components: f64,
    /// `e^{-K/6} n`: forbidden plus starved cells during the build.
    pub forbidden: f64,
}

pub fn claim1_bounds(n: usize, k: f64, alpha: f64, dim: usize) -> Result<ClaimBounds> {
    if n < 1 || dim < 1 || k.is_nan() || k <= 0.0 || !(alpha > 0.0 && alpha < 0.5) {
        return Err(invalid(format!(
            "claim bounds need n >= 1, d >= 1, K > 0, 0 < alpha < 1/2 (n = {n}, K = {k}, alpha = {alpha}, d = {dim})"
        )));
    }
    let n = n as f64;
    Ok(ClaimBounds {
        sparse: (-k / 2.0).exp() * n,
        unlinked: 4.0 * (-alpha * k / 4.0).exp() * n,
        components: (-k / 3.0).exp() * n,
        forbidden: (-k / 6.0).exp() * n,
    })
}

/// Azuma tail `e^{-t²/(2L²n)}` for an `L`-Lipschitz function of `n`
/// independent variables.
pub fn azuma_tail(lipschitz: f64, n: usize, t: f64) -> Result<f64> {
    if lipschitz.is_nan() || lipschitz <= 0.0 || n < 1 || t.is_nan() || t < 0.0 {
        return Err(invalid(format!(
            "azuma tail needs L > 0, n >= 1, t >= 0 (L = {lipschitz}, n = {n}, t = {t})"
        )));
    }
    Ok((-t * t / (2.0 * lipschitz * lipschitz * n as f64)).exp())
}
