use super::certificate::Provenance;
use super::state::{AbsorberPath, BuildState, ComponentLink};
use super::{BuildFailure, FailureStage};
use crate::cells::{find_linked_cell, CellClass, CellClassification, GammaGraph};
use crate::geometry::CellId;
use crate::instance::PerturbedInstance;

/// Joins the components of Γ into one component of Γ′ by repeatedly linking
/// the smallest component to a cell outside it.
pub fn connect_components(
    state: &mut BuildState,
    gamma: &GammaGraph,
    classification: &CellClassification,
    instance: &PerturbedInstance,
) -> Result<(), BuildFailure> {
    use FailureStage::ComponentLinkExhausted as Stage;
    if gamma.component_count() == 0 {
        return Err(BuildFailure::new(
            FailureStage::NoDenseCells,
            format!("none of the {} cells is dense", classification.cell_count()),
        ));
    }
    let comps = gamma.components();
    let mut in_gamma = vec![false; comps.len()];
    while !state.gamma_prime.is_connected() {
        let root = state
            .gamma_prime
            .smallest()
            .expect("at least two components");
        let members = state.gamma_prime.members(root).to_vec();
        let cells = || members.iter().flat_map(|&gc| comps[gc].iter().copied());
        let Some(c) = cells().filter(|&c| !state.forbidden.contains(c)).min() else {
            return Err(BuildFailure::new(
                Stage,
                "every cell of the smallest component is forbidden",
            )
            .with_cells(cells().map(CellId::index)));
        };
        let occ = classification.occupants(c);
        let (u, v) = (occ[0], occ[1]);

        for &gc in &members {
            in_gamma[gc] = true;
        }
        let excluded = |x: CellId| {
            state.forbidden.contains(x)
                || state.starved.contains(x)
                || gamma.component_of(x).is_some_and(|gc| in_gamma[gc])
        };
        let found = find_linked_cell(
            u as usize,
            v as usize,
            excluded,
            instance.host(),
            classification,
        );
        for &gc in &members {
            in_gamma[gc] = false;
        }
        let Some(linked) = found else {
            return Err(BuildFailure::new(
                Stage,
                format!(
                    "no eligible cell is {{{u}, {v}}}-linked for cell {}",
                    c.index()
                ),
            )
            .with_cells([c.index()])
            .with_vertices([u as usize, v as usize]));
        };
        let (c2, x, y) = (linked.cell, linked.x as u32, linked.y as u32);
        let other = state.gamma_prime.root_of(
            gamma
                .component_of(c2)
                .expect("linked cells outside 𝓕 are dense"),
        );

        state.links.push(ComponentLink {
            cell: c,
            linked_cell: c2,
            u,
            v,
            x,
            y,
        });
        for w in [u, v, x, y] {
            state.reserve(w);
        }
        state.set_cell_edge(c, (u, v), Stage)?;
        state.set_cell_edge(c2, (x, y), Stage)?;
        state.starved.remove(c);
        state.forbidden.insert(c);
        state.forbidden.insert(c2);
        state.gamma_prime.mark_forbidden(root);
        state.gamma_prime.mark_forbidden(other);
        let merged = state.gamma_prime.link(c, c2, root, other);

        if state.gamma_prime.unforbidden(merged) == 1 {
            let last = state
                .gamma_prime
                .members(merged)
                .iter()
                .flat_map(|&gc| comps[gc].iter().copied())
                .find(|&c| !state.forbidden.contains(c))
                .expect("one unforbidden cell remains");
            state.starved.insert(last);
        }
        state.note_budget();
    }
    state.starved.clear();
    Ok(())
}

/// Builds the absorbing path `P_c` of every sparse cell with at least one
/// occupant: single-occupant cells first, then the others, each in id order.
pub fn build_absorbers(
    state: &mut BuildState,
    classification: &CellClassification,
    instance: &PerturbedInstance,
) -> Result<(), BuildFailure> {
    use FailureStage::AbsorberLinkExhausted as Stage;
    for class in [CellClass::Single, CellClass::Few] {
        let cells: Vec<CellId> = classification.cells_of_class(class).collect();
        for c in cells {
            let occ = classification.occupants(c);
            let (u, v) = match class {
                CellClass::Single => (occ[0], occ[0]),
                _ => (occ[0], occ[1]),
            };
            let excluded = |x: CellId| state.forbidden.contains(x);
            let Some(linked) = find_linked_cell(
                u as usize,
                v as usize,
                excluded,
                instance.host(),
                classification,
            ) else {
                return Err(BuildFailure::new(
                    Stage,
                    format!(
                        "no unforbidden cell is linked for sparse cell {}",
                        c.index()
                    ),
                )
                .with_cells([c.index()])
                .with_vertices([u as usize, v as usize]));
            };
            let (x, y) = (linked.x as u32, linked.y as u32);
            let mut path = vec![x, u];
            if class == CellClass::Few {
                path.extend(occ[2..].iter().copied());
                path.push(v);
            }
            path.push(y);
            let mut provenance = vec![Provenance::G; path.len() - 1];
            provenance[0] = Provenance::H;
            *provenance.last_mut().expect("path has at least 3 vertices") = Provenance::H;

            state.reserve(x);
            state.reserve(y);
            state.set_cell_edge(linked.cell, (x, y), Stage)?;
            state.forbidden.insert(linked.cell);
            state.absorbers.push(AbsorberPath {
                cell: c,
                linked_cell: linked.cell,
                anchor: (x, y),
                path,
                provenance,
            });
            state.note_budget();
        }
    }
    Ok(())
}
