use std::collections::{HashMap, VecDeque};

use super::state::BuildState;
use super::{BuildFailure, FailureStage};
use crate::cells::CellClassification;
use crate::geometry::CellId;

/// BFS spanning tree of a Γ-component rooted at its smallest cell, walked
/// depth first so every tree edge is crossed twice. Returns the sequence of
/// cells visited, `2(|component| - 1) + 1` entries starting and ending at
/// the root.
pub fn euler_tour(component: &[CellId], classification: &CellClassification) -> Vec<CellId> {
    let grid = classification.grid();
    let local: HashMap<CellId, usize> =
        component.iter().enumerate().map(|(i, &c)| (c, i)).collect();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); component.len()];
    let mut seen = vec![false; component.len()];
    let mut queue = VecDeque::from([0]);
    seen[0] = true;
    while let Some(i) = queue.pop_front() {
        grid.for_each_friend(component[i], |f| {
            if let Some(&j) = local.get(&f) {
                if !seen[j] {
                    seen[j] = true;
                    children[i].push(j);
                    queue.push_back(j);
                }
            }
        });
    }

    let mut tour = vec![component[0]];
    let mut stack: Vec<(usize, usize)> = vec![(0, 0)];
    while let Some(&mut (node, ref mut next)) = stack.last_mut() {
        if let Some(&child) = children[node].get(*next) {
            *next += 1;
            tour.push(component[child]);
            stack.push((child, 0));
        } else {
            stack.pop();
            if let Some(&(parent, _)) = stack.last() {
                tour.push(component[parent]);
            }
        }
    }
    tour
}

/// Cycle through every occupant of the cells of one Γ-component, using
/// only edges between occupants of equal or friend cells and containing
/// each reserved edge spanned inside those cells.
///
/// `used` marks vertices already placed and is updated.
pub fn traverse_component(
    component: &[CellId],
    state: &BuildState,
    classification: &CellClassification,
    used: &mut [bool],
) -> Result<Vec<u32>, BuildFailure> {
    let tour = euler_tour(component, classification);
    let m = tour.len() - 1;
    let mut last_visit: HashMap<CellId, usize> = HashMap::with_capacity(component.len());
    for (i, &c) in tour.iter().enumerate() {
        last_visit.insert(c, i);
    }
    let total: usize = component.iter().map(|&c| classification.occupancy(c)).sum();
    let mut cycle: Vec<u32> = Vec::with_capacity(total);

    let place = |v: u32, cycle: &mut Vec<u32>, used: &mut [bool]| {
        used[v as usize] = true;
        cycle.push(v);
    };
    let pick = |c: CellId, used: &[bool]| {
        classification
            .occupants(c)
            .iter()
            .copied()
            .find(|&w| !state.is_reserved(w as usize) && !used[w as usize])
    };
    let starved = |c: CellId, step: usize| {
        BuildFailure::new(
            FailureStage::TraversalStarved,
            format!("no free vertex left in cell {} at step {step}", c.index()),
        )
        .with_cells([c.index()])
    };
    // Lays down every unused vertex of `c`, the reserved edge first.
    let finish = |c: CellId, cycle: &mut Vec<u32>, used: &mut [bool]| -> Result<(), BuildFailure> {
        if let Some((a, b)) = state.cell_edge(c) {
            for w in [a, b] {
                if std::mem::replace(&mut used[w as usize], true) {
                    return Err(BuildFailure::new(
                        FailureStage::AssemblyInconsistent,
                        format!(
                            "reserved vertex {w} of cell {} was already placed",
                            c.index()
                        ),
                    )
                    .with_vertices([w as usize]));
                }
                cycle.push(w);
            }
        }
        for &w in classification.occupants(c) {
            if !used[w as usize] {
                used[w as usize] = true;
                cycle.push(w);
            }
        }
        Ok(())
    };

    let root = tour[0];
    let x0 = pick(root, used).ok_or_else(|| starved(root, 0))?;
    place(x0, &mut cycle, used);
    for i in 1..=m {
        let (cur, next) = (tour[i - 1], tour[i]);
        if last_visit[&cur] == i - 1 {
            finish(cur, &mut cycle, used)?;
        }
        let x = pick(next, used).ok_or_else(|| starved(next, i))?;
        place(x, &mut cycle, used);
    }
    finish(root, &mut cycle, used)?;
    debug_assert_eq!(cycle.len(), total);
    Ok(cycle)
}
