use super::certificate::{CycleCertificate, Provenance};
use super::state::{AbsorberPath, BuildState, ComponentLink};
use super::{BuildFailure, FailureStage};

const NONE: u32 = u32::MAX;

/// Each vertex's (at most two) cycle neighbours with edge provenance.
struct TwoRegular {
    slots: Vec<[(u32, Provenance); 2]>,
}

fn inconsistent(detail: String, vertices: impl IntoIterator<Item = usize>) -> BuildFailure {
    BuildFailure::new(FailureStage::AssemblyInconsistent, detail).with_vertices(vertices)
}

impl TwoRegular {
    fn new(n: usize) -> Self {
        TwoRegular {
            slots: vec![[(NONE, Provenance::G); 2]; n],
        }
    }

    fn add(&mut self, u: u32, v: u32, p: Provenance) -> Result<(), BuildFailure> {
        for (a, b) in [(u, v), (v, u)] {
            let Some(slot) = self.slots[a as usize].iter_mut().find(|s| s.0 == NONE) else {
                return Err(inconsistent(
                    format!("vertex {a} would get a third cycle edge"),
                    [a as usize],
                ));
            };
            *slot = (b, p);
        }
        Ok(())
    }

    fn remove(&mut self, u: u32, v: u32) -> Result<(), BuildFailure> {
        for (a, b) in [(u, v), (v, u)] {
            let Some(slot) = self.slots[a as usize].iter_mut().find(|s| s.0 == b) else {
                return Err(inconsistent(
                    format!("edge {u}-{v} is not on the cycle"),
                    [u as usize, v as usize],
                ));
            };
            slot.0 = NONE;
        }
        Ok(())
    }
}

/// Merges the component cycles into one Hamilton cycle: swaps each link's
/// deleted edges for its host edges, then replaces every absorber's anchor
/// edge by its path.
pub fn assemble_parts(
    n: usize,
    cycles: &[Vec<u32>],
    links: &[ComponentLink],
    absorbers: &[AbsorberPath],
) -> Result<CycleCertificate, BuildFailure> {
    let mut graph = TwoRegular::new(n);
    for cycle in cycles {
        if cycle.len() < 3 {
            return Err(inconsistent(
                format!("component cycle of length {}", cycle.len()),
                cycle.iter().map(|&v| v as usize),
            ));
        }
        for (i, &u) in cycle.iter().enumerate() {
            graph.add(u, cycle[(i + 1) % cycle.len()], Provenance::G)?;
        }
    }
    for link in links {
        for (a, b) in link.deleted() {
            graph.remove(a, b)?;
        }
        for (a, b) in link.replacement() {
            graph.add(a, b, Provenance::H)?;
        }
    }
    for absorber in absorbers {
        let (x, y) = absorber.anchor;
        graph.remove(x, y)?;
        for (pair, &p) in absorber.path.windows(2).zip(&absorber.provenance) {
            graph.add(pair[0], pair[1], p)?;
        }
    }

    if let Some(v) = (0..n).find(|&v| graph.slots[v].iter().any(|s| s.0 == NONE)) {
        return Err(inconsistent(
            format!("vertex {v} does not have two cycle edges"),
            [v],
        ));
    }
    if n < 3 {
        return Err(inconsistent(
            format!("{n} vertices cannot form a cycle"),
            [],
        ));
    }
    let mut order = Vec::with_capacity(n);
    let mut provenance = Vec::with_capacity(n);
    let [a, b] = graph.slots[0];
    let first = if a.0 <= b.0 { a } else { b };
    let (mut prev, mut cur) = (0u32, first.0);
    order.push(0);
    provenance.push(first.1);
    while cur != 0 {
        if order.len() == n {
            return Err(inconsistent("walk did not return to vertex 0".into(), [0]));
        }
        order.push(cur);
        let [s, t] = graph.slots[cur as usize];
        let step = if s.0 == prev { t } else { s };
        provenance.push(step.1);
        prev = cur;
        cur = step.0;
    }
    if order.len() != n {
        return Err(inconsistent(
            format!(
                "edge exchange left a cycle of length {} out of {n}",
                order.len()
            ),
            order.iter().take(16).map(|&v| v as usize),
        ));
    }
    Ok(CycleCertificate { order, provenance })
}

/// [`assemble_parts`] with the links and absorbers recorded in `state`.
pub fn assemble(
    state: &BuildState,
    n: usize,
    cycles: &[Vec<u32>],
) -> Result<CycleCertificate, BuildFailure> {
    assemble_parts(n, cycles, &state.links, &state.absorbers)
}
