use super::*;
use crate::cells::CellSet;
use crate::geometry::{CellId, Norm};
use crate::graphs::{sample_positions, Adjacency, Graph, HostGraph};
use crate::oracle::exact_hamilton;
use crate::test_support::line_instance;
use proptest::prelude::*;

fn cells(set: &CellSet) -> Vec<usize> {
    set.iter().map(CellId::index).collect()
}

fn prepared(
    inst: &PerturbedInstance,
) -> (
    CellClassification,
    GammaGraph,
    BuildState,
    Result<(), BuildFailure>,
) {
    let cls = classify_cells(inst);
    let gamma = build_gamma(&cls);
    let mut state = BuildState::new(&cls, &gamma);
    let res = connect_components(&mut state, &gamma, &cls, inst)
        .and_then(|_| build_absorbers(&mut state, &cls, inst));
    (cls, gamma, state, res)
}

/// Two dense components `{0, 1}` and `{3, 4, 5}`, a three-vertex cell 6 and
/// a one-vertex cell 7.
fn golden() -> PerturbedInstance {
    line_instance(&[7, 7, 0, 7, 7, 7, 3, 1], HostGraph::Complete { n: 39 })
}

#[test]
fn connected_gamma_needs_no_links() {
    let inst = line_instance(&[7, 8, 7], HostGraph::Complete { n: 22 });
    let cls = classify_cells(&inst);
    let gamma = build_gamma(&cls);
    let mut state = BuildState::new(&cls, &gamma);
    connect_components(&mut state, &gamma, &cls, &inst).unwrap();
    assert!(state.links.is_empty());
    assert_eq!(state.reserved_count(), 0);
    assert!(state.forbidden.is_empty());
}

#[test]
fn two_components_complete_host() {
    let inst = golden();
    let cls = classify_cells(&inst);
    let gamma = build_gamma(&cls);
    assert_eq!(gamma.component_count(), 2);
    let mut state = BuildState::new(&cls, &gamma);
    connect_components(&mut state, &gamma, &cls, &inst).unwrap();
    assert_eq!(state.gamma_prime.links().len(), 1);
    assert_eq!(state.deleted_edges().len(), 2);
    assert_eq!(state.replacement_edges().len(), 2);
    assert_eq!(state.reserved_count(), 4);
}

#[test]
fn golden_trace() {
    let inst = golden();
    let cls = classify_cells(&inst);
    let gamma = build_gamma(&cls);
    let mut state = BuildState::new(&cls, &gamma);
    assert_eq!(cells(&state.forbidden), [2, 6, 7]);
    assert!(state.starved.is_empty());

    connect_components(&mut state, &gamma, &cls, &inst).unwrap();
    state.audit(&cls, &gamma).unwrap();
    assert!(state.gamma_prime.is_connected());
    assert_eq!(state.gamma_prime.links(), [(CellId(0), CellId(3))]);
    assert_eq!(
        state.links,
        [ComponentLink {
            cell: CellId(0),
            linked_cell: CellId(3),
            u: 0,
            v: 1,
            x: 14,
            y: 15
        }]
    );
    assert_eq!(state.deleted_edges(), [(0, 1), (14, 15)]);
    assert_eq!(state.replacement_edges(), [(0, 14), (1, 15)]);
    assert_eq!(cells(&state.forbidden), [0, 2, 3, 6, 7]);
    assert!(state.starved.is_empty());

    build_absorbers(&mut state, &cls, &inst).unwrap();
    state.audit(&cls, &gamma).unwrap();
    use Provenance::{G, H};
    let single = &state.absorbers[0];
    assert_eq!((single.cell, single.linked_cell), (CellId(7), CellId(1)));
    assert_eq!(single.path, [7, 38, 8]);
    assert_eq!(single.provenance, [H, H]);
    let few = &state.absorbers[1];
    assert_eq!((few.cell, few.linked_cell), (CellId(6), CellId(4)));
    assert_eq!(few.path, [21, 35, 37, 36, 22]);
    assert_eq!(few.provenance, [H, G, G, H]);
    assert_eq!(few.anchor, (21, 22));
    assert_eq!(state.absorber_edges(), [(7, 8), (21, 22)]);
    assert_eq!(cells(&state.forbidden), [0, 1, 2, 3, 4, 6, 7]);
    assert_eq!(state.reserved_vertices(), [0, 1, 7, 8, 14, 15, 21, 22]);

    let cert = find_hamilton(&inst).unwrap();
    assert!(verify(&cert, &inst));
    assert_eq!(cert.len(), 39);
}

#[test]
fn starved_cell_is_released_after_linking() {
    // Components {0}, {2}, {4, 5, 6}.
    let inst = line_instance(&[7, 0, 7, 0, 7, 7, 7], HostGraph::Complete { n: 35 });
    let (cls, gamma, state, res) = prepared(&inst);
    res.unwrap();
    let links: Vec<_> = state
        .links
        .iter()
        .map(|l| (l.cell.index(), l.linked_cell.index()))
        .collect();
    assert_eq!(links, [(0, 4), (2, 5)]);
    assert!(state.starved.is_empty());
    state.audit(&cls, &gamma).unwrap();
    assert!(verify(&find_hamilton(&inst).unwrap(), &inst));
}

#[test]
fn starved_cells_can_exhaust_the_links() {
    // After {0} links to cell 4, cell 5 is the last free cell of its
    // component and is starved; {2} then has nowhere to go.
    let inst = line_instance(&[7, 0, 7, 0, 7, 7], HostGraph::Complete { n: 28 });
    let (_, _, state, res) = prepared(&inst);
    let err = res.unwrap_err();
    assert_eq!(err.stage, FailureStage::ComponentLinkExhausted);
    assert_eq!(err.witness.cells, [2]);
    assert_eq!(cells(&state.starved), [2, 5]);
    assert_eq!(
        find_hamilton(&inst).unwrap_err().stage,
        FailureStage::ComponentLinkExhausted
    );
}

#[test]
fn star_host_absorber() {
    let v = 14;
    let star = Graph::from_edges(15, (0..v).map(|w| (w, v))).unwrap();
    let inst = line_instance(&[7, 7, 1], HostGraph::from(star));
    let (_, _, state, res) = prepared(&inst);
    res.unwrap();
    let a = &state.absorbers[0];
    assert_eq!(a.path.len(), 3);
    assert_eq!(a.path[1], v as u32);
    let (x, y) = a.anchor;
    assert!(inst.host().has_edge(x as usize, v) && inst.host().has_edge(y as usize, v));
    assert!(inst.geometric().has_edge(x as usize, y as usize));
    assert!(verify(&find_hamilton(&inst).unwrap(), &inst));
}

#[test]
fn three_occupant_absorber() {
    let inst = line_instance(&[8, 3, 7, 7], HostGraph::Complete { n: 25 });
    let (cls, _, state, res) = prepared(&inst);
    res.unwrap();
    let a = &state.absorbers[0];
    assert_eq!(a.path.len(), 5);
    let mut interior = a.path[1..4].to_vec();
    interior.sort_unstable();
    assert_eq!(interior, cls.occupants(CellId(1)));
    assert_eq!(a.provenance.first(), Some(&Provenance::H));
    assert_eq!(a.provenance.last(), Some(&Provenance::H));
    for (pair, p) in a.path.windows(2).zip(&a.provenance) {
        let (u, v) = (pair[0] as usize, pair[1] as usize);
        match p {
            Provenance::H => assert!(inst.host().has_edge(u, v)),
            Provenance::G => assert!(inst.geometric().has_edge(u, v)),
        }
    }
}

#[test]
fn no_absorbers_without_sparse_occupants() {
    let inst = line_instance(&[7, 0, 7, 7], HostGraph::Complete { n: 21 });
    let (_, _, state, res) = prepared(&inst);
    res.unwrap();
    assert!(state.absorbers.is_empty());
}

#[test]
fn single_cell_traversal() {
    let inst = line_instance(&[9], HostGraph::Complete { n: 9 });
    let (cls, gamma, state, res) = prepared(&inst);
    res.unwrap();
    let mut used = vec![false; 9];
    let cycle = traverse_component(&gamma.components()[0], &state, &cls, &mut used).unwrap();
    assert_eq!(cycle, (0..9).collect::<Vec<u32>>());
}

#[test]
fn path_component_traversal() {
    let inst = line_instance(&[7, 9, 8], HostGraph::Complete { n: 24 });
    let (cls, gamma, state, res) = prepared(&inst);
    res.unwrap();
    let comp = &gamma.components()[0];
    assert_eq!(
        euler_tour(comp, &cls),
        [CellId(0), CellId(1), CellId(2), CellId(1), CellId(0)]
    );
    let mut used = vec![false; 24];
    let cycle = traverse_component(comp, &state, &cls, &mut used).unwrap();
    let mut sorted = cycle.clone();
    sorted.sort_unstable();
    assert_eq!(sorted, (0..24).collect::<Vec<u32>>());
    for i in 0..cycle.len() {
        let (u, v) = (cycle[i] as usize, cycle[(i + 1) % cycle.len()] as usize);
        assert!(inst.geometric().has_edge(u, v), "{u}-{v}");
        let (cu, cv) = (cls.cell_of_vertex(u), cls.cell_of_vertex(v));
        assert!(cu == cv || cls.grid().are_friends(cu, cv));
    }
}

#[test]
fn reserved_edges_lie_on_component_cycles() {
    let inst = golden();
    let (cls, gamma, state, res) = prepared(&inst);
    res.unwrap();
    let mut used = vec![false; inst.n()];
    let mut on_cycle = std::collections::HashSet::new();
    for comp in gamma.components() {
        let cycle = traverse_component(comp, &state, &cls, &mut used).unwrap();
        for i in 0..cycle.len() {
            let (a, b) = (cycle[i], cycle[(i + 1) % cycle.len()]);
            on_cycle.insert((a.min(b), a.max(b)));
        }
    }
    for (a, b) in state
        .deleted_edges()
        .into_iter()
        .chain(state.absorber_edges())
    {
        assert!(on_cycle.contains(&(a.min(b), a.max(b))), "{a}-{b}");
    }
}

#[test]
fn exchange_merges_two_cycles() {
    let cycles = vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]];
    let link = ComponentLink {
        cell: CellId(0),
        linked_cell: CellId(1),
        u: 0,
        v: 1,
        x: 5,
        y: 6,
    };
    let cert = assemble_parts(10, &cycles, &[link], &[]).unwrap();
    // The exchanged edge set, checked independently as a 2-regular graph.
    let mut edges = vec![
        (1, 2),
        (2, 3),
        (3, 4),
        (4, 0),
        (6, 7),
        (7, 8),
        (8, 9),
        (9, 5),
    ];
    edges.extend([(0, 5), (1, 6)]);
    let exchanged = Graph::from_edges(10, edges).unwrap();
    assert!(exact_hamilton(&exchanged, 20).unwrap().hamiltonian);
    assert!(verify_with(&cert, &exchanged, &exchanged));
    let h_edges: Vec<_> = cert.edges().filter(|e| e.2 == Provenance::H).collect();
    assert_eq!(h_edges.len(), 2);
}

#[test]
fn exchange_with_wrong_edge_is_inconsistent() {
    let cycles = vec![vec![0, 1, 2, 3, 4], vec![5, 6, 7, 8, 9]];
    let link = ComponentLink {
        cell: CellId(0),
        linked_cell: CellId(1),
        u: 0,
        v: 2,
        x: 5,
        y: 6,
    };
    let err = assemble_parts(10, &cycles, &[link], &[]).unwrap_err();
    assert_eq!(err.stage, FailureStage::AssemblyInconsistent);
}

#[test]
fn identity_and_splice_arithmetic() {
    let cycles = vec![vec![0, 1, 2, 3]];
    let cert = assemble_parts(4, &cycles, &[], &[]).unwrap();
    assert_eq!(cert.order, [0, 1, 2, 3]);

    let absorber = AbsorberPath {
        cell: CellId(1),
        linked_cell: CellId(0),
        anchor: (1, 2),
        path: vec![1, 4, 5, 2],
        provenance: vec![Provenance::H, Provenance::G, Provenance::H],
    };
    let cert = assemble_parts(6, &cycles, &[], &[absorber]).unwrap();
    assert_eq!(cert.len(), 4 + 4 - 2);
    assert_eq!(cert.order, [0, 1, 4, 5, 2, 3]);
    use Provenance::{G, H};
    assert_eq!(cert.provenance, [G, H, G, H, G, G]);
}

#[test]
fn complete_host_at_fifty_vertices() {
    for (d, r) in [(2, 3.0), (1, 0.5), (1, 2.0)] {
        let pos = sample_positions(50, d, 3).unwrap();
        let inst =
            PerturbedInstance::new(pos, HostGraph::Complete { n: 50 }, r, Norm::L2, 3).unwrap();
        let cert = find_hamilton(&inst).unwrap();
        assert!(verify(&cert, &inst));
    }
}

#[test]
fn stranded_vertex_gives_failure_not_certificate() {
    // Vertex 14 sits alone with no host edges.
    let inst = line_instance(&[7, 7, 1], HostGraph::from(Graph::empty(15)));
    let out = build(&inst);
    let err = out.result.unwrap_err();
    assert_eq!(err.stage, FailureStage::AbsorberLinkExhausted);
    assert_eq!(err.witness.vertices, [14, 14]);
    assert_eq!(out.stats.single_cells, 1);
}

#[test]
fn empty_gamma_fails_first() {
    let inst = line_instance(&[3, 3, 3], HostGraph::Complete { n: 9 });
    let err = find_hamilton(&inst).unwrap_err();
    assert_eq!(err.stage, FailureStage::NoDenseCells);
    let json = serde_json::to_string(&err).unwrap();
    assert!(json.contains("\"stage\":\"no-dense-cells\""), "{json}");
}

#[test]
fn builds_are_deterministic() {
    let spec = InstanceSpec {
        n: 3000,
        dim: 2,
        norm: Norm::L2,
        alpha: 0.3,
        family: crate::graphs::HostFamily::BlownUpCycle,
        radius: crate::instance::RadiusSpec::Constant(400.0),
    };
    let bytes = |seed| {
        let inst = PerturbedInstance::generate(&spec, seed).unwrap();
        let mut out = Vec::new();
        find_hamilton(&inst).unwrap().write_to(&mut out).unwrap();
        out
    };
    assert_eq!(bytes(11), bytes(11));
    assert_ne!(bytes(11), bytes(12));
}

#[test]
fn budget_is_reported_not_enforced() {
    let out = build(&golden());
    assert!(out.result.is_ok());
    assert_eq!(out.stats.forbidden_peak, 7);
    assert!(out.stats.warnings.is_empty());

    // Padding with empty cells pushes 𝓕 past the budget while the
    // construction itself is unchanged.
    let mut counts = vec![7, 7, 0, 7, 7, 7, 3, 1];
    counts.resize(100, 0);
    let spread = line_instance(&counts, HostGraph::Complete { n: 39 });
    let out = build(&spread);
    assert!(out.result.is_ok());
    assert!(out.stats.forbidden_peak as f64 > out.stats.forbidden_budget);
    assert_eq!(out.stats.warnings.len(), 1);
}

use crate::instance::InstanceSpec;

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn line_builds_are_sound(
        counts in proptest::collection::vec(0usize..12, 1..10),
        edges in proptest::collection::vec((0usize..120, 0usize..120), 0..400),
    ) {
        let n: usize = counts.iter().sum();
        prop_assume!(n >= 3);
        let host = Graph::from_edges(n, edges.into_iter().map(|(a, b)| (a % n, b % n)).filter(|(a, b)| a != b)).unwrap();
        let inst = line_instance(&counts, HostGraph::from(host));
        let (cls, gamma, state, res) = prepared(&inst);
        prop_assert!(state.audit(&cls, &gamma).is_ok());
        let out = build(&inst);
        if let Ok(cert) = &out.result {
            prop_assert!(res.is_ok());
            prop_assert!(verify(cert, &inst));
        }
    }
}
