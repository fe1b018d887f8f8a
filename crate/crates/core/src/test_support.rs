use crate::geometry::{Norm, Positions};
use crate::graphs::HostGraph;
use crate::instance::PerturbedInstance;

/// One-dimensional instance with `counts[i]` points spread inside cell `i`
/// of a tessellation into `counts.len()` cells; vertex ids follow the cells.
pub(crate) fn line_instance(counts: &[usize], host: HostGraph) -> PerturbedInstance {
    let cells = counts.len();
    let mut coords = Vec::new();
    for (i, &k) in counts.iter().enumerate() {
        for j in 0..k {
            coords.push((i as f64 + (j as f64 + 0.5) / (k as f64 + 1.0)) / cells as f64);
        }
    }
    let pos = Positions::from_flat(1, coords).unwrap();
    // Slightly above 2/cells so the ceiling gives exactly `cells` cells.
    let r = 2.0 / cells as f64 * (1.0 + 1e-12);
    let inst = PerturbedInstance::new(pos, host, r, Norm::L2, 0).unwrap();
    assert_eq!(inst.tessellation().cell_count(), cells);
    inst
}
