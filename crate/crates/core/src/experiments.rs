//! Monte Carlo experiments: success rates of the builder over a grid of
//! radius constants, cell census against the claimed bounds, and the
//! isolated-vertex obstructions at small radius.
//!
//! Every trial draws its instance from its own seed, derived from the
//! master seed and the trial's grid position with [`derive_seed`], so any
//! single trial can be rerun on its own and results do not depend on thread
//! scheduling.

use std::f64::consts::PI;
use std::io::Write;
use std::time::Instant;

use rand::seq::index::sample;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::builder::{build, verify, FailureStage};
use crate::cells::{build_gamma, claim1_bounds, classify_cells, count_unlinked, ClaimBounds};
use crate::error::{invalid, Result};
use crate::geometry::Norm;
use crate::graphs::{
    gen_bipartite_counterexample, sample_positions, Adjacency, GeometricGraph, HostFamily,
};
use crate::instance::{radius_from_constant, InstanceSpec, PerturbedInstance, RadiusSpec};
use crate::rng::{derive_seed, rng_from_seed};

/// Version of the CSV and JSON layouts written here.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepConfig {
    pub n: usize,
    pub dim: usize,
    pub norm: Norm,
    pub alpha: f64,
    pub family: HostFamily,
    /// Radius constants `C`, ascending; trials use `r = (C/n)^(1/d)`.
    pub c_grid: Vec<f64>,
    pub trials: usize,
    pub master_seed: u64,
    /// Record wall time per trial. Off by default so that repeated runs
    /// produce identical files.
    #[serde(default)]
    pub record_time: bool,
}

impl SweepConfig {
    pub fn validate(&self) -> Result<()> {
        if self.trials == 0 {
            return Err(invalid("a sweep needs at least one trial"));
        }
        if self.c_grid.is_empty() {
            return Err(invalid("the C grid is empty"));
        }
        if !self.c_grid.windows(2).all(|w| w[0] < w[1]) || !self.c_grid.iter().all(|&c| c > 0.0) {
            return Err(invalid(
                "the C grid must be positive and strictly ascending",
            ));
        }
        Ok(())
    }

    /// Seed of trial `trial` at grid point `c_index`.
    pub fn trial_seed(&self, c_index: usize, trial: usize) -> u64 {
        derive_seed(self.master_seed, &[c_index as u64, trial as u64])
    }
}

/// The committed calibration sweep: `n = 5000`, `d = 2`, `α = 0.3`,
/// blown-up cycle host, 50 trials per grid point.
pub fn calibration_config() -> SweepConfig {
    SweepConfig {
        n: 5000,
        dim: 2,
        norm: Norm::L2,
        alpha: 0.3,
        family: HostFamily::BlownUpCycle,
        c_grid: vec![50.0, 100.0, 150.0, 200.0, 250.0, 300.0, 400.0, 500.0, 600.0],
        trials: 50,
        master_seed: 20_240_601,
        record_time: false,
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialRecord {
    pub c_index: usize,
    pub trial: usize,
    pub seed: u64,
    pub c: f64,
    pub radius: f64,
    /// Certificate returned and verified.
    pub success: bool,
    pub failure_stage: Option<FailureStage>,
    pub sparse_count: usize,
    pub gamma_components: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub wall_time_ms: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub c: f64,
    pub radius: f64,
    pub trials: usize,
    pub successes: usize,
    pub success_rate: f64,
    pub mean_sparse: f64,
    pub mean_components: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepReport {
    pub schema: u32,
    pub config: SweepConfig,
    pub rows: Vec<SweepRow>,
    #[serde(skip)]
    pub records: Vec<TrialRecord>,
}

/// Runs one build per (grid point, trial), in parallel.
pub fn sweep_success(config: &SweepConfig) -> Result<SweepReport> {
    config.validate()?;
    let jobs: Vec<(usize, usize)> = (0..config.c_grid.len())
        .flat_map(|ci| (0..config.trials).map(move |t| (ci, t)))
        .collect();
    let records = jobs
        .par_iter()
        .map(|&(ci, t)| run_trial(config, ci, t))
        .collect::<Result<Vec<_>>>()?;
    let rows = summarize(&config.c_grid, &records);
    Ok(SweepReport {
        schema: SCHEMA_VERSION,
        config: config.clone(),
        rows,
        records,
    })
}

fn run_trial(config: &SweepConfig, c_index: usize, trial: usize) -> Result<TrialRecord> {
    let c = config.c_grid[c_index];
    let seed = config.trial_seed(c_index, trial);
    let spec = InstanceSpec {
        n: config.n,
        dim: config.dim,
        norm: config.norm,
        alpha: config.alpha,
        family: config.family,
        radius: RadiusSpec::Constant(c),
    };
    let instance = PerturbedInstance::generate(&spec, seed)?;
    let start = Instant::now();
    let outcome = build(&instance);
    let elapsed = start.elapsed().as_secs_f64() * 1e3;
    let success = outcome
        .result
        .as_ref()
        .is_ok_and(|cert| verify(cert, &instance));
    Ok(TrialRecord {
        c_index,
        trial,
        seed,
        c,
        radius: instance.geometric().radius(),
        success,
        failure_stage: outcome.result.as_ref().err().map(|f| f.stage),
        sparse_count: outcome.stats.sparse_cells,
        gamma_components: outcome.stats.gamma_components,
        wall_time_ms: config.record_time.then_some(elapsed),
    })
}

/// Per-grid-point aggregates; a pure fold over `records`.
pub fn summarize(c_grid: &[f64], records: &[TrialRecord]) -> Vec<SweepRow> {
    c_grid
        .iter()
        .enumerate()
        .map(|(ci, &c)| {
            let rs: Vec<&TrialRecord> = records.iter().filter(|r| r.c_index == ci).collect();
            let k = rs.len();
            let mean = |f: fn(&TrialRecord) -> usize| {
                if k == 0 {
                    0.0
                } else {
                    rs.iter().map(|r| f(r) as f64).sum::<f64>() / k as f64
                }
            };
            let successes = rs.iter().filter(|r| r.success).count();
            SweepRow {
                c,
                radius: rs.first().map_or(f64::NAN, |r| r.radius),
                trials: k,
                successes,
                success_rate: if k == 0 {
                    0.0
                } else {
                    successes as f64 / k as f64
                },
                mean_sparse: mean(|r| r.sparse_count),
                mean_components: mean(|r| r.gamma_components),
            }
        })
        .collect()
}

/// One CSV row per trial, in grid then trial order.
pub fn write_records_csv<W: Write>(records: &[TrialRecord], mut w: W) -> Result<()> {
    let timed = records.iter().any(|r| r.wall_time_ms.is_some());
    write!(
        w,
        "schema,c_index,trial,seed,c,radius,success,failure_stage,sparse_count,gamma_components"
    )?;
    if timed {
        write!(w, ",wall_time_ms")?;
    }
    writeln!(w)?;
    for r in records {
        write!(
            w,
            "{},{},{},{},{:?},{:?},{},{},{},{}",
            SCHEMA_VERSION,
            r.c_index,
            r.trial,
            r.seed,
            r.c,
            r.radius,
            r.success,
            r.failure_stage.map_or("", |s| s.name()),
            r.sparse_count,
            r.gamma_components
        )?;
        if timed {
            write!(w, ",{:.3}", r.wall_time_ms.unwrap_or(f64::NAN))?;
        }
        writeln!(w)?;
    }
    Ok(())
}

pub fn write_summary_json<W: Write>(report: &SweepReport, w: W) -> Result<()> {
    serde_json::to_writer_pretty(w, report).map_err(std::io::Error::from)?;
    Ok(())
}

/// Number of vertices without neighbours.
pub fn count_isolated<G: Adjacency + ?Sized>(graph: &G) -> usize {
    (0..graph.vertex_count())
        .filter(|&v| graph.is_isolated(v))
        .count()
}

/// Volume of the Euclidean unit ball in `d` dimensions.
pub fn unit_ball_volume(d: usize) -> f64 {
    match d {
        0 => 1.0,
        1 => 2.0,
        _ => 2.0 * PI / d as f64 * unit_ball_volume(d - 2),
    }
}

/// `(-ln(3α/2) / (2 V_d n))^(1/d)`: below this radius a uniform point set
/// has at least `4αn/3` isolated points with high probability.
pub fn lemma_counterexample_radius(n: usize, alpha: f64, d: usize) -> Result<f64> {
    if n == 0 || d == 0 || !(alpha > 0.0 && 1.5 * alpha < 1.0) {
        return Err(invalid(format!(
            "need n >= 1, d >= 1 and 0 < 3α/2 < 1 (n = {n}, alpha = {alpha}, d = {d})"
        )));
    }
    let x = -(1.5 * alpha).ln() / (2.0 * unit_ball_volume(d) * n as f64);
    Ok(x.powf(1.0 / d as f64))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Lemma41Report {
    pub schema: u32,
    pub n: usize,
    pub alpha: f64,
    pub dim: usize,
    pub radius: f64,
    /// `4αn/3`.
    pub threshold: f64,
    pub isolated: Vec<usize>,
    pub seeds: Vec<u64>,
    /// Fraction of trials with at least `threshold` isolated vertices.
    pub fraction: f64,
}

/// Samples Euclidean `G^d(n, r)` at the counterexample radius and counts
/// isolated vertices; trial `t` uses seed `derive_seed(master_seed, [t])`.
pub fn check_lemma41(
    n: usize,
    alpha: f64,
    dim: usize,
    trials: usize,
    master_seed: u64,
) -> Result<Lemma41Report> {
    let radius = lemma_counterexample_radius(n, alpha, dim)?;
    let seeds: Vec<u64> = (0..trials)
        .map(|t| derive_seed(master_seed, &[t as u64]))
        .collect();
    let isolated = seeds
        .par_iter()
        .map(|&seed| {
            let pos = sample_positions(n, dim, derive_seed(seed, &[0]))?;
            Ok(GeometricGraph::new(pos, radius, Norm::L2)?.isolated_count())
        })
        .collect::<Result<Vec<_>>>()?;
    let threshold = 4.0 * alpha * n as f64 / 3.0;
    Ok(Lemma41Report {
        schema: SCHEMA_VERSION,
        n,
        alpha,
        dim,
        radius,
        threshold,
        fraction: fraction(isolated.iter().map(|&k| k as f64 >= threshold)),
        isolated,
        seeds,
    })
}

fn fraction(flags: impl Iterator<Item = bool>) -> f64 {
    let (hits, total) = flags.fold((0usize, 0usize), |(h, t), f| (h + f as usize, t + 1));
    if total == 0 {
        0.0
    } else {
        hits as f64 / total as f64
    }
}

/// Radius constant for the bipartite obstruction: the counterexample
/// radius on the `|B|` points of the larger part with `α` rescaled so that
/// `4α'|B|/3 = αn`, mapped back to `C = n r^d`.
pub fn blocker_constant(n: usize, alpha: f64, dim: usize) -> Result<f64> {
    let a = (alpha * n as f64).floor() as usize;
    let b = n.saturating_sub(a);
    if b == 0 {
        return Err(invalid("part B is empty"));
    }
    let alpha_b = 3.0 * alpha * n as f64 / (4.0 * b as f64);
    let r = lemma_counterexample_radius(b, alpha_b, dim)?;
    Ok(n as f64 * r.powi(dim as i32))
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockerTrial {
    pub seed: u64,
    /// Vertices of B with no G-neighbour in B.
    pub isolated_in_b: usize,
    /// `isolated_in_b > αn`, which rules out a Hamilton cycle.
    pub certified: bool,
    pub builder_success: bool,
    pub failure_stage: Option<FailureStage>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlockerReport {
    pub schema: u32,
    pub n: usize,
    pub alpha: f64,
    pub dim: usize,
    pub c_small: f64,
    pub radius: f64,
    /// `αn`.
    pub threshold: f64,
    pub trials: Vec<BlockerTrial>,
    /// Fraction of trials certifying non-Hamiltonicity.
    pub fraction: f64,
}

/// Complete bipartite host with parts of sizes `⌊αn⌋` and `n - ⌊αn⌋`, plus
/// Euclidean `G^d(n, (c_small/n)^(1/d))`. A vertex of B isolated inside
/// `G[B]` needs both of its cycle neighbours in A, which has room for at
/// most `|A| <= αn` such vertices, so more than `αn` of them rule out a
/// Hamilton cycle. Each trial also runs the builder, which must fail on
/// certified trials.
pub fn check_bipartite_blocker(
    n: usize,
    alpha: f64,
    c_small: f64,
    dim: usize,
    trials: usize,
    master_seed: u64,
) -> Result<BlockerReport> {
    let radius = radius_from_constant(c_small, n, dim)?;
    let part_a = (alpha * n as f64).floor() as usize;
    let threshold = alpha * n as f64;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(master_seed, &[t as u64]);
            let pos = sample_positions(n, dim, derive_seed(seed, &[0]))?;
            let host = gen_bipartite_counterexample(n, alpha)?;
            let instance = PerturbedInstance::new(pos, host, radius, Norm::L2, seed)?;
            let g = instance.geometric();
            let isolated_in_b = (part_a..n)
                .filter(|&v| g.neighbors(v).iter().all(|&w| w < part_a))
                .count();
            let result = build(&instance).result;
            Ok(BlockerTrial {
                seed,
                isolated_in_b,
                certified: isolated_in_b as f64 > threshold,
                builder_success: result.as_ref().is_ok_and(|c| verify(c, &instance)),
                failure_stage: result.err().map(|f| f.stage),
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(BlockerReport {
        schema: SCHEMA_VERSION,
        n,
        alpha,
        dim,
        c_small,
        radius,
        threshold,
        fraction: fraction(records.iter().map(|r| r.certified)),
        trials: records,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusTrial {
    pub seed: u64,
    pub sparse: usize,
    pub components: usize,
    /// Unlinked-cell count for each sampled pair.
    pub unlinked: Vec<usize>,
    pub sparse_ok: bool,
    pub components_ok: bool,
    /// Fraction of sampled pairs within the unlinked bound.
    pub pairs_ok: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CensusReport {
    pub schema: u32,
    pub n: usize,
    pub dim: usize,
    pub alpha: f64,
    pub c: f64,
    pub expected_occupancy: f64,
    pub bounds: ClaimBounds,
    pub trials: Vec<CensusTrial>,
    pub sparse_pass: f64,
    pub components_pass: f64,
    /// Fraction of trials in which at least 95% of pairs pass.
    pub unlinked_pass: f64,
}

pub const CENSUS_PAIRS: usize = 100;

/// Counts sparse cells, components of Γ and, for [`CENSUS_PAIRS`] random
/// vertex pairs, unlinked cells, and compares each with its bound.
pub fn claims_census(spec: &InstanceSpec, trials: usize, master_seed: u64) -> Result<CensusReport> {
    let radius = spec.radius.resolve(spec.n, spec.dim)?;
    let tess = crate::geometry::Tessellation::new(spec.dim, radius, spec.norm, spec.n)?;
    let k = tess.expected_occupancy();
    let bounds = claim1_bounds(spec.n, k, spec.alpha, spec.dim)?;
    let records = (0..trials)
        .into_par_iter()
        .map(|t| {
            let seed = derive_seed(master_seed, &[t as u64]);
            let instance = PerturbedInstance::generate(spec, seed)?;
            let cls = classify_cells(&instance);
            let gamma = build_gamma(&cls);
            let mut rng = rng_from_seed(derive_seed(seed, &[3]));
            let unlinked: Vec<usize> = (0..CENSUS_PAIRS)
                .map(|_| {
                    let pair = sample(&mut rng, spec.n, 2);
                    count_unlinked(pair.index(0), pair.index(1), instance.host(), &cls)
                })
                .collect();
            let sparse = cls.sparse_count();
            let components = gamma.component_count();
            Ok(CensusTrial {
                seed,
                sparse,
                components,
                sparse_ok: sparse as f64 <= bounds.sparse,
                components_ok: components as f64 <= bounds.components,
                pairs_ok: fraction(unlinked.iter().map(|&u| u as f64 <= bounds.unlinked)),
                unlinked,
            })
        })
        .collect::<Result<Vec<CensusTrial>>>()?;
    let c = crate::instance::constant_from_radius(radius, spec.n, spec.dim);
    Ok(CensusReport {
        schema: SCHEMA_VERSION,
        n: spec.n,
        dim: spec.dim,
        alpha: spec.alpha,
        c,
        expected_occupancy: k,
        bounds,
        sparse_pass: fraction(records.iter().map(|r| r.sparse_ok)),
        components_pass: fraction(records.iter().map(|r| r.components_ok)),
        unlinked_pass: fraction(records.iter().map(|r| r.pairs_ok >= 0.95)),
        trials: records,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphs::Graph;

    fn small_sweep() -> SweepConfig {
        SweepConfig {
            n: 400,
            dim: 2,
            norm: Norm::L2,
            alpha: 0.3,
            family: HostFamily::BlownUpCycle,
            c_grid: vec![60.0, 400.0],
            trials: 4,
            master_seed: 3,
            record_time: false,
        }
    }

    #[test]
    fn count_isolated_examples() {
        assert_eq!(count_isolated(&Graph::empty(7)), 7);
        assert_eq!(
            count_isolated(&Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]).unwrap()),
            0
        );
        assert_eq!(count_isolated(&Graph::from_edges(5, [(1, 3)]).unwrap()), 3);
    }

    #[test]
    fn ball_volumes() {
        assert_eq!(unit_ball_volume(1), 2.0);
        assert!((unit_ball_volume(2) - PI).abs() < 1e-15);
        assert!((unit_ball_volume(3) - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((unit_ball_volume(4) - PI * PI / 2.0).abs() < 1e-14);
    }

    #[test]
    fn counterexample_radius_examples() {
        let r = lemma_counterexample_radius(1000, 0.1, 1).unwrap();
        assert!((r - 4.7428e-4).abs() < 1e-7, "{r}");
        let r = lemma_counterexample_radius(1000, 0.1, 2).unwrap();
        assert!((r - 0.017377).abs() < 1e-5, "{r}");
        let rs: Vec<f64> = [100, 1000, 10_000]
            .iter()
            .map(|&n| lemma_counterexample_radius(n, 0.2, 2).unwrap())
            .collect();
        assert!(rs.windows(2).all(|w| w[1] < w[0]));
        assert!(lemma_counterexample_radius(100, 2.0 / 3.0, 2).is_err());
    }

    #[test]
    fn single_cell_sweep_succeeds() {
        let config = SweepConfig {
            n: 60,
            family: HostFamily::RandomSupergraph,
            c_grid: vec![1e9],
            trials: 1,
            ..small_sweep()
        };
        let report = sweep_success(&config).unwrap();
        assert_eq!(report.rows[0].success_rate, 1.0);
    }

    #[test]
    fn sweeps_are_reproducible() {
        let config = small_sweep();
        let csv = |c: &SweepConfig| {
            let mut out = Vec::new();
            write_records_csv(&sweep_success(c).unwrap().records, &mut out).unwrap();
            out
        };
        let a = csv(&config);
        assert_eq!(a, csv(&config));
        let text = String::from_utf8(a).unwrap();
        assert_eq!(text.lines().count(), 1 + 8);
        assert!(text.starts_with("schema,c_index,trial,seed,"));

        // A trial can be rerun alone from its seed.
        let report = sweep_success(&config).unwrap();
        let r = &report.records[5];
        assert_eq!(r.seed, config.trial_seed(r.c_index, r.trial));
        assert_eq!(&run_trial(&config, r.c_index, r.trial).unwrap(), r);
        assert_eq!(report.rows, summarize(&config.c_grid, &report.records));
    }

    #[test]
    fn invalid_sweeps_are_rejected() {
        let mut c = small_sweep();
        c.trials = 0;
        assert!(sweep_success(&c).is_err());
        let mut c = small_sweep();
        c.c_grid = vec![5.0, 1.0];
        assert!(sweep_success(&c).is_err());
    }

    #[test]
    fn summary_json_has_schema() {
        let report = sweep_success(&small_sweep()).unwrap();
        let mut out = Vec::new();
        write_summary_json(&report, &mut out).unwrap();
        let v: serde_json::Value = serde_json::from_slice(&out).unwrap();
        assert_eq!(v["schema"], 1);
        assert_eq!(v["rows"].as_array().unwrap().len(), 2);
    }

    #[test]
    fn blocker_at_tiny_radius_certifies() {
        let report = check_bipartite_blocker(100, 0.3, 1e-3, 2, 3, 1).unwrap();
        for t in &report.trials {
            assert_eq!(t.isolated_in_b, 70);
            assert!(t.certified && !t.builder_success);
        }
        assert_eq!(report.fraction, 1.0);
    }

    #[test]
    fn lemma_report_shapes() {
        let r = check_lemma41(2000, 0.05, 2, 0, 1).unwrap();
        assert!(r.isolated.is_empty());
        let r = check_lemma41(2000, 0.05, 2, 4, 1).unwrap();
        assert_eq!(r.isolated.len(), 4);
        assert!((0.0..=1.0).contains(&r.fraction));
    }

    #[test]
    fn census_single_cell() {
        let spec = InstanceSpec {
            n: 200,
            dim: 2,
            norm: Norm::L2,
            alpha: 0.3,
            family: HostFamily::BlownUpCycle,
            radius: RadiusSpec::Radius(3.0),
        };
        let report = claims_census(&spec, 2, 0).unwrap();
        for t in &report.trials {
            assert_eq!(t.sparse, 0);
            assert_eq!(t.components, 1);
            assert_eq!(t.unlinked.len(), CENSUS_PAIRS);
        }
    }
}
