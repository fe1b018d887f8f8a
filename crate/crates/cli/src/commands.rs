use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::Path;
use std::process::ExitCode;

use anyhow::{bail, Context, Result};
use perturbed_hamilton::builder::{build, verify_with, CycleCertificate};
use perturbed_hamilton::experiments::{
    blocker_constant, calibration_config, check_bipartite_blocker, check_lemma41, claims_census,
    sweep_success, write_records_csv, write_summary_json, SweepConfig,
};
use perturbed_hamilton::graphs::{gen_min_degree_h, sample_positions, write_graph, GeometricGraph};
use perturbed_hamilton::instance::radius_from_constant;
use perturbed_hamilton::rng::derive_seed;
use perturbed_hamilton::{
    build_rgg, classify_cells, exact_hamilton, Graph, HostGraph, InstanceSpec, PerturbedInstance,
    Positions, RadiusSpec,
};

use crate::{
    Blocker, Build, Census, Command, Format, GenH, GenPoints, GenRgg, InstanceArgs, Lemma41,
    Oracle, RadiusArgs, Sweep, Verify,
};

pub fn run(command: Command) -> Result<ExitCode> {
    match command {
        Command::GenH(a) => gen_h(a),
        Command::GenPoints(a) => gen_points(a),
        Command::GenRgg(a) => gen_rgg(a),
        Command::Build(a) => build_cmd(a),
        Command::Verify(a) => verify_cmd(a),
        Command::Oracle(a) => oracle(a),
        Command::Census(a) => census(a),
        Command::Sweep(a) => sweep(a),
        Command::Lemma41(a) => lemma41(a),
        Command::Blocker(a) => blocker(a),
    }
}

fn open(path: &Path) -> Result<BufReader<File>> {
    let f = File::open(path).with_context(|| format!("cannot open {}", path.display()))?;
    Ok(BufReader::new(f))
}

/// Writes to `path`, or to stdout when absent.
fn with_output(path: Option<&Path>, f: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    match path {
        Some(p) => {
            let file = File::create(p).with_context(|| format!("cannot create {}", p.display()))?;
            let mut w = BufWriter::new(file);
            f(&mut w).with_context(|| format!("writing {}", p.display()))?;
            w.flush()
                .with_context(|| format!("writing {}", p.display()))?;
        }
        None => {
            let stdout = io::stdout();
            let mut w = BufWriter::new(stdout.lock());
            f(&mut w)?;
            w.flush()?;
        }
    }
    Ok(())
}

fn write_json<T: serde::Serialize>(path: Option<&Path>, value: &T) -> Result<()> {
    with_output(path, |w| {
        serde_json::to_writer_pretty(&mut *w, value)?;
        writeln!(w)?;
        Ok(())
    })
}

fn read_graph(path: &Path) -> Result<Graph> {
    Graph::read_from(open(path)?).with_context(|| format!("reading graph {}", path.display()))
}

fn read_positions(path: &Path) -> Result<Positions> {
    Positions::read_from(open(path)?)
        .with_context(|| format!("reading positions {}", path.display()))
}

fn radius(args: &RadiusArgs, n: usize, d: usize) -> Result<f64> {
    let spec = match (args.r, args.c) {
        (Some(r), None) => RadiusSpec::Radius(r),
        (None, Some(c)) => RadiusSpec::Constant(c),
        _ => bail!("give exactly one of --r and --C"),
    };
    Ok(spec.resolve(n, d)?)
}

fn gen_h(a: GenH) -> Result<ExitCode> {
    let h = gen_min_degree_h(a.n, a.alpha, a.family, a.seed)?;
    with_output(a.out.as_deref(), |w| Ok(write_graph(&h, w)?))?;
    Ok(ExitCode::SUCCESS)
}

fn gen_points(a: GenPoints) -> Result<ExitCode> {
    let pos = sample_positions(a.n, a.d, a.seed)?;
    with_output(a.out.as_deref(), |w| Ok(pos.write_to(w)?))?;
    Ok(ExitCode::SUCCESS)
}

fn gen_rgg(a: GenRgg) -> Result<ExitCode> {
    let pos = read_positions(&a.input)?;
    let r = radius(&a.radius, pos.len(), pos.dim())?;
    let g = build_rgg(&pos, r, a.p)?;
    with_output(a.out.as_deref(), |w| Ok(g.write_to(w)?))?;
    Ok(ExitCode::SUCCESS)
}

fn load_instance(a: &InstanceArgs) -> Result<PerturbedInstance> {
    let positions = match &a.points {
        Some(p) => read_positions(p)?,
        None => {
            let Some(n) = a.n else {
                bail!("--n is required when --points is not given");
            };
            sample_positions(n, a.d, derive_seed(a.seed, &[0]))?
        }
    };
    let n = positions.len();
    if let Some(expected) = a.n {
        if expected != n {
            bail!("--n {expected} does not match the {n} points read");
        }
    }
    let host = match &a.h {
        Some(p) => HostGraph::from(read_graph(p)?),
        None => gen_min_degree_h(n, a.alpha, a.family, derive_seed(a.seed, &[1]))?,
    };
    let r = radius(&a.radius, n, positions.dim())?;
    Ok(PerturbedInstance::new(positions, host, r, a.p, a.seed)?)
}

fn build_cmd(a: Build) -> Result<ExitCode> {
    let instance = load_instance(&a.instance)?;
    if let Some(p) = &a.save_h {
        with_output(Some(p), |w| Ok(write_graph(instance.host(), w)?))?;
    }
    if let Some(p) = &a.save_points {
        with_output(Some(p), |w| Ok(instance.positions().write_to(w)?))?;
    }
    let outcome = build(&instance);
    match outcome.result {
        Ok(cert) => {
            with_output(a.out.as_deref(), |w| Ok(cert.write_to(w)?))?;
            for warning in &outcome.stats.warnings {
                eprintln!("warning: {warning}");
            }
            Ok(ExitCode::SUCCESS)
        }
        Err(failure) => {
            let report = serde_json::json!({
                "schema": 1,
                "status": "failure",
                "failure": failure,
                "stats": outcome.stats,
            });
            write_json(a.report.as_deref(), &report)?;
            eprintln!("build failed: {failure}");
            Ok(ExitCode::from(1))
        }
    }
}

fn verify_cmd(a: Verify) -> Result<ExitCode> {
    let cert = CycleCertificate::read_from(open(&a.cert)?)
        .with_context(|| format!("reading certificate {}", a.cert.display()))?;
    let h = read_graph(&a.h)?;
    let ok = match (&a.g, &a.points) {
        (Some(g), _) => verify_with(&cert, &h, &read_graph(g)?),
        (None, Some(points)) => {
            let pos = read_positions(points)?;
            let args = RadiusArgs { r: a.r, c: a.c };
            let r = radius(&args, pos.len(), pos.dim())?;
            verify_with(&cert, &h, &GeometricGraph::new(pos, r, a.p)?)
        }
        (None, None) => bail!("give either --g or --points with --r or --C"),
    };
    println!("{}", if ok { "valid" } else { "invalid" });
    Ok(if ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    })
}

fn oracle(a: Oracle) -> Result<ExitCode> {
    let g = read_graph(&a.input)?;
    let result = exact_hamilton(&g, a.limit)?;
    write_json(None, &result)?;
    Ok(ExitCode::SUCCESS)
}

fn census(a: Census) -> Result<ExitCode> {
    let spec = InstanceSpec {
        n: a.n,
        dim: a.d,
        norm: a.p,
        alpha: a.alpha,
        family: a.family,
        radius: RadiusSpec::Radius(radius(&a.radius, a.n, a.d)?),
    };
    let report = claims_census(&spec, a.trials, a.seed)?;
    write_json(a.out.as_deref(), &report)?;
    if let Some(p) = &a.cells {
        let Some(first) = report.trials.first() else {
            bail!("--cells needs at least one trial");
        };
        let instance = PerturbedInstance::generate(&spec, first.seed)?;
        let cls = classify_cells(&instance);
        with_output(Some(p), |w| Ok(cls.write_census_csv(w)?))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn sweep(a: Sweep) -> Result<ExitCode> {
    let mut config = if a.calibration {
        calibration_config()
    } else {
        SweepConfig {
            n: a.n,
            dim: a.d,
            norm: a.p,
            alpha: a.alpha,
            family: a.family,
            c_grid: a.c.clone(),
            trials: a.trials,
            master_seed: a.seed,
            record_time: false,
        }
    };
    config.record_time = a.time;
    let report = sweep_success(&config)?;
    match a.format {
        Format::Csv => with_output(a.out.as_deref(), |w| {
            Ok(write_records_csv(&report.records, w)?)
        })?,
        Format::Json => with_output(a.out.as_deref(), |w| Ok(write_summary_json(&report, w)?))?,
    }
    if let Some(p) = &a.summary {
        with_output(Some(p), |w| Ok(write_summary_json(&report, w)?))?;
    }
    Ok(ExitCode::SUCCESS)
}

fn lemma41(a: Lemma41) -> Result<ExitCode> {
    let report = check_lemma41(a.n, a.alpha, a.d, a.trials, a.seed)?;
    write_json(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}

fn blocker(a: Blocker) -> Result<ExitCode> {
    let c = match a.c {
        Some(c) => {
            radius_from_constant(c, a.n, a.d)?;
            c
        }
        None => blocker_constant(a.n, a.alpha, a.d)?,
    };
    let report = check_bipartite_blocker(a.n, a.alpha, c, a.d, a.trials, a.seed)?;
    write_json(a.out.as_deref(), &report)?;
    Ok(ExitCode::SUCCESS)
}
