mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use perturbed_hamilton::{HostFamily, Norm};

/// Hamilton cycles in dense graphs perturbed by random geometric graphs.
#[derive(Debug, Parser)]
#[command(name = "perturbed-hamilton", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Write a host graph with minimum degree at least floor(alpha*n).
    GenH(GenH),
    /// Write n uniform points in [0,1]^d.
    GenPoints(GenPoints),
    /// Build the geometric graph of a positions file.
    GenRgg(GenRgg),
    /// Construct a Hamilton cycle of H ∪ G.
    Build(Build),
    /// Check a cycle certificate against H and G.
    Verify(Verify),
    /// Decide Hamiltonicity of a small graph exactly.
    Oracle(Oracle),
    /// Count sparse cells, components and unlinked cells against their bounds.
    Census(Census),
    /// Builder success rate over a grid of radius constants.
    Sweep(Sweep),
    /// Isolated vertices at the small-radius counterexample.
    Lemma41(Lemma41),
    /// Bipartite host with a small radius: isolated vertices inside the large part.
    Blocker(Blocker),
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Format {
    Csv,
    Json,
}

/// Radius, given directly or as C in r = (C/n)^(1/d).
#[derive(Debug, Args)]
#[group(required = true, multiple = false)]
struct RadiusArgs {
    /// Connection radius.
    #[arg(long = "r")]
    r: Option<f64>,
    /// Radius constant C, with r = (C/n)^(1/d).
    #[arg(long = "C")]
    c: Option<f64>,
}

#[derive(Debug, Args)]
struct GenH {
    #[arg(long = "n")]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = HostFamily::BlownUpCycle)]
    family: HostFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output graph file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenPoints {
    #[arg(long = "n")]
    n: usize,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Output positions file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GenRgg {
    /// Positions file.
    #[arg(long = "in")]
    input: PathBuf,
    #[command(flatten)]
    radius: RadiusArgs,
    /// The p of the l_p norm ("inf" for the maximum norm).
    #[arg(long = "p", default_value_t = Norm::L2)]
    p: Norm,
    /// Output graph file (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
}

/// Instance source: files, or generation from a seed.
#[derive(Debug, Args)]
struct InstanceArgs {
    /// Host graph file; generated from --family when omitted.
    #[arg(long)]
    h: Option<PathBuf>,
    /// Positions file; sampled from --seed when omitted.
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long = "n")]
    n: Option<usize>,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    #[arg(long = "p", default_value_t = Norm::L2)]
    p: Norm,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = HostFamily::BlownUpCycle)]
    family: HostFamily,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[command(flatten)]
    radius: RadiusArgs,
}

#[derive(Debug, Args)]
struct Build {
    #[command(flatten)]
    instance: InstanceArgs,
    /// Certificate output (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Write the JSON failure report here instead of stdout.
    #[arg(long)]
    report: Option<PathBuf>,
    /// Also save the instance's host graph.
    #[arg(long)]
    save_h: Option<PathBuf>,
    /// Also save the instance's positions.
    #[arg(long)]
    save_points: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Verify {
    /// Certificate file.
    #[arg(long)]
    cert: PathBuf,
    /// Explicit geometric graph file, instead of positions and radius.
    #[arg(long, conflicts_with_all = ["points", "r", "c"])]
    g: Option<PathBuf>,
    /// Host graph file.
    #[arg(long)]
    h: PathBuf,
    #[arg(long)]
    points: Option<PathBuf>,
    #[arg(long = "r")]
    r: Option<f64>,
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long = "p", default_value_t = Norm::L2)]
    p: Norm,
}

#[derive(Debug, Args)]
struct Oracle {
    /// Graph file.
    #[arg(long = "in")]
    input: PathBuf,
    #[arg(long, default_value_t = perturbed_hamilton::oracle::DEFAULT_LIMIT)]
    limit: usize,
}

#[derive(Debug, Args)]
struct Census {
    #[arg(long = "n", default_value_t = 100_000)]
    n: usize,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    #[arg(long = "p", default_value_t = Norm::L2)]
    p: Norm,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = HostFamily::BlownUpCycle)]
    family: HostFamily,
    #[command(flatten)]
    radius: RadiusArgs,
    #[arg(long, default_value_t = 30)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// JSON claims report (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Also write the per-cell CSV (cell, coordinates, occupants, class) of
    /// the first trial's instance.
    #[arg(long)]
    cells: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Sweep {
    /// Run the committed calibration sweep; other instance flags are ignored.
    #[arg(long)]
    calibration: bool,
    #[arg(long = "n", default_value_t = 5000)]
    n: usize,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    #[arg(long = "p", default_value_t = Norm::L2)]
    p: Norm,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long, default_value_t = HostFamily::BlownUpCycle)]
    family: HostFamily,
    /// Ascending radius constants, comma separated.
    #[arg(
        long = "C",
        value_delimiter = ',',
        required_unless_present = "calibration"
    )]
    c: Vec<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Records wall time per trial (the CSV is then no longer reproducible).
    #[arg(long)]
    time: bool,
    /// Output for --format (stdout if omitted).
    #[arg(long)]
    out: Option<PathBuf>,
    /// Per-trial CSV, or the JSON summary.
    #[arg(long, value_enum, default_value_t = Format::Csv)]
    format: Format,
    /// Also write the JSON summary here.
    #[arg(long)]
    summary: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Lemma41 {
    #[arg(long = "n", default_value_t = 100_000)]
    n: usize,
    #[arg(long, default_value_t = 0.01)]
    alpha: f64,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct Blocker {
    #[arg(long = "n", default_value_t = 10_000)]
    n: usize,
    #[arg(long, default_value_t = 0.3)]
    alpha: f64,
    #[arg(long = "d", default_value_t = 2)]
    d: usize,
    /// Radius constant; defaults to the counterexample radius on the large part.
    #[arg(long = "C")]
    c: Option<f64>,
    #[arg(long, default_value_t = 20)]
    trials: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long)]
    out: Option<PathBuf>,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match commands::run(cli.command) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            ExitCode::from(2)
        }
    }
}
