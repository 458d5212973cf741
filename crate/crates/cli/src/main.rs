use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::Serialize;

mod commands;
mod plot;
mod run;

#[derive(Debug, Parser)]
#[command(name = "netinterp", version, about = "Random edit-path interpolation between graph snapshots")]
pub struct Cli {
    /// Root directory for per-run output folders [env: NETINTERP_OUT, default: ./runs]
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Interpolate between consecutive graph snapshots.
    Interpolate(InterpolateArgs),
    /// Expected steps to reach the target distance, analytically or by simulation.
    HittingTime(HittingArgs),
    /// Long-run distribution of the edit distance.
    LimitingDist(LimitingArgs),
    /// Rate whose expected hitting time best matches an observed step count.
    FitRate(FitArgs),
    /// Growth-model extrapolation towards snapshots.
    Baseline(BaselineArgs),
    /// Write a random graph.
    Generate(GenerateArgs),
    /// Spectral clustering along a block-model transition.
    SbmExperiment(SbmArgs),
    /// Clustering statistics of graphs or along a trace.
    Stats(StatsArgs),
    /// Cumulative snapshots from a timestamped event list.
    Aggregate(AggregateArgs),
    /// Rerun the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Mode {
    UntilTarget,
    UntilDistance,
    Fixed,
}

#[derive(Debug, Args, Serialize)]
pub struct InterpolateArgs {
    /// Snapshot files in order; each consecutive pair is interpolated.
    #[arg(required = true, num_args = 2..)]
    pub snapshots: Vec<PathBuf>,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long = "target-dist", default_value_t = 0)]
    pub target_distance: u64,
    #[arg(long, value_enum, default_value_t = Mode::UntilTarget)]
    pub mode: Mode,
    /// Step count for `--mode fixed`.
    #[arg(long, required_if_eq("mode", "fixed"))]
    pub steps: Option<u64>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Regress only by deleting shared edges, never by adding edges outside both snapshots.
    #[arg(long)]
    pub no_false_edges: bool,
    /// Statistics stride; chosen from the graph size when omitted.
    #[arg(long)]
    pub stats_every: Option<u64>,
    #[arg(long)]
    pub step_limit: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct HittingArgs {
    /// Initial edit distance (analytic mode).
    #[arg(long = "do", required_unless_present = "empirical")]
    pub d_o: Option<u64>,
    #[arg(long = "dt", default_value_t = 0)]
    pub d_t: u64,
    /// Maximum edit distance; alternatively give --n.
    #[arg(long = "dm", conflicts_with = "n")]
    pub d_m: Option<u64>,
    /// Vertex count of undirected graphs, sets the maximum distance.
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long, default_value_t = f64::EPSILON)]
    pub tol: f64,
    /// Simulate interpolations between --start and --target.
    #[arg(long, requires_all = ["start", "target"])]
    pub empirical: bool,
    #[arg(long)]
    pub start: Option<PathBuf>,
    #[arg(long)]
    pub target: Option<PathBuf>,
    #[arg(long, default_value_t = 1000)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct LimitingArgs {
    #[arg(long = "dt")]
    pub d_t: u64,
    #[arg(long = "dm", required_unless_present = "n", conflicts_with = "n")]
    pub d_m: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    /// Closed-form approximation on d_t - k_max ..= d_t + k_max instead of the exact vector.
    #[arg(long, conflicts_with = "exact")]
    pub approx: bool,
    #[arg(long)]
    pub exact: bool,
    /// Write both and report the largest per-state gap.
    #[arg(long, conflicts_with_all = ["approx", "exact"])]
    pub compare: bool,
    /// Half-width of the approximation window; defaults to d_t - 1.
    #[arg(long)]
    pub k_max: Option<u64>,
}

#[derive(Debug, Args, Serialize)]
pub struct FitArgs {
    #[arg(long = "do")]
    pub d_o: u64,
    #[arg(long = "dt", default_value_t = 0)]
    pub d_t: u64,
    #[arg(long = "dm", required_unless_present = "n", conflicts_with = "n")]
    pub d_m: Option<u64>,
    #[arg(long)]
    pub n: Option<usize>,
    /// Observed number of steps.
    #[arg(long)]
    pub steps: f64,
    #[arg(long, default_value_t = 50.0)]
    pub grid: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelKind {
    Uniform,
    Preferential,
    TriangleClosing,
}

#[derive(Debug, Args, Serialize)]
pub struct BaselineArgs {
    /// One target snapshot (grown from a clique), or a sequence to extrapolate between.
    #[arg(required = true)]
    pub snapshots: Vec<PathBuf>,
    #[arg(long, value_enum, default_value_t = ModelKind::Uniform)]
    pub model: ModelKind,
    #[arg(long, default_value_t = 3)]
    pub m: usize,
    #[arg(long = "m-r", default_value_t = 5)]
    pub m_r: usize,
    #[arg(long = "p-r", default_value_t = 0.5)]
    pub p_r: f64,
    #[arg(long = "m-n", default_value_t = 1)]
    pub m_n: usize,
    #[arg(long = "p-n", default_value_t = 0.5)]
    pub p_n: f64,
    /// Size of the starting clique for a single target; defaults to the model's.
    #[arg(long)]
    pub start_clique: Option<usize>,
    #[arg(long, default_value_t = 1)]
    pub every: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum GraphKind {
    /// Each pair with probability --p.
    Er,
    /// Exactly --m uniformly random edges.
    Gnm,
    /// Block model with --blocks, --p, --q.
    Sbm,
}

#[derive(Debug, Args, Serialize)]
pub struct GenerateArgs {
    #[arg(value_enum)]
    pub kind: GraphKind,
    #[arg(long, required_if_eq_any([("kind", "er"), ("kind", "gnm")]))]
    pub n: Option<usize>,
    #[arg(long, default_value_t = 0.5)]
    pub p: f64,
    #[arg(long, default_value_t = 0.1)]
    pub q: f64,
    #[arg(long, value_delimiter = ',', required_if_eq("kind", "sbm"))]
    pub blocks: Vec<usize>,
    #[arg(long, required_if_eq("kind", "gnm"))]
    pub m: Option<usize>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum ScenarioArg {
    Split,
    Independent,
}

#[derive(Debug, Args, Serialize)]
pub struct SbmArgs {
    #[arg(long, value_enum, default_value_t = ScenarioArg::Split)]
    pub scenario: ScenarioArg,
    #[arg(long, default_value_t = 120)]
    pub n: usize,
    #[arg(long, default_value_t = 0.9)]
    pub p: f64,
    #[arg(long, default_value_t = 0.1)]
    pub q: f64,
    #[arg(long, default_value_t = 1.0)]
    pub rate: f64,
    #[arg(long = "target-dist", default_value_t = 0)]
    pub target_distance: u64,
    #[arg(long, default_value_t = 25)]
    pub stride: u64,
    #[arg(long, default_value_t = 3)]
    pub k: usize,
    #[arg(long, default_value_t = 51)]
    pub linear_points: usize,
    #[arg(long, default_value_t = 10)]
    pub restarts: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct StatsArgs {
    /// Graph files; distances are measured to the last one.
    #[arg(conflicts_with = "trace")]
    pub graphs: Vec<PathBuf>,
    #[arg(long, requires = "start")]
    pub trace: Option<PathBuf>,
    #[arg(long)]
    pub start: Option<PathBuf>,
    #[arg(long, default_value_t = 1)]
    pub every: u64,
}

#[derive(Debug, Args, Serialize)]
pub struct AggregateArgs {
    pub events: PathBuf,
    /// Explicit cutoff times.
    #[arg(long, value_delimiter = ',', conflicts_with = "stride")]
    pub cutoffs: Vec<i64>,
    /// Cutoff spacing in time units; defaults to 100 days of seconds.
    #[arg(long)]
    pub stride: Option<i64>,
    /// Input lines are `t author...` records expanded to cliques.
    #[arg(long)]
    pub authors: bool,
    #[arg(long, default_value_t = 10)]
    pub max_authors: usize,
    #[arg(long)]
    pub directed: bool,
}

#[derive(Debug, Args, Serialize)]
pub struct ReplayArgs {
    /// A manifest.json or the run directory containing it.
    pub manifest: PathBuf,
}

fn main() -> ExitCode {
    // Exit quietly when stdout is closed early, as in `netinterp ... | head`.
    #[cfg(unix)]
    unsafe {
        libc::signal(libc::SIGPIPE, libc::SIG_DFL);
    }
    let args: Vec<String> = std::env::args().skip(1).collect();
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return ExitCode::from(e.exit_code() as u8);
        }
    };
    match commands::dispatch(cli, &args) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(1)
        }
    }
}
