//! The `qwalk` command line.
//!
//! Exit codes: 0 success, 1 replay digest mismatch, 2 invalid usage or
//! configuration, 3 simulation error (boundary breach, step limit).

use std::ffi::OsString;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::error::WalkError;
use crate::io::{
    distribution_csv, ensemble_variance_csv, localization_csv, series_csv, sweep_csv, OutputSet, RunManifest, RunSpec,
    ENSEMBLE_DIST_FILE, ENSEMBLE_VARIANCE_FILE, LOCALIZATION_FILE, SERIES_FILE, SWEEP_FILE,
};
use crate::localization::localization_report;
use crate::randomness::{RandomnessMode, Seed};
use crate::sweep::{
    default_grid, run_walk, sweep_theta, uniform_grid, WalkConfig, DEFAULT_GRID_POINTS, DEFAULT_REALIZATIONS,
    DEFAULT_WINDOW_FRACTION,
};
use crate::translation::WalkVariant;

pub const EXIT_OK: i32 = 0;
pub const EXIT_MISMATCH: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_SIMULATION: i32 = 3;

/// Caps the number of worker threads; never changes results.
pub const THREADS_ENV: &str = "QWALK_THREADS";

#[derive(Debug, Parser)]
#[command(name = "qwalk", version, about = "Discrete-time quantum walk simulator")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run one walk; write series.csv and optional distribution snapshots.
    Walk(WalkArgs),
    /// Steady-state ES and overlap over a grid of coin angles.
    Sweep(SweepArgs),
    /// Variance-growth and tail fits for an ensemble of random walks.
    Localization(LocalizationArgs),
    /// Re-run the command recorded in a manifest.
    Replay(ReplayArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ModeArg {
    None,
    Time,
    Space,
}

#[derive(Debug, Args)]
struct CommonArgs {
    #[arg(long, default_value = "conventional")]
    variant: WalkVariant,
    /// Half-width N of the lattice {-N..-1, 1..N}.
    #[arg(long = "n", default_value_t = 100)]
    n_half: usize,
    /// Number of steps (default: the variant's maximum for N).
    #[arg(long)]
    steps: Option<usize>,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    phi1: f64,
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_2, allow_negative_numbers = true)]
    phi2: f64,
    #[arg(long, value_enum, default_value = "none")]
    mode: ModeArg,
    /// Half-separation of the two random coin angles (required for random modes).
    #[arg(long)]
    dtheta: Option<f64>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Fraction of the series averaged as the steady state.
    #[arg(long, default_value_t = DEFAULT_WINDOW_FRACTION)]
    window: f64,
    /// Read angle flags in degrees instead of radians.
    #[arg(long)]
    degrees: bool,
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct WalkArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Coin angle (θ₀ for random modes).
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_4, allow_negative_numbers = true)]
    theta: f64,
    /// Step at which to write dist_t<k>.csv; repeatable or comma-separated.
    #[arg(long, value_delimiter = ',')]
    snapshot: Vec<usize>,
}

#[derive(Debug, Args)]
struct SweepArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Number of grid points.
    #[arg(long, alias = "theta0-grid", default_value_t = DEFAULT_GRID_POINTS)]
    grid: usize,
    /// Lower grid end (default 0, or Δθ for random modes).
    #[arg(long)]
    theta_min: Option<f64>,
    /// Upper grid end (default π, or π − Δθ for random modes).
    #[arg(long)]
    theta_max: Option<f64>,
    /// Realizations per grid point (default 1 without randomness, else 100).
    #[arg(long)]
    realizations: Option<usize>,
}

#[derive(Debug, Args)]
struct LocalizationArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Central coin angle θ₀.
    #[arg(long, default_value_t = std::f64::consts::FRAC_PI_6)]
    theta: f64,
    #[arg(long, default_value_t = DEFAULT_REALIZATIONS)]
    realizations: usize,
}

#[derive(Debug, Args)]
struct ReplayArgs {
    /// Path to a manifest.json written by an earlier run.
    manifest: PathBuf,
    #[arg(long, default_value = ".")]
    out: PathBuf,
    /// Compare the new outputs' digests with the manifest; exit 1 on mismatch.
    #[arg(long)]
    check: bool,
}

#[derive(Debug)]
enum Failure {
    Usage(String),
    Walk(WalkError),
    Io(std::io::Error),
    Mismatch(Vec<String>),
}

impl From<WalkError> for Failure {
    fn from(e: WalkError) -> Self {
        Failure::Walk(e)
    }
}

impl From<std::io::Error> for Failure {
    fn from(e: std::io::Error) -> Self {
        Failure::Io(e)
    }
}

impl CommonArgs {
    fn angle(&self, v: f64) -> f64 {
        if self.degrees {
            v.to_radians()
        } else {
            v
        }
    }

    fn config(&self, theta: f64) -> Result<WalkConfig, Failure> {
        let theta0 = self.angle(theta);
        let mode = match (self.mode, self.dtheta) {
            (ModeArg::None, _) => RandomnessMode::None { theta0 },
            (_, None) => return Err(Failure::Usage("--dtheta is required with --mode time|space".into())),
            (ModeArg::Time, Some(d)) => RandomnessMode::TimeRandom {
                theta0,
                dtheta: self.angle(d),
            },
            (ModeArg::Space, Some(d)) => RandomnessMode::SpaceRandom {
                theta0,
                dtheta: self.angle(d),
            },
        };
        let mut config = WalkConfig::new(self.variant, self.n_half, theta0)
            .with_phases(self.angle(self.phi1), self.angle(self.phi2))
            .with_mode(mode)
            .with_seed(Seed::new(self.seed, 0));
        if let Some(steps) = self.steps {
            config.steps = steps;
        }
        config.window_fraction = self.window;
        Ok(config)
    }
}

fn execute(run: &RunSpec, out: &Path) -> Result<RunManifest, Failure> {
    let prov = run.provenance();
    let mut files = OutputSet::new(out);
    match run {
        RunSpec::Walk { config } => {
            let series = run_walk(config)?;
            files.add(SERIES_FILE, series_csv(&series, prov));
            for (step, dist) in &series.snapshots {
                files.add(crate::io::dist_file_name(*step), distribution_csv(dist, prov));
            }
        }
        RunSpec::Sweep {
            config,
            grid,
            realizations,
        } => {
            let result = sweep_theta(config, grid, *realizations)?;
            files.add(SWEEP_FILE, sweep_csv(&result, prov));
        }
        RunSpec::Localization { config, realizations } => {
            let report = localization_report(config, *realizations)?;
            files.add(LOCALIZATION_FILE, localization_csv(&report, prov));
            files.add(
                ENSEMBLE_DIST_FILE,
                distribution_csv(&report.ensemble_distribution, prov),
            );
            files.add(ENSEMBLE_VARIANCE_FILE, ensemble_variance_csv(&report, prov));
        }
    }
    Ok(files.write(run.clone())?)
}

fn resolve(command: Command) -> Result<(RunSpec, PathBuf, Option<RunManifest>), Failure> {
    match command {
        Command::Walk(a) => {
            let mut config = a.common.config(a.theta)?;
            let mut snaps = a.snapshot;
            snaps.sort_unstable();
            snaps.dedup();
            config.record_distributions = snaps;
            Ok((RunSpec::Walk { config }, a.common.out, None))
        }
        Command::Sweep(a) => {
            let config = a.common.config(0.0)?;
            let grid = match (a.theta_min, a.theta_max) {
                (None, None) => default_grid(&config.mode, a.grid),
                (lo, hi) => {
                    let full = default_grid(&config.mode, 2);
                    let lo = lo.map_or(full[0], |v| a.common.angle(v));
                    let hi = hi.map_or(full[1], |v| a.common.angle(v));
                    uniform_grid(lo, hi, a.grid)
                }
            };
            let realizations = a.realizations.unwrap_or(if config.mode.is_random() {
                DEFAULT_REALIZATIONS
            } else {
                1
            });
            Ok((
                RunSpec::Sweep {
                    config,
                    grid,
                    realizations,
                },
                a.common.out,
                None,
            ))
        }
        Command::Localization(a) => {
            if a.common.mode == ModeArg::None {
                return Err(Failure::Usage("localization needs --mode time or --mode space".into()));
            }
            let config = a.common.config(a.theta)?;
            Ok((
                RunSpec::Localization {
                    config,
                    realizations: a.realizations,
                },
                a.common.out,
                None,
            ))
        }
        Command::Replay(a) => {
            let manifest = RunManifest::load(&a.manifest)
                .map_err(|e| Failure::Usage(format!("cannot read manifest {}: {e}", a.manifest.display())))?;
            let run = manifest.run.clone();
            Ok((run, a.out, a.check.then_some(manifest)))
        }
    }
}

fn thread_pool() -> Result<rayon::ThreadPool, Failure> {
    let mut builder = rayon::ThreadPoolBuilder::new();
    if let Ok(v) = std::env::var(THREADS_ENV) {
        let n: usize = v
            .trim()
            .parse()
            .ok()
            .filter(|&n| n > 0)
            .ok_or_else(|| Failure::Usage(format!("{THREADS_ENV} must be a positive integer, got {v:?}")))?;
        builder = builder.num_threads(n);
    }
    builder
        .build()
        .map_err(|e| Failure::Usage(format!("cannot build worker pool: {e}")))
}

fn dispatch(command: Command) -> Result<(), Failure> {
    let (run, out, expected) = resolve(command)?;
    let pool = thread_pool()?;
    let manifest = pool.install(|| execute(&run, &out))?;
    if let Some(expected) = expected {
        let bad: Vec<String> = expected
            .outputs
            .iter()
            .filter(|(name, digest)| manifest.outputs.get(*name) != Some(digest))
            .map(|(name, _)| name.clone())
            .collect();
        if !bad.is_empty() {
            return Err(Failure::Mismatch(bad));
        }
    }
    Ok(())
}

/// Parses `args` (including the program name) and runs; returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
        }
    };
    match dispatch(cli.command) {
        Ok(()) => EXIT_OK,
        Err(Failure::Usage(msg)) => {
            eprintln!("error: {msg}");
            EXIT_USAGE
        }
        Err(Failure::Walk(e)) => {
            eprintln!("error: {e}");
            if e.is_simulation_error() {
                EXIT_SIMULATION
            } else {
                EXIT_USAGE
            }
        }
        Err(Failure::Io(e)) => {
            eprintln!("error: {e}");
            EXIT_USAGE
        }
        Err(Failure::Mismatch(files)) => {
            eprintln!("error: replay differs from manifest in {}", files.join(", "));
            EXIT_MISMATCH
        }
    }
}

pub fn main() -> i32 {
    run(std::env::args_os())
}
