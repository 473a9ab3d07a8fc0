//! Command-line interface: `metric-check | solve | lsd | spiked | clt`.
//!
//! All results go to standard output as CSV (or to `--out <path>`); exit code
//! 0 means every judged criterion passed, 1 means a criterion failed or a
//! solver errored, 2 means the invocation itself was invalid. The default
//! seed comes from `RMTK_SEED` when the flag is absent; flags win.

use std::ffi::OsString;
use std::fs::File;
use std::io::Write;
use std::path::PathBuf;

use clap::error::ErrorKind;
use clap::{Args, Parser, Subcommand, ValueEnum};

use super::{
    defaults, run_clt_experiment, run_lsd_experiment, run_spiked_experiment, CltOptions,
    LsdEnsemble, LsdOptions, SpikedOptions,
};
use crate::ensembles::{EntryLaw, PopulationMode, Rotation, SpikedConfig};
use crate::laws::{
    parse_complex, semicircle_stieltjes, solve_deformed_wigner, solve_silverstein,
    SolverSettings, UpperHalfPoint,
};
use crate::spectra::AtomicDistribution;
use crate::union_metric::UnionSpace;

/// Environment variable consulted for the seed when `--seed` is absent.
pub const SEED_ENV_VAR: &str = "RMTK_SEED";

#[derive(Parser)]
#[command(
    name = "rmtk",
    version,
    about = "Random-matrix spectral toolkit: metric checks, law solvers, Monte Carlo experiments"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Randomized metric-axiom check on a disjoint-union family.
    ///
    /// Emits one CSV line:
    /// max_triangle_violation,max_symmetry_violation,zero_distance_failures
    MetricCheck(MetricCheckArgs),
    /// Solve/evaluate a limiting law transform at one point; prints a
    /// header row and one data row.
    Solve(SolveArgs),
    /// Empirical-vs-limit KS distances along a ladder of matrix sizes.
    Lsd(LsdArgs),
    /// Spiked-covariance eigenvalue fluctuation experiment.
    Spiked(SpikedArgs),
    /// CLT experiment for derivative linear spectral statistics.
    Clt(CltArgs),
}

#[derive(Args)]
struct MetricCheckArgs {
    /// Number of component spaces in the family (including the base space).
    #[arg(long, default_value_t = 6)]
    spaces: usize,
    /// Component dimensions: comma list, cycled to the space count
    /// (a single value means constant dimensions).
    #[arg(long, default_value = "3,1,4,8,5,2")]
    dims: String,
    /// Random triples to draw.
    #[arg(long, default_value_t = 10_000)]
    samples: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum LawKind {
    Silverstein,
    Deformed,
    Semicircle,
}

#[derive(Args)]
struct SolveArgs {
    #[arg(long, value_enum)]
    law: LawKind,
    /// Population spectrum `weight:location,...` (silverstein/deformed).
    #[arg(long)]
    h: Option<String>,
    /// Aspect ratio p/n (silverstein only).
    #[arg(long)]
    y: Option<f64>,
    /// Evaluation point in the upper half plane, format a+bi.
    #[arg(long)]
    z: String,
    #[arg(long, default_value_t = 1e-12)]
    tol: f64,
    #[arg(long, default_value_t = 100_000)]
    max_iter: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum EnsembleKind {
    Wigner,
    SampleCovariance,
    Deformed,
}

#[derive(Copy, Clone, PartialEq, Eq, ValueEnum)]
enum PopulationModeArg {
    Apportioned,
    Iid,
}

#[derive(Args)]
struct LsdArgs {
    #[arg(long, value_enum, default_value_t = EnsembleKind::Wigner)]
    ensemble: EnsembleKind,
    /// Increasing matrix sizes, comma separated (e.g. 200,500,1000).
    #[arg(long)]
    sizes: String,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    /// gauss-real|gauss-complex|rademacher|uniform
    #[arg(long, default_value = "gauss-real")]
    entry_law: String,
    /// Population spectrum for sample-covariance/deformed ensembles.
    #[arg(long)]
    h: Option<String>,
    /// Aspect ratio p/n for the sample-covariance ensemble.
    #[arg(long)]
    y: Option<f64>,
    #[arg(long, value_enum, default_value_t = PopulationModeArg::Apportioned)]
    mode: PopulationModeArg,
    #[arg(long, default_value_t = defaults::WIGNER_DIAG_VARIANCE)]
    diag_variance: f64,
    /// Pass threshold on the final (largest-size) KS statistic.
    #[arg(long, default_value_t = defaults::LSD_FINAL_KS_MAX)]
    ks_threshold: f64,
    #[arg(long, default_value_t = defaults::SMOOTHING_V)]
    smoothing_v: f64,
    /// 0 = rayon default pool, 1 = serial, k = dedicated pool of k threads.
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SpikedArgs {
    /// Population spikes as `lambda:multiplicity,...`, strictly decreasing
    /// lambdas (e.g. 5:1,1:2).
    #[arg(long)]
    spikes: String,
    /// Sample count per replicate.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    reps: usize,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = defaults::SPIKED_VARIANCE_BAND)]
    variance_band: f64,
    #[arg(long, default_value_t = defaults::SPIKED_CROSS_CORR_MAX)]
    corr_max: f64,
    #[arg(long, default_value_t = defaults::SPIKED_ORDER_STAT_KS_MAX)]
    ks_max: f64,
    #[arg(long, default_value_t = defaults::SPIKED_BLOCK_LAW_DRAWS)]
    block_draws: usize,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct CltArgs {
    /// Matrix size.
    #[arg(long)]
    n: usize,
    #[arg(long)]
    reps: usize,
    /// Evaluation points a+bi; repeat the flag for several.
    #[arg(long, required = true)]
    z: Vec<String>,
    #[arg(long, default_value = "gauss-real")]
    entry_law: String,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long, default_value_t = defaults::WIGNER_DIAG_VARIANCE)]
    diag_variance: f64,
    /// Lower bound on Im z for the CLT formula region.
    #[arg(long, default_value_t = crate::laws::DEFAULT_CSC_V0)]
    v0: f64,
    #[arg(long, default_value_t = defaults::CLT_SE_MULTIPLE)]
    se_multiple: f64,
    #[arg(long, default_value_t = 0)]
    threads: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

enum Outcome {
    Pass,
    CriterionFailed,
}

#[derive(Debug)]
enum CliError {
    Usage(String),
    Run(String),
}

impl std::fmt::Display for CliError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            CliError::Usage(m) | CliError::Run(m) => f.write_str(m),
        }
    }
}

impl<E: std::error::Error> From<E> for CliError {
    fn from(e: E) -> Self {
        CliError::Run(e.to_string())
    }
}

/// Entry point used by the binary; returns the process exit code.
pub fn cli_main<I, T>(argv: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(argv) {
        Ok(cli) => cli,
        Err(err) => {
            return match err.kind() {
                ErrorKind::DisplayHelp | ErrorKind::DisplayVersion => {
                    let _ = err.print();
                    0
                }
                _ => {
                    eprint!("{err}");
                    2
                }
            };
        }
    };
    match dispatch(cli) {
        Ok(Outcome::Pass) => 0,
        Ok(Outcome::CriterionFailed) => 1,
        Err(CliError::Usage(msg)) => {
            eprintln!("error: {msg}");
            2
        }
        Err(CliError::Run(msg)) => {
            eprintln!("error: {msg}");
            1
        }
    }
}

fn dispatch(cli: Cli) -> Result<Outcome, CliError> {
    match cli.command {
        Command::MetricCheck(args) => metric_check(args),
        Command::Solve(args) => solve(args),
        Command::Lsd(args) => lsd(args),
        Command::Spiked(args) => spiked(args),
        Command::Clt(args) => clt(args),
    }
}

fn resolve_seed(flag: Option<u64>) -> Result<u64, CliError> {
    if let Some(seed) = flag {
        return Ok(seed);
    }
    match std::env::var(SEED_ENV_VAR) {
        Ok(text) => text.trim().parse().map_err(|_| {
            CliError::Usage(format!("{SEED_ENV_VAR}={text:?} is not a valid u64 seed"))
        }),
        Err(_) => Ok(0),
    }
}

fn open_output(path: &Option<PathBuf>) -> Result<Box<dyn Write>, CliError> {
    match path {
        Some(p) => Ok(Box::new(File::create(p)?)),
        None => Ok(Box::new(std::io::stdout().lock())),
    }
}

fn parse_usize_list(text: &str, what: &str) -> Result<Vec<usize>, CliError> {
    text.split(',')
        .map(|part| {
            part.trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad {what} entry {part:?}")))
        })
        .collect()
}

fn parse_upper_half(text: &str) -> Result<UpperHalfPoint, CliError> {
    let z = parse_complex(text).map_err(CliError::Usage)?;
    UpperHalfPoint::new(z).map_err(|e| CliError::Usage(e.to_string()))
}

fn parse_entry_law(text: &str) -> Result<EntryLaw, CliError> {
    text.parse().map_err(|e: crate::ensembles::EnsembleError| {
        CliError::Usage(e.to_string())
    })
}

fn parse_spectrum(text: &str) -> Result<AtomicDistribution, CliError> {
    text.parse()
        .map_err(|e: crate::spectra::SpectraError| CliError::Usage(e.to_string()))
}

fn metric_check(args: MetricCheckArgs) -> Result<Outcome, CliError> {
    if args.spaces == 0 {
        return Err(CliError::Usage("--spaces must be at least 1".into()));
    }
    if args.samples == 0 {
        return Err(CliError::Usage("--samples must be at least 1".into()));
    }
    let dim_list = parse_usize_list(&args.dims, "--dims")?;
    if dim_list.is_empty() || dim_list.contains(&0) {
        return Err(CliError::Usage("--dims entries must be positive".into()));
    }
    let dims: Vec<usize> = (0..args.spaces)
        .map(|k| dim_list[k % dim_list.len()])
        .collect();
    let seed = resolve_seed(args.seed)?;
    let space = UnionSpace::euclidean(dims)?;
    let report = space.metric_axiom_suite(seed, args.samples)?;
    let mut out = open_output(&args.out)?;
    writeln!(
        out,
        "{},{},{}",
        report.max_triangle_violation, report.max_symmetry_violation, report.zero_distance_failures
    )?;
    let clean = report.max_triangle_violation <= defaults::METRIC_TRIANGLE_TOL
        && report.max_symmetry_violation == 0.0
        && report.zero_distance_failures == 0;
    Ok(if clean { Outcome::Pass } else { Outcome::CriterionFailed })
}

fn solve(args: SolveArgs) -> Result<Outcome, CliError> {
    let z = parse_upper_half(&args.z)?;
    let settings = SolverSettings {
        tol: args.tol,
        max_iter: args.max_iter,
        ..SolverSettings::default()
    };
    let mut out = open_output(&args.out)?;
    match args.law {
        LawKind::Semicircle => {
            let s = semicircle_stieltjes(z);
            let residual = (s * s + z.z() * s + 1.0).norm();
            writeln!(out, "s_re,s_im,residual,iters")?;
            writeln!(out, "{},{},{},0", s.re, s.im, residual)?;
        }
        LawKind::Silverstein => {
            let h = parse_spectrum(args.h.as_deref().ok_or_else(|| {
                CliError::Usage("--law silverstein requires --h <spectrum>".into())
            })?)?;
            let y = args
                .y
                .ok_or_else(|| CliError::Usage("--law silverstein requires --y <f64>".into()))?;
            let sol = solve_silverstein(&h, y, z, &settings)?;
            writeln!(out, "m_re,m_im,residual,iters")?;
            writeln!(
                out,
                "{},{},{},{}",
                sol.value.re, sol.value.im, sol.residual, sol.iterations
            )?;
        }
        LawKind::Deformed => {
            let h = parse_spectrum(args.h.as_deref().ok_or_else(|| {
                CliError::Usage("--law deformed requires --h <spectrum>".into())
            })?)?;
            let sol = solve_deformed_wigner(&h, z, &settings)?;
            writeln!(out, "s_re,s_im,g_re,g_im,residual,iters")?;
            writeln!(
                out,
                "{},{},{},{},{},{}",
                sol.s.re, sol.s.im, sol.g.re, sol.g.im, sol.residual, sol.iterations
            )?;
        }
    }
    Ok(Outcome::Pass)
}

fn lsd(args: LsdArgs) -> Result<Outcome, CliError> {
    let sizes = parse_usize_list(&args.sizes, "--sizes")?;
    let entry_law = parse_entry_law(&args.entry_law)?;
    let mode = match args.mode {
        PopulationModeArg::Apportioned => PopulationMode::Apportioned,
        PopulationModeArg::Iid => PopulationMode::IidDraw,
    };
    let ensemble = match args.ensemble {
        EnsembleKind::Wigner => LsdEnsemble::Wigner {
            entry_law,
            diag_variance: args.diag_variance,
        },
        EnsembleKind::SampleCovariance => LsdEnsemble::SampleCovariance {
            population: parse_spectrum(args.h.as_deref().ok_or_else(|| {
                CliError::Usage("--ensemble sample-covariance requires --h".into())
            })?)?,
            aspect_ratio: args
                .y
                .ok_or_else(|| CliError::Usage("--ensemble sample-covariance requires --y".into()))?,
            entry_law,
            population_mode: mode,
        },
        EnsembleKind::Deformed => LsdEnsemble::DeformedWigner {
            population: parse_spectrum(args.h.as_deref().ok_or_else(|| {
                CliError::Usage("--ensemble deformed requires --h".into())
            })?)?,
            entry_law,
            diag_variance: args.diag_variance,
            population_mode: mode,
        },
    };
    let seed = resolve_seed(args.seed)?;
    let opts = LsdOptions {
        final_ks_threshold: args.ks_threshold,
        smoothing_v: args.smoothing_v,
        threads: args.threads,
    };
    let report = run_lsd_experiment(&ensemble, &sizes, args.reps, seed, &opts)?;
    emit_report(&report, &args.out)
}

fn parse_spikes(text: &str) -> Result<Vec<(f64, usize)>, CliError> {
    text.split(',')
        .map(|part| {
            let (l, m) = part.split_once(':').ok_or_else(|| {
                CliError::Usage(format!("bad --spikes entry {part:?}, expected lambda:mult"))
            })?;
            let lambda: f64 = l
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad spike eigenvalue {l:?}")))?;
            let mult: usize = m
                .trim()
                .parse()
                .map_err(|_| CliError::Usage(format!("bad spike multiplicity {m:?}")))?;
            Ok((lambda, mult))
        })
        .collect()
}

fn spiked(args: SpikedArgs) -> Result<Outcome, CliError> {
    let spikes = parse_spikes(&args.spikes)?;
    let seed = resolve_seed(args.seed)?;
    let config = SpikedConfig::new(spikes, Rotation::Identity, args.n, seed)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let opts = SpikedOptions {
        variance_band: args.variance_band,
        cross_corr_max: args.corr_max,
        order_stat_ks_max: args.ks_max,
        block_law_draws: args.block_draws,
        threads: args.threads,
    };
    let report = run_spiked_experiment(&config, args.reps, seed, &opts)?;
    emit_report(&report, &args.out)
}

fn clt(args: CltArgs) -> Result<Outcome, CliError> {
    let z_points = args
        .z
        .iter()
        .map(|text| parse_upper_half(text))
        .collect::<Result<Vec<_>, _>>()?;
    let entry_law = parse_entry_law(&args.entry_law)?;
    let seed = resolve_seed(args.seed)?;
    let opts = CltOptions {
        diag_variance: args.diag_variance,
        v0: args.v0,
        se_multiple: args.se_multiple,
        threads: args.threads,
    };
    let report = run_clt_experiment(args.n, args.reps, &z_points, entry_law, seed, &opts)?;
    emit_report(&report, &args.out)
}

fn emit_report(
    report: &super::ExperimentReport,
    out: &Option<PathBuf>,
) -> Result<Outcome, CliError> {
    let mut w = open_output(out)?;
    report.write_csv(&mut w)?;
    w.flush()?;
    eprintln!("wall_time_ms={}", report.wall_time.as_millis());
    Ok(if report.all_pass() {
        Outcome::Pass
    } else {
        Outcome::CriterionFailed
    })
}
