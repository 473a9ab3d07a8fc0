//! Config-driven Monte Carlo experiments tying generators, spectra and laws
//! together, with deterministic reporting and the CLI entry point.
//!
//! Replicates may execute concurrently; per-replicate seeds are derived with
//! [`mix_seed`] and results are reduced in replicate order, so serial and
//! parallel runs of the same configuration produce identical reports.

use std::time::Instant;

use num_complex::Complex64;
use rayon::prelude::*;
use thiserror::Error;

pub mod cli;
pub mod defaults;
mod report;

pub use cli::cli_main;
pub use report::{
    correlation, mean, median, sample_variance, standard_error, variance_standard_error,
    ExperimentReport, ReplicateRow, SummaryEntry,
};

use crate::ensembles::{
    mix_seed, sample_deformed_wigner, sample_sample_covariance, sample_spiked, sample_wigner,
    CovarianceConfig, DeformedWignerConfig, EnsembleError, EntryLaw, EntrySampler,
    PopulationMode, SpikedConfig, Stream, WignerConfig,
};
use crate::laws::{
    self, clt_cov_b, clt_mean_a, format_complex, semicircle_stieltjes_derivative,
    solve_deformed_wigner, solve_silverstein, CltConstants, LawError, SolverSettings,
    UpperHalfPoint,
};
use crate::spectra::{
    eigenvalues_symmetric, ks_distance, stieltjes_derivative_of_spectrum, AtomicDistribution,
    FnCdf, GridCdf, HermitianMatrix, SpectraError,
};

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("sizes must be nonempty and strictly increasing")]
    BadSizes,
    #[error("experiment needs at least {min} replicates, got {got}")]
    InsufficientReps { min: usize, got: usize },
    #[error("no evaluation points given")]
    NoPoints,
    #[error(transparent)]
    Law(#[from] LawError),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
    #[error(transparent)]
    Metric(#[from] crate::union_metric::MetricError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Runs `reps` independent jobs and collects results in replicate order.
/// `threads == 1` stays on the caller thread; `threads == 0` uses the global
/// rayon pool; anything else gets a dedicated pool of that size. All choices
/// produce identical output.
pub fn run_replicates<T, F>(reps: usize, threads: usize, job: F) -> Vec<T>
where
    T: Send,
    F: Fn(usize) -> T + Sync + Send,
{
    match threads {
        1 => (0..reps).map(job).collect(),
        0 => (0..reps).into_par_iter().map(job).collect(),
        k => {
            let pool = rayon::ThreadPoolBuilder::new()
                .num_threads(k)
                .build()
                .expect("thread pool");
            pool.install(|| (0..reps).into_par_iter().map(job).collect())
        }
    }
}

/// The matrix model an LSD run draws from. Sizes are supplied separately so
/// one config can sweep a whole size ladder.
#[derive(Debug, Clone)]
pub enum LsdEnsemble {
    Wigner {
        entry_law: EntryLaw,
        diag_variance: f64,
    },
    SampleCovariance {
        population: AtomicDistribution,
        aspect_ratio: f64,
        entry_law: EntryLaw,
        population_mode: PopulationMode,
    },
    DeformedWigner {
        population: AtomicDistribution,
        entry_law: EntryLaw,
        diag_variance: f64,
        population_mode: PopulationMode,
    },
}

impl LsdEnsemble {
    fn name(&self) -> &'static str {
        match self {
            LsdEnsemble::Wigner { .. } => "wigner",
            LsdEnsemble::SampleCovariance { .. } => "sample-covariance",
            LsdEnsemble::DeformedWigner { .. } => "deformed-wigner",
        }
    }

    /// Random-population modes only control convergence in probability; the
    /// summary then judges medians instead of means.
    fn uses_median(&self) -> bool {
        matches!(
            self,
            LsdEnsemble::SampleCovariance {
                population_mode: PopulationMode::IidDraw,
                ..
            } | LsdEnsemble::DeformedWigner {
                population_mode: PopulationMode::IidDraw,
                ..
            }
        )
    }
}

#[derive(Debug, Clone, Copy)]
pub struct LsdOptions {
    pub final_ks_threshold: f64,
    pub smoothing_v: f64,
    pub threads: usize,
}

impl Default for LsdOptions {
    fn default() -> Self {
        Self {
            final_ks_threshold: defaults::LSD_FINAL_KS_MAX,
            smoothing_v: defaults::SMOOTHING_V,
            threads: 0,
        }
    }
}

enum ReferenceCdf {
    Semicircle,
    Grid(GridCdf),
}

impl ReferenceCdf {
    fn ks_to(&self, spec: &crate::spectra::EmpiricalSpectrum) -> f64 {
        match self {
            ReferenceCdf::Semicircle => ks_distance(spec, &FnCdf(laws::semicircle_cdf)),
            ReferenceCdf::Grid(g) => ks_distance(spec, g),
        }
    }
}

/// Reference CDF of the limiting law for one ensemble at one size, built from
/// the closed form (Wigner) or by Stieltjes inversion of the solved
/// transform.
fn reference_cdf(
    ensemble: &LsdEnsemble,
    n: usize,
    smoothing_v: f64,
) -> Result<ReferenceCdf, HarnessError> {
    let settings = SolverSettings::default();
    match ensemble {
        LsdEnsemble::Wigner { .. } => Ok(ReferenceCdf::Semicircle),
        LsdEnsemble::SampleCovariance {
            population,
            aspect_ratio,
            ..
        } => {
            let p = ((aspect_ratio * n as f64).round() as usize).max(1);
            let y = p as f64 / n as f64;
            let tau_max = population.max_location().max(0.0);
            let hi = tau_max * (1.0 + y.sqrt()).powi(2) + 0.5;
            let lo = -0.5;
            let grid = linspace(lo, hi, defaults::REFERENCE_GRID_POINTS);
            let density = laws::invert_stieltjes(
                |z| solve_silverstein(population, y, z, &settings).map(|s| s.value),
                &grid,
                smoothing_v,
            )?;
            Ok(ReferenceCdf::Grid(GridCdf::from_density(grid, &density)))
        }
        LsdEnsemble::DeformedWigner { population, .. } => {
            let tau_max = population.max_location().max(0.0);
            let half_width = 2.0 * tau_max + 1.0;
            let grid = linspace(-half_width, half_width, defaults::REFERENCE_GRID_POINTS);
            let density = laws::invert_stieltjes(
                |z| solve_deformed_wigner(population, z, &settings).map(|s| s.s),
                &grid,
                smoothing_v,
            )?;
            Ok(ReferenceCdf::Grid(GridCdf::from_density(grid, &density)))
        }
    }
}

fn linspace(lo: f64, hi: f64, count: usize) -> Vec<f64> {
    let step = (hi - lo) / (count - 1) as f64;
    (0..count).map(|k| lo + step * k as f64).collect()
}

fn draw_lsd_matrix(
    ensemble: &LsdEnsemble,
    n: usize,
    seed: u64,
) -> Result<HermitianMatrix, HarnessError> {
    match ensemble {
        LsdEnsemble::Wigner {
            entry_law,
            diag_variance,
        } => Ok(sample_wigner(&WignerConfig::new(
            n,
            *entry_law,
            *diag_variance,
            seed,
        )?)),
        LsdEnsemble::SampleCovariance {
            population,
            aspect_ratio,
            entry_law,
            population_mode,
        } => {
            let p = ((aspect_ratio * n as f64).round() as usize).max(1);
            Ok(sample_sample_covariance(&CovarianceConfig::new(
                p,
                n,
                population.clone(),
                *entry_law,
                *population_mode,
                seed,
            )?))
        }
        LsdEnsemble::DeformedWigner {
            population,
            entry_law,
            diag_variance,
            population_mode,
        } => Ok(sample_deformed_wigner(&DeformedWignerConfig::new(
            n,
            population.clone(),
            *entry_law,
            *diag_variance,
            *population_mode,
            seed,
        )?)),
    }
}

/// Draws `reps` matrices per size, computes each draw's KS distance to the
/// limiting CDF, and judges whether the distances shrink along the size
/// ladder and end below the threshold.
pub fn run_lsd_experiment(
    ensemble: &LsdEnsemble,
    sizes: &[usize],
    reps: usize,
    seed: u64,
    opts: &LsdOptions,
) -> Result<ExperimentReport, HarnessError> {
    if sizes.is_empty() || sizes.windows(2).any(|w| w[0] >= w[1]) || sizes[0] == 0 {
        return Err(HarnessError::BadSizes);
    }
    if reps == 0 {
        return Err(HarnessError::InsufficientReps { min: 1, got: 0 });
    }
    let started = Instant::now();
    let mut rows = Vec::with_capacity(sizes.len() * reps);
    for (level, &n) in sizes.iter().enumerate() {
        let reference = reference_cdf(ensemble, n, opts.smoothing_v)?;
        let level_seed = mix_seed(seed, level as u64, Stream::SizeLevel as u64);
        let results: Vec<Result<f64, HarnessError>> =
            run_replicates(reps, opts.threads, |r| {
                let rep_seed = mix_seed(level_seed, r as u64, Stream::Replicate as u64);
                let matrix = draw_lsd_matrix(ensemble, n, rep_seed)?;
                let spec = eigenvalues_symmetric(&matrix)?;
                Ok(reference.ks_to(&spec))
            });
        for (r, ks) in results.into_iter().enumerate() {
            rows.push(ReplicateRow {
                replicate: r as u64,
                statistic: format!("ks_n{n}"),
                value: ks?,
            });
        }
    }

    let summary = summarize_lsd(&rows, sizes, ensemble.uses_median(), opts.final_ks_threshold);
    Ok(ExperimentReport {
        experiment_name: format!("lsd-{}", ensemble.name()),
        master_seed: seed,
        rows,
        summary,
        wall_time: started.elapsed(),
    })
}

fn collect_stat(rows: &[ReplicateRow], name: &str) -> Vec<f64> {
    rows.iter()
        .filter(|r| r.statistic == name)
        .map(|r| r.value)
        .collect()
}

fn summarize_lsd(
    rows: &[ReplicateRow],
    sizes: &[usize],
    use_median: bool,
    final_threshold: f64,
) -> Vec<SummaryEntry> {
    let mut summary = Vec::new();
    let mut centers = Vec::with_capacity(sizes.len());
    let mut ses = Vec::with_capacity(sizes.len());
    for &n in sizes {
        let ks = collect_stat(rows, &format!("ks_n{n}"));
        let se = if ks.len() > 1 { standard_error(&ks) } else { 0.0 };
        summary.push(SummaryEntry {
            statistic: format!("ks_mean_n{n}"),
            estimate: mean(&ks),
            std_error: Some(se),
            theory: None,
            pass: None,
        });
        summary.push(SummaryEntry::plain(format!("ks_median_n{n}"), median(&ks)));
        centers.push(if use_median { median(&ks) } else { mean(&ks) });
        ses.push(se);
    }

    if sizes.len() > 1 {
        let mut worst_increase = f64::NEG_INFINITY;
        let mut worst_scaled = f64::NEG_INFINITY;
        for k in 1..centers.len() {
            let diff = centers[k] - centers[k - 1];
            worst_increase = worst_increase.max(diff);
            let se_diff = ses[k].hypot(ses[k - 1]).max(f64::MIN_POSITIVE);
            worst_scaled = worst_scaled.max(diff / se_diff);
        }
        summary.push(SummaryEntry {
            statistic: "ks_monotone_decrease".into(),
            estimate: worst_increase,
            std_error: None,
            theory: Some(0.0),
            pass: Some(worst_increase < 0.0),
        });
        summary.push(SummaryEntry {
            statistic: "ks_decrease_within_1se".into(),
            estimate: worst_scaled,
            std_error: None,
            theory: Some(1.0),
            pass: Some(worst_scaled <= 1.0),
        });
    }

    summary.push(SummaryEntry {
        statistic: "ks_final".into(),
        estimate: *centers.last().expect("nonempty sizes"),
        std_error: None,
        theory: Some(final_threshold),
        pass: Some(*centers.last().unwrap() < final_threshold),
    });
    summary
}

#[derive(Debug, Clone, Copy)]
pub struct SpikedOptions {
    pub variance_band: f64,
    pub cross_corr_max: f64,
    pub order_stat_ks_max: f64,
    pub block_law_draws: usize,
    pub threads: usize,
}

impl Default for SpikedOptions {
    fn default() -> Self {
        Self {
            variance_band: defaults::SPIKED_VARIANCE_BAND,
            cross_corr_max: defaults::SPIKED_CROSS_CORR_MAX,
            order_stat_ks_max: defaults::SPIKED_ORDER_STAT_KS_MAX,
            block_law_draws: defaults::SPIKED_BLOCK_LAW_DRAWS,
            threads: 0,
        }
    }
}

/// Samples of each ordered eigenvalue of one limiting Gaussian block,
/// estimated by a seeded nested Monte Carlo.
fn block_law_samples(
    block: &laws::SpikedBlock,
    draws: usize,
    seed: u64,
) -> Result<Vec<Vec<f64>>, HarnessError> {
    let d = block.multiplicity;
    let mut per_position: Vec<Vec<f64>> = vec![Vec::with_capacity(draws); d];
    if block.diag_variance == 0.0 {
        for pos in &mut per_position {
            pos.resize(draws, 0.0);
        }
        return Ok(per_position);
    }
    let diag_sd = block.diag_variance.sqrt();
    let off_sd = block.offdiag_variance.sqrt();
    let mut sampler = EntrySampler::new(seed);
    let mut a = ndarray::Array2::zeros((d, d));
    for _ in 0..draws {
        for i in 0..d {
            a[(i, i)] = diag_sd * sampler.standard_normal();
            for j in (i + 1)..d {
                let w = off_sd * sampler.standard_normal();
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
        let spec = eigenvalues_symmetric(&HermitianMatrix::Real(a.clone()))?;
        // descending, to match the ordered sample eigenvalues
        for (pos, &v) in spec.eigenvalues().iter().rev().enumerate() {
            per_position[pos].push(v);
        }
    }
    Ok(per_position)
}

/// Spiked-covariance fluctuation experiment: per replicate the rescaled
/// eigenvalue fluctuations `sqrt(n) (l_t - lambda_j)`, judged against the
/// block-law variances and order-statistic distributions, plus cross-group
/// independence.
pub fn run_spiked_experiment(
    config: &SpikedConfig,
    reps: usize,
    seed: u64,
    opts: &SpikedOptions,
) -> Result<ExperimentReport, HarnessError> {
    if reps < defaults::SPIKED_MIN_REPS {
        return Err(HarnessError::InsufficientReps {
            min: defaults::SPIKED_MIN_REPS,
            got: reps,
        });
    }
    let started = Instant::now();
    let d = config.dim();
    let lambda_per_coord = config.eigenvalue_per_coordinate();
    let sqrt_n = (config.n as f64).sqrt();

    let results: Vec<Result<Vec<f64>, HarnessError>> = run_replicates(reps, opts.threads, |r| {
        let mut rep_config = config.clone();
        rep_config.seed = mix_seed(seed, r as u64, Stream::Replicate as u64);
        let (s, _) = sample_spiked(&rep_config)?;
        let spec = eigenvalues_symmetric(&HermitianMatrix::Real(s))?;
        // descending eigenvalues l_1 >= ... >= l_d
        let fluct: Vec<f64> = spec
            .eigenvalues()
            .iter()
            .rev()
            .zip(&lambda_per_coord)
            .map(|(l, lam)| sqrt_n * (l - lam))
            .collect();
        Ok(fluct)
    });

    let mut rows = Vec::with_capacity(reps * d);
    for (r, fluct) in results.into_iter().enumerate() {
        for (t, value) in fluct?.into_iter().enumerate() {
            rows.push(ReplicateRow {
                replicate: r as u64,
                statistic: format!("fluct_t{}", t + 1),
                value,
            });
        }
    }

    // Nested MC for the limiting block laws, one stream per group.
    let blocks = laws::spiked_limit_description(config);
    let mut theory_samples: Vec<Vec<f64>> = Vec::with_capacity(d);
    for (j, block) in blocks.iter().enumerate() {
        let block_seed = mix_seed(seed, j as u64, Stream::BlockLaw as u64);
        theory_samples.extend(block_law_samples(block, opts.block_law_draws, block_seed)?);
    }
    let group_of_coord: Vec<usize> = blocks
        .iter()
        .enumerate()
        .flat_map(|(j, b)| std::iter::repeat_n(j, b.multiplicity))
        .collect();

    let summary = summarize_spiked(&rows, d, &group_of_coord, &theory_samples, opts);
    Ok(ExperimentReport {
        experiment_name: "spiked".into(),
        master_seed: seed,
        rows,
        summary,
        wall_time: started.elapsed(),
    })
}

fn summarize_spiked(
    rows: &[ReplicateRow],
    d: usize,
    group_of_coord: &[usize],
    theory_samples: &[Vec<f64>],
    opts: &SpikedOptions,
) -> Vec<SummaryEntry> {
    let mut summary = Vec::new();
    let per_position: Vec<Vec<f64>> = (0..d)
        .map(|t| collect_stat(rows, &format!("fluct_t{}", t + 1)))
        .collect();

    for t in 0..d {
        let observed = &per_position[t];
        let theory = &theory_samples[t];
        let theory_var = if theory.iter().all(|&v| v == 0.0) {
            0.0
        } else {
            sample_variance(theory)
        };
        let est_var = sample_variance(observed);
        let pass = if theory_var > 0.0 {
            (est_var - theory_var).abs() <= opts.variance_band * theory_var
        } else {
            est_var.abs() <= 1e-9
        };
        summary.push(SummaryEntry {
            statistic: format!("var_t{}", t + 1),
            estimate: est_var,
            std_error: Some(variance_standard_error(observed)),
            theory: Some(theory_var),
            pass: Some(pass),
        });
        if theory_var > 0.0 {
            let obs_spec = crate::spectra::EmpiricalSpectrum::new(observed.clone())
                .expect("finite statistics");
            let theory_spec = crate::spectra::EmpiricalSpectrum::new(theory.clone())
                .expect("finite block samples");
            let ks = ks_distance(&obs_spec, &theory_spec);
            summary.push(SummaryEntry {
                statistic: format!("ks_t{}", t + 1),
                estimate: ks,
                std_error: None,
                theory: Some(opts.order_stat_ks_max),
                pass: Some(ks <= opts.order_stat_ks_max),
            });
        }
    }

    // Cross-group independence: worst correlation over coordinate pairs in
    // distinct groups.
    let mut worst = 0.0_f64;
    let mut found = false;
    for a in 0..d {
        for b in (a + 1)..d {
            if group_of_coord[a] != group_of_coord[b] {
                found = true;
                worst = worst.max(correlation(&per_position[a], &per_position[b]).abs());
            }
        }
    }
    if found {
        summary.push(SummaryEntry {
            statistic: "max_cross_group_corr".into(),
            estimate: worst,
            std_error: None,
            theory: Some(0.0),
            pass: Some(worst <= opts.cross_corr_max),
        });
    }
    summary
}

#[derive(Debug, Clone, Copy)]
pub struct CltOptions {
    pub diag_variance: f64,
    pub v0: f64,
    pub se_multiple: f64,
    pub threads: usize,
}

impl Default for CltOptions {
    fn default() -> Self {
        Self {
            diag_variance: defaults::WIGNER_DIAG_VARIANCE,
            v0: laws::DEFAULT_CSC_V0,
            se_multiple: defaults::CLT_SE_MULTIPLE,
            threads: 0,
        }
    }
}

/// CLT experiment for derivative linear spectral statistics: per replicate
/// `xi_n(z) = n [s'_ESD(z) - s'_sc(z)]` at each z, with the empirical mean
/// judged against `a'(z)` and the empirical covariance against
/// `d^2 b / dz1 dz2`, both within `se_multiple` standard errors.
pub fn run_clt_experiment(
    n: usize,
    reps: usize,
    z_points: &[UpperHalfPoint],
    entry_law: EntryLaw,
    seed: u64,
    opts: &CltOptions,
) -> Result<ExperimentReport, HarnessError> {
    if reps < defaults::CLT_MIN_REPS {
        return Err(HarnessError::InsufficientReps {
            min: defaults::CLT_MIN_REPS,
            got: reps,
        });
    }
    if z_points.is_empty() {
        return Err(HarnessError::NoPoints);
    }
    let constants = CltConstants::for_entry_law(entry_law, opts.diag_variance);
    let mut theory_mean = Vec::with_capacity(z_points.len());
    for &z in z_points {
        let (_, a_prime) = clt_mean_a(z, &constants, opts.v0)?;
        theory_mean.push(a_prime);
    }
    let mut theory_cov = Vec::new();
    for i in 0..z_points.len() {
        for j in i..z_points.len() {
            let (_, d2b) = clt_cov_b(z_points[i], z_points[j], &constants, opts.v0)?;
            theory_cov.push(((i, j), d2b));
        }
    }
    let sc_derivatives: Vec<Complex64> = z_points
        .iter()
        .map(|&z| semicircle_stieltjes_derivative(z))
        .collect();

    let started = Instant::now();
    let results: Vec<Result<Vec<Complex64>, HarnessError>> =
        run_replicates(reps, opts.threads, |r| {
            let config = WignerConfig::new(
                n,
                entry_law,
                opts.diag_variance,
                mix_seed(seed, r as u64, Stream::Replicate as u64),
            )?;
            let spec = eigenvalues_symmetric(&sample_wigner(&config))?;
            z_points
                .iter()
                .zip(&sc_derivatives)
                .map(|(&z, &sc)| {
                    let emp = stieltjes_derivative_of_spectrum(&spec, z.z())?;
                    Ok(n as f64 * (emp - sc))
                })
                .collect()
        });

    let labels: Vec<String> = z_points.iter().map(|z| format_complex(z.z())).collect();
    let mut rows = Vec::with_capacity(reps * z_points.len() * 2);
    for (r, xi) in results.into_iter().enumerate() {
        for (k, value) in xi?.into_iter().enumerate() {
            rows.push(ReplicateRow {
                replicate: r as u64,
                statistic: format!("xi_re[{}]", labels[k]),
                value: value.re,
            });
            rows.push(ReplicateRow {
                replicate: r as u64,
                statistic: format!("xi_im[{}]", labels[k]),
                value: value.im,
            });
        }
    }

    let summary = summarize_clt(&rows, &labels, &theory_mean, &theory_cov, opts.se_multiple);
    Ok(ExperimentReport {
        experiment_name: "clt".into(),
        master_seed: seed,
        rows,
        summary,
        wall_time: started.elapsed(),
    })
}

fn within(estimate: f64, theory: f64, se: f64, multiple: f64) -> bool {
    (estimate - theory).abs() <= multiple * se
}

fn summarize_clt(
    rows: &[ReplicateRow],
    labels: &[String],
    theory_mean: &[Complex64],
    theory_cov: &[((usize, usize), Complex64)],
    se_multiple: f64,
) -> Vec<SummaryEntry> {
    let k = labels.len();
    let re_parts: Vec<Vec<f64>> = (0..k)
        .map(|i| collect_stat(rows, &format!("xi_re[{}]", labels[i])))
        .collect();
    let im_parts: Vec<Vec<f64>> = (0..k)
        .map(|i| collect_stat(rows, &format!("xi_im[{}]", labels[i])))
        .collect();
    let reps = re_parts[0].len();

    let mut summary = Vec::new();
    for i in 0..k {
        for (suffix, values, theory) in [
            ("re", &re_parts[i], theory_mean[i].re),
            ("im", &im_parts[i], theory_mean[i].im),
        ] {
            let est = mean(values);
            let se = standard_error(values);
            summary.push(SummaryEntry {
                statistic: format!("mean_{suffix}[{}]", labels[i]),
                estimate: est,
                std_error: Some(se),
                theory: Some(theory),
                pass: Some(within(est, theory, se, se_multiple)),
            });
        }
    }

    // Complex covariance without conjugation: the limit process is analytic,
    // so cov(xi(z1), xi(z2)) = E[(xi1 - m1)(xi2 - m2)].
    for &((i, j), theory) in theory_cov {
        let (m_re_i, m_im_i) = (mean(&re_parts[i]), mean(&im_parts[i]));
        let (m_re_j, m_im_j) = (mean(&re_parts[j]), mean(&im_parts[j]));
        let mut prod_re = Vec::with_capacity(reps);
        let mut prod_im = Vec::with_capacity(reps);
        for r in 0..reps {
            let a = Complex64::new(re_parts[i][r] - m_re_i, im_parts[i][r] - m_im_i);
            let b = Complex64::new(re_parts[j][r] - m_re_j, im_parts[j][r] - m_im_j);
            let u = a * b;
            prod_re.push(u.re);
            prod_im.push(u.im);
        }
        let bessel = reps as f64 / (reps - 1) as f64;
        let label = format!("[{};{}]", labels[i], labels[j]);
        for (suffix, values, th) in [
            ("re", &prod_re, theory.re),
            ("im", &prod_im, theory.im),
        ] {
            let est = mean(values) * bessel;
            let se = standard_error(values);
            summary.push(SummaryEntry {
                statistic: format!("cov_{suffix}{label}"),
                estimate: est,
                std_error: Some(se),
                theory: Some(th),
                pass: Some(within(est, th, se, se_multiple)),
            });
        }
    }

    // The stacked real/imaginary sample covariance must be PSD up to
    // roundoff.
    let dim = 2 * k;
    let mut cov = ndarray::Array2::zeros((dim, dim));
    let comp = |idx: usize| -> &Vec<f64> {
        if idx.is_multiple_of(2) {
            &re_parts[idx / 2]
        } else {
            &im_parts[idx / 2]
        }
    };
    for a in 0..dim {
        for b in 0..=a {
            let (xs, ys) = (comp(a), comp(b));
            let (mx, my) = (mean(xs), mean(ys));
            let c = xs
                .iter()
                .zip(ys)
                .map(|(x, y)| (x - mx) * (y - my))
                .sum::<f64>()
                / (reps - 1) as f64;
            cov[(a, b)] = c;
            cov[(b, a)] = c;
        }
    }
    let min_eig = eigenvalues_symmetric(&HermitianMatrix::Real(cov))
        .map(|s| s.min().unwrap_or(0.0))
        .unwrap_or(f64::NEG_INFINITY);
    summary.push(SummaryEntry {
        statistic: "recov_min_eigenvalue".into(),
        estimate: min_eig,
        std_error: None,
        theory: Some(defaults::CLT_PSD_FLOOR),
        pass: Some(min_eig >= defaults::CLT_PSD_FLOOR),
    });
    summary
}
