//! Versioned defaults for every finite-sample threshold the experiments use.
//!
//! The limit theorems being exercised are asymptotic; each number here is a
//! desk-scale judgment, fixed in one place and overridable by CLI flags.

/// Bumped whenever any default below changes.
pub const DEFAULTS_VERSION: &str = "1";

/// Metric-axiom suite: triangle-inequality slack for accumulated float error
/// (three square-root evaluations per distance).
pub const METRIC_TRIANGLE_TOL: f64 = 1e-12;

/// LSD runs: mean KS at the largest size must fall below this.
pub const LSD_FINAL_KS_MAX: f64 = 0.05;

/// Smoothing height for Stieltjes-inversion reference densities and
/// smoothed-ESD comparisons.
pub const SMOOTHING_V: f64 = 1e-3;

/// Grid points used when tabulating a solver-derived reference CDF.
pub const REFERENCE_GRID_POINTS: usize = 1500;

/// Spiked runs: relative band around the block-law variance.
pub const SPIKED_VARIANCE_BAND: f64 = 0.15;

/// Spiked runs: absolute bound on cross-group fluctuation correlations.
pub const SPIKED_CROSS_CORR_MAX: f64 = 0.10;

/// Spiked runs: KS bound per order statistic against the block law.
pub const SPIKED_ORDER_STAT_KS_MAX: f64 = 0.08;

/// Spiked runs: draws for the nested block-law Monte Carlo.
pub const SPIKED_BLOCK_LAW_DRAWS: usize = 100_000;

/// Spiked runs: minimum replicate count for variance estimates.
pub const SPIKED_MIN_REPS: usize = 100;

/// CLT runs: theory must lie within this many standard errors.
pub const CLT_SE_MULTIPLE: f64 = 3.0;

/// CLT runs: minimum replicate count.
pub const CLT_MIN_REPS: usize = 200;

/// CLT runs: sample covariance matrices are PSD up to this eigenvalue floor.
pub const CLT_PSD_FLOOR: f64 = -1e-10;

/// Default diagonal variance of Wigner draws.
pub const WIGNER_DIAG_VARIANCE: f64 = 1.0;
