//! Closed forms and solvers for the limiting spectral laws: the semicircle
//! transform, the self-consistent equation for sample-covariance LSDs, the
//! coupled system of the deformed-Wigner LSD, Stieltjes inversion to
//! (smoothed) densities, numerical transform derivatives, and the CLT
//! mean/covariance functions for derivative linear spectral statistics.

use num_complex::Complex64;
use thiserror::Error;

use crate::ensembles::{EntryLaw, SpikedConfig};
use crate::spectra::AtomicDistribution;

/// Default lower bound on `Im z` for the CLT formula region.
pub const DEFAULT_CSC_V0: f64 = 0.5;

/// Relative step for first derivatives of analytic transforms.
pub const DERIVATIVE_STEP: f64 = 1e-5;

/// Relative step for the mixed second derivative of the covariance function.
pub const COV_DERIVATIVE_STEP: f64 = 1e-4;

/// `|1 - s(z1) s(z2)|` below this is treated as a singularity of `b`.
pub const COV_SINGULARITY_TOL: f64 = 1e-8;

#[derive(Debug, Error)]
pub enum LawError {
    #[error("z = {re}+{im}i is not in the open upper half plane")]
    NotUpperHalfPlane { re: f64, im: f64 },
    #[error("solver did not converge after {iterations} iterations (residual {residual:e})")]
    NonConvergence { iterations: usize, residual: f64 },
    #[error("converged value left its domain: {reason}")]
    DomainViolation { reason: String },
    #[error("z = {z} outside the formula region (Im z >= {v0} required)")]
    RegionViolation { z: Complex64, v0: f64 },
    #[error("covariance function singular: |1 - s(z1) s(z2)| = {value:e}")]
    Singularity { value: f64 },
    #[error("population spectrum must have nonnegative atoms")]
    NegativeSpectrum,
    #[error("aspect ratio y must be positive, got {0}")]
    BadAspectRatio(f64),
    #[error("invalid solver settings: {0}")]
    BadSettings(String),
}

/// A point of the open upper half plane; the domain of every Stieltjes
/// transform here.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct UpperHalfPoint(Complex64);

impl UpperHalfPoint {
    pub fn new(z: Complex64) -> Result<Self, LawError> {
        if z.im > 0.0 && z.is_finite() {
            Ok(Self(z))
        } else {
            Err(LawError::NotUpperHalfPlane { re: z.re, im: z.im })
        }
    }

    pub fn from_parts(re: f64, im: f64) -> Result<Self, LawError> {
        Self::new(Complex64::new(re, im))
    }

    pub fn z(self) -> Complex64 {
        self.0
    }
}

/// Fixed-point solver knobs.
#[derive(Debug, Clone, Copy)]
pub struct SolverSettings {
    pub tol: f64,
    pub max_iter: usize,
    /// Step-damping factor in (0, 1], applied when the update size grows
    /// twice in a row.
    pub damping: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self {
            tol: 1e-12,
            max_iter: 100_000,
            damping: 0.5,
        }
    }
}

impl SolverSettings {
    fn validate(&self) -> Result<(), LawError> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(LawError::BadSettings(format!("tol = {} must be > 0", self.tol)));
        }
        if self.max_iter == 0 {
            return Err(LawError::BadSettings("max_iter must be >= 1".into()));
        }
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(LawError::BadSettings(format!(
                "damping = {} must lie in (0, 1]",
                self.damping
            )));
        }
        Ok(())
    }
}

/// A converged fixed point with its certificate.
#[derive(Debug, Clone, Copy)]
pub struct Solution {
    pub value: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// A converged `(s, g)` pair for the deformed-Wigner system.
#[derive(Debug, Clone, Copy)]
pub struct DeformedSolution {
    pub s: Complex64,
    pub g: Complex64,
    pub residual: f64,
    pub iterations: usize,
}

/// Constants entering the CLT mean and covariance functions: diagonal
/// variance `sigma^2`, the real/complex switch `kappa`, and the fourth-moment
/// constant `beta = E(|w_12|^2 - 1)^2 - kappa`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CltConstants {
    pub sigma2: f64,
    pub kappa: f64,
    pub beta: f64,
}

impl CltConstants {
    pub fn new(sigma2: f64, kappa: f64, beta: f64) -> Result<Self, LawError> {
        if kappa != 1.0 && kappa != 2.0 {
            return Err(LawError::BadSettings(format!(
                "kappa must be 1 (complex) or 2 (real), got {kappa}"
            )));
        }
        if sigma2.is_nan() || sigma2 <= 0.0 {
            return Err(LawError::BadSettings(format!(
                "sigma2 must be positive, got {sigma2}"
            )));
        }
        Ok(Self { sigma2, kappa, beta })
    }

    /// Constants implied by an entry law and the diagonal variance.
    pub fn for_entry_law(law: EntryLaw, diag_variance: f64) -> Self {
        Self {
            sigma2: diag_variance,
            kappa: law.kappa(),
            beta: law.beta(),
        }
    }
}

/// Stieltjes transform of the semicircle law: the root of `s^2 + z s + 1 = 0`
/// with positive imaginary part.
pub fn semicircle_stieltjes(z: UpperHalfPoint) -> Complex64 {
    let z = z.z();
    let w = (z * z - 4.0).sqrt();
    let r1 = (-z + w) / 2.0;
    let r2 = (-z - w) / 2.0;
    if r1.im > 0.0 {
        r1
    } else {
        r2
    }
}

/// `s'(z)` by implicit differentiation of the defining quadratic:
/// `s' = -s / (2s + z)`.
pub fn semicircle_stieltjes_derivative(z: UpperHalfPoint) -> Complex64 {
    let s = semicircle_stieltjes(z);
    -s / (2.0 * s + z.z())
}

/// CDF of the semicircle law on `[-2, 2]`.
pub fn semicircle_cdf(x: f64) -> f64 {
    if x <= -2.0 {
        0.0
    } else if x >= 2.0 {
        1.0
    } else {
        0.5 + x * (4.0 - x * x).sqrt() / (4.0 * std::f64::consts::PI)
            + (x / 2.0).asin() / std::f64::consts::PI
    }
}

/// Damped fixed-point driver with Aitken acceleration.
///
/// Iterates `x <- step(x)`, judging convergence by `certificate(x)` (the
/// residual of the defining equation, which need not be the iteration map)
/// and returning only once it drops to `tol`. The plain path damps the step
/// by the damping factor whenever the certificate grows twice in a row; each
/// loop additionally forms the Aitken delta-squared candidate from two
/// successive images and keeps it when it lands in the domain and beats the
/// plain step's certificate. `step` must map `in_domain` into itself; the
/// guard exists for the acceleration jumps, since a spurious root of the
/// equation outside the domain also has residual zero.
fn fixed_point<S, C, D>(
    step: S,
    certificate: C,
    in_domain: D,
    start: Complex64,
    settings: &SolverSettings,
) -> Result<Solution, LawError>
where
    S: Fn(Complex64) -> Complex64,
    C: Fn(Complex64) -> f64,
    D: Fn(Complex64) -> bool,
{
    settings.validate()?;
    let mut x = start;
    let mut alpha = 1.0;
    let mut prev_residual = f64::INFINITY;
    let mut growth_streak = 0u32;
    let mut residual = f64::INFINITY;
    for iter in 0..settings.max_iter {
        residual = certificate(x);
        if residual <= settings.tol {
            return Ok(Solution {
                value: x,
                residual,
                iterations: iter,
            });
        }
        if residual > prev_residual {
            growth_streak += 1;
            if growth_streak >= 2 {
                alpha = (alpha * settings.damping).max(1.0 / 1024.0);
                growth_streak = 0;
            }
        } else {
            growth_streak = 0;
        }
        prev_residual = residual;

        let f0 = step(x);
        let f1 = step(f0);
        let d0 = f0 - x;
        let denom = (f1 - f0) - d0;
        let candidate = x - d0 * d0 / denom;
        x = f0 + alpha * (f1 - f0);
        if denom.norm() > f64::MIN_POSITIVE
            && candidate.is_finite()
            && in_domain(candidate)
            && certificate(candidate) < certificate(x)
        {
            x = candidate;
        }
    }
    Err(LawError::NonConvergence {
        iterations: settings.max_iter,
        residual,
    })
}

/// Solves the self-consistent sample-covariance equation
/// `m = integral dH(tau) / (tau (1 - y - y z m) - z)` for the unique root in
/// `D_y = { m : -(1-y)/z + y m  in C+ }`.
pub fn solve_silverstein(
    h: &AtomicDistribution,
    y: f64,
    z: UpperHalfPoint,
    settings: &SolverSettings,
) -> Result<Solution, LawError> {
    if !h.all_nonnegative() {
        return Err(LawError::NegativeSpectrum);
    }
    if !y.is_finite() || y <= 0.0 {
        return Err(LawError::BadAspectRatio(y));
    }
    let zz = z.z();
    let atoms = h.atoms();

    // Residual of the defining equation at m, the returned certificate.
    let equation_rhs = |m: Complex64| -> Complex64 {
        let coeff = 1.0 - y - y * zz * m;
        atoms
            .iter()
            .map(|a| a.weight * (a.location * coeff - zz).finv())
            .sum()
    };

    // The iteration runs on the companion transform mb = -(1-y)/z + y m,
    // whose update map is a holomorphic self-map of the upper half plane, so
    // plain iterates can never leave the solution domain; m itself is
    // recovered affinely.
    let recover = |mb: Complex64| (mb + (1.0 - y) / zz) / y;
    let step = |mb: Complex64| -> Complex64 {
        let integral: Complex64 = atoms
            .iter()
            .map(|a| a.weight * a.location * (1.0 + a.location * mb).finv())
            .sum();
        -(zz - y * integral).finv()
    };
    let certificate = |mb: Complex64| -> f64 {
        let m = recover(mb);
        (equation_rhs(m) - m).norm()
    };

    let solution = fixed_point(step, certificate, |mb| mb.im > 0.0, -zz.finv(), settings)?;
    let m = recover(solution.value);
    let witness = -(1.0 - y) / zz + y * m;
    if witness.im.is_nan() || witness.im <= 0.0 {
        return Err(LawError::DomainViolation {
            reason: format!("-(1-y)/z + y m = {witness} has Im <= 0"),
        });
    }
    if m.im.is_nan() || m.im <= 0.0 {
        return Err(LawError::DomainViolation {
            reason: format!("Im m = {} is not positive", m.im),
        });
    }
    Ok(Solution {
        value: m,
        residual: solution.residual,
        iterations: solution.iterations,
    })
}

/// Solves the deformed-Wigner system
/// `g = integral t / (-z - t g) dH(t)`, `s = -(1 + g^2)/z`, with
/// `Im g >= 0` and `Im s > 0`.
pub fn solve_deformed_wigner(
    h: &AtomicDistribution,
    z: UpperHalfPoint,
    settings: &SolverSettings,
) -> Result<DeformedSolution, LawError> {
    if !h.all_nonnegative() {
        return Err(LawError::NegativeSpectrum);
    }
    let zz = z.z();
    let atoms = h.atoms();
    let rhs = |g: Complex64| -> Complex64 {
        atoms
            .iter()
            .map(|a| a.weight * a.location * (-zz - a.location * g).finv())
            .sum()
    };
    let start = rhs(Complex64::new(0.0, 0.0));
    let solution = fixed_point(
        rhs,
        |g: Complex64| (rhs(g) - g).norm(),
        |g: Complex64| g.im >= 0.0,
        start,
        settings,
    )?;
    let g = solution.value;
    if g.im < -settings.tol {
        return Err(LawError::DomainViolation {
            reason: format!("Im g = {} below -tol", g.im),
        });
    }
    let s = -(1.0 + g * g) / zz;
    if s.im.is_nan() || s.im <= 0.0 {
        return Err(LawError::DomainViolation {
            reason: format!("Im s = {} is not positive", s.im),
        });
    }
    Ok(DeformedSolution {
        s,
        g,
        residual: solution.residual,
        iterations: solution.iterations,
    })
}

/// Smoothed density by Stieltjes inversion at height `v`:
/// `(1/pi) Im m(x + iv)` per grid point (the Poisson-kernel convolution of
/// the underlying density).
pub fn invert_stieltjes<F>(transform: F, x_grid: &[f64], v: f64) -> Result<Vec<f64>, LawError>
where
    F: Fn(UpperHalfPoint) -> Result<Complex64, LawError>,
{
    if v.is_nan() || v <= 0.0 {
        return Err(LawError::BadSettings(format!("smoothing v = {v} must be > 0")));
    }
    x_grid
        .iter()
        .map(|&x| {
            let m = transform(UpperHalfPoint::from_parts(x, v)?)?;
            Ok(m.im / std::f64::consts::PI)
        })
        .collect()
}

/// Richardson extrapolation of the smoothed density over heights `v` and
/// `2v`: `2 rho_v - rho_{2v}` cancels the O(v) smoothing term, leaving an
/// O(v^2) error away from the support edges.
pub fn invert_stieltjes_richardson<F>(
    transform: F,
    x_grid: &[f64],
    v: f64,
) -> Result<Vec<f64>, LawError>
where
    F: Fn(UpperHalfPoint) -> Result<Complex64, LawError>,
{
    let fine = invert_stieltjes(&transform, x_grid, v)?;
    let coarse = invert_stieltjes(&transform, x_grid, 2.0 * v)?;
    Ok(fine
        .iter()
        .zip(coarse)
        .map(|(f, c)| 2.0 * f - c)
        .collect())
}

/// Central-difference derivative of an analytic transform with a real step
/// `h = 1e-5 max(1, |z|)`; O(h^2) accurate away from the real axis.
pub fn transform_derivative<F>(transform: F, z: UpperHalfPoint) -> Result<Complex64, LawError>
where
    F: Fn(UpperHalfPoint) -> Result<Complex64, LawError>,
{
    let zz = z.z();
    let h = DERIVATIVE_STEP * zz.norm().max(1.0);
    let plus = transform(UpperHalfPoint::new(zz + h)?)?;
    let minus = transform(UpperHalfPoint::new(zz - h)?)?;
    Ok((plus - minus) / (2.0 * h))
}

fn require_in_region(z: UpperHalfPoint, v0: f64) -> Result<(), LawError> {
    if z.z().im >= v0 {
        Ok(())
    } else {
        Err(LawError::RegionViolation { z: z.z(), v0 })
    }
}

fn mean_a_value(z: UpperHalfPoint, c: &CltConstants) -> Complex64 {
    let s = semicircle_stieltjes(z);
    let sp = semicircle_stieltjes_derivative(z);
    (1.0 + sp) * s * s * s * (c.sigma2 - 1.0 + (c.kappa - 1.0) * sp + c.beta * s * s)
}

/// CLT mean function `a(z) = [1 + s'] s^3 [sigma^2 - 1 + (kappa - 1) s' +
/// beta s^2]` and its derivative `a'(z)` (the limiting process mean), for
/// `Im z >= v0`.
pub fn clt_mean_a(
    z: UpperHalfPoint,
    c: &CltConstants,
    v0: f64,
) -> Result<(Complex64, Complex64), LawError> {
    require_in_region(z, v0)?;
    let a = mean_a_value(z, c);
    let a_prime = transform_derivative(|w| Ok(mean_a_value(w, c)), z)?;
    Ok((a, a_prime))
}

fn cov_b_value(z1: UpperHalfPoint, z2: UpperHalfPoint, c: &CltConstants) -> Result<Complex64, LawError> {
    let s1 = semicircle_stieltjes(z1);
    let s2 = semicircle_stieltjes(z2);
    let product = s1 * s2;
    let gap = Complex64::new(1.0, 0.0) - product;
    if gap.norm() < COV_SINGULARITY_TOL {
        return Err(LawError::Singularity { value: gap.norm() });
    }
    let sp1 = semicircle_stieltjes_derivative(z1);
    let sp2 = semicircle_stieltjes_derivative(z2);
    Ok(sp1 * sp2 * (c.sigma2 - c.kappa + 2.0 * c.beta * product + c.kappa * (gap * gap).finv()))
}

/// CLT covariance function `b(z1, z2) = s'(z1) s'(z2) [sigma^2 - kappa +
/// 2 beta s(z1) s(z2) + kappa (1 - s(z1) s(z2))^{-2}]` and the limiting
/// process covariance `d2b = d^2 b / dz1 dz2` by nested central differences.
pub fn clt_cov_b(
    z1: UpperHalfPoint,
    z2: UpperHalfPoint,
    c: &CltConstants,
    v0: f64,
) -> Result<(Complex64, Complex64), LawError> {
    require_in_region(z1, v0)?;
    require_in_region(z2, v0)?;
    let b = cov_b_value(z1, z2, c)?;
    let h1 = COV_DERIVATIVE_STEP * z1.z().norm().max(1.0);
    let h2 = COV_DERIVATIVE_STEP * z2.z().norm().max(1.0);
    let at = |dz1: f64, dz2: f64| -> Result<Complex64, LawError> {
        cov_b_value(
            UpperHalfPoint::new(z1.z() + dz1)?,
            UpperHalfPoint::new(z2.z() + dz2)?,
            c,
        )
    };
    // grouped so the reduction is symmetric under (z1, z2) swap bit for bit
    let d2b = ((at(h1, h2)? + at(-h1, -h2)?) - (at(h1, -h2)? + at(-h1, h2)?))
        / (4.0 * (h1 * h2));
    Ok((b, d2b))
}

/// The limiting Gaussian block for one group of spiked eigenvalues: ordered
/// eigenvalues of a `multiplicity x multiplicity` symmetric Gaussian matrix
/// with the stated entry variances.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SpikedBlock {
    pub eigenvalue: f64,
    pub multiplicity: usize,
    pub diag_variance: f64,
    pub offdiag_variance: f64,
}

/// Describes the limit law of the rescaled sample-eigenvalue fluctuations of
/// a spiked model: one independent Gaussian block per distinct population
/// eigenvalue, with diagonal variance `2 lambda^2` and off-diagonal variance
/// `lambda^2`.
pub fn spiked_limit_description(config: &SpikedConfig) -> Vec<SpikedBlock> {
    config
        .population_eigenvalues
        .iter()
        .map(|&(lambda, multiplicity)| SpikedBlock {
            eigenvalue: lambda,
            multiplicity,
            diag_variance: 2.0 * lambda * lambda,
            offdiag_variance: lambda * lambda,
        })
        .collect()
}

/// Canonical `a+bi` rendering of a complex number (decimal reals, no spaces);
/// inverse of [`parse_complex`].
pub fn format_complex(z: Complex64) -> String {
    if z.im < 0.0 {
        format!("{}-{}i", z.re, -z.im)
    } else {
        format!("{}+{}i", z.re, z.im)
    }
}

/// Parses the `a+bi` complex literal format used on the CLI, e.g. `0+2i`,
/// `1.5-0.5i`, `-1+1i` (also accepts a bare `i` coefficient as in `-1+i`).
pub fn parse_complex(s: &str) -> Result<Complex64, String> {
    let t = s.trim();
    let inner = t.strip_suffix('i').ok_or_else(|| {
        format!("complex literal {t:?} must end in 'i' (format a+bi)")
    })?;
    // split at the sign separating real and imaginary parts (not the leading
    // sign and not an exponent sign).
    let bytes = inner.as_bytes();
    let mut split = None;
    for k in (1..bytes.len()).rev() {
        let c = bytes[k] as char;
        if (c == '+' || c == '-') && !matches!(bytes[k - 1] as char, 'e' | 'E') {
            split = Some(k);
            break;
        }
    }
    let k = split.ok_or_else(|| format!("complex literal {t:?} needs the form a+bi"))?;
    let re: f64 = inner[..k]
        .parse()
        .map_err(|_| format!("bad real part in {t:?}"))?;
    let imag_str = &inner[k..];
    let im: f64 = match imag_str {
        "+" => 1.0,
        "-" => -1.0,
        _ => imag_str
            .parse()
            .map_err(|_| format!("bad imaginary part in {t:?}"))?,
    };
    Ok(Complex64::new(re, im))
}
