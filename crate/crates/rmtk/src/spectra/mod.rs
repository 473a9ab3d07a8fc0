//! Empirical-spectral machinery: eigenvalue extraction, spectral CDFs, exact
//! Kolmogorov–Smirnov distances, and the empirical Stieltjes transform.

use std::fmt::Write as _;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use thiserror::Error;

mod eigen;

pub use eigen::{hermitian_eigenpairs, symmetric_eigenpairs};

/// Relative asymmetry tolerated before a matrix is rejected as non-Hermitian.
pub const HERMITIAN_REL_TOL: f64 = 1e-12;

/// Weights of an atomic distribution must sum to one within this slack.
pub const WEIGHT_SUM_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum SpectraError {
    #[error("matrix is not Hermitian: asymmetry {asymmetry:e} exceeds {tol:e} * max entry")]
    NotHermitian { asymmetry: f64, tol: f64 },
    #[error("QL iteration failed to converge at eigenvalue index {index}")]
    EigenNonConvergence { index: usize },
    #[error("Stieltjes transform requires Im z > 0, got z = {re}+{im}i")]
    NotUpperHalfPlane { re: f64, im: f64 },
    #[error("eigenvalues must be finite, found {value}")]
    NonFiniteEigenvalue { value: f64 },
    #[error("invalid atomic distribution: {0}")]
    InvalidDistribution(String),
}

/// A Hermitian matrix draw: real symmetric or complex Hermitian, depending on
/// the entry law that produced it.
#[derive(Debug, Clone)]
pub enum HermitianMatrix {
    Real(Array2<f64>),
    Complex(Array2<Complex64>),
}

impl HermitianMatrix {
    pub fn dim(&self) -> usize {
        match self {
            HermitianMatrix::Real(a) => a.nrows(),
            HermitianMatrix::Complex(a) => a.nrows(),
        }
    }

    pub fn trace(&self) -> f64 {
        match self {
            HermitianMatrix::Real(a) => (0..a.nrows()).map(|i| a[(i, i)]).sum(),
            HermitianMatrix::Complex(a) => (0..a.nrows()).map(|i| a[(i, i)].re).sum(),
        }
    }

    pub fn frobenius_norm(&self) -> f64 {
        match self {
            HermitianMatrix::Real(a) => a.iter().map(|x| x * x).sum::<f64>().sqrt(),
            HermitianMatrix::Complex(a) => a.iter().map(|x| x.norm_sqr()).sum::<f64>().sqrt(),
        }
    }

    pub fn max_abs_entry(&self) -> f64 {
        match self {
            HermitianMatrix::Real(a) => a.iter().fold(0.0, |m, x| m.max(x.abs())),
            HermitianMatrix::Complex(a) => a.iter().fold(0.0, |m, x| m.max(x.norm())),
        }
    }

    /// Largest absolute deviation between the matrix and its conjugate
    /// transpose.
    pub fn asymmetry(&self) -> f64 {
        let mut worst = 0.0_f64;
        match self {
            HermitianMatrix::Real(a) => {
                for i in 0..a.nrows() {
                    for j in 0..i {
                        worst = worst.max((a[(i, j)] - a[(j, i)]).abs());
                    }
                }
            }
            HermitianMatrix::Complex(a) => {
                for i in 0..a.nrows() {
                    for j in 0..=i {
                        worst = worst.max((a[(i, j)] - a[(j, i)].conj()).norm());
                    }
                }
            }
        }
        worst
    }
}

/// Sorted eigenvalues of one matrix draw, with CDF and Stieltjes evaluation.
#[derive(Debug, Clone, PartialEq)]
pub struct EmpiricalSpectrum {
    eigenvalues: Vec<f64>,
}

impl EmpiricalSpectrum {
    /// Builds a spectrum from raw eigenvalues; sorts and rejects non-finite
    /// entries.
    pub fn new(mut eigenvalues: Vec<f64>) -> Result<Self, SpectraError> {
        if let Some(&bad) = eigenvalues.iter().find(|v| !v.is_finite()) {
            return Err(SpectraError::NonFiniteEigenvalue { value: bad });
        }
        eigenvalues.sort_by(|a, b| a.partial_cmp(b).expect("finite"));
        Ok(Self { eigenvalues })
    }

    pub fn len(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn is_empty(&self) -> bool {
        self.eigenvalues.is_empty()
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn min(&self) -> Option<f64> {
        self.eigenvalues.first().copied()
    }

    pub fn max(&self) -> Option<f64> {
        self.eigenvalues.last().copied()
    }

    /// Writes the spectrum as CSV: header `eigenvalue`, one value per line.
    pub fn write_csv<W: std::io::Write>(&self, w: &mut W) -> std::io::Result<()> {
        writeln!(w, "eigenvalue")?;
        for v in &self.eigenvalues {
            writeln!(w, "{v}")?;
        }
        Ok(())
    }
}

/// Extracts the full spectrum of a Hermitian matrix. The input must be
/// Hermitian within [`HERMITIAN_REL_TOL`] relative asymmetry.
pub fn eigenvalues_symmetric(matrix: &HermitianMatrix) -> Result<EmpiricalSpectrum, SpectraError> {
    let scale = matrix.max_abs_entry();
    let asymmetry = matrix.asymmetry();
    if asymmetry > HERMITIAN_REL_TOL * scale {
        return Err(SpectraError::NotHermitian {
            asymmetry,
            tol: HERMITIAN_REL_TOL,
        });
    }
    let values = match matrix {
        HermitianMatrix::Real(a) => eigen::symmetric_eigenvalues(a.view())?,
        HermitianMatrix::Complex(a) => eigen::hermitian_eigenvalues(a.view())?,
    };
    EmpiricalSpectrum::new(values)
}

/// Empirical Stieltjes transform `(1/n) sum 1/(lambda_i - z)` for `Im z > 0`.
pub fn stieltjes_of_spectrum(
    spec: &EmpiricalSpectrum,
    z: Complex64,
) -> Result<Complex64, SpectraError> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(SpectraError::NotUpperHalfPlane { re: z.re, im: z.im });
    }
    let n = spec.len() as f64;
    let sum: Complex64 = spec
        .eigenvalues
        .iter()
        .map(|&l| (Complex64::new(l, 0.0) - z).finv())
        .sum();
    Ok(sum / n)
}

/// Exact derivative of the empirical transform, `(1/n) sum (lambda_i - z)^-2`.
pub fn stieltjes_derivative_of_spectrum(
    spec: &EmpiricalSpectrum,
    z: Complex64,
) -> Result<Complex64, SpectraError> {
    if z.im.is_nan() || z.im <= 0.0 {
        return Err(SpectraError::NotUpperHalfPlane { re: z.re, im: z.im });
    }
    let n = spec.len() as f64;
    let sum: Complex64 = spec
        .eigenvalues
        .iter()
        .map(|&l| {
            let d = Complex64::new(l, 0.0) - z;
            (d * d).finv()
        })
        .sum();
    Ok(sum / n)
}

/// One atom of a finite discrete probability measure.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Atom {
    pub weight: f64,
    pub location: f64,
}

/// Finite atomic probability measure; plays the role of population spectra
/// and of reference step CDFs.
#[derive(Debug, Clone, PartialEq)]
pub struct AtomicDistribution {
    atoms: Vec<Atom>,
}

impl AtomicDistribution {
    pub fn new(atoms: Vec<(f64, f64)>) -> Result<Self, SpectraError> {
        if atoms.is_empty() {
            return Err(SpectraError::InvalidDistribution("no atoms".into()));
        }
        let mut total = 0.0;
        for &(w, x) in &atoms {
            if !w.is_finite() || w <= 0.0 {
                return Err(SpectraError::InvalidDistribution(format!(
                    "weight {w} must be positive and finite"
                )));
            }
            if !x.is_finite() {
                return Err(SpectraError::InvalidDistribution(format!(
                    "location {x} must be finite"
                )));
            }
            total += w;
        }
        if (total - 1.0).abs() > WEIGHT_SUM_TOL {
            return Err(SpectraError::InvalidDistribution(format!(
                "weights sum to {total}, expected 1 within {WEIGHT_SUM_TOL:e}"
            )));
        }
        Ok(Self {
            atoms: atoms
                .into_iter()
                .map(|(weight, location)| Atom { weight, location })
                .collect(),
        })
    }

    pub fn point_mass(location: f64) -> Self {
        Self::new(vec![(1.0, location)]).expect("point mass is valid")
    }

    pub fn atoms(&self) -> &[Atom] {
        &self.atoms
    }

    pub fn min_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.location).fold(f64::INFINITY, f64::min)
    }

    pub fn max_location(&self) -> f64 {
        self.atoms.iter().map(|a| a.location).fold(f64::NEG_INFINITY, f64::max)
    }

    pub fn all_nonnegative(&self) -> bool {
        self.atoms.iter().all(|a| a.location >= 0.0)
    }

    /// Canonical `weight:location,...` rendering, inverse of [`FromStr`].
    pub fn to_spectrum_string(&self) -> String {
        let mut out = String::new();
        for (i, a) in self.atoms.iter().enumerate() {
            if i > 0 {
                out.push(',');
            }
            let _ = write!(out, "{}:{}", a.weight, a.location);
        }
        out
    }
}

impl FromStr for AtomicDistribution {
    type Err = SpectraError;

    /// Parses the spectrum string format: comma-separated `weight:location`
    /// pairs, e.g. `0.5:1.0,0.5:4.0`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut atoms = Vec::new();
        for part in s.split(',') {
            let (w, x) = part.split_once(':').ok_or_else(|| {
                SpectraError::InvalidDistribution(format!(
                    "expected weight:location, got {part:?}"
                ))
            })?;
            let weight: f64 = w.trim().parse().map_err(|_| {
                SpectraError::InvalidDistribution(format!("bad weight {w:?}"))
            })?;
            let location: f64 = x.trim().parse().map_err(|_| {
                SpectraError::InvalidDistribution(format!("bad location {x:?}"))
            })?;
            atoms.push((weight, location));
        }
        Self::new(atoms)
    }
}

/// A cumulative distribution function that [`ks_distance`] can evaluate.
///
/// Step functions expose their jump points; continuous references leave the
/// default `None` and are evaluated at the other side's jumps.
pub trait Cdf {
    fn eval(&self, x: f64) -> f64;

    /// Left limit `F(x-)`; identical to `eval` for continuous CDFs.
    fn eval_left(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn jump_points(&self) -> Option<Vec<f64>> {
        None
    }
}

impl Cdf for EmpiricalSpectrum {
    fn eval(&self, x: f64) -> f64 {
        let count = self.eigenvalues.partition_point(|&l| l <= x);
        count as f64 / self.eigenvalues.len() as f64
    }

    fn eval_left(&self, x: f64) -> f64 {
        let count = self.eigenvalues.partition_point(|&l| l < x);
        count as f64 / self.eigenvalues.len() as f64
    }

    fn jump_points(&self) -> Option<Vec<f64>> {
        Some(self.eigenvalues.clone())
    }
}

impl Cdf for AtomicDistribution {
    fn eval(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.location <= x)
            .map(|a| a.weight)
            .sum()
    }

    fn eval_left(&self, x: f64) -> f64 {
        self.atoms
            .iter()
            .filter(|a| a.location < x)
            .map(|a| a.weight)
            .sum()
    }

    fn jump_points(&self) -> Option<Vec<f64>> {
        Some(self.atoms.iter().map(|a| a.location).collect())
    }
}

/// A CDF tabulated on a grid, evaluated by linear interpolation. Used for
/// solver-derived reference laws.
#[derive(Debug, Clone)]
pub struct GridCdf {
    xs: Vec<f64>,
    fs: Vec<f64>,
}

impl GridCdf {
    /// Integrates a density sampled on `xs` (trapezoid rule) into a CDF
    /// table. `xs` must be strictly increasing.
    pub fn from_density(xs: Vec<f64>, density: &[f64]) -> Self {
        assert_eq!(xs.len(), density.len());
        assert!(xs.windows(2).all(|w| w[0] < w[1]), "grid must increase");
        let mut fs = Vec::with_capacity(xs.len());
        let mut acc = 0.0;
        fs.push(0.0);
        for k in 1..xs.len() {
            acc += 0.5 * (density[k] + density[k - 1]) * (xs[k] - xs[k - 1]);
            fs.push(acc);
        }
        GridCdf { xs, fs }
    }

    pub fn total_mass(&self) -> f64 {
        *self.fs.last().unwrap_or(&0.0)
    }
}

impl Cdf for GridCdf {
    fn eval(&self, x: f64) -> f64 {
        if self.xs.is_empty() || x <= self.xs[0] {
            return 0.0;
        }
        let n = self.xs.len();
        if x >= self.xs[n - 1] {
            return self.fs[n - 1];
        }
        let hi = self.xs.partition_point(|&t| t < x);
        let (x0, x1) = (self.xs[hi - 1], self.xs[hi]);
        let (f0, f1) = (self.fs[hi - 1], self.fs[hi]);
        f0 + (f1 - f0) * (x - x0) / (x1 - x0)
    }
}

/// A CDF given by a closure; for closed-form continuous references.
pub struct FnCdf<F: Fn(f64) -> f64>(pub F);

impl<F: Fn(f64) -> f64> Cdf for FnCdf<F> {
    fn eval(&self, x: f64) -> f64 {
        (self.0)(x)
    }
}

/// Writes a CDF table as CSV: header `x,F`, one row per grid point.
pub fn write_cdf_csv<C: Cdf + ?Sized, W: std::io::Write>(
    cdf: &C,
    xs: &[f64],
    w: &mut W,
) -> std::io::Result<()> {
    writeln!(w, "x,F")?;
    for &x in xs {
        writeln!(w, "{x},{}", cdf.eval(x))?;
    }
    Ok(())
}

/// Exact Kolmogorov–Smirnov distance `sup_x |F(x) - G(x)|`.
///
/// The supremum is computed over the union of jump points of the two CDFs,
/// comparing both the right values and the left limits there; at least one
/// argument must be a step function with known jumps.
pub fn ks_distance<F: Cdf + ?Sized, G: Cdf + ?Sized>(f: &F, g: &G) -> f64 {
    let mut jumps = f.jump_points().unwrap_or_default();
    jumps.extend(g.jump_points().unwrap_or_default());
    assert!(
        !jumps.is_empty(),
        "ks_distance needs at least one step CDF with jump points"
    );
    let mut sup = 0.0_f64;
    for &x in &jumps {
        sup = sup.max((f.eval(x) - g.eval(x)).abs());
        sup = sup.max((f.eval_left(x) - g.eval_left(x)).abs());
    }
    sup
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn esd_cdf_counts_with_less_or_equal() {
        let spec = EmpiricalSpectrum::new(vec![1.0, 2.0, 3.0]).unwrap();
        assert_eq!(spec.eval(2.0), 2.0 / 3.0);
        assert_eq!(spec.eval(0.5), 0.0);
        assert_eq!(spec.eval(3.5), 1.0);
    }

    #[test]
    fn esd_cdf_jumps_by_multiplicity_at_ties() {
        let spec = EmpiricalSpectrum::new(vec![1.0, 2.0, 2.0, 5.0]).unwrap();
        assert_eq!(spec.eval(2.0) - spec.eval_left(2.0), 2.0 / 4.0);
    }

    #[test]
    fn spectrum_rejects_non_finite() {
        assert!(EmpiricalSpectrum::new(vec![1.0, f64::NAN]).is_err());
        assert!(EmpiricalSpectrum::new(vec![f64::INFINITY]).is_err());
    }

    #[test]
    fn eigenvalues_of_diagonal_matrix() {
        let m = HermitianMatrix::Real(array![[3.0, 0.0, 0.0], [0.0, 1.0, 0.0], [0.0, 0.0, 2.0]]);
        let spec = eigenvalues_symmetric(&m).unwrap();
        assert_eq!(spec.eigenvalues(), &[1.0, 2.0, 3.0]);
    }

    #[test]
    fn non_hermitian_input_rejected() {
        let m = HermitianMatrix::Real(array![[0.0, 1.0], [0.5, 0.0]]);
        assert!(matches!(
            eigenvalues_symmetric(&m),
            Err(SpectraError::NotHermitian { .. })
        ));
    }

    #[test]
    fn trace_and_frobenius_identities() {
        // Deterministic full symmetric matrix, entries O(1).
        let n = 50;
        let a = Array2::from_shape_fn((n, n), |(i, j)| {
            let (i, j) = (i.min(j) as f64, i.max(j) as f64);
            ((i * 37.0 + j * 17.0 + 3.0).sin() + (i - j) * 0.01).cos()
        });
        let m = HermitianMatrix::Real(a);
        let spec = eigenvalues_symmetric(&m).unwrap();
        let sum: f64 = spec.eigenvalues().iter().sum();
        let sq_sum: f64 = spec.eigenvalues().iter().map(|l| l * l).sum();
        let fro = m.frobenius_norm();
        assert!((sum - m.trace()).abs() <= 1e-9 * fro);
        assert!((sq_sum - fro * fro).abs() <= 1e-9 * fro * fro);
    }

    #[test]
    fn stieltjes_single_atom_at_zero() {
        let spec = EmpiricalSpectrum::new(vec![0.0]).unwrap();
        let m = stieltjes_of_spectrum(&spec, Complex64::new(0.0, 1.0)).unwrap();
        assert!((m - Complex64::new(0.0, 1.0)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_two_symmetric_atoms() {
        let spec = EmpiricalSpectrum::new(vec![-1.0, 1.0]).unwrap();
        let m = stieltjes_of_spectrum(&spec, Complex64::new(0.0, 1.0)).unwrap();
        assert!((m - Complex64::new(0.0, 0.5)).norm() < 1e-15);
    }

    #[test]
    fn stieltjes_large_imaginary_expansion() {
        let spec = EmpiricalSpectrum::new(vec![-0.8, 0.1, 0.9]).unwrap();
        let y = 50.0;
        let m = stieltjes_of_spectrum(&spec, Complex64::new(0.0, y)).unwrap();
        let max_abs = 0.9;
        assert!((m - Complex64::new(0.0, 1.0 / y)).norm() <= max_abs / (y * y));
    }

    #[test]
    fn stieltjes_rejects_lower_half_plane() {
        let spec = EmpiricalSpectrum::new(vec![0.0]).unwrap();
        assert!(stieltjes_of_spectrum(&spec, Complex64::new(1.0, 0.0)).is_err());
        assert!(stieltjes_of_spectrum(&spec, Complex64::new(1.0, -0.5)).is_err());
    }

    #[test]
    fn ks_identical_step_functions() {
        let spec = EmpiricalSpectrum::new(vec![0.0, 1.0, 2.0]).unwrap();
        assert_eq!(ks_distance(&spec, &spec), 0.0);
    }

    #[test]
    fn ks_point_masses_at_zero_and_one() {
        let f = AtomicDistribution::point_mass(0.0);
        let g = AtomicDistribution::point_mass(1.0);
        assert_eq!(ks_distance(&f, &g), 1.0);
    }

    #[test]
    fn ks_against_continuous_uses_left_limits() {
        // Point mass at 0 vs U[-1, 1]: sup is 0.5 at the jump, attained from
        // both sides.
        let f = AtomicDistribution::point_mass(0.0);
        let g = FnCdf(|x: f64| ((x + 1.0) / 2.0).clamp(0.0, 1.0));
        assert!((ks_distance(&f, &g) - 0.5).abs() < 1e-15);
    }

    #[test]
    fn spectrum_string_round_trip() {
        let h: AtomicDistribution = "0.5:1.0,0.5:4.0".parse().unwrap();
        assert_eq!(h.atoms().len(), 2);
        assert_eq!(h.atoms()[0].weight, 0.5);
        assert_eq!(h.atoms()[1].location, 4.0);
        let again: AtomicDistribution = h.to_spectrum_string().parse().unwrap();
        assert_eq!(h, again);
    }

    #[test]
    fn spectrum_string_rejects_bad_weights() {
        assert!("0.5:1.0,0.6:2.0".parse::<AtomicDistribution>().is_err());
        assert!("1.0".parse::<AtomicDistribution>().is_err());
        assert!("-1.0:0.0,2.0:1.0".parse::<AtomicDistribution>().is_err());
    }

    #[test]
    fn cdf_csv_table() {
        let spec = EmpiricalSpectrum::new(vec![0.0, 1.0]).unwrap();
        let mut buf = Vec::new();
        write_cdf_csv(&spec, &[-1.0, 0.5, 2.0], &mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "x,F\n-1,0\n0.5,0.5\n2,1\n");
    }

    #[test]
    fn spectrum_csv_emission() {
        let spec = EmpiricalSpectrum::new(vec![2.0, -1.0]).unwrap();
        let mut buf = Vec::new();
        spec.write_csv(&mut buf).unwrap();
        assert_eq!(String::from_utf8(buf).unwrap(), "eigenvalue\n-1\n2\n");
    }

    #[test]
    fn grid_cdf_interpolates() {
        let xs = vec![0.0, 1.0, 2.0];
        let dens = vec![1.0, 1.0, 0.0];
        let cdf = GridCdf::from_density(xs, &dens);
        assert_eq!(cdf.eval(-1.0), 0.0);
        assert!((cdf.eval(1.0) - 1.0).abs() < 1e-15);
        assert!((cdf.eval(0.5) - 0.5).abs() < 1e-15);
        assert!((cdf.total_mass() - 1.5).abs() < 1e-15);
    }
}
