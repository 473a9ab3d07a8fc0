//! Seeded random-matrix generators: Wigner, sample covariance
//! `(1/n) T^{1/2} X X* T^{1/2}`, deformed Wigner `n^{-1/2} T^{1/2} W T^{1/2}`,
//! and fixed-dimension spiked Gaussian covariance samples.
//!
//! Every generator is a pure function of its config (seed included): the same
//! config yields a bit-identical matrix. Gaussians come from the Marsaglia
//! polar method so the draw stream has no platform- or library-dependent
//! tail handling.

use std::fmt;
use std::str::FromStr;

use ndarray::Array2;
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::spectra::{AtomicDistribution, HermitianMatrix};

#[derive(Debug, Error)]
pub enum EnsembleError {
    #[error("matrix size must be at least 1")]
    EmptyMatrix,
    #[error("diag_variance must be positive, got {0}")]
    BadDiagVariance(f64),
    #[error("population spectrum must have nonnegative atom locations")]
    NegativePopulationAtom,
    #[error("spiked sampling needs n >= 2, got {0}")]
    InsufficientSample(usize),
    #[error("population eigenvalues must be strictly decreasing and nonnegative")]
    BadSpikeOrder,
    #[error("rotation must be a {expected}x{expected} orthogonal matrix (deviation {deviation:e})")]
    BadRotation { expected: usize, deviation: f64 },
    #[error("index {index} out of range for a {dim}x{dim} matrix")]
    IndexOutOfRange { index: usize, dim: usize },
    #[error("unknown entry law {0:?} (expected gauss-real|gauss-complex|rademacher|uniform)")]
    UnknownEntryLaw(String),
}

/// Splitmix-style 64-bit finalizer; bijective, so distinct inputs at any
/// absorption step can never collide.
fn splitmix(mut z: u64) -> u64 {
    z = z.wrapping_add(0x9E37_79B9_7F4A_7C15);
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}

/// Derives the seed for one replicate of one stream from a master seed.
pub fn mix_seed(master: u64, replicate: u64, stream: u64) -> u64 {
    let mut h = splitmix(0x243F_6A88_85A3_08D3 ^ master);
    h = splitmix(h ^ replicate);
    splitmix(h ^ stream)
}

/// Stream tags keep the draw sequences of unrelated generators decorrelated
/// even when they share a seed.
#[derive(Debug, Clone, Copy)]
#[repr(u64)]
pub enum Stream {
    WignerEntries = 1,
    CovarianceEntries = 2,
    PopulationDraw = 3,
    SpikedVectors = 4,
    MetricTriples = 5,
    BlockLaw = 6,
    Replicate = 7,
    SizeLevel = 8,
}

/// Standardized entry laws: mean 0, E|w|^2 = 1. The complex Gaussian has
/// independent real and imaginary parts of variance 1/2, so E w^2 = 0.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntryLaw {
    GaussianReal,
    GaussianComplex,
    Rademacher,
    UniformStandardized,
}

impl EntryLaw {
    pub fn is_complex(self) -> bool {
        matches!(self, EntryLaw::GaussianComplex)
    }

    /// CLT symmetry constant: 1 for complex ensembles, 2 for real ones.
    pub fn kappa(self) -> f64 {
        if self.is_complex() {
            1.0
        } else {
            2.0
        }
    }

    /// Fourth-moment constant `E(|w|^2 - 1)^2 - kappa`.
    pub fn beta(self) -> f64 {
        let centered_fourth = match self {
            EntryLaw::GaussianReal => 2.0,          // E w^4 = 3
            EntryLaw::GaussianComplex => 1.0,       // |w|^2 ~ Exp(1)
            EntryLaw::Rademacher => 0.0,            // |w|^2 = 1
            EntryLaw::UniformStandardized => 0.8,   // E w^4 = 9/5
        };
        centered_fourth - self.kappa()
    }
}

impl fmt::Display for EntryLaw {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            EntryLaw::GaussianReal => "gauss-real",
            EntryLaw::GaussianComplex => "gauss-complex",
            EntryLaw::Rademacher => "rademacher",
            EntryLaw::UniformStandardized => "uniform",
        };
        f.write_str(s)
    }
}

impl FromStr for EntryLaw {
    type Err = EnsembleError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "gauss-real" => Ok(EntryLaw::GaussianReal),
            "gauss-complex" => Ok(EntryLaw::GaussianComplex),
            "rademacher" => Ok(EntryLaw::Rademacher),
            "uniform" => Ok(EntryLaw::UniformStandardized),
            other => Err(EnsembleError::UnknownEntryLaw(other.to_string())),
        }
    }
}

/// Seeded sampler for standardized entries and scaled diagonal draws.
pub struct EntrySampler {
    rng: ChaCha8Rng,
    spare_normal: Option<f64>,
}

impl EntrySampler {
    pub fn new(seed: u64) -> Self {
        Self {
            rng: ChaCha8Rng::seed_from_u64(seed),
            spare_normal: None,
        }
    }

    fn uniform(&mut self) -> f64 {
        self.rng.random::<f64>()
    }

    /// Marsaglia polar method; produces two normals per accepted pair.
    fn normal_pair(&mut self) -> (f64, f64) {
        loop {
            let u = 2.0 * self.uniform() - 1.0;
            let v = 2.0 * self.uniform() - 1.0;
            let s = u * u + v * v;
            if s > 0.0 && s < 1.0 {
                let factor = (-2.0 * s.ln() / s).sqrt();
                return (u * factor, v * factor);
            }
        }
    }

    pub fn standard_normal(&mut self) -> f64 {
        if let Some(x) = self.spare_normal.take() {
            return x;
        }
        let (a, b) = self.normal_pair();
        self.spare_normal = Some(b);
        a
    }

    /// One standardized real draw from `law`; for the complex Gaussian this
    /// is the real marginal scaled back to unit variance.
    pub fn draw_real(&mut self, law: EntryLaw) -> f64 {
        match law {
            EntryLaw::GaussianReal | EntryLaw::GaussianComplex => self.standard_normal(),
            EntryLaw::Rademacher => {
                if self.uniform() < 0.5 {
                    -1.0
                } else {
                    1.0
                }
            }
            EntryLaw::UniformStandardized => (self.uniform() - 0.5) * 12f64.sqrt(),
        }
    }

    /// One standardized complex draw: independent real/imaginary parts of
    /// variance 1/2 each.
    pub fn draw_complex(&mut self) -> Complex64 {
        let (a, b) = self.normal_pair();
        Complex64::new(a, b) * 0.5f64.sqrt()
    }

    /// Real draw with the given variance, used for Hermitian diagonals.
    pub fn draw_diagonal(&mut self, law: EntryLaw, variance: f64) -> f64 {
        let sigma = variance.sqrt();
        match law {
            EntryLaw::GaussianReal | EntryLaw::GaussianComplex => sigma * self.standard_normal(),
            EntryLaw::Rademacher => {
                if self.uniform() < 0.5 {
                    -sigma
                } else {
                    sigma
                }
            }
            EntryLaw::UniformStandardized => sigma * (self.uniform() - 0.5) * 12f64.sqrt(),
        }
    }
}

/// Parameters of one Wigner draw: a Hermitian matrix of independent entries
/// scaled by `n^{-1/2}`, off-diagonal variance 1, diagonal variance
/// `diag_variance`.
#[derive(Debug, Clone)]
pub struct WignerConfig {
    pub n: usize,
    pub entry_law: EntryLaw,
    pub diag_variance: f64,
    pub seed: u64,
}

impl WignerConfig {
    pub fn new(
        n: usize,
        entry_law: EntryLaw,
        diag_variance: f64,
        seed: u64,
    ) -> Result<Self, EnsembleError> {
        if n == 0 {
            return Err(EnsembleError::EmptyMatrix);
        }
        if diag_variance.is_nan() || diag_variance <= 0.0 {
            return Err(EnsembleError::BadDiagVariance(diag_variance));
        }
        Ok(Self {
            n,
            entry_law,
            diag_variance,
            seed,
        })
    }
}

pub fn sample_wigner(config: &WignerConfig) -> HermitianMatrix {
    let n = config.n;
    let scale = 1.0 / (n as f64).sqrt();
    let mut sampler = EntrySampler::new(mix_seed(config.seed, 0, Stream::WignerEntries as u64));

    if config.entry_law.is_complex() {
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = Complex64::new(
                scale * sampler.draw_diagonal(config.entry_law, config.diag_variance),
                0.0,
            );
            for j in (i + 1)..n {
                let w = sampler.draw_complex() * scale;
                a[(i, j)] = w;
                a[(j, i)] = w.conj();
            }
        }
        HermitianMatrix::Complex(a)
    } else {
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            a[(i, i)] = scale * sampler.draw_diagonal(config.entry_law, config.diag_variance);
            for j in (i + 1)..n {
                let w = scale * sampler.draw_real(config.entry_law);
                a[(i, j)] = w;
                a[(j, i)] = w;
            }
        }
        HermitianMatrix::Real(a)
    }
}

/// How the population matrix `T` realizes the spectrum `H`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PopulationMode {
    /// Deterministic: atom multiplicities by largest-remainder apportionment.
    Apportioned,
    /// Random: eigenvalues drawn iid from `H` (ESD of `T` tends to `H` only
    /// in probability).
    IidDraw,
}

/// Parameters of one sample-covariance draw `B = (1/n) T^{1/2} X X* T^{1/2}`
/// with `T` diagonal carrying the population spectrum.
#[derive(Debug, Clone)]
pub struct CovarianceConfig {
    pub p: usize,
    pub n: usize,
    pub population_spectrum: AtomicDistribution,
    pub entry_law: EntryLaw,
    pub population_mode: PopulationMode,
    pub seed: u64,
}

impl CovarianceConfig {
    pub fn new(
        p: usize,
        n: usize,
        population_spectrum: AtomicDistribution,
        entry_law: EntryLaw,
        population_mode: PopulationMode,
        seed: u64,
    ) -> Result<Self, EnsembleError> {
        if p == 0 || n == 0 {
            return Err(EnsembleError::EmptyMatrix);
        }
        if !population_spectrum.all_nonnegative() {
            return Err(EnsembleError::NegativePopulationAtom);
        }
        Ok(Self {
            p,
            n,
            population_spectrum,
            entry_law,
            population_mode,
            seed,
        })
    }

    pub fn aspect_ratio(&self) -> f64 {
        self.p as f64 / self.n as f64
    }
}

/// Largest-remainder apportionment of `count` slots to the atoms' weights;
/// ties go to the earlier atom. Returns one location per slot, grouped in
/// atom order.
pub fn apportion_spectrum(h: &AtomicDistribution, count: usize) -> Vec<f64> {
    let atoms = h.atoms();
    let mut alloc: Vec<usize> = Vec::with_capacity(atoms.len());
    let mut remainders: Vec<(usize, f64)> = Vec::with_capacity(atoms.len());
    let mut assigned = 0;
    for (k, atom) in atoms.iter().enumerate() {
        let exact = atom.weight * count as f64;
        let base = exact.floor() as usize;
        alloc.push(base);
        assigned += base;
        remainders.push((k, exact - base as f64));
    }
    // Stable sort by descending remainder; index order breaks ties.
    remainders.sort_by(|a, b| b.1.partial_cmp(&a.1).expect("finite remainders"));
    let mut left = count.saturating_sub(assigned);
    for &(k, _) in &remainders {
        if left == 0 {
            break;
        }
        alloc[k] += 1;
        left -= 1;
    }
    let mut out = Vec::with_capacity(count);
    for (k, atom) in atoms.iter().enumerate() {
        out.extend(std::iter::repeat_n(atom.location, alloc[k]));
    }
    out
}

fn draw_population(config_seed: u64, h: &AtomicDistribution, count: usize) -> Vec<f64> {
    let mut sampler = EntrySampler::new(mix_seed(config_seed, 0, Stream::PopulationDraw as u64));
    let atoms = h.atoms();
    (0..count)
        .map(|_| {
            let u = sampler.uniform();
            let mut acc = 0.0;
            for atom in atoms {
                acc += atom.weight;
                if u < acc {
                    return atom.location;
                }
            }
            atoms.last().expect("nonempty").location
        })
        .collect()
}

fn population_diagonal(seed: u64, h: &AtomicDistribution, count: usize, mode: PopulationMode) -> Vec<f64> {
    match mode {
        PopulationMode::Apportioned => apportion_spectrum(h, count),
        PopulationMode::IidDraw => draw_population(seed, h, count),
    }
}

pub fn sample_sample_covariance(config: &CovarianceConfig) -> HermitianMatrix {
    let (p, n) = (config.p, config.n);
    let tau = population_diagonal(
        config.seed,
        &config.population_spectrum,
        p,
        config.population_mode,
    );
    let sqrt_tau: Vec<f64> = tau.iter().map(|t| t.sqrt()).collect();

    let mut sampler = EntrySampler::new(mix_seed(config.seed, 0, Stream::CovarianceEntries as u64));

    if config.entry_law.is_complex() {
        let mut x = Array2::zeros((p, n));
        for i in 0..p {
            for k in 0..n {
                x[(i, k)] = sampler.draw_complex() * sqrt_tau[i];
            }
        }
        let mut b = Array2::zeros((p, p));
        for i in 0..p {
            for j in 0..=i {
                let mut acc = Complex64::new(0.0, 0.0);
                for k in 0..n {
                    acc += x[(i, k)] * x[(j, k)].conj();
                }
                let v = acc / n as f64;
                b[(i, j)] = v;
                b[(j, i)] = v.conj();
            }
            b[(i, i)] = Complex64::new(b[(i, i)].re, 0.0);
        }
        HermitianMatrix::Complex(b)
    } else {
        let mut x = Array2::zeros((p, n));
        for i in 0..p {
            for k in 0..n {
                x[(i, k)] = sampler.draw_real(config.entry_law) * sqrt_tau[i];
            }
        }
        let mut b = Array2::zeros((p, p));
        for i in 0..p {
            let row_i = x.row(i);
            for j in 0..=i {
                let acc = row_i.dot(&x.row(j));
                let v = acc / n as f64;
                b[(i, j)] = v;
                b[(j, i)] = v;
            }
        }
        HermitianMatrix::Real(b)
    }
}

/// Parameters of one deformed-Wigner draw `n^{-1/2} T^{1/2} W T^{1/2}`
/// (square case of the covariance setup; the `n^{-1/2}` is the Wigner entry
/// scaling).
#[derive(Debug, Clone)]
pub struct DeformedWignerConfig {
    pub n: usize,
    pub population_spectrum: AtomicDistribution,
    pub entry_law: EntryLaw,
    pub diag_variance: f64,
    pub population_mode: PopulationMode,
    pub seed: u64,
}

impl DeformedWignerConfig {
    pub fn new(
        n: usize,
        population_spectrum: AtomicDistribution,
        entry_law: EntryLaw,
        diag_variance: f64,
        population_mode: PopulationMode,
        seed: u64,
    ) -> Result<Self, EnsembleError> {
        if n == 0 {
            return Err(EnsembleError::EmptyMatrix);
        }
        if diag_variance.is_nan() || diag_variance <= 0.0 {
            return Err(EnsembleError::BadDiagVariance(diag_variance));
        }
        if !population_spectrum.all_nonnegative() {
            return Err(EnsembleError::NegativePopulationAtom);
        }
        Ok(Self {
            n,
            population_spectrum,
            entry_law,
            diag_variance,
            population_mode,
            seed,
        })
    }
}

pub fn sample_deformed_wigner(config: &DeformedWignerConfig) -> HermitianMatrix {
    let n = config.n;
    let wigner = sample_wigner(&WignerConfig {
        n,
        entry_law: config.entry_law,
        diag_variance: config.diag_variance,
        seed: config.seed,
    });
    let tau = population_diagonal(
        config.seed,
        &config.population_spectrum,
        n,
        config.population_mode,
    );
    let sqrt_tau: Vec<f64> = tau.iter().map(|t| t.sqrt()).collect();
    match wigner {
        HermitianMatrix::Real(mut a) => {
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] *= sqrt_tau[i] * sqrt_tau[j];
                }
            }
            HermitianMatrix::Real(a)
        }
        HermitianMatrix::Complex(mut a) => {
            for i in 0..n {
                for j in 0..n {
                    a[(i, j)] *= sqrt_tau[i] * sqrt_tau[j];
                }
            }
            HermitianMatrix::Complex(a)
        }
    }
}

/// Population rotation for the spiked model.
#[derive(Debug, Clone)]
pub enum Rotation {
    Identity,
    Orthogonal(Array2<f64>),
}

/// Orthonormality slack allowed for a user-supplied rotation.
pub const ROTATION_TOL: f64 = 1e-10;

/// Fixed-dimension spiked covariance model: population eigenvalues
/// `lambda_1 > lambda_2 > ... >= 0` with multiplicities, optionally rotated.
#[derive(Debug, Clone)]
pub struct SpikedConfig {
    pub population_eigenvalues: Vec<(f64, usize)>,
    pub rotation: Rotation,
    pub n: usize,
    pub seed: u64,
}

impl SpikedConfig {
    pub fn new(
        population_eigenvalues: Vec<(f64, usize)>,
        rotation: Rotation,
        n: usize,
        seed: u64,
    ) -> Result<Self, EnsembleError> {
        if population_eigenvalues.is_empty()
            || population_eigenvalues
                .iter()
                .any(|&(l, d)| !l.is_finite() || l < 0.0 || d == 0)
        {
            return Err(EnsembleError::BadSpikeOrder);
        }
        if population_eigenvalues.windows(2).any(|w| w[0].0 <= w[1].0) {
            return Err(EnsembleError::BadSpikeOrder);
        }
        let dim: usize = population_eigenvalues.iter().map(|&(_, d)| d).sum();
        if let Rotation::Orthogonal(v) = &rotation {
            if v.nrows() != dim || v.ncols() != dim {
                return Err(EnsembleError::BadRotation {
                    expected: dim,
                    deviation: f64::INFINITY,
                });
            }
            let mut deviation = 0.0_f64;
            for i in 0..dim {
                for j in 0..dim {
                    let dot: f64 = (0..dim).map(|k| v[(k, i)] * v[(k, j)]).sum();
                    let target = if i == j { 1.0 } else { 0.0 };
                    deviation = deviation.max((dot - target).abs());
                }
            }
            if deviation > ROTATION_TOL {
                return Err(EnsembleError::BadRotation {
                    expected: dim,
                    deviation,
                });
            }
        }
        Ok(Self {
            population_eigenvalues,
            rotation,
            n,
            seed,
        })
    }

    pub fn dim(&self) -> usize {
        self.population_eigenvalues.iter().map(|&(_, d)| d).sum()
    }

    /// Population eigenvalue per coordinate, grouped in block order.
    pub fn eigenvalue_per_coordinate(&self) -> Vec<f64> {
        let mut out = Vec::with_capacity(self.dim());
        for &(l, d) in &self.population_eigenvalues {
            out.extend(std::iter::repeat_n(l, d));
        }
        out
    }

    /// Population covariance `Sigma = V diag(lambda) V'`.
    pub fn population_covariance(&self) -> Array2<f64> {
        let d = self.dim();
        let lambda = self.eigenvalue_per_coordinate();
        match &self.rotation {
            Rotation::Identity => Array2::from_diag(&ndarray::Array1::from(lambda)),
            Rotation::Orthogonal(v) => {
                let mut sigma = Array2::zeros((d, d));
                for i in 0..d {
                    for j in 0..d {
                        let mut acc = 0.0;
                        for k in 0..d {
                            acc += v[(i, k)] * lambda[k] * v[(j, k)];
                        }
                        sigma[(i, j)] = acc;
                    }
                }
                sigma
            }
        }
    }
}

/// Draws `n` iid Gaussian vectors with the configured population covariance
/// and returns the centered sample covariance `S = (1/(n-1)) sum (x - mean)
/// (x - mean)'` together with the population covariance.
pub fn sample_spiked(config: &SpikedConfig) -> Result<(Array2<f64>, Array2<f64>), EnsembleError> {
    if config.n < 2 {
        return Err(EnsembleError::InsufficientSample(config.n));
    }
    let d = config.dim();
    let n = config.n;
    let sqrt_lambda: Vec<f64> = config
        .eigenvalue_per_coordinate()
        .iter()
        .map(|l| l.sqrt())
        .collect();
    let mut sampler = EntrySampler::new(mix_seed(config.seed, 0, Stream::SpikedVectors as u64));

    let mut data = Array2::zeros((n, d));
    let mut scratch = vec![0.0; d];
    for r in 0..n {
        for (k, s) in scratch.iter_mut().enumerate() {
            *s = sqrt_lambda[k] * sampler.standard_normal();
        }
        match &config.rotation {
            Rotation::Identity => {
                for k in 0..d {
                    data[(r, k)] = scratch[k];
                }
            }
            Rotation::Orthogonal(v) => {
                for i in 0..d {
                    let mut acc = 0.0;
                    for k in 0..d {
                        acc += v[(i, k)] * scratch[k];
                    }
                    data[(r, i)] = acc;
                }
            }
        }
    }

    let mut mean = vec![0.0; d];
    for r in 0..n {
        for k in 0..d {
            mean[k] += data[(r, k)];
        }
    }
    for m in &mut mean {
        *m /= n as f64;
    }

    let mut s = Array2::zeros((d, d));
    for r in 0..n {
        for i in 0..d {
            let xi = data[(r, i)] - mean[i];
            for j in 0..=i {
                s[(i, j)] += xi * (data[(r, j)] - mean[j]);
            }
        }
    }
    let denom = (n - 1) as f64;
    for i in 0..d {
        for j in 0..=i {
            let v = s[(i, j)] / denom;
            s[(i, j)] = v;
            s[(j, i)] = v;
        }
    }
    Ok((s, config.population_covariance()))
}

/// Gaussian fourth-moment (Wick/Isserlis) covariance
/// `Cov(X_i X_j, X_s X_t) = Sigma_is Sigma_jt + Sigma_it Sigma_js` for a
/// centered Gaussian vector with covariance `Sigma`.
pub fn wick_covariance(
    sigma: &Array2<f64>,
    i: usize,
    j: usize,
    s: usize,
    t: usize,
) -> Result<f64, EnsembleError> {
    let dim = sigma.nrows();
    for &idx in &[i, j, s, t] {
        if idx >= dim {
            return Err(EnsembleError::IndexOutOfRange { index: idx, dim });
        }
    }
    Ok(sigma[(i, s)] * sigma[(j, t)] + sigma[(i, t)] * sigma[(j, s)])
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    #[test]
    fn entry_law_strings_round_trip() {
        for law in [
            EntryLaw::GaussianReal,
            EntryLaw::GaussianComplex,
            EntryLaw::Rademacher,
            EntryLaw::UniformStandardized,
        ] {
            assert_eq!(law.to_string().parse::<EntryLaw>().unwrap(), law);
        }
        assert!("gaussian".parse::<EntryLaw>().is_err());
    }

    #[test]
    fn clt_constants_per_law() {
        assert_eq!(EntryLaw::GaussianReal.kappa(), 2.0);
        assert_eq!(EntryLaw::GaussianComplex.kappa(), 1.0);
        assert_eq!(EntryLaw::GaussianReal.beta(), 0.0);
        assert_eq!(EntryLaw::GaussianComplex.beta(), 0.0);
        assert_eq!(EntryLaw::Rademacher.beta(), -2.0);
        assert!((EntryLaw::UniformStandardized.beta() + 1.2).abs() < 1e-15);
    }

    #[test]
    fn wigner_one_by_one_is_a_single_diagonal_draw() {
        let config = WignerConfig::new(1, EntryLaw::GaussianReal, 1.0, 9).unwrap();
        let m = sample_wigner(&config);
        match m {
            HermitianMatrix::Real(a) => {
                assert_eq!(a.dim(), (1, 1));
                assert!(a[(0, 0)].is_finite());
            }
            _ => panic!("real law must produce a real matrix"),
        }
    }

    #[test]
    fn wigner_is_exactly_hermitian() {
        for law in [EntryLaw::GaussianReal, EntryLaw::GaussianComplex] {
            let config = WignerConfig::new(40, law, 1.0, 11).unwrap();
            assert_eq!(sample_wigner(&config).asymmetry(), 0.0);
        }
    }

    #[test]
    fn wigner_deterministic_in_seed() {
        let config = WignerConfig::new(25, EntryLaw::GaussianReal, 1.0, 1234).unwrap();
        let (a, b) = (sample_wigner(&config), sample_wigner(&config));
        match (a, b) {
            (HermitianMatrix::Real(x), HermitianMatrix::Real(y)) => {
                assert!(x.iter().zip(y.iter()).all(|(p, q)| p.to_bits() == q.to_bits()));
            }
            _ => unreachable!(),
        }
    }

    #[test]
    fn wigner_rademacher_offdiagonal_magnitudes() {
        let n = 1000;
        let config = WignerConfig::new(n, EntryLaw::Rademacher, 1.0, 5).unwrap();
        let m = match sample_wigner(&config) {
            HermitianMatrix::Real(a) => a,
            _ => unreachable!(),
        };
        let scale = (n as f64).sqrt();
        let mut sum = 0.0;
        for i in 0..n {
            for j in (i + 1)..n {
                let w = scale * m[(i, j)];
                sum += w * w;
            }
        }
        let count = (n * (n - 1) / 2) as f64;
        let bound = 3.0 * (2.0 / count).sqrt();
        assert!((sum / count - 1.0).abs() <= bound);
    }

    #[test]
    fn covariance_zero_population_gives_zero_matrix() {
        let h = AtomicDistribution::point_mass(0.0);
        let config =
            CovarianceConfig::new(8, 16, h, EntryLaw::GaussianReal, PopulationMode::Apportioned, 3)
                .unwrap();
        match sample_sample_covariance(&config) {
            HermitianMatrix::Real(b) => assert!(b.iter().all(|&x| x == 0.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn covariance_identity_population_matches_plain_gram() {
        let h = AtomicDistribution::point_mass(1.0);
        let config = CovarianceConfig::new(
            6,
            6,
            h,
            EntryLaw::GaussianReal,
            PopulationMode::Apportioned,
            17,
        )
        .unwrap();
        let b = match sample_sample_covariance(&config) {
            HermitianMatrix::Real(b) => b,
            _ => unreachable!(),
        };
        // Rebuild X X' / n from the same stream and compare bitwise.
        let mut sampler =
            EntrySampler::new(mix_seed(config.seed, 0, Stream::CovarianceEntries as u64));
        let mut x = Array2::zeros((6, 6));
        for i in 0..6 {
            for k in 0..6 {
                x[(i, k)] = sampler.draw_real(EntryLaw::GaussianReal);
            }
        }
        for i in 0..6 {
            for j in 0..=i {
                let expect = x.row(i).dot(&x.row(j)) / 6.0;
                assert_eq!(b[(i, j)].to_bits(), expect.to_bits());
            }
        }
    }

    #[test]
    fn covariance_is_nonnegative_definite() {
        let h: AtomicDistribution = "0.5:1.0,0.5:4.0".parse().unwrap();
        let config = CovarianceConfig::new(
            30,
            60,
            h,
            EntryLaw::GaussianReal,
            PopulationMode::Apportioned,
            2,
        )
        .unwrap();
        let m = sample_sample_covariance(&config);
        let spec = crate::spectra::eigenvalues_symmetric(&m).unwrap();
        let norm = m.frobenius_norm();
        assert!(spec.min().unwrap() >= -1e-10 * norm);
    }

    #[test]
    fn apportionment_largest_remainder() {
        let h: AtomicDistribution = "0.5:1.0,0.5:4.0".parse().unwrap();
        let tau = apportion_spectrum(&h, 5);
        assert_eq!(tau, vec![1.0, 1.0, 1.0, 4.0, 4.0]);

        let h2: AtomicDistribution = "0.2:0.0,0.3:1.0,0.5:2.0".parse().unwrap();
        let tau2 = apportion_spectrum(&h2, 10);
        assert_eq!(tau2.iter().filter(|&&t| t == 0.0).count(), 2);
        assert_eq!(tau2.iter().filter(|&&t| t == 1.0).count(), 3);
        assert_eq!(tau2.iter().filter(|&&t| t == 2.0).count(), 5);

        // remainder tie goes to the earlier atom
        let h3: AtomicDistribution = "0.25:1.0,0.25:2.0,0.5:3.0".parse().unwrap();
        let tau3 = apportion_spectrum(&h3, 6);
        assert_eq!(tau3, vec![1.0, 1.0, 2.0, 3.0, 3.0, 3.0]);
    }

    #[test]
    fn deformed_identity_population_equals_wigner_draw() {
        let h = AtomicDistribution::point_mass(1.0);
        let config = DeformedWignerConfig::new(
            20,
            h,
            EntryLaw::GaussianReal,
            1.0,
            PopulationMode::Apportioned,
            5,
        )
        .unwrap();
        let deformed = match sample_deformed_wigner(&config) {
            HermitianMatrix::Real(a) => a,
            _ => unreachable!(),
        };
        let wigner_cfg = WignerConfig::new(20, EntryLaw::GaussianReal, 1.0, 5).unwrap();
        let plain = match sample_wigner(&wigner_cfg) {
            HermitianMatrix::Real(a) => a,
            _ => unreachable!(),
        };
        assert!(deformed
            .iter()
            .zip(plain.iter())
            .all(|(a, b)| a.to_bits() == b.to_bits()));
    }

    #[test]
    fn deformed_zero_population_is_zero() {
        let h = AtomicDistribution::point_mass(0.0);
        let config = DeformedWignerConfig::new(
            12,
            h,
            EntryLaw::GaussianReal,
            1.0,
            PopulationMode::Apportioned,
            5,
        )
        .unwrap();
        match sample_deformed_wigner(&config) {
            HermitianMatrix::Real(a) => assert!(a.iter().all(|&x| x == 0.0)),
            _ => unreachable!(),
        }
    }

    #[test]
    fn spiked_requires_two_samples() {
        let config = SpikedConfig::new(vec![(2.0, 1)], Rotation::Identity, 1, 0).unwrap();
        assert!(matches!(
            sample_spiked(&config),
            Err(EnsembleError::InsufficientSample(1))
        ));
    }

    #[test]
    fn spiked_rejects_unordered_eigenvalues() {
        assert!(SpikedConfig::new(vec![(1.0, 1), (2.0, 1)], Rotation::Identity, 10, 0).is_err());
        assert!(SpikedConfig::new(vec![(1.0, 1), (1.0, 1)], Rotation::Identity, 10, 0).is_err());
    }

    #[test]
    fn spiked_rejects_non_orthogonal_rotation() {
        let v = array![[1.0, 0.0], [0.1, 1.0]];
        assert!(SpikedConfig::new(vec![(2.0, 1), (1.0, 1)], Rotation::Orthogonal(v), 10, 0).is_err());
    }

    #[test]
    fn spiked_identity_covariance_concentrates() {
        let config =
            SpikedConfig::new(vec![(1.0, 3)], Rotation::Identity, 20_000, 21).unwrap();
        let (s, sigma) = sample_spiked(&config).unwrap();
        // Entries of S - Sigma are O(sqrt(2/n)); allow 3 sigma.
        let bound = 3.0 * (2.0 / 20_000f64).sqrt();
        for i in 0..3 {
            for j in 0..3 {
                assert!((s[(i, j)] - sigma[(i, j)]).abs() <= bound);
            }
        }
    }

    #[test]
    fn wick_identity_fourth_moment() {
        let sigma = Array2::eye(2);
        assert_eq!(wick_covariance(&sigma, 0, 0, 0, 0).unwrap(), 2.0);
    }

    #[test]
    fn wick_diagonal_cross_term() {
        let sigma = array![[3.0, 0.0], [0.0, 5.0]];
        assert_eq!(wick_covariance(&sigma, 0, 1, 0, 1).unwrap(), 15.0);
    }

    #[test]
    fn wick_symmetric_in_pair_swap() {
        let sigma = array![[2.0, 0.7, 0.1], [0.7, 1.5, -0.2], [0.1, -0.2, 0.9]];
        for (i, j, s, t) in [(0, 1, 2, 0), (1, 1, 2, 2), (0, 2, 1, 2)] {
            assert_eq!(
                wick_covariance(&sigma, i, j, s, t).unwrap(),
                wick_covariance(&sigma, s, t, i, j).unwrap()
            );
        }
    }

    #[test]
    fn wick_rejects_out_of_range() {
        let sigma = Array2::eye(2);
        assert!(wick_covariance(&sigma, 0, 0, 0, 2).is_err());
    }

    #[test]
    fn mix_seed_distinct_replicates_never_collide() {
        let mut seen = std::collections::HashSet::new();
        for r in 0..10_000u64 {
            assert!(seen.insert(mix_seed(42, r, Stream::Replicate as u64)));
        }
    }
}
