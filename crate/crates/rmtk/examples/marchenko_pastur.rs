//! The sample-covariance limit law: solve the self-consistent equation,
//! invert it to a density, and compare with the closed Marchenko–Pastur
//! form and with an actual matrix draw.
//!
//! Run with: cargo run --release --example marchenko_pastur

use rmtk::ensembles::{sample_sample_covariance, CovarianceConfig, EntryLaw, PopulationMode};
use rmtk::laws::{invert_stieltjes_richardson, solve_silverstein, SolverSettings, UpperHalfPoint};
use rmtk::spectra::{eigenvalues_symmetric, AtomicDistribution};

fn main() {
    let y = 0.25;
    let h = AtomicDistribution::point_mass(1.0);
    let settings = SolverSettings::default();
    let (a, b) = ((1.0 - f64::sqrt(y)).powi(2), (1.0 + f64::sqrt(y)).powi(2));

    println!("Marchenko–Pastur, y = {y}: support [{a}, {b}]");
    println!("{:>6} {:>12} {:>12}", "x", "solver", "closed form");
    let grid: Vec<f64> = (1..=9).map(|k| a + (b - a) * k as f64 / 10.0).collect();
    let density = invert_stieltjes_richardson(
        |z| solve_silverstein(&h, y, z, &settings).map(|s| s.value),
        &grid,
        1e-3,
    )
    .unwrap();
    for (&x, &d) in grid.iter().zip(&density) {
        let closed = ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * x * y);
        println!("{x:>6.3} {d:>12.8} {closed:>12.8}");
    }

    // One draw at p = 250, n = 1000 and its extreme eigenvalues.
    let config = CovarianceConfig::new(
        250,
        1000,
        h.clone(),
        EntryLaw::GaussianReal,
        PopulationMode::Apportioned,
        7,
    )
    .unwrap();
    let spec = eigenvalues_symmetric(&sample_sample_covariance(&config)).unwrap();
    println!(
        "\none draw (p=250, n=1000): eigenvalues in [{:.4}, {:.4}]",
        spec.min().unwrap(),
        spec.max().unwrap()
    );
    let z = UpperHalfPoint::from_parts(1.0, 1e-3).unwrap();
    let m = solve_silverstein(&h, y, z, &settings).unwrap();
    println!(
        "transform at 1 + 0.001i: m = {:.6}+{:.6}i (residual {:.1e}, {} evals)",
        m.value.re, m.value.im, m.residual, m.iterations
    );
}
