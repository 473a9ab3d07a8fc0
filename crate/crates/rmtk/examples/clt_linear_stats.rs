//! CLT for derivative linear spectral statistics of Wigner matrices: the
//! centered, n-scaled derivative of the empirical Stieltjes transform
//! fluctuates around a'(z) with covariance d^2 b / dz1 dz2.
//!
//! Run with: cargo run --release --example clt_linear_stats

use rmtk::ensembles::EntryLaw;
use rmtk::harness::{run_clt_experiment, CltOptions};
use rmtk::laws::{clt_cov_b, clt_mean_a, CltConstants, UpperHalfPoint, DEFAULT_CSC_V0};

fn main() {
    let c = CltConstants::for_entry_law(EntryLaw::GaussianReal, 1.0);
    let z1 = UpperHalfPoint::from_parts(0.0, 2.0).unwrap();
    let z2 = UpperHalfPoint::from_parts(0.0, 1.5).unwrap();
    let (a1, ap1) = clt_mean_a(z1, &c, DEFAULT_CSC_V0).unwrap();
    let (b12, d2b12) = clt_cov_b(z1, z2, &c, DEFAULT_CSC_V0).unwrap();
    println!("gaussian-real constants: sigma2 = {}, kappa = {}, beta = {}", c.sigma2, c.kappa, c.beta);
    println!("a(2i)        = {:.10}+{:.10}i", a1.re, a1.im);
    println!("a'(2i)       = {:.10}+{:.10}i", ap1.re, ap1.im);
    println!("b(2i,1.5i)   = {:.10}+{:.10}i", b12.re, b12.im);
    println!("d2b(2i,1.5i) = {:.10}+{:.10}i", d2b12.re, d2b12.im);

    // A modest Monte Carlo run; the acceptance suite runs the full-scale one.
    let report = run_clt_experiment(
        200,
        400,
        &[z1, z2],
        EntryLaw::GaussianReal,
        3,
        &CltOptions::default(),
    )
    .unwrap();
    println!("\nn = 200, 400 replicates:");
    println!(
        "{:<22} {:>12} {:>12} {:>10} {:>8}",
        "stat", "empirical", "theory", "se", "verdict"
    );
    for entry in &report.summary {
        if entry.statistic.starts_with("mean_") || entry.statistic.starts_with("cov_") {
            println!(
                "{:<22} {:>12.6} {:>12.6} {:>10.6} {:>8}",
                entry.statistic,
                entry.estimate,
                entry.theory.unwrap_or(f64::NAN),
                entry.std_error.unwrap_or(f64::NAN),
                if entry.pass == Some(true) { "pass" } else { "FAIL" }
            );
        }
    }
    eprintln!("({} ms)", report.wall_time.as_millis());
}
