//! Wigner matrices against the semicircle law: KS distances shrink as the
//! matrix grows.
//!
//! Run with: cargo run --release --example semicircle_law

use rmtk::ensembles::EntryLaw;
use rmtk::harness::{run_lsd_experiment, LsdEnsemble, LsdOptions};

fn main() {
    let ensemble = LsdEnsemble::Wigner {
        entry_law: EntryLaw::GaussianReal,
        diag_variance: 1.0,
    };
    let sizes = [100, 200, 400, 800];
    let report =
        run_lsd_experiment(&ensemble, &sizes, 5, 42, &LsdOptions::default()).unwrap();

    println!("mean KS distance of the ESD to the semicircle CDF (5 draws each):");
    for entry in &report.summary {
        if entry.statistic.starts_with("ks_mean_n") {
            println!(
                "  {:>10}  {:.5}  (se {:.5})",
                entry.statistic,
                entry.estimate,
                entry.std_error.unwrap_or(0.0)
            );
        }
    }
    for entry in &report.summary {
        if let Some(pass) = entry.pass {
            println!("  {:<26} -> {}", entry.statistic, if pass { "pass" } else { "FAIL" });
        }
    }
    eprintln!("({} ms)", report.wall_time.as_millis());
}
