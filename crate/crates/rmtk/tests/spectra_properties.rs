//! Property tests for the spectral CDF machinery: monotone CDFs and metric
//! behavior of the exact KS distance on step functions.

use proptest::prelude::*;

use rmtk::spectra::{ks_distance, Cdf, EmpiricalSpectrum};

fn spectrum() -> impl Strategy<Value = EmpiricalSpectrum> {
    prop::collection::vec(-5.0f64..5.0, 1..40)
        .prop_map(|v| EmpiricalSpectrum::new(v).unwrap())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn esd_cdf_is_monotone_with_unit_mass(spec in spectrum(), xs in prop::collection::vec(-6.0f64..6.0, 2..10)) {
        let mut sorted = xs.clone();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
        for w in sorted.windows(2) {
            prop_assert!(spec.eval(w[0]) <= spec.eval(w[1]));
        }
        prop_assert_eq!(spec.eval(spec.max().unwrap()), 1.0);
        prop_assert_eq!(spec.eval(spec.min().unwrap() - 1e-9), 0.0);
        // right-continuity at jumps: eval at the point includes its mass
        for &lambda in spec.eigenvalues() {
            prop_assert!(spec.eval(lambda) > spec.eval_left(lambda) - 1e-15);
        }
    }

    #[test]
    fn ks_is_a_metric_on_step_cdfs(f in spectrum(), g in spectrum(), h in spectrum()) {
        let fg = ks_distance(&f, &g);
        let gf = ks_distance(&g, &f);
        prop_assert_eq!(fg.to_bits(), gf.to_bits());

        prop_assert_eq!(ks_distance(&f, &f), 0.0);

        let fh = ks_distance(&f, &h);
        let gh = ks_distance(&g, &h);
        prop_assert!(fh <= fg + gh + 1e-15, "KS triangle: {fh} > {fg} + {gh}");

        prop_assert!((0.0..=1.0).contains(&fg));
    }
}
