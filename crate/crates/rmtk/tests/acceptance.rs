//! Acceptance suite: one test per criterion, each printing a PASS/FAIL line
//! (visible with `cargo test --test acceptance -- --nocapture`).
//!
//! Every tolerance is pinned here; the statistical criteria run at fixed
//! seeds so outcomes are reproducible.

use std::time::{Duration, Instant};

use num_complex::Complex64;

use rmtk::ensembles::{
    sample_deformed_wigner, DeformedWignerConfig, EntryLaw, PopulationMode, Rotation,
    SpikedConfig,
};
use rmtk::harness::{
    run_clt_experiment, run_lsd_experiment, run_spiked_experiment, CltOptions, LsdEnsemble,
    LsdOptions, SpikedOptions, SummaryEntry,
};
use rmtk::laws::{
    clt_cov_b, clt_mean_a, invert_stieltjes, invert_stieltjes_richardson, semicircle_stieltjes,
    solve_deformed_wigner, solve_silverstein, CltConstants, SolverSettings, UpperHalfPoint,
};
use rmtk::spectra::{eigenvalues_symmetric, stieltjes_of_spectrum, AtomicDistribution};
use rmtk::union_metric::{TaggedPoint, UnionSpace};

fn criterion(id: u32, name: &str, pass: bool, budget: Duration, elapsed: Duration, details: &str) {
    let in_budget = elapsed <= budget;
    let verdict = if pass && in_budget { "PASS" } else { "FAIL" };
    println!(
        "ACCEPTANCE {id} ({name}): {verdict} [{: >7.2?} of {:?} budget] {details}",
        elapsed, budget
    );
    assert!(pass, "criterion {id} ({name}) failed: {details}");
    assert!(
        in_budget,
        "criterion {id} ({name}) exceeded its runtime budget: {elapsed:?} > {budget:?}"
    );
}

fn summary_value<'a>(summary: &'a [SummaryEntry], statistic: &str) -> &'a SummaryEntry {
    summary
        .iter()
        .find(|s| s.statistic == statistic)
        .unwrap_or_else(|| panic!("missing summary entry {statistic}"))
}

fn uh(re: f64, im: f64) -> UpperHalfPoint {
    UpperHalfPoint::from_parts(re, im).unwrap()
}

const Z_GRID: [(f64, f64); 5] = [(0.0, 1.0), (0.0, 2.0), (1.0, 1.0), (-1.0, 1.0), (0.5, 0.5)];
const Y_GRID: [f64; 5] = [0.1, 0.25, 0.5, 1.0, 2.0];

#[test]
fn criterion_1_metric_axioms() {
    let start = Instant::now();
    let space = UnionSpace::euclidean(vec![3, 1, 4, 8, 5, 2]).unwrap();
    let report = space.metric_axiom_suite(1, 10_000).unwrap();
    let pass = report.max_symmetry_violation == 0.0
        && report.max_triangle_violation <= 1e-12
        && report.zero_distance_failures == 0;
    criterion(
        1,
        "metric axioms",
        pass,
        Duration::from_secs(5),
        start.elapsed(),
        &format!(
            "triples={} max_triangle={:e} max_symmetry={:e} zero_distance={}",
            report.triples,
            report.max_triangle_violation,
            report.max_symmetry_violation,
            report.zero_distance_failures
        ),
    );
}

#[test]
fn criterion_2_convergence_dichotomy() {
    let start = Instant::now();
    let mut pass = true;
    let mut notes = Vec::new();

    // (a) sequence inside one fixed space S_k, rho_k distance 1/n: delta
    // falls to zero and the space column is constant k.
    {
        let space = UnionSpace::euclidean(vec![2; 6]).unwrap();
        let k = 3;
        let limit = TaggedPoint::new(k, vec![0.4, 0.1]);
        let seq: Vec<TaggedPoint> = (1..=256)
            .map(|n| TaggedPoint::new(k, vec![0.4 + 1.0 / n as f64, 0.1]))
            .collect();
        let trace = space.convergence_trace(&seq, &limit).unwrap();
        let constant_space = trace.iter().all(|t| t.space_index == k);
        let vanishing = trace.last().unwrap().delta < 1e-2
            && trace.windows(2).all(|w| w[1].delta <= w[0].delta);
        // dichotomy threshold: delta below eps_k / 2 forces the space index
        let eps_k = space.epsilon(k);
        let settled = trace
            .iter()
            .filter(|t| t.delta < eps_k / 2.0)
            .all(|t| t.space_index == k);
        pass &= constant_space && vanishing && settled;
        notes.push(format!("fixed-space: final delta {:.2e}", trace.last().unwrap().delta));
    }

    // (b) x_n in S_n with phi_n(x_n) = x0 exactly: delta = eps_n -> 0 and
    // rho0 identically zero.
    {
        let count = 64;
        let space = UnionSpace::from_dim_rule(count, |n| if n == 0 { 2 } else { 3 }).unwrap();
        let limit = TaggedPoint::new(0, vec![0.7, -0.2]);
        let seq: Vec<TaggedPoint> = (1..count)
            .map(|n| TaggedPoint::new(n, vec![0.7, -0.2, n as f64]))
            .collect();
        let trace = space.convergence_trace(&seq, &limit).unwrap();
        let exact = trace.iter().enumerate().all(|(ix, t)| {
            t.rho0 == 0.0 && t.delta == 1.0 / (ix + 1) as f64 && t.space_index == ix + 1
        });
        pass &= exact;
        notes.push(format!("escape-to-base: delta = eps_n exactly ({})", exact));
    }

    // (c) indices bounded by N but the limit in S_0: delta is floored at
    // min_{k <= N} eps_k = eps_N for every element.
    {
        let cap = 5;
        let space = UnionSpace::euclidean(vec![2; 32]).unwrap();
        let limit = TaggedPoint::new(0, vec![0.0, 0.0]);
        let seq: Vec<TaggedPoint> = (1..=128)
            .map(|n| TaggedPoint::new(1 + (n % cap), vec![1.0 / n as f64, 0.0]))
            .collect();
        let trace = space.convergence_trace(&seq, &limit).unwrap();
        let floor = space.epsilon(cap);
        let floored = trace.iter().all(|t| t.delta >= floor);
        let images_converge = trace.last().unwrap().rho0 < 1e-2;
        pass &= floored && images_converge;
        notes.push(format!("bounded-index: floor eps_{cap} = {floor}"));
    }

    criterion(
        2,
        "convergence dichotomy",
        pass,
        Duration::from_secs(1),
        start.elapsed(),
        &notes.join("; "),
    );
}

#[test]
fn criterion_3_semicircle_law() {
    let start = Instant::now();
    let ensemble = LsdEnsemble::Wigner {
        entry_law: EntryLaw::GaussianReal,
        diag_variance: 1.0,
    };
    let report = run_lsd_experiment(&ensemble, &[200, 500, 1000], 10, 42, &LsdOptions::default())
        .unwrap();
    let means: Vec<f64> = [200, 500, 1000]
        .iter()
        .map(|n| summary_value(&report.summary, &format!("ks_mean_n{n}")).estimate)
        .collect();
    let strictly_decreasing = means.windows(2).all(|w| w[1] < w[0]);
    let final_ok = means[2] < 0.05;
    criterion(
        3,
        "semicircle law",
        strictly_decreasing && final_ok,
        Duration::from_secs(120),
        start.elapsed(),
        &format!("mean KS = {:.4}, {:.4}, {:.4} (bound 0.05)", means[0], means[1], means[2]),
    );
}

/// Closed-form Marchenko-Pastur density for H = delta_1 and aspect ratio y.
fn mp_density(x: f64, y: f64) -> f64 {
    let a = (1.0 - y.sqrt()).powi(2);
    let b = (1.0 + y.sqrt()).powi(2);
    if x <= a || x >= b {
        0.0
    } else {
        ((b - x) * (x - a)).sqrt() / (2.0 * std::f64::consts::PI * x * y)
    }
}

/// Quadratic-root oracle for the H = delta_1 self-consistent equation.
fn silverstein_quadratic_oracle(y: f64, z: Complex64) -> Complex64 {
    let a = y * z;
    let b = -(1.0 - y - z);
    let disc = (b * b - 4.0 * a).sqrt();
    let roots = [(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)];
    for m in roots {
        if (-(1.0 - y) / z + y * m).im > 0.0 {
            return m;
        }
    }
    unreachable!("one root lies in D_y on this grid")
}

#[test]
fn criterion_4_silverstein_equation() {
    let start = Instant::now();
    let settings = SolverSettings::default();
    let point_mass = AtomicDistribution::point_mass(1.0);
    let two_atoms: AtomicDistribution = "0.5:1.0,0.5:4.0".parse().unwrap();

    let mut worst_residual = 0.0_f64;
    let mut worst_oracle_gap = 0.0_f64;
    for &y in &Y_GRID {
        for &(re, im) in &Z_GRID {
            let z = uh(re, im);
            for h in [&point_mass, &two_atoms] {
                let sol = solve_silverstein(h, y, z, &settings).unwrap();
                worst_residual = worst_residual.max(sol.residual);
            }
            let sol = solve_silverstein(&point_mass, y, z, &settings).unwrap();
            let oracle = silverstein_quadratic_oracle(y, z.z());
            worst_oracle_gap = worst_oracle_gap.max((sol.value - oracle).norm());
        }
    }

    // Richardson-extrapolated density vs the closed form, y = 0.25, on the
    // central half of the support (the smoothing bias blows up like
    // v^2 rho'' toward the edges).
    let y = 0.25_f64;
    let (a, b) = ((1.0 - y.sqrt()).powi(2), (1.0 + y.sqrt()).powi(2));
    let margin = 0.25 * (b - a);
    let grid: Vec<f64> = (0..200)
        .map(|k| (a + margin) + (b - a - 2.0 * margin) * k as f64 / 199.0)
        .collect();
    let extrapolated = invert_stieltjes_richardson(
        |z| solve_silverstein(&point_mass, y, z, &settings).map(|s| s.value),
        &grid,
        1e-3,
    )
    .unwrap();
    let density_sup = grid
        .iter()
        .zip(&extrapolated)
        .map(|(&x, &d)| (d - mp_density(x, y)).abs())
        .fold(0.0_f64, f64::max);

    let pass = worst_residual <= 1e-12 && worst_oracle_gap <= 1e-10 && density_sup <= 1e-6;
    criterion(
        4,
        "Silverstein equation",
        pass,
        Duration::from_secs(10),
        start.elapsed(),
        &format!(
            "max residual {worst_residual:.2e}, max oracle gap {worst_oracle_gap:.2e}, \
             MP density sup-error {density_sup:.2e}"
        ),
    );
}

#[test]
fn criterion_5_deformed_wigner() {
    let start = Instant::now();
    let settings = SolverSettings::default();

    // H = delta_1 collapses the system onto the semicircle transform.
    let point_mass = AtomicDistribution::point_mass(1.0);
    let mut worst_gap = 0.0_f64;
    for &(re, im) in &Z_GRID {
        let z = uh(re, im);
        let sol = solve_deformed_wigner(&point_mass, z, &settings).unwrap();
        let s_sc = semicircle_stieltjes(z);
        worst_gap = worst_gap.max((sol.s - s_sc).norm()).max((sol.g - s_sc).norm());
    }

    // One n = 800 draw: the v-smoothed ESD density against the v-smoothed
    // solver density, compared through their CDFs on a common grid.
    let h: AtomicDistribution = "0.5:1.0,0.5:4.0".parse().unwrap();
    let config = DeformedWignerConfig::new(
        800,
        h.clone(),
        EntryLaw::GaussianReal,
        1.0,
        PopulationMode::Apportioned,
        2024,
    )
    .unwrap();
    let spec = eigenvalues_symmetric(&sample_deformed_wigner(&config)).unwrap();
    let v = 1e-3;
    let grid: Vec<f64> = {
        let half = 2.0 * h.max_location() + 1.0;
        (0..1500).map(|k| -half + 2.0 * half * k as f64 / 1499.0).collect()
    };
    let esd_density = invert_stieltjes(
        |z| stieltjes_of_spectrum(&spec, z.z()).map_err(|_| unreachable!()),
        &grid,
        v,
    )
    .unwrap();
    let solver_density =
        invert_stieltjes(|z| solve_deformed_wigner(&h, z, &settings).map(|s| s.s), &grid, v)
            .unwrap();
    let step = grid[1] - grid[0];
    let mut ks = 0.0_f64;
    let (mut f_esd, mut f_sol) = (0.0, 0.0);
    for k in 1..grid.len() {
        f_esd += 0.5 * (esd_density[k] + esd_density[k - 1]) * step;
        f_sol += 0.5 * (solver_density[k] + solver_density[k - 1]) * step;
        ks = ks.max((f_esd - f_sol).abs());
    }

    let pass = worst_gap <= 1e-10 && ks <= 0.08;
    criterion(
        5,
        "deformed Wigner",
        pass,
        Duration::from_secs(60),
        start.elapsed(),
        &format!("semicircle reduction gap {worst_gap:.2e}, smoothed-ESD KS {ks:.4} (bound 0.08)"),
    );
}

#[test]
fn criterion_6_spiked_fluctuations() {
    let start = Instant::now();
    let config = SpikedConfig::new(vec![(5.0, 1), (1.0, 2)], Rotation::Identity, 2000, 7).unwrap();
    let report = run_spiked_experiment(&config, 2000, 7, &SpikedOptions::default()).unwrap();

    // Var(sqrt(n)(l_1 - 5)) within +-15% of 2 lambda^2 = 50, asserted
    // against the analytic constant.
    let var_top = summary_value(&report.summary, "var_t1").estimate;
    let var_ok = (42.5..=57.5).contains(&var_top);
    let corr = summary_value(&report.summary, "max_cross_group_corr").estimate;
    let corr_ok = corr <= 0.10;

    criterion(
        6,
        "spiked fluctuations",
        var_ok && corr_ok && report.all_pass(),
        Duration::from_secs(180),
        start.elapsed(),
        &format!("Var(sqrt(n)(l1-5)) = {var_top:.2} in [42.5, 57.5], cross-group corr {corr:.3}"),
    );
}

// Values from the pre-build oracle script (40-digit arithmetic) for
// gaussian-real constants sigma2 = 1, kappa = 2, beta = 0.
const ORACLE_A_PRIME_2I: f64 = -0.013864087934248577;
const ORACLE_A_PRIME_1_5I: f64 = -0.0336;
const ORACLE_D2B_2I_2I: f64 = 0.0009765625;
const ORACLE_D2B_2I_1_5I: f64 = 0.003183386114308087;
const ORACLE_D2B_1_5I_1_5I: f64 = 0.00720896;

#[test]
fn criterion_7_clt_formulas() {
    let start = Instant::now();
    let real_constants = CltConstants::new(1.0, 2.0, 0.0).unwrap();

    // Symmetry of b and its mixed derivative, exact to the bit, on 100
    // seeded random pairs in the formula region.
    let mut symmetric = true;
    let mut state = 0x9E3779B97F4A7C15u64;
    let mut next_unit = || {
        state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
        (state >> 11) as f64 / (1u64 << 53) as f64
    };
    for _ in 0..100 {
        let z1 = uh(4.0 * next_unit() - 2.0, 0.5 + 2.0 * next_unit());
        let z2 = uh(4.0 * next_unit() - 2.0, 0.5 + 2.0 * next_unit());
        let (b12, d12) = clt_cov_b(z1, z2, &real_constants, 0.5).unwrap();
        let (b21, d21) = clt_cov_b(z2, z1, &real_constants, 0.5).unwrap();
        symmetric &= b12 == b21 && d12 == d21;
    }

    // sigma2 = 1, kappa = 1, beta = 0 collapses the mean function to zero.
    let complex_unit = CltConstants::new(1.0, 1.0, 0.0).unwrap();
    let mut zero_mean = true;
    for &(re, im) in &Z_GRID {
        if im < 0.5 {
            continue;
        }
        let (a, a_prime) = clt_mean_a(uh(re, im), &complex_unit, 0.5).unwrap();
        zero_mean &= a == Complex64::new(0.0, 0.0) && a_prime == Complex64::new(0.0, 0.0);
    }

    // The formula evaluators agree with the oracle constants.
    let (_, ap_2i) = clt_mean_a(uh(0.0, 2.0), &real_constants, 0.5).unwrap();
    let (_, ap_15i) = clt_mean_a(uh(0.0, 1.5), &real_constants, 0.5).unwrap();
    let (_, d2b_22) = clt_cov_b(uh(0.0, 2.0), uh(0.0, 2.0), &real_constants, 0.5).unwrap();
    let (_, d2b_215) = clt_cov_b(uh(0.0, 2.0), uh(0.0, 1.5), &real_constants, 0.5).unwrap();
    let (_, d2b_1515) = clt_cov_b(uh(0.0, 1.5), uh(0.0, 1.5), &real_constants, 0.5).unwrap();
    let oracle_ok = (ap_2i - Complex64::new(ORACLE_A_PRIME_2I, 0.0)).norm() <= 1e-6
        && (ap_15i - Complex64::new(ORACLE_A_PRIME_1_5I, 0.0)).norm() <= 1e-6
        && (d2b_22 - Complex64::new(ORACLE_D2B_2I_2I, 0.0)).norm() <= 1e-6
        && (d2b_215 - Complex64::new(ORACLE_D2B_2I_1_5I, 0.0)).norm() <= 1e-6
        && (d2b_1515 - Complex64::new(ORACLE_D2B_1_5I_1_5I, 0.0)).norm() <= 1e-6;

    // Monte Carlo: gaussian-real, n = 400, 800 replicates at z in {2i, 1.5i};
    // empirical mean and covariance within 3 SE of the oracle curves.
    let report = run_clt_experiment(
        400,
        800,
        &[uh(0.0, 2.0), uh(0.0, 1.5)],
        EntryLaw::GaussianReal,
        3,
        &CltOptions::default(),
    )
    .unwrap();
    let mc_ok = report.all_pass();

    let pass = symmetric && zero_mean && oracle_ok && mc_ok;
    criterion(
        7,
        "CLT formulas",
        pass,
        Duration::from_secs(600),
        start.elapsed(),
        &format!(
            "bitwise symmetry {symmetric}, zero-mean collapse {zero_mean}, \
             oracle match {oracle_ok}, MC within 3 SE {mc_ok}"
        ),
    );
}

#[test]
fn criterion_8_cli_determinism() {
    let start = Instant::now();
    let bin = env!("CARGO_BIN_EXE_rmtk");
    let run = |args: &[&str]| {
        let out = std::process::Command::new(bin)
            .args(args)
            .env_remove("RMTK_SEED")
            .output()
            .expect("binary runs");
        assert!(
            out.status.success(),
            "rmtk {args:?} failed: {}",
            String::from_utf8_lossy(&out.stderr)
        );
        out.stdout
    };

    let mut pass = true;
    let mut notes = Vec::new();
    let cases: Vec<Vec<&str>> = vec![
        vec!["metric-check", "--samples", "2000", "--seed", "9"],
        vec!["solve", "--law", "silverstein", "--h", "1.0:1.0", "--y", "0.5", "--z", "0+1i"],
        vec![
            "lsd", "--ensemble", "wigner", "--sizes", "50,100", "--reps", "4", "--seed", "42",
        ],
        // statistical bands widened: this criterion judges byte-identity,
        // not the small-sample estimates
        vec![
            "spiked", "--spikes", "4:1,1:1", "--n", "300", "--reps", "120", "--seed", "5",
            "--block-draws", "20000", "--variance-band", "0.9", "--corr-max", "0.9",
            "--ks-max", "0.9",
        ],
        vec![
            "clt", "--n", "60", "--reps", "200", "--z", "0+2i", "--seed", "8", "--se-multiple",
            "12",
        ],
    ];
    for case in &cases {
        // repeat run: byte identical
        let first = run(case);
        let second = run(case);
        let repeat_ok = first == second;
        // serial vs parallel execution: byte identical
        let mut serial = case.clone();
        serial.extend(["--threads", "1"]);
        let mut parallel = case.clone();
        parallel.extend(["--threads", "2"]);
        let threads_ok = if case[0] == "metric-check" || case[0] == "solve" {
            true // single-shot commands have no thread knob
        } else {
            run(&serial) == run(&parallel)
        };
        pass &= repeat_ok && threads_ok;
        notes.push(format!(
            "{}: repeat {} serial-vs-parallel {}",
            case[0], repeat_ok, threads_ok
        ));
    }

    criterion(
        8,
        "CLI determinism",
        pass,
        Duration::from_secs(600),
        start.elapsed(),
        &notes.join("; "),
    );
}
