//! Release gate for the laboratory: eleven numbered end-to-end checks,
//! each printing one `ACCEPTANCE <k>: PASS/FAIL` line (visible under
//! `--nocapture`) before asserting its verdict. Every bound is pinned in
//! this file, and where a check's built-in configuration must match the
//! advertised one (grid size, horizons, dt ladders) that is asserted too,
//! so a drifting library default cannot silently change the gate.

use std::fs;
use std::process::Command;

use denslab_core::verify::{
    check_conjugacy, check_conservation, check_correspondence, check_kahler, CheckReport,
    ConjugacyConfig, ConservationConfig, Conventions, CorrespondenceConfig, CorrespondenceKind,
    KahlerConfig, Metric,
};

fn verdict(k: usize, ok: bool, what: &str, reports: &[&CheckReport]) {
    let word = if ok { "PASS" } else { "FAIL" };
    println!("ACCEPTANCE {k:2}: {word} — {what}");
    if !ok {
        for report in reports {
            eprintln!("{}", report.render());
        }
    }
    assert!(ok, "acceptance {k} failed: {what}");
}

fn metric<'r>(report: &'r CheckReport, label: &str) -> &'r Metric {
    report
        .metrics
        .iter()
        .find(|m| m.label == label)
        .unwrap_or_else(|| panic!("metric '{label}' missing from:\n{}", report.render()))
}

fn value(report: &CheckReport, label: &str) -> f64 {
    metric(report, label).value
}

#[test]
fn a01_wave_map_is_an_isometry_and_faults_are_caught() {
    let tol = 1e-11;
    let cfg = KahlerConfig::default();
    assert_eq!((cfg.n, cfg.tuples), (64, 100));
    let honest = check_kahler(&cfg);
    let faulted = check_kahler(&KahlerConfig {
        fault_scale: 1.01,
        ..KahlerConfig::default()
    });
    let label = "isometry max rel discrepancy";
    let ok = value(&honest, label) <= tol && value(&faulted, label) > tol;
    verdict(
        1,
        ok,
        "metric pullback agrees to 1e-11 on 100 random tuples; a 1% fault fails",
        &[&honest, &faulted],
    );
}

#[test]
fn a02_symplectic_pullback_carries_the_quarter_factor() {
    let tol = 1e-11;
    let quarter = Conventions::recorded().symplectic_factor;
    let honest = check_kahler(&KahlerConfig::default());
    let ok = quarter == 0.25 && value(&honest, "symplectic max rel discrepancy") <= tol;
    verdict(
        2,
        ok,
        "pulled-back symplectic pairing equals 1/4 of the canonical one to 1e-11",
        &[&honest],
    );
}

#[test]
fn a03_hydrodynamic_and_wave_integrations_stay_conjugate() {
    let final_tol = 5e-6;
    let window = (3.5, 4.5);
    let cfg = ConjugacyConfig::standard();
    assert_eq!((cfg.n, cfg.t_final), (128, 0.25));
    assert_eq!(cfg.dt_levels, vec![4e-4, 2e-4, 1e-4]);
    let report = check_conjugacy(&cfg);
    let coarse = value(&report, "aligned sup gap (dt=4e-4)");
    let mid = value(&report, "aligned sup gap (dt=2e-4)");
    let fine = value(&report, "aligned sup gap (dt=1e-4)");
    let ratios_ok = [coarse / mid, mid / fine]
        .iter()
        .all(|r| (window.0..=window.1).contains(r));
    let ok = ratios_ok && fine < final_tol && report.passed;
    verdict(
        3,
        ok,
        "lifted-pair gap shrinks ~4x per dt halving and ends below 5e-6",
        &[&report],
    );
}

#[test]
fn a04_density_geodesics_live_on_the_sphere() {
    let distance_tol = 1e-12;
    let residual_tol = 1e-8;
    let cfg = CorrespondenceConfig::for_kind(CorrespondenceKind::FrGeodesic);
    assert_eq!(cfg.n, 64);
    let report = check_correspondence(&cfg);
    let ok = value(&report, "distance vs arccos of affinity") <= distance_tol
        && value(&report, "newton residual (h=2.5e-2) sup") <= residual_tol
        && value(&report, "newton residual (h=2.5e-2) l2") <= residual_tol
        && report.passed;
    verdict(
        4,
        ok,
        "geodesic distance matches the sphere formula to 1e-12; force-law residual below 1e-8",
        &[&report],
    );
}

#[test]
fn a05_sphere_oscillator_matches_the_quantum_density_flow() {
    let multiplier_tol = 1e-12;
    let residual_tol = 1e-6;
    // a fourth-order stencil residual drops ~16x per halving
    let window = (12.0, 20.0);
    let report = check_correspondence(&CorrespondenceConfig::for_kind(
        CorrespondenceKind::NeumannFisher,
    ));
    let ratio = value(&report, "chart residual (h=1e-2) sup")
        / value(&report, "chart residual (h=5e-3) sup");
    let ok = value(&report, "stationary multiplier offset") <= multiplier_tol
        && value(&report, "chart residual (h=5e-3) sup") <= residual_tol
        && (window.0..=window.1).contains(&ratio)
        && report.passed;
    verdict(
        5,
        ok,
        "eigenmode multiplier hits -9 to 1e-12; oscillating residual below 1e-6 at 4th order",
        &[&report],
    );
}

#[test]
fn a06_filament_flow_transforms_to_the_cubic_wave_equation() {
    let modulus_tol = 1e-8;
    let phase_tol = 1e-6;
    let min_order_ratio = 4.0; // halving a residual of order >= 2
    let report = check_correspondence(&CorrespondenceConfig::for_kind(
        CorrespondenceKind::HasimotoNls,
    ));
    let ratio = value(&report, "nls residual (h=2.5e-1) sup")
        / value(&report, "nls residual (h=1.25e-1) sup");
    let ok = value(&report, "circle transform modulus drift") <= modulus_tol
        && ratio >= min_order_ratio
        && value(&report, "plane-wave phase rate offset") <= phase_tol
        && report.passed;
    verdict(
        6,
        ok,
        "circle transform keeps |psi| to 1e-8, converges at order >= 2, phase rate 1/2 to 1e-6",
        &[&report],
    );
}

#[test]
fn a07_projective_circles_solve_the_two_component_system() {
    let residual_tol = 1e-6;
    let sigma_tol = 1e-10;
    let cfg = CorrespondenceConfig::for_kind(CorrespondenceKind::TwohsSasaki);
    assert_eq!(cfg.n, 128);
    let report = check_correspondence(&cfg);
    let ok = value(&report, "slope law residual (h=1.25e-2) sup") <= residual_tol
        && value(&report, "density law residual (h=1.25e-2) sup") <= residual_tol
        && value(&report, "real-tangent sigma stays zero") <= sigma_tol
        && report.passed;
    verdict(
        7,
        ok,
        "pulled-back circles satisfy both evolution laws below 1e-6; sigma=0 data stays below 1e-10",
        &[&report],
    );
}

#[test]
fn a08_horizontal_lifts_have_zero_mean_and_obey_transport() {
    let mean_tol = 1e-10;
    let residual_tol = 1e-6;
    let report = check_correspondence(&CorrespondenceConfig::for_kind(
        CorrespondenceKind::MuchHorizontal,
    ));
    let ok = value(&report, "mean lifted velocity") <= mean_tol
        && value(&report, "transport residual (h=1e-2) sup") <= residual_tol
        && value(&report, "transport residual (h=1e-2) l2") <= residual_tol
        && report.passed;
    verdict(
        8,
        ok,
        "lifted velocity mean stays below 1e-10 and the transport residual below 1e-6",
        &[&report],
    );
}

#[test]
fn a09_characteristics_obey_newtons_second_law() {
    let residual_tol = 1e-5;
    // a second-order residual drops ~4x per halving; the window tolerates
    // pre-asymptotic wobble on either side
    let window = (2.5, 6.0);
    let report = check_correspondence(&CorrespondenceConfig::for_kind(
        CorrespondenceKind::HamiltonJacobi,
    ));
    let ratio = value(&report, "characteristic residual (dt=2e-3) sup")
        / value(&report, "characteristic residual (dt=1e-3) sup");
    let ok = value(&report, "characteristic residual (dt=1e-3) sup") <= residual_tol
        && (window.0..=window.1).contains(&ratio)
        && report.passed;
    verdict(
        9,
        ok,
        "traced characteristics satisfy x'' = -V'(x) below 1e-5 with 2nd-order improvement",
        &[&report],
    );
}

#[test]
fn a10_integrators_conserve_their_invariants() {
    let drift_tol = 1e-12;
    let cfg = ConservationConfig::default();
    assert_eq!(cfg.n, 64);
    let report = check_conservation(&cfg);
    // excess 0 means the coarse/fine drift ratio sits inside [12, 20]
    let ok = value(&report, "plane-wave norm drift") <= drift_tol
        && value(&report, "hydro mass drift") <= drift_tol
        && value(&report, "barotropic mass drift") <= drift_tol
        && value(&report, "hamiltonian halving ratio excess") == 0.0
        && report.passed;
    verdict(
        10,
        ok,
        "norm and mass drift below 1e-12 over long runs; energy drift ratio inside [12, 20]",
        &[&report],
    );
}

#[test]
fn a11_repeated_runs_are_byte_identical() {
    let binary = env!("CARGO_BIN_EXE_denslab");
    let spawn = |args: &[&str]| {
        Command::new(binary)
            .args(args)
            .env_remove("DENSLAB_THREADS")
            .output()
            .expect("binary runs")
    };

    let first = spawn(&["verify", "kahler"]);
    let second = spawn(&["verify", "kahler"]);
    let verify_ok = first.status.code() == Some(0)
        && second.status.code() == Some(0)
        && !first.stdout.is_empty()
        && first.stdout == second.stdout;

    let dir = tempfile::tempdir().unwrap();
    let cfg = dir.path().join("run.json");
    fs::write(
        &cfg,
        r#"{"equation": "schrodinger", "n": 32, "dt": 1e-3, "t_final": 0.1,
            "save_every": 20, "seed": 7,
            "initial": {"psi_re": "cos(x)", "psi_im": "sin(x)"},
            "potential": "cos(x)"}"#,
    )
    .unwrap();
    let dirs = [dir.path().join("a"), dir.path().join("b")];
    for out_dir in &dirs {
        let out = spawn(&[
            "simulate",
            "schrodinger",
            "--config",
            cfg.to_str().unwrap(),
            "--out-dir",
            out_dir.to_str().unwrap(),
        ]);
        assert_eq!(out.status.code(), Some(0), "{:?}", out);
    }
    let files_ok = ["manifest.json", "psi.csv"].iter().all(|name| {
        let a = fs::read(dirs[0].join(name)).expect("first run output");
        let b = fs::read(dirs[1].join(name)).expect("second run output");
        !a.is_empty() && a == b
    });

    verdict(
        11,
        verify_ok && files_ok,
        "verify reports and simulation outputs reproduce byte for byte",
        &[],
    );
}
