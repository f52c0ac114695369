//! Check selection, config overrides, and the `verify all` worker pool.
//!
//! A check name maps to one core check function; the optional JSON config
//! supplies overrides (each check accepts exactly the keys its config
//! understands), and `--tol` replaces the headline tolerance. `all` runs
//! every check once, optionally across `DENSLAB_THREADS` workers, and
//! always prints reports in the fixed declaration order so output bytes
//! do not depend on scheduling.

use std::fs;
use std::sync::atomic::{AtomicUsize, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use denslab_core::verify::{
    check_conjugacy, check_conservation, check_correspondence, check_kahler, CheckReport,
    ConjugacyConfig, ConservationConfig, CorrespondenceConfig, CorrespondenceKind, KahlerConfig,
};

use crate::config::VerifyConfig;
use crate::diag::{CliResult, Diagnostic};
use crate::sim::{audit_manifest, read_manifest};

/// Default drift bound for manifest audits: the exact-invariant level.
const AUDIT_BOUND: f64 = 1e-12;

/// One runnable check.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Check {
    Kahler,
    Conjugacy,
    Correspondence(CorrespondenceKind),
    Conservation,
}

impl Check {
    /// Fixed execution and rendering order of `verify all`.
    pub const ALL: [Check; 9] = [
        Check::Kahler,
        Check::Conjugacy,
        Check::Correspondence(CorrespondenceKind::NeumannFisher),
        Check::Correspondence(CorrespondenceKind::HasimotoNls),
        Check::Correspondence(CorrespondenceKind::TwohsSasaki),
        Check::Correspondence(CorrespondenceKind::MuchHorizontal),
        Check::Correspondence(CorrespondenceKind::HamiltonJacobi),
        Check::Correspondence(CorrespondenceKind::FrGeodesic),
        Check::Conservation,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Check::Kahler => "kahler",
            Check::Conjugacy => "conjugacy",
            Check::Correspondence(kind) => kind.name(),
            Check::Conservation => "conservation",
        }
    }

    /// Config keys this check understands.
    fn accepted_keys(self) -> &'static [&'static str] {
        match self {
            Check::Kahler => &["n", "seed", "tuples", "fault_scale", "tolerance"],
            Check::Conjugacy => &["profile", "fault_scale", "tolerance"],
            Check::Correspondence(_) => &["n", "fault_scale", "tolerance"],
            Check::Conservation => &["n", "dt_scale", "tolerance", "manifest", "bound"],
        }
    }
}

/// What one `verify <name>` invocation runs.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckSelection {
    One(Check),
    All,
}

/// Resolve a command-line check name.
pub fn parse_check(name: &str) -> CliResult<CheckSelection> {
    if name == "all" {
        return Ok(CheckSelection::All);
    }
    let check = match name {
        "kahler" => Check::Kahler,
        "conjugacy" => Check::Conjugacy,
        "conservation" => Check::Conservation,
        other => match CorrespondenceKind::from_name(other) {
            Some(kind) => Check::Correspondence(kind),
            None => {
                let names: Vec<&str> = CheckSelection::names().to_vec();
                return Err(Diagnostic::new(format!(
                    "unknown check '{other}'; expected one of {}",
                    names.join(", ")
                )));
            }
        },
    };
    Ok(CheckSelection::One(check))
}

impl CheckSelection {
    /// Every accepted check name, `all` last.
    pub fn names() -> [&'static str; 10] {
        [
            "kahler",
            "conjugacy",
            "neumann-fisher",
            "hasimoto-nls",
            "twohs-sasaki",
            "much-horizontal",
            "hamilton-jacobi",
            "fr-geodesic",
            "conservation",
            "all",
        ]
    }
}

fn reject_foreign_keys(check: Check, cfg: &VerifyConfig) -> CliResult<()> {
    for key in cfg.set_keys() {
        if !check.accepted_keys().contains(&key) {
            return Err(Diagnostic::new(format!(
                "config key '{key}' does not apply to check '{}'",
                check.name()
            )));
        }
    }
    Ok(())
}

/// Replace every finite positive tolerance and recompute the verdict;
/// structural zero tolerances and informational metrics are untouched.
fn override_bounds(report: &mut CheckReport, tol: f64) {
    for metric in &mut report.metrics {
        if metric.tolerance.is_finite() && metric.tolerance > 0.0 {
            metric.tolerance = tol;
        }
    }
    report.passed = report.metrics.iter().all(|m| m.passed());
}

/// Run one check with overrides applied. `tol` takes precedence over the
/// config's `tolerance` key.
pub fn run_check(check: Check, cfg: &VerifyConfig, tol: Option<f64>) -> CliResult<CheckReport> {
    reject_foreign_keys(check, cfg)?;
    let tolerance = tol.or(cfg.tolerance);
    match check {
        Check::Kahler => {
            let mut kc = KahlerConfig::default();
            if let Some(n) = cfg.n {
                kc.n = n;
            }
            if let Some(seed) = cfg.seed {
                kc.seed = seed;
            }
            if let Some(tuples) = cfg.tuples {
                kc.tuples = tuples;
            }
            if let Some(fault) = cfg.fault_scale {
                kc.fault_scale = fault;
            }
            if let Some(t) = tolerance {
                kc.tolerance = t;
            }
            Ok(check_kahler(&kc))
        }
        Check::Conjugacy => {
            let mut cc = match cfg.profile.as_deref() {
                None | Some("standard") => ConjugacyConfig::standard(),
                Some("cubic") => ConjugacyConfig::cubic_nls(),
                Some("stationary") => ConjugacyConfig::stationary(),
                Some("quick") => ConjugacyConfig::quick(),
                Some(other) => {
                    return Err(Diagnostic::new(format!(
                        "unknown conjugacy profile '{other}'; expected standard, cubic, stationary or quick"
                    )))
                }
            };
            if let Some(fault) = cfg.fault_scale {
                cc.fault_scale = fault;
            }
            if let Some(t) = tolerance {
                cc.final_tolerance = t;
            }
            Ok(check_conjugacy(&cc))
        }
        Check::Correspondence(kind) => {
            let mut cc = CorrespondenceConfig::for_kind(kind);
            if let Some(n) = cfg.n {
                cc.n = n;
            }
            if let Some(fault) = cfg.fault_scale {
                cc.fault_scale = fault;
            }
            if let Some(t) = tolerance {
                cc.residual_tolerance = t;
            }
            Ok(check_correspondence(&cc))
        }
        Check::Conservation => {
            if let Some(path) = &cfg.manifest {
                let text = fs::read_to_string(path)
                    .map_err(|e| Diagnostic::in_context(format!("cannot read {path}"), e))?;
                let manifest = read_manifest(&text)?;
                let bound = tolerance.or(cfg.bound).unwrap_or(AUDIT_BOUND);
                return audit_manifest(&manifest, bound);
            }
            if cfg.bound.is_some() {
                return Err(Diagnostic::new(
                    "config key 'bound' requires 'manifest'; use tolerance for the built-in suite",
                ));
            }
            let mut sc = ConservationConfig::default();
            if let Some(n) = cfg.n {
                sc.n = n;
            }
            if let Some(scale) = cfg.dt_scale {
                sc.dt_scale = scale;
            }
            let mut report = check_conservation(&sc);
            if let Some(t) = tolerance {
                override_bounds(&mut report, t);
            }
            Ok(report)
        }
    }
}

/// Worker-thread count from `DENSLAB_THREADS`; unset means 1.
pub fn thread_count() -> CliResult<usize> {
    match std::env::var("DENSLAB_THREADS") {
        Err(std::env::VarError::NotPresent) => Ok(1),
        Err(std::env::VarError::NotUnicode(_)) => {
            Err(Diagnostic::new("DENSLAB_THREADS is not valid unicode"))
        }
        Ok(text) => text
            .trim()
            .parse::<usize>()
            .ok()
            .filter(|&k| k >= 1)
            .ok_or_else(|| {
                Diagnostic::new(format!(
                    "DENSLAB_THREADS must be a positive integer, got '{text}'"
                ))
            }),
    }
}

type Slot = Mutex<Option<CliResult<(CheckReport, f64)>>>;

/// Run every check of [`Check::ALL`] once and return `(report, runtime)`
/// in declaration order, regardless of how many workers executed them.
pub fn run_all(cfg: &VerifyConfig, tol: Option<f64>) -> CliResult<Vec<(CheckReport, f64)>> {
    for key in cfg.set_keys() {
        if key != "tolerance" {
            return Err(Diagnostic::new(format!(
                "config key '{key}' does not apply to 'verify all'"
            )));
        }
    }
    let workers = thread_count()?.min(Check::ALL.len());
    let next = AtomicUsize::new(0);
    let slots: Vec<Slot> = Check::ALL.iter().map(|_| Mutex::new(None)).collect();
    std::thread::scope(|scope| {
        for _ in 0..workers {
            scope.spawn(|| loop {
                let i = next.fetch_add(1, Ordering::SeqCst);
                let Some(check) = Check::ALL.get(i) else {
                    break;
                };
                let start = Instant::now();
                let outcome = run_check(*check, cfg, tol)
                    .map(|report| (report, start.elapsed().as_secs_f64()));
                *slots[i].lock().expect("no panics while holding the slot") = Some(outcome);
            });
        }
    });
    let mut results = Vec::with_capacity(slots.len());
    for slot in slots {
        let outcome = slot
            .into_inner()
            .expect("worker scope has ended")
            .expect("every index was claimed by a worker");
        results.push(outcome?);
    }
    Ok(results)
}
