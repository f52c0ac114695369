//! Simulation orchestration: one [`RunConfig`] in, one directory of CSV
//! tables plus a `manifest.json` out.
//!
//! Snapshots are taken at `t = 0` and after every `save_every` steps until
//! the last multiple of `dt·save_every` not beyond `t_final`, so every
//! table carries exactly [`RunConfig::snapshot_count`] rows. Alongside the
//! fields, each snapshot records the flow's conserved quantities; the
//! manifest embeds those series, the exact config, the code version, and
//! the convention table, making a run directory self-describing.

use std::collections::BTreeMap;
use std::fs;
use std::path::Path;

use denslab_core::densities::{DensityField, Nonlinearity, PotentialSpec};
use denslab_core::filament::{step_filament, FilamentCurve};
use denslab_core::grid::ComplexField;
use denslab_core::madelung::{CotangentPoint, WaveFunction};
use denslab_core::solvers::{
    hydro_hamiltonian, schrodinger_hamiltonian, step_2hs, step_barotropic, step_hydro, step_much,
    step_neumann, step_schrodinger, BarotropicState, HydroState, NeumannState, TwoHSState,
};
use denslab_core::verify::{conservation_report, CheckReport, Conventions, DriftSeries};
use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use crate::config::{EnergyLawConfig, Equation, PreparedRun, RunConfig};
use crate::diag::{CliResult, Diagnostic};
use crate::format::{fmt_float, render_complex_table, render_real_table};

/// The sign/factor table embedded in every manifest.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ConventionTable {
    pub schrodinger_coupling: f64,
    pub symplectic_factor: f64,
    pub transport_sign: f64,
    pub neumann_quantum: f64,
}

impl ConventionTable {
    pub fn recorded() -> ConventionTable {
        let c = Conventions::recorded();
        ConventionTable {
            schrodinger_coupling: c.schrodinger_coupling,
            symplectic_factor: c.symplectic_factor,
            transport_sign: c.transport_sign,
            neumann_quantum: c.neumann_quantum,
        }
    }
}

/// Everything a finished run leaves behind besides the field tables.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub config: RunConfig,
    pub version: String,
    pub conventions: ConventionTable,
    pub snapshot_count: u64,
    /// Snapshot times, `step·dt` exactly.
    pub times: Vec<f64>,
    /// Conserved-quantity series, one value per snapshot.
    pub conserved: BTreeMap<String, Vec<f64>>,
    /// CSV files of this run, in field order.
    pub files: Vec<String>,
}

/// Snapshot rows of one output field.
pub enum FieldData {
    Real(Vec<(f64, Vec<f64>)>),
    Complex(Vec<(f64, Vec<Complex64>)>),
}

pub struct FieldFile {
    pub name: &'static str,
    pub data: FieldData,
}

/// Run the configured flow and write `<field>.csv` per field plus
/// `manifest.json` into `out_dir` (created if missing).
pub fn run_simulation(cfg: &RunConfig, out_dir: &Path) -> CliResult<RunManifest> {
    let prepared = cfg.prepare()?;
    let (files, conserved, times) = run_equation(cfg, &prepared)?;
    check_finite(&files, &conserved, &times)?;
    fs::create_dir_all(out_dir)
        .map_err(|e| Diagnostic::in_context(format!("cannot create {}", out_dir.display()), e))?;
    let nodes = prepared.grid.nodes();
    let mut file_names = Vec::new();
    for file in &files {
        let name = format!("{}.csv", file.name);
        let text = match &file.data {
            FieldData::Real(rows) => render_real_table(&nodes, rows),
            FieldData::Complex(rows) => render_complex_table(&nodes, rows),
        };
        let path = out_dir.join(&name);
        fs::write(&path, text)
            .map_err(|e| Diagnostic::in_context(format!("cannot write {}", path.display()), e))?;
        file_names.push(name);
    }
    let manifest = RunManifest {
        config: cfg.clone(),
        version: String::from(env!("CARGO_PKG_VERSION")),
        conventions: ConventionTable::recorded(),
        snapshot_count: cfg.snapshot_count(),
        times,
        conserved,
        files: file_names,
    };
    let path = out_dir.join("manifest.json");
    let mut text = serde_json::to_string_pretty(&manifest)
        .map_err(|e| Diagnostic::in_context("manifest serialization", e))?;
    text.push('\n');
    fs::write(&path, text)
        .map_err(|e| Diagnostic::in_context(format!("cannot write {}", path.display()), e))?;
    Ok(manifest)
}

/// Parse a `manifest.json` document.
pub fn read_manifest(text: &str) -> CliResult<RunManifest> {
    serde_json::from_str(text).map_err(|e| Diagnostic::in_context("manifest", e))
}

/// Drift audit of a run's conserved columns: every series must stay
/// within `bound` of its initial value.
pub fn audit_manifest(manifest: &RunManifest, bound: f64) -> CliResult<CheckReport> {
    let series: Vec<DriftSeries> = manifest
        .conserved
        .iter()
        .map(|(label, values)| DriftSeries {
            label: label.clone(),
            values: values.clone(),
            bound,
        })
        .collect();
    let config = format!(
        "equation={} n={} dt={} save_every={} snapshots={} bound={}",
        manifest.config.equation.name(),
        manifest.config.n,
        fmt_float(manifest.config.dt),
        manifest.config.save_every,
        manifest.snapshot_count,
        fmt_float(bound)
    );
    conservation_report("conservation-audit", &config, &series).map_err(Diagnostic::from)
}

/// Reject runs whose output contains non-finite numbers: JSON cannot
/// round-trip them, so a diverged run must fail loudly instead of leaving
/// behind an unreadable manifest.
fn check_finite(
    files: &[FieldFile],
    conserved: &BTreeMap<String, Vec<f64>>,
    times: &[f64],
) -> CliResult<()> {
    let blame = |label: &str, snapshot: usize| {
        Diagnostic::new(format!(
            "run diverged: {label} is non-finite at t = {}; reduce dt",
            fmt_float(times[snapshot])
        ))
    };
    for (label, series) in conserved {
        if let Some(k) = series.iter().position(|v| !v.is_finite()) {
            return Err(blame(label, k));
        }
    }
    for file in files {
        let bad = match &file.data {
            FieldData::Real(rows) => rows
                .iter()
                .position(|(_, row)| row.iter().any(|v| !v.is_finite())),
            FieldData::Complex(rows) => rows
                .iter()
                .position(|(_, row)| row.iter().any(|z| !z.re.is_finite() || !z.im.is_finite())),
        };
        if let Some(k) = bad {
            return Err(blame(file.name, k));
        }
    }
    Ok(())
}

type EquationOutput = (Vec<FieldFile>, BTreeMap<String, Vec<f64>>, Vec<f64>);

fn run_equation(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    match cfg.equation {
        Equation::Schrodinger => run_schrodinger(cfg, run),
        Equation::Hydro => run_hydro(cfg, run),
        Equation::Barotropic => run_barotropic(cfg, run),
        Equation::Neumann => run_neumann(cfg, run),
        Equation::Much => run_much(cfg, run),
        Equation::Twohs => run_twohs(cfg, run),
        Equation::Filament => run_filament(cfg, run),
    }
}

/// Drive `state` through `snapshot_count − 1` blocks of `save_every`
/// steps, calling `observe` at `t = 0` and after each block.
fn integrate<S>(
    cfg: &RunConfig,
    mut state: S,
    mut step: impl FnMut(&S) -> CliResult<S>,
    mut observe: impl FnMut(&S, f64),
) -> CliResult<()> {
    observe(&state, 0.0);
    let mut steps_done = 0u64;
    for _ in 1..cfg.snapshot_count() {
        for _ in 0..cfg.save_every {
            state = step(&state)?;
            steps_done += 1;
        }
        observe(&state, steps_done as f64 * cfg.dt);
    }
    Ok(())
}

fn conserved_map(labels: &[&str], columns: Vec<Vec<f64>>) -> BTreeMap<String, Vec<f64>> {
    labels
        .iter()
        .zip(columns)
        .map(|(l, c)| (String::from(*l), c))
        .collect()
}

fn run_schrodinger(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let psi0 = ComplexField::from_re_im(&run.initial["psi_re"], &run.initial["psi_im"]);
    let state =
        WaveFunction::new(psi0).map_err(|e| Diagnostic::in_context("initial wave function", e))?;
    let v = run.potential.clone().unwrap_or_else(|| run.grid.zeros());
    let nonlin = if cfg.cubic == 0.0 {
        Nonlinearity::Zero
    } else {
        Nonlinearity::Cubic { kappa: cfg.cubic }
    };
    let mut rows = Vec::new();
    let (mut norms, mut energies, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |s| Ok(step_schrodinger(s, &v, nonlin, cfg.dt)),
        |s, t| {
            times.push(t);
            rows.push((t, s.psi().values().to_vec()));
            norms.push(s.psi().norm());
            energies.push(schrodinger_hamiltonian(s, &v, nonlin));
        },
    )?;
    Ok((
        vec![FieldFile {
            name: "psi",
            data: FieldData::Complex(rows),
        }],
        conserved_map(&["hamiltonian", "norm"], vec![energies, norms]),
        times,
    ))
}

fn run_hydro(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let rho = DensityField::new(run.initial["rho"].clone())
        .map_err(|e| Diagnostic::in_context("initial.rho", e))?;
    let point = CotangentPoint::gauged(rho, run.initial["theta"].clone())
        .map_err(|e| Diagnostic::in_context("initial data", e))?;
    let state = HydroState::new(point);
    let spec = PotentialSpec {
        classical: run.potential.clone(),
        barotropic: None,
        quantum: cfg.quantum,
        integral_f: if cfg.cubic == 0.0 {
            Nonlinearity::Zero
        } else {
            Nonlinearity::Cubic { kappa: cfg.cubic }
        },
    };
    let mut rho_rows = Vec::new();
    let mut theta_rows = Vec::new();
    let (mut masses, mut energies, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |s| step_hydro(s, &spec, cfg.dt).map_err(Diagnostic::from),
        |s, t| {
            times.push(t);
            rho_rows.push((t, s.point().rho().field().values().to_vec()));
            theta_rows.push((t, s.point().theta().values().to_vec()));
            masses.push(s.point().rho().field().integrate());
            energies.push(hydro_hamiltonian(s, &spec));
        },
    )?;
    Ok((
        vec![
            FieldFile {
                name: "rho",
                data: FieldData::Real(rho_rows),
            },
            FieldFile {
                name: "theta",
                data: FieldData::Real(theta_rows),
            },
        ],
        conserved_map(&["hamiltonian", "mass"], vec![energies, masses]),
        times,
    ))
}

fn run_barotropic(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let law = cfg
        .energy_law
        .unwrap_or(EnergyLawConfig::Affine { a: 0.5, b: 0.0 })
        .to_core();
    let rho = DensityField::new(run.initial["rho"].clone())
        .map_err(|e| Diagnostic::in_context("initial.rho", e))?;
    let state = BarotropicState::new(rho, run.initial["u"].clone())
        .map_err(|e| Diagnostic::in_context("initial data", e))?;
    let internal = PotentialSpec::barotropic(law);
    let mut rho_rows = Vec::new();
    let mut u_rows = Vec::new();
    let (mut masses, mut energies, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |s| step_barotropic(s, law, cfg.dt).map_err(Diagnostic::from),
        |s, t| {
            times.push(t);
            rho_rows.push((t, s.rho().field().values().to_vec()));
            u_rows.push((t, s.u().values().to_vec()));
            masses.push(s.rho().field().integrate());
            let kinetic = 0.5
                * s.u()
                    .zip_map(s.u(), |a, b| a * b)
                    .zip_map(s.rho().field(), |q, r| q * r)
                    .integrate();
            energies.push(kinetic + internal.value(s.rho()));
        },
    )?;
    Ok((
        vec![
            FieldFile {
                name: "rho",
                data: FieldData::Real(rho_rows),
            },
            FieldFile {
                name: "u",
                data: FieldData::Real(u_rows),
            },
        ],
        conserved_map(&["hamiltonian", "mass"], vec![energies, masses]),
        times,
    ))
}

fn run_neumann(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let state = NeumannState::projected(run.initial["f"].clone(), run.initial["f_dot"].clone())
        .map_err(|e| Diagnostic::in_context("initial data", e))?;
    let mut f_rows = Vec::new();
    let mut fd_rows = Vec::new();
    let (mut norms, mut energies, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |s| Ok(step_neumann(s, cfg.dt)),
        |s, t| {
            times.push(t);
            let f = s.f().field();
            f_rows.push((t, f.values().to_vec()));
            fd_rows.push((t, s.f_dot().values().to_vec()));
            norms.push(f.inner(f));
            let df = f.derivative(1);
            energies.push(0.5 * (s.f_dot().inner(s.f_dot()) + df.inner(&df)));
        },
    )?;
    Ok((
        vec![
            FieldFile {
                name: "f",
                data: FieldData::Real(f_rows),
            },
            FieldFile {
                name: "f_dot",
                data: FieldData::Real(fd_rows),
            },
        ],
        conserved_map(&["energy", "norm"], vec![energies, norms]),
        times,
    ))
}

fn run_much(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let state = run.initial["u"].clone();
    let mut rows = Vec::new();
    let (mut means, mut energies, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |u| Ok(step_much(u, cfg.dt)),
        |u, t| {
            times.push(t);
            rows.push((t, u.values().to_vec()));
            means.push(u.integrate());
            energies.push(0.5 * u.inner(&u.apply_inertia()));
        },
    )?;
    Ok((
        vec![FieldFile {
            name: "u",
            data: FieldData::Real(rows),
        }],
        conserved_map(&["hamiltonian", "mean"], vec![energies, means]),
        times,
    ))
}

fn run_twohs(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    let state = TwoHSState::new(run.initial["u"].clone(), run.initial["sigma"].clone())
        .map_err(|e| Diagnostic::in_context("initial data", e))?;
    let mut u_rows = Vec::new();
    let mut sigma_rows = Vec::new();
    let (mut energies, mut sigma_means, mut times) = (Vec::new(), Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |s| step_2hs(s, cfg.dt).map_err(Diagnostic::from),
        |s, t| {
            times.push(t);
            u_rows.push((t, s.u().values().to_vec()));
            sigma_rows.push((t, s.sigma().values().to_vec()));
            let du = s.u().derivative(1);
            energies.push(du.inner(&du) + s.sigma().inner(s.sigma()));
            sigma_means.push(s.sigma().integrate());
        },
    )?;
    Ok((
        vec![
            FieldFile {
                name: "u",
                data: FieldData::Real(u_rows),
            },
            FieldFile {
                name: "sigma",
                data: FieldData::Real(sigma_rows),
            },
        ],
        conserved_map(&["energy", "sigma_mean"], vec![energies, sigma_means]),
        times,
    ))
}

fn run_filament(cfg: &RunConfig, run: &PreparedRun) -> CliResult<EquationOutput> {
    // arbitrary smooth closed curves are resampled to arclength once,
    // before stepping; the flow itself never reparameterizes
    let state = FilamentCurve::reparameterized(
        run.initial["x"].clone(),
        run.initial["y"].clone(),
        run.initial["z"].clone(),
    )
    .map_err(|e| Diagnostic::in_context("initial data", e))?;
    let mut rows: [Vec<(f64, Vec<f64>)>; 3] = [Vec::new(), Vec::new(), Vec::new()];
    let (mut lengths, mut times) = (Vec::new(), Vec::new());
    integrate(
        cfg,
        state,
        |c| step_filament(c, cfg.dt).map_err(Diagnostic::from),
        |c, t| {
            times.push(t);
            for (row, component) in rows.iter_mut().zip(c.components()) {
                row.push((t, component.values().to_vec()));
            }
            lengths.push(core::f64::consts::TAU * c.speed().integrate());
        },
    )?;
    let [x_rows, y_rows, z_rows] = rows;
    Ok((
        vec![
            FieldFile {
                name: "x",
                data: FieldData::Real(x_rows),
            },
            FieldFile {
                name: "y",
                data: FieldData::Real(y_rows),
            },
            FieldFile {
                name: "z",
                data: FieldData::Real(z_rows),
            },
        ],
        conserved_map(&["length"], vec![lengths]),
        times,
    ))
}
