//! JSON configuration documents for `simulate`, `verify`, and `geodesic`.
//!
//! A run is described by a single [`RunConfig`] document; initial data and
//! potentials are expression strings in the variable `x`, parsed and
//! sampled by the core expression module so that malformed input is
//! rejected with a byte offset before any time stepping happens. Unknown
//! keys are errors everywhere: a config that silently ignores part of
//! itself is not a reproducible record.

use std::collections::BTreeMap;

use denslab_core::grid::{PeriodicGrid, RealField};
use serde::{Deserialize, Serialize};

use crate::diag::{CliResult, Diagnostic};

/// The seven flows the tool can integrate.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Equation {
    Schrodinger,
    Hydro,
    Barotropic,
    Neumann,
    Much,
    Twohs,
    Filament,
}

impl Equation {
    pub fn name(self) -> &'static str {
        match self {
            Equation::Schrodinger => "schrodinger",
            Equation::Hydro => "hydro",
            Equation::Barotropic => "barotropic",
            Equation::Neumann => "neumann",
            Equation::Much => "much",
            Equation::Twohs => "twohs",
            Equation::Filament => "filament",
        }
    }

    pub fn from_name(name: &str) -> Option<Equation> {
        Some(match name {
            "schrodinger" => Equation::Schrodinger,
            "hydro" => Equation::Hydro,
            "barotropic" => Equation::Barotropic,
            "neumann" => Equation::Neumann,
            "much" => Equation::Much,
            "twohs" => Equation::Twohs,
            "filament" => Equation::Filament,
            _ => return None,
        })
    }

    /// Required keys of the `initial` map, sorted.
    pub fn initial_fields(self) -> &'static [&'static str] {
        match self {
            Equation::Schrodinger => &["psi_im", "psi_re"],
            Equation::Hydro => &["rho", "theta"],
            Equation::Barotropic => &["rho", "u"],
            Equation::Neumann => &["f", "f_dot"],
            Equation::Much => &["u"],
            Equation::Twohs => &["sigma", "u"],
            Equation::Filament => &["x", "y", "z"],
        }
    }

    /// Base names of the CSV files one run writes, in output order.
    pub fn output_fields(self) -> &'static [&'static str] {
        match self {
            Equation::Schrodinger => &["psi"],
            Equation::Hydro => &["rho", "theta"],
            Equation::Barotropic => &["rho", "u"],
            Equation::Neumann => &["f", "f_dot"],
            Equation::Much => &["u"],
            Equation::Twohs => &["u", "sigma"],
            Equation::Filament => &["x", "y", "z"],
        }
    }
}

/// Serialized form of the barotropic internal-energy law.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "law", rename_all = "lowercase", deny_unknown_fields)]
pub enum EnergyLawConfig {
    /// `e(ρ) = aρ + b`.
    Affine { a: f64, b: f64 },
    /// `e(ρ) = a·ρ^γ`.
    Power { a: f64, gamma: f64 },
}

impl EnergyLawConfig {
    pub fn to_core(self) -> denslab_core::densities::EnergyLaw {
        match self {
            EnergyLawConfig::Affine { a, b } => denslab_core::densities::EnergyLaw::Affine { a, b },
            EnergyLawConfig::Power { a, gamma } => {
                denslab_core::densities::EnergyLaw::Power { a, gamma }
            }
        }
    }
}

/// One simulation run, as a single JSON document.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub equation: Equation,
    /// Grid size; a power of two, at least 16.
    pub n: usize,
    /// Time step; strictly positive.
    pub dt: f64,
    /// Final time; snapshots stop at the last multiple of `dt·save_every`
    /// not beyond it.
    pub t_final: f64,
    /// Integrator steps between consecutive snapshots; at least 1.
    pub save_every: u64,
    /// Echoed into the manifest; none of the current flows draw random
    /// numbers, so this only tags the run.
    #[serde(default)]
    pub seed: u64,
    /// Output directory; the `--out-dir` flag overrides it.
    #[serde(default)]
    pub out_dir: Option<String>,
    /// Field name → expression in `x`, sampled on the grid at `t = 0`.
    pub initial: BTreeMap<String, String>,
    /// Multiplicative potential `V(x)`; Schrödinger and hydro only.
    #[serde(default)]
    pub potential: Option<String>,
    /// Coefficient on the Fisher-information (quantum pressure) term of
    /// the hydro potential functional.
    #[serde(default)]
    pub quantum: f64,
    /// Cubic coupling `κ` of `f(a) = κ·a`; Schrödinger and hydro only.
    #[serde(default)]
    pub cubic: f64,
    /// Barotropic internal-energy law; defaults to the shallow-water law
    /// `e(ρ) = ρ/2`.
    #[serde(default)]
    pub energy_law: Option<EnergyLawConfig>,
}

/// Grid, sampled initial data, and sampled potential for one run.
#[derive(Debug, Clone)]
pub struct PreparedRun {
    pub grid: PeriodicGrid,
    pub initial: BTreeMap<String, RealField>,
    pub potential: Option<RealField>,
}

impl RunConfig {
    /// `floor(t_final/(dt·save_every)) + 1`: the number of rows every
    /// output table of this run carries.
    pub fn snapshot_count(&self) -> u64 {
        (self.t_final / (self.dt * self.save_every as f64)).floor() as u64 + 1
    }

    /// Validate every invariant and sample the expressions.
    pub fn prepare(&self) -> CliResult<PreparedRun> {
        if !(self.dt.is_finite() && self.dt > 0.0) {
            return Err(Diagnostic::new(format!(
                "dt must be finite and positive, got {}",
                self.dt
            )));
        }
        if !(self.t_final.is_finite() && self.t_final >= 0.0) {
            return Err(Diagnostic::new(format!(
                "t_final must be finite and non-negative, got {}",
                self.t_final
            )));
        }
        if self.save_every == 0 {
            return Err(Diagnostic::new("save_every must be at least 1"));
        }
        let grid = PeriodicGrid::new(self.n).map_err(Diagnostic::from)?;
        let required = self.equation.initial_fields();
        let given: Vec<&str> = self.initial.keys().map(String::as_str).collect();
        if given != required {
            return Err(Diagnostic::new(format!(
                "equation '{}' takes initial fields [{}], config gives [{}]",
                self.equation.name(),
                required.join(", "),
                given.join(", ")
            )));
        }
        let mut initial = BTreeMap::new();
        for (name, src) in &self.initial {
            let field = grid
                .eval_expression(src)
                .map_err(|e| Diagnostic::in_context(format!("initial.{name}"), e))?;
            initial.insert(name.clone(), field);
        }
        let takes_potential = matches!(self.equation, Equation::Schrodinger | Equation::Hydro);
        if !takes_potential && (self.potential.is_some() || self.cubic != 0.0) {
            return Err(Diagnostic::new(format!(
                "'potential'/'cubic' do not apply to equation '{}'",
                self.equation.name()
            )));
        }
        if self.quantum != 0.0 && self.equation != Equation::Hydro {
            return Err(Diagnostic::new(format!(
                "'quantum' does not apply to equation '{}'",
                self.equation.name()
            )));
        }
        if self.energy_law.is_some() && self.equation != Equation::Barotropic {
            return Err(Diagnostic::new(format!(
                "'energy_law' does not apply to equation '{}'",
                self.equation.name()
            )));
        }
        let potential = match &self.potential {
            None => None,
            Some(src) => Some(
                grid.eval_expression(src)
                    .map_err(|e| Diagnostic::in_context("potential", e))?,
            ),
        };
        Ok(PreparedRun {
            grid,
            initial,
            potential,
        })
    }
}

/// Optional overrides for `verify`; each check accepts the subset of keys
/// that appear in its config, and rejects the rest.
#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct VerifyConfig {
    pub n: Option<usize>,
    pub seed: Option<u64>,
    pub tuples: Option<usize>,
    pub fault_scale: Option<f64>,
    pub dt_scale: Option<f64>,
    /// Conjugacy trajectory family: standard | cubic | stationary | quick.
    pub profile: Option<String>,
    /// Headline tolerance; the `--tol` flag takes precedence.
    pub tolerance: Option<f64>,
    /// Path to a run manifest: switches `verify conservation` from the
    /// built-in suite to a drift audit of that run's conserved columns.
    pub manifest: Option<String>,
    /// Drift bound for the manifest audit (default 1e−12).
    pub bound: Option<f64>,
}

impl VerifyConfig {
    /// Names of the keys that are set, for per-check applicability errors.
    pub fn set_keys(&self) -> Vec<&'static str> {
        let mut keys = Vec::new();
        if self.n.is_some() {
            keys.push("n");
        }
        if self.seed.is_some() {
            keys.push("seed");
        }
        if self.tuples.is_some() {
            keys.push("tuples");
        }
        if self.fault_scale.is_some() {
            keys.push("fault_scale");
        }
        if self.dt_scale.is_some() {
            keys.push("dt_scale");
        }
        if self.profile.is_some() {
            keys.push("profile");
        }
        if self.tolerance.is_some() {
            keys.push("tolerance");
        }
        if self.manifest.is_some() {
            keys.push("manifest");
        }
        if self.bound.is_some() {
            keys.push("bound");
        }
        keys
    }
}

/// One geodesic sampling job. `rho0`/`rho1` describe Fisher–Rao endpoints;
/// `psi0_*`/`v0_*` describe a Fubini–Study start point and velocity.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GeodesicConfig {
    pub n: usize,
    /// Number of sample rows over `[0, t_final]`; at least 2.
    #[serde(default = "default_samples")]
    pub samples: usize,
    /// Parameter horizon; 1.0 reaches the far endpoint of a Fisher–Rao
    /// geodesic.
    #[serde(default = "default_t_final")]
    pub t_final: f64,
    pub out_dir: String,
    #[serde(default)]
    pub rho0: Option<String>,
    #[serde(default)]
    pub rho1: Option<String>,
    #[serde(default)]
    pub psi0_re: Option<String>,
    #[serde(default)]
    pub psi0_im: Option<String>,
    #[serde(default)]
    pub v0_re: Option<String>,
    #[serde(default)]
    pub v0_im: Option<String>,
}

fn default_samples() -> usize {
    17
}

fn default_t_final() -> f64 {
    1.0
}

#[cfg(test)]
mod tests {
    use super::*;

    fn hydro_json() -> String {
        String::from(
            r#"{
            "equation": "hydro",
            "n": 64,
            "dt": 1e-3,
            "t_final": 0.1,
            "save_every": 10,
            "initial": {"rho": "1 + 0.5*cos(x)", "theta": "0.5*sin(x)"},
            "potential": "cos(x)"
        }"#,
        )
    }

    #[test]
    fn hydro_config_prepares() {
        let cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        assert_eq!(cfg.equation, Equation::Hydro);
        assert_eq!(cfg.snapshot_count(), 11);
        let run = cfg.prepare().unwrap();
        assert_eq!(run.grid.len(), 64);
        assert!(run.potential.is_some());
        assert_eq!(run.initial.len(), 2);
    }

    #[test]
    fn config_round_trips_through_json() {
        let cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        let echo = serde_json::to_string(&cfg).unwrap();
        let back: RunConfig = serde_json::from_str(&echo).unwrap();
        assert_eq!(back, cfg);
    }

    #[test]
    fn unknown_keys_and_bad_values_are_rejected() {
        let with_extra = hydro_json().replace("\"potential\"", "\"potentail\"");
        assert!(serde_json::from_str::<RunConfig>(&with_extra).is_err());

        let mut cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        cfg.dt = 0.0;
        assert!(cfg.prepare().is_err());
        cfg.dt = 1e-3;
        cfg.n = 40;
        assert!(cfg.prepare().unwrap_err().message().contains("40"));
        cfg.n = 64;
        cfg.save_every = 0;
        assert!(cfg.prepare().is_err());
    }

    #[test]
    fn initial_field_names_are_per_equation() {
        let mut cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        cfg.initial.remove("theta");
        let err = cfg.prepare().unwrap_err();
        assert!(err.message().contains("rho, theta"), "{err}");
        cfg.initial
            .insert(String::from("theta"), String::from("sin(x) +"));
        let err = cfg.prepare().unwrap_err();
        assert!(err.message().contains("initial.theta"), "{err}");
        assert!(err.message().contains("byte"), "{err}");
    }

    #[test]
    fn parameters_only_apply_where_meaningful() {
        let mut cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        cfg.equation = Equation::Much;
        cfg.initial = BTreeMap::from([(String::from("u"), String::from("sin(x)"))]);
        let err = cfg.prepare().unwrap_err();
        assert!(err.message().contains("potential"), "{err}");
        cfg.potential = None;
        cfg.energy_law = Some(EnergyLawConfig::Affine { a: 0.5, b: 0.0 });
        assert!(cfg.prepare().unwrap_err().message().contains("energy_law"));
        cfg.energy_law = None;
        cfg.prepare().unwrap();
    }

    #[test]
    fn snapshot_count_follows_the_floor_formula() {
        let mut cfg: RunConfig = serde_json::from_str(&hydro_json()).unwrap();
        cfg.t_final = 0.0;
        assert_eq!(cfg.snapshot_count(), 1);
        cfg.t_final = 0.1;
        cfg.dt = 3e-3;
        cfg.save_every = 7;
        let expect = (0.1f64 / (3e-3 * 7.0)).floor() as u64 + 1;
        assert_eq!(cfg.snapshot_count(), expect);
    }

    #[test]
    fn verify_config_reports_its_set_keys() {
        let cfg: VerifyConfig = serde_json::from_str(r#"{"n": 64, "tolerance": 1e-9}"#).unwrap();
        assert_eq!(cfg.set_keys(), vec!["n", "tolerance"]);
        assert!(serde_json::from_str::<VerifyConfig>(r#"{"bogus": 1}"#).is_err());
        assert_eq!(VerifyConfig::default().set_keys(), Vec::<&str>::new());
    }
}
