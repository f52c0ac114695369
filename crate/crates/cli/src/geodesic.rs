//! Geodesic sampling: write a curve of fields as one CSV table plus a
//! small JSON summary.
//!
//! `fisher-rao` connects two densities along the sphere great circle of
//! their square roots and samples the densities; `fubini-study` shoots a
//! projective great circle from a wave function and a tangent velocity.
//! Rows are labeled by the curve parameter over `[0, t_final]`; for the
//! Fisher–Rao curve, `t_final = 1` reaches the far endpoint.

use std::fs;
use std::path::Path;

use denslab_core::densities::{DensityField, FisherRaoGeodesic};
use denslab_core::grid::{ComplexField, PeriodicGrid, RealField};
use denslab_core::madelung::{fs_geodesic, WaveFunction};
use serde::Serialize;

use crate::config::GeodesicConfig;
use crate::diag::{CliResult, Diagnostic};
use crate::format::{render_complex_table, render_real_table};
use crate::sim::ConventionTable;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GeodesicKind {
    FisherRao,
    FubiniStudy,
}

impl GeodesicKind {
    pub fn from_name(name: &str) -> Option<GeodesicKind> {
        Some(match name {
            "fisher-rao" => GeodesicKind::FisherRao,
            "fubini-study" => GeodesicKind::FubiniStudy,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            GeodesicKind::FisherRao => "fisher-rao",
            GeodesicKind::FubiniStudy => "fubini-study",
        }
    }

    fn table_file(self) -> &'static str {
        match self {
            GeodesicKind::FisherRao => "rho.csv",
            GeodesicKind::FubiniStudy => "psi.csv",
        }
    }
}

/// The `geodesic.json` summary next to the sampled table.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GeodesicSummary {
    pub kind: &'static str,
    pub config: GeodesicConfig,
    pub version: String,
    pub conventions: ConventionTable,
    /// Length of the sampled parameter range in the respective metric.
    pub distance: f64,
    pub table: &'static str,
}

/// Sample the curve and write `<table>.csv` + `geodesic.json` into the
/// config's `out_dir`. Returns the summary.
pub fn run_geodesic(kind: GeodesicKind, cfg: &GeodesicConfig) -> CliResult<GeodesicSummary> {
    if cfg.samples < 2 {
        return Err(Diagnostic::new("samples must be at least 2"));
    }
    if !(cfg.t_final.is_finite() && cfg.t_final > 0.0) {
        return Err(Diagnostic::new(format!(
            "t_final must be finite and positive, got {}",
            cfg.t_final
        )));
    }
    let grid = PeriodicGrid::new(cfg.n).map_err(Diagnostic::from)?;
    let (distance, table_text) = match kind {
        GeodesicKind::FisherRao => sample_fisher_rao(cfg, &grid)?,
        GeodesicKind::FubiniStudy => sample_fubini_study(cfg, &grid)?,
    };
    let summary = GeodesicSummary {
        kind: kind.name(),
        config: cfg.clone(),
        version: String::from(env!("CARGO_PKG_VERSION")),
        conventions: ConventionTable::recorded(),
        distance,
        table: kind.table_file(),
    };
    let dir = Path::new(&cfg.out_dir);
    fs::create_dir_all(dir)
        .map_err(|e| Diagnostic::in_context(format!("cannot create {}", dir.display()), e))?;
    fs::write(dir.join(kind.table_file()), table_text)
        .map_err(|e| Diagnostic::in_context("cannot write table", e))?;
    let mut json = serde_json::to_string_pretty(&summary)
        .map_err(|e| Diagnostic::in_context("summary serialization", e))?;
    json.push('\n');
    fs::write(dir.join("geodesic.json"), json)
        .map_err(|e| Diagnostic::in_context("cannot write geodesic.json", e))?;
    Ok(summary)
}

fn require<'a>(field: &'a Option<String>, name: &str) -> CliResult<&'a str> {
    field
        .as_deref()
        .ok_or_else(|| Diagnostic::new(format!("missing config key '{name}' for this kind")))
}

fn forbid(fields: &[(&Option<String>, &str)], kind: &str) -> CliResult<()> {
    for (field, name) in fields {
        if field.is_some() {
            return Err(Diagnostic::new(format!(
                "config key '{name}' does not apply to geodesic kind '{kind}'"
            )));
        }
    }
    Ok(())
}

fn sample_field(grid: &PeriodicGrid, src: &str, name: &str) -> CliResult<RealField> {
    grid.eval_expression(src)
        .map_err(|e| Diagnostic::in_context(name, e))
}

fn parameter(cfg: &GeodesicConfig, i: usize) -> f64 {
    cfg.t_final * i as f64 / (cfg.samples - 1) as f64
}

fn sample_fisher_rao(cfg: &GeodesicConfig, grid: &PeriodicGrid) -> CliResult<(f64, String)> {
    forbid(
        &[
            (&cfg.psi0_re, "psi0_re"),
            (&cfg.psi0_im, "psi0_im"),
            (&cfg.v0_re, "v0_re"),
            (&cfg.v0_im, "v0_im"),
        ],
        "fisher-rao",
    )?;
    let rho0 = DensityField::new(sample_field(grid, require(&cfg.rho0, "rho0")?, "rho0")?)
        .map_err(|e| Diagnostic::in_context("rho0", e))?;
    let rho1 = DensityField::new(sample_field(grid, require(&cfg.rho1, "rho1")?, "rho1")?)
        .map_err(|e| Diagnostic::in_context("rho1", e))?;
    let geodesic = FisherRaoGeodesic::new(&rho0, &rho1).map_err(Diagnostic::from)?;
    let mut rows = Vec::with_capacity(cfg.samples);
    for i in 0..cfg.samples {
        let t = parameter(cfg, i);
        let rho = geodesic.density(t).map_err(Diagnostic::from)?;
        rows.push((t, rho.field().values().to_vec()));
    }
    Ok((
        geodesic.distance() * cfg.t_final,
        render_real_table(&grid.nodes(), &rows),
    ))
}

fn sample_fubini_study(cfg: &GeodesicConfig, grid: &PeriodicGrid) -> CliResult<(f64, String)> {
    forbid(&[(&cfg.rho0, "rho0"), (&cfg.rho1, "rho1")], "fubini-study")?;
    let psi0 = ComplexField::from_re_im(
        &sample_field(grid, require(&cfg.psi0_re, "psi0_re")?, "psi0_re")?,
        &sample_field(grid, require(&cfg.psi0_im, "psi0_im")?, "psi0_im")?,
    );
    let psi0 = WaveFunction::new(psi0).map_err(|e| Diagnostic::in_context("psi0", e))?;
    let v0 = ComplexField::from_re_im(
        &sample_field(grid, require(&cfg.v0_re, "v0_re")?, "v0_re")?,
        &sample_field(grid, require(&cfg.v0_im, "v0_im")?, "v0_im")?,
    );
    let mut rows = Vec::with_capacity(cfg.samples);
    for i in 0..cfg.samples {
        let t = parameter(cfg, i);
        let psi = fs_geodesic(&psi0, &v0, t).map_err(Diagnostic::from)?;
        rows.push((t, psi.psi().values().to_vec()));
    }
    Ok((
        v0.norm() * cfg.t_final,
        render_complex_table(&grid.nodes(), &rows),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::format::{read_complex_table, read_real_table};

    fn fisher_config(dir: &Path) -> GeodesicConfig {
        serde_json::from_str(&format!(
            r#"{{
                "n": 32,
                "samples": 5,
                "out_dir": "{}",
                "rho0": "1",
                "rho1": "1 + 0.5*sin(x)"
            }}"#,
            dir.display()
        ))
        .unwrap()
    }

    #[test]
    fn fisher_rao_curve_hits_both_endpoints() {
        let dir = tempfile::tempdir().unwrap();
        let cfg = fisher_config(dir.path());
        let summary = run_geodesic(GeodesicKind::FisherRao, &cfg).unwrap();
        assert!(summary.distance > 0.0);
        let text = fs::read_to_string(dir.path().join("rho.csv")).unwrap();
        let table = read_real_table(&text).unwrap();
        assert_eq!(table.rows.len(), 5);
        let grid = PeriodicGrid::new(32).unwrap();
        let rho1 = grid.real_field(|x| 1.0 + 0.5 * x.sin());
        for (j, v) in table.rows[0].1.iter().enumerate() {
            assert!((v - 1.0).abs() < 1e-12, "start endpoint, node {j}");
        }
        for (got, want) in table.rows[4].1.iter().zip(rho1.values()) {
            assert!((got - want).abs() < 1e-12, "far endpoint");
        }
        assert!(dir.path().join("geodesic.json").exists());
    }

    #[test]
    fn fubini_study_speed_scales_the_distance() {
        let dir = tempfile::tempdir().unwrap();
        let cfg: GeodesicConfig = serde_json::from_str(&format!(
            r#"{{
                "n": 32,
                "samples": 3,
                "t_final": 0.5,
                "out_dir": "{}",
                "psi0_re": "1",
                "psi0_im": "0",
                "v0_re": "sqrt(2)*cos(x)",
                "v0_im": "0"
            }}"#,
            dir.path().display()
        ))
        .unwrap();
        let summary = run_geodesic(GeodesicKind::FubiniStudy, &cfg).unwrap();
        assert!((summary.distance - 0.5).abs() < 1e-12, "unit-speed shot");
        let text = fs::read_to_string(dir.path().join("psi.csv")).unwrap();
        assert_eq!(read_complex_table(&text).unwrap().rows.len(), 3);
    }

    #[test]
    fn kind_key_mixing_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let mut cfg = fisher_config(dir.path());
        assert!(run_geodesic(GeodesicKind::FubiniStudy, &cfg).is_err());
        cfg.samples = 1;
        assert!(run_geodesic(GeodesicKind::FisherRao, &cfg).is_err());
    }
}
