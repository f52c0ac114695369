//! File-to-file transforms between the representations the core relates.
//!
//! Each transform reads one CSV table with a fixed number of data rows,
//! applies the corresponding core map, and writes one table:
//!
//! - `madelung`: rows (ρ, θ) → one complex row `√ρ·e^{iθ/2}`;
//! - `madelung-inv`: one unit-norm complex row ψ → rows (ρ, θ) with the
//!   ρ-weighted phase gauge fixed;
//! - `hasimoto`: rows (x, y, z) of a closed space curve → one complex row
//!   `κ·e^{iT}` with `T′ = τ` (the curve is resampled to arclength first).
//!
//! Output rows inherit the label of the input's first row, so transforming
//! a snapshot keeps its time stamp.

use denslab_core::densities::DensityField;
use denslab_core::filament::{hasimoto_transform, FilamentCurve};
use denslab_core::grid::{PeriodicGrid, RealField};
use denslab_core::madelung::{madelung_forward, madelung_inverse, CotangentPoint, WaveFunction};

use crate::diag::{CliResult, Diagnostic};
use crate::format::{read_complex_table, read_real_table, render_complex_table, render_real_table};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TransformKind {
    Madelung,
    MadelungInv,
    Hasimoto,
}

impl TransformKind {
    pub fn from_name(name: &str) -> Option<TransformKind> {
        Some(match name {
            "madelung" => TransformKind::Madelung,
            "madelung-inv" => TransformKind::MadelungInv,
            "hasimoto" => TransformKind::Hasimoto,
            _ => return None,
        })
    }

    pub fn name(self) -> &'static str {
        match self {
            TransformKind::Madelung => "madelung",
            TransformKind::MadelungInv => "madelung-inv",
            TransformKind::Hasimoto => "hasimoto",
        }
    }
}

/// Apply a transform to the text of an input table, producing the text of
/// the output table. Pure, so tests can drive it without touching disk.
pub fn apply_transform(kind: TransformKind, input: &str) -> CliResult<String> {
    match kind {
        TransformKind::Madelung => madelung(input),
        TransformKind::MadelungInv => madelung_inv(input),
        TransformKind::Hasimoto => hasimoto(input),
    }
}

/// Grid from a node header: the count fixes the size, and the coordinates
/// must match that grid's nodes (guards against foreign or shuffled files).
fn grid_for(nodes: &[f64]) -> CliResult<PeriodicGrid> {
    let grid = PeriodicGrid::new(nodes.len()).map_err(Diagnostic::from)?;
    for (j, &x) in nodes.iter().enumerate() {
        if (x - grid.node(j)).abs() > 1e-12 {
            return Err(Diagnostic::new(format!(
                "header node {j} is {x}, expected grid coordinate {}",
                grid.node(j)
            )));
        }
    }
    Ok(grid)
}

fn real_rows(
    input: &str,
    expect: usize,
    what: &str,
) -> CliResult<(PeriodicGrid, Vec<(f64, RealField)>)> {
    let table = read_real_table(input)?;
    if table.rows.len() != expect {
        return Err(Diagnostic::new(format!(
            "{what} takes exactly {expect} data rows, found {}",
            table.rows.len()
        )));
    }
    let grid = grid_for(&table.nodes)?;
    let mut rows = Vec::with_capacity(expect);
    for (label, values) in table.rows {
        rows.push((label, grid.from_samples(values).map_err(Diagnostic::from)?));
    }
    Ok((grid, rows))
}

fn madelung(input: &str) -> CliResult<String> {
    let (grid, rows) = real_rows(input, 2, "madelung")?;
    let mut iter = rows.into_iter();
    let (label, rho) = iter.next().expect("two rows checked");
    let (_, theta) = iter.next().expect("two rows checked");
    let rho = DensityField::new(rho).map_err(|e| Diagnostic::in_context("row 1 (rho)", e))?;
    let point = CotangentPoint::gauged(rho, theta).map_err(Diagnostic::from)?;
    let psi = madelung_forward(&point);
    Ok(render_complex_table(
        &grid.nodes(),
        &[(label, psi.psi().values().to_vec())],
    ))
}

fn madelung_inv(input: &str) -> CliResult<String> {
    let table = read_complex_table(input)?;
    if table.rows.len() != 1 {
        return Err(Diagnostic::new(format!(
            "madelung-inv takes exactly 1 data row, found {}",
            table.rows.len()
        )));
    }
    let grid = grid_for(&table.nodes)?;
    let (label, values) = table.rows.into_iter().next().expect("one row checked");
    let field = grid
        .from_complex_samples(values)
        .map_err(Diagnostic::from)?;
    let psi = WaveFunction::new(field).map_err(|e| Diagnostic::in_context("row 1 (psi)", e))?;
    let point = madelung_inverse(&psi).map_err(Diagnostic::from)?;
    Ok(render_real_table(
        &grid.nodes(),
        &[
            (label, point.rho().field().values().to_vec()),
            (label, point.theta().values().to_vec()),
        ],
    ))
}

fn hasimoto(input: &str) -> CliResult<String> {
    let (grid, rows) = real_rows(input, 3, "hasimoto")?;
    let mut iter = rows.into_iter();
    let (label, x) = iter.next().expect("three rows checked");
    let (_, y) = iter.next().expect("three rows checked");
    let (_, z) = iter.next().expect("three rows checked");
    let curve = FilamentCurve::reparameterized(x, y, z).map_err(Diagnostic::from)?;
    let psi = hasimoto_transform(&curve).map_err(Diagnostic::from)?;
    Ok(render_complex_table(
        &grid.nodes(),
        &[(label, psi.values().to_vec())],
    ))
}
