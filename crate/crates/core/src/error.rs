//! Crate-wide error type.
//!
//! Constructors of the validated state types and the numerical operators
//! return these variants instead of silently repairing bad data: a density
//! touching the vacuum floor, a wave function with a winding phase, a curve
//! losing its arclength parameterization are all hard errors.

use alloc::string::String;
use core::fmt;

/// Everything that can go wrong in the core numerics.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// Grid size must be a power of two and at least 16.
    GridSize { n: usize },
    /// Two fields from grids of different size met in one operation.
    ShapeMismatch { expected: usize, got: usize },
    /// An operation required a mean-zero field.
    NonZeroMean { mean: f64 },
    /// A density sample at or below the positivity floor.
    NonPositiveDensity { min: f64 },
    /// A strictly positive field was required.
    NonPositiveField { min: f64 },
    /// A density whose sample mean is not 1.
    NonUnitMass { mass: f64 },
    /// A field on the unit sphere of L²(μ) was required.
    NonUnitNorm { norm: f64 },
    /// Phase representative violates the ρ-weighted mean-zero gauge.
    GaugeViolation { value: f64 },
    /// Sphere geodesic endpoints (anti)parallel beyond recovery.
    AntipodalEndpoints { distance: f64 },
    /// |ψ| dipped below the modulus floor; no phase can be extracted.
    VanishingModulus { min: f64 },
    /// The phase winds around the circle; not in the image of the wave map.
    NonzeroWinding { winding: i32 },
    /// Tangent not orthogonal to the sphere point / base field.
    NonHorizontal { overlap: f64 },
    /// A geodesic with zero initial velocity has no direction.
    ZeroVelocity,
    /// The evolving density touched the vacuum floor.
    VacuumFormation { min: f64 },
    /// Curvature vanished somewhere; torsion is undefined there.
    VanishingCurvature { min: f64 },
    /// Total torsion around the curve must vanish for a periodic phase.
    NonzeroTotalTorsion { total: f64 },
    /// |γ′| stopped being constant along the curve.
    ArclengthDrift { variation: f64 },
    /// Expression text could not be parsed; `offset` is a byte offset.
    Parse { offset: usize, message: String },
    /// Expression evaluation hit a domain fault at some node.
    Eval { message: String },
    /// A time series with too few snapshots for the requested analysis.
    MissingSnapshots,
    /// A runtime-derived convention constant strayed from the recorded table.
    ConventionDrift { measured: f64, expected: f64 },
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::GridSize { n } => {
                write!(f, "grid size {n} is not a power of two >= 16")
            }
            Error::ShapeMismatch { expected, got } => {
                write!(f, "field has {got} samples, expected {expected}")
            }
            Error::NonZeroMean { mean } => {
                write!(f, "field must have zero mean, got {mean:e}")
            }
            Error::NonPositiveDensity { min } => {
                write!(f, "density not strictly positive: min sample {min:e}")
            }
            Error::NonPositiveField { min } => {
                write!(f, "field not strictly positive: min sample {min:e}")
            }
            Error::NonUnitMass { mass } => {
                write!(f, "density mass {mass:.17e} is not 1")
            }
            Error::NonUnitNorm { norm } => {
                write!(f, "field norm {norm:.17e} is not 1")
            }
            Error::GaugeViolation { value } => {
                write!(f, "weighted phase mean {value:e} violates the gauge")
            }
            Error::AntipodalEndpoints { distance } => {
                write!(
                    f,
                    "endpoints at sphere distance {distance}; geodesic undefined"
                )
            }
            Error::VanishingModulus { min } => {
                write!(f, "|psi| min {min:e} below the modulus floor")
            }
            Error::NonzeroWinding { winding } => {
                write!(f, "phase winds {winding} times around the circle")
            }
            Error::NonHorizontal { overlap } => {
                write!(f, "tangent has overlap {overlap:e} with the base point")
            }
            Error::ZeroVelocity => write!(f, "zero initial velocity"),
            Error::VacuumFormation { min } => {
                write!(f, "density hit the vacuum floor: min sample {min:e}")
            }
            Error::VanishingCurvature { min } => {
                write!(f, "curvature min {min:e} too small for torsion")
            }
            Error::NonzeroTotalTorsion { total } => {
                write!(f, "total torsion {total:e} is not zero")
            }
            Error::ArclengthDrift { variation } => {
                write!(
                    f,
                    "|gamma'| relative variation {variation:e} exceeds the drift bound"
                )
            }
            Error::Parse { offset, message } => {
                write!(f, "parse error at byte {offset}: {message}")
            }
            Error::Eval { message } => write!(f, "evaluation error: {message}"),
            Error::MissingSnapshots => {
                write!(f, "not enough snapshots for the requested analysis")
            }
            Error::ConventionDrift { measured, expected } => {
                write!(
                    f,
                    "derived convention value {measured:e} strayed from expected {expected:e}"
                )
            }
        }
    }
}

impl core::error::Error for Error {}
