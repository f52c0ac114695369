//! Centralized numerical tolerances and floors.
//!
//! Every gate in the crate reads its threshold from here so the rationale
//! lives in one place. Two kinds of constants appear: *floors* guarding
//! divisions and square roots (violations are hard errors, never clamped),
//! and *tolerances* that decide when a structural precondition (zero mean,
//! unit mass, fixed gauge) counts as satisfied at double precision.

/// A field demanded mean-zero may deviate by this much; spectral
/// antiderivatives of analytic data keep means at round-off (~1e-16), so
/// anything above this signals a modelling error, not noise.
pub const MEAN_TOL: f64 = 1e-10;

/// Unit-mass gate for densities: `|∫ρμ − 1|` above this is rejected.
pub const MASS_TOL: f64 = 1e-10;

/// Unit-norm gate for sphere fields and wave functions.
pub const NORM_TOL: f64 = 1e-10;

/// ρ-weighted phase mean allowed by the gauge `∫θρμ = 0`.
pub const GAUGE_TOL: f64 = 1e-10;

/// Strict positivity floor for densities and Poisson weights. Samples at
/// or below this are treated as vacuum and rejected — clamping would
/// silently change the dynamics.
pub const DENSITY_FLOOR: f64 = 1e-12;

/// Modulus floor below which a wave function has no extractable phase.
pub const MODULUS_FLOOR: f64 = 1e-8;

/// Sphere-geodesic endpoints closer than this are treated as identical.
pub const IDENTICAL_ENDPOINTS: f64 = 1e-12;

/// Sphere-geodesic endpoints within this of distance π have no unique
/// connecting great circle.
pub const ANTIPODAL_GAP: f64 = 1e-8;

/// Curvature floor below which torsion is undefined.
pub const CURVATURE_FLOOR: f64 = 1e-8;

/// Total torsion around a closed curve must vanish to within this for the
/// curvature-phase field to close up.
pub const TOTAL_TORSION_TOL: f64 = 1e-8;

/// Relative variation of `|γ′|` required of freshly constructed curves:
/// sampling must be proportional to arclength up to spectral accuracy.
pub const ARCLENGTH_UNIFORMITY: f64 = 1e-6;

/// Relative variation of `|γ′|` tolerated while the binormal flow runs.
/// The flow preserves `|γ′|` exactly in the continuum, so larger
/// variation means the time step or grid is too coarse to trust.
pub const ARCLENGTH_DRIFT: f64 = 1e-3;

/// Allowed drift of `∫u″μ` in the two-component flow before the second
/// antiderivative loses meaning. The conservative-form right-hand side
/// keeps the mean at round-off, so this is a defensive gate.
pub const COMPATIBILITY_TOL: f64 = 1e-8;

/// Newton iteration target when inverting monotone circle maps.
pub const DIFFEO_INVERT_TOL: f64 = 1e-13;
