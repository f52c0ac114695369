//! The square-root lift of cotangent data to wave functions.
//!
//! A point `(ρ, θ)` with the gauge `∫θρμ = 0` maps to `ψ = √ρ·e^{iθ/2}`
//! on the unit sphere of complex L²(μ). The half-angle convention makes
//! the lift an isometry from the Sasaki–Fisher–Rao metric to the
//! Fubini–Study metric, and pulls the projective symplectic form back to
//! exactly one quarter of the canonical one; both constants are fixed
//! here and asserted by the verification layer.

use num_complex::Complex64;
// no_std float transcendentals; shadowed by std inherent methods in tests
#[allow(unused_imports)]
use num_traits::Float;

use crate::densities::{DensityField, TangentDensity};
use crate::error::{Error, Result};
use crate::grid::{ComplexField, PeriodicGrid, RealField};
use crate::tol;

/// Cotangent point `(ρ, θ)` with the representative phase fixed by
/// `∫θρμ = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentPoint {
    rho: DensityField,
    theta: RealField,
}

impl CotangentPoint {
    /// Validate the gauge `|∫θρμ| ≤ 1e-10` and matching grids.
    pub fn new(rho: DensityField, theta: RealField) -> Result<Self> {
        if rho.field().grid() != theta.grid() {
            return Err(Error::ShapeMismatch {
                expected: rho.field().len(),
                got: theta.len(),
            });
        }
        let value = theta.inner(rho.field());
        if value.abs() > tol::GAUGE_TOL {
            return Err(Error::GaugeViolation { value });
        }
        Ok(CotangentPoint { rho, theta })
    }

    /// Fix the gauge by subtracting the constant `∫θρμ` (mass is one,
    /// so the projection is exact).
    pub fn gauged(rho: DensityField, theta: RealField) -> Result<Self> {
        let c = theta.inner(rho.field());
        CotangentPoint::new(rho, theta.map(move |v| v - c))
    }

    /// Density component.
    pub fn rho(&self) -> &DensityField {
        &self.rho
    }

    /// Phase component (gauge-fixed representative).
    pub fn theta(&self) -> &RealField {
        &self.theta
    }

    /// Grid shared by both components.
    pub fn grid(&self) -> &PeriodicGrid {
        self.rho.field().grid()
    }
}

/// Cotangent tangent `(ρ̇, θ̇)`. The phase constraint `∫θ̇ρμ = 0` is
/// enforced by projection inside the metric operations, not here, since
/// a tangent alone carries no base density.
#[derive(Debug, Clone, PartialEq)]
pub struct CotangentTangent {
    rho_dot: TangentDensity,
    theta_dot: RealField,
}

impl CotangentTangent {
    /// Pair a mass-neutral density velocity with a phase velocity.
    /// Panics if the grids differ (same policy as field operators).
    pub fn new(rho_dot: TangentDensity, theta_dot: RealField) -> Self {
        assert_eq!(
            rho_dot.field().grid(),
            theta_dot.grid(),
            "tangent components live on different grids"
        );
        CotangentTangent { rho_dot, theta_dot }
    }

    /// Density velocity.
    pub fn rho_dot(&self) -> &TangentDensity {
        &self.rho_dot
    }

    /// Phase velocity (unprojected).
    pub fn theta_dot(&self) -> &RealField {
        &self.theta_dot
    }

    /// Phase velocity with the constant `∫θ̇ρμ` removed.
    pub fn theta_dot_projected(&self, rho: &DensityField) -> RealField {
        let c = self.theta_dot.inner(rho.field());
        self.theta_dot.map(move |v| v - c)
    }
}

/// Unit-norm complex field, compared projectively by default.
#[derive(Debug, Clone, PartialEq)]
pub struct WaveFunction {
    psi: ComplexField,
    projective: bool,
}

impl WaveFunction {
    /// Validate `|‖ψ‖² − 1| ≤ 1e-10`.
    pub fn new(psi: ComplexField) -> Result<Self> {
        let norm_sq = psi.modulus_sq().integrate();
        if (norm_sq - 1.0).abs() > tol::NORM_TOL {
            return Err(Error::NonUnitNorm {
                norm: norm_sq.sqrt(),
            });
        }
        Ok(WaveFunction {
            psi,
            projective: true,
        })
    }

    /// Scale to unit norm, then validate.
    pub fn normalized(psi: ComplexField) -> Result<Self> {
        let norm = psi.norm();
        if norm <= tol::DENSITY_FLOOR {
            return Err(Error::NonUnitNorm { norm });
        }
        WaveFunction::new(psi.map(move |z| z / norm))
    }

    /// Choose whether comparisons may rotate by a constant phase.
    pub fn with_projective(mut self, projective: bool) -> Self {
        self.projective = projective;
        self
    }

    /// Whether comparisons are modulo constant phase.
    pub fn is_projective(&self) -> bool {
        self.projective
    }

    /// The underlying field.
    pub fn psi(&self) -> &ComplexField {
        &self.psi
    }

    /// Consume and return the underlying field.
    pub fn into_field(self) -> ComplexField {
        self.psi
    }

    /// Rotate by the constant phase that maximizes `Re⟨ref, ψ⟩`
    /// (identity when either side is non-projective).
    pub fn aligned_to(&self, reference: &WaveFunction) -> WaveFunction {
        if !(self.projective && reference.projective) {
            return self.clone();
        }
        let overlap = reference.psi.inner(&self.psi);
        if overlap.norm() <= tol::DENSITY_FLOOR {
            return self.clone();
        }
        let phase = overlap.conj() / overlap.norm();
        WaveFunction {
            psi: self.psi.map(move |z| z * phase),
            projective: true,
        }
    }

    /// Sup-norm gap after phase alignment (plain gap when comparisons
    /// are not projective).
    pub fn sup_distance(&self, other: &WaveFunction) -> f64 {
        let aligned = self.aligned_to(other);
        aligned.psi.zip_map(&other.psi, |a, b| a - b).sup_norm()
    }
}

/// Lift `(ρ, θ)` to `ψ = √ρ·e^{iθ/2}`; unit norm and `|ψ|² = ρ` hold by
/// construction.
pub fn madelung_forward(p: &CotangentPoint) -> WaveFunction {
    let psi = p
        .rho
        .field()
        .zip_map_complex(&p.theta, |r, t| Complex64::from_polar(r.sqrt(), 0.5 * t));
    WaveFunction {
        psi,
        projective: true,
    }
}

/// Momentum-map components `(m, ρ) = (Im(ψ̄ψ′), |ψ|²)`; no positivity
/// requirement on `ψ`.
pub fn momentum_map(psi: &WaveFunction) -> (RealField, RealField) {
    let d = psi.psi.derivative(1);
    let m = psi
        .psi
        .zip_map(&d, |z, dz| Complex64::new((z.conj() * dz).im, 0.0))
        .re();
    (m, psi.psi.modulus_sq())
}

/// Recover `(ρ, θ)` from `ψ`: `ρ = |ψ|²`, `θ = 2·unwrapped arg ψ`,
/// gauge-fixed by subtracting `∫θρμ`. The phase is unwrapped along the
/// grid with 2π jump correction; a nonzero total winding means `θ` is
/// not a function on the circle and is an error.
pub fn madelung_inverse(psi: &WaveFunction) -> Result<CotangentPoint> {
    let values = psi.psi.values();
    let n = values.len();
    let min = psi.psi.modulus().min();
    if min <= tol::MODULUS_FLOOR {
        return Err(Error::VanishingModulus { min });
    }
    // phase increments from consecutive ratios, each in (-π, π]
    let mut half_theta = alloc::vec![0.0f64; n];
    half_theta[0] = values[0].arg();
    let mut total = 0.0;
    for j in 0..n {
        let inc = (values[(j + 1) % n] * values[j].conj()).arg();
        total += inc;
        if j + 1 < n {
            half_theta[j + 1] = half_theta[j] + inc;
        }
    }
    let winding = (total / core::f64::consts::TAU).round() as i32;
    if winding != 0 {
        return Err(Error::NonzeroWinding { winding });
    }
    let grid = psi.psi.grid().clone();
    let theta = grid.from_samples(half_theta.iter().map(|t| 2.0 * t).collect())?;
    let rho = DensityField::new(psi.psi.modulus_sq())?;
    CotangentPoint::gauged(rho, theta)
}

/// Differential of the lift: `ψ̇ = (ρ̇/(2√ρ) + i√ρ·θ̇/2)·e^{iθ/2}`,
/// with `θ̇` taken as given (no projection), so it matches finite
/// differences of `madelung_forward` along arbitrary smooth curves.
pub fn madelung_differential(p: &CotangentPoint, v: &CotangentTangent) -> ComplexField {
    let psi = madelung_forward(p);
    // ψ̇ = ψ·(ρ̇/(2ρ) + iθ̇/2)
    let factor = ComplexField::from_re_im(
        &v.rho_dot
            .field()
            .zip_map(p.rho.field(), |rd, r| 0.5 * rd / r),
        &v.theta_dot.map(|t| 0.5 * t),
    );
    psi.psi.zip_map(&factor, |z, f| z * f)
}

/// Sasaki–Fisher-Rao metric
/// `¼∫(ρ̇_v ρ̇_w/ρ + θ̇_v θ̇_w ρ)μ` with both phase velocities projected
/// to satisfy `∫θ̇ρμ = 0`.
pub fn sasaki_fr_metric(p: &CotangentPoint, v: &CotangentTangent, w: &CotangentTangent) -> f64 {
    let tv = v.theta_dot_projected(&p.rho);
    let tw = w.theta_dot_projected(&p.rho);
    let density_part = v
        .rho_dot()
        .field()
        .zip_map(w.rho_dot().field(), |a, b| a * b)
        .zip_map(p.rho.field(), |ab, r| ab / r);
    let phase_part = tv
        .zip_map(&tw, |a, b| a * b)
        .zip_map(p.rho.field(), |ab, r| ab * r);
    0.25 * (density_part.integrate() + phase_part.integrate())
}

/// Fubini–Study metric
/// `Re[⟨a,b⟩/⟨ψ,ψ⟩ − ⟨a,ψ⟩⟨ψ,b⟩/⟨ψ,ψ⟩²]`; invariant under
/// `a ↦ a + cψ` for complex constants `c`.
pub fn fubini_study_metric(psi: &WaveFunction, a: &ComplexField, b: &ComplexField) -> f64 {
    let n = psi.psi.inner(&psi.psi).re;
    let direct = a.inner(b);
    let vertical = a.inner(&psi.psi) * psi.psi.inner(b);
    (direct / n - vertical / (n * n)).re
}

/// Canonical symplectic pairing `Ω(v,w) = ∫(θ̇_w ρ̇_v − θ̇_v ρ̇_w)μ`.
pub fn canonical_symplectic(v: &CotangentTangent, w: &CotangentTangent) -> f64 {
    let first = w.theta_dot().inner(v.rho_dot().field());
    let second = v.theta_dot().inner(w.rho_dot().field());
    first - second
}

/// Projective symplectic pairing `Im⟨a_h, b_h⟩` with the vertical
/// component `⟨ψ,·⟩ψ/⟨ψ,ψ⟩` removed from both arguments.
pub fn projective_symplectic(psi: &WaveFunction, a: &ComplexField, b: &ComplexField) -> f64 {
    let n = psi.psi.inner(&psi.psi).re;
    let direct = a.inner(b);
    let vertical = a.inner(&psi.psi) * psi.psi.inner(b);
    (direct - vertical / n).im
}

/// Great-circle geodesic of the Fubini–Study metric:
/// `ψ(t) = cos(st)ψ₀ + sin(st)v₀/s` with speed `s = ‖v₀‖`.
/// Requires `v₀` horizontal (`⟨ψ₀,v₀⟩ ≈ 0`) and nonzero.
pub fn fs_geodesic(psi0: &WaveFunction, v0: &ComplexField, t: f64) -> Result<WaveFunction> {
    let overlap = psi0.psi.inner(v0).norm();
    if overlap > tol::GAUGE_TOL {
        return Err(Error::NonHorizontal { overlap });
    }
    let s = v0.norm();
    if s <= tol::DENSITY_FLOOR {
        return Err(Error::ZeroVelocity);
    }
    let (c, k) = ((s * t).cos(), (s * t).sin() / s);
    let psi = psi0.psi.zip_map(v0, move |p, v| p * c + v * k);
    WaveFunction::new(psi)
}

/// Lift of a diffeomorphism/phase pair: `(φₓ, α) ↦ √φₓ·e^{iα/2}` for a
/// positive unit-mass derivative `φₓ`. Same formula as the cotangent
/// lift with `ρ = φₓ` and `θ = α` up to the gauge constant.
pub fn lenells_map(phi_x: &RealField, alpha: &RealField) -> Result<WaveFunction> {
    let min = phi_x.min();
    if min <= tol::DENSITY_FLOOR {
        return Err(Error::NonPositiveField { min });
    }
    let mass = phi_x.integrate();
    if (mass - 1.0).abs() > tol::MASS_TOL {
        return Err(Error::NonUnitMass { mass });
    }
    let psi = phi_x.zip_map_complex(alpha, |r, t| Complex64::from_polar(r.sqrt(), 0.5 * t));
    WaveFunction::new(psi)
}
