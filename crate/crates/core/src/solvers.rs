//! Time integrators for the circle-based flows.
//!
//! One accuracy model across the board: classical RK4 for every flow
//! written in real variables, Strang splitting for the Schrödinger
//! family. Right-hand sides of the transported densities are exact
//! spatial derivatives, so their integrals are conserved to round-off;
//! positivity is a hard error (`VacuumFormation`), never regularized.

use num_complex::Complex64;
// no_std float transcendentals; shadowed by std inherent methods in tests
#[allow(unused_imports)]
use num_traits::Float;

use crate::densities::{DensityField, EnergyLaw, Nonlinearity, PotentialSpec, SphereField};
use crate::error::{Error, Result};
use crate::grid::RealField;
use crate::madelung::{CotangentPoint, WaveFunction};
use crate::tol;

/// Hamiltonian state `(ρ, θ)` for the potential-flow system.
#[derive(Debug, Clone, PartialEq)]
pub struct HydroState {
    point: CotangentPoint,
}

impl HydroState {
    /// Wrap a cotangent point.
    pub fn new(point: CotangentPoint) -> Self {
        HydroState { point }
    }

    /// The underlying cotangent point.
    pub fn point(&self) -> &CotangentPoint {
        &self.point
    }

    /// Consume and return the cotangent point.
    pub fn into_point(self) -> CotangentPoint {
        self.point
    }
}

/// Compressible state `(ρ, u)` with velocity in place of a phase.
#[derive(Debug, Clone, PartialEq)]
pub struct BarotropicState {
    rho: DensityField,
    u: RealField,
}

impl BarotropicState {
    /// Pair a density with a velocity on the same grid.
    pub fn new(rho: DensityField, u: RealField) -> Result<Self> {
        if rho.field().grid() != u.grid() {
            return Err(Error::ShapeMismatch {
                expected: rho.field().len(),
                got: u.len(),
            });
        }
        Ok(BarotropicState { rho, u })
    }

    /// Density component.
    pub fn rho(&self) -> &DensityField {
        &self.rho
    }

    /// Velocity component.
    pub fn u(&self) -> &RealField {
        &self.u
    }
}

/// Constrained oscillator state `(f, ḟ)` on the unit sphere of L²(μ).
#[derive(Debug, Clone, PartialEq)]
pub struct NeumannState {
    f: SphereField,
    f_dot: RealField,
}

impl NeumannState {
    /// Validate tangency `|∫f·ḟμ| ≤ 1e-10`.
    pub fn new(f: SphereField, f_dot: RealField) -> Result<Self> {
        let overlap = f.field().inner(&f_dot).abs();
        if overlap > tol::GAUGE_TOL {
            return Err(Error::NonHorizontal { overlap });
        }
        Ok(NeumannState { f, f_dot })
    }

    /// Normalize `f` and remove the `f`-component of `ḟ`, then validate.
    pub fn projected(f: RealField, f_dot: RealField) -> Result<Self> {
        let f = SphereField::normalized(f)?;
        let c = f.field().inner(&f_dot);
        let f_field = f.field().clone();
        let f_dot = f_dot.zip_map(&f_field, move |v, fv| v - c * fv);
        NeumannState::new(f, f_dot)
    }

    /// Position on the sphere.
    pub fn f(&self) -> &SphereField {
        &self.f
    }

    /// Tangent velocity.
    pub fn f_dot(&self) -> &RealField {
        &self.f_dot
    }
}

/// Pair `(u, σ)` with the base-point gauge `u(0) = 0`.
#[derive(Debug, Clone, PartialEq)]
pub struct TwoHSState {
    u: RealField,
    sigma: RealField,
}

impl TwoHSState {
    /// Validate the gauge `|u(0)| ≤ 1e-10` and matching grids. The
    /// periodicity compatibility `∫u″μ = 0` holds exactly for spectral
    /// second derivatives.
    pub fn new(u: RealField, sigma: RealField) -> Result<Self> {
        if u.grid() != sigma.grid() {
            return Err(Error::ShapeMismatch {
                expected: u.len(),
                got: sigma.len(),
            });
        }
        let value = u.values()[0];
        if value.abs() > tol::MEAN_TOL {
            return Err(Error::GaugeViolation { value });
        }
        Ok(TwoHSState { u, sigma })
    }

    /// First component.
    pub fn u(&self) -> &RealField {
        &self.u
    }

    /// Second component.
    pub fn sigma(&self) -> &RealField {
        &self.sigma
    }
}

/// `y + c·k` on samples.
pub(crate) fn axpy(y: &RealField, k: &RealField, c: f64) -> RealField {
    y.zip_map(k, move |a, b| a + c * b)
}

/// RK4 update `y + dt/6·(k₁ + 2k₂ + 2k₃ + k₄)`.
pub(crate) fn rk4_combine(
    y: &RealField,
    k1: &RealField,
    k2: &RealField,
    k3: &RealField,
    k4: &RealField,
    dt: f64,
) -> RealField {
    let s = k1
        .zip_map(k2, |a, b| a + 2.0 * b)
        .zip_map(k3, |a, b| a + 2.0 * b)
        .zip_map(k4, |a, b| a + b);
    axpy(y, &s, dt / 6.0)
}

/// One RK4 step of a two-component system.
fn rk4_pair<F>(
    a0: &RealField,
    b0: &RealField,
    dt: f64,
    mut rhs: F,
) -> Result<(RealField, RealField)>
where
    F: FnMut(&RealField, &RealField) -> Result<(RealField, RealField)>,
{
    let (ka1, kb1) = rhs(a0, b0)?;
    let (ka2, kb2) = rhs(&axpy(a0, &ka1, 0.5 * dt), &axpy(b0, &kb1, 0.5 * dt))?;
    let (ka3, kb3) = rhs(&axpy(a0, &ka2, 0.5 * dt), &axpy(b0, &kb2, 0.5 * dt))?;
    let (ka4, kb4) = rhs(&axpy(a0, &ka3, dt), &axpy(b0, &kb3, dt))?;
    Ok((
        rk4_combine(a0, &ka1, &ka2, &ka3, &ka4, dt),
        rk4_combine(b0, &kb1, &kb2, &kb3, &kb4, dt),
    ))
}

/// One RK4 step of a single-component system.
fn rk4_one<F>(y0: &RealField, dt: f64, mut rhs: F) -> RealField
where
    F: FnMut(&RealField) -> RealField,
{
    let k1 = rhs(y0);
    let k2 = rhs(&axpy(y0, &k1, 0.5 * dt));
    let k3 = rhs(&axpy(y0, &k2, 0.5 * dt));
    let k4 = rhs(&axpy(y0, &k3, dt));
    rk4_combine(y0, &k1, &k2, &k3, &k4, dt)
}

/// Strang split step for `iψ̇ = −ψ″ + Vψ + f(|ψ|²)ψ`: half potential
/// phase, full kinetic Fourier factor `e^{−ik²dt}` (plane waves obey
/// `ω = k²`), half potential phase. Each factor is unitary, so the norm
/// is conserved exactly; the modulus is constant through each potential
/// sub-flow, making that factor exact as well.
pub fn step_schrodinger(
    psi: &WaveFunction,
    v: &RealField,
    nonlin: Nonlinearity,
    dt: f64,
) -> WaveFunction {
    let projective = psi.is_projective();
    let half = |field: &crate::grid::ComplexField| {
        let phase = field
            .modulus_sq()
            .zip_map(v, move |a, vv| vv + nonlin.f(a))
            .map(move |p| -0.5 * p * dt);
        field.zip_map(&phase.to_complex(), |z, p| {
            z * Complex64::from_polar(1.0, p.re)
        })
    };
    let after_potential = half(psi.psi());
    let after_kinetic =
        after_potential.fourier_multiplier(|k| Complex64::from_polar(1.0, -((k * k) as f64) * dt));
    let out = half(&after_kinetic);
    WaveFunction::new(out)
        .expect("unitary factors preserve the norm")
        .with_projective(projective)
}

/// Right-hand side of the potential-flow system at a raw `(ρ, θ)` pair.
fn hydro_rhs(
    rho: &RealField,
    theta: &RealField,
    spec: &PotentialSpec,
) -> Result<(RealField, RealField)> {
    let min = rho.min();
    if min <= tol::DENSITY_FLOOR {
        return Err(Error::VacuumFormation { min });
    }
    let density = DensityField::new(rho.clone())?;
    let dtheta = theta.derivative(1);
    let rho_dot = (&(rho * &dtheta) * -1.0).derivative(1);
    let force = spec.derivative(&density);
    let theta_dot = dtheta.zip_map(&force, |g, f| -0.5 * g * g - f);
    Ok((rho_dot, theta_dot))
}

/// One RK4 step of `ρ̇ = −(ρθ′)′`, `θ̇ = −½(θ′)² − δŪ/δϱ`, with the
/// phase gauge re-fixed afterwards. Density positivity is checked at
/// every stage.
pub fn step_hydro(s: &HydroState, spec: &PotentialSpec, dt: f64) -> Result<HydroState> {
    let (rho, theta) = (s.point().rho().field().clone(), s.point().theta().clone());
    let (rho_new, theta_new) = rk4_pair(&rho, &theta, dt, |r, t| hydro_rhs(r, t, spec))?;
    let min = rho_new.min();
    if min <= tol::DENSITY_FLOOR {
        return Err(Error::VacuumFormation { min });
    }
    let point = CotangentPoint::gauged(DensityField::new(rho_new)?, theta_new)?;
    Ok(HydroState::new(point))
}

/// One RK4 step of the compressible system
/// `ρ̇ = −(ρu)′`, `u̇ = −uu′ − P(ρ)′/ρ` with pressure `P = e′(ρ)ρ²`.
pub fn step_barotropic(s: &BarotropicState, law: EnergyLaw, dt: f64) -> Result<BarotropicState> {
    let rhs = |rho: &RealField, u: &RealField| {
        let min = rho.min();
        if min <= tol::DENSITY_FLOOR {
            return Err(Error::VacuumFormation { min });
        }
        let rho_dot = (&(rho * u) * -1.0).derivative(1);
        let pressure_grad = rho.map(|r| law.pressure(r)).derivative(1);
        let du = u.derivative(1);
        let u_dot = u
            .zip_map(&du, |uv, duv| -uv * duv)
            .zip_map(&pressure_grad.zip_map(rho, |pg, r| pg / r), |acc, q| {
                acc - q
            });
        Ok((rho_dot, u_dot))
    };
    let (rho_new, u_new) = rk4_pair(s.rho().field(), s.u(), dt, rhs)?;
    BarotropicState::new(DensityField::new(rho_new)?, u_new)
}

/// Constraint multiplier `λ = ∫(ḟ² + f·f″)μ` of the sphere-constrained
/// oscillator.
pub fn neumann_multiplier(s: &NeumannState) -> f64 {
    let f2 = s.f().field().derivative(2);
    s.f_dot().inner(s.f_dot()) + s.f().field().inner(&f2)
}

/// One RK4 step of `f̈ = f″ − λf` with `λ` recomputed at every stage;
/// afterwards `f` is renormalized and `ḟ` re-orthogonalized.
pub fn step_neumann(s: &NeumannState, dt: f64) -> NeumannState {
    let rhs = |f: &RealField, fd: &RealField| {
        let f2 = f.derivative(2);
        let lambda = fd.inner(fd) + f.inner(&f2);
        let accel = f2.zip_map(f, move |a, b| a - lambda * b);
        Ok((fd.clone(), accel))
    };
    let (f_new, fd_new) =
        rk4_pair(s.f().field(), s.f_dot(), dt, rhs).expect("sphere oscillator has no error paths");
    NeumannState::projected(f_new, fd_new).expect("projection restores the constraints")
}

/// Inertia-form right-hand side `ṁ = −um′ − 2u′m` with `u` recovered
/// through the inertia operator `m = ∫uμ − u″`.
fn much_rhs(m: &RealField) -> RealField {
    let u = m.invert_inertia();
    let dm = m.derivative(1);
    let du = u.derivative(1);
    u.zip_map(&dm, |uv, mv| uv * mv)
        .zip_map(&du.zip_map(m, |a, b| a * b), |t1, t2| -t1 - 2.0 * t2)
}

/// One RK4 step of the inertia-form transport equation, returned in the
/// velocity variable `u`.
pub fn step_much(u: &RealField, dt: f64) -> RealField {
    let m = u.apply_inertia();
    rk4_one(&m, dt, much_rhs).invert_inertia()
}

/// Rebuild `u` from `w = u″`: two mean-zero primitives, shifted so that
/// `u(0) = 0`.
fn rebuild_u(w: &RealField) -> Result<RealField> {
    let up = w.antiderivative()?;
    let uu = up.antiderivative()?;
    let base = uu.values()[0];
    Ok(uu.map(move |v| v - base))
}

/// One RK4 step of the two-component system
/// `u̇″ = −2u′u″ − uu‴ + σσ′`, `σ̇ = −(σu)′`, evolved in `(w, σ)` with
/// `w = u″`. Both right-hand sides are written as exact x-derivatives
/// (`ẇ = (−uw − ½(u′)² + ½σ²)′`), so `∫wμ` and `∫σμ` are conserved to
/// round-off and a vanishing `σ` stays exactly zero.
pub fn step_2hs(s: &TwoHSState, dt: f64) -> Result<TwoHSState> {
    let w0 = s.u().derivative(2);
    let rhs = |w: &RealField, sigma: &RealField| {
        let u = rebuild_u(w)?;
        let up = w.antiderivative()?;
        let flux = u
            .zip_map(w, |uv, wv| -uv * wv)
            .zip_map(&up, |acc, g| acc - 0.5 * g * g)
            .zip_map(sigma, |acc, g| acc + 0.5 * g * g);
        let sigma_dot = sigma.zip_map(&u, |a, b| -a * b).derivative(1);
        Ok((flux.derivative(1), sigma_dot))
    };
    let (w_new, sigma_new) = rk4_pair(&w0, s.sigma(), dt, rhs)?;
    let mean = w_new.integrate();
    if mean.abs() > tol::COMPATIBILITY_TOL {
        return Err(Error::NonZeroMean { mean });
    }
    TwoHSState::new(rebuild_u(&w_new)?, sigma_new)
}

/// `½‖ψ′‖² + ½∫(V|ψ|² + F(|ψ|²))μ` with `F′ = f`.
pub fn schrodinger_hamiltonian(psi: &WaveFunction, v: &RealField, nonlin: Nonlinearity) -> f64 {
    let kinetic = 0.5 * psi.psi().derivative(1).modulus_sq().integrate();
    let rho = psi.psi().modulus_sq();
    let potential = 0.5 * (v.inner(&rho) + rho.map(move |r| nonlin.antiderivative(r)).integrate());
    kinetic + potential
}

/// `½∫(θ′)²ρμ + Ū(ρ)`.
pub fn hydro_hamiltonian(s: &HydroState, spec: &PotentialSpec) -> f64 {
    let dtheta = s.point().theta().derivative(1);
    let kinetic = 0.5
        * dtheta
            .zip_map(&dtheta, |a, b| a * b)
            .zip_map(s.point().rho().field(), |g, r| g * r)
            .integrate();
    kinetic + spec.value(s.point().rho())
}

/// `½‖ψ′‖² − ½‖(|ψ|)′‖² + ∫e(|ψ|²)|ψ|²μ`; requires a nowhere-zero `ψ`
/// for the modulus derivative to be smooth.
pub fn nls_euler_hamiltonian(psi: &WaveFunction, law: Option<EnergyLaw>) -> f64 {
    let full = 0.5 * psi.psi().derivative(1).modulus_sq().integrate();
    let dmod = psi.psi().modulus().derivative(1);
    let modulus_part = 0.5 * dmod.inner(&dmod);
    let internal = match law {
        None => 0.0,
        Some(law) => psi
            .psi()
            .modulus_sq()
            .map(move |r| law.energy(r) * r)
            .integrate(),
    };
    full - modulus_part + internal
}
