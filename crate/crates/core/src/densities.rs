//! Geometry of probability densities on the circle.
//!
//! Densities are strictly positive fields of unit mass under `μ = dx/2π`.
//! The square-root map identifies them with the positive orthant of the
//! unit sphere in L²(μ), turning the Fisher–Rao metric
//! `¼∫(ρ̇/ρ)² ρ μ` into the round sphere metric; geodesics, distance and
//! Newton's equation all come from that picture. The Wasserstein–Otto
//! metric pairs tangents through weighted Poisson potentials instead.

// no_std float transcendentals; shadowed by std inherent methods in tests
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{solve_weighted_poisson, RealField};
use crate::tol;

/// Strictly positive field with unit mass: a probability density.
#[derive(Debug, Clone, PartialEq)]
pub struct DensityField {
    field: RealField,
}

impl DensityField {
    /// Validate positivity (floor `1e-12`, hard error — never clamped)
    /// and unit mass.
    pub fn new(field: RealField) -> Result<Self> {
        let min = field.min();
        if min <= tol::DENSITY_FLOOR {
            return Err(Error::NonPositiveDensity { min });
        }
        let mass = field.integrate();
        if (mass - 1.0).abs() > tol::MASS_TOL {
            return Err(Error::NonUnitMass { mass });
        }
        Ok(DensityField { field })
    }

    /// Divide by the mass, then validate. Positivity is still required.
    pub fn normalized(field: RealField) -> Result<Self> {
        let mass = field.integrate();
        if mass <= tol::DENSITY_FLOOR {
            return Err(Error::NonPositiveDensity { min: field.min() });
        }
        DensityField::new(field.map(|v| v / mass))
    }

    /// The underlying samples.
    pub fn field(&self) -> &RealField {
        &self.field
    }

    /// Consume and return the underlying field.
    pub fn into_field(self) -> RealField {
        self.field
    }

    /// Square-root map onto the unit sphere of L²(μ).
    ///
    /// `∫(√ρ)²μ = ∫ρμ = 1` exactly, so no renormalization happens here.
    pub fn sqrt(&self) -> SphereField {
        SphereField {
            field: self.field.map(f64::sqrt),
        }
    }
}

/// Mean-zero field: a tangent vector to the space of densities.
#[derive(Debug, Clone, PartialEq)]
pub struct TangentDensity {
    field: RealField,
}

impl TangentDensity {
    /// Validate `|∫ a μ| ≤ 1e-10`.
    pub fn new(field: RealField) -> Result<Self> {
        let mean = field.integrate();
        if mean.abs() > tol::MEAN_TOL {
            return Err(Error::NonZeroMean { mean });
        }
        Ok(TangentDensity { field })
    }

    /// Project onto mean-zero fields by subtracting the mean.
    pub fn projected(field: RealField) -> Self {
        let mean = field.integrate();
        TangentDensity {
            field: field.map(move |v| v - mean),
        }
    }

    /// The underlying samples.
    pub fn field(&self) -> &RealField {
        &self.field
    }

    /// Consume and return the underlying field.
    pub fn into_field(self) -> RealField {
        self.field
    }
}

/// Unit-norm field in L²(μ): a point of the real sphere.
#[derive(Debug, Clone, PartialEq)]
pub struct SphereField {
    field: RealField,
}

impl SphereField {
    /// Validate `|‖f‖ − 1| ≤ 1e-10`.
    pub fn new(field: RealField) -> Result<Self> {
        let norm = field.norm();
        if (norm - 1.0).abs() > tol::NORM_TOL {
            return Err(Error::NonUnitNorm { norm });
        }
        Ok(SphereField { field })
    }

    /// Scale to unit norm, then validate.
    pub fn normalized(field: RealField) -> Result<Self> {
        let norm = field.norm();
        if norm <= tol::DENSITY_FLOOR {
            return Err(Error::NonUnitNorm { norm });
        }
        SphereField::new(field.map(|v| v / norm))
    }

    /// The underlying samples.
    pub fn field(&self) -> &RealField {
        &self.field
    }

    /// Inverse of the square-root map: `ρ = f²`. Unit mass is automatic;
    /// positivity still gates (a vanishing `f` has no density below it).
    pub fn to_density(&self) -> Result<DensityField> {
        DensityField::new(self.field.map(|v| v * v))
    }
}

/// Fisher–Rao metric `¼ ∫ (a·b/ρ) μ` on tangents at `ρ`.
pub fn fisher_rao_metric(rho: &DensityField, a: &TangentDensity, b: &TangentDensity) -> f64 {
    let integrand = a
        .field()
        .zip_map(b.field(), |x, y| x * y)
        .zip_map(rho.field(), |p, r| p / r);
    0.25 * integrand.integrate()
}

/// Fisher information `⅛ ∫ (ρ′)²/ρ μ` with a spectral derivative.
pub fn fisher_information(rho: &DensityField) -> f64 {
    let d = rho.field().derivative(1);
    let integrand = d.zip_map(rho.field(), |g, r| g * g / r);
    0.125 * integrand.integrate()
}

/// Great-circle Fisher–Rao geodesic between two densities.
///
/// Built once from the endpoints; densities, velocities and second
/// derivatives along the curve are then analytic in `t` (no time
/// differencing). `t = 0` and `t = 1` reproduce the endpoints.
#[derive(Debug, Clone)]
pub struct FisherRaoGeodesic {
    f0: RealField,
    f1: RealField,
    distance: f64,
}

impl FisherRaoGeodesic {
    /// Connect two densities. Identical endpoints (sphere distance below
    /// `1e-12`) yield the constant curve; near-antipodal endpoints are an
    /// error (unreachable for strictly positive densities, but gated).
    pub fn new(rho0: &DensityField, rho1: &DensityField) -> Result<Self> {
        let f0 = rho0.sqrt().field.clone();
        let f1 = rho1.sqrt().field.clone();
        let overlap = f0.inner(&f1).clamp(-1.0, 1.0);
        let distance = overlap.acos();
        if distance >= core::f64::consts::PI - tol::ANTIPODAL_GAP {
            return Err(Error::AntipodalEndpoints { distance });
        }
        Ok(FisherRaoGeodesic { f0, f1, distance })
    }

    /// Great-circle distance `arccos ∫√(ρ₀ρ₁) μ`; equals the Fisher–Rao
    /// length of the curve under the `¼`-normalized metric.
    pub fn distance(&self) -> f64 {
        self.distance
    }

    /// Sphere point `f(t)`.
    pub fn sphere_point(&self, t: f64) -> RealField {
        let d = self.distance;
        if d <= tol::IDENTICAL_ENDPOINTS {
            return self.f0.clone();
        }
        let (a, b) = (((1.0 - t) * d).sin() / d.sin(), (t * d).sin() / d.sin());
        self.f0.zip_map(&self.f1, |x, y| a * x + b * y)
    }

    /// Sphere velocity `ḟ(t)`.
    pub fn sphere_velocity(&self, t: f64) -> RealField {
        let d = self.distance;
        if d <= tol::IDENTICAL_ENDPOINTS {
            return self.f0.map(|_| 0.0);
        }
        let (a, b) = (
            -d * ((1.0 - t) * d).cos() / d.sin(),
            d * (t * d).cos() / d.sin(),
        );
        self.f0.zip_map(&self.f1, |x, y| a * x + b * y)
    }

    /// Density `ρ(t) = f(t)²`.
    pub fn density(&self, t: f64) -> Result<DensityField> {
        DensityField::new(self.sphere_point(t).map(|v| v * v))
    }

    /// Velocity `ρ̇(t) = 2 f ḟ` (mean-zero along the curve).
    pub fn velocity(&self, t: f64) -> TangentDensity {
        let f = self.sphere_point(t);
        let fd = self.sphere_velocity(t);
        TangentDensity::projected(f.zip_map(&fd, |a, b| 2.0 * a * b))
    }

    /// Acceleration `ρ̈(t) = 2ḟ² − 2d²·ρ` (great circles obey `f̈ = −d²f`).
    pub fn acceleration(&self, t: f64) -> RealField {
        let f = self.sphere_point(t);
        let fd = self.sphere_velocity(t);
        let d2 = self.distance * self.distance;
        f.zip_map(&fd, move |a, b| 2.0 * b * b - 2.0 * d2 * a * a)
    }
}

/// Wasserstein–Otto metric at `ρ`, pairing tangents through their
/// continuity potentials: solve `(ρθ′)′ = a` for each tangent and return
/// `∫ θ_a′ θ_b′ ρ μ`.
pub fn wasserstein_otto_metric(
    rho: &DensityField,
    a: &TangentDensity,
    b: &TangentDensity,
) -> Result<f64> {
    let ta = solve_weighted_poisson(rho.field(), a.field())?.derivative(1);
    let tb = solve_weighted_poisson(rho.field(), b.field())?.derivative(1);
    Ok((&(&ta * &tb) * rho.field()).integrate())
}

/// Internal-energy law `e(ρ)` for barotropic potentials.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum EnergyLaw {
    /// `e(ρ) = aρ + b`; `a = ½, b = 0` is the shallow-water law.
    Affine { a: f64, b: f64 },
    /// `e(ρ) = a·ρ^γ`.
    Power { a: f64, gamma: f64 },
}

impl EnergyLaw {
    /// `e(ρ)`.
    pub fn energy(&self, rho: f64) -> f64 {
        match *self {
            EnergyLaw::Affine { a, b } => a * rho + b,
            EnergyLaw::Power { a, gamma } => a * rho.powf(gamma),
        }
    }

    /// `e′(ρ)`.
    pub fn energy_prime(&self, rho: f64) -> f64 {
        match *self {
            EnergyLaw::Affine { a, .. } => a,
            EnergyLaw::Power { a, gamma } => a * gamma * rho.powf(gamma - 1.0),
        }
    }

    /// Pressure `P(ρ) = e′(ρ)·ρ²`.
    pub fn pressure(&self, rho: f64) -> f64 {
        self.energy_prime(rho) * rho * rho
    }
}

/// Pointwise nonlinearity `f(|ψ|²)` and its antiderivative `F` (`F′ = f`).
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub enum Nonlinearity {
    /// No nonlinearity.
    #[default]
    Zero,
    /// `f(a) = κ·a` (cubic when used in a wave equation).
    Cubic { kappa: f64 },
    /// `f(a) = ½(a − offset)²`, vanishing at the reference level.
    SquaredDeviation { offset: f64 },
}

impl Nonlinearity {
    /// `f(a)`.
    pub fn f(&self, a: f64) -> f64 {
        match *self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Cubic { kappa } => kappa * a,
            Nonlinearity::SquaredDeviation { offset } => 0.5 * (a - offset) * (a - offset),
        }
    }

    /// An antiderivative `F` with `F′ = f` (normalization fixed per law).
    pub fn antiderivative(&self, a: f64) -> f64 {
        match *self {
            Nonlinearity::Zero => 0.0,
            Nonlinearity::Cubic { kappa } => 0.5 * kappa * a * a,
            Nonlinearity::SquaredDeviation { offset } => {
                let d = a - offset;
                d * d * d / 6.0
            }
        }
    }
}

/// Additive potential functional `Ū(ϱ)` on densities.
///
/// Terms: a multiplicative potential `∫Vϱ`, a barotropic internal energy
/// `∫e(ρ)ϱ`, a multiple of the Fisher information, and a pointwise
/// integral `∫F(ρ)μ`. The functional derivative `δŪ/δϱ` is taken in the
/// L²(μ) pairing throughout.
#[derive(Debug, Clone, Default)]
pub struct PotentialSpec {
    /// Multiplicative potential `V`.
    pub classical: Option<RealField>,
    /// Internal-energy law for `∫ e(ρ) ϱ`.
    pub barotropic: Option<EnergyLaw>,
    /// Coefficient `c` on the Fisher information (`0` = absent).
    pub quantum: f64,
    /// Law `f` for `∫ F(ρ) μ` with `F′ = f`.
    pub integral_f: Nonlinearity,
}

impl PotentialSpec {
    /// The zero potential.
    pub fn zero() -> Self {
        PotentialSpec::default()
    }

    /// Only `∫Vϱ`.
    pub fn classical(v: RealField) -> Self {
        PotentialSpec {
            classical: Some(v),
            ..Default::default()
        }
    }

    /// Only `∫e(ρ)ϱ`.
    pub fn barotropic(law: EnergyLaw) -> Self {
        PotentialSpec {
            barotropic: Some(law),
            ..Default::default()
        }
    }

    /// Only `c·I(ϱ)`.
    pub fn quantum(c: f64) -> Self {
        PotentialSpec {
            quantum: c,
            ..Default::default()
        }
    }

    /// Only `∫F(ρ)μ`.
    pub fn integral_f(law: Nonlinearity) -> Self {
        PotentialSpec {
            integral_f: law,
            ..Default::default()
        }
    }

    /// `Ū(ϱ)`.
    pub fn value(&self, rho: &DensityField) -> f64 {
        let mut total = 0.0;
        if let Some(v) = &self.classical {
            total += v.inner(rho.field());
        }
        if let Some(law) = &self.barotropic {
            total += rho.field().map(|r| law.energy(r) * r).integrate();
        }
        if self.quantum != 0.0 {
            total += self.quantum * fisher_information(rho);
        }
        if !matches!(self.integral_f, Nonlinearity::Zero) {
            total += rho
                .field()
                .map(|r| self.integral_f.antiderivative(r))
                .integrate();
        }
        total
    }

    /// `δŪ/δϱ` in the L²(μ) pairing:
    /// `V + [e(ρ) + ρe′(ρ)] − (c/2)(√ρ)″/√ρ + f(ρ)`.
    pub fn derivative(&self, rho: &DensityField) -> RealField {
        let mut out = rho.field().map(|_| 0.0);
        if let Some(v) = &self.classical {
            out = &out + v;
        }
        if let Some(law) = self.barotropic {
            out = &out
                + &rho
                    .field()
                    .map(move |r| law.energy(r) + r * law.energy_prime(r));
        }
        if self.quantum != 0.0 {
            let s = rho.field().map(f64::sqrt);
            let c = self.quantum;
            out = &out
                + &s.derivative(2)
                    .zip_map(&s, move |dd, sv| -0.5 * c * dd / sv);
        }
        if !matches!(self.integral_f, Nonlinearity::Zero) {
            let law = self.integral_f;
            out = &out + &rho.field().map(move |r| law.f(r));
        }
        out
    }
}

/// Newton's equation on densities in the Fisher–Rao geometry:
/// returns `(ρ̈, λ)` with
/// `ρ̈ = ρ̇²/(2ρ) − (δŪ/δϱ)ρ + λρ` and the mass-neutral multiplier
/// `λ = ∫(δŪ/δϱ)ρ μ − ∫ρ̇²/(2ρ) μ`, so `∫ρ̈μ = 0` analytically.
pub fn fr_newton_accel(
    rho: &DensityField,
    rho_dot: &TangentDensity,
    spec: &PotentialSpec,
) -> (RealField, f64) {
    let kinetic = rho_dot
        .field()
        .zip_map(rho.field(), |p, r| p * p / (2.0 * r));
    let force = spec.derivative(rho);
    let lambda = force.inner(rho.field()) - kinetic.integrate();
    let accel = kinetic
        .zip_map(&(&force * rho.field()), |k, f| k - f)
        .zip_map(rho.field(), move |v, r| v + lambda * r);
    (accel, lambda)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::PeriodicGrid;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(n).unwrap()
    }

    fn density(n: usize, f: impl FnMut(f64) -> f64) -> DensityField {
        DensityField::new(grid(n).real_field(f)).unwrap()
    }

    #[test]
    fn density_gates() {
        let g = grid(32);
        assert!(matches!(
            DensityField::new(g.real_field(f64::cos)),
            Err(Error::NonPositiveDensity { .. })
        ));
        assert!(matches!(
            DensityField::new(g.constant(2.0)),
            Err(Error::NonUnitMass { .. })
        ));
        let d = DensityField::normalized(g.real_field(|x| 2.0 + x.cos())).unwrap();
        assert_abs_diff_eq!(d.field().integrate(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            TangentDensity::new(g.constant(0.5)),
            Err(Error::NonZeroMean { .. })
        ));
        assert!(matches!(
            SphereField::new(g.constant(2.0)),
            Err(Error::NonUnitNorm { .. })
        ));
    }

    #[test]
    fn sqrt_map_is_an_isometry_onto_the_sphere() {
        let rho = density(64, |x| 1.0 + 0.5 * x.cos());
        let f = rho.sqrt();
        assert_abs_diff_eq!(f.field().norm(), 1.0, epsilon = 1e-14);
        let back = f.to_density().unwrap();
        for (a, b) in back.field().values().iter().zip(rho.field().values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn fisher_rao_metric_flat_example() {
        let rho = density(64, |_| 1.0);
        let a = TangentDensity::new(grid(64).real_field(f64::cos)).unwrap();
        assert_abs_diff_eq!(fisher_rao_metric(&rho, &a, &a), 0.125, epsilon = 1e-15);
    }

    #[test]
    fn fisher_rao_metric_is_symmetric_and_positive() {
        let rho = density(64, |x| 1.0 + 0.3 * (2.0 * x).sin());
        let a =
            TangentDensity::new(grid(64).real_field(|x| x.cos() - 0.2 * (3.0 * x).sin())).unwrap();
        let b = TangentDensity::new(grid(64).real_field(|x| (2.0 * x).cos())).unwrap();
        assert_abs_diff_eq!(
            fisher_rao_metric(&rho, &a, &b),
            fisher_rao_metric(&rho, &b, &a),
            epsilon = 1e-15
        );
        assert!(fisher_rao_metric(&rho, &a, &a) > 0.0);
    }

    // Frozen oracle values (30-digit quadrature of the continuum
    // integrals; the grid quadrature is spectrally exact for these
    // analytic integrands, so they must agree to round-off):
    //   mean sqrt(1 + 0.5 sin x)          = 0.98334265077516523
    //   arccos of that                    = 0.18277746193028786
    //   (1/8) mean of (0.25 sin²x)/(1+0.5 cos x)
    //     = (1 − √(1−a²))/8 at a = ½      = 0.016746824526945169
    #[test]
    fn geodesic_distance_matches_frozen_oracle() {
        let rho0 = density(64, |_| 1.0);
        let rho1 = density(64, |x| 1.0 + 0.5 * x.sin());
        let geo = FisherRaoGeodesic::new(&rho0, &rho1).unwrap();
        assert_abs_diff_eq!(geo.distance(), 0.18277746193028786, epsilon = 1e-13);
    }

    #[test]
    fn fisher_information_matches_frozen_oracle() {
        let rho = density(64, |x| 1.0 + 0.5 * x.cos());
        assert_abs_diff_eq!(
            fisher_information(&rho),
            0.016_746_824_526_945_17,
            epsilon = 1e-13
        );
        // identity with the sphere Dirichlet energy ½∫((√ρ)′)²μ
        let s = rho.field().map(f64::sqrt).derivative(1);
        assert_abs_diff_eq!(fisher_information(&rho), 0.5 * s.inner(&s), epsilon = 1e-12);
    }

    #[test]
    fn geodesic_hits_both_endpoints_and_stays_valid() {
        let rho0 = density(64, |x| 1.0 + 0.4 * x.cos());
        let rho1 = density(64, |x| 1.0 + 0.5 * x.sin());
        let geo = FisherRaoGeodesic::new(&rho0, &rho1).unwrap();
        for (t, want) in [(0.0, &rho0), (1.0, &rho1)] {
            let got = geo.density(t).unwrap();
            for (a, b) in got.field().values().iter().zip(want.field().values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
        for &t in &[0.25, 0.5, 0.75] {
            let rho = geo.density(t).unwrap();
            assert_abs_diff_eq!(rho.field().integrate(), 1.0, epsilon = 1e-14);
        }
    }

    #[test]
    fn identical_endpoints_degenerate_gracefully() {
        let rho = density(64, |x| 1.0 + 0.2 * x.sin());
        let geo = FisherRaoGeodesic::new(&rho, &rho).unwrap();
        assert_abs_diff_eq!(geo.distance(), 0.0, epsilon = 1e-7);
        let mid = geo.density(0.5).unwrap();
        for (a, b) in mid.field().values().iter().zip(rho.field().values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-12);
        }
    }

    #[test]
    fn geodesic_speed_is_constant_and_matches_distance() {
        // independent distance route: the Fisher-Rao speed of the curve
        // is constant and equals the sphere distance
        let rho0 = density(64, |x| 1.0 + 0.4 * x.cos());
        let rho1 = density(64, |x| 1.0 + 0.5 * x.sin());
        let geo = FisherRaoGeodesic::new(&rho0, &rho1).unwrap();
        for &t in &[0.0, 0.3, 0.5, 0.9, 1.0] {
            let rho = geo.density(t).unwrap();
            let v = geo.velocity(t);
            let speed = fisher_rao_metric(&rho, &v, &v).sqrt();
            assert_abs_diff_eq!(speed, geo.distance(), epsilon = 1e-12);
        }
    }

    #[test]
    fn wasserstein_otto_flat_example() {
        let rho = density(64, |_| 1.0);
        let a = TangentDensity::new(grid(64).real_field(f64::cos)).unwrap();
        assert_abs_diff_eq!(
            wasserstein_otto_metric(&rho, &a, &a).unwrap(),
            0.5,
            epsilon = 1e-12
        );
        let b = TangentDensity::new(grid(64).real_field(|x| (2.0 * x).sin())).unwrap();
        assert_abs_diff_eq!(
            wasserstein_otto_metric(&rho, &a, &b).unwrap(),
            wasserstein_otto_metric(&rho, &b, &a).unwrap(),
            epsilon = 1e-13
        );
    }

    #[test]
    fn potential_terms_closed_forms() {
        let g = grid(64);
        let rho = density(64, |x| 1.0 + 0.5 * x.cos());

        // classical: derivative is V itself, value is ∫Vρμ
        let v = g.real_field(f64::cos);
        let spec = PotentialSpec::classical(v.clone());
        let d = spec.derivative(&rho);
        for (a, b) in d.values().iter().zip(v.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }
        assert_abs_diff_eq!(spec.value(&rho), v.inner(rho.field()), epsilon = 1e-15);

        // shallow water e = ρ/2: δŪ/δϱ = ρ
        let spec = PotentialSpec::barotropic(EnergyLaw::Affine { a: 0.5, b: 0.0 });
        let d = spec.derivative(&rho);
        for (a, b) in d.values().iter().zip(rho.field().values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-15);
        }

        // power law e = aρ^γ: δŪ/δϱ = a(1+γ)ρ^γ
        let spec = PotentialSpec::barotropic(EnergyLaw::Power { a: 0.3, gamma: 2.0 });
        let d = spec.derivative(&rho);
        let want = rho.field().map(|r| 0.3 * 3.0 * r * r);
        for (a, b) in d.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-13);
        }

        // quantum term against the closed form for ρ ∝ (1+q cos x)²
        let q = 0.25;
        let rho = DensityField::normalized(g.real_field(|x| {
            let s = 1.0 + q * x.cos();
            s * s
        }))
        .unwrap();
        let spec = PotentialSpec::quantum(2.0);
        let d = spec.derivative(&rho);
        let want = g.real_field(|x| (2.0 / 2.0) * q * x.cos() / (1.0 + q * x.cos()));
        for (a, b) in d.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-10);
        }
    }

    #[test]
    fn potential_derivative_pairs_with_value_variation() {
        // directional-derivative oracle for the L²(μ) pairing:
        // dŪ(ρ)[h] = ∫ (δŪ/δϱ) h μ for mean-zero h
        let g = grid(64);
        let rho = density(64, |x| 1.0 + 0.3 * x.cos() + 0.1 * (2.0 * x).sin());
        let h = g.real_field(|x| x.cos() - 0.5 * (3.0 * x).sin());
        let spec = PotentialSpec {
            classical: Some(g.real_field(|x| 0.7 * x.sin())),
            barotropic: Some(EnergyLaw::Power { a: 0.2, gamma: 1.5 }),
            quantum: 1.3,
            integral_f: Nonlinearity::Cubic { kappa: 0.4 },
        };
        let eps = 1e-6;
        let plus = DensityField::new(rho.field().zip_map(&h, |r, v| r + eps * v)).unwrap();
        let minus = DensityField::new(rho.field().zip_map(&h, |r, v| r - eps * v)).unwrap();
        let fd = (spec.value(&plus) - spec.value(&minus)) / (2.0 * eps);
        let pairing = spec.derivative(&rho).inner(&h);
        assert_abs_diff_eq!(fd, pairing, epsilon = 1e-8);
    }

    #[test]
    fn newton_flat_free_example() {
        // ρ ≡ 1, ρ̇ = cos x, no potential: λ = −¼ and ρ̈ = cos(2x)/4
        let rho = density(64, |_| 1.0);
        let v = TangentDensity::new(grid(64).real_field(f64::cos)).unwrap();
        let (acc, lambda) = fr_newton_accel(&rho, &v, &PotentialSpec::zero());
        assert_abs_diff_eq!(lambda, -0.25, epsilon = 1e-15);
        let want = grid(64).real_field(|x| (2.0 * x).cos() / 4.0);
        for (a, b) in acc.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
        assert_abs_diff_eq!(acc.integrate(), 0.0, epsilon = 1e-15);
    }

    #[test]
    fn newton_classical_force_example() {
        // at rest under V = cos x: λ = ∫Vρ = 0 and ρ̈ = −V
        let g = grid(64);
        let rho = density(64, |_| 1.0);
        let v = TangentDensity::new(g.zeros()).unwrap();
        let spec = PotentialSpec::classical(g.real_field(f64::cos));
        let (acc, lambda) = fr_newton_accel(&rho, &v, &spec);
        assert_abs_diff_eq!(lambda, 0.0, epsilon = 1e-15);
        let want = g.real_field(|x| -x.cos());
        for (a, b) in acc.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(a, b, epsilon = 1e-14);
        }
    }

    #[test]
    fn geodesic_satisfies_newton_identically() {
        // analytic ρ̈ along the great circle equals the Newton
        // acceleration with zero potential, to round-off
        let rho0 = density(64, |x| 1.0 + 0.4 * x.cos());
        let rho1 = density(64, |x| 1.0 + 0.5 * x.sin());
        let geo = FisherRaoGeodesic::new(&rho0, &rho1).unwrap();
        for &t in &[0.1, 0.5, 0.8] {
            let rho = geo.density(t).unwrap();
            let v = geo.velocity(t);
            let (acc, _) = fr_newton_accel(&rho, &v, &PotentialSpec::zero());
            let want = geo.acceleration(t);
            for (a, b) in acc.values().iter().zip(want.values()) {
                assert_abs_diff_eq!(a, b, epsilon = 1e-12);
            }
        }
    }
}
