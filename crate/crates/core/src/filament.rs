//! Closed curves in ℝ³ under the binormal flow, their Frenet data, and
//! the curvature–torsion wave field.
//!
//! Curves are sampled proportionally to arclength (the binormal flow
//! `γ̇ = γ′ × γ″` preserves `|γ′|` analytically, so uniform sampling
//! stays uniform up to discretization, which is monitored). The wave
//! field `ψ = κ·e^{i∫τ}` closes up on the circle only when the total
//! torsion vanishes; that is a hard precondition, not a normalization.

use num_complex::Complex64;
// no_std float transcendentals; shadowed by std inherent methods in tests
#[allow(unused_imports)]
use num_traits::Float;

use crate::error::{Error, Result};
use crate::grid::{invert_circle_map, ComplexField, PeriodicGrid, RealField};
use crate::solvers::{axpy, rk4_combine};
use crate::tol;

/// Closed curve in ℝ³ sampled at grid nodes, parameterized
/// proportionally to arclength.
#[derive(Debug, Clone, PartialEq)]
pub struct FilamentCurve {
    x: RealField,
    y: RealField,
    z: RealField,
}

fn assemble(x: RealField, y: RealField, z: RealField, gate: f64) -> Result<FilamentCurve> {
    if x.grid() != y.grid() || x.grid() != z.grid() {
        return Err(Error::ShapeMismatch {
            expected: x.len(),
            got: y.len().max(z.len()),
        });
    }
    let curve = FilamentCurve { x, y, z };
    let variation = curve.speed_variation();
    if variation > gate {
        return Err(Error::ArclengthDrift { variation });
    }
    Ok(curve)
}

impl FilamentCurve {
    /// Validate uniform sampling: relative variation of `|γ′|` at most
    /// `1e-6`. Non-closed data (for example a straight segment on
    /// `[0, 2π)`) fails here because its spectral derivative is wildly
    /// non-uniform.
    pub fn new(x: RealField, y: RealField, z: RealField) -> Result<Self> {
        assemble(x, y, z, tol::ARCLENGTH_UNIFORMITY)
    }

    /// Resample an arbitrary smooth closed curve proportionally to
    /// arclength: integrate the speed, invert the arclength profile by
    /// Newton iteration, and re-evaluate the components off-grid.
    pub fn reparameterized(x: RealField, y: RealField, z: RealField) -> Result<Self> {
        let raw = FilamentCurve {
            x: x.clone(),
            y: y.clone(),
            z: z.clone(),
        };
        let speed = raw.speed();
        let mean = speed.integrate();
        if mean <= tol::DENSITY_FLOOR {
            return Err(Error::NonPositiveField { min: speed.min() });
        }
        // s(x)/mean = x + p(x): unit-winding monotone circle map
        let p = speed.map(move |v| v / mean - 1.0).antiderivative()?;
        let grid = x.grid().clone();
        let xi = invert_circle_map(&p, &grid.nodes())?;
        let sample = |field: &RealField| -> Result<RealField> {
            let ev = field.evaluator();
            grid.from_samples(xi.iter().map(|&t| ev.eval(t)).collect())
        };
        FilamentCurve::new(sample(&x)?, sample(&y)?, sample(&z)?)
    }

    /// Round circle of the given radius in the xy-plane.
    pub fn circle(grid: &PeriodicGrid, radius: f64) -> Self {
        assert!(radius > 0.0, "circle radius must be positive");
        FilamentCurve {
            x: grid.real_field(|t| radius * t.cos()),
            y: grid.real_field(|t| radius * t.sin()),
            z: grid.zeros(),
        }
    }

    /// Component fields in order (x, y, z).
    pub fn components(&self) -> [&RealField; 3] {
        [&self.x, &self.y, &self.z]
    }

    /// Shared grid.
    pub fn grid(&self) -> &PeriodicGrid {
        self.x.grid()
    }

    /// Number of sample points.
    pub fn len(&self) -> usize {
        self.x.len()
    }

    /// Whether the curve has no samples (never true for valid grids).
    pub fn is_empty(&self) -> bool {
        self.x.len() == 0
    }

    fn derivatives(&self, order: u32) -> [RealField; 3] {
        [
            self.x.derivative(order),
            self.y.derivative(order),
            self.z.derivative(order),
        ]
    }

    /// Pointwise parameter speed `|γ′|`.
    pub fn speed(&self) -> RealField {
        let [dx, dy, dz] = self.derivatives(1);
        dx.zip_map(&dy, |a, b| a * a + b * b)
            .zip_map(&dz, |s, c| (s + c * c).sqrt())
    }

    /// Relative variation `(max − min)/mean` of the parameter speed.
    pub fn speed_variation(&self) -> f64 {
        let speed = self.speed();
        let mean = speed.integrate();
        if mean == 0.0 {
            return f64::INFINITY;
        }
        (speed.max() - speed.min()) / mean
    }
}

fn cross(a: &[RealField; 3], b: &[RealField; 3]) -> [RealField; 3] {
    core::array::from_fn(|i| {
        let (j, k) = ((i + 1) % 3, (i + 2) % 3);
        a[j].zip_map(&b[k], |p, q| p * q)
            .zip_map(&a[k].zip_map(&b[j], |p, q| p * q), |r, s| r - s)
    })
}

fn dot(a: &[RealField; 3], b: &[RealField; 3]) -> RealField {
    a[0].zip_map(&b[0], |p, q| p * q)
        .zip_map(&a[1].zip_map(&b[1], |p, q| p * q), |r, s| r + s)
        .zip_map(&a[2].zip_map(&b[2], |p, q| p * q), |r, s| r + s)
}

fn binormal_velocity(c: &[RealField; 3]) -> [RealField; 3] {
    let d1: [RealField; 3] = [c[0].derivative(1), c[1].derivative(1), c[2].derivative(1)];
    let d2: [RealField; 3] = [c[0].derivative(2), c[1].derivative(2), c[2].derivative(2)];
    cross(&d1, &d2)
}

/// One RK4 step of the binormal flow `γ̇ = γ′ × γ″` with spectral
/// parameter derivatives. The flow preserves `|γ′|` in the continuum;
/// the discrete drift is monitored and bounded by `1e-3`.
pub fn step_filament(c: &FilamentCurve, dt: f64) -> Result<FilamentCurve> {
    let c0 = [c.x.clone(), c.y.clone(), c.z.clone()];
    let k1 = binormal_velocity(&c0);
    let s1: [RealField; 3] = core::array::from_fn(|i| axpy(&c0[i], &k1[i], 0.5 * dt));
    let k2 = binormal_velocity(&s1);
    let s2: [RealField; 3] = core::array::from_fn(|i| axpy(&c0[i], &k2[i], 0.5 * dt));
    let k3 = binormal_velocity(&s2);
    let s3: [RealField; 3] = core::array::from_fn(|i| axpy(&c0[i], &k3[i], dt));
    let k4 = binormal_velocity(&s3);
    let [x, y, z] =
        core::array::from_fn(|i| rk4_combine(&c0[i], &k1[i], &k2[i], &k3[i], &k4[i], dt));
    assemble(x, y, z, tol::ARCLENGTH_DRIFT)
}

/// Frenet curvature and torsion:
/// `κ = |γ′×γ″|/|γ′|³`, `τ = (γ′×γ″)·γ‴/|γ′×γ″|²`.
/// Torsion requires curvature above the floor `1e-8` everywhere.
pub fn curvature_torsion(c: &FilamentCurve) -> Result<(RealField, RealField)> {
    let d1 = c.derivatives(1);
    let d2 = c.derivatives(2);
    let d3 = c.derivatives(3);
    let c1 = cross(&d1, &d2);
    let c1_sq = dot(&c1, &c1);
    let speed_sq = dot(&d1, &d1);
    let kappa = c1_sq.zip_map(&speed_sq, |num, den| num.sqrt() / (den * den.sqrt()));
    let min = kappa.min();
    if min <= tol::CURVATURE_FLOOR {
        return Err(Error::VanishingCurvature { min });
    }
    let tau = dot(&c1, &d3).zip_map(&c1_sq, |num, den| num / den);
    Ok((kappa, tau))
}

/// Curvature-amplitude, torsion-phase wave field `ψ = κ·e^{iT}` with
/// `T′ = τ`. Returned unnormalized: its modulus is the curvature, and
/// the wave-equation residual checks use it as is. The total torsion
/// `∮τ dx` must vanish for `T` to close up on the circle.
pub fn hasimoto_transform(c: &FilamentCurve) -> Result<ComplexField> {
    let (kappa, tau) = curvature_torsion(c)?;
    let mean = tau.integrate();
    let total = core::f64::consts::TAU * mean;
    if total.abs() > tol::TOTAL_TORSION_TOL {
        return Err(Error::NonzeroTotalTorsion { total });
    }
    let phase = tau.map(move |v| v - mean).antiderivative()?;
    Ok(kappa.zip_map_complex(&phase, Complex64::from_polar))
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::vec::Vec;
    use approx::assert_abs_diff_eq;

    fn grid(n: usize) -> PeriodicGrid {
        PeriodicGrid::new(n).unwrap()
    }

    /// Unit-speed planar curve with tangent angle `φ(x) = x + a sin 2x`;
    /// closed because the tangent's Fourier series has no constant term.
    fn planar_wavy(n: usize, a: f64) -> FilamentCurve {
        let g = grid(n);
        let tx = g.real_field(move |x| (x + a * (2.0 * x).sin()).cos());
        let ty = g.real_field(move |x| (x + a * (2.0 * x).sin()).sin());
        FilamentCurve::new(
            tx.antiderivative().unwrap(),
            ty.antiderivative().unwrap(),
            g.zeros(),
        )
        .unwrap()
    }

    /// Unit-speed 3D curve whose tangent traces
    /// `(cos(a cos x)·cos x, cos(a cos x)·sin x, sin(a cos x))`.
    fn wavy_3d(n: usize, a: f64) -> FilamentCurve {
        let g = grid(n);
        let tx = g.real_field(move |x| (a * x.cos()).cos() * x.cos());
        let ty = g.real_field(move |x| (a * x.cos()).cos() * x.sin());
        let tz = g.real_field(move |x| (a * x.cos()).sin());
        FilamentCurve::new(
            tx.antiderivative().unwrap(),
            ty.antiderivative().unwrap(),
            tz.antiderivative().unwrap(),
        )
        .unwrap()
    }

    #[test]
    fn circle_translates_along_binormal() {
        // dispersive stability: dt·(n/2)² must stay below the RK4
        // imaginary-axis bound ≈ 2.8, or round-off modes blow up
        let c0 = FilamentCurve::circle(&grid(32), 1.0);
        let mut c = c0.clone();
        let dt = 5e-3;
        for _ in 0..200 {
            c = step_filament(&c, dt).unwrap();
        }
        let [x, y, z] = c.components();
        let [x0, y0, _] = c0.components();
        assert!(x.zip_map(x0, |a, b| a - b).sup_norm() <= 1e-12);
        assert!(y.zip_map(y0, |a, b| a - b).sup_norm() <= 1e-12);
        // κ = 1 circle rises along the binormal at unit speed: z = T = 1
        assert!(z.map(|v| v - 1.0).sup_norm() <= 1e-12);
        assert!(c.speed_variation() <= 1e-12);
    }

    #[test]
    fn circle_frenet_data() {
        let c = FilamentCurve::circle(&grid(64), 2.0);
        let (kappa, tau) = curvature_torsion(&c).unwrap();
        assert!(kappa.map(|v| v - 0.5).sup_norm() <= 1e-13);
        assert!(tau.sup_norm() <= 1e-12);
    }

    #[test]
    fn wave_field_of_circles_is_inverse_radius() {
        for radius in [1.0, 2.0] {
            let c = FilamentCurve::circle(&grid(64), radius);
            let psi = hasimoto_transform(&c).unwrap();
            for v in psi.values() {
                assert_abs_diff_eq!(
                    (v - Complex64::new(1.0 / radius, 0.0)).norm(),
                    0.0,
                    epsilon = 1e-13
                );
            }
        }
    }

    #[test]
    fn planar_wavy_wave_field_is_real_curvature() {
        // tangent angle φ = x + a sin 2x gives κ = φ′ and τ ≡ 0, so the
        // wave field is the real curvature profile 1 + 2a cos 2x
        let a = 0.1;
        let c = planar_wavy(64, a);
        let (_, tau) = curvature_torsion(&c).unwrap();
        assert_eq!(tau.sup_norm(), 0.0);
        let psi = hasimoto_transform(&c).unwrap();
        let want = grid(64).real_field(move |x| 1.0 + 2.0 * a * (2.0 * x).cos());
        for (p, w) in psi.values().iter().zip(want.values()) {
            assert_abs_diff_eq!(p.im, 0.0, epsilon = 1e-13);
            assert_abs_diff_eq!(p.re, *w, epsilon = 1e-12);
        }
    }

    #[test]
    fn torsion_matches_finite_difference_frenet_oracle() {
        let n = 256;
        let c = wavy_3d(n, 0.2);
        let (kappa, tau) = curvature_torsion(&c).unwrap();

        // independent oracle: second-order centered differences of the
        // position samples, same Frenet formulas
        let h = core::f64::consts::TAU / n as f64;
        let comp: Vec<Vec<f64>> = c.components().iter().map(|f| f.values().to_vec()).collect();
        let at = |i: usize, off: i64| -> [f64; 3] {
            let j = (i as i64 + off).rem_euclid(n as i64) as usize;
            [comp[0][j], comp[1][j], comp[2][j]]
        };
        for i in 0..n {
            let (p2, p1, m1, m2) = (at(i, 2), at(i, 1), at(i, -1), at(i, -2));
            let p0 = at(i, 0);
            let d1: Vec<f64> = (0..3).map(|c| (p1[c] - m1[c]) / (2.0 * h)).collect();
            let d2: Vec<f64> = (0..3)
                .map(|c| (p1[c] - 2.0 * p0[c] + m1[c]) / (h * h))
                .collect();
            let d3: Vec<f64> = (0..3)
                .map(|c| (p2[c] - 2.0 * p1[c] + 2.0 * m1[c] - m2[c]) / (2.0 * h * h * h))
                .collect();
            let c1 = [
                d1[1] * d2[2] - d1[2] * d2[1],
                d1[2] * d2[0] - d1[0] * d2[2],
                d1[0] * d2[1] - d1[1] * d2[0],
            ];
            let c1_sq: f64 = c1.iter().map(|v| v * v).sum();
            let speed_sq: f64 = d1.iter().map(|v| v * v).sum();
            let kappa_fd = c1_sq.sqrt() / (speed_sq * speed_sq.sqrt());
            let tau_fd = (c1[0] * d3[0] + c1[1] * d3[1] + c1[2] * d3[2]) / c1_sq;
            assert_abs_diff_eq!(kappa.values()[i], kappa_fd, epsilon = 1e-3);
            assert_abs_diff_eq!(tau.values()[i], tau_fd, epsilon = 5e-5);
        }
    }

    #[test]
    fn coil_needs_reparameterization_and_has_net_torsion() {
        let g = grid(256);
        let (r, m) = (0.05, 8.0);
        let x = g.real_field(move |t| (1.0 + r * (m * t).cos()) * t.cos());
        let y = g.real_field(move |t| (1.0 + r * (m * t).cos()) * t.sin());
        let z = g.real_field(move |t| r * (m * t).sin());
        assert!(matches!(
            FilamentCurve::new(x.clone(), y.clone(), z.clone()),
            Err(Error::ArclengthDrift { .. })
        ));
        let c = FilamentCurve::reparameterized(x, y, z).unwrap();
        assert!(c.speed_variation() <= 1e-9);
        assert!(matches!(
            hasimoto_transform(&c),
            Err(Error::NonzeroTotalTorsion { .. })
        ));
    }

    #[test]
    fn straight_segment_is_rejected() {
        let g = grid(64);
        let x = g.real_field(|t| t);
        assert!(matches!(
            FilamentCurve::new(x, g.zeros(), g.zeros()),
            Err(Error::ArclengthDrift { .. })
        ));
    }

    #[test]
    fn inflection_makes_torsion_undefined() {
        // tangent angle φ = A sin x with A the first Bessel-J₀ root:
        // the curve closes and the curvature |A cos x| vanishes at x = π/2
        let g = grid(64);
        let a = 2.404825557695773;
        let tx = g.real_field(move |x| (a * x.sin()).cos());
        let ty = g.real_field(move |x| (a * x.sin()).sin());
        let c = FilamentCurve::new(
            tx.antiderivative().unwrap(),
            ty.antiderivative().unwrap(),
            g.zeros(),
        )
        .unwrap();
        assert!(matches!(
            curvature_torsion(&c),
            Err(Error::VanishingCurvature { .. })
        ));
    }

    #[test]
    fn flow_preserves_speed_profile() {
        let c0 = planar_wavy(64, 0.1);
        let before = c0.speed();
        let c1 = step_filament(&c0, 1e-3).unwrap();
        let gap = c1.speed().zip_map(&before, |a, b| a - b).sup_norm();
        assert!(gap <= 1e-9, "gap {gap}");
    }
}
