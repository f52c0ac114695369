//! Randomized structural invariants of the core maps: round trips,
//! symmetries, and sign conditions that must hold for every admissible
//! input, not just the hand-picked fixtures of the unit tests.

use denslab_core::densities::{fisher_rao_metric, DensityField, FisherRaoGeodesic, TangentDensity};
use denslab_core::filament::{hasimoto_transform, FilamentCurve};
use denslab_core::grid::{invert_circle_map, PeriodicGrid, RealField};
use denslab_core::madelung::{
    madelung_forward, madelung_inverse, sasaki_fr_metric, CotangentPoint, CotangentTangent,
    WaveFunction,
};
use proptest::prelude::*;

const N: usize = 32;

fn grid() -> PeriodicGrid {
    PeriodicGrid::new(N).unwrap()
}

/// Ten coefficients feed five cos/sin mode pairs.
fn coeffs() -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-1.0f64..1.0, 10)
}

/// Low-pass trig polynomial with `1/k²` decay; sup norm below
/// `2.93·scale`, so `1 + field` stays positive for `scale ≤ 0.3`.
fn trig_field(grid: &PeriodicGrid, c: &[f64], scale: f64) -> RealField {
    let c = c.to_vec();
    grid.real_field(move |x| {
        let mut acc = 0.0;
        for k in 0..5 {
            let weight = scale / ((k + 1) * (k + 1)) as f64;
            let kx = (k + 1) as f64 * x;
            acc += weight * (c[2 * k] * kx.cos() + c[2 * k + 1] * kx.sin());
        }
        acc
    })
}

fn density(grid: &PeriodicGrid, c: &[f64]) -> DensityField {
    DensityField::normalized(&grid.constant(1.0) + &trig_field(grid, c, 0.3)).unwrap()
}

fn sup_gap(a: &RealField, b: &RealField) -> f64 {
    (a - b).sup_norm()
}

proptest! {
    #[test]
    fn derivative_undoes_antiderivative(c in coeffs()) {
        let g = grid();
        let f = trig_field(&g, &c, 1.0); // trig modes 1..=5 have zero mean
        let anti = f.antiderivative().unwrap();
        prop_assert!(sup_gap(&anti.derivative(1), &f) < 1e-11);
        prop_assert!(anti.integrate().abs() < 1e-13, "antiderivative is mean-free");
    }

    #[test]
    fn inertia_operator_round_trips(c in coeffs(), mean in -2.0f64..2.0) {
        let g = grid();
        let u = &trig_field(&g, &c, 1.0) + &g.constant(mean);
        prop_assert!(sup_gap(&u.apply_inertia().invert_inertia(), &u) < 1e-11);
        prop_assert!(sup_gap(&u.invert_inertia().apply_inertia(), &u) < 1e-11);
    }

    #[test]
    fn derivative_is_antisymmetric_in_the_inner_product(a in coeffs(), b in coeffs()) {
        let g = grid();
        let f = trig_field(&g, &a, 1.0);
        let h = trig_field(&g, &b, 1.0);
        let lhs = f.inner(&h.derivative(1));
        let rhs = -f.derivative(1).inner(&h);
        prop_assert!((lhs - rhs).abs() < 1e-12);
    }

    #[test]
    fn madelung_round_trips(r in coeffs(), t in coeffs()) {
        let g = grid();
        let p = CotangentPoint::gauged(density(&g, &r), trig_field(&g, &t, 0.5)).unwrap();
        let back = madelung_inverse(&madelung_forward(&p)).unwrap();
        prop_assert!(sup_gap(back.rho().field(), p.rho().field()) < 1e-11);
        prop_assert!(sup_gap(back.theta(), p.theta()) < 1e-11);
    }

    #[test]
    fn circle_map_inversion_round_trips(c in coeffs()) {
        let g = grid();
        // slope of the periodic part stays below 1: the map is monotone
        let part = trig_field(&g, &c, 0.2);
        let targets = g.nodes();
        let xi = invert_circle_map(&part, &targets).unwrap();
        let eval = part.evaluator();
        for (x, y) in xi.iter().zip(&targets) {
            let gap = (x + eval.eval(*x) - y).rem_euclid(core::f64::consts::TAU);
            prop_assert!(gap.min(core::f64::consts::TAU - gap) < 1e-11);
        }
    }

    #[test]
    fn density_geodesics_hit_their_endpoints_symmetrically(a in coeffs(), b in coeffs()) {
        let g = grid();
        let rho0 = density(&g, &a);
        let rho1 = density(&g, &b);
        let geo = FisherRaoGeodesic::new(&rho0, &rho1).unwrap();
        let back = FisherRaoGeodesic::new(&rho1, &rho0).unwrap();
        prop_assert!(geo.distance() >= 0.0);
        prop_assert!((geo.distance() - back.distance()).abs() < 1e-13);
        prop_assert!(sup_gap(geo.density(0.0).unwrap().field(), rho0.field()) < 1e-11);
        prop_assert!(sup_gap(geo.density(1.0).unwrap().field(), rho1.field()) < 1e-11);
    }

    #[test]
    fn lifted_metric_is_symmetric_and_nonnegative(
        r in coeffs(),
        t in coeffs(),
        v1 in coeffs(),
        v2 in coeffs(),
        w1 in coeffs(),
        w2 in coeffs(),
    ) {
        let g = grid();
        let p = CotangentPoint::gauged(density(&g, &r), trig_field(&g, &t, 0.5)).unwrap();
        let tangent = |a: &[f64], b: &[f64]| {
            CotangentTangent::new(
                TangentDensity::projected(trig_field(&g, a, 0.5)),
                trig_field(&g, b, 0.5),
            )
        };
        let v = tangent(&v1, &v2);
        let w = tangent(&w1, &w2);
        let vw = sasaki_fr_metric(&p, &v, &w);
        let wv = sasaki_fr_metric(&p, &w, &v);
        let scale = vw.abs().max(wv.abs()).max(1.0);
        prop_assert!((vw - wv).abs() / scale < 1e-13);
        prop_assert!(sasaki_fr_metric(&p, &v, &v) >= 0.0);
        let rho_dot = v.rho_dot().field().clone();
        prop_assert!(
            fisher_rao_metric(p.rho(), &TangentDensity::projected(rho_dot.clone()),
                              &TangentDensity::projected(rho_dot)) >= 0.0
        );
    }

    #[test]
    fn hasimoto_sends_circles_to_inverse_radius(radius in 0.2f64..3.0) {
        let g = grid();
        let psi = hasimoto_transform(&FilamentCurve::circle(&g, radius)).unwrap();
        let gap = psi.modulus().map(|m| m - 1.0 / radius).sup_norm();
        prop_assert!(gap < 1e-10, "modulus gap {gap}");
    }

    #[test]
    fn projective_alignment_removes_a_global_phase(c in coeffs(), alpha in -3.0f64..3.0) {
        let g = grid();
        let p = CotangentPoint::gauged(density(&g, &c), g.zeros()).unwrap();
        let psi = madelung_forward(&p);
        let rotated = WaveFunction::new(
            psi.psi().map(|z| z * num_complex::Complex64::from_polar(1.0, alpha)),
        )
        .unwrap();
        prop_assert!(rotated.aligned_to(&psi).sup_distance(&psi) < 1e-12);
    }
}
