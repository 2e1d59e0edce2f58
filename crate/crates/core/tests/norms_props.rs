use bergman_hankel::norms::{bergman_norm, bloch_norm, garsia_bmo, QuadratureSpec, SupGrid};
use bergman_hankel::{RadialWeight, TaylorSeries, C64};
use proptest::prelude::*;

fn poly(max_len: usize) -> impl Strategy<Value = TaylorSeries> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 1..max_len)
        .prop_map(|v| TaylorSeries::new(v.into_iter().map(|(a, b)| C64::new(a, b)).collect()))
}

fn small_quad() -> QuadratureSpec {
    QuadratureSpec {
        sup_grid: SupGrid {
            radii: (0..64)
                .map(|j| j as f64 / 64.0)
                .chain((7..=16).map(|k| 1.0 - 2f64.powi(-k)))
                .collect(),
            angles: 32,
        },
        ..QuadratureSpec::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn l2_norm_is_parseval(f in poly(65), alpha in 0.0f64..3.0) {
        let w = RadialWeight::standard(alpha).unwrap();
        let quad = QuadratureSpec::default();
        let want: f64 = f.coeffs().iter().enumerate().map(|(n, c)| c.norm_sqr() * w.sigma(n)).sum::<f64>().sqrt();
        let got = bergman_norm(&f, &w, 2.0, &quad).unwrap();
        prop_assert!((got - want).abs() <= 1e-10 * want.max(1e-300));
    }

    #[test]
    fn lp_norm_is_homogeneous(f in poly(20), lam in 0.1f64..10.0, p in 1.0f64..4.0) {
        let w = RadialWeight::standard(1.0).unwrap();
        let quad = QuadratureSpec::default();
        let a = bergman_norm(&f, &w, p, &quad).unwrap();
        let b = bergman_norm(&f.scale(C64::new(0.0, lam)), &w, p, &quad).unwrap();
        prop_assert!((b - lam * a).abs() <= 1e-10 * b.max(1e-300));
    }

    #[test]
    fn garsia_is_rotation_invariant(f in poly(16), theta in 0.0f64..std::f64::consts::TAU) {
        let quad = small_quad();
        let rot = TaylorSeries::new(
            f.coeffs().iter().enumerate().map(|(n, c)| c * C64::from_polar(1.0, n as f64 * theta)).collect(),
        );
        let a = garsia_bmo(&f, &quad).value;
        let b = garsia_bmo(&rot, &quad).value;
        // the grid is not rotated, so agreement is limited by the polish
        prop_assert!((a - b).abs() <= 1e-6 * a.max(1e-12));
    }

    #[test]
    fn bloch_dominates_samples(f in poly(16), r in 0.0f64..0.999, t in 0.0f64..std::f64::consts::TAU) {
        let quad = small_quad();
        let s = bloch_norm(&f, &quad).value;
        let z = C64::from_polar(r, t);
        let sample = f.coeff(0).norm() + (1.0 - r * r) * f.derivative().evaluate(z).norm();
        prop_assert!(s >= sample - 1e-9 * s.max(1.0));
    }
}

#[test]
fn bloch_of_z_squared() {
    let f = TaylorSeries::new(vec![C64::new(0.0, 0.0), C64::new(0.0, 0.0), C64::new(1.0, 0.0)]);
    let v = bloch_norm(&f, &QuadratureSpec::default()).value;
    // sup 2r(1-r²) = 4/(3√3)
    assert!((v - 4.0 / (3.0 * 3f64.sqrt())).abs() < 1e-9);
}

#[test]
fn garsia_of_monomials_is_bounded() {
    let quad = small_quad();
    for n in [1usize, 4, 16] {
        let mut c = vec![C64::new(0.0, 0.0); n + 1];
        c[n] = C64::new(1.0, 0.0);
        let v = garsia_bmo(&TaylorSeries::new(c), &quad);
        assert!(v.value <= 1.0 + 1e-9 && v.value > 0.5, "n={n}: {}", v.value);
        assert!(!v.grows_at_boundary());
    }
}

#[test]
fn garsia_grid_rotations_are_exact() {
    let quad = small_quad();
    let f = TaylorSeries::new(vec![
        C64::new(0.3, 0.1),
        C64::new(1.0, -0.5),
        C64::new(0.0, 0.7),
        C64::new(-0.2, 0.0),
    ]);
    let a = garsia_bmo(&f, &quad).value;
    for k in [1usize, 5, 17] {
        let theta = std::f64::consts::TAU * k as f64 / quad.sup_grid.angles as f64;
        let rot = TaylorSeries::new(
            f.coeffs()
                .iter()
                .enumerate()
                .map(|(n, c)| c * C64::from_polar(1.0, n as f64 * theta))
                .collect(),
        );
        let b = garsia_bmo(&rot, &quad).value;
        assert!((a - b).abs() <= 1e-12 * a, "k={k}: {a} vs {b}");
    }
}
