use bergman_hankel::hankelnorm::{dual_norm_with, form_norm_22, form_norm_pq, AscentOptions, DualKind, HankelFormSpec};
use bergman_hankel::norms::{QuadratureSpec, SupGrid};
use bergman_hankel::{ComplexMeasure, RadialWeight, C64};
use proptest::prelude::*;

fn measure() -> impl Strategy<Value = ComplexMeasure> {
    prop::collection::vec(
        (0.0f64..0.9, 0.0f64..std::f64::consts::TAU, -2.0f64..2.0, -2.0f64..2.0),
        1..4,
    )
    .prop_map(|atoms| {
        let mut mu = ComplexMeasure::zero();
        for (r, t, a, b) in atoms {
            mu = mu.with_atom(C64::from_polar(r, t), C64::new(a, b)).unwrap();
        }
        mu
    })
}

fn quick_ascent() -> AscentOptions {
    AscentOptions {
        restarts: 2,
        steps: 40,
        ..AscentOptions::default()
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn form_norm_22_is_monotone_in_truncation(mu in measure()) {
        let spec = HankelFormSpec::new(mu, RadialWeight::constant(), 2.0, 2.0).unwrap();
        let mut prev = 0.0;
        for n in [8, 16, 32, 64] {
            let v = form_norm_22(&spec, n).unwrap().value;
            prop_assert!(v >= prev * (1.0 - 1e-6));
            prev = v;
        }
    }

    #[test]
    fn form_norm_scales_with_symbol(mu in measure(), re in -3.0f64..3.0, im in -3.0f64..3.0) {
        let lam = C64::new(re, im);
        prop_assume!(lam.norm() > 1e-3);
        let spec = HankelFormSpec::new(mu, RadialWeight::standard(1.0).unwrap(), 2.0, 2.0).unwrap();
        let a = form_norm_22(&spec, 32).unwrap().value;
        let b = form_norm_22(&spec.scaled(lam), 32).unwrap().value;
        prop_assert!((b - lam.norm() * a).abs() <= 1e-6 * b.max(1e-12));
        let quad = QuadratureSpec::default();
        let da = dual_norm_with(&spec, 32, DualKind::Bloch, &quad).unwrap();
        let db = dual_norm_with(&spec.scaled(lam), 32, DualKind::Bloch, &quad).unwrap();
        prop_assert!((db - lam.norm() * da).abs() <= 1e-9 * db.max(1e-12));
    }
}

#[test]
fn pq_estimate_is_a_lower_bound_on_the_22_value() {
    // for p = q = 2 the ascent cannot beat the singular value
    let w = RadialWeight::constant();
    let mu = ComplexMeasure::dirac(C64::new(0.4, 0.2))
        .unwrap()
        .with_atom(C64::new(-0.3, 0.0), C64::new(0.5, -1.0))
        .unwrap();
    let spec = HankelFormSpec::new(mu, w, 2.0, 2.0).unwrap();
    let n = 16;
    let exact = form_norm_22(&spec, n).unwrap().value;
    let est = form_norm_pq(&spec, n, &quick_ascent(), &QuadratureSpec::coarse(n))
        .unwrap()
        .value;
    assert!(est <= exact + 1e-6 && est >= 0.9 * exact, "{est} vs {exact}");
}

#[test]
fn escaping_atoms_have_growing_dual_norm() {
    let mut mu = ComplexMeasure::zero();
    for j in 1..=40 {
        let rho = 1.0 - 2f64.powi(-j);
        mu = mu
            .with_atom(C64::new(rho, 0.0), C64::new((1.0 - rho).powf(1.5), 0.0))
            .unwrap();
    }
    let spec = HankelFormSpec::new(mu, RadialWeight::constant(), 2.0, 2.0).unwrap();
    let quad = QuadratureSpec {
        sup_grid: SupGrid {
            radii: bergman_hankel::norms::default_radii(),
            angles: 16,
        },
        ..QuadratureSpec::default()
    };
    let vals: Vec<f64> = [16, 64, 256, 1024]
        .iter()
        .map(|&n| dual_norm_with(&spec, n, DualKind::Bloch, &quad).unwrap())
        .collect();
    assert!(vals.windows(2).all(|p| p[1] > 1.3 * p[0]), "{vals:?}");
}
