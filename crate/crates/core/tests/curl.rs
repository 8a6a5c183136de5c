use curlforce_core::{AngleFunction, ForceField};
use proptest::prelude::*;
use std::f64::consts::PI;

fn angle_fn() -> impl Strategy<Value = AngleFunction> {
    prop_oneof![
        Just(AngleFunction::Zero),
        (-2.0..2.0f64).prop_map(|c| AngleFunction::Constant { c }),
        (-2.0..2.0f64).prop_map(|c| AngleFunction::LinearTheta { c }),
        (-2.0..2.0f64, 0.25..3.0f64).prop_map(|(c, k)| AngleFunction::Cos { c, k }),
        (-2.0..2.0f64, 0.25..3.0f64).prop_map(|(c, k)| AngleFunction::Sin { c, k }),
        prop::array::uniform4(-1.0..1.0f64).prop_map(|coeffs| AngleFunction::Poly { coeffs }),
    ]
}

fn field() -> impl Strategy<Value = ForceField> {
    prop_oneof![
        (0.0..2.0f64, angle_fn(), angle_fn()).prop_map(|(w, u, v)| ForceField::Ermakov { w, u, v }),
        (angle_fn(), angle_fn()).prop_map(|(u, v)| ForceField::GorringeLeach { u, v }),
        (-4.0..3.0f64)
            .prop_filter("mu = -2 is excluded", |mu| (mu + 2.0).abs() > 1e-3)
            .prop_map(|mu| ForceField::Isotropic { mu }),
        (-4.0..3.0f64, -2.0..2.0f64)
            .prop_filter("mu = -2 is excluded", |(mu, _)| (mu + 2.0).abs() > 1e-3)
            .prop_map(|(mu, nu)| ForceField::IsotropicDrag { mu, nu }),
    ]
}

proptest! {
    #[test]
    fn analytic_curl_matches_central_differences(f in field(), r in 0.5..3.0f64, theta in -PI..PI) {
        let exact = f.curl(r, theta).unwrap();
        let fd = f.curl_fd(r, theta, 1e-5).unwrap();
        prop_assert!((exact - fd).abs() <= 1e-6 * exact.abs().max(1.0), "{f:?}: {exact} vs {fd}");
    }

    #[test]
    fn central_fields_are_conservative(r in 0.2..5.0f64, theta in -PI..PI, w in 0.0..2.0f64, c in -3.0..3.0f64) {
        let f = ForceField::Ermakov { w, u: AngleFunction::Constant { c }, v: AngleFunction::Constant { c } };
        prop_assert_eq!(f.curl(r, theta).unwrap(), 0.0);
    }
}

#[test]
fn gorringe_leach_with_periodic_profiles_is_curl_free() {
    let f = ForceField::GorringeLeach {
        u: AngleFunction::Sin { c: 0.7, k: 1.0 },
        v: AngleFunction::Cos { c: 1.3, k: 0.5 },
    };
    let control = ForceField::GorringeLeach {
        u: AngleFunction::Sin { c: 0.7, k: 1.0 },
        v: AngleFunction::Poly {
            coeffs: [1.0, 0.5, 0.0, 0.0],
        },
    };
    let mut worst_control = 0.0f64;
    for i in 0..12 {
        for k in 0..12 {
            let r = 0.3 + 0.25 * i as f64;
            let theta = -2.0 * PI + 4.0 * PI * k as f64 / 11.0;
            assert!(f.curl(r, theta).unwrap().abs() <= 1e-10);
            worst_control = worst_control.max(control.curl(r, theta).unwrap().abs());
        }
    }
    assert!(worst_control > 1e-3);
}
