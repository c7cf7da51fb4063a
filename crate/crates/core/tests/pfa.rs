use casimirkit::constants::HBAR_C;
use casimirkit::lifshitz::GapConfig;
use casimirkit::materials::DielectricModel;
use casimirkit::pfa::*;
use proptest::prelude::*;
use std::f64::consts::PI;

fn ideal_gap(d: f64) -> GapConfig {
    GapConfig::bulk(DielectricModel::PerfectConductor, DielectricModel::PerfectConductor, d).unwrap()
}

#[test]
fn ideal_sphere_plate_from_lifshitz() {
    let probe = SphericalProbe::new(100e-6).unwrap();
    for d in [50e-9, 200e-9, 1e-6] {
        let f = sphere_plate_force(&probe, &ideal_gap(d)).unwrap();
        let exact = -PI.powi(3) * HBAR_C * 100e-6 / (360.0 * d.powi(3));
        assert!((f.force / exact - 1.0).abs() < 1e-4);
        assert!(!f.warning);
    }
}

#[test]
fn guard_thresholds() {
    let probe = SphericalProbe::new(1e-6).unwrap();
    assert!(sphere_plate_force(&probe, &ideal_gap(200e-9)).is_err());
    assert!(sphere_plate_force(&probe, &ideal_gap(50e-9)).unwrap().warning);
}

#[test]
fn equal_crossed_cylinders_act_like_a_sphere() {
    let cyl = CrossedCylinders::new(2e-3, 2e-3).unwrap();
    let sphere = SphericalProbe::new(2e-3).unwrap();
    let g = ideal_gap(1e-6);
    assert_eq!(
        crossed_cylinder_force(&cyl, &g).unwrap().force,
        sphere_plate_force(&sphere, &g).unwrap().force
    );
}

#[test]
fn gaussian_roughness_on_inverse_cube() {
    let profile = RoughnessProfile::gaussian(5e-9, 32).unwrap();
    let d = 100e-9;
    let avg = roughness_average(|x| Ok(x.powi(-3)), &profile, d).unwrap() * d.powi(3);
    // independent arbitrary-precision quadrature of the Gaussian average
    assert!((avg - 1.015_288_003_402_47).abs() < 1e-10, "{avg}");
}

#[test]
fn roughness_csv() {
    let p = RoughnessProfile::parse_csv("# offsets\nheight_m,weight\n-1e-9,0.25\n0,0.5\n1e-9,0.25\n").unwrap();
    assert_eq!(p.offsets().len(), 3);
    assert!(RoughnessProfile::parse_csv("height_m,weight\n0,0.3\n").is_err());
}

proptest! {
    #[test]
    fn force_scales_with_radius(r in 1e-5f64..1e-2, d in 20e-9f64..1e-6) {
        prop_assume!(r / d >= PFA_ERROR_RATIO);
        let f1 = ideal_sphere_plate_force(r, d);
        let f2 = ideal_sphere_plate_force(2.0 * r, d);
        prop_assert!((f2 / f1 - 2.0).abs() < 1e-12);
    }

    #[test]
    fn roughness_never_weakens_a_convex_force(sigma in 0.1e-9f64..10e-9) {
        let p = RoughnessProfile::gaussian(sigma, 16).unwrap();
        let d = 100e-9;
        let avg = roughness_average(|x| Ok(x.powi(-3)), &p, d).unwrap();
        prop_assert!(avg >= d.powi(-3));
    }
}
