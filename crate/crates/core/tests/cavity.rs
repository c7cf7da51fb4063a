use casimirkit::cavity::*;
use casimirkit::constants::HBAR_C;
use proptest::prelude::*;
use std::f64::consts::PI;

/// Aspect ratio a₃/a₁ of a square box at which the wall force vanishes,
/// from an independent theta-function evaluation of the lattice sum.
const CROSSOVER_RATIO: f64 = 0.784_512_321_756_717_7;

#[test]
fn routes_agree_on_aspect_grid() {
    let ratios = [0.1, 0.316_227_766, 1.0, 3.162_277_66, 10.0];
    for r2 in ratios {
        for r3 in ratios {
            let spec = CavitySpec::new(1e-6, r2 * 1e-6, r3 * 1e-6).unwrap();
            let e = cavity_vacuum_energy(&spec).unwrap();
            assert!(e.relative_difference <= 1e-8, "{r2} {r3}: {e:?}");
        }
    }
}

#[test]
fn cube_energy_regression() {
    let a = 2e-6;
    let e = cavity_vacuum_energy(&CavitySpec::new(a, a, a).unwrap()).unwrap().energy;
    // theta-function oracle, 30 digits: 0.0916574270123518…
    assert!((e * a / HBAR_C - 0.091_657_427_012_351_84).abs() < 1e-12);
}

#[test]
fn slab_limit() {
    let d = 50e-9;
    let l = 200.0 * d;
    let spec = CavitySpec::new(l, l, d).unwrap();
    let e = cavity_vacuum_energy(&spec).unwrap().energy / (l * l);
    let plates = -PI * PI * HBAR_C / (720.0 * d.powi(3));
    assert!((e / plates - 1.0).abs() < 0.01, "{}", e / plates);
    let f = wall_force(&spec).unwrap();
    let plates_f = -PI * PI * HBAR_C * l * l / (240.0 * d.powi(4));
    assert!((f / plates_f - 1.0).abs() < 0.02, "{}", f / plates_f);
}

#[test]
fn wall_force_changes_sign() {
    let at = |r: f64| wall_force(&CavitySpec::new(1e-6, 1e-6, r * 1e-6).unwrap()).unwrap();
    assert!(at(0.5) < 0.0 && at(1.0) > 0.0);
    let r = wall_force_sign_crossover(0.5, 1.0).unwrap();
    assert!((r - CROSSOVER_RATIO).abs() < 1e-8, "{r}");
}

#[test]
fn pull_out_model() {
    let cavity = CavitySpec::new(1e-6, 1e-6, 1e-6).unwrap();
    let depths = vec![0.5e-6, 0.8e-6, 1.0e-6, 2.0e-6];
    let base = Baseline::Constant { force: -2.5e-9 };
    let none = pull_out_curve(&PullOutScenario::new(cavity, depths.clone(), 0, base).unwrap()).unwrap();
    assert!(none.iter().all(|&(_, f)| f == -2.5e-9));

    let n = 1000;
    let one = pull_out_curve(&PullOutScenario::new(cavity, depths.clone(), n, base).unwrap()).unwrap();
    let two = pull_out_curve(&PullOutScenario::new(cavity, depths.clone(), 2 * n, base).unwrap()).unwrap();
    // single-cavity term in units of ħc/a₁², from the theta-function oracle
    let oracle = [0.426_638_726_616_988_4, 0.033_727_594_423_026_93, 0.007_604_374_679_229_781, 8.382_720_921_076_246e-6];
    let diff = difference_analysis(&two, &one).unwrap();
    for ((h, df), o) in diff.iter().zip(oracle) {
        let term = pull_out_casimir_term(&cavity, *h).unwrap();
        // exact up to the rounding of adding the baseline
        assert!((df - n as f64 * term).abs() <= 4.0 * f64::EPSILON * 2.5e-9, "{df:e}");
        let want = o * HBAR_C / 1e-12;
        assert!((term / want - 1.0).abs() < 1e-6, "h {h:e}: {term:e} vs {want:e}");
    }

    // the baseline drops out of depth-to-depth differences
    let a = one[0].1 - one[1].1;
    let t = n as f64 * (pull_out_casimir_term(&cavity, depths[0]).unwrap() - pull_out_casimir_term(&cavity, depths[1]).unwrap());
    assert!((a - t).abs() <= 4.0 * f64::EPSILON * 2.5e-9);
}

#[test]
fn closed_box_force_flips_across_pinned_depth() {
    let cavity = CavitySpec::new(1e-6, 1e-6, 1e-6).unwrap();
    let below = wall_force(&cavity.with_depth(0.95 * CROSSOVER_RATIO * 1e-6).unwrap()).unwrap();
    let above = wall_force(&cavity.with_depth(1.05 * CROSSOVER_RATIO * 1e-6).unwrap()).unwrap();
    assert!(below < 0.0 && above > 0.0);
}

#[test]
fn mismatched_grids_rejected() {
    assert!(difference_analysis(&[(1.0, 0.0)], &[(2.0, 0.0)]).is_err());
    assert!(PullOutScenario::new(CavitySpec::new(1.0, 1.0, 1.0).unwrap(), vec![2.0, 1.0], 1, Baseline::Constant { force: 0.0 }).is_err());
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(16))]

    #[test]
    fn homogeneous_and_symmetric(a1 in 0.3e-6f64..3e-6, a2 in 0.3e-6f64..3e-6, a3 in 0.3e-6f64..3e-6) {
        let s = CavitySpec::new(a1, a2, a3).unwrap();
        let e = cavity_energy_zeta(&s);
        for lambda in [0.5, 2.0, 4.0] {
            let el = cavity_energy_zeta(&s.scaled(lambda).unwrap()) * lambda;
            prop_assert!((el / e - 1.0).abs() < 1e-9);
        }
        let swapped = cavity_energy_zeta(&CavitySpec::new(a2, a1, a3).unwrap());
        prop_assert_eq!(swapped, e);
        let f = wall_force(&s).unwrap();
        let f2 = wall_force(&s.scaled(2.0).unwrap()).unwrap();
        prop_assert!((f2 * 4.0 / f - 1.0).abs() < 1e-6);
    }
}
