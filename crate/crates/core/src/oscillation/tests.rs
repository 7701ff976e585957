use super::*;
use crate::field::{Grid, ScalarField, SymMat2, TensorField};
use proptest::prelude::*;
use std::f64::consts::PI;

fn grid(n: usize) -> Grid {
    Grid::dirichlet(n, 4.0, [-2.0, -2.0]).unwrap()
}

fn unit_family(g: &Grid) -> BallFamily {
    BallFamily::new(g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.8 }), 0.8, 8).unwrap()
}

#[test]
fn oscillation_of_constants_vanishes() {
    let g = grid(64);
    let f = ScalarField::constant(g, 3.5);
    let b = Ball::new([0.1, -0.2], 1.0).unwrap();
    assert_eq!(mean_oscillation(&f, &b).unwrap(), 0.0);
    let fam = unit_family(&g);
    for om in [Modulus::Constant, Modulus::Power(0.5)] {
        assert_eq!(bmo_omega_seminorm(&f, &fam, &om).unwrap().value, 0.0);
    }
    let v = vmo_modulus(&f, &fam).unwrap();
    assert!(v.values.iter().all(|x| *x == 0.0) && !v.flat);
    let h = holder_seminorm_via_campanato(&f, &fam, 0.5).unwrap();
    assert_eq!((h.campanato, h.direct), (0.0, 0.0));
}

#[test]
fn linear_field_on_unit_ball() {
    // brute-force quadrature oracle of the mean of |x1| over the unit disc
    let m = 400;
    let (mut s, mut c) = (0.0, 0);
    for j in 0..m {
        for i in 0..m {
            let x = -1.0 + (i as f64 + 0.5) * 2.0 / m as f64;
            let y = -1.0 + (j as f64 + 0.5) * 2.0 / m as f64;
            if x * x + y * y <= 1.0 {
                s += x.abs();
                c += 1;
            }
        }
    }
    let oracle = s / c as f64;
    assert!((oracle - 4.0 / (3.0 * PI)).abs() < 1e-3);

    let g = grid(256);
    let f = ScalarField::from_fn(g, |x| x[0]);
    let b = Ball::new([0.0, 0.0], 1.0).unwrap();
    let osc = mean_oscillation(&f, &b).unwrap();
    assert!((osc - 4.0 / (3.0 * PI)).abs() < 2.0 * g.h, "{osc}");
    let scaled = mean_oscillation(&f.scaled(2.5), &b).unwrap();
    assert!((scaled - 2.5 * osc).abs() < 1e-14);
}

#[test]
fn linear_field_power_modulus_is_level_independent() {
    let g = grid(256);
    let f = ScalarField::from_fn(g, |x| x[0]);
    let fam = unit_family(&g);
    let rep = bmo_omega_seminorm(&f, &fam, &Modulus::Power(1.0)).unwrap();
    let target = 4.0 / (3.0 * PI);
    for l in &rep.per_level_max {
        assert!((l.max_ratio - target).abs() < 0.06 * target, "{l:?}");
    }
    assert_eq!(rep.value, rep.per_level_max.iter().map(|l| l.max_ratio).fold(0.0, f64::max));
}

#[test]
fn log_singularity_has_stable_bmo_norm() {
    let vals: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |x| (x[0] * x[0] + x[1] * x[1]).sqrt().ln());
            let fam = BallFamily::new(&g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.8 }), 0.8, 3).unwrap();
            bmo_omega_seminorm(&f, &fam, &Modulus::Constant).unwrap().value
        })
        .collect();
    assert!(vals.iter().all(|v| v.is_finite() && *v > 0.0));
    assert!((vals[2] / vals[1] - 1.0).abs() < 0.1, "{vals:?}");
}

#[test]
fn vmo_modulus_of_smooth_and_checkerboard() {
    let g = grid(128);
    let fam = unit_family(&g);
    let f = ScalarField::from_fn(g, |x| (2.0 * x[0]).sin());
    let v = vmo_modulus(&f, &fam).unwrap();
    assert!(v.values.windows(2).all(|w| w[0] <= w[1]));
    assert!(!v.flat);
    // slope at small r: oscillation of a linear function of slope L is 4 L r / (3 pi)
    let r = v.radii[0];
    let lin = 4.0 * 2.0 * r / (3.0 * PI);
    assert!((v.values[0] / lin - 1.0).abs() < 0.25, "{} {lin}", v.values[0]);

    let mut vals = vec![0.0; g.cell_count()];
    for j in 0..g.n {
        for i in 0..g.n {
            vals[g.cell_index(i, j)] = if (i + j) % 2 == 0 { 1.0 } else { -1.0 };
        }
    }
    let cb = ScalarField::new(g, vals).unwrap();
    assert!(vmo_modulus(&cb, &fam).unwrap().flat);
}

#[test]
fn holder_routes() {
    let g = grid(128);
    let fam = unit_family(&g);
    let f = ScalarField::from_fn(g, |x| x[0]);
    let h = holder_seminorm_via_campanato(&f, &fam, 1.0).unwrap();
    assert!((h.direct - 1.0).abs() < 1e-12);
    let r = ScalarField::from_fn(g, |x| (x[0] * x[0] + x[1] * x[1]).sqrt().sqrt());
    let h = holder_seminorm_via_campanato(&r, &fam, 0.5).unwrap();
    assert!(h.direct.is_finite() && h.direct <= 1.0 + 1e-12);
    assert!(holder_seminorm_via_campanato(&r, &fam, 0.0).is_err());
}

#[test]
fn campanato_holder_ratio_is_mesh_stable() {
    let ratios: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&n| {
            let g = grid(n);
            let f = ScalarField::from_fn(g, |x| x[0]);
            holder_seminorm_via_campanato(&f, &unit_family(&g), 1.0).unwrap().ratio
        })
        .collect();
    for w in ratios.windows(2) {
        assert!((w[1] / w[0] - 1.0).abs() < 0.05, "{ratios:?}");
    }
}

#[test]
fn tensor_oscillation_uses_frobenius_norm() {
    let g = grid(64);
    let t = TensorField::from_fn(g, |x| SymMat2::new(0.0, x[0], 0.0));
    let s = ScalarField::from_fn(g, |x| x[0]);
    let b = Ball::new([0.0, 0.0], 1.0).unwrap();
    let ratio = mean_oscillation(&t, &b).unwrap() / mean_oscillation(&s, &b).unwrap();
    assert!((ratio - 2f64.sqrt()).abs() < 1e-12);
}

#[test]
fn larger_family_never_decreases_seminorm() {
    let g = grid(128);
    let f = ScalarField::from_fn(g, |x| (3.0 * x[0] * x[1]).sin());
    let small = BallFamily::new(&g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.0 }), 0.5, 3).unwrap();
    let big = BallFamily::new(&g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.8 }), 0.5, 3).unwrap();
    for om in [Modulus::Constant, Modulus::Power(0.5)] {
        let a = bmo_omega_seminorm(&f, &small, &om).unwrap().value;
        let b = bmo_omega_seminorm(&f, &big, &om).unwrap().value;
        assert!(b >= a);
    }
}

#[test]
fn family_structure() {
    let g = grid(64);
    let fam = unit_family(&g);
    assert_eq!(fam.radii()[0], 0.8);
    assert!(fam.radii().iter().all(|r| *r >= 2.0 * g.h));
    assert!(fam.levels().iter().all(|l| !l.is_empty()));
    assert!(BallFamily::new(&g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.0 }), 0.05, 3).is_err());
}

#[test]
fn tabulated_modulus() {
    let m = Modulus::Tabulated(vec![(0.1, 1.0), (1.0, 2.0)]);
    m.validate().unwrap();
    assert_eq!(m.eval(0.05), 1.0);
    assert!((m.eval(0.55) - 1.5).abs() < 1e-14);
    assert_eq!(m.eval(7.0), 2.0);
    assert!(Modulus::Tabulated(vec![(0.1, 2.0), (1.0, 1.0)]).validate().is_err());
    assert!(Modulus::Power(-0.1).validate().is_err());
    let radii = [0.1, 0.2, 0.4, 0.8];
    assert_eq!(Modulus::Power(0.3).almost_decreasing_constant(0.5, &radii), 1.0);
    assert!(Modulus::Power(0.8).almost_decreasing_constant(0.5, &radii) > 1.0);
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn shift_and_scale_behaviour(c in -5.0f64..5.0, a in 0.01f64..20.0, k in 0.5f64..3.0) {
        let g = grid(32);
        let fam = BallFamily::new(&g, Region::Ball(Ball { center: [0.0, 0.0], radius: 1.8 }), 0.8, 3).unwrap();
        let f = ScalarField::from_fn(g, |x| (k * x[0]).sin() * x[1]);
        let shifted = ScalarField::from_fn(g, |x| (k * x[0]).sin() * x[1] + c);
        for om in [Modulus::Constant, Modulus::Power(0.5)] {
            let base = bmo_omega_seminorm(&f, &fam, &om).unwrap().value;
            let s = bmo_omega_seminorm(&shifted, &fam, &om).unwrap().value;
            let sc = bmo_omega_seminorm(&f.scaled(a), &fam, &om).unwrap().value;
            prop_assert!((s - base).abs() <= 1e-12 * (1.0 + c.abs()) * base.max(1.0));
            prop_assert!((sc - a * base).abs() <= 1e-12 * a * base);
        }
    }

    #[test]
    fn mean_is_near_optimal_constant(c in -2.0f64..2.0, k in 0.5f64..3.0) {
        let g = grid(32);
        let f = ScalarField::from_fn(g, |x| (k * x[0]).cos() + x[1]);
        let b = Ball::new([0.2, -0.1], 1.0).unwrap();
        let r = restrict(&f, &b).unwrap();
        let dev = r.values.iter().map(|v| (v - c).abs()).sum::<f64>() / r.values.len() as f64;
        prop_assert!(mean_oscillation(&f, &b).unwrap() <= 2.0 * dev + 1e-14);
    }
}
