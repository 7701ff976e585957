use orlicz_stokes::constitutive::StressLaw;
use orlicz_stokes::field::{Grid, SymMat2, TensorField};
use orlicz_stokes::harness::{involution_error, DecayFit, ModelKind};
use orlicz_stokes::nfunc::{NFunction, NFunctionModel};
use orlicz_stokes::solver::{solve_stokes, weak_residual, SolverConfig};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = ModelKind> {
    prop_oneof![
        Just(ModelKind::PowerLawAdditive),
        Just(ModelKind::PowerLawQuadratic),
        Just(ModelKind::Carreau),
        Just(ModelKind::ArcSinh),
    ]
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn inverse_round_trip(k in kind(), p in 1.3f64..4.0, kappa in 0.0f64..2.0, e in -6.0f64..6.0) {
        let m = k.model(p, kappa).unwrap();
        let t = 10f64.powf(e);
        let back = m.inverse_phi_prime(m.phi_prime(t).unwrap()).unwrap();
        prop_assert!((back / t - 1.0).abs() <= 1e-10, "{m} t={t} back={back}");
    }

    #[test]
    fn conjugate_involution(k in kind(), p in 1.3f64..4.0, kappa in 0.0f64..2.0) {
        let m = k.model(p, kappa).unwrap();
        prop_assert!(involution_error(&m) <= 1e-8, "{m}");
    }

    #[test]
    fn phi_is_homogeneous_in_nu(quadratic in any::<bool>(), p in 1.3f64..4.0, kappa in 0.0f64..2.0, nu in 0.1f64..10.0, e in -6.0f64..6.0) {
        let m = if quadratic {
            NFunctionModel::power_law_quadratic(nu, kappa, p).unwrap()
        } else {
            NFunctionModel::power_law(nu, kappa, p).unwrap()
        };
        let t = 10f64.powf(e);
        prop_assert_eq!(m.with_nu(2.0 * nu).value(t), 2.0 * m.value(t));
    }

    #[test]
    fn decay_regression_recovers_planted_exponent(s in 0.1f64..4.0, c in 1e-6f64..1e3, levels in 3usize..7) {
        let lambdas: Vec<f64> = (0..levels).map(|k| 0.5f64.powi(k as i32)).collect();
        let osc: Vec<f64> = lambdas.iter().map(|l| c * l.powf(s)).collect();
        let fit = DecayFit::fit(&lambdas, &osc).unwrap();
        prop_assert!((fit.slope - s).abs() <= 1e-10, "{} vs {s}", fit.slope);
    }
}

#[test]
fn pressure_gauge_leaves_residual_unchanged() {
    let grid = Grid::periodic(24, 1.0).unwrap();
    let law = StressLaw::full(NFunctionModel::power_law(1.0, 1.0, 3.0).unwrap()).unwrap();
    let g = TensorField::from_fn(grid, |x| {
        let (a, b) = (std::f64::consts::TAU * x[0], std::f64::consts::TAU * x[1]);
        SymMat2::new(a.sin() * b.cos(), (a + b).cos(), -b.sin())
    });
    let cfg = SolverConfig::new(grid, law, g);
    let r = solve_stokes(&cfg).unwrap();
    assert!(r.pi.mean().abs() < 1e-12);
    let base = weak_residual(&cfg, &r).unwrap();
    let mut shifted = r.clone();
    shifted.pi = r.pi.add(&orlicz_stokes::field::ScalarField::constant(grid, 3.5)).unwrap();
    let moved = weak_residual(&cfg, &shifted).unwrap();
    assert!(base < 1e-8 && (moved - base).abs() < 1e-12, "{base:e} {moved:e}");
}
