use super::*;
use crate::field::{scalar_gradient, sym_gradient};
use std::time::Instant;

fn law(p: f64, kappa: f64) -> StressLaw {
    StressLaw::full(NFunctionModel::power_law(1.0, kappa, p).unwrap()).unwrap()
}

#[test]
fn zero_rhs_gives_zero_solution() {
    for p in [1.5, 2.0, 3.0] {
        let grid = Grid::periodic(8, 1.0).unwrap();
        let cfg = SolverConfig::new(grid, law(p, 0.0), TensorField::constant(grid, SymMat2::ZERO));
        let r = solve_stokes(&cfg).unwrap();
        assert!(r.u.faces().iter().all(|v| *v == 0.0));
        assert!(r.pi.values().iter().all(|v| *v == 0.0));
    }
}

#[test]
fn newtonian_matches_direct_solve() {
    let m = Manufactured::new(law(2.0, 0.0), ManufacturedFlow::Stream, 1.0);
    let cfg = m.config(16).unwrap();
    let a = solve_stokes(&cfg).unwrap();
    let b = solve_stokes_direct(&cfg).unwrap();
    let du = a.u.sub(&b.u).unwrap().max_norm();
    let dp = a.pi.add(&b.pi.scaled(-1.0)).unwrap().max_norm();
    assert!(du < 1e-8 && dp < 1e-8, "{du:e} {dp:e}");
    assert!(a.pi.mean().abs() < 1e-12);
}

#[test]
fn newtonian_dirichlet_with_boundary_data() {
    let grid = Grid::dirichlet(12, 1.0, [0.0, 0.0]).unwrap();
    let data = VectorField::from_fn(grid, |x| [x[1] * x[1], x[0]]);
    let g = TensorField::from_fn(grid, |x| SymMat2::new(x[0].sin(), x[1], 0.0));
    let mut cfg = SolverConfig::new(grid, law(2.0, 0.7), g);
    cfg.boundary_data = Some(data);
    let a = solve_stokes(&cfg).unwrap();
    let b = solve_stokes_direct(&cfg).unwrap();
    assert!(a.u.sub(&b.u).unwrap().max_norm() < 1e-8);
    assert!(a.max_divergence() < 1e-9);
}

#[test]
fn shear_manufactured_converges_second_order() {
    let m = Manufactured::new(law(2.0, 0.0), ManufacturedFlow::Shear, 1.0);
    let errs: Vec<_> = [16, 32]
        .iter()
        .map(|&n| m.errors(&solve_stokes(&m.config(n).unwrap()).unwrap()).unwrap())
        .collect();
    let order = observed_order(&errs, |e| e.velocity);
    assert!((order - 2.0).abs() < 0.4, "{order} {errs:?}");
}

#[test]
fn nonlinear_manufactured_improves() {
    let m = Manufactured::new(law(3.0, 1.0), ManufacturedFlow::Stream, 1.0);
    let mut prev = f64::INFINITY;
    for n in [16, 32] {
        let t = Instant::now();
        let cfg = m.config(n).unwrap();
        let r = solve_stokes(&cfg).unwrap();
        let e = m.errors(&r).unwrap();
        eprintln!("n={n} {e:?} newton={} {:?}", r.iterations, t.elapsed());
        assert!(e.v_strain < prev);
        assert!(weak_residual(&cfg, &r).unwrap() < 1e-8);
        prev = e.v_strain;
    }
}

#[test]
fn degenerate_laws_converge_through_continuation() {
    for p in [1.5, 3.0] {
        let t = Instant::now();
        let m = Manufactured::new(law(p, 0.0), ManufacturedFlow::Stream, 1.0);
        let r = solve_stokes(&m.config(16).unwrap()).unwrap();
        eprintln!("p={p}: stages {} newton {} res {:e} {:?}", r.continuation_stages, r.iterations, r.final_residual(), t.elapsed());
        assert!(r.final_residual() <= 1e-9);
        let scale = sym_gradient(&r.u).max_norm();
        assert!(r.max_divergence() <= 1e-7 * scale);
    }
}

#[test]
fn lift_of_zero_and_of_gradients() {
    let grid = Grid::dirichlet(10, 1.0, [0.0, 0.0]).unwrap();
    let g0 = lift_rhs(&VectorField::zeros(grid)).unwrap();
    assert!(g0.values().iter().all(|v| *v == SymMat2::ZERO));

    let psi = ScalarField::from_fn(grid, |x| (3.0 * x[0]).sin() + x[1] * x[1]);
    let g = lift_rhs(&scalar_gradient(&psi)).unwrap();
    // G = -psi I + c on the constrained cells, with Dw = 0
    let inner: Vec<usize> = (0..grid.cell_count())
        .filter(|&k| {
            let (i, j) = (k % 10, k / 10);
            i > 0 && j > 0 && i < 9 && j < 9
        })
        .collect();
    let c = g.values()[inner[0]].a11 + psi.values()[inner[0]];
    for &k in &inner {
        let v = g.values()[k];
        assert!(v.a12.abs() < 1e-10 && (v.a11 - v.a22).abs() < 1e-10);
        assert!((v.a11 + psi.values()[k] - c).abs() < 1e-10);
    }
    assert!(lift_rhs(&VectorField::zeros(Grid::periodic(8, 1.0).unwrap())).is_err());
}

#[test]
fn lift_reproduces_constant_force_weakly() {
    let grid = Grid::dirichlet(12, 1.0, [0.0, 0.0]).unwrap();
    let f = VectorField::from_fn(grid, |_| [1.0, 0.0]);
    let g = lift_rhs(&f).unwrap();
    // <G, D xi> = <f, xi> for every interior test field
    let dom = Domain::from_mask(
        grid,
        (0..grid.cell_count()).map(|k| {
            let (i, j) = (k % 12, k / 12);
            i > 0 && j > 0 && i < 11 && j < 11
        }).collect(),
        Quadrature::Centers,
    )
    .unwrap();
    let disc = nonlinear::Discrete::new(&dom, &vec![0.0; grid.face_count()], Some(&g));
    let want = dom.gather(f.faces());
    let err = disc.forcing.iter().zip(&want).map(|(a, b)| (a - b).abs()).fold(0.0, f64::max);
    assert!(err < 1e-10, "{err:e}");
}

#[test]
fn homogeneous_subproblem() {
    let grid = Grid::dirichlet(24, 2.0, [-1.0, -1.0]).unwrap();
    let cfg = SolverConfig::new(grid, law(3.0, 1.0), TensorField::constant(grid, SymMat2::ZERO));
    let ball = Ball::new([0.0, 0.0], 0.6).unwrap();
    // zero data
    let zero = solve_stokes(&cfg).unwrap();
    let h = solve_homogeneous(&cfg, &zero, &ball).unwrap();
    assert!(h.u.max_norm() == 0.0);
    // outer already homogeneous: boundary data from an affine incompressible field
    let mut c2 = cfg.clone();
    c2.boundary_data = Some(VectorField::from_fn(grid, |x| [x[0] + 0.3 * x[1], -x[1]]));
    let outer = solve_stokes(&c2).unwrap();
    let h = solve_homogeneous(&c2, &outer, &ball).unwrap();
    assert!(h.u.sub(&outer.u).unwrap().max_norm() < 1e-7);
}

#[test]
fn navier_stokes_checks() {
    let grid = Grid::periodic(8, 1.0).unwrap();
    let mut cfg = SolverConfig::new(grid, law(1.4, 1.0), TensorField::constant(grid, SymMat2::ZERO));
    cfg.convective = true;
    assert!(matches!(solve_navier_stokes(&cfg), Err(Error::Config(_))));
    cfg.law = law(2.0, 0.0);
    let r = solve_navier_stokes(&cfg).unwrap();
    assert_eq!(r.u.max_norm(), 0.0);
}

#[test]
fn navier_stokes_small_data_is_a_perturbation() {
    let amp = 0.05;
    let m = Manufactured::new(law(2.0, 0.0), ManufacturedFlow::Stream, 1.0);
    let mut cfg = m.config(16).unwrap();
    let Rhs::Tensor(g) = &cfg.rhs else { unreachable!() };
    cfg.rhs = Rhs::Tensor(g.scaled(amp));
    cfg.convective = true;
    let stokes = solve_stokes(&cfg).unwrap();
    let ns = solve_navier_stokes(&cfg).unwrap();
    let diff = ns.u.sub(&stokes.u).unwrap().l2_norm() / stokes.u.l2_norm();
    assert!(diff < 10.0 * amp, "{diff}");
    assert!(navier_weak_residual(&cfg, &ns).unwrap() < 1e-7);
}

#[test]
fn energy_is_locally_minimal() {
    let m = Manufactured::new(law(3.0, 1.0), ManufacturedFlow::Stream, 1.0);
    let cfg = m.config(16).unwrap();
    let r = solve_stokes(&cfg).unwrap();
    let j0 = energy(&cfg, &r.u).unwrap();
    assert!((j0 - r.energy).abs() <= 1e-12 * j0.abs());
    let grid = cfg.grid;
    // discrete curl of a vertex stream function is exactly divergence-free
    for k in 1..4 {
        let kk = k as f64;
        let psi = |a: usize, b: usize| ((a as f64) * grid.h * kk).sin() * ((b as f64) * grid.h).cos();
        let mut faces = vec![0.0; grid.face_count()];
        let n = grid.n;
        for j in 0..n {
            for i in 0..n {
                faces[grid.u1_face(i as isize, j as isize).unwrap()] = (psi(i, j + 1) - psi(i, j)) / grid.h;
                faces[grid.u2_face(i as isize, j as isize).unwrap()] = -(psi(i + 1, j) - psi(i, j)) / grid.h;
            }
        }
        let xi = VectorField::new(grid, faces).unwrap();
        assert!(divergence_vec(&xi).max_norm() < 1e-10);
        for eps in [1e-3, -1e-3, 1e-2, -1e-2] {
            let j = energy(&cfg, &r.u.add(&xi.scaled(eps)).unwrap()).unwrap();
            assert!(j >= j0, "eps={eps} {j} < {j0}");
        }
    }
}

#[test]
fn random_perturbations_are_divergence_free_and_respect_fixed_faces() {
    let grid = Grid::dirichlet(12, 1.0, [0.0, 0.0]).unwrap();
    let cfg = SolverConfig::new(grid, law(3.0, 1.0), TensorField::from_fn(grid, |x| SymMat2::new(x[0], 0.2, -x[1])));
    let r = solve_stokes(&cfg).unwrap();
    let mut rng = <rand_chacha::ChaCha8Rng as rand::SeedableRng>::seed_from_u64(3);
    let xi = divergence_free_perturbation(&cfg, &r.u, &mut rng).unwrap();
    let dom = Domain::full(grid).unwrap();
    for (f, v) in xi.faces().iter().enumerate() {
        if dom.free[f].is_none() {
            assert_eq!(*v, 0.0);
        }
    }
    assert!(divergence_vec(&xi).max_norm() < 1e-9 * xi.max_norm() / grid.h);
    let probes = energy_perturbations(&cfg, &r, 9, 10, &[1e-3, -1e-2]).unwrap();
    assert!(probes.iter().all(|p| p.delta > 0.0));
}
