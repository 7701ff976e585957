//! Stationary flow with the convective term, by Picard iteration around the
//! generalized Stokes solver.

use orlicz_stokes::constitutive::StressLaw;
use orlicz_stokes::field::{Grid, SymMat2, TensorField};
use orlicz_stokes::nfunc::NFunctionModel;
use orlicz_stokes::solver::{growth_exponent, navier_weak_residual, solve_navier_stokes, solve_stokes, SolverConfig};

fn main() -> orlicz_stokes::Result<()> {
    let grid = Grid::dirichlet(32, 2.0, [-1.0, -1.0])?;
    let g = TensorField::from_fn(grid, |x| SymMat2::new(0.0, 2.0 * (3.0 * x[0]).sin() * (2.0 * x[1]).cos(), 0.0));
    for p in [1.4, 2.0, 3.0] {
        let law = StressLaw::full(NFunctionModel::power_law(1.0, 1.0, p)?)?;
        let mut cfg = SolverConfig::new(grid, law, g.clone());
        cfg.convective = true;
        match solve_navier_stokes(&cfg) {
            Ok(ns) => {
                cfg.convective = false;
                let stokes = solve_stokes(&cfg)?;
                cfg.convective = true;
                println!(
                    "p={p}: {} Picard steps, residual {:.2e}, |u_NS - u_Stokes|_inf = {:.3e}",
                    ns.iterations,
                    navier_weak_residual(&cfg, &ns)?,
                    ns.u.sub(&stokes.u)?.max_norm()
                );
            }
            Err(e) => println!("p={p} (growth exponent {:.2}): {e}", growth_exponent(&law.model)?),
        }
    }
    Ok(())
}
