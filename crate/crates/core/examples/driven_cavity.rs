//! Shear-thinning flow in a box driven by a moving lid, written as CSV.
//!
//! Usage: `cargo run --example driven_cavity -- [n] [p] > cavity.csv`

use orlicz_stokes::constitutive::StressLaw;
use orlicz_stokes::field::{write_vector_csv, Grid, TensorField, VectorField};
use orlicz_stokes::nfunc::NFunctionModel;
use orlicz_stokes::solver::{solve_stokes, weak_residual, SolverConfig};

fn main() -> orlicz_stokes::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let n = args.first().map(|&v| v as usize).unwrap_or(32);
    let p = args.get(1).copied().unwrap_or(1.5);
    let grid = Grid::dirichlet(n, 1.0, [0.0, 0.0])?;
    let law = StressLaw::full(NFunctionModel::power_law(1.0, 1e-3, p)?)?;
    let mut cfg = SolverConfig::new(grid, law, TensorField::constant(grid, Default::default()));
    // Faces touching the outer ring of cells carry the boundary data: unit
    // tangential velocity in the top row, zero elsewhere.
    let lid = 1.0 - grid.h;
    cfg.boundary_data = Some(VectorField::from_fn(grid, |x| if x[1] > lid { [1.0, 0.0] } else { [0.0, 0.0] }));
    let r = solve_stokes(&cfg)?;
    eprintln!(
        "n={n} p={p}: {} Newton steps, {} CG steps, {} continuation stages, weak residual {:.2e}, max |div u| {:.2e}",
        r.iterations,
        r.linear_iterations,
        r.continuation_stages,
        weak_residual(&cfg, &r)?,
        r.max_divergence()
    );
    write_vector_csv(&r.u, std::io::stdout().lock())
}
