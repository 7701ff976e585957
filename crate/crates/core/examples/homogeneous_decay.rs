//! Comparison problem on a ball and the decay of the oscillation of `V(Dh)`
//! on concentric balls `lambda B`.
//!
//! Usage: `cargo run --example homogeneous_decay -- [p] [n]`

use orlicz_stokes::constitutive::StressLaw;
use orlicz_stokes::field::{Ball, Grid, SymMat2, TensorField};
use orlicz_stokes::harness::DecayFit;
use orlicz_stokes::nfunc::NFunctionModel;
use orlicz_stokes::oscillation::mean_square_oscillation;
use orlicz_stokes::solver::{solve_homogeneous, solve_stokes, v_of_strain, SolverConfig};

fn main() -> orlicz_stokes::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(3.0);
    let n = args.get(1).map(|&v| v as usize).unwrap_or(64);
    let grid = Grid::dirichlet(n, 2.0, [-1.0, -1.0])?;
    let law = StressLaw::full(NFunctionModel::power_law(1.0, 0.0, p)?)?;
    let g = TensorField::from_fn(grid, |x| SymMat2::new((2.0 * x[0] + x[1]).sin(), (x[0] - 2.0 * x[1]).cos(), x[1]));
    let cfg = SolverConfig::new(grid, law, g);
    let outer = solve_stokes(&cfg)?;
    let ball = Ball::new([0.0, 0.0], 0.5)?;
    let h = solve_homogeneous(&cfg, &outer, &ball)?;
    let v = v_of_strain(&law, &h.u);
    let (mut lambdas, mut osc) = (Vec::new(), Vec::new());
    for k in 0..5 {
        let l = 0.5f64.powi(k);
        if l * ball.radius < 2.0 * grid.h {
            break;
        }
        lambdas.push(l);
        osc.push(mean_square_oscillation(&v, &ball.scaled(l))?);
        println!("lambda {l:<7} mean-square oscillation {:.4e}", osc[osc.len() - 1]);
    }
    let fit = DecayFit::fit(&lambdas, &osc)?;
    println!("slope {:.4} r^2 {:.4} verdict {:?}", fit.slope, fit.r_squared, fit.verdict);
    Ok(())
}
