//! Mesh refinement study on the periodic manufactured solutions.
//!
//! Usage: `cargo run --example manufactured_convergence -- [p] [kappa] [n...]`

use std::time::Instant;

use orlicz_stokes::constitutive::StressLaw;
use orlicz_stokes::nfunc::NFunctionModel;
use orlicz_stokes::solver::{observed_order, solve_stokes, Manufactured, ManufacturedFlow};

fn main() -> orlicz_stokes::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(3.0);
    let kappa = args.get(1).copied().unwrap_or(1.0);
    let meshes: Vec<usize> = if args.len() > 2 { args[2..].iter().map(|&n| n as usize).collect() } else { vec![16, 32, 64] };
    let law = StressLaw::full(NFunctionModel::power_law(1.0, kappa, p)?)?;
    let flow = if p == 2.0 { ManufacturedFlow::Shear } else { ManufacturedFlow::Stream };
    let m = Manufactured::new(law, flow, 1.0);
    let mut errors = Vec::new();
    println!("{:>5} {:>12} {:>12} {:>12} {:>8} {:>10}", "n", "velocity", "V(Du)", "pressure", "newton", "seconds");
    for n in meshes {
        let t = Instant::now();
        let r = solve_stokes(&m.config(n)?)?;
        let e = m.errors(&r)?;
        println!(
            "{:>5} {:>12.4e} {:>12.4e} {:>12.4e} {:>8} {:>10.3} cg={}",
            n,
            e.velocity,
            e.v_strain,
            e.pressure,
            r.iterations,
            t.elapsed().as_secs_f64(),
            r.linear_iterations
        );
        errors.push(e);
    }
    if errors.len() > 1 {
        println!("observed order: velocity {:.3}, V(Du) {:.3}", observed_order(&errors, |e| e.velocity), observed_order(&errors, |e| e.v_strain));
    }
    Ok(())
}
