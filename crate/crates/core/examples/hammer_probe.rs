//! Random-pair probe of the equivalences between the monotonicity gap,
//! `|V(P) - V(Q)|^2` and the shifted N-functions.
//!
//! Usage: `cargo run --example hammer_probe -- [p] [kappa] [pairs]`

use orlicz_stokes::constitutive::{check_assumption_a, hammer_sweep, sample_pairs, StressLaw, RATIO_NAMES};
use orlicz_stokes::nfunc::NFunctionModel;

fn main() -> orlicz_stokes::Result<()> {
    let args: Vec<f64> = std::env::args().skip(1).filter_map(|a| a.parse().ok()).collect();
    let p = args.first().copied().unwrap_or(3.0);
    let kappa = args.get(1).copied().unwrap_or(0.0);
    let count = args.get(2).map(|&c| c as usize).unwrap_or(10_000);
    let law = StressLaw::full(NFunctionModel::power_law(1.0, kappa, p)?)?;
    let pairs = sample_pairs(7, count);
    let (summary, _) = hammer_sweep(&law, &pairs)?;
    println!("{} over {} pairs", summary.law, summary.samples);
    for (name, r) in RATIO_NAMES.iter().zip(&summary.ranges) {
        println!("  {name:<36} [{:.6}, {:.6}]  spread {:.4}", r.min, r.max, r.spread());
    }
    let a = check_assumption_a(&law, &pairs);
    println!("monotonicity/growth constants c={:.4e} C={:.4e} pass={}", a.c_est, a.big_c_est, a.pass);
    Ok(())
}
