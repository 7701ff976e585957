//! BMO, Campanato, VMO and Hoelder diagnostics of three model fields: a
//! smooth one, a `|x|^(1/2)` cusp and a logarithmic singularity.

use orlicz_stokes::field::{Ball, Grid, ScalarField};
use orlicz_stokes::oscillation::{
    bmo_omega_seminorm, campanato_seminorm, holder_seminorm_via_campanato, vmo_modulus, BallFamily, Modulus, Region,
};

fn main() -> orlicz_stokes::Result<()> {
    let n = 128;
    let grid = Grid::dirichlet(n, 2.0, [-1.0, -1.0])?;
    let r = |x: [f64; 2]| x[0].hypot(x[1]).max(1e-3);
    let fields = [
        ("smooth", ScalarField::from_fn(grid, |x| (2.0 * x[0]).sin() * x[1])),
        ("cusp", ScalarField::from_fn(grid, |x| r(x).sqrt())),
        ("log", ScalarField::from_fn(grid, |x| r(x).ln())),
    ];
    let family = BallFamily::new(&grid, Region::Ball(Ball::new([0.0, 0.0], 0.9)?), 0.4, 6)?;
    println!("{}", family.describe());
    println!("{:<8} {:>10} {:>12} {:>12} {:>12} {:>10}", "field", "BMO", "[.]_{0.25}", "[.]_{0.5}", "C^0.5 quot", "VMO finest");
    for (name, f) in &fields {
        let bmo = bmo_omega_seminorm(f, &family, &Modulus::Constant)?;
        let c25 = campanato_seminorm(f, &family, 0.25)?;
        let c50 = campanato_seminorm(f, &family, 0.5)?;
        let h = holder_seminorm_via_campanato(f, &family, 0.5)?;
        let vmo = vmo_modulus(f, &family)?;
        println!(
            "{name:<8} {:>10.4} {:>12.4} {:>12.4} {:>12.4} {:>10.4}{}",
            bmo.value,
            c25,
            c50,
            h.direct,
            vmo.finest,
            if vmo.flat { " (flat)" } else { "" }
        );
    }
    Ok(())
}
