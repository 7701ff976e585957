//! Decay of the mean-square oscillation of `V(Dh)` on shrinking balls.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, GRecipe};
use super::recipes::recipe_field;
use super::report::{ExperimentReport, Table};
use crate::field::Ball;
use crate::oscillation::mean_square_oscillation;
use crate::solver::{solve_homogeneous, solve_stokes, v_of_strain, SolverConfig};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum DecayVerdict {
    Decaying,
    NotDecaying,
    /// All oscillations vanish; nothing to fit.
    Degenerate,
}

/// Least-squares fit of `log osc = slope log lambda + c`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct DecayFit {
    pub lambdas: Vec<f64>,
    pub oscillations: Vec<f64>,
    /// Which levels entered the fit.
    pub used: Vec<bool>,
    /// The fitted exponent, an estimate of `2 gamma`.
    pub slope: f64,
    pub intercept: f64,
    pub r_squared: f64,
    pub verdict: DecayVerdict,
}

impl DecayFit {
    /// Fits on the levels `lambda <= 1/2` when at least four levels are given,
    /// else on all of them. Needs three levels.
    pub fn fit(lambdas: &[f64], oscillations: &[f64]) -> Result<DecayFit> {
        if lambdas.len() != oscillations.len() {
            return Err(Error::Config("lambdas and oscillations differ in length".into()));
        }
        if lambdas.len() < 3 {
            return Err(Error::InsufficientScales(lambdas.len()));
        }
        let mut out = DecayFit {
            lambdas: lambdas.to_vec(),
            oscillations: oscillations.to_vec(),
            used: vec![false; lambdas.len()],
            slope: 0.0,
            intercept: 0.0,
            r_squared: 0.0,
            verdict: DecayVerdict::Degenerate,
        };
        if oscillations.iter().all(|o| *o == 0.0) {
            return Ok(out);
        }
        let drop_top = lambdas.len() >= 4;
        for (k, &l) in lambdas.iter().enumerate() {
            out.used[k] = (!drop_top || l <= 0.5) && oscillations[k] > 0.0;
        }
        let pts: Vec<(f64, f64)> = (0..lambdas.len())
            .filter(|&k| out.used[k])
            .map(|k| (lambdas[k].ln(), oscillations[k].ln()))
            .collect();
        if pts.len() < 2 {
            return Ok(out);
        }
        let m = pts.len() as f64;
        let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
        let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
        let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
        let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
        let syy: f64 = pts.iter().map(|p| (p.1 - my).powi(2)).sum();
        out.slope = sxy / sxx;
        out.intercept = my - out.slope * mx;
        out.r_squared = if syy == 0.0 { 1.0 } else { sxy * sxy / (sxx * syy) };
        out.verdict = if out.slope > 0.0 && out.r_squared >= 0.9 { DecayVerdict::Decaying } else { DecayVerdict::NotDecaying };
        Ok(out)
    }
}

#[derive(Serialize)]
struct LevelRow {
    p: f64,
    kappa: f64,
    lambda: f64,
    radius: f64,
    cells: usize,
    oscillation: f64,
    used: bool,
}

#[derive(Serialize)]
struct FitRow {
    p: f64,
    kappa: f64,
    n: usize,
    slope: f64,
    r_squared: f64,
    verdict: DecayVerdict,
    outer_newton: usize,
    inner_newton: usize,
}

/// Outer solve on the box with a smooth right-hand side, the homogeneous
/// comparison solve on the centered ball `B` and the decay fit of
/// `mean_{lambda B} |V(Dh) - <V(Dh)>_{lambda B}|^2`.
pub fn run_decay_experiment(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.solver.n;
    let grid = cfg.solver.grid(n)?;
    let ball = Ball::new(cfg.solver.center(), cfg.sweep.ball_radius)?;
    let runs: Vec<(f64, f64, DecayFit, Vec<usize>, usize, usize)> = cfg
        .law_points()
        .into_par_iter()
        .map(|(p, kappa)| {
            let law = cfg.solver.law_at(p, kappa)?;
            let g = recipe_field(GRecipe::Smooth, grid, cfg.sweep.amplitude, cfg.solver.center());
            let mut sc = SolverConfig::new(grid, law, g);
            sc.settings = cfg.solver.settings();
            let outer = solve_stokes(&sc)?;
            let h = solve_homogeneous(&sc, &outer, &ball)?;
            let v = v_of_strain(&law, &h.u);
            let mut lambdas = Vec::new();
            let mut osc = Vec::new();
            let mut cells = Vec::new();
            for &l in &cfg.sweep.lambdas {
                let b = ball.scaled(l);
                if b.radius < 2.0 * grid.h * (1.0 - 1e-12) {
                    continue;
                }
                lambdas.push(l);
                osc.push(mean_square_oscillation(&v, &b)?);
                cells.push(b.cells(&grid)?.len());
            }
            let fit = DecayFit::fit(&lambdas, &osc)?;
            Ok((p, kappa, fit, cells, outer.iterations, h.iterations))
        })
        .collect::<Result<_>>()?;

    let mut rep = ExperimentReport::new(cfg.experiment);
    let mut levels = Vec::new();
    let mut fits = Vec::new();
    for (p, kappa, fit, cells, on, inn) in &runs {
        for k in 0..fit.lambdas.len() {
            levels.push(LevelRow {
                p: *p,
                kappa: *kappa,
                lambda: fit.lambdas[k],
                radius: fit.lambdas[k] * ball.radius,
                cells: cells[k],
                oscillation: fit.oscillations[k],
                used: fit.used[k],
            });
        }
        fits.push(FitRow {
            p: *p,
            kappa: *kappa,
            n,
            slope: fit.slope,
            r_squared: fit.r_squared,
            verdict: fit.verdict,
            outer_newton: *on,
            inner_newton: *inn,
        });
        rep.check(
            format!("oscillation decays p={p} kappa={kappa}"),
            fit.verdict == DecayVerdict::Decaying,
            format!("slope {:.4} (2 gamma estimate), r^2 {:.4}, {:?}", fit.slope, fit.r_squared, fit.verdict),
        );
    }
    let planted = 1.7;
    let lam = [1.0, 0.5, 0.25, 0.125, 0.0625];
    let synth: Vec<f64> = lam.iter().map(|l: &f64| 3.0 * l.powf(planted)).collect();
    let f = DecayFit::fit(&lam, &synth)?;
    rep.check(
        "synthetic regression recovers planted exponent",
        (f.slope - planted).abs() <= 1e-10,
        format!("planted {planted}, recovered {:.15}", f.slope),
    );
    rep.tables.push(Table::from_rows("decay_levels.csv", &levels)?);
    rep.tables.push(Table::from_rows("decay_fit.csv", &fits)?);
    Ok(rep)
}
