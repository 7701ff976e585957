//! Picard iteration on the convective term `u (x) u`.

use super::{rhs_tensor, solve_stokes, solve_stokes_from, weak_residual, Rhs, SolveResult, SolverConfig};
use crate::field::{Field, SymMat2, TensorField, VectorField};
use crate::nfunc::{estimate_indices, NFunction, NFunctionModel};
use crate::{Error, Result};

const MAX_PICARD: usize = 100;

/// Growth exponent `r` with `phi(t) ~ t^r` for large `t`: the larger of the
/// lower index and the asymptotic doubling exponent.
pub fn growth_exponent(model: &NFunctionModel) -> Result<f64> {
    let s = 1e6;
    let asymptotic = (model.value(2.0 * s) / model.value(s)).log2();
    Ok(estimate_indices(model)?.p_lower.max(asymptotic))
}

pub(crate) fn check_growth(model: &NFunctionModel) -> Result<()> {
    let r = growth_exponent(model)?;
    if r > 1.5 {
        Ok(())
    } else {
        Err(Error::Config(format!(
            "convective term needs growth exponent r > 3/2, {model} has r = {r:.4}"
        )))
    }
}

fn convective(u: &VectorField) -> TensorField {
    let g = *u.grid();
    let mut out = Vec::with_capacity(g.cell_count());
    for j in 0..g.n {
        for i in 0..g.n {
            out.push(SymMat2::outer(u.at(i, j)));
        }
    }
    TensorField::from_vec_unchecked(g, out)
}

/// Stationary generalized Navier-Stokes: the weak form with right-hand side
/// `G + u (x) u`, solved by Picard iteration over generalized Stokes solves.
pub fn solve_navier_stokes(cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    check_growth(&cfg.law.model)?;
    let g = rhs_tensor(cfg)?;
    let mut current = solve_stokes(&SolverConfig { rhs: Rhs::Tensor(g.clone()), ..cfg.clone() })?;
    let tol = cfg.settings.newton_tol;
    let mut last_change = f64::INFINITY;
    let mut increases = 0;
    let mut iterations = current.iterations;
    for _ in 0..MAX_PICARD {
        let norm = current.u.l2_norm();
        if norm == 0.0 {
            return Ok(current);
        }
        let g_eff = g.add(&convective(&current.u))?;
        let next = solve_stokes_from(cfg, &g_eff, &current.u)?;
        iterations += next.iterations;
        let change = next.u.sub(&current.u)?.l2_norm();
        current = next;
        if change <= tol * norm {
            current.iterations = iterations;
            return Ok(current);
        }
        if change > last_change {
            increases += 1;
            if increases >= 3 {
                return Err(Error::PicardDivergence(format!(
                    "update norm grew three times in a row (now {change:e}); try smaller data"
                )));
            }
        } else {
            increases = 0;
        }
        last_change = change;
    }
    Err(Error::PicardDivergence(format!("no convergence in {MAX_PICARD} steps (last update {last_change:e})")))
}

/// Relative weak residual of the Navier-Stokes form at `result`.
pub fn navier_weak_residual(cfg: &SolverConfig, result: &SolveResult) -> Result<f64> {
    let g = rhs_tensor(cfg)?.add(&convective(&result.u))?;
    weak_residual(&SolverConfig { rhs: Rhs::Tensor(g), ..cfg.clone() }, result)
}
