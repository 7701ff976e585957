//! Discrete energy, residual and Newton iteration on a [`Domain`].

use super::domain::Domain;
use super::linear::{apply_b, apply_bt, project_mean_free, solve_saddle, Pattern};
use crate::field::TensorField;
use crate::nfunc::{NFunction, NFunctionModel};
use crate::{Error, Result};

/// A discrete problem: domain, fixed face data and forcing.
pub(crate) struct Discrete<'a> {
    pub dom: &'a Domain,
    pub fixed_strain: Vec<[f64; 3]>,
    /// Divergence of the fixed data per constrained cell, mean removed so the
    /// constraint is always solvable.
    pub fixed_div: Vec<f64>,
    /// `<G, D xi>` as a vector over free dofs.
    pub forcing: Vec<f64>,
    /// `G` at the cell-center quadrature points, orthonormal coordinates.
    pub g_points: Vec<[f64; 3]>,
}

impl<'a> Discrete<'a> {
    pub fn new(dom: &'a Domain, full: &[f64], g: Option<&TensorField>) -> Discrete<'a> {
        let fixed_strain = dom.fixed_strains(full);
        let mut fixed_div = dom.fixed_divergence(full);
        project_mean_free(&mut fixed_div);
        let mut forcing = vec![0.0; dom.free_count()];
        let mut g_points = vec![[0.0; 3]; dom.quad.len()];
        if let Some(g) = g {
            for (k, q) in dom.quad.iter().enumerate() {
                let Some(c) = q.cell else { continue };
                let y = g.values()[c].to_orthonormal();
                g_points[k] = y;
                for a in 0..q.len {
                    forcing[q.dofs[a] as usize] +=
                        q.coef[0][a] * y[0] + q.coef[1][a] * y[1] + q.coef[2][a] * y[2];
                }
            }
        }
        Discrete { dom, fixed_strain, fixed_div, forcing, g_points }
    }

    /// `h^{-2}` times the discrete functional `sum_k w_k phi(|D_k u|) - <G, D u>`.
    pub fn energy(&self, model: &NFunctionModel, u: &[f64]) -> f64 {
        let mut e = 0.0;
        for (k, q) in self.dom.quad.iter().enumerate() {
            let y = q.strain(&self.fixed_strain[k], u);
            e += q.weight * model.value(norm3(&y));
            if q.cell.is_some() {
                let g = &self.g_points[k];
                e -= g[0] * y[0] + g[1] * y[1] + g[2] * y[2];
            }
        }
        e
    }

    /// Gradient of the energy (without pressure) and per-point secant viscosity.
    pub fn gradient(&self, model: &NFunctionModel, u: &[f64]) -> Vec<f64> {
        let mut r: Vec<f64> = self.forcing.iter().map(|f| -f).collect();
        for (k, q) in self.dom.quad.iter().enumerate() {
            let y = q.strain(&self.fixed_strain[k], u);
            let t = norm3(&y);
            let a = if t == 0.0 { 0.0 } else { q.weight * model.derivative_over_t(t) };
            if a == 0.0 {
                continue;
            }
            for l in 0..q.len {
                r[q.dofs[l] as usize] +=
                    a * (q.coef[0][l] * y[0] + q.coef[1][l] * y[1] + q.coef[2][l] * y[2]);
            }
        }
        r
    }

    /// Residual `(grad - B^T pi, B u + fixed_div)`.
    pub fn residual(&self, model: &NFunctionModel, u: &[f64], pi: &[f64]) -> (Vec<f64>, Vec<f64>) {
        let mut ru = self.gradient(model, u);
        let bt = apply_bt(self.dom, pi);
        ru.iter_mut().zip(&bt).for_each(|(r, b)| *r -= b);
        let mut rp = apply_b(self.dom, u);
        rp.iter_mut().zip(&self.fixed_div).for_each(|(r, f)| *r += f);
        (ru, rp)
    }

    /// Values of the Hessian `H(u)` on `pattern`, and a viscosity estimate per
    /// constrained cell (for the Schur preconditioner).
    pub fn hessian(&self, model: &NFunctionModel, u: &[f64], pattern: &Pattern) -> (Vec<f64>, Vec<f64>) {
        let mut vals = vec![0.0; pattern.nnz()];
        let mut cell_visc = vec![0.0; self.dom.grid.cell_count()];
        for (k, q) in self.dom.quad.iter().enumerate() {
            let y = q.strain(&self.fixed_strain[k], u);
            let t = norm3(&y);
            let (a, b) = if t == 0.0 {
                let s = model.second_derivative(0.0);
                (s, s)
            } else {
                (model.derivative_over_t(t), model.second_derivative(t))
            };
            if let Some(c) = q.cell {
                cell_visc[c] = 0.5 * (a + b);
            }
            // K = w [a I + (b - a) yhat yhat^T]
            let mut kmat = [[0.0; 3]; 3];
            for r in 0..3 {
                kmat[r][r] = q.weight * a;
                if t > 0.0 {
                    for s in 0..3 {
                        kmat[r][s] += q.weight * (b - a) * y[r] * y[s] / (t * t);
                    }
                }
            }
            let mut kc = [[0.0; super::domain::MAX_LOCAL]; 3];
            for r in 0..3 {
                for l in 0..q.len {
                    kc[r][l] = kmat[r][0] * q.coef[0][l] + kmat[r][1] * q.coef[1][l] + kmat[r][2] * q.coef[2][l];
                }
            }
            let mut pos = pattern.quad_pos[k].iter();
            for i in 0..q.len {
                for j in 0..q.len {
                    if q.dofs[i] >= q.dofs[j] {
                        let v = q.coef[0][i] * kc[0][j] + q.coef[1][i] * kc[1][j] + q.coef[2][i] * kc[2][j];
                        vals[*pos.next().expect("pattern") as usize] += v;
                    }
                }
            }
        }
        let visc = self.dom.constraints.iter().map(|c| cell_visc[c.cell]).collect();
        (vals, visc)
    }

    /// Lower-triangle triplets of the Hessian alone (for the direct route).
    pub fn hessian_triplets(&self, model: &NFunctionModel, u: &[f64]) -> Result<Vec<(usize, usize, f64)>> {
        let pattern = Pattern::new(self.dom)?;
        let (vals, _) = self.hessian(model, u, &pattern);
        Ok(pattern.triplets(&vals))
    }
}

pub(crate) fn norm3(y: &[f64; 3]) -> f64 {
    (y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt()
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

#[derive(Debug, Clone, Copy)]
pub(crate) struct NewtonSettings {
    pub tol: f64,
    pub max_iter: usize,
    pub uzawa_rho: f64,
}

pub(crate) struct NewtonOutcome {
    pub u: Vec<f64>,
    pub pi: Vec<f64>,
    pub history: Vec<f64>,
    pub iterations: usize,
    pub linear_iterations: usize,
}

/// Merit function `|r_u| + nu_w |r_p|`.
fn merit(ru: &[f64], rp: &[f64], nu_w: f64) -> f64 {
    norm(ru) + nu_w * norm(rp)
}

/// Damped Newton for one fixed (regularized) model. `scale` normalizes the
/// residual; the returned history holds `merit / scale` per iterate.
pub(crate) fn newton(
    disc: &Discrete,
    pattern: &Pattern,
    model: &NFunctionModel,
    mut u: Vec<f64>,
    mut pi: Vec<f64>,
    settings: NewtonSettings,
    scale: f64,
    nu_w: f64,
) -> Result<NewtonOutcome> {
    let inner_tol = (1e-3 * settings.tol).clamp(1e-13, 1e-8);
    let (mut ru, mut rp) = disc.residual(model, &u, &pi);
    let mut m = merit(&ru, &rp, nu_w);
    let mut history = vec![m / scale];
    let mut iterations = 0;
    let mut linear_iterations = 0;
    while m / scale > settings.tol {
        if iterations >= settings.max_iter {
            return Err(Error::NonConvergence { iterations, last: m / scale, history });
        }
        let (mut vals, visc) = disc.hessian(model, &u, pattern);
        let mean_visc = visc.iter().sum::<f64>() / visc.len().max(1) as f64;
        let gamma = settings.uzawa_rho * mean_visc.max(1e-300);
        add_penalty(disc, pattern, &mut vals, gamma);
        let factor = pattern.factor(&vals)?;
        let precond: Vec<f64> = visc.iter().map(|v| v + gamma).collect();
        let f: Vec<f64> = ru.iter().map(|x| -x).collect();
        let g: Vec<f64> = rp.iter().map(|x| -x).collect();
        let step = solve_saddle(disc.dom, &factor, gamma, &f, &g, &precond, inner_tol)?;
        linear_iterations += step.cg_iterations;

        let mut alpha = 1.0;
        let mut accepted = None;
        for _ in 0..=20 {
            let un: Vec<f64> = u.iter().zip(&step.du).map(|(a, d)| a + alpha * d).collect();
            let pn: Vec<f64> = pi.iter().zip(&step.dpi).map(|(a, d)| a + alpha * d).collect();
            let (run, rpn) = disc.residual(model, &un, &pn);
            let mn = merit(&run, &rpn, nu_w);
            if mn.is_finite() && mn <= (1.0 - 1e-4 * alpha) * m {
                accepted = Some((un, pn, run, rpn, mn));
                break;
            }
            alpha *= 0.5;
        }
        iterations += 1;
        match accepted {
            Some((un, pn, run, rpn, mn)) => {
                u = un;
                pi = pn;
                ru = run;
                rp = rpn;
                m = mn;
                history.push(m / scale);
            }
            None => {
                return Err(Error::NonConvergence { iterations, last: m / scale, history });
            }
        }
    }
    Ok(NewtonOutcome { u, pi, history, iterations, linear_iterations })
}

/// Adds `gamma B^T B`.
fn add_penalty(disc: &Discrete, pattern: &Pattern, vals: &mut [f64], gamma: f64) {
    for (k, c) in disc.dom.constraints.iter().enumerate() {
        let mut pos = pattern.con_pos[k].iter();
        for i in 0..c.len {
            for j in 0..c.len {
                if c.dofs[i] >= c.dofs[j] {
                    vals[*pos.next().expect("pattern") as usize] += gamma * c.coef[i] * c.coef[j];
                }
            }
        }
    }
}
