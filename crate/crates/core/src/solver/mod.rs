//! Stationary generalized Stokes and Navier-Stokes solves on a staggered grid.
//!
//! The discrete problem is the minimization of
//! `J(u) = sum_k w_k phi(|D_k u|) h^2 - <G, D u>` over discretely
//! divergence-free face fields, where the quadrature points `k` are the cell
//! centers and grid vertices (weight 1/2 each). Its optimality system is the
//! weak form `<A(Du), D xi> - <pi, div xi> = <G, D xi>`.

mod domain;
mod linear;
mod manufactured;
mod navier;
mod nonlinear;
mod probe;

pub use domain::Domain;
pub use manufactured::{Manufactured, ManufacturedFlow};
pub use manufactured::{observed_order, ManufacturedErrors};
pub use probe::{divergence_free_perturbation, energy_perturbations, EnergyProbe};
pub use navier::{growth_exponent, navier_weak_residual, solve_navier_stokes};

use serde::{Deserialize, Serialize};

use crate::constitutive::StressLaw;
use crate::field::{divergence_vec, Ball, Field, Grid, ScalarField, SymMat2, TensorField, VectorField};
use crate::nfunc::{NFunction, NFunctionModel};
use crate::{Error, Result};
use domain::Quadrature;
use linear::{solve_kkt_direct, Pattern};
use nonlinear::{newton, Discrete, NewtonSettings};

/// Numerical parameters of a solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SolverSettings {
    /// Tolerance on the relative residual.
    pub newton_tol: f64,
    pub max_newton: usize,
    /// Lower bound for `kappa`, the regularization of degenerate laws.
    pub kappa_floor: f64,
    /// Augmented-Lagrangian penalty relative to the mean viscosity.
    pub uzawa_rho: f64,
}

impl Default for SolverSettings {
    fn default() -> Self {
        Self { newton_tol: 1e-9, max_newton: 50, kappa_floor: 1e-8, uzawa_rho: 1.0 }
    }
}

impl SolverSettings {
    pub fn validate(&self) -> Result<()> {
        let ok = self.newton_tol > 0.0
            && self.newton_tol < 1.0
            && self.max_newton > 0
            && self.kappa_floor > 0.0
            && self.kappa_floor.is_finite()
            && self.uzawa_rho > 0.0
            && self.uzawa_rho.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::Config(format!("invalid solver settings {self:?}")))
        }
    }
}

/// Right-hand side in divergence form or as a body force.
#[derive(Debug, Clone, PartialEq)]
pub enum Rhs {
    Tensor(TensorField),
    Vector(VectorField),
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolverConfig {
    pub grid: Grid,
    pub law: StressLaw,
    pub rhs: Rhs,
    /// Face values used where the velocity is not an unknown (Dirichlet grids).
    pub boundary_data: Option<VectorField>,
    pub settings: SolverSettings,
    pub convective: bool,
}

impl SolverConfig {
    pub fn new(grid: Grid, law: StressLaw, g: TensorField) -> SolverConfig {
        SolverConfig {
            grid,
            law,
            rhs: Rhs::Tensor(g),
            boundary_data: None,
            settings: SolverSettings::default(),
            convective: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        self.settings.validate()?;
        self.law.model.validate()?;
        match &self.rhs {
            Rhs::Tensor(g) => self.grid.check_same(g.grid())?,
            Rhs::Vector(f) => self.grid.check_same(f.grid())?,
        }
        if let Some(b) = &self.boundary_data {
            self.grid.check_same(b.grid())?;
            if self.grid.is_periodic() {
                return Err(Error::Config("boundary data given on a periodic grid".into()));
            }
        }
        if self.convective {
            navier::check_growth(&self.law.model)?;
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolveResult {
    pub u: VectorField,
    /// Pressure, zero grid mean over the active cells (and zero elsewhere).
    pub pi: ScalarField,
    /// Relative residuals of the final continuation stage, one per iterate.
    pub residual_history: Vec<f64>,
    /// Newton steps over all continuation stages.
    pub iterations: usize,
    /// Pressure CG steps over all Newton steps.
    pub linear_iterations: usize,
    /// The discrete functional `J(u) = int phi(|Du|) - <G, Du>`.
    pub energy: f64,
    /// Cells carrying the divergence constraint.
    pub mask: Vec<bool>,
    pub continuation_stages: usize,
}

impl SolveResult {
    /// `max |div u|` over the constrained cells.
    pub fn max_divergence(&self) -> f64 {
        let d = divergence_vec(&self.u);
        d.values().iter().zip(&self.mask).filter(|(_, &m)| m).map(|(v, _)| v.abs()).fold(0.0, f64::max)
    }

    pub fn final_residual(&self) -> f64 {
        self.residual_history.last().copied().unwrap_or(0.0)
    }
}

/// Inputs of a solve on a fixed domain.
struct Job<'a> {
    dom: &'a Domain,
    law: &'a StressLaw,
    g: Option<&'a TensorField>,
    /// Full face vector: fixed data on non-free faces and the initial guess.
    full: Vec<f64>,
    settings: SolverSettings,
}

fn degenerate(model: &NFunctionModel) -> bool {
    model.kappa() == Some(0.0) && !model.is_newtonian()
}

/// Regularization floors, from 1 halving down to the target floor.
fn floors(model: &NFunctionModel, target: f64) -> Vec<f64> {
    let mut out = Vec::new();
    if degenerate(model) {
        let mut f = 1.0;
        while f > target {
            out.push(f);
            f *= 0.5;
        }
    }
    out.push(target);
    out
}

fn run(job: Job) -> Result<SolveResult> {
    let Job { dom, law, g, full, settings } = job;
    let grid = *dom.grid();
    let disc = Discrete::new(dom, &full, g);
    let final_model = law.model.with_kappa_floor(settings.kappa_floor);
    let nu_w = final_model.derivative_over_t(1.0);
    let np = dom.pressure_count();
    let zero = vec![0.0; dom.free_count()];
    let (ru0, rp0) = disc.residual(&final_model, &zero, &vec![0.0; np]);
    let scale = norm(&ru0) + nu_w * norm(&rp0);

    let mut u = dom.gather(&full);
    let mut pi = vec![0.0; np];
    let mut history = vec![0.0];
    let mut iterations = 0;
    let mut linear_iterations = 0;
    let stages = floors(&law.model, settings.kappa_floor);
    if scale > 0.0 && dom.free_count() > 0 {
        let pattern = Pattern::new(dom)?;
        for (k, &floor) in stages.iter().enumerate() {
            let last = k + 1 == stages.len();
            let model = law.model.with_kappa_floor(floor);
            let tol = if last { settings.newton_tol } else { settings.newton_tol.max(1e-5) };
            let s = NewtonSettings { tol, max_iter: settings.max_newton, uzawa_rho: settings.uzawa_rho };
            match newton(&disc, &pattern, &model, u.clone(), pi.clone(), s, scale, nu_w) {
                Ok(out) => {
                    u = out.u;
                    pi = out.pi;
                    iterations += out.iterations;
                    linear_iterations += out.linear_iterations;
                    history = out.history;
                }
                Err(Error::NonConvergence { iterations: it, last: l, history: h }) if last => {
                    return Err(Error::NonConvergence {
                        iterations: iterations + it,
                        last: l,
                        history: h,
                    });
                }
                Err(Error::NonConvergence { .. }) => {}
                Err(e) => return Err(e),
            }
        }
    } else {
        u = zero;
    }

    let energy = grid.h * grid.h * disc.energy(&law.model, &u);
    let mut faces = dom.scatter(&full, &u);
    if dom.pinned {
        let v = VectorField::from_vec_unchecked(grid, faces);
        faces = v.shifted(v.component_means()).into_faces();
    }
    let mut p = vec![0.0; grid.cell_count()];
    for (c, v) in dom.constraints.iter().zip(&pi) {
        p[c.cell] = *v;
    }
    Ok(SolveResult {
        u: VectorField::new(grid, faces)?,
        pi: ScalarField::new(grid, p)?,
        residual_history: history,
        iterations,
        linear_iterations,
        energy,
        mask: dom.active.clone(),
        continuation_stages: stages.len(),
    })
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn base_faces(cfg: &SolverConfig) -> Vec<f64> {
    match &cfg.boundary_data {
        Some(b) => b.faces().to_vec(),
        None => vec![0.0; cfg.grid.face_count()],
    }
}

fn rhs_tensor(cfg: &SolverConfig) -> Result<TensorField> {
    match &cfg.rhs {
        Rhs::Tensor(g) => Ok(g.clone()),
        Rhs::Vector(f) => lift_rhs(f),
    }
}

/// Solves the generalized Stokes system on the whole grid.
pub fn solve_stokes(cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    let g = rhs_tensor(cfg)?;
    let dom = Domain::full(cfg.grid)?;
    run(Job { dom: &dom, law: &cfg.law, g: Some(&g), full: base_faces(cfg), settings: cfg.settings })
}

/// Same as [`solve_stokes`] starting from the face values of `init` (free
/// faces only; fixed faces still come from the boundary data).
pub(crate) fn solve_stokes_from(cfg: &SolverConfig, g: &TensorField, init: &VectorField) -> Result<SolveResult> {
    let dom = Domain::full(cfg.grid)?;
    let mut full = base_faces(cfg);
    for &f in &dom.dofs {
        full[f] = init.faces()[f];
    }
    run(Job { dom: &dom, law: &cfg.law, g: Some(g), full, settings: cfg.settings })
}

/// The linear (Newtonian) problem by one sparse LU solve of the full KKT
/// system, independent of the Newton / Uzawa path.
pub fn solve_stokes_direct(cfg: &SolverConfig) -> Result<SolveResult> {
    cfg.validate()?;
    if !cfg.law.model.is_newtonian() {
        return Err(Error::Config(format!("direct solve needs a Newtonian law, got {}", cfg.law.model)));
    }
    let g = rhs_tensor(cfg)?;
    let dom = Domain::full(cfg.grid)?;
    let full = base_faces(cfg);
    let disc = Discrete::new(&dom, &full, Some(&g));
    let zero = vec![0.0; dom.free_count()];
    let h = disc.hessian_triplets(&cfg.law.model, &zero)?;
    let f: Vec<f64> = disc.gradient(&cfg.law.model, &zero).iter().map(|x| -x).collect();
    let rhs_p: Vec<f64> = disc.fixed_div.iter().map(|x| -x).collect();
    let (u, pi) = solve_kkt_direct(&dom, &h, &f, &rhs_p)?;
    let grid = cfg.grid;
    let energy = grid.h * grid.h * disc.energy(&cfg.law.model, &u);
    let mut faces = dom.scatter(&full, &u);
    if dom.pinned {
        let v = VectorField::from_vec_unchecked(grid, faces);
        faces = v.shifted(v.component_means()).into_faces();
    }
    let mut p = vec![0.0; grid.cell_count()];
    for (c, v) in dom.constraints.iter().zip(&pi) {
        p[c.cell] = *v;
    }
    Ok(SolveResult {
        u: VectorField::new(grid, faces)?,
        pi: ScalarField::new(grid, p)?,
        residual_history: vec![],
        iterations: 1,
        linear_iterations: 0,
        energy,
        mask: dom.active.clone(),
        continuation_stages: 1,
    })
}

/// Homogeneous problem (`G = 0`) on the cells of `ball`, with the outer
/// velocity as Dirichlet data on every face that is not interior to the ball.
pub fn solve_homogeneous(cfg: &SolverConfig, outer: &SolveResult, ball: &Ball) -> Result<SolveResult> {
    cfg.settings.validate()?;
    cfg.grid.check_same(outer.u.grid())?;
    let dom = Domain::ball(cfg.grid, ball)?;
    run(Job { dom: &dom, law: &cfg.law, g: None, full: outer.u.faces().to_vec(), settings: cfg.settings })
}

/// Solves `-div Dw + grad sigma = f`, `div w = 0`, `w = 0` on the boundary ring
/// of a Dirichlet grid (cell-center quadrature) and returns `G = Dw - sigma I`,
/// so that `<G, D xi> = <f, xi>` for every interior face field `xi`.
pub fn lift_rhs(f: &VectorField) -> Result<TensorField> {
    let grid = *f.grid();
    if grid.is_periodic() {
        return Err(Error::Config("lift_rhs needs a Dirichlet grid".into()));
    }
    let n = grid.n;
    let active = (0..grid.cell_count())
        .map(|k| {
            let (i, j) = (k % n, k / n);
            i > 0 && j > 0 && i < n - 1 && j < n - 1
        })
        .collect();
    let dom = Domain::from_mask(grid, active, Quadrature::Centers)?;
    let full = vec![0.0; grid.face_count()];
    let disc = Discrete::new(&dom, &full, None);
    let lin = NFunctionModel::power_law(1.0, 0.0, 2.0)?;
    let zero = vec![0.0; dom.free_count()];
    let h = disc.hessian_triplets(&lin, &zero)?;
    let rhs_u = dom.gather(f.faces());
    if rhs_u.iter().all(|v| *v == 0.0) {
        return Ok(TensorField::constant(grid, SymMat2::ZERO));
    }
    let (w, sigma) = solve_kkt_direct(&dom, &h, &rhs_u, &vec![0.0; dom.pressure_count()])?;
    let w = VectorField::new(grid, dom.scatter(&full, &w))?;
    let dw = crate::field::sym_gradient(&w);
    let mut s = vec![0.0; grid.cell_count()];
    for (c, v) in dom.constraints.iter().zip(&sigma) {
        s[c.cell] = *v;
    }
    let values = (0..grid.cell_count())
        .map(|k| if dom.active[k] { dw.values()[k] - s[k] * SymMat2::IDENTITY } else { SymMat2::ZERO })
        .collect();
    TensorField::new(grid, values)
}

/// `<G, D xi>` over the free faces of the whole-grid domain, as a face field
/// (zero on fixed faces). Pairs with face fields through `h^2 sum`.
pub fn forcing_functional(g: &TensorField) -> Result<VectorField> {
    let grid = *g.grid();
    let dom = Domain::full(grid)?;
    let disc = Discrete::new(&dom, &vec![0.0; grid.face_count()], Some(g));
    VectorField::new(grid, dom.scatter(&vec![0.0; grid.face_count()], &disc.forcing))
}

/// Dual norm of the weak-form residual `<A(Du), D xi> - <pi, div xi> - <G, D xi>`
/// over free faces, relative to the larger of the forcing and the stress
/// term (flows driven by boundary data alone have no forcing).
pub fn weak_residual(cfg: &SolverConfig, result: &SolveResult) -> Result<f64> {
    let g = rhs_tensor(cfg)?;
    let dom = Domain::full(cfg.grid)?;
    // fixed faces from the result itself: periodic results are mean-shifted
    let disc = Discrete::new(&dom, result.u.faces(), Some(&g));
    let u = dom.gather(result.u.faces());
    let pi: Vec<f64> = dom.constraints.iter().map(|c| result.pi.values()[c.cell]).collect();
    let (ru, _) = disc.residual(&cfg.law.model, &u, &pi);
    let stress = Discrete::new(&dom, result.u.faces(), None).gradient(&cfg.law.model, &u);
    let scale = norm(&disc.forcing).max(norm(&stress)).max(1e-300);
    Ok(norm(&ru) / scale)
}

/// The discrete functional `J` of an arbitrary face field, with the same
/// quadrature as the solver.
pub fn energy(cfg: &SolverConfig, u: &VectorField) -> Result<f64> {
    let g = rhs_tensor(cfg)?;
    let dom = Domain::full(cfg.grid)?;
    let disc = Discrete::new(&dom, u.faces(), Some(&g));
    let h2 = cfg.grid.h * cfg.grid.h;
    Ok(h2 * disc.energy(&cfg.law.model, &dom.gather(u.faces())))
}

/// Cell-center values of `V(Du)`.
pub fn v_of_strain(law: &StressLaw, u: &VectorField) -> TensorField {
    crate::field::sym_gradient(u).map(|q| law.v_map(&q))
}

/// Mean of `|f|` over the masked cells, used for relative measures.
pub fn masked_l2<F: Field>(f: &F, mask: &[bool]) -> f64
where
    F::Value: crate::field::FieldValue,
{
    use crate::field::FieldValue;
    let g = f.grid();
    let mut s = 0.0;
    for j in 0..g.n {
        for i in 0..g.n {
            if mask[g.cell_index(i, j)] {
                s += f.at(i, j).norm().powi(2);
            }
        }
    }
    (g.h * g.h * s).sqrt()
}

#[cfg(test)]
mod tests;
