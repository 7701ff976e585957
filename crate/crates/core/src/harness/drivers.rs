//! Thin drivers: N-function verification, Hammer sweep, manufactured
//! convergence and the convective problem.

use rayon::prelude::*;
use serde::Serialize;

use super::config::{ExperimentConfig, GRecipe, ModelKind};
use super::estimate::{estimate_sides, families};
use super::recipes::recipe_field;
use super::report::{ExperimentReport, Table};
use crate::constitutive::{check_assumption_a, hammer_sweep, sample_pairs, summarize, StressLaw, RATIO_NAMES};
use crate::field::{sym_gradient, Ball, SymMat2, TensorField};
use crate::nfunc::{verify_structural_inequalities, Conjugate, NFunction, NFunctionModel, SampleSpec};
use crate::oscillation::campanato_seminorm;
use crate::solver::{
    energy_perturbations, growth_exponent, navier_weak_residual, observed_order, solve_navier_stokes, solve_stokes,
    solve_stokes_direct, weak_residual, Manufactured, ManufacturedErrors, ManufacturedFlow, SolverConfig,
};
use crate::{Error, Result};

fn logspace(lo: f64, hi: f64, n: usize) -> impl Iterator<Item = f64> {
    let r = (hi / lo).ln();
    (0..n).map(move |k| lo * (r * k as f64 / (n - 1) as f64).exp())
}

/// Largest relative error of `phi**` against `phi` on `[1e-3, 1e3]`, the
/// outer conjugate taken through a numerical inversion of `(phi*)'`.
pub fn involution_error(m: &NFunctionModel) -> f64 {
    let c = Conjugate(*m);
    logspace(1e-3, 1e3, 61)
        .map(|t| {
            let s = c.numeric_inverse_derivative(t);
            let back = t * s - c.value(s);
            (back - m.value(t)).abs() / m.value(t).max(1e-300)
        })
        .fold(0.0, f64::max)
}

/// Largest relative error of `(phi')^-1(phi'(t))` on `[1e-6, 1e6]`.
pub fn roundtrip_error(m: &NFunctionModel) -> f64 {
    logspace(1e-6, 1e6, 121)
        .map(|t| (m.inverse_derivative(m.derivative(t)) / t - 1.0).abs())
        .fold(0.0, f64::max)
}

#[derive(Serialize)]
struct NfuncRow {
    model: String,
    p_lower: f64,
    q_upper: f64,
    k1: f64,
    young_k: f64,
    young_worst: f64,
    chain_violations: usize,
    young_violations: usize,
    phi_over_t_dphi_min: f64,
    phi_over_t_dphi_max: f64,
    conj_dphi_over_phi_min: f64,
    conj_dphi_over_phi_max: f64,
    dphi_over_t_ddphi_min: f64,
    dphi_over_t_ddphi_max: f64,
    delta2_phi: f64,
    delta2_conjugate: f64,
    shift_duality_min: f64,
    shift_duality_max: f64,
    involution_error: f64,
    roundtrip_error: f64,
    pass: bool,
}

/// Every model kind of the sweep at every `(p, kappa)`; the arcsinh law has
/// no parameters and appears once. An empty grid gives no models.
fn sweep_models(cfg: &ExperimentConfig) -> Result<Vec<NFunctionModel>> {
    let mut models = Vec::new();
    if cfg.law_points().is_empty() {
        return Ok(models);
    }
    for &kind in &cfg.sweep.models {
        if kind == ModelKind::ArcSinh {
            models.push(kind.model(2.0, 0.0)?);
        } else {
            for (p, k) in cfg.law_points() {
                models.push(kind.model(p, k)?);
            }
        }
    }
    Ok(models)
}

pub fn run_nfunc_verification(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let models = sweep_models(cfg)?;
    let spec = SampleSpec::default();
    let rows: Vec<NfuncRow> = models
        .par_iter()
        .map(|m| {
            let r = verify_structural_inequalities(m, &spec)?;
            let inv = involution_error(m);
            let rt = roundtrip_error(m);
            Ok(NfuncRow {
                model: m.to_string(),
                p_lower: r.indices.p_lower,
                q_upper: r.indices.q_upper,
                k1: r.indices.k1,
                young_k: r.young_k,
                young_worst: r.young_worst,
                chain_violations: r.chain_violations,
                young_violations: r.young_violations,
                phi_over_t_dphi_min: r.phi_vs_t_phi_prime.min,
                phi_over_t_dphi_max: r.phi_vs_t_phi_prime.max,
                conj_dphi_over_phi_min: r.conj_of_derivative_vs_phi.min,
                conj_dphi_over_phi_max: r.conj_of_derivative_vs_phi.max,
                dphi_over_t_ddphi_min: r.derivative_vs_t_second.min,
                dphi_over_t_ddphi_max: r.derivative_vs_t_second.max,
                delta2_phi: r.delta2_phi,
                delta2_conjugate: r.delta2_conjugate,
                shift_duality_min: r.shift_duality.min,
                shift_duality_max: r.shift_duality.max,
                involution_error: inv,
                roundtrip_error: rt,
                pass: r.pass && inv <= 1e-8 && rt <= 1e-10,
            })
        })
        .collect::<Result<_>>()?;
    let mut rep = ExperimentReport::new(cfg.experiment);
    for r in &rows {
        rep.check(
            format!("structural inequalities {}", r.model),
            r.pass,
            format!(
                "involution {:.1e}, round-trip {:.1e}, chain/young violations {}/{}",
                r.involution_error, r.roundtrip_error, r.chain_violations, r.young_violations
            ),
        );
    }
    rep.tables.push(Table::from_rows("nfunc_verify.csv", &rows)?);
    Ok(rep)
}

#[derive(Serialize)]
struct HammerRow<'a> {
    law: &'a str,
    ratio: &'a str,
    min: f64,
    max: f64,
    spread: f64,
    min_doubled: f64,
    max_doubled: f64,
    spread_doubled: f64,
}

#[derive(Serialize)]
struct AssumptionRow<'a> {
    law: &'a str,
    c_est: f64,
    big_c_est: f64,
    pass: bool,
}

/// Hammer equivalence probes for each `(p, kappa)`, on `samples` pairs and on
/// the doubled sample (which extends the first).
pub fn run_hammer_sweep(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let n = cfg.sweep.samples;
    let pairs = sample_pairs(cfg.seed, 2 * n);
    let mut rep = ExperimentReport::new(cfg.experiment);
    let mut rows_out = Vec::new();
    let mut assumption = Vec::new();
    let mut names = Vec::new();
    let mut results = Vec::new();
    for model in sweep_models(cfg)? {
        let law = StressLaw::new(model, cfg.solver.form)?;
        let (doubled, records) = hammer_sweep(&law, &pairs)?;
        let single = summarize(&law, &records[..n]);
        let a = check_assumption_a(&law, &pairs[..n]);
        names.push(law.model.to_string());
        results.push((model.is_newtonian(), single, doubled, a));
    }
    for (name, (newtonian, single, doubled, a)) in names.iter().zip(&results) {
        for (k, ratio) in RATIO_NAMES.iter().enumerate() {
            let (s, d) = (single.ranges[k], doubled.ranges[k]);
            rows_out.push(HammerRow {
                law: name,
                ratio,
                min: s.min,
                max: s.max,
                spread: s.spread(),
                min_doubled: d.min,
                max_doubled: d.max,
                spread_doubled: d.spread(),
            });
        }
        assumption.push(AssumptionRow { law: name, c_est: a.c_est, big_c_est: a.big_c_est, pass: a.pass });
        let worst = single.worst_primary_spread();
        rep.check(
            format!("hammer ratios bounded {name}"),
            worst <= 100.0 && single.non_finite == 0,
            format!("worst spread c1/c0 = {worst:.4}, non-finite {}", single.non_finite),
        );
        let widen = (0..6)
            .map(|k| doubled.ranges[k].spread() / single.ranges[k].spread())
            .fold(1.0, f64::max);
        rep.check(
            format!("hammer intervals stable under doubling {name}"),
            widen <= 1.1,
            format!("largest spread growth factor {widen:.6}"),
        );
        if *newtonian {
            let width = (0..6).map(|k| single.ranges[k].width()).fold(0.0, f64::max);
            rep.check(format!("Newtonian intervals collapse {name}"), width <= 1e-10, format!("max width {width:.2e}"));
        }
        let sd = single.ranges[8];
        rep.check(
            format!("shift/duality routes agree {name}"),
            sd.spread() <= 10.0,
            format!("ratio interval [{:.4}, {:.4}], c1/c0 = {:.4}", sd.min, sd.max, sd.spread()),
        );
        rep.check(
            format!("monotonicity constants {name}"),
            a.pass,
            format!("c = {:.4e}, C = {:.4e}", a.c_est, a.big_c_est),
        );
    }
    rep.tables.push(Table::from_rows("hammer_summary.csv", &rows_out)?);
    rep.tables.push(Table::from_rows("assumption_a.csv", &assumption)?);
    if cfg.sweep.write_pairs {
        for (i, model) in sweep_models(cfg)?.into_iter().enumerate() {
            let law = StressLaw::new(model, cfg.solver.form)?;
            let (_, records) = hammer_sweep(&law, &pairs[..n])?;
            let mut buf = Vec::new();
            crate::constitutive::write_probe_csv(&law, &pairs[..n], &records, &mut buf)?;
            rep.tables.push(Table { name: format!("hammer_pairs_{i:02}.csv"), bytes: buf });
        }
    }
    Ok(rep)
}

#[derive(Serialize)]
struct ConvergenceRow {
    p: f64,
    kappa: f64,
    #[serde(skip)]
    errors: ManufacturedErrors,
    n: usize,
    h: f64,
    velocity: f64,
    v_strain: f64,
    pressure: f64,
    max_divergence: f64,
    relative_divergence: f64,
    weak_residual: f64,
    newton_steps: usize,
    cg_steps: usize,
    /// Max difference to the direct linear solve (Newtonian laws only).
    direct_difference: Option<f64>,
}

#[derive(Serialize)]
struct EnergyRow {
    p: f64,
    kappa: f64,
    n: usize,
    index: usize,
    eps: f64,
    delta: f64,
}

/// The sparse LU of the saddle-point matrix fills in badly on periodic
/// grids; beyond this size the cross-check costs gigabytes.
const DIRECT_MAX_N: usize = 64;

/// Manufactured-solution refinement study, the Newtonian cross-check against
/// the direct solver and the local minimality probe.
pub fn run_convergence(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let points: Vec<(f64, f64, usize)> = cfg
        .law_points()
        .into_iter()
        .flat_map(|(p, k)| cfg.sweep.meshes.iter().map(move |&n| (p, k, n)))
        .collect();
    let settings = cfg.solver.settings();
    let rows: Vec<ConvergenceRow> = points
        .par_iter()
        .map(|&(p, kappa, n)| {
            let law = cfg.solver.law_at(p, kappa)?;
            let flow = if law.model.is_newtonian() { ManufacturedFlow::Shear } else { ManufacturedFlow::Stream };
            let m = Manufactured::new(law, flow, cfg.sweep.amplitude);
            let mut sc = m.config(n)?;
            sc.settings = settings;
            let r = solve_stokes(&sc)?;
            let errors = m.errors(&r)?;
            let direct_difference = if law.model.is_newtonian() && n <= DIRECT_MAX_N {
                let d = solve_stokes_direct(&sc)?;
                let du = r.u.sub(&d.u)?.max_norm();
                let dp = r.pi.add(&d.pi.scaled(-1.0))?.max_norm();
                Some(du.max(dp))
            } else {
                None
            };
            let strain = sym_gradient(&r.u).max_norm();
            Ok(ConvergenceRow {
                p,
                kappa,
                errors,
                n: errors.n,
                h: errors.h,
                velocity: errors.velocity,
                v_strain: errors.v_strain,
                pressure: errors.pressure,
                max_divergence: errors.max_divergence,
                relative_divergence: if strain > 0.0 { errors.max_divergence / strain } else { 0.0 },
                weak_residual: weak_residual(&sc, &r)?,
                newton_steps: r.iterations,
                cg_steps: r.linear_iterations,
                direct_difference,
            })
        })
        .collect::<Result<_>>()?;

    let mut rep = ExperimentReport::new(cfg.experiment);
    for (p, kappa) in cfg.law_points() {
        let own: Vec<&ConvergenceRow> = rows.iter().filter(|r| r.p == p && r.kappa == kappa).collect();
        let errs: Vec<ManufacturedErrors> = own.iter().map(|r| r.errors).collect();
        let tag = format!("p={p} kappa={kappa}");
        if let Some(d) = own.iter().filter_map(|r| r.direct_difference).reduce(f64::max) {
            rep.check(format!("Newtonian path matches direct solve {tag}"), d <= 1e-8, format!("max difference {d:.2e}"));
            let fine = &errs[errs.len().saturating_sub(3)..];
            if fine.len() >= 2 {
                let order = observed_order(fine, |e| e.velocity);
                let meshes: Vec<usize> = fine.iter().map(|e| e.n).collect();
                rep.check(
                    format!("second-order convergence {tag}"),
                    (order - 2.0).abs() <= 0.4,
                    format!("velocity order {order:.4} over meshes {meshes:?}"),
                );
            }
        } else if errs.len() >= 2 {
            let decreasing = errs.windows(2).all(|w| w[1].v_strain < w[0].v_strain);
            let vals: Vec<String> = errs.iter().map(|e| format!("{:.3e}", e.v_strain)).collect();
            rep.check(
                format!("V(Du) error decreases under refinement {tag}"),
                decreasing,
                format!("{} (order {:.3})", vals.join(" > "), observed_order(&errs, |e| e.v_strain)),
            );
        }
        let div = own.iter().map(|r| r.relative_divergence).fold(0.0, f64::max);
        rep.check(format!("divergence constraint {tag}"), div <= 1e-7, format!("max |div u| / max |Du| = {div:.2e}"));
    }

    // local minimality on the coarsest mesh of at least 32 cells
    let n = cfg.sweep.meshes.iter().copied().find(|&n| n >= 32).unwrap_or(cfg.sweep.meshes[0]);
    let mut energy_rows = Vec::new();
    if cfg.sweep.perturbations > 0 {
        for (p, kappa) in cfg.law_points() {
            let law = cfg.solver.law_at(p, kappa)?;
            let m = Manufactured::new(law, ManufacturedFlow::Stream, cfg.sweep.amplitude);
            let mut sc = m.config(n)?;
            sc.settings = settings;
            let r = solve_stokes(&sc)?;
            let probes = energy_perturbations(&sc, &r, cfg.seed, cfg.sweep.perturbations, &[1e-3, -1e-3, 1e-2, -1e-2])?;
            let worst = probes.iter().map(|q| q.delta).fold(f64::INFINITY, f64::min);
            rep.check(
                format!("energy minimality p={p} kappa={kappa}"),
                worst >= 0.0,
                format!("{} perturbations, min J(u + eps xi) - J(u) = {worst:.3e}", probes.len()),
            );
            energy_rows.extend(probes.into_iter().map(|q| EnergyRow { p, kappa, n, index: q.index, eps: q.eps, delta: q.delta }));
        }
    }
    rep.tables.push(Table::from_rows("convergence.csv", &rows)?);
    rep.tables.push(Table::from_rows("energy_probe.csv", &energy_rows)?);
    Ok(rep)
}

#[derive(Serialize)]
struct NavierRow {
    p: f64,
    kappa: f64,
    n: usize,
    growth_exponent: f64,
    status: String,
    newton_steps: usize,
    weak_residual: f64,
    difference_to_stokes: f64,
    beta: f64,
    campanato_convective: f64,
    estimate_ratio: Option<f64>,
}

/// Convective problem: index check, Picard solve, comparison with the
/// Stokes solution and the estimate pipeline with `G + u (x) u`.
pub fn run_navier_stokes(cfg: &ExperimentConfig) -> Result<ExperimentReport> {
    let mut rep = ExperimentReport::new(cfg.experiment);
    let mut rows = Vec::new();
    for (p, kappa) in cfg.law_points() {
        let law: StressLaw = cfg.solver.law_at(p, kappa)?;
        let r_exp = growth_exponent(&law.model)?;
        for &n in &cfg.sweep.meshes {
            let grid = cfg.solver.grid(n)?;
            let g = recipe_field(GRecipe::Smooth, grid, cfg.sweep.amplitude, cfg.solver.center());
            let mut sc = SolverConfig::new(grid, law, g.clone());
            sc.settings = cfg.solver.settings();
            sc.convective = true;
            let tag = format!("p={p} kappa={kappa} n={n}");
            let empty = |status: &str| NavierRow {
                p,
                kappa,
                n,
                growth_exponent: r_exp,
                status: status.into(),
                newton_steps: 0,
                weak_residual: f64::NAN,
                difference_to_stokes: f64::NAN,
                beta: f64::NAN,
                campanato_convective: f64::NAN,
                estimate_ratio: None,
            };
            match solve_navier_stokes(&sc) {
                Err(Error::Config(msg)) => {
                    rep.check(format!("growth condition enforced {tag}"), r_exp <= 1.5, msg);
                    rows.push(empty("rejected"));
                }
                Err(e) if r_exp > 1.5 => {
                    rep.check(format!("convective solve {tag}"), false, e.to_string());
                    rows.push(empty("failed"));
                }
                Err(e) => return Err(e),
                Ok(ns) => {
                    rep.check(format!("growth condition enforced {tag}"), r_exp > 1.5, format!("r = {r_exp:.4}"));
                    let mut plain = sc.clone();
                    plain.convective = false;
                    let st = solve_stokes(&plain)?;
                    let diff = ns.u.sub(&st.u)?.l2_norm() / st.u.l2_norm().max(1e-300);
                    let res = navier_weak_residual(&sc, &ns)?;
                    rep.check(format!("convective weak form {tag}"), res <= 1e-6, format!("relative residual {res:.2e}"));
                    let uu = convective_tensor(&ns);
                    let g_eff = g.add(&uu)?;
                    let ball = Ball::new(cfg.solver.center(), cfg.sweep.ball_radius)?;
                    let (fam_b, fam_2b) = families(&grid, &ball, &cfg.family)?;
                    for &beta in &cfg.sweep.beta {
                        let cu = campanato_seminorm(&uu, &fam_b, beta)?;
                        let sides = estimate_sides(&law, &ns, &g_eff, &ball, &fam_b, &fam_2b, beta)?;
                        rep.check(
                            format!("u(x)u Campanato finite {tag} beta={beta}"),
                            cu.is_finite() && sides.ratio.is_none_or(f64::is_finite),
                            format!(
                                "[u(x)u] = {cu:.4e}, estimate ratio {}",
                                sides.ratio.map_or("0/0".to_string(), |r| format!("{r:.6}"))
                            ),
                        );
                        rows.push(NavierRow {
                            status: "converged".into(),
                            newton_steps: ns.iterations,
                            weak_residual: res,
                            difference_to_stokes: diff,
                            beta,
                            campanato_convective: cu,
                            estimate_ratio: sides.ratio,
                            ..empty("")
                        });
                    }
                }
            }
        }
    }
    rep.tables.push(Table::from_rows("navier_stokes.csv", &rows)?);
    Ok(rep)
}

fn convective_tensor(r: &crate::solver::SolveResult) -> TensorField {
    use crate::field::Field;
    let g = *r.u.grid();
    let mut v = Vec::with_capacity(g.cell_count());
    for j in 0..g.n {
        for i in 0..g.n {
            v.push(SymMat2::outer(r.u.at(i, j)));
        }
    }
    TensorField::new(g, v).expect("finite")
}
