//! Random divergence-free perturbations for local minimality checks.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::{energy, Domain, SolveResult, SolverConfig};
use crate::field::VectorField;
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EnergyProbe {
    pub index: usize,
    pub eps: f64,
    /// `J(u + eps xi) - J(u)`.
    pub delta: f64,
}

/// Discrete curl of a random vertex stream function, vanishing on every face
/// that is not an unknown of the whole-grid problem, scaled to the L2 norm of
/// `like` (or 1 if `like` vanishes).
pub fn divergence_free_perturbation(cfg: &SolverConfig, like: &VectorField, rng: &mut ChaCha8Rng) -> Result<VectorField> {
    let g = cfg.grid;
    let dom = Domain::full(g)?;
    let n = g.n as isize;
    let mut psi = vec![0.0; (g.n + 1) * (g.n + 1)];
    let vid = |a: isize, b: isize| -> usize {
        let (a, b) = if g.is_periodic() { (a.rem_euclid(n), b.rem_euclid(n)) } else { (a, b) };
        (b * (n + 1) + a) as usize
    };
    let free = |f: Option<usize>| f.is_some_and(|f| dom.free[f].is_some());
    for b in 0..=n {
        for a in 0..=n {
            if g.is_periodic() && (a == n || b == n) {
                continue;
            }
            let touched = [g.u1_face(a, b - 1), g.u1_face(a, b), g.u2_face(a - 1, b), g.u2_face(a, b)];
            if touched.iter().all(|&f| free(f)) {
                psi[vid(a, b)] = rng.random_range(-1.0..1.0);
            }
        }
    }
    let mut faces = vec![0.0; g.face_count()];
    for j in 0..n {
        for i in 0..=n {
            if let Some(f) = g.u1_face(i, j) {
                faces[f] = (psi[vid(i, j + 1)] - psi[vid(i, j)]) / g.h;
            }
        }
    }
    for j in 0..=n {
        for i in 0..n {
            if let Some(f) = g.u2_face(i, j) {
                faces[f] = -(psi[vid(i + 1, j)] - psi[vid(i, j)]) / g.h;
            }
        }
    }
    let xi = VectorField::new(g, faces)?;
    let norm = xi.l2_norm();
    let target = like.l2_norm();
    let target = if target > 0.0 { target } else { 1.0 };
    Ok(if norm > 0.0 { xi.scaled(target / norm) } else { xi })
}

/// `J(u + eps xi) - J(u)` for `count` random divergence-free `xi` and each `eps`.
pub fn energy_perturbations(
    cfg: &SolverConfig,
    result: &SolveResult,
    seed: u64,
    count: usize,
    eps: &[f64],
) -> Result<Vec<EnergyProbe>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let j0 = energy(cfg, &result.u)?;
    let mut out = Vec::with_capacity(count * eps.len());
    for index in 0..count {
        let xi = divergence_free_perturbation(cfg, &result.u, &mut rng)?;
        for &e in eps {
            let j = energy(cfg, &result.u.add(&xi.scaled(e))?)?;
            out.push(EnergyProbe { index, eps: e, delta: j - j0 });
        }
    }
    Ok(out)
}
