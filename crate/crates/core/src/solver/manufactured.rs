//! Exact solutions on the periodic box `[0, 2pi]^2` with analytically known
//! right-hand sides, for convergence studies.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::{SolveResult, SolverConfig};
use crate::constitutive::StressLaw;
use crate::field::{sym_gradient, Grid, ScalarField, SymMat2, TensorField, VectorField};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ManufacturedFlow {
    /// `u = (sin x2, sin x1)`: pure shear strain.
    Shear,
    /// Curl of `psi = cos x1 - cos x2 + sin x1 sin x2 / 2`: strain with all
    /// three components and a vanishing set of `|Du|` of measure zero.
    Stream,
}

/// `u* = amplitude * flow`, `pi* = cos x1 cos x2`, `G = A(Du*) - pi* I`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Manufactured {
    pub law: StressLaw,
    pub flow: ManufacturedFlow,
    pub amplitude: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ManufacturedErrors {
    pub n: usize,
    pub h: f64,
    /// Discrete L2 error of the face velocities.
    pub velocity: f64,
    /// `||V(Du_h) - V(Du*)||_2` at cell centers.
    pub v_strain: f64,
    /// L2 error of the mean-free pressure.
    pub pressure: f64,
    pub max_divergence: f64,
}

impl Manufactured {
    pub fn new(law: StressLaw, flow: ManufacturedFlow, amplitude: f64) -> Self {
        Manufactured { law, flow, amplitude }
    }

    pub fn velocity(&self, x: [f64; 2]) -> [f64; 2] {
        let (s1, c1) = x[0].sin_cos();
        let (s2, c2) = x[1].sin_cos();
        let a = self.amplitude;
        match self.flow {
            ManufacturedFlow::Shear => [a * s2, a * s1],
            ManufacturedFlow::Stream => [a * (s2 + 0.5 * s1 * c2), a * (s1 - 0.5 * c1 * s2)],
        }
    }

    pub fn strain(&self, x: [f64; 2]) -> SymMat2 {
        let c1 = x[0].cos();
        let c2 = x[1].cos();
        let a = self.amplitude;
        match self.flow {
            ManufacturedFlow::Shear => SymMat2::new(0.0, 0.5 * a * (c1 + c2), 0.0),
            ManufacturedFlow::Stream => {
                let d = 0.5 * a * c1 * c2;
                SymMat2::new(d, 0.5 * a * (c1 + c2), -d)
            }
        }
    }

    pub fn pressure(&self, x: [f64; 2]) -> f64 {
        x[0].cos() * x[1].cos()
    }

    pub fn grid(n: usize) -> Result<Grid> {
        Grid::periodic(n, 2.0 * PI)
    }

    /// `G = A(Du*) - pi* I` sampled at cell centers.
    pub fn rhs(&self, grid: Grid) -> TensorField {
        TensorField::from_fn(grid, |x| self.law.stress(&self.strain(x)) - self.pressure(x) * SymMat2::IDENTITY)
    }

    pub fn config(&self, n: usize) -> Result<SolverConfig> {
        let grid = Self::grid(n)?;
        Ok(SolverConfig::new(grid, self.law, self.rhs(grid)))
    }

    pub fn exact_velocity(&self, grid: Grid) -> VectorField {
        VectorField::from_fn(grid, |x| self.velocity(x))
    }

    pub fn errors(&self, result: &SolveResult) -> Result<ManufacturedErrors> {
        let grid = *result.u.grid();
        let du = result.u.sub(&self.exact_velocity(grid))?;
        let vh = sym_gradient(&result.u).map(|q| self.law.v_map(&q));
        let vx = TensorField::from_fn(grid, |x| self.law.v_map(&self.strain(x)));
        let p_exact = ScalarField::from_fn(grid, |x| self.pressure(x)).mean_free();
        let dp = result.pi.mean_free().add(&p_exact.scaled(-1.0))?;
        Ok(ManufacturedErrors {
            n: grid.n,
            h: grid.h,
            velocity: du.l2_norm(),
            v_strain: vh.add(&vx.scaled(-1.0))?.l2_norm(),
            pressure: dp.l2_norm(),
            max_divergence: result.max_divergence(),
        })
    }
}

/// Least-squares slope of `log e` against `log h`.
pub fn observed_order(errors: &[ManufacturedErrors], pick: impl Fn(&ManufacturedErrors) -> f64) -> f64 {
    let pts: Vec<(f64, f64)> = errors.iter().map(|e| (e.h.ln(), pick(e).ln())).collect();
    let m = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / m;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / m;
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    sxy / sxx
}

