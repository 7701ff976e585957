use serde::Serialize;

use super::{NFunction, NFunctionModel};
use crate::error::{Error, Result};

/// Largest type constant accepted before an input is declared non-Delta2.
pub const K1_CAP: f64 = 1e6;

/// Lower/upper index of an N-function together with the derived exponents
/// `p_bar = min(p, 2)`, `q_bar = max(q, 2)` and their Hoelder conjugates.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Indices {
    pub p_lower: f64,
    pub q_upper: f64,
    pub k1: f64,
    pub p_bar: f64,
    pub q_bar: f64,
    pub p_bar_conj: f64,
    pub q_bar_conj: f64,
}

impl Indices {
    pub fn new(p_lower: f64, q_upper: f64, k1: f64) -> Self {
        let p_bar = p_lower.min(2.0);
        let q_bar = q_upper.max(2.0);
        Self {
            p_lower,
            q_upper,
            k1,
            p_bar,
            q_bar,
            p_bar_conj: p_bar / (p_bar - 1.0),
            q_bar_conj: q_bar / (q_bar - 1.0),
        }
    }
}

/// A symmetric log-spaced sample set `{lo * r^i}` used for the `s, t` lattice.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Lattice {
    pub lo: f64,
    pub hi: f64,
    pub points: usize,
}

impl Default for Lattice {
    fn default() -> Self {
        Self { lo: 1e-4, hi: 1e4, points: 201 }
    }
}

impl Lattice {
    pub fn new(lo: f64, hi: f64, points: usize) -> Self {
        Self { lo, hi, points: points.max(2) }
    }

    pub fn ratio(&self) -> f64 {
        (self.hi / self.lo).powf(1.0 / (self.points - 1) as f64)
    }

    pub fn nodes(&self) -> Vec<f64> {
        let l = (self.hi / self.lo).ln();
        (0..self.points)
            .map(|i| self.lo * (l * i as f64 / (self.points - 1) as f64).exp())
            .collect()
    }
}

struct Tables {
    s: Vec<f64>,
    phi_t: Vec<f64>,
    // phi(s_i t_j) stored at index i + j
    phi_st: Vec<f64>,
}

fn tables<F: NFunction + ?Sized>(f: &F, lattice: &Lattice) -> Tables {
    let s = lattice.nodes();
    let phi_t: Vec<f64> = s.iter().map(|&t| f.value(t)).collect();
    let l = (lattice.hi / lattice.lo).ln() / (lattice.points - 1) as f64;
    let phi_st = (0..2 * lattice.points - 1)
        .map(|k| f.value(lattice.lo * lattice.lo * (l * k as f64).exp()))
        .collect();
    Tables { s, phi_t, phi_st }
}

/// Estimates the lower and upper index as the infimum and supremum of
/// `log(phi(st)/phi(t)) / log(s)` over the lattice.
pub fn lattice_indices<F: NFunction + ?Sized>(f: &F, lattice: &Lattice) -> Result<Indices> {
    let tab = tables(f, lattice);
    let mut p = f64::INFINITY;
    let mut q = f64::NEG_INFINITY;
    for (i, &s) in tab.s.iter().enumerate() {
        let ls = s.ln();
        if ls.abs() < 1e-12 {
            continue;
        }
        for (j, &pt) in tab.phi_t.iter().enumerate() {
            let e = (tab.phi_st[i + j] / pt).ln() / ls;
            if e.is_finite() {
                p = p.min(e);
                q = q.max(e);
            }
        }
    }
    if !p.is_finite() || !q.is_finite() {
        return Err(Error::IndexEstimation { cap: K1_CAP });
    }
    let k1 = type_constant_from(&tab, p, q)?;
    Ok(Indices::new(p, q, k1))
}

fn type_constant_from(tab: &Tables, p: f64, q: f64) -> Result<f64> {
    let mut k: f64 = 1.0;
    for (i, &s) in tab.s.iter().enumerate() {
        let bound = s.powf(p).max(s.powf(q));
        for (j, &pt) in tab.phi_t.iter().enumerate() {
            let r = tab.phi_st[i + j] / (bound * pt);
            if !r.is_finite() {
                return Err(Error::IndexEstimation { cap: K1_CAP });
            }
            k = k.max(r);
        }
    }
    if k > K1_CAP {
        return Err(Error::IndexEstimation { cap: K1_CAP });
    }
    Ok(k)
}

/// Smallest `K >= 1` with `phi(st) <= K max(s^p, s^q) phi(t)` on the lattice.
pub fn type_constant<F: NFunction + ?Sized>(f: &F, p: f64, q: f64, lattice: &Lattice) -> Result<f64> {
    type_constant_from(&tables(f, lattice), p, q)
}

/// Indices of a built-in model: analytic exponents where the family fixes them,
/// lattice estimates otherwise; `K1` is always measured on the default lattice.
pub fn estimate_indices(model: &NFunctionModel) -> Result<Indices> {
    let lattice = Lattice::default();
    let exponents = match *model {
        NFunctionModel::PowerLawAdditive { kappa, p, .. }
        | NFunctionModel::PowerLawQuadratic { kappa, p, .. } => {
            Some(if kappa == 0.0 { (p, p) } else { (p.min(2.0), p.max(2.0)) })
        }
        NFunctionModel::Carreau { mu_inf, kappa, p, .. } => {
            Some(if kappa == 0.0 && mu_inf == 0.0 { (p, p) } else { (p.min(2.0), p.max(2.0)) })
        }
        NFunctionModel::ArcSinh { .. } => None,
    };
    match exponents {
        Some((p, q)) => Ok(Indices::new(p, q, type_constant(model, p, q, &lattice)?)),
        None => lattice_indices(model, &lattice),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::nfunc::{shift, Conjugate};

    #[test]
    fn pure_power_law() {
        let ix = estimate_indices(&NFunctionModel::power_law(1.0, 0.0, 2.0).unwrap()).unwrap();
        assert_eq!((ix.p_lower, ix.q_upper, ix.p_bar, ix.q_bar), (2.0, 2.0, 2.0, 2.0));
        assert!((ix.k1 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn bar_arithmetic() {
        let ix = estimate_indices(&NFunctionModel::power_law(1.0, 0.0, 1.5).unwrap()).unwrap();
        assert_eq!(ix.p_bar, 1.5);
        assert_eq!(ix.q_bar, 2.0);
        assert_eq!(ix.q_bar_conj, 2.0);
        assert!((ix.p_bar_conj - 3.0).abs() < 1e-15);
    }

    #[test]
    fn carreau_lattice_oracle() {
        let m = NFunctionModel::carreau(1.0, 1.0, 1.0, 3.0).unwrap();
        let ix = estimate_indices(&m).unwrap();
        assert_eq!((ix.p_lower, ix.q_upper), (2.0, 3.0));
        let lat = lattice_indices(&m, &Lattice::default()).unwrap();
        assert!(lat.p_lower >= 2.0 - 1e-9 && lat.p_lower < 2.01, "{lat:?}");
        assert!(lat.q_upper <= 3.0 + 1e-9 && lat.q_upper > 2.9, "{lat:?}");
    }

    #[test]
    fn arcsinh_is_estimated() {
        let m = NFunctionModel::arcsinh(1.0, 1.0).unwrap();
        let ix = estimate_indices(&m).unwrap();
        assert!(ix.p_lower > 1.0 && ix.q_upper <= 2.0 + 1e-9, "{ix:?}");
    }

    #[test]
    fn exponential_growth_rejected() {
        struct Exp;
        impl NFunction for Exp {
            fn value(&self, t: f64) -> f64 {
                t.exp() - 1.0 - t
            }
            fn derivative(&self, t: f64) -> f64 {
                t.exp_m1()
            }
            fn derivative_over_t(&self, t: f64) -> f64 {
                if t == 0.0 { 1.0 } else { t.exp_m1() / t }
            }
            fn second_derivative(&self, t: f64) -> f64 {
                t.exp()
            }
            fn describe(&self) -> String {
                "exp".into()
            }
        }
        let lat = Lattice::new(1e-2, 1e2, 41);
        assert!(matches!(type_constant(&Exp, 2.0, 2.0, &lat), Err(Error::IndexEstimation { .. })));
    }

    #[test]
    fn shifted_functions_have_bar_type() {
        let lat = Lattice::new(1e-3, 1e3, 41);
        for &p in &[1.5, 3.0] {
            let m = NFunctionModel::power_law(1.0, 0.0, p).unwrap();
            let ix = estimate_indices(&m).unwrap();
            for &a in &[0.1, 10.0] {
                let s = shift(m, a).unwrap();
                type_constant(&s, ix.p_bar, ix.q_bar, &lat).unwrap();
                type_constant(&Conjugate(s), ix.q_bar_conj, ix.p_bar_conj, &lat).unwrap();
                let cs = shift(Conjugate(m), m.derivative(a)).unwrap();
                type_constant(&cs, ix.q_bar_conj, ix.p_bar_conj, &lat).unwrap();
            }
        }
    }
}
