use serde::Serialize;

use super::{estimate_indices, shift, type_constant, Conjugate, Indices, Lattice, NFunction, NFunctionModel};
use crate::error::Result;

/// Relative slack granted to pointwise inequality checks (numerical conjugates).
const SLACK: f64 = 1e-10;

/// Running minimum and maximum of a sampled ratio.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RatioRange {
    pub min: f64,
    pub max: f64,
}

impl Default for RatioRange {
    fn default() -> Self {
        Self { min: f64::INFINITY, max: f64::NEG_INFINITY }
    }
}

impl RatioRange {
    pub fn push(&mut self, x: f64) {
        if x.is_finite() {
            self.min = self.min.min(x);
            self.max = self.max.max(x);
        }
    }

    pub fn merge(&mut self, other: &RatioRange) {
        self.min = self.min.min(other.min);
        self.max = self.max.max(other.max);
    }

    pub fn is_empty(&self) -> bool {
        self.min > self.max
    }

    /// `max / min`, the width of the equivalence constants.
    pub fn spread(&self) -> f64 {
        self.max / self.min
    }

    pub fn width(&self) -> f64 {
        self.max - self.min
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SampleSpec {
    pub t_min: f64,
    pub t_max: f64,
    pub t_points: usize,
    /// Points per axis of the `(t, s)` grid used for the Young inequalities.
    pub pair_points: usize,
    pub deltas: Vec<f64>,
    /// Shift values `|P|` for the shift/duality probe.
    pub shifts: Vec<f64>,
    pub shift_points: usize,
}

impl Default for SampleSpec {
    fn default() -> Self {
        Self {
            t_min: 1e-6,
            t_max: 1e6,
            t_points: 241,
            pair_points: 61,
            deltas: vec![1.0, 0.5, 0.1, 0.01],
            shifts: vec![1e-3, 1.0, 1e3],
            shift_points: 25,
        }
    }
}

#[derive(Debug, Clone, Serialize)]
pub struct StructuralReport {
    pub model: String,
    pub indices: Indices,
    /// Constant used in the Young inequalities.
    pub young_k: f64,
    /// `phi(t) / (t phi'(t))`
    pub phi_vs_t_phi_prime: RatioRange,
    /// `phi*(phi'(t)) / phi(t)`
    pub conj_of_derivative_vs_phi: RatioRange,
    /// `phi'(t) / (t phi''(t))`
    pub derivative_vs_t_second: RatioRange,
    pub delta2_phi: f64,
    pub delta2_conjugate: f64,
    /// Largest observed `t s / rhs` over both Young variants and all deltas.
    pub young_worst: f64,
    /// `(phi_a)*(t) / (phi*)_{phi'(a)}(t)`
    pub shift_duality: RatioRange,
    pub chain_violations: usize,
    pub young_violations: usize,
    pub pass: bool,
    pub violations: Vec<String>,
}

fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    Lattice::new(lo, hi, n).nodes()
}

fn leq(a: f64, b: f64) -> bool {
    a <= b * (1.0 + SLACK) + 1e-300
}

/// Checks the N-function inequality chains, the conjugate equivalences, both
/// Young variants and the shift/duality equivalence pointwise on a sample.
pub fn verify_structural_inequalities(model: &NFunctionModel, spec: &SampleSpec) -> Result<StructuralReport> {
    model.validate()?;
    let indices = estimate_indices(model)?;
    let conj = Conjugate(*model);
    let p_conj = indices.p_lower / (indices.p_lower - 1.0);
    let q_conj = indices.q_upper / (indices.q_upper - 1.0);
    let k_conj = type_constant(&conj, q_conj, p_conj, &Lattice::default())?;
    let young_k = indices.k1.max(k_conj);

    let mut chain_violations = 0;
    let mut young_violations = 0;
    let mut violations = Vec::new();
    let note = |msg: String, list: &mut Vec<String>| {
        if list.len() < 16 {
            list.push(msg);
        }
    };

    let mut phi_vs_tp = RatioRange::default();
    let mut conj_vs_phi = RatioRange::default();
    let mut assumption = RatioRange::default();
    let mut delta2_phi: f64 = 0.0;
    let mut delta2_conj: f64 = 0.0;

    for &t in &log_grid(spec.t_min, spec.t_max, spec.t_points) {
        let v = model.value(t);
        let d = model.derivative(t);
        let lower = 0.5 * t * model.derivative(0.5 * t);
        if !(leq(lower, v) && leq(v, t * d)) {
            chain_violations += 1;
            note(format!("derivative chain at t={t:e}: {lower:e} <= {v:e} <= {:e}", t * d), &mut violations);
        }
        let c = conj.value(t);
        let (left, right) = (model.value(c / t), model.value(2.0 * c / t));
        if !(leq(left, c) && leq(c, right)) {
            chain_violations += 1;
            note(format!("conjugate chain at t={t:e}: {left:e} <= {c:e} <= {right:e}"), &mut violations);
        }
        phi_vs_tp.push(v / (t * d));
        conj_vs_phi.push(conj.value(d) / v);
        assumption.push(d / (t * model.second_derivative(t)));
        delta2_phi = delta2_phi.max(model.value(2.0 * t) / v);
        delta2_conj = delta2_conj.max(conj.value(2.0 * t) / c);
    }

    let grid = log_grid(spec.t_min, spec.t_max, spec.pair_points);
    let phi_vals: Vec<f64> = grid.iter().map(|&t| model.value(t)).collect();
    let conj_vals: Vec<f64> = grid.iter().map(|&s| conj.value(s)).collect();
    let mut young_worst: f64 = 0.0;
    for &delta in &spec.deltas {
        let c1 = young_k.powf(indices.q_bar) * delta.powf(1.0 - indices.q_bar);
        let c2 = young_k.powf(indices.p_bar_conj - 1.0) * delta.powf(1.0 - indices.p_bar_conj);
        for (i, &t) in grid.iter().enumerate() {
            for (j, &s) in grid.iter().enumerate() {
                let ts = t * s;
                let rhs1 = c1 * phi_vals[i] + delta * conj_vals[j];
                let rhs2 = delta * phi_vals[i] + c2 * conj_vals[j];
                young_worst = young_worst.max(ts / rhs1).max(ts / rhs2);
                if !(leq(ts, rhs1) && leq(ts, rhs2)) {
                    young_violations += 1;
                    note(format!("young at t={t:e} s={s:e} delta={delta}"), &mut violations);
                }
            }
        }
    }

    let mut shift_duality = RatioRange::default();
    for &a in &spec.shifts {
        let left = Conjugate(shift(*model, a)?);
        let right = shift(conj, model.derivative(a))?;
        for &t in &log_grid(spec.t_min.max(1e-4), spec.t_max.min(1e4), spec.shift_points) {
            shift_duality.push(left.value(t) / right.value(t));
        }
    }

    let pass = chain_violations == 0 && young_violations == 0;
    Ok(StructuralReport {
        model: model.to_string(),
        indices,
        young_k,
        phi_vs_t_phi_prime: phi_vs_tp,
        conj_of_derivative_vs_phi: conj_vs_phi,
        derivative_vs_t_second: assumption,
        delta2_phi,
        delta2_conjugate: delta2_conj,
        young_worst,
        shift_duality,
        chain_violations,
        young_violations,
        pass,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn quadratic_is_self_conjugate() {
        let m = NFunctionModel::power_law(1.0, 0.0, 2.0).unwrap();
        let r = verify_structural_inequalities(&m, &SampleSpec::default()).unwrap();
        assert!(r.pass, "{:?}", r.violations);
        assert!((r.conj_of_derivative_vs_phi.min - 1.0).abs() < 1e-12);
        assert!((r.conj_of_derivative_vs_phi.max - 1.0).abs() < 1e-12);
        // t = s = 1, delta = 1: 1 <= K^2/2 + 1/2
        assert!(r.young_worst <= 1.0 + 1e-12);
    }

    #[test]
    fn cubic_chain_point() {
        let m = NFunctionModel::power_law(1.0, 0.0, 3.0).unwrap();
        let t = 2.0;
        assert_eq!(0.5 * t * m.derivative(0.5 * t), 1.0);
        assert!((m.value(t) - 8.0 / 3.0).abs() < 1e-15);
        assert_eq!(t * m.derivative(t), 8.0);
    }

    #[test]
    fn all_families_pass() {
        let spec = SampleSpec { t_points: 61, pair_points: 25, shift_points: 9, ..Default::default() };
        let models = [
            NFunctionModel::power_law(1.0, 0.0, 1.5).unwrap(),
            NFunctionModel::power_law_quadratic(1.0, 1.0, 3.0).unwrap(),
            NFunctionModel::carreau(1.0, 1.0, 1.0, 1.5).unwrap(),
            NFunctionModel::arcsinh(1.0, 1.0).unwrap(),
        ];
        for m in &models {
            let r = verify_structural_inequalities(m, &spec).unwrap();
            assert!(r.pass, "{m}: {:?}", r.violations);
            assert!(r.shift_duality.spread() < 10.0, "{m}: {:?}", r.shift_duality);
            assert!(r.derivative_vs_t_second.min > 0.0);
        }
    }
}
