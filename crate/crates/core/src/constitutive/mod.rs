//! Radial stress laws `A(Q) = phi'(|Q|) Q / |Q|`, the companion map `V` and
//! probes of the monotonicity / equivalence constants.

mod probe;

pub use probe::{
    check_assumption_a, hammer_probe, hammer_sweep, sample_pairs, summarize, write_probe_csv, AssumptionReport,
    HammerRecord, HammerSummary, RATIO_NAMES,
};

use serde::{Deserialize, Serialize};

use crate::field::{Mat2, SymMat2};
use crate::nfunc::{NFunction, NFunctionModel};
use crate::Result;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum StressForm {
    /// `A(Q) = phi'(|Q|) Q / |Q|`.
    #[default]
    FullNorm,
    /// `A(Q) = phi'(|Q^sym|) Q^sym / |Q^sym|`.
    SymNorm,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct StressLaw {
    pub model: NFunctionModel,
    #[serde(default)]
    pub form: StressForm,
}

impl StressLaw {
    pub fn new(model: NFunctionModel, form: StressForm) -> Result<Self> {
        model.validate()?;
        Ok(Self { model, form })
    }

    pub fn full(model: NFunctionModel) -> Result<Self> {
        Self::new(model, StressForm::FullNorm)
    }

    /// `phi'(t) / t`; the quotients are closed-form so no `0/0` arises for `t > 0`.
    fn quotient(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        self.model.derivative_over_t(t)
    }

    pub fn stress(&self, q: &SymMat2) -> SymMat2 {
        self.quotient(q.norm()) * *q
    }

    /// The law on a general matrix: the full-norm form is applied to `Q`
    /// itself, the sym-norm form to its symmetric part.
    pub fn stress_matrix(&self, q: &Mat2) -> Mat2 {
        match self.form {
            StressForm::FullNorm => q.scale(self.quotient(q.norm())),
            StressForm::SymNorm => Mat2::from(self.stress(&q.sym())),
        }
    }

    pub fn v_map(&self, q: &SymMat2) -> SymMat2 {
        self.quotient(q.norm()).sqrt() * *q
    }

    /// The `Q` with `A(Q) = S`.
    pub fn stress_inverse(&self, s: &SymMat2) -> SymMat2 {
        let r = s.norm();
        if r == 0.0 {
            return SymMat2::ZERO;
        }
        (self.model.inverse_derivative(r) / r) * *s
    }

    pub fn phi(&self, t: f64) -> f64 {
        self.model.value(t)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn law(m: NFunctionModel) -> StressLaw {
        StressLaw::full(m).unwrap()
    }

    fn close(a: SymMat2, b: SymMat2, tol: f64) -> bool {
        (a - b).norm() <= tol * b.norm().max(1.0)
    }

    #[test]
    fn examples() {
        let lin = law(NFunctionModel::power_law(1.0, 0.0, 2.0).unwrap());
        let q = SymMat2::new(0.3, -2.0, 5.0);
        assert!(close(lin.stress(&q), q, 1e-15));
        assert!(close(lin.v_map(&q), q, 1e-15));
        assert!(close(lin.stress_inverse(&q), q, 1e-15));

        let cubic = law(NFunctionModel::power_law(1.0, 0.0, 3.0).unwrap());
        let q = SymMat2::diag(2.0, 0.0);
        assert!(close(cubic.stress(&q), SymMat2::diag(4.0, 0.0), 1e-15));
        assert!(close(cubic.v_map(&q), 2f64.sqrt() * q, 1e-15));
        assert!(close(cubic.stress_inverse(&SymMat2::diag(4.0, 0.0)), q, 1e-12));
        assert!((cubic.v_map(&q).norm().powi(2) - 8.0).abs() < 1e-13);

        let carreau = law(NFunctionModel::carreau(1.0, 1.0, 1.0, 2.0).unwrap());
        let q = SymMat2::diag(1.0, 1.0);
        assert!(close(carreau.stress(&q), 2.0 * q, 1e-15));

        for l in [lin, cubic, carreau] {
            assert_eq!(l.stress(&SymMat2::ZERO), SymMat2::ZERO);
            assert_eq!(l.v_map(&SymMat2::ZERO), SymMat2::ZERO);
            assert_eq!(l.stress_inverse(&SymMat2::ZERO), SymMat2::ZERO);
        }
    }

    #[test]
    fn continuity_at_origin() {
        for p in [1.5, 2.0, 3.0] {
            let l = law(NFunctionModel::power_law(1.0, 0.0, p).unwrap());
            let q = SymMat2::new(1e-14, 0.0, -1e-14);
            assert!(l.stress(&q).norm() < 1e-6);
        }
    }

    #[test]
    fn sym_norm_form_uses_symmetric_part() {
        let m = NFunctionModel::power_law(1.0, 0.5, 3.0).unwrap();
        let l = StressLaw::new(m, StressForm::SymNorm).unwrap();
        let g = Mat2([[1.0, 2.0], [0.0, -1.0]]);
        let a = l.stress_matrix(&g);
        assert!((a.sym() - l.stress(&g.sym())).norm() < 1e-15);
        assert_eq!(a.skew12(), 0.0);
        let f = StressLaw::full(m).unwrap().stress_matrix(&g);
        assert!(f.skew12() != 0.0);
    }

    fn sym() -> impl Strategy<Value = SymMat2> {
        (-1.0f64..1.0, -1.0f64..1.0, -1.0f64..1.0, -6.0f64..6.0).prop_filter_map(
            "nonzero",
            |(a, b, c, e)| {
                let m = SymMat2::new(a, b, c);
                let n = m.norm();
                (n > 1e-3).then(|| (10f64.powf(e) / n) * m)
            },
        )
    }

    fn models() -> Vec<NFunctionModel> {
        let mut out = Vec::new();
        for p in [1.5, 2.0, 3.0] {
            for k in [0.0, 1.0] {
                out.push(NFunctionModel::power_law(1.0, k, p).unwrap());
                out.push(NFunctionModel::power_law_quadratic(2.0, k, p).unwrap());
                out.push(NFunctionModel::carreau(0.5, 1.0, k, p).unwrap());
            }
        }
        out.push(NFunctionModel::arcsinh(1.0, 1.0).unwrap());
        out.push(NFunctionModel::arcsinh(1e-2, 3.0).unwrap());
        out
    }

    proptest! {
        #[test]
        fn inverse_round_trip(q in sym()) {
            for m in models() {
                let l = law(m);
                let back = l.stress_inverse(&l.stress(&q));
                prop_assert!((back - q).norm() <= 1e-10 * q.norm(), "{m}: {q:?} -> {back:?}");
            }
        }

        #[test]
        fn v_squared_is_work(q in sym()) {
            for m in models() {
                let l = law(m);
                let v = l.v_map(&q).norm().powi(2);
                let w = l.stress(&q).dot(&q);
                prop_assert!((v - w).abs() <= 1e-13 * w);
            }
        }

        #[test]
        fn rotation_equivariance(q in sym(), theta in 0.0f64..6.3) {
            for m in models() {
                let l = law(m);
                let lhs = l.stress(&q.rotated(theta));
                let rhs = l.stress(&q).rotated(theta);
                prop_assert!((lhs - rhs).norm() <= 1e-13 * rhs.norm());
            }
        }

        #[test]
        fn power_law_scaling(q in sym(), s in 0.01f64..100.0, p in 1.2f64..4.0) {
            let l = law(NFunctionModel::power_law(1.3, 0.0, p).unwrap());
            let a = l.stress(&(s * q));
            let b = s.powf(p - 1.0) * l.stress(&q);
            prop_assert!((a - b).norm() <= 1e-13 * b.norm());
            let a = l.v_map(&(s * q));
            let b = s.powf(p / 2.0) * l.v_map(&q);
            prop_assert!((a - b).norm() <= 1e-13 * b.norm());
        }
    }
}
