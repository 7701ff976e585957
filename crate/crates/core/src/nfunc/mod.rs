//! N-functions: evaluation, derivatives, convex conjugates, shifts, index
//! estimation and the structural inequalities the regularity theory relies on.
//!
//! Everything is expressed through the [`NFunction`] trait so that the base
//! models, their conjugates and their shifts compose freely: the conjugate of
//! a shifted function is `Conjugate<Shifted<_>>`, the shift of a conjugate is
//! `Shifted<Conjugate<_>>`.

mod indices;
mod inequalities;
mod model;
pub mod quad;
pub mod roots;

pub use indices::{estimate_indices, lattice_indices, type_constant, Indices, Lattice};
pub use inequalities::{
    verify_structural_inequalities, RatioRange, SampleSpec, StructuralReport,
};
pub use model::NFunctionModel;

use crate::error::{Error, Result};

/// An N-function `phi` given by closed-form or numerically evaluated calculus.
///
/// The unchecked methods (`value`, `derivative`, ...) assume a finite,
/// non-negative argument. The checked `phi*` methods validate their input.
pub trait NFunction: Send + Sync {
    fn value(&self, t: f64) -> f64;
    fn derivative(&self, t: f64) -> f64;
    /// `phi'(t) / t`, with its limit at `t = 0` (possibly infinite).
    fn derivative_over_t(&self, t: f64) -> f64;
    /// `phi''(t)`; may be infinite at `t = 0`.
    fn second_derivative(&self, t: f64) -> f64;

    /// The (right-continuous) inverse of `phi'`.
    fn inverse_derivative(&self, s: f64) -> f64 {
        self.numeric_inverse_derivative(s)
    }

    /// `phi_a(t)` for the shifted function with `phi_a'(t)/t = phi'(a+t)/(a+t)`.
    fn shifted_value(&self, a: f64, t: f64) -> f64 {
        self.quadrature_shifted_value(a, t)
    }

    fn describe(&self) -> String;

    fn numeric_inverse_derivative(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let slope = self.derivative_over_t(1.0);
        let guess = if slope.is_finite() && slope > 0.0 { s / slope } else { 1.0 };
        roots::invert_increasing(|t| self.derivative(t), |t| self.second_derivative(t), s, guess)
    }

    fn quadrature_shifted_value(&self, a: f64, t: f64) -> f64 {
        if t <= 0.0 {
            return 0.0;
        }
        if a == 0.0 {
            return self.value(t);
        }
        quad::integrate_graded(&|s| self.derivative_over_t(a + s) * s, 0.0, t, a)
    }

    /// Legendre transform `phi*(s) = sup_t (s t - phi(t))`, attained at `phi'(t) = s`.
    fn legendre(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        let t = self.inverse_derivative(s);
        (s * t - self.value(t)).max(0.0)
    }

    fn phi(&self, t: f64) -> Result<f64> {
        check_arg(t, "t")?;
        Ok(self.value(t))
    }

    fn phi_prime(&self, t: f64) -> Result<f64> {
        check_arg(t, "t")?;
        Ok(self.derivative(t))
    }

    fn phi_second(&self, t: f64) -> Result<f64> {
        check_arg(t, "t")?;
        let v = self.second_derivative(t);
        if !v.is_finite() {
            return Err(Error::SingularAtOrigin(self.describe()));
        }
        Ok(v)
    }

    fn inverse_phi_prime(&self, s: f64) -> Result<f64> {
        check_arg(s, "s")?;
        Ok(self.inverse_derivative(s))
    }

    fn conjugate(&self, s: f64) -> Result<f64> {
        check_arg(s, "s")?;
        Ok(self.legendre(s))
    }
}

fn check_arg(x: f64, name: &str) -> Result<()> {
    if !x.is_finite() || x < 0.0 {
        return Err(Error::Domain(format!("{name} = {x} must be finite and non-negative")));
    }
    Ok(())
}

impl<F: NFunction + ?Sized> NFunction for &F {
    fn value(&self, t: f64) -> f64 {
        (**self).value(t)
    }
    fn derivative(&self, t: f64) -> f64 {
        (**self).derivative(t)
    }
    fn derivative_over_t(&self, t: f64) -> f64 {
        (**self).derivative_over_t(t)
    }
    fn second_derivative(&self, t: f64) -> f64 {
        (**self).second_derivative(t)
    }
    fn inverse_derivative(&self, s: f64) -> f64 {
        (**self).inverse_derivative(s)
    }
    fn shifted_value(&self, a: f64, t: f64) -> f64 {
        (**self).shifted_value(a, t)
    }
    fn describe(&self) -> String {
        (**self).describe()
    }
}

/// The shifted N-function `phi_a`.
#[derive(Debug, Clone, Copy)]
pub struct Shifted<F> {
    pub base: F,
    pub shift: f64,
}

/// Shifts `base` by `a >= 0`.
pub fn shift<F: NFunction>(base: F, a: f64) -> Result<Shifted<F>> {
    check_arg(a, "shift")?;
    Ok(Shifted { base, shift: a })
}

impl<F: NFunction> NFunction for Shifted<F> {
    fn value(&self, t: f64) -> f64 {
        if self.shift == 0.0 {
            self.base.value(t)
        } else {
            self.base.shifted_value(self.shift, t)
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        if self.shift == 0.0 {
            return self.base.derivative(t);
        }
        if t == 0.0 {
            return 0.0;
        }
        self.base.derivative_over_t(self.shift + t) * t
    }

    fn derivative_over_t(&self, t: f64) -> f64 {
        self.base.derivative_over_t(self.shift + t)
    }

    fn second_derivative(&self, t: f64) -> f64 {
        let a = self.shift;
        if a == 0.0 {
            return self.base.second_derivative(t);
        }
        let w = a + t;
        self.base.second_derivative(w) * t / w + self.base.derivative(w) * a / (w * w)
    }

    fn shifted_value(&self, b: f64, t: f64) -> f64 {
        // (phi_a)_b has derivative quotient phi'(a+b+s)/(a+b+s)
        self.base.shifted_value(self.shift + b, t)
    }

    fn describe(&self) -> String {
        format!("shift({}, a={})", self.base.describe(), self.shift)
    }
}

/// The complementary N-function `phi*`.
#[derive(Debug, Clone, Copy)]
pub struct Conjugate<F>(pub F);

impl<F: NFunction> NFunction for Conjugate<F> {
    fn value(&self, s: f64) -> f64 {
        self.0.legendre(s)
    }

    fn derivative(&self, s: f64) -> f64 {
        self.0.inverse_derivative(s)
    }

    fn derivative_over_t(&self, s: f64) -> f64 {
        if s == 0.0 {
            return 1.0 / self.0.second_derivative(0.0);
        }
        self.0.inverse_derivative(s) / s
    }

    fn second_derivative(&self, s: f64) -> f64 {
        let t = self.0.inverse_derivative(s);
        1.0 / self.0.second_derivative(t)
    }

    fn inverse_derivative(&self, t: f64) -> f64 {
        self.0.derivative(t)
    }

    fn shifted_value(&self, b: f64, u: f64) -> f64 {
        if u <= 0.0 {
            return 0.0;
        }
        if b == 0.0 {
            return self.value(u);
        }
        // Substitute b + s = phi'(r): the integrand needs no inversion.
        let inner = &self.0;
        let r0 = inner.inverse_derivative(b);
        let r1 = inner.inverse_derivative(b + u);
        let integrand = |r: f64| {
            let d = inner.derivative(r);
            r * ((d - b) / d).max(0.0) * inner.second_derivative(r)
        };
        quad::integrate_graded(&integrand, r0, r1, r0.max(f64::MIN_POSITIVE))
    }

    fn describe(&self) -> String {
        format!("conj({})", self.0.describe())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn model(p: f64, kappa: f64) -> NFunctionModel {
        NFunctionModel::power_law(1.0, kappa, p).unwrap()
    }

    #[test]
    fn inverse_examples() {
        assert_eq!(model(3.0, 0.0).inverse_phi_prime(9.0).unwrap(), 3.0);
        assert_eq!(model(1.5, 1.0).inverse_phi_prime(0.0).unwrap(), 0.0);
        let c = NFunctionModel::carreau(1.0, 1.0, 1.0, 2.0).unwrap();
        let t = c.inverse_phi_prime(4.0).unwrap();
        assert!((c.derivative(t) - 4.0).abs() < 1e-14);
        assert!((t - 2.0).abs() < 1e-14);
    }

    #[test]
    fn conjugate_examples() {
        assert!((model(2.0, 0.0).conjugate(3.0).unwrap() - 4.5).abs() < 1e-14);
        // brute-force sup over a t-grid as oracle
        let m = model(3.0, 0.0);
        let s = 8.0;
        let brute = (0..=200_000)
            .map(|i| {
                let t = i as f64 * 1e-4;
                s * t - m.value(t)
            })
            .fold(f64::MIN, f64::max);
        let exact = 2.0 / 3.0 * 8f64.powf(1.5);
        assert!((brute - exact).abs() < 1e-6);
        assert!((m.conjugate(s).unwrap() - exact).abs() < 1e-12);
        assert_eq!(m.conjugate(0.0).unwrap(), 0.0);
    }

    #[test]
    fn shift_examples() {
        let m = model(2.0, 0.0);
        let s = shift(m, 7.0).unwrap();
        for &t in &[0.1, 1.0, 5.0] {
            assert!((s.value(t) - m.value(t)).abs() < 1e-13 * m.value(t));
        }
        let m3 = model(3.0, 0.0);
        let s1 = shift(m3, 1.0).unwrap();
        assert!((s1.derivative(2.0) - 6.0).abs() < 1e-14);
        let s0 = shift(m3, 0.0).unwrap();
        assert_eq!(s0.value(2.5), m3.value(2.5));
        assert_eq!(s0.derivative(2.5), m3.derivative(2.5));
        assert!(shift(m3, -1.0).is_err());
    }

    #[test]
    fn shifted_definition_identity() {
        let m = NFunctionModel::power_law_quadratic(1.0, 0.3, 1.5).unwrap();
        let a = 2.5;
        let s = shift(m, a).unwrap();
        for &t in &[1e-3, 0.5, 3.0, 40.0] {
            let lhs = s.derivative(t) * (a + t);
            let rhs = m.derivative(a + t) * t;
            assert!((lhs - rhs).abs() <= 1e-14 * rhs);
        }
    }

    #[test]
    fn shifted_quadrature_matches_closed_form() {
        let m = NFunctionModel::power_law(1.0, 0.5, 1.5).unwrap();
        for &a in &[1e-3, 0.7, 20.0] {
            for &t in &[1e-4, 0.3, 9.0, 1e4] {
                let closed = m.shifted_value(a, t);
                let numeric = m.quadrature_shifted_value(a, t);
                assert!((closed / numeric - 1.0).abs() < 1e-11, "a={a} t={t}");
            }
        }
    }

    #[test]
    fn shifted_conjugate_substitution_matches_direct_quadrature() {
        let m = NFunctionModel::power_law(1.0, 0.0, 3.0).unwrap();
        let c = Conjugate(m);
        for &b in &[0.5, 4.0] {
            for &u in &[0.01, 1.0, 30.0] {
                let subst = c.shifted_value(b, u);
                let direct = c.quadrature_shifted_value(b, u);
                assert!((subst / direct - 1.0).abs() < 1e-10, "b={b} u={u}: {subst} {direct}");
            }
        }
    }

    #[test]
    fn conjugate_of_conjugate_is_base() {
        let m = NFunctionModel::carreau(0.5, 1.0, 1.0, 3.0).unwrap();
        let cc = Conjugate(Conjugate(m));
        for &t in &[1e-3, 0.2, 1.0, 10.0, 1e3] {
            assert!((cc.value(t) / m.value(t) - 1.0).abs() < 1e-9, "t={t}");
        }
    }
}
