use std::fmt;

use serde::{Deserialize, Serialize};

use super::NFunction;
use crate::error::{Error, Result};

/// The built-in N-function families.
///
/// Each variant is determined by the derivative it prescribes:
///
/// * `PowerLawAdditive`: `phi'(t) = nu (kappa + t)^(p-2) t`
/// * `PowerLawQuadratic`: `phi'(t) = nu (kappa^2 + t^2)^((p-2)/2) t`
/// * `Carreau`: `phi'(t) = mu_inf t + nu (kappa + t)^(p-2) t`
/// * `ArcSinh`: `phi'(t) = mu_inf t + nu arcsinh(t)`
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum NFunctionModel {
    PowerLawAdditive { nu: f64, kappa: f64, p: f64 },
    PowerLawQuadratic { nu: f64, kappa: f64, p: f64 },
    Carreau { mu_inf: f64, nu: f64, kappa: f64, p: f64 },
    ArcSinh { mu_inf: f64, nu: f64 },
}

impl NFunctionModel {
    pub fn power_law(nu: f64, kappa: f64, p: f64) -> Result<Self> {
        Self::PowerLawAdditive { nu, kappa, p }.validated()
    }

    pub fn power_law_quadratic(nu: f64, kappa: f64, p: f64) -> Result<Self> {
        Self::PowerLawQuadratic { nu, kappa, p }.validated()
    }

    pub fn carreau(mu_inf: f64, nu: f64, kappa: f64, p: f64) -> Result<Self> {
        Self::Carreau { mu_inf, nu, kappa, p }.validated()
    }

    pub fn arcsinh(mu_inf: f64, nu: f64) -> Result<Self> {
        Self::ArcSinh { mu_inf, nu }.validated()
    }

    pub fn validated(self) -> Result<Self> {
        self.validate()?;
        Ok(self)
    }

    pub fn validate(&self) -> Result<()> {
        let bad = |what: &str| Err(Error::Domain(format!("{what} in {self}")));
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } | Self::PowerLawQuadratic { nu, kappa, p } => {
                if !finite(&[nu, kappa, p]) {
                    return bad("non-finite parameter");
                }
                if nu <= 0.0 {
                    return bad("nu must be positive");
                }
                if kappa < 0.0 {
                    return bad("kappa must be non-negative");
                }
                if p <= 1.0 {
                    return bad("p must exceed 1");
                }
            }
            Self::Carreau { mu_inf, nu, kappa, p } => {
                if !finite(&[mu_inf, nu, kappa, p]) {
                    return bad("non-finite parameter");
                }
                if mu_inf < 0.0 || nu <= 0.0 || kappa < 0.0 || p <= 1.0 {
                    return bad("need mu_inf >= 0, nu > 0, kappa >= 0, p > 1");
                }
            }
            Self::ArcSinh { mu_inf, nu } => {
                if !finite(&[mu_inf, nu]) {
                    return bad("non-finite parameter");
                }
                if mu_inf <= 0.0 || nu < 0.0 {
                    return bad("need mu_inf > 0, nu >= 0");
                }
            }
        }
        Ok(())
    }

    pub fn kappa(&self) -> Option<f64> {
        match *self {
            Self::PowerLawAdditive { kappa, .. }
            | Self::PowerLawQuadratic { kappa, .. }
            | Self::Carreau { kappa, .. } => Some(kappa),
            Self::ArcSinh { .. } => None,
        }
    }

    pub fn exponent(&self) -> Option<f64> {
        match *self {
            Self::PowerLawAdditive { p, .. }
            | Self::PowerLawQuadratic { p, .. }
            | Self::Carreau { p, .. } => Some(p),
            Self::ArcSinh { .. } => None,
        }
    }

    /// Same model with `kappa` replaced by `max(kappa, floor)`.
    pub fn with_kappa_floor(&self, floor: f64) -> Self {
        let mut m = *self;
        match &mut m {
            Self::PowerLawAdditive { kappa, .. }
            | Self::PowerLawQuadratic { kappa, .. }
            | Self::Carreau { kappa, .. } => *kappa = kappa.max(floor),
            Self::ArcSinh { .. } => {}
        }
        m
    }

    /// Same model with `nu` replaced.
    pub fn with_nu(&self, new_nu: f64) -> Self {
        let mut m = *self;
        match &mut m {
            Self::PowerLawAdditive { nu, .. }
            | Self::PowerLawQuadratic { nu, .. }
            | Self::Carreau { nu, .. }
            | Self::ArcSinh { nu, .. } => *nu = new_nu,
        }
        m
    }

    /// Same model with the exponent `p` replaced (no effect on `ArcSinh`).
    pub fn with_exponent(&self, new_p: f64) -> Self {
        let mut m = *self;
        match &mut m {
            Self::PowerLawAdditive { p, .. } | Self::PowerLawQuadratic { p, .. } | Self::Carreau { p, .. } => *p = new_p,
            Self::ArcSinh { .. } => {}
        }
        m
    }

    /// Same model with `kappa` replaced (no effect on `ArcSinh`).
    pub fn with_kappa(&self, new_kappa: f64) -> Self {
        let mut m = *self;
        match &mut m {
            Self::PowerLawAdditive { kappa, .. }
            | Self::PowerLawQuadratic { kappa, .. }
            | Self::Carreau { kappa, .. } => *kappa = new_kappa,
            Self::ArcSinh { .. } => {}
        }
        m
    }

    /// True when `phi'(t)` is linear in `t`, i.e. the stress law is Newtonian.
    pub fn is_newtonian(&self) -> bool {
        match *self {
            Self::PowerLawAdditive { p, .. }
            | Self::PowerLawQuadratic { p, .. }
            | Self::Carreau { p, .. } => p == 2.0,
            Self::ArcSinh { nu, .. } => nu == 0.0,
        }
    }

    /// True when the second derivative blows up at the origin.
    pub fn singular_at_origin(&self) -> bool {
        match *self {
            Self::PowerLawAdditive { kappa, p, .. }
            | Self::PowerLawQuadratic { kappa, p, .. }
            | Self::Carreau { kappa, p, .. } => kappa == 0.0 && p < 2.0,
            Self::ArcSinh { .. } => false,
        }
    }
}

impl fmt::Display for NFunctionModel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => {
                write!(f, "power-law-additive(nu={nu}, kappa={kappa}, p={p})")
            }
            Self::PowerLawQuadratic { nu, kappa, p } => {
                write!(f, "power-law-quadratic(nu={nu}, kappa={kappa}, p={p})")
            }
            Self::Carreau { mu_inf, nu, kappa, p } => {
                write!(f, "carreau(mu_inf={mu_inf}, nu={nu}, kappa={kappa}, p={p})")
            }
            Self::ArcSinh { mu_inf, nu } => write!(f, "arcsinh(mu_inf={mu_inf}, nu={nu})"),
        }
    }
}

// (kappa + t)^(p-2) t family; all functions assume t >= 0.

fn additive_value(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if kappa == 0.0 {
        return nu * t.powf(p) / p;
    }
    let w = t / kappa;
    let g = if w < 0.5 {
        // int_0^w (1+x)^(p-2) x dx as a binomial series
        let alpha = p - 2.0;
        let mut coeff = 1.0;
        let mut wk = w * w;
        let mut sum = 0.0;
        for k in 0..400 {
            let term = coeff * wk / (k as f64 + 2.0);
            sum += term;
            if term.abs() <= 1e-18 * sum.abs() {
                break;
            }
            coeff *= (alpha - k as f64) / (k as f64 + 1.0);
            wk *= w;
            if coeff == 0.0 {
                break;
            }
        }
        sum
    } else {
        let l = w.ln_1p();
        (p * l).exp_m1() / p - ((p - 1.0) * l).exp_m1() / (p - 1.0)
    };
    nu * kappa.powf(p) * g
}

fn additive_over_t(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if t == 0.0 && kappa == 0.0 {
        return origin_limit(nu, p);
    }
    nu * (kappa + t).powf(p - 2.0)
}

fn additive_second(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if kappa == 0.0 {
        if t == 0.0 {
            return origin_limit(nu, p);
        }
        return nu * (p - 1.0) * t.powf(p - 2.0);
    }
    nu * (kappa + t).powf(p - 3.0) * (kappa + (p - 1.0) * t)
}

fn quadratic_value(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if t == 0.0 {
        return 0.0;
    }
    if kappa == 0.0 {
        return nu * t.powf(p) / p;
    }
    let w = t / kappa;
    if w > 1e100 {
        return nu * ((kappa * kappa + t * t).powf(0.5 * p) - kappa.powf(p)) / p;
    }
    nu * kappa.powf(p) * (0.5 * p * (w * w).ln_1p()).exp_m1() / p
}

fn quadratic_over_t(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if t == 0.0 && kappa == 0.0 {
        return origin_limit(nu, p);
    }
    nu * (kappa * kappa + t * t).powf(0.5 * (p - 2.0))
}

fn quadratic_second(nu: f64, kappa: f64, p: f64, t: f64) -> f64 {
    if kappa == 0.0 {
        if t == 0.0 {
            return origin_limit(nu, p);
        }
        return nu * (p - 1.0) * t.powf(p - 2.0);
    }
    let k2 = kappa * kappa;
    nu * (k2 + t * t).powf(0.5 * (p - 4.0)) * (k2 + (p - 1.0) * t * t)
}

/// Limit of `nu t^(p-2)` at `t = 0+`.
fn origin_limit(nu: f64, p: f64) -> f64 {
    if p < 2.0 {
        f64::INFINITY
    } else if p == 2.0 {
        nu
    } else {
        0.0
    }
}

fn asinh_over_t(t: f64) -> f64 {
    if t < 1e-4 {
        let t2 = t * t;
        1.0 - t2 / 6.0 + 3.0 * t2 * t2 / 40.0
    } else {
        t.asinh() / t
    }
}

impl NFunction for NFunctionModel {
    fn value(&self, t: f64) -> f64 {
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => additive_value(nu, kappa, p, t),
            Self::PowerLawQuadratic { nu, kappa, p } => quadratic_value(nu, kappa, p, t),
            Self::Carreau { mu_inf, nu, kappa, p } => {
                0.5 * mu_inf * t * t + additive_value(nu, kappa, p, t)
            }
            Self::ArcSinh { mu_inf, nu } => {
                let root = (1.0 + t * t).sqrt();
                0.5 * mu_inf * t * t + nu * (t * t.asinh() - t * t / (root + 1.0))
            }
        }
    }

    fn derivative(&self, t: f64) -> f64 {
        if t == 0.0 {
            return 0.0;
        }
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => nu * (kappa + t).powf(p - 2.0) * t,
            Self::PowerLawQuadratic { nu, kappa, p } => {
                nu * (kappa * kappa + t * t).powf(0.5 * (p - 2.0)) * t
            }
            Self::Carreau { mu_inf, nu, kappa, p } => {
                mu_inf * t + nu * (kappa + t).powf(p - 2.0) * t
            }
            Self::ArcSinh { mu_inf, nu } => mu_inf * t + nu * t.asinh(),
        }
    }

    fn derivative_over_t(&self, t: f64) -> f64 {
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => additive_over_t(nu, kappa, p, t),
            Self::PowerLawQuadratic { nu, kappa, p } => quadratic_over_t(nu, kappa, p, t),
            Self::Carreau { mu_inf, nu, kappa, p } => mu_inf + additive_over_t(nu, kappa, p, t),
            Self::ArcSinh { mu_inf, nu } => mu_inf + nu * asinh_over_t(t),
        }
    }

    fn second_derivative(&self, t: f64) -> f64 {
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => additive_second(nu, kappa, p, t),
            Self::PowerLawQuadratic { nu, kappa, p } => quadratic_second(nu, kappa, p, t),
            Self::Carreau { mu_inf, nu, kappa, p } => mu_inf + additive_second(nu, kappa, p, t),
            Self::ArcSinh { mu_inf, nu } => mu_inf + nu / (1.0 + t * t).sqrt(),
        }
    }

    fn inverse_derivative(&self, s: f64) -> f64 {
        if s <= 0.0 {
            return 0.0;
        }
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } | Self::PowerLawQuadratic { nu, kappa, p } => {
                if p == 2.0 {
                    return s / nu;
                }
                if kappa == 0.0 {
                    return (s / nu).powf(1.0 / (p - 1.0));
                }
            }
            Self::Carreau { mu_inf, nu, kappa, p } => {
                if p == 2.0 {
                    return s / (mu_inf + nu);
                }
                if kappa == 0.0 && mu_inf == 0.0 {
                    return (s / nu).powf(1.0 / (p - 1.0));
                }
            }
            Self::ArcSinh { mu_inf, nu } => {
                if nu == 0.0 {
                    return s / mu_inf;
                }
            }
        }
        self.numeric_inverse_derivative(s)
    }

    fn shifted_value(&self, a: f64, t: f64) -> f64 {
        // phi'(a+s)/(a+s) = nu (kappa + a + s)^(p-2): the shift moves kappa.
        match *self {
            Self::PowerLawAdditive { nu, kappa, p } => additive_value(nu, kappa + a, p, t),
            Self::Carreau { mu_inf, nu, kappa, p } => {
                0.5 * mu_inf * t * t + additive_value(nu, kappa + a, p, t)
            }
            _ => self.quadrature_shifted_value(a, t),
        }
    }

    fn describe(&self) -> String {
        self.to_string()
    }
}
