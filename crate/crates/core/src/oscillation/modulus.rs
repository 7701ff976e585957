use serde::{Deserialize, Serialize};

use crate::{Error, Result};

/// A non-decreasing modulus `omega` on `(0, inf)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Modulus {
    Constant,
    Power(f64),
    /// `(r, omega(r))` knots, increasing in `r`; piecewise linear in between
    /// and constant beyond the end knots.
    Tabulated(Vec<(f64, f64)>),
}

impl Modulus {
    pub fn validate(&self) -> Result<()> {
        match self {
            Modulus::Constant => Ok(()),
            Modulus::Power(b) if *b >= 0.0 && b.is_finite() => Ok(()),
            Modulus::Power(b) => Err(Error::Domain(format!("power modulus needs beta >= 0, got {b}"))),
            Modulus::Tabulated(t) => {
                if t.is_empty() {
                    return Err(Error::Domain("empty modulus table".into()));
                }
                let finite = t.iter().all(|(r, w)| r.is_finite() && w.is_finite() && *r > 0.0 && *w > 0.0);
                let monotone = t.windows(2).all(|p| p[1].0 > p[0].0 && p[1].1 >= p[0].1);
                if finite && monotone {
                    Ok(())
                } else {
                    Err(Error::Domain("modulus table must be positive, increasing in r and non-decreasing".into()))
                }
            }
        }
    }

    pub fn eval(&self, r: f64) -> f64 {
        match self {
            Modulus::Constant => 1.0,
            Modulus::Power(b) => r.powf(*b),
            Modulus::Tabulated(t) => {
                if r <= t[0].0 {
                    return t[0].1;
                }
                for w in t.windows(2) {
                    let ((r0, w0), (r1, w1)) = (w[0], w[1]);
                    if r <= r1 {
                        return w0 + (w1 - w0) * (r - r0) / (r1 - r0);
                    }
                }
                t[t.len() - 1].1
            }
        }
    }

    /// Smallest `C` with `omega(s) s^-beta <= C omega(r) r^-beta` for sampled
    /// `r < s` (1 for an exactly decreasing `omega(r) r^-beta`).
    pub fn almost_decreasing_constant(&self, beta: f64, radii: &[f64]) -> f64 {
        let g: Vec<f64> = radii.iter().map(|&r| self.eval(r) * r.powf(-beta)).collect();
        let mut c = 1.0f64;
        for (a, &r) in radii.iter().enumerate() {
            for (b, &s) in radii.iter().enumerate() {
                if r < s {
                    c = c.max(g[b] / g[a]);
                }
            }
        }
        c
    }
}
