use std::ops::{Add, AddAssign, Mul, Neg, Sub};

use serde::{Deserialize, Serialize};

/// A symmetric 2x2 matrix `[[a11, a12], [a12, a22]]`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct SymMat2 {
    pub a11: f64,
    pub a12: f64,
    pub a22: f64,
}

impl SymMat2 {
    pub const ZERO: SymMat2 = SymMat2 { a11: 0.0, a12: 0.0, a22: 0.0 };
    pub const IDENTITY: SymMat2 = SymMat2 { a11: 1.0, a12: 0.0, a22: 1.0 };

    pub const fn new(a11: f64, a12: f64, a22: f64) -> Self {
        Self { a11, a12, a22 }
    }

    pub const fn diag(a11: f64, a22: f64) -> Self {
        Self { a11, a12: 0.0, a22 }
    }

    /// The symmetric tensor product `v (x) v`.
    pub fn outer(v: [f64; 2]) -> Self {
        Self { a11: v[0] * v[0], a12: v[0] * v[1], a22: v[1] * v[1] }
    }

    /// Frobenius inner product `P : Q`.
    pub fn dot(&self, other: &SymMat2) -> f64 {
        self.a11 * other.a11 + 2.0 * self.a12 * other.a12 + self.a22 * other.a22
    }

    pub fn norm(&self) -> f64 {
        self.dot(self).sqrt()
    }

    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    pub fn is_finite(&self) -> bool {
        self.a11.is_finite() && self.a12.is_finite() && self.a22.is_finite()
    }

    /// Coordinates in an orthonormal basis of the symmetric matrices:
    /// `(a11, sqrt(2) a12, a22)`, so the Euclidean norm is the Frobenius norm.
    pub fn to_orthonormal(&self) -> [f64; 3] {
        [self.a11, std::f64::consts::SQRT_2 * self.a12, self.a22]
    }

    pub fn from_orthonormal(y: [f64; 3]) -> Self {
        Self { a11: y[0], a12: y[1] / std::f64::consts::SQRT_2, a22: y[2] }
    }

    /// `R Q R^T` for the rotation by `theta`.
    pub fn rotated(&self, theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        let m = Mat2([[self.a11, self.a12], [self.a12, self.a22]]);
        let r = Mat2([[c, -s], [s, c]]);
        let out = r.mul(&m).mul(&r.transpose());
        out.sym()
    }
}

impl Add for SymMat2 {
    type Output = SymMat2;
    fn add(self, o: SymMat2) -> SymMat2 {
        SymMat2::new(self.a11 + o.a11, self.a12 + o.a12, self.a22 + o.a22)
    }
}

impl AddAssign for SymMat2 {
    fn add_assign(&mut self, o: SymMat2) {
        *self = *self + o;
    }
}

impl Sub for SymMat2 {
    type Output = SymMat2;
    fn sub(self, o: SymMat2) -> SymMat2 {
        SymMat2::new(self.a11 - o.a11, self.a12 - o.a12, self.a22 - o.a22)
    }
}

impl Neg for SymMat2 {
    type Output = SymMat2;
    fn neg(self) -> SymMat2 {
        SymMat2::new(-self.a11, -self.a12, -self.a22)
    }
}

impl Mul<SymMat2> for f64 {
    type Output = SymMat2;
    fn mul(self, m: SymMat2) -> SymMat2 {
        SymMat2::new(self * m.a11, self * m.a12, self * m.a22)
    }
}

/// A general 2x2 matrix, row major.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct Mat2(pub [[f64; 2]; 2]);

impl Mat2 {
    pub fn transpose(&self) -> Mat2 {
        let m = self.0;
        Mat2([[m[0][0], m[1][0]], [m[0][1], m[1][1]]])
    }

    pub fn mul(&self, o: &Mat2) -> Mat2 {
        let (a, b) = (self.0, o.0);
        let mut c = [[0.0; 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                c[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        Mat2(c)
    }

    pub fn sym(&self) -> SymMat2 {
        let m = self.0;
        SymMat2::new(m[0][0], 0.5 * (m[0][1] + m[1][0]), m[1][1])
    }

    /// The `(1,2)` entry of the antisymmetric part.
    pub fn skew12(&self) -> f64 {
        0.5 * (self.0[0][1] - self.0[1][0])
    }

    pub fn norm(&self) -> f64 {
        self.0.iter().flatten().map(|x| x * x).sum::<f64>().sqrt()
    }

    pub fn scale(&self, s: f64) -> Mat2 {
        let m = self.0;
        Mat2([[s * m[0][0], s * m[0][1]], [s * m[1][0], s * m[1][1]]])
    }
}

impl From<SymMat2> for Mat2 {
    fn from(s: SymMat2) -> Mat2 {
        Mat2([[s.a11, s.a12], [s.a12, s.a22]])
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn norm_and_trace() {
        let q = SymMat2::new(1.0, 2.0, 3.0);
        assert!((q.norm() - (1.0f64 + 8.0 + 9.0).sqrt()).abs() < 1e-15);
        assert_eq!(q.trace(), 4.0);
        let y = q.to_orthonormal();
        assert!(((y[0] * y[0] + y[1] * y[1] + y[2] * y[2]).sqrt() - q.norm()).abs() < 1e-15);
        assert_eq!(SymMat2::from_orthonormal(y).a12, 2.0);
    }

    #[test]
    fn rotation_preserves_norm() {
        let q = SymMat2::new(0.3, -1.2, 2.0);
        let r = q.rotated(0.7);
        assert!((r.norm() - q.norm()).abs() < 1e-14);
        assert!((r.trace() - q.trace()).abs() < 1e-14);
    }
}
