use serde::{Deserialize, Serialize};

use super::{Field, FieldValue, Grid};
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Ball {
    pub center: [f64; 2],
    pub radius: f64,
}

impl Ball {
    pub fn new(center: [f64; 2], radius: f64) -> Result<Ball> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Domain(format!("ball radius must be positive, got {radius}")));
        }
        if !(center[0].is_finite() && center[1].is_finite()) {
            return Err(Error::Domain("ball center must be finite".into()));
        }
        Ok(Ball { center, radius })
    }

    /// Same center, radius scaled by `lambda`.
    pub fn scaled(&self, lambda: f64) -> Ball {
        Ball { center: self.center, radius: self.radius * lambda }
    }

    pub fn contains(&self, x: [f64; 2]) -> bool {
        let (dx, dy) = (x[0] - self.center[0], x[1] - self.center[1]);
        dx * dx + dy * dy <= self.radius * self.radius
    }

    /// Cells whose centers lie in the ball, without the resolution check.
    pub fn member_cells(&self, g: &Grid) -> Vec<(usize, usize)> {
        let lo = |c: f64, o: f64| ((c - self.radius - o) / g.h - 0.5).floor().max(0.0) as usize;
        let hi = |c: f64, o: f64| {
            let v = ((c + self.radius - o) / g.h - 0.5).ceil();
            if v < 0.0 { 0 } else { (v as usize + 1).min(g.n) }
        };
        let (i0, i1) = (lo(self.center[0], g.origin[0]), hi(self.center[0], g.origin[0]));
        let (j0, j1) = (lo(self.center[1], g.origin[1]), hi(self.center[1], g.origin[1]));
        let mut out = Vec::new();
        for j in j0..j1 {
            for i in i0..i1 {
                if self.contains(g.cell_center(i, j)) {
                    out.push((i, j));
                }
            }
        }
        out
    }

    /// Member cells, enforcing the `2h` resolution cutoff and non-emptiness.
    pub fn cells(&self, g: &Grid) -> Result<Vec<(usize, usize)>> {
        let cutoff = 2.0 * g.h;
        if self.radius < cutoff * (1.0 - 1e-12) {
            return Err(Error::BelowResolution { radius: self.radius, cutoff });
        }
        let cells = self.member_cells(g);
        if cells.is_empty() {
            return Err(Error::BallOutsideGrid);
        }
        Ok(cells)
    }
}

/// Values of a field on the cells of a ball.
#[derive(Debug, Clone, PartialEq)]
pub struct Restricted<V> {
    pub cells: Vec<(usize, usize)>,
    pub values: Vec<V>,
}

impl<V: FieldValue> Restricted<V> {
    pub fn mean(&self) -> V {
        let s = self.values.iter().fold(V::ZERO, |acc, v| acc.add(*v));
        s.scale(1.0 / self.values.len() as f64)
    }
}

pub fn restrict<F: Field>(f: &F, ball: &Ball) -> Result<Restricted<F::Value>> {
    let cells = ball.cells(f.grid())?;
    let values = cells.iter().map(|&(i, j)| f.at(i, j)).collect();
    Ok(Restricted { cells, values })
}

/// Unweighted mean of the cell values inside `ball`.
pub fn ball_mean<F: Field>(f: &F, ball: &Ball) -> Result<F::Value> {
    Ok(restrict(f, ball)?.mean())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::field::{ScalarField, SymMat2, TensorField};

    fn box_grid(n: usize) -> Grid {
        Grid::dirichlet(n, 4.0, [-2.0, -2.0]).unwrap()
    }

    #[test]
    fn constant_mean() {
        let g = box_grid(32);
        let f = TensorField::constant(g, SymMat2::new(1.0, -2.0, 0.5));
        let m = ball_mean(&f, &Ball::new([0.3, -0.2], 0.7).unwrap()).unwrap();
        assert!((m - SymMat2::new(1.0, -2.0, 0.5)).norm() < 1e-14);
    }

    #[test]
    fn odd_field_mean_vanishes() {
        let g = box_grid(40);
        let f = ScalarField::from_fn(g, |x| x[0]);
        let m = ball_mean(&f, &Ball::new([0.0, 0.0], 1.0).unwrap()).unwrap();
        assert!(m.abs() <= g.h);
    }

    #[test]
    fn second_moment_of_unit_disc() {
        // int_B x1^2 / |B| = 1/4 for the unit disc.
        for n in [64, 128] {
            let g = box_grid(n);
            let f = ScalarField::from_fn(g, |x| x[0] * x[0]);
            let m = ball_mean(&f, &Ball::new([0.0, 0.0], 1.0).unwrap()).unwrap();
            assert!((m - 0.25).abs() < 2.0 * g.h, "n={n}: {m}");
        }
    }

    #[test]
    fn errors() {
        let g = box_grid(32);
        let f = ScalarField::constant(g, 1.0);
        assert!(matches!(
            ball_mean(&f, &Ball::new([0.0, 0.0], 0.1).unwrap()),
            Err(Error::BelowResolution { .. })
        ));
        assert!(matches!(
            ball_mean(&f, &Ball::new([10.0, 10.0], 1.0).unwrap()),
            Err(Error::BallOutsideGrid)
        ));
        assert!(Ball::new([0.0, 0.0], -1.0).is_err());
    }

    #[test]
    fn membership_matches_brute_force() {
        let g = box_grid(24);
        let b = Ball::new([0.37, -1.1], 0.9).unwrap();
        let brute: Vec<_> = (0..24)
            .flat_map(|j| (0..24).map(move |i| (i, j)))
            .filter(|&(i, j)| b.contains(g.cell_center(i, j)))
            .collect();
        assert_eq!(b.member_cells(&g), brute);
    }
}
