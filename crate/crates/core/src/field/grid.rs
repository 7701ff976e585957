use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Boundary {
    Periodic,
    Dirichlet,
}

/// Uniform `n x n` grid of square cells covering `[origin, origin + n h]^2`.
///
/// Velocity components live on cell faces: `u1` at `(origin + (i h, (j + 1/2) h))`,
/// `u2` at `(origin + ((i + 1/2) h, j h))`. On a periodic grid each component has
/// `n x n` faces (the east/north boundary faces are the wrapped west/south ones);
/// on a Dirichlet grid `u1` has `(n + 1) x n` faces and `u2` has `n x (n + 1)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    pub n: usize,
    pub h: f64,
    pub origin: [f64; 2],
    pub boundary: Boundary,
}

impl Grid {
    pub fn new(n: usize, length: f64, origin: [f64; 2], boundary: Boundary) -> Result<Grid> {
        if n < 8 {
            return Err(Error::Domain(format!("grid needs n >= 8, got {n}")));
        }
        if !(length > 0.0 && length.is_finite()) {
            return Err(Error::Domain(format!("grid side length must be positive, got {length}")));
        }
        if !(origin[0].is_finite() && origin[1].is_finite()) {
            return Err(Error::Domain("grid origin must be finite".into()));
        }
        Ok(Grid { n, h: length / n as f64, origin, boundary })
    }

    pub fn periodic(n: usize, length: f64) -> Result<Grid> {
        Grid::new(n, length, [0.0, 0.0], Boundary::Periodic)
    }

    pub fn dirichlet(n: usize, length: f64, origin: [f64; 2]) -> Result<Grid> {
        Grid::new(n, length, origin, Boundary::Dirichlet)
    }

    pub fn length(&self) -> f64 {
        self.h * self.n as f64
    }

    pub fn is_periodic(&self) -> bool {
        self.boundary == Boundary::Periodic
    }

    pub fn cell_count(&self) -> usize {
        self.n * self.n
    }

    pub fn cell_index(&self, i: usize, j: usize) -> usize {
        j * self.n + i
    }

    pub fn cell_center(&self, i: usize, j: usize) -> [f64; 2] {
        [
            self.origin[0] + (i as f64 + 0.5) * self.h,
            self.origin[1] + (j as f64 + 0.5) * self.h,
        ]
    }

    /// Face counts per direction `(nx, ny)` for the `u1` component.
    pub fn u1_shape(&self) -> (usize, usize) {
        match self.boundary {
            Boundary::Periodic => (self.n, self.n),
            Boundary::Dirichlet => (self.n + 1, self.n),
        }
    }

    pub fn u2_shape(&self) -> (usize, usize) {
        match self.boundary {
            Boundary::Periodic => (self.n, self.n),
            Boundary::Dirichlet => (self.n, self.n + 1),
        }
    }

    pub fn u1_len(&self) -> usize {
        let (a, b) = self.u1_shape();
        a * b
    }

    pub fn u2_len(&self) -> usize {
        let (a, b) = self.u2_shape();
        a * b
    }

    /// Length of the stacked face vector `[u1; u2]`.
    pub fn face_count(&self) -> usize {
        self.u1_len() + self.u2_len()
    }

    pub fn u1_position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + i as f64 * self.h, self.origin[1] + (j as f64 + 0.5) * self.h]
    }

    pub fn u2_position(&self, i: usize, j: usize) -> [f64; 2] {
        [self.origin[0] + (i as f64 + 0.5) * self.h, self.origin[1] + j as f64 * self.h]
    }

    /// Stacked index of the `u1` face at `(i, j)`; indices may run one past the
    /// grid (or below zero) on periodic grids and are wrapped. `None` if the face
    /// does not exist.
    pub fn u1_face(&self, i: isize, j: isize) -> Option<usize> {
        let (nx, ny) = self.u1_shape();
        let (i, j) = self.resolve(i, j, nx, ny)?;
        Some(j * nx + i)
    }

    pub fn u2_face(&self, i: isize, j: isize) -> Option<usize> {
        let (nx, ny) = self.u2_shape();
        let (i, j) = self.resolve(i, j, nx, ny)?;
        Some(self.u1_len() + j * nx + i)
    }

    /// Cell lookup with periodic wrapping; `None` outside a Dirichlet grid.
    pub fn cell(&self, i: isize, j: isize) -> Option<usize> {
        let (i, j) = self.resolve(i, j, self.n, self.n)?;
        Some(j * self.n + i)
    }

    fn resolve(&self, i: isize, j: isize, nx: usize, ny: usize) -> Option<(usize, usize)> {
        match self.boundary {
            Boundary::Periodic => {
                let n = self.n as isize;
                Some((i.rem_euclid(n) as usize, j.rem_euclid(n) as usize))
            }
            Boundary::Dirichlet => {
                if i < 0 || j < 0 || i as usize >= nx || j as usize >= ny {
                    None
                } else {
                    Some((i as usize, j as usize))
                }
            }
        }
    }

    /// Position of a stacked face index.
    pub fn face_position(&self, face: usize) -> [f64; 2] {
        let n1 = self.u1_len();
        if face < n1 {
            let nx = self.u1_shape().0;
            self.u1_position(face % nx, face / nx)
        } else {
            let nx = self.u2_shape().0;
            let k = face - n1;
            self.u2_position(k % nx, k / nx)
        }
    }

    /// Which component (0 or 1) a stacked face index belongs to, and its `(i, j)`.
    pub fn face_location(&self, face: usize) -> (usize, usize, usize) {
        let n1 = self.u1_len();
        if face < n1 {
            let nx = self.u1_shape().0;
            (0, face % nx, face / nx)
        } else {
            let nx = self.u2_shape().0;
            let k = face - n1;
            (1, k % nx, k / nx)
        }
    }

    pub fn same_as(&self, other: &Grid) -> bool {
        self.n == other.n
            && self.boundary == other.boundary
            && (self.h - other.h).abs() <= 1e-14 * self.h
            && (self.origin[0] - other.origin[0]).abs() <= 1e-12 * self.length()
            && (self.origin[1] - other.origin[1]).abs() <= 1e-12 * self.length()
    }

    pub fn check_same(&self, other: &Grid) -> Result<()> {
        if self.same_as(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{self:?} vs {other:?}")))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_grids() {
        assert!(Grid::periodic(4, 1.0).is_err());
        assert!(Grid::periodic(8, 0.0).is_err());
        assert!(Grid::periodic(8, 1.0).is_ok());
    }

    #[test]
    fn face_indexing() {
        let g = Grid::dirichlet(8, 1.0, [0.0, 0.0]).unwrap();
        assert_eq!(g.u1_len(), 72);
        assert_eq!(g.face_count(), 144);
        assert_eq!(g.u1_face(8, 7), Some(71));
        assert_eq!(g.u1_face(9, 0), None);
        assert_eq!(g.u2_face(0, 8), Some(72 + 64));
        let p = Grid::periodic(8, 1.0).unwrap();
        assert_eq!(p.u1_face(8, 0), p.u1_face(0, 0));
        assert_eq!(p.u2_face(-1, -1), p.u2_face(7, 7));
        assert_eq!(p.face_location(70), (1, 6, 0));
    }
}
