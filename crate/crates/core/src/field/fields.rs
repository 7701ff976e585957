use super::{Grid, SymMat2};
use crate::{Error, Result};

/// Values a field can carry at a cell center.
pub trait FieldValue: Copy + Send + Sync + std::fmt::Debug {
    const ZERO: Self;
    fn add(self, other: Self) -> Self;
    fn sub(self, other: Self) -> Self;
    fn scale(self, s: f64) -> Self;
    /// Euclidean / Frobenius norm.
    fn norm(self) -> f64;
    fn is_finite(self) -> bool;
}

impl FieldValue for f64 {
    const ZERO: f64 = 0.0;
    fn add(self, o: f64) -> f64 {
        self + o
    }
    fn sub(self, o: f64) -> f64 {
        self - o
    }
    fn scale(self, s: f64) -> f64 {
        self * s
    }
    fn norm(self) -> f64 {
        self.abs()
    }
    fn is_finite(self) -> bool {
        f64::is_finite(self)
    }
}

impl FieldValue for [f64; 2] {
    const ZERO: [f64; 2] = [0.0, 0.0];
    fn add(self, o: Self) -> Self {
        [self[0] + o[0], self[1] + o[1]]
    }
    fn sub(self, o: Self) -> Self {
        [self[0] - o[0], self[1] - o[1]]
    }
    fn scale(self, s: f64) -> Self {
        [self[0] * s, self[1] * s]
    }
    fn norm(self) -> f64 {
        self[0].hypot(self[1])
    }
    fn is_finite(self) -> bool {
        self[0].is_finite() && self[1].is_finite()
    }
}

impl FieldValue for SymMat2 {
    const ZERO: SymMat2 = SymMat2::ZERO;
    fn add(self, o: Self) -> Self {
        self + o
    }
    fn sub(self, o: Self) -> Self {
        self - o
    }
    fn scale(self, s: f64) -> Self {
        s * self
    }
    fn norm(self) -> f64 {
        SymMat2::norm(&self)
    }
    fn is_finite(self) -> bool {
        SymMat2::is_finite(&self)
    }
}

/// Anything with a value at each cell center.
pub trait Field: Sync {
    type Value: FieldValue;
    fn grid(&self) -> &Grid;
    fn at(&self, i: usize, j: usize) -> Self::Value;
}

/// Cell-centered field of plain values. `ScalarField` and `TensorField` are
/// instances; cell `(i, j)` is stored at `j * n + i`.
#[derive(Debug, Clone, PartialEq)]
pub struct CellField<V> {
    grid: Grid,
    values: Vec<V>,
}

pub type ScalarField = CellField<f64>;
pub type TensorField = CellField<SymMat2>;

impl<V: FieldValue> CellField<V> {
    pub fn new(grid: Grid, values: Vec<V>) -> Result<Self> {
        if values.len() != grid.cell_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} cell values, got {}",
                grid.cell_count(),
                values.len()
            )));
        }
        if let Some(k) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite field value at cell {k}")));
        }
        Ok(Self { grid, values })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, values: Vec<V>) -> Self {
        debug_assert_eq!(values.len(), grid.cell_count());
        Self { grid, values }
    }

    pub fn constant(grid: Grid, value: V) -> Self {
        Self { grid, values: vec![value; grid.cell_count()] }
    }

    /// Samples `f` at the cell centers.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> V) -> Self {
        let mut values = Vec::with_capacity(grid.cell_count());
        for j in 0..grid.n {
            for i in 0..grid.n {
                values.push(f(grid.cell_center(i, j)));
            }
        }
        Self { grid, values }
    }

    pub fn values(&self) -> &[V] {
        &self.values
    }

    pub fn into_values(self) -> Vec<V> {
        self.values
    }

    pub fn map<W: FieldValue>(&self, f: impl Fn(V) -> W) -> CellField<W> {
        CellField { grid: self.grid, values: self.values.iter().map(|&v| f(v)).collect() }
    }

    pub fn scaled(&self, s: f64) -> Self {
        self.map(|v| v.scale(s))
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let values = self.values.iter().zip(&other.values).map(|(a, b)| a.add(*b)).collect();
        Ok(Self { grid: self.grid, values })
    }

    /// Discrete L2 norm `(h^2 sum |v|^2)^{1/2}`.
    pub fn l2_norm(&self) -> f64 {
        (self.grid.h * self.grid.h * self.values.iter().map(|v| v.norm().powi(2)).sum::<f64>()).sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.values.iter().map(|v| v.norm()).fold(0.0, f64::max)
    }
}

impl ScalarField {
    pub fn mean(&self) -> f64 {
        self.values.iter().sum::<f64>() / self.values.len() as f64
    }

    /// Subtracts the grid mean.
    pub fn mean_free(&self) -> ScalarField {
        let m = self.mean();
        self.map(|v| v - m)
    }
}

impl TensorField {
    /// `<G, H> = h^2 sum G : H`.
    pub fn inner(&self, other: &TensorField) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        h2 * self.values.iter().zip(&other.values).map(|(a, b)| a.dot(b)).sum::<f64>()
    }
}

impl<V: FieldValue> Field for CellField<V> {
    type Value = V;
    fn grid(&self) -> &Grid {
        &self.grid
    }
    fn at(&self, i: usize, j: usize) -> V {
        self.values[self.grid.cell_index(i, j)]
    }
}

/// Staggered velocity field. Values are stored as the stacked face vector
/// `[u1; u2]` described on [`Grid`].
#[derive(Debug, Clone, PartialEq)]
pub struct VectorField {
    grid: Grid,
    faces: Vec<f64>,
}

impl VectorField {
    pub fn new(grid: Grid, faces: Vec<f64>) -> Result<Self> {
        if faces.len() != grid.face_count() {
            return Err(Error::GridMismatch(format!(
                "expected {} face values, got {}",
                grid.face_count(),
                faces.len()
            )));
        }
        if let Some(k) = faces.iter().position(|v| !v.is_finite()) {
            return Err(Error::Domain(format!("non-finite velocity at face {k}")));
        }
        Ok(Self { grid, faces })
    }

    pub(crate) fn from_vec_unchecked(grid: Grid, faces: Vec<f64>) -> Self {
        debug_assert_eq!(faces.len(), grid.face_count());
        Self { grid, faces }
    }

    pub fn zeros(grid: Grid) -> Self {
        Self { grid, faces: vec![0.0; grid.face_count()] }
    }

    /// Samples each component at its own face positions.
    pub fn from_fn(grid: Grid, f: impl Fn([f64; 2]) -> [f64; 2]) -> Self {
        let faces = (0..grid.face_count())
            .map(|k| {
                let (c, _, _) = grid.face_location(k);
                f(grid.face_position(k))[c]
            })
            .collect();
        Self { grid, faces }
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn faces(&self) -> &[f64] {
        &self.faces
    }

    pub fn into_faces(self) -> Vec<f64> {
        self.faces
    }

    pub fn u1(&self, i: isize, j: isize) -> Option<f64> {
        self.grid.u1_face(i, j).map(|k| self.faces[k])
    }

    pub fn u2(&self, i: isize, j: isize) -> Option<f64> {
        self.grid.u2_face(i, j).map(|k| self.faces[k])
    }

    pub fn scaled(&self, s: f64) -> Self {
        Self { grid: self.grid, faces: self.faces.iter().map(|v| v * s).collect() }
    }

    pub fn add(&self, other: &VectorField) -> Result<Self> {
        self.grid.check_same(&other.grid)?;
        let faces = self.faces.iter().zip(&other.faces).map(|(a, b)| a + b).collect();
        Ok(Self { grid: self.grid, faces })
    }

    pub fn sub(&self, other: &VectorField) -> Result<Self> {
        self.add(&other.scaled(-1.0))
    }

    /// `<u, v> = h^2 sum_faces u v`.
    pub fn inner(&self, other: &VectorField) -> f64 {
        let h2 = self.grid.h * self.grid.h;
        h2 * self.faces.iter().zip(&other.faces).map(|(a, b)| a * b).sum::<f64>()
    }

    pub fn l2_norm(&self) -> f64 {
        self.inner(self).sqrt()
    }

    pub fn max_norm(&self) -> f64 {
        self.faces.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Mean of each component over its faces.
    pub fn component_means(&self) -> [f64; 2] {
        let n1 = self.grid.u1_len();
        let (a, b) = self.faces.split_at(n1);
        [a.iter().sum::<f64>() / a.len() as f64, b.iter().sum::<f64>() / b.len() as f64]
    }

    /// Subtracts a constant vector.
    pub fn shifted(&self, c: [f64; 2]) -> Self {
        let n1 = self.grid.u1_len();
        let faces =
            self.faces.iter().enumerate().map(|(k, v)| v - if k < n1 { c[0] } else { c[1] }).collect();
        Self { grid: self.grid, faces }
    }
}

impl Field for VectorField {
    type Value = [f64; 2];
    fn grid(&self) -> &Grid {
        &self.grid
    }
    /// Face average to the cell center.
    fn at(&self, i: usize, j: usize) -> [f64; 2] {
        let (i, j) = (i as isize, j as isize);
        let u1 = 0.5 * (self.u1(i, j).unwrap_or(0.0) + self.u1(i + 1, j).unwrap_or(0.0));
        let u2 = 0.5 * (self.u2(i, j).unwrap_or(0.0) + self.u2(i, j + 1).unwrap_or(0.0));
        [u1, u2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vector_center_average_is_exact_for_affine() {
        let g = Grid::dirichlet(8, 2.0, [-1.0, -1.0]).unwrap();
        let u = VectorField::from_fn(g, |x| [2.0 * x[0] + x[1], -x[1] + 3.0]);
        for j in 0..8 {
            for i in 0..8 {
                let x = g.cell_center(i, j);
                let v = u.at(i, j);
                assert!((v[0] - (2.0 * x[0] + x[1])).abs() < 1e-14);
                assert!((v[1] - (-x[1] + 3.0)).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_lengths_and_nan() {
        let g = Grid::periodic(8, 1.0).unwrap();
        assert!(ScalarField::new(g, vec![0.0; 63]).is_err());
        let mut v = vec![0.0; 64];
        v[3] = f64::NAN;
        assert!(ScalarField::new(g, v).is_err());
        assert!(VectorField::new(g, vec![0.0; 128]).is_ok());
    }
}
