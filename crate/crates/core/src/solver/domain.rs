//! Which faces are unknown, which cells carry a divergence constraint and
//! which quadrature points enter the discrete energy.

use crate::field::{
    cell_divergence_stencil, cell_strain_stencil, vertex_strain_stencil, Ball, Grid, StrainStencil,
};
use crate::{Error, Result};

pub(crate) const MAX_LOCAL: usize = 12;
const SQRT2: f64 = std::f64::consts::SQRT_2;

/// A quadrature point of the energy with its strain stencil restricted to the
/// free dofs, in orthonormal coordinates `(D11, sqrt2 D12, D22)`.
#[derive(Debug, Clone)]
pub(crate) struct QuadPoint {
    pub weight: f64,
    /// Cell index for cell-center points, `None` for vertices.
    pub cell: Option<usize>,
    pub len: usize,
    pub dofs: [u32; MAX_LOCAL],
    pub coef: [[f64; MAX_LOCAL]; 3],
    /// The full face stencil, used to add the contribution of fixed faces.
    pub stencil: StrainStencil,
}

impl QuadPoint {
    fn new(weight: f64, cell: Option<usize>, stencil: StrainStencil, free: &[Option<u32>]) -> Self {
        let mut q = QuadPoint {
            weight,
            cell,
            len: 0,
            dofs: [0; MAX_LOCAL],
            coef: [[0.0; MAX_LOCAL]; 3],
            stencil,
        };
        let comps = [(&stencil.d11, 1.0), (&stencil.d12, SQRT2), (&stencil.d22, 1.0)];
        for (row, (s, scale)) in comps.into_iter().enumerate() {
            for &(face, c) in s.terms() {
                if let Some(d) = free[face] {
                    let k = match q.dofs[..q.len].iter().position(|&x| x == d) {
                        Some(k) => k,
                        None => {
                            assert!(q.len < MAX_LOCAL, "strain stencil wider than expected");
                            q.dofs[q.len] = d;
                            q.len += 1;
                            q.len - 1
                        }
                    };
                    q.coef[row][k] += scale * c;
                }
            }
        }
        q
    }

    /// Orthonormal strain coordinates for free values `u` and full faces `full`.
    pub fn strain(&self, fixed: &[f64; 3], u: &[f64]) -> [f64; 3] {
        let mut y = *fixed;
        for k in 0..self.len {
            let v = u[self.dofs[k] as usize];
            y[0] += self.coef[0][k] * v;
            y[1] += self.coef[1][k] * v;
            y[2] += self.coef[2][k] * v;
        }
        y
    }
}

/// One divergence constraint: `sum coef * u[dof] + fixed = div` on a cell.
#[derive(Debug, Clone)]
pub(crate) struct Constraint {
    pub cell: usize,
    pub len: usize,
    pub dofs: [u32; 4],
    pub coef: [f64; 4],
}

/// Discrete computational domain on a grid.
#[derive(Debug, Clone)]
pub struct Domain {
    pub(crate) grid: Grid,
    /// Active cells (pressure / divergence constraint).
    pub(crate) active: Vec<bool>,
    /// Face -> free dof index.
    pub(crate) free: Vec<Option<u32>>,
    /// Free dof -> face.
    pub(crate) dofs: Vec<usize>,
    pub(crate) quad: Vec<QuadPoint>,
    pub(crate) constraints: Vec<Constraint>,
    /// Translation modes pinned on a fully periodic domain.
    pub(crate) pinned: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Quadrature {
    /// Cell centers and vertices, weight 1/2 each.
    Mixed,
    /// Cell centers only.
    Centers,
}

impl Domain {
    /// The whole grid: every cell on a periodic grid (with the two translation
    /// modes pinned), all but the boundary ring of cells on a Dirichlet grid.
    pub fn full(grid: Grid) -> Result<Domain> {
        let n = grid.n;
        let active = (0..grid.cell_count())
            .map(|k| grid.is_periodic() || {
                let (i, j) = (k % n, k / n);
                i > 0 && j > 0 && i < n - 1 && j < n - 1
            })
            .collect();
        Domain::from_mask(grid, active, Quadrature::Mixed)
    }

    /// The cells whose centers lie in `ball`; faces outside are fixed data.
    pub fn ball(grid: Grid, ball: &Ball) -> Result<Domain> {
        let mut active = vec![false; grid.cell_count()];
        let n = grid.n;
        for (i, j) in ball.cells(&grid)? {
            let ring = !grid.is_periodic() && (i == 0 || j == 0 || i == n - 1 || j == n - 1);
            if !ring {
                active[grid.cell_index(i, j)] = true;
            }
        }
        let dom = Domain::from_mask(grid, active, Quadrature::Mixed)?;
        if dom.dofs.is_empty() {
            return Err(Error::BallOutsideGrid);
        }
        Ok(dom)
    }

    pub(crate) fn from_mask(grid: Grid, active: Vec<bool>, quadrature: Quadrature) -> Result<Domain> {
        let n = grid.n as isize;
        let is_active = |i: isize, j: isize| grid.cell(i, j).is_some_and(|c| active[c]);
        let all = active.iter().all(|&a| a);
        let pinned = grid.is_periodic() && all;
        let mut free = vec![None; grid.face_count()];
        let mut dofs = Vec::new();
        for face in 0..grid.face_count() {
            let (comp, i, j) = grid.face_location(face);
            let (i, j) = (i as isize, j as isize);
            let inner = if comp == 0 {
                is_active(i - 1, j) && is_active(i, j) && (grid.is_periodic() || (i > 0 && i < n))
            } else {
                is_active(i, j - 1) && is_active(i, j) && (grid.is_periodic() || (j > 0 && j < n))
            };
            let pin = pinned && (face == 0 || face == grid.u1_len());
            if inner && !pin {
                free[face] = Some(dofs.len() as u32);
                dofs.push(face);
            }
        }

        let touches = |s: &StrainStencil| {
            [&s.d11, &s.d12, &s.d22].iter().any(|st| st.terms().iter().any(|&(f, _)| free[f].is_some()))
        };
        let ring = |i: usize, j: usize| {
            !grid.is_periodic() && (i == 0 || j == 0 || i + 1 == grid.n || j + 1 == grid.n)
        };
        let (wc, wv) = match quadrature {
            Quadrature::Mixed => (0.5, 0.5),
            Quadrature::Centers => (1.0, 0.0),
        };
        let mut quad = Vec::new();
        for j in 0..grid.n {
            for i in 0..grid.n {
                if ring(i, j) {
                    continue;
                }
                let s = cell_strain_stencil(&grid, i, j);
                if touches(&s) {
                    quad.push(QuadPoint::new(wc, Some(grid.cell_index(i, j)), s, &free));
                }
            }
        }
        if wv > 0.0 {
            for b in 0..grid.n {
                for a in 0..grid.n {
                    if let Some(s) = vertex_strain_stencil(&grid, a, b) {
                        if touches(&s) {
                            quad.push(QuadPoint::new(wv, None, s, &free));
                        }
                    }
                }
            }
        }

        let mut constraints = Vec::new();
        for j in 0..grid.n {
            for i in 0..grid.n {
                let c = grid.cell_index(i, j);
                if !active[c] {
                    continue;
                }
                let s = cell_divergence_stencil(&grid, i, j);
                let mut con = Constraint { cell: c, len: 0, dofs: [0; 4], coef: [0.0; 4] };
                for &(f, w) in s.terms() {
                    if let Some(d) = free[f] {
                        con.dofs[con.len] = d;
                        con.coef[con.len] = w;
                        con.len += 1;
                    }
                }
                constraints.push(con);
            }
        }
        Ok(Domain { grid, active, free, dofs, quad, constraints, pinned })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn free_count(&self) -> usize {
        self.dofs.len()
    }

    pub fn pressure_count(&self) -> usize {
        self.constraints.len()
    }

    pub fn active(&self) -> &[bool] {
        &self.active
    }

    /// Strain at each quadrature point contributed by the fixed faces alone.
    pub(crate) fn fixed_strains(&self, full: &[f64]) -> Vec<[f64; 3]> {
        self.quad
            .iter()
            .map(|q| {
                let mut y = [0.0; 3];
                let comps = [(&q.stencil.d11, 1.0), (&q.stencil.d12, SQRT2), (&q.stencil.d22, 1.0)];
                for (row, (s, scale)) in comps.into_iter().enumerate() {
                    for &(f, c) in s.terms() {
                        if self.free[f].is_none() {
                            y[row] += scale * c * full[f];
                        }
                    }
                }
                y
            })
            .collect()
    }

    /// Divergence of the fixed faces on each constrained cell.
    pub(crate) fn fixed_divergence(&self, full: &[f64]) -> Vec<f64> {
        self.constraints
            .iter()
            .map(|con| {
                let (i, j) = (con.cell % self.grid.n, con.cell / self.grid.n);
                cell_divergence_stencil(&self.grid, i, j)
                    .terms()
                    .iter()
                    .filter(|(f, _)| self.free[*f].is_none())
                    .map(|&(f, c)| c * full[f])
                    .sum()
            })
            .collect()
    }

    /// Free values gathered from a full face vector.
    pub(crate) fn gather(&self, full: &[f64]) -> Vec<f64> {
        self.dofs.iter().map(|&f| full[f]).collect()
    }

    /// Full face vector with free values scattered over `base`.
    pub(crate) fn scatter(&self, base: &[f64], u: &[f64]) -> Vec<f64> {
        let mut full = base.to_vec();
        for (d, &f) in self.dofs.iter().enumerate() {
            full[f] = u[d];
        }
        full
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn periodic_domain_pins_two_faces() {
        let g = Grid::periodic(8, 1.0).unwrap();
        let d = Domain::full(g).unwrap();
        assert_eq!(d.free_count(), g.face_count() - 2);
        assert_eq!(d.pressure_count(), 64);
        assert_eq!(d.quad.len(), 128);
        assert!(d.quad.iter().all(|q| q.len <= MAX_LOCAL));
    }

    #[test]
    fn dirichlet_domain_excludes_ring() {
        let g = Grid::dirichlet(8, 1.0, [0.0, 0.0]).unwrap();
        let d = Domain::full(g).unwrap();
        assert_eq!(d.pressure_count(), 36);
        // u1 faces strictly between two interior cells: i in 2..=6, j in 1..=6
        assert_eq!(d.free_count(), 2 * 5 * 6);
    }

    #[test]
    fn ball_domain() {
        let g = Grid::periodic(32, 1.0).unwrap();
        let d = Domain::ball(g, &Ball::new([0.5, 0.5], 0.2).unwrap()).unwrap();
        assert!(!d.pinned);
        assert!(d.free_count() > 0);
        let active = d.active.iter().filter(|&&a| a).count();
        assert_eq!(active, d.pressure_count());
    }
}
