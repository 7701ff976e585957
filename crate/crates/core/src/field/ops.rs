use super::{Field, Grid, ScalarField, SymMat2, TensorField, VectorField};

const MAX_TERMS: usize = 16;

/// A linear functional of the stacked face vector, as `(face, weight)` terms.
#[derive(Debug, Clone, Copy)]
pub struct Stencil {
    len: usize,
    terms: [(usize, f64); MAX_TERMS],
}

impl Default for Stencil {
    fn default() -> Self {
        Self { len: 0, terms: [(0, 0.0); MAX_TERMS] }
    }
}

impl Stencil {
    fn push(&mut self, face: usize, w: f64) {
        if let Some(t) = self.terms[..self.len].iter_mut().find(|t| t.0 == face) {
            t.1 += w;
            return;
        }
        self.terms[self.len] = (face, w);
        self.len += 1;
    }

    fn add_scaled(&mut self, other: &Stencil, s: f64) {
        for &(f, w) in other.terms() {
            self.push(f, s * w);
        }
    }

    pub fn terms(&self) -> &[(usize, f64)] {
        &self.terms[..self.len]
    }

    pub fn apply(&self, faces: &[f64]) -> f64 {
        self.terms().iter().map(|&(f, w)| w * faces[f]).sum()
    }
}

/// Stencils of the three independent strain entries `(D11, D12, D22)`.
#[derive(Debug, Clone, Copy, Default)]
pub struct StrainStencil {
    pub d11: Stencil,
    pub d12: Stencil,
    pub d22: Stencil,
}

impl StrainStencil {
    pub fn apply(&self, faces: &[f64]) -> SymMat2 {
        SymMat2::new(self.d11.apply(faces), self.d12.apply(faces), self.d22.apply(faces))
    }

    /// The entries with their Frobenius weights (1, 2, 1).
    pub fn weighted(&self) -> [(&Stencil, f64); 3] {
        [(&self.d11, 1.0), (&self.d12, 2.0), (&self.d22, 1.0)]
    }
}

fn clamp(v: isize, lo: isize, hi: isize) -> isize {
    v.max(lo).min(hi)
}

/// `d u1 / d x2` at the grid vertex `(a, b)`. On Dirichlet grids vertices
/// without both neighbours fall back to the nearest available one.
fn du1_dx2(g: &Grid, a: isize, b: isize) -> Stencil {
    let b = if g.is_periodic() { b } else { clamp(b, 1, g.n as isize - 1) };
    let mut s = Stencil::default();
    s.push(g.u1_face(a, b).expect("vertex in range"), 1.0 / g.h);
    s.push(g.u1_face(a, b - 1).expect("vertex in range"), -1.0 / g.h);
    s
}

fn du2_dx1(g: &Grid, a: isize, b: isize) -> Stencil {
    let a = if g.is_periodic() { a } else { clamp(a, 1, g.n as isize - 1) };
    let mut s = Stencil::default();
    s.push(g.u2_face(a, b).expect("vertex in range"), 1.0 / g.h);
    s.push(g.u2_face(a - 1, b).expect("vertex in range"), -1.0 / g.h);
    s
}

fn cell_d11(g: &Grid, i: isize, j: isize) -> Stencil {
    let mut s = Stencil::default();
    s.push(g.u1_face(i + 1, j).expect("cell in range"), 1.0 / g.h);
    s.push(g.u1_face(i, j).expect("cell in range"), -1.0 / g.h);
    s
}

fn cell_d22(g: &Grid, i: isize, j: isize) -> Stencil {
    let mut s = Stencil::default();
    s.push(g.u2_face(i, j + 1).expect("cell in range"), 1.0 / g.h);
    s.push(g.u2_face(i, j).expect("cell in range"), -1.0 / g.h);
    s
}

/// Off-diagonal gradient entries at cell `(i, j)`, averaged from its 4 vertices.
fn cell_cross(g: &Grid, i: usize, j: usize) -> (Stencil, Stencil) {
    let (i, j) = (i as isize, j as isize);
    let mut d12 = Stencil::default();
    let mut d21 = Stencil::default();
    for (a, b) in [(i, j), (i + 1, j), (i, j + 1), (i + 1, j + 1)] {
        d12.add_scaled(&du1_dx2(g, a, b), 0.25);
        d21.add_scaled(&du2_dx1(g, a, b), 0.25);
    }
    (d12, d21)
}

/// Strain stencil at the center of cell `(i, j)`.
pub fn cell_strain_stencil(g: &Grid, i: usize, j: usize) -> StrainStencil {
    let (d12, d21) = cell_cross(g, i, j);
    let mut sym = Stencil::default();
    sym.add_scaled(&d12, 0.5);
    sym.add_scaled(&d21, 0.5);
    StrainStencil {
        d11: cell_d11(g, i as isize, j as isize),
        d12: sym,
        d22: cell_d22(g, i as isize, j as isize),
    }
}

/// Stencil of the antisymmetric entry `W12` at the center of cell `(i, j)`.
pub fn cell_skew_stencil(g: &Grid, i: usize, j: usize) -> Stencil {
    let (d12, d21) = cell_cross(g, i, j);
    let mut s = Stencil::default();
    s.add_scaled(&d12, 0.5);
    s.add_scaled(&d21, -0.5);
    s
}

/// Strain stencil at grid vertex `(a, b)`: `D12` is taken directly at the
/// vertex, the diagonal entries are averaged from the four adjacent cells.
/// `None` when the vertex lies on a Dirichlet boundary.
pub fn vertex_strain_stencil(g: &Grid, a: usize, b: usize) -> Option<StrainStencil> {
    let (a, b) = (a as isize, b as isize);
    if !g.is_periodic() {
        let n = g.n as isize;
        if a < 1 || b < 1 || a > n - 1 || b > n - 1 {
            return None;
        }
    }
    let mut d12 = Stencil::default();
    d12.add_scaled(&du1_dx2(g, a, b), 0.5);
    d12.add_scaled(&du2_dx1(g, a, b), 0.5);
    let mut d11 = Stencil::default();
    let mut d22 = Stencil::default();
    for (i, j) in [(a - 1, b - 1), (a, b - 1), (a - 1, b), (a, b)] {
        d11.add_scaled(&cell_d11(g, i, j), 0.25);
        d22.add_scaled(&cell_d22(g, i, j), 0.25);
    }
    Some(StrainStencil { d11, d12, d22 })
}

/// Divergence stencil of cell `(i, j)`.
pub fn cell_divergence_stencil(g: &Grid, i: usize, j: usize) -> Stencil {
    let mut s = cell_d11(g, i as isize, j as isize);
    s.add_scaled(&cell_d22(g, i as isize, j as isize), 1.0);
    s
}

pub fn sym_gradient(u: &VectorField) -> TensorField {
    let g = *u.grid();
    let mut out = Vec::with_capacity(g.cell_count());
    for j in 0..g.n {
        for i in 0..g.n {
            out.push(cell_strain_stencil(&g, i, j).apply(u.faces()));
        }
    }
    TensorField::from_vec_unchecked(g, out)
}

/// The `(1,2)` entry of `(grad u - grad u^T) / 2`.
pub fn skew_gradient(u: &VectorField) -> ScalarField {
    let g = *u.grid();
    let mut out = Vec::with_capacity(g.cell_count());
    for j in 0..g.n {
        for i in 0..g.n {
            out.push(cell_skew_stencil(&g, i, j).apply(u.faces()));
        }
    }
    ScalarField::from_vec_unchecked(g, out)
}

pub fn divergence_vec(u: &VectorField) -> ScalarField {
    let g = *u.grid();
    let mut out = Vec::with_capacity(g.cell_count());
    for j in 0..g.n {
        for i in 0..g.n {
            out.push(cell_divergence_stencil(&g, i, j).apply(u.faces()));
        }
    }
    ScalarField::from_vec_unchecked(g, out)
}

/// Minus the adjoint of [`sym_gradient`]: `<div G, v> = -<G, D v>` for every
/// face field `v`, with `<.,.>` the `h^2`-weighted sums over cells and faces.
pub fn divergence_tensor(gt: &TensorField) -> VectorField {
    let g = *gt.grid();
    let mut faces = vec![0.0; g.face_count()];
    for j in 0..g.n {
        for i in 0..g.n {
            let q = gt.at(i, j);
            let st = cell_strain_stencil(&g, i, j);
            for ((s, w), v) in st.weighted().into_iter().zip([q.a11, q.a12, q.a22]) {
                for &(f, c) in s.terms() {
                    faces[f] -= w * c * v;
                }
            }
        }
    }
    VectorField::from_vec_unchecked(g, faces)
}

/// Gradient of a cell-centered scalar onto the faces, minus the adjoint of
/// [`divergence_vec`]. Boundary faces of a Dirichlet grid get one-sided values.
pub fn scalar_gradient(p: &ScalarField) -> VectorField {
    let g = *p.grid();
    let mut faces = vec![0.0; g.face_count()];
    for j in 0..g.n {
        for i in 0..g.n {
            let v = p.at(i, j);
            for &(f, c) in cell_divergence_stencil(&g, i, j).terms() {
                faces[f] -= c * v;
            }
        }
    }
    VectorField::from_vec_unchecked(g, faces)
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use std::f64::consts::PI;

    fn periodic(n: usize) -> Grid {
        Grid::periodic(n, 2.0 * PI).unwrap()
    }

    fn interior(g: &Grid) -> impl Iterator<Item = (usize, usize)> + '_ {
        (1..g.n - 1).flat_map(move |j| (1..g.n - 1).map(move |i| (i, j)))
    }

    #[test]
    fn rigid_rotation_is_strain_free() {
        let g = Grid::dirichlet(16, 2.0, [-1.0, -1.0]).unwrap();
        let u = VectorField::from_fn(g, |x| [x[1], -x[0]]);
        let d = sym_gradient(&u);
        let w = skew_gradient(&u);
        let div = divergence_vec(&u);
        for (i, j) in interior(&g) {
            assert!(d.at(i, j).norm() < 1e-13);
            assert!((w.at(i, j) - 1.0).abs() < 1e-13);
            assert!(div.at(i, j).abs() < 1e-13);
        }
    }

    #[test]
    fn pure_strain() {
        let g = Grid::dirichlet(16, 2.0, [-1.0, -1.0]).unwrap();
        let u = VectorField::from_fn(g, |x| [x[0], -x[1]]);
        let d = sym_gradient(&u);
        for j in 0..g.n {
            for i in 0..g.n {
                assert!((d.at(i, j) - SymMat2::diag(1.0, -1.0)).norm() < 1e-13);
            }
        }
    }

    #[test]
    fn shear_on_periodic_grid_is_second_order() {
        let mut errs = Vec::new();
        for n in [32, 64] {
            let g = periodic(n);
            let u = VectorField::from_fn(g, |x| [x[1].sin(), 0.0]);
            let d = sym_gradient(&u);
            let e = (0..g.cell_count())
                .map(|k| {
                    let (i, j) = (k % n, k / n);
                    let x = g.cell_center(i, j);
                    (d.at(i, j).a12 - 0.5 * x[1].cos()).abs()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        assert!(errs[0] < 5e-3);
        let ratio = errs[0] / errs[1];
        assert!((ratio - 4.0).abs() < 0.8, "ratio {ratio}");
    }

    #[test]
    fn gradient_flow_has_small_skew_part() {
        // psi = sin x1 sin x2: the staggered differences commute exactly here.
        let g = periodic(32);
        let u = VectorField::from_fn(g, |x| [x[0].cos() * x[1].sin(), x[0].sin() * x[1].cos()]);
        assert!(skew_gradient(&u).max_norm() < 1e-12);
        assert!(skew_gradient(&VectorField::from_fn(g, |_| [2.0, -1.0])).max_norm() < 1e-14);

        // psi = sin x1 sin 2 x2 leaves an O(h^2) residue.
        let mut errs = Vec::new();
        for n in [32, 64] {
            let g = periodic(n);
            let u = VectorField::from_fn(g, |x| {
                [x[0].cos() * (2.0 * x[1]).sin(), 2.0 * x[0].sin() * (2.0 * x[1]).cos()]
            });
            errs.push(skew_gradient(&u).max_norm());
        }
        assert!(errs[0] < 1e-2);
        let r = errs[0] / errs[1];
        assert!((r - 4.0).abs() < 0.8, "ratio {r}");
    }

    #[test]
    fn divergence_of_tensors() {
        let g = Grid::dirichlet(16, 1.0, [0.0, 0.0]).unwrap();
        let c = TensorField::constant(g, SymMat2::new(1.0, 2.0, 3.0));
        let u = TensorField::from_fn(g, |x| SymMat2::diag(x[0], 0.0));
        let dc = divergence_tensor(&c);
        let du = divergence_tensor(&u);
        let n = g.n as isize;
        // Away from the extrapolated boundary ring.
        for j in 2..n - 2 {
            for i in 2..n - 1 {
                assert!(dc.u1(i, j).unwrap().abs() < 1e-12);
                assert!((du.u1(i, j).unwrap() - 1.0).abs() < 1e-12);
            }
        }
        for j in 2..n - 1 {
            for i in 2..n - 2 {
                assert!(dc.u2(i, j).unwrap().abs() < 1e-12);
                assert!(du.u2(i, j).unwrap().abs() < 1e-12);
            }
        }
    }

    #[test]
    fn refinement_factor_four() {
        let mut errs = Vec::new();
        for n in [16, 32, 64] {
            let g = periodic(n);
            let u = VectorField::from_fn(g, |x| [x[1].sin(), x[0].sin()]);
            let d = sym_gradient(&u);
            let e = (0..g.cell_count())
                .map(|k| {
                    let (i, j) = (k % n, k / n);
                    let x = g.cell_center(i, j);
                    (d.at(i, j) - SymMat2::new(0.0, 0.5 * (x[1].cos() + x[0].cos()), 0.0)).norm()
                })
                .fold(0.0, f64::max);
            errs.push(e);
        }
        for w in errs.windows(2) {
            let r = w[0] / w[1];
            assert!((r - 4.0).abs() <= 0.8, "ratio {r}");
        }
    }

    fn smooth_pair(c: &[f64; 8], g: Grid) -> (TensorField, VectorField) {
        let gt = TensorField::from_fn(g, |x| {
            SymMat2::new(
                c[0] * (x[0] + c[1]).sin(),
                c[2] * (2.0 * x[1] + c[3]).cos() * x[0].sin(),
                c[4] * (x[0] - x[1]).cos(),
            )
        });
        let v = VectorField::from_fn(g, |x| {
            [c[5] * (x[1] + c[6]).sin(), c[7] * (x[0] + 2.0 * x[1]).cos()]
        });
        (gt, v)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(100))]
        #[test]
        fn summation_by_parts(c in proptest::array::uniform8(-3.0f64..3.0), n in 8usize..40) {
            let g = periodic(n);
            let (gt, v) = smooth_pair(&c, g);
            let dv = sym_gradient(&v);
            let lhs = divergence_tensor(&gt).inner(&v);
            let rhs = gt.inner(&dv);
            let scale = gt.l2_norm() * dv.l2_norm();
            prop_assert!((lhs + rhs).abs() <= 1e-12 * scale.max(1e-300));
        }

        #[test]
        fn summation_by_parts_dirichlet(c in proptest::array::uniform8(-3.0f64..3.0)) {
            let g = Grid::dirichlet(12, 2.0, [-1.0, 0.5]).unwrap();
            let (gt, v) = smooth_pair(&c, g);
            let dv = sym_gradient(&v);
            let lhs = divergence_tensor(&gt).inner(&v);
            prop_assert!((lhs + gt.inner(&dv)).abs() <= 1e-12 * gt.l2_norm() * dv.l2_norm() + 1e-300);
        }

        #[test]
        fn pressure_gradient_is_adjoint(c in proptest::array::uniform8(-3.0f64..3.0)) {
            let g = periodic(16);
            let (_, v) = smooth_pair(&c, g);
            let p = ScalarField::from_fn(g, |x| c[0] * x[0].sin() + c[1] * (x[1] * 2.0).cos());
            let h2 = g.h * g.h;
            let lhs = scalar_gradient(&p).inner(&v);
            let div = divergence_vec(&v);
            let rhs = h2 * p.values().iter().zip(div.values()).map(|(a, b)| a * b).sum::<f64>();
            prop_assert!((lhs + rhs).abs() <= 1e-12 * (1.0 + lhs.abs()));
        }
    }
}
