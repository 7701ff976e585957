//! Sparse factorizations and the saddle-point solves of each Newton step.

use faer::col::ColMut;
use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMat, SparseColMatRef, SymbolicSparseColMat, Triplet};
use faer::{Par, Side};

use super::domain::Domain;
use crate::{Error, Result};

/// Lower-triangular sparsity pattern of `H + gamma B^T B` with the value
/// positions of every local contribution, and its symbolic Cholesky.
pub(crate) struct Pattern {
    n: usize,
    symbolic: SymbolicSparseColMat<usize>,
    llt: SymbolicLlt<usize>,
    /// Per quadrature point, positions of the `(a, b)` local pairs with
    /// `dof[a] >= dof[b]`, in row-major local order.
    pub quad_pos: Vec<Vec<u32>>,
    pub con_pos: Vec<Vec<u32>>,
}

fn local_pairs(dofs: &[u32]) -> impl Iterator<Item = (usize, usize)> + '_ {
    (0..dofs.len())
        .flat_map(move |a| (0..dofs.len()).map(move |b| (a, b)))
        .filter(move |&(a, b)| dofs[a] >= dofs[b])
}

impl Pattern {
    pub fn new(dom: &Domain) -> Result<Pattern> {
        faer::set_global_parallelism(Par::Seq);
        let n = dom.free_count();
        let mut cols: Vec<Vec<usize>> = vec![Vec::new(); n];
        let mut add = |dofs: &[u32]| {
            for (a, b) in local_pairs(dofs) {
                cols[dofs[b] as usize].push(dofs[a] as usize);
            }
        };
        for q in &dom.quad {
            add(&q.dofs[..q.len]);
        }
        for c in &dom.constraints {
            add(&c.dofs[..c.len]);
        }
        let mut col_ptr = Vec::with_capacity(n + 1);
        let mut row_idx = Vec::new();
        col_ptr.push(0);
        for (j, c) in cols.iter_mut().enumerate() {
            c.push(j);
            c.sort_unstable();
            c.dedup();
            row_idx.extend_from_slice(c);
            col_ptr.push(row_idx.len());
        }
        drop(cols);
        let pos = |row: usize, col: usize| -> u32 {
            let (s, e) = (col_ptr[col], col_ptr[col + 1]);
            (s + row_idx[s..e].binary_search(&row).expect("entry in pattern")) as u32
        };
        let positions = |dofs: &[u32]| -> Vec<u32> {
            local_pairs(dofs).map(|(a, b)| pos(dofs[a] as usize, dofs[b] as usize)).collect()
        };
        let quad_pos = dom.quad.iter().map(|q| positions(&q.dofs[..q.len])).collect();
        let con_pos = dom.constraints.iter().map(|c| positions(&c.dofs[..c.len])).collect();
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let llt = SymbolicLlt::try_new(symbolic.as_ref(), Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("symbolic factorization: {e:?}")))?;
        Ok(Pattern { n, symbolic, llt, quad_pos, con_pos })
    }

    pub fn nnz(&self) -> usize {
        self.symbolic.row_idx().len()
    }

    /// `(row, col, value)` for the stored lower triangle.
    pub fn triplets(&self, values: &[f64]) -> Vec<(usize, usize, f64)> {
        let cp = self.symbolic.col_ptr();
        let ri = self.symbolic.row_idx();
        let mut out = Vec::with_capacity(values.len());
        for j in 0..self.n {
            for k in cp[j]..cp[j + 1] {
                out.push((ri[k], j, values[k]));
            }
        }
        out
    }

    pub fn factor(&self, values: &[f64]) -> Result<Factor> {
        let mat = SparseColMatRef::new(self.symbolic.as_ref(), values);
        let llt = Llt::try_new_with_symbolic(self.llt.clone(), mat, Side::Lower)
            .map_err(|e| Error::LinearSolve(format!("Cholesky failed: {e:?}")))?;
        Ok(Factor { llt, n: self.n })
    }
}

pub(crate) struct Factor {
    llt: Llt<usize, f64>,
    n: usize,
}

impl Factor {
    pub fn solve_in_place(&self, x: &mut [f64]) {
        debug_assert_eq!(x.len(), self.n);
        self.llt.solve_in_place(ColMut::from_slice_mut(x));
    }
}

/// Divergence operator on the free dofs.
pub(crate) fn apply_b(dom: &Domain, u: &[f64]) -> Vec<f64> {
    dom.constraints
        .iter()
        .map(|c| (0..c.len).map(|k| c.coef[k] * u[c.dofs[k] as usize]).sum())
        .collect()
}

pub(crate) fn apply_bt(dom: &Domain, p: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; dom.free_count()];
    for (c, &pv) in dom.constraints.iter().zip(p) {
        for k in 0..c.len {
            out[c.dofs[k] as usize] += c.coef[k] * pv;
        }
    }
    out
}

pub(crate) fn project_mean_free(v: &mut [f64]) {
    if v.is_empty() {
        return;
    }
    let m = v.iter().sum::<f64>() / v.len() as f64;
    v.iter_mut().for_each(|x| *x -= m);
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Outcome of one saddle-point solve.
pub(crate) struct SaddleSolution {
    pub du: Vec<f64>,
    pub dpi: Vec<f64>,
    pub cg_iterations: usize,
}

/// Solves `[H, -B^T; B, 0] [du; dpi] = [f; g]` given the factor of
/// `M = H + gamma B^T B`, by preconditioned CG on the pressure Schur
/// complement of the augmented system (Uzawa with conjugate-gradient
/// acceleration). `precond` is the per-cell inverse Schur diagonal estimate.
pub(crate) fn solve_saddle(
    dom: &Domain,
    m: &Factor,
    gamma: f64,
    f: &[f64],
    g: &[f64],
    precond: &[f64],
    tol: f64,
) -> Result<SaddleSolution> {
    // With q = -dpi: [M, B^T; B, 0][du; q] = [f + gamma B^T g; g].
    let mut w = apply_bt(dom, g);
    w.iter_mut().zip(f).for_each(|(wi, fi)| *wi = fi + gamma * *wi);
    let mut minv_w = w.clone();
    m.solve_in_place(&mut minv_w);
    let schur = |q: &[f64]| -> Vec<f64> {
        let mut t = apply_bt(dom, q);
        m.solve_in_place(&mut t);
        let mut s = apply_b(dom, &t);
        project_mean_free(&mut s);
        s
    };
    let mut rhs = apply_b(dom, &minv_w);
    rhs.iter_mut().zip(g).for_each(|(r, gi)| *r -= gi);
    project_mean_free(&mut rhs);

    let np = dom.pressure_count();
    let mut q = vec![0.0; np];
    let rhs_norm = dot(&rhs, &rhs).sqrt();
    let mut iterations = 0;
    if rhs_norm > 0.0 {
        let mut r = rhs.clone();
        let precondition = |r: &[f64]| -> Vec<f64> {
            let mut z: Vec<f64> = r.iter().zip(precond).map(|(a, b)| a * b).collect();
            project_mean_free(&mut z);
            z
        };
        let mut z = precondition(&r);
        let mut d = z.clone();
        let mut rz = dot(&r, &z);
        let max_iter = 50 + 2 * np.min(2000);
        let mut best = f64::INFINITY;
        let mut stalled = 0;
        loop {
            let rn = dot(&r, &r).sqrt();
            if rn <= tol * rhs_norm {
                break;
            }
            if iterations >= max_iter || stalled > 50 {
                if rn <= 1e-6 * rhs_norm {
                    break;
                }
                return Err(Error::InfSup { iterations, residual: rn / rhs_norm });
            }
            if rn < 0.999 * best {
                best = rn;
                stalled = 0;
            } else {
                stalled += 1;
            }
            let sd = schur(&d);
            let dsd = dot(&d, &sd);
            if !(dsd > 0.0) {
                if rn <= 1e-6 * rhs_norm {
                    break;
                }
                return Err(Error::InfSup { iterations, residual: rn / rhs_norm });
            }
            let alpha = rz / dsd;
            q.iter_mut().zip(&d).for_each(|(qi, di)| *qi += alpha * di);
            r.iter_mut().zip(&sd).for_each(|(ri, si)| *ri -= alpha * si);
            z = precondition(&r);
            let rz_new = dot(&r, &z);
            let beta = rz_new / rz;
            rz = rz_new;
            d.iter_mut().zip(&z).for_each(|(di, zi)| *di = zi + beta * *di);
            iterations += 1;
        }
    }
    let bq = apply_bt(dom, &q);
    let mut du: Vec<f64> = w.iter().zip(&bq).map(|(a, b)| a - b).collect();
    m.solve_in_place(&mut du);
    let dpi = q.iter().map(|x| -x).collect();
    Ok(SaddleSolution { du, dpi, cg_iterations: iterations })
}

/// Direct LU solve of the bordered KKT system
/// `[H, -B^T, 0; B, 0, 1; 0, 1^T, 0] [u; pi; lambda] = [f; g; 0]`
/// with `H` given as lower-triangle triplets.
pub(crate) fn solve_kkt_direct(
    dom: &Domain,
    h_lower: &[(usize, usize, f64)],
    f: &[f64],
    g: &[f64],
) -> Result<(Vec<f64>, Vec<f64>)> {
    faer::set_global_parallelism(Par::Seq);
    let nu = dom.free_count();
    let np = dom.pressure_count();
    let n = nu + np + 1;
    let mut trip = Vec::with_capacity(2 * h_lower.len() + 8 * np + 2 * np);
    for &(r, c, v) in h_lower {
        trip.push(Triplet::new(r, c, v));
        if r != c {
            trip.push(Triplet::new(c, r, v));
        }
    }
    for (k, con) in dom.constraints.iter().enumerate() {
        for a in 0..con.len {
            let d = con.dofs[a] as usize;
            trip.push(Triplet::new(nu + k, d, con.coef[a]));
            trip.push(Triplet::new(d, nu + k, -con.coef[a]));
        }
        trip.push(Triplet::new(nu + k, n - 1, 1.0));
        trip.push(Triplet::new(n - 1, nu + k, 1.0));
    }
    let mat = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &trip)
        .map_err(|e| Error::LinearSolve(format!("KKT assembly: {e:?}")))?;
    let lu = mat.sp_lu().map_err(|e| Error::LinearSolve(format!("KKT LU: {e:?}")))?;
    let mut rhs = Vec::with_capacity(n);
    rhs.extend_from_slice(f);
    rhs.extend_from_slice(g);
    rhs.push(0.0);
    let mut x = rhs;
    lu.solve_in_place(ColMut::from_slice_mut(&mut x));
    Ok((x[..nu].to_vec(), x[nu..nu + np].to_vec()))
}
