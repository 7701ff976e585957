//! Uniform planar grids, staggered fields and the discrete operators on them.

mod ball;
mod fields;
mod grid;
mod io;
mod ops;
mod symmat;

pub use ball::{ball_mean, restrict, Ball, Restricted};
pub use fields::{CellField, Field, FieldValue, ScalarField, TensorField, VectorField};
pub use grid::{Boundary, Grid};
pub use io::{
    read_scalar_csv, read_tensor_csv, read_vector_csv, write_scalar_csv, write_tensor_csv,
    write_vector_csv,
};
pub use ops::{
    cell_divergence_stencil, cell_skew_stencil, cell_strain_stencil, divergence_tensor,
    divergence_vec, scalar_gradient, skew_gradient, sym_gradient, vertex_strain_stencil, Stencil,
    StrainStencil,
};
pub use symmat::{Mat2, SymMat2};
