use super::config::GRecipe;
use crate::field::{Grid, SymMat2, TensorField};

const M: SymMat2 = SymMat2 { a11: 1.0, a12: 0.5, a22: -1.0 };

/// `amplitude * G` for a recipe, singular recipes centered at `x0`.
pub fn recipe_field(recipe: GRecipe, grid: Grid, amplitude: f64, x0: [f64; 2]) -> TensorField {
    TensorField::from_fn(grid, |x| {
        let r = ((x[0] - x0[0]).powi(2) + (x[1] - x0[1]).powi(2)).sqrt();
        let g = match recipe {
            GRecipe::Smooth => SymMat2::new(
                (2.0 * x[0] + x[1]).sin(),
                (x[0] - 2.0 * x[1]).cos(),
                (3.0 * x[1]).sin() * x[0].cos(),
            ),
            GRecipe::Holder => r.sqrt() * M,
            GRecipe::Log => r.ln() * M,
        };
        amplitude * g
    })
}
