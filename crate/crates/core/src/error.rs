use std::path::PathBuf;

/// Errors raised across the crate.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("second derivative is singular at the origin for {0}")]
    SingularAtOrigin(String),

    #[error("no finite type constant K1 <= {cap:e} on the sample lattice (non-Delta2 input?)")]
    IndexEstimation { cap: f64 },

    #[error("ball outside grid")]
    BallOutsideGrid,

    #[error("ball radius {radius} is below the resolution cutoff {cutoff}")]
    BelowResolution { radius: f64, cutoff: f64 },

    #[error("incompatible grids: {0}")]
    GridMismatch(String),

    #[error("Newton iteration did not converge after {iterations} steps (last relative residual {last:e})")]
    NonConvergence { iterations: usize, last: f64, history: Vec<f64> },

    #[error("pressure iteration stagnated (inf-sup failure?) after {iterations} steps, residual {residual:e}")]
    InfSup { iterations: usize, residual: f64 },

    #[error("Picard iteration diverged: {0}")]
    PicardDivergence(String),

    #[error("sparse factorization failed: {0}")]
    LinearSolve(String),

    #[error("insufficient scale separation: only {0} resolvable levels")]
    InsufficientScales(usize),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }
}
