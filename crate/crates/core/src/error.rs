use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension error: {0}")]
    Dimension(String),

    #[error("matrix is not Hermitian (max entrywise asymmetry {max_asym:.3e})")]
    NotHermitian { max_asym: f64 },

    #[error("degenerate ensemble: d_out * env = 1 leaves a single deterministic operation")]
    DegenerateEnsemble,

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("infeasible linear program: {0}")]
    Infeasible(String),
}
