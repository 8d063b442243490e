use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported Cartan type `{0}` (supported: A1-A4, B2-B4, C2-C4, D4, G2)")]
    UnsupportedType(String),

    #[error("{what}: residual {residual:.3e} exceeds tolerance {tol:.1e}")]
    Relation { what: String, residual: f64, tol: f64 },

    #[error("point {0} is not inside the unit disk")]
    OutsideDisk(num_complex::Complex64),

    #[error("chart map is singular at z = {0}")]
    SingularChart(num_complex::Complex64),

    #[error("mesh error: {0}")]
    Mesh(String),

    #[error("solver did not converge after {iterations} iterations (residual {residual:.3e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("integration failed: {0}")]
    Integration(String),

    #[error("parse error on line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
