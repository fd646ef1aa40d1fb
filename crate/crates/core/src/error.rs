use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("instance error at `{path}`: {msg}")]
    Instance { path: String, msg: String },
    #[error("genericity failure: {0}")]
    Genericity(String),
    #[error("root finder did not converge after {iterations} iterations (residual {residual:e})")]
    RootNonConvergence { iterations: usize, residual: f64 },
    #[error("quadrature subdivision exhausted near parameter {worst:.6} (error estimate {estimate:e})")]
    Quadrature { worst: f64, estimate: f64 },
    #[error("jet tail {tail:e} above tolerance; try a smaller radius or more samples")]
    JetTail { tail: f64 },
    #[error("matrix singular to tolerance (condition estimate {cond:e})")]
    Singular { cond: f64 },
    #[error("root collision during continuation near x = {x}")]
    RootCollision { x: String },
    #[error("{0}")]
    Unsupported(String),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("Newton iteration diverged (residual {residual:e})")]
    NewtonDivergence { residual: f64 },
    #[error("numerical health check failed: {0}")]
    Health(String),
}

pub type Result<T> = std::result::Result<T, Error>;
