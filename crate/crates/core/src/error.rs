use thiserror::Error;

/// Errors raised by the numerical routines.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("eigensolver did not converge after {iterations} iterations (dim {dim})")]
    NoConvergence { dim: usize, iterations: usize },

    #[error("optimizer did not converge: {message} (best bound {best_bound:.6e})")]
    OptimizerNoConvergence { message: String, best_bound: f64 },

    #[error("function undefined at eigenvalue {eigenvalue:e}")]
    Domain { eigenvalue: f64 },

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("dimension {dim} exceeds the configured cap {cap}")]
    SizeCap { dim: usize, cap: usize },

    #[error("not a state: {0}")]
    NotAState(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("alpha {alpha} outside the admissible window ({lower}, {upper})")]
    Window { alpha: f64, lower: f64, upper: f64 },

    #[error("contract violated: {0}")]
    Contract(String),

    #[error("supp(rho_B) is not contained in supp(sigma_B); no finite lambda exists")]
    SupportViolation,

    #[error("not an isometry: max deviation of V^dag V from identity is {0:e}")]
    NotIsometry(f64),

    #[error("not trace preserving: max deviation of sum K^dag K from identity is {0:e}")]
    NotTracePreserving(f64),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
