use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("pole: {0}")]
    Pole(String),

    #[error("argument outside the domain: {0}")]
    Domain(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("power base {0} touches the branch cut (-inf, 0]")]
    BranchCut(String),

    #[error("series did not converge: {0}")]
    Convergence(String),

    #[error("quadrature did not stabilise after {nodes} nodes (last change {change:e})")]
    Quadrature { nodes: usize, change: f64 },

    #[error("matrix is numerically singular (condition estimate {condition:e})")]
    SingularMatrix { condition: f64 },

    #[error("Pfaffian needs an even order, got {0}")]
    OddOrder(usize),

    #[error("matrix is not antisymmetric (max |a_ij + a_ji| = {deviation:e})")]
    Asymmetry { deviation: f64 },

    #[error("tail estimate {estimate:e} exceeds tolerance {tol:e}")]
    Tail { estimate: f64, tol: f64 },
}

pub type Result<T> = std::result::Result<T, Error>;
