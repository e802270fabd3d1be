use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("a chain needs at least two masses, got n = {0}")]
    TooFewMasses(usize),

    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    #[error("matrix rows are ragged: expected {expected} columns, row {row} has {found}")]
    Ragged {
        row: usize,
        expected: usize,
        found: usize,
    },

    #[error("exact integer arithmetic overflowed while computing {0}")]
    Overflow(&'static str),

    #[error("n = {n} exceeds the exact-arithmetic cap of {cap}")]
    ExactCapExceeded { n: usize, cap: usize },

    #[error("matrix is not symmetric (max |a_ij - a_ji| = {0:e})")]
    NotSymmetric(f64),

    #[error(
        "Jacobi iteration did not converge within {sweeps} sweeps (off-diagonal norm {off_norm:e})"
    )]
    NoConvergence { sweeps: usize, off_norm: f64 },

    #[error("tolerance must be positive, got {0}")]
    InvalidTolerance(f64),

    #[error("zero vector has no residual")]
    ZeroVector,

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("time step {dt} violates the stability bound dt * omega_max < {bound} (omega_max = {omega_max})")]
    UnstableTimeStep { dt: f64, omega_max: f64, bound: f64 },
}
