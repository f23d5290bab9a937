use thiserror::Error;

/// Errors raised by the toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    /// The covariance matrix violates the uncertainty principle.
    #[error("state is not physical: min eigenvalue of cov + i*Omega is {min_eigenvalue:e}")]
    Unphysical { min_eigenvalue: f64 },

    #[error("covariance matrix is not symmetric (max asymmetry {0:e})")]
    NotSymmetric(f64),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("unsupported: {0}")]
    Unsupported(String),

    /// Photon-number table does not hold enough probability mass.
    #[error("photon-number truncation: captured mass {mass} < 1 - 1e-6 at n_max = {n_max}")]
    Truncation { mass: f64, n_max: usize },

    #[error("unphysical Mueller matrix: min coherency eigenvalue {0:e}")]
    UnphysicalMueller(f64),

    #[error("probe set is rank deficient (rank {0} < 4)")]
    RankDeficient(usize),

    #[error("value {value} outside calibrated range [{min}, {max}]")]
    OutOfRange { value: f64, min: f64, max: f64 },

    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, Error>;
