use thiserror::Error;

/// Errors shared across the crate.
#[derive(Debug, Error)]
pub enum Error {
    #[error("lattice basis must have positive determinant, got {det}")]
    DegenerateLattice { det: f64 },

    #[error("grid dimensions must be even and at least 4, got {n:?}")]
    InvalidGrid { n: [usize; 3] },

    #[error("grid mismatch: {left:?} vs {right:?}")]
    GridMismatch { left: [usize; 3], right: [usize; 3] },

    #[error("conformal factor is not positive on the grid (min sample {min})")]
    NonPositiveFactor { min: f64 },

    #[error(
        "conformal factor wavevector {m:?} exceeds the bandlimit for grid {n:?} \
         (each |m_i| must stay below n_i/4)"
    )]
    BandlimitExceeded { m: [i32; 3], n: [usize; 3] },

    #[error("quaternion is not unit (norm² deviates by {defect:e})")]
    NonUnitQuaternion { defect: f64 },

    #[error("requested momentum is zero; no nonzero-eigenvalue plane wave exists there")]
    ZeroMomentum,

    #[error("input spinor field is identically zero")]
    ZeroField,

    #[error("operator has no conformal factor but a conformal operation was requested")]
    MissingConformalFactor,

    #[error("matrix dimension {dim} exceeds the dense-solve cap {cap}")]
    DenseTooLarge { dim: usize, cap: usize },

    #[error("requested {count} eigenpairs but the operator dimension is {dim}")]
    CountTooLarge { count: usize, dim: usize },

    #[error(
        "eigensolver did not reach residual {tol:e} within {iterations} iterations \
         (worst achieved residual {achieved:e})"
    )]
    NotConverged {
        tol: f64,
        iterations: usize,
        achieved: f64,
    },

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
}

pub type Result<T> = std::result::Result<T, Error>;
