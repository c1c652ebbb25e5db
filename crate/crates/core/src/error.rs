use thiserror::Error;

/// Errors raised by the numerical kernel, the channel and power models and the solvers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch in {op}: {detail}")]
    Dimension { op: &'static str, detail: String },

    #[error("matrix is not Hermitian (relative asymmetry {asymmetry:.3e})")]
    NotHermitian { asymmetry: f64 },

    #[error("matrix is not positive semidefinite (smallest eigenvalue {min_eigenvalue:.3e})")]
    NotPsd { min_eigenvalue: f64 },

    #[error("matrix is not positive definite (factorization failed at pivot {pivot})")]
    NotPositiveDefinite { pivot: usize },

    #[error("matrix is rank deficient or ill-conditioned (sigma_min/sigma_max = {ratio:.3e})")]
    IllConditioned { ratio: f64 },

    #[error("non-finite entry encountered")]
    NonFinite,

    #[error("geometry error: {0}")]
    Geometry(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("degenerate channel: {0}")]
    DegenerateChannel(String),

    #[error(
        "transmit surface has more elements ({m_t}) than the receive surface ({m_r}); \
         the inter-surface channel has no left inverse. Swap the roles of the surfaces or reduce M_T"
    )]
    NoLeftInverse { m_t: usize, m_r: usize },

    #[error("power model error: {0}")]
    Model(String),

    #[error("infeasible problem: {0}")]
    Infeasible(String),

    #[error("rank-one recovery failed (lambda_2/lambda_1 = {ratio:.3e})")]
    RankViolation { ratio: f64 },

    #[error("solver did not converge: {0}")]
    NotConverged(String),
}

pub type Result<T> = std::result::Result<T, Error>;
