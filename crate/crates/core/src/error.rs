use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// A constructor parameter is outside the family's admissible range.
    #[error("parameter out of range: {0}")]
    Domain(String),

    /// The image of the Bloch ball leaves the ball.
    #[error("channel is not positive: image reaches Bloch radius {radius:.12}")]
    NotPositive { radius: f64 },

    #[error("channel is not completely positive: Choi matrix has eigenvalue {min_eigenvalue:.3e}")]
    NotCompletelyPositive { min_eigenvalue: f64 },

    #[error("invalid ensemble: {0}")]
    InvalidEnsemble(String),

    #[error("no sign change of C_V - C_H on [{lo}, {hi}] (values {g_lo:.3e}, {g_hi:.3e})")]
    NoSignChange {
        lo: f64,
        hi: f64,
        g_lo: f64,
        g_hi: f64,
    },

    #[error("equidistance condition has no root in p for any polar angle")]
    NoTripleSolution,
}

pub type Result<T> = std::result::Result<T, Error>;
