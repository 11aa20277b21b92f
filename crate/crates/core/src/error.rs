use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("the 2D model has no vertical quanta (ω_z is infinite)")]
    NoVerticalMotion,

    #[error("odd vertical parity: nz + nz' = {0} (element vanishes)")]
    OddParity(u32),

    #[error("index out of range: {0}")]
    OutOfRange(String),

    #[error("coefficients are not normalized (Σ|a|² = {0})")]
    NotNormalized(f64),

    #[error("empty degenerate subspace for M = {m}, sign {sign}")]
    EmptySubspace { m: i32, sign: char },

    #[error("truncation too small: {0}")]
    Truncation(String),

    #[error("outside first-order regime: discriminant {0} < 0")]
    NegativeDiscriminant(f64),

    #[error("ground-state scan reached m_max = {0}; increase --m-max")]
    MMaxReached(i32),

    #[error("wl = 0 makes Ω/ω_L singular")]
    ZeroField,

    #[error("eigensolver did not converge after {0} sweeps")]
    NoConvergence(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Numerical diagnostics as opposed to bad input.
    pub fn is_numerical(&self) -> bool {
        matches!(
            self,
            Error::NegativeDiscriminant(_)
                | Error::MMaxReached(_)
                | Error::NoConvergence(_)
                | Error::Truncation(_)
                | Error::NotNormalized(_)
        )
    }
}
