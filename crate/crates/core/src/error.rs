use thiserror::Error;

use crate::padic::Valuation;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("{0} is not an odd prime")]
    InvalidPrime(u32),
    #[error("prime mismatch: {0} vs {1}")]
    PrimeMismatch(u32, u32),
    #[error("operands live in different fields (p={p}, levels {left} and {right})")]
    ContextMismatch { p: u32, left: u32, right: u32 },
    #[error("division by zero")]
    DivisionByZero,
    #[error("{a} is divisible by {p}")]
    NotCoprime { a: i64, p: u32 },
    #[error("logarithm needs a principal unit (v_p(u - 1) >= 1)")]
    NotPrincipalUnit,
    #[error("precision exhausted: v_pi(z - 1) = {achieved}, need > {threshold}")]
    PrecisionExhausted { achieved: i64, threshold: i64 },
    #[error("element is not in the subfield (residual {residual})")]
    NotInSubfield { residual: Valuation },
    #[error("norm-coherence residual {residual} above working precision")]
    NotCoherent { residual: Valuation },
    #[error("trivial character has no Gauss sum / L-value here")]
    TrivialCharacter,
    #[error("odd character: the log sum vanishes identically")]
    OddCharacter,
    #[error("character has a nontrivial wild part")]
    WildCharacter,
    #[error("depth mismatch: {0}")]
    Depth(String),
    #[error("singular matrix at working precision")]
    Singular,
    #[error(
        "some Fourier value of the unit distribution vanishes at precision (psi exponent {0})"
    )]
    VanishingDual(u64),
    #[error("invalid argument: {0}")]
    Invalid(String),
    #[error("parse error: {0}")]
    Parse(String),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
