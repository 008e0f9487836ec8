use alloc::string::String;

/// Every failure the core can report.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    #[error("invalid ring specification: {0}")]
    InvalidSpec(String),
    #[error("precision {0} is below the minimum of 2")]
    PrecisionTooSmall(u32),
    #[error("operation needs the quadratic extension E, not E0")]
    NotQuadratic,
    #[error("element is not a unit at working precision")]
    NotUnit,
    #[error("matrix is singular at working precision")]
    Singular,
    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),
    #[error("dimension mismatch: {0}")]
    Shape(String),
    #[error("gram matrix is not hermitian")]
    NotHermitian,
    #[error("pair is not regular semisimple")]
    NotRegularSemisimple,
    #[error("pair is not adjoint-stable: coefficient {index} has valuation {valuation}")]
    NotAdjointStable { index: usize, valuation: i64 },
    #[error("lattice inclusion fails")]
    NotIncluded,
    #[error("enumeration cap exceeded: quotient has {required} elements, cap is {cap}")]
    CapExceeded { required: u128, cap: u128 },
    #[error("saturation of the x-span did not stabilise")]
    SaturationFailed,
    #[error("characteristic polynomial does not split into coprime factors mod pi")]
    NoSplitting,
    #[error("splitting is not stable under the adjoint involution")]
    NotStarStable,
    #[error("no norm-one residue avoids the characteristic polynomial (q + 1 <= n)")]
    NoAdmissibleResidue,
    #[error("J(j,j) is a unit; use the direct path instead of the extension")]
    UnitNorm,
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("inexact division by a power of the uniformizer")]
    InexactDivision,
    #[error("element is not in the image of the Verschiebung")]
    NotInImageOfV,
    #[error("verification failed: {0}")]
    Verification(String),
    #[error("instance profile unsatisfiable after {0} attempts")]
    Unsatisfiable(u32),
}

pub type Result<T> = core::result::Result<T, Error>;
