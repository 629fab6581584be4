use thiserror::Error;

/// Errors raised by the library. Every variant maps to a stable name used by
/// the command-line front end.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("parse error at byte {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("the zero polynomial has no height")]
    ZeroPolynomial,
    #[error("variable x{0} does not occur with positive degree")]
    VariableAbsent(usize),
    #[error("work of {needed} evaluations exceeds the cap of {cap}")]
    CapExceeded { needed: u128, cap: u128 },
    #[error("polynomial vanishes identically modulo {0}")]
    IdenticallyZeroModP(u64),
    #[error("polynomial is not homogeneous")]
    NotHomogeneous,
    #[error("all polynomials are zero")]
    AllZero,
    #[error("quadratic form is not indefinite")]
    NotIndefinite,
    #[error("no smooth integral zero with sup-norm at most {0}")]
    SearchExhausted(u64),
    #[error("{0} is a perfect square")]
    PerfectSquare(i64),
    #[error("modulus has a prime factor {0} that is not good for the form")]
    NotGoodModulus(u64),
    #[error("form has rank {rank}, need at least {needed}")]
    RankTooSmall { rank: usize, needed: usize },
    #[error("generator is not primitive modulo {0}")]
    NotPrimitiveModQ(u64),
    #[error("lattice dimension {0} exceeds the exact-enumeration limit")]
    DimensionTooLarge(usize),
    #[error("prime {p} has the wrong splitting type for d = {d}")]
    BadSplitType { d: i64, p: u64 },
    #[error("target residue is not a zero of the form modulo {0}")]
    BadTarget(u64),
    #[error("exponent {0} is outside the window (1/2, 3/4]")]
    BadExponent(f64),
}

impl Error {
    /// Variant name, printed by the CLI on domain errors.
    pub fn name(&self) -> &'static str {
        match self {
            Error::Parse { .. } => "Parse",
            Error::InvalidArgument(_) => "InvalidArgument",
            Error::ZeroPolynomial => "ZeroPolynomial",
            Error::VariableAbsent(_) => "VariableAbsent",
            Error::CapExceeded { .. } => "CapExceeded",
            Error::IdenticallyZeroModP(_) => "IdenticallyZeroModP",
            Error::NotHomogeneous => "NotHomogeneous",
            Error::AllZero => "AllZero",
            Error::NotIndefinite => "NotIndefinite",
            Error::SearchExhausted(_) => "SearchExhausted",
            Error::PerfectSquare(_) => "PerfectSquare",
            Error::NotGoodModulus(_) => "NotGoodModulus",
            Error::RankTooSmall { .. } => "RankTooSmall",
            Error::NotPrimitiveModQ(_) => "NotPrimitiveModQ",
            Error::DimensionTooLarge(_) => "DimensionTooLarge",
            Error::BadSplitType { .. } => "BadSplitType",
            Error::BadTarget(_) => "BadTarget",
            Error::BadExponent(_) => "BadExponent",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn check_cap(needed: u128, cap: u128) -> Result<()> {
    if needed > cap {
        Err(Error::CapExceeded { needed, cap })
    } else {
        Ok(())
    }
}
