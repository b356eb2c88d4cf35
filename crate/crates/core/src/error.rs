use alloc::string::String;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum Error {
    /// An argument lies outside the range a table or routine supports.
    #[error("{what} = {value} is outside the supported range [{min}, {max}]")]
    Range {
        what: &'static str,
        value: i128,
        min: i128,
        max: i128,
    },
    /// A computation would need more memory or enumeration than allowed.
    #[error("capacity exceeded: {0}")]
    Capacity(String),
    /// Checked integer arithmetic overflowed.
    #[error("integer overflow in {0}")]
    Overflow(&'static str),
    /// The integer is not a fundamental discriminant.
    #[error("{d} is not a fundamental discriminant: {reason}")]
    InvalidDiscriminant { d: i64, reason: &'static str },
    /// A documented precondition of the operation does not hold.
    #[error("precondition violated: {0}")]
    Precondition(String),
    /// A sieve axiom fails for the given prime or divisor.
    #[error("sieve axiom violated at {at}: {reason}")]
    Axiom { at: u64, reason: String },
    /// The sieve removes every residue class modulo `p` (ν(p) = p).
    #[error("degenerate sieve: nu({p}) = {p} removes every residue class")]
    Degenerate { p: u64 },
    /// Malformed input (empty list, zero modulus, duplicate shifts, ...).
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    pub(crate) fn range(what: &'static str, value: impl Into<i128>, min: impl Into<i128>, max: impl Into<i128>) -> Self {
        Error::Range {
            what,
            value: value.into(),
            min: min.into(),
            max: max.into(),
        }
    }
}
