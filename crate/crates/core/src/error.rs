use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    InvalidPrime(u64),
    #[error("invalid ring spec: {0}")]
    InvalidRing(String),
    #[error("element is not a unit")]
    NonUnit,
    #[error("cannot raise precision from {have} to {want}")]
    PrecisionRaise { have: u32, want: u32 },
    #[error("group order {0} exceeds the cap of 128")]
    OrderCap(usize),
    #[error("group order {order} is not a power of {p}")]
    NonPPower { order: usize, p: u64 },
    #[error("invalid group spec: {0}")]
    InvalidGroup(String),
    #[error("element is not central")]
    NotCentral,
    #[error("element does not have order p")]
    WrongOrder,
    #[error("group is abelian")]
    AbelianInput,
    #[error("subgroup does not have index p")]
    WrongIndex,
    #[error("operands live over different groups")]
    GroupMismatch,
    #[error("operands live over different rings")]
    RingMismatch,
    #[error("homomorphism source does not match")]
    HomMismatch,
    #[error("lattices have different ambient modules")]
    AmbientMismatch,
    #[error("matrix is not invertible")]
    NotInvertible,
    #[error("input precision {have} cannot support output precision {want}")]
    PrecisionStarved { have: u32, want: u32 },
    #[error("element is not congruent to 1 modulo the radical")]
    NotOneUnit,
    #[error("exponential needs valuation at least 2")]
    ValuationTooSmall,
    #[error("group logarithm left a denominator p^{0}")]
    IntegralityViolation(u32),
    #[error("target is not in the required lattice")]
    TargetNotInLattice,
    #[error("iteration budget exceeded in {0}")]
    NoConvergence(&'static str),
    #[error("central element is a commutator")]
    IsCommutator,
    #[error("character search found degrees summing to {found} instead of {order}")]
    IncompleteSearch { found: usize, order: usize },
    #[error("Adams operation did not decompose integrally")]
    NonIntegerDecomposition,
    #[error("determinant is not Galois invariant")]
    NotInvariant,
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("{0}")]
    Config(String),
}

impl Error {
    /// Errors that the mathematics rules out; seeing one means a bug.
    pub fn is_internal(&self) -> bool {
        matches!(
            self,
            Error::IntegralityViolation(_)
                | Error::NoConvergence(_)
                | Error::IncompleteSearch { .. }
                | Error::NonIntegerDecomposition
        )
    }
}

pub type Result<T> = std::result::Result<T, Error>;
