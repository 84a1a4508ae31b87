use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("duplicate element label `{0}`")]
    DuplicateLabel(String),
    #[error("order relation contains a cycle through `{0}`")]
    CycleDetected(String),
    #[error("unknown element `{0}`")]
    UnknownElement(String),
    #[error("element `{0}` is not maximal")]
    NotMaximal(String),
    #[error("field characteristic {0} is not prime")]
    NonPrimeField(u64),
    #[error("operands live over different fields or posets")]
    FieldMismatch,
    #[error("representation does not live on the derived poset of this context")]
    ContextMismatch,
    #[error("dimension vector has {got} entries but the poset has {expected} elements")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("malformed input: {0}")]
    Invalid(String),
    #[error("dimension is not of finite type")]
    NotFiniteType,
    #[error("construction over this field needs the brute-force fallback, which requires a finite field")]
    FieldTooRestrictive,
    #[error("enumeration of {needed} candidates exceeds the budget of {budget}")]
    BudgetExceeded { needed: u128, budget: u128 },
    #[error("endomorphism algebra of dimension {dim} could not be split or certified local")]
    UndecidableAtBudget { dim: usize },
}

pub type Result<T> = std::result::Result<T, Error>;
