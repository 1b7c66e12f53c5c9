use alloc::string::String;
use core::fmt;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub enum Error {
    /// An argument is outside the operation's domain.
    Parameter(String),
    /// A cursor operation does not match the cursor's current membership.
    State(String),
    /// An exhaustive computation would exceed its explicit budget.
    BudgetExceeded { required: u128, budget: u128 },
}

impl Error {
    pub(crate) fn param(msg: impl Into<String>) -> Self {
        Error::Parameter(msg.into())
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::Parameter(msg) => write!(f, "invalid parameter: {msg}"),
            Error::State(msg) => write!(f, "invalid cursor state: {msg}"),
            Error::BudgetExceeded { required, budget } => write!(
                f,
                "enumeration of {required} subsets exceeds the budget of {budget}"
            ),
        }
    }
}

impl core::error::Error for Error {}
