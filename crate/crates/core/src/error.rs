use thiserror::Error;

/// Errors produced by the library.
///
/// Resource limits are always reported as errors; no operation ever
/// downgrades an exhausted budget into a guessed answer.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("{a} and {m} are not coprime")]
    NotCoprime { a: String, m: String },

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("could not factor {n} within {budget} rho iterations")]
    FactorizationLimit { n: String, budget: u64 },

    #[error("{what}: needs {needed}, budget is {budget}")]
    ResourceLimit {
        what: &'static str,
        needed: String,
        budget: u64,
    },

    #[error("level {level} needs {pairs} difference pairs (limit {limit})")]
    LevelTooLarge { level: u32, pairs: u128, limit: u128 },

    #[error("arithmetic overflow in {0}")]
    Overflow(&'static str),

    #[error("internal inconsistency: {0}")]
    Internal(String),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub(crate) fn not_coprime(a: impl ToString, m: impl ToString) -> Self {
        Error::NotCoprime {
            a: a.to_string(),
            m: m.to_string(),
        }
    }

    pub fn is_resource_limit(&self) -> bool {
        matches!(
            self,
            Error::ResourceLimit { .. } | Error::FactorizationLimit { .. }
        )
    }
}
