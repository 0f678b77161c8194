// SPDX-License-Identifier: Apache-2.0

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("group parameters must be nonzero (got m={m}, n={n})")]
    ZeroParameter { m: i64, n: i64 },

    #[error("{value} is not a unit modulo {modulus}")]
    NotAUnit { value: String, modulus: String },

    #[error("{0} is not prime")]
    NotPrime(String),

    #[error("prime set must be non-empty")]
    EmptyPrimeSet,

    #[error("cannot factorize zero")]
    FactorizeZero,

    #[error("divisibility precondition violated: {0}")]
    Divisibility(String),

    #[error("syntax error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },

    #[error("invalid quotient: {0}")]
    InvalidQuotient(String),

    #[error("relation violated: {0}")]
    RelationViolated(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("search bounds exhausted: {0}")]
    BoundsExhausted(String),

    #[error("resource limit exceeded: {0}")]
    ResourceLimit(String),
}

pub type Result<T> = std::result::Result<T, Error>;
