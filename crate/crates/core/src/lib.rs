//! Modeling and exhaustive analysis of network codes with per-link error
//! resistance and index codes with side-information errors, over small
//! finite fields.
//!
//! The crate is organized around two instance kinds and the conversions
//! between them:
//!
//! - [`model::NetworkInstance`]: a DAG with source messages, terminal
//!   demands, and per-edge/per-terminal error-resistance budgets.
//! - [`model::IndexInstance`]: a side-information graph with per-receiver
//!   error-resistance budgets.
//! - [`equiv`]: instance and code conversions in both directions, with a
//!   deterministic rewrite engine for index instances that are not yet
//!   network-shaped.
//! - [`icsie`] / [`ncle`]: validity checking, confusion sets, cycle
//!   search, optimal codelength, redundancy and independence analysis.
//!
//! Everything is exhaustive and deterministic: no randomness, no
//! heuristics, explicit enumeration limits.

pub mod code;
pub mod equiv;
pub mod field;
pub mod fixtures;
pub mod format;
pub mod icsie;
pub mod model;
pub mod ncle;

use thiserror::Error;

/// Crate-wide error type.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not a prime power")]
    NotPrimePower(u64),
    #[error("field size {0} exceeds the supported maximum of 256")]
    TooLarge(u64),
    #[error("enumeration cost {cost} exceeds limit {limit}")]
    LimitExceeded { cost: u128, limit: u64 },
    #[error("arity mismatch: function takes {expected} inputs, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("graph is not acyclic (cycle through node `{0}`)")]
    NotDag(String),
    #[error("decoder ambiguous at codeword {codeword:?} with side information {side:?}")]
    Ambiguous { codeword: Vec<u8>, side: Vec<u8> },
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("receiver `{receiver}`: {requested} deletions exceed the allowed {allowed}")]
    TooManyDeletions {
        receiver: String,
        requested: usize,
        allowed: usize,
    },
    #[error("invalid instance: {0}")]
    InvalidInstance(String),
    #[error("invalid network code: {0}")]
    InvalidNetworkCode(String),
    #[error("index code has length {got}, expected {expected}")]
    WrongLength { expected: usize, got: usize },
    #[error("invalid index code: {0}")]
    InvalidIndexCode(String),
    #[error("message completion is not unique for source assignment {x_s:?}")]
    NonUniqueExtension { x_s: Vec<u8> },
    #[error("encoder of duplicated link `{dup}` is not a function of the encoder of `{orig}`")]
    DependenceViolated { dup: String, orig: String },
    #[error("rewrite iteration cap exceeded; this is a bug in the rewrite engine")]
    IterationCapExceeded,
    #[error("unknown identifier `{0}`")]
    UnknownId(String),
    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;

/// Resource limits for exhaustive operations.
///
/// `enumeration` bounds the number of vectors, subsets, or table rows an
/// operation may visit. Operations that would exceed it fail with
/// [`Error::LimitExceeded`] instead of running away.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct Limits {
    pub enumeration: u64,
}

impl Default for Limits {
    fn default() -> Self {
        Self {
            enumeration: 1 << 20,
        }
    }
}

impl Limits {
    pub fn new(enumeration: u64) -> Self {
        Self { enumeration }
    }

    /// Checks a computed cost against the limit.
    pub fn check(&self, cost: u128) -> Result<()> {
        if cost > self.enumeration as u128 {
            return Err(Error::LimitExceeded {
                cost,
                limit: self.enumeration,
            });
        }
        Ok(())
    }
}

pub use code::{IndexCode, LocalFunction, MultiFunction, NetworkCode};
pub use field::{FieldSpec, Symbol, SymbolVector};
pub use model::{IndexInstance, NetworkInstance, Partition, Receiver, Verdict};
