use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// A single reason an action description is rejected.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    Dimension { detail: String },
    NotUnimodular { generator: usize },
    NonCommuting { i: usize, j: usize },
    Incompatible { i: usize, j: usize },
    UnknownSymbol { name: String },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::Dimension { detail } => write!(f, "dimension mismatch: {detail}"),
            Violation::NotUnimodular { generator } => {
                write!(f, "generator {generator} is not unimodular")
            }
            Violation::NonCommuting { i, j } => write!(f, "generators {i} and {j} do not commute"),
            Violation::Incompatible { i, j } => {
                write!(f, "translations {i} and {j} violate the compatibility relation")
            }
            Violation::UnknownSymbol { name } => write!(f, "symbol {name:?} is not in the pool"),
        }
    }
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),
    #[error("matrix is not unimodular: {0}")]
    NotUnimodular(String),
    #[error("lattice is not saturated")]
    NotSaturated,
    #[error("unknown symbol {0:?}")]
    UnknownSymbol(String),
    #[error("product of two symbolic quantities")]
    SymbolProduct,
    #[error("the common fixed sublattice is trivial")]
    FixTrivial,
    #[error("action is not unipotent")]
    NotUnipotent,
    #[error("inconsistent system: {0}")]
    Inconsistent(String),
    #[error("cocycle defect for generators ({i}, {j}) is not an integer vector")]
    NonIntegerDefect { i: usize, j: usize },
    #[error("precondition failed: {0}")]
    Precondition(String),
    #[error("no value supplied for symbol {0:?}")]
    MissingSymbol(String),
    #[error("state space of size {size} exceeds the cap {cap}")]
    StateSpaceExceeded { size: u128, cap: u128 },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("invalid action: {}", join(.0))]
    Validation(Vec<Violation>),
}

fn join(v: &[Violation]) -> String {
    v.iter().map(ToString::to_string).collect::<Vec<_>>().join("; ")
}
