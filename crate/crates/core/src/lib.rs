//! Exact tools for affine actions of `Z^p` on the torus `T^q = R^q / Z^q`.
//!
//! An action is given by commuting unimodular matrices together with
//! translation vectors whose entries combine rationals and formal symbols
//! standing for Q-independent reals. The crate decides whether a linear
//! action admits a free affine extension, builds such an extension with a
//! checkable certificate, tests minimality, and cross-checks results against
//! a numeric orbit oracle.

pub mod action;
pub mod cohomology;
pub mod decomposition;
pub mod error;
pub mod liberation;
pub mod linalg;
pub mod minimality;
pub mod oracle;
pub mod symbolic;

pub use action::{AffineZpAction, FixedPointReport, ZpAction};
pub use decomposition::{decompose, fitting_split, Decomposition};
pub use error::{Error, Result, Violation};
pub use liberation::{liberate, LiberationResult};
pub use linalg::{IntMat, IntVec, Lattice, Rat, RatMat};
pub use symbolic::{SymReal, SymVec, SymbolPool};
