//! Workbench for cross-trees, incompatibility maps and Gamma-space
//! approximations.

pub mod approx;
pub mod ccsolve;
pub mod cli;
pub mod crosstree;
pub mod error;
pub mod gammaspace;
pub mod gen;
pub mod incmaps;
pub mod json;
pub mod sufficiency;
pub mod words;

pub use crosstree::{CrossTree, ForbiddenSet, Violation, ViolationKind};
pub use error::{Error, Result};
pub use words::{Alphabets, Node, RightTuple, Word};
