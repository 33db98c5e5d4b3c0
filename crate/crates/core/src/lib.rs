//! Submodular cost submodular cover and knapsack solvers.
//!
//! The cover problem minimizes a submodular cost `f(X)` subject to a
//! submodular coverage constraint `g(X) ≥ c`; the knapsack problem
//! maximizes `g(X)` subject to `f(X) ≤ b`.

// `!(v > 0.0)` is the NaN-rejecting form used for every input check
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bounds;
pub mod brute;
pub mod error;
pub mod instance;
pub mod json;
pub mod oracle;
pub mod props;
pub mod report;
pub mod solvers;
pub mod subset;
pub mod transforms;

pub use error::{Error, Result};
pub use instance::{generate, GenKind, GenParams, InstanceSpec, ProblemInstance};
pub use oracle::{CatalogEntry, FunctionOracle, Matrix, ModularFn, SetFunction};
pub use report::{Bound, GuaranteeCert, SolveReport};
pub use subset::{GroundSet, Subset};

/// Absolute tolerance for every feasibility and improvement comparison.
pub const TOL: f64 = 1e-9;
