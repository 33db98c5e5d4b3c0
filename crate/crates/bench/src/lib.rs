//! Benchmark harness for the `subcons` solvers: instance generation,
//! algorithm sweeps, brute-force verification and result reports.

pub mod algos;
pub mod report;
pub mod results;
pub mod run;
pub mod verify;

pub use algos::{Algo, Problem, SolverParams};
pub use results::{Format, ResultRow};
pub use run::{solve, RunConfig, Sweep};
pub use verify::{verify, VerifyOptions, VerifyReport};
