//! Petford–Welsh randomized graph coloring.
//!
//! The crate bundles
//! * [`graph`] and [`graphgen`]: planted `G(n, k, p)` and `R(n, k, d)`
//!   instances and an edge-list text format,
//! * [`kernel`]: colorings, bad-edge energy and the `b^(-S_i)` recoloring
//!   distribution,
//! * [`solvers`]: the sequential, naive parallel and two-phase parallel
//!   algorithms,
//! * [`oracle`]: exact colorability and minimum energy for small graphs,
//! * [`harness`]: seeded sweeps over instance grids with critical-region
//!   metrics.

pub mod graph;
pub mod graphgen;
pub mod harness;
pub mod kernel;
pub mod oracle;
pub mod seed;
pub mod solvers;

pub use graph::{Graph, GraphError};
pub use kernel::{Coloring, ConflictState};
pub use solvers::{Algorithm, RunResult, SolverParams};
