//! LP-relaxation based matheuristic for tri-objective binary programs.
//!
//! The pipeline computes the extreme supported points of the LP relaxation
//! ([`lbset`]), rounds their solutions down to feasible integer vectors and
//! improves them by path relinking ([`heuristic`]). [`metrics`] scores the
//! result against an exact front obtained by enumeration.

pub mod error;
pub mod harness;
pub mod heuristic;
pub mod io;
pub mod lbset;
pub mod lp;
pub mod metrics;
pub mod model;

pub use error::{Error, Result};
pub use heuristic::{run, PrConfig, RunOutput, RunStats, Variant};
pub use lbset::{compute_lb_set, LbPoint, LbSet};
pub use metrics::ReferenceFront;
pub use model::{Point, Problem, ProblemKind, Solution};
