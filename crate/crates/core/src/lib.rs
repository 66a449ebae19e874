//! Discretized and Gaussian belief propagation on shift-invariant factor
//! graphs, with cumulant diagnostics for how Gaussian the beliefs become.

// negated float comparisons are how NaN inputs get rejected
#![allow(clippy::neg_cmp_op_on_partial_ord)]

pub mod bp;
pub mod dist;
pub mod gbp;
pub mod graph;
pub mod theory;

pub use dist::{CumulantSummary, DiscreteDist, DistError, Grid, Kernel};
pub use graph::{FactorGraph, FactorKind, GraphError, KernelSpec, PriorSpec, VarId};
