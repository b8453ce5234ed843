//! Solvers for weighted orientation, flow and capacitated domination
//! problems over tree partitions of bounded breadth.
//!
//! The orientation family (ORO, TOO, CMO, MMO, CO, UFLB, AoNF) is decided by
//! a table-based dynamic program over a tree partition; capacitated red-blue
//! dominating set has its own minimisation program. Both combine child
//! subtrees through small integer programs. Brute-force oracles in
//! [`oracles`] decide every problem directly from its definition.

pub mod acceptance;
pub mod cds_dp;
pub mod corpus;
pub mod error;
pub mod format;
pub mod graph;
pub mod hardness;
pub mod ilp;
pub mod problem;
pub mod oracles;
pub mod oro_dp;
pub mod reductions;
pub mod tree;

pub use error::{Error, Result};
pub use ilp::{IlpModel, IlpOutcome, IlpSolver, Relation};

pub type IlpModel64 = ilp::IlpModel<i64>;
pub type IlpOutcome64 = ilp::IlpOutcome<i64>;
