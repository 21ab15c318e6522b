//! Linear and mixed-integer programming engine.
//!
//! [`solve_lp`] runs a bounded-variable primal simplex and reports constraint
//! duals; [`solve_mip`] runs best-first branch-and-bound with depth-first
//! plunging on top of it. [`write_mps`] dumps a model in free MPS form.

mod factor;
mod mip;
mod model;
mod mps;
mod simplex;

pub use mip::{solve_mip, solve_mip_with_start, MipConfig, MipSolution, MipStatus};
pub use model::{ConId, Constraint, LinearModel, Sense, VarId, Variable};
pub use mps::write_mps;
pub use simplex::{solve_lp, solve_lp_with, Basis, LpSolution, LpStatus, SimplexOptions};

#[derive(Debug, thiserror::Error, PartialEq)]
pub enum LpError {
    #[error("non-finite data in {0}")]
    NonFinite(String),
    #[error("variable {0} has lower bound above upper bound")]
    EmptyBounds(usize),
    #[error("row {row} references undeclared variable {var}")]
    UnknownVariable { row: usize, var: usize },
}
