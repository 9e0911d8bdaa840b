//! Certificates of dimension built from the degeneration arguments, and
//! their independent checker.
//!
//! [`Prover`] dispatches each system to a rule (see [`plan`]), proves the
//! subgoals the rule names, and memoizes everything by canonical text.
//! Leaves are table rows, closed forms, or rank computations over `F_p`
//! whose prime, seed and trial count are recorded so [`verify`] can repeat
//! them.

pub mod certificate;
pub mod explain;
pub mod rules;
pub mod search;
pub mod verify;

pub use certificate::{
    Assertion, Certificate, Child, Claim, NodeRef, OracleStamp, Param, Params, ProofNode, Rule,
    SideCondition,
};
pub use explain::explain;
pub use search::{leaf_seed, plan, Prover, ProverConfig, Step};
pub use verify::{verify, Verdict};

use crate::error::Result;

/// Proves `L_{r,d}(2^n)` with a fresh prover.
pub fn prove(r: u32, d: u32, n: u64, cfg: &ProverConfig) -> Result<Certificate> {
    Prover::new(cfg.clone()).prove(r, d, n)
}
