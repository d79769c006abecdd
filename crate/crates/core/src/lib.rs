//! Decision procedures for boundary controllability of one-dimensional
//! Boolean cellular automata.
//!
//! The central object is the transition graph `G_n(F)` of a rule `F` on a
//! region of `n` cells whose `r` boundary cells on each side are freely
//! controlled. The crate builds it, checks strong connectivity, period and
//! primitivity, synthesizes control sequences, computes exact trace block
//! languages and their finite-type approximations, and runs bounded checks
//! for blocking words.

pub mod bitset;
pub mod blocking;
pub mod ca;
pub mod digraph;
mod error;
pub mod graph;
mod limits;
pub mod trace;

pub use ca::{
    evolve_controlled, step_controlled, ControlPair, EventualPeriod, Nilpotency, RegionWord, Rule,
    Trajectory, TrajectoryRow,
};
pub use error::{Error, Result};
pub use graph::{ControlPlan, PrimitivityResult, TransitionGraph};
pub use limits::Limits;
