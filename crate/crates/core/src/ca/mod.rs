//! Boolean one-dimensional cellular automata: rules, region words,
//! boundary controls and controlled evolution.

mod dynamics;
mod rule;
mod word;

pub(crate) use dynamics::step_controlled_bits;
pub use dynamics::{evolve_controlled, step_controlled, Trajectory, TrajectoryRow};
pub(crate) use word::mask;
pub use rule::{EventualPeriod, Nilpotency, Rule};
pub use word::{ControlPair, RegionWord, MAX_WORD_LEN};
