use serde::{Deserialize, Serialize};

use super::rule::Rule;
use super::word::{ControlPair, RegionWord};
use crate::error::{input, Result};

/// One row of a controlled run: the region word and the control applied to it.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct TrajectoryRow {
    pub word: RegionWord,
    pub control: Option<ControlPair>,
}

/// Finite-window space-time diagram of a controlled run.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Trajectory {
    pub rule: String,
    pub region_len: usize,
    pub rows: Vec<TrajectoryRow>,
}

impl Trajectory {
    pub fn horizon(&self) -> usize {
        self.rows.len() - 1
    }

    pub fn last(&self) -> RegionWord {
        self.rows.last().expect("trajectory has a first row").word
    }

    pub fn words(&self) -> impl Iterator<Item = RegionWord> + '_ {
        self.rows.iter().map(|r| r.word)
    }
}

fn check_control(rule: &Rule, ctrl: &ControlPair) -> Result<()> {
    if ctrl.radius() != rule.radius() {
        return input(format!(
            "control {ctrl} has width {} but {} has radius {}",
            ctrl.radius(),
            rule.name(),
            rule.radius()
        ));
    }
    Ok(())
}

/// Packed controlled step: `bits` is a region of `n` cells, `control` a
/// control index. The padded row is `left . w . right`.
#[inline]
pub(crate) fn step_controlled_bits(rule: &Rule, bits: u64, n: usize, control: u64) -> u64 {
    let r = rule.radius();
    let left = control >> r;
    let right = control & ((1 << r) - 1);
    let padded = (left << (n + r)) | (bits << r) | right;
    rule.step_bits(padded, n + 2 * r)
}

/// Applies the rule to `left . w . right`, keeping the `n` cells of the region.
pub fn step_controlled(rule: &Rule, w: &RegionWord, ctrl: &ControlPair) -> Result<RegionWord> {
    check_control(rule, ctrl)?;
    if w.is_empty() {
        return input("controlled region must have at least one cell");
    }
    let next = step_controlled_bits(rule, w.bits(), w.len(), ctrl.index());
    Ok(RegionWord::from_raw(w.len(), next))
}

pub fn evolve_controlled(rule: &Rule, w0: &RegionWord, controls: &[ControlPair]) -> Result<Trajectory> {
    let mut rows = Vec::with_capacity(controls.len() + 1);
    let mut current = *w0;
    for ctrl in controls {
        let next = step_controlled(rule, &current, ctrl)?;
        rows.push(TrajectoryRow {
            word: current,
            control: Some(*ctrl),
        });
        current = next;
    }
    rows.push(TrajectoryRow {
        word: current,
        control: None,
    });
    Ok(Trajectory {
        rule: rule.name().to_string(),
        region_len: w0.len(),
        rows,
    })
}
