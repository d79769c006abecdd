//! Blocking words and visibly blocking sets.
//!
//! Whether a word is blocking quantifies over all future times, so it is
//! approached from both sides: [`check_p_blocking_bounded`] refutes exactly up
//! to a horizon, and [`certify_p_blocking`] proves blocking through a sound
//! over-approximation of the reachable strip contents. Whatever neither
//! settles stays [`BlockingStatus::Unknown`].

use std::collections::HashMap;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::ca::{mask, step_controlled_bits, EventualPeriod, RegionWord, Rule};
use crate::error::{input, precondition, resource, Result};
use crate::graph::TransitionGraph;
use crate::limits::Limits;

/// Is `word` `width`-blocking at `offset`, checked up to `horizon`?
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingQuery {
    pub word: RegionWord,
    pub width: usize,
    pub offset: usize,
    pub horizon: usize,
}

impl BlockingQuery {
    pub fn new(word: RegionWord, width: usize, offset: usize, horizon: usize) -> Result<Self> {
        if width == 0 || word.len() < width || offset + width > word.len() {
            return input(format!(
                "blocking window [{offset},{}) does not fit in a word of length {}",
                offset + width,
                word.len()
            ));
        }
        Ok(BlockingQuery {
            word,
            width,
            offset,
            horizon,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BlockingStatus {
    /// Proven blocking for all times.
    Certified,
    /// Two configurations in the cylinder disagree on the window.
    Refuted,
    /// Exhaustive check found no disagreement up to the horizon.
    NotRefuted,
    /// The certificate could not be established.
    Unknown,
}

/// Two contexts around the word whose windows differ at `time`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Refutation {
    pub time: usize,
    /// `(left, right)` context of the first configuration.
    pub first: (RegionWord, RegionWord),
    pub second: (RegionWord, RegionWord),
    pub first_window: RegionWord,
    pub second_window: RegionWord,
}

impl Refutation {
    /// Recomputes both windows from the stored contexts.
    pub fn replay(&self, rule: &Rule, query: &BlockingQuery) -> (RegionWord, RegionWord) {
        let window = |(l, r): (RegionWord, RegionWord)| {
            window_after(rule, query, self.time, l.len(), r.len(), l.bits(), r.bits())
        };
        (window(self.first), window(self.second))
    }
}

/// Eventually periodic sequence of over-approximated strip sets, all of
/// which show a single window.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Certificate {
    pub tail: usize,
    pub cycle: usize,
    /// Window shown at each time `0..tail + cycle`.
    pub windows: Vec<RegionWord>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct BlockingVerdict {
    pub status: BlockingStatus,
    pub refutation: Option<Refutation>,
    pub certificate: Option<Certificate>,
    /// Times examined (bounded check) or strip sets computed (certificate).
    pub horizon: usize,
}

fn context_widths(rule: &Rule, query: &BlockingQuery, t: usize) -> (usize, usize) {
    let rt = rule.radius() * t;
    let left = rt.saturating_sub(query.offset);
    let right = (query.offset + query.width + rt).saturating_sub(query.word.len());
    (left, right)
}

fn window_after(
    rule: &Rule,
    query: &BlockingQuery,
    t: usize,
    left_width: usize,
    right_width: usize,
    left: u64,
    right: u64,
) -> RegionWord {
    let len = query.word.len();
    let width = left_width + len + right_width;
    let segment = (left << (len + right_width)) | (query.word.bits() << right_width) | right;
    let rt = rule.radius() * t;
    let out = rule.iterate_bits(segment, width, t);
    let out_width = width - 2 * rt;
    let start = left_width + query.offset - rt;
    let shift = out_width - start - query.width;
    RegionWord::from_raw(query.width, (out >> shift) & mask(query.width))
}

/// Exhaustive refutation up to `query.horizon`: for each time, enumerates
/// every context inside the dependence cone of the window.
pub fn check_p_blocking_bounded(rule: &Rule, query: &BlockingQuery, limits: &Limits) -> Result<BlockingVerdict> {
    let (lw, rw) = context_widths(rule, query, query.horizon);
    if lw + rw > limits.context_width || lw + query.word.len() + rw > 64 {
        return resource(format!(
            "horizon {} needs {} context cells, cap is {}",
            query.horizon,
            lw + rw,
            limits.context_width
        ));
    }
    for t in 0..=query.horizon {
        let (lw, rw) = context_widths(rule, query, t);
        let at = |ctx: u64| window_after(rule, query, t, lw, rw, ctx >> rw, ctx & mask(rw));
        let base = at(0);
        let found = (1..1u64 << (lw + rw))
            .into_par_iter()
            .find_first(|&ctx| at(ctx) != base);
        if let Some(ctx) = found {
            let split = |c: u64| {
                (
                    RegionWord::from_raw(lw, c >> rw),
                    RegionWord::from_raw(rw, c & mask(rw)),
                )
            };
            return Ok(BlockingVerdict {
                status: BlockingStatus::Refuted,
                refutation: Some(Refutation {
                    time: t,
                    first: split(0),
                    second: split(ctx),
                    first_window: base,
                    second_window: at(ctx),
                }),
                certificate: None,
                horizon: t,
            });
        }
    }
    Ok(BlockingVerdict {
        status: BlockingStatus::NotRefuted,
        refutation: None,
        certificate: None,
        horizon: query.horizon,
    })
}

/// Sound certificate for the unbounded property.
///
/// Iterates `R_0 = {x}`, `R_{t+1} = { step(w, c) : w in R_t, any control c }`
/// over strips of `|x|` cells with fresh borders each step. Every true
/// `F^t(s)` restricted to the strip lies in `R_t`, so if every set of the
/// (eventually periodic) sequence shows one window the word is blocking.
pub fn certify_p_blocking(rule: &Rule, query: &BlockingQuery, limits: &Limits) -> Result<BlockingVerdict> {
    let len = query.word.len();
    if len > limits.strip_width {
        return resource(format!(
            "certificate over {len}-cell strips exceeds the cap of {}",
            limits.strip_width
        ));
    }
    let controls = 1u64 << (2 * rule.radius());
    let shift = len - query.offset - query.width;
    let window_of = |w: usize| RegionWord::from_raw(query.width, (w as u64 >> shift) & mask(query.width));
    let unique_window = |set: &BitSet| {
        let mut it = set.iter().map(window_of);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    };

    let mut current = BitSet::new(1 << len);
    current.insert(query.word.bits() as usize);
    let mut seen: HashMap<BitSet, usize> = HashMap::new();
    let mut windows = Vec::new();
    for t in 0..=limits.horizon {
        if let Some(&start) = seen.get(&current) {
            return Ok(BlockingVerdict {
                status: BlockingStatus::Certified,
                refutation: None,
                certificate: Some(Certificate {
                    tail: start,
                    cycle: t - start,
                    windows,
                }),
                horizon: t,
            });
        }
        let Some(window) = unique_window(&current) else {
            return Ok(BlockingVerdict {
                status: BlockingStatus::Unknown,
                refutation: None,
                certificate: None,
                horizon: t,
            });
        };
        windows.push(window);
        let mut next = BitSet::new(1 << len);
        for w in current.iter() {
            for c in 0..controls {
                next.insert(step_controlled_bits(rule, w as u64, len, c) as usize);
            }
        }
        seen.insert(std::mem::replace(&mut current, next), t);
    }
    Ok(BlockingVerdict {
        status: BlockingStatus::Unknown,
        refutation: None,
        certificate: None,
        horizon: limits.horizon,
    })
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Direction {
    /// Configurations agree from cell 0 rightwards; outputs compared at `i >= l`.
    Right,
    /// Configurations agree up to cell `l - 1`; outputs compared at `i < 0`.
    Left,
}

/// Result of the one-step closure condition, checked exactly.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClosureCheck {
    pub holds: bool,
    /// Word of `l + 2r` cells whose middle and image disagree on membership.
    pub witness: Option<RegionWord>,
}

/// Two configurations sharing everything on one side of the word whose
/// images at `time` differ at `position` on that side.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationWitness {
    pub direction: Direction,
    pub time: usize,
    pub position: i64,
    /// Shared cells, `2rt` of them, containing the member word.
    pub shared: RegionWord,
    pub first_free: RegionWord,
    pub second_free: RegionWord,
}

impl PropagationWitness {
    /// Cell values of both configurations at `position` after `time` steps.
    pub fn replay(&self, rule: &Rule, word_len: usize) -> (u8, u8) {
        let free_width = self.first_free.len();
        let shared_width = self.shared.len();
        let width = free_width + shared_width;
        let segment = |free: &RegionWord| match self.direction {
            Direction::Right => (free.bits() << shared_width) | self.shared.bits(),
            Direction::Left => (self.shared.bits() << free_width) | free.bits(),
        };
        let rt = (rule.radius() * self.time) as i64;
        // leftmost segment cell in configuration coordinates
        let origin = match self.direction {
            Direction::Right => -(free_width as i64),
            Direction::Left => word_len as i64 - shared_width as i64,
        };
        let out_width = width - 2 * rt as usize;
        let idx = (self.position - origin - rt) as usize;
        let cell = |free: &RegionWord| {
            let out = rule.iterate_bits(segment(free), width, self.time);
            ((out >> (out_width - 1 - idx)) & 1) as u8
        };
        (cell(&self.first_free), cell(&self.second_free))
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PropagationCheck {
    pub holds_to_horizon: bool,
    pub horizon: usize,
    pub witness: Option<PropagationWitness>,
}

/// Verification of a candidate visibly blocking set over the full shift.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct VisiblyBlockingReport {
    pub rule: String,
    pub word_len: usize,
    pub members: Vec<RegionWord>,
    pub closure: ClosureCheck,
    pub propagation: PropagationCheck,
}

impl VisiblyBlockingReport {
    pub fn verified(&self) -> bool {
        self.closure.holds && self.propagation.holds_to_horizon
    }

    pub fn is_full(&self) -> bool {
        self.members.len() == 1 << self.word_len
    }
}

/// Checks both conditions for `members` (words of length `l`): closure of
/// the window membership under one step, exactly; and non-propagation of
/// differences across the word, for `t <= t_max`.
pub fn verify_visibly_blocking(
    rule: &Rule,
    members: &[RegionWord],
    word_len: usize,
    t_max: usize,
    limits: &Limits,
) -> Result<VisiblyBlockingReport> {
    if word_len == 0 || members.is_empty() {
        return input("a visibly blocking set needs a positive length and at least one word");
    }
    if word_len > limits.strip_width {
        return resource(format!(
            "word length {word_len} exceeds the cap of {}",
            limits.strip_width
        ));
    }
    if let Some(bad) = members.iter().find(|w| w.len() != word_len) {
        return input(format!("word {bad} does not have length {word_len}"));
    }
    let r = rule.radius();
    let mut in_set = BitSet::new(1 << word_len);
    for w in members {
        in_set.insert(w.bits() as usize);
    }
    let mut members: Vec<RegionWord> = in_set
        .iter()
        .map(|b| RegionWord::from_raw(word_len, b as u64))
        .collect();
    members.sort();

    let padded = word_len + 2 * r;
    if padded > limits.context_width {
        return resource(format!(
            "closure check needs {padded}-cell words, cap is {}",
            limits.context_width
        ));
    }
    let closure_witness = (0..1u64 << padded).into_par_iter().find_first(|&s| {
        let middle = (s >> r) & mask(word_len);
        let image = rule.step_bits(s, padded);
        in_set.contains(middle as usize) != in_set.contains(image as usize)
    });
    let closure = ClosureCheck {
        holds: closure_witness.is_none(),
        witness: closure_witness.map(|s| RegionWord::from_raw(padded, s)),
    };

    let log_members = usize::BITS as usize - (members.len() - 1).leading_zeros() as usize;
    let mut witness = None;
    'time: for t in 1..=t_max {
        let rt = r * t;
        if rt <= word_len {
            continue;
        }
        let shared_extra = 2 * rt - word_len;
        let free = rt - word_len;
        if shared_extra + free + log_members > limits.context_width || shared_extra + word_len + free > 64 {
            return resource(format!(
                "propagation check at t={t} exceeds the 2^{} enumeration cap",
                limits.context_width
            ));
        }
        for direction in [Direction::Right, Direction::Left] {
            if let Some(w) = propagation_at(rule, &members, word_len, t, direction) {
                witness = Some(w);
                break 'time;
            }
        }
    }
    Ok(VisiblyBlockingReport {
        rule: rule.name().to_string(),
        word_len,
        members,
        closure,
        propagation: PropagationCheck {
            holds_to_horizon: witness.is_none(),
            horizon: t_max,
            witness,
        },
    })
}

fn propagation_at(
    rule: &Rule,
    members: &[RegionWord],
    word_len: usize,
    t: usize,
    direction: Direction,
) -> Option<PropagationWitness> {
    let rt = rule.radius() * t;
    if rt <= word_len {
        return None;
    }
    let extra = 2 * rt - word_len;
    let free_width = rt - word_len;
    let width = 2 * rt + free_width;
    let shared_of = |member: &RegionWord, z: u64| match direction {
        Direction::Right => (member.bits() << extra) | z,
        Direction::Left => (z << word_len) | member.bits(),
    };
    let segment = |shared: u64, free: u64| match direction {
        Direction::Right => (free << (2 * rt)) | shared,
        Direction::Left => (shared << free_width) | free,
    };
    let first_position = match direction {
        Direction::Right => word_len as i64,
        Direction::Left => word_len as i64 - rt as i64,
    };
    members.iter().find_map(|member| {
        (0..1u64 << extra).into_par_iter().find_map_first(|z| {
            let shared = shared_of(member, z);
            let base = rule.iterate_bits(segment(shared, 0), width, t);
            (1..1u64 << free_width).find_map(|free| {
                let out = rule.iterate_bits(segment(shared, free), width, t);
                let diff = out ^ base;
                (diff != 0).then(|| {
                    let idx = diff.leading_zeros() as usize - (64 - free_width);
                    PropagationWitness {
                        direction,
                        time: t,
                        position: first_position + idx as i64,
                        shared: RegionWord::from_raw(2 * rt, shared),
                        first_free: RegionWord::from_raw(free_width, 0),
                        second_free: RegionWord::from_raw(free_width, free),
                    }
                })
            })
        })
    })
}

/// Preperiod and period bound used for all-words evidence.
const EVENTUAL_PERIOD_SEARCH: usize = 4;

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct GraphWitness {
    pub n: usize,
    pub from: RegionWord,
    pub to: RegionWord,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "case", rename_all = "snake_case")]
pub enum BlockingEvidence {
    /// The set holds every word: the rule should be eventually periodic.
    AllWords {
        eventual_period: Option<EventualPeriod>,
    },
    /// Some word `outside` is missing: no control leads from `inside` to it
    /// on a region of `l` cells.
    Cylinder {
        inside: RegionWord,
        outside: RegionWord,
        unreachable_in_region: Option<bool>,
    },
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct NonControllability {
    pub rule: String,
    pub controllable: bool,
    pub evidence: BlockingEvidence,
    /// Every `G_n` in `[l, n_max]` that is not strongly connected.
    pub graph_witnesses: Vec<GraphWitness>,
    /// No non-strongly-connected `G_n` was found in range.
    pub horizon_limited: bool,
    /// The propagation condition behind the verdict was only checked to this horizon.
    pub propagation_horizon: usize,
}

/// Not-controllable verdict from a verified visibly blocking set, with
/// corroborating evidence gathered within bounds.
pub fn non_controllability_from_visibly_blocking(
    rule: &Rule,
    report: &VisiblyBlockingReport,
    n_max: usize,
    limits: &Limits,
) -> Result<NonControllability> {
    if report.rule != rule.name() {
        return precondition(format!(
            "report was produced for {}, not {}",
            report.rule,
            rule.name()
        ));
    }
    if !report.verified() {
        return precondition("the word set did not pass visibly blocking verification");
    }
    let l = report.word_len;
    let evidence = if report.is_full() {
        let budget = ((limits.table_log2 as usize - 1) / (2 * rule.radius())).min(2 * EVENTUAL_PERIOD_SEARCH);
        let m_max = budget / 2;
        let eventual_period = rule.check_eventually_periodic(m_max, budget - m_max, limits)?;
        BlockingEvidence::AllWords { eventual_period }
    } else {
        let inside = report.members[0];
        let outside = (0..1u64 << l)
            .map(|b| RegionWord::from_raw(l, b))
            .find(|w| report.members.binary_search(w).is_err())
            .expect("set is not full");
        let unreachable_in_region = if l <= limits.max_region {
            let g = TransitionGraph::build(rule, l, limits)?;
            let reach = g.digraph().reachable_from(inside.bits() as u32);
            Some(!reach.contains(outside.bits() as usize))
        } else {
            None
        };
        BlockingEvidence::Cylinder {
            inside,
            outside,
            unreachable_in_region,
        }
    };
    let top = n_max.min(limits.max_region);
    let graph_witnesses = (l..=top)
        .into_par_iter()
        .map(|n| {
            let verdict = TransitionGraph::build(rule, n, limits)?.regional_controllability();
            Ok(verdict.witness.map(|(from, to)| GraphWitness { n, from, to }))
        })
        .collect::<Result<Vec<_>>>()?
        .into_iter()
        .flatten()
        .collect::<Vec<_>>();
    Ok(NonControllability {
        rule: rule.name().to_string(),
        controllable: false,
        horizon_limited: graph_witnesses.is_empty(),
        evidence,
        graph_witnesses,
        propagation_horizon: report.propagation.horizon,
    })
}
