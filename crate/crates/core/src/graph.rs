//! Boundary-controlled transition graph `G_n(F)`: one vertex per region
//! word of length `n`, one labeled edge per boundary control.

use std::collections::VecDeque;
use std::sync::OnceLock;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;
use crate::ca::{evolve_controlled, step_controlled_bits, ControlPair, RegionWord, Rule, Trajectory};
use crate::digraph::{Digraph, SccResult};
use crate::error::{input, precondition, resource, Result};
use crate::limits::Limits;

#[derive(Debug)]
pub struct TransitionGraph {
    rule: Rule,
    n: usize,
    controls: usize,
    /// `successors[v * controls + c]` is the region word reached from `v` under control `c`.
    successors: Vec<u32>,
    plain: OnceLock<Digraph>,
}

/// Regional controllability verdict. On failure `witness` is `(from, to)`
/// with `to` unreachable from `from`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControllabilityVerdict {
    pub controllable: bool,
    pub witness: Option<(RegionWord, RegionWord)>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrimitivityResult {
    pub strongly_connected: bool,
    /// Gcd of cycle lengths, present only for strongly connected graphs.
    pub period: Option<u64>,
    pub primitive: bool,
    /// Least `M` with every entry of the `M`-th Boolean adjacency power set.
    pub index: Option<u64>,
    /// The index search stopped at its cap without an answer.
    pub index_capped: bool,
}

/// Boundary control sequence steering `initial` to `target`.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ControlPlan {
    pub initial: RegionWord,
    pub target: RegionWord,
    pub steps: Vec<ControlPair>,
}

impl ControlPlan {
    pub fn horizon(&self) -> usize {
        self.steps.len()
    }

    pub fn replay(&self, rule: &Rule) -> Result<Trajectory> {
        evolve_controlled(rule, &self.initial, &self.steps)
    }
}

/// Wielandt's bound `(N - 1)^2 + 1` on the index of a primitive `N x N` matrix.
pub fn wielandt_bound(vertices: usize) -> u128 {
    let k = vertices as u128 - 1;
    k * k + 1
}

impl TransitionGraph {
    pub fn build(rule: &Rule, n: usize, limits: &Limits) -> Result<TransitionGraph> {
        if n == 0 {
            return input("region length must be at least 1");
        }
        if n > limits.max_region {
            return resource(format!(
                "region length {n} exceeds the cap of {}",
                limits.max_region
            ));
        }
        let control_bits = 2 * rule.radius();
        if (n + control_bits) as u32 > limits.successor_log2 {
            return resource(format!(
                "2^{n} vertices x 2^{control_bits} controls exceeds the 2^{} successor cap",
                limits.successor_log2
            ));
        }
        let controls = 1usize << control_bits;
        let mut successors = vec![0u32; (1usize << n) * controls];
        successors
            .par_chunks_mut(controls)
            .enumerate()
            .for_each(|(v, row)| {
                for (c, slot) in row.iter_mut().enumerate() {
                    *slot = step_controlled_bits(rule, v as u64, n, c as u64) as u32;
                }
            });
        Ok(TransitionGraph {
            rule: rule.clone(),
            n,
            controls,
            successors,
            plain: OnceLock::new(),
        })
    }

    pub fn rule(&self) -> &Rule {
        &self.rule
    }

    pub fn region_len(&self) -> usize {
        self.n
    }

    pub fn vertex_count(&self) -> usize {
        1 << self.n
    }

    pub fn control_count(&self) -> usize {
        self.controls
    }

    #[inline]
    pub fn successor(&self, v: u32, control: usize) -> u32 {
        self.successors[v as usize * self.controls + control]
    }

    pub fn labeled_successors(&self, v: u32) -> &[u32] {
        let start = v as usize * self.controls;
        &self.successors[start..start + self.controls]
    }

    pub fn word(&self, v: u32) -> RegionWord {
        RegionWord::from_raw(self.n, u64::from(v))
    }

    fn vertex_of(&self, w: &RegionWord) -> Result<u32> {
        if w.len() != self.n {
            return input(format!(
                "word {w} has length {} but the graph has region length {}",
                w.len(),
                self.n
            ));
        }
        Ok(w.bits() as u32)
    }

    /// Deduplicated adjacency, i.e. the Boolean matrix `C`.
    pub fn digraph(&self) -> &Digraph {
        self.plain.get_or_init(|| {
            let lists = (0..self.vertex_count() as u32)
                .into_par_iter()
                .map(|v| self.labeled_successors(v).to_vec())
                .collect();
            Digraph::from_lists(lists)
        })
    }

    pub fn scc(&self) -> SccResult {
        self.digraph().scc()
    }

    /// Controllable iff the whole vertex set is a single strongly connected component.
    pub fn regional_controllability(&self) -> ControllabilityVerdict {
        let scc = self.scc();
        if scc.count == 1 {
            return ControllabilityVerdict {
                controllable: true,
                witness: None,
            };
        }
        // A sink component reaches nothing outside itself.
        let mut has_out = vec![false; scc.count];
        for &(a, _) in &scc.condensation {
            has_out[a as usize] = true;
        }
        let from = (0..self.vertex_count())
            .find(|&v| !has_out[scc.component[v] as usize])
            .expect("a condensation always has a sink");
        let sink = scc.component[from];
        let to = (0..self.vertex_count())
            .find(|&u| scc.component[u] != sink)
            .expect("more than one component");
        ControllabilityVerdict {
            controllable: false,
            witness: Some((self.word(from as u32), self.word(to as u32))),
        }
    }

    pub fn period(&self) -> Result<u64> {
        match self.digraph().period() {
            Some(p) => Ok(p),
            None => precondition(format!(
                "G_{} of {} is not strongly connected; period undefined",
                self.n,
                self.rule.name()
            )),
        }
    }

    /// Strong connectivity, period and primitivity (index left unset).
    pub fn is_primitive(&self) -> PrimitivityResult {
        let period = self.digraph().period();
        PrimitivityResult {
            strongly_connected: period.is_some(),
            period,
            primitive: period == Some(1),
            index: None,
            index_capped: false,
        }
    }

    /// [`is_primitive`](Self::is_primitive) plus the index of primitivity
    /// when the graph is primitive.
    pub fn primitivity_report(&self, cap: usize) -> PrimitivityResult {
        let mut result = self.is_primitive();
        if result.primitive {
            let index = self.primitivity_index(cap).expect("graph is primitive");
            result.index_capped = index.is_none();
            result.index = index;
        }
        result
    }

    /// Least `M <= cap` such that every vertex reaches every vertex by a walk
    /// of exactly `M` edges; `None` when the cap is hit first.
    pub fn primitivity_index(&self, cap: usize) -> Result<Option<u64>> {
        if !self.is_primitive().primitive {
            return precondition(format!(
                "G_{} of {} is not primitive",
                self.n,
                self.rule.name()
            ));
        }
        let g = self.digraph();
        let per_vertex: Vec<Option<u64>> = (0..g.len() as u32)
            .into_par_iter()
            .map(|v| exact_walk_exponent(g, v, cap))
            .collect();
        let mut max = 0;
        for e in per_vertex {
            match e {
                Some(e) => max = max.max(e),
                None => return Ok(None),
            }
        }
        Ok(Some(max))
    }

    /// Minimum-horizon control plan from `s0` to `sd`, if `sd` is reachable.
    pub fn synthesize_control(&self, s0: &RegionWord, sd: &RegionWord) -> Result<Option<ControlPlan>> {
        let start = self.vertex_of(s0)?;
        let goal = self.vertex_of(sd)?;
        let mut parent: Vec<Option<(u32, u32)>> = vec![None; self.vertex_count()];
        let mut seen = BitSet::new(self.vertex_count());
        let mut queue = VecDeque::new();
        seen.insert(start as usize);
        queue.push_back(start);
        'search: while let Some(u) = queue.pop_front() {
            if u == goal {
                break;
            }
            for (c, &v) in self.labeled_successors(u).iter().enumerate() {
                if seen.insert(v as usize) {
                    parent[v as usize] = Some((u, c as u32));
                    if v == goal {
                        break 'search;
                    }
                    queue.push_back(v);
                }
            }
        }
        if !seen.contains(goal as usize) {
            return Ok(None);
        }
        let mut steps = Vec::new();
        let mut v = goal;
        while v != start {
            let (u, c) = parent[v as usize].expect("reached vertices have parents");
            steps.push(ControlPair::from_index(self.rule.radius(), u64::from(c))?);
            v = u;
        }
        steps.reverse();
        Ok(Some(ControlPlan {
            initial: *s0,
            target: *sd,
            steps,
        }))
    }

    /// Control plan of exactly `horizon` steps, if one exists. At each step
    /// the smallest control index that can still finish on time is chosen.
    pub fn synthesize_control_exact_time(
        &self,
        s0: &RegionWord,
        sd: &RegionWord,
        horizon: usize,
        limits: &Limits,
    ) -> Result<Option<ControlPlan>> {
        let start = self.vertex_of(s0)?;
        let goal = self.vertex_of(sd)?;
        if horizon > limits.horizon {
            return resource(format!(
                "horizon {horizon} exceeds the cap of {}",
                limits.horizon
            ));
        }
        let nv = self.vertex_count();
        // can_finish[t]: vertices from which `goal` is reachable in exactly horizon - t steps
        let mut can_finish = vec![BitSet::new(nv); horizon + 1];
        can_finish[horizon].insert(goal as usize);
        for t in (0..horizon).rev() {
            let (head, tail) = can_finish.split_at_mut(t + 1);
            let next = &tail[0];
            let cur = &mut head[t];
            for u in 0..nv as u32 {
                if self
                    .labeled_successors(u)
                    .iter()
                    .any(|&v| next.contains(v as usize))
                {
                    cur.insert(u as usize);
                }
            }
            if cur.is_empty() {
                return Ok(None);
            }
        }
        if !can_finish[0].contains(start as usize) {
            return Ok(None);
        }
        let mut steps = Vec::with_capacity(horizon);
        let mut u = start;
        for next in &can_finish[1..] {
            let (c, &v) = self
                .labeled_successors(u)
                .iter()
                .enumerate()
                .find(|(_, &v)| next.contains(v as usize))
                .expect("layer membership guarantees a continuing control");
            steps.push(ControlPair::from_index(self.rule.radius(), c as u64)?);
            u = v;
        }
        Ok(Some(ControlPlan {
            initial: *s0,
            target: *sd,
            steps,
        }))
    }
}

/// Least `M <= cap` with every vertex reachable from `source` in exactly `M` steps.
fn exact_walk_exponent(g: &Digraph, source: u32, cap: usize) -> Option<u64> {
    let mut current = BitSet::new(g.len());
    current.insert(source as usize);
    let mut next = BitSet::new(g.len());
    for m in 1..=cap {
        next.clear();
        for u in current.iter() {
            for &v in g.successors(u as u32) {
                next.insert(v as usize);
            }
        }
        std::mem::swap(&mut current, &mut next);
        if current.is_full() {
            return Some(m as u64);
        }
    }
    None
}

/// Per-`n` result of a sweep.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepRow {
    pub n: usize,
    pub vertices: usize,
    pub scc_count: usize,
    pub regionally_controllable: bool,
    pub period: Option<u64>,
    pub primitive: bool,
    pub primitivity_index: Option<u64>,
    pub index_capped: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SweepReport {
    pub rule: String,
    pub n_min: usize,
    pub n_max: usize,
    pub rows: Vec<SweepRow>,
    /// Finite-level evidence only: `"supported up to n=<n_max>"`,
    /// `"refuted at n=<n>"`.
    pub all_n_status: String,
}

pub fn analyze_region(rule: &Rule, n: usize, index_cap: usize, limits: &Limits) -> Result<SweepRow> {
    let graph = TransitionGraph::build(rule, n, limits)?;
    let scc = graph.scc();
    let prim = graph.primitivity_report(index_cap);
    Ok(SweepRow {
        n,
        vertices: graph.vertex_count(),
        scc_count: scc.count,
        regionally_controllable: scc.count == 1,
        period: prim.period,
        primitive: prim.primitive,
        primitivity_index: prim.index,
        index_capped: prim.index_capped,
    })
}

/// Regional controllability, period, primitivity and index for every `n` in range.
pub fn sweep(rule: &Rule, n_min: usize, n_max: usize, index_cap: usize, limits: &Limits) -> Result<SweepReport> {
    if n_min == 0 || n_min > n_max {
        return input(format!("invalid region range {n_min}..={n_max}"));
    }
    if n_max > limits.max_region {
        return resource(format!(
            "region length {n_max} exceeds the cap of {}",
            limits.max_region
        ));
    }
    let rows = (n_min..=n_max)
        .into_par_iter()
        .map(|n| analyze_region(rule, n, index_cap, limits))
        .collect::<Result<Vec<_>>>()?;
    let all_n_status = match rows.iter().find(|r| !r.regionally_controllable) {
        Some(r) => format!("refuted at n={}", r.n),
        None => format!("supported up to n={n_max}"),
    };
    Ok(SweepReport {
        rule: rule.name().to_string(),
        n_min,
        n_max,
        rows,
        all_n_status,
    })
}
