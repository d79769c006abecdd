//! Height-`k` column languages of the width-`n` trace of a rule, and the
//! finite-type approximations they generate.
//!
//! Blocks are computed exactly: a block of `k` rows on `n` cells depends on
//! a seed of `n + 2r(k-1)` cells at time 0, so enumerating all seeds of that
//! width yields the whole language.

use std::collections::{BTreeMap, BTreeSet, HashMap};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::ca::{mask, RegionWord, Rule};
use crate::digraph::Digraph;
use crate::error::{input, resource, Result};
use crate::graph::TransitionGraph;
use crate::limits::Limits;

/// Packed block: row 0 in the most significant `n` bits.
type BlockKey = u128;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceBlockLanguage {
    rule: String,
    radius: usize,
    n: usize,
    k: usize,
    /// Each block with the smallest seed producing it, when known.
    blocks: BTreeMap<BlockKey, Option<u64>>,
}

fn pack(rows: &[RegionWord], n: usize) -> BlockKey {
    rows.iter()
        .fold(0u128, |acc, r| (acc << n) | u128::from(r.bits()))
}

fn unpack(key: BlockKey, n: usize, k: usize) -> Vec<RegionWord> {
    (0..k)
        .map(|t| {
            let shift = n * (k - 1 - t);
            RegionWord::from_raw(n, ((key >> shift) as u64) & mask(n))
        })
        .collect()
}

/// Rows `0..k` of the window of width `n` centered in a seed of width
/// `n + 2r(k-1)` under free evolution.
pub fn replay_seed(rule: &Rule, n: usize, k: usize, seed: u64) -> Vec<RegionWord> {
    let r = rule.radius();
    let mut width = n + 2 * r * (k - 1);
    let mut cur = seed;
    let mut rows = Vec::with_capacity(k);
    for t in 0..k {
        let shift = r * (k - 1 - t);
        rows.push(RegionWord::from_raw(n, (cur >> shift) & mask(n)));
        if t + 1 < k {
            cur = rule.step_bits(cur, width);
            width -= 2 * r;
        }
    }
    rows
}

fn replay_key(rule: &Rule, n: usize, k: usize, seed: u64) -> BlockKey {
    pack(&replay_seed(rule, n, k, seed), n)
}

impl TraceBlockLanguage {
    /// Language built from explicit blocks (no seed witnesses), e.g. for
    /// hand-made fixtures.
    pub fn from_blocks(
        name: impl Into<String>,
        radius: usize,
        n: usize,
        k: usize,
        blocks: impl IntoIterator<Item = Vec<RegionWord>>,
    ) -> Result<Self> {
        if n == 0 || k == 0 || n * k > 128 {
            return input(format!("unsupported block shape n={n}, k={k}"));
        }
        let mut map = BTreeMap::new();
        for rows in blocks {
            if rows.len() != k || rows.iter().any(|w| w.len() != n) {
                return input(format!("block is not {k} rows of {n} cells"));
            }
            map.insert(pack(&rows, n), None);
        }
        Ok(TraceBlockLanguage {
            rule: name.into(),
            radius,
            n,
            k,
            blocks: map,
        })
    }

    pub fn rule(&self) -> &str {
        &self.rule
    }

    pub fn radius(&self) -> usize {
        self.radius
    }

    pub fn width(&self) -> usize {
        self.n
    }

    pub fn height(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.blocks.len()
    }

    pub fn is_empty(&self) -> bool {
        self.blocks.is_empty()
    }

    pub fn contains(&self, rows: &[RegionWord]) -> bool {
        rows.len() == self.k
            && rows.iter().all(|w| w.len() == self.n)
            && self.blocks.contains_key(&pack(rows, self.n))
    }

    /// Blocks in ascending packed order, each with its witness seed.
    pub fn blocks(&self) -> impl Iterator<Item = (Vec<RegionWord>, Option<u64>)> + '_ {
        self.blocks
            .iter()
            .map(|(&key, &seed)| (unpack(key, self.n, self.k), seed))
    }
}

/// Exact `L_k` of the width-`n` trace, by enumerating every seed.
pub fn trace_blocks(rule: &Rule, n: usize, k: usize, limits: &Limits) -> Result<TraceBlockLanguage> {
    if n == 0 || k == 0 {
        return input("trace width and height must be positive");
    }
    let width = n + 2 * rule.radius() * (k - 1);
    if width > limits.seed_width || n * k > 128 {
        return resource(format!(
            "trace n={n}, k={k} needs seeds of {width} cells, cap is {}",
            limits.seed_width
        ));
    }
    const CHUNK: u64 = 1 << 12;
    let total = 1u64 << width;
    let found: HashMap<BlockKey, u64> = (0..total.div_ceil(CHUNK))
        .into_par_iter()
        .map(|chunk| {
            let mut local: HashMap<BlockKey, u64> = HashMap::new();
            for seed in chunk * CHUNK..((chunk + 1) * CHUNK).min(total) {
                local.entry(replay_key(rule, n, k, seed)).or_insert(seed);
            }
            local
        })
        .reduce(HashMap::new, |mut a, b| {
            for (key, seed) in b {
                a.entry(key)
                    .and_modify(|s| *s = (*s).min(seed))
                    .or_insert(seed);
            }
            a
        });
    Ok(TraceBlockLanguage {
        rule: rule.name().to_string(),
        radius: rule.radius(),
        n,
        k,
        blocks: found.into_iter().map(|(key, seed)| (key, Some(seed))).collect(),
    })
}

/// Finite-type approximation `A_k`: sequences of width-`n` words all of
/// whose height-`k` windows are allowed blocks, presented as a graph on
/// `(k-1)`-blocks. For `k = 1` the vertices are the allowed words and every
/// pair is joined.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ApproximationSft {
    n: usize,
    k: usize,
    vertices: Vec<BlockKey>,
    graph: Digraph,
}

impl ApproximationSft {
    pub fn graph(&self) -> &Digraph {
        &self.graph
    }

    /// Rows of the `(k-1)`-block (a single word when `k <= 2`) at vertex `v`.
    pub fn vertex_rows(&self, v: u32) -> Vec<RegionWord> {
        unpack(self.vertices[v as usize], self.n, self.k.max(2) - 1)
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    /// Edges as pairs of vertex row-blocks.
    pub fn labeled_edges(&self) -> impl Iterator<Item = (Vec<RegionWord>, Vec<RegionWord>)> + '_ {
        self.graph
            .edges()
            .map(|(u, v)| (self.vertex_rows(u), self.vertex_rows(v)))
    }
}

pub fn k_approximation(lang: &TraceBlockLanguage) -> ApproximationSft {
    let n = lang.n;
    if lang.k == 1 {
        let vertices: Vec<BlockKey> = lang.blocks.keys().copied().collect();
        let m = vertices.len() as u32;
        let graph = Digraph::from_edges(
            vertices.len(),
            (0..m).flat_map(|u| (0..m).map(move |v| (u, v))),
        );
        return ApproximationSft {
            n,
            k: 1,
            vertices,
            graph,
        };
    }
    let low = n * (lang.k - 1);
    let low_mask: u128 = if low >= 128 { u128::MAX } else { (1u128 << low) - 1 };
    let split = |key: BlockKey| (key >> n, key & low_mask);
    let vertex_set: BTreeSet<BlockKey> = lang
        .blocks
        .keys()
        .flat_map(|&key| {
            let (a, b) = split(key);
            [a, b]
        })
        .collect();
    let vertices: Vec<BlockKey> = vertex_set.into_iter().collect();
    let index = |key: BlockKey| vertices.binary_search(&key).expect("vertex present") as u32;
    let graph = Digraph::from_edges(
        vertices.len(),
        lang.blocks.keys().map(|&key| {
            let (a, b) = split(key);
            (index(a), index(b))
        }),
    );
    ApproximationSft {
        n,
        k: lang.k,
        vertices,
        graph,
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EssentialStatus {
    /// No vertex lies on a bi-infinite walk.
    EmptySubshift,
    Transitive,
    NotTransitive,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftTransitivity {
    /// Whole presentation graph strongly connected.
    pub strict: bool,
    /// Strong connectivity after pruning to the essential graph.
    pub essential: EssentialStatus,
}

impl SftTransitivity {
    pub fn essential_transitive(&self) -> bool {
        self.essential == EssentialStatus::Transitive
    }
}

fn essential_graph(sft: &ApproximationSft) -> Digraph {
    sft.graph.induced(&sft.graph.essential_vertices())
}

pub fn sft_is_transitive(sft: &ApproximationSft) -> SftTransitivity {
    let essential = essential_graph(sft);
    SftTransitivity {
        strict: sft.graph.is_strongly_connected(),
        essential: if essential.is_empty() {
            EssentialStatus::EmptySubshift
        } else if essential.is_strongly_connected() {
            EssentialStatus::Transitive
        } else {
            EssentialStatus::NotTransitive
        },
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SftMixing {
    pub mixing: bool,
    /// Period of the essential graph when it is strongly connected.
    pub essential_period: Option<u64>,
    pub empty_subshift: bool,
}

pub fn sft_is_mixing(sft: &ApproximationSft) -> SftMixing {
    let essential = essential_graph(sft);
    let period = essential.period();
    SftMixing {
        mixing: period == Some(1),
        essential_period: period,
        empty_subshift: essential.is_empty(),
    }
}

/// True iff the `A_2` presentation of the width-`n` trace has exactly the
/// deduplicated edge set of `G_n`.
pub fn approximation_equals_graph(rule: &Rule, n: usize, limits: &Limits) -> Result<bool> {
    let graph = TransitionGraph::build(rule, n, limits)?;
    let sft = k_approximation(&trace_blocks(rule, n, 2, limits)?);
    let from_trace: BTreeSet<(u64, u64)> = sft
        .labeled_edges()
        .map(|(a, b)| (a[0].bits(), b[0].bits()))
        .collect();
    let from_graph: BTreeSet<(u64, u64)> = graph
        .digraph()
        .edges()
        .map(|(u, v)| (u64::from(u), u64::from(v)))
        .collect();
    Ok(from_trace == from_graph)
}

/// Least `T <= t_max` such that free evolution of some configuration shows
/// `w` in the window at time 0 and `u` at time `T`.
pub fn trace_reach(
    rule: &Rule,
    w: &RegionWord,
    u: &RegionWord,
    t_max: usize,
    limits: &Limits,
) -> Result<Option<usize>> {
    let n = w.len();
    if n == 0 || u.len() != n {
        return input(format!(
            "window words must be nonempty and of equal length, got {} and {}",
            w.len(),
            u.len()
        ));
    }
    let r = rule.radius();
    if n + 2 * r * t_max > limits.seed_width {
        return resource(format!(
            "trace reach to t={t_max} needs seeds of {} cells, cap is {}",
            n + 2 * r * t_max,
            limits.seed_width
        ));
    }
    for t in 0..=t_max {
        let side = r * t;
        let width = n + 2 * side;
        let hit = (0..1u64 << (2 * side)).into_par_iter().any(|ctx| {
            let left = ctx >> side;
            let right = ctx & mask(side);
            let seed = (left << (n + side)) | (w.bits() << side) | right;
            rule.iterate_bits(seed, width, t) == u.bits()
        });
        if hit {
            return Ok(Some(t));
        }
    }
    Ok(None)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str) -> RegionWord {
        s.parse().unwrap()
    }

    fn block_strings(lang: &TraceBlockLanguage) -> Vec<String> {
        lang.blocks()
            .map(|(rows, _)| rows.iter().map(|r| r.to_string()).collect::<Vec<_>>().join("/"))
            .collect()
    }

    fn lang(code: u8, n: usize, k: usize) -> TraceBlockLanguage {
        trace_blocks(&Rule::wolfram(code), n, k, &Limits::default()).unwrap()
    }

    #[test]
    fn blocks_examples() {
        assert_eq!(block_strings(&lang(90, 1, 2)), ["0/0", "0/1", "1/0", "1/1"]);
        assert_eq!(block_strings(&lang(204, 1, 2)), ["0/0", "1/1"]);
        assert_eq!(lang(30, 3, 1).len(), 8);
        assert_eq!(block_strings(&lang(0, 1, 2)), ["0/0", "1/0"]);
    }

    #[test]
    fn witnesses_replay() {
        let rule = Rule::wolfram(110);
        let l = trace_blocks(&rule, 2, 3, &Limits::default()).unwrap();
        for (rows, seed) in l.blocks() {
            assert_eq!(replay_seed(&rule, 2, 3, seed.unwrap()), rows);
        }
    }

    #[test]
    fn seed_cap() {
        let limits = Limits::default();
        assert!(matches!(
            trace_blocks(&Rule::wolfram(90), 20, 5, &limits),
            Err(crate::Error::Resource(_))
        ));
        assert!(trace_blocks(&Rule::wolfram(90), 0, 2, &limits).is_err());
    }

    #[test]
    fn approximation_examples() {
        let sft = k_approximation(&lang(204, 1, 2));
        let edges: Vec<_> = sft.labeled_edges().map(|(a, b)| (a[0].to_string(), b[0].to_string())).collect();
        assert_eq!(edges, [("0".into(), "0".into()), ("1".to_string(), "1".to_string())]);

        let sft = k_approximation(&lang(90, 1, 2));
        assert_eq!(sft.graph().edge_count(), 4);

        let sft = k_approximation(&lang(0, 1, 2));
        assert_eq!(sft.vertex_count(), 2);
        let edges: Vec<_> = sft.labeled_edges().map(|(a, b)| (a[0].to_string(), b[0].to_string())).collect();
        assert_eq!(edges, [("0".into(), "0".into()), ("1".to_string(), "0".to_string())]);
    }

    #[test]
    fn height_three_presentation() {
        let l = lang(90, 1, 3);
        let sft = k_approximation(&l);
        for (a, b) in sft.labeled_edges() {
            assert_eq!(a[1], b[0]);
            assert!(l.contains(&[a[0], a[1], b[1]]));
        }
        assert_eq!(sft.graph().edge_count(), l.len());
    }

    #[test]
    fn transitivity_examples() {
        let t = sft_is_transitive(&k_approximation(&lang(204, 1, 2)));
        assert_eq!((t.strict, t.essential), (false, EssentialStatus::NotTransitive));
        let t = sft_is_transitive(&k_approximation(&lang(90, 1, 2)));
        assert_eq!((t.strict, t.essential), (true, EssentialStatus::Transitive));
        let t = sft_is_transitive(&k_approximation(&lang(0, 1, 2)));
        assert_eq!((t.strict, t.essential), (false, EssentialStatus::Transitive));
    }

    #[test]
    fn mixing_examples() {
        assert!(sft_is_mixing(&k_approximation(&lang(90, 1, 2))).mixing);
        assert!(!sft_is_mixing(&k_approximation(&lang(204, 1, 2))).mixing);
        let two_cycle = TraceBlockLanguage::from_blocks(
            "two-cycle",
            1,
            1,
            2,
            [vec![w("0"), w("1")], vec![w("1"), w("0")]],
        )
        .unwrap();
        let sft = k_approximation(&two_cycle);
        assert!(sft_is_transitive(&sft).strict);
        let m = sft_is_mixing(&sft);
        assert_eq!((m.mixing, m.essential_period), (false, Some(2)));
    }

    #[test]
    fn empty_subshift() {
        let chain = TraceBlockLanguage::from_blocks("chain", 1, 1, 2, [vec![w("0"), w("1")]]).unwrap();
        let sft = k_approximation(&chain);
        assert_eq!(sft_is_transitive(&sft).essential, EssentialStatus::EmptySubshift);
        assert!(sft_is_mixing(&sft).empty_subshift);
    }

    #[test]
    fn approximation_matches_graph() {
        let limits = Limits::default();
        for code in [90, 204, 0] {
            for n in 1..=4 {
                assert!(approximation_equals_graph(&Rule::wolfram(code), n, &limits).unwrap());
            }
        }
    }

    #[test]
    fn trace_reach_examples() {
        let limits = Limits::default();
        assert_eq!(trace_reach(&Rule::wolfram(170), &w("00"), &w("11"), 5, &limits).unwrap(), Some(2));
        assert_eq!(trace_reach(&Rule::wolfram(204), &w("00"), &w("11"), 8, &limits).unwrap(), None);
        assert_eq!(trace_reach(&Rule::wolfram(90), &w("0"), &w("1"), 4, &limits).unwrap(), Some(1));
        assert_eq!(trace_reach(&Rule::wolfram(90), &w("01"), &w("01"), 4, &limits).unwrap(), Some(0));
        assert!(trace_reach(&Rule::wolfram(90), &w("0"), &w("1"), 20, &limits).is_err());
        assert!(trace_reach(&Rule::wolfram(90), &w("0"), &w("11"), 2, &limits).is_err());
    }
}
