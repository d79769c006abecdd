//! Unlabeled directed graphs in compressed adjacency form, with strongly
//! connected components, period and pruning to the essential part.

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::bitset::BitSet;

/// Directed graph on vertices `0..len` with sorted, deduplicated successor lists.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Digraph {
    offsets: Vec<usize>,
    targets: Vec<u32>,
}

impl Digraph {
    pub fn from_edges(vertices: usize, edges: impl IntoIterator<Item = (u32, u32)>) -> Self {
        let mut lists = vec![Vec::new(); vertices];
        for (u, v) in edges {
            lists[u as usize].push(v);
        }
        Self::from_lists(lists)
    }

    pub fn from_lists(mut lists: Vec<Vec<u32>>) -> Self {
        let mut offsets = Vec::with_capacity(lists.len() + 1);
        let mut targets = Vec::new();
        offsets.push(0);
        for list in lists.iter_mut() {
            list.sort_unstable();
            list.dedup();
            targets.extend_from_slice(list);
            offsets.push(targets.len());
        }
        Digraph { offsets, targets }
    }

    pub fn len(&self) -> usize {
        self.offsets.len() - 1
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn edge_count(&self) -> usize {
        self.targets.len()
    }

    #[inline]
    pub fn successors(&self, v: u32) -> &[u32] {
        &self.targets[self.offsets[v as usize]..self.offsets[v as usize + 1]]
    }

    pub fn edges(&self) -> impl Iterator<Item = (u32, u32)> + '_ {
        (0..self.len() as u32).flat_map(move |u| self.successors(u).iter().map(move |&v| (u, v)))
    }

    pub fn has_edge(&self, u: u32, v: u32) -> bool {
        self.successors(u).binary_search(&v).is_ok()
    }

    pub fn reverse(&self) -> Digraph {
        Digraph::from_edges(self.len(), self.edges().map(|(u, v)| (v, u)))
    }

    /// Breadth-first distances from `source`; `None` for unreachable vertices.
    pub fn distances_from(&self, source: u32) -> Vec<Option<u32>> {
        let mut dist = vec![None; self.len()];
        let mut queue = VecDeque::new();
        dist[source as usize] = Some(0);
        queue.push_back(source);
        while let Some(u) = queue.pop_front() {
            let d = dist[u as usize].unwrap();
            for &v in self.successors(u) {
                if dist[v as usize].is_none() {
                    dist[v as usize] = Some(d + 1);
                    queue.push_back(v);
                }
            }
        }
        dist
    }

    pub fn reachable_from(&self, source: u32) -> BitSet {
        let mut seen = BitSet::new(self.len());
        let mut stack = vec![source];
        seen.insert(source as usize);
        while let Some(u) = stack.pop() {
            for &v in self.successors(u) {
                if seen.insert(v as usize) {
                    stack.push(v);
                }
            }
        }
        seen
    }

    /// Strongly connected components (iterative Tarjan).
    pub fn scc(&self) -> SccResult {
        const UNVISITED: u32 = u32::MAX;
        let n = self.len();
        let mut index = vec![UNVISITED; n];
        let mut low = vec![0u32; n];
        let mut on_stack = vec![false; n];
        let mut stack: Vec<u32> = Vec::new();
        let mut component = vec![0u32; n];
        let mut sizes: Vec<usize> = Vec::new();
        let mut next_index = 0u32;
        // (vertex, position in its successor list)
        let mut call: Vec<(u32, usize)> = Vec::new();

        for root in 0..n as u32 {
            if index[root as usize] != UNVISITED {
                continue;
            }
            call.push((root, 0));
            index[root as usize] = next_index;
            low[root as usize] = next_index;
            next_index += 1;
            stack.push(root);
            on_stack[root as usize] = true;

            while let Some(&(v, pos)) = call.last() {
                let succ = self.successors(v);
                if pos < succ.len() {
                    let w = succ[pos];
                    call.last_mut().unwrap().1 += 1;
                    if index[w as usize] == UNVISITED {
                        index[w as usize] = next_index;
                        low[w as usize] = next_index;
                        next_index += 1;
                        stack.push(w);
                        on_stack[w as usize] = true;
                        call.push((w, 0));
                    } else if on_stack[w as usize] {
                        low[v as usize] = low[v as usize].min(index[w as usize]);
                    }
                    continue;
                }
                call.pop();
                if let Some(&(parent, _)) = call.last() {
                    low[parent as usize] = low[parent as usize].min(low[v as usize]);
                }
                if low[v as usize] == index[v as usize] {
                    let id = sizes.len() as u32;
                    let mut size = 0;
                    loop {
                        let w = stack.pop().expect("tarjan stack underflow");
                        on_stack[w as usize] = false;
                        component[w as usize] = id;
                        size += 1;
                        if w == v {
                            break;
                        }
                    }
                    sizes.push(size);
                }
            }
        }

        let mut condensation: Vec<(u32, u32)> = self
            .edges()
            .map(|(u, v)| (component[u as usize], component[v as usize]))
            .filter(|(a, b)| a != b)
            .collect();
        condensation.sort_unstable();
        condensation.dedup();
        SccResult {
            count: sizes.len(),
            component,
            sizes,
            condensation,
        }
    }

    pub fn is_strongly_connected(&self) -> bool {
        !self.is_empty() && self.scc().count == 1
    }

    /// Gcd of cycle lengths, for a strongly connected graph.
    ///
    /// Uses a breadth-first layering from vertex 0: the gcd over all edges
    /// `(u, v)` of `|depth(u) + 1 - depth(v)|`.
    pub fn period(&self) -> Option<u64> {
        if !self.is_strongly_connected() {
            return None;
        }
        let depth = self.distances_from(0);
        let mut g = 0u64;
        for (u, v) in self.edges() {
            let du = i64::from(depth[u as usize]?);
            let dv = i64::from(depth[v as usize]?);
            g = gcd(g, (du + 1 - dv).unsigned_abs());
            if g == 1 {
                break;
            }
        }
        Some(g)
    }

    /// Vertices lying on bi-infinite walks: repeatedly removes vertices with
    /// no predecessor or no successor among the remaining ones.
    pub fn essential_vertices(&self) -> Vec<u32> {
        let n = self.len();
        let mut indeg = vec![0usize; n];
        let mut outdeg = vec![0usize; n];
        for (u, v) in self.edges() {
            outdeg[u as usize] += 1;
            indeg[v as usize] += 1;
        }
        let rev = self.reverse();
        let mut alive = vec![true; n];
        let mut queue: VecDeque<u32> = (0..n as u32)
            .filter(|&v| indeg[v as usize] == 0 || outdeg[v as usize] == 0)
            .collect();
        while let Some(v) = queue.pop_front() {
            if !alive[v as usize] {
                continue;
            }
            alive[v as usize] = false;
            for &w in self.successors(v) {
                if alive[w as usize] {
                    indeg[w as usize] -= 1;
                    if indeg[w as usize] == 0 {
                        queue.push_back(w);
                    }
                }
            }
            for &w in rev.successors(v) {
                if alive[w as usize] {
                    outdeg[w as usize] -= 1;
                    if outdeg[w as usize] == 0 {
                        queue.push_back(w);
                    }
                }
            }
        }
        (0..n as u32).filter(|&v| alive[v as usize]).collect()
    }

    /// Subgraph induced by `keep` (sorted), relabeled to `0..keep.len()`.
    pub fn induced(&self, keep: &[u32]) -> Digraph {
        let mut relabel = vec![u32::MAX; self.len()];
        for (i, &v) in keep.iter().enumerate() {
            relabel[v as usize] = i as u32;
        }
        let lists = keep
            .iter()
            .map(|&v| {
                self.successors(v)
                    .iter()
                    .filter_map(|&w| {
                        let x = relabel[w as usize];
                        (x != u32::MAX).then_some(x)
                    })
                    .collect()
            })
            .collect();
        Digraph::from_lists(lists)
    }
}

pub(crate) fn gcd(mut a: u64, mut b: u64) -> u64 {
    while b != 0 {
        (a, b) = (b, a % b);
    }
    a
}

/// Strongly connected component partition and condensation.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct SccResult {
    /// Component id of each vertex.
    pub component: Vec<u32>,
    pub count: usize,
    pub sizes: Vec<usize>,
    /// Deduplicated edges between distinct components.
    pub condensation: Vec<(u32, u32)>,
}
