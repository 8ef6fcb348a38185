//! Odd Cycle Transversal by iterative compression.
//!
//! Vertices are added one at a time while keeping a transversal of size at
//! most `k`. When it grows to `k + 1` the compression step tries every split of
//! it into deleted / left side / right side and finishes with a unit-capacity
//! vertex cut. Space stays linear in the graph size.

use std::collections::VecDeque;

use itertools::Itertools;

use super::{SolveResult, WorkStats};
use crate::graph::{Graph, VertexSet};

pub fn solve_oct_static(g: &Graph, k: usize) -> SolveResult {
    let mut stats = WorkStats::default();
    let mut alive = VertexSet::new(g.n());
    let mut sol: Vec<usize> = Vec::new();
    for v in 0..g.n() {
        alive.insert(v);
        sol.push(v);
        if sol.len() <= k {
            continue;
        }
        match compress(g, &alive, &sol, &mut stats) {
            Some(smaller) => sol = smaller,
            None => return SolveResult::no(stats),
        }
    }
    SolveResult::yes(sol, stats)
}

/// Given a transversal `w` of `g[alive]` with `|w| = k + 1`, finds one of size at most `k`.
fn compress(g: &Graph, alive: &VertexSet, w: &[usize], stats: &mut WorkStats) -> Option<Vec<usize>> {
    let k = w.len() - 1;
    let wset = VertexSet::from_iter_cap(g.n(), w.iter().copied());
    let rest = alive.difference(&wset);
    let colour = two_colour(g, &rest)?;
    // 0 = deleted, 1 = left, 2 = right
    for labels in (0..w.len()).map(|_| 0..3u8).multi_cartesian_product() {
        stats.nodes += 1;
        let deleted: Vec<usize> = w.iter().zip(&labels).filter(|(_, &l)| l == 0).map(|(&v, _)| v).collect();
        if deleted.len() > k {
            continue;
        }
        let side = |l: u8| -> Vec<usize> { w.iter().zip(&labels).filter(|(_, &x)| x == l).map(|(&v, _)| v).collect() };
        let (s1, s2) = (side(1), side(2));
        let independent = |s: &[usize]| s.iter().tuple_combinations().all(|(&a, &b)| !g.has_edge(a, b));
        if !independent(&s1) || !independent(&s2) {
            continue;
        }
        // Vertices of the rest that must end up on the opposite colour class
        // to their current one (flip) or on their current one (keep).
        let mut flip = VertexSet::new(g.n());
        let mut keep = VertexSet::new(g.n());
        for x in rest.iter() {
            for (s, want) in [(&s1, 1u8), (&s2, 0u8)] {
                if s.iter().any(|&a| g.has_edge(a, x)) {
                    if colour[x] == want {
                        keep.insert(x);
                    } else {
                        flip.insert(x);
                    }
                }
            }
        }
        let budget = k - deleted.len();
        if let Some(cut) = min_vertex_cut(g, &rest, &flip, &keep, budget) {
            let mut out = deleted;
            out.extend(cut);
            return Some(out);
        }
    }
    None
}

/// Proper 2-colouring of `g[within]`, indexed by original vertex.
fn two_colour(g: &Graph, within: &VertexSet) -> Option<Vec<u8>> {
    let mut colour = vec![u8::MAX; g.n()];
    let mut stack = Vec::new();
    for s in within.iter() {
        if colour[s] != u8::MAX {
            continue;
        }
        colour[s] = 0;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x).intersection(within).iter() {
                if colour[y] == u8::MAX {
                    colour[y] = 1 - colour[x];
                    stack.push(y);
                } else if colour[y] == colour[x] {
                    return None;
                }
            }
        }
    }
    Some(colour)
}

struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<u32>,
}

const INF: u32 = u32::MAX / 2;

impl FlowNet {
    fn new(nodes: usize) -> Self {
        Self { head: vec![Vec::new(); nodes], to: Vec::new(), cap: Vec::new() }
    }

    fn arc(&mut self, a: usize, b: usize, c: u32) {
        self.head[a].push(self.to.len());
        self.to.push(b);
        self.cap.push(c);
        self.head[b].push(self.to.len());
        self.to.push(a);
        self.cap.push(0);
    }

    /// One BFS augmentation of a unit of flow; returns false when none exists.
    fn augment(&mut self, s: usize, t: usize) -> bool {
        let mut via = vec![usize::MAX; self.head.len()];
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut queue = VecDeque::from([s]);
        while let Some(x) = queue.pop_front() {
            for &e in &self.head[x] {
                let y = self.to[e];
                if self.cap[e] > 0 && !seen[y] {
                    seen[y] = true;
                    via[y] = e;
                    queue.push_back(y);
                }
            }
        }
        if !seen[t] {
            return false;
        }
        let mut y = t;
        while y != s {
            let e = via[y];
            self.cap[e] -= 1;
            self.cap[e ^ 1] += 1;
            y = self.to[e ^ 1];
        }
        true
    }

    fn reachable(&self, s: usize) -> Vec<bool> {
        let mut seen = vec![false; self.head.len()];
        seen[s] = true;
        let mut stack = vec![s];
        while let Some(x) = stack.pop() {
            for &e in &self.head[x] {
                if self.cap[e] > 0 && !seen[self.to[e]] {
                    seen[self.to[e]] = true;
                    stack.push(self.to[e]);
                }
            }
        }
        seen
    }
}

/// Smallest set of vertices of `within` (at most `budget`) whose removal leaves
/// no path in `g[within]` from `sources` to `sinks`. Sources and sinks may be deleted.
pub(crate) fn min_vertex_cut(
    g: &Graph,
    within: &VertexSet,
    sources: &VertexSet,
    sinks: &VertexSet,
    budget: usize,
) -> Option<Vec<usize>> {
    let n = g.n();
    let (s, t) = (2 * n, 2 * n + 1);
    let mut net = FlowNet::new(2 * n + 2);
    for v in within.iter() {
        net.arc(2 * v, 2 * v + 1, 1);
        if sources.contains(v) {
            net.arc(s, 2 * v, INF);
        }
        if sinks.contains(v) {
            net.arc(2 * v + 1, t, INF);
        }
        for w in g.neighbors(v).intersection(within).iter() {
            net.arc(2 * v + 1, 2 * w, INF);
        }
    }
    let mut flow = 0;
    while net.augment(s, t) {
        flow += 1;
        if flow > budget {
            return None;
        }
    }
    let seen = net.reachable(s);
    Some(within.iter().filter(|&v| seen[2 * v] && !seen[2 * v + 1]).collect())
}
