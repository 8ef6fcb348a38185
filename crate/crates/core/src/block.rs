//! Block graphs: one-pass reconstruction of t-flow and t-block graphs, and a
//! randomized Block Vertex Deletion solver.

use std::collections::HashMap;
use std::sync::Mutex;

use rand::Rng as _;

use crate::derand::pair_cover;
use crate::graph::{Graph, VertexSet};
use crate::sketch::{ConnectivitySketch, SketchError, DEFAULT_C};
use crate::solvers::classes::is_block_graph;
use crate::solvers::{SolveResult, WorkStats};
use crate::stream::{Replay, SpaceBound, Stream, StreamConsumer, StreamError, StreamEvent};
use crate::util::{any_subset_up_to, rng_for, splitmix64};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum BlockError {
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Streaming state for reconstructing `G[members]` as a t-flow graph: one
/// connectivity sketch per member of a pair-separating family, plus degrees.
#[derive(Clone, Debug)]
pub struct TFlowSketcher {
    id: usize,
    t: usize,
    members: Vec<u32>,
    inner: Vec<Vec<u32>>,
    /// Inner family members containing each vertex, ascending.
    containing: Vec<Vec<u32>>,
    sketches: Vec<ConnectivitySketch>,
    deg: Vec<i64>,
}

impl TFlowSketcher {
    /// `members` are sorted global ids.
    pub fn new(id: usize, t: usize, members: Vec<u32>, seed: u64) -> Self {
        let m = members.len();
        let inner = pair_cover(m, t);
        let mut containing = vec![Vec::new(); m];
        for (i, f) in inner.iter().enumerate() {
            for &v in f {
                containing[v as usize].push(i as u32);
            }
        }
        let sketches = inner
            .iter()
            .enumerate()
            .map(|(i, f)| ConnectivitySketch::new(f.len(), DEFAULT_C, splitmix64(seed ^ ((id as u64) << 24) ^ i as u64)))
            .collect();
        Self { id, t, members, inner, containing, sketches, deg: vec![0; m] }
    }

    pub fn finish(&self) -> Result<TFlowReconstruction, SketchError> {
        let mut forest = Graph::new(self.members.len());
        for (f, sk) in self.inner.iter().zip(&self.sketches) {
            for (a, b) in sk.spanning_forest()? {
                forest.add_edge(f[a] as usize, f[b] as usize);
            }
        }
        let degrees = self.deg.iter().map(|&d| d.max(0) as usize).collect();
        Ok(TFlowReconstruction::new(self.t, forest, degrees))
    }
}

impl StreamConsumer for TFlowSketcher {
    fn label(&self) -> String {
        format!("tflow#{}", self.id)
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        let (Ok(a), Ok(b)) = (self.members.binary_search(&ev.u), self.members.binary_search(&ev.v)) else {
            return;
        };
        let sign = ev.sign();
        self.deg[a] += sign;
        self.deg[b] += sign;
        let (ca, cb) = (&self.containing[a], &self.containing[b]);
        let (mut i, mut j) = (0, 0);
        while i < ca.len() && j < cb.len() {
            match ca[i].cmp(&cb[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => {
                    let f = ca[i] as usize;
                    let set = &self.inner[f];
                    let pa = set.binary_search(&(a as u32)).expect("member");
                    let pb = set.binary_search(&(b as u32)).expect("member");
                    self.sketches[f].update(pa, pb, sign);
                    i += 1;
                    j += 1;
                }
            }
        }
    }

    fn words(&self) -> usize {
        let family: usize = self.inner.iter().map(Vec::len).sum();
        self.members.len() + 2 * family + self.deg.len() + self.sketches.iter().map(|s| s.words()).sum::<usize>()
    }

    fn space_bound(&self) -> Option<SpaceBound> {
        None
    }
}

const MEMO_PER_VERTEX: usize = 4;

/// Post-processed t-flow reconstruction over local ids `0..n`.
///
/// `G'` is the union of the sketched forests. A pair outside `G'` is an edge
/// of the reconstruction when no set of at most `t` other vertices
/// disconnects it in `G' - S`. For every `S`, the forests of the family
/// members avoiding `S` span the components of `G - S`, so `G' - S` and
/// `G - S` have the same components.
#[derive(Debug)]
pub struct TFlowReconstruction {
    t: usize,
    forest: Graph,
    degrees: Vec<usize>,
    memo: Mutex<HashMap<(u32, u32), bool>>,
    accepted: bool,
}

impl TFlowReconstruction {
    fn new(t: usize, forest: Graph, degrees: Vec<usize>) -> Self {
        let mut r = Self { t, forest, degrees, memo: Mutex::new(HashMap::new()), accepted: false };
        let n = r.n();
        let mut deg_tilde = vec![0usize; n];
        for x in 0..n {
            for y in x + 1..n {
                if r.forest.has_edge(x, y) || !r.separated(x, y) {
                    deg_tilde[x] += 1;
                    deg_tilde[y] += 1;
                }
            }
        }
        r.accepted = deg_tilde == r.degrees;
        r
    }

    pub fn n(&self) -> usize {
        self.forest.n()
    }

    /// Degree test passed: the reconstruction equals the input graph.
    pub fn accepted(&self) -> bool {
        self.accepted
    }

    /// The explicit union forest `G'`.
    pub fn forest(&self) -> &Graph {
        &self.forest
    }

    pub fn degrees(&self) -> &[usize] {
        &self.degrees
    }

    pub fn has_edge(&self, x: usize, y: usize) -> bool {
        if x == y {
            return false;
        }
        if self.forest.has_edge(x, y) {
            return true;
        }
        let key = (x.min(y) as u32, x.max(y) as u32);
        if let Some(&v) = self.memo.lock().expect("memo").get(&key) {
            return v;
        }
        let v = !self.separated(x, y);
        let mut memo = self.memo.lock().expect("memo");
        // Bounded so the representation stays linear in n.
        if memo.len() < MEMO_PER_VERTEX * self.n() {
            memo.insert(key, v);
        }
        v
    }

    /// Some set of at most `t` vertices avoiding `x, y` disconnects them in `G' - S`.
    fn separated(&self, x: usize, y: usize) -> bool {
        let n = self.n();
        let mut seen = VertexSet::new(n);
        let mut stack = Vec::new();
        any_subset_up_to(n, self.t, |s| {
            if s.contains(&x) || s.contains(&y) {
                return false;
            }
            seen.clear();
            for &v in s {
                seen.insert(v);
            }
            seen.insert(x);
            stack.clear();
            stack.push(x);
            while let Some(u) = stack.pop() {
                for w in self.forest.neighbors(u).iter() {
                    if w == y {
                        return false;
                    }
                    if seen.insert(w) {
                        stack.push(w);
                    }
                }
            }
            true
        })
    }

    /// Greedy simplicial elimination over the edge oracle.
    pub fn has_perfect_elimination_order(&self) -> bool {
        let n = self.n();
        let mut alive = VertexSet::full(n);
        'outer: while !alive.is_empty() {
            for v in alive.to_vec() {
                let nb: Vec<usize> = alive.iter().filter(|&u| self.has_edge(v, u)).collect();
                if nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| self.has_edge(a, b))) {
                    alive.remove(v);
                    continue 'outer;
                }
            }
            return false;
        }
        true
    }

    /// Words held after post-processing: forest, degrees and memoised pairs.
    pub fn words(&self) -> usize {
        2 * self.forest.m() + self.degrees.len() + self.memo.lock().map(|m| m.len()).unwrap_or(0)
    }

    pub fn to_graph(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        for x in 0..n {
            for y in x + 1..n {
                if self.has_edge(x, y) {
                    g.add_edge(x, y);
                }
            }
        }
        g
    }
}

fn sketch_whole(replay: &mut Replay<'_>, t: usize, seed: u64) -> Result<TFlowReconstruction, BlockError> {
    let n = replay.stream().n();
    let mut sk = [TFlowSketcher::new(0, t, (0..n as u32).collect(), seed)];
    replay.replay(1, &mut sk)?;
    let rec = sk[0].finish()?;
    replay.charge(crate::stream::Phase::Post, "tflow-post", rec.words())?;
    Ok(rec)
}

/// One pass; the reconstruction is exact when [`TFlowReconstruction::accepted`].
pub fn reconstruct_tflow(stream: &Stream, t: usize, seed: u64) -> Result<TFlowReconstruction, BlockError> {
    sketch_whole(&mut Replay::new(stream), t, seed)
}

/// t-block graphs are the chordal t-flow graphs. Returns the reconstruction and the verdict.
pub fn reconstruct_tblock(stream: &Stream, t: usize, seed: u64) -> Result<(TFlowReconstruction, bool), BlockError> {
    let rec = reconstruct_tflow(stream, t, seed)?;
    let ok = rec.accepted() && rec.has_perfect_elimination_order();
    Ok((rec, ok))
}

// ---------------------------------------------------------------------------
// Block Vertex Deletion

/// Number of maximal cliques containing `v`, by lexicographic extension from `{v}`.
pub fn count_cliques_containing(g: &Graph, v: usize) -> u64 {
    let n = g.n();
    // sigma puts v first, then the rest by index.
    let mut order = vec![v];
    order.extend((0..n).filter(|&u| u != v));
    let mut x = VertexSet::from_iter_cap(n, [v]);
    let mut members = vec![v];
    count_from(g, &order, 0, &mut x, &mut members)
}

fn common_neighbour(g: &Graph, members: &[usize], u: usize) -> bool {
    members.iter().all(|&w| g.has_edge(w, u))
}

fn count_from(g: &Graph, order: &[usize], last: usize, x: &mut VertexSet, members: &mut Vec<usize>) -> u64 {
    let mut total = 0;
    let mut extended = false;
    for (r, &u) in order.iter().enumerate().skip(last + 1) {
        if x.contains(u) || !common_neighbour(g, members, u) {
            continue;
        }
        extended = true;
        x.insert(u);
        members.push(u);
        total += count_from(g, order, r, x, members);
        members.pop();
        x.remove(u);
    }
    if extended {
        return total;
    }
    // A leaf is counted only when nothing at all extends it, not merely nothing later in sigma.
    let maximal = order.iter().all(|&u| x.contains(u) || !common_neighbour(g, members, u));
    u64::from(maximal)
}

pub fn clique_counts(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| count_cliques_containing(g, v)).collect()
}

/// Repeatedly removes vertices lying in a single maximal clique. Returns the
/// remaining graph and its vertex map.
pub fn peel_single_clique_vertices(g: &Graph) -> (Graph, Vec<usize>) {
    let mut cur = g.clone();
    let mut map: Vec<usize> = (0..g.n()).collect();
    loop {
        let Some(v) = (0..cur.n()).find(|&v| count_cliques_containing(&cur, v) == 1) else {
            return (cur, map);
        };
        let (next, m) = cur.delete(&VertexSet::from_iter_cap(cur.n(), [v]));
        map = m.into_iter().map(|i| map[i]).collect();
        cur = next;
    }
}

/// Degree-2 vertices whose two neighbours also have degree 2.
pub fn marks(g: &Graph) -> Vec<bool> {
    (0..g.n()).map(|v| g.degree(v) == 2 && g.neighbors(v).iter().all(|u| g.degree(u) == 2)).collect()
}

/// An induced C4 or diamond, as four vertices.
pub fn find_c4_or_d4(g: &Graph) -> Option<[usize; 4]> {
    let n = g.n();
    for a in 0..n {
        for b in a + 1..n {
            for c in b + 1..n {
                for d in c + 1..n {
                    let q = [a, b, c, d];
                    let mut deg = [0usize; 4];
                    let mut edges = 0;
                    for i in 0..4 {
                        for j in i + 1..4 {
                            if g.has_edge(q[i], q[j]) {
                                deg[i] += 1;
                                deg[j] += 1;
                                edges += 1;
                            }
                        }
                    }
                    let c4 = edges == 4 && deg.iter().all(|&x| x == 2);
                    let d4 = edges == 5;
                    if c4 || d4 {
                        return Some(q);
                    }
                }
            }
        }
    }
    None
}

/// Repetition constant for the randomized stage.
pub const BVD_REPETITION_C: f64 = 3.0;

/// `ceil(c * 17^k)` randomized runs.
pub fn bvd_repetitions(c: f64, k: usize) -> u64 {
    (c * 17f64.powi(k as i32)).ceil() as u64
}

/// Components that are plain cycles, as vertex sets.
fn isolated_cycles(g: &Graph) -> Vec<VertexSet> {
    g.component_sets().into_iter().filter(|c| c.len() >= 4 && c.iter().all(|v| g.degree(v) == 2)).collect()
}

/// One randomized attempt on a {C4, D4}-free graph. Every sampled vertex is unmarked when chosen.
fn randomized_run(g: &Graph, budget: usize, rng: &mut crate::util::Rng, sampled_marked: &mut bool) -> Option<Vec<usize>> {
    let mut cur = g.clone();
    let mut map: Vec<usize> = (0..g.n()).collect();
    let mut sol = Vec::new();
    loop {
        let (peeled, pm) = peel_single_clique_vertices(&cur);
        map = pm.into_iter().map(|i| map[i]).collect();
        cur = peeled;
        let cycles = isolated_cycles(&cur);
        if !cycles.is_empty() {
            let mut drop = VertexSet::new(cur.n());
            for c in &cycles {
                if sol.len() == budget {
                    return None;
                }
                sol.push(map[c.first().expect("nonempty cycle")]);
                drop.union_with(c);
            }
            let (next, m) = cur.delete(&drop);
            map = m.into_iter().map(|i| map[i]).collect();
            cur = next;
            continue;
        }
        if cur.n() == 0 {
            return Some(sol);
        }
        if sol.len() == budget {
            return None;
        }
        let marked = marks(&cur);
        let weight: Vec<u64> = (0..cur.n()).map(|v| if marked[v] { 0 } else { count_cliques_containing(&cur, v) }).collect();
        let total: u64 = weight.iter().sum();
        if total == 0 {
            return None;
        }
        let mut pick = rng.random_range(0..total);
        let v = weight.iter().position(|&w| {
            if pick < w {
                true
            } else {
                pick -= w;
                false
            }
        })?;
        *sampled_marked |= marked[v];
        sol.push(map[v]);
        let (next, m) = cur.delete(&VertexSet::from_iter_cap(cur.n(), [v]));
        map = m.into_iter().map(|i| map[i]).collect();
        cur = next;
    }
}

fn stage_two(g: &Graph, budget: usize, seed: u64, c: f64, stats: &mut WorkStats) -> Option<Vec<usize>> {
    let mut rng = rng_for(seed, 0xb7d);
    let mut marked = false;
    for _ in 0..bvd_repetitions(c, budget) {
        stats.nodes += 1;
        if let Some(sol) = randomized_run(g, budget, &mut rng, &mut marked) {
            debug_assert!(!marked);
            return Some(sol);
        }
    }
    None
}

fn stage_one(g: &Graph, budget: usize, seed: u64, c: f64, stats: &mut WorkStats) -> Option<Vec<usize>> {
    stats.nodes += 1;
    let Some(quad) = find_c4_or_d4(g) else {
        return stage_two(g, budget, seed, c, stats);
    };
    if budget == 0 {
        return None;
    }
    for (i, &v) in quad.iter().enumerate() {
        let (h, map) = g.delete(&VertexSet::from_iter_cap(g.n(), [v]));
        if let Some(rest) = stage_one(&h, budget - 1, splitmix64(seed ^ i as u64), c, stats) {
            let mut sol: Vec<usize> = rest.into_iter().map(|u| map[u]).collect();
            sol.push(v);
            return Some(sol);
        }
    }
    None
}

/// Block Vertex Deletion: branching on C4 and diamonds, then `ceil(3 * 17^k')`
/// randomized runs per branch. Returned solutions are always verified.
pub fn solve_bvd(g: &Graph, k: usize, seed: u64) -> SolveResult {
    solve_bvd_with(g, k, seed, BVD_REPETITION_C)
}

/// [`solve_bvd`] with `ceil(c * 17^k')` runs instead.
pub fn solve_bvd_with(g: &Graph, k: usize, seed: u64, c: f64) -> SolveResult {
    let mut stats = WorkStats::default();
    match stage_one(g, k, seed, c, &mut stats) {
        Some(sol) => {
            let (h, _) = g.delete(&VertexSet::from_iter_cap(g.n(), sol.iter().copied()));
            assert!(is_block_graph(&h) && sol.len() <= k, "block deletion produced an invalid solution");
            SolveResult::yes(sol, stats)
        }
        None => SolveResult::no(stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    fn stream(g: &Graph) -> Stream {
        Stream::from_graph(g, 0, None)
    }

    #[test]
    fn tflow_examples() {
        let tree = Graph::from_edges(6, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5)]);
        let r = reconstruct_tflow(&stream(&tree), 1, 3).unwrap();
        assert!(r.accepted());
        assert_eq!(r.to_graph().edges().collect::<Vec<_>>(), tree.edges().collect::<Vec<_>>());
        assert!(reconstruct_tflow(&stream(&complete(4)), 1, 3).unwrap().accepted());
        assert!(!reconstruct_tflow(&stream(&cycle(4)), 1, 3).unwrap().accepted());
    }

    #[test]
    fn tblock_examples() {
        assert!(!reconstruct_tblock(&stream(&diamond()), 1, 1).unwrap().1);
        assert!(!reconstruct_tblock(&stream(&cycle(4)), 1, 1).unwrap().1);
        let paw = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert!(reconstruct_tblock(&stream(&paw), 1, 1).unwrap().1);
    }

    #[test]
    fn clique_count_examples() {
        assert_eq!(count_cliques_containing(&complete(4), 2), 1);
        assert_eq!(count_cliques_containing(&diamond(), 1), 2);
        // Lower-index neighbours must still block a non-maximal leaf.
        assert_eq!(count_cliques_containing(&complete(3), 2), 1);
        assert_eq!(count_cliques_containing(&Graph::new(2), 0), 1);
        assert_eq!(count_cliques_containing(&cycle(5), 0), 2);
    }

    #[test]
    fn peeling() {
        let paw = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert_eq!(peel_single_clique_vertices(&paw).0.n(), 0);
        assert_eq!(peel_single_clique_vertices(&cycle(5)).0.n(), 5);
    }

    #[test]
    fn bvd_examples() {
        let r = solve_bvd(&diamond(), 1, 0);
        assert_eq!(r.solution.map(|s| s.len()), Some(1));
        assert!(solve_bvd(&cycle(6), 1, 0).is_yes());
        assert!(!solve_bvd(&cycle(6), 0, 0).is_yes());
        let mut two = Graph::new(8);
        for (a, b) in diamond().edges() {
            two.add_edge(a, b);
            two.add_edge(a + 4, b + 4);
        }
        assert!(!solve_bvd(&two, 1, 0).is_yes());
        assert!(solve_bvd(&two, 2, 0).is_yes());
    }

    #[test]
    fn marks_on_long_paths() {
        let m = marks(&cycle(5));
        assert!(m.iter().all(|&x| x));
        let p = path(5);
        assert_eq!(marks(&p), vec![false, false, true, false, false]);
    }
}
