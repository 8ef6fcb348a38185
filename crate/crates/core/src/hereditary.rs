//! Vertex deletion to hereditary classes with infinitely many obstructions.
//!
//! A class plugs in through a [`ReconstructionAdapter`]: a multi-pass stream
//! consumer that either reconstructs the subgraph induced by its vertex set
//! or reports that the subgraph is outside the class. One adapter runs per
//! member of a pair-separating family, all in shared passes. Pairs never
//! covered by a reconstructed member form the forced-pair graph `G'`; every
//! solution is a vertex cover of it, so post-processing enumerates its
//! minimal vertex covers `X` and hands `G~ - X` to a static solver.

use std::sync::Arc;

use crate::block::{solve_bvd, TFlowReconstruction, TFlowSketcher};
use crate::derand::pair_cover;
use crate::graph::{Graph, VertexSet};
use crate::interval::{default_attempts, is_proper_interval, static_pivd, IntervalOrder, PivReconstructor};
use crate::solvers::classes::is_block_graph;
use crate::solvers::{SolveResult, WorkStats};
use crate::solvers::vertex_cover::enumerate_min_vertex_covers_with;
use crate::stream::{Phase, Problem, Replay, SpaceLedger, Stream, StreamConsumer, StreamError, StreamEvent};
use crate::util::splitmix64;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum HereditaryError {
    #[error("problem {0} has no reconstruction adapter")]
    Unsupported(Problem),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Exact edge queries against a reconstructed graph on local ids `0..n`.
pub trait EdgeOracle: Send + Sync + std::fmt::Debug {
    fn n(&self) -> usize;
    fn has_edge(&self, u: usize, v: usize) -> bool;
    fn words(&self) -> usize;
}

impl EdgeOracle for IntervalOrder {
    fn n(&self) -> usize {
        IntervalOrder::n(self)
    }
    fn has_edge(&self, u: usize, v: usize) -> bool {
        IntervalOrder::has_edge(self, u, v)
    }
    fn words(&self) -> usize {
        IntervalOrder::words(self)
    }
}

impl EdgeOracle for TFlowReconstruction {
    fn n(&self) -> usize {
        TFlowReconstruction::n(self)
    }
    fn has_edge(&self, u: usize, v: usize) -> bool {
        TFlowReconstruction::has_edge(self, u, v)
    }
    fn words(&self) -> usize {
        TFlowReconstruction::words(self)
    }
}

impl EdgeOracle for Graph {
    fn n(&self) -> usize {
        Graph::n(self)
    }
    fn has_edge(&self, u: usize, v: usize) -> bool {
        Graph::has_edge(self, u, v)
    }
    fn words(&self) -> usize {
        self.n() + 2 * self.m()
    }
}

#[derive(Clone, Debug)]
pub struct ReconstructionOutcome {
    pub in_class: bool,
    /// Present exactly when `in_class`.
    pub representation: Option<Arc<dyn EdgeOracle>>,
    /// The randomized reconstruction gave up without a verdict.
    pub failed: bool,
}

impl ReconstructionOutcome {
    pub fn accepted(rep: Arc<dyn EdgeOracle>) -> Self {
        Self { in_class: true, representation: Some(rep), failed: false }
    }

    pub fn rejected() -> Self {
        Self { in_class: false, representation: None, failed: false }
    }

    pub fn failure() -> Self {
        Self { in_class: false, representation: None, failed: true }
    }
}

/// Plug-in contract for a class. Implementations must be pure functions of
/// the event sequence and their seed, so many can share passes.
pub trait ReconstructionAdapter: StreamConsumer + Send {
    /// Upper bound on the passes this adapter reads.
    fn passes_needed(&self) -> usize;
    /// Called after every pass the adapter took part in.
    fn end_pass(&mut self);
    fn finished(&self) -> bool;
    fn finalize(self) -> ReconstructionOutcome;
}

impl ReconstructionAdapter for PivReconstructor {
    fn passes_needed(&self) -> usize {
        self.pass_budget()
    }

    fn end_pass(&mut self) {
        PivReconstructor::end_pass(self);
    }

    fn finished(&self) -> bool {
        PivReconstructor::finished(self)
    }

    fn finalize(self) -> ReconstructionOutcome {
        match self.into_outcome() {
            Some(Ok(order)) => ReconstructionOutcome::accepted(Arc::new(order)),
            Some(Err(e)) if e.is_negative() => ReconstructionOutcome::rejected(),
            _ => ReconstructionOutcome::failure(),
        }
    }
}

/// One-pass t-block reconstruction of an induced subgraph.
#[derive(Clone, Debug)]
pub struct BlockAdapter {
    inner: TFlowSketcher,
    done: bool,
}

impl BlockAdapter {
    pub fn new(id: usize, t: usize, members: Vec<u32>, seed: u64) -> Self {
        Self { inner: TFlowSketcher::new(id, t, members, seed), done: false }
    }
}

impl StreamConsumer for BlockAdapter {
    fn label(&self) -> String {
        self.inner.label()
    }

    fn on_event(&mut self, pass: usize, event: &StreamEvent) {
        self.inner.on_event(pass, event);
    }

    fn words(&self) -> usize {
        self.inner.words()
    }
}

impl ReconstructionAdapter for BlockAdapter {
    fn passes_needed(&self) -> usize {
        1
    }

    fn end_pass(&mut self) {
        self.done = true;
    }

    fn finished(&self) -> bool {
        self.done
    }

    fn finalize(self) -> ReconstructionOutcome {
        match self.inner.finish() {
            Ok(rec) if rec.accepted() && rec.has_perfect_elimination_order() => ReconstructionOutcome::accepted(Arc::new(rec)),
            Ok(_) => ReconstructionOutcome::rejected(),
            Err(_) => ReconstructionOutcome::failure(),
        }
    }
}

/// Classes with a reconstruction adapter and a static deletion solver.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum HereditaryClass {
    ProperInterval,
    Block,
}

impl HereditaryClass {
    pub fn for_problem(p: Problem) -> Result<Self, HereditaryError> {
        match p {
            Problem::Pivd => Ok(Self::ProperInterval),
            Problem::Bvd => Ok(Self::Block),
            other => Err(HereditaryError::Unsupported(other)),
        }
    }

    pub fn problem(self) -> Problem {
        match self {
            Self::ProperInterval => Problem::Pivd,
            Self::Block => Problem::Bvd,
        }
    }

    pub fn contains(self, g: &Graph) -> bool {
        match self {
            Self::ProperInterval => is_proper_interval(g),
            Self::Block => is_block_graph(g),
        }
    }

    pub fn static_solve(self, g: &Graph, k: usize, seed: u64) -> SolveResult {
        match self {
            Self::ProperInterval => static_pivd(g, k),
            Self::Block => solve_bvd(g, k, seed),
        }
    }
}

/// Either adapter, so one replay slice can hold a whole family.
#[derive(Debug)]
pub enum ClassAdapter {
    Piv(Box<PivReconstructor>),
    Block(BlockAdapter),
}

impl ClassAdapter {
    pub fn new(class: HereditaryClass, id: usize, members: Vec<u32>, seed: u64) -> Self {
        let seed = splitmix64(seed ^ (id as u64).rotate_left(32));
        match class {
            HereditaryClass::ProperInterval => {
                let attempts = default_attempts(members.len());
                Self::Piv(Box::new(PivReconstructor::new(id, members, attempts, seed)))
            }
            HereditaryClass::Block => Self::Block(BlockAdapter::new(id, 1, members, seed)),
        }
    }
}

impl StreamConsumer for ClassAdapter {
    fn label(&self) -> String {
        match self {
            Self::Piv(a) => a.label(),
            Self::Block(a) => a.label(),
        }
    }

    fn pass_budget(&self) -> usize {
        self.passes_needed()
    }

    fn on_event(&mut self, pass: usize, event: &StreamEvent) {
        match self {
            Self::Piv(a) => a.on_event(pass, event),
            Self::Block(a) => a.on_event(pass, event),
        }
    }

    fn words(&self) -> usize {
        match self {
            Self::Piv(a) => a.words(),
            Self::Block(a) => a.words(),
        }
    }
}

impl ReconstructionAdapter for ClassAdapter {
    fn passes_needed(&self) -> usize {
        match self {
            Self::Piv(a) => a.passes_needed(),
            Self::Block(a) => a.passes_needed(),
        }
    }

    fn end_pass(&mut self) {
        match self {
            Self::Piv(a) => ReconstructionAdapter::end_pass(a.as_mut()),
            Self::Block(a) => ReconstructionAdapter::end_pass(a),
        }
    }

    fn finished(&self) -> bool {
        match self {
            Self::Piv(a) => ReconstructionAdapter::finished(a.as_ref()),
            Self::Block(a) => a.finished(),
        }
    }

    fn finalize(self) -> ReconstructionOutcome {
        match self {
            Self::Piv(a) => a.finalize(),
            Self::Block(a) => a.finalize(),
        }
    }
}

/// An adapter joining the run at absolute pass `first`; it sees its own passes numbered from 1.
struct Late<A> {
    inner: A,
    first: usize,
}

impl<A: ReconstructionAdapter> StreamConsumer for Late<A> {
    fn label(&self) -> String {
        self.inner.label()
    }

    fn pass_budget(&self) -> usize {
        self.first - 1 + self.inner.pass_budget()
    }

    fn insertion_only(&self) -> bool {
        self.inner.insertion_only()
    }

    fn on_event(&mut self, pass: usize, event: &StreamEvent) {
        self.inner.on_event(pass + 1 - self.first, event);
    }

    fn words(&self) -> usize {
        self.inner.words()
    }

    fn space_bound(&self) -> Option<crate::stream::SpaceBound> {
        self.inner.space_bound()
    }
}

/// Runs adapters to completion in lock-step passes, starting at absolute pass
/// `first`. Returns outcomes in input order and the last pass used.
pub fn run_adapters<A: ReconstructionAdapter>(
    replay: &mut Replay<'_>,
    adapters: Vec<A>,
    first: usize,
) -> Result<(Vec<ReconstructionOutcome>, usize), StreamError> {
    let total = adapters.len();
    let mut live: Vec<(usize, Late<A>)> = Vec::with_capacity(total);
    let mut out: Vec<Option<ReconstructionOutcome>> = (0..total).map(|_| None).collect();
    for (i, a) in adapters.into_iter().enumerate() {
        if a.finished() {
            out[i] = Some(a.finalize());
        } else {
            live.push((i, Late { inner: a, first }));
        }
    }
    let mut pass = first - 1;
    while !live.is_empty() {
        pass += 1;
        let (ids, mut batch): (Vec<usize>, Vec<Late<A>>) = live.drain(..).unzip();
        replay.replay(pass, &mut batch)?;
        for (i, mut a) in ids.into_iter().zip(batch) {
            a.inner.end_pass();
            if a.inner.finished() {
                out[i] = Some(a.inner.finalize());
            } else {
                live.push((i, a));
            }
        }
    }
    Ok((out.into_iter().map(|o| o.expect("every adapter finished")).collect(), pass))
}

/// Reconstructed pieces of the input over a pair-separating family.
#[derive(Debug)]
pub struct UnionRepresentation {
    n: usize,
    family: Vec<Vec<u32>>,
    outcomes: Vec<ReconstructionOutcome>,
    /// Family members containing each vertex, ascending.
    containing: Vec<Vec<u32>>,
}

impl UnionRepresentation {
    pub fn new(n: usize, family: Vec<Vec<u32>>, outcomes: Vec<ReconstructionOutcome>) -> Self {
        let mut containing = vec![Vec::new(); n];
        for (i, f) in family.iter().enumerate() {
            for &v in f {
                containing[v as usize].push(i as u32);
            }
        }
        Self { n, family, outcomes, containing }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn family(&self) -> &[Vec<u32>] {
        &self.family
    }

    pub fn outcomes(&self) -> &[ReconstructionOutcome] {
        &self.outcomes
    }

    pub fn reconstructed(&self) -> usize {
        self.outcomes.iter().filter(|o| o.in_class).count()
    }

    pub fn failures(&self) -> usize {
        self.outcomes.iter().filter(|o| o.failed).count()
    }

    /// Reconstructed members holding both `u` and `v`, with local positions.
    fn covering(&self, u: usize, v: usize) -> impl Iterator<Item = (&Arc<dyn EdgeOracle>, usize, usize)> + '_ {
        let cv = &self.containing[v];
        self.containing[u].iter().filter(move |f| cv.binary_search(f).is_ok()).filter_map(move |&f| {
            let rep = self.outcomes[f as usize].representation.as_ref()?;
            let set = &self.family[f as usize];
            let pu = set.binary_search(&(u as u32)).ok()?;
            let pv = set.binary_search(&(v as u32)).ok()?;
            Some((rep, pu, pv))
        })
    }

    /// Edge of `G~`: present in some reconstructed member holding both ends.
    pub fn edge_query_union(&self, u: usize, v: usize) -> bool {
        u != v && self.covering(u, v).any(|(rep, pu, pv)| rep.has_edge(pu, pv))
    }

    /// No reconstructed member holds both ends: an edge of `G'`.
    pub fn forced_pair(&self, u: usize, v: usize) -> bool {
        u != v && self.covering(u, v).next().is_none()
    }

    /// `G~ - removed`, with the vertex map.
    pub fn materialize_without(&self, removed: &VertexSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = (0..self.n).filter(|&v| !removed.contains(v)).collect();
        let mut g = Graph::new(map.len());
        for (i, &u) in map.iter().enumerate() {
            for (j, &v) in map.iter().enumerate().skip(i + 1) {
                if self.edge_query_union(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        (g, map)
    }

    pub fn words(&self) -> usize {
        let fam: usize = self.family.iter().map(Vec::len).sum();
        let reps: usize = self.outcomes.iter().filter_map(|o| o.representation.as_ref()).map(|r| r.words()).sum();
        2 * fam + reps + self.outcomes.len()
    }
}

#[derive(Clone, Debug)]
pub struct HereditaryConfig {
    pub seed: u64,
    pub jobs: usize,
    pub passes_cap: Option<usize>,
    pub space_cap: Option<usize>,
}

impl Default for HereditaryConfig {
    fn default() -> Self {
        Self { seed: 0, jobs: 1, passes_cap: None, space_cap: None }
    }
}

/// Streaming phase: one adapter per family member, in shared passes.
pub fn stream_phase(
    replay: &mut Replay<'_>,
    class: HereditaryClass,
    k: usize,
    seed: u64,
) -> Result<(UnionRepresentation, usize), StreamError> {
    let n = replay.stream().n();
    let family = pair_cover(n, k);
    let adapters: Vec<ClassAdapter> =
        family.iter().enumerate().map(|(i, f)| ClassAdapter::new(class, i, f.clone(), seed)).collect();
    let (outcomes, passes) = run_adapters(replay, adapters, 1)?;
    Ok((UnionRepresentation::new(n, family, outcomes), passes))
}

#[derive(Clone, Debug)]
pub struct HereditaryOutcome {
    pub result: SolveResult,
    pub family_size: usize,
    pub reconstructed: usize,
    pub failures: usize,
    pub covers_tried: usize,
    pub passes: usize,
    pub ledger: SpaceLedger,
}

impl HereditaryOutcome {
    pub fn report_lines(&self) -> Vec<String> {
        let mut out = vec![
            format!("family_size={}", self.family_size),
            format!("reconstructed={}", self.reconstructed),
            format!("reconstruction_failures={}", self.failures),
            format!("vertex_covers_tried={}", self.covers_tried),
            format!("branch_nodes={}", self.result.stats.nodes),
        ];
        out.extend(self.ledger.report_lines());
        out
    }
}

/// Streams the candidate solution's complement through a fresh adapter to confirm it.
fn verify_solution(
    replay: &mut Replay<'_>,
    class: HereditaryClass,
    solution: &[usize],
    pass: &mut usize,
    seed: u64,
) -> Result<bool, StreamError> {
    let n = replay.stream().n();
    let removed = VertexSet::from_iter_cap(n, solution.iter().copied());
    let keep: Vec<u32> = (0..n).filter(|&v| !removed.contains(v)).map(|v| v as u32).collect();
    let adapter = ClassAdapter::new(class, usize::MAX >> 1, keep, splitmix64(seed ^ 0x7e51));
    let (out, last) = run_adapters(replay, vec![adapter], *pass + 1)?;
    *pass = last;
    Ok(out[0].in_class)
}

/// End-to-end deletion to `class` with at most `k` vertices.
pub fn solve_stream(
    stream: &Stream,
    class: HereditaryClass,
    k: usize,
    config: &HereditaryConfig,
) -> Result<HereditaryOutcome, HereditaryError> {
    let mut replay = Replay::new(stream).with_caps(config.passes_cap, config.space_cap).with_jobs(config.jobs);
    let (rep, mut pass) = stream_phase(&mut replay, class, k, config.seed)?;
    replay.charge(Phase::Post, "hereditary/rep", rep.words())?;
    let n = rep.n();
    let mut stats = WorkStats::default();
    let mut covers = 0usize;
    let mut found: Option<Vec<usize>> = None;
    let mut err: Option<StreamError> = None;
    let adjacent = |u: usize, v: usize| rep.forced_pair(u, v);
    enumerate_min_vertex_covers_with(n, k, &adjacent, &mut |x| {
        covers += 1;
        let (h, map) = rep.materialize_without(x);
        if let Err(e) = replay.charge(Phase::Post, "hereditary/residual", h.n() + 2 * h.m()) {
            err = Some(e);
            return true;
        }
        let r = class.static_solve(&h, k - x.len(), splitmix64(config.seed ^ covers as u64));
        stats.nodes += r.stats.nodes;
        let Some(rest) = r.solution else { return false };
        let mut sol: Vec<usize> = x.iter().chain(rest.into_iter().map(|u| map[u])).collect();
        sol.sort_unstable();
        match verify_solution(&mut replay, class, &sol, &mut pass, config.seed) {
            Ok(true) => {
                found = Some(sol);
                true
            }
            Ok(false) => false,
            Err(e) => {
                err = Some(e);
                true
            }
        }
    });
    if let Some(e) = err {
        return Err(e.into());
    }
    let result = match found {
        Some(sol) => SolveResult::yes(sol, stats),
        None => SolveResult::no(stats),
    };
    Ok(HereditaryOutcome {
        result,
        family_size: rep.family().len(),
        reconstructed: rep.reconstructed(),
        failures: rep.failures(),
        covers_tried: covers,
        passes: pass,
        ledger: replay.ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    fn run(g: &Graph, class: HereditaryClass, k: usize) -> HereditaryOutcome {
        solve_stream(&Stream::from_graph(g, k, Some(class.problem())), class, k, &HereditaryConfig::default()).unwrap()
    }

    #[test]
    fn block_adapter_on_tree_reconstructs_everything() {
        let tree = Graph::from_edges(7, [(0, 1), (1, 2), (1, 3), (3, 4), (4, 5), (4, 6)]);
        let s = Stream::from_graph(&tree, 1, None);
        let mut replay = Replay::new(&s);
        let (rep, passes) = stream_phase(&mut replay, HereditaryClass::Block, 1, 3).unwrap();
        assert_eq!(passes, 1);
        assert_eq!(rep.reconstructed(), rep.family().len());
        for u in 0..7 {
            for v in 0..7 {
                assert_eq!(rep.edge_query_union(u, v), tree.has_edge(u, v));
                assert!(!rep.forced_pair(u, v));
            }
        }
    }

    #[test]
    fn k5_is_a_block_graph() {
        let s = Stream::from_graph(&complete(5), 1, None);
        let (rep, _) = stream_phase(&mut Replay::new(&s), HereditaryClass::Block, 1, 0).unwrap();
        assert_eq!(rep.reconstructed(), rep.family().len());
    }

    #[test]
    fn net_member_is_rejected() {
        let s = Stream::from_graph(&net(), 1, None);
        let (rep, _) = stream_phase(&mut Replay::new(&s), HereditaryClass::ProperInterval, 1, 0).unwrap();
        let whole = rep.family().iter().position(|f| f.len() == 6);
        if let Some(i) = whole {
            assert!(!rep.outcomes()[i].in_class);
        }
        assert!(rep.outcomes().iter().zip(rep.family()).all(|(o, f)| o.in_class || f.len() == 6 || o.failed));
    }

    #[test]
    fn examples() {
        let r = run(&path(5), HereditaryClass::ProperInterval, 0);
        assert_eq!(r.result.solution, Some(vec![]));
        let r = run(&diamond(), HereditaryClass::Block, 1);
        assert_eq!(r.result.solution.as_ref().map(Vec::len), Some(1));
        let r = run(&cycle(5), HereditaryClass::ProperInterval, 1);
        assert_eq!(r.result.solution.as_ref().map(Vec::len), Some(1));
        assert!(!run(&cycle(5), HereditaryClass::ProperInterval, 0).result.is_yes());
        assert!(!run(&claw(), HereditaryClass::ProperInterval, 0).result.is_yes());
    }
}
