//! One-pass cut problems: Odd Cycle Transversal, Subset Feedback Vertex Set
//! and Multiway Cut.
//!
//! All three share a sampling step: `l = ceil(64 q k^3 ln n)` vertex subsets,
//! each vertex kept with probability `1/(2k)`. Every sampled subgraph gets a
//! connectivity sketch (of its double cover for OCT); the recovered forests
//! form a sparse subgraph on which a static solver runs. Sketches are built,
//! fed and reduced in batches that all belong to the same logical pass, and
//! the ledger charges their sum.

use std::collections::BTreeMap;
use std::fmt::Write as _;

use rand::Rng as _;

use crate::graph::{Graph, VertexSet};
use crate::sketch::{is_bipartite, ConnectivitySketch, CoverSketch, SketchError, SparseRecovery, DEFAULT_C};
use crate::solvers::classes::is_bipartite as is_bipartite_graph;
use crate::solvers::cuts::{solve_mwc_static, solve_sfvs_static};
use crate::solvers::oct::solve_oct_static;
use crate::solvers::{Instance, SolveResult, SolverError, WorkStats};
use crate::stream::{materialize, Phase, Problem, Replay, SpaceLedger, Stream, StreamConsumer, StreamError, StreamEvent};
use crate::util::{any_subset_up_to, rng_for, splitmix64};

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum CutError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("sketch failure: {0}")]
    Sketch(#[from] SketchError),
    #[error("terminal edge store could not be decoded")]
    StoreFailure,
    #[error("sampling check needs {needed} sets, above the cap of {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// `ceil(64 q k^3 ln n)`.
pub fn ell(n: usize, k: usize, q: usize) -> usize {
    (64.0 * q as f64 * (k as f64).powi(3) * (n.max(1) as f64).ln()).ceil() as usize
}

/// The sampling step. Subsets are regenerated from the seed on demand.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SampleSpec {
    pub n: usize,
    pub k: usize,
    pub q: usize,
    /// Subsets actually drawn (after the optional cap).
    pub ell: usize,
    /// The formula's value.
    pub ell_formula: usize,
    pub seed: u64,
}

impl SampleSpec {
    pub fn capped(&self) -> bool {
        self.ell < self.ell_formula
    }

    /// Subset `i`, sorted: each vertex independently with probability `1/(2k)`.
    pub fn subset(&self, i: usize) -> Vec<u32> {
        let mut rng = rng_for(self.seed, 0x5a3_91e ^ ((i as u64) << 8));
        let p = 1.0 / (2 * self.k) as f64;
        (0..self.n as u32).filter(|_| rng.random_bool(p)).collect()
    }

    pub fn subsets(&self) -> impl Iterator<Item = Vec<u32>> + '_ {
        (0..self.ell).map(|i| self.subset(i))
    }
}

pub fn sample_subsets(n: usize, k: usize, q: usize, seed: u64, ell_cap: Option<usize>) -> Result<SampleSpec, CutError> {
    if k == 0 || q == 0 || n == 0 {
        return Err(CutError::InvalidParams(format!("sampling needs n, k, q >= 1 (n={n}, k={k}, q={q})")));
    }
    let formula = ell(n, k, q);
    let ell = ell_cap.map_or(formula, |c| c.min(formula));
    Ok(SampleSpec { n, k, q, ell, ell_formula: formula, seed })
}

/// Does the sample satisfy the witness-preservation event? For every `S` of
/// at most `k` vertices that misses some witness, some witness must have all
/// its edges inside the sampled subgraphs that avoid `S`. Witnesses are edge lists.
pub fn check_sampling_event(
    n: usize,
    k: usize,
    subsets: &[Vec<u32>],
    witnesses: &[Vec<(usize, usize)>],
    cap: u64,
) -> Result<bool, CutError> {
    let needed = crate::util::binomial_prefix_sum(n as u64, k as u64);
    if needed > cap {
        return Err(CutError::CapExceeded { needed, cap });
    }
    let member: Vec<VertexSet> =
        subsets.iter().map(|s| VertexSet::from_iter_cap(n, s.iter().map(|&v| v as usize))).collect();
    let violated = any_subset_up_to(n, k, |s| {
        let hit = |w: &Vec<(usize, usize)>| w.iter().any(|&(a, b)| s.contains(&a) || s.contains(&b));
        if witnesses.iter().all(hit) {
            return false;
        }
        let avoiding: Vec<&VertexSet> = member.iter().filter(|m| s.iter().all(|&v| !m.contains(v))).collect();
        let covered = |w: &Vec<(usize, usize)>| {
            w.iter().all(|&(a, b)| avoiding.iter().any(|m| m.contains(a) && m.contains(b)))
        };
        !witnesses.iter().any(covered)
    });
    Ok(!violated)
}

// ---------------------------------------------------------------------------
// Consumers

#[derive(Clone, Debug)]
enum SketchKind {
    Plain(ConnectivitySketch),
    Cover(CoverSketch),
}

/// Sketch of one sampled subgraph `G[V_i]`.
#[derive(Clone, Debug)]
pub struct SampleSketch {
    id: usize,
    members: Vec<u32>,
    kind: SketchKind,
}

impl SampleSketch {
    pub fn new(id: usize, members: Vec<u32>, cover: bool, seed: u64) -> Self {
        let m = members.len();
        let seed = splitmix64(seed ^ (id as u64).wrapping_mul(0x9e37_79b9));
        let kind = if cover {
            SketchKind::Cover(CoverSketch::new(m, DEFAULT_C, seed))
        } else {
            SketchKind::Plain(ConnectivitySketch::new(m, DEFAULT_C, seed))
        };
        Self { id, members, kind }
    }

    /// `H_i` in global ids: the forest edges, or for a double cover the
    /// original edges with a copy in the cover's forest.
    pub fn reduce(&self) -> Result<Vec<(usize, usize)>, SketchError> {
        let g = |x: usize| self.members[x] as usize;
        let mut out: Vec<(usize, usize)> = match &self.kind {
            SketchKind::Plain(s) => s.spanning_forest()?.into_iter().map(|(a, b)| (g(a), g(b))).collect(),
            SketchKind::Cover(c) => c
                .sketch
                .spanning_forest()?
                .into_iter()
                .map(|(a, b)| (g(c.map.project(a)), g(c.map.project(b))))
                .collect(),
        };
        for e in &mut out {
            *e = (e.0.min(e.1), e.0.max(e.1));
        }
        out.sort_unstable();
        out.dedup();
        Ok(out)
    }
}

impl StreamConsumer for SampleSketch {
    fn label(&self) -> String {
        format!("sample#{}", self.id)
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        let (Ok(a), Ok(b)) = (self.members.binary_search(&ev.u), self.members.binary_search(&ev.v)) else {
            return;
        };
        match &mut self.kind {
            SketchKind::Plain(s) => s.update(a, b, ev.sign()),
            SketchKind::Cover(c) => c.update(a, b, ev.sign()),
        }
    }

    fn words(&self) -> usize {
        self.members.len()
            + match &self.kind {
                SketchKind::Plain(s) => s.words(),
                SketchKind::Cover(c) => c.words(),
            }
    }
}

/// Terminal flags plus, optionally, a sparse-recovery store of terminal edges and their count.
#[derive(Clone, Debug)]
pub struct TerminalStore {
    n: usize,
    terminals: VertexSet,
    store: Option<SparseRecovery>,
    count: i64,
}

impl TerminalStore {
    /// Without `capacity` only the terminal set is tracked.
    pub fn new(stream: &Stream, capacity: Option<usize>) -> Self {
        let n = stream.n();
        let terminals = VertexSet::from_iter_cap(n, stream.header.terminals.iter().flatten().copied());
        let universe = (n as u64) * (n as u64);
        Self { n, terminals, store: capacity.map(|c| SparseRecovery::new(c, universe)), count: 0 }
    }

    pub fn terminals(&self) -> &VertexSet {
        &self.terminals
    }

    pub fn count(&self) -> i64 {
        self.count
    }

    pub fn edges(&self) -> Result<Vec<(usize, usize)>, CutError> {
        let Some(store) = &self.store else { return Ok(Vec::new()) };
        let items = store.recover().items().ok_or(CutError::StoreFailure)?;
        let n = self.n as u64;
        Ok(items.into_iter().map(|x| ((x / n) as usize, (x % n) as usize)).collect())
    }
}

impl StreamConsumer for TerminalStore {
    fn label(&self) -> String {
        "terminals".into()
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        let (u, v) = ev.endpoints();
        if ev.term_u {
            self.terminals.insert(u);
        }
        if ev.term_v {
            self.terminals.insert(v);
        }
        if let Some(store) = &mut self.store {
            if self.terminals.contains(u) || self.terminals.contains(v) {
                let (a, b) = (u.min(v) as u64, u.max(v) as u64);
                store.update(a * self.n as u64 + b, ev.sign());
                self.count += ev.sign();
            }
        }
    }

    fn words(&self) -> usize {
        self.n.div_ceil(64) + 1 + self.store.as_ref().map_or(0, |s| s.words())
    }
}

/// Whole-graph sketch, with the double cover when `cover`.
#[derive(Clone, Debug)]
struct WholeSketch {
    graph: ConnectivitySketch,
    cover: Option<CoverSketch>,
}

impl StreamConsumer for WholeSketch {
    fn label(&self) -> String {
        "whole".into()
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        let (u, v) = ev.endpoints();
        self.graph.update(u, v, ev.sign());
        if let Some(c) = &mut self.cover {
            c.update(u, v, ev.sign());
        }
    }

    fn words(&self) -> usize {
        self.graph.words() + self.cover.as_ref().map_or(0, |c| c.words())
    }
}

// ---------------------------------------------------------------------------
// Sparsification

/// Where an edge of the sparsified graph came from.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Provenance {
    /// First sampled subgraph whose forest contributed it.
    Sample(u32),
    /// The terminal edge store.
    Terminal,
}

/// Union of the `H_i` (and the terminal edges), with provenance.
#[derive(Clone, Debug, Default)]
pub struct SparsifiedGraph {
    pub n: usize,
    pub edges: BTreeMap<(u32, u32), Provenance>,
    /// Sum of `|E(H_i)|` before deduplication.
    pub raw_edges: usize,
}

impl SparsifiedGraph {
    pub fn new(n: usize) -> Self {
        Self { n, ..Default::default() }
    }

    pub fn add(&mut self, u: usize, v: usize, from: Provenance) {
        self.raw_edges += 1;
        let key = (u.min(v) as u32, u.max(v) as u32);
        self.edges.entry(key).or_insert(from);
    }

    pub fn graph(&self) -> Graph {
        Graph::from_edges(self.n, self.edges.keys().map(|&(a, b)| (a as usize, b as usize)))
    }

    pub fn words(&self) -> usize {
        3 * self.edges.len()
    }

    /// One `u v source` line per edge; source is `H<i>` or `X`.
    pub fn dump(&self) -> String {
        let mut out = format!("# sparsified n={} edges={}\n", self.n, self.edges.len());
        for (&(a, b), p) in &self.edges {
            match p {
                Provenance::Sample(i) => writeln!(out, "{a} {b} H{i}"),
                Provenance::Terminal => writeln!(out, "{a} {b} X"),
            }
            .expect("writing to a string");
        }
        out
    }
}

/// Sketches every sampled subgraph in batches on pass 1 and unions the reduced forests.
pub fn sparsify(replay: &mut Replay<'_>, spec: &SampleSpec, cover: bool, batch: usize) -> Result<SparsifiedGraph, CutError> {
    let mut out = SparsifiedGraph::new(spec.n);
    let batch = batch.max(1);
    let mut start = 0;
    while start < spec.ell {
        let end = (start + batch).min(spec.ell);
        let mut sketches: Vec<SampleSketch> =
            (start..end).map(|i| SampleSketch::new(i, spec.subset(i), cover, spec.seed)).collect();
        replay.replay(1, &mut sketches)?;
        for s in &sketches {
            for (a, b) in s.reduce()? {
                out.add(a, b, Provenance::Sample(s.id as u32));
            }
        }
        start = end;
    }
    Ok(out)
}

// ---------------------------------------------------------------------------
// Pipelines

#[derive(Clone, Debug)]
pub struct CutConfig {
    pub seed: u64,
    pub jobs: usize,
    pub q: usize,
    /// Optional cap on the number of sampled subsets, for experiments.
    pub ell_cap: Option<usize>,
    pub passes_cap: Option<usize>,
    pub space_cap: Option<usize>,
    /// Multiway Cut only: forbid deleting terminals.
    pub protect_terminals: bool,
    /// Check returned solutions against the materialized input.
    pub verify: bool,
}

impl Default for CutConfig {
    fn default() -> Self {
        Self { seed: 0, jobs: 1, q: 2, ell_cap: None, passes_cap: None, space_cap: None, protect_terminals: false, verify: true }
    }
}

#[derive(Clone, Debug)]
pub struct CutOutcome {
    pub problem: Problem,
    pub result: SolveResult,
    /// A solution was found on the sparsified graph but failed on the input.
    pub no_confidence: bool,
    pub sample: Option<SampleSpec>,
    pub sparsified: Option<SparsifiedGraph>,
    pub terminal_edges: Option<i64>,
    pub ledger: SpaceLedger,
}

impl CutOutcome {
    pub fn report_lines(&self) -> Vec<String> {
        let mut out = Vec::new();
        if let Some(s) = &self.sample {
            out.push(format!("ell={}", s.ell));
            out.push(format!("ell_formula={}", s.ell_formula));
            if s.capped() {
                out.push("warning=ell_capped".into());
            }
        }
        if let Some(g) = &self.sparsified {
            out.push(format!("sparsified_edges={}", g.edges.len()));
        }
        if let Some(c) = self.terminal_edges {
            out.push(format!("terminal_edges={c}"));
        }
        out.push(format!("no_confidence={}", self.no_confidence));
        out.push(format!("branch_nodes={}", self.result.stats.nodes));
        out.extend(self.ledger.report_lines());
        out
    }
}

fn batch_size(jobs: usize) -> usize {
    (16 * jobs).max(64)
}

fn finish(
    problem: Problem,
    stream: &Stream,
    terminals: VertexSet,
    result: SolveResult,
    config: &CutConfig,
    replay: Replay<'_>,
    sample: Option<SampleSpec>,
    sparsified: Option<SparsifiedGraph>,
    terminal_edges: Option<i64>,
) -> CutOutcome {
    let mut result = result;
    let mut no_confidence = false;
    if config.verify {
        if let Some(sol) = &result.solution {
            let mut inst = Instance::with_terminals(problem, materialize(stream), terminals);
            inst.protect_terminals = config.protect_terminals;
            if !inst.is_solution(sol) {
                no_confidence = true;
                result = SolveResult::no(result.stats);
            }
        }
    }
    CutOutcome { problem, result, no_confidence, sample, sparsified, terminal_edges, ledger: replay.ledger }
}

fn new_replay<'s>(stream: &'s Stream, config: &CutConfig) -> Replay<'s> {
    Replay::new(stream).with_caps(config.passes_cap, config.space_cap).with_jobs(config.jobs)
}

fn yes_or_no(ok: bool) -> SolveResult {
    if ok {
        SolveResult::yes(Vec::new(), WorkStats::default())
    } else {
        SolveResult::no(WorkStats::default())
    }
}

/// Odd Cycle Transversal. `k = 0` is a bipartiteness test on the double cover.
pub fn oct_pipeline(stream: &Stream, k: usize, config: &CutConfig) -> Result<CutOutcome, CutError> {
    let n = stream.n();
    let mut replay = new_replay(stream, config);
    let empty = VertexSet::new(n);
    if k == 0 || n == 0 {
        let seed = splitmix64(config.seed);
        let mut w = [WholeSketch {
            graph: ConnectivitySketch::new(n, DEFAULT_C, seed),
            cover: Some(CoverSketch::new(n, DEFAULT_C, seed ^ 1)),
        }];
        replay.replay(1, &mut w)?;
        let ok = n == 0 || is_bipartite(&w[0].graph, w[0].cover.as_ref().expect("cover"))?;
        return Ok(finish(Problem::Oct, stream, empty, yes_or_no(ok), config, replay, None, None, None));
    }
    let spec = sample_subsets(n, k, config.q, config.seed, config.ell_cap)?;
    let sparse = sparsify(&mut replay, &spec, true, batch_size(config.jobs))?;
    replay.charge(Phase::Post, "oct/sparsified", sparse.words())?;
    let result = solve_oct_static(&sparse.graph(), k);
    debug_assert!(result.solution.as_ref().is_none_or(|s| {
        let (h, _) = sparse.graph().delete(&VertexSet::from_iter_cap(n, s.iter().copied()));
        is_bipartite_graph(&h)
    }));
    Ok(finish(Problem::Oct, stream, empty, result, config, replay, Some(spec), Some(sparse), None))
}

/// Subset Feedback Vertex Set over terminals flagged in the stream.
pub fn sfvs_pipeline(stream: &Stream, k: usize, config: &CutConfig) -> Result<CutOutcome, CutError> {
    let n = stream.n();
    let mut replay = new_replay(stream, config);
    let capacity = (k + 1) * n;
    let mut store = [TerminalStore::new(stream, Some(capacity))];
    replay.replay(1, &mut store)?;
    let [store] = store;
    let count = store.count();
    let terminals = store.terminals().clone();
    if count > capacity as i64 {
        let result = SolveResult::no(WorkStats::default());
        return Ok(finish(Problem::Sfvs, stream, terminals, result, config, replay, None, None, Some(count)));
    }
    let terminal_edges = store.edges()?;
    if k == 0 {
        // No terminal cycle iff every terminal edge is a bridge; test each by
        // removing it from a clone of the whole-graph sketch.
        let mut w = [WholeSketch { graph: ConnectivitySketch::new(n, DEFAULT_C, splitmix64(config.seed)), cover: None }];
        replay.replay(1, &mut w)?;
        replay.charge(Phase::Post, "sfvs/terminal_edges", 2 * terminal_edges.len() + w[0].graph.words())?;
        let base = w[0].graph.components()?;
        let mut ok = true;
        for &(a, b) in &terminal_edges {
            let mut without = w[0].graph.clone();
            without.update(a, b, -1);
            if without.components()? == base {
                ok = false;
                break;
            }
        }
        return Ok(finish(Problem::Sfvs, stream, terminals, yes_or_no(ok), config, replay, None, None, Some(count)));
    }
    let spec = sample_subsets(n, k + 1, config.q, config.seed, config.ell_cap)?;
    let mut sparse = sparsify(&mut replay, &spec, false, batch_size(config.jobs))?;
    for (a, b) in terminal_edges {
        sparse.add(a, b, Provenance::Terminal);
    }
    replay.charge(Phase::Post, "sfvs/sparsified", sparse.words())?;
    let result = solve_sfvs_static(&sparse.graph(), &terminals, k)?;
    Ok(finish(Problem::Sfvs, stream, terminals, result, config, replay, Some(spec), Some(sparse), Some(count)))
}

/// Multiway Cut over terminals flagged in the stream.
pub fn mwc_pipeline(stream: &Stream, k: usize, config: &CutConfig) -> Result<CutOutcome, CutError> {
    let n = stream.n();
    let mut replay = new_replay(stream, config);
    let mut flags = [TerminalStore::new(stream, None)];
    replay.replay(1, &mut flags)?;
    let terminals = flags[0].terminals().clone();
    if k == 0 {
        let mut w = [WholeSketch { graph: ConnectivitySketch::new(n, DEFAULT_C, splitmix64(config.seed)), cover: None }];
        replay.replay(1, &mut w)?;
        let labels = w[0].graph.component_labels()?;
        let mut seen = std::collections::HashSet::new();
        let ok = terminals.iter().all(|t| seen.insert(labels[t]));
        return Ok(finish(Problem::Mwc, stream, terminals, yes_or_no(ok), config, replay, None, None, None));
    }
    let spec = sample_subsets(n, k, config.q, config.seed, config.ell_cap)?;
    let sparse = sparsify(&mut replay, &spec, false, batch_size(config.jobs))?;
    replay.charge(Phase::Post, "mwc/sparsified", sparse.words())?;
    let result = solve_mwc_static(&sparse.graph(), &terminals, k, config.protect_terminals)?;
    Ok(finish(Problem::Mwc, stream, terminals, result, config, replay, Some(spec), Some(sparse), None))
}

pub fn run_cut(problem: Problem, stream: &Stream, k: usize, config: &CutConfig) -> Result<CutOutcome, CutError> {
    match problem {
        Problem::Oct => oct_pipeline(stream, k, config),
        Problem::Sfvs => sfvs_pipeline(stream, k, config),
        Problem::Mwc => mwc_pipeline(stream, k, config),
        other => Err(CutError::InvalidParams(format!("{other} is not a cut problem"))),
    }
}
