//! Vertex deletion to a class with finitely many obstructions, in one pass.
//!
//! The plan colours the vertex set with three splitter families and runs one
//! recognizer per induced subgraph it names. Post-processing turns the verdict
//! table into a candidate set `Z*` and a d-Hitting Set instance over it, which
//! is then solved by bounded branching.

use std::collections::{BTreeMap, HashMap};
use std::fmt::Write as _;

use itertools::Itertools;
use num_bigint::BigUint;

use crate::derand::{build_splitter, DerandError, SplitterFamily};
use crate::recognizers::{ClassKind, RecognizeError, Recognizer};
use crate::solvers::{brute_force_oracle, solve_hitting_set, Instance, SolveResult, SolverError};
use crate::stream::{Phase, Problem, Replay, SpaceLedger, Stream, StreamError};
use crate::util::binomial;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum EngineError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("plan needs {needed} recognizers, above the cap of {cap}")]
    BudgetPlanExceedsMemoryCap { needed: usize, cap: usize },
    #[error(transparent)]
    Derand(#[from] DerandError),
    #[error(transparent)]
    Recognize(#[from] RecognizeError),
    #[error(transparent)]
    Solver(#[from] SolverError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

/// Forbidden induced subgraphs of a class, summarized by their largest size.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ObstructionSpec {
    pub kind: ClassKind,
    pub d: usize,
    pub directed: bool,
}

impl ObstructionSpec {
    pub fn of(kind: ClassKind) -> Self {
        Self { kind, d: kind.obstruction_size(), directed: kind.is_directed() }
    }

    pub fn problem(&self) -> Problem {
        match self.kind {
            ClassKind::Cluster => Problem::Cvd,
            ClassKind::Split => Problem::Svd,
            ClassKind::Threshold => Problem::Tvd,
            ClassKind::AcyclicTournament => Problem::Fvst,
        }
    }
}

#[derive(Clone, Debug)]
pub struct EngineConfig {
    /// Hand degenerate parameters (`d*k > n` or `k >= n`) to the brute-force oracle.
    pub bypass: bool,
    pub seed: u64,
    pub jobs: usize,
    pub max_recognizers: usize,
    pub passes_cap: Option<usize>,
    pub space_cap: Option<usize>,
}

impl Default for EngineConfig {
    fn default() -> Self {
        Self { bypass: true, seed: 0, jobs: 1, max_recognizers: 2_000_000, passes_cap: None, space_cap: None }
    }
}

/// A colouring family: either a splitter or the identity when it would be injective anyway.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColourFamily {
    Identity { n: usize },
    Splitter(SplitterFamily),
}

impl ColourFamily {
    /// Family that is injective on every `q`-subset of `[n]`.
    pub fn for_size(n: usize, q: usize) -> Result<Self, DerandError> {
        if q >= n {
            Ok(ColourFamily::Identity { n })
        } else {
            Ok(ColourFamily::Splitter(build_splitter(n, q)?))
        }
    }

    pub fn len(&self) -> usize {
        match self {
            ColourFamily::Identity { .. } => 1,
            ColourFamily::Splitter(f) => f.len(),
        }
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    pub fn colouring(&self, i: usize) -> Vec<usize> {
        match self {
            ColourFamily::Identity { n } => (0..*n).collect(),
            ColourFamily::Splitter(f) => f.colouring(i),
        }
    }
}

/// Colour classes of a colouring, by ascending colour.
fn classes(colours: &[usize]) -> Vec<Vec<u32>> {
    let mut by: BTreeMap<usize, Vec<u32>> = BTreeMap::new();
    for (v, &c) in colours.iter().enumerate() {
        by.entry(c).or_default().push(v as u32);
    }
    by.into_values().collect()
}

/// Subgraph `G[f1^-1(J)]` and, per `F2` function, its variants with one colour class removed.
#[derive(Clone, Debug)]
struct Base {
    id: usize,
    /// Per `F2` function: subgraph id after removing each colour class.
    removals: Vec<HashMap<usize, usize>>,
}

#[derive(Clone, Debug)]
pub struct EnginePlan {
    pub n: usize,
    pub k: usize,
    pub spec: ObstructionSpec,
    pub alpha: usize,
    pub beta: BigUint,
    pub f1: ColourFamily,
    pub f2: ColourFamily,
    pub f3: ColourFamily,
    /// Distinct vertex subsets, each watched by one recognizer.
    pub subsets: Vec<Vec<u32>>,
    bases: Vec<Vec<Base>>,
    f2_colours: Vec<Vec<usize>>,
    f3_ids: Vec<usize>,
    /// Descriptors before merging equal vertex subsets.
    pub descriptors: usize,
}

struct Interner {
    index: HashMap<Vec<u32>, usize>,
    subsets: Vec<Vec<u32>>,
    descriptors: usize,
    cap: usize,
}

impl Interner {
    fn id(&mut self, s: Vec<u32>) -> Result<usize, EngineError> {
        self.descriptors += 1;
        if let Some(&i) = self.index.get(&s) {
            return Ok(i);
        }
        if self.subsets.len() >= self.cap {
            return Err(EngineError::BudgetPlanExceedsMemoryCap { needed: self.subsets.len() + 1, cap: self.cap });
        }
        let i = self.subsets.len();
        self.index.insert(s.clone(), i);
        self.subsets.push(s);
        Ok(i)
    }
}

/// Preimages of every colour set of size `1..=d` within the image.
fn colour_sets(classes: &[Vec<u32>], d: usize) -> impl Iterator<Item = Vec<u32>> + '_ {
    (1..=d.min(classes.len())).flat_map(move |size| {
        (0..classes.len()).combinations(size).map(move |js| {
            let mut s: Vec<u32> = js.iter().flat_map(|&j| classes[j].iter().copied()).collect();
            s.sort_unstable();
            s
        })
    })
}

/// Candidate bound `d^2 * C(alpha^2, d) * |F1|`.
pub fn candidate_bound(d: usize, alpha: usize, f1_len: usize) -> BigUint {
    BigUint::from(d * d) * binomial((alpha * alpha) as u64, d as u64) * BigUint::from(f1_len)
}

/// Upper bound on [`HittingSetInstance::encoded_bits`] for any instance over at
/// most `beta` candidates: every set of size `1..=d` listed once, at full width.
pub fn compression_bound_bits(d: usize, beta: &BigUint) -> BigUint {
    let width = |x: &BigUint| BigUint::from(x.bits().max(1));
    let len_bits = BigUint::from((usize::BITS - d.leading_zeros()).max(1));
    let mut total = BigUint::from(3u32 * 64);
    let mut choose = BigUint::from(1u32);
    for j in 1..=d {
        // C(beta, j) from C(beta, j - 1).
        choose = choose * (beta - BigUint::from(j - 1).min(beta.clone())) / BigUint::from(j);
        total += &choose * (&len_bits + BigUint::from(j) * width(beta));
    }
    total
}

/// Builds the families and the subgraph index for `n` vertices and budget `k`.
pub fn plan(n: usize, k: usize, spec: ObstructionSpec, max_recognizers: usize) -> Result<EnginePlan, EngineError> {
    if spec.d == 0 {
        return Err(EngineError::InvalidParams("obstructions need at least one vertex".into()));
    }
    if n == 0 {
        return Err(EngineError::InvalidParams("empty vertex set".into()));
    }
    let d = spec.d;
    let alpha = (d * k).max(k + d);
    let f1 = ColourFamily::for_size(n, alpha)?;
    let f2 = ColourFamily::for_size(n, d + 1)?;
    let beta = candidate_bound(d, alpha, f1.len()) + BigUint::from(d);
    let f3 = match usize::try_from(&beta).ok() {
        Some(b) if b < n => ColourFamily::for_size(n, b)?,
        _ => ColourFamily::Identity { n },
    };

    let mut interner = Interner { index: HashMap::new(), subsets: Vec::new(), descriptors: 0, cap: max_recognizers };
    let f2_colours: Vec<Vec<usize>> = (0..f2.len()).map(|i| f2.colouring(i)).collect();
    let mut bases = Vec::with_capacity(f1.len());
    for i in 0..f1.len() {
        let cls = classes(&f1.colouring(i));
        let mut list = Vec::new();
        for set in colour_sets(&cls, d) {
            let mut removals = Vec::with_capacity(f2_colours.len());
            for c2 in &f2_colours {
                let mut per: HashMap<usize, usize> = HashMap::new();
                for &v in &set {
                    let colour = c2[v as usize];
                    if per.contains_key(&colour) {
                        continue;
                    }
                    let rest: Vec<u32> = set.iter().copied().filter(|&x| c2[x as usize] != colour).collect();
                    per.insert(colour, interner.id(rest)?);
                }
                removals.push(per);
            }
            let id = interner.id(set)?;
            list.push(Base { id, removals });
        }
        bases.push(list);
    }
    let mut f3_ids = Vec::new();
    for i in 0..f3.len() {
        let cls = classes(&f3.colouring(i));
        for set in colour_sets(&cls, d) {
            f3_ids.push(interner.id(set)?);
        }
    }
    Ok(EnginePlan {
        n,
        k,
        spec,
        alpha,
        beta,
        f1,
        f2,
        f3,
        subsets: interner.subsets,
        bases,
        f2_colours,
        f3_ids,
        descriptors: interner.descriptors,
    })
}

impl EnginePlan {
    /// `key=value` summary of the plan sizes.
    pub fn report_lines(&self) -> Vec<String> {
        vec![
            format!("alpha={}", self.alpha),
            format!("beta={}", self.beta),
            format!("f1_size={}", self.f1.len()),
            format!("f2_size={}", self.f2.len()),
            format!("f3_size={}", self.f3.len()),
            format!("subgraph_descriptors={}", self.descriptors),
            format!("recognizers={}", self.subsets.len()),
        ]
    }
}

/// Runs one recognizer per planned subset over a single pass and returns the verdicts.
pub fn stream_phase(plan: &EnginePlan, replay: &mut Replay<'_>, seed: u64) -> Result<Vec<bool>, EngineError> {
    let mut recs: Vec<Recognizer> =
        plan.subsets.iter().enumerate().map(|(i, s)| Recognizer::new(plan.spec.kind, i, s.clone(), seed)).collect();
    replay.replay(1, &mut recs)?;
    let verdicts = recs.iter().map(|r| r.finish().map(|v| v.in_class)).collect::<Result<Vec<_>, _>>()?;
    Ok(verdicts)
}

/// `Z_{f1}` per `F1` function and their union.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CandidateSet {
    pub per_function: Vec<Vec<usize>>,
    pub z_star: Vec<usize>,
}

pub fn compute_candidates(plan: &EnginePlan, verdicts: &[bool]) -> CandidateSet {
    let mut per_function = Vec::with_capacity(plan.bases.len());
    let mut all = vec![false; plan.n];
    for list in &plan.bases {
        let mut z = vec![false; plan.n];
        for base in list {
            if verdicts[base.id] {
                continue;
            }
            for &v in &plan.subsets[base.id] {
                let v = v as usize;
                let fixes = plan.f2_colours.iter().zip(&base.removals).all(|(c2, per)| verdicts[per[&c2[v]]]);
                if fixes {
                    z[v] = true;
                }
            }
        }
        let zs: Vec<usize> = (0..plan.n).filter(|&v| z[v]).collect();
        for &v in &zs {
            all[v] = true;
        }
        per_function.push(zs);
    }
    let z_star = (0..plan.n).filter(|&v| all[v]).collect();
    CandidateSet { per_function, z_star }
}

/// Universe `Z*` with the sets to hit (vertex ids), and the budget.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HittingSetInstance {
    pub universe: Vec<usize>,
    pub sets: Vec<Vec<usize>>,
    pub k: usize,
}

impl HittingSetInstance {
    /// `u <|Z*|>` then one line per set, elements as positions in the sorted universe.
    pub fn to_text(&self) -> String {
        let mut out = format!("u {}\n", self.universe.len());
        for s in &self.sets {
            let idx: Vec<String> = s.iter().map(|v| self.universe.binary_search(v).unwrap().to_string()).collect();
            let _ = writeln!(out, "{}", idx.join(" "));
        }
        out
    }

    /// Size of a compact binary encoding: header, then each set as a length
    /// and its elements at `ceil(log2 |U|)` bits each.
    pub fn encoded_bits(&self, d: usize) -> u64 {
        let width = |x: usize| (usize::BITS - x.leading_zeros()).max(1) as u64;
        let elem = width(self.universe.len().saturating_sub(1));
        let len_bits = width(d);
        let header = 3 * 64;
        header + self.sets.iter().map(|s| len_bits + elem * s.len() as u64).sum::<u64>()
    }
}

/// Minimal cores `Z* ∩ f3^-1(J)` of the subgraphs that still hold an obstruction.
pub fn build_hitting_instance(plan: &EnginePlan, verdicts: &[bool], cands: &CandidateSet) -> HittingSetInstance {
    let mut in_z = vec![false; plan.n];
    for &v in &cands.z_star {
        in_z[v] = true;
    }
    let mut sets: Vec<Vec<usize>> = plan
        .f3_ids
        .iter()
        .filter(|&&id| !verdicts[id])
        .map(|&id| plan.subsets[id].iter().map(|&v| v as usize).filter(|&v| in_z[v]).collect::<Vec<_>>())
        .filter(|l| l.len() <= plan.spec.d)
        .collect();
    sets.sort();
    sets.dedup();
    HittingSetInstance { universe: cands.z_star.clone(), sets, k: plan.k }
}

#[derive(Clone, Debug)]
pub struct EngineOutcome {
    pub result: SolveResult,
    pub bypassed: bool,
    pub candidates: Option<CandidateSet>,
    pub instance: Option<HittingSetInstance>,
    pub plan_report: Vec<String>,
    pub ledger: SpaceLedger,
}

impl EngineOutcome {
    pub fn report_lines(&self) -> Vec<String> {
        let mut out = self.plan_report.clone();
        out.push(format!("bypassed={}", self.bypassed));
        if let Some(c) = &self.candidates {
            out.push(format!("z_star_size={}", c.z_star.len()));
        }
        if let Some(i) = &self.instance {
            out.push(format!("hitting_sets={}", i.sets.len()));
        }
        out.push(format!("branch_nodes={}", self.result.stats.nodes));
        out.extend(self.ledger.report_lines());
        out
    }
}

/// End-to-end: plan, one pass, candidates, hitting set instance, branching.
pub fn solve_stream(stream: &Stream, kind: ClassKind, k: usize, config: &EngineConfig) -> Result<EngineOutcome, EngineError> {
    let spec = ObstructionSpec::of(kind);
    let n = stream.n();
    if config.bypass && (spec.d * k > n || k >= n) {
        let inst = Instance::from_stream(spec.problem(), stream);
        let result = brute_force_oracle(&inst, k)?;
        return Ok(EngineOutcome {
            result,
            bypassed: true,
            candidates: None,
            instance: None,
            plan_report: Vec::new(),
            ledger: SpaceLedger::new(),
        });
    }
    if k == 0 {
        return solve_k0(stream, kind, config);
    }
    let plan = plan(n, k, spec, config.max_recognizers)?;
    solve_with_plan(stream, &plan, config)
}

fn solve_k0(stream: &Stream, kind: ClassKind, config: &EngineConfig) -> Result<EngineOutcome, EngineError> {
    let mut replay = Replay::new(stream).with_caps(config.passes_cap, config.space_cap);
    let mut rec = [Recognizer::new(kind, 0, (0..stream.n() as u32).collect(), config.seed)];
    replay.replay(1, &mut rec)?;
    let ok = rec[0].finish()?.in_class;
    let stats = Default::default();
    let result = if ok { SolveResult::yes(Vec::new(), stats) } else { SolveResult::no(stats) };
    Ok(EngineOutcome { result, bypassed: false, candidates: None, instance: None, plan_report: vec!["recognizers=1".into()], ledger: replay.ledger })
}

/// Runs a prepared plan on a stream; plans depend only on `n`, `k` and the class, so they can be reused.
pub fn solve_with_plan(stream: &Stream, plan: &EnginePlan, config: &EngineConfig) -> Result<EngineOutcome, EngineError> {
    if stream.n() != plan.n {
        return Err(EngineError::InvalidParams(format!("plan for n={} used on n={}", plan.n, stream.n())));
    }
    let mut replay = Replay::new(stream).with_caps(config.passes_cap, config.space_cap).with_jobs(config.jobs);
    let verdicts = stream_phase(plan, &mut replay, config.seed)?;
    let cands = compute_candidates(plan, &verdicts);
    let inst = build_hitting_instance(plan, &verdicts, &cands);
    let post_words = verdicts.len().div_ceil(64)
        + cands.per_function.iter().map(Vec::len).sum::<usize>()
        + inst.sets.iter().map(|s| s.len() + 1).sum::<usize>();
    replay.charge(Phase::Post, "hitting/post", post_words)?;
    let result = solve_hitting_set(&inst.sets, plan.k);
    Ok(EngineOutcome {
        result,
        bypassed: false,
        candidates: Some(cands),
        instance: Some(inst),
        plan_report: plan.report_lines(),
        ledger: replay.ledger,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{Digraph, Graph};
    use crate::solvers::classes::named::*;

    fn no_bypass() -> EngineConfig {
        EngineConfig { bypass: false, ..Default::default() }
    }

    #[test]
    fn plan_parameters() {
        let p = plan(10, 1, ObstructionSpec::of(ClassKind::Cluster), 1 << 20).unwrap();
        assert_eq!(p.alpha, 4);
        assert!(p.subsets.len() <= p.descriptors);
        let p = plan(30, 2, ObstructionSpec::of(ClassKind::Cluster), 1 << 20).unwrap();
        assert_eq!(p.alpha, 6);
        let err = plan(30, 2, ObstructionSpec::of(ClassKind::Cluster), 10).unwrap_err();
        assert!(matches!(err, EngineError::BudgetPlanExceedsMemoryCap { .. }));
    }

    #[test]
    fn compression_bound_examples() {
        assert_eq!(compression_bound_bits(1, &BigUint::from(4u32)), BigUint::from(208u32));
        // C(4,1) * (2 + 3) + C(4,2) * (2 + 6)
        assert_eq!(compression_bound_bits(2, &BigUint::from(4u32)), BigUint::from(192u32 + 20 + 48));
        let inst = HittingSetInstance { universe: vec![0, 1, 2, 3], sets: vec![vec![0, 1], vec![2, 3], vec![1]], k: 2 };
        assert!(BigUint::from(inst.encoded_bits(2)) <= compression_bound_bits(2, &BigUint::from(4u32)));
    }

    #[test]
    fn cvd_on_p3() {
        let s = Stream::from_graph(&path(3), 1, Some(Problem::Cvd));
        let out = solve_stream(&s, ClassKind::Cluster, 1, &no_bypass()).unwrap();
        // Any single vertex of a P3 leaves a cluster graph.
        assert_eq!(out.result.solution.unwrap().len(), 1);
        assert!(out.candidates.unwrap().z_star.contains(&1));
    }

    #[test]
    fn members_have_empty_candidates() {
        let g = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4)]);
        let s = Stream::from_graph(&g, 1, None);
        let out = solve_stream(&s, ClassKind::Cluster, 1, &no_bypass()).unwrap();
        assert!(out.candidates.unwrap().z_star.is_empty());
        assert_eq!(out.result.solution, Some(vec![]));
    }

    #[test]
    fn fvst_triangles() {
        let c3 = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]);
        let s = Stream::from_digraph(&c3, 1);
        let out = solve_stream(&s, ClassKind::AcyclicTournament, 1, &no_bypass()).unwrap();
        assert_eq!(out.candidates.unwrap().z_star, vec![0, 1, 2]);
        assert!(out.result.is_yes());

        // Two disjoint directed triangles, all arcs between them pointing forward.
        let mut t = Digraph::from_arcs(6, [(0, 1), (1, 2), (2, 0), (3, 4), (4, 5), (5, 3)]);
        for a in 0..3 {
            for b in 3..6 {
                t.add_arc(a, b);
            }
        }
        let s = Stream::from_digraph(&t, 2);
        let one = solve_stream(&s, ClassKind::AcyclicTournament, 1, &no_bypass()).unwrap();
        assert!(!one.result.is_yes());
        let two = solve_stream(&s, ClassKind::AcyclicTournament, 2, &no_bypass()).unwrap();
        assert_eq!(two.result.solution.unwrap().len(), 2);
    }

    #[test]
    fn empty_candidates_give_empty_instance() {
        let s = Stream::from_graph(&Graph::new(5), 2, None);
        let out = solve_stream(&s, ClassKind::Split, 2, &no_bypass()).unwrap();
        let inst = out.instance.unwrap();
        assert!(inst.universe.is_empty() && inst.sets.is_empty());
        assert_eq!(inst.to_text(), "u 0\n");
    }

    #[test]
    fn bypass_uses_the_oracle() {
        let s = Stream::from_graph(&cycle(5), 2, None);
        let out = solve_stream(&s, ClassKind::Split, 2, &EngineConfig::default()).unwrap();
        assert!(out.bypassed);
        assert!(out.result.is_yes());
    }
}
