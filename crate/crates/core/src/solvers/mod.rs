//! Static solvers and brute-force oracles on explicit graphs.

pub mod classes;
pub mod cuts;
pub mod hitting_set;
pub mod oct;
pub mod vertex_cover;

use crate::graph::{Digraph, Graph, UnionFind, VertexSet};
use crate::interval::is_proper_interval;
use crate::stream::{materialize, materialize_digraph, Problem, Stream};
use crate::util::{any_subset_up_to, binomial_prefix_sum};

pub use cuts::{solve_mwc_static, solve_sfvs_static};
pub use hitting_set::solve_hitting_set;
pub use oct::solve_oct_static;
pub use vertex_cover::{enumerate_min_vertex_covers, enumerate_min_vertex_covers_with};

/// Default vertex cap for the brute-force oracle.
pub const ORACLE_CAP: usize = 24;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SolverError {
    #[error("instance with n={n} exceeds the oracle cap of {cap}")]
    CapExceeded { n: usize, cap: usize },
    #[error("instance needs {needed} candidate sets, above the cap of {cap}")]
    InstanceTooLarge { needed: u64, cap: u64 },
    #[error("{0} expects a {1} graph")]
    WrongKind(Problem, &'static str),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Decision {
    Yes,
    No,
}

/// Effort counters reported with a result.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct WorkStats {
    pub nodes: u64,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SolveResult {
    pub decision: Decision,
    pub solution: Option<Vec<usize>>,
    pub stats: WorkStats,
}

impl SolveResult {
    pub fn yes(mut solution: Vec<usize>, stats: WorkStats) -> Self {
        solution.sort_unstable();
        Self { decision: Decision::Yes, solution: Some(solution), stats }
    }

    pub fn no(stats: WorkStats) -> Self {
        Self { decision: Decision::No, solution: None, stats }
    }

    pub fn is_yes(&self) -> bool {
        self.decision == Decision::Yes
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ExplicitGraph {
    Undirected(Graph),
    Directed(Digraph),
}

impl ExplicitGraph {
    pub fn n(&self) -> usize {
        match self {
            ExplicitGraph::Undirected(g) => g.n(),
            ExplicitGraph::Directed(g) => g.n(),
        }
    }
}

/// A materialized problem instance.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Instance {
    pub problem: Problem,
    pub graph: ExplicitGraph,
    pub terminals: VertexSet,
    /// Multiway cut only: forbid deleting terminals.
    pub protect_terminals: bool,
}

impl Instance {
    pub fn undirected(problem: Problem, g: Graph) -> Self {
        let n = g.n();
        Self { problem, graph: ExplicitGraph::Undirected(g), terminals: VertexSet::new(n), protect_terminals: false }
    }

    pub fn with_terminals(problem: Problem, g: Graph, terminals: VertexSet) -> Self {
        Self { problem, graph: ExplicitGraph::Undirected(g), terminals, protect_terminals: false }
    }

    pub fn directed(g: Digraph) -> Self {
        let n = g.n();
        Self { problem: Problem::Fvst, graph: ExplicitGraph::Directed(g), terminals: VertexSet::new(n), protect_terminals: false }
    }

    /// Materializes a stream for `problem`; oracle and verification paths only.
    pub fn from_stream(problem: Problem, stream: &Stream) -> Self {
        let mut inst = if problem.is_directed() {
            Self::directed(materialize_digraph(stream))
        } else {
            Self::undirected(problem, materialize(stream))
        };
        inst.problem = problem;
        inst.terminals = stream.terminals();
        inst
    }

    pub fn n(&self) -> usize {
        self.graph.n()
    }

    pub fn undirected_graph(&self) -> Result<&Graph, SolverError> {
        match &self.graph {
            ExplicitGraph::Undirected(g) => Ok(g),
            ExplicitGraph::Directed(_) => Err(SolverError::WrongKind(self.problem, "undirected")),
        }
    }

    /// Does deleting `solution` leave a graph with the target property?
    /// Size is not checked here.
    pub fn is_solution(&self, solution: &[usize]) -> bool {
        let removed = VertexSet::from_iter_cap(self.n(), solution.iter().copied());
        match (&self.graph, self.problem) {
            (ExplicitGraph::Directed(g), Problem::Fvst) => g.delete(&removed).0.is_acyclic(),
            (ExplicitGraph::Directed(_), _) => false,
            (ExplicitGraph::Undirected(g), p) => {
                let (h, map) = g.delete(&removed);
                match p {
                    Problem::Fvst => false,
                    Problem::Cvd => classes::is_cluster(&h),
                    Problem::Svd => classes::is_split(&h),
                    Problem::Tvd => classes::is_threshold(&h),
                    Problem::Bvd => classes::is_block_graph(&h),
                    Problem::Pivd => is_proper_interval(&h),
                    Problem::Oct => classes::is_bipartite(&h),
                    Problem::Sfvs => {
                        let t = local_terminals(&self.terminals, &map);
                        no_terminal_cycle(&h, &t)
                    }
                    Problem::Mwc => {
                        if self.protect_terminals && solution.iter().any(|&v| self.terminals.contains(v)) {
                            return false;
                        }
                        let t = local_terminals(&self.terminals, &map);
                        terminals_separated(&h, &t)
                    }
                }
            }
        }
    }
}

fn local_terminals(terminals: &VertexSet, map: &[usize]) -> VertexSet {
    VertexSet::from_iter_cap(map.len(), map.iter().enumerate().filter(|(_, &v)| terminals.contains(v)).map(|(i, _)| i))
}

/// No cycle of `g` passes through a terminal.
pub fn no_terminal_cycle(g: &Graph, terminals: &VertexSet) -> bool {
    terminals.iter().all(|t| {
        let mut uf = UnionFind::new(g.n());
        for (a, b) in g.edges() {
            if a != t && b != t {
                uf.union(a, b);
            }
        }
        let nb: Vec<usize> = g.neighbors(t).iter().collect();
        let mut roots: Vec<usize> = nb.iter().map(|&x| uf.find(x)).collect();
        roots.sort_unstable();
        roots.windows(2).all(|w| w[0] != w[1])
    })
}

/// Every connected component holds at most one terminal.
pub fn terminals_separated(g: &Graph, terminals: &VertexSet) -> bool {
    let (label, count) = g.components();
    let mut seen = vec![false; count];
    terminals.iter().all(|t| !std::mem::replace(&mut seen[label[t]], true))
}

/// Exhaustive search over all vertex subsets of size at most `k`, smallest first.
pub fn brute_force_oracle(inst: &Instance, k: usize) -> Result<SolveResult, SolverError> {
    brute_force_oracle_capped(inst, k, ORACLE_CAP)
}

pub fn brute_force_oracle_capped(inst: &Instance, k: usize, cap: usize) -> Result<SolveResult, SolverError> {
    let n = inst.n();
    if n > cap {
        return Err(SolverError::CapExceeded { n, cap });
    }
    let mut nodes = 0;
    let mut found = None;
    any_subset_up_to(n, k, |s| {
        nodes += 1;
        if inst.is_solution(s) {
            found = Some(s.to_vec());
            true
        } else {
            false
        }
    });
    let stats = WorkStats { nodes };
    Ok(match found {
        Some(s) => SolveResult::yes(s, stats),
        None => SolveResult::no(stats),
    })
}

/// Number of subsets a bounded enumeration would visit.
pub(crate) fn enumeration_size(n: usize, k: usize) -> u64 {
    binomial_prefix_sum(n as u64, k as u64)
}

#[cfg(test)]
mod tests {
    use super::classes::named::*;
    use super::*;

    #[test]
    fn oracle_examples() {
        let inst = Instance::undirected(Problem::Cvd, path(3));
        let r = brute_force_oracle(&inst, 1).unwrap();
        assert!(r.is_yes());
        assert_eq!(r.solution.unwrap().len(), 1);
        let inst = Instance::undirected(Problem::Svd, cycle(5));
        assert!(!brute_force_oracle(&inst, 0).unwrap().is_yes());
        let big = Instance::undirected(Problem::Oct, Graph::new(30));
        assert!(matches!(brute_force_oracle(&big, 1), Err(SolverError::CapExceeded { .. })));
    }

    #[test]
    fn terminal_properties() {
        let tri = cycle(3);
        assert!(!no_terminal_cycle(&tri, &VertexSet::from_iter_cap(3, [0])));
        let p = path(3);
        assert!(no_terminal_cycle(&p, &VertexSet::from_iter_cap(3, [0, 1, 2])));
        assert!(!terminals_separated(&p, &VertexSet::from_iter_cap(3, [0, 2])));
        let mut inst = Instance::with_terminals(Problem::Mwc, p, VertexSet::from_iter_cap(3, [0, 2]));
        assert!(inst.is_solution(&[1]));
        assert!(inst.is_solution(&[0]));
        inst.protect_terminals = true;
        assert!(!inst.is_solution(&[0]));
    }

    #[test]
    fn tournament_solutions() {
        let c3 = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]);
        let inst = Instance::directed(c3);
        assert!(!inst.is_solution(&[]));
        assert!(inst.is_solution(&[1]));
    }
}
