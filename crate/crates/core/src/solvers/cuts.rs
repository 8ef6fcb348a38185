//! Exact Subset Feedback Vertex Set and Multiway Cut by bounded enumeration.
//!
//! Both solvers try every vertex set of size at most `k`, smallest first, and
//! refuse instances whose enumeration would exceed a cap.

use super::{enumeration_size, no_terminal_cycle, terminals_separated, SolveResult, SolverError, WorkStats};
use crate::graph::{Graph, VertexSet};
use crate::util::any_subset_up_to;

/// Largest number of candidate sets either solver will enumerate.
pub const DEFAULT_ENUMERATION_CAP: u64 = 20_000_000;

fn enumerate(
    g: &Graph,
    k: usize,
    cap: u64,
    allowed: &dyn Fn(usize) -> bool,
    accept: &dyn Fn(&Graph, &VertexSet, &[usize]) -> bool,
) -> Result<SolveResult, SolverError> {
    let pool: Vec<usize> = (0..g.n()).filter(|&v| allowed(v)).collect();
    let needed = enumeration_size(pool.len(), k);
    if needed > cap {
        return Err(SolverError::InstanceTooLarge { needed, cap });
    }
    let mut stats = WorkStats::default();
    let mut found = None;
    any_subset_up_to(pool.len(), k, |idx| {
        stats.nodes += 1;
        let s: Vec<usize> = idx.iter().map(|&i| pool[i]).collect();
        let removed = VertexSet::from_iter_cap(g.n(), s.iter().copied());
        let (h, map) = g.delete(&removed);
        if accept(&h, &removed, &map) {
            found = Some(s);
            true
        } else {
            false
        }
    });
    Ok(match found {
        Some(s) => SolveResult::yes(s, stats),
        None => SolveResult::no(stats),
    })
}

fn local(terminals: &VertexSet, map: &[usize]) -> VertexSet {
    VertexSet::from_iter_cap(map.len(), (0..map.len()).filter(|&i| terminals.contains(map[i])))
}

/// At most `k` vertices meeting every cycle through a terminal.
pub fn solve_sfvs_static(g: &Graph, terminals: &VertexSet, k: usize) -> Result<SolveResult, SolverError> {
    solve_sfvs_capped(g, terminals, k, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_sfvs_capped(g: &Graph, terminals: &VertexSet, k: usize, cap: u64) -> Result<SolveResult, SolverError> {
    enumerate(g, k, cap, &|_| true, &|h, _, map| no_terminal_cycle(h, &local(terminals, map)))
}

/// At most `k` vertices whose removal leaves every terminal in its own component.
/// With `protect_terminals` the deleted set must avoid terminals.
pub fn solve_mwc_static(
    g: &Graph,
    terminals: &VertexSet,
    k: usize,
    protect_terminals: bool,
) -> Result<SolveResult, SolverError> {
    solve_mwc_capped(g, terminals, k, protect_terminals, DEFAULT_ENUMERATION_CAP)
}

pub fn solve_mwc_capped(
    g: &Graph,
    terminals: &VertexSet,
    k: usize,
    protect_terminals: bool,
    cap: u64,
) -> Result<SolveResult, SolverError> {
    let allowed = |v: usize| !(protect_terminals && terminals.contains(v));
    enumerate(g, k, cap, &allowed, &|h, _, map| terminals_separated(h, &local(terminals, map)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    fn set(n: usize, vs: &[usize]) -> VertexSet {
        VertexSet::from_iter_cap(n, vs.iter().copied())
    }

    #[test]
    fn sfvs_examples() {
        let t = set(3, &[0]);
        assert!(solve_sfvs_static(&cycle(3), &t, 1).unwrap().is_yes());
        assert!(!solve_sfvs_static(&cycle(3), &t, 0).unwrap().is_yes());
        let two = Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (3, 4), (4, 5), (3, 5)]);
        let t = set(6, &[0, 3]);
        assert!(!solve_sfvs_static(&two, &t, 1).unwrap().is_yes());
        assert_eq!(solve_sfvs_static(&two, &t, 2).unwrap().solution.unwrap().len(), 2);
    }

    #[test]
    fn mwc_examples() {
        let r = solve_mwc_static(&path(3), &set(3, &[0, 2]), 1, true).unwrap();
        assert_eq!(r.solution, Some(vec![1]));
        assert!(!solve_mwc_static(&path(2), &set(2, &[0, 1]), 0, false).unwrap().is_yes());
        let r = solve_mwc_static(&star(3), &set(4, &[1, 2, 3]), 1, false).unwrap();
        assert_eq!(r.solution, Some(vec![0]));
        // An edge between terminals can only be cut by deleting a terminal.
        assert!(solve_mwc_static(&path(2), &set(2, &[0, 1]), 1, false).unwrap().is_yes());
        assert!(!solve_mwc_static(&path(2), &set(2, &[0, 1]), 1, true).unwrap().is_yes());
    }

    #[test]
    fn cap_is_enforced() {
        let g = Graph::new(60);
        let err = solve_mwc_capped(&g, &set(60, &[0, 1]), 5, false, 1000).unwrap_err();
        assert!(matches!(err, SolverError::InstanceTooLarge { .. }));
    }
}
