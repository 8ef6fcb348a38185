//! Static Proper Interval Vertex Deletion.
//!
//! Small obstructions (claw, net, tent and holes of length 4 to 7) are hit by
//! branching. A graph free of them that is still not proper interval only has
//! long holes left; there a single candidate set `W(v, x)` per vertex pair is
//! tried, per component.

use crate::graph::{Graph, VertexSet};
use crate::solvers::{SolveResult, WorkStats};
use crate::util::any_subset_up_to;

use super::is_proper_interval;

/// Largest obstruction the branching stage looks for.
pub const SMALL_OBSTRUCTION: usize = 7;

/// Smallest vertex set (by size, then lexicographically) of at most 7 vertices
/// inducing a graph that is not proper interval. Such a set is a minimal obstruction.
pub fn find_small_obstruction(g: &Graph) -> Option<Vec<usize>> {
    let mut found = None;
    any_subset_up_to(g.n(), SMALL_OBSTRUCTION, |s| {
        if s.len() < 4 {
            return false;
        }
        let keep = VertexSet::from_iter_cap(g.n(), s.iter().copied());
        if is_proper_interval(&g.induced(&keep).0) {
            return false;
        }
        found = Some(s.to_vec());
        true
    });
    found
}

/// `{u in N[v] ∩ N[x] : N[u] != N[v], N[u] ⊆ N[v] ∪ N[x]}`.
pub fn w_set(g: &Graph, v: usize, x: usize) -> VertexSet {
    let (nv, nx) = (g.closed_neighbors(v), g.closed_neighbors(x));
    let union = nv.union(&nx);
    let mut w = nv.intersection(&nx);
    for u in w.to_vec() {
        let nu = g.closed_neighbors(u);
        if nu == nv || !nu.is_subset(&union) {
            w.remove(u);
        }
    }
    w
}

/// Smallest `W(v, x)` of size at most `budget` whose removal leaves a proper interval graph.
fn best_w(g: &Graph, budget: usize, stats: &mut WorkStats) -> Option<VertexSet> {
    let mut best: Option<VertexSet> = None;
    for v in 0..g.n() {
        for x in 0..g.n() {
            stats.nodes += 1;
            let w = w_set(g, v, x);
            let limit = best.as_ref().map_or(budget, |b| b.len().saturating_sub(1));
            if w.len() > limit || w.is_empty() {
                continue;
            }
            if is_proper_interval(&g.delete(&w).0) {
                best = Some(w);
            }
        }
    }
    best
}

/// Stage 2 on a graph without small obstructions, one component at a time.
fn long_holes(g: &Graph, budget: usize, stats: &mut WorkStats) -> Option<Vec<usize>> {
    let mut out = Vec::new();
    for comp in g.component_sets() {
        let (h, map) = g.induced(&comp);
        if is_proper_interval(&h) {
            continue;
        }
        let w = best_w(&h, budget - out.len(), stats)?;
        out.extend(w.iter().map(|u| map[u]));
    }
    Some(out)
}

fn branch(g: &Graph, budget: usize, stats: &mut WorkStats) -> Option<Vec<usize>> {
    stats.nodes += 1;
    if is_proper_interval(g) {
        return Some(Vec::new());
    }
    let Some(obs) = find_small_obstruction(g) else {
        return long_holes(g, budget, stats);
    };
    if budget == 0 {
        return None;
    }
    for v in obs {
        let (h, map) = g.delete(&VertexSet::from_iter_cap(g.n(), [v]));
        if let Some(rest) = branch(&h, budget - 1, stats) {
            let mut sol: Vec<usize> = rest.into_iter().map(|u| map[u]).collect();
            sol.push(v);
            return Some(sol);
        }
    }
    None
}

/// Deletes at most `k` vertices to reach a proper interval graph.
pub fn static_pivd(g: &Graph, k: usize) -> SolveResult {
    let mut stats = WorkStats::default();
    match branch(g, k, &mut stats) {
        Some(sol) => SolveResult::yes(sol, stats),
        None => SolveResult::no(stats),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::*;

    #[test]
    fn examples() {
        assert!(static_pivd(&cycle(8), 1).is_yes());
        assert!(!static_pivd(&cycle(8), 0).is_yes());
        assert_eq!(static_pivd(&path(6), 0).solution, Some(vec![]));
        let r = static_pivd(&net(), 1);
        assert!(r.is_yes());
        let sol = r.solution.unwrap();
        let (h, _) = net().delete(&VertexSet::from_iter_cap(6, sol));
        assert!(is_proper_interval(&h));
    }

    #[test]
    fn two_long_holes_need_two_deletions() {
        let mut g = Graph::new(18);
        for i in 0..9 {
            g.add_edge(i, (i + 1) % 9);
            g.add_edge(9 + i, 9 + (i + 1) % 9);
        }
        assert!(!static_pivd(&g, 1).is_yes());
        assert_eq!(static_pivd(&g, 2).solution.map(|s| s.len()), Some(2));
    }

    #[test]
    fn small_obstructions_are_found() {
        assert_eq!(find_small_obstruction(&claw()).map(|s| s.len()), Some(4));
        assert_eq!(find_small_obstruction(&cycle(7)).map(|s| s.len()), Some(7));
        assert_eq!(find_small_obstruction(&cycle(8)), None);
        assert_eq!(find_small_obstruction(&path(8)), None);
    }
}
