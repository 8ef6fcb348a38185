//! Bounded-depth branching for d-Hitting Set.

use super::{SolveResult, WorkStats};

/// Finds a set of at most `k` elements meeting every set, branching on the
/// elements of the first set not yet hit. Uses `O(d^k)` nodes and linear space.
pub fn solve_hitting_set(sets: &[Vec<usize>], k: usize) -> SolveResult {
    let mut chosen = Vec::with_capacity(k);
    let mut stats = WorkStats::default();
    if branch(sets, k, &mut chosen, &mut stats) {
        SolveResult::yes(chosen, stats)
    } else {
        SolveResult::no(stats)
    }
}

fn branch(sets: &[Vec<usize>], budget: usize, chosen: &mut Vec<usize>, stats: &mut WorkStats) -> bool {
    stats.nodes += 1;
    let Some(open) = sets.iter().find(|s| !s.iter().any(|x| chosen.contains(x))) else {
        return true;
    };
    if budget == 0 || open.is_empty() {
        return false;
    }
    for &x in open {
        chosen.push(x);
        if branch(sets, budget - 1, chosen, stats) {
            return true;
        }
        chosen.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::{any_subset_up_to, rng_for};
    use rand::Rng;

    #[test]
    fn examples() {
        let r = solve_hitting_set(&[vec![1, 2], vec![2, 3]], 1);
        assert_eq!(r.solution, Some(vec![2]));
        assert!(!solve_hitting_set(&[vec![1], vec![2]], 1).is_yes());
        assert_eq!(solve_hitting_set(&[], 0).solution, Some(vec![]));
        assert!(!solve_hitting_set(&[vec![]], 3).is_yes());
    }

    #[test]
    fn matches_exhaustive_on_random_instances() {
        let mut rng = rng_for(5, 5);
        for _ in 0..200 {
            let u = rng.random_range(1..=6);
            let d = rng.random_range(1..=3);
            let k = rng.random_range(0..=3);
            let m = rng.random_range(0..8);
            let sets: Vec<Vec<usize>> = (0..m)
                .map(|_| {
                    let size = rng.random_range(1..=d.min(u));
                    let mut s: Vec<usize> = rand::seq::index::sample(&mut rng, u, size).into_vec();
                    s.sort_unstable();
                    s
                })
                .collect();
            let want = any_subset_up_to(u, k, |h| sets.iter().all(|s| s.iter().any(|x| h.contains(x))));
            let got = solve_hitting_set(&sets, k);
            assert_eq!(got.is_yes(), want, "{sets:?} k={k}");
            if let Some(sol) = got.solution {
                assert!(sol.len() <= k);
                assert!(sets.iter().all(|s| s.iter().any(|x| sol.contains(x))));
            }
            // Node bound: at most sum_{i<=k} d^i.
            let bound: u64 = (0..=k as u32).map(|i| (d as u64).pow(i)).sum();
            assert!(got.stats.nodes <= bound);
        }
    }
}
