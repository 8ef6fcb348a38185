use std::collections::BTreeSet;

use itertools::Itertools;
use proptest::prelude::*;

use fpss::graph::{Graph, VertexSet};
use fpss::interval::{is_proper_interval, IntervalOrder};
use fpss::sketch::sparse::{Recovered, SparseRecovery};
use fpss::sketch::{is_bipartite, ConnectivitySketch, CoverSketch};
use fpss::solvers::classes::is_bipartite as bipartite_oracle;
use fpss::solvers::solve_hitting_set;
use fpss::stream::{parse_stream, Stream};

fn graph(n: usize) -> impl Strategy<Value = Graph> {
    proptest::collection::vec(any::<bool>(), n * (n - 1) / 2).prop_map(move |bits| {
        let pairs = (0..n).tuple_combinations::<(usize, usize)>();
        Graph::from_edges(n, pairs.zip(bits).filter(|(_, b)| *b).map(|(e, _)| e))
    })
}

proptest! {
    #[test]
    fn sparse_recovery_is_exact_or_fails(
        survivors in proptest::collection::btree_set(0u64..200, 0..20),
        transient in proptest::collection::vec((0u64..200, 1i64..=3), 0..30),
        s in 1usize..12,
    ) {
        let mut sk = SparseRecovery::new(s, 200);
        for &(x, c) in &transient {
            sk.update(x, c);
        }
        for &x in &survivors {
            sk.update(x, 1);
        }
        for &(x, c) in transient.iter().rev() {
            sk.update(x, -c);
        }
        let want: Vec<u64> = survivors.into_iter().collect();
        match sk.recover() {
            Recovered::Items(mut got) => {
                got.sort_unstable();
                prop_assert!(want.len() <= s);
                prop_assert_eq!(got, want);
            }
            Recovered::Fail => prop_assert!(want.len() > s),
        }
    }

    #[test]
    fn sketches_merge_like_concatenated_streams(g in graph(9), h in graph(9), seed in any::<u64>()) {
        let mut a = ConnectivitySketch::new(9, 3, seed);
        let mut b = ConnectivitySketch::new(9, 3, seed);
        let mut whole = ConnectivitySketch::new(9, 3, seed);
        for (u, v) in g.edges() {
            a.update(u, v, 1);
            whole.update(u, v, 1);
        }
        // h's edges are inserted into b and cancelled out again inside `whole`.
        for (u, v) in h.edges() {
            b.update(u, v, 1);
            b.update(u, v, -1);
        }
        a.merge(&b);
        prop_assert_eq!(a.to_text(), whole.to_text());
    }

    #[test]
    fn double_cover_matches_oracle(g in graph(7), seed in any::<u64>()) {
        let mut sk = ConnectivitySketch::new(7, 3, seed);
        let mut cover = CoverSketch::new(7, 3, seed.rotate_left(7));
        for (u, v) in g.edges() {
            sk.update(u, v, 1);
            cover.update(u, v, 1);
        }
        if let Ok(b) = is_bipartite(&sk, &cover) {
            prop_assert_eq!(b, bipartite_oracle(&g));
        }
    }

    #[test]
    fn streams_round_trip_through_text(g in graph(8), k in 0usize..5) {
        let s = Stream::from_graph(&g, k, None);
        prop_assert_eq!(parse_stream(&s.to_text()).unwrap(), s);
    }

    #[test]
    fn vertex_sets_behave_like_btreesets(a in proptest::collection::btree_set(0usize..150, 0..40), b in proptest::collection::btree_set(0usize..150, 0..40)) {
        let (x, y) = (VertexSet::from_iter_cap(150, a.iter().copied()), VertexSet::from_iter_cap(150, b.iter().copied()));
        prop_assert_eq!(x.union(&y).to_vec(), a.union(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(x.intersection(&y).to_vec(), a.intersection(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(x.difference(&y).to_vec(), a.difference(&b).copied().collect::<Vec<_>>());
        prop_assert_eq!(x.is_subset(&y), a.is_subset(&b));
        prop_assert_eq!(x.len(), a.len());
    }

    #[test]
    fn unit_models_are_proper_interval(starts in proptest::collection::vec(0.0f64..6.0, 1..12)) {
        let order = IntervalOrder::from_unit_starts(&starts);
        prop_assert!(order.is_proper());
        let g = order.to_graph();
        prop_assert!(is_proper_interval(&g));
        for (u, v) in (0..starts.len()).tuple_combinations() {
            prop_assert_eq!(g.has_edge(u, v), (starts[u] - starts[v]).abs() < 1.0);
        }
    }

    #[test]
    fn hitting_set_solutions_hit_everything(sets in proptest::collection::vec(proptest::collection::btree_set(0usize..7, 1..=3), 0..10), k in 0usize..4) {
        let sets: Vec<Vec<usize>> = sets.into_iter().map(|s| s.into_iter().collect()).collect();
        let r = solve_hitting_set(&sets, k);
        let exists = (0..=k).any(|size| (0..7).combinations(size).any(|h| sets.iter().all(|s| s.iter().any(|x| h.contains(x)))));
        prop_assert_eq!(r.is_yes(), exists);
        if let Some(h) = r.solution {
            let h: BTreeSet<usize> = h.into_iter().collect();
            prop_assert!(h.len() <= k);
            prop_assert!(sets.iter().all(|s| s.iter().any(|x| h.contains(x))));
        }
    }
}
