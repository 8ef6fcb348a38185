use fpss::gen::*;
use fpss::graph::{Graph, VertexSet};
use fpss::hereditary::*;
use fpss::solvers::{brute_force_oracle, Instance};
use fpss::stream::{materialize, Replay, Stream};
use fpss::util::rng_for;

fn instance(class: HereditaryClass, n: usize, k: usize, rng: &mut fpss::util::Rng) -> Graph {
    let base_n = n - k;
    let base = match class {
        HereditaryClass::ProperInterval => random_proper_interval(base_n, rng),
        HereditaryClass::Block => random_block_graph(base_n, rng),
    };
    plant(&base, k, 0.4, rng).0
}

fn agreement(class: HereditaryClass) -> (usize, usize) {
    let mut rng = rng_for(41, class as u64);
    let mut agree = 0;
    for run in 0..100u64 {
        let n = 8 + (run as usize % 11);
        let k = run as usize % 3;
        let g = instance(class, n, k, &mut rng);
        // Half the runs ask for one deletion fewer than planted.
        let ask = if run % 2 == 0 { k } else { k.saturating_sub(1) };
        let s = turnstile_stream(&g, ask, Some(class.problem()), 0.5, &mut rng);
        let out = solve_stream(&s, class, ask, &HereditaryConfig { seed: run, ..Default::default() }).unwrap();
        let g = materialize(&s);
        if let Some(sol) = &out.result.solution {
            assert!(sol.len() <= ask);
            let (h, _) = g.delete(&VertexSet::from_iter_cap(g.n(), sol.iter().copied()));
            assert!(class.contains(&h), "unsound solution {sol:?}");
        }
        let want = brute_force_oracle(&Instance::undirected(class.problem(), g), ask).unwrap().is_yes();
        agree += usize::from(want == out.result.is_yes());
    }
    (agree, 100)
}

#[test]
fn proper_interval_agrees_with_brute_force() {
    let (a, t) = agreement(HereditaryClass::ProperInterval);
    assert!(a * 10 >= t * 9, "{a}/{t}");
}

#[test]
fn block_agrees_with_brute_force() {
    let (a, t) = agreement(HereditaryClass::Block);
    assert!(a * 10 >= t * 9, "{a}/{t}");
}

#[test]
fn union_representation_queries() {
    let g = Graph::from_edges(6, [(0, 1), (1, 2), (2, 0), (2, 3), (3, 4), (4, 5), (5, 3)]);
    let s = Stream::from_graph(&g, 1, None);
    let (rep, _) = stream_phase(&mut Replay::new(&s), HereditaryClass::Block, 1, 9).unwrap();
    assert_eq!(rep.failures(), 0);
    for u in 0..6 {
        for v in 0..6 {
            assert_eq!(rep.edge_query_union(u, v), g.has_edge(u, v));
        }
    }
}

#[test]
fn minimal_cover_enumeration_is_bounded() {
    let mut rng = rng_for(3, 3);
    for k in 0..=2 {
        let g = random_graph(12, 0.5, &mut rng);
        let s = Stream::from_graph(&g, k, None);
        let out = solve_stream(&s, HereditaryClass::ProperInterval, k, &HereditaryConfig::default()).unwrap();
        assert!(out.covers_tried <= 1 << k);
    }
}
