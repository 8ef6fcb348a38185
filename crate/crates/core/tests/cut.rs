use fpss::cut::*;
use fpss::gen::*;
use fpss::graph::{Graph, VertexSet};
use fpss::solvers::{brute_force_oracle, Instance};
use fpss::stream::{materialize, Problem, Replay, Stream};
use fpss::util::rng_for;

fn agreement(problem: Problem) -> usize {
    let mut rng = rng_for(77, problem as u64);
    let mut agree = 0;
    for run in 0..100u64 {
        let n = 10 + (run as usize % 15);
        let k = run as usize % 4;
        let (g, terminals, _) = planted_cut_instance(problem, n, k, &mut rng);
        // Every other run asks for one deletion fewer than planted.
        let ask = if run % 2 == 0 { k } else { k.saturating_sub(1) };
        let s = flag_terminals(turnstile_stream(&g, ask, Some(problem), 0.5, &mut rng), &terminals);
        let cfg = CutConfig { seed: run, ..Default::default() };
        let out = run_cut(problem, &s, ask, &cfg).unwrap();
        let inst = Instance::with_terminals(problem, materialize(&s), terminals);
        if let Some(sol) = &out.result.solution {
            assert!(sol.len() <= ask && inst.is_solution(sol));
        }
        let want = brute_force_oracle(&inst, ask).unwrap().is_yes();
        agree += usize::from(want == out.result.is_yes());
    }
    agree
}

#[test]
fn oct_agrees_with_brute_force() {
    let a = agreement(Problem::Oct);
    assert!(a >= 90, "{a}/100");
}

#[test]
fn sfvs_agrees_with_brute_force() {
    let a = agreement(Problem::Sfvs);
    assert!(a >= 90, "{a}/100");
}

#[test]
fn mwc_agrees_with_brute_force() {
    let a = agreement(Problem::Mwc);
    assert!(a >= 90, "{a}/100");
}

#[test]
fn sparsified_graph_is_a_subgraph_with_odd_walks() {
    let mut rng = rng_for(4, 4);
    for trial in 0..5u64 {
        let g = random_graph(20, 0.3, &mut rng);
        let s = turnstile_stream(&g, 2, None, 1.0, &mut rng);
        let spec = sample_subsets(20, 2, 2, trial, Some(200)).unwrap();
        let mut replay = Replay::new(&s);
        let sparse = sparsify(&mut replay, &spec, true, 64).unwrap();
        assert!(sparse.edges.keys().all(|&(a, b)| g.has_edge(a as usize, b as usize)));
        assert!(sparse.raw_edges <= spec.ell * 19);
        // Odd u-v walk in H_i for every edge of G_i: parity BFS on each sampled forest.
        for i in 0..spec.ell {
            let members = spec.subset(i);
            let mut one = [SampleSketch::new(i, members.clone(), true, spec.seed)];
            Replay::new(&s).replay(1, &mut one).unwrap();
            let h = Graph::from_edges(20, one[0].reduce().unwrap());
            for (x, &a) in members.iter().enumerate() {
                for &b in &members[x + 1..] {
                    if g.has_edge(a as usize, b as usize) {
                        assert!(odd_walk(&h, a as usize, b as usize));
                    }
                }
            }
        }
    }
}

fn odd_walk(h: &Graph, a: usize, b: usize) -> bool {
    let mut seen = vec![[false; 2]; h.n()];
    let mut stack = vec![(a, 0usize)];
    seen[a][0] = true;
    while let Some((u, p)) = stack.pop() {
        for w in h.neighbors(u).iter() {
            if !seen[w][1 - p] {
                seen[w][1 - p] = true;
                stack.push((w, 1 - p));
            }
        }
    }
    seen[b][1]
}

#[test]
fn sampling_event_on_a_triangle() {
    let tri = vec![vec![(0, 1), (1, 2), (2, 0)]];
    let held = (0..100u64)
        .filter(|&seed| {
            let spec = sample_subsets(3, 1, 1, seed, None).unwrap();
            let subsets: Vec<Vec<u32>> = spec.subsets().collect();
            check_sampling_event(3, 1, &subsets, &tri, 1 << 20).unwrap()
        })
        .count();
    assert!(held >= 98, "{held}/100");
}

#[test]
fn oct_on_k4_every_seed() {
    let s = Stream::from_graph(&fpss::solvers::classes::named::complete(4), 1, Some(Problem::Oct));
    for seed in 0..20 {
        let cfg = CutConfig { seed, ..Default::default() };
        assert!(!oct_pipeline(&s, 1, &cfg).unwrap().result.is_yes());
        assert!(oct_pipeline(&s, 2, &cfg).unwrap().result.is_yes());
    }
}

#[test]
fn too_many_terminal_edges_is_no() {
    let g = fpss::solvers::classes::named::complete(8);
    let s = flag_terminals(Stream::from_graph(&g, 0, None), &VertexSet::full(8));
    let out = sfvs_pipeline(&s, 0, &CutConfig::default()).unwrap();
    assert_eq!(out.terminal_edges, Some(28));
    assert!(!out.result.is_yes());
}
