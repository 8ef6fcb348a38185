//! Instance generators: random and planted graphs, turnstile streams, and
//! exhaustive lists of small graphs and tournaments up to isomorphism.

use std::collections::HashSet;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::graph::{Digraph, Graph, VertexSet};
use crate::stream::{Op, Problem, Stream, StreamEvent, StreamHeader, StreamMode};

pub fn random_graph(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

pub fn random_tournament(n: usize, rng: &mut impl Rng) -> Digraph {
    let mut g = Digraph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.random_bool(0.5) {
                g.add_arc(u, v);
            } else {
                g.add_arc(v, u);
            }
        }
    }
    g
}

/// A transitive tournament on a random vertex order.
pub fn random_transitive_tournament(n: usize, rng: &mut impl Rng) -> Digraph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = Digraph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            g.add_arc(order[i], order[j]);
        }
    }
    g
}

/// Disjoint cliques of random sizes.
pub fn random_cluster(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut i = 0;
    while i < n {
        let size = rng.random_range(1..=(n - i).min(5));
        for a in i..i + size {
            for b in a + 1..i + size {
                g.add_edge(order[a], order[b]);
            }
        }
        i += size;
    }
    g
}

/// A clique and an independent set with random edges between them.
pub fn random_split(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    let clique: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    for u in 0..n {
        for v in u + 1..n {
            if (clique[u] && clique[v]) || ((clique[u] != clique[v]) && rng.random_bool(0.5)) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Vertices added one by one, each isolated or dominating.
pub fn random_threshold(n: usize, rng: &mut impl Rng) -> Graph {
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(rng);
    let mut g = Graph::new(n);
    for i in 0..n {
        if rng.random_bool(0.5) {
            for &w in &order[..i] {
                g.add_edge(order[i], w);
            }
        }
    }
    g
}

pub fn random_bipartite(n: usize, p: f64, rng: &mut impl Rng) -> Graph {
    let side: Vec<bool> = (0..n).map(|_| rng.random_bool(0.5)).collect();
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if side[u] != side[v] && rng.random_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    g
}

/// Random tree: each vertex attaches to an earlier one.
pub fn random_tree(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    for v in 1..n {
        g.add_edge(v, rng.random_range(0..v));
    }
    g
}

/// Random connected block graph: cliques glued at cut vertices in a tree shape.
pub fn random_block_graph(n: usize, rng: &mut impl Rng) -> Graph {
    let mut g = Graph::new(n);
    let mut placed = 1;
    while placed < n {
        let anchor = rng.random_range(0..placed);
        let size = rng.random_range(1..=(n - placed).min(4));
        let block: Vec<usize> = std::iter::once(anchor).chain(placed..placed + size).collect();
        for (i, &a) in block.iter().enumerate() {
            for &b in &block[i + 1..] {
                g.add_edge(a, b);
            }
        }
        placed += size;
    }
    g
}

/// Random connected unit interval graph: sorted left endpoints with gaps below the unit length.
pub fn random_proper_interval(n: usize, rng: &mut impl Rng) -> Graph {
    let mut starts = vec![0.0f64; n];
    for i in 1..n {
        starts[i] = starts[i - 1] + rng.random_range(0.05..0.95);
    }
    let mut perm: Vec<usize> = (0..n).collect();
    perm.shuffle(rng);
    let mut g = Graph::new(n);
    for i in 0..n {
        for j in i + 1..n {
            if starts[j] - starts[i] <= 1.0 {
                g.add_edge(perm[i], perm[j]);
            }
        }
    }
    g
}

/// Re-wires every edge at `k` random vertices, so `base` is at most `k` deletions away.
pub fn plant(base: &Graph, k: usize, p: f64, rng: &mut impl Rng) -> (Graph, Vec<usize>) {
    let n = base.n();
    let mut g = base.clone();
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
    picked.sort_unstable();
    for &v in &picked {
        for w in 0..n {
            if w != v {
                g.remove_edge(v, w);
                if rng.random_bool(p) {
                    g.add_edge(v, w);
                }
            }
        }
    }
    (g, picked)
}

/// Same for tournaments: flips random arcs at `k` vertices.
pub fn plant_tournament(base: &Digraph, k: usize, rng: &mut impl Rng) -> (Digraph, Vec<usize>) {
    let n = base.n();
    let mut g = base.clone();
    let mut picked: Vec<usize> = rand::seq::index::sample(rng, n, k.min(n)).into_vec();
    picked.sort_unstable();
    for &v in &picked {
        for w in 0..n {
            if w != v && rng.random_bool(0.5) {
                if g.remove_arc(v, w) {
                    g.add_arc(w, v);
                } else if g.remove_arc(w, v) {
                    g.add_arc(v, w);
                }
            }
        }
    }
    (g, picked)
}

/// A turnstile stream whose final graph is `g`: its edges plus `churn * m`
/// extra edges that are inserted and later deleted, in random order.
pub fn turnstile_stream(g: &Graph, k: usize, problem: Option<Problem>, churn: f64, rng: &mut impl Rng) -> Stream {
    let n = g.n();
    let mut events: Vec<StreamEvent> = g.edges().map(|(u, v)| StreamEvent::insert(u, v)).collect();
    let absent: Vec<(usize, usize)> = (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))).filter(|&(u, v)| !g.has_edge(u, v)).collect();
    let extra = ((g.m() as f64 * churn).round() as usize).min(absent.len());
    for i in rand::seq::index::sample(rng, absent.len(), extra).into_iter() {
        let (u, v) = absent[i];
        events.push(StreamEvent::insert(u, v));
        events.push(StreamEvent::delete(u, v));
    }
    events.shuffle(rng);
    fix_order(&mut events, false);
    let mut header = StreamHeader::new(n, k);
    header.problem = problem;
    header.mode = StreamMode::Turnstile;
    Stream::from_events(header, events).expect("generated stream is valid")
}

/// Directed counterpart: churn inserts the reverse of `churn * m` arcs and deletes them again.
pub fn turnstile_digraph_stream(g: &Digraph, k: usize, churn: f64, rng: &mut impl Rng) -> Stream {
    let arcs: Vec<(usize, usize)> = g.arcs().collect();
    let mut events: Vec<StreamEvent> = arcs.iter().map(|&(u, v)| StreamEvent::insert(u, v)).collect();
    let extra = ((arcs.len() as f64 * churn).round() as usize).min(arcs.len());
    for i in rand::seq::index::sample(rng, arcs.len(), extra).into_iter() {
        let (u, v) = arcs[i];
        if !g.has_arc(v, u) {
            events.push(StreamEvent::insert(v, u));
            events.push(StreamEvent::delete(v, u));
        }
    }
    events.shuffle(rng);
    fix_order(&mut events, true);
    let mut header = StreamHeader::new(g.n(), k);
    header.problem = Some(Problem::Fvst);
    Stream::from_events(header, events).expect("generated stream is valid")
}

/// Swaps each deletion after its matching insertion.
fn fix_order(events: &mut [StreamEvent], directed: bool) {
    let key_of = |e: &StreamEvent| if directed { (e.u, e.v) } else { (e.u.min(e.v), e.u.max(e.v)) };
    let mut open: HashSet<(u32, u32)> = HashSet::new();
    let mut i = 0;
    while i < events.len() {
        let key = key_of(&events[i]);
        if events[i].sign() < 0 && !open.contains(&key) {
            let j = (i + 1..events.len())
                .find(|&j| events[j].sign() > 0 && key_of(&events[j]) == key)
                .expect("deletion has an insertion");
            events.swap(i, j);
        }
        let ev = &events[i];
        if ev.sign() > 0 {
            open.insert(key);
        } else {
            open.remove(&key);
        }
        i += 1;
    }
}

// Canonical forms by individualization and refinement. Rows are out-neighbour bitmasks.

fn refine(rows: &[u64], mut cells: Vec<Vec<usize>>) -> Vec<Vec<usize>> {
    let n = rows.len();
    let cols: Vec<u64> = (0..n).map(|v| (0..n).filter(|&u| rows[u] >> v & 1 == 1).fold(0, |m, u| m | 1 << u)).collect();
    loop {
        let masks: Vec<u64> = cells.iter().map(|c| c.iter().fold(0u64, |m, &v| m | 1 << v)).collect();
        let mut next = Vec::with_capacity(n);
        for cell in &cells {
            if cell.len() == 1 {
                next.push(cell.clone());
                continue;
            }
            let mut keyed: Vec<(Vec<u32>, usize)> = cell
                .iter()
                .map(|&v| {
                    let sig = masks.iter().flat_map(|&m| [(rows[v] & m).count_ones(), (cols[v] & m).count_ones()]).collect();
                    (sig, v)
                })
                .collect();
            keyed.sort();
            for group in keyed.chunk_by(|a, b| a.0 == b.0) {
                next.push(group.iter().map(|x| x.1).collect());
            }
        }
        if next.len() == cells.len() {
            return next;
        }
        cells = next;
    }
}

fn relabel(rows: &[u64], order: &[usize]) -> Vec<u64> {
    let mut pos = vec![0; rows.len()];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    order.iter().map(|&v| (0..rows.len()).filter(|&u| rows[v] >> u & 1 == 1).fold(0u64, |m, u| m | 1 << pos[u])).collect()
}

fn search(rows: &[u64], cells: Vec<Vec<usize>>, best: &mut Option<Vec<u64>>) {
    let cells = refine(rows, cells);
    let Some(ci) = cells.iter().position(|c| c.len() > 1) else {
        let order: Vec<usize> = cells.iter().map(|c| c[0]).collect();
        let form = relabel(rows, &order);
        if best.as_ref().is_none_or(|b| form < *b) {
            *best = Some(form);
        }
        return;
    };
    let cell = &cells[ci];
    // Swapping two twins of the same cell is an automorphism fixing every
    // other vertex, so one representative per twin class suffices.
    let mut reps: Vec<usize> = Vec::new();
    for &v in cell {
        let twin = reps.iter().any(|&r| {
            let mask = !(1u64 << v | 1u64 << r);
            rows[v] & mask == rows[r] & mask
                && (0..rows.len()).filter(|&u| u != v && u != r).all(|u| (rows[u] >> v & 1) == (rows[u] >> r & 1))
                && (rows[v] >> r & 1) == (rows[r] >> v & 1)
        });
        if !twin {
            reps.push(v);
        }
    }
    for v in reps {
        let mut next = cells[..ci].to_vec();
        next.push(vec![v]);
        next.push(cell.iter().copied().filter(|&x| x != v).collect());
        next.extend_from_slice(&cells[ci + 1..]);
        search(rows, next, best);
    }
}

/// Canonical adjacency rows: equal for isomorphic inputs. Limited to 64 vertices.
pub fn canonical_form(rows: &[u64]) -> Vec<u64> {
    assert!(rows.len() <= 64);
    if rows.is_empty() {
        return Vec::new();
    }
    let mut best = None;
    search(rows, vec![(0..rows.len()).collect()], &mut best);
    best.unwrap()
}

fn graph_rows(g: &Graph) -> Vec<u64> {
    (0..g.n()).map(|v| g.neighbors(v).iter().fold(0u64, |m, u| m | 1 << u)).collect()
}

fn digraph_rows(g: &Digraph) -> Vec<u64> {
    (0..g.n()).map(|v| g.out_neighbors(v).iter().fold(0u64, |m, u| m | 1 << u)).collect()
}

pub fn graph_key(g: &Graph) -> Vec<u64> {
    canonical_form(&graph_rows(g))
}

pub fn digraph_key(g: &Digraph) -> Vec<u64> {
    canonical_form(&digraph_rows(g))
}

/// One representative per isomorphism class of graphs on `n` vertices.
pub fn all_graphs(n: usize) -> Vec<Graph> {
    assert!(n <= 10, "exhaustive graph lists are only practical for small n");
    let mut level = vec![Graph::new(0)];
    for size in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 0u64..1 << (size - 1) {
                let mut h = Graph::new(size);
                for (u, v) in g.edges() {
                    h.add_edge(u, v);
                }
                for u in 0..size - 1 {
                    if mask >> u & 1 == 1 {
                        h.add_edge(u, size - 1);
                    }
                }
                if seen.insert(graph_key(&h)) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// One representative per isomorphism class of tournaments on `n` vertices.
pub fn all_tournaments(n: usize) -> Vec<Digraph> {
    assert!(n <= 10);
    let mut level = vec![Digraph::new(0)];
    for size in 1..=n {
        let mut seen = HashSet::new();
        let mut next = Vec::new();
        for g in &level {
            for mask in 0u64..1 << (size - 1) {
                let mut h = Digraph::new(size);
                for (u, v) in g.arcs() {
                    h.add_arc(u, v);
                }
                for u in 0..size - 1 {
                    if mask >> u & 1 == 1 {
                        h.add_arc(u, size - 1);
                    } else {
                        h.add_arc(size - 1, u);
                    }
                }
                if seen.insert(digraph_key(&h)) {
                    next.push(h);
                }
            }
        }
        level = next;
    }
    level
}

/// Connected graphs among `all_graphs(n)`.
pub fn all_connected_graphs(n: usize) -> Vec<Graph> {
    all_graphs(n).into_iter().filter(|g| g.components().1 == 1).collect()
}

/// Graph without a terminal cycle: a random graph on the non-terminals, each
/// terminal hanging off a single vertex.
pub fn random_sfvs_base(n: usize, terminals: &VertexSet, rng: &mut impl Rng) -> Graph {
    let inner: Vec<usize> = (0..n).filter(|&v| !terminals.contains(v)).collect();
    let mut g = Graph::new(n);
    for (i, &a) in inner.iter().enumerate() {
        for &b in &inner[i + 1..] {
            if rng.random_bool(0.25) {
                g.add_edge(a, b);
            }
        }
    }
    for t in terminals.iter() {
        let pool: Vec<usize> = (0..n).filter(|&v| v != t && (!terminals.contains(v) || v < t)).collect();
        if !pool.is_empty() {
            g.add_edge(t, pool[rng.random_range(0..pool.len())]);
        }
    }
    g
}

/// Graph whose components each hold at most one terminal: vertices join a
/// random terminal's group and each group is a random connected graph.
pub fn random_mwc_base(n: usize, terminals: &VertexSet, rng: &mut impl Rng) -> Graph {
    let ts: Vec<usize> = terminals.iter().collect();
    let mut groups: Vec<Vec<usize>> = ts.iter().map(|&t| vec![t]).collect();
    if groups.is_empty() {
        groups.push(Vec::new());
    }
    for v in (0..n).filter(|&v| !terminals.contains(v)) {
        let i = rng.random_range(0..groups.len());
        groups[i].push(v);
    }
    let mut g = Graph::new(n);
    for grp in &groups {
        for i in 1..grp.len() {
            g.add_edge(grp[i], grp[rng.random_range(0..i)]);
            for j in 0..i {
                if rng.random_bool(0.2) {
                    g.add_edge(grp[i], grp[j]);
                }
            }
        }
    }
    g
}

/// A YES instance at budget `k` for a cut problem: graph, terminals and the planted vertices.
pub fn planted_cut_instance(problem: Problem, n: usize, k: usize, rng: &mut impl Rng) -> (Graph, VertexSet, Vec<usize>) {
    let terminals = if problem.has_terminals() { random_terminals(n, (n / 5).max(2), rng) } else { VertexSet::new(n) };
    let base = match problem {
        Problem::Sfvs => random_sfvs_base(n, &terminals, rng),
        Problem::Mwc => random_mwc_base(n, &terminals, rng),
        _ => random_bipartite(n, 0.3, rng),
    };
    let (g, plant) = plant(&base, k, 0.3, rng);
    (g, terminals, plant)
}

/// Marks `terminals` the way terminal problems expect: flags on the first
/// inserted edge at each terminal, and a header entry for terminals without edges.
pub fn flag_terminals(mut stream: Stream, terminals: &VertexSet) -> Stream {
    let mut seen = vec![false; stream.n()];
    for ev in stream.events.iter_mut() {
        if ev.op == Op::Insert {
            let (u, v) = ev.endpoints();
            ev.term_u |= !seen[u] && terminals.contains(u);
            ev.term_v |= !seen[v] && terminals.contains(v);
            seen[u] = true;
            seen[v] = true;
        }
    }
    let silent: Vec<usize> = terminals.iter().filter(|&t| !seen[t]).collect();
    if !silent.is_empty() {
        stream.header.terminals = Some(silent);
    }
    stream
}

/// Terminal set drawn uniformly, of the given size.
pub fn random_terminals(n: usize, count: usize, rng: &mut impl Rng) -> VertexSet {
    VertexSet::from_iter_cap(n, rand::seq::index::sample(rng, n, count.min(n)).into_iter())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::{is_block_graph, is_cluster, is_split, is_threshold};
    use crate::interval::is_proper_interval;
    use crate::stream::materialize;
    use crate::util::rng_for;

    #[test]
    fn counts_match_known_sequences() {
        // Graphs: 1, 2, 4, 11, 34, 156, 1044; tournaments: 1, 1, 2, 4, 12, 56.
        let graphs: Vec<usize> = (1..=7).map(|n| all_graphs(n).len()).collect();
        assert_eq!(graphs, vec![1, 2, 4, 11, 34, 156, 1044]);
        let tours: Vec<usize> = (1..=6).map(|n| all_tournaments(n).len()).collect();
        assert_eq!(tours, vec![1, 1, 2, 4, 12, 56]);
        assert_eq!(all_connected_graphs(5).len(), 21);
    }

    #[test]
    fn canonical_form_is_label_invariant() {
        let mut rng = rng_for(1, 1);
        for _ in 0..50 {
            let g = random_graph(9, 0.4, &mut rng);
            let mut perm: Vec<usize> = (0..9).collect();
            perm.shuffle(&mut rng);
            let h = Graph::from_edges(9, g.edges().map(|(u, v)| (perm[u], perm[v])));
            assert_eq!(graph_key(&g), graph_key(&h));
        }
    }

    #[test]
    fn class_generators_produce_members() {
        let mut rng = rng_for(2, 2);
        for n in 1..15 {
            assert!(is_cluster(&random_cluster(n, &mut rng)));
            assert!(is_split(&random_split(n, &mut rng)));
            assert!(is_threshold(&random_threshold(n, &mut rng)));
            assert!(is_block_graph(&random_block_graph(n, &mut rng)));
            let pi = random_proper_interval(n, &mut rng);
            assert!(is_proper_interval(&pi));
            assert_eq!(pi.components().1, 1);
            assert!(random_transitive_tournament(n, &mut rng).is_acyclic());
        }
    }

    #[test]
    fn turnstile_stream_ends_at_the_graph() {
        let mut rng = rng_for(3, 3);
        let g = random_graph(12, 0.3, &mut rng);
        let s = turnstile_stream(&g, 1, None, 0.5, &mut rng);
        assert_eq!(materialize(&s), g);
        assert!(s.events.iter().any(|e| e.sign() < 0));
        let t = random_tournament(8, &mut rng);
        let s = turnstile_digraph_stream(&t, 1, 0.5, &mut rng);
        assert_eq!(crate::stream::materialize_digraph(&s), t);
    }
}
