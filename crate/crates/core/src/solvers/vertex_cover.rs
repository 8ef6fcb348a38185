//! Enumeration of minimal vertex covers of bounded size.

use crate::graph::{Graph, VertexSet};

/// Emits every minimal vertex cover of size at most `k` exactly once.
///
/// `adjacent` is queried lazily, so the graph can be implicit. Branching takes
/// the lowest uncovered pair `(u, v)`: either `u` joins the cover, or `u` stays
/// out and all of its neighbours join. Returning `true` from `emit` stops the search.
pub fn enumerate_min_vertex_covers_with(
    n: usize,
    k: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
    emit: &mut dyn FnMut(&VertexSet) -> bool,
) -> bool {
    let mut cover = VertexSet::new(n);
    rec(n, k, adjacent, &mut cover, emit)
}

fn rec(
    n: usize,
    k: usize,
    adjacent: &dyn Fn(usize, usize) -> bool,
    cover: &mut VertexSet,
    emit: &mut dyn FnMut(&VertexSet) -> bool,
) -> bool {
    let open = (0..n)
        .filter(|&u| !cover.contains(u))
        .find_map(|u| (u + 1..n).find(|&v| !cover.contains(v) && adjacent(u, v)).map(|_| u));
    let Some(u) = open else {
        let minimal = cover.iter().all(|x| (0..n).any(|y| y != x && !cover.contains(y) && adjacent(x, y)));
        return minimal && emit(cover);
    };
    if cover.len() >= k {
        return false;
    }
    cover.insert(u);
    if rec(n, k, adjacent, cover, emit) {
        return true;
    }
    cover.remove(u);

    let missing: Vec<usize> = (0..n).filter(|&w| w != u && !cover.contains(w) && adjacent(u, w)).collect();
    if cover.len() + missing.len() > k {
        return false;
    }
    for &w in &missing {
        cover.insert(w);
    }
    // Mark u as excluded by construction: all its neighbours are now covered,
    // so it can never be picked again as the low end of an open pair.
    let stop = rec(n, k, adjacent, cover, emit);
    for &w in &missing {
        cover.remove(w);
    }
    stop
}

/// All minimal vertex covers of `g` with at most `k` vertices.
pub fn enumerate_min_vertex_covers(g: &Graph, k: usize) -> Vec<VertexSet> {
    let mut out = Vec::new();
    enumerate_min_vertex_covers_with(g.n(), k, &|u, v| g.has_edge(u, v), &mut |c| {
        out.push(c.clone());
        false
    });
    out
}
