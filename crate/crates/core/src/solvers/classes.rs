//! Direct membership checks for the target graph classes on explicit graphs.
//!
//! These follow the class definitions (or classical structural
//! characterisations) rather than the degree-sequence tests used by the
//! streaming recognizers, so the two can serve as oracles for each other.

use crate::graph::{Graph, VertexSet};

/// P3-free: every closed neighbourhood is a clique.
pub fn is_cluster(g: &Graph) -> bool {
    (0..g.n()).all(|v| {
        let nb: Vec<usize> = g.neighbors(v).iter().collect();
        nb.iter().enumerate().all(|(i, &a)| nb[i + 1..].iter().all(|&b| g.has_edge(a, b)))
    })
}

/// Maximum cardinality search order; the reverse is a perfect elimination
/// ordering iff the graph is chordal.
fn mcs_order(g: &Graph) -> Vec<usize> {
    let n = g.n();
    let mut weight = vec![0usize; n];
    let mut done = vec![false; n];
    let mut order = Vec::with_capacity(n);
    for _ in 0..n {
        let v = (0..n).filter(|&v| !done[v]).max_by_key(|&v| (weight[v], std::cmp::Reverse(v))).unwrap();
        done[v] = true;
        order.push(v);
        for w in g.neighbors(v).iter() {
            if !done[w] {
                weight[w] += 1;
            }
        }
    }
    order
}

/// Chordality via maximum cardinality search and a PEO check.
pub fn is_chordal(g: &Graph) -> bool {
    let n = g.n();
    let order = mcs_order(g);
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    // In visit order, the earlier neighbours of each vertex must form a clique;
    // it suffices to check they are adjacent to the latest of them.
    for &v in &order {
        let earlier: Vec<usize> = g.neighbors(v).iter().filter(|&w| pos[w] < pos[v]).collect();
        if let Some(&p) = earlier.iter().max_by_key(|&&w| pos[w]) {
            if earlier.iter().any(|&w| w != p && !g.has_edge(w, p)) {
                return false;
            }
        }
    }
    true
}

/// Split graphs are exactly the graphs that are chordal with a chordal complement.
pub fn is_split(g: &Graph) -> bool {
    is_chordal(g) && is_chordal(&g.complement())
}

/// Threshold graphs are built by repeatedly adding an isolated or a dominating vertex;
/// peel in reverse.
pub fn is_threshold(g: &Graph) -> bool {
    let mut alive = VertexSet::full(g.n());
    let mut deg: Vec<usize> = (0..g.n()).map(|v| g.degree(v)).collect();
    let mut left = g.n();
    while left > 0 {
        let pick = alive.iter().find(|&v| deg[v] == 0 || deg[v] == left - 1);
        let Some(v) = pick else { return false };
        alive.remove(v);
        left -= 1;
        for w in g.neighbors(v).iter() {
            if alive.contains(w) {
                deg[w] -= 1;
            }
        }
    }
    true
}

pub fn is_bipartite(g: &Graph) -> bool {
    let n = g.n();
    let mut side = vec![u8::MAX; n];
    let mut stack = Vec::new();
    for s in 0..n {
        if side[s] != u8::MAX {
            continue;
        }
        side[s] = 0;
        stack.push(s);
        while let Some(x) = stack.pop() {
            for y in g.neighbors(x).iter() {
                if side[y] == u8::MAX {
                    side[y] = 1 - side[x];
                    stack.push(y);
                } else if side[y] == side[x] {
                    return false;
                }
            }
        }
    }
    true
}

/// Biconnected components as vertex sets (Hopcroft–Tarjan, iterative).
pub fn biconnected_components(g: &Graph) -> Vec<VertexSet> {
    let n = g.n();
    let mut disc = vec![usize::MAX; n];
    let mut low = vec![0; n];
    let mut time = 0;
    let mut edge_stack: Vec<(usize, usize)> = Vec::new();
    let mut blocks = Vec::new();
    let adj: Vec<Vec<usize>> = (0..n).map(|v| g.neighbors(v).to_vec()).collect();
    for root in 0..n {
        if disc[root] != usize::MAX {
            continue;
        }
        disc[root] = time;
        low[root] = time;
        time += 1;
        if adj[root].is_empty() {
            blocks.push(VertexSet::from_iter_cap(n, [root]));
            continue;
        }
        // (vertex, parent, next neighbour index)
        let mut stack = vec![(root, usize::MAX, 0usize)];
        while let Some(&mut (v, parent, ref mut idx)) = stack.last_mut() {
            if *idx < adj[v].len() {
                let w = adj[v][*idx];
                *idx += 1;
                if disc[w] == usize::MAX {
                    edge_stack.push((v, w));
                    disc[w] = time;
                    low[w] = time;
                    time += 1;
                    stack.push((w, v, 0));
                } else if w != parent && disc[w] < disc[v] {
                    edge_stack.push((v, w));
                    low[v] = low[v].min(disc[w]);
                }
            } else {
                stack.pop();
                if let Some(&(p, _, _)) = stack.last() {
                    low[p] = low[p].min(low[v]);
                    if low[v] >= disc[p] {
                        let mut block = VertexSet::new(n);
                        while let Some((a, b)) = edge_stack.pop() {
                            block.insert(a);
                            block.insert(b);
                            if (a, b) == (p, v) {
                                break;
                            }
                        }
                        blocks.push(block);
                    }
                }
            }
        }
    }
    blocks
}

/// Every biconnected component is a clique.
pub fn is_block_graph(g: &Graph) -> bool {
    biconnected_components(g).iter().all(|b| {
        let vs: Vec<usize> = b.iter().collect();
        vs.iter().enumerate().all(|(i, &a)| vs[i + 1..].iter().all(|&c| g.has_edge(a, c)))
    })
}

/// True iff `h` occurs as an induced subgraph of `g` (brute force, small `h`).
pub fn has_induced(g: &Graph, h: &Graph) -> bool {
    let k = h.n();
    if k > g.n() {
        return false;
    }
    let mut image = vec![usize::MAX; k];
    let mut used = vec![false; g.n()];
    fn rec(g: &Graph, h: &Graph, i: usize, image: &mut [usize], used: &mut [bool]) -> bool {
        if i == h.n() {
            return true;
        }
        for x in 0..g.n() {
            if used[x] {
                continue;
            }
            if (0..i).all(|j| g.has_edge(image[j], x) == h.has_edge(j, i)) {
                used[x] = true;
                image[i] = x;
                if rec(g, h, i + 1, image, used) {
                    return true;
                }
                used[x] = false;
            }
        }
        false
    }
    rec(g, h, 0, &mut image, &mut used)
}

/// Small named graphs used as obstructions.
pub mod named {
    use crate::graph::Graph;

    pub fn path(n: usize) -> Graph {
        Graph::from_edges(n, (1..n).map(|i| (i - 1, i)))
    }

    pub fn cycle(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).map(|i| (i, (i + 1) % n)))
    }

    pub fn complete(n: usize) -> Graph {
        Graph::from_edges(n, (0..n).flat_map(|u| (u + 1..n).map(move |v| (u, v))))
    }

    pub fn two_k2() -> Graph {
        Graph::from_edges(4, [(0, 1), (2, 3)])
    }

    /// K4 minus an edge; vertices 0 and 1 have degree 3.
    pub fn diamond() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3), (1, 2), (1, 3)])
    }

    pub fn claw() -> Graph {
        Graph::from_edges(4, [(0, 1), (0, 2), (0, 3)])
    }

    /// Triangle 0-1-2 with a pendant on each corner.
    pub fn net() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 4), (2, 5)])
    }

    /// Triangle 0-1-2 with a vertex adjacent to each of its edges.
    pub fn tent() -> Graph {
        Graph::from_edges(6, [(0, 1), (1, 2), (0, 2), (0, 3), (1, 3), (1, 4), (2, 4), (0, 5), (2, 5)])
    }

    pub fn star(leaves: usize) -> Graph {
        Graph::from_edges(leaves + 1, (1..=leaves).map(|i| (0, i)))
    }
}

#[cfg(test)]
mod tests {
    use super::named::*;
    use super::*;

    #[test]
    fn split_and_threshold_examples() {
        assert!(!is_split(&cycle(4)));
        assert!(!is_split(&cycle(5)));
        assert!(!is_split(&two_k2()));
        assert!(is_split(&star(4)));
        assert!(is_split(&path(4)));
        assert!(!is_threshold(&path(4)));
        assert!(is_threshold(&complete(3)));
        assert!(is_threshold(&Graph::new(4)));
        assert!(is_threshold(&star(3)));
    }

    #[test]
    fn chordality() {
        assert!(is_chordal(&diamond()));
        assert!(!is_chordal(&cycle(4)));
        assert!(!is_chordal(&cycle(6)));
        assert!(is_chordal(&tent()));
    }

    #[test]
    fn cluster_and_bipartite() {
        assert!(is_cluster(&Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)])));
        assert!(!is_cluster(&path(3)));
        assert!(is_bipartite(&cycle(6)));
        assert!(!is_bipartite(&cycle(5)));
    }

    #[test]
    fn block_graphs() {
        assert!(is_block_graph(&complete(5)));
        assert!(is_block_graph(&path(5)));
        assert!(!is_block_graph(&diamond()));
        assert!(!is_block_graph(&cycle(4)));
        let tri_pendant = Graph::from_edges(4, [(0, 1), (1, 2), (0, 2), (2, 3)]);
        assert!(is_block_graph(&tri_pendant));
        // Two triangles sharing a cut vertex.
        let bowtie = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (2, 3), (3, 4), (2, 4)]);
        assert!(is_block_graph(&bowtie));
        assert_eq!(biconnected_components(&bowtie).len(), 2);
    }

    #[test]
    fn induced_search() {
        assert!(has_induced(&cycle(5), &path(4)));
        assert!(!has_induced(&cycle(5), &cycle(4)));
        assert!(!has_induced(&net(), &claw()));
        assert!(!has_induced(&complete(4), &path(3)));
    }
}
