//! Explicit graphs and vertex sets.
//!
//! These types are only ever built by oracles, post-processing stages and
//! static solvers. Streaming consumers never see an explicit graph.

use std::fmt;

/// A fixed-capacity bitset over vertex ids `0..capacity`.
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct VertexSet {
    words: Vec<u64>,
    capacity: usize,
}

impl VertexSet {
    pub fn new(capacity: usize) -> Self {
        Self {
            words: vec![0; capacity.div_ceil(64)],
            capacity,
        }
    }

    pub fn full(capacity: usize) -> Self {
        let mut s = Self::new(capacity);
        for v in 0..capacity {
            s.insert(v);
        }
        s
    }

    pub fn from_iter_cap(capacity: usize, items: impl IntoIterator<Item = usize>) -> Self {
        let mut s = Self::new(capacity);
        for v in items {
            s.insert(v);
        }
        s
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    #[inline]
    pub fn contains(&self, v: usize) -> bool {
        v < self.capacity && self.words[v >> 6] >> (v & 63) & 1 == 1
    }

    /// Returns true if `v` was newly inserted.
    #[inline]
    pub fn insert(&mut self, v: usize) -> bool {
        assert!(v < self.capacity, "vertex {v} out of range {}", self.capacity);
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        let fresh = *w & bit == 0;
        *w |= bit;
        fresh
    }

    #[inline]
    pub fn remove(&mut self, v: usize) -> bool {
        if v >= self.capacity {
            return false;
        }
        let w = &mut self.words[v >> 6];
        let bit = 1u64 << (v & 63);
        let had = *w & bit != 0;
        *w &= !bit;
        had
    }

    pub fn len(&self) -> usize {
        self.words.iter().map(|w| w.count_ones() as usize).sum()
    }

    pub fn is_empty(&self) -> bool {
        self.words.iter().all(|&w| w == 0)
    }

    pub fn clear(&mut self) {
        self.words.iter_mut().for_each(|w| *w = 0);
    }

    pub fn iter(&self) -> impl Iterator<Item = usize> + '_ {
        self.words.iter().enumerate().flat_map(|(i, &w)| {
            let mut w = w;
            std::iter::from_fn(move || {
                if w == 0 {
                    return None;
                }
                let b = w.trailing_zeros() as usize;
                w &= w - 1;
                Some(i * 64 + b)
            })
        })
    }

    pub fn first(&self) -> Option<usize> {
        self.iter().next()
    }

    pub fn union_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a |= b;
        }
    }

    pub fn intersect_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= b;
        }
    }

    pub fn difference_with(&mut self, other: &VertexSet) {
        for (a, b) in self.words.iter_mut().zip(&other.words) {
            *a &= !b;
        }
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.intersect_with(other);
        s
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.union_with(other);
        s
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        let mut s = self.clone();
        s.difference_with(other);
        s
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & !b == 0)
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| a & b == 0)
    }

    pub fn intersection_len(&self, other: &VertexSet) -> usize {
        self.words
            .iter()
            .zip(&other.words)
            .map(|(a, b)| (a & b).count_ones() as usize)
            .sum()
    }

    pub fn to_vec(&self) -> Vec<usize> {
        self.iter().collect()
    }
}

impl fmt::Debug for VertexSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_set().entries(self.iter()).finish()
    }
}

/// Simple undirected graph on vertices `0..n`, adjacency stored as bitsets.
#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<VertexSet>,
    m: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: (0..n).map(|_| VertexSet::new(n)).collect(),
            m: 0,
        }
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    /// Returns true if the edge was absent before.
    pub fn add_edge(&mut self, u: usize, v: usize) -> bool {
        assert_ne!(u, v, "self loops are not allowed");
        let fresh = self.adj[u].insert(v);
        self.adj[v].insert(u);
        if fresh {
            self.m += 1;
        }
        fresh
    }

    pub fn remove_edge(&mut self, u: usize, v: usize) -> bool {
        let had = self.adj[u].remove(v);
        self.adj[v].remove(u);
        if had {
            self.m -= 1;
        }
        had
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.adj[u].contains(v)
    }

    pub fn neighbors(&self, v: usize) -> &VertexSet {
        &self.adj[v]
    }

    pub fn closed_neighbors(&self, v: usize) -> VertexSet {
        let mut s = self.adj[v].clone();
        s.insert(v);
        s
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].len()
    }

    /// Edges `(u, v)` with `u < v`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.adj[u].iter().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Induced subgraph on `keep`, relabelled to `0..keep.len()` in increasing order.
    /// The returned map sends new ids to old ids.
    pub fn induced(&self, keep: &VertexSet) -> (Graph, Vec<usize>) {
        let map: Vec<usize> = keep.iter().collect();
        let mut back = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let mut g = Graph::new(map.len());
        for (i, &v) in map.iter().enumerate() {
            for w in self.adj[v].iter() {
                let j = back[w];
                if j != usize::MAX && j > i {
                    g.add_edge(i, j);
                }
            }
        }
        (g, map)
    }

    /// Induced subgraph after deleting `removed`.
    pub fn delete(&self, removed: &VertexSet) -> (Graph, Vec<usize>) {
        let keep = VertexSet::full(self.n()).difference(removed);
        self.induced(&keep)
    }

    pub fn complement(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        for u in 0..n {
            for v in u + 1..n {
                if !self.has_edge(u, v) {
                    g.add_edge(u, v);
                }
            }
        }
        g
    }

    /// Connected components as a label per vertex plus the component count.
    pub fn components(&self) -> (Vec<usize>, usize) {
        let n = self.n();
        let mut label = vec![usize::MAX; n];
        let mut count = 0;
        let mut stack = Vec::new();
        for s in 0..n {
            if label[s] != usize::MAX {
                continue;
            }
            label[s] = count;
            stack.push(s);
            while let Some(x) = stack.pop() {
                for y in self.adj[x].iter() {
                    if label[y] == usize::MAX {
                        label[y] = count;
                        stack.push(y);
                    }
                }
            }
            count += 1;
        }
        (label, count)
    }

    pub fn component_sets(&self) -> Vec<VertexSet> {
        let (label, count) = self.components();
        let mut sets = vec![VertexSet::new(self.n()); count];
        for (v, &c) in label.iter().enumerate() {
            sets[c].insert(v);
        }
        sets
    }
}

impl fmt::Debug for Graph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Graph(n={}, edges=", self.n())?;
        f.debug_list().entries(self.edges()).finish()?;
        write!(f, ")")
    }
}

/// Simple directed graph (no loops, at most one arc per ordered pair).
#[derive(Clone, PartialEq, Eq)]
pub struct Digraph {
    out: Vec<VertexSet>,
    m: usize,
}

impl Digraph {
    pub fn new(n: usize) -> Self {
        Self {
            out: (0..n).map(|_| VertexSet::new(n)).collect(),
            m: 0,
        }
    }

    pub fn from_arcs(n: usize, arcs: impl IntoIterator<Item = (usize, usize)>) -> Self {
        let mut g = Self::new(n);
        for (u, v) in arcs {
            g.add_arc(u, v);
        }
        g
    }

    pub fn n(&self) -> usize {
        self.out.len()
    }

    pub fn m(&self) -> usize {
        self.m
    }

    pub fn add_arc(&mut self, u: usize, v: usize) -> bool {
        assert_ne!(u, v, "self loops are not allowed");
        let fresh = self.out[u].insert(v);
        if fresh {
            self.m += 1;
        }
        fresh
    }

    pub fn remove_arc(&mut self, u: usize, v: usize) -> bool {
        let had = self.out[u].remove(v);
        if had {
            self.m -= 1;
        }
        had
    }

    pub fn has_arc(&self, u: usize, v: usize) -> bool {
        self.out[u].contains(v)
    }

    pub fn out_neighbors(&self, v: usize) -> &VertexSet {
        &self.out[v]
    }

    pub fn arcs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n()).flat_map(move |u| self.out[u].iter().map(move |v| (u, v)))
    }

    pub fn induced(&self, keep: &VertexSet) -> (Digraph, Vec<usize>) {
        let map: Vec<usize> = keep.iter().collect();
        let mut back = vec![usize::MAX; self.n()];
        for (i, &v) in map.iter().enumerate() {
            back[v] = i;
        }
        let mut g = Digraph::new(map.len());
        for (i, &v) in map.iter().enumerate() {
            for w in self.out[v].iter() {
                if back[w] != usize::MAX {
                    g.add_arc(i, back[w]);
                }
            }
        }
        (g, map)
    }

    pub fn delete(&self, removed: &VertexSet) -> (Digraph, Vec<usize>) {
        let keep = VertexSet::full(self.n()).difference(removed);
        self.induced(&keep)
    }

    /// True iff every unordered pair carries exactly one arc.
    pub fn is_tournament(&self) -> bool {
        let n = self.n();
        (0..n).all(|u| (u + 1..n).all(|v| self.has_arc(u, v) != self.has_arc(v, u)))
    }

    /// Kahn's algorithm; true iff there is no directed cycle.
    pub fn is_acyclic(&self) -> bool {
        let n = self.n();
        let mut indeg = vec![0usize; n];
        for (_, v) in self.arcs() {
            indeg[v] += 1;
        }
        let mut queue: Vec<usize> = (0..n).filter(|&v| indeg[v] == 0).collect();
        let mut seen = 0;
        while let Some(u) = queue.pop() {
            seen += 1;
            for v in self.out[u].iter() {
                indeg[v] -= 1;
                if indeg[v] == 0 {
                    queue.push(v);
                }
            }
        }
        seen == n
    }
}

impl fmt::Debug for Digraph {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digraph(n={}, arcs=", self.n())?;
        f.debug_list().entries(self.arcs()).finish()?;
        write!(f, ")")
    }
}

/// Disjoint-set forest with path halving and union by size.
#[derive(Clone, Debug)]
pub struct UnionFind {
    parent: Vec<usize>,
    size: Vec<usize>,
    sets: usize,
}

impl UnionFind {
    pub fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
            sets: n,
        }
    }

    pub fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Returns true if the two elements were in different sets.
    pub fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        self.sets -= 1;
        true
    }

    pub fn same(&mut self, a: usize, b: usize) -> bool {
        self.find(a) == self.find(b)
    }

    pub fn set_count(&self) -> usize {
        self.sets
    }

    pub fn set_size(&mut self, x: usize) -> usize {
        let r = self.find(x);
        self.size[r]
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn vertex_set_ops() {
        let mut a = VertexSet::new(130);
        assert!(a.insert(3));
        assert!(!a.insert(3));
        a.insert(129);
        a.insert(64);
        assert_eq!(a.to_vec(), vec![3, 64, 129]);
        assert_eq!(a.len(), 3);
        let b = VertexSet::from_iter_cap(130, [3, 5]);
        assert_eq!(a.intersection(&b).to_vec(), vec![3]);
        assert_eq!(a.difference(&b).to_vec(), vec![64, 129]);
        assert!(VertexSet::from_iter_cap(130, [3]).is_subset(&a));
        assert!(!b.is_subset(&a));
        assert!(a.remove(64));
        assert!(!a.contains(64));
    }

    #[test]
    fn induced_relabels() {
        let g = Graph::from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4)]);
        let (h, map) = g.induced(&VertexSet::from_iter_cap(5, [1, 2, 4]));
        assert_eq!(map, vec![1, 2, 4]);
        assert_eq!(h.edges().collect::<Vec<_>>(), vec![(0, 1)]);
    }

    #[test]
    fn components_and_complement() {
        let g = Graph::from_edges(5, [(0, 1), (3, 4)]);
        assert_eq!(g.components().1, 3);
        assert_eq!(g.complement().m(), 10 - 2);
    }

    #[test]
    fn tournament_acyclicity() {
        let t = Digraph::from_arcs(3, [(0, 1), (1, 2), (0, 2)]);
        assert!(t.is_tournament() && t.is_acyclic());
        let c = Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)]);
        assert!(c.is_tournament() && !c.is_acyclic());
    }

    #[test]
    fn union_find_counts() {
        let mut uf = UnionFind::new(4);
        assert!(uf.union(0, 1));
        assert!(!uf.union(1, 0));
        uf.union(2, 3);
        assert_eq!(uf.set_count(), 2);
        assert_eq!(uf.set_size(3), 2);
    }
}
