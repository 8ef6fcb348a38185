//! Linear sketches over turnstile streams.

pub mod connectivity;
pub mod field;
pub mod sparse;

pub use connectivity::{ConnectivitySketch, SketchError, DEFAULT_C};
pub use sparse::{Recovered, SparseRecovery};

/// Bipartite double cover of a graph on `n` vertices: vertex `v` has copies
/// `v` (side a) and `v + n` (side b).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct DoubleCoverMap {
    pub n: usize,
}

impl DoubleCoverMap {
    pub fn new(n: usize) -> Self {
        Self { n }
    }

    pub fn cover_size(&self) -> usize {
        2 * self.n
    }

    /// The two cover edges `(u_a, v_b)` and `(u_b, v_a)`.
    pub fn edges(&self, u: usize, v: usize) -> [(usize, usize); 2] {
        [(u, v + self.n), (u + self.n, v)]
    }

    /// Original vertex of a cover vertex.
    pub fn project(&self, x: usize) -> usize {
        x % self.n
    }
}

/// Sketch of the double cover: feeds both cover edges for every update.
#[derive(Clone, Debug, PartialEq)]
pub struct CoverSketch {
    pub map: DoubleCoverMap,
    pub sketch: ConnectivitySketch,
}

impl CoverSketch {
    pub fn new(n: usize, c: u32, seed: u64) -> Self {
        Self { map: DoubleCoverMap::new(n), sketch: ConnectivitySketch::new(2 * n, c, seed) }
    }

    pub fn update(&mut self, u: usize, v: usize, sign: i64) {
        for (a, b) in self.map.edges(u, v) {
            self.sketch.update(a, b, sign);
        }
    }

    pub fn words(&self) -> usize {
        self.sketch.words()
    }
}

/// A graph is bipartite iff its double cover has twice as many components.
pub fn is_bipartite(graph: &ConnectivitySketch, cover: &CoverSketch) -> Result<bool, SketchError> {
    Ok(cover.sketch.components()? == 2 * graph.components()?)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn verdict(g: &Graph, seed: u64) -> bool {
        let mut s = ConnectivitySketch::new(g.n(), DEFAULT_C, seed);
        let mut d = CoverSketch::new(g.n(), DEFAULT_C, seed + 1);
        for (u, v) in g.edges() {
            s.update(u, v, 1);
            d.update(u, v, 1);
        }
        is_bipartite(&s, &d).unwrap()
    }

    #[test]
    fn cover_edges() {
        let m = DoubleCoverMap::new(5);
        assert_eq!(m.edges(1, 3), [(1, 8), (6, 3)]);
        assert_eq!(m.project(8), 3);
    }

    #[test]
    fn small_cases() {
        assert!(verdict(&Graph::from_edges(4, [(0, 1), (1, 2), (2, 3), (3, 0)]), 1));
        assert!(!verdict(&Graph::from_edges(3, [(0, 1), (1, 2), (2, 0)]), 1));
        assert!(verdict(&Graph::new(5), 1));
    }
}
