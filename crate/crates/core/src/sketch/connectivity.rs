//! Linear connectivity sketch with Borůvka-style spanning forest extraction.
//!
//! Vertex `x` holds, per round, an l0-sampler over its signed incidence vector:
//! edge `(a, b)` with `a < b` enters `a`'s vector with `+1` and `b`'s with `-1`,
//! so summing the vectors of a vertex set cancels its internal edges. A sampler
//! is a stack of nested subsampling levels, each a 1-sparse recovery cell.
//! Only nonzero cells are stored.

use std::collections::HashMap;

use rand::Rng as _;

use super::field;
use crate::graph::UnionFind;
use crate::util::rng_for;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum SketchError {
    #[error("spanning forest extraction stalled after {rounds} rounds with {unmerged} unfinished components")]
    SketchFailure { rounds: usize, unmerged: usize },
}

/// Default failure parameter: success probability at least `1 - 1/n^c`.
pub const DEFAULT_C: u32 = 3;

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
struct Cell {
    count: i64,
    sum: u64,
    fp: u64,
}

impl Cell {
    fn is_zero(&self) -> bool {
        self.count == 0 && self.sum == 0 && self.fp == 0
    }

    #[inline]
    fn add(&mut self, o: &Cell) {
        self.count += o.count;
        self.sum = field::add(self.sum, o.sum);
        self.fp = field::add(self.fp, o.fp);
    }
}

fn ceil_log2(n: usize) -> usize {
    (usize::BITS - n.max(2).saturating_sub(1).leading_zeros()) as usize
}

/// Number of Borůvka rounds for `n` vertices: `ceil(log2 n)` merge rounds plus `4c` spare rounds.
pub fn rounds_for(n: usize, c: u32) -> usize {
    ceil_log2(n) + 4 * c as usize
}

#[derive(Clone, Debug)]
pub struct ConnectivitySketch {
    n: usize,
    rounds: usize,
    levels: usize,
    level_hash: Vec<(u64, u64)>,
    z: u64,
    cells: HashMap<u64, Vec<Cell>>,
    words: usize,
}

impl PartialEq for ConnectivitySketch {
    fn eq(&self, other: &Self) -> bool {
        self.n == other.n
            && self.rounds == other.rounds
            && self.level_hash == other.level_hash
            && self.z == other.z
            && self.cells == other.cells
    }
}

impl ConnectivitySketch {
    pub fn new(n: usize, c: u32, seed: u64) -> Self {
        let rounds = rounds_for(n, c);
        let levels = 2 * ceil_log2(n) + 1;
        let mut rng = rng_for(seed, 0xc0_77ec7);
        let level_hash = (0..rounds).map(|_| (rng.random_range(1..field::P), rng.random_range(0..field::P))).collect();
        let z = rng.random_range(2..field::P);
        Self { n, rounds, levels, level_hash, z, cells: HashMap::new(), words: 0 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn rounds(&self) -> usize {
        self.rounds
    }

    /// Words physically held: one key word per stored sampler plus three per nonzero cell.
    pub fn words(&self) -> usize {
        self.words
    }

    #[inline]
    fn level(&self, round: usize, e: u64) -> usize {
        let (a, b) = self.level_hash[round];
        let h = field::add(field::mul(a, e), b);
        (h.trailing_zeros() as usize).min(self.levels - 1)
    }

    /// Applies an edge insertion (`sign = 1`) or deletion (`sign = -1`).
    pub fn update(&mut self, u: usize, v: usize, sign: i64) {
        debug_assert!(u != v && u < self.n && v < self.n);
        let (a, b) = if u < v { (u, v) } else { (v, u) };
        let e = (a * self.n + b) as u64;
        let fpe = field::pow(self.z, e);
        for r in 0..self.rounds {
            let lvl = self.level(r, e);
            for (x, s) in [(a, sign), (b, -sign)] {
                let sf = field::from_i64(s);
                let delta = Cell { count: s, sum: field::mul(sf, e), fp: field::mul(sf, fpe) };
                self.apply(x, r, lvl, &delta);
            }
        }
    }

    fn apply(&mut self, x: usize, r: usize, lvl: usize, delta: &Cell) {
        let key = (x * self.rounds + r) as u64;
        let stack = match self.cells.get_mut(&key) {
            Some(s) => s,
            None => {
                self.words += 1;
                self.cells.entry(key).or_default()
            }
        };
        if stack.len() <= lvl {
            self.words += 3 * (lvl + 1 - stack.len());
            stack.resize(lvl + 1, Cell::default());
        }
        for cell in &mut stack[..=lvl] {
            cell.add(delta);
        }
        while stack.last().is_some_and(Cell::is_zero) {
            stack.pop();
            self.words -= 3;
        }
        if stack.is_empty() {
            self.cells.remove(&key);
            self.words -= 1;
        }
    }

    /// Adds another sketch built with the same parameters and seed.
    pub fn merge(&mut self, other: &ConnectivitySketch) {
        assert!(self.n == other.n && self.level_hash == other.level_hash && self.z == other.z);
        for (&key, stack) in &other.cells {
            let x = key as usize / self.rounds;
            let r = key as usize % self.rounds;
            for (lvl, cell) in stack.iter().enumerate().rev() {
                // Apply each level separately: the delta of level l is cell_l - cell_{l+1}.
                let mut d = *cell;
                if let Some(next) = stack.get(lvl + 1) {
                    d.count -= next.count;
                    d.sum = field::sub(d.sum, next.sum);
                    d.fp = field::sub(d.fp, next.fp);
                }
                if !d.is_zero() {
                    self.apply(x, r, lvl, &d);
                }
            }
        }
    }

    fn decode(&self, cell: &Cell) -> Option<(usize, usize)> {
        let e = match cell.count {
            1 => cell.sum,
            -1 => field::neg(cell.sum),
            _ => return None,
        };
        if e >= (self.n * self.n) as u64 {
            return None;
        }
        if field::mul(field::from_i64(cell.count), field::pow(self.z, e)) != cell.fp {
            return None;
        }
        let (a, b) = (e as usize / self.n, e as usize % self.n);
        (a < b).then_some((a, b))
    }

    /// Summed sampler stacks of round `r` per component root, over vertices holding state.
    fn component_sums(&self, r: usize, uf: &mut UnionFind, active: &[usize]) -> HashMap<usize, Vec<Cell>> {
        let mut sums: HashMap<usize, Vec<Cell>> = HashMap::new();
        for &x in active {
            if let Some(stack) = self.cells.get(&((x * self.rounds + r) as u64)) {
                let acc = sums.entry(uf.find(x)).or_default();
                if acc.len() < stack.len() {
                    acc.resize(stack.len(), Cell::default());
                }
                for (a, c) in acc.iter_mut().zip(stack) {
                    a.add(c);
                }
            }
        }
        sums.retain(|_, s| s.iter().any(|c| !c.is_zero()));
        sums
    }

    /// Spanning forest of the current graph, or a failure when some component
    /// still has outgoing mass after the last round.
    pub fn spanning_forest(&self) -> Result<Vec<(usize, usize)>, SketchError> {
        let mut uf = UnionFind::new(self.n);
        let mut active: Vec<usize> = self.cells.keys().map(|&k| k as usize / self.rounds).collect();
        active.sort_unstable();
        active.dedup();
        let mut forest = Vec::new();
        for r in 0..self.rounds {
            let sums = self.component_sums(r, &mut uf, &active);
            if sums.is_empty() {
                return Ok(forest);
            }
            let mut roots: Vec<&usize> = sums.keys().collect();
            roots.sort_unstable();
            let mut found = Vec::new();
            for root in roots {
                let stack = &sums[root];
                let edge = stack.iter().rev().find_map(|c| self.decode(c)).filter(|&(a, b)| {
                    let (ra, rb) = (uf.find(a), uf.find(b));
                    (ra == *root) != (rb == *root)
                });
                if let Some(e) = edge {
                    found.push(e);
                }
            }
            for (a, b) in found {
                if uf.union(a, b) {
                    forest.push((a, b));
                }
            }
        }
        let left = self.component_sums(0, &mut uf, &active);
        if left.is_empty() {
            Ok(forest)
        } else {
            Err(SketchError::SketchFailure { rounds: self.rounds, unmerged: left.len() })
        }
    }

    /// Number of connected components (isolated vertices included).
    pub fn components(&self) -> Result<usize, SketchError> {
        Ok(self.n - self.spanning_forest()?.len())
    }

    /// Component label per vertex, from the spanning forest.
    pub fn component_labels(&self) -> Result<Vec<usize>, SketchError> {
        let forest = self.spanning_forest()?;
        let mut uf = UnionFind::new(self.n);
        for (a, b) in forest {
            uf.union(a, b);
        }
        Ok((0..self.n).map(|v| uf.find(v)).collect())
    }

    /// `modulus rounds levels` then one `key level count sum fp` line per nonzero cell.
    pub fn to_text(&self) -> String {
        let mut keys: Vec<&u64> = self.cells.keys().collect();
        keys.sort_unstable();
        let mut out = format!("{} {} {}\n", field::P, self.rounds, self.levels);
        for k in keys {
            for (l, c) in self.cells[k].iter().enumerate() {
                out += &format!("{k} {l} {} {} {}\n", c.count, c.sum, c.fp);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;

    fn sketch_of(g: &Graph, seed: u64) -> ConnectivitySketch {
        let mut s = ConnectivitySketch::new(g.n(), DEFAULT_C, seed);
        for (u, v) in g.edges() {
            s.update(u, v, 1);
        }
        s
    }

    #[test]
    fn path_forest_is_the_path() {
        let g = Graph::from_edges(4, [(0, 1), (1, 2), (2, 3)]);
        let mut f = sketch_of(&g, 1).spanning_forest().unwrap();
        f.sort_unstable();
        assert_eq!(f, vec![(0, 1), (1, 2), (2, 3)]);
    }

    #[test]
    fn triangle_has_two_forest_edges() {
        let g = Graph::from_edges(3, [(0, 1), (1, 2), (0, 2)]);
        let s = sketch_of(&g, 2);
        assert_eq!(s.spanning_forest().unwrap().len(), 2);
        assert_eq!(s.components().unwrap(), 1);
    }

    #[test]
    fn deletions_cancel_to_empty_state() {
        let mut s = ConnectivitySketch::new(5, DEFAULT_C, 3);
        s.update(0, 1, 1);
        s.update(3, 1, 1);
        s.update(0, 1, -1);
        s.update(1, 3, -1);
        assert_eq!(s.words(), 0);
        assert_eq!(s.components().unwrap(), 5);
    }

    #[test]
    fn merge_is_stream_concatenation() {
        let mut a = ConnectivitySketch::new(8, DEFAULT_C, 9);
        let mut b = ConnectivitySketch::new(8, DEFAULT_C, 9);
        let mut ab = ConnectivitySketch::new(8, DEFAULT_C, 9);
        for (u, v) in [(0, 1), (2, 3), (1, 5)] {
            a.update(u, v, 1);
            ab.update(u, v, 1);
        }
        for (u, v, s) in [(6, 7, 1), (2, 3, -1), (4, 5, 1)] {
            b.update(u, v, s);
            ab.update(u, v, s);
        }
        a.merge(&b);
        assert_eq!(a, ab);
        assert_eq!(a.words(), ab.words());
    }

    #[test]
    fn word_count_tracks_cells() {
        let mut s = ConnectivitySketch::new(16, DEFAULT_C, 4);
        s.update(2, 9, 1);
        let cells: usize = s.cells.values().map(Vec::len).sum();
        assert_eq!(s.words(), s.cells.len() + 3 * cells);
        assert_eq!(s.cells.len(), 2 * s.rounds());
    }
}
