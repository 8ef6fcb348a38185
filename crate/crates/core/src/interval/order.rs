//! Endpoint orders: the succinct form of a proper interval model.

use std::fmt;
use std::str::FromStr;

use crate::graph::{Graph, VertexSet};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Endpoint {
    Begin(usize),
    End(usize),
}

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum OrderError {
    #[error("vertex {0} has two {1} tokens")]
    Duplicate(usize, &'static str),
    #[error("vertex {0} is missing an endpoint")]
    Missing(usize),
    #[error("vertex {0} ends before it begins")]
    Reversed(usize),
    #[error("token `{0}` is not of the form b<v> or e<v>")]
    BadToken(String),
}

/// A left-to-right sequence of the `2n` interval endpoints.
///
/// Vertices `u` and `v` are adjacent when one begins strictly inside the other.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntervalOrder {
    tokens: Vec<Endpoint>,
    begin: Vec<usize>,
    end: Vec<usize>,
}

impl IntervalOrder {
    pub fn new(n: usize, tokens: Vec<Endpoint>) -> Result<Self, OrderError> {
        const UNSET: usize = usize::MAX;
        let mut begin = vec![UNSET; n];
        let mut end = vec![UNSET; n];
        for (i, t) in tokens.iter().enumerate() {
            let (slot, v, what) = match *t {
                Endpoint::Begin(v) => (&mut begin, v, "begin"),
                Endpoint::End(v) => (&mut end, v, "end"),
            };
            if v >= n {
                return Err(OrderError::Missing(v));
            }
            if slot[v] != UNSET {
                return Err(OrderError::Duplicate(v, what));
            }
            slot[v] = i;
        }
        for v in 0..n {
            if begin[v] == UNSET || end[v] == UNSET {
                return Err(OrderError::Missing(v));
            }
            if end[v] < begin[v] {
                return Err(OrderError::Reversed(v));
            }
        }
        Ok(Self { tokens, begin, end })
    }

    pub fn empty() -> Self {
        Self { tokens: Vec::new(), begin: Vec::new(), end: Vec::new() }
    }

    /// Model of unit intervals `[s, s + 1)` for the given starts. Ties go to the lower index.
    pub fn from_unit_starts(starts: &[f64]) -> Self {
        let mut pts: Vec<(f64, u8, usize)> = Vec::with_capacity(2 * starts.len());
        for (v, &s) in starts.iter().enumerate() {
            pts.push((s, 1, v));
            // Touching endpoints do not intersect: an end at x sorts before a begin at x.
            pts.push((s + 1.0, 0, v));
        }
        pts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)).then(a.2.cmp(&b.2)));
        let tokens = pts.into_iter().map(|(_, kind, v)| if kind == 1 { Endpoint::Begin(v) } else { Endpoint::End(v) }).collect();
        Self::new(starts.len(), tokens).expect("unit model is well formed")
    }

    pub fn n(&self) -> usize {
        self.begin.len()
    }

    pub fn tokens(&self) -> &[Endpoint] {
        &self.tokens
    }

    pub fn begin_pos(&self, v: usize) -> usize {
        self.begin[v]
    }

    pub fn end_pos(&self, v: usize) -> usize {
        self.end[v]
    }

    /// Vertices sorted by where their intervals begin.
    pub fn begin_sequence(&self) -> Vec<usize> {
        self.tokens
            .iter()
            .filter_map(|t| match t {
                Endpoint::Begin(v) => Some(*v),
                Endpoint::End(_) => None,
            })
            .collect()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        let (bu, bv) = (self.begin[u], self.begin[v]);
        u != v && ((bv < bu && bu < self.end[v]) || (bu < bv && bv < self.end[u]))
    }

    /// No interval properly contains another, i.e. ends come in the order of begins.
    pub fn is_proper(&self) -> bool {
        let seq = self.begin_sequence();
        seq.windows(2).all(|w| self.end[w[0]] < self.end[w[1]])
    }

    /// Degrees in one sweep: intervals open at `begin(v)` plus begins inside `v`.
    pub fn degrees(&self) -> Vec<usize> {
        let n = self.n();
        let mut begins_before = vec![0usize; self.tokens.len() + 1];
        let mut open = 0usize;
        let mut deg = vec![0usize; n];
        for (i, t) in self.tokens.iter().enumerate() {
            begins_before[i + 1] = begins_before[i];
            match *t {
                Endpoint::Begin(v) => {
                    deg[v] += open;
                    open += 1;
                    begins_before[i + 1] += 1;
                }
                Endpoint::End(_) => open -= 1,
            }
        }
        for v in 0..n {
            deg[v] += begins_before[self.end[v]] - begins_before[self.begin[v] + 1];
        }
        deg
    }

    pub fn to_graph(&self) -> Graph {
        let n = self.n();
        let mut g = Graph::new(n);
        let mut open = VertexSet::new(n);
        for t in &self.tokens {
            match *t {
                Endpoint::Begin(v) => {
                    for u in open.iter() {
                        g.add_edge(u, v);
                    }
                    open.insert(v);
                }
                Endpoint::End(v) => {
                    open.remove(v);
                }
            }
        }
        g
    }

    /// Renames vertex `v` to `map[v]` inside a model on `universe` vertices.
    pub fn relabel(&self, map: &[usize], universe: usize) -> Vec<Endpoint> {
        debug_assert!(map.iter().all(|&x| x < universe));
        self.tokens
            .iter()
            .map(|t| match *t {
                Endpoint::Begin(v) => Endpoint::Begin(map[v]),
                Endpoint::End(v) => Endpoint::End(map[v]),
            })
            .collect()
    }

    pub fn words(&self) -> usize {
        3 * self.n()
    }
}

impl fmt::Display for IntervalOrder {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, t) in self.tokens.iter().enumerate() {
            if i > 0 {
                f.write_str(" ")?;
            }
            match t {
                Endpoint::Begin(v) => write!(f, "b{v}")?,
                Endpoint::End(v) => write!(f, "e{v}")?,
            }
        }
        Ok(())
    }
}

impl FromStr for IntervalOrder {
    type Err = OrderError;

    /// Whitespace separated `b<v>` / `e<v>` tokens; `n` is one more than the largest id.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let mut tokens = Vec::new();
        for tok in s.split_whitespace() {
            let bad = || OrderError::BadToken(tok.to_string());
            let (kind, rest) = tok.split_at_checked(1).ok_or_else(bad)?;
            let v: usize = rest.parse().map_err(|_| bad())?;
            tokens.push(match kind {
                "b" => Endpoint::Begin(v),
                "e" => Endpoint::End(v),
                _ => return Err(bad()),
            });
        }
        let n = tokens.iter().map(|t| match t {
            Endpoint::Begin(v) | Endpoint::End(v) => v + 1,
        });
        let n = n.max().unwrap_or(0);
        IntervalOrder::new(n, tokens)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::solvers::classes::named::path;

    #[test]
    fn p4_model() {
        let o: IntervalOrder = "b0 b1 e0 b2 e1 b3 e2 e3".parse().unwrap();
        assert!(o.is_proper());
        assert_eq!(o.to_graph().edges().collect::<Vec<_>>(), path(4).edges().collect::<Vec<_>>());
        assert_eq!(o.degrees(), vec![1, 2, 2, 1]);
        assert_eq!(o.to_string(), "b0 b1 e0 b2 e1 b3 e2 e3");
    }

    #[test]
    fn malformed_orders() {
        assert!(matches!("b0 e0 b0".parse::<IntervalOrder>(), Err(OrderError::Duplicate(0, "begin"))));
        assert!(matches!("e0 b0".parse::<IntervalOrder>(), Err(OrderError::Reversed(0))));
        assert!(matches!("b1 e1".parse::<IntervalOrder>(), Err(OrderError::Missing(0))));
        assert!(matches!("x0".parse::<IntervalOrder>(), Err(OrderError::BadToken(_))));
    }

    #[test]
    fn containment_is_not_proper() {
        let o: IntervalOrder = "b0 b1 e1 e0".parse().unwrap();
        assert!(!o.is_proper());
        assert!(o.has_edge(0, 1));
    }

    #[test]
    fn unit_starts_and_degrees_agree() {
        let o = IntervalOrder::from_unit_starts(&[0.0, 0.5, 1.0, 1.7, 3.0]);
        assert!(o.is_proper());
        let g = o.to_graph();
        let deg: Vec<usize> = (0..5).map(|v| g.degree(v)).collect();
        assert_eq!(o.degrees(), deg);
        // [0,1) and [1,2) only touch.
        assert!(!o.has_edge(0, 2));
        assert!(o.has_edge(1, 2));
    }
}
