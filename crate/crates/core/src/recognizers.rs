//! One-pass recognizers for classes with finitely many obstructions.
//!
//! Each recognizer watches one induced vertex subset. Split, threshold and
//! acyclic tournament membership follow from the degree sequence alone; cluster
//! graphs need a connectivity sketch as well.

use std::fmt;

use crate::graph::Digraph;
use crate::sketch::{ConnectivitySketch, SketchError, DEFAULT_C};
use crate::stream::{Problem, Replay, SpaceBound, Stream, StreamConsumer, StreamError, StreamEvent};
use crate::util::splitmix64;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum RecognizeError {
    #[error("subset of {size} vertices holds {arcs} arcs, expected {expected}")]
    NotATournament { size: usize, arcs: i64, expected: i64 },
    #[error(transparent)]
    Sketch(#[from] SketchError),
    #[error(transparent)]
    Stream(#[from] StreamError),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum ClassKind {
    Cluster,
    Split,
    Threshold,
    AcyclicTournament,
}

impl ClassKind {
    /// Largest obstruction size.
    pub fn obstruction_size(self) -> usize {
        match self {
            ClassKind::Cluster | ClassKind::AcyclicTournament => 3,
            ClassKind::Threshold => 4,
            ClassKind::Split => 5,
        }
    }

    pub fn is_directed(self) -> bool {
        self == ClassKind::AcyclicTournament
    }

    pub fn is_randomized(self) -> bool {
        self == ClassKind::Cluster
    }

    pub fn for_problem(p: Problem) -> Option<ClassKind> {
        match p {
            Problem::Fvst => Some(ClassKind::AcyclicTournament),
            Problem::Cvd => Some(ClassKind::Cluster),
            Problem::Svd => Some(ClassKind::Split),
            Problem::Tvd => Some(ClassKind::Threshold),
            _ => None,
        }
    }
}

impl fmt::Display for ClassKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ClassKind::Cluster => "cluster",
            ClassKind::Split => "split",
            ClassKind::Threshold => "threshold",
            ClassKind::AcyclicTournament => "acyclic-tournament",
        })
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Verdict {
    pub in_class: bool,
    /// Short class-specific summary, e.g. the sorted degree sequence or component sizes.
    pub summary: String,
}

fn sorted_desc(deg: &[usize]) -> Vec<usize> {
    let mut d = deg.to_vec();
    d.sort_unstable_by(|a, b| b.cmp(a));
    d
}

/// `max { i : d_i >= i - 1 }` over a non-increasing sequence, 1-based.
fn corrected_durfee(d: &[usize]) -> usize {
    d.iter().enumerate().filter(|&(i, &x)| x >= i).map(|(i, _)| i + 1).max().unwrap_or(0)
}

/// Splittance zero: the top `m` degrees saturate a clique plus every edge to the rest.
pub fn is_split_sequence(deg: &[usize]) -> bool {
    let d = sorted_desc(deg);
    let m = corrected_durfee(&d);
    let head: usize = d[..m].iter().sum();
    let tail: usize = d[m..].iter().sum();
    head == m * m.saturating_sub(1) + tail
}

/// Every Erdős–Gallai inequality up to the corrected Durfee index is tight.
pub fn is_threshold_sequence(deg: &[usize]) -> bool {
    let d = sorted_desc(deg);
    let m = corrected_durfee(&d);
    (1..=m).all(|k| {
        let head: usize = d[..k].iter().sum();
        let tail: usize = d[k..].iter().map(|&x| x.min(k)).sum();
        head == k * (k - 1) + tail
    })
}

/// Transitive iff the scores are exactly `0, 1, ..., s-1`.
pub fn is_transitive_scores(out: &[usize]) -> bool {
    let mut s = out.to_vec();
    s.sort_unstable();
    s.iter().enumerate().all(|(i, &x)| x == i)
}

/// A recognizer bound to one induced subset, fed by a stream pass.
#[derive(Clone, Debug)]
pub struct Recognizer {
    kind: ClassKind,
    id: usize,
    members: Vec<u32>,
    degree: Vec<i64>,
    arcs: i64,
    sketches: Vec<ConnectivitySketch>,
}

/// Independent sketch copies per cluster recognizer, majority-voted.
pub const CLUSTER_COPIES: usize = 3;

impl Recognizer {
    /// `members` must be sorted and distinct. `seed` only matters for cluster.
    pub fn new(kind: ClassKind, id: usize, members: Vec<u32>, seed: u64) -> Self {
        debug_assert!(members.windows(2).all(|w| w[0] < w[1]));
        let s = members.len();
        let sketches = if kind == ClassKind::Cluster && s > 1 {
            (0..CLUSTER_COPIES as u64)
                .map(|c| ConnectivitySketch::new(s, DEFAULT_C, splitmix64(seed ^ (id as u64) << 8 ^ c)))
                .collect()
        } else {
            Vec::new()
        };
        Self { kind, id, members, degree: vec![0; s], arcs: 0, sketches }
    }

    pub fn members(&self) -> &[u32] {
        &self.members
    }

    fn local(&self, v: u32) -> Option<usize> {
        self.members.binary_search(&v).ok()
    }

    pub fn finish(&self) -> Result<Verdict, RecognizeError> {
        let s = self.members.len();
        let deg: Vec<usize> = self.degree.iter().map(|&d| d.max(0) as usize).collect();
        let summary = || {
            let d = sorted_desc(&deg);
            d.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")
        };
        match self.kind {
            ClassKind::Split => Ok(Verdict { in_class: is_split_sequence(&deg), summary: summary() }),
            ClassKind::Threshold => Ok(Verdict { in_class: is_threshold_sequence(&deg), summary: summary() }),
            ClassKind::AcyclicTournament => {
                let expected = (s * s.saturating_sub(1) / 2) as i64;
                if self.arcs != expected {
                    return Err(RecognizeError::NotATournament { size: s, arcs: self.arcs, expected });
                }
                Ok(Verdict { in_class: is_transitive_scores(&deg), summary: summary() })
            }
            ClassKind::Cluster => {
                if self.sketches.is_empty() {
                    return Ok(Verdict { in_class: true, summary: s.to_string() });
                }
                // A failed copy counts as a vote against membership.
                let mut votes = 0;
                let mut last_err = None;
                let mut sizes = String::new();
                for sk in &self.sketches {
                    match cluster_check(sk, &deg) {
                        Ok((ok, sz)) => {
                            votes += usize::from(ok);
                            sizes = sz;
                        }
                        Err(e) => last_err = Some(e),
                    }
                }
                match last_err {
                    Some(e) if sizes.is_empty() => Err(e.into()),
                    _ => Ok(Verdict { in_class: 2 * votes > self.sketches.len(), summary: sizes }),
                }
            }
        }
    }
}

/// Each forest tree must be a clique: every member's degree is the tree size minus one.
fn cluster_check(sk: &ConnectivitySketch, deg: &[usize]) -> Result<(bool, String), SketchError> {
    let labels = sk.component_labels()?;
    let mut size = vec![0usize; deg.len()];
    for &l in &labels {
        size[l] += 1;
    }
    let ok = (0..deg.len()).all(|v| deg[v] + 1 == size[labels[v]]);
    let mut sizes: Vec<usize> = size.into_iter().filter(|&x| x > 0).collect();
    sizes.sort_unstable_by(|a, b| b.cmp(a));
    Ok((ok, sizes.iter().map(ToString::to_string).collect::<Vec<_>>().join(",")))
}

impl StreamConsumer for Recognizer {
    fn label(&self) -> String {
        format!("recognizer/{}#{}", self.kind, self.id)
    }

    fn on_event(&mut self, _pass: usize, ev: &StreamEvent) {
        let (Some(a), Some(b)) = (self.local(ev.u), self.local(ev.v)) else {
            return;
        };
        let sign = ev.sign();
        if self.kind.is_directed() {
            self.degree[a] += sign;
            self.arcs += sign;
            return;
        }
        self.degree[a] += sign;
        self.degree[b] += sign;
        for sk in &mut self.sketches {
            sk.update(a, b, sign);
        }
    }

    fn words(&self) -> usize {
        2 + self.members.len() + self.degree.len() + self.sketches.iter().map(|s| s.words()).sum::<usize>()
    }

    fn space_bound(&self) -> Option<SpaceBound> {
        Some(match self.kind {
            ClassKind::Cluster => SpaceBound { c1: 700.0, c2: 0, c3: 2 },
            _ => SpaceBound { c1: 4.0, c2: 0, c3: 0 },
        })
    }
}

/// Runs one recognizer for `kind` over `subset` (sorted) in a single pass.
pub fn recognize(kind: ClassKind, subset: &[usize], stream: &Stream, seed: u64) -> Result<Verdict, RecognizeError> {
    let members = subset.iter().map(|&v| v as u32).collect();
    let mut rec = [Recognizer::new(kind, 0, members, seed)];
    Replay::new(stream).replay(1, &mut rec)?;
    rec[0].finish()
}

/// Convenience wrapper over the whole vertex set.
pub fn recognize_graph(kind: ClassKind, stream: &Stream, seed: u64) -> Result<Verdict, RecognizeError> {
    let all: Vec<usize> = (0..stream.n()).collect();
    recognize(kind, &all, stream, seed)
}

/// Scores of an explicit tournament, for oracles.
pub fn scores(g: &Digraph) -> Vec<usize> {
    (0..g.n()).map(|v| g.out_neighbors(v).len()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::Graph;
    use crate::solvers::classes::named::*;

    fn on(kind: ClassKind, g: &Graph) -> bool {
        recognize_graph(kind, &Stream::from_graph(g, 0, None), 7).unwrap().in_class
    }

    #[test]
    fn split_examples() {
        assert!(!on(ClassKind::Split, &cycle(4)));
        assert!(on(ClassKind::Split, &star(4)));
        assert!(!on(ClassKind::Split, &two_k2()));
        assert!(!on(ClassKind::Split, &cycle(5)));
    }

    #[test]
    fn threshold_examples() {
        assert!(!on(ClassKind::Threshold, &path(4)));
        assert!(on(ClassKind::Threshold, &complete(3)));
        assert!(on(ClassKind::Threshold, &Graph::new(5)));
    }

    #[test]
    fn cluster_examples() {
        let k3k2 = Graph::from_edges(5, [(0, 1), (1, 2), (0, 2), (3, 4)]);
        assert!(on(ClassKind::Cluster, &k3k2));
        assert!(!on(ClassKind::Cluster, &path(3)));
        assert!(on(ClassKind::Cluster, &Graph::new(4)));
    }

    #[test]
    fn tournament_examples() {
        let t4 = Digraph::from_arcs(4, (0..4).flat_map(|u| (u + 1..4).map(move |v| (u, v))));
        let rec = |g: &Digraph| recognize_graph(ClassKind::AcyclicTournament, &Stream::from_digraph(g, 0), 0);
        assert!(rec(&t4).unwrap().in_class);
        assert!(!rec(&Digraph::from_arcs(3, [(0, 1), (1, 2), (2, 0)])).unwrap().in_class);
        assert!(rec(&Digraph::new(1)).unwrap().in_class);
        let broken = Digraph::from_arcs(3, [(0, 1), (1, 2)]);
        assert!(matches!(rec(&broken), Err(RecognizeError::NotATournament { .. })));
    }

    #[test]
    fn subsets_filter_events() {
        // P3 on {0,1,2}; the pair {0,2} induces an edgeless graph.
        let s = Stream::from_graph(&path(3), 0, None);
        assert!(recognize(ClassKind::Cluster, &[0, 2], &s, 1).unwrap().in_class);
        assert!(!recognize(ClassKind::Cluster, &[0, 1, 2], &s, 1).unwrap().in_class);
    }
}
