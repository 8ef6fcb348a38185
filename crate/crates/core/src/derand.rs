//! Splitter and separating families.
//!
//! Splitters are greedy selections from the universal-hash family
//! `x -> ((a*x + b) mod p) mod k^2`. A candidate is kept when it is injective
//! on some not-yet-covered k-subset, so the output is deterministic in
//! `(n, k)` and certified by construction: exhaustively when `C(n, k)` is under
//! [`EXHAUSTIVE_CAP`], otherwise over a fixed sample of [`SAMPLED_SUBSETS`] subsets.

use std::collections::HashSet;
use std::fmt::Write as _;

use itertools::Itertools;
use rand::seq::index::sample;

use crate::graph::VertexSet;
use crate::util::{binomial, binomial_prefix_sum, is_prime, rng_for, splitmix64};

pub const EXHAUSTIVE_CAP: u64 = 300_000;
pub const SAMPLED_SUBSETS: usize = 100_000;
const MAX_CANDIDATES: usize = 1_000_000;

#[derive(Debug, thiserror::Error, Clone, PartialEq, Eq)]
pub enum DerandError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("exhaustive verification needs {needed} checks, cap is {cap}")]
    CapExceeded { needed: u64, cap: u64 },
    #[error("no covering family found among {0} candidates")]
    CandidatesExhausted(usize),
}

/// `x -> ((a*x + b) mod p) mod range`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct HashFn {
    pub a: u64,
    pub b: u64,
    pub p: u64,
    pub range: u64,
}

impl HashFn {
    #[inline]
    pub fn eval(&self, x: usize) -> usize {
        (((self.a as u128 * x as u128 + self.b as u128) % self.p as u128) % self.range as u128) as usize
    }
}

/// How a family's covering property was established.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Certification {
    /// Every k-subset checked.
    Exhaustive,
    /// A single function that is injective on all of `[n]`.
    Injective,
    /// The given number of pseudo-random k-subsets checked.
    Sampled(usize),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SplitterFamily {
    pub n: usize,
    pub k: usize,
    pub range: usize,
    pub functions: Vec<HashFn>,
    pub certification: Certification,
}

impl SplitterFamily {
    pub fn len(&self) -> usize {
        self.functions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.functions.is_empty()
    }

    /// Colour of every vertex under function `i`.
    pub fn colouring(&self, i: usize) -> Vec<usize> {
        let f = self.functions[i];
        (0..self.n).map(|x| f.eval(x)).collect()
    }

    /// Measured constant `C` in `|F| = C * k^6 * log k * log n` (logs base 2, floored at 1).
    pub fn size_constant(&self) -> f64 {
        let k = self.k as f64;
        let logk = (self.k.max(2) as f64).log2();
        let logn = (self.n.max(2) as f64).log2();
        self.len() as f64 / (k.powi(6) * logk * logn)
    }

    /// One `index a b p range` line per function.
    pub fn to_text(&self) -> String {
        let mut out = format!("splitter n={} k={} range={}\n", self.n, self.k, self.range);
        for (i, f) in self.functions.iter().enumerate() {
            let _ = writeln!(out, "{i} {} {} {} {}", f.a, f.b, f.p, f.range);
        }
        out
    }
}

fn primes_between(lo: usize, hi: usize) -> Vec<u64> {
    (lo as u64 + 1..=hi as u64).filter(|&x| is_prime(x)).collect()
}

/// Deterministic candidate stream for `(n, k)`.
fn candidates(n: usize, range: usize) -> impl Iterator<Item = HashFn> {
    let primes = primes_between(n.max(1), 2 * n.max(1));
    let mut state = splitmix64((n as u64) << 32 ^ range as u64);
    (0..).map(move |i: usize| {
        let p = primes[i % primes.len()];
        state = splitmix64(state);
        let a = 1 + state % (p - 1).max(1);
        state = splitmix64(state);
        let b = state % p;
        HashFn { a, b, p, range: range as u64 }
    })
}

fn injective_on(f: &HashFn, set: &[usize]) -> bool {
    let mut seen: Vec<usize> = Vec::with_capacity(set.len());
    for &x in set {
        let c = f.eval(x);
        if seen.contains(&c) {
            return false;
        }
        seen.push(c);
    }
    true
}

/// Builds an `(n, k, k^2)`-splitter.
pub fn build_splitter(n: usize, k: usize) -> Result<SplitterFamily, DerandError> {
    if k < 1 || k > n {
        return Err(DerandError::InvalidParams(format!("splitter needs 1 <= k <= n, got n={n} k={k}")));
    }
    let range = k * k;
    let p = primes_between(n, 2 * n)[0];
    if n <= range {
        // x mod p mod k^2 = x on [n], injective everywhere.
        let f = HashFn { a: 1, b: 0, p, range: range as u64 };
        return Ok(SplitterFamily { n, k, range, functions: vec![f], certification: Certification::Injective });
    }
    if k == 1 {
        let f = HashFn { a: 1, b: 0, p, range: 1 };
        return Ok(SplitterFamily { n, k, range, functions: vec![f], certification: Certification::Exhaustive });
    }

    let total = binomial(n as u64, k as u64);
    let (targets, certification): (Vec<Vec<usize>>, _) = if total <= EXHAUSTIVE_CAP.into() {
        ((0..n).combinations(k).collect(), Certification::Exhaustive)
    } else {
        let mut rng = rng_for(n as u64, k as u64);
        let sets = (0..SAMPLED_SUBSETS).map(|_| sample(&mut rng, n, k).into_vec()).collect();
        (sets, Certification::Sampled(SAMPLED_SUBSETS))
    };

    let mut uncovered: Vec<usize> = (0..targets.len()).collect();
    let mut functions = Vec::new();
    for (tried, f) in candidates(n, range).enumerate() {
        if uncovered.is_empty() {
            break;
        }
        if tried >= MAX_CANDIDATES {
            return Err(DerandError::CandidatesExhausted(tried));
        }
        let before = uncovered.len();
        uncovered.retain(|&i| !injective_on(&f, &targets[i]));
        if uncovered.len() < before {
            functions.push(f);
        }
    }
    Ok(SplitterFamily { n, k, range, functions, certification })
}

/// Exhaustively checks the splitter property over all k-subsets of `[n]`.
pub fn verify_splitter(family: &SplitterFamily, n: usize, k: usize, cap: u64) -> Result<bool, DerandError> {
    let needed = u64::try_from(binomial(n as u64, k as u64)).unwrap_or(u64::MAX);
    if needed > cap {
        return Err(DerandError::CapExceeded { needed, cap });
    }
    if k == 0 {
        return Ok(true);
    }
    Ok((0..n).combinations(k).all(|s| family.functions.iter().any(|f| injective_on(f, &s))))
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SeparatingFamily {
    pub n: usize,
    pub k: usize,
    pub l: usize,
    pub subsets: Vec<VertexSet>,
}

impl SeparatingFamily {
    pub fn len(&self) -> usize {
        self.subsets.len()
    }

    pub fn is_empty(&self) -> bool {
        self.subsets.is_empty()
    }

    /// One `index v1 v2 ...` line per member.
    pub fn to_text(&self) -> String {
        let mut out = format!("separating n={} k={} l={}\n", self.n, self.k, self.l);
        for (i, s) in self.subsets.iter().enumerate() {
            let ids: Vec<String> = s.iter().map(|v| v.to_string()).collect();
            let _ = writeln!(out, "{i} {}", ids.join(" "));
        }
        out
    }
}

/// Builds an `(n, k, l)`-separating family as the distinct preimages `h^-1(Y)`
/// over an `(n, k+l, (k+l)^2)`-splitter and `|Y| = l`.
///
/// Colour sets `Y` only matter through `Y ∩ image(h)`, so each `h` contributes
/// the preimages of image subsets whose size is reachable by padding with unused colours.
pub fn build_separating(n: usize, k: usize, l: usize) -> Result<SeparatingFamily, DerandError> {
    if l == 0 || n < k + l {
        return Err(DerandError::InvalidParams(format!("separating family needs l >= 1 and n >= k + l, got n={n} k={k} l={l}")));
    }
    let q = k + l;
    let splitter = build_splitter(n, q.min(n))?;
    let range = (q * q).max(splitter.range);
    let mut seen = HashSet::new();
    let mut subsets = Vec::new();
    for i in 0..splitter.len() {
        let colours = splitter.colouring(i);
        let mut classes: Vec<(usize, VertexSet)> = Vec::new();
        for (v, &c) in colours.iter().enumerate() {
            match classes.iter_mut().find(|(cc, _)| *cc == c) {
                Some((_, set)) => {
                    set.insert(v);
                }
                None => classes.push((c, VertexSet::from_iter_cap(n, [v]))),
            }
        }
        classes.sort_by_key(|(c, _)| *c);
        let image = classes.len();
        let lo = l.saturating_sub(range - image);
        let hi = l.min(image);
        let idx: Vec<usize> = (0..image).collect();
        for size in lo..=hi {
            for ys in idx.iter().copied().combinations(size) {
                let mut f = VertexSet::new(n);
                for y in ys {
                    f.union_with(&classes[y].1);
                }
                if seen.insert(f.clone()) {
                    subsets.push(f);
                }
            }
        }
    }
    Ok(SeparatingFamily { n, k, l, subsets })
}

/// `(n, k, 2)`-separating family: every pair can be covered while avoiding any k vertices.
pub fn graph_separating(n: usize, k: usize) -> Result<SeparatingFamily, DerandError> {
    if n < k + 2 {
        return Err(DerandError::InvalidParams(format!("graph separating family needs n >= k + 2, got n={n} k={k}")));
    }
    build_separating(n, k, 2)
}

/// Members of [`graph_separating`] as sorted vertex lists. Below `k + 2` vertices
/// every pair is its own member, which separates trivially.
pub fn pair_cover(n: usize, k: usize) -> Vec<Vec<u32>> {
    match graph_separating(n, k) {
        Ok(f) => f.subsets.iter().map(|s| s.iter().map(|v| v as u32).collect()).collect(),
        Err(_) => (0..n as u32).flat_map(|a| (a + 1..n as u32).map(move |b| vec![a, b])).collect(),
    }
}

/// Exhaustively checks that every disjoint `(A, B)` with `|A| <= k`, `|B| <= l` is separated.
pub fn verify_separating(family: &SeparatingFamily, n: usize, k: usize, l: usize, cap: u64) -> Result<bool, DerandError> {
    let needed = binomial_prefix_sum(n as u64, k as u64).saturating_mul(binomial_prefix_sum(n as u64, l as u64));
    if needed > cap {
        return Err(DerandError::CapExceeded { needed, cap });
    }
    for bsize in 0..=l {
        for b in (0..n).combinations(bsize) {
            let holders: Vec<&VertexSet> = family.subsets.iter().filter(|f| b.iter().all(|&v| f.contains(v))).collect();
            if holders.is_empty() {
                return Ok(false);
            }
            let rest: Vec<usize> = (0..n).filter(|v| !b.contains(v)).collect();
            for asize in 0..=k.min(rest.len()) {
                for a in rest.iter().copied().combinations(asize) {
                    if !holders.iter().any(|f| a.iter().all(|&v| !f.contains(v))) {
                        return Ok(false);
                    }
                }
            }
        }
    }
    Ok(true)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_constant_for_k1() {
        let f = build_splitter(5, 1).unwrap();
        assert_eq!(f.len(), 1);
        assert!(verify_splitter(&f, 5, 1, 1000).unwrap());
    }

    #[test]
    fn identity_when_k_equals_n() {
        let f = build_splitter(6, 6).unwrap();
        assert_eq!(f.len(), 1);
        assert_eq!(f.certification, Certification::Injective);
        assert_eq!(f.colouring(0), (0..6).collect::<Vec<_>>());
    }

    #[test]
    fn splitter_12_3_verifies() {
        let f = build_splitter(12, 3).unwrap();
        assert!(f.len() > 1);
        assert!(verify_splitter(&f, 12, 3, 10_000).unwrap());
        assert!(build_splitter(10, 3).and_then(|f| verify_splitter(&f, 10, 3, 10_000)).unwrap());
    }

    #[test]
    fn deterministic_construction() {
        assert_eq!(build_splitter(30, 3).unwrap(), build_splitter(30, 3).unwrap());
    }

    #[test]
    fn full_hash_family_is_a_splitter() {
        // Every (a, b) over p = 5 into [4]; a superset of any family the greedy keeps.
        let functions = (1..5).flat_map(|a| (0..5).map(move |b| HashFn { a, b, p: 5, range: 4 })).collect();
        let f = SplitterFamily { n: 4, k: 2, range: 4, functions, certification: Certification::Exhaustive };
        assert!(verify_splitter(&f, 4, 2, 100).unwrap());
    }

    #[test]
    fn empty_family_fails() {
        let f = SplitterFamily { n: 4, k: 2, range: 4, functions: vec![], certification: Certification::Exhaustive };
        assert!(!verify_splitter(&f, 4, 2, 100).unwrap());
    }

    #[test]
    fn cap_is_enforced() {
        let f = build_splitter(40, 3).unwrap();
        assert!(matches!(verify_splitter(&f, 40, 3, 100), Err(DerandError::CapExceeded { .. })));
    }

    #[test]
    fn invalid_params() {
        assert!(build_splitter(3, 4).is_err());
        assert!(build_splitter(3, 0).is_err());
        assert!(graph_separating(3, 2).is_err());
    }

    #[test]
    fn separating_examples() {
        let f = build_separating(8, 2, 2).unwrap();
        assert!(verify_separating(&f, 8, 2, 2, u64::MAX).unwrap());
        let f = build_separating(4, 0, 1).unwrap();
        assert!((0..4).all(|v| f.subsets.iter().any(|s| s.contains(v))));
        let f = build_separating(6, 1, 1).unwrap();
        assert!(verify_separating(&f, 6, 1, 1, u64::MAX).unwrap());
        let f = graph_separating(6, 1).unwrap();
        assert!(verify_separating(&f, 6, 1, 2, u64::MAX).unwrap());
        let f = graph_separating(10, 2).unwrap();
        assert!(verify_separating(&f, 10, 2, 2, u64::MAX).unwrap());
    }

    #[test]
    fn non_identity_separating_family() {
        // n > (k+l)^2 forces a genuine hash family.
        let f = graph_separating(20, 1).unwrap();
        assert!(verify_separating(&f, 20, 1, 2, u64::MAX).unwrap());
    }

    #[test]
    fn text_dump_lists_members() {
        let f = build_splitter(20, 2).unwrap();
        let text = f.to_text();
        assert_eq!(text.lines().count(), f.len() + 1);
    }
}
