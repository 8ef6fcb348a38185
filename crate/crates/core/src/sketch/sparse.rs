//! Deterministic s-sparse recovery from power-sum syndromes.
//!
//! Item `x` contributes `(x+1)^j` to syndrome `j` for `j = 1..=2s`. If at most
//! `s` distinct items are live, the syndromes form a linear recurrent sequence
//! whose minimal polynomial has exactly the live items as roots.

use super::field::{self, P};
use crate::util::rng_for;

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SparseRecovery {
    capacity: usize,
    universe: u64,
    syndromes: Vec<u64>,
    live: i64,
}

/// Result of a recovery attempt.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Recovered {
    Items(Vec<u64>),
    Fail,
}

impl Recovered {
    pub fn items(self) -> Option<Vec<u64>> {
        match self {
            Recovered::Items(v) => Some(v),
            Recovered::Fail => None,
        }
    }
}

impl SparseRecovery {
    pub fn new(capacity: usize, universe: u64) -> Self {
        assert!(universe < P - 1, "universe must fit below the field modulus");
        Self { capacity, universe, syndromes: vec![0; 2 * capacity], live: 0 }
    }

    pub fn capacity(&self) -> usize {
        self.capacity
    }

    pub fn live(&self) -> i64 {
        self.live
    }

    /// Syndromes plus the live counter.
    pub fn words(&self) -> usize {
        self.syndromes.len() + 1
    }

    pub fn update(&mut self, item: u64, sign: i64) {
        debug_assert!(item < self.universe);
        let x = item + 1;
        let s = field::from_i64(sign);
        let mut pw = x;
        for syn in self.syndromes.iter_mut() {
            *syn = field::add(*syn, field::mul(s, pw));
            pw = field::mul(pw, x);
        }
        self.live += sign;
    }

    /// Component-wise sum; both states must share capacity and universe.
    pub fn merge(&mut self, other: &SparseRecovery) {
        assert_eq!(self.capacity, other.capacity);
        for (a, &b) in self.syndromes.iter_mut().zip(&other.syndromes) {
            *a = field::add(*a, b);
        }
        self.live += other.live;
    }

    pub fn recover(&self) -> Recovered {
        let zero = self.syndromes.iter().all(|&s| s == 0);
        if self.live == 0 {
            return if zero { Recovered::Items(Vec::new()) } else { Recovered::Fail };
        }
        if self.live < 0 || self.live as usize > self.capacity {
            return Recovered::Fail;
        }
        let conn = berlekamp_massey(&self.syndromes);
        let l = conn.len() - 1;
        if l != self.live as usize {
            return Recovered::Fail;
        }
        // Characteristic polynomial: reverse of the connection polynomial.
        let charp: Vec<u64> = conn.iter().rev().copied().collect();
        let mut rng = rng_for(self.universe, l as u64);
        let roots = if (self.universe as u128) * (l as u128) <= 1 << 22 {
            (1..=self.universe).filter(|&x| field::eval(&charp, x) == 0).collect::<Vec<_>>()
        } else {
            match field::split_roots(&charp, &mut rng) {
                Some(r) => r,
                None => return Recovered::Fail,
            }
        };
        if roots.len() != l || roots.iter().any(|&r| r == 0 || r > self.universe) {
            return Recovered::Fail;
        }
        let items: Vec<u64> = roots.iter().map(|r| r - 1).collect();
        let mut check = SparseRecovery::new(self.capacity, self.universe);
        for &it in &items {
            check.update(it, 1);
        }
        if check != *self {
            return Recovered::Fail;
        }
        Recovered::Items(items)
    }

    /// `modulus capacity live s_1 ... s_2s`.
    pub fn to_text(&self) -> String {
        let syn: Vec<String> = self.syndromes.iter().map(|s| s.to_string()).collect();
        format!("{P} {} {} {}", self.capacity, self.live, syn.join(" "))
    }
}

/// Shortest linear recurrence generating `seq`; returns the connection
/// polynomial `1 + c_1 x + ... + c_L x^L` (length `L + 1`).
pub fn berlekamp_massey(seq: &[u64]) -> Vec<u64> {
    let mut c = vec![1u64];
    let mut b = vec![1u64];
    let mut l = 0usize;
    let mut m = 1usize;
    let mut bd = 1u64;
    for i in 0..seq.len() {
        let mut d = seq[i];
        for j in 1..=l {
            d = field::add(d, field::mul(c[j], seq[i - j]));
        }
        if d == 0 {
            m += 1;
            continue;
        }
        let coef = field::mul(d, field::inv(bd));
        let prev = c.clone();
        if c.len() < b.len() + m {
            c.resize(b.len() + m, 0);
        }
        for (j, &bj) in b.iter().enumerate() {
            c[j + m] = field::sub(c[j + m], field::mul(coef, bj));
        }
        if 2 * l <= i {
            l = i + 1 - l;
            b = prev;
            bd = d;
            m = 1;
        } else {
            m += 1;
        }
    }
    c.resize(l + 1, 0);
    c
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn insert_delete_recover() {
        let mut s = SparseRecovery::new(4, 100);
        s.update(5, 1);
        s.update(9, 1);
        s.update(5, -1);
        assert_eq!(s.recover(), Recovered::Items(vec![9]));
    }

    #[test]
    fn over_capacity_fails() {
        let mut s = SparseRecovery::new(3, 100);
        for x in [1, 2, 3, 4] {
            s.update(x, 1);
        }
        assert_eq!(s.recover(), Recovered::Fail);
    }

    #[test]
    fn cancelled_item_leaves_empty() {
        let mut s = SparseRecovery::new(3, 100);
        s.update(7, 1);
        s.update(7, -1);
        assert_eq!(s.recover(), Recovered::Items(vec![]));
        assert_eq!(SparseRecovery::new(2, 10).recover(), Recovered::Items(vec![]));
    }

    #[test]
    fn edge_encoded_pairs() {
        // (0,1) and (3,4) under min*n + max with n = 10.
        let mut s = SparseRecovery::new(4, 100);
        s.update(1, 1);
        s.update(34, 1);
        s.update(27, 1);
        s.update(27, -1);
        let items = s.recover().items().unwrap();
        assert_eq!(items, vec![1, 34]);
    }

    #[test]
    fn large_universe_uses_factorisation() {
        let mut s = SparseRecovery::new(8, 1 << 40);
        let want = [12345u64, 1 << 35, 999_999_999, 7];
        for &x in &want {
            s.update(x, 1);
        }
        let mut w = want.to_vec();
        w.sort_unstable();
        assert_eq!(s.recover().items(), Some(w));
    }

    #[test]
    fn random_under_capacity() {
        let mut rng = rng_for(3, 3);
        for _ in 0..50 {
            let mut s = SparseRecovery::new(64, 10_000);
            let mut live = std::collections::BTreeSet::new();
            for _ in 0..40 {
                let x = rng.random_range(0..10_000u64);
                if live.insert(x) {
                    s.update(x, 1);
                }
            }
            assert_eq!(s.recover().items(), Some(live.into_iter().collect()));
        }
    }

    #[test]
    fn linearity_of_merge() {
        let mut a = SparseRecovery::new(4, 50);
        let mut b = SparseRecovery::new(4, 50);
        let mut ab = SparseRecovery::new(4, 50);
        a.update(3, 1);
        b.update(8, 1);
        ab.update(8, 1);
        ab.update(3, 1);
        a.merge(&b);
        assert_eq!(a, ab);
    }
}
