//! Small numeric and randomness helpers shared across modules.

use num_bigint::BigUint;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub type Rng = ChaCha8Rng;

/// Deterministic generator for a seed and a stream label, so that sibling
/// structures built from one user seed never share randomness.
pub fn rng_for(seed: u64, label: u64) -> Rng {
    Rng::seed_from_u64(splitmix64(seed ^ splitmix64(label)))
}

pub fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

/// Exact binomial coefficient.
pub fn binomial(n: u64, k: u64) -> BigUint {
    if k > n {
        return BigUint::from(0u32);
    }
    let k = k.min(n - k);
    let mut acc = BigUint::from(1u32);
    for i in 0..k {
        acc *= n - i;
        acc /= i + 1;
    }
    acc
}

/// Σ_{i ≤ k} C(n, i), saturating at `u64::MAX`.
pub fn binomial_prefix_sum(n: u64, k: u64) -> u64 {
    let total: BigUint = (0..=k.min(n)).map(|i| binomial(n, i)).sum();
    u64::try_from(total).unwrap_or(u64::MAX)
}

pub fn is_prime(x: u64) -> bool {
    if x < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= x {
        if x % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// All subsets of `items` with size in `lo..=hi`, in lexicographic order of positions.
pub fn subsets_of_size(items: &[usize], lo: usize, hi: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::new();
    fn rec(items: &[usize], start: usize, lo: usize, hi: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() >= lo {
            out.push(cur.clone());
        }
        if cur.len() == hi {
            return;
        }
        for i in start..items.len() {
            cur.push(items[i]);
            rec(items, i + 1, lo, hi, cur, out);
            cur.pop();
        }
    }
    rec(items, 0, lo, hi, &mut cur, &mut out);
    out
}

/// Calls `f` on every subset of `0..n` of size at most `k`, smallest first.
/// Stops early when `f` returns `true`; the return value reports that.
pub fn any_subset_up_to(n: usize, k: usize, mut f: impl FnMut(&[usize]) -> bool) -> bool {
    let mut cur = Vec::with_capacity(k);
    for size in 0..=k.min(n) {
        if any_subset_exact(n, size, 0, &mut cur, &mut f) {
            return true;
        }
    }
    false
}

fn any_subset_exact(n: usize, size: usize, start: usize, cur: &mut Vec<usize>, f: &mut impl FnMut(&[usize]) -> bool) -> bool {
    if cur.len() == size {
        return f(cur);
    }
    let need = size - cur.len();
    for i in start..=n.saturating_sub(need) {
        if i >= n {
            break;
        }
        cur.push(i);
        if any_subset_exact(n, size, i + 1, cur, f) {
            cur.pop();
            return true;
        }
        cur.pop();
    }
    false
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binomials() {
        assert_eq!(binomial(5, 2), BigUint::from(10u32));
        assert_eq!(binomial(225, 5), BigUint::from(4_595_146_920u64));
        assert_eq!(binomial(3, 5), BigUint::from(0u32));
        assert_eq!(binomial_prefix_sum(4, 2), 1 + 4 + 6);
    }

    #[test]
    fn subset_enumeration_counts() {
        let mut count = 0;
        assert!(!any_subset_up_to(6, 3, |_| {
            count += 1;
            false
        }));
        assert_eq!(count, 1 + 6 + 15 + 20);
        assert_eq!(subsets_of_size(&[1, 4, 7], 1, 2).len(), 6);
        let mut seen = None;
        assert!(any_subset_up_to(5, 2, |s| {
            seen = Some(s.to_vec());
            s == [1, 3]
        }));
        assert_eq!(seen, Some(vec![1, 3]));
    }

    #[test]
    fn primes() {
        let ps: Vec<u64> = (1..30).filter(|&x| is_prime(x)).collect();
        assert_eq!(ps, vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
    }
}
