//! Arithmetic in the prime field of order `2^61 - 1` and dense polynomials over it.

use rand::Rng as _;

use crate::util::Rng;

pub const P: u64 = (1 << 61) - 1;

#[inline]
pub fn add(a: u64, b: u64) -> u64 {
    let s = a + b;
    if s >= P {
        s - P
    } else {
        s
    }
}

#[inline]
pub fn sub(a: u64, b: u64) -> u64 {
    if a >= b {
        a - b
    } else {
        a + P - b
    }
}

#[inline]
pub fn neg(a: u64) -> u64 {
    if a == 0 {
        0
    } else {
        P - a
    }
}

#[inline]
pub fn mul(a: u64, b: u64) -> u64 {
    let t = a as u128 * b as u128;
    let lo = (t as u64) & P;
    let hi = (t >> 61) as u64;
    add(lo, hi)
}

pub fn pow(mut b: u64, mut e: u64) -> u64 {
    let mut acc = 1;
    while e > 0 {
        if e & 1 == 1 {
            acc = mul(acc, b);
        }
        b = mul(b, b);
        e >>= 1;
    }
    acc
}

pub fn inv(a: u64) -> u64 {
    debug_assert!(a != 0);
    pow(a, P - 2)
}

/// Embeds a signed small integer.
#[inline]
pub fn from_i64(x: i64) -> u64 {
    if x >= 0 {
        (x as u64) % P
    } else {
        neg(x.unsigned_abs() % P)
    }
}

/// Polynomial with coefficients low degree first, no trailing zeros.
pub type Poly = Vec<u64>;

fn trim(mut p: Poly) -> Poly {
    while p.last() == Some(&0) {
        p.pop();
    }
    p
}

pub fn degree(p: &Poly) -> Option<usize> {
    p.len().checked_sub(1)
}

pub fn eval(p: &[u64], x: u64) -> u64 {
    p.iter().rev().fold(0, |acc, &c| add(mul(acc, x), c))
}

pub fn poly_mul(a: &[u64], b: &[u64]) -> Poly {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![0; a.len() + b.len() - 1];
    for (i, &x) in a.iter().enumerate() {
        if x == 0 {
            continue;
        }
        for (j, &y) in b.iter().enumerate() {
            out[i + j] = add(out[i + j], mul(x, y));
        }
    }
    trim(out)
}

/// Quotient and remainder of `a / b`; `b` must be nonzero.
pub fn poly_divmod(a: &[u64], b: &[u64]) -> (Poly, Poly) {
    let b = trim(b.to_vec());
    assert!(!b.is_empty(), "division by the zero polynomial");
    let mut r = trim(a.to_vec());
    if r.len() < b.len() {
        return (Vec::new(), r);
    }
    let lead_inv = inv(*b.last().unwrap());
    let mut q = vec![0; r.len() - b.len() + 1];
    while r.len() >= b.len() {
        let shift = r.len() - b.len();
        let c = mul(*r.last().unwrap(), lead_inv);
        q[shift] = c;
        for (i, &bc) in b.iter().enumerate() {
            r[shift + i] = sub(r[shift + i], mul(c, bc));
        }
        r = trim(r);
    }
    (trim(q), r)
}

pub fn poly_rem(a: &[u64], b: &[u64]) -> Poly {
    poly_divmod(a, b).1
}

pub fn monic(p: Poly) -> Poly {
    match p.last() {
        Some(&lead) if lead != 1 => {
            let li = inv(lead);
            p.into_iter().map(|c| mul(c, li)).collect()
        }
        _ => p,
    }
}

pub fn poly_gcd(a: &[u64], b: &[u64]) -> Poly {
    let (mut a, mut b) = (trim(a.to_vec()), trim(b.to_vec()));
    while !b.is_empty() {
        let r = poly_rem(&a, &b);
        a = b;
        b = r;
    }
    monic(a)
}

/// `base^e mod m`.
pub fn poly_powmod(base: &[u64], mut e: u64, m: &[u64]) -> Poly {
    let mut acc: Poly = poly_rem(&[1], m);
    let mut b = poly_rem(base, m);
    while e > 0 {
        if e & 1 == 1 {
            acc = poly_rem(&poly_mul(&acc, &b), m);
        }
        b = poly_rem(&poly_mul(&b, &b), m);
        e >>= 1;
    }
    acc
}

/// All roots of `f`, provided `f` is squarefree and splits into linear factors.
/// Returns `None` otherwise.
pub fn split_roots(f: &[u64], rng: &mut Rng) -> Option<Vec<u64>> {
    let f = monic(trim(f.to_vec()));
    let d = degree(&f)?;
    if d == 0 {
        return Some(Vec::new());
    }
    // f | x^P - x  iff  x^P = x (mod f).
    let xp = poly_powmod(&[0, 1], P, &f);
    if xp != poly_rem(&[0, 1], &f) {
        return None;
    }
    let mut roots = Vec::with_capacity(d);
    let mut work = vec![f];
    while let Some(g) = work.pop() {
        match degree(&g) {
            Some(0) | None => {}
            Some(1) => roots.push(neg(mul(g[0], inv(g[1])))),
            Some(dg) => loop {
                let delta = rng.random_range(0..P);
                let t = poly_powmod(&[delta, 1], (P - 1) / 2, &g);
                let mut t = t;
                if t.is_empty() {
                    t = vec![P - 1];
                } else {
                    t[0] = sub(t[0], 1);
                }
                let h = poly_gcd(&g, &t);
                let dh = degree(&h).unwrap_or(0);
                if dh > 0 && dh < dg {
                    let (q, _) = poly_divmod(&g, &h);
                    work.push(h);
                    work.push(monic(q));
                    break;
                }
            },
        }
    }
    roots.sort_unstable();
    Some(roots)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::util::rng_for;

    #[test]
    fn field_identities() {
        let a = 123_456_789_012_345;
        assert_eq!(mul(a, inv(a)), 1);
        assert_eq!(add(P - 1, 2), 1);
        assert_eq!(sub(1, 2), P - 1);
        assert_eq!(from_i64(-1), P - 1);
        assert_eq!(pow(3, P - 1), 1);
    }

    #[test]
    fn divmod_roundtrip() {
        let a = vec![5, 0, 3, 7, 1];
        let b = vec![2, 1, 1];
        let (q, r) = poly_divmod(&a, &b);
        let back: Vec<u64> = {
            let mut t = poly_mul(&q, &b);
            t.resize(a.len().max(t.len()), 0);
            for (i, &c) in r.iter().enumerate() {
                t[i] = add(t[i], c);
            }
            trim(t)
        };
        assert_eq!(back, a);
    }

    #[test]
    fn finds_roots_of_products() {
        let mut rng = rng_for(1, 2);
        let roots = [3u64, 17, 99, 1 << 40];
        let f = roots.iter().fold(vec![1], |acc, &r| poly_mul(&acc, &[neg(r), 1]));
        let mut want = roots.to_vec();
        want.sort_unstable();
        assert_eq!(split_roots(&f, &mut rng), Some(want));
        // x^2 + 1 has no roots here? P = 3 mod 4, so -1 is a non-residue.
        assert_eq!(split_roots(&[1, 0, 1], &mut rng), None);
        // Repeated root is not squarefree.
        assert_eq!(split_roots(&poly_mul(&[neg(5), 1], &[neg(5), 1]), &mut rng), None);
    }
}
