//! Integer helpers: trial-division factorization, squarefree tests, prime
//! sieves and exact integer roots.

use num_integer::Integer;

use crate::error::{Error, Result};

/// Default trial-division bound; inputs whose cofactor after dividing out
/// all primes up to the bound is not prime-certified are rejected.
pub const DEFAULT_FACTOR_BOUND: u64 = 1_000_000;

pub fn gcd(a: u64, b: u64) -> u64 {
    a.gcd(&b)
}

/// Prime factorization as `(prime, exponent)` pairs.
///
/// Trial division runs up to `min(sqrt(n), bound)`. A leftover cofactor is
/// accepted as prime only when it is below `bound^2`.
pub fn factorize(n: u64, bound: u64) -> Result<Vec<(u64, u32)>> {
    let mut out = Vec::new();
    let mut rest = n;
    let mut push = |p: u64, rest: &mut u64| {
        let mut e = 0;
        while rest.is_multiple_of(p) {
            *rest /= p;
            e += 1;
        }
        if e > 0 {
            out.push((p, e));
        }
    };
    push(2, &mut rest);
    let mut p = 3u64;
    while p <= bound && p.saturating_mul(p) <= rest {
        push(p, &mut rest);
        p += 2;
    }
    if rest > 1 {
        let certified = p.saturating_mul(p) > rest;
        if !certified {
            return Err(Error::FactorizationBound { value: n, bound });
        }
        out.push((rest, 1));
    }
    Ok(out)
}

pub fn is_squarefree(n: u64, bound: u64) -> Result<bool> {
    if n == 0 {
        return Ok(false);
    }
    Ok(factorize(n, bound)?.iter().all(|&(_, e)| e == 1))
}

/// The squarefree kernel sqf(n): the product of primes dividing n to an odd
/// power.
pub fn squarefree_part(n: u64, bound: u64) -> Result<u64> {
    Ok(factorize(n, bound)?
        .iter()
        .filter(|&&(_, e)| e % 2 == 1)
        .map(|&(p, _)| p)
        .product())
}

/// sqf(a*b) for squarefree a, b, without factoring.
pub fn squarefree_product(a: u64, b: u64) -> Result<u64> {
    let g = gcd(a, b);
    (a / g).checked_mul(b / g).ok_or(Error::Overflow("squarefree product"))
}

pub fn primes_up_to(limit: u64) -> Vec<u64> {
    if limit < 2 {
        return Vec::new();
    }
    let n = limit as usize;
    let mut composite = vec![false; n + 1];
    let mut primes = Vec::new();
    for i in 2..=n {
        if !composite[i] {
            primes.push(i as u64);
            let mut k = i * i;
            while k <= n {
                composite[k] = true;
                k += i;
            }
        }
    }
    primes
}

pub fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    if n.is_multiple_of(2) {
        return n == 2;
    }
    let mut d = 3;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 2;
    }
    true
}

/// Squarefree flags for 0..=limit, by sieving out multiples of p^2.
#[derive(Debug, Clone)]
pub struct SquarefreeTable {
    flags: Vec<bool>,
}

impl SquarefreeTable {
    pub fn new(limit: u64) -> Self {
        let n = limit as usize;
        let mut flags = vec![true; n + 1];
        flags[0] = false;
        let mut p = 2usize;
        while p * p <= n {
            let sq = p * p;
            let mut k = sq;
            while k <= n {
                flags[k] = false;
                k += sq;
            }
            p += 1;
        }
        SquarefreeTable { flags }
    }

    pub fn limit(&self) -> u64 {
        (self.flags.len() - 1) as u64
    }

    /// Falls back to trial division above the table limit.
    pub fn is_squarefree(&self, n: u64) -> bool {
        match self.flags.get(n as usize) {
            Some(&f) => f,
            None => is_squarefree(n, u64::MAX).unwrap_or(false),
        }
    }
}

/// floor(x^(1/k)) for k >= 1.
pub fn integer_root(x: u128, k: u32) -> u128 {
    assert!(k >= 1);
    if x < 2 || k == 1 {
        return x;
    }
    let pow_le = |b: u128| -> bool {
        let mut acc: u128 = 1;
        for _ in 0..k {
            match acc.checked_mul(b) {
                Some(v) if v <= x => acc = v,
                _ => return false,
            }
        }
        true
    };
    let guess = (x as f64).powf(1.0 / k as f64) as u128;
    let mut r = guess.saturating_sub(2);
    while pow_le(r + 1) {
        r += 1;
    }
    while r > 0 && !pow_le(r) {
        r -= 1;
    }
    r
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factorization_examples() {
        assert_eq!(factorize(360, DEFAULT_FACTOR_BOUND).unwrap(), vec![(2, 3), (3, 2), (5, 1)]);
        assert_eq!(factorize(1, DEFAULT_FACTOR_BOUND).unwrap(), vec![]);
        assert_eq!(factorize(1_000_003, DEFAULT_FACTOR_BOUND).unwrap(), vec![(1_000_003, 1)]);
    }

    #[test]
    fn factorization_bound_is_enforced() {
        let n = 999_983u64 * 1_000_003;
        assert!(matches!(factorize(n, 10), Err(Error::FactorizationBound { .. })));
        assert_eq!(factorize(n, DEFAULT_FACTOR_BOUND).unwrap(), vec![(999_983, 1), (1_000_003, 1)]);
        // both factors above the bound: the cofactor cannot be certified prime
        let m = 1_000_003u64 * 1_000_033;
        assert!(factorize(m, DEFAULT_FACTOR_BOUND).is_err());
    }

    #[test]
    fn squarefree_helpers() {
        assert!(is_squarefree(65, DEFAULT_FACTOR_BOUND).unwrap());
        assert!(!is_squarefree(45, DEFAULT_FACTOR_BOUND).unwrap());
        assert_eq!(squarefree_part(85 * 221, DEFAULT_FACTOR_BOUND).unwrap(), 65);
        assert_eq!(squarefree_product(85, 221).unwrap(), 65);
        let table = SquarefreeTable::new(100);
        let direct: Vec<u64> = (1..=100).filter(|&n| is_squarefree(n, 100).unwrap()).collect();
        let sieved: Vec<u64> = (1..=100).filter(|&n| table.is_squarefree(n)).collect();
        assert_eq!(direct, sieved);
        assert!(table.is_squarefree(1_000_003));
    }

    #[test]
    fn primes_and_roots() {
        assert_eq!(primes_up_to(30), vec![2, 3, 5, 7, 11, 13, 17, 19, 23, 29]);
        assert!(is_prime(997) && !is_prime(999));
        assert_eq!(integer_root(1_221_025, 2), 1105);
        assert_eq!(integer_root(1_221_024, 2), 1104);
        assert_eq!(integer_root(10u128.pow(10), 2), 100_000);
        assert_eq!(integer_root(80, 4), 2);
        assert_eq!(integer_root(81, 4), 3);
    }
}
