//! Seeded random fields and tuples for property suites.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::arith::primes_up_to;
use crate::basis::normalize_generators;
use crate::error::{Error, Result};
use crate::field::{classify_case, radicand_lattice, GeneratingSet, RadicandVector, RamificationCase};
use crate::param::CarefreeTuple;

pub type SampleRng = ChaCha8Rng;

pub fn rng(seed: u64) -> SampleRng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Odd primes used to build generators; small so Gram matrices stay cheap.
const GENERATOR_PRIME_LIMIT: u64 = 100;

/// Product of one or two unused odd primes with the given residue mod 4.
fn odd_part(rng: &mut SampleRng, pool: &mut Vec<u64>, residue: u64) -> Option<u64> {
    for _ in 0..64 {
        pool.shuffle(rng);
        let k = if pool.len() >= 2 && rng.random_bool(0.4) { 2 } else { 1 };
        if pool.len() < k {
            return None;
        }
        let v: u64 = pool[..k].iter().product();
        if v % 4 == residue {
            pool.drain(..k);
            return Some(v);
        }
    }
    None
}

/// A random field of the given case with normalized generators. Generators
/// use disjoint primes, so they are independent.
pub fn random_field(rng: &mut SampleRng, n: u32, case: RamificationCase) -> Result<RadicandVector> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if case == RamificationCase::Three && n < 2 {
        return Err(Error::DimensionTooSmall { n, min: 2 });
    }
    let nu = n as usize;
    for _ in 0..100 {
        let mut pool: Vec<u64> = primes_up_to(GENERATOR_PRIME_LIMIT).into_iter().filter(|&p| p > 2).collect();
        // 2 mod 4 generators are 2 times an odd part of either residue
        let targets: Vec<u64> = (0..nu)
            .map(|i| match case {
                RamificationCase::One => 1,
                RamificationCase::Two if i == nu - 1 => {
                    if rng.random_bool(0.5) {
                        3
                    } else {
                        2
                    }
                }
                RamificationCase::Three if i == nu - 2 => 2,
                RamificationCase::Three if i == nu - 1 => 3,
                _ => 1,
            })
            .collect();
        let mut gens = Vec::with_capacity(nu);
        for &t in &targets {
            let g = if t == 2 {
                let r = if rng.random_bool(0.5) { 1 } else { 3 };
                odd_part(rng, &mut pool, r).map(|v| 2 * v)
            } else {
                odd_part(rng, &mut pool, t)
            };
            match g {
                Some(g) => gens.push(g),
                None => break,
            }
        }
        if gens.len() != nu {
            continue;
        }
        let rad = radicand_lattice(&GeneratingSet::new(gens))?;
        if rad.is_nondegenerate() && classify_case(&rad) == case {
            return normalize_generators(&rad);
        }
    }
    Err(Error::NotNormalized(case.label()))
}

pub fn random_fields(seed: u64, n: u32, case: RamificationCase, count: usize) -> Result<Vec<RadicandVector>> {
    let mut r = rng(seed ^ ((n as u64) << 32) ^ case.label() as u64);
    (0..count).map(|_| random_field(&mut r, n, case)).collect()
}

/// Strongly carefree tuple of length 2^n − 1 built from disjoint primes
/// below `prime_limit`, each entry below `entry_limit`. Entries may be 1
/// unless `nondegenerate`.
pub fn random_carefree_tuple(
    rng: &mut SampleRng,
    n: u32,
    prime_limit: u64,
    entry_limit: u64,
    nondegenerate: bool,
) -> Result<CarefreeTuple> {
    let ell = (1usize << n) - 1;
    let mut pool = primes_up_to(prime_limit);
    if pool.len() < ell {
        return Err(Error::DimensionCap { n, cap: 0 });
    }
    pool.shuffle(rng);
    let mut g = vec![1u64; ell];
    let mut next = 0;
    if nondegenerate {
        for slot in g.iter_mut() {
            *slot = pool[next];
            next += 1;
        }
    }
    for &p in &pool[next..] {
        if !rng.random_bool(0.3) {
            continue;
        }
        let slot = rng.random_range(0..ell);
        if g[slot].saturating_mul(p) < entry_limit {
            g[slot] *= p;
        }
    }
    CarefreeTuple::new(g)
}
