//! Local carefree densities μ_p, the Euler product over odd primes with a
//! rigorous tail bound, the class count ω₁, and the finite-level sieve.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Pow, ToPrimitive};
use rayon::prelude::*;

use crate::analytic::region_volume;
use crate::arith::{is_prime, primes_up_to};
use crate::error::{Error, Result};
use crate::f2::dot;
use crate::param::{count_lattice_points, count_lattice_points_where, LatticeQuery};
use crate::Rational;

pub const BRUTEFORCE_BUDGET: u128 = 100_000_000;

/// Bits of the fixed-point scale used for Euler products.
const SCALE_BITS: u64 = 256;

/// #𝒞_p = p^{ℓ−1}(p−1)^ℓ(p+ℓ): residues mod p² with no coordinate ≡ 0 mod p²
/// and at most one ≡ 0 mod p.
pub fn local_count_formula(p: u64, ell: u32) -> Result<BigInt> {
    if p == 2 || !is_prime(p) {
        return Err(Error::UnsupportedPrime(p));
    }
    let p_big = BigInt::from(p);
    Ok(p_big.clone().pow(ell - 1) * BigInt::from(p - 1).pow(ell) * (p_big + ell))
}

/// Exhaustive count of 𝒞_p over (ℤ/p²ℤ)^ℓ. Works for p = 2 as well.
pub fn local_count_bruteforce(p: u64, ell: u32) -> Result<u64> {
    if !is_prime(p) {
        return Err(Error::UnsupportedPrime(p));
    }
    let m = p * p;
    let total = (m as u128).checked_pow(ell).unwrap_or(u128::MAX);
    if total > BRUTEFORCE_BUDGET {
        return Err(Error::BudgetExceeded { estimate: total, budget: BRUTEFORCE_BUDGET });
    }
    if ell == 0 {
        return Ok(1);
    }
    // shard by the leading coordinate
    let count = (0..m)
        .into_par_iter()
        .map(|first| {
            let mut digits = vec![0u64; ell as usize];
            digits[0] = first;
            let mut count = 0u64;
            loop {
                let mut zero_p = 0;
                let mut ok = true;
                for &x in &digits {
                    if x == 0 {
                        ok = false;
                        break;
                    }
                    if x % p == 0 {
                        zero_p += 1;
                    }
                }
                if ok && zero_p <= 1 {
                    count += 1;
                }
                // odometer over the trailing coordinates
                let mut k = digits.len() - 1;
                loop {
                    if k == 0 {
                        return count;
                    }
                    digits[k] += 1;
                    if digits[k] < m {
                        break;
                    }
                    digits[k] = 0;
                    k -= 1;
                }
            }
        })
        .sum();
    Ok(count)
}

#[derive(Clone, Debug, PartialEq)]
pub struct LocalDensity {
    pub p: u64,
    pub ell: u32,
    /// #𝒞_p for odd p; for p = 2 the single class z mod 4.
    pub count: BigInt,
    pub density: Rational,
}

/// μ_p = p^{−(ℓ+1)}(p−1)^ℓ(p+ℓ) for odd p, and 1/4^ℓ per fixed class z
/// modulo 4 for p = 2.
pub fn local_density(p: u64, ell: u32) -> Result<LocalDensity> {
    if p == 2 {
        let density = Rational::new(BigInt::one(), BigInt::from(4u32).pow(ell));
        return Ok(LocalDensity { p, ell, count: BigInt::one(), density });
    }
    let count = local_count_formula(p, ell)?;
    let density = Rational::new(count.clone(), BigInt::from(p).pow(2 * ell));
    Ok(LocalDensity { p, ell, count, density })
}

/// Density of 𝒞_2 over all of (ℤ/4ℤ)^ℓ: 2^{ℓ−1}(ℓ+2)/4^ℓ.
pub fn two_adic_density(ell: u32) -> Rational {
    if ell == 0 {
        return Rational::one();
    }
    let count = BigInt::from(2u32).pow(ell - 1) * (ell + 2);
    Rational::new(count, BigInt::from(4u32).pow(ell))
}

/// Upper bound for Σ_{p > x} 1/p².
///
/// For x ≥ 17, partial summation with π(t) < 1.25506 t/log t (t > 1) and
/// π(x) ≥ x/log x gives at most 1.52/(x log x); below 17 we compare with
/// Σ_{k > x} 1/k² ≤ 1/x.
pub fn prime_square_tail(x: u64) -> f64 {
    let xf = x as f64;
    if x >= 17 {
        2.0 / (xf * xf.ln())
    } else {
        1.0 / xf
    }
}

/// ∏_{2<p≤pmax} (1−1/p)^ℓ(1+ℓ/p) as an outward-rounded fixed-point interval.
#[derive(Clone, Debug, PartialEq)]
pub struct EulerProduct {
    pub ell: u32,
    pub pmax: u64,
    pub primes: usize,
    lo: BigInt,
    hi: BigInt,
    /// δ with ∏_{p>pmax} μ_p ∈ [1 − δ, 1].
    pub tail: f64,
}

fn fixed_to_f64(x: &BigInt) -> f64 {
    let shift = x.bits().saturating_sub(64);
    let top = (x >> shift).to_f64().unwrap_or(f64::NAN);
    top * 2f64.powi(shift as i32 - SCALE_BITS as i32)
}

impl EulerProduct {
    /// Midpoint of the truncated product.
    pub fn value(&self) -> f64 {
        0.5 * (fixed_to_f64(&self.lo) + fixed_to_f64(&self.hi))
    }

    pub fn truncated_bounds(&self) -> (f64, f64) {
        (fixed_to_f64(&self.lo), fixed_to_f64(&self.hi))
    }

    /// Interval containing the full product over all odd primes.
    pub fn limit_bounds(&self) -> (f64, f64) {
        let (lo, hi) = self.truncated_bounds();
        (lo * (1.0 - self.tail).max(0.0), hi)
    }

    /// The lower fixed-point end to `digits` decimal places (truncated).
    pub fn decimal(&self, digits: usize) -> String {
        let scaled: BigInt = (&self.lo * BigInt::from(10u32).pow(digits as u32)) >> SCALE_BITS;
        let s = format!("{:0>width$}", scaled.to_string(), width = digits + 1);
        let (int, frac) = s.split_at(s.len() - digits);
        format!("{int}.{frac}")
    }
}

/// 1 − μ_p ≤ ℓ(ℓ+1)/(2p²) ≤ ℓ²/p², since d/dx[(1−x)^ℓ(1+ℓx)] = −ℓ(ℓ+1)x(1−x)^{ℓ−1}.
pub fn euler_product(ell: u32, pmax: u64) -> Result<EulerProduct> {
    if pmax < 3 {
        return Err(Error::InvalidWindow(format!("pmax {pmax} below 3")));
    }
    let primes: Vec<u64> = primes_up_to(pmax).into_iter().filter(|&p| p > 2).collect();
    let mut lo = BigInt::one() << SCALE_BITS;
    let mut hi = lo.clone();
    for &p in &primes {
        let num = BigInt::from(p - 1).pow(ell) * BigInt::from(p + ell as u64);
        let den = BigInt::from(p).pow(ell + 1);
        lo = (&lo * &num).div_floor(&den);
        hi = (&hi * &num).div_ceil(&den);
    }
    let tail = (ell as f64).powi(2) * prime_square_tail(pmax);
    Ok(EulerProduct { ell, pmax, primes: primes.len(), lo, hi, tail })
}

/// Largest n accepted by the exhaustive class enumerators.
pub const OMEGA1_CAP: u32 = 4;

fn check_omega_dimension(n: u32) -> Result<usize> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    if n > OMEGA1_CAP {
        let ell = (1u32 << n) - 1;
        let estimate = 3u128.checked_pow(ell).unwrap_or(u128::MAX);
        return Err(Error::BudgetExceeded { estimate, budget: 3u128.pow(15) });
    }
    Ok((1usize << n) - 1)
}

/// ω₁: classes z ∈ {1,2,3}^ℓ mod 4 with every D_j = ∏_{v_i·v_j=1} z_i ≡ 1 mod 4.
pub fn omega1(n: u32) -> Result<u64> {
    let ell = check_omega_dimension(n)?;
    let total = 3u64.pow(ell as u32);
    let count = (0..total)
        .into_par_iter()
        .filter(|&code| {
            let mut c = code;
            let z: Vec<u64> = (0..ell)
                .map(|_| {
                    let r = c % 3 + 1;
                    c /= 3;
                    r
                })
                .collect();
            (1..=ell).all(|j| {
                (0..ell).filter(|&i| dot(i + 1, j)).fold(1u64, |acc, i| acc * z[i] % 4) == 1
            })
        })
        .count();
    Ok(count as u64)
}

/// ω₁ from the radicand side: an even z_i makes some D_j even, so only odd
/// classes count, and writing z_i = (−1)^{u_i} mod 4 the condition is that
/// u ∈ F_2^ℓ lies in the kernel of the map u ↦ (Σ_i u_i v_i·v_j)_j.
pub fn omega1_by_kernel(n: u32) -> Result<u64> {
    let ell = check_omega_dimension(n)?;
    // row j of the map as a bitmask over i
    let mut rows: Vec<u64> = (1..=ell)
        .map(|j| (0..ell).filter(|&i| dot(i + 1, j)).fold(0u64, |m, i| m | (1 << i)))
        .collect();
    let mut rank = 0usize;
    for bit in 0..ell {
        let Some(pivot) = (rank..rows.len()).find(|&r| rows[r] >> bit & 1 == 1) else {
            continue;
        };
        rows.swap(rank, pivot);
        let pr = rows[rank];
        for (r, row) in rows.iter_mut().enumerate() {
            if r != rank && *row >> bit & 1 == 1 {
                *row ^= pr;
            }
        }
        rank += 1;
    }
    Ok(1u64 << (ell - rank))
}

/// Every g_i avoids p² and at most one g_i is divisible by p, for p < T.
pub fn satisfies_local_conditions(g: &[u64], primes: &[u64]) -> bool {
    primes.iter().all(|&p| {
        let p2 = p * p;
        let mut divisible = 0;
        for &x in g {
            if x % p2 == 0 {
                return false;
            }
            if x % p == 0 {
                divisible += 1;
            }
        }
        divisible <= 1
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SieveLevel {
    pub t: u64,
    /// m_T = ∏_{p<T} p².
    pub modulus: BigInt,
    /// μ_T = ∏_{p<T} μ_p, with the full density of 𝒞_2 at p = 2.
    pub density: Rational,
}

pub fn sieve_level(ell: u32, t: u64) -> Result<SieveLevel> {
    let primes = if t > 2 { primes_up_to(t - 1) } else { Vec::new() };
    let mut modulus = BigInt::one();
    let mut density = Rational::one();
    for &p in &primes {
        modulus *= BigInt::from(p * p);
        density *= if p == 2 { two_adic_density(ell) } else { local_density(p, ell)?.density };
    }
    Ok(SieveLevel { t, modulus, density })
}

#[derive(Clone, Debug, PartialEq)]
pub struct FiniteSieveCount {
    pub level: SieveLevel,
    pub count: u64,
    pub predicted: f64,
}

/// Lattice points of the query that satisfy 𝒞_p for every p < T, against
/// μ_T times the volume of the whole region (all orderings σ).
pub fn finite_sieve_count(q: &LatticeQuery, t: u64) -> Result<FiniteSieveCount> {
    let ell = q.ell() as u32;
    let level = sieve_level(ell, t)?;
    let primes = if t > 2 { primes_up_to(t - 1) } else { Vec::new() };
    let report = if primes.is_empty() {
        count_lattice_points(q)?
    } else {
        count_lattice_points_where(q, &|g: &[u64]| satisfies_local_conditions(g, &primes))?
    };
    let volume = region_volume(q.y as f64, &q.window, q.n)?;
    let mu = level.density.to_f64().unwrap_or(f64::NAN);
    Ok(FiniteSieveCount { level, count: report.total, predicted: mu * volume.total() })
}
