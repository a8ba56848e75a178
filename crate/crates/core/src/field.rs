//! Exact arithmetic in K_n = Q(√a_1, …, √a_n) on the radical basis
//! {√D_0, …, √D_ℓ}, the quadratic-subfield lattice, and discriminants.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::Zero;

use crate::arith::{gcd, is_squarefree, squarefree_product, DEFAULT_FACTOR_BOUND};
use crate::error::{Error, Result};
use crate::f2::chi;
use crate::scalar::Scalar;
use crate::Rational;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GeneratingSet {
    gens: Vec<u64>,
}

impl GeneratingSet {
    pub fn new(gens: Vec<u64>) -> Self {
        GeneratingSet { gens }
    }

    pub fn n(&self) -> u32 {
        self.gens.len() as u32
    }

    pub fn gens(&self) -> &[u64] {
        &self.gens
    }
}

impl FromStr for GeneratingSet {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let gens = s
            .split(',')
            .map(|t| t.trim().parse::<u64>().map_err(|e| Error::Parse(format!("generator {t:?}: {e}"))))
            .collect::<Result<Vec<_>>>()?;
        Ok(GeneratingSet::new(gens))
    }
}

/// (D_0 = 1, D_1, …, D_ℓ), indexed by F_2^n.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct RadicandVector {
    n: u32,
    d: Vec<u64>,
}

impl RadicandVector {
    /// Checks D_0 = 1, squarefreeness and D_{i⊕j} = sqf(D_i D_j).
    pub fn new(d: Vec<u64>) -> Result<Self> {
        let size = d.len();
        if size == 0 || !size.is_power_of_two() {
            return Err(Error::InconsistentRadicands(format!("length {size} is not a power of two")));
        }
        if d[0] != 1 {
            return Err(Error::InconsistentRadicands("D_0 must be 1".into()));
        }
        for &x in &d {
            if !is_squarefree(x, DEFAULT_FACTOR_BOUND)? {
                return Err(Error::NotSquarefree(x));
            }
        }
        let rv = RadicandVector { n: size.trailing_zeros(), d };
        rv.check_xor()?;
        Ok(rv)
    }

    /// Skips validation; callers must already know the XOR rule holds.
    pub(crate) fn from_trusted(d: Vec<u64>) -> Self {
        debug_assert!(d.len().is_power_of_two() && d[0] == 1);
        RadicandVector { n: d.len().trailing_zeros(), d }
    }

    fn check_xor(&self) -> Result<()> {
        for i in 0..self.d.len() {
            for j in i + 1..self.d.len() {
                if squarefree_product(self.d[i], self.d[j])? != self.d[i ^ j] {
                    return Err(Error::InconsistentRadicands(format!(
                        "sqf(D_{i} D_{j}) != D_{}",
                        i ^ j
                    )));
                }
            }
        }
        Ok(())
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn ell(&self) -> usize {
        self.d.len() - 1
    }

    pub fn dim(&self) -> usize {
        self.d.len()
    }

    pub fn get(&self, j: usize) -> u64 {
        self.d[j]
    }

    pub fn radicands(&self) -> &[u64] {
        &self.d
    }

    /// D_1, …, D_ℓ.
    pub fn nontrivial(&self) -> &[u64] {
        &self.d[1..]
    }

    /// The generators a_k = D_{2^k}.
    pub fn generators(&self) -> Vec<u64> {
        (0..self.n).map(|k| self.d[1 << k]).collect()
    }

    /// Full degree 2^n: every nontrivial radicand exceeds one.
    pub fn is_nondegenerate(&self) -> bool {
        self.d[1..].iter().all(|&x| x > 1)
    }

    pub fn product(&self) -> BigInt {
        self.d[1..].iter().map(|&x| BigInt::from(x)).product()
    }

    /// The radicand vector of the generating set (D_{c_1}, …, D_{c_n}) for
    /// an ordered basis given by column indices: D'_j = D_{M v_j}.
    pub fn relabel(&self, cols: &[usize]) -> RadicandVector {
        let d = (0..self.d.len()).map(|j| self.d[crate::f2::apply_columns(cols, j)]).collect();
        RadicandVector { n: self.n, d }
    }
}

/// D_j for every j via D_{i+2^k} = D_i D_{2^k} / gcd(D_i, D_{2^k})^2.
pub fn radicand_lattice(gens: &GeneratingSet) -> Result<RadicandVector> {
    for &a in gens.gens() {
        if !is_squarefree(a, DEFAULT_FACTOR_BOUND)? {
            return Err(Error::NotSquarefree(a));
        }
    }
    let mut d = vec![1u64];
    for &a in gens.gens() {
        let mut upper = Vec::with_capacity(d.len());
        for &x in &d {
            upper.push(squarefree_product(x, a)?);
        }
        d.extend(upper);
    }
    Ok(RadicandVector::from_trusted(d))
}

/// True iff each a_i is squarefree and > 1 and no nonempty subset product
/// is a square.
pub fn validate_generating_set(gens: &GeneratingSet) -> bool {
    if gens.gens().iter().any(|&a| a <= 1) {
        return false;
    }
    match radicand_lattice(gens) {
        Ok(rad) => rad.is_nondegenerate(),
        Err(_) => false,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum RamificationCase {
    One,
    Two,
    Three,
}

impl RamificationCase {
    pub fn from_label(label: u8) -> Result<Self> {
        match label {
            1 => Ok(RamificationCase::One),
            2 => Ok(RamificationCase::Two),
            3 => Ok(RamificationCase::Three),
            _ => Err(Error::Parse(format!("case label must be 1, 2 or 3, got {label}"))),
        }
    }

    pub fn label(self) -> u8 {
        match self {
            RamificationCase::One => 1,
            RamificationCase::Two => 2,
            RamificationCase::Three => 3,
        }
    }

    /// Exponent r in the 2-part 2^{2^{n-1} r} of the discriminant.
    pub fn r(self) -> u32 {
        match self {
            RamificationCase::One => 0,
            RamificationCase::Two => 2,
            RamificationCase::Three => 3,
        }
    }

    /// How many trailing generators are distinguished (not ≡ 1 mod 4).
    pub fn distinguished(self) -> u32 {
        self.label() as u32 - 1
    }
}

impl fmt::Display for RamificationCase {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// Classifies from the residues of D_1..D_ℓ mod 4, which do not depend on
/// the choice of generators.
pub fn classify_case(rad: &RadicandVector) -> RamificationCase {
    let ds = rad.nontrivial();
    if ds.iter().all(|&d| d % 4 == 1) {
        return RamificationCase::One;
    }
    let has_even = ds.iter().any(|&d| d % 2 == 0);
    let has_three = ds.iter().any(|&d| d % 4 == 3);
    if has_even && has_three {
        RamificationCase::Three
    } else {
        RamificationCase::Two
    }
}

/// Δ = 2^{2^{n−1} r} ∏_{j≥1} D_j.
pub fn discriminant(rad: &RadicandVector, case: RamificationCase) -> BigInt {
    let shift = if rad.n() == 0 { 0 } else { (1u64 << (rad.n() - 1)) * case.r() as u64 };
    rad.product() << shift
}

/// Σ_j c_j √D_j with dense coefficients.
#[derive(Clone, PartialEq)]
pub struct FieldElement<T> {
    rad: Arc<RadicandVector>,
    coeffs: Vec<T>,
}

impl<T: Scalar> FieldElement<T> {
    pub fn zero(rad: &Arc<RadicandVector>) -> Self {
        FieldElement { rad: rad.clone(), coeffs: vec![T::zero(); rad.dim()] }
    }

    pub fn one(rad: &Arc<RadicandVector>) -> Self {
        Self::radical(rad, 0)
    }

    /// √D_j. Panics if j is out of range.
    pub fn radical(rad: &Arc<RadicandVector>, j: usize) -> Self {
        let mut x = Self::zero(rad);
        x.coeffs[j] = T::one();
        x
    }

    pub fn from_coeffs(rad: &Arc<RadicandVector>, coeffs: Vec<T>) -> Result<Self> {
        if coeffs.len() != rad.dim() {
            return Err(Error::DimensionMismatch { expected: rad.dim(), actual: coeffs.len() });
        }
        Ok(FieldElement { rad: rad.clone(), coeffs })
    }

    pub fn radicands(&self) -> &Arc<RadicandVector> {
        &self.rad
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> &T {
        &self.coeffs[j]
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    fn check_same(&self, other: &Self) -> Result<()> {
        if Arc::ptr_eq(&self.rad, &other.rad) || self.rad == other.rad {
            Ok(())
        } else {
            Err(Error::MismatchedRadicands)
        }
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() + b.clone()).collect();
        Ok(FieldElement { rad: self.rad.clone(), coeffs })
    }

    pub fn sub(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let coeffs =
            self.coeffs.iter().zip(&other.coeffs).map(|(a, b)| a.clone() - b.clone()).collect();
        Ok(FieldElement { rad: self.rad.clone(), coeffs })
    }

    pub fn scale(&self, s: &T) -> Self {
        FieldElement {
            rad: self.rad.clone(),
            coeffs: self.coeffs.iter().map(|c| c.clone() * s.clone()).collect(),
        }
    }

    /// Bilinear extension of √D_i √D_j = gcd(D_i, D_j) √D_{i⊕j}.
    pub fn multiply(&self, other: &Self) -> Result<Self> {
        self.check_same(other)?;
        let d = self.rad.radicands();
        let mut out = vec![T::zero(); d.len()];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in other.coeffs.iter().enumerate() {
                if b.is_zero() {
                    continue;
                }
                let g = T::from_u64(gcd(d[i], d[j]));
                let k = i ^ j;
                out[k] = out[k].clone() + a.clone() * b.clone() * g;
            }
        }
        Ok(FieldElement { rad: self.rad.clone(), coeffs: out })
    }

    /// Tr(x) = 2^n c_0.
    pub fn trace(&self) -> T {
        T::from_u64(self.rad.dim() as u64) * self.coeffs[0].clone()
    }

    /// σ_i: c_j ↦ χ_i(v_j) c_j.
    pub fn galois_conjugate(&self, i: usize) -> Result<Self> {
        let dim = self.rad.dim();
        if i >= dim {
            return Err(Error::IndexOutOfRange { index: i, n: self.rad.n(), limit: dim });
        }
        let coeffs = self
            .coeffs
            .iter()
            .enumerate()
            .map(|(j, c)| if chi(i, j) < 0 { -c.clone() } else { c.clone() })
            .collect();
        Ok(FieldElement { rad: self.rad.clone(), coeffs })
    }

    /// Σ_i σ_i(x) as a field element; it always lies in Q.
    pub fn conjugate_sum(&self) -> Self {
        let mut acc = Self::zero(&self.rad);
        for i in 0..self.rad.dim() {
            let s = self.galois_conjugate(i).expect("index in range");
            acc = acc.add(&s).expect("same radicands");
        }
        acc
    }

    /// The trace computed as the sum of all conjugates.
    pub fn trace_via_conjugates(&self) -> T {
        self.conjugate_sum().coeffs[0].clone()
    }

    /// ⟨x, y⟩ = Tr(xy).
    pub fn inner_product(&self, other: &Self) -> Result<T> {
        Ok(self.multiply(other)?.trace())
    }

    /// x − (Tr(x)/2^n)·1.
    pub fn project_off_one(&self) -> Self {
        let mut p = self.clone();
        p.coeffs[0] = T::zero();
        p
    }
}

impl<T: fmt::Debug> fmt::Debug for FieldElement<T> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("FieldElement").field("radicands", &self.rad.d).field("coeffs", &self.coeffs).finish()
    }
}

/// Sparse "index:num/den" list, e.g. `0:1/2,3:-1/4`. Zero prints as `0:0/1`.
impl fmt::Display for FieldElement<Rational> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self
            .coeffs
            .iter()
            .enumerate()
            .filter(|(_, c)| !c.is_zero())
            .map(|(j, c)| format!("{j}:{}/{}", c.numer(), c.denom()))
            .collect();
        if parts.is_empty() {
            write!(f, "0:0/1")
        } else {
            write!(f, "{}", parts.join(","))
        }
    }
}

impl FieldElement<Rational> {
    pub fn parse(s: &str, rad: &Arc<RadicandVector>) -> Result<Self> {
        let mut x = Self::zero(rad);
        for item in s.split(',').map(str::trim).filter(|t| !t.is_empty()) {
            let (idx, q) = item.split_once(':').ok_or_else(|| Error::Parse(format!("missing ':' in {item:?}")))?;
            let j: usize = idx.trim().parse().map_err(|_| Error::Parse(format!("bad index {idx:?}")))?;
            if j >= rad.dim() {
                return Err(Error::IndexOutOfRange { index: j, n: rad.n(), limit: rad.dim() });
            }
            let (num, den) = q.split_once('/').unwrap_or((q, "1"));
            let num: BigInt = num.trim().parse().map_err(|_| Error::Parse(format!("bad numerator {num:?}")))?;
            let den: BigInt = den.trim().parse().map_err(|_| Error::Parse(format!("bad denominator {den:?}")))?;
            if den.is_zero() {
                return Err(Error::Parse("zero denominator".into()));
            }
            x.coeffs[j] = x.coeffs[j].clone() + Rational::new(num, den);
        }
        Ok(x)
    }
}

pub fn rational(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}

pub fn rational_from_u64(n: u64) -> Rational {
    Rational::from_integer(BigInt::from(n))
}
