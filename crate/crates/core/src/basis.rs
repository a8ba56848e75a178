//! Integral bases in the three ramification cases, their Gram matrices under
//! the trace form, and the shape parameters λ_j.

use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use num_bigint::BigInt;
use num_traits::{One, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::f2::{ordered_bases, sign_matrix, Permutation};
use crate::field::{classify_case, RadicandVector, RamificationCase};
use crate::matrix::Matrix;
use crate::scalar::FieldScalar;
use crate::{Element, Rational};

/// Orbit search for a normalized generator order is limited to n ≤ 4.
pub const NORMALIZATION_CAP: u32 = 4;

/// Whether the generators a_1..a_n satisfy the congruence pattern required
/// by the basis construction for `case`: all ≡ 1 (mod 4) except the last
/// (Case 2), or except a_{n-1} ≡ 2 and a_n ≡ 3 (Case 3).
pub fn is_normalized(rad: &RadicandVector, case: RamificationCase) -> bool {
    let a = rad.generators();
    let n = a.len();
    let k = case.distinguished() as usize;
    if n < k {
        return false;
    }
    if !a[..n - k].iter().all(|&x| x % 4 == 1) {
        return false;
    }
    match case {
        RamificationCase::One => true,
        RamificationCase::Two => a[n - 1] % 4 != 1,
        RamificationCase::Three => a[n - 2] % 4 == 2 && a[n - 1] % 4 == 3,
    }
}

/// Re-chooses generators inside the same field so that [`is_normalized`]
/// holds, by scanning ordered bases of F_2^n.
pub fn normalize_generators(rad: &RadicandVector) -> Result<RadicandVector> {
    let case = classify_case(rad);
    if is_normalized(rad, case) {
        return Ok(rad.clone());
    }
    if rad.n() > NORMALIZATION_CAP {
        return Err(Error::DimensionCap { n: rad.n(), cap: NORMALIZATION_CAP });
    }
    ordered_bases(rad.n())
        .into_iter()
        .map(|cols| rad.relabel(&cols))
        .find(|r| is_normalized(r, case))
        .ok_or(Error::NotNormalized(case.label()))
}

#[derive(Clone, Debug)]
pub struct IntegralBasis {
    case: RamificationCase,
    rad: Arc<RadicandVector>,
    raw: Vec<Element>,
    elements: Vec<Element>,
    /// Size 2^m of each block of conjugates.
    block: usize,
}

impl IntegralBasis {
    pub fn case(&self) -> RamificationCase {
        self.case
    }

    pub fn radicands(&self) -> &Arc<RadicandVector> {
        &self.rad
    }

    /// The refined basis; its first element is 1.
    pub fn elements(&self) -> &[Element] {
        &self.elements
    }

    /// The basis of Galois conjugates before α_0 is replaced by 1, ordered
    /// α, β, γ, δ.
    pub fn raw(&self) -> &[Element] {
        &self.raw
    }

    pub fn block_size(&self) -> usize {
        self.block
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }
}

/// Conjugates (1/2^m) Σ_t a_{j,t} √D_{offset+t} for j = 0..2^m.
fn block_conjugates(rad: &Arc<RadicandVector>, m: u32, offset: usize) -> Result<Vec<Element>> {
    let a = sign_matrix(m)?;
    let size = 1usize << m;
    let inv = Rational::new(BigInt::one(), BigInt::from(size));
    (0..size)
        .map(|j| {
            let mut coeffs = vec![Rational::zero(); rad.dim()];
            for t in 0..size {
                coeffs[offset + t] = inv.clone() * Rational::from_integer(a.entry(j, t).into());
            }
            Element::from_coeffs(rad, coeffs)
        })
        .collect()
}

pub fn integral_basis(rad: &RadicandVector, case: RamificationCase) -> Result<IntegralBasis> {
    let actual = classify_case(rad);
    if actual != case {
        return Err(Error::CaseMismatch { requested: case.label(), actual: actual.label() });
    }
    if !is_normalized(rad, case) {
        return Err(Error::NotNormalized(case.label()));
    }
    let rad = Arc::new(rad.clone());
    let m = rad.n() - case.distinguished();
    let size = 1usize << m;
    let mut raw = Vec::with_capacity(rad.dim());
    match case {
        RamificationCase::One => raw.extend(block_conjugates(&rad, m, 0)?),
        RamificationCase::Two => {
            raw.extend(block_conjugates(&rad, m, 0)?);
            raw.extend(block_conjugates(&rad, m, size)?);
        }
        RamificationCase::Three => {
            let half = Rational::new(BigInt::one(), BigInt::from(2));
            let beta = block_conjugates(&rad, m, size)?;
            let eta = block_conjugates(&rad, m, 3 * size)?;
            let delta = beta
                .iter()
                .zip(&eta)
                .map(|(b, e)| Ok(b.add(e)?.scale(&half)))
                .collect::<Result<Vec<_>>>()?;
            raw.extend(block_conjugates(&rad, m, 0)?);
            raw.extend(beta);
            raw.extend(block_conjugates(&rad, m, 2 * size)?);
            raw.extend(delta);
        }
    }
    let mut elements = raw.clone();
    elements[0] = Element::one(&rad);
    Ok(IntegralBasis { case, rad, raw, elements, block: size })
}

/// Trace-form Gram matrix of any list of elements.
pub fn gram_of(elems: &[Element]) -> Result<Matrix<Rational>> {
    let k = elems.len();
    let mut g = Matrix::zeros(k, k);
    for i in 0..k {
        for j in i..k {
            let v = elems[i].inner_product(&elems[j])?;
            g[(j, i)] = v.clone();
            g[(i, j)] = v;
        }
    }
    Ok(g)
}

/// Gram matrix of the refined basis; its determinant is the discriminant.
pub fn gram_full(basis: &IntegralBasis) -> Result<Matrix<Rational>> {
    gram_of(basis.elements())
}

pub fn gram_raw(basis: &IntegralBasis) -> Result<Matrix<Rational>> {
    gram_of(basis.raw())
}

/// The elements b − (Tr(b)/2^n)·1 for every refined basis element but 1.
pub fn projected_elements(basis: &IntegralBasis) -> Vec<Element> {
    basis.elements()[1..].iter().map(Element::project_off_one).collect()
}

/// Gram matrix of the projection of the basis orthogonal to 1.
pub fn gram_projected(basis: &IntegralBasis) -> Result<Matrix<Rational>> {
    gram_of(&projected_elements(basis))
}

/// Closed-form Gram matrices built from A_m and the radicands alone.
pub mod closed_form {
    use super::*;

    fn sign<T: FieldScalar>(m: u32) -> Result<Matrix<T>> {
        Ok(sign_matrix(m)?.to_scalar())
    }

    fn diag_range<T: FieldScalar>(rad: &RadicandVector, start: usize, len: usize) -> Matrix<T> {
        let d: Vec<T> = (start..start + len).map(|j| T::from_u64(rad.get(j))).collect();
        Matrix::diagonal(&d)
    }

    /// 2^n / 4^m, the common factor of every block.
    fn block_scale<T: FieldScalar>(n: u32, m: u32) -> T {
        T::from_u64(1 << n) / T::from_u64(1 << (2 * m))
    }

    /// s · A_m · diag(D_offset..) · A_m.
    fn block<T: FieldScalar>(rad: &RadicandVector, m: u32, offset: usize) -> Result<Matrix<T>> {
        let a = sign::<T>(m)?;
        let v = diag_range::<T>(rad, offset, 1 << m);
        Ok(a.mul(&v).mul(&a).scale(&block_scale(rad.n(), m)))
    }

    /// s · Ã_m · diag(D_1..D_L) · Ã_mᵀ: the α block after projection.
    fn projected_alpha<T: FieldScalar>(rad: &RadicandVector, m: u32) -> Result<Matrix<T>> {
        let at = sign::<T>(m)?.minor_matrix(0, 0);
        let len = (1usize << m) - 1;
        let v = diag_range::<T>(rad, 1, len);
        Ok(at.mul(&v).mul(&at.transpose()).scale(&block_scale(rad.n(), m)))
    }

    fn assemble<T: FieldScalar>(blocks: &[&Matrix<T>], couplings: &[(usize, usize, Matrix<T>)]) -> Matrix<T> {
        let dim: usize = blocks.iter().map(|b| b.rows()).sum();
        let offsets: Vec<usize> = blocks
            .iter()
            .scan(0, |acc, b| {
                let o = *acc;
                *acc += b.rows();
                Some(o)
            })
            .collect();
        let mut g = Matrix::zeros(dim, dim);
        for (b, &o) in blocks.iter().zip(&offsets) {
            g.set_block(o, o, b);
        }
        for (r, c, m) in couplings {
            g.set_block(offsets[*r], offsets[*c], m);
            g.set_block(offsets[*c], offsets[*r], &m.transpose());
        }
        g
    }

    /// Case 1 Gram of the conjugate basis: (1/2^n) · A_n · diag(1, D_1, …, D_ℓ) · A_n.
    pub fn case1_raw<T: FieldScalar>(rad: &RadicandVector) -> Result<Matrix<T>> {
        let n = rad.n();
        let a = sign::<T>(n)?;
        let v = diag_range::<T>(rad, 0, rad.dim());
        Ok(a.mul(&v).mul(&a).scale(&(T::one() / T::from_u64(1 << n))))
    }

    /// Case 1 projected Gram: (1/2^n) · Ã_n · diag(D_1, …, D_ℓ) · Ã_nᵀ.
    pub fn case1_projected<T: FieldScalar>(rad: &RadicandVector) -> Result<Matrix<T>> {
        projected_alpha(rad, rad.n())
    }

    /// Gram of the raw basis, in the order α, β, γ, δ.
    pub fn raw<T: FieldScalar>(rad: &RadicandVector, case: RamificationCase) -> Result<Matrix<T>> {
        let n = rad.n();
        let m = n - case.distinguished();
        let size = 1usize << m;
        match case {
            RamificationCase::One => case1_raw(rad),
            RamificationCase::Two => {
                Ok(assemble(&[&block(rad, m, 0)?, &block(rad, m, size)?], &[]))
            }
            RamificationCase::Three => {
                let (gaa, gbb, ggg, gee) = case3_blocks(rad, m)?;
                let (gbd, gdd) = case3_coupling(&gbb, &gee);
                Ok(assemble(&[&gaa, &gbb, &ggg, &gdd], &[(1, 3, gbd)]))
            }
        }
    }

    /// Gram of the projected refined basis.
    pub fn projected<T: FieldScalar>(rad: &RadicandVector, case: RamificationCase) -> Result<Matrix<T>> {
        let n = rad.n();
        let m = n - case.distinguished();
        let size = 1usize << m;
        match case {
            RamificationCase::One => case1_projected(rad),
            RamificationCase::Two => {
                Ok(assemble(&[&projected_alpha(rad, m)?, &block(rad, m, size)?], &[]))
            }
            RamificationCase::Three => {
                let (_, gbb, ggg, gee) = case3_blocks(rad, m)?;
                let (gbd, gdd) = case3_coupling(&gbb, &gee);
                Ok(assemble(&[&projected_alpha(rad, m)?, &gbb, &ggg, &gdd], &[(1, 3, gbd)]))
            }
        }
    }

    #[allow(clippy::type_complexity)]
    fn case3_blocks<T: FieldScalar>(
        rad: &RadicandVector,
        m: u32,
    ) -> Result<(Matrix<T>, Matrix<T>, Matrix<T>, Matrix<T>)> {
        let size = 1usize << m;
        Ok((block(rad, m, 0)?, block(rad, m, size)?, block(rad, m, 2 * size)?, block(rad, m, 3 * size)?))
    }

    /// G_βδ = ½ G_ββ and G_δδ = ¼ (G_ββ + G_ηη).
    fn case3_coupling<T: FieldScalar>(gbb: &Matrix<T>, gee: &Matrix<T>) -> (Matrix<T>, Matrix<T>) {
        let two = T::one() + T::one();
        let half = T::one() / two.clone();
        let quarter = half.clone() / two;
        (gbb.scale(&half), gbb.add(gee).scale(&quarter))
    }
}

/// Sorted ratios λ_j = D_{σ(j)}/D_{σ(1)}, j = 2..ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeParams {
    lambdas: Vec<Rational>,
    sigma: Permutation,
    case: RamificationCase,
}

impl ShapeParams {
    pub fn lambdas(&self) -> &[Rational] {
        &self.lambdas
    }

    /// σ with D_{σ(1)} < … < D_{σ(ℓ)}.
    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn case(&self) -> RamificationCase {
        self.case
    }

    pub fn decimals(&self) -> Vec<f64> {
        self.lambdas.iter().map(|q| q.to_f64().unwrap_or(f64::NAN)).collect()
    }
}

/// σ sorting D_1..D_ℓ ascending, as 1-based images. Ties are rejected.
pub fn sorting_permutation(ds: &[u64]) -> Result<Permutation> {
    let mut order: Vec<usize> = (1..=ds.len()).collect();
    order.sort_by_key(|&j| ds[j - 1]);
    for w in order.windows(2) {
        if ds[w[0] - 1] == ds[w[1] - 1] {
            return Err(Error::TiedRadicands(ds[w[0] - 1]));
        }
    }
    Permutation::new(order)
}

pub fn shape_params(rad: &RadicandVector) -> Result<ShapeParams> {
    let ds = rad.nontrivial();
    let sigma = sorting_permutation(ds)?;
    let base = BigInt::from(ds[sigma.apply(1) - 1]);
    let lambdas = (2..=ds.len())
        .map(|j| Rational::new(BigInt::from(ds[sigma.apply(j) - 1]), base.clone()))
        .collect();
    Ok(ShapeParams { lambdas, sigma, case: classify_case(rad) })
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub enum Bound {
    Finite(Rational),
    Infinite,
}

impl Bound {
    pub fn to_f64(&self) -> f64 {
        match self {
            Bound::Finite(q) => q.to_f64().unwrap_or(f64::INFINITY),
            Bound::Infinite => f64::INFINITY,
        }
    }

    pub fn is_finite(&self) -> bool {
        matches!(self, Bound::Finite(_))
    }

    /// Whether `num/den ≤ self`, for positive integers.
    fn admits_ratio(&self, num: u64, den: u64) -> bool {
        match self {
            Bound::Infinite => true,
            Bound::Finite(q) => BigInt::from(num) * q.denom() <= BigInt::from(den) * q.numer(),
        }
    }

    /// Whether `self ≤ num/den`.
    fn below_ratio(&self, num: u64, den: u64) -> bool {
        match self {
            Bound::Infinite => false,
            Bound::Finite(q) => BigInt::from(den) * q.numer() <= BigInt::from(num) * q.denom(),
        }
    }
}

impl fmt::Display for Bound {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Bound::Finite(q) if q.is_integer() => write!(f, "{}", q.numer()),
            Bound::Finite(q) => write!(f, "{}/{}", q.numer(), q.denom()),
            Bound::Infinite => write!(f, "inf"),
        }
    }
}

impl FromStr for Bound {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        if matches!(s, "inf" | "infinity" | "∞") {
            return Ok(Bound::Infinite);
        }
        let bad = || Error::InvalidWindow(format!("cannot parse bound {s:?}"));
        if let Some((a, b)) = s.split_once('/') {
            let a: BigInt = a.trim().parse().map_err(|_| bad())?;
            let b: BigInt = b.trim().parse().map_err(|_| bad())?;
            if b.is_zero() {
                return Err(bad());
            }
            return Ok(Bound::Finite(Rational::new(a, b)));
        }
        if let Ok(i) = s.parse::<BigInt>() {
            return Ok(Bound::Finite(Rational::from_integer(i)));
        }
        // decimals such as 2.5 are taken exactly
        let (int, frac) = s.split_once('.').ok_or_else(bad)?;
        if frac.is_empty() || !frac.bytes().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let num: BigInt = format!("{int}{frac}").parse().map_err(|_| bad())?;
        let den = BigInt::from(10u32).pow(frac.len() as u32);
        Ok(Bound::Finite(Rational::new(num, den)))
    }
}

/// (R_2, …, R_ℓ) with 1 ≤ R_2 ≤ … ≤ R_ℓ.
#[derive(Clone, Debug, PartialEq)]
pub struct ShapeWindow {
    bounds: Vec<Bound>,
}

impl ShapeWindow {
    pub fn new(bounds: Vec<Bound>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(Error::InvalidWindow("need at least one bound".into()));
        }
        let one = Bound::Finite(Rational::one());
        if bounds[0] < one {
            return Err(Error::InvalidWindow(format!("R_2 = {} is below 1", bounds[0])));
        }
        if bounds.windows(2).any(|w| w[0] > w[1]) {
            return Err(Error::InvalidWindow("bounds must be nondecreasing".into()));
        }
        Ok(ShapeWindow { bounds })
    }

    pub fn from_integers(bounds: &[u64]) -> Result<Self> {
        Self::new(bounds.iter().map(|&b| Bound::Finite(Rational::from_integer(b.into()))).collect())
    }

    /// R_2 = … = R_{ℓ−1} = 1 and R_ℓ = ∞: every shape qualifies.
    pub fn vacuous(ell: usize) -> Self {
        let mut bounds = vec![Bound::Finite(Rational::one()); ell - 1];
        *bounds.last_mut().unwrap() = Bound::Infinite;
        ShapeWindow { bounds }
    }

    pub fn bounds(&self) -> &[Bound] {
        &self.bounds
    }

    pub fn ell(&self) -> usize {
        self.bounds.len() + 1
    }

    pub fn upper(&self) -> &Bound {
        self.bounds.last().unwrap()
    }

    pub fn is_bounded(&self) -> bool {
        self.upper().is_finite()
    }

    pub fn to_f64(&self) -> Vec<f64> {
        self.bounds.iter().map(Bound::to_f64).collect()
    }

    /// Membership for radicands already sorted ascending (length ℓ), using
    /// only integer comparisons.
    pub fn contains_sorted(&self, sorted: &[u64]) -> bool {
        let ell = sorted.len();
        debug_assert_eq!(ell, self.ell());
        let d1 = sorted[0];
        if !self.upper().admits_ratio(sorted[ell - 1], d1) {
            return false;
        }
        (2..ell).all(|j| self.bounds[j - 2].below_ratio(sorted[j - 1], d1))
    }
}

impl fmt::Display for ShapeWindow {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.bounds.iter().map(ToString::to_string).collect();
        write!(f, "{}", parts.join(","))
    }
}

impl FromStr for ShapeWindow {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        ShapeWindow::new(s.split(',').map(str::parse).collect::<Result<Vec<_>>>()?)
    }
}

/// λ_ℓ ≤ R_ℓ and R_j ≤ λ_j for 2 ≤ j ≤ ℓ−1, all non-strict.
pub fn window_contains(shape: &ShapeParams, window: &ShapeWindow) -> Result<bool> {
    let lam = shape.lambdas();
    if lam.len() != window.bounds.len() {
        return Err(Error::DimensionMismatch { expected: window.bounds.len(), actual: lam.len() });
    }
    let k = lam.len();
    let upper_ok = match window.upper() {
        Bound::Infinite => true,
        Bound::Finite(r) => lam[k - 1] <= *r,
    };
    let lower_ok = (0..k - 1).all(|i| match &window.bounds[i] {
        Bound::Infinite => false,
        Bound::Finite(r) => *r <= lam[i],
    });
    Ok(upper_ok && lower_ok)
}
