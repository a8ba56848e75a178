//! Combinatorics of F_2^n.
//!
//! An index j in 0..2^n stands for the vector v_j whose coordinate t is bit t
//! of j. Addition of vectors is XOR of indices, and the dot product is the
//! parity of `i & j`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed};

use crate::error::{Error, Result};
use crate::matrix::Matrix;
use crate::Rational;

pub const DEFAULT_DIMENSION_CAP: u32 = 6;

/// Parity of v_i · v_j.
#[inline]
pub fn dot(i: usize, j: usize) -> bool {
    (i & j).count_ones() % 2 == 1
}

/// χ_i(v_j) as ±1.
#[inline]
pub fn chi(i: usize, j: usize) -> i64 {
    if dot(i, j) {
        -1
    } else {
        1
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct GroupIndex {
    n: u32,
    value: usize,
}

impl GroupIndex {
    pub fn new(value: usize, n: u32) -> Result<Self> {
        let limit = 1usize << n;
        if value >= limit {
            return Err(Error::IndexOutOfRange { index: value, n, limit });
        }
        Ok(GroupIndex { n, value })
    }

    pub fn value(self) -> usize {
        self.value
    }

    pub fn n(self) -> u32 {
        self.n
    }

    pub fn bit(self, t: u32) -> bool {
        (self.value >> t) & 1 == 1
    }
}

fn same_space(i: GroupIndex, j: GroupIndex) -> Result<()> {
    if i.n != j.n {
        return Err(Error::DimensionMismatch { expected: i.n as usize, actual: j.n as usize });
    }
    Ok(())
}

pub fn index_xor(i: GroupIndex, j: GroupIndex) -> Result<GroupIndex> {
    same_space(i, j)?;
    GroupIndex::new(i.value ^ j.value, i.n)
}

pub fn character_value(i: GroupIndex, j: GroupIndex) -> Result<i64> {
    same_space(i, j)?;
    Ok(chi(i.value, j.value))
}

/// The 2^n × 2^n matrix A_n with entries χ_i(v_j).
#[derive(Clone, Debug, PartialEq)]
pub struct SignMatrix {
    n: u32,
    entries: Matrix<i64>,
}

impl SignMatrix {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.entries.rows()
    }

    pub fn entry(&self, i: usize, j: usize) -> i64 {
        self.entries[(i, j)]
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.entries
    }

    pub fn to_scalar<T: crate::Scalar>(&self) -> Matrix<T> {
        self.entries.map(|&x| T::from_i64(x))
    }

    /// A copy with one entry negated. Only useful to exercise the
    /// verification suite's failure path.
    pub fn with_flipped_entry(&self, i: usize, j: usize) -> SignMatrix {
        let mut entries = self.entries.clone();
        entries[(i, j)] = -entries[(i, j)];
        SignMatrix { n: self.n, entries }
    }
}

pub fn sign_matrix(n: u32) -> Result<SignMatrix> {
    sign_matrix_with_cap(n, DEFAULT_DIMENSION_CAP)
}

/// Builds A_n by the block recursion A_{k+1} = [[A_k, A_k], [A_k, -A_k]].
pub fn sign_matrix_with_cap(n: u32, cap: u32) -> Result<SignMatrix> {
    if n > cap {
        return Err(Error::DimensionCap { n, cap });
    }
    let mut a = Matrix::from_rows(vec![vec![1i64]]);
    for _ in 0..n {
        let d = a.rows();
        let mut next = Matrix::zeros(2 * d, 2 * d);
        next.set_block(0, 0, &a);
        next.set_block(0, d, &a);
        next.set_block(d, 0, &a);
        next.set_block(d, d, &a.scale(&-1));
        a = next;
    }
    Ok(SignMatrix { n, entries: a })
}

/// Ã_n: A_n without its first row and column.
pub fn reduced_sign_matrix(n: u32) -> Result<Matrix<i64>> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    Ok(sign_matrix(n)?.matrix().minor_matrix(0, 0))
}

/// A permutation σ of {1, …, ℓ}, stored by its images.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation(Vec<usize>);

impl Permutation {
    pub fn new(images: Vec<usize>) -> Result<Self> {
        let len = images.len();
        let mut seen = vec![false; len + 1];
        for &x in &images {
            if x == 0 || x > len || seen[x] {
                return Err(Error::InvalidPermutation(format!("{images:?}")));
            }
            seen[x] = true;
        }
        Ok(Permutation(images))
    }

    pub fn identity(len: usize) -> Self {
        Permutation((1..=len).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// σ(j) for 1-based j.
    pub fn apply(&self, j: usize) -> usize {
        self.0[j - 1]
    }

    pub fn images(&self) -> &[usize] {
        &self.0
    }

    /// All permutations of {1, …, len} in lexicographic order.
    pub fn all(len: usize) -> Vec<Permutation> {
        let mut out = Vec::new();
        let mut cur: Vec<usize> = (1..=len).collect();
        loop {
            out.push(Permutation(cur.clone()));
            // next lexicographic permutation
            let Some(i) = (1..cur.len()).rev().find(|&i| cur[i - 1] < cur[i]) else {
                break;
            };
            let j = (i..cur.len()).rev().find(|&j| cur[j] > cur[i - 1]).unwrap();
            cur.swap(i - 1, j);
            cur[i..].reverse();
        }
        out
    }
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.0.iter().map(|x| x.to_string()).collect();
        write!(f, "{}", parts.join(" "))
    }
}

/// Exponent of g_i in D_j: one when v_i · v_j = 1.
#[inline]
pub fn radicand_exponent(i: usize, j: usize) -> i64 {
    dot(i, j) as i64
}

/// The linear map (log g_1, …, log g_ℓ) ↦ (log ∏g, log λ_2, …, log λ_ℓ).
#[derive(Clone, Debug, PartialEq)]
pub struct ExponentMatrix {
    n: u32,
    sigma: Permutation,
    entries: Matrix<i64>,
}

impl ExponentMatrix {
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn sigma(&self) -> &Permutation {
        &self.sigma
    }

    pub fn matrix(&self) -> &Matrix<i64> {
        &self.entries
    }

    pub fn det(&self) -> BigInt {
        self.entries.map(|&x| BigInt::from(x)).det()
    }
}

fn check_sigma(n: u32, sigma: &Permutation) -> Result<usize> {
    let ell = (1usize << n) - 1;
    if sigma.len() != ell {
        return Err(Error::InvalidPermutation(format!(
            "expected a permutation of 1..={ell}, got length {}",
            sigma.len()
        )));
    }
    Ok(ell)
}

/// Row j ≥ 2 holds the exponents of g_1..g_ℓ in D_{σ(j)}/D_{σ(1)}.
pub fn exponent_matrix(n: u32, sigma: &Permutation) -> Result<ExponentMatrix> {
    if n > DEFAULT_DIMENSION_CAP {
        return Err(Error::DimensionCap { n, cap: DEFAULT_DIMENSION_CAP });
    }
    let ell = check_sigma(n, sigma)?;
    let entries = Matrix::from_fn(ell, ell, |r, c| {
        let i = c + 1;
        if r == 0 {
            1
        } else {
            radicand_exponent(i, sigma.apply(r + 1)) - radicand_exponent(i, sigma.apply(1))
        }
    });
    Ok(ExponentMatrix { n, sigma: sigma.clone(), entries })
}

/// The same rows written as (χ_{σ(j)}(v_i) − χ_{σ(1)}(v_i))/2. This is the
/// negative of [`exponent_matrix`] below the first row.
pub fn exponent_matrix_character_form(n: u32, sigma: &Permutation) -> Result<ExponentMatrix> {
    let ell = check_sigma(n, sigma)?;
    let entries = Matrix::from_fn(ell, ell, |r, c| {
        let i = c + 1;
        if r == 0 {
            1
        } else {
            (chi(sigma.apply(r + 1), i) - chi(sigma.apply(1), i)) / 2
        }
    });
    Ok(ExponentMatrix { n, sigma: sigma.clone(), entries })
}

/// c_ℓ = 1/|det C|.
pub fn volume_constant(n: u32) -> Result<Rational> {
    if n == 0 {
        return Err(Error::DimensionTooSmall { n, min: 1 });
    }
    let ell = (1usize << n) - 1;
    let d = exponent_matrix(n, &Permutation::identity(ell))?.det().abs();
    Ok(Rational::new(BigInt::one(), d))
}

/// #GL_n(F_2) = ∏_{k<n} (2^n − 2^k). Panics past n = 11, where it leaves u128.
pub fn gl_order(n: u32) -> u128 {
    let q = 1u128 << n;
    (0..n).fold(1u128, |acc, k| acc.checked_mul(q - (1u128 << k)).expect("GL order overflows u128"))
}

/// An invertible n×n matrix over F_2, stored as the indices of its columns.
pub type F2Basis = Vec<usize>;

/// Applies the matrix with the given columns to v_x.
#[inline]
pub fn apply_columns(cols: &[usize], x: usize) -> usize {
    cols.iter().enumerate().filter(|&(k, _)| (x >> k) & 1 == 1).fold(0, |acc, (_, &c)| acc ^ c)
}

/// Applies the transpose: bit k of the result is col_k · v_x.
#[inline]
pub fn apply_transpose(cols: &[usize], x: usize) -> usize {
    cols.iter().enumerate().filter(|&(_, &c)| dot(c, x)).fold(0, |acc, (k, _)| acc | (1 << k))
}

/// Every ordered basis of F_2^n, i.e. every element of GL_n(F_2), in
/// lexicographic order of the column indices.
pub fn ordered_bases(n: u32) -> Vec<F2Basis> {
    fn extend(n: u32, cols: &mut Vec<usize>, span: &mut Vec<bool>, out: &mut Vec<F2Basis>) {
        if cols.len() == n as usize {
            out.push(cols.clone());
            return;
        }
        let size = 1usize << n;
        for v in 1..size {
            if span[v] {
                continue;
            }
            // the new span is old span ∪ (old span + v)
            let added: Vec<usize> = (0..size).filter(|&x| span[x]).map(|x| x ^ v).collect();
            for &x in &added {
                span[x] = true;
            }
            cols.push(v);
            extend(n, cols, span, out);
            cols.pop();
            for &x in &added {
                span[x] = false;
            }
        }
    }
    let mut span = vec![false; 1usize << n];
    span[0] = true;
    let mut out = Vec::new();
    extend(n, &mut Vec::new(), &mut span, &mut out);
    out
}

/// Orthogonality check on the character rows w_i = (χ_i(v_j))_j: returns the
/// Gram matrix of the rows, which should be 2^n · I.
pub fn character_row_gram(n: u32) -> Matrix<i64> {
    let size = 1usize << n;
    Matrix::from_fn(size, size, |a, b| (0..size).map(|j| chi(a, j) * chi(b, j)).sum())
}

pub fn is_scaled_identity(m: &Matrix<i64>, s: i64) -> bool {
    (0..m.rows()).all(|i| (0..m.cols()).all(|j| m[(i, j)] == if i == j { s } else { 0 }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::Zero;
    use proptest::prelude::*;

    fn idx(v: usize, n: u32) -> GroupIndex {
        GroupIndex::new(v, n).unwrap()
    }

    #[test]
    fn xor_examples() {
        assert_eq!(index_xor(idx(1, 2), idx(2, 2)).unwrap().value(), 3);
        assert_eq!(index_xor(idx(5, 3), idx(3, 3)).unwrap().value(), 6);
        for j in 0..8 {
            assert_eq!(index_xor(idx(j, 3), idx(0, 3)).unwrap().value(), j);
        }
        assert!(GroupIndex::new(4, 2).is_err());
        assert!(index_xor(idx(1, 2), idx(1, 3)).is_err());
    }

    #[test]
    fn character_examples() {
        for j in 0..4 {
            assert_eq!(character_value(idx(0, 2), idx(j, 2)).unwrap(), 1);
        }
        assert_eq!(character_value(idx(1, 2), idx(1, 2)).unwrap(), -1);
        assert_eq!(character_value(idx(3, 2), idx(3, 2)).unwrap(), 1);
    }

    #[test]
    fn small_sign_matrices() {
        assert_eq!(sign_matrix(1).unwrap().matrix(), &Matrix::from_rows(vec![vec![1, 1], vec![1, -1]]));
        let a2 = Matrix::from_rows(vec![
            vec![1, 1, 1, 1],
            vec![1, -1, 1, -1],
            vec![1, 1, -1, -1],
            vec![1, -1, -1, 1],
        ]);
        assert_eq!(sign_matrix(2).unwrap().matrix(), &a2);
        assert!(matches!(sign_matrix(7), Err(Error::DimensionCap { .. })));
        assert!(sign_matrix_with_cap(7, 7).is_ok());
    }

    #[test]
    fn sign_matrix_squares_to_scaled_identity() {
        for n in 0..=6 {
            let a = sign_matrix(n).unwrap();
            let m = a.matrix();
            assert!(m.is_symmetric());
            assert!(is_scaled_identity(&m.mul(m), 1 << n));
            assert!((0..a.dim()).all(|j| a.entry(0, j) == 1 && a.entry(j, 0) == 1));
        }
    }

    #[test]
    fn entries_are_characters() {
        for n in 0..=5 {
            let a = sign_matrix(n).unwrap();
            for i in 0..a.dim() {
                for j in 0..a.dim() {
                    assert_eq!(a.entry(i, j), character_value(idx(i, n), idx(j, n)).unwrap());
                }
            }
        }
    }

    #[test]
    fn character_rows_are_orthogonal() {
        for n in 0..=4 {
            assert!(is_scaled_identity(&character_row_gram(n), 1 << n));
        }
    }

    #[test]
    fn reduced_sign_matrices() {
        assert_eq!(reduced_sign_matrix(1).unwrap(), Matrix::from_rows(vec![vec![-1]]));
        let r2 = reduced_sign_matrix(2).unwrap();
        assert_eq!(
            r2,
            Matrix::from_rows(vec![vec![-1, 1, -1], vec![1, -1, -1], vec![-1, -1, 1]])
        );
        let d = r2.det();
        assert_eq!(d * d, 16);
        assert!(reduced_sign_matrix(0).is_err());
    }

    #[test]
    fn exponent_matrix_n2_identity() {
        let c = exponent_matrix(2, &Permutation::identity(3)).unwrap();
        // D2/D1 = g2/g1 and D3/D1 = g2/g3
        assert_eq!(c.matrix(), &Matrix::from_rows(vec![vec![1, 1, 1], vec![-1, 1, 0], vec![0, 1, -1]]));
        assert_eq!(c.det().abs(), BigInt::from(3));
    }

    #[test]
    fn exponent_matrix_det_is_three_for_every_sigma() {
        for sigma in Permutation::all(3) {
            let c = exponent_matrix(2, &sigma).unwrap();
            assert_eq!(c.det().abs(), BigInt::from(3), "sigma {sigma}");
        }
        assert_eq!(Permutation::all(3).len(), 6);
    }

    #[test]
    fn character_form_is_the_negative() {
        for n in 1..=3 {
            let ell = (1usize << n) - 1;
            let sigma = Permutation::identity(ell);
            let direct = exponent_matrix(n, &sigma).unwrap();
            let chi_form = exponent_matrix_character_form(n, &sigma).unwrap();
            for r in 1..ell {
                for c in 0..ell {
                    assert_eq!(direct.matrix()[(r, c)], -chi_form.matrix()[(r, c)]);
                }
            }
            assert_eq!(direct.det().abs(), chi_form.det().abs());
        }
    }

    #[test]
    fn volume_constants() {
        assert_eq!(volume_constant(1).unwrap(), Rational::one());
        assert_eq!(volume_constant(2).unwrap(), Rational::new(1.into(), 3.into()));
        // pinned from the exact 7x7 determinant
        assert_eq!(volume_constant(3).unwrap(), Rational::new(1.into(), 56.into()));
    }

    #[test]
    fn gl_orders() {
        assert_eq!(gl_order(1), 1);
        assert_eq!(gl_order(2), 6);
        assert_eq!(gl_order(3), 168);
        assert_eq!(gl_order(4), 20160);
        for n in 1..=4 {
            assert_eq!(ordered_bases(n).len() as u128, gl_order(n));
        }
    }

    #[test]
    fn transpose_action_is_adjoint() {
        for cols in ordered_bases(3) {
            for x in 0..8 {
                for y in 0..8 {
                    assert_eq!(dot(apply_columns(&cols, x), y), dot(x, apply_transpose(&cols, y)));
                }
            }
        }
    }

    fn arb_sigma(ell: usize) -> impl Strategy<Value = Permutation> {
        Just((1..=ell).collect::<Vec<_>>())
            .prop_shuffle()
            .prop_map(|v| Permutation::new(v).unwrap())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(20))]

        #[test]
        fn exponent_rows_sum_to_zero_and_det_is_sigma_free(
            (n, sigma) in (1u32..=4).prop_flat_map(|n| (Just(n), arb_sigma((1 << n) - 1)))
        ) {
            let ell = (1usize << n) - 1;
            let c = exponent_matrix(n, &sigma).unwrap();
            for r in 1..ell {
                prop_assert_eq!(c.matrix().row(r).iter().sum::<i64>(), 0);
            }
            let base = exponent_matrix(n, &Permutation::identity(ell)).unwrap().det().abs();
            prop_assert!(!base.is_zero());
            prop_assert_eq!(c.det().abs(), base);
        }
    }
}
