//! Scalar abstractions shared by the exact and floating-point code paths.
//!
//! Field elements, Gram matrices and determinants are written once against
//! [`Scalar`]; the crate root fixes the exact instantiation
//! ([`crate::Rational`]) used for all identities that must hold exactly.
//! Volume and quadrature code is written against [`Real`] (`f32`/`f64`).

use std::fmt::Debug;
use std::ops::Neg;

use num_bigint::BigInt;
use num_rational::{BigRational, Ratio};
use num_traits::{Float, FromPrimitive, Num, Signed};

/// A commutative ring element with exact or approximate arithmetic.
pub trait Scalar: Num + Neg<Output = Self> + Clone + Debug + PartialEq + PartialOrd {
    fn from_i64(v: i64) -> Self;

    fn from_u64(v: u64) -> Self;

    /// Exact quotient when `self` is known to be divisible by `rhs`; plain
    /// division for fields.
    fn exact_div(&self, rhs: &Self) -> Self {
        self.clone() / rhs.clone()
    }

    fn is_negative_value(&self) -> bool {
        *self < Self::zero()
    }
}

macro_rules! impl_scalar_prim {
    ($($t:ty),*) => {$(
        impl Scalar for $t {
            fn from_i64(v: i64) -> Self {
                v as $t
            }
            fn from_u64(v: u64) -> Self {
                v as $t
            }
        }
    )*};
}

impl_scalar_prim!(i64, i128, f32, f64);

impl Scalar for BigInt {
    fn from_i64(v: i64) -> Self {
        BigInt::from(v)
    }
    fn from_u64(v: u64) -> Self {
        BigInt::from(v)
    }
}

impl Scalar for BigRational {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }
    fn from_u64(v: u64) -> Self {
        Ratio::from_integer(BigInt::from(v))
    }
}

impl Scalar for Ratio<i128> {
    fn from_i64(v: i64) -> Self {
        Ratio::from_integer(v as i128)
    }
    fn from_u64(v: u64) -> Self {
        Ratio::from_integer(v as i128)
    }
}

/// Marker for scalar types that form a field (division is total off zero).
pub trait FieldScalar: Scalar {}

impl FieldScalar for f32 {}
impl FieldScalar for f64 {}
impl FieldScalar for BigRational {}
impl FieldScalar for Ratio<i128> {}

/// Floating-point scalars used for volumes, quadrature and Euler products.
pub trait Real: Float + FromPrimitive + Scalar + Signed + Send + Sync {
    fn lit(v: f64) -> Self {
        Self::from_f64(v).expect("finite literal")
    }
}

impl Real for f32 {}
impl Real for f64 {}
