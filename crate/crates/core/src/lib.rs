//! Totally real multiquadratic fields of degree 2^n: exact field arithmetic
//! on the radical basis, integral bases and their Gram matrices, lattice
//! shapes, the carefree-tuple parametrization, sieve densities and the
//! asymptotic main term for counting Case 1 fields by discriminant.
//!
//! Structural code is generic over [`Scalar`]; the aliases below fix the
//! exact instantiations used throughout.

pub mod analytic;
pub mod arith;
pub mod basis;
pub mod error;
pub mod f2;
pub mod field;
pub mod matrix;
pub mod param;
pub mod report;
pub mod sample;
pub mod scalar;
pub mod sieve;
pub mod verify;

pub use error::{Error, Result};
pub use matrix::Matrix;
pub use sieve::{
    euler_product, finite_sieve_count, local_count_bruteforce, local_count_formula, local_density,
    omega1, EulerProduct, LocalDensity, SieveLevel,
};
pub use scalar::{FieldScalar, Real, Scalar};

pub use analytic::{
    compare_asymptotic, main_term_constant, predicted_count, region_volume, shape_volume_f,
    shape_volume_f_displayed, shape_volume_f_quadrature, ComparisonReport, MainTermConstant,
    RegionVolume, VolumeMethod, VolumeValue,
};
pub use basis::{
    gram_full, gram_projected, integral_basis, normalize_generators, shape_params,
    window_contains, IntegralBasis, ShapeParams, ShapeWindow,
};
pub use param::{
    canonical_form, count_lattice_points, enumerate_fields, enumerate_lattice_points, orbit,
    radicands_from_tuple, tuple_from_radicands, CarefreeTuple, CountReport, FieldRecord,
    LatticeQuery, TupleFilter,
};
pub use f2::{
    character_value, exponent_matrix, gl_order, index_xor, reduced_sign_matrix, sign_matrix,
    volume_constant, ExponentMatrix, GroupIndex, Permutation, SignMatrix,
};
pub use field::{
    classify_case, discriminant, radicand_lattice, validate_generating_set, FieldElement,
    GeneratingSet, RadicandVector, RamificationCase,
};

/// Exact rationals; every identity in the crate is checked over this type.
pub type Rational = num_rational::BigRational;
pub type Integer = num_bigint::BigInt;
pub type RationalMatrix = Matrix<Rational>;
pub type IntMatrix = Matrix<i64>;
pub type GramMatrix<T = Rational> = Matrix<T>;
pub type Element = FieldElement<Rational>;
pub type FloatElement = FieldElement<f64>;
