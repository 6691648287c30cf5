//! Scalar traits for the exact linear algebra.
//!
//! Two families are needed: exact fields (rationals) for rank and nullspace
//! computations, and integral domains with a Euclidean gcd for fraction-free
//! determinants and lattice reduction. Floating point types deliberately do
//! not implement [`ExactField`]; every decision in this crate is exact.

use std::fmt::Debug;

use num_integer::Integer;
use num_rational::Ratio;
use num_traits::Signed;

/// A field with exact arithmetic.
pub trait ExactField: Clone + Debug + PartialEq + Signed {
    fn is_exactly_zero(&self) -> bool {
        self.is_zero()
    }
}

impl<T> ExactField for Ratio<T> where T: Clone + Debug + Integer + Signed {}

/// A signed Euclidean domain with exact division.
pub trait Integral: Clone + Debug + Ord + Integer + Signed {
    fn from_i64(v: i64) -> Self;
    fn to_i64(&self) -> Option<i64>;
}

impl Integral for i64 {
    fn from_i64(v: i64) -> Self {
        v
    }
    fn to_i64(&self) -> Option<i64> {
        Some(*self)
    }
}

impl Integral for i128 {
    fn from_i64(v: i64) -> Self {
        v as i128
    }
    fn to_i64(&self) -> Option<i64> {
        i64::try_from(*self).ok()
    }
}

impl Integral for num_bigint::BigInt {
    fn from_i64(v: i64) -> Self {
        v.into()
    }
    fn to_i64(&self) -> Option<i64> {
        num_traits::ToPrimitive::to_i64(self)
    }
}

/// Lift an `i64` matrix into another integral scalar.
pub fn lift_matrix<T: Integral>(m: &[Vec<i64>]) -> Vec<Vec<T>> {
    m.iter()
        .map(|row| row.iter().map(|&v| T::from_i64(v)).collect())
        .collect()
}
