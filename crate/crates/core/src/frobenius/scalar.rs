//! Field operations the Frobenius recurrence needs, for exact and numeric runs.

use std::fmt::Debug;

use rug::Rational;

use crate::kernel::BigComplex;

pub trait Scalar: Clone + Debug + Send + Sync {
    fn zero_like(&self) -> Self;
    /// A rational constant at the precision of `self`.
    fn lift(&self, q: &Rational) -> Self;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn div(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn is_zero(&self) -> bool;
    fn to_complex(&self, digits: u32) -> BigComplex;
}

impl Scalar for Rational {
    fn zero_like(&self) -> Self {
        Rational::new()
    }
    fn lift(&self, q: &Rational) -> Self {
        q.clone()
    }
    fn add(&self, o: &Self) -> Self {
        Rational::from(self + o)
    }
    fn sub(&self, o: &Self) -> Self {
        Rational::from(self - o)
    }
    fn mul(&self, o: &Self) -> Self {
        Rational::from(self * o)
    }
    fn div(&self, o: &Self) -> Self {
        Rational::from(self / o)
    }
    fn neg(&self) -> Self {
        Rational::from(-self)
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn to_complex(&self, digits: u32) -> BigComplex {
        BigComplex::from_rational(self, digits)
    }
}

impl Scalar for BigComplex {
    fn zero_like(&self) -> Self {
        BigComplex::zero(self.digits())
    }
    fn lift(&self, q: &Rational) -> Self {
        BigComplex::from_rational(q, self.digits())
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn div(&self, o: &Self) -> Self {
        self / o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn is_zero(&self) -> bool {
        BigComplex::is_zero(self)
    }
    fn to_complex(&self, digits: u32) -> BigComplex {
        self.with_digits(digits)
    }
}
