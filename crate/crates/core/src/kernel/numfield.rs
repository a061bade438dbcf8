//! Arithmetic in ℚ(θ) = ℚ[x]/(f) for an irreducible `f`.

use rug::Rational;

use super::complex::BigComplex;
use super::poly::Poly;

/// Simple algebraic extension given by a primitive irreducible polynomial and
/// a numeric value for the chosen root.
#[derive(Clone, Debug)]
pub struct NumberField {
    pub modulus: Poly,
    pub root: BigComplex,
}

impl NumberField {
    pub fn new(modulus: Poly, root: BigComplex) -> Self {
        NumberField { modulus, root }
    }

    /// ℚ itself, presented as ℚ[x]/(x − r).
    pub fn rational(r: &Rational, digits: u32) -> Self {
        NumberField { modulus: Poly::linear_root(r), root: BigComplex::from_rational(r, digits) }
    }

    pub fn degree(&self) -> usize {
        self.modulus.deg()
    }

    pub fn reduce(&self, p: &Poly) -> Poly {
        p.rem(&self.modulus)
    }

    pub fn mul(&self, a: &Poly, b: &Poly) -> Poly {
        self.reduce(&(a * b))
    }

    /// Inverse by the extended Euclidean algorithm; `None` for zero.
    pub fn inv(&self, a: &Poly) -> Option<Poly> {
        let a = self.reduce(a);
        if a.is_zero() {
            return None;
        }
        let (mut r0, mut r1) = (self.modulus.clone(), a);
        let (mut s0, mut s1) = (Poly::zero(), Poly::one());
        while !r1.is_zero() {
            let (q, r) = r0.div_rem(&r1);
            let s2 = &s0 - &(&q * &s1);
            r0 = std::mem::replace(&mut r1, r);
            s0 = std::mem::replace(&mut s1, s2);
        }
        // r0 is a nonzero constant since the modulus is irreducible
        let c = r0.coeff(0);
        Some(self.reduce(&s0.scale(&(Rational::from(1) / c))))
    }

    /// Value of the Taylor coefficient `p^{(m)}(θ)/m!`.
    pub fn taylor_coeff(&self, p: &Poly, m: usize) -> Poly {
        let mut d = p.clone();
        let mut fact = Rational::from(1);
        for k in 1..=m {
            d = d.derivative();
            fact *= k as u64;
        }
        self.reduce(&d.scale(&(Rational::from(1) / fact)))
    }

    /// Order of vanishing of `p` at θ.
    pub fn order(&self, p: &Poly) -> usize {
        p.multiplicity_of(&self.modulus)
    }

    pub fn to_complex(&self, a: &Poly, digits: u32) -> BigComplex {
        a.eval_complex(&self.root.with_digits(digits))
    }
}
