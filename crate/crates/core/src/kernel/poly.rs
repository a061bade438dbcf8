//! Dense univariate polynomials over the rationals.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::{Integer, Rational};

use super::complex::BigComplex;
use super::rational::fmt_rational;

/// Dense polynomial with ascending coefficients; the last stored coefficient is
/// nonzero unless the polynomial is zero (then the vector is empty).
#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct Poly {
    coeffs: Vec<Rational>,
}

impl Poly {
    pub fn new(mut coeffs: Vec<Rational>) -> Self {
        while coeffs.last().is_some_and(|c| *c == 0) {
            coeffs.pop();
        }
        Poly { coeffs }
    }

    pub fn zero() -> Self {
        Poly { coeffs: vec![] }
    }

    pub fn one() -> Self {
        Poly::constant(Rational::from(1))
    }

    pub fn x() -> Self {
        Poly::monomial(Rational::from(1), 1)
    }

    pub fn constant(c: Rational) -> Self {
        Poly::new(vec![c])
    }

    pub fn monomial(c: Rational, k: usize) -> Self {
        let mut v = vec![Rational::new(); k + 1];
        v[k] = c;
        Poly::new(v)
    }

    pub fn from_ints(c: &[i64]) -> Self {
        Poly::new(c.iter().map(|&v| Rational::from(v)).collect())
    }

    /// `x - r`
    pub fn linear_root(r: &Rational) -> Self {
        Poly::new(vec![Rational::from(-r), Rational::from(1)])
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn into_coeffs(self) -> Vec<Rational> {
        self.coeffs
    }

    pub fn coeff(&self, k: usize) -> Rational {
        self.coeffs.get(k).cloned().unwrap_or_default()
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with the zero polynomial mapped to 0.
    pub fn deg(&self) -> usize {
        self.degree().unwrap_or(0)
    }

    pub fn lc(&self) -> Rational {
        self.coeffs.last().cloned().unwrap_or_default()
    }

    /// Lowest `k` with a nonzero coefficient of `x^k`.
    pub fn valuation(&self) -> Option<usize> {
        self.coeffs.iter().position(|c| *c != 0)
    }

    pub fn is_constant(&self) -> bool {
        self.coeffs.len() <= 1
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(c * s)).collect())
    }

    /// Multiplies by `x^k`.
    pub fn shift_up(&self, k: usize) -> Self {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::new(); k];
        v.extend(self.coeffs.iter().cloned());
        Poly::new(v)
    }

    /// Divides by `x^k`, dropping lower terms.
    pub fn shift_down(&self, k: usize) -> Self {
        Poly::new(self.coeffs.iter().skip(k).cloned().collect())
    }

    pub fn derivative(&self) -> Self {
        Poly::new(
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, c)| Rational::from(c * k as u64))
                .collect(),
        )
    }

    pub fn eval(&self, x: &Rational) -> Rational {
        let mut acc = Rational::new();
        for c in self.coeffs.iter().rev() {
            acc *= x;
            acc += c;
        }
        acc
    }

    pub fn eval_complex(&self, z: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(z.digits());
        for c in self.coeffs.iter().rev() {
            acc = &acc * z + BigComplex::from_rational(c, z.digits());
        }
        acc
    }

    pub fn eval_f64(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c.to_f64())
    }

    /// `p(x + a)`.
    pub fn taylor_shift(&self, a: &Rational) -> Self {
        let mut c = self.coeffs.clone();
        let n = c.len();
        if *a == 0 || n < 2 {
            return self.clone();
        }
        for i in 0..n {
            for j in (i..n - 1).rev() {
                let t = Rational::from(&c[j + 1] * a);
                c[j] += t;
            }
        }
        Poly::new(c)
    }

    /// `x^d · p(1/x)` with `d` given (must be at least the degree).
    pub fn reverse(&self, d: usize) -> Self {
        let mut v = vec![Rational::new(); d + 1];
        for (k, c) in self.coeffs.iter().enumerate() {
            v[d - k] = c.clone();
        }
        Poly::new(v)
    }

    /// Euclidean division; panics on a zero divisor.
    pub fn div_rem(&self, d: &Poly) -> (Poly, Poly) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let dd = d.deg();
        let lc = d.lc();
        let mut r = self.coeffs.clone();
        if r.len() <= dd {
            return (Poly::zero(), self.clone());
        }
        let mut q = vec![Rational::new(); r.len() - dd];
        for k in (0..q.len()).rev() {
            let c = Rational::from(&r[k + dd] / &lc);
            if c != 0 {
                for (j, dc) in d.coeffs.iter().enumerate() {
                    r[k + j] -= Rational::from(&c * dc);
                }
            }
            q[k] = c;
        }
        r.truncate(dd);
        (Poly::new(q), Poly::new(r))
    }

    pub fn rem(&self, d: &Poly) -> Poly {
        self.div_rem(d).1
    }

    /// Quotient when `d` divides `self` exactly.
    pub fn exact_div(&self, d: &Poly) -> Option<Poly> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let inv = Rational::from(1) / self.lc();
        self.scale(&inv)
    }

    /// Monic greatest common divisor (zero only if both are zero).
    pub fn gcd(&self, other: &Poly) -> Poly {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r.primitive();
        }
        a.monic()
    }

    /// Rescaled to coprime integer coefficients with positive leading coefficient.
    pub fn primitive(&self) -> Poly {
        if self.is_zero() {
            return Poly::zero();
        }
        let mut l = Integer::from(1);
        for c in &self.coeffs {
            l.lcm_mut(c.denom());
        }
        let ints: Vec<Integer> = self.coeffs.iter().map(|c| Integer::from(c.numer() * &l) / c.denom()).collect();
        let mut g = Integer::new();
        for v in &ints {
            g.gcd_mut(v);
        }
        if self.lc() < 0 {
            g = -g;
        }
        Poly::new(ints.into_iter().map(|v| Rational::from(v / &g)).collect())
    }

    pub fn pow(&self, e: u32) -> Poly {
        let mut r = Poly::one();
        for _ in 0..e {
            r = &r * self;
        }
        r
    }

    /// Composition `self(other(x))`.
    pub fn compose(&self, other: &Poly) -> Poly {
        let mut acc = Poly::zero();
        for c in self.coeffs.iter().rev() {
            acc = &(&acc * other) + &Poly::constant(c.clone());
        }
        acc
    }

    /// Yun's square-free decomposition: pairs `(f_i, i)` with `self = c·∏ f_i^i`.
    pub fn squarefree_decomposition(&self) -> Vec<(Poly, usize)> {
        let mut out = vec![];
        if self.is_constant() {
            return out;
        }
        let f = self.monic();
        let df = f.derivative();
        let a = f.gcd(&df);
        let mut b = f.exact_div(&a).expect("gcd divides");
        let mut c = df.exact_div(&a).expect("gcd divides");
        let mut d = &c - &b.derivative();
        let mut i = 1;
        loop {
            let g = b.gcd(&d);
            if !g.is_constant() {
                out.push((g.primitive(), i));
            }
            b = b.exact_div(&g).expect("gcd divides");
            if b.is_constant() {
                break;
            }
            c = d.exact_div(&g).expect("gcd divides");
            d = &c - &b.derivative();
            i += 1;
        }
        out
    }

    /// Multiplicity of `factor` in `self` (0 when it does not divide).
    pub fn multiplicity_of(&self, factor: &Poly) -> usize {
        if self.is_zero() || factor.is_constant() {
            return 0;
        }
        let mut m = 0;
        let mut p = self.clone();
        while let Some(q) = p.exact_div(factor) {
            m += 1;
            p = q;
        }
        m
    }

    pub fn to_string_var(&self, var: &str) -> String {
        if self.is_zero() {
            return "0".into();
        }
        let mut parts = vec![];
        for (k, c) in self.coeffs.iter().enumerate() {
            if *c == 0 {
                continue;
            }
            let cs = fmt_rational(c);
            let term = match k {
                0 => cs,
                1 => format!("{cs}*{var}"),
                _ => format!("{cs}*{var}^{k}"),
            };
            parts.push(term);
        }
        parts.join(" + ").replace("+ -", "- ")
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_var("x"))
    }
}

impl Add<&Poly> for &Poly {
    type Output = Poly;
    fn add(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) + rhs.coeff(k)).collect())
    }
}

impl Sub<&Poly> for &Poly {
    type Output = Poly;
    fn sub(self, rhs: &Poly) -> Poly {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly::new((0..n).map(|k| self.coeff(k) - rhs.coeff(k)).collect())
    }
}

impl Mul<&Poly> for &Poly {
    type Output = Poly;
    fn mul(self, rhs: &Poly) -> Poly {
        if self.is_zero() || rhs.is_zero() {
            return Poly::zero();
        }
        let mut v = vec![Rational::new(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if *a == 0 {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                v[i + j] += Rational::from(a * b);
            }
        }
        Poly::new(v)
    }
}

impl Neg for &Poly {
    type Output = Poly;
    fn neg(self) -> Poly {
        Poly::new(self.coeffs.iter().map(|c| Rational::from(-c)).collect())
    }
}

impl Add for Poly {
    type Output = Poly;
    fn add(self, rhs: Poly) -> Poly {
        &self + &rhs
    }
}

impl Sub for Poly {
    type Output = Poly;
    fn sub(self, rhs: Poly) -> Poly {
        &self - &rhs
    }
}

impl Mul for Poly {
    type Output = Poly;
    fn mul(self, rhs: Poly) -> Poly {
        &self * &rhs
    }
}
