//! Polynomials and rational functions over ℚ in the two formal symbols α, Ω.
//!
//! A [`BiPoly`] is stored dense in Ω with coefficients in ℚ[α]; gcds use a
//! primitive remainder sequence over ℚ[α][Ω].

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use rug::Rational;

use super::complex::BigComplex;
use super::poly::Poly;
use super::rational::fmt_rational;

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BiPoly {
    /// `c[j]` is the coefficient of Ω^j, a polynomial in α.
    c: Vec<Poly>,
}

impl BiPoly {
    fn from_vec(mut c: Vec<Poly>) -> Self {
        while c.last().is_some_and(|p| p.is_zero()) {
            c.pop();
        }
        BiPoly { c }
    }

    pub fn zero() -> Self {
        BiPoly { c: vec![] }
    }

    pub fn constant(q: Rational) -> Self {
        BiPoly::from_vec(vec![Poly::constant(q)])
    }

    pub fn one() -> Self {
        BiPoly::constant(Rational::from(1))
    }

    /// `q · α^a · Ω^b`
    pub fn monomial(q: Rational, a: usize, b: usize) -> Self {
        let mut c = vec![Poly::zero(); b + 1];
        c[b] = Poly::monomial(q, a);
        BiPoly::from_vec(c)
    }

    pub fn alpha() -> Self {
        BiPoly::monomial(Rational::from(1), 1, 0)
    }

    pub fn omega() -> Self {
        BiPoly::monomial(Rational::from(1), 0, 1)
    }

    /// Polynomial in Ω alone.
    pub fn from_omega_poly(p: &Poly) -> Self {
        BiPoly::from_vec(p.coeffs().iter().map(|q| Poly::constant(q.clone())).collect())
    }

    pub fn is_zero(&self) -> bool {
        self.c.is_empty()
    }

    pub fn omega_degree(&self) -> usize {
        self.c.len().saturating_sub(1)
    }

    /// Coefficient of α^a Ω^b.
    pub fn coeff(&self, a: usize, b: usize) -> Rational {
        self.c.get(b).map(|p| p.coeff(a)).unwrap_or_default()
    }

    /// Nonzero terms `(a, b, q)` sorted by Ω degree then α degree.
    pub fn terms(&self) -> Vec<(usize, usize, Rational)> {
        let mut out = vec![];
        for (b, p) in self.c.iter().enumerate() {
            for (a, q) in p.coeffs().iter().enumerate() {
                if *q != 0 {
                    out.push((a, b, q.clone()));
                }
            }
        }
        out
    }

    fn is_monomial(&self) -> Option<(usize, usize)> {
        let t = self.terms();
        (t.len() == 1).then(|| (t[0].0, t[0].1))
    }

    fn lowest_orders(&self) -> (usize, usize) {
        let t = self.terms();
        let a = t.iter().map(|x| x.0).min().unwrap_or(0);
        let b = t.iter().map(|x| x.1).min().unwrap_or(0);
        (a, b)
    }

    fn scale(&self, q: &Rational) -> Self {
        BiPoly::from_vec(self.c.iter().map(|p| p.scale(q)).collect())
    }

    fn mul_alpha_poly(&self, p: &Poly) -> Self {
        BiPoly::from_vec(self.c.iter().map(|x| x * p).collect())
    }

    fn shift_omega(&self, k: usize) -> Self {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let mut c = vec![Poly::zero(); k];
        c.extend(self.c.iter().cloned());
        BiPoly::from_vec(c)
    }

    /// Leading coefficient in (Ω, then α) order.
    fn leading_rational(&self) -> Rational {
        self.c.last().map(|p| p.lc()).unwrap_or_default()
    }

    fn content(&self) -> Poly {
        let mut g = Poly::zero();
        for p in &self.c {
            g = g.gcd(p);
            if g.is_constant() && !g.is_zero() {
                return Poly::one();
            }
        }
        g
    }

    fn div_alpha_poly(&self, p: &Poly) -> Self {
        BiPoly::from_vec(self.c.iter().map(|x| x.exact_div(p).expect("content divides")).collect())
    }

    fn primitive_part(&self) -> Self {
        if self.is_zero() {
            return BiPoly::zero();
        }
        let pp = self.div_alpha_poly(&self.content());
        let lc = pp.leading_rational();
        pp.scale(&(Rational::from(1) / lc))
    }

    /// `b^{m-n+1}·self mod other`, in Ω, up to a factor from ℚ[α].
    fn pseudo_rem(&self, other: &BiPoly) -> BiPoly {
        let n = other.omega_degree();
        let b = other.c[n].clone();
        let mut r = self.clone();
        while !r.is_zero() && r.omega_degree() >= n {
            let m = r.omega_degree();
            let lr = r.c[m].clone();
            r = &r.mul_alpha_poly(&b) - &other.mul_alpha_poly(&lr).shift_omega(m - n);
        }
        r
    }

    /// Exact quotient when `other` divides `self`.
    pub fn exact_div(&self, other: &BiPoly) -> Option<BiPoly> {
        assert!(!other.is_zero());
        let n = other.omega_degree();
        let lb = &other.c[n];
        let mut r = self.clone();
        let mut q = vec![Poly::zero(); self.c.len().saturating_sub(n).max(1)];
        while !r.is_zero() {
            let m = r.omega_degree();
            if m < n {
                return None;
            }
            let t = r.c[m].exact_div(lb)?;
            r = &r - &other.mul_alpha_poly(&t).shift_omega(m - n);
            q[m - n] = t;
        }
        Some(BiPoly::from_vec(q))
    }

    /// Greatest common divisor, normalized to leading rational coefficient one.
    pub fn gcd(&self, other: &BiPoly) -> BiPoly {
        if self.is_zero() {
            return other.primitive_part_full();
        }
        if other.is_zero() {
            return self.primitive_part_full();
        }
        if let Some(m) = self.is_monomial().or_else(|| other.is_monomial()) {
            let (a1, b1) = m;
            let (a2, b2) = if self.is_monomial() == Some(m) { other.lowest_orders() } else { self.lowest_orders() };
            return BiPoly::monomial(Rational::from(1), a1.min(a2), b1.min(b2));
        }
        let (ca, cb) = (self.content(), other.content());
        let cg = ca.gcd(&cb);
        let mut a = self.div_alpha_poly(&ca);
        let mut b = other.div_alpha_poly(&cb);
        if a.omega_degree() < b.omega_degree() {
            std::mem::swap(&mut a, &mut b);
        }
        while !b.is_zero() {
            if b.omega_degree() == 0 {
                // b is a polynomial in α only and a is primitive
                a = BiPoly::one();
                break;
            }
            let r = a.pseudo_rem(&b);
            a = b;
            b = if r.is_zero() { r } else { r.primitive_part() };
        }
        a.primitive_part().mul_alpha_poly(&cg).normalized()
    }

    fn primitive_part_full(&self) -> BiPoly {
        self.normalized()
    }

    fn normalized(&self) -> BiPoly {
        if self.is_zero() {
            return BiPoly::zero();
        }
        self.scale(&(Rational::from(1) / self.leading_rational()))
    }

    /// Substitutes Ω ↦ k·Ω.
    pub fn scale_omega(&self, k: &Rational) -> BiPoly {
        let mut f = Rational::from(1);
        let mut out = vec![];
        for p in &self.c {
            out.push(p.scale(&f));
            f *= k;
        }
        BiPoly::from_vec(out)
    }

    pub fn eval(&self, alpha: &BigComplex, omega: &BigComplex) -> BigComplex {
        let mut acc = BigComplex::zero(alpha.digits());
        for p in self.c.iter().rev() {
            acc = &acc * omega + p.eval_complex(alpha);
        }
        acc
    }
}

impl fmt::Display for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut parts = vec![];
        for (a, b, q) in self.terms() {
            let mut s = fmt_rational(&q);
            if a > 0 {
                s.push_str(&if a == 1 { "*alpha".to_string() } else { format!("*alpha^{a}") });
            }
            if b > 0 {
                s.push_str(&if b == 1 { "*Omega".to_string() } else { format!("*Omega^{b}") });
            }
            parts.push(s);
        }
        write!(f, "{}", parts.join(" + ").replace("+ -", "- "))
    }
}

impl fmt::Debug for BiPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn add(self, rhs: &BiPoly) -> BiPoly {
        let n = self.c.len().max(rhs.c.len());
        let z = Poly::zero();
        BiPoly::from_vec((0..n).map(|k| self.c.get(k).unwrap_or(&z) + rhs.c.get(k).unwrap_or(&z)).collect())
    }
}

impl Sub<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn sub(self, rhs: &BiPoly) -> BiPoly {
        let n = self.c.len().max(rhs.c.len());
        let z = Poly::zero();
        BiPoly::from_vec((0..n).map(|k| self.c.get(k).unwrap_or(&z) - rhs.c.get(k).unwrap_or(&z)).collect())
    }
}

impl Mul<&BiPoly> for &BiPoly {
    type Output = BiPoly;
    fn mul(self, rhs: &BiPoly) -> BiPoly {
        if self.is_zero() || rhs.is_zero() {
            return BiPoly::zero();
        }
        let mut c = vec![Poly::zero(); self.c.len() + rhs.c.len() - 1];
        for (i, a) in self.c.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.c.iter().enumerate() {
                c[i + j] = &c[i + j] + &(a * b);
            }
        }
        BiPoly::from_vec(c)
    }
}

impl Neg for &BiPoly {
    type Output = BiPoly;
    fn neg(self) -> BiPoly {
        BiPoly::from_vec(self.c.iter().map(|p| -p).collect())
    }
}

/// Reduced quotient of two [`BiPoly`]s. The denominator has leading rational
/// coefficient one, so equal functions have equal representations.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct MultivarRatFun {
    num: BiPoly,
    den: BiPoly,
}

impl MultivarRatFun {
    pub fn new(num: BiPoly, den: BiPoly) -> Self {
        assert!(!den.is_zero(), "zero denominator");
        if num.is_zero() {
            return MultivarRatFun::zero();
        }
        let g = num.gcd(&den);
        let (mut n, mut d) = if g == BiPoly::one() {
            (num, den)
        } else {
            (num.exact_div(&g).expect("gcd divides"), den.exact_div(&g).expect("gcd divides"))
        };
        let lc = d.leading_rational();
        if lc != 1 {
            let inv = Rational::from(1) / lc;
            n = n.scale(&inv);
            d = d.scale(&inv);
        }
        MultivarRatFun { num: n, den: d }
    }

    pub fn zero() -> Self {
        MultivarRatFun { num: BiPoly::zero(), den: BiPoly::one() }
    }

    pub fn one() -> Self {
        MultivarRatFun::from_poly(BiPoly::one())
    }

    pub fn from_poly(p: BiPoly) -> Self {
        MultivarRatFun { num: p, den: BiPoly::one() }
    }

    pub fn constant(q: Rational) -> Self {
        MultivarRatFun::from_poly(BiPoly::constant(q))
    }

    pub fn numer(&self) -> &BiPoly {
        &self.num
    }

    pub fn denom(&self) -> &BiPoly {
        &self.den
    }

    pub fn is_zero(&self) -> bool {
        self.num.is_zero()
    }

    pub fn recip(&self) -> Self {
        MultivarRatFun::new(self.den.clone(), self.num.clone())
    }

    pub fn div(&self, other: &Self) -> Self {
        self * &other.recip()
    }

    pub fn scale_omega(&self, k: &Rational) -> Self {
        MultivarRatFun::new(self.num.scale_omega(k), self.den.scale_omega(k))
    }

    pub fn eval(&self, alpha: &BigComplex, omega: &BigComplex) -> BigComplex {
        self.num.eval(alpha, omega) / self.den.eval(alpha, omega)
    }
}

impl fmt::Display for MultivarRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.den == BiPoly::one() {
            write!(f, "{}", self.num)
        } else {
            write!(f, "({})/({})", self.num, self.den)
        }
    }
}

impl fmt::Debug for MultivarRatFun {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{self}")
    }
}

impl Add<&MultivarRatFun> for &MultivarRatFun {
    type Output = MultivarRatFun;
    fn add(self, rhs: &MultivarRatFun) -> MultivarRatFun {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        if self.den == rhs.den {
            return MultivarRatFun::new(&self.num + &rhs.num, self.den.clone());
        }
        MultivarRatFun::new(&(&self.num * &rhs.den) + &(&rhs.num * &self.den), &self.den * &rhs.den)
    }
}

impl Sub<&MultivarRatFun> for &MultivarRatFun {
    type Output = MultivarRatFun;
    fn sub(self, rhs: &MultivarRatFun) -> MultivarRatFun {
        self + &(-rhs)
    }
}

impl Mul<&MultivarRatFun> for &MultivarRatFun {
    type Output = MultivarRatFun;
    fn mul(self, rhs: &MultivarRatFun) -> MultivarRatFun {
        if self.is_zero() || rhs.is_zero() {
            return MultivarRatFun::zero();
        }
        MultivarRatFun::new(&self.num * &rhs.num, &self.den * &rhs.den)
    }
}

impl Neg for &MultivarRatFun {
    type Output = MultivarRatFun;
    fn neg(self) -> MultivarRatFun {
        MultivarRatFun { num: -&self.num, den: self.den.clone() }
    }
}
