//! Multiprecision complex numbers carrying their own working precision.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};

const LOG2_10: f64 = std::f64::consts::LOG2_10;

/// Binary precision used to hold `digits` decimal digits plus a small guard.
pub fn bits_for_digits(digits: u32) -> u32 {
    (digits as f64 * LOG2_10).ceil() as u32 + 16
}

/// `10^(-digits)` as a float at the given binary precision.
pub fn ten_pow_neg(digits: i64, prec: u32) -> Float {
    let ten = Float::with_val(prec, 10);
    ten.pow(-digits)
}

pub fn pi(prec: u32) -> Float {
    Float::with_val(prec, Constant::Pi)
}

/// Decimal digits of agreement implied by an absolute error (capped at `cap`).
pub fn digits_from_error(err: &Float, cap: u32) -> u32 {
    if err.is_zero() {
        return cap;
    }
    let lg = -err.to_f64().log10();
    if !lg.is_finite() {
        // underflowed f64; fall back to the exponent
        let e = err.get_exp().unwrap_or(0) as f64 * std::f64::consts::LOG10_2;
        return (-e).clamp(0.0, cap as f64) as u32;
    }
    lg.clamp(0.0, cap as f64) as u32
}

/// A complex number `re + i·im` with both parts at `precision_digits` decimal digits.
#[derive(Clone, PartialEq)]
pub struct BigComplex {
    pub re: Float,
    pub im: Float,
    digits: u32,
}

impl BigComplex {
    pub fn new(re: Float, im: Float, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
            digits,
        }
    }

    pub fn zero(digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::new(prec),
            im: Float::new(prec),
            digits,
        }
    }

    pub fn one(digits: u32) -> Self {
        Self::from_rational(&Rational::from(1), digits)
    }

    pub fn i(digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::new(prec),
            im: Float::with_val(prec, 1),
            digits,
        }
    }

    pub fn from_rational(q: &Rational, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::with_val(prec, q),
            im: Float::new(prec),
            digits,
        }
    }

    pub fn from_rationals(re: &Rational, im: &Rational, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
            digits,
        }
    }

    pub fn from_real(x: &Float, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::with_val(prec, x),
            im: Float::new(prec),
            digits,
        }
    }

    pub fn from_f64(re: f64, im: f64, digits: u32) -> Self {
        let prec = bits_for_digits(digits);
        BigComplex {
            re: Float::with_val(prec, re),
            im: Float::with_val(prec, im),
            digits,
        }
    }

    pub fn digits(&self) -> u32 {
        self.digits
    }

    pub fn prec(&self) -> u32 {
        bits_for_digits(self.digits)
    }

    /// Same value re-rounded (or padded) to a different working precision.
    pub fn with_digits(&self, digits: u32) -> Self {
        BigComplex::new(self.re.clone(), self.im.clone(), digits)
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn is_real(&self) -> bool {
        self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        BigComplex {
            re: self.re.clone(),
            im: Float::with_val(self.prec(), -&self.im),
            digits: self.digits,
        }
    }

    pub fn norm_sqr(&self) -> Float {
        let p = self.prec();
        Float::with_val(p, self.re.square_ref()) + Float::with_val(p, self.im.square_ref())
    }

    pub fn abs(&self) -> Float {
        Float::with_val(self.prec(), self.re.hypot_ref(&self.im))
    }

    /// Principal argument in (-π, π].
    pub fn arg(&self) -> Float {
        Float::with_val(self.prec(), self.im.atan2_ref(&self.re))
    }

    pub fn to_f64_pair(&self) -> (f64, f64) {
        (self.re.to_f64(), self.im.to_f64())
    }

    pub fn abs_f64(&self) -> f64 {
        self.abs().to_f64()
    }

    pub fn scale(&self, x: &Float) -> Self {
        let p = self.prec().max(x.prec());
        BigComplex {
            re: Float::with_val(p, &self.re * x),
            im: Float::with_val(p, &self.im * x),
            digits: self.digits,
        }
    }

    pub fn mul_rational(&self, q: &Rational) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re * q),
            im: Float::with_val(p, &self.im * q),
            digits: self.digits,
        }
    }

    pub fn mul_i(&self) -> Self {
        BigComplex {
            re: Float::with_val(self.prec(), -&self.im),
            im: Float::with_val(self.prec(), &self.re),
            digits: self.digits,
        }
    }

    pub fn recip(&self) -> Self {
        let n = self.norm_sqr();
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, &self.re / &n),
            im: Float::with_val(p, -(Float::with_val(p, &self.im / &n))),
            digits: self.digits,
        }
    }

    pub fn exp(&self) -> Self {
        let p = self.prec();
        let m = Float::with_val(p, self.re.exp_ref());
        let (s, c) = Float::with_val(p, &self.im).sin_cos(Float::new(p));
        BigComplex {
            re: Float::with_val(p, &m * &c),
            im: Float::with_val(p, &m * &s),
            digits: self.digits,
        }
    }

    /// Principal logarithm, imaginary part in (-π, π].
    pub fn ln(&self) -> Self {
        let p = self.prec();
        BigComplex {
            re: Float::with_val(p, self.abs().ln_ref()),
            im: self.arg(),
            digits: self.digits,
        }
    }

    /// Principal square root.
    pub fn sqrt(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        let p = self.prec();
        let r = self.abs();
        // sqrt((r + |re|)/2) is cancellation-free
        let t = (Float::with_val(p, &r + &Float::with_val(p, self.re.abs_ref())) / 2u32).sqrt();
        let half_im = Float::with_val(p, &self.im / 2u32);
        if self.re >= 0 {
            let im = Float::with_val(p, &half_im / &t);
            BigComplex { re: t, im, digits: self.digits }
        } else {
            let re = Float::with_val(p, &half_im / &t).abs();
            let im = if self.im >= 0 { t } else { -t };
            BigComplex { re, im, digits: self.digits }
        }
    }

    /// `exp(w · ln z)` with the principal logarithm.
    pub fn pow(&self, w: &BigComplex) -> Self {
        if self.is_zero() {
            return BigComplex::zero(self.digits);
        }
        (w * &self.ln()).exp()
    }

    pub fn powi(&self, n: i64) -> Self {
        if n < 0 {
            return self.recip().powi(-n);
        }
        let mut result = BigComplex::one(self.digits);
        let mut base = self.clone();
        let mut e = n as u64;
        while e > 0 {
            if e & 1 == 1 {
                result = &result * &base;
            }
            base = &base * &base;
            e >>= 1;
        }
        result
    }

    /// `max(|re|, |im|)`, a cheap norm.
    pub fn max_abs(&self) -> Float {
        let a = Float::with_val(self.prec(), self.re.abs_ref());
        let b = Float::with_val(self.prec(), self.im.abs_ref());
        if a > b {
            a
        } else {
            b
        }
    }

    /// Scientific decimal strings of both parts with `digits` significant digits.
    pub fn to_decimal_strings(&self, digits: usize) -> (String, String) {
        (float_to_sci(&self.re, digits), float_to_sci(&self.im, digits))
    }

    pub fn parse(re: &str, im: &str, digits: u32) -> Option<Self> {
        let p = bits_for_digits(digits);
        let re = Float::parse(re).ok()?;
        let im = Float::parse(im).ok()?;
        Some(BigComplex {
            re: Float::with_val(p, re),
            im: Float::with_val(p, im),
            digits,
        })
    }
}

/// Scientific notation `d.ddd…e±x` with `digits` significant digits.
pub fn float_to_sci(x: &Float, digits: usize) -> String {
    if x.is_zero() {
        return "0".to_string();
    }
    x.to_string_radix(10, Some(digits.max(1)))
}

/// Fixed-point notation with `decimals` digits after the point, rounded to nearest.
pub fn float_to_fixed(x: &Float, decimals: usize) -> String {
    let prec = x.prec().max(bits_for_digits(decimals as u32 + 10));
    let scale = Float::with_val(prec, Integer::from(10).pow(decimals as u32));
    let scaled = Float::with_val(prec, x * &scale);
    let rounded = scaled.round();
    let n = rounded.to_integer().unwrap_or_default();
    let neg = n < 0;
    let mut s = n.abs().to_string();
    if s.len() <= decimals {
        s = "0".repeat(decimals + 1 - s.len()) + &s;
    }
    let (int_part, frac_part) = s.split_at(s.len() - decimals);
    let mut out = String::new();
    if neg {
        out.push('-');
    }
    out.push_str(int_part);
    if decimals > 0 {
        out.push('.');
        out.push_str(frac_part);
    }
    out
}

impl fmt::Debug for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self)
    }
}

impl fmt::Display for BigComplex {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let d = (self.digits as usize).min(40);
        let (re, im) = self.to_decimal_strings(d);
        if self.im.is_zero() {
            write!(f, "{re}")
        } else {
            write!(f, "{re} + {im}i")
        }
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident, $body:expr) => {
        impl $tr<&BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                let f: fn(&BigComplex, &BigComplex) -> BigComplex = $body;
                f(self, rhs)
            }
        }
        impl $tr<BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                (&self).$m(&rhs)
            }
        }
        impl $tr<&BigComplex> for BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: &BigComplex) -> BigComplex {
                (&self).$m(rhs)
            }
        }
        impl $tr<BigComplex> for &BigComplex {
            type Output = BigComplex;
            fn $m(self, rhs: BigComplex) -> BigComplex {
                self.$m(&rhs)
            }
        }
    };
}

binop!(Add, add, |a, b| {
    let d = a.digits.max(b.digits);
    let p = bits_for_digits(d);
    BigComplex {
        re: Float::with_val(p, &a.re + &b.re),
        im: Float::with_val(p, &a.im + &b.im),
        digits: d,
    }
});

binop!(Sub, sub, |a, b| {
    let d = a.digits.max(b.digits);
    let p = bits_for_digits(d);
    BigComplex {
        re: Float::with_val(p, &a.re - &b.re),
        im: Float::with_val(p, &a.im - &b.im),
        digits: d,
    }
});

binop!(Mul, mul, |a, b| {
    let d = a.digits.max(b.digits);
    let p = bits_for_digits(d);
    let ac = Float::with_val(p, &a.re * &b.re);
    let bd = Float::with_val(p, &a.im * &b.im);
    let ad = Float::with_val(p, &a.re * &b.im);
    let bc = Float::with_val(p, &a.im * &b.re);
    BigComplex {
        re: ac - bd,
        im: ad + bc,
        digits: d,
    }
});

binop!(Div, div, |a, b| {
    let d = a.digits.max(b.digits);
    let inv = b.with_digits(d).recip();
    a.with_digits(d) * inv
});

impl Neg for &BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        BigComplex {
            re: Float::with_val(self.prec(), -&self.re),
            im: Float::with_val(self.prec(), -&self.im),
            digits: self.digits,
        }
    }
}

impl Neg for BigComplex {
    type Output = BigComplex;
    fn neg(self) -> BigComplex {
        -&self
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn exp_ln_roundtrip() {
        let z = BigComplex::from_f64(-0.75, 1.25, 60);
        let back = z.ln().exp();
        assert!((&back - &z).abs() < ten_pow_neg(55, 256));
    }

    #[test]
    fn sqrt_branches() {
        let z = BigComplex::from_f64(-4.0, 0.0, 40);
        let r = z.sqrt();
        assert!(r.re.is_zero() || r.re.to_f64().abs() < 1e-30);
        assert!((r.im.to_f64() - 2.0).abs() < 1e-30);
        let w = BigComplex::from_f64(-3.0, -4.0, 40);
        let s = w.sqrt();
        assert!((&(&s * &s) - &w).abs() < ten_pow_neg(35, 200));
        assert!(s.re > 0);
    }

    #[test]
    fn fixed_formatting_rounds() {
        let x = Float::with_val(200, Float::parse("0.0008144625656625044393912171285627219978611581185083").unwrap());
        assert_eq!(
            float_to_fixed(&x, 51),
            "0.000814462565662504439391217128562721997861158118508"
        );
        let y = Float::with_val(64, -1.5);
        assert_eq!(float_to_fixed(&y, 2), "-1.50");
    }

    #[test]
    fn division_inverts_multiplication() {
        let a = BigComplex::from_f64(1.5, -2.0, 50);
        let b = BigComplex::from_f64(0.25, 3.0, 50);
        let q = &(&a * &b) / &b;
        assert!((&q - &a).abs() < ten_pow_neg(45, 256));
    }
}
