//! Arbitrary-precision constants: π, √3, ln 2, ζ(3), Catalan, γ, the
//! Clausen value Cl₂(π/3), dilogarithm, trigamma, and the I₃⁺ / I₄⁻ closed
//! forms.

use std::sync::Mutex;

use rug::float::Constant;
use rug::ops::Pow;
use rug::{Float, Integer, Rational};
use serde_json::json;

use crate::error::{Error, Result};
use crate::kernel::complex::{bits_for_digits, float_to_fixed, float_to_sci};
use crate::kernel::BigComplex;

/// I₃⁺ to 51 decimals.
pub const I3_PLUS_REFERENCE: &str = "0.000814462565662504439391217128562721997861158118508";

pub const NAMES: [&str; 9] = ["pi", "sqrt3", "log2", "zeta3", "catalan", "euler_gamma", "I3plus", "I4minus", "clausen_pi_over_3"];

fn prec(digits: u32) -> u32 {
    bits_for_digits(digits + 15)
}

fn eps(p: u32) -> Float {
    Float::with_val(p, Float::i_exp(1, -(p as i32)))
}

/// `Σ (−1)^k x^{2k+1}/(2k+1)` for a small rational `1/m`.
fn arctan_recip(m: u64, p: u32) -> Float {
    let m2 = Integer::from(m * m);
    let mut pow = Float::with_val(p, 1) / m;
    let mut sum = Float::with_val(p, &pow);
    let tol = eps(p);
    let mut k = 1u64;
    loop {
        pow /= &m2;
        let term = Float::with_val(p, &pow / (2 * k + 1));
        if term < tol {
            break;
        }
        if k % 2 == 1 {
            sum -= term;
        } else {
            sum += term;
        }
        k += 1;
    }
    sum
}

/// π by Machin's formula.
pub fn pi(digits: u32) -> Float {
    let p = prec(digits);
    let v = arctan_recip(5, p) * 16u32 - arctan_recip(239, p) * 4u32;
    Float::with_val(bits_for_digits(digits), v)
}

/// √3 by Newton iteration on integers.
pub fn sqrt3(digits: u32) -> Float {
    let p = prec(digits);
    let scale = Integer::from(1) << (2 * p);
    let r = (scale * 3u32).sqrt();
    let v = Float::with_val(p, &r) >> p;
    Float::with_val(bits_for_digits(digits), v)
}

/// ln 2 = 2 artanh(1/3).
pub fn log2(digits: u32) -> Float {
    let p = prec(digits);
    let mut pow = Float::with_val(p, 1) / 3u32;
    let mut sum = Float::with_val(p, &pow);
    let tol = eps(p);
    let mut k = 1u64;
    loop {
        pow /= 9u32;
        let term = Float::with_val(p, &pow / (2 * k + 1));
        if term < tol {
            break;
        }
        sum += term;
        k += 1;
    }
    Float::with_val(bits_for_digits(digits), sum * 2u32)
}

/// ζ(3) = (5/2) Σ_{k≥1} (−1)^{k+1} / (k³ C(2k,k)).
pub fn zeta3(digits: u32) -> Float {
    let p = prec(digits);
    let tol = eps(p);
    let mut sum = Float::with_val(p, 0);
    let mut binom = Integer::from(1);
    let mut k = 1u64;
    loop {
        binom = binom * (4 * k - 2) / k;
        let den = Integer::from(k).pow(3) * &binom;
        let term = Float::with_val(p, 1) / Float::with_val(p, &den);
        if term < tol {
            break;
        }
        if k % 2 == 1 {
            sum += term;
        } else {
            sum -= term;
        }
        k += 1;
    }
    Float::with_val(bits_for_digits(digits), sum * 5u32 / 2u32)
}

/// ζ(3) from η(3) with the Borwein acceleration: an independent route.
pub fn zeta3_eta(digits: u32) -> Float {
    let p = prec(digits);
    // error ~ 3/(3+√8)^n
    let n = ((digits as f64 + 15.0) / 5.828f64.log10()).ceil() as u64 + 2;
    let mut d = vec![Integer::new(); n as usize + 1];
    let mut acc = Integer::new();
    let nn = Integer::from(n);
    for i in 0..=n {
        // term n·(n+i−1)!·4^i/((n−i)!(2i)!)
        let mut t = Integer::from(&nn);
        if i > 0 {
            t *= Integer::from(Integer::factorial((n + i - 1) as u32));
        } else {
            t = Integer::from(1);
        }
        let num = t * Integer::from(Integer::u_pow_u(4, i as u32));
        let den = Integer::from(Integer::factorial((n - i) as u32)) * Integer::from(Integer::factorial((2 * i) as u32));
        if i > 0 {
            acc += num / den;
        } else {
            acc += 1;
        }
        d[i as usize] = acc.clone();
    }
    let dn = Float::with_val(p, &d[n as usize]);
    let mut sum = Float::with_val(p, 0);
    for k in 0..n {
        let c = Integer::from(&d[k as usize] - &d[n as usize]);
        let term = Float::with_val(p, &c) / Float::with_val(p, Integer::from(k + 1).pow(3));
        if k % 2 == 0 {
            sum += term;
        } else {
            sum -= term;
        }
    }
    let eta = -sum / dn;
    Float::with_val(bits_for_digits(digits), eta * 4u32 / 3u32)
}

/// Catalan's constant: `G = (π/8) ln(2+√3) + (3/8) Σ (n!)²/((2n)!(2n+1)²)`.
pub fn catalan(digits: u32) -> Float {
    let p = prec(digits);
    let tol = eps(p);
    let mut sum = Float::with_val(p, 0);
    let mut ratio = Rational::from(1);
    let mut n = 0u64;
    loop {
        let term = Float::with_val(p, &ratio) / ((2 * n + 1) * (2 * n + 1));
        if term < tol {
            break;
        }
        sum += term;
        n += 1;
        ratio *= Rational::from((n * n, (2 * n - 1) * (2 * n)));
    }
    let ln = Float::with_val(p, sqrt3(digits + 15) + 2u32).ln();
    let v = pi(digits + 15) / 8u32 * ln + sum * 3u32 / 8u32;
    Float::with_val(bits_for_digits(digits), v)
}

/// Euler's constant by the Brent–McMillan sums.
pub fn euler_gamma(digits: u32) -> Float {
    let p = prec(digits) + 64;
    let n = ((digits as f64 + 15.0) * std::f64::consts::LN_10 / 4.0).ceil() as u64 + 1;
    let kmax = (4.32 * n as f64).ceil() as u64 + 10;
    let ln_n = Float::with_val(p, n).ln();
    let n2 = Float::with_val(p, n * n);
    let mut b = Float::with_val(p, 1);
    let mut a = Float::with_val(p, -&ln_n);
    let mut bsum = b.clone();
    let mut asum = a.clone();
    for k in 1..=kmax {
        let k2 = (k * k) as f64;
        b = Float::with_val(p, &b * &n2) / k2;
        a = (Float::with_val(p, &a * &n2) / k2) + Float::with_val(p, &b / k);
        asum += &a;
        bsum += &b;
    }
    Float::with_val(bits_for_digits(digits), asum / bsum)
}

static BERNOULLI: Mutex<Vec<Rational>> = Mutex::new(Vec::new());

/// Bernoulli numbers `B_0..=B_m` (`B_1 = −1/2`).
pub fn bernoulli(m: usize) -> Vec<Rational> {
    let mut cache = BERNOULLI.lock().unwrap();
    if cache.is_empty() {
        cache.push(Rational::from(1));
    }
    while cache.len() <= m {
        let n = cache.len();
        // Σ_{k=0}^{n} C(n+1,k) B_k = 0
        let mut s = Rational::new();
        let mut c = Integer::from(1);
        for (k, bk) in cache.iter().enumerate() {
            if k > 0 {
                c = c * (n + 2 - k) as u64 / k as u64;
            }
            if *bk != 0 {
                s += Rational::from(&c * bk.numer()) / bk.denom();
            }
        }
        let c_n = Integer::from(n + 1);
        cache.push(-s / c_n);
    }
    cache[..=m].to_vec()
}

/// Clausen function `Cl₂(θ) = Σ sin(kθ)/k²` for real `θ`.
pub fn clausen2(theta: &Float, digits: u32) -> Float {
    let p = prec(digits);
    let two_pi = Float::with_val(p, Constant::Pi) * 2u32;
    let mut t = Float::with_val(p, theta) % &two_pi;
    if t < 0 {
        t += &two_pi;
    }
    if t.is_zero() {
        return Float::with_val(bits_for_digits(digits), 0);
    }
    let pi_f = Float::with_val(p, Constant::Pi);
    if t > pi_f {
        let r = Float::with_val(p, &two_pi - &t);
        return -clausen2(&r, digits);
    }
    if t == pi_f {
        return Float::with_val(bits_for_digits(digits), 0);
    }
    // Cl₂(θ) = θ − θ ln θ + Σ_{k≥1} |B_{2k}| θ^{2k+1} / (2k (2k+1) (2k)!), 0 < θ ≤ π
    let ln = Float::with_val(p, t.ln_ref());
    let mut sum = Float::with_val(p, &t - Float::with_val(p, &t * &ln));
    let t2 = Float::with_val(p, &t * &t);
    let mut pow = t.clone();
    let tol = eps(p);
    let mut fact = Integer::from(1);
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k);
        let b2k = b[2 * k].clone().abs();
        pow *= &t2;
        fact *= (2 * k - 1) as u64;
        fact *= (2 * k) as u64;
        let den = Integer::from(&fact * (2 * k * (2 * k + 1)) as u64);
        let term = Float::with_val(p, &pow * &b2k) / Float::with_val(p, &den);
        if term < tol {
            break;
        }
        sum += term;
        k += 1;
    }
    Float::with_val(bits_for_digits(digits), sum)
}

fn complex_pi_sq_6(digits: u32) -> BigComplex {
    let p = prec(digits);
    let pi = Float::with_val(p, Constant::Pi);
    BigComplex::from_real(&(Float::with_val(p, &pi * &pi) / 6u32), digits)
}

/// Principal dilogarithm `Li₂(z)`, cut `(1, ∞)`.
pub fn dilog(z: &BigComplex, digits: u32) -> Result<BigComplex> {
    if z.im.is_zero() && z.re > 1 {
        return Err(Error::OnBranchCut("z lies on (1, ∞); add a signed imaginary part to pick a side".into()));
    }
    let wd = digits + 15;
    let z = z.with_digits(wd);
    let v = li2(&z, wd);
    Ok(v.with_digits(digits))
}

fn li2(z: &BigComplex, wd: u32) -> BigComplex {
    if z.is_zero() {
        return BigComplex::zero(wd);
    }
    let one = BigComplex::one(wd);
    if z.im.is_zero() && z.re == 1 {
        return complex_pi_sq_6(wd);
    }
    let abs = z.abs_f64();
    if abs > 1.0 {
        let l = (-z).ln();
        let half = Rational::from((1, 2));
        return -complex_pi_sq_6(wd) - (&l * &l).mul_rational(&half) - li2(&z.recip(), wd);
    }
    if z.to_f64_pair().0 > 0.5 {
        let w = &one - z;
        return complex_pi_sq_6(wd) - &z.ln() * &w.ln() - li2(&w, wd);
    }
    let p = bits_for_digits(wd);
    let tol = eps(p);
    if abs <= 0.5 {
        let mut pow = z.clone();
        let mut sum = z.clone();
        let mut k = 2u64;
        loop {
            pow = &pow * z;
            let term = pow.mul_rational(&Rational::from((1, k * k)));
            if term.abs() < tol {
                break;
            }
            sum = sum + term;
            k += 1;
        }
        return sum;
    }
    // Li₂(z) = Σ_{n≥0} B_n u^{n+1}/(n+1)!, u = −ln(1−z), |u| < 2π
    let u = -(&one - z).ln();
    let mut upow = u.clone();
    let mut sum = u.clone();
    let mut fact = Integer::from(1);
    let mut n = 1usize;
    let mut small = 0;
    loop {
        upow = &upow * &u;
        fact *= (n + 1) as u64;
        let b = bernoulli(n);
        let bn = &b[n];
        if *bn != 0 {
            let term = upow.mul_rational(&Rational::from(bn / &fact));
            if term.abs() < tol {
                small += 1;
                if small >= 2 {
                    break;
                }
            } else {
                small = 0;
            }
            sum = sum + term;
        }
        n += 1;
    }
    sum
}

/// Trigamma `Ψ(1, x) = Σ_{k≥0} 1/(x+k)²` for rational `x > 0`.
pub fn trigamma(x: &Rational, digits: u32) -> Result<Float> {
    if *x <= 0 {
        return Err(Error::pre("trigamma needs x > 0"));
    }
    let p = prec(digits);
    let m = (digits as u64 + 20).max(30);
    let mut shift = Float::with_val(p, 0);
    let mut y = x.clone();
    while y < m {
        shift += Float::with_val(p, 1) / Float::with_val(p, Rational::from(&y * &y));
        y += 1;
    }
    // ψ₁(y) ~ 1/y + 1/(2y²) + Σ B_{2k}/y^{2k+1}
    let yf = Float::with_val(p, &y);
    let inv = Float::with_val(p, yf.recip_ref());
    let inv2 = Float::with_val(p, &inv * &inv);
    let mut sum = Float::with_val(p, &inv + Float::with_val(p, &inv2 / 2u32));
    let mut pow = Float::with_val(p, &inv * &inv2);
    let tol = eps(p);
    let mut k = 1usize;
    loop {
        let b = bernoulli(2 * k);
        let term = Float::with_val(p, &pow * &b[2 * k]);
        if term.clone().abs() < tol {
            break;
        }
        sum += term;
        pow *= &inv2;
        k += 1;
        if k > 4 * digits as usize + 100 {
            break;
        }
    }
    Ok(Float::with_val(bits_for_digits(digits), sum + shift))
}

/// I₃⁺ = (π²/3 + 2 − 3√3·Cl₂(π/3)) / (2π²).
pub fn i3_plus(digits: u32) -> Float {
    i3_clausen(digits)
}

fn i3_clausen(digits: u32) -> Float {
    let d = digits + 10;
    let p = prec(d);
    let pi = pi(d + 5);
    let pi = Float::with_val(p, pi);
    let pi2 = Float::with_val(p, &pi * &pi);
    let cl = clausen2(&Float::with_val(p, &pi / 3u32), d);
    let s3 = Float::with_val(p, sqrt3(d));
    let num = Float::with_val(p, &pi2 / 3u32) + 2u32 - s3 * cl * 3u32;
    Float::with_val(bits_for_digits(digits), num / (pi2 * 2u32))
}

/// `1/6 + π⁻² − (3√3/2π²)·Im(dilog(1/2 − i√3/2))` with `dilog(x) = Li₂(1 − x)`.
fn i3_dilog(digits: u32) -> Float {
    let d = digits + 10;
    let p = prec(d);
    let pi = Float::with_val(p, pi(d + 5));
    let pi2 = Float::with_val(p, &pi * &pi);
    let s3 = Float::with_val(p, sqrt3(d));
    let half = Float::with_val(p, 0.5);
    let x = BigComplex::new(half.clone(), -Float::with_val(p, &s3 / 2u32), d);
    let one_minus = &BigComplex::one(d) - &x;
    let li = dilog(&one_minus, d).unwrap();
    let corr = Float::with_val(p, &s3 * 3u32) / (Float::with_val(p, &pi2 * 2u32)) * &li.im;
    let v = Float::with_val(p, 1) / 6u32 + Float::with_val(p, pi2.recip_ref()) - corr;
    Float::with_val(bits_for_digits(digits), v)
}

/// `1/6 + π⁻² + (Ψ₁(2/3) + Ψ₁(5/6) − Ψ₁(1/6) − Ψ₁(1/3)) / (16π²)`.
fn i3_polygamma(digits: u32) -> Float {
    let d = digits + 10;
    let p = prec(d);
    let pi = Float::with_val(p, pi(d + 5));
    let pi2 = Float::with_val(p, &pi * &pi);
    let t = |n: i64, m: i64| trigamma(&Rational::from((n, m)), d).unwrap();
    let s = t(2, 3) + t(5, 6) - t(1, 6) - t(1, 3);
    let v = Float::with_val(p, 1) / 6u32 + Float::with_val(p, pi2.recip_ref()) + s / (pi2 * 16u32);
    Float::with_val(bits_for_digits(digits), v)
}

/// I₄⁻ = (4π²/9 − 1/6 − 7ζ(3)/2) / (16π³).
pub fn i4_minus(digits: u32) -> Float {
    i4_with(digits, zeta3(digits + 10))
}

/// I₄⁻ with ζ(3) from the accelerated η(3) series.
pub fn i4_minus_eta(digits: u32) -> Float {
    i4_with(digits, zeta3_eta(digits + 10))
}

fn i4_with(digits: u32, z3: Float) -> Float {
    let d = digits + 10;
    let p = prec(d);
    let pi = Float::with_val(p, pi(d + 5));
    let pi2 = Float::with_val(p, &pi * &pi);
    let pi3 = Float::with_val(p, &pi2 * &pi);
    let num = Float::with_val(p, &pi2 * 4u32) / 9u32 - Float::with_val(p, 1) / 6u32 - Float::with_val(p, &z3 * 7u32) / 2u32;
    Float::with_val(bits_for_digits(digits), num / (pi3 * 16u32))
}

/// Named constant at `digits` digits.
pub fn eval_constant(name: &str, digits: u32) -> Result<BigComplex> {
    let v = match name {
        "pi" => pi(digits),
        "sqrt3" => sqrt3(digits),
        "log2" => log2(digits),
        "zeta3" => zeta3(digits),
        "catalan" => catalan(digits),
        "euler_gamma" => euler_gamma(digits),
        "I3plus" => i3_plus(digits),
        "I4minus" => i4_minus(digits),
        "clausen_pi_over_3" => {
            let p = prec(digits);
            clausen2(&(Float::with_val(p, pi(digits + 5)) / 3u32), digits)
        }
        _ => return Err(Error::UnknownConstant(name.to_string())),
    };
    Ok(BigComplex::from_real(&v, digits))
}

/// Products and quotients of named constants, e.g. `sqrt3/pi`, `pi*sqrt3`,
/// `1/pi^2`. Atoms are integers or names accepted by [`eval_constant`].
pub fn eval_basis_element(expr: &str, digits: u32) -> Result<BigComplex> {
    let wd = digits + 10;
    let mut acc = BigComplex::one(wd);
    let mut op = '*';
    let mut rest = expr.trim();
    if rest.is_empty() {
        return Err(Error::Parse { position: "0".into(), message: "empty basis element".into() });
    }
    loop {
        let end = rest.find(['*', '/']).unwrap_or(rest.len());
        let atom = rest[..end].trim();
        let (base, exp) = match atom.split_once('^') {
            Some((b, e)) => {
                let e: i64 = e.trim().parse().map_err(|_| Error::Parse { position: atom.into(), message: "bad exponent".into() })?;
                (b.trim(), e)
            }
            None => (atom, 1),
        };
        let v = match base.parse::<i64>() {
            Ok(n) => BigComplex::from_rational(&Rational::from(n), wd),
            Err(_) => eval_constant(base, wd)?,
        };
        let v = v.powi(exp);
        acc = if op == '*' { &acc * &v } else { &acc * &v.recip() };
        if end == rest.len() {
            break;
        }
        op = rest.as_bytes()[end] as char;
        rest = &rest[end + 1..];
    }
    Ok(acc.with_digits(digits))
}

/// Pairwise residuals between the Clausen, dilog and polygamma forms of I₃⁺.
#[derive(Clone, Debug)]
pub struct I3Crosscheck {
    pub digits: u32,
    pub value: Float,
    pub clausen_vs_dilog: Float,
    pub clausen_vs_polygamma: Float,
    pub dilog_vs_polygamma: Float,
    /// Decimals agreeing with [`I3_PLUS_REFERENCE`] (51 printed).
    pub reference_decimals: usize,
}

impl I3Crosscheck {
    pub fn max_residual(&self) -> Float {
        let mut m = self.clausen_vs_dilog.clone();
        for r in [&self.clausen_vs_polygamma, &self.dilog_vs_polygamma] {
            if *r > m {
                m = r.clone();
            }
        }
        m
    }

    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "digits": self.digits,
            "value": float_to_fixed(&self.value, self.digits as usize),
            "residuals": {
                "clausen_vs_dilog": float_to_sci(&self.clausen_vs_dilog, 4),
                "clausen_vs_polygamma": float_to_sci(&self.clausen_vs_polygamma, 4),
                "dilog_vs_polygamma": float_to_sci(&self.dilog_vs_polygamma, 4),
            },
            "barnes_g": "not evaluated",
            "reference_decimals_matched": self.reference_decimals,
            "reference_decimals_printed": 51,
        })
    }
}

/// Leading decimals of `x` agreeing with the printed (truncated) reference.
pub fn reference_match(x: &Float) -> usize {
    let s = float_to_fixed(x, 60);
    let r = I3_PLUS_REFERENCE;
    let (Some(a), Some(b)) = (s.split_once('.'), r.split_once('.')) else {
        return 0;
    };
    if a.0 != b.0 {
        return 0;
    }
    a.1.chars().zip(b.1.chars()).take_while(|(x, y)| x == y).count()
}

pub fn i3_crosscheck(digits: u32) -> Result<I3Crosscheck> {
    if digits < 50 {
        return Err(Error::pre("i3_crosscheck needs at least 50 digits"));
    }
    // residuals at 25 guard digits, so agreement shows as a size rather than 0
    let p = prec(digits + 25);
    let (c, d, g) = (i3_clausen(digits + 25), i3_dilog(digits + 25), i3_polygamma(digits + 25));
    let r = |x: &Float, y: &Float| Float::with_val(p, x - y).abs();
    Ok(I3Crosscheck {
        digits,
        clausen_vs_dilog: r(&c, &d),
        clausen_vs_polygamma: r(&c, &g),
        dilog_vs_polygamma: r(&d, &g),
        reference_decimals: reference_match(&c),
        value: Float::with_val(bits_for_digits(digits), c),
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bernoulli_small() {
        let b = bernoulli(8);
        assert_eq!(b[1], Rational::from((-1, 2)));
        assert_eq!(b[2], Rational::from((1, 6)));
        assert_eq!(b[3], 0);
        assert_eq!(b[8], Rational::from((-1, 30)));
    }

    #[test]
    fn pi_fifty_digits() {
        let s = float_to_fixed(&pi(60), 50);
        assert_eq!(s, "3.14159265358979323846264338327950288419716939937511");
    }
}
