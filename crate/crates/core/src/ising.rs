//! Square-lattice Ising layer: Nickel singularities, the s ↔ w map, the
//! S± normalization factors and χ̃⁽ⁿ⁾ series for n ≤ 3.

use std::collections::BTreeMap;

use rug::{Float, Integer, Rational};
use serde_json::json;

use crate::error::{Error, Result};
use crate::guess::SeriesData;
use crate::kernel::complex::{bits_for_digits, float_to_sci, pi};
use crate::kernel::BigComplex;

/// A Nickel singularity `2(s + 1/s) = u^k + u^{-k} + u^m + u^{-m}`.
#[derive(Clone, Debug)]
pub struct NickelSingularity {
    /// All `(k, m)` producing this `w`.
    pub pairs: Vec<(i64, i64)>,
    /// `σ = s + 1/s = cos(2πk/(2n+1)) + cos(2πm/(2n+1))`.
    pub sigma: Float,
    /// `w = 1/(2σ)`; `None` for `σ = 0` (w = ∞).
    pub w: Option<Float>,
    /// `|s|` of the roots of `s² − σs + 1 = 0`.
    pub s_abs: Float,
}

impl NickelSingularity {
    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        json!({
            "pairs": self.pairs,
            "sigma": float_to_sci(&self.sigma, digits),
            "w": self.w.as_ref().map(|w| float_to_sci(w, digits)).unwrap_or_else(|| "infinity".into()),
            "abs_s": float_to_sci(&self.s_abs, digits),
        })
    }
}

pub fn nickel_singularities(n: u32) -> Result<Vec<NickelSingularity>> {
    nickel_singularities_with_digits(n, 50)
}

pub fn nickel_singularities_with_digits(n: u32, digits: u32) -> Result<Vec<NickelSingularity>> {
    if n < 1 {
        return Err(Error::pre("nickel_singularities needs n >= 1"));
    }
    let prec = bits_for_digits(digits + 10);
    let two_pi = pi(prec) * 2u32;
    let modulus = 2 * n as i64 + 1;
    let cosine = |k: i64| Float::with_val(prec, Float::with_val(prec, &two_pi * k) / modulus).cos();
    let tol = Float::with_val(prec, Float::i_exp(1, -(bits_for_digits(digits) as i32)));
    let mut out: Vec<NickelSingularity> = vec![];
    let ni = n as i64;
    for k in -ni..=ni {
        for m in -ni..=ni {
            if k == 0 && m == 0 {
                continue;
            }
            let sigma = cosine(k) + cosine(m);
            if let Some(e) = out.iter_mut().find(|e| Float::with_val(prec, &e.sigma - &sigma).abs() < tol) {
                e.pairs.push((k, m));
                continue;
            }
            let w = if sigma.clone().abs() < tol { None } else { Some(Float::with_val(prec, sigma.recip_ref()) / 2u32) };
            // |σ| ≤ 2 puts both roots on the unit circle
            let s_abs = s_abs_for_sigma(&sigma, digits);
            out.push(NickelSingularity { pairs: vec![(k, m)], sigma, w, s_abs });
        }
    }
    Ok(out)
}

fn s_abs_for_sigma(sigma: &Float, digits: u32) -> Float {
    let sg = BigComplex::from_real(sigma, digits + 10);
    let disc = (&sg * &sg - BigComplex::from_rational(&Rational::from(4), digits + 10)).sqrt();
    ((&sg + &disc).mul_rational(&Rational::from((1, 2)))).abs()
}

/// `w = s / (2(1 + s²))`.
pub fn w_of_s(s: &BigComplex) -> Result<BigComplex> {
    let d = s.digits();
    let den = &BigComplex::one(d) + &(s * s);
    if den.abs_f64() == 0.0 || den.is_zero() {
        return Err(Error::pre("s = ±i maps to w = infinity"));
    }
    Ok((s * &den.recip()).mul_rational(&Rational::from((1, 2))))
}

/// Exact `w = s / (2(1 + s²))` for rational `s`.
pub fn w_of_s_rational(s: &Rational) -> Rational {
    (s / (Rational::from(s * s) + 1u32)) / 2u32
}

/// Both roots of `2w·s² − s + 2w = 0`.
pub fn s_of_w(w: &BigComplex) -> Result<(BigComplex, BigComplex)> {
    if w.is_zero() {
        return Err(Error::pre("w = 0 has only the root s = 0"));
    }
    let d = w.digits();
    let one = BigComplex::one(d);
    let disc = (&one - &(w * w).mul_rational(&Rational::from(16))).sqrt();
    let den = w.mul_rational(&Rational::from(4)).recip();
    Ok((&(&one + &disc) * &den, &(&one - &disc) * &den))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Parity {
    /// `S₊ = (1 − s⁴)^{1/4}/s`, high temperature.
    Odd,
    /// `S₋ = (1 − s⁻⁴)^{1/4}`, low temperature.
    Even,
}

/// Principal fourth root.
fn fourth_root(z: &BigComplex) -> Result<BigComplex> {
    if z.im.is_zero() && z.re < 0 {
        return Err(Error::OnBranchCut("the fourth-root argument is a negative real; perturb s off the cut to pick a side".into()));
    }
    if z.is_zero() {
        return Ok(z.clone());
    }
    Ok(z.ln().mul_rational(&Rational::from((1, 4))).exp())
}

pub fn normalization_factor(s: &BigComplex, parity: Parity) -> Result<BigComplex> {
    if s.is_zero() {
        return Err(Error::pre("normalization factor needs s != 0"));
    }
    let d = s.digits();
    let one = BigComplex::one(d);
    let s2 = s * s;
    let s4 = &s2 * &s2;
    match parity {
        Parity::Odd => Ok(&fourth_root(&(&one - &s4))? * &s.recip()),
        Parity::Even => fourth_root(&(&one - &s4.recip())),
    }
}

/// Fourier mode over the free angles `φ₁..φ_{n−1}` (at most two).
pub type Mode = [i32; 2];

const SUPPORT_LIMIT: usize = 2_000_000;

/// Power series in `w` whose coefficients are trigonometric polynomials
/// `Σ c_m e^{i m·φ}`, known through `w^valid`.
#[derive(Clone, Debug, PartialEq)]
pub struct TrigSeries {
    pub valid: usize,
    pub terms: Vec<BTreeMap<Mode, Rational>>,
}

impl TrigSeries {
    pub fn zero(valid: usize) -> Self {
        TrigSeries { valid, terms: vec![BTreeMap::new(); valid + 1] }
    }

    pub fn constant(c: Rational, valid: usize) -> Self {
        let mut s = Self::zero(valid);
        if c != 0 {
            s.terms[0].insert([0, 0], c);
        }
        s
    }

    /// `c·w^k·e^{i m·φ}`.
    pub fn monomial(c: Rational, k: usize, m: Mode, valid: usize) -> Self {
        let mut s = Self::zero(valid);
        if k <= valid && c != 0 {
            s.terms[k].insert(m, c);
        }
        s
    }

    pub fn min_order(&self) -> usize {
        self.terms.iter().position(|t| !t.is_empty()).unwrap_or(self.valid + 1)
    }

    pub fn term_count(&self) -> usize {
        self.terms.iter().map(|t| t.len()).sum()
    }

    pub fn truncate(&mut self, valid: usize) {
        if valid < self.valid {
            self.terms.truncate(valid + 1);
            self.valid = valid;
        }
    }

    pub fn add(&self, o: &TrigSeries) -> TrigSeries {
        let valid = self.valid.min(o.valid);
        let mut out = TrigSeries::zero(valid);
        for (k, slot) in out.terms.iter_mut().enumerate() {
            for src in [&self.terms[k], &o.terms[k]] {
                for (m, c) in src {
                    add_to(slot, *m, c.clone());
                }
            }
        }
        out
    }

    pub fn scale(&self, c: &Rational) -> TrigSeries {
        let mut out = self.clone();
        for t in out.terms.iter_mut() {
            for v in t.values_mut() {
                *v *= c;
            }
            t.retain(|_, v| *v != 0);
        }
        out
    }

    pub fn mul(&self, o: &TrigSeries) -> Result<TrigSeries> {
        let valid = (self.valid + o.min_order()).min(o.valid + self.min_order());
        let mut out = TrigSeries::zero(valid);
        for (a, ta) in self.terms.iter().enumerate() {
            if ta.is_empty() || a > valid {
                continue;
            }
            for (b, tb) in o.terms.iter().enumerate().take(valid - a + 1) {
                if tb.is_empty() {
                    continue;
                }
                let slot = &mut out.terms[a + b];
                for (ma, ca) in ta {
                    for (mb, cb) in tb {
                        add_to(slot, [ma[0] + mb[0], ma[1] + mb[1]], Rational::from(ca * cb));
                    }
                }
                if slot.len() > SUPPORT_LIMIT {
                    return Err(Error::pre(format!("Fourier support overflow at w^{}: {} modes", a + b, slot.len())));
                }
            }
        }
        Ok(out)
    }

    /// Constant Fourier coefficient of `self · o` per power of `w`.
    pub fn mul_constant_mode(&self, o: &TrigSeries) -> Vec<Rational> {
        let valid = (self.valid + o.min_order()).min(o.valid + self.min_order());
        let mut out = vec![Rational::new(); valid + 1];
        for (a, ta) in self.terms.iter().enumerate() {
            for (b, tb) in o.terms.iter().enumerate() {
                if a + b > valid {
                    break;
                }
                for (m, ca) in ta {
                    if let Some(cb) = tb.get(&[-m[0], -m[1]]) {
                        out[a + b] += Rational::from(ca * cb);
                    }
                }
            }
        }
        out
    }

    pub fn constant_mode(&self) -> Vec<Rational> {
        self.terms.iter().map(|t| t.get(&[0, 0]).cloned().unwrap_or_default()).collect()
    }

    /// Replaces the single angle θ by `φ_j`: mode `k` goes to `k·e_j`, with
    /// `e_{n} = (−1, …, −1)` for the eliminated angle.
    fn place(&self, j: usize, n: usize) -> TrigSeries {
        let dir: Mode = if j + 1 == n {
            match n {
                2 => [-1, 0],
                _ => [-1, -1],
            }
        } else {
            let mut d = [0, 0];
            d[j] = 1;
            d
        };
        let mut out = TrigSeries::zero(self.valid);
        for (k, t) in self.terms.iter().enumerate() {
            for (m, c) in t {
                add_to(&mut out.terms[k], [m[0] * dir[0], m[0] * dir[1]], c.clone());
            }
        }
        out
    }
}

fn add_to(slot: &mut BTreeMap<Mode, Rational>, m: Mode, c: Rational) {
    use std::collections::btree_map::Entry;
    match slot.entry(m) {
        Entry::Vacant(e) => {
            if c != 0 {
                e.insert(c);
            }
        }
        Entry::Occupied(mut e) => {
            *e.get_mut() += c;
            if *e.get() == 0 {
                e.remove();
            }
        }
    }
}

/// `cos θ` in the single-angle variable.
fn cos_theta(valid: usize) -> TrigSeries {
    let h = Rational::from((1, 2));
    TrigSeries::monomial(h.clone(), 0, [1, 0], valid).add(&TrigSeries::monomial(h, 0, [-1, 0], valid))
}

/// `x̃(θ)` from `x = w(1 + x²) + 2w·cosθ·x`, iterated in the w-adic metric.
pub fn x_tilde(valid: usize) -> Result<TrigSeries> {
    let w = TrigSeries::monomial(Rational::from(1), 1, [0, 0], valid);
    let two_w_cos = cos_theta(valid).mul(&w)?.scale(&Rational::from(2));
    let mut x = TrigSeries::zero(valid);
    for _ in 0..=valid {
        let x2 = x.mul(&x)?;
        let next = w.add(&w.mul(&x2)?).add(&two_w_cos.mul(&x)?);
        x = next;
        x.truncate(valid);
    }
    Ok(x)
}

/// `ỹ(θ) = 2w·(1 + E)^{−1/2}` with `E = −4w cosθ + 4w²(cos²θ − 1)`.
pub fn y_tilde(valid: usize) -> Result<TrigSeries> {
    if valid == 0 {
        return Ok(TrigSeries::zero(0));
    }
    let inner = valid - 1;
    let c = cos_theta(inner);
    let w = TrigSeries::monomial(Rational::from(1), 1, [0, 0], inner);
    let w2 = TrigSeries::monomial(Rational::from(1), 2, [0, 0], inner);
    let c2m1 = c.mul(&c)?.add(&TrigSeries::constant(Rational::from(-1), inner));
    let e = c.mul(&w)?.scale(&Rational::from(-4)).add(&c2m1.mul(&w2)?.scale(&Rational::from(4)));
    let mut sum = TrigSeries::constant(Rational::from(1), inner);
    let mut pow = TrigSeries::constant(Rational::from(1), inner);
    let mut binom = Rational::from(1);
    for k in 1..=inner {
        // binom(−1/2, k)
        binom *= Rational::from((-(2 * k as i64 - 1), 2 * k as i64));
        pow = pow.mul(&e)?;
        pow.truncate(inner);
        sum = sum.add(&pow.scale(&binom));
    }
    let two_w = TrigSeries::monomial(Rational::from(2), 1, [0, 0], valid);
    let mut lifted = TrigSeries::zero(valid);
    for (k, t) in sum.terms.iter().enumerate() {
        lifted.terms[k] = t.clone();
    }
    lifted.valid = inner;
    let mut y = two_w.mul(&lifted)?;
    y.truncate(valid);
    Ok(y)
}

/// `sin²((φ_i − φ_j)/2) = 1/2 − (e^{i(φ_i−φ_j)} + e^{−i(φ_i−φ_j)})/4`.
fn sin2_half_difference(i: usize, j: usize, n: usize, valid: usize) -> TrigSeries {
    let e = |k: usize| -> Mode {
        if k + 1 == n {
            if n == 2 {
                [-1, 0]
            } else {
                [-1, -1]
            }
        } else {
            let mut d = [0, 0];
            d[k] = 1;
            d
        }
    };
    let (a, b) = (e(i), e(j));
    let d = [a[0] - b[0], a[1] - b[1]];
    let q = Rational::from((-1, 4));
    TrigSeries::constant(Rational::from((1, 2)), valid)
        .add(&TrigSeries::monomial(q.clone(), 0, d, valid))
        .add(&TrigSeries::monomial(q, 0, [-d[0], -d[1]], valid))
}

/// Series of χ̃⁽ⁿ⁾(w) through `w^t` (n ∈ {1, 2, 3}).
pub fn chi_tilde_series(n: usize, t: usize) -> Result<SeriesData> {
    match n {
        1 => {
            let mut c = vec![Rational::new()];
            for k in 1..=t {
                c.push(Rational::from(Integer::from(Integer::u_pow_u(4, k as u32 - 1)) * 2u32));
            }
            SeriesData::new(c, "chi_tilde_1")
        }
        2 | 3 => {
            if n == 3 && t > 30 {
                return Err(Error::pre("chi_tilde_series(3) is limited to T <= 30"));
            }
            if n == 2 && t > 120 {
                return Err(Error::pre("chi_tilde_series(2) is limited to T <= 120"));
            }
            if t < 1 {
                return Err(Error::pre("a series needs T >= 1"));
            }
            let c = integrand_constant_mode(n, t)?;
            SeriesData::new(c, &format!("chi_tilde_{n}"))
        }
        _ => Err(Error::pre("chi_tilde_series supports n = 1, 2, 3")),
    }
}

/// Angular average of `∏ỹ_i · R⁽ⁿ⁾ · H⁽ⁿ⁾` through `w^t`, by the same
/// construction for every n (including n = 1, where R⁽¹⁾ is evaluated at φ₁ = 0).
pub fn integrand_constant_mode(n: usize, t: usize) -> Result<Vec<Rational>> {
    if !(1..=3).contains(&n) {
        return Err(Error::pre("n must be 1, 2 or 3"));
    }
    // leading orders: ỹ ~ w, x̃ ~ w; total n + n(n−1) = n²
    let total_min = n * n;
    if t < total_min {
        let mut v = vec![Rational::new(); t + 1];
        v.truncate(t + 1);
        return Ok(v);
    }
    let slack = t - total_min;
    let x1 = x_tilde(slack + 1)?;
    let y1 = y_tilde(slack + 1)?;
    let xs: Vec<TrigSeries> = (0..n).map(|j| if n == 1 { collapse(&x1) } else { x1.place(j, n) }).collect();
    let ys: Vec<TrigSeries> = (0..n).map(|j| if n == 1 { collapse(&y1) } else { y1.place(j, n) }).collect();

    let mut ys_prod = ys[0].clone();
    for y in &ys[1..] {
        ys_prod = ys_prod.mul(y)?;
    }

    // R = 1 + 2 Σ P^k, P = ∏ x̃ (order n)
    let r_valid = slack;
    let mut p = xs[0].clone();
    for x in &xs[1..] {
        p = p.mul(x)?;
    }
    p.truncate(r_valid);
    let mut r = TrigSeries::constant(Rational::from(1), r_valid);
    let mut pk = TrigSeries::constant(Rational::from(1), r_valid);
    for _ in 1..=(r_valid / n) {
        pk = pk.mul(&p)?;
        pk.truncate(r_valid);
        r = r.add(&pk.scale(&Rational::from(2)));
    }

    // H = ∏_{i<j} 4 x_i x_j Σ (k+1)(x_i x_j)^k · sin²((φ_i − φ_j)/2)
    let h_valid = slack + 2;
    let mut h = TrigSeries::constant(Rational::from(1), t);
    for i in 0..n {
        for j in i + 1..n {
            let mut xij = xs[i].mul(&xs[j])?;
            xij.truncate(h_valid);
            let mut geo = TrigSeries::constant(Rational::from(1), h_valid - 2);
            let mut pow = TrigSeries::constant(Rational::from(1), h_valid - 2);
            let mut inner = xij.clone();
            inner.truncate(h_valid - 2);
            for k in 1..=((h_valid - 2) / 2) {
                pow = pow.mul(&inner)?;
                pow.truncate(h_valid - 2);
                geo = geo.add(&pow.scale(&Rational::from(k as i64 + 1)));
            }
            let factor = xij.scale(&Rational::from(4)).mul(&geo)?.mul(&sin2_half_difference(i, j, n, h_valid))?;
            h = h.mul(&factor)?;
        }
    }
    let left = ys_prod.mul(&h)?;
    let mut out = left.mul_constant_mode(&r);
    out.resize(t + 1, Rational::new());
    out.truncate(t + 1);
    Ok(out)
}

/// Evaluates a single-angle series at θ = 0.
fn collapse(s: &TrigSeries) -> TrigSeries {
    let mut out = TrigSeries::zero(s.valid);
    for (k, t) in s.terms.iter().enumerate() {
        let v: Rational = t.values().fold(Rational::new(), |a, c| a + c);
        if v != 0 {
            out.terms[k].insert([0, 0], v);
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn x_tilde_low_orders() {
        // x̃ = w + 2cosθ·w² + …
        let x = x_tilde(3).unwrap();
        assert_eq!(x.terms[1].get(&[0, 0]), Some(&Rational::from(1)));
        assert_eq!(x.terms[2].get(&[1, 0]), Some(&Rational::from(1)));
    }
}
