//! Integer relations (PSLQ) and recognition of numeric entries over a
//! declared basis of constants.

use std::fmt;

use rayon::prelude::*;
use rug::{Float, Integer, Rational};
use serde_json::json;

use crate::constants::eval_basis_element;
use crate::error::{Error, Result};
use crate::kernel::complex::{bits_for_digits, ten_pow_neg};
use crate::kernel::linalg::CMatrix;
use crate::kernel::BigComplex;

/// Outcome of a PSLQ run.
#[derive(Clone, Debug)]
pub struct PslqOutcome {
    pub relation: Option<Vec<Integer>>,
    /// Lower bound on the Euclidean norm of any relation not yet found.
    pub norm_bound: Float,
    pub iterations: usize,
}

fn round_to_integer(x: &Float) -> Integer {
    x.clone().round().to_integer().unwrap_or_default()
}

/// PSLQ on real values (at most 12). `digits` sets the detection threshold
/// and the coefficient bound `10^{digits/4}`.
pub fn pslq_detailed(v: &[Float], digits: u32) -> Result<PslqOutcome> {
    if digits < 30 {
        return Err(Error::InsufficientPrecision(format!("pslq needs at least 30 digits, got {digits}")));
    }
    let n = v.len();
    if !(2..=12).contains(&n) {
        return Err(Error::pre("pslq takes between 2 and 12 values"));
    }
    let prec = bits_for_digits(digits + 10);
    let x: Vec<Float> = v.iter().map(|a| Float::with_val(prec, a)).collect();
    let max_coeff = ten_pow_neg(-(digits as i64) / 4, prec);
    let detect = ten_pow_neg((5 * digits as i64) / 8, prec);

    let norm = x.iter().fold(Float::with_val(prec, 0), |acc, a| acc + Float::with_val(prec, a * a)).sqrt();
    if norm.is_zero() {
        return Err(Error::pre("pslq input is the zero vector"));
    }
    for (i, a) in x.iter().enumerate() {
        if Float::with_val(prec, a / &norm).abs() < detect {
            let mut r = vec![Integer::new(); n];
            r[i] = Integer::from(1);
            return Ok(PslqOutcome { relation: Some(r), norm_bound: Float::with_val(prec, 1), iterations: 0 });
        }
    }

    let mut y: Vec<Float> = x.iter().map(|a| Float::with_val(prec, a / &norm)).collect();
    let mut s = vec![Float::with_val(prec, 0); n];
    let mut acc = Float::with_val(prec, 0);
    for k in (0..n).rev() {
        acc += Float::with_val(prec, &y[k] * &y[k]);
        s[k] = Float::with_val(prec, acc.sqrt_ref());
    }
    let mut h = vec![vec![Float::with_val(prec, 0); n - 1]; n];
    for i in 0..n {
        for j in 0..(n - 1).min(i + 1) {
            if i == j {
                h[i][j] = Float::with_val(prec, &s[j + 1] / &s[j]);
            } else {
                let den = Float::with_val(prec, &s[j] * &s[j + 1]);
                h[i][j] = -Float::with_val(prec, &y[i] * &y[j]) / den;
            }
        }
    }
    let mut a: Vec<Vec<Integer>> = (0..n).map(|i| (0..n).map(|j| Integer::from((i == j) as u32)).collect()).collect();
    let mut b = a.clone();

    let reduce = |i: usize, j: usize, h: &mut Vec<Vec<Float>>, y: &mut Vec<Float>, a: &mut Vec<Vec<Integer>>, b: &mut Vec<Vec<Integer>>| {
        if h[j][j].is_zero() {
            return;
        }
        let t = round_to_integer(&Float::with_val(prec, &h[i][j] / &h[j][j]));
        if t == 0 {
            return;
        }
        let tf = Float::with_val(prec, &t);
        let yi = Float::with_val(prec, &y[i] * &tf);
        y[j] += yi;
        for k in 0..=j {
            let d = Float::with_val(prec, &h[j][k] * &tf);
            h[i][k] -= d;
        }
        for k in 0..n {
            let d = Integer::from(&a[j][k] * &t);
            a[i][k] -= d;
            let e = Integer::from(&b[k][i] * &t);
            b[k][j] += e;
        }
    };

    for i in 1..n {
        for j in (0..i.min(n - 1)).rev() {
            reduce(i, j, &mut h, &mut y, &mut a, &mut b);
        }
    }

    let gamma = Float::with_val(prec, 4u32) / 3u32;
    let gamma = gamma.sqrt() + Float::with_val(prec, 0.01);
    let max_iter = 2000 * n * n + digits as usize * 50;
    let mut norm_bound = Float::with_val(prec, 0);
    for iter in 1..=max_iter {
        let mut m = 0;
        let mut best = Float::with_val(prec, 0);
        let mut g = Float::with_val(prec, 1);
        for i in 0..n - 1 {
            g *= &gamma;
            let v = Float::with_val(prec, h[i][i].abs_ref()) * &g;
            if v > best {
                best = v;
                m = i;
            }
        }
        y.swap(m, m + 1);
        a.swap(m, m + 1);
        h.swap(m, m + 1);
        for row in b.iter_mut() {
            row.swap(m, m + 1);
        }
        if m + 2 < n {
            let t0 = Float::with_val(prec, Float::with_val(prec, &h[m][m] * &h[m][m]) + Float::with_val(prec, &h[m][m + 1] * &h[m][m + 1])).sqrt();
            if !t0.is_zero() {
                let t1 = Float::with_val(prec, &h[m][m] / &t0);
                let t2 = Float::with_val(prec, &h[m][m + 1] / &t0);
                for row in h.iter_mut().skip(m) {
                    let t3 = row[m].clone();
                    let t4 = row[m + 1].clone();
                    row[m] = Float::with_val(prec, &t1 * &t3) + Float::with_val(prec, &t2 * &t4);
                    row[m + 1] = Float::with_val(prec, &t1 * &t4) - Float::with_val(prec, &t2 * &t3);
                }
            }
        }
        for i in m + 1..n {
            for j in (0..(i).min(m + 2).min(n - 1)).rev() {
                reduce(i, j, &mut h, &mut y, &mut a, &mut b);
            }
        }

        let mut hmax = Float::with_val(prec, 0);
        for j in 0..n - 1 {
            let v = Float::with_val(prec, h[j][j].abs_ref());
            if v > hmax {
                hmax = v;
            }
        }
        if !hmax.is_zero() {
            norm_bound = Float::with_val(prec, hmax.recip_ref());
        }

        let mut best_j = None;
        let mut ymin = Float::with_val(prec, 1);
        for (j, yj) in y.iter().enumerate() {
            let v = Float::with_val(prec, yj.abs_ref());
            if v < ymin {
                ymin = v;
                best_j = Some(j);
            }
        }
        if ymin < detect {
            let j = best_j.unwrap();
            let mut r: Vec<Integer> = (0..n).map(|i| b[i][j].clone()).collect();
            if r.iter().find(|c| **c != 0).is_some_and(|c| *c < 0) {
                for c in r.iter_mut() {
                    *c = Integer::from(-&*c);
                }
            }
            if r.iter().any(|c| Float::with_val(prec, c).abs() >= max_coeff) {
                return Ok(PslqOutcome { relation: None, norm_bound, iterations: iter });
            }
            return Ok(PslqOutcome { relation: Some(r), norm_bound, iterations: iter });
        }
        if norm_bound > max_coeff {
            return Ok(PslqOutcome { relation: None, norm_bound, iterations: iter });
        }
    }
    Ok(PslqOutcome { relation: None, norm_bound, iterations: max_iter })
}

/// `|Σ aᵢ vᵢ|` evaluated at the precision of the inputs.
pub fn relation_residual(rel: &[Integer], v: &[Float]) -> Float {
    let prec = v.iter().map(|x| x.prec()).max().unwrap_or(64) + 64;
    let mut s = Float::with_val(prec, 0);
    for (c, x) in rel.iter().zip(v) {
        s += Float::with_val(prec, x) * c;
    }
    s.abs()
}

/// Integer relation among `v` with residual below `10^{-P/2}` and
/// coefficients below `10^{P/4}`, re-checked at `P + 20` digits.
pub fn pslq(v: &[Float], digits: u32) -> Result<Option<Vec<Integer>>> {
    let out = pslq_detailed(v, digits)?;
    let Some(rel) = out.relation else { return Ok(None) };
    let prec = bits_for_digits(digits + 20);
    if relation_residual(&rel, v) < ten_pow_neg(digits as i64 / 2, prec) {
        Ok(Some(rel))
    } else {
        Ok(None)
    }
}

/// CLI spellings of common basis elements.
pub fn normalize_basis_name(name: &str) -> String {
    match name.trim() {
        "one" => "1".into(),
        "pi2" | "pi_sq" => "pi^2".into(),
        "inv_pi" | "pi_inv" => "1/pi".into(),
        "inv_pi2" | "inv_pi_sq" => "1/pi^2".into(),
        "sqrt3_over_pi" => "sqrt3/pi".into(),
        "pi_sqrt3" | "sqrt3_pi" => "pi*sqrt3".into(),
        "I3" | "i3plus" => "I3plus".into(),
        other => other.to_string(),
    }
}

/// Named basis with values at `digits + 20` digits.
#[derive(Clone, Debug)]
pub struct ConstantBasis {
    pub names: Vec<String>,
    pub values: Vec<Float>,
    pub digits: u32,
}

impl ConstantBasis {
    /// Evaluates each element and rejects bases with an internal relation.
    pub fn new(names: &[&str], digits: u32) -> Result<Self> {
        let names: Vec<String> = names.iter().map(|n| normalize_basis_name(n)).collect();
        let values = names
            .iter()
            .map(|n| eval_basis_element(n, digits + 20).map(|z| z.re))
            .collect::<Result<Vec<_>>>()?;
        Self::from_values(names, values, digits)
    }

    /// Basis from precomputed values; they should carry `digits + 20` digits.
    pub fn from_values(names: Vec<String>, values: Vec<Float>, digits: u32) -> Result<Self> {
        if names.len() != values.len() || names.is_empty() {
            return Err(Error::pre("basis names and values differ in length"));
        }
        let basis = ConstantBasis { names, values, digits };
        if basis.len() >= 2 {
            if let Some(rel) = verified_relation(&basis.values, digits)? {
                return Err(Error::pre(format!("basis elements are dependent: relation {:?}", rel.iter().map(|c| c.to_string()).collect::<Vec<_>>())));
            }
        }
        Ok(basis)
    }

    pub fn len(&self) -> usize {
        self.names.len()
    }

    pub fn is_empty(&self) -> bool {
        self.names.is_empty()
    }
}

fn digits_of(x: &Float) -> u32 {
    (x.prec() as f64 * std::f64::consts::LOG10_2).floor() as u32
}

/// Hard gate on a PSLQ relation: residual below `10^{-P/2}` and, with the
/// values at their full precision (up to `digits + 20`), at that precision's
/// noise floor.
fn passes_gate(rel: &[Integer], v: &[Float], digits: u32) -> bool {
    let prec = bits_for_digits(digits + 30);
    let r = relation_residual(rel, v);
    if r >= ten_pow_neg(digits as i64 / 2, prec) {
        return false;
    }
    let avail = v.iter().map(digits_of).min().unwrap_or(digits).min(digits + 20);
    let cmax = rel.iter().map(|c| Integer::from(c.abs_ref())).max().unwrap_or_default();
    let floor = ten_pow_neg(avail as i64 - 10, prec) * Float::with_val(prec, cmax + 1) * (v.len() as u32);
    r < floor
}

fn verified_relation(v: &[Float], digits: u32) -> Result<Option<Vec<Integer>>> {
    let out = pslq_detailed(v, digits)?;
    Ok(out.relation.filter(|rel| passes_gate(rel, v, digits)))
}

/// Real-part coefficients and imaginary-part coefficients over a basis.
#[derive(Clone, Debug, PartialEq)]
pub struct Combination {
    pub re: Vec<Rational>,
    pub im: Vec<Rational>,
}

impl Combination {
    pub fn zero(k: usize) -> Self {
        Combination { re: vec![Rational::new(); k], im: vec![Rational::new(); k] }
    }

    pub fn is_zero(&self) -> bool {
        self.re.iter().chain(&self.im).all(|c| *c == 0)
    }

    pub fn eval(&self, basis: &ConstantBasis, digits: u32) -> BigComplex {
        let prec = bits_for_digits(digits + 10);
        let dot = |cs: &[Rational]| {
            cs.iter().zip(&basis.values).fold(Float::with_val(prec, 0), |acc, (c, v)| acc + Float::with_val(prec, v * c))
        };
        BigComplex::new(dot(&self.re), dot(&self.im), digits)
    }

    pub fn render(&self, names: &[String]) -> String {
        let part = |cs: &[Rational]| {
            let terms: Vec<String> = cs
                .iter()
                .zip(names)
                .filter(|(c, _)| **c != 0)
                .map(|(c, n)| if n == "1" { c.to_string() } else { format!("{c}*{n}") })
                .collect();
            if terms.is_empty() {
                None
            } else {
                Some(terms.join(" + ").replace("+ -", "- "))
            }
        };
        match (part(&self.re), part(&self.im)) {
            (None, None) => "0".into(),
            (Some(r), None) => r,
            (None, Some(i)) => format!("I*({i})"),
            (Some(r), Some(i)) => format!("{r} + I*({i})"),
        }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub enum Recognition {
    Resolved(Combination),
    Unresolved { reason: String },
}

impl Recognition {
    pub fn combination(&self) -> Option<&Combination> {
        match self {
            Recognition::Resolved(c) => Some(c),
            Recognition::Unresolved { .. } => None,
        }
    }
}

fn recognize_real(x: &Float, basis: &ConstantBasis, digits: u32) -> std::result::Result<Vec<Rational>, String> {
    let k = basis.len();
    let prec = bits_for_digits(digits + 20);
    if Float::with_val(prec, x.abs_ref()) < ten_pow_neg(digits as i64 - 10, prec) {
        return Ok(vec![Rational::new(); k]);
    }
    let mut v = vec![x.clone()];
    v.extend(basis.values.iter().cloned());
    let out = pslq_detailed(&v, digits).map_err(|e| e.to_string())?;
    let Some(rel) = out.relation else {
        return Err(format!("no relation with coefficients below 10^{}; norm bound {}", digits / 4, crate::kernel::complex::float_to_sci(&out.norm_bound, 4)));
    };
    if !passes_gate(&rel, &v, digits) {
        return Err("relation failed the verification at higher precision".into());
    }
    if rel[0] == 0 {
        return Err("relation does not involve the value".into());
    }
    let den_bound = ten_pow_neg(-(digits as i64) / 8, prec);
    let coeffs: Vec<Rational> = rel[1..].iter().map(|c| -Rational::from((c.clone(), rel[0].clone()))).collect();
    if coeffs.iter().any(|c| Float::with_val(prec, c.denom()) > den_bound) {
        return Err("denominator above 10^(P/8)".into());
    }
    let resid = coeffs.iter().zip(&basis.values).fold(Float::with_val(prec, x), |acc, (c, b)| acc - Float::with_val(prec, b * c));
    if resid.abs() >= ten_pow_neg(digits as i64 / 2, prec) {
        return Err("residual above 10^(-P/2)".into());
    }
    Ok(coeffs)
}

/// Rational coefficients `cᵢ` with `x = Σ cᵢ·basisᵢ`, or unresolved.
pub fn recognize_value(x: &BigComplex, basis: &ConstantBasis, digits: u32) -> Recognition {
    let re = recognize_real(&x.re, basis, digits);
    let im = recognize_real(&x.im, basis, digits);
    match (re, im) {
        (Ok(re), Ok(im)) => Recognition::Resolved(Combination { re, im }),
        (Err(e), _) | (_, Err(e)) => Recognition::Unresolved { reason: e },
    }
}

/// Cellwise recognition.
#[derive(Clone, Debug)]
pub struct RecognizedMatrix {
    pub names: Vec<String>,
    pub cells: Vec<Vec<Recognition>>,
    pub unresolved: Vec<(usize, usize)>,
}

impl RecognizedMatrix {
    pub fn to_json(&self) -> serde_json::Value {
        let cells: Vec<Vec<serde_json::Value>> = self
            .cells
            .iter()
            .map(|r| {
                r.iter()
                    .map(|c| match c {
                        Recognition::Resolved(k) => json!({
                            "expr": k.render(&self.names),
                            "re": k.re.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                            "im": k.im.iter().map(|q| q.to_string()).collect::<Vec<_>>(),
                        }),
                        Recognition::Unresolved { reason } => json!({"unresolved": reason}),
                    })
                    .collect()
            })
            .collect();
        json!({
            "basis": self.names,
            "cells": cells,
            "unresolved": self.unresolved.iter().map(|(i, j)| vec![i + 1, j + 1]).collect::<Vec<_>>(),
        })
    }
}

impl fmt::Display for RecognizedMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.cells {
            let s: Vec<String> = r
                .iter()
                .map(|c| match c {
                    Recognition::Resolved(k) => k.render(&self.names),
                    Recognition::Unresolved { .. } => "?".into(),
                })
                .collect();
            writeln!(f, "[{}]", s.join(", "))?;
        }
        Ok(())
    }
}

pub fn recognize_matrix(m: &CMatrix, basis: &ConstantBasis, digits: u32) -> RecognizedMatrix {
    let cells: Vec<Vec<Recognition>> = m.par_iter().map(|r| r.iter().map(|x| recognize_value(x, basis, digits)).collect()).collect();
    let mut unresolved = vec![];
    for (i, r) in cells.iter().enumerate() {
        for (j, c) in r.iter().enumerate() {
            if c.combination().is_none() {
                unresolved.push((i, j));
            }
        }
    }
    RecognizedMatrix { names: basis.names.clone(), cells, unresolved }
}
