//! Linear ODEs with polynomial coefficients from truncated power series.

use std::fmt::Write as _;
use std::path::Path;

use rug::{Integer, Rational};
use serde_json::json;

use crate::error::{Error, Result};
use crate::fuchsian::FuchsianOde;
use crate::kernel::linalg::rational_nullspace;
use crate::kernel::modular::modular_nullspace;
use crate::kernel::poly::Poly;
use crate::kernel::rational::{fmt_rational, parse_rational};

/// Coefficients `s_0..s_N` of a power series.
#[derive(Clone, Debug, PartialEq)]
pub struct SeriesData {
    pub coeffs: Vec<Rational>,
    pub origin: String,
}

impl SeriesData {
    pub fn new(coeffs: Vec<Rational>, origin: &str) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::pre("a series needs N >= 1"));
        }
        Ok(SeriesData { coeffs, origin: origin.into() })
    }

    /// Highest index N.
    pub fn n(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn scaled(&self, c: &Rational) -> SeriesData {
        SeriesData { coeffs: self.coeffs.iter().map(|x| Rational::from(x * c)).collect(), origin: self.origin.clone() }
    }

    /// One line per coefficient: `k p/q`.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            let _ = writeln!(out, "{k} {}", fmt_rational(c));
        }
        out
    }

    pub fn parse(text: &str, origin: &str) -> Result<Self> {
        let mut coeffs = vec![];
        for (lineno, line) in text.lines().enumerate() {
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let perr = |m: &str| Error::Parse { position: format!("line {}", lineno + 1), message: m.into() };
            let mut it = line.split_whitespace();
            let k: usize = it.next().ok_or_else(|| perr("missing index"))?.parse().map_err(|_| perr("bad index"))?;
            let v = it.next().ok_or_else(|| perr("missing coefficient"))?;
            if it.next().is_some() {
                return Err(perr("trailing text"));
            }
            if k != coeffs.len() {
                return Err(perr(&format!("expected index {}, found {k}", coeffs.len())));
            }
            coeffs.push(parse_rational(v).map_err(|_| perr("bad coefficient"))?);
        }
        SeriesData::new(coeffs, origin)
    }

    pub fn read(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Parse { position: path.display().to_string(), message: e.to_string() })?;
        SeriesData::parse(&text, &path.display().to_string())
    }
}

/// Nullspace route.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Method {
    /// Modular images, CRT, rational reconstruction, exact verification.
    Modular,
    /// Fraction-free elimination over ℚ.
    Exact,
}

/// Number of held-out equations.
pub const HELD_OUT: usize = 10;

#[derive(Clone, Debug)]
pub struct GuessResult {
    pub ode: FuchsianOde,
    pub order: usize,
    pub degree: usize,
    pub unknowns: usize,
    pub fit_equations: usize,
    /// The scan returns the first verified shape; a smaller order may exist
    /// outside the scanned unknown count.
    pub minimal_order_certified: bool,
    pub verified_through: Option<usize>,
}

impl GuessResult {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "order": self.order,
            "degree": self.degree,
            "unknowns": self.unknowns,
            "fit_equations": self.fit_equations,
            "held_out": HELD_OUT,
            "minimal_order_certified": self.minimal_order_certified,
            "verified_through": self.verified_through,
            "ode": self.ode.to_string_pretty(),
            "coefficients": self.ode.coeffs().iter().map(|p| p.coeffs().iter().map(fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

/// `y^{(i)}` coefficients: `s_{m+i}·(m+i)!/m!`.
fn derivative_coeffs(s: &[Rational], i: usize) -> Vec<Rational> {
    if i >= s.len() {
        return vec![];
    }
    (0..s.len() - i)
        .map(|m| {
            let mut f = Integer::from(1);
            for t in (m + 1)..=(m + i) {
                f *= t as u64;
            }
            Rational::from(&s[m + i] * f)
        })
        .collect()
}

/// Coefficient rows `k ∈ rows` of `Σ_i Σ_j c_{ij} w^j y^{(i)}`, unknowns
/// ordered `(i, j)` with `j` fastest.
fn system(derivs: &[Vec<Rational>], r: usize, d: usize, rows: std::ops::Range<usize>) -> Vec<Vec<Rational>> {
    rows.map(|k| {
        let mut row = Vec::with_capacity((r + 1) * (d + 1));
        for dv in derivs.iter().take(r + 1) {
            for j in 0..=d {
                row.push(if k >= j { dv.get(k - j).cloned().unwrap_or_default() } else { Rational::new() });
            }
        }
        row
    })
    .collect()
}

fn nullspace(m: &[Vec<Rational>], method: Method) -> Result<Vec<Vec<Rational>>> {
    match method {
        Method::Modular => modular_nullspace(m, 40),
        Method::Exact => rational_nullspace(m),
    }
}

fn to_ode(v: &[Rational], r: usize, d: usize) -> Option<FuchsianOde> {
    let mut polys: Vec<Poly> = (0..=r).map(|i| Poly::new(v[i * (d + 1)..(i + 1) * (d + 1)].to_vec())).collect();
    while polys.last().is_some_and(|p| p.is_zero()) {
        polys.pop();
    }
    if polys.len() < 2 {
        return None;
    }
    FuchsianOde::new(polys).ok()
}

fn residual_vanishes(m: &[Vec<Rational>], v: &[Rational]) -> bool {
    m.iter().all(|row| row.iter().zip(v).fold(Rational::new(), |acc, (a, b)| acc + Rational::from(a * b)) == 0)
}

/// Candidate shapes `(r, d)` by unknown count `(r+1)(d+1)`, ties by smaller `r`.
pub fn shapes(rmax: usize, dmax: usize) -> Vec<(usize, usize)> {
    let mut v: Vec<(usize, usize)> = (1..=rmax).flat_map(|r| (0..=dmax).map(move |d| (r, d))).collect();
    v.sort_by_key(|&(r, d)| ((r + 1) * (d + 1), r));
    v
}

/// Scans shapes and returns the first with a one-dimensional verified
/// nullspace that also annihilates the held-out coefficients.
pub fn guess_ode_with(s: &SeriesData, rmax: usize, dmax: usize, method: Method) -> Result<Option<GuessResult>> {
    let n = s.n();
    let derivs: Vec<Vec<Rational>> = (0..=rmax).map(|i| derivative_coeffs(&s.coeffs, i)).collect();
    for (r, d) in shapes(rmax, dmax) {
        let unknowns = (r + 1) * (d + 1);
        if n < unknowns + HELD_OUT {
            continue;
        }
        // L(y) is known through w^{N-r}; the last HELD_OUT of those rows are held out
        let valid = n - r + 1;
        if valid <= HELD_OUT {
            continue;
        }
        let fit = valid - HELD_OUT;
        let a = system(&derivs, r, d, 0..fit);
        let held = system(&derivs, r, d, fit..valid);
        let ker = nullspace(&a, method)?;
        match ker.len() {
            0 => continue,
            1 => {
                if !residual_vanishes(&held, &ker[0]) {
                    continue;
                }
                let Some(ode) = to_ode(&ker[0], r, d) else { continue };
                let verified_through = verify_annihilation(&ode, s);
                return Ok(Some(GuessResult {
                    order: ode.order(),
                    degree: d,
                    unknowns,
                    fit_equations: fit,
                    minimal_order_certified: false,
                    verified_through,
                    ode,
                }));
            }
            dim => {
                let full = system(&derivs, r, d, 0..valid);
                match nullspace(&full, method)?.len() {
                    0 => continue,
                    _ => {
                        return Err(Error::NeedMoreTerms(format!(
                            "shape (order {r}, degree {d}) leaves a {dim}-dimensional nullspace that the held-out coefficients do not reduce"
                        )))
                    }
                }
            }
        }
    }
    Ok(None)
}

pub fn guess_ode(s: &SeriesData, rmax: usize, dmax: usize) -> Result<Option<GuessResult>> {
    guess_ode_with(s, rmax, dmax, Method::Modular)
}

/// Largest `M` such that `L` applied to the truncated series vanishes
/// through `w^M` (only coefficients up to `w^{N-r}` are determined).
/// `None` when already the constant term differs.
pub fn verify_annihilation(ode: &FuchsianOde, s: &SeriesData) -> Option<usize> {
    let n = s.n();
    let r = ode.order();
    if n < r {
        return None;
    }
    let top = n - r;
    let out = ode.apply_to_series(&s.coeffs);
    let mut m = None;
    for k in 0..=top {
        if out.get(k).is_some_and(|c| *c != 0) {
            break;
        }
        m = Some(k);
    }
    m
}
