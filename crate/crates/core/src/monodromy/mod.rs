//! Global monodromy, product relations and the exact fixtures.

pub mod fixtures;
pub mod symbolic;

use rug::Float;
use serde_json::json;

use crate::error::Result;
use crate::frobenius::Basis;
use crate::fuchsian::{indicial_exponents, Exponent, FuchsianOde, Point};
use crate::kernel::complex::{bits_for_digits, pi, ten_pow_neg};
use crate::kernel::linalg::{char_poly, identity, inverse, mat_mul, max_abs_diff, with_digits, CMatrix};
use crate::kernel::BigComplex;
use crate::transport::{connect, path_connect, ConnectionMatrix};

/// A loop around `point`, reached from the base along `waypoints`.
#[derive(Clone, Debug)]
pub struct Route {
    pub point: Point,
    pub waypoints: Vec<BigComplex>,
}

impl Route {
    pub fn direct(point: Point) -> Self {
        Route { point, waypoints: vec![] }
    }
}

/// Monodromy along a counterclockwise loop (Ω = 2πi) around `point`,
/// expressed in the local basis at `base`.
#[derive(Clone, Debug)]
pub struct MonodromyGenerator {
    pub point: Point,
    pub base: Point,
    pub matrix: CMatrix,
    pub exponents: Vec<Exponent>,
    pub digits: u32,
}

impl MonodromyGenerator {
    /// Largest coefficient gap between the characteristic polynomial and
    /// `Π (x − e^{2πiρ})`.
    pub fn eigenvalue_defect(&self) -> Float {
        let d = self.matrix[0][0].digits();
        let prec = bits_for_digits(d + 10);
        let two_pi = pi(prec) * 2u32;
        let mut expect = vec![BigComplex::one(d)];
        for e in &self.exponents {
            let rho = e.to_complex(d);
            let lam = BigComplex::new(Float::with_val(prec, 0), two_pi.clone(), d);
            let lam = (&lam * &rho).exp();
            let mut next = vec![BigComplex::zero(d); expect.len() + 1];
            for (k, c) in expect.iter().enumerate() {
                next[k + 1] = &next[k + 1] + c;
                next[k] = &next[k] - &(c * &lam);
            }
            expect = next;
        }
        let got = char_poly(&self.matrix);
        let mut worst = Float::with_val(prec, 0);
        for (a, b) in got.iter().zip(&expect) {
            let v = (a - b).abs();
            if v > worst {
                worst = v;
            }
        }
        worst
    }

    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        json!({
            "point": self.point.label(),
            "base": self.base.label(),
            "exponents": self.exponents.iter().map(|e| e.label()).collect::<Vec<_>>(),
            "digits": self.digits,
            "entries": self.matrix.iter().map(|r| r.iter().map(|z| {
                let (re, im) = z.to_decimal_strings(digits);
                vec![re, im]
            }).collect::<Vec<_>>()).collect::<Vec<_>>(),
        })
    }
}

fn same_point(a: &Point, b: &Point) -> bool {
    a.label() == b.label()
}

fn connection(ode: &FuchsianOde, base: &Point, route: &Route, digits: u32) -> Result<ConnectionMatrix> {
    if route.waypoints.is_empty() && !base.is_infinity() && !route.point.is_infinity() {
        match connect(ode, base, &route.point, digits) {
            Err(crate::Error::NoOverlap(_)) => {}
            other => return other,
        }
        // no overlap: walk along the straight segment
    }
    path_connect(ode, base, &route.point, &route.waypoints, digits)
}

/// `M(q) = C(b,q)·Loc_q·C(b,q)^{-1}` for every route, with all connection
/// matrices referred to the base basis on the departure ray of the first
/// route.
pub fn monodromy_generators(ode: &FuchsianOde, base: &Point, routes: &[Route], digits: u32) -> Result<Vec<MonodromyGenerator>> {
    let wd = digits + 20;
    let base_basis = crate::frobenius::local_basis_with_digits(ode, base, 10, wd)?;
    let mut reference: Option<BigComplex> = None;
    let mut out = vec![];
    for route in routes {
        let exps = indicial_exponents(ode, &route.point)?;
        if same_point(base, &route.point) {
            let loc = base_basis.local_monodromy_numeric(wd);
            out.push(MonodromyGenerator { point: route.point.clone(), base: base.clone(), matrix: with_digits(&loc, digits), exponents: exps, digits });
            continue;
        }
        let c = connection(ode, base, route, wd)?;
        let target: Basis = crate::frobenius::local_basis_with_digits(ode, &route.point, 10, wd)?;
        let loc = target.local_monodromy_numeric(wd);
        let dref = reference.get_or_insert_with(|| c.from_direction.clone()).clone();
        // B_b^{d_q} = S·B_b^{ref}, so C expressed from the reference basis is S^{-1}·C
        let s = base_basis.branch_change(&c.from_direction, &dref, wd);
        let cref = mat_mul(&inverse(&s)?, &c.entries);
        let m = mat_mul(&mat_mul(&cref, &loc), &inverse(&cref)?);
        out.push(MonodromyGenerator {
            point: route.point.clone(),
            base: base.clone(),
            matrix: with_digits(&m, digits),
            exponents: exps,
            digits: c.digits.min(digits),
        });
    }
    Ok(out)
}

/// Residuals of the product relation.
#[derive(Clone, Debug)]
pub struct ProductRelation {
    /// `‖M_1⋯M_k − Id‖_max` in the given order.
    pub residual: Float,
    /// Cyclic shift (start index) with the smallest residual.
    pub best_shift: usize,
    pub best_residual: Float,
    /// Residual above the tolerance in every cyclic shift.
    pub flagged: bool,
}

impl ProductRelation {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "residual": crate::kernel::complex::float_to_sci(&self.residual, 6),
            "best_shift": self.best_shift,
            "best_residual": crate::kernel::complex::float_to_sci(&self.best_residual, 6),
            "flagged": self.flagged,
        })
    }
}

fn product(ms: &[&CMatrix]) -> CMatrix {
    let mut acc = ms[0].clone();
    for m in &ms[1..] {
        acc = mat_mul(&acc, m);
    }
    acc
}

/// Checks `M_1·M_2⋯M_k = Id` on numeric matrices, over all cyclic shifts.
/// Flags when no shift reaches `10^{-(digits-20)}`.
pub fn product_relation(gens: &[MonodromyGenerator], digits: u32) -> ProductRelation {
    let k = gens.len();
    let n = gens[0].matrix.len();
    let d = gens[0].matrix[0][0].digits();
    let id = identity(n, d);
    let mut best = (0, None::<Float>);
    let mut first = None;
    for s in 0..k {
        let ms: Vec<&CMatrix> = (0..k).map(|i| &gens[(s + i) % k].matrix).collect();
        let r = max_abs_diff(&product(&ms), &id);
        if s == 0 {
            first = Some(r.clone());
        }
        if best.1.as_ref().is_none_or(|b| r < *b) {
            best = (s, Some(r));
        }
    }
    let best_residual = best.1.unwrap();
    let tol = ten_pow_neg(digits as i64 - 20, best_residual.prec());
    ProductRelation { residual: first.unwrap(), best_shift: best.0, flagged: best_residual >= tol, best_residual }
}
