//! Local Frobenius bases, their evaluation, and local monodromy.
//!
//! Branch convention: a basis evaluated at local coordinate `t` toward the
//! unit direction `d` uses `u = t/d` and `ℓ = Log u`, so the ray through `d`
//! carries argument zero. Powers split as `t^ρ = t^n·u^f` with `n` the integer
//! nearest to `Re ρ` and `f = ρ − n`, `Re f ∈ (−1/2, 1/2]`; integer powers are
//! therefore the single-valued ones.

pub mod engine;
pub mod scalar;

use rug::{Float, Rational};
use serde_json::json;

pub use engine::LocalSolution;
use engine::{build, eval_solution, shift_coordinates, ClassSpec, LocalForm};
use scalar::Scalar;

use crate::error::{Error, Result};
use crate::fuchsian::{
    candidate_apparent, indicial_exponents, theta_form_numeric, theta_form_rational, Exponent, FuchsianOde, Point,
};
use crate::kernel::linalg::CMatrix;
use crate::kernel::rational::fmt_rational;
use crate::kernel::{BigComplex, Poly};
use crate::monodromy::symbolic::SymbolicMatrix;

/// Largest truncation order tried when chasing a precision target.
pub const MAX_TRUNCATION: usize = 6000;

/// Working digits of numeric bases built without an explicit precision.
pub const DEFAULT_DIGITS: u32 = 60;

#[derive(Clone, Debug)]
pub struct LocalBasis<S> {
    pub point: Point,
    pub order: usize,
    pub truncation: usize,
    pub solutions: Vec<LocalSolution<S>>,
    /// Radius of convergence in the local coordinate (∞ if unbounded).
    pub radius: f64,
    pub digits: u32,
    form: LocalForm<S>,
    classes: Vec<ClassSpec<S>>,
    shift: Vec<Vec<Vec<S>>>,
    ode: FuchsianOde,
}

/// Result of evaluating a basis: row `i` holds `y_i, y_i′, …`.
#[derive(Clone, Debug)]
pub struct Evaluation {
    pub values: CMatrix,
    /// log10 of the estimated truncation tail.
    pub tail_log10: f64,
    pub truncation: usize,
}

impl<S: Scalar> LocalBasis<S> {
    fn new(point: Point, ode: &FuchsianOde, form: LocalForm<S>, classes: Vec<ClassSpec<S>>, t: usize, radius: f64, digits: u32) -> Self {
        let solutions = build(&form, &classes, t);
        let shift = shift_coordinates(&solutions);
        LocalBasis { point, order: form.order, truncation: t, solutions, radius, digits, form, classes, shift, ode: ode.clone() }
    }

    pub fn with_truncation(&self, t: usize) -> Self {
        LocalBasis::new(self.point.clone(), &self.ode, self.form.clone(), self.classes.clone(), t, self.radius, self.digits)
    }

    pub fn exponents(&self) -> Vec<Exponent> {
        self.solutions.iter().map(|s| s.exponent.clone()).collect()
    }

    pub fn log_degrees(&self) -> Vec<usize> {
        self.solutions.iter().map(|s| s.log_degree).collect()
    }

    pub fn ode(&self) -> &FuchsianOde {
        &self.ode
    }

    /// Largest integer gap between exponents in one class.
    pub fn max_gap(&self) -> usize {
        self.classes.iter().map(|c| c.max_gap()).max().unwrap_or(0)
    }

    /// Evaluates values and `nder` derivatives at local coordinate `t`,
    /// truncated at the current order.
    pub fn evaluate_fixed(&self, t: &BigComplex, nder: usize, digits: u32, direction: Option<&BigComplex>) -> Result<Evaluation> {
        if t.is_zero() {
            return Err(Error::pre("cannot evaluate a local basis at its own centre"));
        }
        let wd = digits + 20;
        let t = t.with_digits(wd);
        let dir = match direction {
            Some(d) => d.with_digits(wd),
            None => unit(&t),
        };
        let u = &t / &dir;
        let ell = u.ln();
        let mut rows = vec![];
        let mut tail = f64::NEG_INFINITY;
        for s in &self.solutions {
            let rho = s.rho.to_complex(wd);
            let (n, f) = split_exponent(&rho);
            let e = &(&f * &ell).exp() * &t.powi(n);
            let (vals, tl) = eval_solution(s, &t, &ell, &e, nder, wd);
            tail = tail.max(tl);
            rows.push(vals.into_iter().map(|z| z.with_digits(digits)).collect());
        }
        Ok(Evaluation { values: rows, tail_log10: tail, truncation: self.truncation })
    }

    /// Truncation order predicted for `digits` digits at `|t|`.
    pub fn required_truncation(&self, abs_t: f64, digits: u32) -> Result<usize> {
        let ratio = abs_t / self.radius;
        if !(ratio < 1.0) {
            return Err(Error::PrecisionUnreachable(format!(
                "|t| = {abs_t:.4e} is outside the disk of radius {:.4e}",
                self.radius
            )));
        }
        if ratio <= 0.0 {
            return Ok(self.max_gap() + 10);
        }
        let t = ((digits as f64 + 25.0) * std::f64::consts::LN_10 / (-ratio.ln())).ceil() as usize + 10;
        Ok(t.max(self.max_gap() + 10))
    }

    /// Evaluation with automatic truncation: the order is raised by half
    /// until the tail estimate drops below `10^{-digits}`.
    pub fn evaluate_local(&self, t: &BigComplex, nder: usize, digits: u32, direction: Option<&BigComplex>) -> Result<Evaluation> {
        let mut order = self.required_truncation(t.abs_f64(), digits)?;
        loop {
            if order > MAX_TRUNCATION {
                return Err(Error::PrecisionUnreachable(format!(
                    "tail above 1e-{digits} at the maximal truncation {MAX_TRUNCATION}"
                )));
            }
            let ev = if order <= self.truncation {
                self.evaluate_fixed(t, nder, digits, direction)?
            } else {
                self.with_truncation(order).evaluate_fixed(t, nder, digits, direction)?
            };
            if ev.tail_log10 < -(digits as f64) {
                return Ok(ev);
            }
            order = order * 3 / 2 + 1;
        }
    }

    /// `S(c)_{il} = e^{f_i c} Σ_m c^m λ^{(m)}_{il}`: the basis after
    /// `ℓ ↦ ℓ + c`, expressed in itself.
    pub fn log_shift_matrix(&self, c: &BigComplex, digits: u32) -> CMatrix {
        let n = self.solutions.len();
        let wd = digits + 10;
        let c = c.with_digits(wd);
        let mut cpow = vec![BigComplex::one(wd)];
        for m in 1..self.shift.len() {
            cpow.push(&cpow[m - 1] * &c);
        }
        let mut out = vec![vec![BigComplex::zero(digits); n]; n];
        for i in 0..n {
            let si = &self.solutions[i];
            let (_, f) = split_exponent(&si.rho.to_complex(wd));
            let phase = (&f * &c).exp();
            for l in 0..n {
                let mut acc = BigComplex::zero(wd);
                for (m, lam) in self.shift.iter().enumerate() {
                    if !lam[i][l].is_zero() {
                        acc = acc + &cpow[m] * &lam[i][l].to_complex(wd);
                    }
                }
                if acc.is_zero() {
                    continue;
                }
                out[i][l] = (&acc * &phase).with_digits(digits);
            }
        }
        out
    }

    /// Numeric local monodromy: one counterclockwise loop, `Ω = 2πi`.
    pub fn local_monodromy_numeric(&self, digits: u32) -> CMatrix {
        let two_pi_i = BigComplex::new(Float::with_val(64, 0), crate::kernel::complex::pi(crate::kernel::complex::bits_for_digits(digits + 10)) * 2u32, digits + 10);
        self.log_shift_matrix(&two_pi_i, digits)
    }

    /// Change of branch: the basis toward `from` expressed in the basis
    /// toward `to`, for points near the `to` ray.
    pub fn branch_change(&self, from: &BigComplex, to: &BigComplex, digits: u32) -> CMatrix {
        let wd = digits + 10;
        let theta = (&to.with_digits(wd) / &from.with_digits(wd)).arg();
        let c = BigComplex::new(Float::with_val(theta.prec(), 0), theta, wd);
        self.log_shift_matrix(&c, digits)
    }
}

/// `ρ = n + f` with `n` the integer nearest to `Re ρ` and `Re f ∈ (−1/2, 1/2]`.
pub fn split_exponent(rho: &BigComplex) -> (i64, BigComplex) {
    let half = Float::with_val(rho.prec(), 0.5);
    let n = Float::with_val(rho.prec(), &rho.re - &half).ceil();
    let n = n.to_f64() as i64;
    let f = rho - &BigComplex::from_rational(&Rational::from(n), rho.digits());
    (n, f)
}

fn unit(z: &BigComplex) -> BigComplex {
    let r = z.abs();
    z.scale(&r.recip())
}

impl LocalBasis<Rational> {
    /// Exact local monodromy `Loc(Ω) = D·U(Ω)`.
    pub fn symbolic_local_monodromy(&self) -> SymbolicLoc {
        let n = self.solutions.len();
        let phases = self
            .solutions
            .iter()
            .map(|s| {
                let r = &s.rho;
                r - Rational::from(r.floor_ref())
            })
            .collect();
        let unipotent = (0..n)
            .map(|i| (0..n).map(|l| Poly::new(self.shift.iter().map(|lam| lam[i][l].clone()).collect())).collect())
            .collect();
        SymbolicLoc { phases, unipotent }
    }
}

/// Local monodromy with a root-of-unity diagonal part and a unipotent part
/// polynomial in Ω.
#[derive(Clone, Debug, PartialEq)]
pub struct SymbolicLoc {
    /// `ρ_i mod 1`; the diagonal entry is `exp(2πi·phase)`.
    pub phases: Vec<Rational>,
    /// `U(Ω)` entries as polynomials in Ω.
    pub unipotent: Vec<Vec<Poly>>,
}

impl SymbolicLoc {
    /// Numeric `D·U(Ω)`.
    pub fn eval(&self, omega: &BigComplex) -> CMatrix {
        let digits = omega.digits();
        let pi2 = crate::kernel::complex::pi(crate::kernel::complex::bits_for_digits(digits)) * 2u32;
        self.unipotent
            .iter()
            .zip(&self.phases)
            .map(|(row, ph)| {
                let ang = Float::with_val(pi2.prec(), &pi2 * ph);
                let d = BigComplex::new(Float::with_val(ang.prec(), 0), ang, digits).exp();
                row.iter().map(|p| &d * &p.eval_complex(omega)).collect()
            })
            .collect()
    }

    /// `D·U(Ω)` as a matrix of rational functions; possible only when `D = ±1`.
    pub fn to_symbolic(&self) -> Result<SymbolicMatrix> {
        let half = Rational::from((1, 2));
        if self.phases.iter().any(|p| *p != 0 && *p != half) {
            return Err(Error::pre("non-real root of unity in the semisimple part; use the phase/unipotent form"));
        }
        Ok(SymbolicMatrix::from_fn(self.unipotent.len(), |i, l| {
            let sign = if self.phases[i] == 0 { 1 } else { -1 };
            let p = self.unipotent[i][l].scale(&Rational::from(sign));
            crate::kernel::mvpoly::MultivarRatFun::from_poly(crate::kernel::mvpoly::BiPoly::from_omega_poly(&p))
        }))
    }

    /// `U(Ω)` alone.
    pub fn unipotent_symbolic(&self) -> SymbolicMatrix {
        SymbolicMatrix::from_fn(self.unipotent.len(), |i, l| {
            crate::kernel::mvpoly::MultivarRatFun::from_poly(crate::kernel::mvpoly::BiPoly::from_omega_poly(&self.unipotent[i][l]))
        })
    }

    /// Least `b` with `D^b = Id`.
    pub fn semisimple_order(&self) -> u64 {
        let mut l = rug::Integer::from(1);
        for p in &self.phases {
            l.lcm_mut(p.denom());
        }
        l.to_u64().unwrap_or(u64::MAX)
    }

    /// Whether `D` commutes with `U(Ω)`: entries may couple only solutions
    /// with equal phase.
    pub fn semisimple_commutes(&self) -> bool {
        let n = self.phases.len();
        (0..n).all(|i| (0..n).all(|l| self.unipotent[i][l].is_zero() || self.phases[i] == self.phases[l]))
    }
}

/// Either exact (rational exponents at a rational point or ∞) or numeric.
#[derive(Clone, Debug)]
pub enum Basis {
    Exact(LocalBasis<Rational>),
    Numeric(LocalBasis<BigComplex>),
}

macro_rules! dispatch {
    ($self:ident, $b:ident => $e:expr) => {
        match $self {
            Basis::Exact($b) => $e,
            Basis::Numeric($b) => $e,
        }
    };
}

impl Basis {
    pub fn point(&self) -> &Point {
        dispatch!(self, b => &b.point)
    }
    pub fn order(&self) -> usize {
        dispatch!(self, b => b.order)
    }
    pub fn truncation(&self) -> usize {
        dispatch!(self, b => b.truncation)
    }
    pub fn radius(&self) -> f64 {
        dispatch!(self, b => b.radius)
    }
    pub fn exponents(&self) -> Vec<Exponent> {
        dispatch!(self, b => b.exponents())
    }
    pub fn log_degrees(&self) -> Vec<usize> {
        dispatch!(self, b => b.log_degrees())
    }
    pub fn max_gap(&self) -> usize {
        dispatch!(self, b => b.max_gap())
    }
    pub fn head_offsets(&self) -> Vec<usize> {
        dispatch!(self, b => b.solutions.iter().map(|s| s.k_offset).collect())
    }
    pub fn is_exact(&self) -> bool {
        matches!(self, Basis::Exact(_))
    }
    pub fn exact(&self) -> Option<&LocalBasis<Rational>> {
        match self {
            Basis::Exact(b) => Some(b),
            Basis::Numeric(_) => None,
        }
    }
    pub fn with_truncation(&self, t: usize) -> Basis {
        match self {
            Basis::Exact(b) => Basis::Exact(b.with_truncation(t)),
            Basis::Numeric(b) => Basis::Numeric(b.with_truncation(t)),
        }
    }
    pub fn required_truncation(&self, abs_t: f64, digits: u32) -> Result<usize> {
        dispatch!(self, b => b.required_truncation(abs_t, digits))
    }
    pub fn evaluate_fixed(&self, t: &BigComplex, nder: usize, digits: u32, direction: Option<&BigComplex>) -> Result<Evaluation> {
        dispatch!(self, b => b.evaluate_fixed(t, nder, digits, direction))
    }
    pub fn evaluate_local(&self, t: &BigComplex, nder: usize, digits: u32, direction: Option<&BigComplex>) -> Result<Evaluation> {
        dispatch!(self, b => b.evaluate_local(t, nder, digits, direction))
    }
    /// Evaluation at the ODE variable `w` (converted to the local coordinate).
    pub fn evaluate(&self, w: &BigComplex, nder: usize, digits: u32, direction: Option<&BigComplex>) -> Result<Evaluation> {
        let t = local_coordinate(self.point(), w, digits + 20)?;
        self.evaluate_local(&t, nder, digits, direction)
    }
    pub fn log_shift_matrix(&self, c: &BigComplex, digits: u32) -> CMatrix {
        dispatch!(self, b => b.log_shift_matrix(c, digits))
    }
    pub fn local_monodromy_numeric(&self, digits: u32) -> CMatrix {
        dispatch!(self, b => b.local_monodromy_numeric(digits))
    }
    pub fn branch_change(&self, from: &BigComplex, to: &BigComplex, digits: u32) -> CMatrix {
        dispatch!(self, b => b.branch_change(from, to, digits))
    }
    pub fn symbolic_local_monodromy(&self) -> Result<SymbolicLoc> {
        match self {
            Basis::Exact(b) => Ok(b.symbolic_local_monodromy()),
            Basis::Numeric(_) => Err(Error::IrrationalExponent(self.point().label())),
        }
    }

    /// JSON dump: exponents as `"p/q"`, coefficient tables as strings.
    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let sols: Vec<serde_json::Value> = match self {
            Basis::Exact(b) => b
                .solutions
                .iter()
                .map(|s| {
                    json!({
                        "exponent": s.exponent.label(),
                        "log_degree": s.log_degree,
                        "coefficients": s.coeffs.iter().map(|r| r.iter().map(fmt_rational).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
            Basis::Numeric(b) => b
                .solutions
                .iter()
                .map(|s| {
                    json!({
                        "exponent": s.exponent.label(),
                        "log_degree": s.log_degree,
                        "coefficients": s.coeffs.iter().map(|r| r.iter().map(|z| {
                            let (re, im) = z.to_decimal_strings(digits);
                            vec![re, im]
                        }).collect::<Vec<_>>()).collect::<Vec<_>>(),
                    })
                })
                .collect(),
        };
        json!({
            "point": self.point().label(),
            "order": self.order(),
            "truncation": self.truncation(),
            "exact": self.is_exact(),
            "solutions": sols,
        })
    }
}

/// Local coordinate: `w − p`, or `1/w` at ∞.
pub fn local_coordinate(p: &Point, w: &BigComplex, digits: u32) -> Result<BigComplex> {
    match p {
        Point::Infinity => Ok(w.with_digits(digits).recip()),
        _ => Ok(w.with_digits(digits) - p.approx(digits).unwrap()),
    }
}

/// Approximations of the finite singular points (roots of `a_n`).
pub fn finite_singularities(ode: &FuchsianOde, digits: u32) -> Vec<BigComplex> {
    let lead = ode.leading();
    if lead.is_constant() {
        return vec![];
    }
    let mut out = vec![];
    for (f, _) in lead.squarefree_decomposition() {
        out.extend(crate::kernel::roots::roots(&f, digits));
    }
    out
}

fn radius_at(ode: &FuchsianOde, p: &Point) -> f64 {
    let sing = finite_singularities(ode, 30);
    match p {
        Point::Infinity => {
            let m = sing.iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
            if m == 0.0 {
                f64::INFINITY
            } else {
                1.0 / m
            }
        }
        _ => {
            let z = p.approx(30).unwrap();
            sing.iter()
                .map(|s| (s - &z).abs_f64())
                .filter(|d| *d > 1e-20)
                .fold(f64::INFINITY, f64::min)
        }
    }
}

fn exact_classes(exps: &[Rational]) -> Vec<ClassSpec<Rational>> {
    let mut classes: Vec<ClassSpec<Rational>> = vec![];
    let mut sorted = exps.to_vec();
    sorted.sort();
    for e in sorted {
        let pos = classes.iter().position(|c| *Rational::from(&e - &c.sigma).denom() == 1);
        match pos {
            Some(i) => {
                let k = Rational::from(&e - &classes[i].sigma).numer().to_usize().unwrap();
                match classes[i].offsets.iter_mut().find(|o| o.0 == k) {
                    Some(o) => o.1 += 1,
                    None => classes[i].offsets.push((k, 1)),
                }
            }
            None => classes.push(ClassSpec { sigma: e.clone(), sigma_label: Exponent::Rational(e), offsets: vec![(0, 1)] }),
        }
    }
    classes
}

fn numeric_classes(exps: &[Exponent], digits: u32) -> Vec<ClassSpec<BigComplex>> {
    let mut vals: Vec<(BigComplex, Exponent)> = exps.iter().map(|e| (e.to_complex(digits), e.clone())).collect();
    vals.sort_by(|a, b| a.0.to_f64_pair().0.partial_cmp(&b.0.to_f64_pair().0).unwrap_or(std::cmp::Ordering::Equal));
    let tol = 10f64.powi(-(digits as i32) / 2);
    let mut classes: Vec<ClassSpec<BigComplex>> = vec![];
    for (z, e) in vals {
        let mut placed = false;
        for c in classes.iter_mut() {
            let d = &z - &c.sigma;
            let (re, im) = d.to_f64_pair();
            if im.abs() < tol && (re - re.round()).abs() < tol && re.round() >= 0.0 {
                let k = re.round() as usize;
                match c.offsets.iter_mut().find(|o| o.0 == k) {
                    Some(o) => o.1 += 1,
                    None => {
                        c.offsets.push((k, 1));
                        c.offsets.sort();
                    }
                }
                placed = true;
                break;
            }
        }
        if !placed {
            // exact rational exponents keep their exact label
            let label = match &e {
                Exponent::Rational(q) => Exponent::Rational(q.clone()),
                Exponent::Algebraic(_) => Exponent::Algebraic(z.clone()),
            };
            classes.push(ClassSpec { sigma: z, sigma_label: label, offsets: vec![(0, 1)] });
        }
    }
    classes
}

/// Frobenius basis at `p` with truncation order `t`.
pub fn local_basis(ode: &FuchsianOde, p: &Point, t: usize) -> Result<Basis> {
    local_basis_with_digits(ode, p, t, DEFAULT_DIGITS)
}

/// As [`local_basis`], with `digits` working digits for numeric bases.
pub fn local_basis_with_digits(ode: &FuchsianOde, p: &Point, t: usize, digits: u32) -> Result<Basis> {
    if t < 1 {
        return Err(Error::pre("truncation order must be at least 1"));
    }
    let exps = indicial_exponents(ode, p)?;
    let radius = radius_at(ode, p);
    let rational: Option<Vec<Rational>> = exps.iter().map(|e| e.as_rational().cloned()).collect();
    let check_gap = |gap: usize| -> Result<()> {
        if t < gap {
            Err(Error::TruncationTooSmall { given: t, required: gap })
        } else {
            Ok(())
        }
    };
    match (p, rational) {
        (Point::Rational(_) | Point::Infinity, Some(rexps)) => {
            let (local_ode, q) = match p {
                Point::Infinity => (ode.at_infinity(), Rational::new()),
                Point::Rational(q) => (ode.clone(), q.clone()),
                _ => unreachable!(),
            };
            let tf = theta_form_rational(&local_ode, &q)?;
            let form = LocalForm::from_theta(&tf, &Rational::from(1));
            let classes = exact_classes(&rexps);
            check_gap(classes.iter().map(|c| c.max_gap()).max().unwrap_or(0))?;
            Ok(Basis::Exact(LocalBasis::new(p.clone(), ode, form, classes, t, radius, digits)))
        }
        _ => {
            let wd = digits + 20;
            let tf = match p {
                Point::Infinity => theta_form_numeric(&ode.at_infinity(), &Point::Rational(Rational::new()), wd)?,
                _ => theta_form_numeric(ode, p, wd)?,
            };
            let one = BigComplex::one(wd);
            let form = LocalForm::from_theta(&tf, &one);
            let classes = numeric_classes(&exps, wd);
            check_gap(classes.iter().map(|c| c.max_gap()).max().unwrap_or(0))?;
            Ok(Basis::Numeric(LocalBasis::new(p.clone(), ode, form, classes, t, radius, wd)))
        }
    }
}

/// Evaluates a basis at `w` with derivatives `0..=nder` to `digits` digits.
pub fn evaluate_basis(basis: &Basis, w: &BigComplex, nder: usize, digits: u32) -> Result<Evaluation> {
    basis.evaluate(w, nder, digits, None)
}

/// Whether every solution at `p` is analytic (apparent singularity).
pub fn is_apparent(ode: &FuchsianOde, p: &Point, t: Option<usize>) -> Result<bool> {
    let exps = indicial_exponents(ode, p)?;
    if !candidate_apparent(&exps) {
        return Ok(false);
    }
    let ints: Vec<i64> = exps.iter().map(|e| e.as_rational().unwrap().to_f64() as i64).collect();
    let gap = (ints.iter().max().unwrap() - ints.iter().min().unwrap()) as usize;
    let t = t.unwrap_or(gap + 10);
    if t < gap {
        return Err(Error::IncreaseTruncation(t));
    }
    let basis = local_basis(ode, p, t)?;
    match &basis {
        Basis::Exact(b) => Ok(b.solutions.iter().all(|s| s.log_degree == 0)),
        Basis::Numeric(b) => {
            // log coefficients must be negligible against the analytic part
            let tol = 10f64.powi(-(DEFAULT_DIGITS as i32) / 2);
            Ok(b.solutions.iter().all(|s| {
                let big = s.coeffs.iter().map(|r| r[0].abs_f64()).fold(0.0, f64::max).max(1.0);
                s.coeffs.iter().all(|r| r.iter().skip(1).all(|z| z.abs_f64() <= tol * big))
            }))
        }
    }
}

/// Independent check that each exact solution annihilates the ODE: the
/// series is substituted into `Σ a_i(p+t) d^i/dt^i` directly and all
/// coefficients below the truncation horizon must vanish. Returns, per
/// solution, the number of leading coefficients verified to be zero.
pub fn annihilation_check(basis: &LocalBasis<Rational>) -> Vec<(bool, usize)> {
    let (ode, p) = match &basis.point {
        Point::Infinity => (basis.ode.at_infinity(), Rational::new()),
        Point::Rational(q) => (basis.ode.clone(), q.clone()),
        _ => return vec![],
    };
    let a = ode.shifted(&p);
    let n = ode.order();
    let vn = a[n].valuation().unwrap() as i64;
    let t = basis.truncation as i64;
    basis
        .solutions
        .iter()
        .map(|s| {
            // y as map offset -> ln-polynomial, y = t^ρ Σ t^k Σ_j c_kj ℓ^j
            let mut y: Vec<(i64, Vec<Rational>)> = s.coeffs.iter().enumerate().map(|(k, r)| (k as i64, r.clone())).collect();
            let mut total: std::collections::BTreeMap<i64, Vec<Rational>> = Default::default();
            let width = s.log_degree + 1;
            for ai in a.iter() {
                for (k, row) in &y {
                    for (d, ac) in ai.coeffs().iter().enumerate() {
                        if *ac == 0 {
                            continue;
                        }
                        let e = total.entry(k + d as i64).or_insert_with(|| vec![Rational::new(); width]);
                        for (j, c) in row.iter().enumerate() {
                            e[j] += Rational::from(ac * c);
                        }
                    }
                }
                // differentiate: d/dt (t^{ρ+k} ℓ^j) = t^{ρ+k−1}((ρ+k) ℓ^j + j ℓ^{j−1})
                y = y
                    .into_iter()
                    .map(|(k, row)| {
                        let f = Rational::from(&s.rho + k);
                        let mut nr = vec![Rational::new(); width];
                        for j in 0..width {
                            nr[j] += Rational::from(&f * &row[j]);
                            if j + 1 < width {
                                nr[j] += Rational::from(&row[j + 1] * (j as u64 + 1));
                            }
                        }
                        (k - 1, nr)
                    })
                    .collect();
            }
            // offsets below T + 1 − n + v_n are unaffected by truncation
            let horizon = t + 1 - n as i64 + vn;
            let mut ok = true;
            let mut count = 0;
            for (k, row) in &total {
                if *k >= horizon {
                    break;
                }
                if row.iter().any(|c| *c != 0) {
                    ok = false;
                    break;
                }
                count += 1;
            }
            (ok, count)
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn chi1_basis_is_geometric() {
        let ode = FuchsianOde::from_ints(&[&[-1], &[0, 1, -4]]).unwrap();
        let b = local_basis(&ode, &Point::rational(0, 1), 10).unwrap();
        let e = b.exact().unwrap();
        assert_eq!(e.solutions.len(), 1);
        assert_eq!(e.solutions[0].exponent, Exponent::Rational(q(1, 1)));
        for (k, row) in e.solutions[0].coeffs.iter().enumerate() {
            assert_eq!(row[0], Rational::from(4u64.pow(k as u32)));
        }
    }

    #[test]
    fn gauss_resonant_basis_has_one_log() {
        let ode = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
        let b = local_basis(&ode, &Point::rational(0, 1), 20).unwrap();
        assert_eq!(b.log_degrees(), vec![0, 1]);
        let e = b.exact().unwrap();
        // y1 = 2F1(1/2,1/2;1;z): coefficients ((1/2)_k / k!)^2
        let mut c = q(1, 1);
        for k in 0..=20u64 {
            assert_eq!(e.solutions[0].coeffs[k as usize][0], c);
            c *= Rational::from((2 * k + 1, 2 * k + 2)).square();
        }
        // y2 = y1 ln z + analytic
        for k in 0..=20 {
            assert_eq!(e.solutions[1].coeffs[k][1], e.solutions[0].coeffs[k][0]);
        }
        assert!(annihilation_check(e).iter().all(|x| x.0));
    }

    #[test]
    fn polynomial_pair_has_no_logs() {
        // w y'' - 2 y' = 0: solutions 1 and w^3
        let ode = FuchsianOde::from_ints(&[&[0], &[-2], &[0, 1]]).unwrap();
        let b = local_basis(&ode, &Point::rational(0, 1), 5).unwrap();
        assert_eq!(b.log_degrees(), vec![0, 0]);
        let e = b.exact().unwrap();
        assert_eq!(e.solutions[1].coeffs[0][0], q(1, 1));
        assert!(e.solutions[0].coeffs.iter().skip(1).all(|r| r[0] == 0));
        assert!(matches!(local_basis(&ode, &Point::rational(0, 1), 2), Err(Error::TruncationTooSmall { .. })));
    }

    #[test]
    fn log_basis_monodromy() {
        // w y'' + y' = 0: {1, ln w}
        let ode = FuchsianOde::from_ints(&[&[0], &[1], &[0, 1]]).unwrap();
        let b = local_basis(&ode, &Point::rational(0, 1), 5).unwrap();
        let loc = b.symbolic_local_monodromy().unwrap();
        assert_eq!(loc.unipotent[0], vec![Poly::one(), Poly::zero()]);
        assert_eq!(loc.unipotent[1], vec![Poly::x(), Poly::one()]);
    }
}
