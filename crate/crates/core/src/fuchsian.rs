//! Linear ODEs with polynomial coefficients and their singular points.

use std::cmp::Ordering;
use std::fmt;

use rug::{Integer, Rational};

use crate::error::{Error, Result};
use crate::kernel::numfield::NumberField;
use crate::kernel::roots::{factor, roots_complex, rational_roots};
use crate::kernel::{BigComplex, Poly};

/// `a_0(w) y + a_1(w) y' + … + a_n(w) y^{(n)} = 0`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FuchsianOde {
    coeffs: Vec<Poly>,
    var: String,
}

impl FuchsianOde {
    /// Builds a normalized ODE: common polynomial factors are removed, and the
    /// coefficients are scaled to coprime integers with the lowest nonzero
    /// coefficient of `a_n` positive.
    pub fn new(coeffs: Vec<Poly>) -> Result<Self> {
        if coeffs.len() < 2 {
            return Err(Error::pre("an ODE needs at least a_0 and a_1"));
        }
        if coeffs.last().unwrap().is_zero() {
            return Err(Error::pre("leading coefficient a_n is identically zero"));
        }
        let mut g = Poly::zero();
        for c in &coeffs {
            g = g.gcd(c);
        }
        let coeffs: Vec<Poly> = coeffs.iter().map(|c| c.exact_div(&g).expect("gcd divides")).collect();
        Ok(FuchsianOde { coeffs: normalize_integer_coeffs(coeffs), var: "w".into() })
    }

    pub fn from_ints(coeffs: &[&[i64]]) -> Result<Self> {
        FuchsianOde::new(coeffs.iter().map(|c| Poly::from_ints(c)).collect())
    }

    /// Gauss hypergeometric equation `z(1−z)y″ + (c−(a+b+1)z)y′ − ab·y = 0`.
    pub fn gauss(a: &Rational, b: &Rational, c: &Rational) -> Self {
        let ab = Rational::from(a * b);
        let s = Rational::from(a + b) + 1u32;
        FuchsianOde::new(vec![
            Poly::constant(-ab),
            Poly::new(vec![c.clone(), -s]),
            Poly::from_ints(&[0, 1, -1]),
        ])
        .expect("valid hypergeometric equation")
        .with_var("z")
    }

    pub fn with_var(mut self, var: &str) -> Self {
        self.var = var.to_string();
        self
    }

    pub fn var(&self) -> &str {
        &self.var
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Poly] {
        &self.coeffs
    }

    pub fn leading(&self) -> &Poly {
        self.coeffs.last().unwrap()
    }

    /// The equation satisfied by `Y(t) = y(1/t)`.
    pub fn at_infinity(&self) -> FuchsianOde {
        let n = self.order();
        let d = self.coeffs.iter().map(|c| c.deg()).max().unwrap_or(0);
        // (d/dw)^k = Σ_j s_kj(t) (d/dt)^j with w = 1/t
        let mut s: Vec<Vec<Poly>> = vec![vec![Poly::one()]];
        let mt2 = Poly::from_ints(&[0, 0, -1]);
        for k in 0..n {
            let prev = &s[k];
            let mut next = vec![Poly::zero(); k + 2];
            for j in 0..=k + 1 {
                let mut acc = Poly::zero();
                if j <= k {
                    acc = &acc + &prev[j].derivative();
                }
                if j >= 1 {
                    acc = &acc + &prev[j - 1];
                }
                next[j] = &mt2 * &acc;
            }
            s.push(next);
        }
        let mut b = vec![Poly::zero(); n + 1];
        for (k, a) in self.coeffs.iter().enumerate() {
            let rev = a.reverse(d);
            for j in 0..=k {
                b[j] = &b[j] + &(&rev * &s[k][j]);
            }
        }
        FuchsianOde::new(b).expect("transformed equation is nonzero").with_var("t")
    }

    /// Coefficients of `L(y)` for the polynomial `y = Σ s_k w^k`.
    pub fn apply_to_series(&self, s: &[Rational]) -> Vec<Rational> {
        let mut y = Poly::new(s.to_vec());
        let mut out = Poly::zero();
        for a in &self.coeffs {
            out = &out + &(a * &y);
            y = y.derivative();
        }
        out.into_coeffs()
    }

    /// Taylor coefficients `a_i(p+t)` at a rational point.
    pub fn shifted(&self, p: &Rational) -> Vec<Poly> {
        self.coeffs.iter().map(|c| c.taylor_shift(p)).collect()
    }

    pub fn to_string_pretty(&self) -> String {
        let mut parts = vec![];
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            let d = match i {
                0 => "y".to_string(),
                1 => "y'".to_string(),
                2 => "y''".to_string(),
                _ => format!("y^({i})"),
            };
            parts.push(format!("({})*{}", c.to_string_var(&self.var), d));
        }
        format!("{} = 0", parts.join(" + "))
    }

    /// `{"order": n, "coeffs": [["p/q", …] per a_i, ascending powers]}`.
    pub fn to_json(&self) -> serde_json::Value {
        let coeffs: Vec<Vec<String>> =
            self.coeffs.iter().map(|p| p.coeffs().iter().map(crate::kernel::rational::fmt_rational).collect()).collect();
        serde_json::json!({ "order": self.order(), "coeffs": coeffs })
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let v: serde_json::Value =
            serde_json::from_str(text).map_err(|e| Error::Parse { position: format!("line {}, column {}", e.line(), e.column()), message: e.to_string() })?;
        let perr = |pos: String, m: &str| Error::Parse { position: pos, message: m.into() };
        let rows = v.get("coeffs").and_then(|c| c.as_array()).ok_or_else(|| perr("root".into(), "missing array `coeffs`"))?;
        let mut polys = vec![];
        for (i, row) in rows.iter().enumerate() {
            let row = row.as_array().ok_or_else(|| perr(format!("coeffs[{i}]"), "expected an array"))?;
            let mut c = vec![];
            for (j, x) in row.iter().enumerate() {
                let s = match x {
                    serde_json::Value::String(s) => s.clone(),
                    serde_json::Value::Number(n) if n.is_i64() => n.to_string(),
                    _ => return Err(perr(format!("coeffs[{i}][{j}]"), "expected a rational string")),
                };
                c.push(crate::kernel::rational::parse_rational(&s).map_err(|_| perr(format!("coeffs[{i}][{j}]"), "bad rational"))?);
            }
            polys.push(Poly::new(c));
        }
        if let Some(n) = v.get("order") {
            if n.as_u64() != Some(rows.len() as u64 - 1) {
                return Err(perr("order".into(), "does not match the number of coefficients"));
            }
        }
        let ode = FuchsianOde::new(polys)?;
        Ok(match v.get("var").and_then(|x| x.as_str()) {
            Some(var) => ode.with_var(var),
            None => ode,
        })
    }
}

impl fmt::Display for FuchsianOde {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.to_string_pretty())
    }
}

/// Scales to coprime integer coefficients with the lowest nonzero coefficient
/// of the last polynomial positive.
pub fn normalize_integer_coeffs(coeffs: Vec<Poly>) -> Vec<Poly> {
    let mut l = Integer::from(1);
    for p in &coeffs {
        for c in p.coeffs() {
            l.lcm_mut(c.denom());
        }
    }
    let mut g = Integer::new();
    for p in &coeffs {
        for c in p.coeffs() {
            g.gcd_mut(&(Integer::from(c.numer() * &l) / c.denom()));
        }
    }
    let lead = coeffs.last().unwrap();
    let low = lead.coeffs()[lead.valuation().unwrap()].clone();
    let mut scale = Rational::from((l, g));
    if low < 0 {
        scale = -scale;
    }
    coeffs.iter().map(|p| p.scale(&scale)).collect()
}

/// A root of an irreducible integer polynomial, selected by an enclosure.
#[derive(Clone, Debug)]
pub struct AlgebraicPoint {
    /// Primitive irreducible integer polynomial with positive leading coefficient.
    pub minpoly: Poly,
    /// 30-digit approximation of the selected root.
    pub enclosure: BigComplex,
    /// Half the distance to the nearest other root of `minpoly`.
    pub radius: f64,
    /// False when the minimal polynomial could not be certified irreducible.
    pub exact_arithmetic: bool,
}

impl AlgebraicPoint {
    pub fn field(&self, digits: u32) -> NumberField {
        NumberField::new(self.minpoly.clone(), self.refined(digits))
    }

    /// The selected root at higher precision.
    pub fn refined(&self, digits: u32) -> BigComplex {
        let mut z = self.enclosure.with_digits(digits + 10);
        let d = self.minpoly.derivative();
        for _ in 0..64 {
            let step = self.minpoly.eval_complex(&z) / d.eval_complex(&z);
            z = &z - &step;
            if step.abs_f64() < 1e-300 || step.is_zero() {
                break;
            }
            let rel = step.abs();
            if rel < crate::kernel::complex::ten_pow_neg(digits as i64 + 5, z.prec()) {
                break;
            }
        }
        z.with_digits(digits)
    }
}

/// A point of the Riemann sphere for local analysis.
#[derive(Clone, Debug)]
pub enum Point {
    Rational(Rational),
    Algebraic(AlgebraicPoint),
    /// A complex point given numerically; used for ordinary points.
    Complex(BigComplex),
    Infinity,
}

impl Point {
    pub fn rational(n: i64, d: i64) -> Self {
        Point::Rational(Rational::from((n, d)))
    }

    pub fn is_infinity(&self) -> bool {
        matches!(self, Point::Infinity)
    }

    pub fn approx(&self, digits: u32) -> Option<BigComplex> {
        match self {
            Point::Rational(q) => Some(BigComplex::from_rational(q, digits)),
            Point::Algebraic(a) => Some(a.refined(digits)),
            Point::Complex(z) => Some(z.with_digits(digits)),
            Point::Infinity => None,
        }
    }

    pub fn label(&self) -> String {
        match self {
            Point::Rational(q) => crate::kernel::rational::fmt_rational(q),
            Point::Algebraic(a) => {
                let (re, im) = a.enclosure.to_f64_pair();
                format!("root of {} near {re:.6}{im:+.6}i", a.minpoly)
            }
            Point::Complex(z) => {
                let (re, im) = z.to_f64_pair();
                format!("{re:.6}{im:+.6}i")
            }
            Point::Infinity => "infinity".into(),
        }
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.label())
    }
}

/// A local exponent: exact when rational, otherwise a numeric root of the
/// exact indicial polynomial.
#[derive(Clone, Debug)]
pub enum Exponent {
    Rational(Rational),
    Algebraic(BigComplex),
}

impl Exponent {
    pub fn as_rational(&self) -> Option<&Rational> {
        match self {
            Exponent::Rational(q) => Some(q),
            Exponent::Algebraic(_) => None,
        }
    }

    pub fn to_complex(&self, digits: u32) -> BigComplex {
        match self {
            Exponent::Rational(q) => BigComplex::from_rational(q, digits),
            Exponent::Algebraic(z) => z.with_digits(digits),
        }
    }

    pub fn label(&self) -> String {
        match self {
            Exponent::Rational(q) => crate::kernel::rational::fmt_rational(q),
            Exponent::Algebraic(z) => {
                let (re, im) = z.to_f64_pair();
                format!("{re:.12}{im:+.12}i")
            }
        }
    }
}

impl PartialEq for Exponent {
    fn eq(&self, other: &Self) -> bool {
        match (self, other) {
            (Exponent::Rational(a), Exponent::Rational(b)) => a == b,
            _ => {
                let d = self.to_complex(40) - other.to_complex(40);
                d.abs_f64() < 1e-25
            }
        }
    }
}

#[derive(Clone, Debug)]
pub struct SingularPoint {
    pub location: Point,
    /// Empty at an irregular singular point.
    pub exponents: Vec<Exponent>,
    pub regular: bool,
    /// `None` when undetermined.
    pub apparent: Option<bool>,
    pub note: Option<String>,
}

/// Local data in θ-form: `q_i(t) = a_i(p+t)·t^{n−i−v}` with `v = ord a_n`.
#[derive(Clone, Debug)]
pub struct ThetaForm<S> {
    pub order: usize,
    /// `q[i]` ascending in `t`.
    pub q: Vec<Vec<S>>,
}

/// Orders of vanishing of the coefficients at `p` and the Fuchs check.
fn fuchs_ok(ords: &[Option<usize>]) -> bool {
    let n = ords.len() - 1;
    let vn = ords[n].expect("leading coefficient nonzero") as i64;
    ords.iter().enumerate().all(|(i, o)| match o {
        None => true,
        Some(v) => *v as i64 >= vn - (n - i) as i64,
    })
}

/// Exact θ-form at a rational point.
pub fn theta_form_rational(ode: &FuchsianOde, p: &Rational) -> Result<ThetaForm<Rational>> {
    let n = ode.order();
    let sh = ode.shifted(p);
    let ords: Vec<Option<usize>> = sh.iter().map(|c| c.valuation()).collect();
    if !fuchs_ok(&ords) {
        return Err(Error::IrregularSingularPoint(crate::kernel::rational::fmt_rational(p)));
    }
    let vn = ords[n].unwrap();
    let q = sh
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let shift = (n - i) as i64 - vn as i64;
            let poly = if shift >= 0 { c.shift_up(shift as usize) } else { c.shift_down((-shift) as usize) };
            poly.into_coeffs()
        })
        .collect();
    Ok(ThetaForm { order: n, q })
}

/// Numeric θ-form at a point given by a number field element (algebraic
/// singular point) or at an ordinary complex point.
pub fn theta_form_numeric(ode: &FuchsianOde, p: &Point, digits: u32) -> Result<ThetaForm<BigComplex>> {
    let n = ode.order();
    let z = p.approx(digits + 10).ok_or_else(|| Error::pre("numeric θ-form at infinity"))?;
    let ords: Vec<Option<usize>> = match p {
        Point::Algebraic(a) => ode
            .coeffs()
            .iter()
            .map(|c| if c.is_zero() { None } else { Some(c.multiplicity_of(&a.minpoly)) })
            .collect(),
        Point::Rational(q) => ode.shifted(q).iter().map(|c| c.valuation()).collect(),
        _ => {
            if ode.leading().eval_complex(&z).abs_f64() == 0.0 {
                return Err(Error::pre("complex point is a singular point; give it exactly"));
            }
            ode.coeffs().iter().map(|c| if c.is_zero() { None } else { Some(0) }).collect()
        }
    };
    if !fuchs_ok(&ords) {
        return Err(Error::IrregularSingularPoint(p.label()));
    }
    let vn = ords[n].unwrap();
    let mut q = vec![];
    for (i, c) in ode.coeffs().iter().enumerate() {
        let mut tc = complex_taylor(c, &z);
        if let Some(o) = ords[i] {
            // the first `o` Taylor coefficients vanish exactly
            for t in tc.iter_mut().take(o) {
                *t = BigComplex::zero(digits + 10);
            }
        }
        let shift = (n - i) as i64 - vn as i64;
        let v: Vec<BigComplex> = if shift >= 0 {
            let mut v = vec![BigComplex::zero(digits + 10); shift as usize];
            v.extend(tc);
            v
        } else {
            tc.into_iter().skip((-shift) as usize).collect()
        };
        q.push(v.into_iter().map(|x| x.with_digits(digits)).collect());
    }
    Ok(ThetaForm { order: n, q })
}

/// Taylor coefficients of a rational polynomial at a complex point.
pub fn complex_taylor(p: &Poly, z: &BigComplex) -> Vec<BigComplex> {
    let mut c: Vec<BigComplex> = p.coeffs().iter().map(|q| BigComplex::from_rational(q, z.digits())).collect();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            let t = &c[j + 1] * z;
            c[j] = &c[j] + &t;
        }
    }
    c
}

/// Falling factorial basis → monomial coefficients of `Σ e_i ρ^{(i)}`.
fn falling_sum(e: &[Rational]) -> Poly {
    let mut acc = Poly::zero();
    let mut ff = Poly::one();
    for (i, c) in e.iter().enumerate() {
        if i > 0 {
            ff = &ff * &Poly::new(vec![Rational::from(-(i as i64 - 1)), Rational::from(1)]);
        }
        acc = &acc + &ff.scale(c);
    }
    acc
}

/// Indicial polynomial at a rational point (exact).
pub fn indicial_polynomial(ode: &FuchsianOde, p: &Rational) -> Result<Poly> {
    let tf = theta_form_rational(ode, p)?;
    let e: Vec<Rational> = tf.q.iter().map(|q| q.first().cloned().unwrap_or_default()).collect();
    Ok(falling_sum(&e))
}

/// Roots of an exact polynomial as exponents: rational ones exactly (with
/// multiplicity), the rest numerically.
fn exponents_of(poly: &Poly, digits: u32) -> Vec<Exponent> {
    let mut out = vec![];
    let mut rest = poly.clone();
    for r in rational_roots(poly) {
        let lin = Poly::linear_root(&r);
        let m = poly.multiplicity_of(&lin);
        for _ in 0..m {
            out.push(Exponent::Rational(r.clone()));
            rest = rest.exact_div(&lin).unwrap();
        }
    }
    if !rest.is_constant() {
        for (f, m) in rest.squarefree_decomposition() {
            for z in crate::kernel::roots::roots(&f, digits) {
                for _ in 0..m {
                    out.push(Exponent::Algebraic(z.clone()));
                }
            }
        }
    }
    sort_exponents(&mut out);
    out
}

fn sort_exponents(v: &mut [Exponent]) {
    v.sort_by(|a, b| {
        let (x, y) = (a.to_complex(30).to_f64_pair(), b.to_complex(30).to_f64_pair());
        x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal).then(x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal))
    });
}

/// Indicial exponents at `p` (all `n` roots, with multiplicity).
pub fn indicial_exponents(ode: &FuchsianOde, p: &Point) -> Result<Vec<Exponent>> {
    let digits = 60;
    match p {
        Point::Rational(q) => Ok(exponents_of(&indicial_polynomial(ode, q)?, digits)),
        Point::Infinity => indicial_exponents(&ode.at_infinity(), &Point::Rational(Rational::new())),
        Point::Complex(z) => {
            if ode.leading().eval_complex(z).abs_f64() < 1e-30 {
                return Err(Error::pre("complex point must be ordinary; give singular points exactly"));
            }
            Ok((0..ode.order()).map(|k| Exponent::Rational(Rational::from(k as u64))).collect())
        }
        Point::Algebraic(a) => algebraic_exponents(ode, a, digits),
    }
}

fn algebraic_exponents(ode: &FuchsianOde, a: &AlgebraicPoint, digits: u32) -> Result<Vec<Exponent>> {
    let n = ode.order();
    let k = a.field(digits + 10);
    let ords: Vec<Option<usize>> =
        ode.coeffs().iter().map(|c| if c.is_zero() { None } else { Some(k.order(c)) }).collect();
    if !fuchs_ok(&ords) {
        return Err(Error::IrregularSingularPoint(Point::Algebraic(a.clone()).label()));
    }
    let vn = ords[n].unwrap() as i64;
    // e_i = [t^{v - n + i}] a_i(θ + t), an element of ℚ(θ)
    let e: Vec<Poly> = ode
        .coeffs()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            let m = vn - (n - i) as i64;
            if m < 0 || c.is_zero() {
                Poly::zero()
            } else {
                k.taylor_coeff(c, m as usize)
            }
        })
        .collect();
    // split by powers of θ: I(ρ) = Σ_k B_k(ρ) θ^k
    let deg = k.degree();
    let comps: Vec<Poly> = (0..deg)
        .map(|j| falling_sum(&e.iter().map(|x| x.coeff(j)).collect::<Vec<_>>()))
        .collect();
    let mut g = Poly::zero();
    for c in &comps {
        g = g.gcd(c);
    }
    let mut out = vec![];
    if !g.is_zero() && !g.is_constant() {
        for r in rational_roots(&g) {
            let lin = Poly::linear_root(&r);
            let m = comps.iter().filter(|c| !c.is_zero()).map(|c| c.multiplicity_of(&lin)).min().unwrap_or(0);
            for _ in 0..m {
                out.push(Exponent::Rational(r.clone()));
            }
        }
    }
    if out.len() < n {
        // remaining roots numerically from the complex indicial polynomial
        let theta = k.root.clone();
        let mut ic = vec![BigComplex::zero(digits + 10); n + 1];
        for (j, c) in comps.iter().enumerate() {
            let tj = theta.powi(j as i64);
            for (d, co) in c.coeffs().iter().enumerate() {
                ic[d] = &ic[d] + &tj.mul_rational(co);
            }
        }
        // deflate by the exact rational roots
        let mut quotient = ic;
        for r in out.iter().filter_map(|e| e.as_rational()).cloned().collect::<Vec<_>>() {
            let rc = BigComplex::from_rational(&r, digits + 10);
            let m = quotient.len() - 1;
            let mut q = vec![BigComplex::zero(digits + 10); m];
            let mut carry = BigComplex::zero(digits + 10);
            for d in (0..m).rev() {
                carry = &quotient[d + 1] + &(&carry * &rc);
                q[d] = carry.clone();
            }
            quotient = q;
        }
        for z in roots_complex(&quotient, digits) {
            out.push(Exponent::Algebraic(z));
        }
    }
    sort_exponents(&mut out);
    Ok(out)
}

/// Whether the Fuchs pole-order criterion holds at `p`.
pub fn is_regular_at(ode: &FuchsianOde, p: &Point) -> bool {
    match p {
        Point::Rational(q) => theta_form_rational(ode, q).is_ok(),
        Point::Infinity => theta_form_rational(&ode.at_infinity(), &Rational::new()).is_ok(),
        Point::Algebraic(a) => {
            let ords: Vec<Option<usize>> = ode
                .coeffs()
                .iter()
                .map(|c| if c.is_zero() { None } else { Some(c.multiplicity_of(&a.minpoly)) })
                .collect();
            fuchs_ok(&ords)
        }
        Point::Complex(_) => true,
    }
}

/// Singular points: the roots of `a_n`, grouped by irreducible factor, then ∞.
pub fn singular_points(ode: &FuchsianOde) -> Vec<SingularPoint> {
    let mut rational = vec![];
    let mut algebraic: Vec<AlgebraicPoint> = vec![];
    for f in factor(ode.leading(), 40) {
        if f.poly.deg() == 1 {
            let c = f.poly.coeffs();
            rational.push(-Rational::from(&c[0] / &c[1]));
            continue;
        }
        for (i, r) in f.roots.iter().enumerate() {
            let mut dmin = f64::INFINITY;
            for (j, s) in f.roots.iter().enumerate() {
                if i != j {
                    dmin = dmin.min((r - s).abs_f64());
                }
            }
            algebraic.push(AlgebraicPoint {
                minpoly: f.poly.clone(),
                enclosure: r.with_digits(30),
                radius: dmin / 2.0,
                exact_arithmetic: f.certified,
            });
        }
    }
    rational.sort();
    algebraic.sort_by(|a, b| {
        let ka = (a.minpoly.deg(), a.minpoly.to_string());
        let kb = (b.minpoly.deg(), b.minpoly.to_string());
        ka.cmp(&kb).then_with(|| {
            let (x, y) = (a.enclosure.to_f64_pair(), b.enclosure.to_f64_pair());
            x.0.partial_cmp(&y.0).unwrap_or(Ordering::Equal).then(x.1.partial_cmp(&y.1).unwrap_or(Ordering::Equal))
        })
    });
    let mut pts: Vec<Point> = rational.into_iter().map(Point::Rational).collect();
    pts.extend(algebraic.into_iter().map(Point::Algebraic));
    pts.push(Point::Infinity);
    pts.into_iter().map(|p| describe_point(ode, p)).collect()
}

fn describe_point(ode: &FuchsianOde, p: Point) -> SingularPoint {
    let note = match &p {
        Point::Algebraic(a) if !a.exact_arithmetic => Some("no exact exponent arithmetic".to_string()),
        _ => None,
    };
    match indicial_exponents(ode, &p) {
        Ok(exponents) => {
            let apparent = if !candidate_apparent(&exponents) {
                Some(false)
            } else if let Point::Rational(_) | Point::Infinity = p {
                crate::frobenius::is_apparent(ode, &p, None).ok()
            } else {
                None
            };
            SingularPoint { location: p, exponents, regular: true, apparent, note }
        }
        Err(_) => SingularPoint { location: p, exponents: vec![], regular: false, apparent: Some(false), note },
    }
}

/// Exponents are distinct nonnegative integers.
pub fn candidate_apparent(exps: &[Exponent]) -> bool {
    let mut seen = vec![];
    for e in exps {
        match e.as_rational() {
            Some(q) if *q.denom() == 1 && *q >= 0 => {
                if seen.contains(q) {
                    return false;
                }
                seen.push(q.clone());
            }
            _ => return false,
        }
    }
    true
}

/// Fuchsian check over all singular points; returns the offending ones.
pub fn is_fuchsian(ode: &FuchsianOde) -> (bool, Vec<Point>) {
    let bad: Vec<Point> = singular_points(ode).into_iter().filter(|s| !s.regular).map(|s| s.location).collect();
    (bad.is_empty(), bad)
}

/// Max over samples of `|W′/W + a_{n−1}/a_n|`, with the fundamental system
/// built by a Taylor basis centred at each sample and evaluated a quarter of
/// the way to the nearest singularity.
pub fn wronskian_logderiv_check(ode: &FuchsianOde, samples: &[BigComplex], digits: u32) -> Result<f64> {
    let n = ode.order();
    let sing: Vec<BigComplex> = singular_points(ode).iter().filter_map(|s| s.location.approx(digits + 10)).collect();
    let mut worst = 0.0f64;
    for z in samples {
        let dist = sing.iter().map(|s| (s - z).abs_f64()).fold(f64::INFINITY, f64::min);
        if dist < 1e-3 * (1.0 + z.abs_f64()) {
            return Err(Error::TooCloseToSingularity(format!("sample at distance {dist:.3e}")));
        }
        let step = if dist.is_finite() { dist / 4.0 } else { 0.25 };
        let z1 = z + &BigComplex::from_f64(step, 0.0, digits + 10);
        let basis = crate::frobenius::local_basis_with_digits(ode, &Point::Complex(z.with_digits(digits + 20)), 10, digits + 20)?;
        let m = basis.evaluate(&z1, n, digits + 20, None)?.values;
        let w: crate::kernel::linalg::CMatrix = m.iter().map(|r| r[..n].to_vec()).collect();
        let wdet = crate::kernel::linalg::det(&w)?;
        // W' replaces the last derivative column by the n-th derivative
        let wp: crate::kernel::linalg::CMatrix =
            m.iter().map(|r| r[..n - 1].iter().cloned().chain(std::iter::once(r[n].clone())).collect()).collect();
        let wpdet = crate::kernel::linalg::det(&wp)?;
        let zz = z1.with_digits(digits + 10);
        let ratio = &wpdet / &wdet;
        let expect = if n >= 1 {
            -(ode.coeffs()[n - 1].eval_complex(&zz) / ode.leading().eval_complex(&zz))
        } else {
            BigComplex::zero(digits)
        };
        let r = (ratio - expect).abs().to_f64();
        worst = worst.max(r);
    }
    Ok(worst)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64, d: i64) -> Rational {
        Rational::from((n, d))
    }

    #[test]
    fn chi1_equation_points_and_exponents() {
        let ode = FuchsianOde::from_ints(&[&[-1], &[0, 1, -4]]).unwrap();
        let pts = singular_points(&ode);
        assert_eq!(pts.len(), 3);
        assert!(matches!(&pts[0].location, Point::Rational(x) if *x == 0));
        assert!(matches!(&pts[1].location, Point::Rational(x) if *x == q(1, 4)));
        assert!(pts[2].location.is_infinity());
        let e = indicial_exponents(&ode, &Point::rational(1, 4)).unwrap();
        assert_eq!(e, vec![Exponent::Rational(q(-1, 1))]);
        assert!(is_fuchsian(&ode).0);
    }

    #[test]
    fn gauss_exponents() {
        let ode = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
        let z = indicial_exponents(&ode, &Point::rational(0, 1)).unwrap();
        assert_eq!(z, vec![Exponent::Rational(q(0, 1)), Exponent::Rational(q(0, 1))]);
        let inf = indicial_exponents(&ode, &Point::Infinity).unwrap();
        assert_eq!(inf, vec![Exponent::Rational(q(1, 2)), Exponent::Rational(q(1, 2))]);
    }

    #[test]
    fn irregular_at_infinity() {
        let ode = FuchsianOde::from_ints(&[&[-1], &[0], &[1]]).unwrap();
        let (ok, bad) = is_fuchsian(&ode);
        assert!(!ok);
        assert!(bad[0].is_infinity());
        let flat = FuchsianOde::from_ints(&[&[0], &[0], &[1]]).unwrap();
        let pts = singular_points(&flat);
        assert_eq!(pts.len(), 1);
        assert!(pts[0].location.is_infinity());
    }

    #[test]
    fn normalization_is_scale_free() {
        let a = FuchsianOde::new(vec![Poly::from_ints(&[-2]), Poly::from_ints(&[0, 2, -8])]).unwrap();
        let b = FuchsianOde::new(vec![Poly::new(vec![q(1, 3)]), Poly::new(vec![q(0, 1), q(-1, 3), q(4, 3)])]).unwrap();
        assert_eq!(a, b);
        assert_eq!(a.coeffs()[1], Poly::from_ints(&[0, 1, -4]));
    }
}
