//! Connection matrices between local bases and analytic continuation along
//! polylines.
//!
//! `B_p = C(p,q)·B_q` with bases as column vectors of solutions; fundamental
//! matrices have one row per solution and one column per derivative. The
//! basis at the source takes its branch from the departure ray and the basis
//! at the target from the arrival ray.

use rug::Rational;
use serde_json::json;

use crate::error::{Error, Result};
use crate::frobenius::{finite_singularities, local_basis_with_digits, Basis};
use crate::fuchsian::{FuchsianOde, Point};
use crate::kernel::complex::{digits_from_error, ten_pow_neg};
use crate::kernel::linalg::{condition_number, identity, inverse, mat_mul, max_abs, max_abs_diff, with_digits, CMatrix};
use crate::kernel::{BigComplex, Poly};

/// Taylor steps use at most this fraction of the distance to the nearest
/// singularity.
pub const STEP_FRACTION: f64 = 0.4;
/// Largest admissible step fraction for [`taylor_step`].
pub const MAX_STEP_FRACTION: f64 = 0.5;
/// Paths closer than this (relative) to a singularity are rejected.
pub const REROUTE_DISTANCE: f64 = 1e-2;

#[derive(Clone, Debug)]
pub struct ConnectionMatrix {
    pub from: Point,
    pub to: Point,
    pub entries: CMatrix,
    /// Estimated correct digits.
    pub digits: u32,
    /// Polyline actually followed, endpoints excluded when singular.
    pub path: Vec<BigComplex>,
    /// Unit direction in the local coordinate of `from` fixing its branch.
    pub from_direction: BigComplex,
    /// Unit direction in the local coordinate of `to` fixing its branch.
    pub to_direction: BigComplex,
    pub condition: f64,
}

impl ConnectionMatrix {
    pub fn to_json(&self, digits: usize) -> serde_json::Value {
        let entries: Vec<Vec<Vec<String>>> = self
            .entries
            .iter()
            .map(|r| {
                r.iter()
                    .map(|z| {
                        let (re, im) = z.to_decimal_strings(digits);
                        vec![re, im]
                    })
                    .collect()
            })
            .collect();
        let path: Vec<Vec<String>> = self
            .path
            .iter()
            .map(|z| {
                let (re, im) = z.to_decimal_strings(20);
                vec![re, im]
            })
            .collect();
        json!({
            "from": self.from.label(),
            "to": self.to.label(),
            "digits": self.digits,
            "entries": entries,
            "path": path,
        })
    }

    /// `C(q,p)` from `C(p,q)`.
    pub fn inverse(&self) -> Result<ConnectionMatrix> {
        Ok(ConnectionMatrix {
            from: self.to.clone(),
            to: self.from.clone(),
            entries: inverse(&self.entries)?,
            digits: self.digits,
            path: self.path.iter().rev().cloned().collect(),
            from_direction: self.to_direction.clone(),
            to_direction: self.from_direction.clone(),
            condition: self.condition,
        })
    }
}

fn unit(z: &BigComplex) -> BigComplex {
    z.scale(&z.abs().recip())
}

fn radius(basis: &Basis) -> f64 {
    basis.radius()
}

/// Coefficients `r_{kj}(x)` with `d^k/dt^k = Σ_j r_{kj}(x) d^j/dx^j` for
/// `t = 1/x`.
fn inversion_rules(n: usize) -> Vec<Vec<Poly>> {
    let mut r = vec![vec![Poly::zero(); n]; n];
    if n == 0 {
        return r;
    }
    r[0][0] = Poly::one();
    let mx2 = Poly::monomial(Rational::from(-1), 2);
    for k in 0..n - 1 {
        for j in 0..n {
            let mut v = r[k][j].derivative();
            if j > 0 {
                v = &v + &r[k][j - 1];
            }
            r[k + 1][j] = &mx2 * &v;
        }
    }
    r
}

/// Converts derivative columns from coordinate `x` to `t = 1/x` at `x`.
fn invert_columns(f: &CMatrix, x: &BigComplex) -> CMatrix {
    let n = f.first().map_or(0, |r| r.len());
    let rules = inversion_rules(n);
    let vals: Vec<Vec<BigComplex>> = rules.iter().map(|row| row.iter().map(|p| p.eval_complex(x)).collect()).collect();
    f.iter()
        .map(|row| {
            (0..n)
                .map(|k| {
                    let mut acc = BigComplex::zero(x.digits());
                    for j in 0..=k {
                        if !vals[k][j].is_zero() {
                            acc = acc + &vals[k][j] * &row[j];
                        }
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

fn nearest_singularity(sing: &[BigComplex], z: &BigComplex) -> f64 {
    sing.iter().map(|s| (s - z).abs_f64()).fold(f64::INFINITY, f64::min)
}

fn working_digits(digits: u32) -> u32 {
    digits + 20
}

/// Local basis with its convergence data at `p` sized for `digits`.
fn basis_at(ode: &FuchsianOde, p: &Point, digits: u32) -> Result<Basis> {
    let b = local_basis_with_digits(ode, p, 10, digits + 10)?;
    let t = b.max_gap() + 10;
    Ok(if t > b.truncation() { b.with_truncation(t) } else { b })
}

/// Evaluates `basis` at local coordinate `t` with `n − 1` derivatives.
fn fundamental(basis: &Basis, t: &BigComplex, digits: u32, direction: Option<&BigComplex>) -> Result<CMatrix> {
    let n = basis.order();
    Ok(basis.evaluate_local(t, n.saturating_sub(1), digits, direction)?.values)
}

fn solve_right(f: &CMatrix, w: &CMatrix, digits: u32) -> Result<(CMatrix, f64)> {
    let cond = condition_number(w)?;
    if !cond.is_finite() || cond.log10() > digits as f64 - 10.0 {
        return Err(Error::IllConditioned(format!("condition number {cond:.3e} at {digits} digits")));
    }
    Ok((mat_mul(f, &inverse(w)?), cond))
}

fn agreement_digits(a: &CMatrix, b: &CMatrix, cap: u32) -> u32 {
    let scale = max_abs(a);
    let diff = max_abs_diff(a, b);
    let rel = if scale.is_zero() { diff } else { diff / scale };
    digits_from_error(&rel, cap)
}

/// Connection matrix between overlapping disks, matched on the segment.
pub fn connect(ode: &FuchsianOde, p: &Point, q: &Point, digits: u32) -> Result<ConnectionMatrix> {
    if p.is_infinity() || q.is_infinity() {
        return Err(Error::NoOverlap("a disk at infinity; use path_connect".into()));
    }
    let wd = working_digits(digits);
    let bp = basis_at(ode, p, wd)?;
    let bq = basis_at(ode, q, wd)?;
    let zp = p.approx(wd + 10).unwrap();
    let zq = q.approx(wd + 10).unwrap();
    let d = (&zq - &zp).abs_f64();
    if d == 0.0 {
        return Err(Error::pre("connect needs distinct points"));
    }
    let (rp, rq) = (radius(&bp), radius(&bq));
    if !(d < rp + rq) {
        return Err(Error::NoOverlap(format!("|p-q| = {d:.4} ≥ r_p + r_q = {:.4}; use path_connect", rp + rq)));
    }
    let ratio = |f: f64| (f * d / rp).max((1.0 - f) * d / rq);
    let f = if ratio(0.5) < 0.9 { 0.5 } else { rp / (rp + rq) };
    let f2 = if ratio(f - 0.05) < ratio(f + 0.05) { f - 0.05 } else { f + 0.05 };
    let dir_pq = unit(&(&zq - &zp));
    let dir_qp = -&dir_pq;
    let at = |frac: f64| -> Result<(CMatrix, f64)> {
        let fr = Rational::from_f64(frac).unwrap();
        let m = &zp + &(&zq - &zp).mul_rational(&fr);
        let wp = fundamental(&bp, &(&m - &zp), wd, Some(&dir_pq))?;
        let wq = fundamental(&bq, &(&m - &zq), wd, Some(&dir_qp))?;
        solve_right(&wp, &wq, wd)
    };
    let (c1, cond) = at(f)?;
    let (c2, _) = at(f2)?;
    let est = agreement_digits(&c1, &c2, wd);
    if est < digits {
        return Err(Error::PrecisionUnreachable(format!("matching agrees to {est} digits, {digits} requested")));
    }
    Ok(ConnectionMatrix {
        from: p.clone(),
        to: q.clone(),
        entries: with_digits(&c1, digits),
        digits: est.min(digits),
        path: vec![],
        from_direction: dir_pq.with_digits(wd),
        to_direction: dir_qp.with_digits(wd),
        condition: cond,
    })
}

/// Transports the fundamental matrix `f` (rows: solutions, columns:
/// derivatives at `z0`) to `z1` through a Taylor basis at `z0`.
pub fn taylor_step(ode: &FuchsianOde, z0: &BigComplex, z1: &BigComplex, f: &CMatrix, digits: u32) -> Result<CMatrix> {
    let wd = working_digits(digits);
    let sing = finite_singularities(ode, 30);
    let dist = nearest_singularity(&sing, z0);
    let h = (z1 - z0).abs_f64();
    if h == 0.0 {
        return Ok(f.clone());
    }
    if h > MAX_STEP_FRACTION * dist {
        return Err(Error::StepTooLarge(format!("step {h:.4e} exceeds {MAX_STEP_FRACTION} × {dist:.4e}")));
    }
    let basis = local_basis_with_digits(ode, &Point::Complex(z0.with_digits(wd + 10)), 10, wd)?;
    let e = fundamental(&basis, &(z1.with_digits(wd + 10) - z0.with_digits(wd + 10)), wd, None)?;
    // the Taylor basis has initial data diag(k!)
    let n = e.len();
    let mut fact = Rational::from(1);
    let mut scaled: CMatrix = Vec::with_capacity(n);
    for (k, row) in e.iter().enumerate() {
        if k > 0 {
            fact *= k as u64;
        }
        let inv = Rational::from(1) / fact.clone();
        scaled.push(row.iter().map(|x| x.mul_rational(&inv)).collect());
    }
    Ok(with_digits(&mat_mul(f, &scaled), digits))
}

fn check_path(sing: &[BigComplex], pts: &[BigComplex], skip_first: bool, skip_last: bool) -> Result<()> {
    for (s_idx, w) in pts.windows(2).enumerate() {
        let (a, b) = (&w[0], &w[1]);
        let ab = b - a;
        let len2 = ab.norm_sqr().to_f64();
        for s in sing {
            let at_start = s_idx == 0 && skip_first && (s - a).abs_f64() < 1e-20;
            let at_end = s_idx + 2 == pts.len() && skip_last && (s - b).abs_f64() < 1e-20;
            if at_start || at_end {
                continue;
            }
            let (x, y) = (s - a).to_f64_pair();
            let (u, v) = ab.to_f64_pair();
            let tpar = if len2 > 0.0 { ((x * u + y * v) / len2).clamp(0.0, 1.0) } else { 0.0 };
            let dx = x - tpar * u;
            let dy = y - tpar * v;
            let dist = (dx * dx + dy * dy).sqrt();
            if dist < REROUTE_DISTANCE * (1.0 + s.abs_f64()) {
                return Err(Error::Reroute(format!("segment {s_idx} passes within {dist:.3e} of a singular point")));
            }
        }
    }
    Ok(())
}

/// Walks from `a` to `b` by Taylor steps.
fn walk(ode: &FuchsianOde, sing: &[BigComplex], a: &BigComplex, b: &BigComplex, f: CMatrix, digits: u32, trail: &mut Vec<BigComplex>) -> Result<CMatrix> {
    let wd = working_digits(digits);
    let mut z = a.clone();
    let mut f = f;
    loop {
        let rem = (b - &z).abs_f64();
        if rem == 0.0 {
            return Ok(f);
        }
        let dist = nearest_singularity(sing, &z);
        let h = STEP_FRACTION * dist;
        let next = if rem <= h {
            b.clone()
        } else {
            &z + &unit(&(b - &z)).scale(&rug::Float::with_val(64, h)).with_digits(wd + 10)
        };
        f = taylor_step(ode, &z, &next, &f, wd)?;
        trail.push(next.with_digits(30));
        z = next;
    }
}

/// Point at distance `r` from `c` toward `toward`.
fn toward(c: &BigComplex, toward: &BigComplex, r: f64, digits: u32) -> BigComplex {
    c + &unit(&(toward - c)).scale(&rug::Float::with_val(64, r)).with_digits(digits)
}

/// Connection along the polyline `p → waypoints → q`; either end may be ∞.
pub fn path_connect(ode: &FuchsianOde, p: &Point, q: &Point, waypoints: &[BigComplex], digits: u32) -> Result<ConnectionMatrix> {
    let n = ode.order();
    let wd = working_digits(digits);
    if waypoints.is_empty() && p.label() == q.label() {
        return Ok(ConnectionMatrix {
            from: p.clone(),
            to: q.clone(),
            entries: identity(n, digits),
            digits,
            path: vec![],
            from_direction: BigComplex::one(wd),
            to_direction: BigComplex::one(wd),
            condition: 1.0,
        });
    }
    if waypoints.is_empty() && (p.is_infinity() || q.is_infinity()) {
        return Err(Error::pre("a path to or from infinity needs a finite waypoint"));
    }
    let sing = finite_singularities(ode, 30);
    let bp = basis_at(ode, p, wd)?;
    let bq = basis_at(ode, q, wd)?;
    let wps: Vec<BigComplex> = waypoints.iter().map(|z| z.with_digits(wd + 10)).collect();

    // departure: a point inside the source disk on the ray to the first waypoint
    let first_target = wps.first().cloned().unwrap_or_else(|| q.approx(wd + 10).unwrap());
    let (start, f0, from_dir) = match p {
        Point::Infinity => {
            let big = 2.0 / radius(&bp);
            let z0 = if first_target.abs_f64() >= big { first_target.clone() } else { unit(&first_target).scale(&rug::Float::with_val(64, big)).with_digits(wd + 10) };
            let t0 = z0.recip();
            let dir = unit(&t0);
            let ft = fundamental(&bp, &t0, wd, Some(&dir))?;
            (z0.clone(), invert_columns(&ft, &t0), dir)
        }
        _ => {
            let zp = p.approx(wd + 10).unwrap();
            let d = (&first_target - &zp).abs_f64();
            let r = (0.5 * radius(&bp)).min(0.5 * d);
            let z0 = toward(&zp, &first_target, r, wd + 10);
            let dir = unit(&(&first_target - &zp));
            let ft = fundamental(&bp, &(&z0 - &zp), wd, Some(&dir))?;
            (z0, ft, dir)
        }
    };

    // landing polyline end and matching points in the target disk
    let last_source = wps.last().cloned().unwrap_or_else(|| start.clone());
    let (land1, land2) = match q {
        Point::Infinity => {
            let rr = radius(&bq);
            let base = if last_source.abs_f64() > 0.0 { unit(&last_source) } else { BigComplex::one(wd) };
            let r1 = (2.0 / rr).max(last_source.abs_f64());
            let l1 = base.scale(&rug::Float::with_val(64, r1)).with_digits(wd + 10);
            let l2 = base.scale(&rug::Float::with_val(64, r1 * 1.25)).with_digits(wd + 10);
            (l1, l2)
        }
        _ => {
            let zq = q.approx(wd + 10).unwrap();
            let d = (&last_source - &zq).abs_f64();
            let r = (0.5 * radius(&bq)).min(0.5 * d);
            (toward(&zq, &last_source, r, wd + 10), toward(&zq, &last_source, 0.8 * r, wd + 10))
        }
    };

    let mut poly = vec![];
    let src_pt = match p {
        Point::Infinity => start.clone(),
        _ => p.approx(wd + 10).unwrap(),
    };
    poly.push(src_pt);
    poly.extend(wps.iter().cloned());
    match q {
        Point::Infinity => poly.push(land2.clone()),
        _ => poly.push(q.approx(wd + 10).unwrap()),
    }
    check_path(&sing, &poly, !p.is_infinity(), !q.is_infinity())?;

    let mut trail = vec![];
    let mut f = f0;
    let mut z = start.clone();
    for w in &wps {
        f = walk(ode, &sing, &z, w, f, digits, &mut trail)?;
        z = w.clone();
    }
    let f1 = walk(ode, &sing, &z, &land1, f, digits, &mut trail)?;
    let f2 = walk(ode, &sing, &land1, &land2, f1.clone(), digits, &mut trail)?;

    let (to_dir, c1, c2, cond) = match q {
        Point::Infinity => {
            let t1 = land1.recip();
            let t2 = land2.recip();
            let dir = unit(&t1);
            let w1 = fundamental(&bq, &t1, wd, Some(&dir))?;
            let w2 = fundamental(&bq, &t2, wd, Some(&dir))?;
            let (c1, cond) = solve_right(&invert_columns(&f1, &land1), &w1, wd)?;
            let (c2, _) = solve_right(&invert_columns(&f2, &land2), &w2, wd)?;
            (dir, c1, c2, cond)
        }
        _ => {
            let zq = q.approx(wd + 10).unwrap();
            let dir = unit(&(&land1 - &zq));
            let w1 = fundamental(&bq, &(&land1 - &zq), wd, Some(&dir))?;
            let w2 = fundamental(&bq, &(&land2 - &zq), wd, Some(&dir))?;
            let (c1, cond) = solve_right(&f1, &w1, wd)?;
            let (c2, _) = solve_right(&f2, &w2, wd)?;
            (dir, c1, c2, cond)
        }
    };
    let est = agreement_digits(&c1, &c2, wd);
    if est < digits {
        return Err(Error::PrecisionUnreachable(format!("landing points agree to {est} digits, {digits} requested")));
    }
    Ok(ConnectionMatrix {
        from: p.clone(),
        to: q.clone(),
        entries: with_digits(&c1, digits),
        digits: est.min(digits),
        path: trail,
        from_direction: from_dir.with_digits(wd),
        to_direction: to_dir.with_digits(wd),
        condition: cond,
    })
}

/// `|x| < 10^{-digits}` entrywise on `a − b`.
pub fn agree(a: &CMatrix, b: &CMatrix, digits: i64) -> bool {
    let d = max_abs_diff(a, b);
    d < ten_pow_neg(digits, d.prec())
}
