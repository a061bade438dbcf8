//! The Frobenius recurrence with logarithms, generic over the coefficient field.
//!
//! A solution is `Σ_K t^{σ+K} g_K(ℓ)` where `g_K` is stored in the divided-power
//! basis `ℓ^j/j!`. With `L = Σ_j t^j P_j(θ)` the coefficients satisfy
//! `P_0(σ+K+∂) g_K = −Σ_{j≥1} P_j(σ+K−j+∂) g_{K−j}`, where `∂` lowers the
//! divided power by one. At a root of `P_0` of multiplicity `μ` the operator
//! factors as `∂^μ Q(∂)` and the `μ` low components of `h = Q(∂) g_K` are free.

use rug::{Float, Rational};

use super::scalar::Scalar;
use crate::fuchsian::{Exponent, ThetaForm};
use crate::kernel::BigComplex;

/// Coefficients of `P_j(ρ)`, ascending in `ρ`.
#[derive(Clone, Debug)]
pub struct LocalForm<S> {
    pub order: usize,
    pub p: Vec<Vec<S>>,
}

fn falling(i: usize) -> Vec<Rational> {
    let mut c = vec![Rational::from(1)];
    for k in 0..i {
        // multiply by (ρ − k)
        let mut next = vec![Rational::new(); c.len() + 1];
        for (d, v) in c.iter().enumerate() {
            next[d + 1] += v;
            next[d] -= Rational::from(v * k as u64);
        }
        c = next;
    }
    c
}

impl<S: Scalar> LocalForm<S> {
    pub fn from_theta(tf: &ThetaForm<S>, one: &S) -> Self {
        let n = tf.order;
        let jmax = tf.q.iter().map(|q| q.len()).max().unwrap_or(1).max(1) - 1;
        let ff: Vec<Vec<Rational>> = (0..=n).map(falling).collect();
        let zero = one.zero_like();
        let mut p = vec![vec![zero.clone(); n + 1]; jmax + 1];
        for (i, q) in tf.q.iter().enumerate() {
            for (j, qc) in q.iter().enumerate() {
                if qc.is_zero() {
                    continue;
                }
                for (d, f) in ff[i].iter().enumerate() {
                    if *f != 0 {
                        p[j][d] = p[j][d].add(&qc.mul(&one.lift(f)));
                    }
                }
            }
        }
        LocalForm { order: n, p }
    }
}

/// Coefficients of `p(s + x)`.
pub fn taylor_at<S: Scalar>(p: &[S], s: &S) -> Vec<S> {
    let mut c = p.to_vec();
    let n = c.len();
    for i in 0..n {
        for j in (i..n.saturating_sub(1)).rev() {
            c[j] = c[j].add(&c[j + 1].mul(s));
        }
    }
    c
}

/// Exponents congruent mod 1: `σ + K` with multiplicity.
#[derive(Clone, Debug)]
pub struct ClassSpec<S> {
    pub sigma: S,
    pub sigma_label: Exponent,
    /// `(K, multiplicity)`, ascending in `K`.
    pub offsets: Vec<(usize, usize)>,
}

impl<S> ClassSpec<S> {
    pub fn total(&self) -> usize {
        self.offsets.iter().map(|o| o.1).sum()
    }

    pub fn mult_at(&self, k: usize) -> usize {
        self.offsets.iter().find(|o| o.0 == k).map_or(0, |o| o.1)
    }

    pub fn max_gap(&self) -> usize {
        self.offsets.last().map_or(0, |o| o.0)
    }
}

pub struct RawSolution<S> {
    /// `g_K` for `K = k0 ..= kmax`.
    pub g: Vec<Vec<S>>,
    /// `h = Q(∂) g_K` at every resonant `K ≥ k0`.
    pub h: Vec<(usize, Vec<S>)>,
}

/// Runs the recurrence for the solution whose only nonzero free value is
/// `h_{j0} = 1` at `K = k0`.
pub fn solve<S: Scalar>(form: &LocalForm<S>, class: &ClassSpec<S>, k0: usize, j0: usize, kmax: usize) -> RawSolution<S> {
    let lc = class.total();
    let zero = class.sigma.zero_like();
    let one = class.sigma.lift(&Rational::from(1));
    let jmax = form.p.len() - 1;
    let mut g: Vec<Vec<S>> = Vec::with_capacity(kmax + 1 - k0);
    let mut hs = vec![];
    for kk in k0..=kmax {
        let mut r = vec![zero.clone(); lc];
        for j in 1..=jmax.min(kk - k0) {
            let prev = &g[kk - j - k0];
            if prev.iter().all(|x| x.is_zero()) || form.p[j].iter().all(|x| x.is_zero()) {
                continue;
            }
            let s = class.sigma.add(&class.sigma.lift(&Rational::from((kk - j) as u64)));
            let c = taylor_at(&form.p[j], &s);
            for m in 0..lc {
                let mut acc = zero.clone();
                for (rr, cr) in c.iter().enumerate() {
                    if m + rr >= lc {
                        break;
                    }
                    if !cr.is_zero() && !prev[m + rr].is_zero() {
                        acc = acc.add(&cr.mul(&prev[m + rr]));
                    }
                }
                r[m] = r[m].sub(&acc);
            }
        }
        let mu = class.mult_at(kk);
        let s = class.sigma.add(&class.sigma.lift(&Rational::from(kk as u64)));
        let c = taylor_at(&form.p[0], &s);
        let mut h = vec![zero.clone(); lc];
        if kk == k0 {
            h[j0] = one.clone();
        } else {
            for m in 0..lc - mu {
                h[m + mu] = r[m].clone();
            }
        }
        let cmu = c[mu].clone();
        let mut gk = vec![zero.clone(); lc];
        for m in (0..lc).rev() {
            let mut acc = h[m].clone();
            let mut rr = 1;
            while m + rr < lc && mu + rr < c.len() {
                if !gk[m + rr].is_zero() {
                    acc = acc.sub(&c[mu + rr].mul(&gk[m + rr]));
                }
                rr += 1;
            }
            gk[m] = if acc.is_zero() { zero.clone() } else { acc.div(&cmu) };
        }
        if mu > 0 {
            hs.push((kk, h));
        }
        g.push(gk);
    }
    RawSolution { g, h: hs }
}

/// One Frobenius solution `Σ_{k,j} c[k][j] t^{ρ+k} ln(t)^j`.
#[derive(Clone, Debug)]
pub struct LocalSolution<S> {
    pub exponent: Exponent,
    pub rho: S,
    pub log_degree: usize,
    /// `coeffs[k][j]`, `0 ≤ k ≤ T`, `0 ≤ j ≤ log_degree`; plain powers of ln.
    pub coeffs: Vec<Vec<S>>,
    pub class: usize,
    /// Offset of the head inside its class.
    pub k_offset: usize,
    /// Log power of the head term.
    pub head_log: usize,
    /// Scaled `h` vectors at the resonant offsets of the class.
    h: Vec<(usize, Vec<S>)>,
}

impl<S: Scalar> LocalSolution<S> {
    /// Free value of this solution at its own parameter.
    fn own_free_value(&self) -> S {
        self.h.iter().find(|x| x.0 == self.k_offset).unwrap().1[self.head_log].clone()
    }
}

/// Builds all solutions of all classes through `t^{ρ+T}` and sorts them by
/// real part of the exponent, then log degree.
pub fn build<S: Scalar>(form: &LocalForm<S>, classes: &[ClassSpec<S>], t: usize) -> Vec<LocalSolution<S>> {
    let mut sols = vec![];
    for (ci, class) in classes.iter().enumerate() {
        for &(k, mu) in &class.offsets {
            for j0 in 0..mu {
                let raw = solve(form, class, k, j0, k + t);
                let zero = class.sigma.zero_like();
                let mut fact = Rational::from(1);
                let mut inv_fact = vec![];
                for j in 0..class.total() {
                    if j > 0 {
                        fact *= j as u64;
                    }
                    inv_fact.push(class.sigma.lift(&(Rational::from(1) / fact.clone())));
                }
                let head = raw.g[0][j0].mul(&inv_fact[j0]);
                let scale = class.sigma.lift(&Rational::from(1)).div(&head);
                let mut coeffs: Vec<Vec<S>> = raw
                    .g
                    .iter()
                    .map(|gk| gk.iter().enumerate().map(|(j, v)| if v.is_zero() { zero.clone() } else { v.mul(&inv_fact[j]).mul(&scale) }).collect())
                    .collect();
                let log_degree = (0..class.total())
                    .rev()
                    .find(|&j| coeffs.iter().any(|row| !row[j].is_zero()))
                    .unwrap_or(0);
                for row in coeffs.iter_mut() {
                    row.truncate(log_degree + 1);
                }
                let h = raw.h.into_iter().map(|(kk, v)| (kk, v.iter().map(|x| x.mul(&scale)).collect())).collect();
                let rho = class.sigma.add(&class.sigma.lift(&Rational::from(k as u64)));
                let exponent = match &class.sigma_label {
                    Exponent::Rational(q) => Exponent::Rational(Rational::from(q + k as u64)),
                    Exponent::Algebraic(_) => Exponent::Algebraic(rho.to_complex(40)),
                };
                sols.push(LocalSolution { exponent, rho, log_degree, coeffs, class: ci, k_offset: k, head_log: j0, h });
            }
        }
    }
    sols.sort_by(|a, b| {
        let ra = match &a.exponent {
            Exponent::Rational(q) => q.to_f64(),
            Exponent::Algebraic(z) => z.to_f64_pair().0,
        };
        let rb = match &b.exponent {
            Exponent::Rational(q) => q.to_f64(),
            Exponent::Algebraic(z) => z.to_f64_pair().0,
        };
        let exact = match (&a.exponent, &b.exponent) {
            (Exponent::Rational(x), Exponent::Rational(y)) => x.cmp(y),
            _ => ra.partial_cmp(&rb).unwrap_or(std::cmp::Ordering::Equal),
        };
        exact.then(a.log_degree.cmp(&b.log_degree)).then(a.head_log.cmp(&b.head_log))
    });
    sols
}

/// `λ[m][i][l]`: coordinates of `∂_ℓ^m y_i / m!` in the basis, so that the
/// shift `ℓ ↦ ℓ + c` acts by `Σ_m c^m λ[m]`.
pub fn shift_coordinates<S: Scalar>(sols: &[LocalSolution<S>]) -> Vec<Vec<Vec<S>>> {
    let n = sols.len();
    if n == 0 {
        return vec![];
    }
    let zero = sols[0].rho.zero_like();
    let lmax = sols.iter().map(|s| s.log_degree).max().unwrap_or(0);
    let mut out = vec![vec![vec![zero.clone(); n]; n]; lmax + 1];
    let mut fact = Rational::from(1);
    for m in 0..=lmax {
        if m > 0 {
            fact *= m as u64;
        }
        for (i, si) in sols.iter().enumerate() {
            for (l, sl) in sols.iter().enumerate() {
                if si.class != sl.class || sl.k_offset < si.k_offset {
                    continue;
                }
                let Some((_, hv)) = si.h.iter().find(|x| x.0 == sl.k_offset) else {
                    continue;
                };
                let idx = sl.head_log + m;
                if idx >= hv.len() || hv[idx].is_zero() {
                    continue;
                }
                let v = hv[idx].div(&sl.own_free_value()).mul(&zero.lift(&(Rational::from(1) / fact.clone())));
                out[m][i][l] = v;
            }
        }
    }
    out
}

/// Values and derivatives of one solution at `t` with the branch fixed by
/// `ℓ` and the prefactor `e` standing for `t^ρ`. Returns the `nder + 1` values and the
/// log10 of the estimated truncation tail.
pub fn eval_solution<S: Scalar>(
    sol: &LocalSolution<S>,
    t: &BigComplex,
    ell: &BigComplex,
    e: &BigComplex,
    nder: usize,
    digits: u32,
) -> (Vec<BigComplex>, f64) {
    let rho = sol.rho.to_complex(digits);
    let mut c: Vec<Vec<BigComplex>> = sol.coeffs.iter().map(|r| r.iter().map(|x| x.to_complex(digits)).collect()).collect();
    let big_t = c.len() - 1;
    let l = sol.log_degree;
    let mut ellp = vec![BigComplex::one(digits)];
    for j in 1..=l {
        ellp.push(&ellp[j - 1] * ell);
    }
    let tinv = t.recip();
    let mut scale = e.clone();
    let mut out = vec![];
    let mut tail = f64::NEG_INFINITY;
    let log_t = log10_abs(&t.abs());
    for d in 0..=nder {
        let v: Vec<BigComplex> = c
            .iter()
            .map(|row| {
                let mut acc = BigComplex::zero(digits);
                for (j, x) in row.iter().enumerate() {
                    if !x.is_zero() {
                        acc = acc + x * &ellp[j];
                    }
                }
                acc
            })
            .collect();
        let mut sum = BigComplex::zero(digits);
        for vk in v.iter().rev() {
            sum = &sum * t + vk;
        }
        // geometric extrapolation of the last ten terms
        if big_t >= 10 {
            let mags: Vec<f64> = (big_t - 9..=big_t).map(|k| log10_abs(&v[k].abs()) + k as f64 * log_t).collect();
            let a1 = mags[..5].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let a2 = mags[5..].iter().cloned().fold(f64::NEG_INFINITY, f64::max);
            let td = if a2 == f64::NEG_INFINITY {
                f64::NEG_INFINITY
            } else if a1 == f64::NEG_INFINITY {
                f64::INFINITY
            } else {
                let lq = (a2 - a1) / 5.0;
                if lq >= 0.0 {
                    f64::INFINITY
                } else {
                    let q = 10f64.powf(lq);
                    a2 + lq - (1.0 - q).log10()
                }
            };
            tail = tail.max(td + log10_abs(&scale.abs()));
        }
        out.push(&sum * &scale);
        if d < nder {
            scale = &scale * &tinv;
            let dd = Rational::from(d as u64);
            for (k, row) in c.iter_mut().enumerate() {
                let f = &rho + &BigComplex::from_rational(&(Rational::from(k as u64) - &dd), digits);
                for j in 0..row.len() {
                    let mut nv = &f * &row[j];
                    if j + 1 < row.len() {
                        nv = nv + row[j + 1].mul_rational(&Rational::from((j + 1) as u64));
                    }
                    row[j] = nv;
                }
            }
        }
    }
    (out, tail)
}

pub fn log10_abs(x: &Float) -> f64 {
    if x.is_zero() {
        return f64::NEG_INFINITY;
    }
    let l = Float::with_val(64, x.log10_ref());
    l.to_f64()
}
