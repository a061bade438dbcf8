//! Numeric polynomial roots (Aberth) and factorization of integer polynomials
//! into the irreducible pieces needed for singular-point classification.

use rug::{Float, Integer, Rational};

use super::complex::{ten_pow_neg, BigComplex};
use super::poly::Poly;

/// All complex roots of a polynomial with complex coefficients (ascending),
/// by Aberth–Ehrlich iteration at `digits` working digits.
pub fn roots_complex(coeffs: &[BigComplex], digits: u32) -> Vec<BigComplex> {
    let mut c: Vec<BigComplex> = coeffs.iter().map(|z| z.with_digits(digits + 10)).collect();
    while c.last().is_some_and(|z| z.is_zero()) {
        c.pop();
    }
    let n = c.len().saturating_sub(1);
    if n == 0 {
        return vec![];
    }
    let wd = digits + 10;
    let lc = c[n].clone();
    let monic: Vec<BigComplex> = c.iter().map(|z| z / &lc).collect();
    // Cauchy bound for the initial circle
    let bound = 1.0 + monic[..n].iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
    let radius = bound.min(1e30) * 0.5 + 0.1;
    let mut z: Vec<BigComplex> = (0..n)
        .map(|k| {
            let t = 2.0 * std::f64::consts::PI * (k as f64 + 0.25) / n as f64 + 0.4;
            BigComplex::from_f64(radius * t.cos(), radius * t.sin(), wd)
        })
        .collect();
    let tol = ten_pow_neg(digits as i64 + 3, z[0].prec());
    let deriv: Vec<BigComplex> = (1..=n).map(|k| monic[k].mul_rational(&Rational::from(k as u64))).collect();
    let eval = |p: &[BigComplex], x: &BigComplex| {
        let mut acc = BigComplex::zero(wd);
        for co in p.iter().rev() {
            acc = &acc * x + co;
        }
        acc
    };
    let mut converged = vec![false; n];
    for _ in 0..(200 + 20 * n) {
        let mut all = true;
        for i in 0..n {
            if converged[i] {
                continue;
            }
            let pv = eval(&monic, &z[i]);
            if pv.is_zero() {
                converged[i] = true;
                continue;
            }
            let dv = eval(&deriv, &z[i]);
            let ratio = &pv / &dv;
            let mut s = BigComplex::zero(wd);
            for j in 0..n {
                if j != i {
                    s = s + (&z[i] - &z[j]).recip();
                }
            }
            let denom = BigComplex::one(wd) - &ratio * &s;
            let w = &ratio / &denom;
            z[i] = &z[i] - &w;
            let scale = Float::with_val(z[i].prec(), z[i].abs() + 1u32);
            if w.abs() <= Float::with_val(z[i].prec(), &tol * &scale) {
                converged[i] = true;
            } else {
                all = false;
            }
        }
        if all {
            break;
        }
    }
    z.into_iter().map(|x| x.with_digits(digits)).collect()
}

/// Complex roots of a rational polynomial.
pub fn roots(p: &Poly, digits: u32) -> Vec<BigComplex> {
    let c: Vec<BigComplex> = p.coeffs().iter().map(|q| BigComplex::from_rational(q, digits + 10)).collect();
    roots_complex(&c, digits)
}

/// Rational roots of `p`, each found by continued-fraction candidates from a
/// numeric root and confirmed by exact evaluation.
pub fn rational_roots(p: &Poly) -> Vec<Rational> {
    if p.is_constant() {
        return vec![];
    }
    let mut out: Vec<Rational> = vec![];
    for (f, _) in p.squarefree_decomposition() {
        let digits = 40 + 2 * f.deg() as u32;
        let lc_bound = {
            let pf = f.primitive();
            Integer::from(pf.lc().numer().abs_ref())
        };
        for r in roots(&f, digits) {
            if r.im.clone().abs() > 1e-10 * (1.0 + r.abs_f64()) {
                continue;
            }
            if let Some(q) = rational_candidate(&r.re, &lc_bound) {
                if f.eval(&q) == 0 && !out.contains(&q) {
                    out.push(q);
                }
            }
        }
    }
    out.sort();
    out
}

fn rational_candidate(x: &Float, max_den: &Integer) -> Option<Rational> {
    // continued-fraction convergents with denominator up to max_den
    let prec = x.prec();
    let mut y = x.clone();
    let (mut h0, mut h1) = (Integer::from(0), Integer::from(1));
    let (mut k0, mut k1) = (Integer::from(1), Integer::from(0));
    let mut best = None;
    for _ in 0..200 {
        let a = y.clone().floor().to_integer()?;
        let h2 = Integer::from(&a * &h1) + &h0;
        let k2 = Integer::from(&a * &k1) + &k0;
        if &k2 > max_den {
            break;
        }
        let cand = Rational::from((h2.clone(), k2.clone()));
        let err = Float::with_val(prec, x - &cand).abs();
        best = Some(cand);
        if err < Float::with_val(prec, 1e-30) {
            break;
        }
        h0 = std::mem::replace(&mut h1, h2);
        k0 = std::mem::replace(&mut k1, k2);
        let frac = Float::with_val(prec, &y - &a);
        if frac.is_zero() {
            break;
        }
        y = frac.recip();
    }
    best
}

/// An irreducible factor of an integer polynomial.
#[derive(Clone, Debug)]
pub struct Factor {
    /// Primitive integer polynomial with positive leading coefficient.
    pub poly: Poly,
    pub multiplicity: usize,
    /// False when the factor is a leftover of degree above the search limit that
    /// could not be split (it may still be reducible).
    pub certified: bool,
    /// Numeric roots at the precision used for the search.
    pub roots: Vec<BigComplex>,
}

/// Largest factor degree searched by subset products.
pub const MAX_FACTOR_DEGREE: usize = 8;

/// Factors `p` over ℚ into irreducible factors of degree at most 8, returning
/// any unsplittable remainder flagged as uncertified.
pub fn factor(p: &Poly, digits: u32) -> Vec<Factor> {
    let mut out = vec![];
    for (sf, mult) in p.squarefree_decomposition() {
        let mut rest = sf.primitive();
        for r in rational_roots(&rest) {
            let lin = Poly::linear_root(&r).primitive();
            rest = rest.exact_div(&lin).expect("rational root divides").primitive();
            out.push(Factor {
                poly: lin,
                multiplicity: mult,
                certified: true,
                roots: vec![BigComplex::from_rational(&r, digits)],
            });
        }
        if rest.is_constant() {
            continue;
        }
        let mut rts = roots(&rest, digits);
        'outer: while !rest.is_constant() {
            let n = rts.len();
            for size in 2..=n.min(MAX_FACTOR_DEGREE) {
                if size == n {
                    break;
                }
                if let Some(idx) = find_factor_subset(&rest, &rts, size) {
                    let sub: Vec<BigComplex> = idx.iter().map(|&i| rts[i].clone()).collect();
                    let g = integer_factor_from_roots(&rest, &sub).expect("screened subset");
                    rest = rest.exact_div(&g).expect("verified").primitive();
                    rts = rts.into_iter().enumerate().filter(|(i, _)| !idx.contains(i)).map(|(_, z)| z).collect();
                    out.push(Factor { poly: g, multiplicity: mult, certified: true, roots: sub });
                    continue 'outer;
                }
            }
            out.push(Factor {
                certified: rest.deg() <= MAX_FACTOR_DEGREE,
                poly: rest.clone(),
                multiplicity: mult,
                roots: rts.clone(),
            });
            break;
        }
    }
    out
}

fn find_factor_subset(f: &Poly, rts: &[BigComplex], size: usize) -> Option<Vec<usize>> {
    let approx: Vec<(f64, f64)> = rts.iter().map(|z| z.to_f64_pair()).collect();
    let lc = f.lc().to_f64();
    let n = rts.len();
    let mut idx: Vec<usize> = (0..size).collect();
    let mut budget = 500_000usize;
    loop {
        budget -= 1;
        if budget == 0 {
            return None;
        }
        if conj_closed(&approx, &idx) && near_integer_product(lc, &approx, &idx) {
            let sub: Vec<BigComplex> = idx.iter().map(|&i| rts[i].clone()).collect();
            if integer_factor_from_roots(f, &sub).is_some() {
                return Some(idx);
            }
        }
        // next combination
        let mut i = size;
        loop {
            if i == 0 {
                return None;
            }
            i -= 1;
            if idx[i] < n - size + i {
                idx[i] += 1;
                for j in i + 1..size {
                    idx[j] = idx[j - 1] + 1;
                }
                break;
            }
        }
    }
}

fn conj_closed(z: &[(f64, f64)], idx: &[usize]) -> bool {
    idx.iter().all(|&i| {
        let (re, im) = z[i];
        if im.abs() < 1e-12 * (1.0 + re.abs()) {
            return true;
        }
        idx.iter().any(|&j| {
            let (r2, i2) = z[j];
            (r2 - re).abs() < 1e-8 * (1.0 + re.abs()) && (i2 + im).abs() < 1e-8 * (1.0 + im.abs())
        })
    })
}

fn near_integer_product(lc: f64, z: &[(f64, f64)], idx: &[usize]) -> bool {
    let mut c: Vec<(f64, f64)> = vec![(lc, 0.0)];
    for &i in idx {
        let (a, b) = z[i];
        let mut next = vec![(0.0, 0.0); c.len() + 1];
        for (k, &(cr, ci)) in c.iter().enumerate() {
            next[k + 1].0 += cr;
            next[k + 1].1 += ci;
            next[k].0 -= cr * a - ci * b;
            next[k].1 -= cr * b + ci * a;
        }
        c = next;
    }
    c.iter().all(|&(re, im)| {
        let tol = 1e-6 * (1.0 + re.abs());
        im.abs() < tol && (re - re.round()).abs() < tol
    })
}

/// The primitive integer polynomial whose roots are `sub`, if it divides `f`.
fn integer_factor_from_roots(f: &Poly, sub: &[BigComplex]) -> Option<Poly> {
    let digits = sub[0].digits();
    let lc = BigComplex::from_rational(&f.lc(), digits);
    let mut c = vec![lc];
    for r in sub {
        let mut next = vec![BigComplex::zero(digits); c.len() + 1];
        for (k, co) in c.iter().enumerate() {
            next[k + 1] = &next[k + 1] + co;
            next[k] = &next[k] - co * r;
        }
        c = next;
    }
    let mut ints = vec![];
    for z in &c {
        let r = z.re.clone().round();
        let err = Float::with_val(z.prec(), &z.re - &r).abs() + z.im.clone().abs();
        if err > 1e-12 {
            return None;
        }
        ints.push(Rational::from(r.to_integer()?));
    }
    let g = Poly::new(ints).primitive();
    f.exact_div(&g).map(|_| g)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn roots_of_quadratic() {
        // 4w^2 + 3w + 1 has roots (-3 ± i√7)/8
        let r = roots(&Poly::from_ints(&[1, 3, 4]), 50);
        let mut ims: Vec<f64> = r.iter().map(|z| z.to_f64_pair().1).collect();
        ims.sort_by(|a, b| a.partial_cmp(b).unwrap());
        assert!((ims[1] - 7f64.sqrt() / 8.0).abs() < 1e-14);
        assert!(r.iter().all(|z| (z.to_f64_pair().0 + 0.375).abs() < 1e-14));
    }

    #[test]
    fn rational_roots_found_exactly() {
        let p = &(&Poly::from_ints(&[1, -4]) * &Poly::from_ints(&[1, 2])) * &Poly::from_ints(&[1, 3, 4]);
        assert_eq!(rational_roots(&p), vec![Rational::from((-1, 2)), Rational::from((1, 4))]);
    }

    #[test]
    fn factor_splits_quartic_into_quadratics() {
        // (x^2 + 1)(x^2 - 2)
        let p = &Poly::from_ints(&[1, 0, 1]) * &Poly::from_ints(&[-2, 0, 1]);
        let mut f: Vec<Poly> = factor(&p, 40).into_iter().map(|f| f.poly).collect();
        f.sort_by_key(|p| p.to_string());
        assert_eq!(f.len(), 2);
        assert!(f.contains(&Poly::from_ints(&[1, 0, 1])));
        assert!(f.contains(&Poly::from_ints(&[-2, 0, 1])));
    }
}
