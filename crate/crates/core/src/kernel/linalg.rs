//! Exact nullspaces over the rationals and dense complex matrices.

use rug::{Float, Integer, Rational};

use super::complex::BigComplex;
use crate::error::{Error, Result};

/// Scales `v` to coprime integers with a positive first nonzero entry.
pub fn normalize_integer_vector(v: &[Rational]) -> Vec<Rational> {
    let mut l = Integer::from(1);
    for c in v {
        l.lcm_mut(c.denom());
    }
    let ints: Vec<Integer> = v.iter().map(|c| Integer::from(c.numer() * &l) / c.denom()).collect();
    let mut g = Integer::new();
    for x in &ints {
        g.gcd_mut(x);
    }
    if g == 0 {
        return v.to_vec();
    }
    if ints.iter().find(|x| **x != 0).is_some_and(|x| *x < 0) {
        g = -g;
    }
    ints.into_iter().map(|x| Rational::from(x / &g)).collect()
}

/// Fraction-free (Bareiss) row echelon form of an integer matrix, in place.
/// Returns the pivot columns.
fn bareiss_echelon(a: &mut [Vec<Integer>]) -> Vec<usize> {
    let rows = a.len();
    let cols = a.first().map_or(0, |r| r.len());
    let mut pivots = vec![];
    let mut prev = Integer::from(1);
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(p) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, p);
        for i in r + 1..rows {
            for j in c + 1..cols {
                let v = Integer::from(&a[r][c] * &a[i][j]) - Integer::from(&a[i][c] * &a[r][j]);
                a[i][j] = v.div_exact(&prev);
            }
            a[i][c] = Integer::new();
        }
        prev = a[r][c].clone();
        pivots.push(c);
        r += 1;
    }
    pivots
}

/// Basis of `{v : M·v = 0}`.
///
/// The basis is the reduced-echelon one (one vector per free column, with
/// that free variable equal to one and the other free variables zero), then
/// each vector is scaled to coprime integers with positive first nonzero entry.
pub fn rational_nullspace(m: &[Vec<Rational>]) -> Result<Vec<Vec<Rational>>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.is_empty() || cols == 0 {
        return Err(Error::pre("nullspace of an empty matrix"));
    }
    if m.iter().any(|r| r.len() != cols) {
        return Err(Error::pre("ragged matrix"));
    }
    let mut a: Vec<Vec<Integer>> = m
        .iter()
        .map(|row| {
            let mut l = Integer::from(1);
            for c in row {
                l.lcm_mut(c.denom());
            }
            row.iter().map(|c| Integer::from(c.numer() * &l) / c.denom()).collect()
        })
        .collect();
    let pivots = bareiss_echelon(&mut a);
    Ok(kernel_from_echelon(&a, &pivots, cols))
}

fn kernel_from_echelon(a: &[Vec<Integer>], pivots: &[usize], cols: usize) -> Vec<Vec<Rational>> {
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let mut out = vec![];
    for &f in &free {
        let mut v = vec![Rational::new(); cols];
        v[f] = Rational::from(1);
        for (r, &pc) in pivots.iter().enumerate().rev() {
            let mut s = Rational::new();
            for j in pc + 1..cols {
                if v[j] != 0 && a[r][j] != 0 {
                    s += Rational::from(&v[j] * &a[r][j]);
                }
            }
            v[pc] = -s / &a[r][pc];
        }
        out.push(normalize_integer_vector(&v));
    }
    out
}

/// Exact product `M·v`.
pub fn mat_vec_rational(m: &[Vec<Rational>], v: &[Rational]) -> Vec<Rational> {
    m.iter()
        .map(|row| row.iter().zip(v).fold(Rational::new(), |acc, (a, b)| acc + Rational::from(a * b)))
        .collect()
}

/// Dense square or rectangular complex matrix, row-major.
pub type CMatrix = Vec<Vec<BigComplex>>;

pub fn identity(n: usize, digits: u32) -> CMatrix {
    (0..n)
        .map(|i| (0..n).map(|j| if i == j { BigComplex::one(digits) } else { BigComplex::zero(digits) }).collect())
        .collect()
}

pub fn mat_mul(a: &CMatrix, b: &CMatrix) -> CMatrix {
    let digits = a.first().and_then(|r| r.first()).map_or(30, |z| z.digits());
    let inner = b.len();
    let cols = b.first().map_or(0, |r| r.len());
    a.iter()
        .map(|row| {
            (0..cols)
                .map(|j| {
                    let mut acc = BigComplex::zero(digits);
                    for k in 0..inner {
                        acc = acc + &row[k] * &b[k][j];
                    }
                    acc
                })
                .collect()
        })
        .collect()
}

pub fn mat_sub(a: &CMatrix, b: &CMatrix) -> CMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x - y).collect()).collect()
}

/// Largest entry modulus as `f64` (saturates to 0 for tiny values).
pub fn max_abs(a: &CMatrix) -> Float {
    let prec = a.first().and_then(|r| r.first()).map_or(64, |z| z.prec());
    let mut m = Float::with_val(prec, 0);
    for r in a {
        for z in r {
            let v = z.abs();
            if v > m {
                m = v;
            }
        }
    }
    m
}

pub fn max_abs_diff(a: &CMatrix, b: &CMatrix) -> Float {
    max_abs(&mat_sub(a, b))
}

pub fn with_digits(a: &CMatrix, digits: u32) -> CMatrix {
    a.iter().map(|r| r.iter().map(|z| z.with_digits(digits)).collect()).collect()
}

fn lu(a: &CMatrix) -> Result<(CMatrix, Vec<usize>, bool)> {
    let n = a.len();
    let mut m = a.clone();
    let mut perm: Vec<usize> = (0..n).collect();
    let mut odd = false;
    for c in 0..n {
        let p = (c..n)
            .max_by(|&i, &j| m[i][c].abs().partial_cmp(&m[j][c].abs()).unwrap_or(std::cmp::Ordering::Equal))
            .unwrap();
        if m[p][c].is_zero() {
            return Err(Error::IllConditioned("singular matrix".into()));
        }
        if p != c {
            m.swap(p, c);
            perm.swap(p, c);
            odd = !odd;
        }
        let piv = m[c][c].recip();
        for i in c + 1..n {
            let f = &m[i][c] * &piv;
            for j in c + 1..n {
                let t = &f * &m[c][j];
                m[i][j] = &m[i][j] - &t;
            }
            m[i][c] = f;
        }
    }
    Ok((m, perm, odd))
}

pub fn det(a: &CMatrix) -> Result<BigComplex> {
    let digits = a[0][0].digits();
    let (m, _, odd) = match lu(a) {
        Ok(x) => x,
        Err(_) => return Ok(BigComplex::zero(digits)),
    };
    let mut d = BigComplex::one(digits);
    for (i, row) in m.iter().enumerate() {
        d = d * &row[i];
    }
    Ok(if odd { -d } else { d })
}

/// Solves `A·X = B` for square `A`.
pub fn solve(a: &CMatrix, b: &CMatrix) -> Result<CMatrix> {
    let n = a.len();
    let (m, perm, _) = lu(a)?;
    let cols = b.first().map_or(0, |r| r.len());
    let mut x: CMatrix = perm.iter().map(|&p| b[p].clone()).collect();
    for c in 0..cols {
        for i in 0..n {
            for k in 0..i {
                let t = &m[i][k] * &x[k][c];
                x[i][c] = &x[i][c] - &t;
            }
        }
        for i in (0..n).rev() {
            for k in i + 1..n {
                let t = &m[i][k] * &x[k][c];
                x[i][c] = &x[i][c] - &t;
            }
            x[i][c] = &x[i][c] / &m[i][i];
        }
    }
    Ok(x)
}

pub fn inverse(a: &CMatrix) -> Result<CMatrix> {
    let digits = a[0][0].digits();
    solve(a, &identity(a.len(), digits))
}

/// Max-row-sum condition number estimate `‖A‖∞·‖A⁻¹‖∞` as `f64`.
pub fn condition_number(a: &CMatrix) -> Result<f64> {
    let inv = inverse(a)?;
    let norm = |m: &CMatrix| m.iter().map(|r| r.iter().map(|z| z.abs_f64()).sum::<f64>()).fold(0.0, f64::max);
    Ok(norm(a) * norm(&inv))
}

/// Characteristic polynomial `det(x·I − A)`, ascending coefficients
/// (Faddeev–LeVerrier).
pub fn char_poly(a: &CMatrix) -> Vec<BigComplex> {
    let n = a.len();
    let digits = a[0][0].digits();
    let mut c = vec![BigComplex::zero(digits); n + 1];
    c[n] = BigComplex::one(digits);
    let mut m = vec![vec![BigComplex::zero(digits); n]; n];
    for k in 1..=n {
        for (i, row) in m.iter_mut().enumerate() {
            let v = &row[i] + &c[n - k + 1];
            row[i] = v;
        }
        m = mat_mul(a, &m);
        let mut tr = BigComplex::zero(digits);
        for (i, row) in m.iter().enumerate() {
            tr = tr + &row[i];
        }
        c[n - k] = -tr.mul_rational(&Rational::from((1, k as u64)));
    }
    c
}

/// Transpose of a complex matrix.
pub fn transpose(a: &CMatrix) -> CMatrix {
    let cols = a.first().map_or(0, |r| r.len());
    (0..cols).map(|j| a.iter().map(|r| r[j].clone()).collect()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn q(n: i64) -> Rational {
        Rational::from(n)
    }

    #[test]
    fn nullspace_rank_one() {
        let m = vec![vec![q(1), q(2)], vec![q(2), q(4)]];
        assert_eq!(rational_nullspace(&m).unwrap(), vec![vec![q(2), q(-1)]]);
    }

    #[test]
    fn nullspace_full_rank_and_empty() {
        let m: Vec<Vec<Rational>> = (0..3).map(|i| (0..3).map(|j| q((i == j) as i64)).collect()).collect();
        assert!(rational_nullspace(&m).unwrap().is_empty());
        assert!(rational_nullspace(&[]).is_err());
    }

    #[test]
    fn complex_inverse_roundtrip() {
        let d = 40;
        let a: CMatrix = vec![
            vec![BigComplex::from_f64(2.0, 1.0, d), BigComplex::from_f64(0.5, 0.0, d)],
            vec![BigComplex::from_f64(-1.0, 3.0, d), BigComplex::from_f64(0.0, -2.0, d)],
        ];
        let inv = inverse(&a).unwrap();
        let e = max_abs_diff(&mat_mul(&a, &inv), &identity(2, d));
        assert!(e < 1e-35);
        let dt = det(&a).unwrap();
        let expect = BigComplex::from_f64(2.0, 1.0, d) * BigComplex::from_f64(0.0, -2.0, d)
            - BigComplex::from_f64(0.5, 0.0, d) * BigComplex::from_f64(-1.0, 3.0, d);
        assert!((dt - expect).abs() < 1e-35);
    }
}
