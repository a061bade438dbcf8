//! Square matrices over ℚ(α, Ω).

use std::fmt;

use rug::Rational;

use crate::kernel::linalg::CMatrix;
use crate::kernel::mvpoly::{BiPoly, MultivarRatFun};
use crate::kernel::BigComplex;

#[derive(Clone, PartialEq)]
pub struct SymbolicMatrix {
    pub entries: Vec<Vec<MultivarRatFun>>,
}

impl SymbolicMatrix {
    pub fn from_fn(n: usize, mut f: impl FnMut(usize, usize) -> MultivarRatFun) -> Self {
        SymbolicMatrix { entries: (0..n).map(|i| (0..n).map(|j| f(i, j)).collect()).collect() }
    }

    pub fn identity(n: usize) -> Self {
        Self::from_fn(n, |i, j| if i == j { MultivarRatFun::one() } else { MultivarRatFun::zero() })
    }

    pub fn zero(n: usize) -> Self {
        Self::from_fn(n, |_, _| MultivarRatFun::zero())
    }

    /// Matrix of polynomials.
    pub fn from_polys(rows: Vec<Vec<BiPoly>>) -> Self {
        SymbolicMatrix {
            entries: rows.into_iter().map(|r| r.into_iter().map(MultivarRatFun::from_poly).collect()).collect(),
        }
    }

    pub fn size(&self) -> usize {
        self.entries.len()
    }

    pub fn get(&self, i: usize, j: usize) -> &MultivarRatFun {
        &self.entries[i][j]
    }

    pub fn is_zero(&self) -> bool {
        self.entries.iter().all(|r| r.iter().all(|x| x.is_zero()))
    }

    pub fn is_identity(&self) -> bool {
        *self == Self::identity(self.size())
    }

    pub fn mul(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        let n = self.size();
        Self::from_fn(n, |i, j| {
            let mut acc = MultivarRatFun::zero();
            for k in 0..n {
                if self.entries[i][k].is_zero() || other.entries[k][j].is_zero() {
                    continue;
                }
                acc = &acc + &(&self.entries[i][k] * &other.entries[k][j]);
            }
            acc
        })
    }

    pub fn add(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        Self::from_fn(self.size(), |i, j| &self.entries[i][j] + &other.entries[i][j])
    }

    pub fn sub(&self, other: &SymbolicMatrix) -> SymbolicMatrix {
        Self::from_fn(self.size(), |i, j| &self.entries[i][j] - &other.entries[i][j])
    }

    pub fn neg(&self) -> SymbolicMatrix {
        Self::from_fn(self.size(), |i, j| -&self.entries[i][j])
    }

    pub fn scale(&self, c: &MultivarRatFun) -> SymbolicMatrix {
        Self::from_fn(self.size(), |i, j| &self.entries[i][j] * c)
    }

    pub fn transpose(&self) -> SymbolicMatrix {
        Self::from_fn(self.size(), |i, j| self.entries[j][i].clone())
    }

    /// `self^k` by repeated squaring; `k ≥ 0`.
    pub fn pow(&self, mut k: u64) -> SymbolicMatrix {
        let mut base = self.clone();
        let mut acc = Self::identity(self.size());
        while k > 0 {
            if k & 1 == 1 {
                acc = acc.mul(&base);
            }
            k >>= 1;
            if k > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    /// Determinant by Gaussian elimination over the field.
    pub fn det(&self) -> MultivarRatFun {
        let n = self.size();
        let mut a = self.entries.clone();
        let mut det = MultivarRatFun::one();
        for c in 0..n {
            let Some(p) = (c..n).find(|&r| !a[r][c].is_zero()) else {
                return MultivarRatFun::zero();
            };
            if p != c {
                a.swap(p, c);
                det = -&det;
            }
            det = &det * &a[c][c];
            let inv = a[c][c].recip();
            for r in c + 1..n {
                if a[r][c].is_zero() {
                    continue;
                }
                let f = &a[r][c] * &inv;
                for k in c..n {
                    if a[c][k].is_zero() {
                        continue;
                    }
                    let v = &a[r][k] - &(&f * &a[c][k]);
                    a[r][k] = v;
                }
            }
        }
        det
    }

    /// Inverse by Gauss-Jordan; `None` when singular.
    pub fn inverse(&self) -> Option<SymbolicMatrix> {
        let n = self.size();
        let mut a = self.entries.clone();
        let mut b = Self::identity(n).entries;
        for c in 0..n {
            let p = (c..n).find(|&r| !a[r][c].is_zero())?;
            a.swap(p, c);
            b.swap(p, c);
            let inv = a[c][c].recip();
            for k in 0..n {
                a[c][k] = &a[c][k] * &inv;
                b[c][k] = &b[c][k] * &inv;
            }
            for r in 0..n {
                if r == c || a[r][c].is_zero() {
                    continue;
                }
                let f = a[r][c].clone();
                for k in 0..n {
                    if !a[c][k].is_zero() {
                        a[r][k] = &a[r][k] - &(&f * &a[c][k]);
                    }
                    if !b[c][k].is_zero() {
                        b[r][k] = &b[r][k] - &(&f * &b[c][k]);
                    }
                }
            }
        }
        Some(SymbolicMatrix { entries: b })
    }

    /// Rational scalar multiple.
    pub fn scale_rational(&self, q: &Rational) -> SymbolicMatrix {
        self.scale(&MultivarRatFun::constant(q.clone()))
    }

    pub fn eval(&self, alpha: &BigComplex, omega: &BigComplex) -> CMatrix {
        self.entries.iter().map(|r| r.iter().map(|x| x.eval(alpha, omega)).collect()).collect()
    }

    /// Entries as strings, row by row.
    pub fn to_strings(&self) -> Vec<Vec<String>> {
        self.entries.iter().map(|r| r.iter().map(|x| x.to_string()).collect()).collect()
    }
}

impl fmt::Display for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for r in &self.entries {
            let s: Vec<String> = r.iter().map(|x| x.to_string()).collect();
            writeln!(f, "[{}]", s.join(", "))?;
        }
        Ok(())
    }
}

impl fmt::Debug for SymbolicMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}
