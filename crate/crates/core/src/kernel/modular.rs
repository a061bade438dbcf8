//! Word-size prime fields, modular nullspaces and Chinese remaindering.

use rayon::prelude::*;
use rug::{Integer, Rational};

use super::linalg::{mat_vec_rational, normalize_integer_vector};
use super::rational::{rational_mod, rational_reconstruct};
use crate::error::{Error, Result};

/// The first `count` primes at or above 2⁶¹.
pub fn primes_from_2_61(count: usize) -> Vec<u64> {
    let mut out = Vec::with_capacity(count);
    let mut p = Integer::from(1u64 << 61);
    while out.len() < count {
        p = p.next_prime();
        out.push(p.to_u64().expect("fits in a word"));
    }
    out
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

fn powmod(mut a: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1u64;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, a, p);
        }
        a = mulmod(a, a, p);
        e >>= 1;
    }
    r
}

fn invmod(a: u64, p: u64) -> u64 {
    powmod(a, p - 2, p)
}

/// Kernel of a matrix over GF(p) in reduced-echelon normal form.
#[derive(Clone, Debug)]
pub struct ModKernel {
    pub prime: u64,
    pub pivots: Vec<usize>,
    /// One vector per free column; the free coordinate equals one.
    pub basis: Vec<Vec<u64>>,
}

/// Reduces the matrix mod `p` and returns its kernel, or `None` when a
/// denominator vanishes mod `p`.
pub fn nullspace_mod_p(m: &[Vec<Rational>], p: u64) -> Option<ModKernel> {
    let pm = Integer::from(p);
    let rows = m.len();
    let cols = m.first().map_or(0, |r| r.len());
    let mut a: Vec<Vec<u64>> = Vec::with_capacity(rows);
    for row in m {
        let mut r = Vec::with_capacity(cols);
        for c in row {
            r.push(rational_mod(c, &pm)?.to_u64().unwrap());
        }
        a.push(r);
    }
    let mut pivots = vec![];
    let mut r = 0;
    for c in 0..cols {
        if r == rows {
            break;
        }
        let Some(piv) = (r..rows).find(|&i| a[i][c] != 0) else {
            continue;
        };
        a.swap(r, piv);
        let inv = invmod(a[r][c], p);
        for j in c..cols {
            a[r][j] = mulmod(a[r][j], inv, p);
        }
        for i in 0..rows {
            if i != r && a[i][c] != 0 {
                let f = a[i][c];
                for j in c..cols {
                    let t = mulmod(f, a[r][j], p);
                    a[i][j] = (a[i][j] + p - t) % p;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..cols).filter(|c| !pivots.contains(c)).collect();
    let basis = free
        .iter()
        .map(|&f| {
            let mut v = vec![0u64; cols];
            v[f] = 1;
            for (ri, &pc) in pivots.iter().enumerate() {
                v[pc] = (p - a[ri][f]) % p;
            }
            v
        })
        .collect();
    Some(ModKernel { prime: p, pivots, basis })
}

/// Combines residues `r_i mod m_i` (pairwise coprime moduli).
pub fn crt(residues: &[u64], moduli: &[u64]) -> (Integer, Integer) {
    let mut x = Integer::new();
    let mut m = Integer::from(1);
    for (&r, &p) in residues.iter().zip(moduli) {
        let pi = Integer::from(p);
        // x + m·t ≡ r (mod p)
        let xm = Integer::from(&x % &pi);
        let diff = (Integer::from(r) - xm + &pi) % &pi;
        let minv = Integer::from(&m % &pi).invert(&pi).expect("coprime moduli");
        let t = (diff * minv) % &pi;
        x += Integer::from(&m * &t);
        m *= &pi;
    }
    (x, m)
}

/// Nullspace by modular images, CRT and rational reconstruction.
///
/// Images whose pivot structure differs from the majority of maximal-rank
/// images are discarded as unlucky primes. The reconstructed basis is verified
/// exactly before it is returned, and it is normalized the same way as
/// [`super::linalg::rational_nullspace`], so both routes agree bit for bit.
pub fn modular_nullspace(m: &[Vec<Rational>], max_primes: usize) -> Result<Vec<Vec<Rational>>> {
    let cols = m.first().map_or(0, |r| r.len());
    if m.is_empty() || cols == 0 {
        return Err(Error::pre("nullspace of an empty matrix"));
    }
    let max_primes = max_primes.max(3);
    let primes = primes_from_2_61(max_primes);
    let mut images: Vec<ModKernel> = vec![];
    let mut next = 0;
    let mut batch = 3;
    while next < primes.len() {
        let end = (next + batch).min(primes.len());
        let mut fresh: Vec<ModKernel> = primes[next..end].par_iter().filter_map(|&p| nullspace_mod_p(m, p)).collect();
        images.append(&mut fresh);
        next = end;
        batch = (batch * 2).min(16);
        if images.len() < 3 {
            continue;
        }
        // keep the smallest kernel, then the lexicographically first pivot set
        let best_dim = images.iter().map(|k| k.basis.len()).min().unwrap();
        let best_piv = images
            .iter()
            .filter(|k| k.basis.len() == best_dim)
            .map(|k| k.pivots.clone())
            .min()
            .unwrap();
        let good: Vec<&ModKernel> = images.iter().filter(|k| k.pivots == best_piv).collect();
        if good.len() < 3 {
            continue;
        }
        if best_dim == 0 {
            return Ok(vec![]);
        }
        if let Some(basis) = reconstruct(&good, cols)? {
            if basis.iter().all(|v| mat_vec_rational(m, v).iter().all(|x| *x == 0)) {
                return Ok(basis);
            }
        }
    }
    Err(Error::NeedMoreTerms(format!(
        "modular nullspace did not stabilize with {max_primes} primes"
    )))
}

fn reconstruct(images: &[&ModKernel], cols: usize) -> Result<Option<Vec<Vec<Rational>>>> {
    let moduli: Vec<u64> = images.iter().map(|k| k.prime).collect();
    let dim = images[0].basis.len();
    let mut out = Vec::with_capacity(dim);
    for b in 0..dim {
        let mut v = Vec::with_capacity(cols);
        for c in 0..cols {
            let res: Vec<u64> = images.iter().map(|k| k.basis[b][c]).collect();
            let (x, mm) = crt(&res, &moduli);
            let bound = Integer::from(Integer::from(&mm >> 1u32).sqrt_ref()) - 1u32;
            match rational_reconstruct(&x, &mm, &bound)? {
                Some(q) => v.push(q),
                None => return Ok(None),
            }
        }
        out.push(normalize_integer_vector(&v));
    }
    Ok(Some(out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::kernel::linalg::rational_nullspace;

    #[test]
    fn primes_are_large_and_distinct() {
        let ps = primes_from_2_61(3);
        assert!(ps.iter().all(|&p| p > 1u64 << 61));
        assert!(ps[0] < ps[1] && ps[1] < ps[2]);
    }

    #[test]
    fn crt_recovers_small_integer() {
        let ps = primes_from_2_61(2);
        let x = Integer::from(123456789u64) * Integer::from(987654321u64) * 1000u32;
        let res: Vec<u64> = ps.iter().map(|&p| Integer::from(&x % p).to_u64().unwrap()).collect();
        assert_eq!(crt(&res, &ps).0, x);
    }

    #[test]
    fn modular_matches_exact() {
        let q = |n: i64, d: i64| Rational::from((n, d));
        let m = vec![
            vec![q(1, 2), q(3, 1), q(-1, 7), q(2, 1), q(0, 1)],
            vec![q(1, 1), q(6, 1), q(-2, 7), q(4, 1), q(0, 1)],
            vec![q(0, 1), q(1, 3), q(5, 1), q(-1, 2), q(1, 1)],
        ];
        assert_eq!(modular_nullspace(&m, 12).unwrap(), rational_nullspace(&m).unwrap());
    }
}
