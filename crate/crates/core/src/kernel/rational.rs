//! Rational parsing/formatting and rational reconstruction.

use rug::{Integer, Rational};

use crate::error::{Error, Result};

/// Parses `"p/q"`, `"p"` or a plain decimal such as `"0.25"`.
pub fn parse_rational(s: &str) -> Result<Rational> {
    let t = s.trim();
    let bad = || Error::Parse {
        position: format!("`{t}`"),
        message: "expected a rational of the form p/q".into(),
    };
    if t.is_empty() {
        return Err(bad());
    }
    if let Some((n, d)) = t.split_once('/') {
        let n: Integer = n.trim().parse().map_err(|_| bad())?;
        let d: Integer = d.trim().parse().map_err(|_| bad())?;
        if d == 0 {
            return Err(Error::Parse {
                position: format!("`{t}`"),
                message: "zero denominator".into(),
            });
        }
        return Ok(Rational::from((n, d)));
    }
    if let Some((ip, fp)) = t.split_once('.') {
        let neg = ip.trim_start().starts_with('-');
        let ip = ip.trim().trim_start_matches(['-', '+']);
        let int_part: Integer = if ip.is_empty() { Integer::new() } else { ip.parse().map_err(|_| bad())? };
        if !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let frac: Integer = if fp.is_empty() { Integer::new() } else { fp.parse().map_err(|_| bad())? };
        let scale = Integer::from(Integer::u_pow_u(10, fp.len() as u32));
        let v = Rational::from((int_part * &scale + frac, scale));
        return Ok(if neg { -v } else { v });
    }
    let n: Integer = t.parse().map_err(|_| bad())?;
    Ok(Rational::from(n))
}

/// `"p/q"`, or `"p"` when the denominator is one.
pub fn fmt_rational(q: &Rational) -> String {
    if *q.denom() == 1 {
        q.numer().to_string()
    } else {
        format!("{}/{}", q.numer(), q.denom())
    }
}

/// Recovers `p/q` with `|p|, q <= bound` and `p ≡ residue·q (mod modulus)`.
///
/// Requires `0 <= residue < modulus` and `2·bound² <= modulus`, which makes the
/// answer unique when it exists.
pub fn rational_reconstruct(residue: &Integer, modulus: &Integer, bound: &Integer) -> Result<Option<Rational>> {
    if *residue < 0 || residue >= modulus {
        return Err(Error::pre("residue must lie in [0, modulus)"));
    }
    if *bound < 1 {
        return Err(Error::pre("bound must be positive"));
    }
    let b2 = Integer::from(bound * bound) * 2u32;
    if &b2 > modulus {
        return Err(Error::pre("bound too large for modulus: need 2·bound² <= modulus"));
    }
    if *residue == 0 {
        return Ok(Some(Rational::new()));
    }
    let (mut r0, mut r1) = (modulus.clone(), residue.clone());
    let (mut t0, mut t1) = (Integer::new(), Integer::from(1));
    while &r1 > bound {
        let q = Integer::from(&r0 / &r1);
        let r2 = Integer::from(&r0 - &q * &r1);
        let t2 = Integer::from(&t0 - &q * &t1);
        r0 = std::mem::replace(&mut r1, r2);
        t0 = std::mem::replace(&mut t1, t2);
    }
    if t1 == 0 || Integer::from(t1.abs_ref()) > *bound {
        return Ok(None);
    }
    if Integer::from(r1.gcd_ref(&t1)) != 1 {
        return Ok(None);
    }
    Ok(Some(Rational::from((r1, t1))))
}

/// Image of `q` modulo `m`, or `None` when the denominator is not invertible.
pub fn rational_mod(q: &Rational, m: &Integer) -> Option<Integer> {
    let inv = q.denom().clone().invert(m).ok()?;
    let mut r = Integer::from(q.numer() * &inv) % m;
    if r < 0 {
        r += m;
    }
    Some(r)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rational("-6/4").unwrap(), Rational::from((-3, 2)));
        assert_eq!(parse_rational("7").unwrap(), Rational::from(7));
        assert_eq!(parse_rational("-0.25").unwrap(), Rational::from((-1, 4)));
        assert_eq!(fmt_rational(&Rational::from((10, -4))), "-5/2");
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn reconstruct_one_third() {
        let m = Integer::from(1_000_000_007u64);
        let r = rational_mod(&Rational::from((1, 3)), &m).unwrap();
        let q = rational_reconstruct(&r, &m, &Integer::from(10_000)).unwrap();
        assert_eq!(q, Some(Rational::from((1, 3))));
    }

    fn exhaustive(residue: i64, modulus: i64, bound: i64) -> Vec<Rational> {
        let mut found = vec![];
        for p in -bound..=bound {
            for q in 1..=bound {
                if (p - residue * q).rem_euclid(modulus) == 0 && Integer::from(p).gcd(&Integer::from(q)) == 1 {
                    found.push(Rational::from((p, q)));
                }
            }
        }
        found
    }

    #[test]
    fn reconstruct_small_modulus() {
        // 5 ≡ -2 (mod 7), but bound 2 breaks 2·bound² <= 7 and is rejected
        assert_eq!(exhaustive(5, 7, 2), vec![Rational::from(-2)]);
        assert!(rational_reconstruct(&Integer::from(5), &Integer::from(7), &Integer::from(2)).is_err());
        assert_eq!(rational_reconstruct(&Integer::from(5), &Integer::from(7), &Integer::from(1)).unwrap(), None);
        // same residue class with a modulus that admits bound 2
        assert_eq!(exhaustive(9, 11, 2), vec![Rational::from(-2)]);
        let got = rational_reconstruct(&Integer::from(9), &Integer::from(11), &Integer::from(2)).unwrap();
        assert_eq!(got, Some(Rational::from(-2)));
    }

    #[test]
    fn reconstruct_zero_and_bad_bound() {
        let m = Integer::from(101);
        assert_eq!(rational_reconstruct(&Integer::new(), &m, &Integer::from(7)).unwrap(), Some(Rational::new()));
        assert!(rational_reconstruct(&Integer::from(3), &m, &Integer::from(8)).is_err());
    }
}
