use fuchsian::frobenius::{annihilation_check, evaluate_basis, is_apparent, local_basis, Basis};
use fuchsian::fuchsian::{FuchsianOde, Point};
use fuchsian::kernel::linalg::{identity, max_abs_diff, mat_mul};
use fuchsian::kernel::complex::ten_pow_neg;
use fuchsian::kernel::{BigComplex, Poly};
use proptest::prelude::*;
use rug::{Float, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn chi1() -> FuchsianOde {
    FuchsianOde::from_ints(&[&[-1], &[0, 1, -4]]).unwrap()
}

fn err_digits(a: &BigComplex, b: &BigComplex) -> f64 {
    let d = (a - b).abs();
    if d.is_zero() {
        return f64::INFINITY;
    }
    -d.to_f64().log10()
}

#[test]
fn chi1_value_at_one_eighth() {
    let b = local_basis(&chi1(), &Point::rational(0, 1), 10).unwrap();
    let w = BigComplex::from_rational(&q(1, 8), 80);
    let ev = evaluate_basis(&b, &w, 0, 50).unwrap();
    // head-normalized solution is w/(1-4w); twice it is the generating function
    let v = ev.values[0][0].mul_rational(&q(2, 1));
    assert!(err_digits(&v, &BigComplex::from_rational(&q(1, 2), 80)) > 50.0);
}

#[test]
fn polynomial_basis_derivatives() {
    let ode = FuchsianOde::from_ints(&[&[0], &[-2], &[0, 1]]).unwrap();
    let b = local_basis(&ode, &Point::rational(0, 1), 5).unwrap();
    let w = BigComplex::from_rational(&q(2, 1), 40);
    let ev = b.evaluate_fixed(&w, 1, 30, None).unwrap();
    assert!(ev.values[0][1].is_zero());
    assert!(err_digits(&ev.values[1][1], &BigComplex::from_rational(&q(12, 1), 40)) > 30.0);
}

fn hyp2f1_direct(a: &Rational, b: &Rational, c: &Rational, z: &Rational, digits: u32) -> Float {
    let prec = fuchsian::kernel::complex::bits_for_digits(digits + 20);
    let zf = Float::with_val(prec, z);
    let mut term = Float::with_val(prec, 1);
    let mut sum = Float::with_val(prec, 1);
    let eps = ten_pow_neg(digits as i64 + 15, prec);
    let mut k = 0u64;
    while term.clone().abs() > eps || k < 5 {
        let f = Rational::from(a + k) * Rational::from(b + k) / (Rational::from(c + k) * (k + 1));
        term *= Float::with_val(prec, &f);
        term *= &zf;
        sum += &term;
        k += 1;
    }
    sum
}

#[test]
fn gauss_basis_matches_direct_summation() {
    let (a, b, c) = (q(1, 2), q(1, 2), q(1, 1));
    let ode = FuchsianOde::gauss(&a, &b, &c);
    let basis = local_basis(&ode, &Point::rational(0, 1), 20).unwrap();
    let p = 60;
    let z = BigComplex::from_rational(&q(1, 2), p + 20);
    let ev = evaluate_basis(&basis, &z, 1, p).unwrap();
    let oracle = hyp2f1_direct(&a, &b, &c, &q(1, 2), p);
    let d = Float::with_val(oracle.prec(), &ev.values[0][0].re - &oracle).abs();
    assert!(d < ten_pow_neg(p as i64 - 5, 64), "{d}");
}

#[test]
fn raising_truncation_does_not_move_entries() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let basis = local_basis(&ode, &Point::rational(0, 1), 10).unwrap();
    let z = BigComplex::from_rational(&q(2, 5), 80);
    let p = 40;
    let ev = evaluate_basis(&basis, &z, 1, p).unwrap();
    let bigger = basis.with_truncation(ev.truncation * 5 / 4 + 1);
    let ev2 = bigger.evaluate_fixed(&z, 1, p, None).unwrap();
    let d = max_abs_diff(&ev.values, &ev2.values);
    assert!(d < ten_pow_neg(p as i64, 64));
}

#[test]
fn unreachable_precision_is_reported() {
    let b = local_basis(&chi1(), &Point::rational(0, 1), 10).unwrap();
    let w = BigComplex::from_rational(&q(1, 3), 40);
    assert!(matches!(evaluate_basis(&b, &w, 0, 30), Err(fuchsian::Error::PrecisionUnreachable(_))));
}

#[test]
fn half_integer_exponent_flips_sign() {
    // 2w y' + 3y = 0: y = w^{-3/2}
    let ode = FuchsianOde::from_ints(&[&[3], &[0, 2]]).unwrap();
    let b = local_basis(&ode, &Point::rational(0, 1), 5).unwrap();
    let m = b.local_monodromy_numeric(30);
    let d = (&m[0][0] + &BigComplex::one(40)).abs();
    assert!(d < Float::with_val(64, 1e-28));
    let loc = b.symbolic_local_monodromy().unwrap();
    assert_eq!(loc.phases, vec![q(1, 2)]);
}

#[test]
fn gauss_local_monodromy_is_unipotent() {
    let ode = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
    let b = local_basis(&ode, &Point::rational(0, 1), 10).unwrap();
    let loc = b.symbolic_local_monodromy().unwrap();
    assert_eq!(loc.unipotent, vec![vec![Poly::one(), Poly::zero()], vec![Poly::x(), Poly::one()]]);
    assert!(loc.to_symbolic().unwrap().det().numer().to_string() == "1");
}

#[test]
fn irrational_exponent_has_no_symbolic_monodromy() {
    // w^2 y'' + w y' - 2 y = 0: exponents ±sqrt 2
    let ode = FuchsianOde::from_ints(&[&[-2], &[0, 1], &[0, 0, 1]]).unwrap();
    let b = local_basis(&ode, &Point::rational(0, 1), 5).unwrap();
    assert!(!b.is_exact());
    assert!(b.symbolic_local_monodromy().is_err());
}

#[test]
fn apparent_examples() {
    let p0 = Point::rational(0, 1);
    let a = FuchsianOde::from_ints(&[&[0], &[-2], &[0, 1]]).unwrap();
    let b = FuchsianOde::from_ints(&[&[0], &[1], &[0, 1]]).unwrap();
    let g = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
    assert!(is_apparent(&a, &p0, None).unwrap());
    assert!(!is_apparent(&b, &p0, None).unwrap());
    assert!(!is_apparent(&g, &p0, None).unwrap());
    assert!(matches!(is_apparent(&a, &p0, Some(2)), Err(fuchsian::Error::IncreaseTruncation(_))));
}

#[test]
fn irregular_point_is_rejected() {
    // w^3 y'' + y = 0 is irregular at 0
    let ode = FuchsianOde::from_ints(&[&[1], &[0], &[0, 0, 0, 1]]).unwrap();
    assert!(local_basis(&ode, &Point::rational(0, 1), 5).is_err());
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-12i64..12, 1i64..7).prop_map(|(n, d)| q(n, d))
}

fn exact(b: &Basis) -> &fuchsian::frobenius::LocalBasis<Rational> {
    b.exact().unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn gauss_solutions_annihilate(a in small_rational(), b in small_rational(), c in small_rational()) {
        let ode = FuchsianOde::gauss(&a, &b, &c);
        for p in [Point::rational(0, 1), Point::rational(1, 1), Point::Infinity] {
            let basis = match local_basis(&ode, &p, 14) {
                Ok(b) => b,
                Err(fuchsian::Error::TruncationTooSmall { .. }) => continue,
                Err(e) => panic!("{e}"),
            };
            prop_assert_eq!(basis.exponents().len(), 2);
            for (ok, _) in annihilation_check(exact(&basis)) {
                prop_assert!(ok);
            }
        }
    }

    #[test]
    fn log_shift_is_a_group(a in small_rational(), c in small_rational(), s in -3i64..3) {
        let ode = FuchsianOde::gauss(&a, &a, &c);
        let basis = match local_basis(&ode, &Point::rational(0, 1), 12) {
            Ok(b) => b,
            Err(_) => return Ok(()),
        };
        let loc = basis.symbolic_local_monodromy().unwrap();
        prop_assert!(loc.semisimple_commutes());
        let b = loc.semisimple_order();
        let om = BigComplex::new(Float::with_val(64, 0), fuchsian::kernel::complex::pi(200) * 2u32, 40);
        let shift = BigComplex::from_f64(s as f64 * 0.7, 0.3, 40);
        let m1 = basis.log_shift_matrix(&om, 30);
        let m2 = basis.log_shift_matrix(&(-&om), 30);
        prop_assert!(max_abs_diff(&mat_mul(&m1, &m2), &identity(2, 30)) < Float::with_val(64, 1e-25));
        let sa = basis.log_shift_matrix(&shift, 30);
        let sb = basis.log_shift_matrix(&om, 30);
        let sab = basis.log_shift_matrix(&(&shift + &om), 30);
        prop_assert!(max_abs_diff(&mat_mul(&sa, &sb), &sab) < Float::with_val(64, 1e-25));
        // D^b = Id: the exponents' phases have denominator dividing b
        for ph in &loc.phases {
            prop_assert_eq!(Rational::from(ph * b).denom().to_u32().unwrap(), 1);
        }
        // apparent iff numeric local monodromy is the identity
        let apparent = is_apparent(&ode, &Point::rational(0, 1), None).unwrap_or(false);
        let id = max_abs_diff(&m1, &identity(2, 30)) < Float::with_val(64, 1e-20);
        prop_assert_eq!(apparent, id);
    }
}
