use fuchsian::constants::{clausen2, eval_basis_element, i3_plus};
use fuchsian::kernel::complex::{bits_for_digits, ten_pow_neg};
use fuchsian::kernel::linalg::{identity, CMatrix};
use fuchsian::kernel::BigComplex;
use fuchsian::monodromy::fixtures::{c014_fixture, c014_numeric, C014_BASIS};
use fuchsian::recognize::*;
use fuchsian::transport::connect;
use fuchsian::Error;
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rug::float::Constant;
use rug::{Float, Integer, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn ints(v: &[i64]) -> Vec<Integer> {
    v.iter().map(|&x| Integer::from(x)).collect()
}

fn up_to_sign(r: &[Integer], e: &[i64]) -> bool {
    let e = ints(e);
    r == e.as_slice() || r.iter().zip(&e).all(|(a, b)| *a == Integer::from(-b))
}

#[test]
fn pslq_trivial_half() {
    let p = bits_for_digits(60);
    let r = pslq(&[Float::with_val(p, 0.5), Float::with_val(p, 1)], 40).unwrap().unwrap();
    assert!(up_to_sign(&r, &[2, -1]));
}

#[test]
fn pslq_constructed_relation() {
    let p = bits_for_digits(130);
    let pi = Float::with_val(p, Constant::Pi);
    let pi2 = Float::with_val(p, &pi * &pi);
    let x = Float::with_val(p, &pi + Float::with_val(p, &pi2 * 2u32));
    let r = pslq(&[x, pi, pi2], 100).unwrap().unwrap();
    assert!(up_to_sign(&r, &[1, -1, -2]));
}

#[test]
fn pslq_finds_clausen_relation() {
    // 2π²I₃⁺ − π²/3 − 2 + 3√3·Cl₂(π/3) = 0
    let d = 80;
    let p = bits_for_digits(d + 30);
    let pi = Float::with_val(p, Constant::Pi);
    let pi2 = Float::with_val(p, &pi * &pi);
    let cl = clausen2(&Float::with_val(p, &pi / 3u32), d + 20);
    let s3cl = Float::with_val(p, 3).sqrt() * cl;
    let i3pi2 = Float::with_val(p, &pi2 * &i3_plus(d + 20));
    let r = pslq(&[s3cl, i3pi2, pi2, Float::with_val(p, 1)], d).unwrap().unwrap();
    assert!(up_to_sign(&r, &[9, 6, -1, -6]), "{r:?}");
}

#[test]
fn pslq_precision_floor() {
    let p = bits_for_digits(40);
    let r = pslq(&[Float::with_val(p, 0.5), Float::with_val(p, 1)], 20);
    assert!(matches!(r, Err(Error::InsufficientPrecision(_))));
}

#[test]
fn recognize_c014_cells() {
    let d = 100;
    let basis = ConstantBasis::new(&["1", "sqrt3/pi"], d).unwrap();
    let x = eval_basis_element("sqrt3/pi", d + 20).unwrap().mul_rational(&q(-9, 64));
    let c = recognize_value(&x, &basis, d);
    assert_eq!(c.combination().unwrap().re, vec![q(0, 1), q(-9, 64)]);

    let basis = ConstantBasis::new(&["1", "I3plus"], d).unwrap();
    let x = &BigComplex::from_rational(&q(1, 3), d + 20) - &eval_basis_element("I3plus", d + 20).unwrap().mul_rational(&q(2, 1));
    let c = recognize_value(&x, &basis, d);
    assert_eq!(c.combination().unwrap().re, vec![q(1, 3), q(-2, 1)]);
}

/// A seeded random real with leading digits 0.123456789.
fn random_real(digits: u32) -> BigComplex {
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(20240607);
    let tail: String = (0..digits + 20).map(|_| char::from(b'0' + rng.gen_range(0..10u8))).collect();
    BigComplex::parse(&format!("0.123456789{tail}"), "0", digits + 20).unwrap()
}

#[test]
fn random_value_is_unresolved() {
    let d = 100;
    let basis = ConstantBasis::new(&["1", "pi"], d).unwrap();
    match recognize_value(&random_real(d), &basis, d) {
        Recognition::Unresolved { reason } => assert!(reason.contains("norm bound"), "{reason}"),
        other => panic!("{other:?}"),
    }
}

#[test]
fn dependent_basis_rejected() {
    assert!(ConstantBasis::new(&["pi", "pi^2", "pi*pi"], 60).is_err());
}

#[test]
fn identity_matrix_recognized() {
    let d = 60;
    let basis = ConstantBasis::new(&["1", "pi"], d).unwrap();
    let r = recognize_matrix(&identity(3, d + 20), &basis, d);
    assert!(r.unresolved.is_empty());
    for i in 0..3 {
        for j in 0..3 {
            let c = r.cells[i][j].combination().unwrap();
            assert_eq!(c.re[0], if i == j { q(1, 1) } else { q(0, 1) });
            assert_eq!(c.re[1], 0);
        }
    }
}

#[test]
fn c014_round_trip() {
    let d = 150;
    let m = c014_numeric(d + 20).unwrap();
    let basis = ConstantBasis::new(&C014_BASIS, d).unwrap();
    let r = recognize_matrix(&m, &basis, d);
    assert!(r.unresolved.is_empty(), "{:?}", r.unresolved);
    let fx = c014_fixture();
    for i in 0..6 {
        for j in 0..6 {
            let c = r.cells[i][j].combination().unwrap();
            assert_eq!(c.re.as_slice(), fx[i][j].coeffs.as_slice(), "cell {i},{j}");
            assert!(c.im.iter().all(|x| *x == 0));
        }
    }
}

#[test]
fn gauss_connection_with_gamma_basis() {
    let d = 50;
    let (a, b, c) = (q(1, 3), q(1, 5), q(1, 2));
    let ode = fuchsian::fuchsian::FuchsianOde::gauss(&a, &b, &c);
    let m = connect(&ode, &fuchsian::fuchsian::Point::rational(0, 1), &fuchsian::fuchsian::Point::rational(1, 1), d + 30).unwrap();
    let prec = bits_for_digits(d + 40);
    let g = |x: Rational| Float::with_val(prec, &x).gamma();
    let pair = |a: &Rational, b: &Rational, c: &Rational| {
        let s = Rational::from(c - a) - b;
        let aa = g(c.clone()) * g(s.clone()) / (g(Rational::from(c - a)) * g(Rational::from(c - b)));
        let bb = g(c.clone()) * g(Rational::from(-&s)) / (g(a.clone()) * g(b.clone()));
        (aa, bb)
    };
    let (aa, bb) = pair(&a, &b, &c);
    let (a2, b2, c2) = (Rational::from(&a - &c) + 1, Rational::from(&b - &c) + 1, (2 - c.clone()));
    let (aa2, bb2) = pair(&a2, &b2, &c2);
    let names = vec!["A".to_string(), "B".into(), "A'".into(), "B'".into()];
    let basis = ConstantBasis::from_values(names, vec![aa, bb, aa2, bb2], d).unwrap();
    let r = recognize_matrix(&m.entries, &basis, d);
    assert!(r.unresolved.is_empty(), "{}", r.to_json());
    assert_eq!(r.cells[0][0].combination().unwrap().render(&basis.names), "1*B");
    assert_eq!(r.cells[1][1].combination().unwrap().render(&basis.names), "1*A'");
}

fn render_matrix(r: &RecognizedMatrix, basis: &ConstantBasis, digits: u32) -> CMatrix {
    r.cells.iter().map(|row| row.iter().map(|c| c.combination().unwrap().eval(basis, digits)).collect()).collect()
}

#[test]
fn recognition_is_idempotent_on_c014() {
    let d = 100;
    let basis = ConstantBasis::new(&C014_BASIS, d).unwrap();
    let m = c014_numeric(d + 20).unwrap();
    let first = recognize_matrix(&m, &basis, d);
    let again = recognize_matrix(&render_matrix(&first, &basis, d + 20), &basis, d);
    for (r1, r2) in first.cells.iter().zip(&again.cells) {
        assert_eq!(r1, r2);
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn recovers_random_small_combinations(c0 in -50i64..50, c1 in -50i64..50, d1 in 1i64..30, c2 in -20i64..20) {
        let d = 80;
        let basis = ConstantBasis::new(&["1", "pi", "sqrt3/pi"], d).unwrap();
        let coeffs = [q(c0, 7), q(c1, d1), q(c2, 3)];
        let mut x = BigComplex::zero(d + 20);
        for (c, n) in coeffs.iter().zip(["1", "pi", "sqrt3/pi"]) {
            x = x + eval_basis_element(n, d + 20).unwrap().mul_rational(c);
        }
        let r = recognize_value(&x, &basis, d);
        prop_assert_eq!(r.combination().unwrap().re.clone(), coeffs.to_vec());
    }

    #[test]
    fn pslq_residual_contract(k in 1i64..40) {
        let p = bits_for_digits(90);
        let s2 = Float::with_val(p, 2).sqrt();
        let x = Float::with_val(p, &s2 * k) + 3u32;
        if let Some(r) = pslq(&[x.clone(), s2.clone(), Float::with_val(p, 1)], 60).unwrap() {
            let res = relation_residual(&r, &[x, s2, Float::with_val(p, 1)]);
            prop_assert!(res < ten_pow_neg(30, p));
            prop_assert!(r.iter().all(|c| c.significant_bits() < 60));
        } else {
            prop_assert!(false, "missed relation");
        }
    }
}
