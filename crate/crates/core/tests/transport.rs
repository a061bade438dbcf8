use fuchsian::fuchsian::{FuchsianOde, Point};
use fuchsian::kernel::complex::{bits_for_digits, pi, ten_pow_neg};
use fuchsian::kernel::linalg::{det, identity, mat_mul, max_abs_diff, CMatrix};
use fuchsian::kernel::BigComplex;
use fuchsian::transport::{connect, path_connect, taylor_step};
use fuchsian::Error;
use rug::{Float, Rational};

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

fn gamma(x: &Rational, prec: u32) -> Float {
    Float::with_val(prec, x).gamma()
}

fn real(x: Float, digits: u32) -> BigComplex {
    BigComplex::from_real(&x, digits)
}

/// `e^{iπx}`.
fn phase(x: &Rational, digits: u32) -> BigComplex {
    let prec = bits_for_digits(digits + 10);
    let ang = Float::with_val(prec, pi(prec) * Float::with_val(prec, x));
    BigComplex::new(Float::with_val(prec, 0), ang, digits).exp()
}

/// Γ(c)Γ(c−a−b)/(Γ(c−a)Γ(c−b)) and Γ(c)Γ(a+b−c)/(Γ(a)Γ(b)).
fn gauss_ab(a: &Rational, b: &Rational, c: &Rational, prec: u32) -> (Float, Float) {
    let s = Rational::from(c - a) - b;
    let aa = gamma(c, prec) * gamma(&s, prec) / (gamma(&Rational::from(c - a), prec) * gamma(&Rational::from(c - b), prec));
    let bb = gamma(c, prec) * gamma(&Rational::from(-&s), prec) / (gamma(a, prec) * gamma(b, prec));
    (aa, bb)
}

fn primed(a: &Rational, b: &Rational, c: &Rational) -> (Rational, Rational, Rational) {
    (Rational::from(a - c) + 1, Rational::from(b - c) + 1, (2 - c.clone()))
}

fn gauss_zero_one_oracle(a: &Rational, b: &Rational, c: &Rational, digits: u32) -> CMatrix {
    let prec = bits_for_digits(digits + 20);
    let (aa, bb) = gauss_ab(a, b, c, prec);
    let (a2, b2, c2) = primed(a, b, c);
    let (aa2, bb2) = gauss_ab(&a2, &b2, &c2, prec);
    vec![vec![real(bb, digits), real(aa, digits)], vec![real(bb2, digits), real(aa2, digits)]]
}

fn gauss_zero_inf_oracle(a: &Rational, b: &Rational, c: &Rational, digits: u32) -> CMatrix {
    let prec = bits_for_digits(digits + 20);
    let g = |x: &Rational| gamma(x, prec);
    let coef = |a: &Rational, b: &Rational, c: &Rational| {
        let ainf = g(c) * g(&Rational::from(b - a)) / (g(b) * g(&Rational::from(c - a)));
        let binf = g(c) * g(&Rational::from(a - b)) / (g(a) * g(&Rational::from(c - b)));
        (ainf, binf)
    };
    let (ainf, binf) = coef(a, b, c);
    let (a2, b2, c2) = primed(a, b, c);
    let (ainf2, binf2) = coef(&a2, &b2, &c2);
    // the exponent 1 − c solution at 0 is measured along the departure ray i
    let sh = 1 - c.clone();
    let half = |x: Rational| x / 2;
    vec![
        vec![&real(binf, digits) * &phase(&half(b.clone()), digits), &real(ainf, digits) * &phase(&half(a.clone()), digits)],
        vec![
            &real(binf2, digits) * &phase(&half(Rational::from(b + &sh)), digits),
            &real(ainf2, digits) * &phase(&half(Rational::from(a + &sh)), digits),
        ],
    ]
}

fn close(a: &CMatrix, b: &CMatrix, digits: i64) -> bool {
    let d = max_abs_diff(a, b);
    d < ten_pow_neg(digits, d.prec())
}

#[test]
fn gauss_zero_to_one_matches_gamma_values() {
    let (a, b, c) = (q(1, 3), q(1, 5), q(1, 2));
    let ode = FuchsianOde::gauss(&a, &b, &c);
    let m = connect(&ode, &Point::rational(0, 1), &Point::rational(1, 1), 60).unwrap();
    assert!(close(&m.entries, &gauss_zero_one_oracle(&a, &b, &c, 80), 50));
    assert!(m.digits >= 55);
}

#[test]
fn determinant_follows_abel() {
    // det C = W_0 / W_1 = (1 − c)/(c − a − b)
    let (a, b, c) = (q(1, 3), q(1, 5), q(1, 2));
    let ode = FuchsianOde::gauss(&a, &b, &c);
    let m = connect(&ode, &Point::rational(0, 1), &Point::rational(1, 1), 40).unwrap();
    let expect = (1 - c.clone()) / (Rational::from(&c - &a) - &b);
    let d = det(&m.entries).unwrap() - BigComplex::from_rational(&expect, 60);
    assert!(d.abs_f64() < 1e-35);
}

#[test]
fn trivial_order_one_cases() {
    let flat = FuchsianOde::from_ints(&[&[0], &[1]]).unwrap();
    let m = connect(&flat, &Point::rational(0, 1), &Point::rational(1, 1), 30).unwrap();
    assert!(close(&m.entries, &identity(1, 30), 28));
    let pole = FuchsianOde::from_ints(&[&[-1], &[1, -1]]).unwrap();
    let m = connect(&pole, &Point::rational(0, 1), &Point::rational(1, 1), 30).unwrap();
    assert!(close(&m.entries, &vec![vec![BigComplex::from_rational(&q(-1, 1), 40)]], 28));
}

#[test]
fn distant_points_need_a_path() {
    let ode = FuchsianOde::from_ints(&[&[-1], &[0, 1, -4]]).unwrap();
    // radius at 0 is 1/4, at 1 it is 3/4: no overlap with 2
    let r = connect(&ode, &Point::rational(0, 1), &Point::rational(2, 1), 20);
    assert!(matches!(r, Err(Error::NoOverlap(_))));
}

#[test]
fn taylor_step_closed_form() {
    let ode = FuchsianOde::from_ints(&[&[-1], &[1, -1]]).unwrap();
    let z0 = BigComplex::zero(60);
    let z1 = BigComplex::from_rational(&q(1, 4), 60);
    let f = vec![vec![BigComplex::one(60)]];
    let g = taylor_step(&ode, &z0, &z1, &f, 50).unwrap();
    assert!(close(&g, &vec![vec![BigComplex::from_rational(&q(4, 3), 60)]], 50));
    assert!(close(&taylor_step(&ode, &z1, &z1, &g, 50).unwrap(), &g, 60));
    let far = BigComplex::from_rational(&q(3, 4), 60);
    assert!(matches!(taylor_step(&ode, &z0, &far, &f, 20), Err(Error::StepTooLarge(_))));
}

#[test]
fn taylor_chain_matches_direct_evaluation() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let p = 50;
    let basis = fuchsian::frobenius::local_basis(&ode, &Point::rational(0, 1), 10).unwrap();
    let at = |x: Rational| fuchsian::frobenius::evaluate_basis(&basis, &BigComplex::from_rational(&x, p + 30), 1, p + 10).unwrap().values;
    let mut f = at(q(1, 5));
    let pts = [q(1, 5), q(3, 10), q(2, 5)];
    for w in pts.windows(2) {
        f = taylor_step(&ode, &BigComplex::from_rational(&w[0], p + 30), &BigComplex::from_rational(&w[1], p + 30), &f, p).unwrap();
    }
    assert!(close(&f, &at(q(2, 5)), p as i64 - 10));
}

#[test]
fn path_through_midpoint_equals_direct() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let p = 40;
    let direct = connect(&ode, &Point::rational(0, 1), &Point::rational(1, 1), p).unwrap();
    let via = path_connect(&ode, &Point::rational(0, 1), &Point::rational(1, 1), &[BigComplex::from_rational(&q(1, 2), 60)], p).unwrap();
    assert!(close(&direct.entries, &via.entries, p as i64 - 10));
}

#[test]
fn trivial_loop_is_identity() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let m = path_connect(&ode, &Point::rational(0, 1), &Point::rational(0, 1), &[], 30).unwrap();
    assert!(close(&m.entries, &identity(2, 30), 29));
}

#[test]
fn zero_to_infinity_through_upper_half_plane() {
    let (a, b, c) = (q(1, 3), q(1, 5), q(1, 2));
    let ode = FuchsianOde::gauss(&a, &b, &c);
    let p = 40;
    let m = path_connect(&ode, &Point::rational(0, 1), &Point::Infinity, &[BigComplex::i(60)], p).unwrap();
    assert!(close(&m.entries, &gauss_zero_inf_oracle(&a, &b, &c, 60), p as i64 - 5));
}

#[test]
fn inverse_and_composition() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let p = 30;
    let c01 = connect(&ode, &Point::rational(0, 1), &Point::rational(1, 1), p).unwrap();
    let c10 = connect(&ode, &Point::rational(1, 1), &Point::rational(0, 1), p).unwrap();
    assert!(close(&mat_mul(&c01.entries, &c10.entries), &identity(2, p), p as i64 - 3));
    // homotopic paths with the same departure and arrival rays agree
    let i = BigComplex::i(50);
    let bend = BigComplex::from_rationals(&q(1, 2), &q(3, 4), 50);
    let x = path_connect(&ode, &Point::rational(0, 1), &Point::Infinity, std::slice::from_ref(&i), p).unwrap();
    let y = path_connect(&ode, &Point::rational(0, 1), &Point::Infinity, &[i.mul_rational(&q(1, 2)), bend, i.clone()], p).unwrap();
    assert!(close(&x.entries, &y.entries, p as i64 - 5));
    // composition through the ordinary point i
    let ip = Point::Complex(i.clone());
    let c0i = path_connect(&ode, &Point::rational(0, 1), &ip, &[], p).unwrap();
    let ci_inf = path_connect(&ode, &ip, &Point::Infinity, &[i.mul_rational(&q(2, 1))], p).unwrap();
    assert!(close(&mat_mul(&c0i.entries, &ci_inf.entries), &x.entries, p as i64 - 5));
}

#[test]
fn reroute_near_singularity() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let near = BigComplex::from_f64(1.0, 0.001, 40);
    let r = path_connect(&ode, &Point::rational(0, 1), &Point::Infinity, &[near], 20);
    assert!(matches!(r, Err(Error::Reroute(_))));
}
