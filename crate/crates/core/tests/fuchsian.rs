use fuchsian::frobenius::local_basis;
use fuchsian::fuchsian::{
    indicial_exponents, is_fuchsian, singular_points, wronskian_logderiv_check, Exponent, FuchsianOde, Point,
};
use fuchsian::kernel::{BigComplex, Poly};
use proptest::prelude::*;
use rug::Rational;

fn q(n: i64, d: i64) -> Rational {
    Rational::from((n, d))
}

#[test]
fn order_seven_leading_coefficient() {
    let mut lead = Poly::from_ints(&[0, 0, 0, 0, 0, 0, 0, 1]);
    for (f, k) in [(vec![1, -1], 1), (vec![1, 2], 1), (vec![1, -4], 5), (vec![1, 4], 3), (vec![1, 3, 4], 1)] {
        lead = &lead * &Poly::from_ints(&f).pow(k);
    }
    let mut coeffs = vec![Poly::zero(); 8];
    coeffs[0] = Poly::one();
    coeffs[7] = lead;
    let ode = FuchsianOde::new(coeffs).unwrap();
    let pts = singular_points(&ode);
    let labels: Vec<String> = pts.iter().take(5).map(|p| p.location.label()).collect();
    assert_eq!(labels, ["-1/2", "-1/4", "0", "1/4", "1"]);
    for (p, im) in pts[5..7].iter().zip([-1.0, 1.0]) {
        let Point::Algebraic(a) = &p.location else { panic!() };
        assert_eq!(a.minpoly, Poly::from_ints(&[1, 3, 4]));
        let (x, y) = a.enclosure.to_f64_pair();
        assert!((x + 0.375).abs() < 1e-12 && (y - im * 7f64.sqrt() / 8.0).abs() < 1e-12);
    }
    assert!(pts[7].location.is_infinity());
    assert_eq!(pts.len(), 8);
}

#[test]
fn ordinary_point_exponents() {
    let ode = FuchsianOde::gauss(&q(1, 3), &q(1, 5), &q(1, 2));
    let e = indicial_exponents(&ode, &Point::rational(1, 2)).unwrap();
    assert_eq!(e, vec![Exponent::Rational(q(0, 1)), Exponent::Rational(q(1, 1))]);
}

#[test]
fn irregular_point_exponents_fail() {
    let ode = FuchsianOde::from_ints(&[&[-1], &[0], &[1]]).unwrap();
    assert!(indicial_exponents(&ode, &Point::Infinity).is_err());
    assert!(is_fuchsian(&FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1))).0);
}

#[test]
fn wronskian_gauss() {
    let ode = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
    let r = wronskian_logderiv_check(&ode, &[BigComplex::from_rational(&q(1, 5), 70)], 50).unwrap();
    assert!(r < 1e-35, "{r}");
}

#[test]
fn wronskian_constant() {
    let ode = FuchsianOde::from_ints(&[&[0], &[0], &[1]]).unwrap();
    let r = wronskian_logderiv_check(&ode, &[BigComplex::from_rational(&q(3, 7), 40)], 30).unwrap();
    assert!(r < 1e-28);
}

#[test]
fn wronskian_random_order_three() {
    use rand::{Rng, SeedableRng};
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    let mut c: Vec<Vec<i64>> = (0..4).map(|_| (0..3).map(|_| rng.gen_range(-5..=5)).collect()).collect();
    c[3] = vec![1, 2, 3];
    let rows: Vec<&[i64]> = c.iter().map(|r| r.as_slice()).collect();
    let ode = FuchsianOde::from_ints(&rows).unwrap();
    let r = wronskian_logderiv_check(&ode, &[BigComplex::from_rational(&q(1, 3), 120)], 100).unwrap();
    assert!(r < 1e-85, "{r}");
}

#[test]
fn wronskian_rejects_singular_sample() {
    let ode = FuchsianOde::gauss(&q(1, 2), &q(1, 2), &q(1, 1));
    let z = BigComplex::from_f64(1e-6, 0.0, 30);
    assert!(wronskian_logderiv_check(&ode, &[z], 20).is_err());
}

fn exponent_sum(ode: &FuchsianOde) -> (BigComplex, usize) {
    let pts = singular_points(ode);
    let mut s = BigComplex::zero(40);
    for p in &pts {
        for e in &p.exponents {
            s = s + e.to_complex(40);
        }
    }
    (s, pts.len())
}

fn small_rational() -> impl Strategy<Value = Rational> {
    (-9i64..9, 1i64..6).prop_map(|(n, d)| q(n, d))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn fuchs_relation(a in small_rational(), b in small_rational(), c in small_rational()) {
        let ode = FuchsianOde::gauss(&a, &b, &c);
        let n = ode.order();
        let (s, m) = exponent_sum(&ode);
        let expect = (n * (n - 1) / 2) as f64 * (m as f64 - 2.0);
        prop_assert!((s.to_f64_pair().0 - expect).abs() < 1e-20 && s.to_f64_pair().1.abs() < 1e-20);
    }

    #[test]
    fn apparent_points_have_no_logs(k in 1i64..6, c0 in -3i64..3) {
        // w y'' - k y' + c0 w y = 0 has exponents {0, k+1} at 0
        let ode = FuchsianOde::from_ints(&[&[0, c0], &[-k], &[0, 1]]).unwrap();
        for p in singular_points(&ode) {
            if p.apparent == Some(true) {
                let b = local_basis(&ode, &p.location, 20).unwrap();
                prop_assert!(b.log_degrees().iter().all(|&d| d == 0));
                for e in b.exponents() {
                    let r = e.as_rational().unwrap().clone();
                    prop_assert!(r >= 0 && *r.denom() == 1);
                }
            }
        }
    }
}

#[test]
fn algebraic_point_fuchs_relation() {
    // (1+3w+4w^2) y'' + y = 0: two conjugate points, regular
    let ode = FuchsianOde::from_ints(&[&[1], &[0], &[1, 3, 4]]).unwrap();
    let (s, m) = exponent_sum(&ode);
    assert_eq!(m, 3);
    assert!((s.to_f64_pair().0 - 1.0).abs() < 1e-20);
}
