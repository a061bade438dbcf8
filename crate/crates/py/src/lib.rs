//! Python bindings. Exact values cross the boundary as "p/q" strings and
//! numeric values as decimal strings; structured results as JSON text.

use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;

use fuchsian::cli::parse_point;
use fuchsian::constants;
use fuchsian::frobenius::{annihilation_check, is_apparent, local_basis_with_digits};
use fuchsian::fuchsian::{singular_points, FuchsianOde};
use fuchsian::guess::{guess_ode as guess, SeriesData};
use fuchsian::ising;
use fuchsian::kernel::rational::{fmt_rational, parse_rational};
use fuchsian::kernel::BigComplex;
use fuchsian::monodromy::fixtures::chi3_fixture_checks;
use fuchsian::monodromy::{monodromy_generators, product_relation, Route};
use fuchsian::recognize::{recognize_matrix, ConstantBasis};
use fuchsian::transport::connect as connect_points;
use fuchsian::Error;

create_exception!(fuchsian_py, PrecisionError, PyException);
create_exception!(fuchsian_py, UnresolvedError, PyException);

fn err(e: Error) -> PyErr {
    match e {
        Error::PrecisionUnreachable(_) | Error::InsufficientPrecision(_) | Error::IllConditioned(_) => PrecisionError::new_err(e.to_string()),
        Error::NeedMoreTerms(_) => UnresolvedError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn rational(s: &str) -> PyResult<rug::Rational> {
    parse_rational(s).map_err(err)
}

/// A linear ODE with polynomial coefficients.
#[pyclass(name = "Ode", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyOde {
    inner: FuchsianOde,
}

#[pymethods]
impl PyOde {
    /// From coefficient lists `[a_0, a_1, ...]`, each ascending, as "p/q" strings.
    #[new]
    fn new(coeffs: Vec<Vec<String>>) -> PyResult<Self> {
        let text = serde_json::json!({ "coeffs": coeffs }).to_string();
        Ok(PyOde { inner: FuchsianOde::from_json(&text).map_err(err)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(PyOde { inner: FuchsianOde::from_json(text).map_err(err)? })
    }

    #[staticmethod]
    fn gauss(a: &str, b: &str, c: &str) -> PyResult<Self> {
        Ok(PyOde { inner: FuchsianOde::gauss(&rational(a)?, &rational(b)?, &rational(c)?) })
    }

    #[getter]
    fn order(&self) -> usize {
        self.inner.order()
    }

    fn coeffs(&self) -> Vec<Vec<String>> {
        self.inner.coeffs().iter().map(|p| p.coeffs().iter().map(fmt_rational).collect()).collect()
    }

    fn to_json(&self) -> String {
        self.inner.to_json().to_string()
    }

    /// List of (point label, exponent labels, apparent flag or None).
    fn singular_points(&self) -> Vec<(String, Vec<String>, Option<bool>)> {
        singular_points(&self.inner).iter().map(|s| (s.location.label(), s.exponents.iter().map(|e| e.label()).collect(), s.apparent)).collect()
    }

    #[pyo3(signature = (point, truncation=None))]
    fn is_apparent(&self, point: &str, truncation: Option<usize>) -> PyResult<bool> {
        let p = parse_point(point, &self.inner).map_err(err)?;
        is_apparent(&self.inner, &p, truncation).map_err(err)
    }

    /// Local Frobenius basis as JSON, with an exact annihilation check when
    /// the basis is rational.
    #[pyo3(signature = (point, truncation=20, digits=30))]
    fn frobenius(&self, point: &str, truncation: usize, digits: u32) -> PyResult<String> {
        let p = parse_point(point, &self.inner).map_err(err)?;
        let b = local_basis_with_digits(&self.inner, &p, truncation, digits).map_err(err)?;
        let mut v = b.to_json(digits as usize);
        if let Some(e) = b.exact() {
            v["annihilation"] = serde_json::json!(annihilation_check(e).iter().map(|(ok, _)| *ok).collect::<Vec<_>>());
        }
        Ok(v.to_string())
    }

    /// Connection matrix entries as (re, im) decimal strings.
    #[pyo3(signature = (source, target, digits=50))]
    fn connect(&self, source: &str, target: &str, digits: u32) -> PyResult<Vec<Vec<(String, String)>>> {
        let p = parse_point(source, &self.inner).map_err(err)?;
        let q = parse_point(target, &self.inner).map_err(err)?;
        let c = connect_points(&self.inner, &p, &q, digits).map_err(err)?;
        Ok(c.entries.iter().map(|r| r.iter().map(|z| z.to_decimal_strings(c.digits as usize)).collect()).collect())
    }

    /// Monodromy generators around `points` (waypoint `i·R` for infinity) and
    /// the product-relation residual, as JSON.
    #[pyo3(signature = (base, points, digits=50))]
    fn monodromy(&self, base: &str, points: Vec<String>, digits: u32) -> PyResult<String> {
        let b = parse_point(base, &self.inner).map_err(err)?;
        let radius = fuchsian::frobenius::finite_singularities(&self.inner, 20).iter().map(|z| z.abs_f64()).fold(0.0, f64::max);
        let mut routes = vec![];
        for s in &points {
            let p = parse_point(s, &self.inner).map_err(err)?;
            let ws = if p.is_infinity() { vec![BigComplex::from_f64(0.0, (radius + 1.0).ceil(), digits + 20)] } else { vec![] };
            routes.push(Route { point: p, waypoints: ws });
        }
        let gens = monodromy_generators(&self.inner, &b, &routes, digits).map_err(err)?;
        let rel = product_relation(&gens, digits);
        Ok(serde_json::json!({
            "generators": gens.iter().map(|g| g.to_json(g.digits as usize)).collect::<Vec<_>>(),
            "product_relation": rel.to_json(),
        })
        .to_string())
    }

    fn __repr__(&self) -> String {
        format!("Ode({})", self.inner)
    }

    fn __eq__(&self, other: &PyOde) -> bool {
        self.inner.coeffs() == other.inner.coeffs()
    }
}

/// Named constant as a decimal string.
#[pyfunction]
#[pyo3(signature = (name, digits=50))]
fn eval_constant(name: &str, digits: u32) -> PyResult<String> {
    let v = constants::eval_constant(name, digits + 10).map_err(err)?;
    Ok(fuchsian::kernel::complex::float_to_fixed(&v.re, digits as usize))
}

#[pyfunction]
#[pyo3(signature = (digits=200))]
fn i3_crosscheck(digits: u32) -> PyResult<String> {
    Ok(constants::i3_crosscheck(digits).map_err(err)?.to_json().to_string())
}

/// Guessed ODE for series coefficients ("p/q" strings), or None.
#[pyfunction]
#[pyo3(signature = (coeffs, max_order=4, max_degree=8))]
fn guess_ode(coeffs: Vec<String>, max_order: usize, max_degree: usize) -> PyResult<Option<PyOde>> {
    let c = coeffs.iter().map(|s| rational(s)).collect::<PyResult<Vec<_>>>()?;
    let s = SeriesData::new(c, "python").map_err(err)?;
    Ok(guess(&s, max_order, max_degree).map_err(err)?.map(|g| PyOde { inner: g.ode }))
}

/// Recognizes a matrix of (re, im) decimal strings over named constants;
/// returns the annotated JSON.
#[pyfunction]
#[pyo3(signature = (entries, basis, digits=60))]
fn recognize(entries: Vec<Vec<(String, String)>>, basis: Vec<String>, digits: u32) -> PyResult<String> {
    let m = entries
        .iter()
        .map(|r| r.iter().map(|(a, b)| BigComplex::parse(a, b, digits + 20).ok_or_else(|| PyValueError::new_err(format!("bad decimal {a} {b}")))).collect())
        .collect::<PyResult<Vec<Vec<_>>>>()?;
    let names: Vec<&str> = basis.iter().map(|s| s.as_str()).collect();
    let b = ConstantBasis::new(&names, digits).map_err(err)?;
    Ok(recognize_matrix(&m, &b, digits).to_json().to_string())
}

/// Nickel singularities as (w or None for infinity, |s|) pairs of decimal strings.
#[pyfunction]
#[pyo3(signature = (n, digits=30))]
fn nickel_singularities(n: u32, digits: u32) -> PyResult<Vec<(Option<String>, String)>> {
    let l = ising::nickel_singularities_with_digits(n, digits).map_err(err)?;
    Ok(l.iter()
        .map(|s| {
            (
                s.w.as_ref().map(|w| fuchsian::kernel::complex::float_to_sci(w, digits as usize)),
                fuchsian::kernel::complex::float_to_sci(&s.s_abs, digits as usize),
            )
        })
        .collect())
}

/// Series coefficients of the n-particle contribution through `w^t`.
#[pyfunction]
fn chi_tilde_series(n: usize, t: usize) -> PyResult<Vec<String>> {
    Ok(ising::chi_tilde_series(n, t).map_err(err)?.coeffs.iter().map(fmt_rational).collect())
}

#[pyfunction]
fn chi3_fixture_report() -> String {
    chi3_fixture_checks().to_json().to_string()
}

#[pymodule]
fn fuchsian_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyOde>()?;
    m.add_function(wrap_pyfunction!(eval_constant, m)?)?;
    m.add_function(wrap_pyfunction!(i3_crosscheck, m)?)?;
    m.add_function(wrap_pyfunction!(guess_ode, m)?)?;
    m.add_function(wrap_pyfunction!(recognize, m)?)?;
    m.add_function(wrap_pyfunction!(nickel_singularities, m)?)?;
    m.add_function(wrap_pyfunction!(chi_tilde_series, m)?)?;
    m.add_function(wrap_pyfunction!(chi3_fixture_report, m)?)?;
    m.add("PrecisionError", m.py().get_type::<PrecisionError>())?;
    m.add("UnresolvedError", m.py().get_type::<UnresolvedError>())?;
    Ok(())
}
