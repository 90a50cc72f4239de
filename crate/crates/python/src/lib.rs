//! Python bindings: `import etaforms`.
//!
//! Rationals cross the boundary as `"p/q"` strings and series as lists of
//! `(numerator, denominator, exponent)` triples with exponents in units of
//! `1/scale`. Large integers are returned as Python ints.

use std::collections::BTreeMap;

use pyo3::exceptions::{PyArithmeticError, PyValueError};
use pyo3::prelude::*;

use etaforms_core::arith::{format_rational, prime_power};
use etaforms_core::cusps::{cusp_reps, maingen_suite, order_at_cusp};
use etaforms_core::eisenstein::{match_eta, verify_identities};
use etaforms_core::search::{
    antiderivative, dual_pairs_prime_power, enumerate_eta_in_e, second_derivative_ratio, verify_corollary_lists,
    verify_second_derivatives,
};
use etaforms_core::{Cusp, Error, QSeries};

fn err(e: Error) -> PyErr {
    match e {
        Error::PrecisionExhausted(_) | Error::DivisionByNonunit(_) => PyArithmeticError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

type Triple = (BigIntPy, BigIntPy, i64);

/// A `num_bigint::BigInt` converted through its decimal form.
struct BigIntPy(String);

impl<'py> IntoPyObject<'py> for BigIntPy {
    type Target = PyAny;
    type Output = Bound<'py, PyAny>;
    type Error = PyErr;

    fn into_pyobject(self, py: Python<'py>) -> PyResult<Self::Output> {
        py.get_type::<pyo3::types::PyInt>().call1((self.0,))
    }
}

fn triples(s: &QSeries) -> Vec<Triple> {
    s.terms()
        .map(|(e, c)| (BigIntPy(c.numer().to_string()), BigIntPy(c.denom().to_string()), e))
        .collect()
}

#[pyclass(name = "EtaQuotient", module = "etaforms", frozen, skip_from_py_object, eq, hash)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct PyEtaQuotient(etaforms_core::EtaQuotient);

#[pymethods]
impl PyEtaQuotient {
    /// `EtaQuotient({1: -8, 2: 20, 4: -8}, level=None)`.
    #[new]
    #[pyo3(signature = (exponents, level=None))]
    fn new(exponents: BTreeMap<u64, i64>, level: Option<u64>) -> PyResult<Self> {
        let q = match level {
            Some(n) => etaforms_core::EtaQuotient::new(n, exponents),
            None => etaforms_core::EtaQuotient::from_exponents(exponents),
        };
        q.map(Self).map_err(err)
    }

    /// Parses `"eta(1)^-8*eta(2)^20*eta(4)^-8"`.
    #[staticmethod]
    #[pyo3(signature = (s, level=None))]
    fn parse(s: &str, level: Option<u64>) -> PyResult<Self> {
        etaforms_core::EtaQuotient::parse_with_level(s, level).map(Self).map_err(err)
    }

    #[getter]
    fn level(&self) -> u64 {
        self.0.level()
    }

    #[getter]
    fn exponents(&self) -> BTreeMap<u64, i64> {
        self.0.exponents().clone()
    }

    #[getter]
    fn weight(&self) -> String {
        format_rational(&self.0.weight())
    }

    /// Returns `(scale, triples)` for the expansion known modulo `q^prec`.
    fn expansion(&self, prec: i64) -> PyResult<(u64, Vec<Triple>)> {
        let s = self.0.expansion(prec).map_err(err)?;
        Ok((s.scale(), triples(&s)))
    }

    fn order_at_denominator(&self, c: u64) -> PyResult<String> {
        self.0.order_at_denominator(c).map(|o| format_rational(&o)).map_err(err)
    }

    fn is_holomorphic_form(&self) -> bool {
        self.0.modularity().is_holomorphic_form()
    }

    fn is_primitive(&self) -> bool {
        self.0.is_primitive()
    }

    /// The Eisenstein element equal to this quotient, if any.
    fn match_eisenstein(&self) -> PyResult<Option<PyEisensteinElement>> {
        Ok(match_eta(&self.0).map_err(err)?.map(PyEisensteinElement))
    }

    /// `D(f)/f` as a combination of `E_2(tz)`.
    fn log_derivative(&self) -> String {
        self.0.log_derivative().to_string()
    }

    /// `(F, G, scalar)` with `D(F) = scalar * G` for a weight-2 quotient in `E_2(N)`.
    fn antiderivative(&self) -> PyResult<(Self, Self, i64)> {
        let p = antiderivative(&self.0).map_err(err)?;
        Ok((Self(p.f), Self(p.g), p.scalar))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("EtaQuotient('{}', level={})", self.0, self.0.level())
    }
}

#[pyclass(name = "EisensteinElement", module = "etaforms", frozen, skip_from_py_object, eq)]
#[derive(Clone, PartialEq)]
struct PyEisensteinElement(etaforms_core::EisensteinElement);

#[pymethods]
impl PyEisensteinElement {
    /// Parses `"8*E2(1)-32*E2(4)"`.
    #[staticmethod]
    #[pyo3(signature = (s, level=None))]
    fn parse(s: &str, level: Option<u64>) -> PyResult<Self> {
        etaforms_core::EisensteinElement::parse_with_level(s, level).map(Self).map_err(err)
    }

    #[getter]
    fn weight(&self) -> u32 {
        self.0.weight()
    }

    #[getter]
    fn level(&self) -> u64 {
        self.0.level()
    }

    #[getter]
    fn coeffs(&self) -> BTreeMap<u64, String> {
        self.0.coeffs().iter().map(|(t, c)| (*t, format_rational(c))).collect()
    }

    fn expansion(&self, prec: i64) -> PyResult<Vec<Triple>> {
        self.0.expansion(prec).map(|s| triples(&s)).map_err(err)
    }

    /// One of `in_P`, `in_O_lower_level`, `in_O_rescaled`, `zero`.
    fn classify(&self) -> PyResult<String> {
        self.0.classify().map(|t| t.to_string()).map_err(err)
    }

    /// Order of vanishing at the cusp `"a/c"`.
    fn order_at_cusp(&self, cusp: &str) -> PyResult<u64> {
        let c = Cusp::parse(cusp, self.0.level()).map_err(err)?;
        order_at_cusp(&self.0, &c, None).map_err(err)
    }

    /// `[(cusp, order)]` over a full set of cusp representatives.
    fn orders(&self) -> PyResult<Vec<(String, u64)>> {
        cusp_reps(self.0.level())
            .iter()
            .map(|c| order_at_cusp(&self.0, c, None).map(|o| (c.to_string(), o)))
            .collect::<Result<_, _>>()
            .map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("EisensteinElement('{}', level={})", self.0, self.0.level())
    }
}

/// Eta quotients of prime power `level` lying in the weight-`weight` Eisenstein space.
#[pyfunction]
fn search(weight: u32, level: u64) -> PyResult<Vec<(PyEtaQuotient, PyEisensteinElement)>> {
    let (p, m) = prime_power(level)
        .filter(|&(p, _)| p > 1)
        .or((level == 1).then_some((2, 0)))
        .ok_or_else(|| PyValueError::new_err(format!("level {level} is not a prime power")))?;
    let r = enumerate_eta_in_e(weight, p, m).map_err(err)?;
    Ok(r.pairs
        .into_iter()
        .map(|x| (PyEtaQuotient(x.eta), PyEisensteinElement(x.eisenstein)))
        .collect())
}

/// `(s_1, s_2, s_4)` as strings for `r_1 + r_2 + r_4 = -2`.
#[pyfunction]
fn second_derivative_coefficients(r1: i64, r2: i64, r4: i64) -> PyResult<(String, String, String)> {
    let [a, b, c] = second_derivative_ratio([r1, r2, r4]).map_err(err)?;
    Ok((format_rational(&a), format_rational(&b), format_rational(&c)))
}

/// Runs a verification suite and returns its JSON report.
#[pyfunction]
#[pyo3(signature = (suite, seed=1, samples=100))]
fn verify(py: Python<'_>, suite: &str, seed: u64, samples: usize) -> PyResult<String> {
    let suite = suite.to_owned();
    py.detach(move || {
        let v = match suite.as_str() {
            "identities" => serde_json::to_value(verify_identities(None)?),
            "corollaries" => serde_json::to_value((verify_corollary_lists()?, dual_pairs_prime_power()?)),
            "maingen" => serde_json::to_value(maingen_suite(
                &[2, 4, 8, 16, 32, 3, 9, 27, 5, 25, 7, 49],
                &[2, 4, 6],
                samples,
                seed,
            )?),
            "second-derivative" => serde_json::to_value(verify_second_derivatives()?),
            other => return Err(Error::Domain(format!("unknown suite {other}"))),
        };
        Ok(v.expect("serializable report").to_string())
    })
    .map_err(err)
}

#[pymodule]
fn etaforms(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyEtaQuotient>()?;
    m.add_class::<PyEisensteinElement>()?;
    m.add_function(wrap_pyfunction!(search, m)?)?;
    m.add_function(wrap_pyfunction!(second_derivative_coefficients, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
