//! Python bindings for orbitcoeff.

use pyo3::exceptions::{PyNotImplementedError, PyValueError};
use pyo3::prelude::*;

use orbitcoeff::exactnum::{self, fmt_rat, parse_rat, PAdicPlace};
use orbitcoeff::expand::{self, FormalExpansion, Rep, Slot, Strategy};
use orbitcoeff::orbits::{self, ExceptionalGroup};
use orbitcoeff::spherical::{self, LocalValue, Realization, SphericalSpec};
use orbitcoeff::{Error, RationalMatrix};

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unsupported(m) => PyNotImplementedError::new_err(m),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn json<T: serde::Serialize>(v: &T) -> String {
    serde_json::to_string(v).expect("serializable value")
}

#[pyclass(name = "Partition", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct PyPartition(orbits::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(parts: Vec<usize>) -> PyResult<Self> {
        orbits::Partition::new(parts).map(PyPartition).map_err(py_err)
    }

    #[staticmethod]
    fn parse(s: &str) -> PyResult<Self> {
        s.parse().map(PyPartition).map_err(py_err)
    }

    #[getter]
    fn parts(&self) -> Vec<usize> {
        self.0.parts().to_vec()
    }

    #[getter]
    fn n(&self) -> usize {
        self.0.n()
    }

    fn conjugate(&self) -> Self {
        PyPartition(self.0.conjugate())
    }

    fn dimension(&self) -> PyResult<usize> {
        orbits::orbit_dimension(&self.0).map_err(py_err)
    }

    fn weighted_dynkin(&self) -> Vec<i64> {
        orbits::weighted_dynkin(&self.0)
    }

    /// Dominance order, i.e. closure of orbits.
    fn leq(&self, other: &PyPartition) -> PyResult<bool> {
        orbits::dominance_leq(&self.0, &other.0).map_err(py_err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Partition{}", self.0)
    }
}

#[pyclass(name = "Expansion", frozen)]
pub struct PyExpansion(FormalExpansion);

#[pymethods]
impl PyExpansion {
    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn to_json(&self) -> String {
        json(&self.0)
    }

    fn to_latex(&self) -> String {
        expand::expansion_latex(&self.0)
    }

    fn orbits(&self) -> PyResult<Vec<String>> {
        self.0.terms.iter().map(|t| t.orbit().map(|p| p.to_string()).map_err(py_err)).collect()
    }

    fn alpha_eq(&self, other: &PyExpansion) -> PyResult<bool> {
        self.0.alpha_eq(&other.0).map_err(py_err)
    }

    /// Filter by a representation: "generic", "min", "ntm" or a partition.
    fn filter(&self, rep: &str) -> PyResult<PyExpansion> {
        let n = self.0.terms.first().map_or(4, |t| t.kind.n());
        let rep = Rep::parse(rep, n).map_err(py_err)?;
        expand::apply_representation_filter(&self.0, &rep).map(PyExpansion).map_err(py_err)
    }
}

#[pyfunction]
fn orbit_catalog(n: usize) -> PyResult<String> {
    orbits::orbit_catalog(n).map(|c| json(&c)).map_err(py_err)
}

/// Jordan type of a nilpotent matrix given as rows of rational strings.
#[pyfunction]
fn jordan_type(rows: Vec<Vec<String>>) -> PyResult<PyPartition> {
    let rows = rows
        .iter()
        .map(|r| r.iter().map(|x| parse_rat(x)).collect::<orbitcoeff::Result<Vec<_>>>())
        .collect::<orbitcoeff::Result<Vec<_>>>()
        .map_err(py_err)?;
    let m = RationalMatrix::from_rows(rows).map_err(py_err)?;
    orbits::jordan_type(&m).map(PyPartition).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (coefficient, rep = "generic", strategy = "alpha2"))]
fn expand_coefficient(coefficient: &str, rep: &str, strategy: &str) -> PyResult<PyExpansion> {
    let c: expand::Coefficient = coefficient.parse().map_err(py_err)?;
    let rep = Rep::parse(rep, c.n()).map_err(py_err)?;
    let s: Strategy = strategy.parse().map_err(py_err)?;
    expand::expand_coefficient(c, &rep, s).map(PyExpansion).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (charge = "m'", strategy = "alpha2"))]
fn sl4_min_rep(charge: &str, strategy: &str) -> PyResult<PyExpansion> {
    let s: Strategy = strategy.parse().map_err(py_err)?;
    expand::sl4_min_rep(&Slot::nz(charge), s).map(PyExpansion).map_err(py_err)
}

#[pyfunction]
#[pyo3(signature = (charge = "m4'"))]
fn sl4_ntm(charge: &str) -> PyResult<PyExpansion> {
    expand::sl4_ntm(&Slot::nz(charge)).map(PyExpansion).map_err(py_err)
}

/// (rule name, pass, detail) for every registered rewrite rule.
#[pyfunction]
fn verify_rules() -> Vec<(String, bool, String)> {
    expand::registry()
        .iter()
        .map(|r| {
            let rep = expand::verify_rewrite_rule(r);
            (rep.rule, rep.pass, rep.detail)
        })
        .collect()
}

#[pyfunction]
fn divisor_sigma(s: u32, m: i64) -> PyResult<String> {
    exactnum::divisor_sigma(s, m).map(|v| v.to_string()).map_err(py_err)
}

#[pyfunction]
fn euler_sigma_product(s: u32, m: i64) -> PyResult<String> {
    exactnum::euler_sigma_product(s, m).map(|v| fmt_rat(&v)).map_err(py_err)
}

fn local_to_py(py: Python<'_>, v: LocalValue) -> PyResult<Py<PyAny>> {
    Ok(match v {
        LocalValue::Exact(r) => fmt_rat(&r).into_pyobject(py)?.into_any().unbind(),
        LocalValue::Real(x) => x.into_pyobject(py)?.into_any().unbind(),
    })
}

/// Exact values come back as "p/q" strings, Bessel-valued ones as floats.
#[pyfunction]
fn local_spherical(py: Python<'_>, group: &str, realization: &str, place: &str, x: &str) -> PyResult<Py<PyAny>> {
    let g: ExceptionalGroup = group.parse().map_err(py_err)?;
    let r: Realization = realization.parse().map_err(py_err)?;
    let place = if place == "inf" {
        PAdicPlace::Infinity
    } else {
        let p = place.parse().map_err(|_| PyValueError::new_err(format!("bad place {place:?}")))?;
        PAdicPlace::finite(p).map_err(py_err)?
    };
    let spec = SphericalSpec::new(g, r, place).map_err(py_err)?;
    let x = parse_rat(x).map_err(py_err)?;
    local_to_py(py, spherical::local_spherical(&spec, &x).map_err(py_err)?)
}

#[pyfunction]
fn cs_whittaker_sl2(py: Python<'_>, s: &str, v: &str, m: &str, p: u64) -> PyResult<Py<PyAny>> {
    let [s, v, m] = [s, v, m].map(parse_rat);
    let val = spherical::cs_whittaker_sl2(&s.map_err(py_err)?, &v.map_err(py_err)?, &m.map_err(py_err)?, p)
        .map_err(py_err)?;
    local_to_py(py, val)
}

#[pyfunction]
fn verify_factorization(group: &str, realization: &str, m: i64) -> PyResult<String> {
    let g: ExceptionalGroup = group.parse().map_err(py_err)?;
    let r: Realization = realization.parse().map_err(py_err)?;
    spherical::verify_factorization(g, r, m).map(|rep| json(&rep)).map_err(py_err)
}

#[pymodule]
pub fn orbitcoeff_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPartition>()?;
    m.add_class::<PyExpansion>()?;
    m.add_function(wrap_pyfunction!(orbit_catalog, m)?)?;
    m.add_function(wrap_pyfunction!(jordan_type, m)?)?;
    m.add_function(wrap_pyfunction!(expand_coefficient, m)?)?;
    m.add_function(wrap_pyfunction!(sl4_min_rep, m)?)?;
    m.add_function(wrap_pyfunction!(sl4_ntm, m)?)?;
    m.add_function(wrap_pyfunction!(verify_rules, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(euler_sigma_product, m)?)?;
    m.add_function(wrap_pyfunction!(local_spherical, m)?)?;
    m.add_function(wrap_pyfunction!(cs_whittaker_sl2, m)?)?;
    m.add_function(wrap_pyfunction!(verify_factorization, m)?)?;
    Ok(())
}
