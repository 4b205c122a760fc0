//! Python module `muord`.
//!
//! Build with `cargo build --release -p muord-py --features extension-module`
//! and copy `libmuord_py.so` to `muord.so` somewhere on `sys.path`.

use num_bigint::BigInt;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use muord::cm::{
    check_assumption_c, check_assumption_c_values, family, simple_signature_check, splitting_datum, MonodromyDatum,
};
use muord::counting::{lpolynomial_naive, lpolynomial_via_characters, DEFAULT_BUDGET};
use muord::harness::{classify_prime, predicted_densities, scan, DatumSpec, Instance, ScanConfig};
use muord::newton::{compare, mu_ordinary_polygon, NewtonPolygon};
use muord::weyl::{check_family, component_group};

fn err(e: muord::Error) -> PyErr {
    match e {
        muord::Error::InvalidInput(_) | muord::Error::BadPrime(_) | muord::Error::Scope(_) => PyValueError::new_err(e.to_string()),
        _ => PyRuntimeError::new_err(e.to_string()),
    }
}

fn json_to_py<'py>(py: Python<'py>, s: &str) -> PyResult<Bound<'py, PyAny>> {
    py.import("json")?.call_method1("loads", (s,))
}

/// Monodromy datum (m, a) of a cyclic cover; the last exponent belongs to ∞.
#[pyclass(name = "Datum", module = "muord", from_py_object)]
#[derive(Clone)]
struct PyDatum {
    inner: MonodromyDatum,
    name: String,
}

#[pymethods]
impl PyDatum {
    #[new]
    fn new(m: u64, a: Vec<u64>) -> PyResult<Self> {
        let inner = MonodromyDatum::new(m, a).map_err(err)?;
        let name = format!("datum({};{:?})", inner.m, inner.a);
        Ok(Self { inner, name })
    }

    #[staticmethod]
    fn family(name: &str) -> PyResult<Self> {
        let f = family(name).map_err(err)?;
        Ok(Self { inner: f.datum, name: f.name })
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.m
    }

    #[getter]
    fn a(&self) -> Vec<u64> {
        self.inner.a.clone()
    }

    #[getter]
    fn genus(&self) -> u64 {
        self.inner.genus_riemann_hurwitz()
    }

    /// (k, f(k)) for every unit k mod m.
    fn signature(&self) -> Vec<(u64, u64)> {
        let s = self.inner.signature();
        s.units().into_iter().zip(s.values.iter().copied()).collect()
    }

    /// (Φ, σ_1), or None when the signature is not simple.
    fn simple(&self) -> Option<(Vec<u64>, u64)> {
        simple_signature_check(&self.inner.signature()).ok().map(|s| (s.phi, s.sigma1))
    }

    fn assumption_c(&self) -> bool {
        check_assumption_c(&self.inner.signature())
    }

    /// Predicted μ-ordinary polygon at a prime (or residue class) p.
    fn mu_polygon(&self, p: u64) -> PyResult<String> {
        let sig = self.inner.signature();
        let simple = simple_signature_check(&sig).map_err(err)?;
        let split = splitting_datum(sig.m, p, &simple).map_err(err)?;
        Ok(mu_ordinary_polygon(&sig, &split).to_string())
    }

    fn __repr__(&self) -> String {
        format!("Datum(m={}, a={:?}) [{}]", self.inner.m, self.inner.a, self.name)
    }
}

/// A family member with rational branch points, ready to reduce mod p.
#[pyclass(name = "Curve", module = "muord")]
struct PyCurve {
    inst: Instance,
}

#[pymethods]
impl PyCurve {
    #[new]
    #[pyo3(signature = (family=None, datum=None, t=None, points=None, budget=DEFAULT_BUDGET))]
    fn new(family: Option<String>, datum: Option<PyDatum>, t: Option<i64>, points: Option<Vec<i64>>, budget: u64) -> PyResult<Self> {
        let cfg = ScanConfig {
            family,
            datum: datum.map(|d| DatumSpec { m: d.inner.m, n: None, a: d.inner.a }),
            t,
            branch_points: points,
            p_min: 3,
            p_max: 3,
            budget,
            prec: None,
            out_csv: None,
            cache_path: None,
        };
        Ok(Self { inst: cfg.resolve().map_err(err)? })
    }

    #[getter]
    fn points(&self) -> Vec<i64> {
        self.inst.finite_points.clone()
    }

    #[getter]
    fn genus(&self) -> u64 {
        self.inst.datum.genus_riemann_hurwitz()
    }

    /// Coefficients of L(T), constant term first.
    #[pyo3(signature = (p, naive=false))]
    fn lpoly(&self, py: Python<'_>, p: u64, naive: bool) -> PyResult<Vec<BigInt>> {
        let curve = self.inst.curve(p).map_err(err)?;
        let budget = self.inst.budget;
        let l = py
            .detach(|| if naive { lpolynomial_naive(&curve, budget) } else { lpolynomial_via_characters(&curve, budget) })
            .map_err(err)?;
        Ok(l.coeffs)
    }

    /// The scan record for one prime, as a dict.
    fn classify<'py>(&self, py: Python<'py>, p: u64) -> PyResult<Bound<'py, PyAny>> {
        let rec = py.detach(|| classify_prime(&self.inst, p));
        let s = serde_json::to_string(&rec).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
        json_to_py(py, &s)
    }

    fn __repr__(&self) -> String {
        format!("Curve({} [{}])", self.inst.name, self.inst.params())
    }
}

/// One dict per residue class: class, f, mu, ordinary.
#[pyfunction]
fn predict<'py>(py: Python<'py>, datum: &PyDatum) -> PyResult<Vec<Bound<'py, PyDict>>> {
    let preds = predicted_densities(&datum.inner, None).map_err(err)?;
    preds
        .classes
        .iter()
        .map(|c| {
            let d = PyDict::new(py);
            d.set_item("class", c.class)?;
            d.set_item("f", c.f)?;
            d.set_item("mu", c.mu.to_string())?;
            d.set_item("ordinary", c.mu.is_ordinary())?;
            Ok(d)
        })
        .collect()
}

/// "Equal", "Above", "Below" or "Incomparable" for two polygons in the
/// printed notation, e.g. "1/4^4 ⊕ 3/4^4".
#[pyfunction]
fn compare_polygons(nu: &str, mu: &str) -> PyResult<String> {
    let nu = NewtonPolygon::parse(nu).map_err(err)?;
    let mu = NewtonPolygon::parse(mu).map_err(err)?;
    Ok(format!("{:?}", compare(&nu, &mu).map_err(err)?))
}

#[pyfunction]
fn assumption_c_holds(m: u64, values: Vec<i64>) -> PyResult<bool> {
    let n = muord::ffield::units(m).len();
    if values.len() != n {
        return Err(PyValueError::new_err(format!("expected {n} values, one per unit mod {m}")));
    }
    Ok(check_assumption_c_values(m, &values))
}

#[pyfunction]
fn component_group_size(d: usize) -> usize {
    component_group(d).len()
}

/// Trace function reports for every (class, component) pair.
#[pyfunction]
#[pyo3(signature = (datum, class_=None, twist=true))]
fn weyl_check<'py>(py: Python<'py>, datum: &PyDatum, class_: Option<u64>, twist: bool) -> PyResult<Bound<'py, PyAny>> {
    let reports = py.detach(|| check_family(&datum.inner, class_, twist)).map_err(err)?;
    let s = serde_json::to_string(&reports).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    json_to_py(py, &s)
}

/// Run a scan from a JSON config file; returns the rendered summary.
#[pyfunction]
fn scan_config(py: Python<'_>, path: &str) -> PyResult<String> {
    let cfg = ScanConfig::from_json_file(std::path::Path::new(path)).map_err(err)?;
    let summary = py.detach(|| scan(&cfg)).map_err(err)?;
    Ok(summary.render())
}

#[pymodule]
#[pyo3(name = "muord")]
fn muord_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyDatum>()?;
    m.add_class::<PyCurve>()?;
    m.add_function(wrap_pyfunction!(predict, m)?)?;
    m.add_function(wrap_pyfunction!(compare_polygons, m)?)?;
    m.add_function(wrap_pyfunction!(assumption_c_holds, m)?)?;
    m.add_function(wrap_pyfunction!(component_group_size, m)?)?;
    m.add_function(wrap_pyfunction!(weyl_check, m)?)?;
    m.add_function(wrap_pyfunction!(scan_config, m)?)?;
    Ok(())
}
