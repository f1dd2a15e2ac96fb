//! Python bindings: radicands, exact field elements, Voronoi chains,
//! classification, M-class criteria and surveys.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use cubic_minima::classify::{classify_with, classify_with_mclass, ClassifyOptions};
use cubic_minima::criteria;
use cubic_minima::survey::{self as sv, SurveyOptions};
use cubic_minima::voronoi::{self, CubicOrder, OrderKind, StopRule};

create_exception!(cubic_minima_py, CubicMinimaError, PyException);

fn py_err(e: cubic_minima::Error) -> PyErr {
    CubicMinimaError::new_err(e.to_string())
}

/// Parses a serializable value into Python objects through the json module.
fn to_py<'py, T: serde::Serialize>(py: Python<'py>, v: &T) -> PyResult<Bound<'py, PyAny>> {
    let s = serde_json::to_string(v).map_err(|e| CubicMinimaError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (s,))
}

fn order_kind(name: &str) -> PyResult<OrderKind> {
    match name {
        "maximal" => Ok(OrderKind::Maximal),
        "suborder0" => Ok(OrderKind::SubOrder0),
        other => Err(CubicMinimaError::new_err(format!("unknown order {other:?}, use 'maximal' or 'suborder0'"))),
    }
}

#[pyclass(name = "Radicand", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRadicand {
    inner: cubic_minima::Radicand,
}

#[pymethods]
impl PyRadicand {
    #[new]
    fn new(m: u64) -> PyResult<Self> {
        Ok(PyRadicand { inner: cubic_minima::Radicand::normalize(m).map_err(py_err)? })
    }

    #[getter]
    fn d(&self) -> u64 {
        self.inner.d
    }
    #[getter]
    fn a(&self) -> u64 {
        self.inner.a
    }
    #[getter]
    fn b(&self) -> u64 {
        self.inner.b
    }
    #[getter]
    fn species(&self) -> String {
        self.inner.species.to_string()
    }
    #[getter]
    fn f(&self) -> u64 {
        self.inner.f
    }
    #[getter(R)]
    fn r(&self) -> u64 {
        self.inner.r
    }

    /// The three norms of the coset of `n`.
    fn coset_of(&self, n: u64) -> PyResult<[u64; 3]> {
        self.inner.coset_of(n).map_err(py_err)
    }

    fn canonical_split<'py>(&self, py: Python<'py>, n: u64) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.canonical_split(n).map_err(py_err)?)
    }

    fn __repr__(&self) -> String {
        let r = &self.inner;
        format!("Radicand(d={}, a={}, b={}, species={})", r.d, r.a, r.b, r.species)
    }
}

/// `(x + yδ + zδ̄) / den` in `Q(∛d)`, with exact arithmetic.
#[pyclass(name = "FieldElement", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyFieldElement {
    inner: cubic_minima::FieldElement,
}

impl PyFieldElement {
    fn same_field(&self, other: &Self) -> PyResult<()> {
        if self.inner.radicand() != other.inner.radicand() {
            return Err(py_err(cubic_minima::Error::MixedParents(self.inner.radicand().d, other.inner.radicand().d)));
        }
        Ok(())
    }
}

#[pymethods]
impl PyFieldElement {
    #[new]
    #[pyo3(signature = (d, x, y, z, den = BigInt::from(1)))]
    fn new(d: u64, x: BigInt, y: BigInt, z: BigInt, den: BigInt) -> PyResult<Self> {
        let r = cubic_minima::Radicand::normalize(d).map_err(py_err)?;
        if den == BigInt::from(0) {
            return Err(CubicMinimaError::new_err("zero denominator"));
        }
        Ok(PyFieldElement { inner: cubic_minima::FieldElement::new(r, [x, y, z], den) })
    }

    #[getter]
    fn d(&self) -> u64 {
        self.inner.radicand().d
    }

    /// Reduced numerators `(x, y, z)`.
    #[getter]
    fn coords(&self) -> [BigInt; 3] {
        self.inner.numerators().clone()
    }

    #[getter]
    fn denominator(&self) -> BigInt {
        self.inner.denominator().clone()
    }

    /// Exact norm as `(numerator, denominator)`.
    fn norm(&self) -> (BigInt, BigInt) {
        let n = self.inner.norm();
        (n.numer().clone(), n.denom().clone())
    }

    /// `θ'θ''`, so that `θ · conjugate_product() = N(θ)`.
    fn conjugate_product(&self) -> Self {
        PyFieldElement { inner: self.inner.conjugate_product() }
    }

    /// Exact sign of the real embedding.
    fn sign(&self) -> i8 {
        self.inner.sign()
    }

    /// Real embedding as a float.
    fn approx(&self) -> f64 {
        self.inner.approx()
    }

    fn inverse(&self) -> PyResult<Self> {
        Ok(PyFieldElement { inner: self.inner.inverse().map_err(py_err)? })
    }

    fn in_maximal_order(&self) -> bool {
        self.inner.in_maximal_order()
    }

    fn __mul__(&self, other: &Self) -> PyResult<Self> {
        self.same_field(other)?;
        Ok(PyFieldElement { inner: &self.inner * &other.inner })
    }

    fn __add__(&self, other: &Self) -> PyResult<Self> {
        self.same_field(other)?;
        Ok(PyFieldElement { inner: &self.inner + &other.inner })
    }

    fn __sub__(&self, other: &Self) -> PyResult<Self> {
        self.same_field(other)?;
        Ok(PyFieldElement { inner: &self.inner - &other.inner })
    }

    fn __neg__(&self) -> Self {
        PyFieldElement { inner: -&self.inner }
    }

    fn __pow__(&self, e: u32, _modulo: Option<u32>) -> Self {
        PyFieldElement { inner: self.inner.pow(e) }
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("FieldElement(d={}, {})", self.inner.radicand().d, self.inner)
    }
}

/// Is `e` a lattice minimum of the given order?
#[pyfunction]
#[pyo3(signature = (e, order = "maximal"))]
fn is_minimum(e: &PyFieldElement, order: &str) -> PyResult<bool> {
    let o = CubicOrder::new(*e.inner.radicand(), order_kind(order)?);
    voronoi::is_lattice_minimum(&o, &e.inner).map_err(py_err)
}

/// Voronoi chain of minima as a list of `(index, element, norm)`, stopping
/// after one period (`stop="full"`) or at the first principal factor.
#[pyfunction]
#[pyo3(signature = (d, order = "maximal", stop = "full"))]
fn chain(d: u64, order: &str, stop: &str) -> PyResult<Vec<(i64, PyFieldElement, BigInt)>> {
    let r = cubic_minima::Radicand::normalize(d).map_err(py_err)?;
    let stop = match stop {
        "full" => StopRule::FullPeriod,
        "first_pf" => StopRule::FirstPF,
        other => return Err(CubicMinimaError::new_err(format!("unknown stop rule {other:?}"))),
    };
    let s = voronoi::run_chain(&CubicOrder::new(r, order_kind(order)?), stop).map_err(py_err)?;
    Ok(s.records.into_iter().map(|rec| (rec.index, PyFieldElement { inner: rec.element }, rec.norm)).collect())
}

/// Principal factorization type and evidence as a dict; `mclass=True` adds the
/// M-class of a type-β field.
#[pyfunction]
#[pyo3(signature = (d, mclass = false, full_period = false))]
fn classify<'py>(py: Python<'py>, d: u64, mclass: bool, full_period: bool) -> PyResult<Bound<'py, PyAny>> {
    let opts = ClassifyOptions { full_period, ..Default::default() };
    let c = if mclass { classify_with_mclass(d, &opts) } else { classify_with(d, &opts) };
    to_py(py, &c.map_err(py_err)?)
}

/// M-class of `Q(∛d)` from the norm of one principal factor.
#[pyfunction]
fn m_class<'py>(py: Python<'py>, d: u64, n: u64) -> PyResult<Bound<'py, PyAny>> {
    let r = cubic_minima::Radicand::normalize(d).map_err(py_err)?;
    to_py(py, &criteria::m_class(&r, n).map_err(py_err)?)
}

/// Criterion verdict for the principal factor of norm `n` in the given order.
#[pyfunction]
#[pyo3(signature = (d, n, order = "maximal"))]
fn predict_minimum<'py>(py: Python<'py>, d: u64, n: u64, order: &str) -> PyResult<Bound<'py, PyAny>> {
    let r = cubic_minima::Radicand::normalize(d).map_err(py_err)?;
    let input = criteria::CriterionInput::new(&r, n).map_err(py_err)?;
    to_py(py, &criteria::predict_minimum(&input, order_kind(order)?).map_err(py_err)?)
}

/// Survey of `lo ≤ d ≤ hi`, returned as `(summary, records)`.
#[pyfunction]
#[pyo3(signature = (lo, hi, mclass = false, workers = 1))]
fn survey<'py>(py: Python<'py>, lo: u64, hi: u64, mclass: bool, workers: usize) -> PyResult<Bound<'py, PyAny>> {
    let opts = SurveyOptions { workers, mclass, ..Default::default() };
    let (summary, records) = py.detach(|| sv::survey(lo, hi, &opts)).map_err(py_err)?;
    to_py(py, &(summary, records))
}

/// The two justification rows `[y, C, coarse, P2, B]` of a species-2 field.
#[pyfunction]
fn justify(d: u64) -> PyResult<[[String; 5]; 2]> {
    Ok(sv::justify(d, &ClassifyOptions::default()).map_err(py_err)?.cosets)
}

/// `(√6, (−1+√33)/2, Z+)`.
#[pyfunction]
fn constants() -> (f64, f64, f64) {
    (criteria::bound_b(-1).value(), criteria::bound_c(1).value(), criteria::z_plus())
}

#[pymodule]
fn cubic_minima_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CubicMinimaError", m.py().get_type::<CubicMinimaError>())?;
    m.add_class::<PyRadicand>()?;
    m.add_class::<PyFieldElement>()?;
    m.add_function(wrap_pyfunction!(is_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(chain, m)?)?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(m_class, m)?)?;
    m.add_function(wrap_pyfunction!(predict_minimum, m)?)?;
    m.add_function(wrap_pyfunction!(survey, m)?)?;
    m.add_function(wrap_pyfunction!(justify, m)?)?;
    m.add_function(wrap_pyfunction!(constants, m)?)?;
    Ok(())
}
