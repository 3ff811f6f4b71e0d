//! Python bindings: the main types and operations of the treelike engine.
//!
//! Exact values cross the boundary as strings ("-1/128") or as
//! (mantissa, exponent) pairs; trees as their text form.

use std::collections::BTreeSet;

use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use treelike::amalgam::{enumerate_amalgamations, AmalgamationDiagram};
use treelike::category::{gram_semisimplicity, hom_basis, point_power_multiplicities};
use treelike::dyadic::Dyadic;
use treelike::measure::{enumerate_measures, Measure};
use treelike::ring::{reduce_marked, MarkedStructure};
use treelike::subclass::{
    enumerate_induced, enumerate_subclasses, f_recurrence, support_of, InducedSubclassSpec,
};
use treelike::tree::{enumerate_structures, ColoredTree};
use treelike::verify;

fn value_err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn dyadic_py<'py>(py: Python<'py>, d: &Dyadic) -> PyResult<Bound<'py, PyDict>> {
    let dict = PyDict::new(py);
    dict.set_item("str", d.to_string())?;
    dict.set_item("mantissa", d.mantissa().to_string())?;
    dict.set_item("exponent", d.exponent())?;
    Ok(dict)
}

/// A node-colored rooted binary tree structure.
#[pyclass(name = "Tree", frozen)]
struct PyTree {
    inner: ColoredTree,
    n: u8,
}

#[pymethods]
impl PyTree {
    /// Parse the text form, e.g. "(1 * (2 * *))"; "()" is empty.
    #[new]
    fn new(text: &str, n: u8) -> PyResult<Self> {
        let inner = ColoredTree::parse(text, n).map_err(value_err)?;
        Ok(PyTree { inner, n })
    }

    fn text(&self) -> String {
        self.inner.to_text()
    }

    fn canonical(&self) -> PyTree {
        PyTree { inner: self.inner.canonicalize(), n: self.n }
    }

    #[getter]
    fn leaf_count(&self) -> u32 {
        self.inner.leaf_count()
    }

    #[getter]
    fn colors(&self) -> u8 {
        self.n
    }

    fn is_isomorphic(&self, other: &PyTree) -> bool {
        self.inner.is_isomorphic(&other.inner)
    }

    /// S(a, b, c) on leaf positions.
    fn relation_s(&self, a: u32, b: u32, c: u32) -> bool {
        self.inner.relation_s(a, b, c)
    }

    fn restrict(&self, leaves: Vec<u32>) -> PyResult<PyTree> {
        let subset: BTreeSet<u32> = leaves.into_iter().collect();
        let inner = self.inner.restrict(&subset).map_err(value_err)?;
        Ok(PyTree { inner, n: self.n })
    }

    fn automorphism_count(&self) -> u128 {
        self.inner.automorphism_count()
    }

    /// Generator symbol of the one-point extension marked at a leaf.
    fn marked_class(&self, leaf: u32) -> PyResult<String> {
        let g = reduce_marked(&MarkedStructure { tree: self.inner.clone(), marked: leaf })
            .map_err(value_err)?;
        Ok(g.to_string())
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?}, n={})", self.inner.to_text(), self.n)
    }
}

/// A measure, keyed by its labeled directed tree.
#[pyclass(name = "Measure", frozen)]
struct PyMeasure {
    inner: Measure,
}

#[pymethods]
impl PyMeasure {
    #[getter]
    fn n(&self) -> u8 {
        self.inner.n()
    }

    fn key(&self) -> String {
        self.inner.key()
    }

    fn is_regular(&self) -> bool {
        self.inner.is_regular()
    }

    fn b<'py>(&self, py: Python<'py>, i: u8) -> PyResult<Bound<'py, PyDict>> {
        dyadic_py(py, &self.inner.b_value(i))
    }

    fn c<'py>(&self, py: Python<'py>, i: u8, j: u8) -> PyResult<Bound<'py, PyDict>> {
        dyadic_py(py, &self.inner.c_value(i, j))
    }

    fn s<'py>(&self, py: Python<'py>, i: u8) -> PyResult<Bound<'py, PyDict>> {
        dyadic_py(py, &self.inner.s_value(i))
    }

    /// Exact value on a structure, as a string like "8" or "-1/128".
    fn evaluate(&self, tree: &PyTree) -> PyResult<String> {
        Ok(self.inner.evaluate(&tree.inner).map_err(value_err)?.to_string())
    }

    /// Name of the support in the two-color table vocabulary.
    fn support_name(&self) -> String {
        verify::support_name(&support_of(&self.inner))
    }

    /// JSON form (round-trips through `measure_from_json`).
    fn to_json(&self) -> String {
        serde_json::to_string(&self.inner).expect("measures serialize")
    }

    fn __repr__(&self) -> String {
        format!("Measure({})", self.inner.key())
    }
}

/// All isomorphism classes with the given leaf count, plus the number of
/// leaf-labeled structures.
#[pyfunction]
fn structures(n: u8, leaves: u32) -> PyResult<(Vec<PyTree>, u128)> {
    if n == 0 || leaves > 10 {
        return Err(PyValueError::new_err("need n >= 1 and leaves <= 10"));
    }
    let (classes, labeled) = enumerate_structures(n, leaves);
    Ok((classes.into_iter().map(|inner| PyTree { inner, n }).collect(), labeled))
}

/// All (2n+2)^n measures for a color count.
#[pyfunction]
fn measures(n: u8) -> PyResult<Vec<PyMeasure>> {
    if !(1..=4).contains(&n) {
        return Err(PyValueError::new_err("n must lie in 1..=4"));
    }
    Ok(enumerate_measures(n).into_iter().map(|inner| PyMeasure { inner }).collect())
}

#[pyfunction]
fn measure_from_json(text: &str) -> PyResult<PyMeasure> {
    let inner: Measure = serde_json::from_str(text).map_err(value_err)?;
    Ok(PyMeasure { inner })
}

/// The measure whose support is the induced subclass with the given color
/// order (default natural) and repeatable colors.
#[pyfunction]
#[pyo3(signature = (n, repeats, order = None))]
fn induced_measure(n: u8, repeats: Vec<u8>, order: Option<Vec<u8>>) -> PyResult<PyMeasure> {
    let order = order.unwrap_or_else(|| (1..=n).collect());
    let spec = InducedSubclassSpec::new(n, order, repeats.into_iter().collect());
    Ok(PyMeasure { inner: spec.extension_measure() })
}

/// Closed-form value of the induced regular measure on a member tree.
#[pyfunction]
#[pyo3(signature = (n, repeats, tree, order = None))]
fn induced_value(n: u8, repeats: Vec<u8>, tree: &PyTree, order: Option<Vec<u8>>) -> PyResult<String> {
    let order = order.unwrap_or_else(|| (1..=n).collect());
    let spec = InducedSubclassSpec::new(n, order, repeats.into_iter().collect());
    Ok(spec.value(&tree.inner).map_err(value_err)?.to_string())
}

/// Number of subclasses in which all n colors appear, by direct count.
#[pyfunction]
fn subclass_count(n: u8) -> PyResult<usize> {
    if !(1..=5).contains(&n) {
        return Err(PyValueError::new_err("n must lie in 1..=5"));
    }
    Ok(enumerate_subclasses(n).len())
}

/// The same number from the recurrence.
#[pyfunction]
fn subclass_recurrence(n: u32) -> u128 {
    f_recurrence(n)
}

#[pyfunction]
fn induced_subclass_count(n: u8) -> PyResult<usize> {
    if !(1..=5).contains(&n) {
        return Err(PyValueError::new_err("n must lie in 1..=5"));
    }
    Ok(enumerate_induced(n).len())
}

/// Amalgamations of x and y over the empty structure: list of total texts.
#[pyfunction]
fn amalgamations(x: &PyTree, y: &PyTree) -> PyResult<Vec<String>> {
    let n = x.n.max(y.n);
    let diagram = AmalgamationDiagram::over_empty(x.inner.clone(), y.inner.clone());
    let amalgs = enumerate_amalgamations(&diagram, n, 8).map_err(value_err)?;
    Ok(amalgs.into_iter().map(|a| a.total.to_text()).collect())
}

/// Dimension of Hom(x, y) in the category (the number of amalgamation
/// classes).
#[pyfunction]
fn hom_dim(x: &PyTree, y: &PyTree) -> PyResult<usize> {
    let n = x.n.max(y.n);
    Ok(hom_basis(&x.inner, &y.inner, n, 8).map_err(value_err)?.len())
}

/// Gram report on End(Vec_x): dict with dim, rank, det, nondegenerate.
#[pyfunction]
#[pyo3(signature = (measure, tree, restrict_to_support = false))]
fn gram<'py>(
    py: Python<'py>,
    measure: &PyMeasure,
    tree: &PyTree,
    restrict_to_support: bool,
) -> PyResult<Bound<'py, PyDict>> {
    let subclass = restrict_to_support.then(|| support_of(&measure.inner));
    let report = gram_semisimplicity(&measure.inner, &tree.inner, subclass.as_ref(), 8)
        .map_err(value_err)?;
    let dict = PyDict::new(py);
    dict.set_item("object", report.object)?;
    dict.set_item("dim", report.dim)?;
    dict.set_item("rank", report.rank)?;
    dict.set_item("det", report.det.to_string())?;
    dict.set_item("nondegenerate", report.nondegenerate)?;
    Ok(dict)
}

/// Multiplicity of each structure in the m-th tensor power of the one-leaf
/// object, as {tree text: count}.
#[pyfunction]
fn point_power<'py>(py: Python<'py>, n: u8, m: u32) -> PyResult<Bound<'py, PyDict>> {
    if m > 6 {
        return Err(PyValueError::new_err("tensor powers supported up to m = 6"));
    }
    let mult = point_power_multiplicities(n, m, 12).map_err(value_err)?;
    let dict = PyDict::new(py);
    for (t, k) in mult {
        dict.set_item(t.to_text(), k)?;
    }
    Ok(dict)
}

/// Runs a named verification suite; returns (passed, lines).
#[pyfunction]
fn run_suite(name: &str) -> PyResult<(bool, Vec<(String, bool, String)>)> {
    let report = verify::run_suite(name).ok_or_else(|| {
        PyRuntimeError::new_err(format!(
            "unknown suite {name:?}; available: {}",
            verify::SUITE_NAMES.join(", ")
        ))
    })?;
    let lines =
        report.lines.iter().map(|l| (l.label.clone(), l.pass, l.detail.clone())).collect();
    Ok((report.pass(), lines))
}

#[pymodule(name = "treelike")]
fn treelike_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyTree>()?;
    m.add_class::<PyMeasure>()?;
    m.add_function(wrap_pyfunction!(structures, m)?)?;
    m.add_function(wrap_pyfunction!(measures, m)?)?;
    m.add_function(wrap_pyfunction!(measure_from_json, m)?)?;
    m.add_function(wrap_pyfunction!(induced_measure, m)?)?;
    m.add_function(wrap_pyfunction!(induced_value, m)?)?;
    m.add_function(wrap_pyfunction!(subclass_count, m)?)?;
    m.add_function(wrap_pyfunction!(subclass_recurrence, m)?)?;
    m.add_function(wrap_pyfunction!(induced_subclass_count, m)?)?;
    m.add_function(wrap_pyfunction!(amalgamations, m)?)?;
    m.add_function(wrap_pyfunction!(hom_dim, m)?)?;
    m.add_function(wrap_pyfunction!(gram, m)?)?;
    m.add_function(wrap_pyfunction!(point_power, m)?)?;
    m.add_function(wrap_pyfunction!(run_suite, m)?)?;
    Ok(())
}
