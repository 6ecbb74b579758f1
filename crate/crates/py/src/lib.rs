//! Python bindings. Rich results cross the boundary as JSON-derived dicts;
//! the main objects are wrapped so they can be passed back in.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use quadric_cto::bundles::{self, BundleMatrix};
use quadric_cto::cohomology::{self, CohClass};
use quadric_cto::cto::{self, Family, IndexMap, DEFAULT_MAX_RESAMPLE};
use quadric_cto::forms::HomogeneousForm;
use quadric_cto::square_classes::{FactorTable, FactoredForm};

fn value_error(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_dict<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_error)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn family(name: &str) -> PyResult<Family> {
    Family::parse(name).ok_or_else(|| value_error(format!("unknown family {name:?}; use c, cprime, ctilde or ctildeprime")))
}

#[pyclass(name = "ArrangementConfig", module = "quadric_cto", frozen, from_py_object)]
#[derive(Clone)]
struct PyArrangementConfig {
    inner: cto::ArrangementConfig,
}

#[pymethods]
impl PyArrangementConfig {
    /// Samples a general arrangement on P^n from `seed`.
    #[staticmethod]
    #[pyo3(signature = (n, seed, max_resample = DEFAULT_MAX_RESAMPLE))]
    fn generate(n: usize, seed: u64, max_resample: usize) -> PyResult<Self> {
        Ok(Self { inner: cto::ArrangementConfig::generate(n, seed, max_resample).map_err(value_error)? })
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(value_error)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n
    }

    #[getter]
    fn seed(&self) -> u64 {
        self.inner.seed
    }

    #[getter]
    fn resamples(&self) -> usize {
        self.inner.resamples
    }

    #[getter]
    fn lines(&self) -> Vec<String> {
        self.inner.lines.iter().map(ToString::to_string).collect()
    }

    /// The quadric `g_(j, eps)` as text.
    fn g(&self, j: usize, eps: usize) -> PyResult<String> {
        if !(1..=2).contains(&j) || eps >= self.inner.num_eps() {
            return Err(value_error(format!("no g_({j},{eps})")));
        }
        Ok(self.inner.g_form(j, eps).to_string())
    }

    fn verify(&self) -> PyResult<PyCtoCertificate> {
        Ok(PyCtoCertificate { inner: cto::verify_cto(&self.inner).map_err(value_error)? })
    }

    fn ledger(&self) -> PyResult<PyCoefficientLedger> {
        let map = IndexMap::natural(self.inner.n);
        Ok(PyCoefficientLedger { inner: cto::build_ledger(&self.inner, &map).map_err(value_error)? })
    }

    fn __repr__(&self) -> String {
        format!("ArrangementConfig(n={}, seed={}, resamples={})", self.inner.n, self.inner.seed, self.inner.resamples)
    }
}

#[pyclass(name = "CtoCertificate", module = "quadric_cto", frozen)]
struct PyCtoCertificate {
    inner: cto::CtoCertificate,
}

#[pymethods]
impl PyCtoCertificate {
    /// "certified", "failed" or "cannot_certify".
    #[getter]
    fn verdict(&self) -> PyResult<String> {
        serde_json::to_value(self.inner.verdict)
            .map_err(value_error)?
            .as_str()
            .map(str::to_string)
            .ok_or_else(|| value_error("verdict is not a string"))
    }

    #[getter]
    fn certified(&self) -> bool {
        self.inner.verdict == cto::CtoVerdict::Certified
    }

    #[getter]
    fn config_hash(&self) -> String {
        self.inner.config_hash.clone()
    }

    fn failing_checks(&self) -> Vec<String> {
        self.inner.failing_checks().into_iter().map(str::to_string).collect()
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_dict(py, &self.inner)
    }

    fn __repr__(&self) -> String {
        format!("CtoCertificate(verdict={:?}, failing={:?})", self.inner.verdict, self.inner.failing_checks())
    }
}

#[pyclass(name = "CoefficientLedger", module = "quadric_cto", frozen)]
struct PyCoefficientLedger {
    inner: cto::CoefficientLedger,
}

#[pymethods]
impl PyCoefficientLedger {
    fn degrees(&self, family_name: &str) -> PyResult<Vec<u32>> {
        Ok(self.inner.degrees(family(family_name)?).to_vec())
    }

    /// Entry `i` of a family multiplied out, as text.
    fn expand(&self, family_name: &str, i: usize) -> PyResult<String> {
        let f = family(family_name)?;
        if i >= self.inner.family(f).len() {
            return Err(value_error(format!("index {i} out of range")));
        }
        Ok(self.inner.expand(f, i).map_err(value_error)?.to_string())
    }

    fn __len__(&self) -> usize {
        self.inner.c.len()
    }
}

#[pyclass(name = "BundleMatrix", module = "quadric_cto", frozen, from_py_object)]
#[derive(Clone)]
struct PyBundleMatrix {
    inner: BundleMatrix,
}

#[pymethods]
impl PyBundleMatrix {
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        Ok(Self { inner: serde_json::from_str(text).map_err(value_error)? })
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_error)
    }

    #[getter]
    fn degrees(&self) -> Vec<u32> {
        self.inner.bundle_type().degrees.clone()
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn entry(&self, i: usize, j: usize) -> PyResult<String> {
        if i >= self.inner.size() || j >= self.inner.size() {
            return Err(value_error(format!("entry ({i}, {j}) out of range")));
        }
        Ok(self.inner.entry(i, j).to_string())
    }

    fn __repr__(&self) -> String {
        format!("BundleMatrix(type={:?})", self.inner.bundle_type().degrees)
    }
}

/// Region and threshold report for `(n, r[, d])`.
#[pyfunction]
#[pyo3(signature = (n, r, d = None))]
fn classify<'py>(py: Python<'py>, n: u64, r: u64, d: Option<u64>) -> PyResult<Bound<'py, PyAny>> {
    if n == 0 || r == 0 {
        return Err(value_error("n and r must be positive"));
    }
    to_dict(py, &bundles::classify(n, r, d))
}

/// Degrees of a coefficient family on P^n in the natural index order.
#[pyfunction]
fn family_degrees(n: usize, family_name: &str) -> PyResult<Vec<u32>> {
    if !(2..=20).contains(&n) {
        return Err(value_error("n must lie in 2..=20"));
    }
    Ok(bundles::family_degrees(n, family(family_name)?))
}

/// `(hypersurface, matrix)` for a random hypersurface of degree `d + 2` with
/// multiplicity `d` along an `r`-plane.
#[pyfunction]
fn from_singular_hypersurface(n: usize, r: usize, d: u32, seed: u64) -> PyResult<(String, PyBundleMatrix)> {
    let model = bundles::from_singular_hypersurface(n, r, d, seed).map_err(value_error)?;
    Ok((model.hypersurface.to_string(), PyBundleMatrix { inner: model.matrix }))
}

#[pyfunction]
fn reconstruct_hypersurface(matrix: &PyBundleMatrix) -> PyResult<String> {
    Ok(bundles::reconstruct_hypersurface(&matrix.inner).map_err(value_error)?.to_string())
}

#[pyfunction]
fn from_double_cover(n: usize, r: usize, d: u32, seed: u64) -> PyResult<PyBundleMatrix> {
    Ok(PyBundleMatrix { inner: bundles::from_double_cover(n, r, d, seed).map_err(value_error)? })
}

#[pyfunction]
fn double_cover_branch(matrix: &PyBundleMatrix) -> PyResult<String> {
    Ok(bundles::double_cover_branch(&matrix.inner).map_err(value_error)?.to_string())
}

/// Residue along `factors[divisor]` of the sum of `symbols` on P^n. Each
/// symbol lists its entries, each entry the indices of the factors it is the
/// product of. Returns the symbols of the residue with entries as text.
#[pyfunction]
fn residue(n: usize, factors: Vec<String>, symbols: Vec<Vec<Vec<usize>>>, divisor: usize) -> PyResult<Vec<Vec<String>>> {
    if n == 0 {
        return Err(value_error("residues need n >= 1"));
    }
    let mut table = FactorTable::new(n);
    let registered = factors
        .iter()
        .map(|t| {
            let f = HomogeneousForm::parse(t, n, None).map_err(value_error)?;
            table.register(&f, None).map_err(value_error)
        })
        .collect::<PyResult<Vec<_>>>()?;
    let get = |i: usize| registered.get(i).ok_or_else(|| value_error(format!("factor index {i} out of range")));
    let divisor_id = match get(divisor)?.factors.iter().collect::<Vec<_>>().as_slice() {
        [(id, 1)] => **id,
        _ => return Err(value_error("the divisor must be a single linear factor")),
    };
    let degree = symbols.first().map_or(1, Vec::len);
    let classes = symbols
        .iter()
        .map(|s| {
            s.iter()
                .map(|entry| {
                    let ff = entry.iter().try_fold(FactoredForm::constant(quadric_cto::rational::int(1)), |acc, &i| {
                        get(i).map(|f| acc.mul(f))
                    })?;
                    Ok(table.class_of(&ff))
                })
                .collect::<PyResult<Vec<_>>>()
        })
        .collect::<PyResult<Vec<_>>>()?;
    let class = CohClass::from_symbols(degree, classes).map_err(value_error)?;
    let mut target = FactorTable::new(n - 1);
    let res = cohomology::residue(&class, divisor_id, &table, &mut target).map_err(value_error)?;
    Ok(res
        .symbols()
        .map(|s| {
            s.entries()
                .iter()
                .map(|c| c.ids().map(|id| format!("({})", target.form(id))).collect::<Vec<_>>().join("*"))
                .collect()
        })
        .collect())
}

/// Report of the ramified pullback check for index `e`.
#[pyfunction]
#[pyo3(signature = (e, samples = 100, seed = 0))]
fn univariate_residue_harness<'py>(py: Python<'py>, e: u32, samples: usize, seed: u64) -> PyResult<Bound<'py, PyAny>> {
    if e == 0 {
        return Err(value_error("e must be positive"));
    }
    to_dict(py, &cohomology::univariate_residue_harness(e, samples, seed))
}

#[pymodule]
#[pyo3(name = "quadric_cto")]
fn quadric_cto_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyArrangementConfig>()?;
    m.add_class::<PyCtoCertificate>()?;
    m.add_class::<PyCoefficientLedger>()?;
    m.add_class::<PyBundleMatrix>()?;
    m.add_function(wrap_pyfunction!(classify, m)?)?;
    m.add_function(wrap_pyfunction!(family_degrees, m)?)?;
    m.add_function(wrap_pyfunction!(from_singular_hypersurface, m)?)?;
    m.add_function(wrap_pyfunction!(reconstruct_hypersurface, m)?)?;
    m.add_function(wrap_pyfunction!(from_double_cover, m)?)?;
    m.add_function(wrap_pyfunction!(double_cover_branch, m)?)?;
    m.add_function(wrap_pyfunction!(residue, m)?)?;
    m.add_function(wrap_pyfunction!(univariate_residue_harness, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
