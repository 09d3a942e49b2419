//! Python bindings: `import courant_py`.

use std::collections::BTreeMap;

use courant::cohomology::{self, Complex, SpectralSequence};
use courant::genexact::{self, DForm};
use courant::linalg::parse_rational;
use courant::{fixtures, modelfile, CourantError, ExactMatrix, ModulePresentation, UniPoly};
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

create_exception!(courant_py, CourantException, PyException);

fn err(e: CourantError) -> PyErr {
    CourantException::new_err(e.to_string())
}

fn max_degree(n: Option<u32>) -> u32 {
    n.unwrap_or(cohomology::DEFAULT_MAX_DEGREE)
}

/// A finitely generated `R`-module `R^free_rank ⊕ ⊕ R/(d_i)`.
#[pyclass(name = "Module", frozen, eq, skip_from_py_object)]
#[derive(Clone, PartialEq)]
pub struct PyModulePresentation {
    #[pyo3(get)]
    free_rank: usize,
    #[pyo3(get)]
    torsion: Vec<String>,
}

impl From<&ModulePresentation> for PyModulePresentation {
    fn from(x: &ModulePresentation) -> Self {
        PyModulePresentation { free_rank: x.free_rank, torsion: x.torsion.iter().map(UniPoly::to_string).collect() }
    }
}

#[pymethods]
impl PyModulePresentation {
    fn is_zero(&self) -> bool {
        self.free_rank == 0 && self.torsion.is_empty()
    }

    fn __repr__(&self) -> String {
        format!("Module(free_rank={}, torsion={:?})", self.free_rank, self.torsion)
    }
}

fn modules(v: &[ModulePresentation]) -> Vec<PyModulePresentation> {
    v.iter().map(PyModulePresentation::from).collect()
}

fn matrix(m: &ExactMatrix) -> Vec<Vec<String>> {
    (0..m.rows()).map(|i| (0..m.cols()).map(|j| m.get(i, j).to_string()).collect()).collect()
}

/// A validated Courant algebroid model.
#[pyclass(name = "CourantModel", frozen)]
pub struct PyCourantModel {
    inner: courant::CourantModel,
}

fn wrap(inner: courant::CourantModel) -> PyCourantModel {
    PyCourantModel { inner }
}

#[pymethods]
impl PyCourantModel {
    #[staticmethod]
    fn load(path: &str) -> PyResult<Self> {
        modelfile::load_model(path).map(wrap).map_err(err)
    }

    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        modelfile::parse_model(text).map(wrap).map_err(err)
    }

    fn to_json(&self) -> String {
        modelfile::model_to_json(&self.inner)
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name().to_string()
    }

    #[getter]
    fn ring(&self) -> String {
        self.inner.ring().to_string()
    }

    #[getter]
    fn fiber_rank(&self) -> usize {
        self.inner.fiber_rank()
    }

    #[getter]
    fn anchor_rank(&self) -> usize {
        self.inner.anchor_rank()
    }

    #[getter]
    fn transverse_count(&self) -> usize {
        self.inner.transverse_count()
    }

    fn hamiltonian(&self) -> String {
        self.inner.hamiltonian().to_string()
    }

    fn master_equation(&self) -> String {
        self.inner.master_equation().to_string()
    }

    fn is_courant(&self) -> bool {
        self.inner.is_courant()
    }

    /// `{axiom: (cases, failures)}`.
    fn axiom_report(&self) -> BTreeMap<String, (usize, usize)> {
        self.inner.axiom_report().checks.iter().map(|c| (c.axiom.label().to_string(), (c.cases, c.failures))).collect()
    }

    /// `⟨[e_a, e_b], e_c⟩` as a polynomial string.
    fn bracket_pairing(&self, a: usize, b: usize, c: usize) -> PyResult<String> {
        let m = &self.inner;
        let r = m.fiber_rank();
        if a >= r || b >= r || c >= r {
            return Err(err(CourantError::DimensionMismatch(format!("frame index out of range 0..{r}"))));
        }
        let br = m.derived_bracket(&m.section(a), &m.section(b)).map_err(err)?;
        Ok(m.pairing(&br, &m.section(c)).map_err(err)?.to_string())
    }

    #[pyo3(signature = (max_degree=None))]
    fn standard_cohomology(&self, max_degree: Option<u32>) -> PyResult<Vec<PyModulePresentation>> {
        cohomology::standard_cohomology(&self.inner, self::max_degree(max_degree)).map(|v| modules(&v)).map_err(err)
    }

    #[pyo3(signature = (max_degree=None))]
    fn naive_cohomology(&self, max_degree: Option<u32>) -> PyResult<Vec<PyModulePresentation>> {
        cohomology::naive_cohomology(&self.inner, self::max_degree(max_degree)).map(|v| modules(&v)).map_err(err)
    }

    /// `{(p, q): Module}` for the page `E_r`.
    #[pyo3(signature = (r, max_degree=None))]
    fn page(&self, r: u32, max_degree: Option<u32>) -> PyResult<BTreeMap<(u32, u32), PyModulePresentation>> {
        let n = self::max_degree(max_degree);
        let complex = Complex::new(&self.inner, n).map_err(err)?;
        let page = SpectralSequence::new(&complex).page(r, n).map_err(err)?;
        Ok(page.entries.iter().map(|(k, v)| (*k, v.into())).collect())
    }

    fn transgression(&self) -> PyResult<Vec<Vec<String>>> {
        cohomology::transgression(&self.inner).map(|m| matrix(&m)).map_err(err)
    }

    fn transgression_from_form(&self) -> PyResult<Vec<Vec<String>>> {
        genexact::transgression_from_form(&self.inner).map(|m| matrix(&m)).map_err(err)
    }

    fn severa_class_equal(&self, other: &PyCourantModel) -> PyResult<bool> {
        genexact::severa_class_equal(&self.inner, &other.inner).map_err(err)
    }

    /// Shift by `dB` for the 2-form with components `{(i, j): "poly"}`, `i < j`, 0-based.
    fn b_field_transform(&self, components: BTreeMap<(usize, usize), String>) -> PyResult<Self> {
        let dim = self.inner.anchor_rank();
        let entries = components
            .into_iter()
            .map(|((i, j), s)| Ok((vec![i, j], s.parse::<UniPoly>()?)))
            .collect::<courant::Result<Vec<_>>>()
            .map_err(err)?;
        let b = DForm::from_components(dim, 2, entries).map_err(err)?;
        genexact::b_field_transform(&self.inner, &b).map(wrap).map_err(err)
    }

    #[pyo3(signature = (max_degree=None))]
    fn predict(&self, max_degree: Option<u32>) -> PyResult<Vec<PyModulePresentation>> {
        genexact::predict_standard_cohomology(&self.inner, self::max_degree(max_degree)).map(|v| modules(&v)).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!("CourantModel({:?}, ring={}, rank={})", self.inner.name(), self.inner.ring(), self.inner.fiber_rank())
    }
}

#[pyfunction]
fn so3() -> PyCourantModel {
    wrap(fixtures::so3())
}

#[pyfunction]
fn exact_t2() -> PyCourantModel {
    wrap(fixtures::exact_t2())
}

#[pyfunction]
#[pyo3(signature = (c="0"))]
fn exact_t3(c: &str) -> PyResult<PyCourantModel> {
    Ok(wrap(fixtures::exact_t3(parse_rational(c).map_err(err)?)))
}

/// su(2) x R with three-form `f(t) e¹²³`.
#[pyfunction]
#[pyo3(signature = (f="t"))]
fn su2_line(f: &str) -> PyResult<PyCourantModel> {
    Ok(wrap(fixtures::su2_line(f.parse().map_err(err)?)))
}

#[pyfunction]
fn broken_jacobi() -> PyCourantModel {
    wrap(fixtures::broken_jacobi())
}

#[pymodule]
fn courant_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("CourantException", m.py().get_type::<CourantException>())?;
    m.add_class::<PyCourantModel>()?;
    m.add_class::<PyModulePresentation>()?;
    m.add_function(wrap_pyfunction!(so3, m)?)?;
    m.add_function(wrap_pyfunction!(exact_t2, m)?)?;
    m.add_function(wrap_pyfunction!(exact_t3, m)?)?;
    m.add_function(wrap_pyfunction!(su2_line, m)?)?;
    m.add_function(wrap_pyfunction!(broken_jacobi, m)?)?;
    Ok(())
}
