//! Python module `pyhaarstat`: Haar-state sampling, subsystem marginals,
//! analytic laws, KS tests and XEB estimators.

use std::path::PathBuf;

use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use haarstat::experiment::{run_experiment as run_experiment_core, ExperimentConfig};
use haarstat::io;
use haarstat::{AnalyticLaw, BitStringProbs, Error, GofReport, Partition, RngSpec, XebResult};

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io { .. } => PyIOError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn partition(n: u32, a_bits: Vec<u32>) -> PyResult<Partition> {
    Partition::new(n, a_bits).map_err(to_py)
}

/// Probability vector over n-qubit bit strings.
#[pyclass(name = "ProbVector", module = "pyhaarstat", skip_from_py_object)]
#[derive(Clone)]
struct PyProbVector {
    inner: haarstat::ProbVector,
}

#[pymethods]
impl PyProbVector {
    #[new]
    fn new(probs: Vec<f64>) -> PyResult<Self> {
        Ok(PyProbVector {
            inner: haarstat::ProbVector::new(probs).map_err(to_py)?,
        })
    }

    #[staticmethod]
    fn uniform(n_qubits: u32) -> PyResult<Self> {
        Ok(PyProbVector {
            inner: haarstat::ProbVector::uniform(n_qubits).map_err(to_py)?,
        })
    }

    #[getter]
    fn n_qubits(&self) -> u32 {
        self.inner.n_qubits()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn probs(&self) -> Vec<f64> {
        self.inner.probs().to_vec()
    }

    /// Probabilities multiplied by the dimension.
    fn scaled(&self) -> Vec<f64> {
        let d = self.inner.dim() as f64;
        self.inner.probs().iter().map(|p| p * d).collect()
    }

    fn __len__(&self) -> usize {
        self.inner.dim()
    }

    fn __repr__(&self) -> String {
        format!("ProbVector(n_qubits={})", self.inner.n_qubits())
    }
}

/// Exact law of a (scaled) bit-string probability.
#[pyclass(name = "Law", module = "pyhaarstat", skip_from_py_object)]
#[derive(Clone)]
struct PyLaw {
    inner: AnalyticLaw,
}

fn law(r: haarstat::Result<AnalyticLaw>) -> PyResult<PyLaw> {
    r.map(|inner| PyLaw { inner }).map_err(to_py)
}

#[pymethods]
impl PyLaw {
    #[staticmethod]
    fn full_beta(dim: u64) -> PyResult<Self> {
        law(AnalyticLaw::full_beta(dim))
    }

    #[staticmethod]
    fn subsystem_beta(dim_full: u64, dim_a: u64) -> PyResult<Self> {
        law(AnalyticLaw::subsystem_beta(dim_full, dim_a))
    }

    #[staticmethod]
    fn conditional_beta(dim_a: u64) -> PyResult<Self> {
        law(AnalyticLaw::conditional_beta(dim_a))
    }

    #[staticmethod]
    fn exp_limit(dim: u64) -> PyResult<Self> {
        law(AnalyticLaw::exp_limit(dim))
    }

    #[staticmethod]
    fn gamma_limit(dim_a: u64, dim_b: u64) -> PyResult<Self> {
        law(AnalyticLaw::gamma_limit(dim_a, dim_b))
    }

    fn with_lambda(&self, lam: f64) -> PyResult<Self> {
        law(self.inner.with_lambda(lam))
    }

    fn with_scaled(&self, scaled: bool) -> Self {
        PyLaw {
            inner: self.inner.with_scaled(scaled),
        }
    }

    fn limit_law(&self) -> PyResult<Self> {
        law(self.inner.limit_law())
    }

    #[getter]
    fn name(&self) -> &'static str {
        self.inner.name()
    }

    #[getter]
    fn lam(&self) -> f64 {
        self.inner.lambda()
    }

    fn pdf(&self, x: f64) -> f64 {
        self.inner.pdf(x)
    }

    fn cdf(&self, x: f64) -> f64 {
        self.inner.cdf(x)
    }

    fn quantile(&self, u: f64) -> f64 {
        self.inner.quantile(u)
    }

    /// `(mean, variance)`.
    fn moments(&self) -> (f64, f64) {
        self.inner.moments()
    }

    fn support(&self) -> (f64, f64) {
        self.inner.support()
    }

    fn __repr__(&self) -> String {
        format!(
            "Law({}, N={}, M={}, lam={})",
            self.inner.name(),
            self.inner.dim_full(),
            self.inner.dim_a(),
            self.inner.lambda()
        )
    }
}

/// Observed bit strings with multiplicities.
#[pyclass(name = "SampleSet", module = "pyhaarstat", skip_from_py_object)]
#[derive(Clone)]
struct PySampleSet {
    inner: haarstat::SampleSet,
}

#[pymethods]
impl PySampleSet {
    #[new]
    fn new(n: u32, counts: Vec<(u64, u64)>) -> PyResult<Self> {
        Ok(PySampleSet {
            inner: haarstat::SampleSet::from_counts(n, counts).map_err(to_py)?,
        })
    }

    #[getter]
    fn n(&self) -> u32 {
        self.inner.n()
    }

    #[getter]
    fn total(&self) -> u64 {
        self.inner.total()
    }

    fn counts(&self) -> Vec<(u64, u64)> {
        self.inner.counts().iter().map(|(&j, &c)| (j, c)).collect()
    }

    fn to_json(&self) -> String {
        io::samples_to_json(&self.inner)
    }
}

fn gof_dict<'py>(py: Python<'py>, r: &GofReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("ks_statistic", r.ks_statistic)?;
    d.set_item("ks_critical_1pct", r.ks_critical_1pct)?;
    d.set_item("n_samples", r.n_samples)?;
    d.set_item("passed", r.passed)?;
    d.set_item("sup_location", r.sup_location)?;
    Ok(d)
}

fn xeb_dict<'py>(py: Python<'py>, r: &XebResult) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("fidelity", r.fidelity)?;
    d.set_item("std_error", r.std_error)?;
    d.set_item("m_eff", r.m_eff)?;
    d.set_item("shots", r.shots)?;
    Ok(d)
}

/// Probabilities of a Haar-random n-qubit state.
#[pyfunction]
#[pyo3(signature = (n, seed, stream = 0))]
fn sample_haar_probs(n: u32, seed: u64, stream: u64) -> PyResult<PyProbVector> {
    let state = haarstat::sample_haar_state(n, RngSpec::new(seed, stream)).map_err(to_py)?;
    Ok(PyProbVector {
        inner: haarstat::probabilities(&state),
    })
}

#[pyfunction]
#[pyo3(signature = (dim, seed, stream = 0))]
fn sample_flat_dirichlet(dim: usize, seed: u64, stream: u64) -> PyResult<PyProbVector> {
    Ok(PyProbVector {
        inner: haarstat::sample_flat_dirichlet(dim, RngSpec::new(seed, stream)).map_err(to_py)?,
    })
}

/// `(1 - lam) p + lam / N`.
#[pyfunction]
fn depolarize(p: &PyProbVector, lam: f64) -> PyResult<PyProbVector> {
    let noisy = haarstat::depolarize(&p.inner, lam).map_err(to_py)?;
    Ok(PyProbVector {
        inner: noisy.to_prob_vector(),
    })
}

/// Marginal on the qubits `a_bits` (qubit 0 is the most significant bit).
#[pyfunction]
fn marginalize(p: &PyProbVector, a_bits: Vec<u32>) -> PyResult<Vec<f64>> {
    let part = partition(p.inner.n_qubits(), a_bits)?;
    haarstat::marginalize(&p.inner, &part).map_err(to_py)
}

/// `(p(y|b) for y in 0..M, p(b))`.
#[pyfunction]
fn conditional_slice(p: &PyProbVector, a_bits: Vec<u32>, b: usize) -> PyResult<(Vec<f64>, f64)> {
    let part = partition(p.inner.n_qubits(), a_bits)?;
    let s = haarstat::conditional_slice(&p.inner, &part, b).map_err(to_py)?;
    Ok((s.cond_probs, s.weight))
}

#[pyfunction]
fn ks_one_sample<'py>(
    py: Python<'py>,
    samples: Vec<f64>,
    law: &PyLaw,
) -> PyResult<Bound<'py, PyDict>> {
    let r = haarstat::ks_one_sample(&samples, &law.inner).map_err(to_py)?;
    gof_dict(py, &r)
}

#[pyfunction]
fn ks_two_sample<'py>(py: Python<'py>, a: Vec<f64>, b: Vec<f64>) -> PyResult<Bound<'py, PyDict>> {
    let r = haarstat::ks_two_sample(&a, &b).map_err(to_py)?;
    gof_dict(py, &r)
}

#[pyfunction]
fn estimate_gap(samples: Vec<f64>) -> PyResult<f64> {
    haarstat::estimate_gap(&samples).map_err(to_py)
}

#[pyfunction]
#[pyo3(signature = (p, shots, seed, stream = 0))]
fn draw_samples(p: &PyProbVector, shots: u64, seed: u64, stream: u64) -> PyResult<PySampleSet> {
    Ok(PySampleSet {
        inner: haarstat::draw_samples(&p.inner, shots, RngSpec::new(seed, stream))
            .map_err(to_py)?,
    })
}

#[pyfunction]
fn xeb_full<'py>(
    py: Python<'py>,
    samples: &PySampleSet,
    ideal: &PyProbVector,
) -> PyResult<Bound<'py, PyDict>> {
    let r = haarstat::xeb_full(&samples.inner, &ideal.inner).map_err(to_py)?;
    xeb_dict(py, &r)
}

#[pyfunction]
fn xeb_subsystem<'py>(
    py: Python<'py>,
    samples: &PySampleSet,
    ideal: &PyProbVector,
    a_bits: Vec<u32>,
) -> PyResult<Bound<'py, PyDict>> {
    let part = partition(ideal.inner.n_qubits(), a_bits)?;
    let r = haarstat::xeb_subsystem(&samples.inner, &ideal.inner, &part).map_err(to_py)?;
    xeb_dict(py, &r)
}

#[pyfunction]
fn xeb_conditional<'py>(
    py: Python<'py>,
    samples: &PySampleSet,
    ideal: &PyProbVector,
    a_bits: Vec<u32>,
    b: usize,
) -> PyResult<Bound<'py, PyDict>> {
    let part = partition(ideal.inner.n_qubits(), a_bits)?;
    let r = haarstat::xeb_conditional(&samples.inner, &ideal.inner, &part, b).map_err(to_py)?;
    xeb_dict(py, &r)
}

/// Reads bit-string lines or a counts JSON document.
#[pyfunction]
fn read_samples(path: PathBuf) -> PyResult<PySampleSet> {
    Ok(PySampleSet {
        inner: io::read_samples(path).map_err(to_py)?,
    })
}

#[pyfunction]
fn write_samples(samples: &PySampleSet, path: PathBuf) -> PyResult<()> {
    io::write_samples(&samples.inner, path).map_err(to_py)
}

/// Runs an experiment from a JSON configuration and returns the summary
/// as a JSON string. Output files go to `out_dir`.
#[pyfunction]
fn run_experiment(config_json: &str, out_dir: PathBuf) -> PyResult<String> {
    let mut cfg: ExperimentConfig =
        serde_json::from_str(config_json).map_err(|e| PyValueError::new_err(e.to_string()))?;
    cfg.out_dir = out_dir;
    let summary = run_experiment_core(&cfg).map_err(to_py)?;
    Ok(summary.to_json())
}

#[pymodule]
fn pyhaarstat(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyProbVector>()?;
    m.add_class::<PyLaw>()?;
    m.add_class::<PySampleSet>()?;
    m.add_function(wrap_pyfunction!(sample_haar_probs, m)?)?;
    m.add_function(wrap_pyfunction!(sample_flat_dirichlet, m)?)?;
    m.add_function(wrap_pyfunction!(depolarize, m)?)?;
    m.add_function(wrap_pyfunction!(marginalize, m)?)?;
    m.add_function(wrap_pyfunction!(conditional_slice, m)?)?;
    m.add_function(wrap_pyfunction!(ks_one_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gap, m)?)?;
    m.add_function(wrap_pyfunction!(draw_samples, m)?)?;
    m.add_function(wrap_pyfunction!(xeb_full, m)?)?;
    m.add_function(wrap_pyfunction!(xeb_subsystem, m)?)?;
    m.add_function(wrap_pyfunction!(xeb_conditional, m)?)?;
    m.add_function(wrap_pyfunction!(read_samples, m)?)?;
    m.add_function(wrap_pyfunction!(write_samples, m)?)?;
    m.add_function(wrap_pyfunction!(run_experiment, m)?)?;
    Ok(())
}
