//! Python bindings for flower-core.

use std::path::PathBuf;

use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::{PyBool, PyDict, PyFloat, PyInt, PyString};

use flower_core::bench::{self, BenchError, BenchSpec, Dependency, GroundTruth};
use flower_core::config::{load_config, AnalysisConfig, ConfigError, ConfigLayer};
use flower_core::erd::{self, DiagramFormat};
use flower_core::inference::{DEFAULT_CONFIDENCE, DEFAULT_CONFIDENCE_COEFF};
use flower_core::name_nlp::{self, LanguagePack};
use flower_core::pipeline::{self, AnalyzeError};
use flower_core::report::RunReport;
use flower_core::sampler::{self, SamplerConfig, SamplingPolicy, ValueDistribution};
use flower_core::{Dialect, TableRef};

fn config_err(e: ConfigError) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn analyze_err(e: AnalyzeError) -> PyErr {
    match e {
        AnalyzeError::Config(c) => config_err(c),
        other => PyOSError::new_err(other.to_string()),
    }
}

fn bench_err(e: BenchError) -> PyErr {
    match e {
        BenchError::Analyze(a) => analyze_err(a),
        BenchError::Spec(_) | BenchError::Sampler(_) => PyValueError::new_err(e.to_string()),
        other => PyOSError::new_err(other.to_string()),
    }
}

fn parsed<T: std::str::FromStr>(what: &str, text: &str) -> PyResult<T>
where
    T::Err: std::fmt::Display,
{
    text.parse().map_err(|e| PyValueError::new_err(format!("{what}: {e}")))
}

/// Turns JSON text into Python objects.
fn to_python(py: Python<'_>, json: &str) -> PyResult<Py<PyAny>> {
    Ok(py.import("json")?.call_method1("loads", (json,))?.unbind())
}

fn json_of<T: serde::Serialize>(value: &T) -> String {
    serde_json::to_string(value).expect("serializable")
}

/// Renders a settings dict as TOML so it goes through the same checks as a
/// config file.
fn dict_to_toml(settings: &Bound<'_, PyDict>) -> PyResult<String> {
    let mut text = String::new();
    for (key, value) in settings.iter() {
        let key: String = key.extract()?;
        let rendered = if value.is_instance_of::<PyBool>() {
            value.extract::<bool>()?.to_string()
        } else if value.is_instance_of::<PyInt>() {
            value.extract::<i64>()?.to_string()
        } else if value.is_instance_of::<PyFloat>() {
            let f: f64 = value.extract()?;
            format!("{f:?}")
        } else if value.is_instance_of::<PyString>() {
            json_of(&value.extract::<String>()?)
        } else {
            let s = value.str()?.to_string();
            json_of(&s)
        };
        text.push_str(&format!("{} = {rendered}\n", json_of(&key)));
    }
    Ok(text)
}

fn resolve_config(config_file: Option<PathBuf>, settings: Option<&Bound<'_, PyDict>>) -> PyResult<AnalysisConfig> {
    let layer = match settings {
        Some(d) => ConfigLayer::from_toml(&dict_to_toml(d)?, "settings").map_err(config_err)?,
        None => ConfigLayer::default(),
    };
    load_config(config_file.as_deref(), &layer).map_err(config_err)
}

/// Result of `analyze`.
#[pyclass(module = "flower", frozen)]
struct Analysis {
    inner: pipeline::Analysis,
}

#[pymethods]
impl Analysis {
    /// The canonical JSON report.
    #[pyo3(signature = (include_timings = false))]
    fn report_json(&self, include_timings: bool) -> String {
        RunReport::from_analysis(&self.inner, include_timings).to_canonical_json()
    }

    /// The report as Python objects.
    fn report(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &self.report_json(false))
    }

    /// Implicit dependencies as a list of dicts.
    #[getter]
    fn implicit(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &json_of(&self.inner.implicit))
    }

    #[getter]
    fn explicit(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_python(py, &json_of(&self.inner.listing.explicit))
    }

    /// `schema.table` names of every table found.
    #[getter]
    fn tables(&self) -> Vec<String> {
        self.inner.graph.tables().iter().map(|t| t.to_string()).collect()
    }

    /// The ER diagram as "dot", "mermaid" or "json" text.
    #[pyo3(signature = (format = "dot"))]
    fn diagram(&self, format: &str) -> PyResult<String> {
        let format: DiagramFormat = parsed("format", format)?;
        Ok(erd::export(&self.inner.graph, format))
    }

    /// Schema text for the targets and their neighbours; returns (text, size).
    #[pyo3(signature = (targets, hops = 1))]
    fn context(&self, targets: Vec<String>, hops: usize) -> PyResult<(String, usize)> {
        let schema = self.inner.config.dialect.default_schema();
        let targets = targets
            .iter()
            .map(|t| TableRef::parse(t, schema).map_err(PyValueError::new_err))
            .collect::<PyResult<Vec<_>>>()?;
        let selection = erd::select_context(&self.inner.graph, &targets, hops).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok((selection.text, selection.size))
    }

    fn __repr__(&self) -> String {
        format!(
            "Analysis(source={:?}, tables={}, explicit={}, implicit={})",
            self.inner.source,
            self.inner.listing.tables.len(),
            self.inner.listing.explicit.len(),
            self.inner.implicit.len()
        )
    }
}

/// Analyze a directory of .sql/.csv files or an SQLite file.
///
/// `settings` takes the same keys as the TOML config file and wins over it.
#[pyfunction]
#[pyo3(signature = (source, settings = None, config_file = None))]
fn analyze(py: Python<'_>, source: &str, settings: Option<&Bound<'_, PyDict>>, config_file: Option<PathBuf>) -> PyResult<Analysis> {
    let config = resolve_config(config_file, settings)?;
    let source = source.to_string();
    let inner = py.detach(move || pipeline::analyze(&source, &config)).map_err(analyze_err)?;
    Ok(Analysis { inner })
}

/// Number of rows sampled from a column.
#[pyfunction]
#[pyo3(signature = (rows_all, rows_uq, rows_min = sampler::DEFAULT_ROWS_MIN, policy = "literal"))]
fn sample_size(rows_all: u64, rows_uq: u64, rows_min: u64, policy: &str) -> PyResult<u64> {
    let config = SamplerConfig { rows_min, policy: parsed::<SamplingPolicy>("policy", policy)?, ..SamplerConfig::default() };
    config.validate().map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(sampler::compute_sample_size(rows_all, rows_uq, &config))
}

/// Histogram SSE of dynamic sampling against the fixed reservoir.
#[pyfunction]
#[pyo3(signature = (rows, distribution = "normal", policy = "literal", launches = 10, seed = 0, rows_min = sampler::DEFAULT_ROWS_MIN, bins = sampler::DEFAULT_BINS))]
#[allow(clippy::too_many_arguments)]
fn sample_eval(
    py: Python<'_>,
    rows: u64,
    distribution: &str,
    policy: &str,
    launches: usize,
    seed: u64,
    rows_min: u64,
    bins: usize,
) -> PyResult<Py<PyAny>> {
    let distribution: ValueDistribution = parsed("distribution", distribution)?;
    let config = SamplerConfig { rows_min, policy: parsed("policy", policy)?, seed, histogram_bins: bins };
    let report = py
        .detach(move || sampler::run_sse_experiment(distribution, rows, &config, launches))
        .map_err(|e| PyValueError::new_err(e.to_string()))?;
    to_python(py, &json_of(&report))
}

/// Lowercase tokens of an identifier.
#[pyfunction]
fn tokenize(name: &str) -> Vec<String> {
    name_nlp::tokenize(name).tokens
}

/// Tokens, denoised tokens, synonym budget and synonyms of a name.
#[pyfunction]
#[pyo3(signature = (name, confidence = DEFAULT_CONFIDENCE, confidence_coeff = DEFAULT_CONFIDENCE_COEFF, lang = "en", pack_dir = None))]
fn profile_name(
    py: Python<'_>,
    name: &str,
    confidence: f64,
    confidence_coeff: f64,
    lang: &str,
    pack_dir: Option<PathBuf>,
) -> PyResult<Py<PyAny>> {
    let pack = LanguagePack::load(lang, pack_dir.as_deref()).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let profile = name_nlp::profile_name(name, confidence, confidence_coeff, &pack);
    to_python(py, &json_of(&profile))
}

/// Parse one CREATE TABLE statement; returns the table and its explicit references.
#[pyfunction]
#[pyo3(signature = (ddl, dialect = "postgres"))]
fn parse_ddl(py: Python<'_>, ddl: &str, dialect: &str) -> PyResult<Py<PyAny>> {
    let dialect: Dialect = parsed("dialect", dialect)?;
    let table = flower_core::catalog::parse_ddl(ddl, dialect).map_err(|e| PyValueError::new_err(e.to_string()))?;
    let value = serde_json::json!({"table": table.meta, "explicit": table.explicit_deps()});
    to_python(py, &value.to_string())
}

/// Write a synthetic database for a JSON bench spec; returns the ground truth.
#[pyfunction]
fn bench_generate(py: Python<'_>, spec_json: &str, out_dir: PathBuf) -> PyResult<Py<PyAny>> {
    let spec: BenchSpec = serde_json::from_str(spec_json).map_err(|e| PyValueError::new_err(format!("bench spec: {e}")))?;
    spec.validate().map_err(bench_err)?;
    let db = py.detach(move || bench::generate_database(&spec, &out_dir)).map_err(bench_err)?;
    to_python(py, &json_of(&db.ground_truth))
}

/// Score a run report (JSON text) against a gt.json file.
#[pyfunction]
fn bench_evaluate(py: Python<'_>, report_json: &str, gt_path: PathBuf) -> PyResult<Py<PyAny>> {
    let report = RunReport::from_json(report_json).map_err(|e| PyValueError::new_err(format!("run report: {e}")))?;
    let truth = GroundTruth::load(&gt_path).map_err(bench_err)?;
    let predicted: Vec<Dependency> = report.implicit.iter().map(Dependency::from).collect();
    to_python(py, &json_of(&bench::evaluate_accuracy(&predicted, &truth)))
}

#[pymodule]
fn flower(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_class::<Analysis>()?;
    m.add_function(wrap_pyfunction!(analyze, m)?)?;
    m.add_function(wrap_pyfunction!(sample_size, m)?)?;
    m.add_function(wrap_pyfunction!(sample_eval, m)?)?;
    m.add_function(wrap_pyfunction!(tokenize, m)?)?;
    m.add_function(wrap_pyfunction!(profile_name, m)?)?;
    m.add_function(wrap_pyfunction!(parse_ddl, m)?)?;
    m.add_function(wrap_pyfunction!(bench_generate, m)?)?;
    m.add_function(wrap_pyfunction!(bench_evaluate, m)?)?;
    Ok(())
}
