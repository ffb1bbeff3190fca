//! Python bindings. Structured results cross the boundary as plain dicts and
//! lists (built from the serde representation), datasets and lexicons stay
//! opaque handles.

use std::collections::BTreeMap;
use std::path::PathBuf;

use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use group_emotion::chain::{
    compute_topic_emotion as chain_topic_emotion, ChainConfig as CoreChainConfig, TrustWeights,
};
use group_emotion::corpus::{ingest_dataset, ingest_str, preprocess as core_preprocess, InteractionDataset};
use group_emotion::dynamics::{
    celebrity_share, compute_pearson, compute_skewness_with, no_comment_share, tally_polarity as core_tally,
    SkewnessEstimator,
};
use group_emotion::reporting::{analyze_bundle as core_analyze, run_pipeline as core_run, PipelineOptions};
use group_emotion::sentiment::{resolve_sentiments, score_text, Lexicon as CoreLexicon};
use group_emotion::synth::{generate as synth_generate, oracle_recompute as core_oracle, OracleCluster, SynthSpec};

create_exception!(group_emotion, GroupEmotionError, PyException);

fn err(e: impl std::fmt::Display) -> PyErr {
    GroupEmotionError::new_err(e.to_string())
}

fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn from_py<T: serde::de::DeserializeOwned>(py: Python<'_>, obj: &Bound<'_, PyAny>) -> PyResult<T> {
    let text: String = py.import("json")?.call_method1("dumps", (obj,))?.extract()?;
    serde_json::from_str(&text).map_err(err)
}

/// An ingested interaction dataset for one topic on one platform.
#[pyclass(module = "group_emotion", frozen)]
struct Dataset {
    inner: InteractionDataset,
}

#[pymethods]
impl Dataset {
    /// Reads a JSON Lines file. Returns `(dataset, ingest_summary)`.
    #[staticmethod]
    fn load(py: Python<'_>, path: PathBuf) -> PyResult<(Dataset, Py<PyAny>)> {
        let (inner, summary) = ingest_dataset(&path).map_err(err)?;
        Ok((Dataset { inner }, to_py(py, &summary)?))
    }

    #[staticmethod]
    fn from_jsonl(py: Python<'_>, text: &str) -> PyResult<(Dataset, Py<PyAny>)> {
        let (inner, summary) = ingest_str(text);
        Ok((Dataset { inner }, to_py(py, &summary)?))
    }

    #[getter]
    fn platform(&self) -> &str {
        self.inner.platform()
    }

    #[getter]
    fn topic(&self) -> &str {
        self.inner.topic()
    }

    #[getter]
    fn num_accounts(&self) -> usize {
        self.inner.accounts().len()
    }

    #[getter]
    fn num_posts(&self) -> usize {
        self.inner.posts().len()
    }

    #[getter]
    fn num_comments(&self) -> usize {
        self.inner.comments().len()
    }

    #[pyo3(signature = (keywords=None))]
    fn preprocess(&self, py: Python<'_>, keywords: Option<Vec<String>>) -> PyResult<(Dataset, Py<PyAny>)> {
        let (inner, summary) = core_preprocess(self.inner.clone(), keywords.as_deref());
        Ok((Dataset { inner }, to_py(py, &summary)?))
    }

    /// Fills missing sentiments from the lexicon.
    #[pyo3(signature = (lexicon=None))]
    fn resolve_sentiments(&self, lexicon: Option<&Lexicon>) -> PyResult<Dataset> {
        let inner = resolve_sentiments(self.inner.clone(), lexicon.map(|l| &l.inner)).map_err(err)?;
        Ok(Dataset { inner })
    }

    fn no_comment_share(&self) -> Option<f64> {
        no_comment_share(&self.inner)
    }

    fn celebrity_share(&self) -> Option<f64> {
        celebrity_share(&self.inner)
    }

    fn to_jsonl(&self) -> PyResult<String> {
        let mut buf = Vec::new();
        self.inner.write_jsonl(&mut buf).map_err(err)?;
        String::from_utf8(buf).map_err(err)
    }

    fn __repr__(&self) -> String {
        format!(
            "Dataset(platform={:?}, topic={:?}, posts={}, comments={})",
            self.inner.platform(),
            self.inner.topic(),
            self.inner.posts().len(),
            self.inner.comments().len()
        )
    }
}

/// Naive Bayes sentiment lexicon.
#[pyclass(module = "group_emotion", frozen)]
struct Lexicon {
    inner: CoreLexicon,
}

#[pymethods]
impl Lexicon {
    #[new]
    #[pyo3(signature = (positive, negative, smoothing_alpha=1.0))]
    fn new(positive: BTreeMap<String, u64>, negative: BTreeMap<String, u64>, smoothing_alpha: f64) -> PyResult<Self> {
        Ok(Lexicon {
            inner: CoreLexicon::new(positive, negative, smoothing_alpha).map_err(err)?,
        })
    }

    #[staticmethod]
    fn from_json(path: PathBuf) -> PyResult<Self> {
        Ok(Lexicon {
            inner: CoreLexicon::from_json_file(&path).map_err(err)?,
        })
    }

    /// Score in [-1, 1].
    fn score(&self, text: &str) -> f64 {
        score_text(text, &self.inner).value()
    }
}

/// Trust weights and aggregation parameters.
#[pyclass(module = "group_emotion", frozen, skip_from_py_object)]
#[derive(Clone)]
struct ChainConfig {
    inner: CoreChainConfig,
}

#[pymethods]
impl ChainConfig {
    #[new]
    #[pyo3(signature = (a1=0.35, a2=0.35, a3_fan=0.05, a3_repost=0.25, macro_weight=0.6, outlier_k=2.0))]
    fn new(a1: f64, a2: f64, a3_fan: f64, a3_repost: f64, macro_weight: f64, outlier_k: f64) -> PyResult<Self> {
        let inner = CoreChainConfig {
            trust_weights: TrustWeights::new(a1, a2, a3_fan, a3_repost).map_err(err)?,
            macro_weight,
            outlier_k,
        };
        inner.validate().map_err(err)?;
        Ok(ChainConfig { inner })
    }

    fn __repr__(&self) -> String {
        let w = self.inner.trust_weights;
        format!(
            "ChainConfig(a1={}, a2={}, a3_fan={}, a3_repost={}, macro_weight={}, outlier_k={})",
            w.a1, w.a2, w.a3_fan, w.a3_repost, self.inner.macro_weight, self.inner.outlier_k
        )
    }
}

fn config_or_default(config: Option<&ChainConfig>) -> CoreChainConfig {
    config.map(|c| c.inner).unwrap_or_default()
}

/// Per-cluster, per-post and topic-level group emotion as a dict.
#[pyfunction]
#[pyo3(signature = (dataset, config=None))]
fn compute_topic_emotion(py: Python<'_>, dataset: &Dataset, config: Option<&ChainConfig>) -> PyResult<Py<PyAny>> {
    let topic = chain_topic_emotion(&dataset.inner, &config_or_default(config)).map_err(err)?;
    to_py(py, &topic)
}

fn oracle_cluster(c: &OracleCluster) -> Value {
    json!({
        "root_id": c.root_id,
        "ind": c.ind,
        "density": c.density,
        "t1": c.t1,
        "t2": c.t2,
        "trust": c.trust,
        "mean_emotion": c.mean_emotion,
        "value": c.value,
    })
}

/// Brute-force recomputation for small datasets.
#[pyfunction]
#[pyo3(signature = (dataset, config=None))]
fn oracle_recompute(py: Python<'_>, dataset: &Dataset, config: Option<&ChainConfig>) -> PyResult<Py<PyAny>> {
    let result = core_oracle(&dataset.inner, &config_or_default(config)).map_err(err)?;
    let posts: Vec<Value> = result
        .posts
        .iter()
        .map(|p| {
            json!({
                "post_id": p.post_id,
                "macro": oracle_cluster(&p.macro_cluster),
                "micros": p.micros.iter().map(oracle_cluster).collect::<Vec<_>>(),
                "value": p.value,
            })
        })
        .collect();
    to_py(py, &json!({ "posts": posts, "value": result.topic }))
}

#[pyfunction]
#[pyo3(signature = (values, adjusted=true))]
fn skewness(values: Vec<f64>, adjusted: bool) -> Option<f64> {
    let estimator = if adjusted {
        SkewnessEstimator::Adjusted
    } else {
        SkewnessEstimator::Unadjusted
    };
    compute_skewness_with(&values, estimator)
}

#[pyfunction]
fn pearson(xs: Vec<f64>, ys: Vec<f64>) -> PyResult<Option<f64>> {
    Ok(compute_pearson(&xs, &ys).map_err(err)?.r)
}

#[pyfunction]
fn tally_polarity(py: Python<'_>, values: Vec<f64>) -> PyResult<Py<PyAny>> {
    to_py(py, &core_tally(&values))
}

/// Generates a synthetic dataset. `spec` keys override the defaults.
/// Returns `(dataset, truth)`.
#[pyfunction]
#[pyo3(signature = (spec=None))]
fn generate(py: Python<'_>, spec: Option<&Bound<'_, PyAny>>) -> PyResult<(Dataset, Py<PyAny>)> {
    let mut merged = serde_json::to_value(SynthSpec::default()).map_err(err)?;
    if let Some(spec) = spec {
        let overrides: serde_json::Map<String, Value> = from_py(py, spec)?;
        let base = merged.as_object_mut().expect("spec serializes to an object");
        for (k, v) in overrides {
            if !base.contains_key(&k) {
                return Err(err(format!("unknown synth spec key {k:?}")));
            }
            base.insert(k, v);
        }
    }
    let spec: SynthSpec = serde_json::from_value(merged).map_err(err)?;
    let (inner, truth) = synth_generate(&spec).map_err(err)?;
    Ok((Dataset { inner }, to_py(py, &truth)?))
}

/// Runs the full pipeline and returns the manifest.
#[pyfunction]
#[pyo3(signature = (inputs, config, out_dir, lexicon=None))]
fn run_pipeline(
    py: Python<'_>,
    inputs: Vec<PathBuf>,
    config: PathBuf,
    out_dir: PathBuf,
    lexicon: Option<&Lexicon>,
) -> PyResult<Py<PyAny>> {
    let options = PipelineOptions {
        inputs,
        config,
        out_dir,
        lexicon: lexicon.map(|l| l.inner.clone()),
    };
    let manifest = py.detach(|| core_run(&options)).map_err(err)?;
    to_py(py, &manifest)
}

#[pyfunction]
fn analyze_bundle(py: Python<'_>, bundle: PathBuf) -> PyResult<Py<PyAny>> {
    let report = core_analyze(&bundle).map_err(err)?;
    to_py(py, &report)
}

#[pymodule]
#[pyo3(name = "group_emotion")]
fn group_emotion_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("GroupEmotionError", m.py().get_type::<GroupEmotionError>())?;
    m.add_class::<Dataset>()?;
    m.add_class::<Lexicon>()?;
    m.add_class::<ChainConfig>()?;
    m.add_function(wrap_pyfunction!(compute_topic_emotion, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_recompute, m)?)?;
    m.add_function(wrap_pyfunction!(skewness, m)?)?;
    m.add_function(wrap_pyfunction!(pearson, m)?)?;
    m.add_function(wrap_pyfunction!(tally_polarity, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    m.add_function(wrap_pyfunction!(run_pipeline, m)?)?;
    m.add_function(wrap_pyfunction!(analyze_bundle, m)?)?;
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    Ok(())
}
