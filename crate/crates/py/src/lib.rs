//! Python bindings. Records cross the boundary as wrapper classes; reports
//! and ground truth come back as plain dicts and lists.

use chrono::NaiveDate;
use pyo3::exceptions::{PyIOError, PyValueError};
use pyo3::prelude::*;
use serde::Serialize;

use delstream_core::coord;
use delstream_core::estimator::{self, CompareOptions};
use delstream_core::flood;
use delstream_core::ingest;
use delstream_core::model::{self, AccountId, TweetId};
use delstream_core::stats;
use delstream_core::synth;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn to_py<'py, T: Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(value_err)?;
    py.import("json")?.call_method1("loads", (text,))
}

fn parse_day(s: &str) -> PyResult<NaiveDate> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d").map_err(value_err)
}

#[pyclass(name = "ComplianceNotice", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PyNotice {
    inner: model::ComplianceNotice,
}

#[pymethods]
impl PyNotice {
    /// Parses one newline-delimited event record.
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        model::parse_notice(line, 1).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> String {
        model::serialize_notice(&self.inner)
    }

    #[getter]
    fn kind(&self) -> &'static str {
        self.inner.kind.as_str()
    }

    #[getter]
    fn actor_id(&self) -> u64 {
        self.inner.actor_id.0
    }

    #[getter]
    fn object_id(&self) -> u64 {
        self.inner.object_id.0
    }

    #[getter]
    fn observed_at(&self) -> String {
        model::format_timestamp(&self.inner.observed_at)
    }

    #[getter]
    fn day(&self) -> String {
        self.inner.day().to_string()
    }

    fn __repr__(&self) -> String {
        format!("ComplianceNotice({})", self.to_json())
    }
}

#[pyclass(name = "AccountSnapshot", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PySnapshot {
    inner: model::AccountSnapshot,
}

#[pymethods]
impl PySnapshot {
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        model::parse_snapshot(line, 1).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> String {
        model::serialize_snapshot(&self.inner)
    }

    #[getter]
    fn account_id(&self) -> u64 {
        self.inner.account_id.0
    }

    #[getter]
    fn snapshot_day(&self) -> String {
        self.inner.snapshot_day.to_string()
    }

    #[getter]
    fn statuses_count(&self) -> Option<u64> {
        self.inner.statuses_count
    }

    #[getter]
    fn status(&self) -> &'static str {
        self.inner.status.as_str()
    }
}

#[pyclass(name = "DailyDeletionRecord", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PyDailyRecord {
    inner: ingest::DailyDeletionRecord,
}

#[pymethods]
impl PyDailyRecord {
    #[getter]
    fn account_id(&self) -> u64 {
        self.inner.account_id.0
    }

    #[getter]
    fn day(&self) -> String {
        self.inner.day.to_string()
    }

    #[getter]
    fn deletion_count(&self) -> u64 {
        self.inner.deletion_count
    }

    #[getter]
    fn deleted_ages_days(&self) -> Vec<u32> {
        self.inner.deleted_ages_days.clone()
    }

    #[getter]
    fn tweet_ids(&self) -> Vec<u64> {
        self.inner.tweet_ids.iter().map(|t| t.0).collect()
    }

    fn __repr__(&self) -> String {
        format!(
            "DailyDeletionRecord(account_id={}, day={}, deletion_count={})",
            self.inner.account_id, self.inner.day, self.inner.deletion_count
        )
    }
}

#[pyclass(name = "UnlikeRecord", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PyUnlike {
    inner: ingest::UnlikeRecord,
}

#[pymethods]
impl PyUnlike {
    #[new]
    fn new(liker_id: u64, tweet_id: u64, unlike_count: u64) -> Self {
        Self {
            inner: ingest::UnlikeRecord {
                liker_id: AccountId(liker_id),
                tweet_id: TweetId(tweet_id),
                unlike_count,
            },
        }
    }

    #[getter]
    fn liker_id(&self) -> u64 {
        self.inner.liker_id.0
    }

    #[getter]
    fn tweet_id(&self) -> u64 {
        self.inner.tweet_id.0
    }

    #[getter]
    fn unlike_count(&self) -> u64 {
        self.inner.unlike_count
    }
}

#[pyclass(name = "AccountTimeline", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PyTimeline {
    inner: ingest::AccountTimeline,
}

#[pymethods]
impl PyTimeline {
    #[staticmethod]
    fn from_json(line: &str) -> PyResult<Self> {
        serde_json::from_str(line).map(|inner| Self { inner }).map_err(value_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.inner).map_err(value_err)
    }

    #[getter]
    fn account_id(&self) -> u64 {
        self.inner.account_id.0
    }

    /// (day, statuses_count) for every day with a count.
    fn counts(&self) -> Vec<(String, u64)> {
        self.inner.counts().map(|(d, c)| (d.to_string(), c)).collect()
    }

    #[getter]
    fn deletion_days(&self) -> Vec<PyDailyRecord> {
        self.inner
            .deletion_days
            .iter()
            .cloned()
            .map(|inner| PyDailyRecord { inner })
            .collect()
    }

    fn estimates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &estimator::estimate_timeline(&self.inner))
    }
}

#[pyclass(name = "FloodingViolation", frozen, skip_from_py_object, module = "delstream")]
#[derive(Clone)]
pub struct PyViolation {
    inner: flood::FloodingViolation,
}

#[pymethods]
impl PyViolation {
    #[getter]
    fn account_id(&self) -> u64 {
        self.inner.account_id.0
    }

    #[getter]
    fn day(&self) -> String {
        self.inner.day.to_string()
    }

    #[getter]
    fn count_diff(&self) -> i64 {
        self.inner.count_diff
    }

    #[getter]
    fn deletions(&self) -> u64 {
        self.inner.deletions
    }

    #[getter]
    fn total_posted(&self) -> i64 {
        self.inner.total_posted
    }

    #[getter]
    fn stale_suspect(&self) -> bool {
        self.inner.stale_suspect
    }

    fn __repr__(&self) -> String {
        format!(
            "FloodingViolation(account_id={}, day={}, total_posted={})",
            self.inner.account_id, self.inner.day, self.inner.total_posted
        )
    }
}

#[pyclass(name = "SyntheticDataset", frozen, skip_from_py_object, module = "delstream")]
pub struct PyDataset {
    inner: synth::SyntheticDataset,
}

#[pymethods]
impl PyDataset {
    #[getter]
    fn notices(&self) -> Vec<PyNotice> {
        self.inner.notices.iter().map(|&inner| PyNotice { inner }).collect()
    }

    #[getter]
    fn snapshots(&self) -> Vec<PySnapshot> {
        self.inner
            .snapshots
            .iter()
            .cloned()
            .map(|inner| PySnapshot { inner })
            .collect()
    }

    fn ground_truth<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        to_py(py, &self.inner.truth)
    }

    /// Writes events.jsonl and snapshots.jsonl into `dir`.
    fn write(&self, dir: &str) -> PyResult<()> {
        let dir = std::path::Path::new(dir);
        let io_err = |e: delstream_core::io::IoError| PyIOError::new_err(e.to_string());
        delstream_core::io::write_notices(&dir.join("events.jsonl"), &self.inner.notices).map_err(io_err)?;
        delstream_core::io::write_snapshots(&dir.join("snapshots.jsonl"), &self.inner.snapshots).map_err(io_err)
    }
}

#[pyfunction]
fn estimate_consecutive(n_t: u64, n_next: u64) -> Option<u64> {
    estimator::estimate_consecutive(n_t, n_next)
}

#[pyfunction]
fn estimate_gap(n_start: u64, n_end: u64, start: &str, end: &str) -> PyResult<Option<f64>> {
    estimator::estimate_gap(n_start, n_end, parse_day(start)?, parse_day(end)?).map_err(value_err)
}

#[pyfunction]
fn total_posted(n_prev: u64, n_curr: u64, deletions: u64) -> i64 {
    flood::total_posted(n_prev, n_curr, deletions)
}

#[pyfunction]
fn ks_two_sample(a: Vec<f64>, b: Vec<f64>) -> PyResult<f64> {
    estimator::ks_two_sample(&a, &b).map_err(value_err)
}

/// Returns (statistic, p_value).
#[pyfunction]
#[pyo3(signature = (a, b, permutations = estimator::DEFAULT_PERMUTATIONS, seed = 0))]
fn ks_permutation_test(a: Vec<f64>, b: Vec<f64>, permutations: usize, seed: u64) -> PyResult<(f64, f64)> {
    let t = estimator::ks_permutation_test(&a, &b, permutations, seed).map_err(value_err)?;
    Ok((t.statistic, t.p_value))
}

#[pyfunction]
fn ccdf(samples: Vec<f64>) -> PyResult<Vec<(f64, f64)>> {
    estimator::ccdf(&samples).map_err(value_err)
}

#[pyfunction]
fn role_ratio(unlike_total: u64, deletion_total: u64) -> f64 {
    coord::role_ratio(unlike_total, deletion_total)
}

/// Creation time of a tweet as an RFC 3339 string, or None for IDs that
/// predate time-encoded IDs.
#[pyfunction]
fn decode_creation_time(tweet_id: u64) -> Option<String> {
    model::decode_creation_time(TweetId(tweet_id))
        .created_at
        .map(|t| model::format_timestamp(&t))
}

#[pyfunction]
#[pyo3(signature = (notices, threshold = ingest::DEFAULT_INCLUSION_THRESHOLD))]
fn aggregate_daily(notices: Vec<PyRef<'_, PyNotice>>, threshold: u64) -> Vec<PyDailyRecord> {
    ingest::aggregate_daily(notices.iter().map(|n| &n.inner), threshold)
        .into_iter()
        .map(|inner| PyDailyRecord { inner })
        .collect()
}

#[pyfunction]
fn aggregate_unlikes(notices: Vec<PyRef<'_, PyNotice>>) -> Vec<PyUnlike> {
    ingest::aggregate_unlikes(notices.iter().map(|n| &n.inner))
        .into_iter()
        .map(|inner| PyUnlike { inner })
        .collect()
}

#[pyfunction]
fn build_timelines(
    snapshots: Vec<PyRef<'_, PySnapshot>>,
    records: Vec<PyRef<'_, PyDailyRecord>>,
) -> PyResult<Vec<PyTimeline>> {
    let timelines = ingest::build_timelines(
        snapshots.iter().map(|s| s.inner.clone()),
        records.iter().map(|r| r.inner.clone()),
    )
    .map_err(value_err)?;
    Ok(timelines.into_iter().map(|inner| PyTimeline { inner }).collect())
}

fn unwrap_timelines(timelines: &[PyRef<'_, PyTimeline>]) -> Vec<ingest::AccountTimeline> {
    timelines.iter().map(|t| t.inner.clone()).collect()
}

#[pyfunction]
#[pyo3(signature = (timelines, floor = estimator::DEFAULT_ESTIMATE_FLOOR, per_account_median = false, exclude_gaps = false, permutations = None, seed = 0))]
fn compare_timelines<'py>(
    py: Python<'py>,
    timelines: Vec<PyRef<'py, PyTimeline>>,
    floor: u64,
    per_account_median: bool,
    exclude_gaps: bool,
    permutations: Option<usize>,
    seed: u64,
) -> PyResult<Bound<'py, PyAny>> {
    let options = CompareOptions {
        floor,
        per_account_median,
        exclude_gaps,
        permutations,
        seed,
    };
    to_py(py, &estimator::compare_timelines(&unwrap_timelines(&timelines), &options))
}

#[pyfunction]
#[pyo3(signature = (timelines, limit = flood::DEFAULT_DAILY_LIMIT))]
fn detect_flooding(timelines: Vec<PyRef<'_, PyTimeline>>, limit: u64) -> Vec<PyViolation> {
    flood::detect(&unwrap_timelines(&timelines), limit)
        .into_iter()
        .map(|inner| PyViolation { inner })
        .collect()
}

#[pyfunction]
#[pyo3(signature = (timelines, violations, window_days = stats::DEFAULT_WINDOW_DAYS))]
fn summarize<'py>(
    py: Python<'py>,
    timelines: Vec<PyRef<'py, PyTimeline>>,
    violations: Vec<PyRef<'py, PyViolation>>,
    window_days: u32,
) -> PyResult<Bound<'py, PyAny>> {
    let violations: Vec<_> = violations.iter().map(|v| v.inner.clone()).collect();
    to_py(py, &stats::summarize(&unwrap_timelines(&timelines), &violations, window_days, None))
}

#[pyfunction]
#[pyo3(signature = (descriptions, top_k = 20))]
fn profile_terms(descriptions: Vec<String>, top_k: usize) -> Vec<(String, u64)> {
    stats::profile_terms(descriptions.iter().map(String::as_str), top_k, &stats::default_stopwords())
}

/// Returns a dict with nodes, edges, components and unliker-filter counts.
#[pyfunction]
#[pyo3(signature = (records, unlikes, min_unlikes = coord::DEFAULT_MIN_UNLIKES, min_component = coord::DEFAULT_MIN_COMPONENT))]
fn detect_coordination<'py>(
    py: Python<'py>,
    records: Vec<PyRef<'py, PyDailyRecord>>,
    unlikes: Vec<PyRef<'py, PyUnlike>>,
    min_unlikes: u64,
    min_component: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let records: Vec<_> = records.iter().map(|r| r.inner.clone()).collect();
    let unlikes: Vec<_> = unlikes.iter().map(|u| u.inner).collect();
    let report = coord::detect_coordination(&records, &unlikes, &coord::CoordinationOptions { min_unlikes, min_component });

    #[derive(Serialize)]
    struct Node {
        account_id: AccountId,
        unlike_total: u64,
        deletion_total: u64,
        role_ratio: f64,
        in_degree: usize,
        component_id: AccountId,
    }
    #[derive(Serialize)]
    struct Out<'a> {
        nodes: Vec<Node>,
        edges: Vec<(AccountId, AccountId)>,
        components: &'a [coord::Component],
        unliker_filter: coord::UnlikerFilterStats,
        components_before_filter: usize,
    }
    let g = &report.graph;
    let out = Out {
        nodes: g
            .nodes
            .iter()
            .map(|(&account_id, n)| Node {
                account_id,
                unlike_total: n.unlike_total,
                deletion_total: n.deletion_total,
                role_ratio: n.role_ratio(),
                in_degree: n.in_degree,
                component_id: n.component_id,
            })
            .collect(),
        edges: g.edges.iter().copied().collect(),
        components: &g.components,
        unliker_filter: report.unliker_filter,
        components_before_filter: report.components_before_filter,
    };
    to_py(py, &out)
}

/// Generates a population from a TOML spec.
#[pyfunction]
#[pyo3(signature = (spec_toml, seed = 0))]
fn generate(spec_toml: &str, seed: u64) -> PyResult<PyDataset> {
    let spec = synth::PopulationSpec::from_toml(spec_toml).map_err(value_err)?;
    synth::generate(&spec, seed).map(|inner| PyDataset { inner }).map_err(value_err)
}

#[pymodule]
fn delstream(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyNotice>()?;
    m.add_class::<PySnapshot>()?;
    m.add_class::<PyDailyRecord>()?;
    m.add_class::<PyUnlike>()?;
    m.add_class::<PyTimeline>()?;
    m.add_class::<PyViolation>()?;
    m.add_class::<PyDataset>()?;
    m.add_function(wrap_pyfunction!(estimate_consecutive, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_gap, m)?)?;
    m.add_function(wrap_pyfunction!(total_posted, m)?)?;
    m.add_function(wrap_pyfunction!(ks_two_sample, m)?)?;
    m.add_function(wrap_pyfunction!(ks_permutation_test, m)?)?;
    m.add_function(wrap_pyfunction!(ccdf, m)?)?;
    m.add_function(wrap_pyfunction!(role_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(decode_creation_time, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_daily, m)?)?;
    m.add_function(wrap_pyfunction!(aggregate_unlikes, m)?)?;
    m.add_function(wrap_pyfunction!(build_timelines, m)?)?;
    m.add_function(wrap_pyfunction!(compare_timelines, m)?)?;
    m.add_function(wrap_pyfunction!(detect_flooding, m)?)?;
    m.add_function(wrap_pyfunction!(summarize, m)?)?;
    m.add_function(wrap_pyfunction!(profile_terms, m)?)?;
    m.add_function(wrap_pyfunction!(detect_coordination, m)?)?;
    m.add_function(wrap_pyfunction!(generate, m)?)?;
    Ok(())
}
