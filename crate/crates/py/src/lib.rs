//! Python bindings. Node ids are 0-based; probabilities come back as
//! `fractions.Fraction`.

use std::collections::BTreeMap;

use num_bigint::BigUint;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

use connpart::format::{self, GraphFormat};
use connpart::montecarlo::{self, compare};
use connpart::{oracle, prob, sampler, EnumerationBudget, ErrorKind, Laplacian, Probability, RngState, TreeMode};

fn py_err(e: connpart::Error) -> PyErr {
    match e.kind() {
        ErrorKind::Budget => PyRuntimeError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

fn fraction<'py>(py: Python<'py>, p: &Probability) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((p.numer().clone(), p.denom().clone()))
}

fn parse_mode(mode: &str) -> PyResult<TreeMode> {
    mode.parse().map_err(PyValueError::new_err)
}

fn budget(max_trees: Option<u64>) -> EnumerationBudget {
    let d = EnumerationBudget::default();
    EnumerationBudget {
        max_trees: max_trees.unwrap_or(d.max_trees),
        ..d
    }
}

/// Simple undirected graph on nodes `0..n`.
#[pyclass(frozen, name = "Graph", module = "connpart")]
struct PyGraph(connpart::Graph);

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        connpart::Graph::new(n, edges).map(Self).map_err(py_err)
    }

    /// Parses the 1-based edge-list text format.
    #[staticmethod]
    fn from_edge_list(text: &str) -> PyResult<Self> {
        format::load_graph(text, GraphFormat::EdgeList).map(Self).map_err(py_err)
    }

    /// Parses a 0/1 adjacency matrix.
    #[staticmethod]
    fn from_adjacency_matrix(text: &str) -> PyResult<Self> {
        format::load_graph(text, GraphFormat::AdjacencyMatrix).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn complete(n: usize) -> Self {
        Self(connpart::Graph::complete(n))
    }

    #[staticmethod]
    fn path(n: usize) -> Self {
        Self(connpart::Graph::path(n))
    }

    #[staticmethod]
    fn cycle(n: usize) -> Self {
        Self(connpart::Graph::cycle(n))
    }

    /// The ten-node example graph.
    #[staticmethod]
    fn example() -> Self {
        Self(connpart::fixtures::example_graph())
    }

    #[getter]
    fn node_count(&self) -> usize {
        self.0.node_count()
    }

    #[getter]
    fn edge_count(&self) -> usize {
        self.0.edge_count()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.0.edges().to_vec()
    }

    fn is_connected(&self) -> bool {
        self.0.is_connected()
    }

    /// Exact number of spanning trees.
    fn tree_count(&self) -> BigUint {
        self.0.tree_count().clone()
    }

    fn laplacian(&self) -> Vec<Vec<i64>> {
        self.0.laplacian().to_i64_rows().expect("degrees fit in i64")
    }

    /// Multiplicity matrix of the multigraph obtained by contracting each
    /// block of `partition` to a node.
    fn contract(&self, partition: &PyPartition) -> PyResult<Vec<Vec<u64>>> {
        self.0.contract(&partition.0).map(|m| m.matrix()).map_err(py_err)
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.0.node_count(), self.0.edge_count())
    }
}

/// Set partition of `0..n` into unlabeled blocks, stored canonically.
#[pyclass(frozen, eq, hash, name = "Partition", module = "connpart")]
#[derive(PartialEq, Eq, Hash)]
struct PyPartition(connpart::Partition);

#[pymethods]
impl PyPartition {
    #[new]
    fn new(blocks: Vec<Vec<usize>>) -> PyResult<Self> {
        connpart::Partition::new(blocks).map(Self).map_err(py_err)
    }

    #[staticmethod]
    fn from_labels(labels: Vec<usize>) -> Self {
        Self(connpart::Partition::from_labels(&labels))
    }

    #[getter]
    fn blocks(&self) -> Vec<Vec<usize>> {
        self.0.blocks().to_vec()
    }

    #[getter]
    fn block_count(&self) -> usize {
        self.0.block_count()
    }

    fn labels(&self) -> Vec<usize> {
        self.0.labels()
    }

    fn __len__(&self) -> usize {
        self.0.block_count()
    }

    fn __repr__(&self) -> String {
        format!("Partition({:?})", self.0.blocks())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyfunction]
fn count_spanning_trees(g: &PyGraph) -> BigUint {
    connpart::count_spanning_trees(&g.0)
}

/// Exact probability that the sampler returns `partition`.
#[pyfunction]
fn partition_probability<'py>(py: Python<'py>, g: &PyGraph, partition: &PyPartition) -> PyResult<Bound<'py, PyAny>> {
    let p = prob::partition_probability(&g.0, &partition.0).map_err(py_err)?;
    fraction(py, &p)
}

/// Every factor of the probability formula, as a dict.
#[pyfunction]
fn probability_breakdown<'py>(py: Python<'py>, g: &PyGraph, partition: &PyPartition) -> PyResult<Bound<'py, PyDict>> {
    let b = prob::probability_breakdown(&g.0, &partition.0).map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("t_G", b.graph_trees)?;
    d.set_item("t_blocks", b.block_trees)?;
    d.set_item("t_M", b.contracted_trees)?;
    d.set_item("binom", b.binomial)?;
    d.set_item("compatible_trees", b.compatible_trees)?;
    d.set_item("probability", fraction(py, &b.probability)?)?;
    Ok(d)
}

/// Probability of the split `{s, V \ s}` by the cut-edge route.
#[pyfunction]
fn two_block_probability<'py>(py: Python<'py>, g: &PyGraph, s: Vec<usize>) -> PyResult<Bound<'py, PyAny>> {
    let p = prob::two_block_probability(&g.0, &s).map_err(py_err)?;
    fraction(py, &p)
}

#[pyfunction]
#[pyo3(signature = (g, k, seed, count=1, mode="uniform-tree"))]
fn sample_connected_partitions(g: &PyGraph, k: usize, seed: u64, count: usize, mode: &str) -> PyResult<Vec<PyPartition>> {
    let mode = parse_mode(mode)?;
    let mut rng = RngState::new(seed);
    (0..count)
        .map(|_| sampler::sample_connected_partition(&g.0, k, mode, &mut rng).map(PyPartition).map_err(py_err))
        .collect()
}

/// Every connected k-partition with its exact probability, in enumeration
/// order.
#[pyfunction]
#[pyo3(signature = (g, k, max_trees=None))]
fn enumerate_connected_partitions<'py>(
    py: Python<'py>,
    g: &PyGraph,
    k: usize,
    max_trees: Option<u64>,
) -> PyResult<Vec<(PyPartition, Bound<'py, PyAny>)>> {
    let parts = oracle::enumerate_connected_partitions(&g.0, k, &budget(max_trees)).map_err(py_err)?;
    parts
        .into_iter()
        .map(|c| {
            let p = prob::partition_probability(&g.0, &c).map_err(py_err)?;
            Ok((PyPartition(c), fraction(py, &p)?))
        })
        .collect()
}

/// Probability by exhaustive (tree, deleted-edge set) counting.
#[pyfunction]
fn brute_force_probability<'py>(py: Python<'py>, g: &PyGraph, partition: &PyPartition) -> PyResult<Bound<'py, PyAny>> {
    let p = oracle::brute_force_probability(&g.0, &partition.0, &budget(None)).map_err(py_err)?;
    fraction(py, &p)
}

/// Counts of each partition over `samples` seeded sampler runs.
#[pyfunction]
#[pyo3(signature = (g, k, samples, seed, mode="uniform-tree"))]
fn run_trials(g: &PyGraph, k: usize, samples: u64, seed: u64, mode: &str) -> PyResult<Vec<(PyPartition, u64)>> {
    let tally = montecarlo::run_trials(&g.0, k, samples, seed, parse_mode(mode)?).map_err(py_err)?;
    Ok(tally.into_iter().map(|(c, n)| (PyPartition(c), n)).collect())
}

/// Samples and compares against the exact law; returns the JSON report as
/// a string.
#[pyfunction]
#[pyo3(signature = (g, k, samples, seed, mode="uniform-tree", alpha=0.001))]
fn verify(g: &PyGraph, k: usize, samples: u64, seed: u64, mode: &str, alpha: f64) -> PyResult<String> {
    let mode = parse_mode(mode)?;
    let law: BTreeMap<_, _> = montecarlo::exact_law(&g.0, k, mode, &budget(None)).map_err(py_err)?;
    let tally = montecarlo::run_trials(&g.0, k, samples, seed, mode).map_err(py_err)?;
    let mut report = compare(&tally, &law, samples).map_err(py_err)?;
    report.seed = Some(seed);
    report.mode = Some(mode);
    Ok(report.to_json(4, alpha, None).to_string())
}

#[pymodule]
#[pyo3(name = "connpart")]
fn connpart_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyPartition>()?;
    m.add_function(wrap_pyfunction!(count_spanning_trees, m)?)?;
    m.add_function(wrap_pyfunction!(partition_probability, m)?)?;
    m.add_function(wrap_pyfunction!(probability_breakdown, m)?)?;
    m.add_function(wrap_pyfunction!(two_block_probability, m)?)?;
    m.add_function(wrap_pyfunction!(sample_connected_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_connected_partitions, m)?)?;
    m.add_function(wrap_pyfunction!(brute_force_probability, m)?)?;
    m.add_function(wrap_pyfunction!(run_trials, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
