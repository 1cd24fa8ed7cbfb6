//! Python bindings for `graph_poincare`.

use graph_poincare::decomp::{self, EdgeDecomposition};
use graph_poincare::generators;
use graph_poincare::graph::{EdgeSet, VertexFunction, WeightedGraph};
use graph_poincare::hardy;
use graph_poincare::io;
use graph_poincare::poincare::{self, AscentConfig, GradientMode};
use graph_poincare::tree::{self, RootedTree, SearchMode, ShadowSummary, Strategy, TreeSearch};
use graph_poincare::Error;
use pyo3::exceptions::{PyOSError, PyValueError};
use pyo3::prelude::*;

fn to_py(e: Error) -> PyErr {
    match e {
        Error::Io(e) => PyOSError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

trait IntoPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> IntoPy<T> for graph_poincare::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(to_py)
    }
}

fn function(values: Vec<f64>) -> PyResult<VertexFunction> {
    VertexFunction::new(values).py()
}

fn gradient_mode(name: &str) -> PyResult<GradientMode> {
    match name {
        "full" => Ok(GradientMode::Full),
        "tree" => Ok(GradientMode::TreeRestricted),
        other => Err(PyValueError::new_err(format!(
            "mode must be 'full' or 'tree', got {other:?}"
        ))),
    }
}

/// Connected graph with positive vertex weights.
#[pyclass(name = "WeightedGraph", module = "graph_poincare_py", frozen)]
struct PyGraph {
    inner: WeightedGraph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(weights: Vec<f64>, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self {
            inner: WeightedGraph::new(weights, &edges).py()?,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __repr__(&self) -> String {
        format!(
            "WeightedGraph(vertices={}, edges={}, total_measure={})",
            self.inner.len(),
            self.inner.edge_count(),
            self.inner.total_measure()
        )
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().collect()
    }

    #[getter]
    fn labels(&self) -> Option<Vec<String>> {
        self.inner.labels().map(<[String]>::to_vec)
    }

    fn total_measure(&self) -> f64 {
        self.inner.total_measure()
    }

    fn neighbors(&self, t: usize) -> PyResult<Vec<usize>> {
        if t >= self.inner.len() {
            return Err(to_py(Error::InvalidVertex {
                id: t,
                n: self.inner.len(),
            }));
        }
        Ok(self.inner.neighbors(t).to_vec())
    }
}

/// Rooted spanning tree.
#[pyclass(name = "RootedTree", module = "graph_poincare_py", frozen)]
struct PyTree {
    inner: RootedTree,
}

#[pymethods]
impl PyTree {
    /// `parents[root]` must be `None`.
    #[new]
    fn new(root: usize, parents: Vec<Option<usize>>) -> PyResult<Self> {
        Ok(Self {
            inner: RootedTree::from_parents(root, parents).py()?,
        })
    }

    /// Breadth-first (`"bfs"`) or depth-first (`"dfs"`) spanning tree.
    #[staticmethod]
    #[pyo3(signature = (graph, root = 0, strategy = "bfs"))]
    fn spanning(graph: &PyGraph, root: usize, strategy: &str) -> PyResult<Self> {
        let strategy = match strategy {
            "bfs" => Strategy::BreadthFirst,
            "dfs" => Strategy::DepthFirst,
            other => return Err(PyValueError::new_err(format!("unknown strategy {other:?}"))),
        };
        Ok(Self {
            inner: tree::build_spanning_tree(&graph.inner, root, strategy).py()?,
        })
    }

    /// Searches for a tree with small John constant (`"greedy"` or `"exhaustive"`).
    #[staticmethod]
    #[pyo3(signature = (graph, mode = "greedy", budget = 10_000, seed = 0))]
    fn optimized(graph: &PyGraph, mode: &str, budget: usize, seed: u64) -> PyResult<Self> {
        let mode = match mode {
            "greedy" => SearchMode::GreedyLocal,
            "exhaustive" => SearchMode::Exhaustive,
            other => {
                return Err(PyValueError::new_err(format!(
                    "unknown search mode {other:?}"
                )))
            }
        };
        let search = TreeSearch {
            mode,
            budget,
            seed,
            ..TreeSearch::default()
        };
        Ok(Self {
            inner: tree::optimize_tree(&graph.inner, &search).py()?.0,
        })
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    #[getter]
    fn root(&self) -> usize {
        self.inner.root()
    }

    #[getter]
    fn parents(&self) -> Vec<Option<usize>> {
        self.inner.parents().to_vec()
    }

    fn children(&self, t: usize) -> PyResult<Vec<usize>> {
        if t >= self.inner.len() {
            return Err(to_py(Error::InvalidVertex {
                id: t,
                n: self.inner.len(),
            }));
        }
        Ok(self.inner.children(t).to_vec())
    }

    fn max_degree(&self) -> usize {
        self.inner.max_degree()
    }

    fn summary(&self, graph: &PyGraph) -> PyResult<PySummary> {
        Ok(PySummary {
            inner: tree::shadow_summary(&graph.inner, &self.inner).py()?,
        })
    }
}

/// Shadow measures and the John constant of a (graph, tree) pair.
#[pyclass(name = "ShadowSummary", module = "graph_poincare_py", frozen)]
struct PySummary {
    inner: ShadowSummary,
}

#[pymethods]
impl PySummary {
    #[getter]
    fn john_constant(&self) -> f64 {
        self.inner.john_constant
    }

    #[getter]
    fn tree_degree_bound(&self) -> usize {
        self.inner.tree_degree_bound
    }

    #[getter]
    fn worst_vertex(&self) -> usize {
        self.inner.worst_vertex
    }

    #[getter]
    fn shadow_measure(&self) -> Vec<f64> {
        self.inner.shadow_measure.clone()
    }

    #[getter]
    fn ratio(&self) -> Vec<f64> {
        self.inner.ratio.clone()
    }

    fn __repr__(&self) -> String {
        format!(
            "ShadowSummary(john_constant={}, tree_degree_bound={})",
            self.inner.john_constant, self.inner.tree_degree_bound
        )
    }
}

/// Edge pieces of a function, one per non-root vertex.
#[pyclass(name = "EdgeDecomposition", module = "graph_poincare_py", frozen)]
struct PyDecomposition {
    inner: EdgeDecomposition,
}

#[pymethods]
impl PyDecomposition {
    /// `(vertex, parent, value_at_vertex, value_at_parent)` per piece.
    fn pieces(&self) -> Vec<(usize, usize, f64, f64)> {
        self.inner
            .pieces()
            .iter()
            .map(|p| (p.vertex, p.parent, p.at_vertex, p.at_parent))
            .collect()
    }

    fn reconstruct(&self) -> Vec<f64> {
        decomp::reconstruct(&self.inner).into_values()
    }

    fn q_energy(&self, graph: &PyGraph, q: f64) -> PyResult<f64> {
        decomp::q_energy(&self.inner, &graph.inner, q).py()
    }
}

fn graph_and_tree(pair: (WeightedGraph, RootedTree)) -> (PyGraph, PyTree) {
    (PyGraph { inner: pair.0 }, PyTree { inner: pair.1 })
}

#[pyfunction]
fn kary_tree(k: usize, depth: usize, alpha: f64) -> PyResult<(PyGraph, PyTree)> {
    Ok(graph_and_tree(generators::kary_tree(k, depth, alpha).py()?))
}

#[pyfunction]
#[pyo3(signature = (last, gamma = 2.0))]
fn log_path(last: usize, gamma: f64) -> PyResult<(PyGraph, PyTree)> {
    Ok(graph_and_tree(generators::log_path(last, gamma).py()?))
}

#[pyfunction]
#[pyo3(signature = (n, edge_probability, low = 0.1, high = 1.0, seed = 0))]
fn random_connected(
    n: usize,
    edge_probability: f64,
    low: f64,
    high: f64,
    seed: u64,
) -> PyResult<PyGraph> {
    let law = generators::WeightLaw::Uniform { low, high };
    Ok(PyGraph {
        inner: generators::random_connected(n, edge_probability, law, seed).py()?,
    })
}

#[pyfunction]
#[pyo3(signature = (nx, ny, mu = 1.0))]
fn grid(nx: usize, ny: usize, mu: f64) -> PyResult<PyGraph> {
    Ok(PyGraph {
        inner: generators::grid(nx, ny, generators::GridWeights::Constant(mu)).py()?,
    })
}

/// Averages of `|f|` over each shadow.
#[pyfunction]
fn apply_hardy(f: Vec<f64>, graph: &PyGraph, tree: &PyTree) -> PyResult<Vec<f64>> {
    let summary = tree::shadow_summary(&graph.inner, &tree.inner).py()?;
    Ok(
        hardy::apply_hardy(&function(f)?, &graph.inner, &tree.inner, &summary)
            .py()?
            .into_values(),
    )
}

#[pyfunction]
fn decompose(f: Vec<f64>, graph: &PyGraph, tree: &PyTree) -> PyResult<PyDecomposition> {
    Ok(PyDecomposition {
        inner: decomp::decompose(&function(f)?, &graph.inner, &tree.inner).py()?,
    })
}

#[pyfunction]
fn theoretical_constant(c: f64, m: usize, p: f64) -> PyResult<f64> {
    poincare::theoretical_constant(c, m, p).py()
}

/// `(ratio, theoretical_constant, passes)` for a zero-mean `f`.
#[pyfunction]
#[pyo3(signature = (f, graph, tree, p, mode = "full"))]
fn global_ratio(
    f: Vec<f64>,
    graph: &PyGraph,
    tree: &PyTree,
    p: f64,
    mode: &str,
) -> PyResult<(f64, f64, bool)> {
    let summary = tree::shadow_summary(&graph.inner, &tree.inner).py()?;
    let r = poincare::global_ratio(
        &function(f)?,
        &graph.inner,
        &tree.inner,
        &summary,
        p,
        gradient_mode(mode)?,
    )
    .py()?;
    Ok((r.ratio, r.theoretical_cp, r.passes))
}

/// `(best_ratio, witness)`; `tree` is required when `mode == "tree"`.
#[pyfunction]
#[pyo3(signature = (graph, p, restarts = 8, iters = 2000, seed = 0, mode = "full", tree = None))]
fn estimate_sharp_constant(
    graph: &PyGraph,
    p: f64,
    restarts: usize,
    iters: usize,
    seed: u64,
    mode: &str,
    tree: Option<&PyTree>,
) -> PyResult<(f64, Vec<f64>)> {
    let edges = match (gradient_mode(mode)?, tree) {
        (GradientMode::Full, _) => EdgeSet::Full,
        (GradientMode::TreeRestricted, Some(t)) => EdgeSet::Tree(&t.inner),
        (GradientMode::TreeRestricted, None) => {
            return Err(PyValueError::new_err("mode 'tree' needs a tree"))
        }
    };
    let est = poincare::estimate_sharp_constant(
        &graph.inner,
        edges,
        p,
        &AscentConfig {
            restarts,
            iters,
            seed,
        },
    )
    .py()?;
    Ok((est.ratio, est.witness.into_values()))
}

#[pyfunction]
fn load_graph(path: std::path::PathBuf) -> PyResult<(PyGraph, Option<PyTree>)> {
    let (g, t) = io::load_graph(path).py()?;
    Ok((PyGraph { inner: g }, t.map(|inner| PyTree { inner })))
}

#[pyfunction]
#[pyo3(signature = (path, graph, tree = None))]
fn save_graph(path: std::path::PathBuf, graph: &PyGraph, tree: Option<&PyTree>) -> PyResult<()> {
    io::save_graph(path, &graph.inner, tree.map(|t| &t.inner)).py()
}

#[pymodule]
pub fn graph_poincare_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyGraph>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PySummary>()?;
    m.add_class::<PyDecomposition>()?;
    m.add_function(wrap_pyfunction!(kary_tree, m)?)?;
    m.add_function(wrap_pyfunction!(log_path, m)?)?;
    m.add_function(wrap_pyfunction!(random_connected, m)?)?;
    m.add_function(wrap_pyfunction!(grid, m)?)?;
    m.add_function(wrap_pyfunction!(apply_hardy, m)?)?;
    m.add_function(wrap_pyfunction!(decompose, m)?)?;
    m.add_function(wrap_pyfunction!(theoretical_constant, m)?)?;
    m.add_function(wrap_pyfunction!(global_ratio, m)?)?;
    m.add_function(wrap_pyfunction!(estimate_sharp_constant, m)?)?;
    m.add_function(wrap_pyfunction!(load_graph, m)?)?;
    m.add_function(wrap_pyfunction!(save_graph, m)?)?;
    Ok(())
}
