//! Weighted graphs, vertex functions and the elementary operators on them.
//!
//! Vertices are dense ids `0..n`. Adjacency lists are kept sorted in
//! ascending id order so every traversal in the crate is deterministic.

use std::collections::VecDeque;
use std::ops::Index;

use crate::error::{invalid, Error, Result};
use crate::tree::RootedTree;

/// A finite connected graph with a strictly positive vertex measure.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightedGraph {
    weights: Vec<f64>,
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
    labels: Option<Vec<String>>,
}

impl WeightedGraph {
    /// Builds a graph from vertex weights and an undirected edge list.
    ///
    /// Duplicate edges (in either orientation) collapse into one. Fails on
    /// nonpositive or non-finite weights, self-loops, dangling ids, and
    /// disconnected input.
    pub fn new(weights: Vec<f64>, edges: &[(usize, usize)]) -> Result<Self> {
        let n = weights.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        for (vertex, &weight) in weights.iter().enumerate() {
            if !weight.is_finite() {
                return Err(Error::NonFinite { vertex });
            }
            if weight <= 0.0 {
                return Err(Error::NonpositiveWeight { vertex, weight });
            }
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            for id in [a, b] {
                if id >= n {
                    return Err(Error::InvalidVertex { id, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop(a));
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut edge_count = 0;
        for list in &mut adjacency {
            list.sort_unstable();
            list.dedup();
            edge_count += list.len();
        }
        let graph = Self {
            weights,
            adjacency,
            edge_count: edge_count / 2,
            labels: None,
        };
        let components = graph.component_count();
        if components != 1 {
            return Err(Error::Disconnected { components });
        }
        Ok(graph)
    }

    /// Attaches external vertex names (one per vertex).
    pub fn with_labels(mut self, labels: Vec<String>) -> Result<Self> {
        if labels.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: labels.len(),
            });
        }
        self.labels = Some(labels);
        Ok(self)
    }

    pub fn labels(&self) -> Option<&[String]> {
        self.labels.as_deref()
    }

    /// Number of vertices.
    pub fn len(&self) -> usize {
        self.weights.len()
    }

    /// Always false: a graph has at least one vertex.
    pub fn is_empty(&self) -> bool {
        self.weights.is_empty()
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn weight(&self, t: usize) -> f64 {
        self.weights[t]
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Neighbors of `t` in ascending id order.
    pub fn neighbors(&self, t: usize) -> &[usize] {
        &self.adjacency[t]
    }

    pub fn degree(&self, t: usize) -> usize {
        self.adjacency[t].len()
    }

    pub fn has_edge(&self, a: usize, b: usize) -> bool {
        a < self.len() && self.adjacency[a].binary_search(&b).is_ok()
    }

    /// Edges as `(a, b)` with `a < b`, in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(a, list)| list.iter().filter(move |&&b| a < b).map(move |&b| (a, b)))
    }

    /// μ(V).
    pub fn total_measure(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// μ(Ω) for a subset given by vertex ids.
    pub fn measure_of(&self, subset: &[usize]) -> Result<f64> {
        let mask = self.subset_mask(Some(subset))?;
        Ok(self.masked_sum(&mask, |t| self.weights[t]))
    }

    pub fn min_weight(&self) -> f64 {
        self.weights.iter().copied().fold(f64::INFINITY, f64::min)
    }

    pub(crate) fn check_vertex(&self, id: usize) -> Result<()> {
        if id >= self.len() {
            return Err(Error::InvalidVertex { id, n: self.len() });
        }
        Ok(())
    }

    pub(crate) fn check_function(&self, f: &VertexFunction) -> Result<()> {
        if f.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: f.len(),
            });
        }
        Ok(())
    }

    /// Membership mask for an optional subset; `None` selects all of V.
    pub(crate) fn subset_mask(&self, subset: Option<&[usize]>) -> Result<Vec<bool>> {
        match subset {
            None => Ok(vec![true; self.len()]),
            Some(ids) => {
                let mut mask = vec![false; self.len()];
                for &id in ids {
                    self.check_vertex(id)?;
                    mask[id] = true;
                }
                Ok(mask)
            }
        }
    }

    fn masked_sum(&self, mask: &[bool], term: impl Fn(usize) -> f64) -> f64 {
        (0..self.len()).filter(|&t| mask[t]).map(term).sum()
    }

    fn component_count(&self) -> usize {
        let n = self.len();
        let mut seen = vec![false; n];
        let mut components = 0;
        let mut queue = VecDeque::new();
        for start in 0..n {
            if seen[start] {
                continue;
            }
            components += 1;
            seen[start] = true;
            queue.push_back(start);
            while let Some(t) = queue.pop_front() {
                for &s in &self.adjacency[t] {
                    if !seen[s] {
                        seen[s] = true;
                        queue.push_back(s);
                    }
                }
            }
        }
        components
    }
}

/// A real-valued function on the vertices of a graph.
#[derive(Debug, Clone, PartialEq)]
pub struct VertexFunction(Vec<f64>);

impl VertexFunction {
    /// Wraps values, rejecting NaN and infinities.
    pub fn new(values: Vec<f64>) -> Result<Self> {
        if let Some(vertex) = values.iter().position(|v| !v.is_finite()) {
            return Err(Error::NonFinite { vertex });
        }
        Ok(Self(values))
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    pub fn constant(n: usize, value: f64) -> Self {
        Self(vec![value; n])
    }

    /// Values already known to be finite.
    pub(crate) fn from_finite(values: Vec<f64>) -> Self {
        debug_assert!(values.iter().all(|v| v.is_finite()));
        Self(values)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn values(&self) -> &[f64] {
        &self.0
    }

    pub fn into_values(self) -> Vec<f64> {
        self.0
    }

    pub fn iter(&self) -> std::slice::Iter<'_, f64> {
        self.0.iter()
    }

    /// Unweighted supremum of |f|.
    pub fn sup_abs(&self) -> f64 {
        self.0.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn abs(&self) -> Self {
        Self(self.0.iter().map(|v| v.abs()).collect())
    }

    pub fn scale(&self, alpha: f64) -> Self {
        Self(self.0.iter().map(|v| alpha * v).collect())
    }

    /// Pointwise `alpha * self + beta * other`.
    pub fn combine(&self, alpha: f64, other: &Self, beta: f64) -> Self {
        assert_eq!(self.len(), other.len(), "vertex function length mismatch");
        Self(
            self.0
                .iter()
                .zip(&other.0)
                .map(|(a, b)| alpha * a + beta * b)
                .collect(),
        )
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|&v| v == 0.0)
    }
}

impl Index<usize> for VertexFunction {
    type Output = f64;

    fn index(&self, t: usize) -> &f64 {
        &self.0[t]
    }
}

impl<'a> IntoIterator for &'a VertexFunction {
    type Item = &'a f64;
    type IntoIter = std::slice::Iter<'a, f64>;

    fn into_iter(self) -> Self::IntoIter {
        self.0.iter()
    }
}

/// Which adjacency the gradient sums over.
#[derive(Debug, Clone, Copy)]
pub enum EdgeSet<'a> {
    /// Every edge of the host graph.
    Full,
    /// Only the edges of a spanning tree.
    Tree(&'a RootedTree),
}

impl EdgeSet<'_> {
    pub fn name(&self) -> &'static str {
        match self {
            EdgeSet::Full => "full",
            EdgeSet::Tree(_) => "tree",
        }
    }
}

pub(crate) fn check_exponent(p: f64) -> Result<()> {
    if p.is_nan() || p < 1.0 {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Weighted ℓᵖ norm on `subset` (all of V by default).
///
/// For `p = ∞` this is the plain supremum of |f| with no weighting.
pub fn lp_norm(
    f: &VertexFunction,
    p: f64,
    g: &WeightedGraph,
    subset: Option<&[usize]>,
) -> Result<f64> {
    check_exponent(p)?;
    g.check_function(f)?;
    let mask = g.subset_mask(subset)?;
    Ok(lp_norm_masked(f.values(), p, g.weights(), &mask))
}

pub(crate) fn lp_norm_masked(values: &[f64], p: f64, weights: &[f64], mask: &[bool]) -> f64 {
    let selected = values
        .iter()
        .zip(weights)
        .zip(mask)
        .filter(|(_, &m)| m)
        .map(|(pair, _)| pair);
    if p.is_infinite() {
        return selected.fold(0.0, |m, (v, _)| m.max(v.abs()));
    }
    if p == 1.0 {
        return selected.map(|(v, w)| v.abs() * w).sum();
    }
    // Scale by the sup to keep |f|^p representable for large p.
    let scale = values
        .iter()
        .zip(mask)
        .filter(|(_, &m)| m)
        .fold(0.0_f64, |m, (v, _)| m.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let sum: f64 = selected.map(|(v, w)| (v.abs() / scale).powf(p) * w).sum();
    scale * sum.powf(1.0 / p)
}

/// Full-vertex-set ℓᵖ norm on raw slices.
pub(crate) fn lp_norm_slice(values: &[f64], p: f64, weights: &[f64]) -> f64 {
    lp_norm_masked(values, p, weights, &vec![true; values.len()])
}

/// μ-weighted average of `f` over `subset` (all of V by default).
pub fn weighted_mean(
    f: &VertexFunction,
    g: &WeightedGraph,
    subset: Option<&[usize]>,
) -> Result<f64> {
    g.check_function(f)?;
    let mask = g.subset_mask(subset)?;
    if !mask.iter().any(|&m| m) {
        return Err(Error::EmptySubset);
    }
    let mass = g.masked_sum(&mask, |t| f[t] * g.weight(t));
    let measure = g.masked_sum(&mask, |t| g.weight(t));
    Ok(mass / measure)
}

/// Σ f(t) μ(t) over V.
pub fn weighted_sum(f: &VertexFunction, g: &WeightedGraph) -> f64 {
    f.iter().zip(g.weights()).map(|(v, w)| v * w).sum()
}

/// Returns `f - f_V`, which sums to zero against μ.
pub fn project_zero_mean(f: &VertexFunction, g: &WeightedGraph) -> Result<VertexFunction> {
    let mean = weighted_mean(f, g, None)?;
    Ok(VertexFunction(f.iter().map(|v| v - mean).collect()))
}

/// Checks `|Σ f μ| <= rel_tol · ‖f‖_∞ · μ(V)`.
pub fn check_zero_mean(f: &VertexFunction, g: &WeightedGraph, rel_tol: f64) -> Result<()> {
    g.check_function(f)?;
    let sum = weighted_sum(f, g);
    let tolerance = rel_tol * f.sup_abs() * g.total_measure();
    if sum.abs() > tolerance {
        return Err(Error::NotZeroMean { sum, tolerance });
    }
    Ok(())
}

/// Length of the gradient: `t ↦ Σ_{s∼t} |f(s) − f(t)|` over the chosen edge set.
pub fn gradient_length(
    f: &VertexFunction,
    g: &WeightedGraph,
    edges: EdgeSet<'_>,
) -> Result<VertexFunction> {
    g.check_function(f)?;
    let mut out = vec![0.0; g.len()];
    match edges {
        EdgeSet::Full => {
            for (t, slot) in out.iter_mut().enumerate() {
                *slot = g.neighbors(t).iter().map(|&s| (f[s] - f[t]).abs()).sum();
            }
        }
        EdgeSet::Tree(tree) => {
            tree.check_spans(g)?;
            for (t, parent) in tree.parents().iter().enumerate() {
                if let Some(p) = *parent {
                    let d = (f[t] - f[p]).abs();
                    out[t] += d;
                    out[p] += d;
                }
            }
        }
    }
    Ok(VertexFunction(out))
}

/// `f` on `subset`, zero elsewhere.
pub fn restrict(f: &VertexFunction, subset: &[usize]) -> Result<VertexFunction> {
    let mut out = vec![0.0; f.len()];
    for &t in subset {
        if t >= f.len() {
            return Err(Error::InvalidVertex { id: t, n: f.len() });
        }
        out[t] = f[t];
    }
    Ok(VertexFunction(out))
}

pub(crate) fn check_positive(name: &str, value: f64) -> Result<()> {
    if !(value.is_finite() && value > 0.0) {
        return Err(invalid(format!(
            "{name} must be positive and finite, got {value}"
        )));
    }
    Ok(())
}
