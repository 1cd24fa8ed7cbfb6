//! Example graph families and seeded random test graphs.
//!
//! Infinite families are produced as finite truncations: the k-ary tree by
//! depth and the logarithmic path by its last label.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{invalid, Result};
use crate::graph::{check_positive, WeightedGraph};
use crate::tree::RootedTree;

/// Weight law for [`random_connected`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum WeightLaw {
    /// μ(t) drawn uniformly from `[low, high)`.
    Uniform { low: f64, high: f64 },
    /// μ(t) = exp(−rate · depth(t)), depth taken in the seeding spanning tree.
    ExponentialOfDepth { rate: f64 },
}

#[derive(Debug, Clone, PartialEq)]
pub enum GridWeights {
    Constant(f64),
    /// Row-major, `nx * ny` entries.
    Supplied(Vec<f64>),
}

/// Declarative description of a generated graph.
#[derive(Debug, Clone, PartialEq)]
pub enum GeneratorSpec {
    KaryTree {
        k: usize,
        depth: usize,
        alpha: f64,
    },
    LogPath {
        last: usize,
        gamma: f64,
    },
    RandomConnected {
        n: usize,
        edge_probability: f64,
        weights: WeightLaw,
        seed: u64,
    },
    Grid {
        nx: usize,
        ny: usize,
        weights: GridWeights,
    },
}

impl GeneratorSpec {
    /// Builds the graph, plus its canonical tree for the tree families.
    pub fn build(&self) -> Result<(WeightedGraph, Option<RootedTree>)> {
        match self {
            GeneratorSpec::KaryTree { k, depth, alpha } => {
                let (g, t) = kary_tree(*k, *depth, *alpha)?;
                Ok((g, Some(t)))
            }
            GeneratorSpec::LogPath { last, gamma } => {
                let (g, t) = log_path(*last, *gamma)?;
                Ok((g, Some(t)))
            }
            GeneratorSpec::RandomConnected {
                n,
                edge_probability,
                weights,
                seed,
            } => Ok((
                random_connected(*n, *edge_probability, *weights, *seed)?,
                None,
            )),
            GeneratorSpec::Grid { nx, ny, weights } => Ok((grid(*nx, *ny, weights.clone())?, None)),
        }
    }
}

/// Complete k-ary tree of the given depth with μ(t) = α^dist(t, root).
///
/// Vertices are numbered level by level, so the children of `t` are
/// `k t + 1 ..= k t + k`.
pub fn kary_tree(k: usize, depth: usize, alpha: f64) -> Result<(WeightedGraph, RootedTree)> {
    if k == 0 {
        return Err(invalid("k-ary tree needs k >= 1"));
    }
    if !(alpha > 0.0 && alpha * (k as f64) < 1.0) {
        return Err(invalid(format!(
            "alpha must lie in (0, 1/k), got {alpha} for k = {k}"
        )));
    }
    let mut level_sizes = vec![1usize];
    for _ in 0..depth {
        let next = level_sizes
            .last()
            .unwrap()
            .checked_mul(k)
            .ok_or_else(|| invalid("tree too large"))?;
        level_sizes.push(next);
    }
    let n: usize = level_sizes.iter().sum();
    let mut weights = Vec::with_capacity(n);
    for (d, &size) in level_sizes.iter().enumerate() {
        weights.extend(std::iter::repeat_n(alpha.powi(d as i32), size));
    }
    let parent: Vec<Option<usize>> = (0..n)
        .map(|t| if t == 0 { None } else { Some((t - 1) / k) })
        .collect();
    let edges: Vec<_> = (1..n).map(|t| ((t - 1) / k, t)).collect();
    let g = WeightedGraph::new(weights, &edges)?;
    let tree = RootedTree::from_parents(0, parent)?;
    Ok((g, tree))
}

/// Path on labels `2..=last`, consecutive labels adjacent, rooted at 2, with
/// μ(n) = 1 / (n (ln n)^γ). Internal id `i` carries label `i + 2`.
pub fn log_path(last: usize, gamma: f64) -> Result<(WeightedGraph, RootedTree)> {
    if last < 3 {
        return Err(invalid(format!(
            "log path needs last label >= 3, got {last}"
        )));
    }
    if !(gamma > 1.0 && gamma.is_finite()) {
        return Err(invalid(format!("log path needs gamma > 1, got {gamma}")));
    }
    let n = last - 1;
    let weights: Vec<f64> = (2..=last)
        .map(|label| {
            let x = label as f64;
            1.0 / (x * x.ln().powf(gamma))
        })
        .collect();
    let edges: Vec<_> = (1..n).map(|i| (i - 1, i)).collect();
    let labels = (2..=last).map(|label| label.to_string()).collect();
    let g = WeightedGraph::new(weights, &edges)?.with_labels(labels)?;
    let parent = (0..n).map(|i| i.checked_sub(1)).collect();
    let tree = RootedTree::from_parents(0, parent)?;
    Ok((g, tree))
}

/// Seeded Erdős–Rényi graph made connected by first laying down a random
/// spanning tree (each vertex, in a random order, attaches to an earlier one).
///
/// Deterministic per seed: ChaCha8 with a fixed draw order.
pub fn random_connected(
    n: usize,
    edge_probability: f64,
    weights: WeightLaw,
    seed: u64,
) -> Result<WeightedGraph> {
    if n == 0 {
        return Err(invalid("random graph needs n >= 1"));
    }
    if !(0.0..=1.0).contains(&edge_probability) {
        return Err(invalid(format!(
            "edge probability must lie in [0, 1], got {edge_probability}"
        )));
    }
    match weights {
        WeightLaw::Uniform { low, high } => {
            check_positive("uniform lower bound", low)?;
            if !(high > low && high.is_finite()) {
                return Err(invalid(format!(
                    "uniform weights need low < high, got [{low}, {high})"
                )));
            }
        }
        WeightLaw::ExponentialOfDepth { rate } => {
            if !(rate >= 0.0 && rate.is_finite()) {
                return Err(invalid(format!(
                    "depth rate must be finite and >= 0, got {rate}"
                )));
            }
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    order.shuffle(&mut rng);
    let mut depth = vec![0usize; n];
    let mut edges = Vec::new();
    for i in 1..n {
        let child = order[i];
        let parent = order[rng.random_range(0..i)];
        depth[child] = depth[parent] + 1;
        edges.push((parent.min(child), parent.max(child)));
    }
    if edge_probability > 0.0 {
        for a in 0..n {
            for b in a + 1..n {
                if rng.random_bool(edge_probability) {
                    edges.push((a, b));
                }
            }
        }
    }
    let mu = match weights {
        WeightLaw::Uniform { low, high } => (0..n).map(|_| rng.random_range(low..high)).collect(),
        WeightLaw::ExponentialOfDepth { rate } => {
            depth.iter().map(|&d| (-rate * d as f64).exp()).collect()
        }
    };
    WeightedGraph::new(mu, &edges)
}

/// `nx × ny` lattice with 4-neighbor adjacency; vertex `(x, y)` has id `y * nx + x`.
pub fn grid(nx: usize, ny: usize, weights: GridWeights) -> Result<WeightedGraph> {
    if nx == 0 || ny == 0 {
        return Err(invalid(format!(
            "grid dimensions must be positive, got {nx}x{ny}"
        )));
    }
    let n = nx * ny;
    let mu = match weights {
        GridWeights::Constant(w) => vec![w; n],
        GridWeights::Supplied(w) => {
            if w.len() != n {
                return Err(crate::Error::DimensionMismatch {
                    expected: n,
                    got: w.len(),
                });
            }
            w
        }
    };
    let mut edges = Vec::with_capacity(2 * n);
    for y in 0..ny {
        for x in 0..nx {
            let id = y * nx + x;
            if x + 1 < nx {
                edges.push((id, id + 1));
            }
            if y + 1 < ny {
                edges.push((id, id + nx));
            }
        }
    }
    WeightedGraph::new(mu, &edges)
}
