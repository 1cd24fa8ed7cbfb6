//! Empirical lower bounds on the best Poincaré constant.
//!
//! `R(f) = ‖f‖_p / ‖|∇f|‖_p` is maximized over zero-mean `f` by projected
//! subgradient ascent on the unit ℓᵖ sphere, with a derivative-free polish
//! at the end because the maximizer usually sits on a kink of `|∇f|`.
//! Any value returned is attained by the returned witness, so it never
//! exceeds the true optimum.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::error::{invalid, Result};
use crate::graph::{lp_norm_slice, EdgeSet, VertexFunction, WeightedGraph};

#[derive(Debug, Clone, Copy)]
pub struct AscentConfig {
    pub restarts: usize,
    pub iters: usize,
    pub seed: u64,
}

impl Default for AscentConfig {
    fn default() -> Self {
        Self {
            restarts: 8,
            iters: 2000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone)]
pub struct SharpEstimate {
    /// Best ratio found.
    pub ratio: f64,
    /// Zero-mean function attaining `ratio`, normalized to ‖f‖_p = 1.
    pub witness: VertexFunction,
    /// Best ratio after each restart (nondecreasing).
    pub best_by_restart: Vec<f64>,
}

/// Undirected edges the gradient runs over, as `(a, b)` pairs.
fn gradient_edges(g: &WeightedGraph, edges: EdgeSet<'_>) -> Result<Vec<(usize, usize)>> {
    match edges {
        EdgeSet::Full => Ok(g.edges().collect()),
        EdgeSet::Tree(tree) => {
            tree.check_spans(g)?;
            Ok(tree.edges().collect())
        }
    }
}

struct Objective<'a> {
    weights: &'a [f64],
    edges: Vec<(usize, usize)>,
    p: f64,
    total: f64,
}

impl Objective<'_> {
    fn gradient_length(&self, f: &[f64]) -> Vec<f64> {
        let mut out = vec![0.0; f.len()];
        for &(a, b) in &self.edges {
            let d = (f[a] - f[b]).abs();
            out[a] += d;
            out[b] += d;
        }
        out
    }

    fn ratio(&self, f: &[f64]) -> f64 {
        let num = lp_norm_slice(f, self.p, self.weights);
        if num == 0.0 {
            return 0.0;
        }
        num / lp_norm_slice(&self.gradient_length(f), self.p, self.weights)
    }

    /// Derivative of the ℓᵖ norm with respect to each entry of `v`;
    /// `sign(0) = 0`.
    fn norm_gradient(&self, v: &[f64], norm: f64) -> Vec<f64> {
        v.iter()
            .zip(self.weights)
            .map(|(&x, &w)| {
                if x == 0.0 {
                    0.0
                } else if self.p == 1.0 {
                    w * x.signum()
                } else {
                    w * (x.abs() / norm).powf(self.p - 1.0) * x.signum()
                }
            })
            .collect()
    }

    /// A subgradient of R at `f`, taken in the μ-weighted inner product.
    fn ascent_direction(&self, f: &[f64]) -> Option<Vec<f64>> {
        let num = lp_norm_slice(f, self.p, self.weights);
        let grad_len = self.gradient_length(f);
        let den = lp_norm_slice(&grad_len, self.p, self.weights);
        if num == 0.0 || den == 0.0 {
            return None;
        }
        let ratio = num / den;
        let d_num = self.norm_gradient(f, num);
        let d_len = self.norm_gradient(&grad_len, den);
        let mut d_den = vec![0.0; f.len()];
        for &(a, b) in &self.edges {
            let s = (f[a] - f[b]).signum() * if f[a] == f[b] { 0.0 } else { 1.0 };
            let w = (d_len[a] + d_len[b]) * s;
            d_den[a] += w;
            d_den[b] -= w;
        }
        let mut dir: Vec<f64> = d_num
            .iter()
            .zip(&d_den)
            .zip(self.weights)
            .map(|((x, y), w)| (x - ratio * y) / den / w)
            .collect();
        self.center(&mut dir);
        let scale = lp_norm_slice(&dir, self.p, self.weights);
        if scale == 0.0 || !scale.is_finite() {
            return None;
        }
        dir.iter_mut().for_each(|x| *x /= scale);
        Some(dir)
    }

    fn center(&self, f: &mut [f64]) {
        let mean = f.iter().zip(self.weights).map(|(x, w)| x * w).sum::<f64>() / self.total;
        f.iter_mut().for_each(|x| *x -= mean);
    }

    /// Zero-mean projection followed by normalization; false if `f` vanishes.
    fn to_sphere(&self, f: &mut [f64]) -> bool {
        self.center(f);
        let norm = lp_norm_slice(f, self.p, self.weights);
        if norm == 0.0 || !norm.is_finite() {
            return false;
        }
        f.iter_mut().for_each(|x| *x /= norm);
        true
    }
}

fn restart_seed(seed: u64, restart: usize) -> u64 {
    seed ^ (restart as u64)
        .wrapping_add(1)
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Maximizes `R(f)` over zero-mean `f` with random restarts.
///
/// Each restart draws a Gaussian start, then takes steps of length
/// `1/√k` along a projected subgradient, keeping the best point seen, and
/// finally polishes that point with a shrinking random pattern search.
/// Restart `i` uses a seed derived from `(seed, i)`, so adding restarts
/// never lowers the result.
pub fn estimate_sharp_constant(
    g: &WeightedGraph,
    edges: EdgeSet<'_>,
    p: f64,
    config: &AscentConfig,
) -> Result<SharpEstimate> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    if g.len() < 2 {
        return Err(invalid("sharp-constant search needs at least two vertices"));
    }
    if config.restarts == 0 || config.iters == 0 {
        return Err(invalid("restarts and iters must be positive"));
    }
    let objective = Objective {
        weights: g.weights(),
        edges: gradient_edges(g, edges)?,
        p,
        total: g.total_measure(),
    };
    let n = g.len();
    let mut best_ratio = f64::NEG_INFINITY;
    let mut best_f = vec![0.0; n];
    let mut best_by_restart = Vec::with_capacity(config.restarts);

    for restart in 0..config.restarts {
        let mut rng = ChaCha8Rng::seed_from_u64(restart_seed(config.seed, restart));
        let mut f: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        while !objective.to_sphere(&mut f) {
            f = (0..n).map(|_| rng.sample(StandardNormal)).collect();
        }
        let mut local_best = (objective.ratio(&f), f.clone());
        for k in 1..=config.iters {
            let Some(dir) = objective.ascent_direction(&f) else {
                break;
            };
            let step = 1.0 / (k as f64).sqrt();
            let mut next: Vec<f64> = f.iter().zip(&dir).map(|(x, d)| x + step * d).collect();
            if !objective.to_sphere(&mut next) {
                break;
            }
            f = next;
            let r = objective.ratio(&f);
            if r > local_best.0 {
                local_best = (r, f.clone());
            }
        }
        let (r, f) = polish(&objective, local_best.1, config.iters, &mut rng);
        if r > best_ratio {
            best_ratio = r;
            best_f = f;
        }
        best_by_restart.push(best_ratio);
    }
    Ok(SharpEstimate {
        ratio: best_ratio,
        witness: VertexFunction::new(best_f)?,
        best_by_restart,
    })
}

/// Accept-if-better random pattern search with a shrinking radius.
fn polish(
    objective: &Objective<'_>,
    mut f: Vec<f64>,
    budget: usize,
    rng: &mut ChaCha8Rng,
) -> (f64, Vec<f64>) {
    let n = f.len();
    let mut best = objective.ratio(&f);
    let mut radius = 0.1;
    let mut failures = 0;
    for _ in 0..budget.max(200) {
        if radius < 1e-12 {
            break;
        }
        let mut trial: Vec<f64> = if rng.random_bool(0.5) {
            let i = rng.random_range(0..n);
            let mut t = f.clone();
            t[i] += if rng.random_bool(0.5) {
                radius
            } else {
                -radius
            };
            t
        } else {
            f.iter()
                .map(|x| x + radius * rng.sample::<f64, _>(StandardNormal))
                .collect()
        };
        if !objective.to_sphere(&mut trial) {
            continue;
        }
        let r = objective.ratio(&trial);
        if r > best {
            best = r;
            f = trial;
            failures = 0;
        } else {
            failures += 1;
            if failures >= 4 * n {
                radius *= 0.5;
                failures = 0;
            }
        }
    }
    (best, f)
}

/// Orthonormal basis (Euclidean) of `{x : Σ x_s μ_s = 0}`.
fn zero_mean_basis(weights: &[f64]) -> Vec<Vec<f64>> {
    let n = weights.len();
    let norm = weights.iter().map(|w| w * w).sum::<f64>().sqrt();
    let mut basis: Vec<Vec<f64>> = vec![weights.iter().map(|w| w / norm).collect()];
    for i in 0..n {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        for b in &basis {
            let dot: f64 = v.iter().zip(b).map(|(x, y)| x * y).sum();
            v.iter_mut().zip(b).for_each(|(x, y)| *x -= dot * y);
        }
        let len = v.iter().map(|x| x * x).sum::<f64>().sqrt();
        if len > 1e-10 {
            v.iter_mut().for_each(|x| *x /= len);
            basis.push(v);
        }
        if basis.len() == n {
            break;
        }
    }
    basis.remove(0);
    basis
}

/// Grid search over directions of the zero-mean subspace, for `n <= 4`.
///
/// Directions are parametrized by angles on a half circle (`n = 3`) or a
/// hemisphere (`n = 4`) with spacing `π / resolution`; antipodal points give
/// the same ratio. Grids are nested under doubling, so the result is
/// nondecreasing when `resolution` is multiplied by an integer.
pub fn brute_force_sharp_constant(
    g: &WeightedGraph,
    edges: EdgeSet<'_>,
    p: f64,
    resolution: usize,
) -> Result<f64> {
    if !(p >= 1.0 && p.is_finite()) {
        return Err(invalid(format!("p must lie in [1, inf), got {p}")));
    }
    let n = g.len();
    if !(2..=4).contains(&n) {
        return Err(invalid(format!(
            "brute force supports 2 to 4 vertices, got {n}"
        )));
    }
    if resolution == 0 {
        return Err(invalid("resolution must be positive"));
    }
    let objective = Objective {
        weights: g.weights(),
        edges: gradient_edges(g, edges)?,
        p,
        total: g.total_measure(),
    };
    let basis = zero_mean_basis(g.weights());
    let combine = |coeffs: &[f64]| -> Vec<f64> {
        (0..n)
            .map(|s| coeffs.iter().zip(&basis).map(|(c, b)| c * b[s]).sum())
            .collect()
    };
    let step = std::f64::consts::PI / resolution as f64;
    let best = match n {
        2 => objective.ratio(&basis[0]),
        3 => (0..resolution)
            .map(|k| {
                let theta = k as f64 * step;
                objective.ratio(&combine(&[theta.cos(), theta.sin()]))
            })
            .fold(0.0, f64::max),
        _ => {
            let mut best = 0.0_f64;
            for i in 0..=resolution {
                let theta = i as f64 * step;
                for j in 0..resolution {
                    let phi = j as f64 * step;
                    let dir = [
                        theta.sin() * phi.cos(),
                        theta.sin() * phi.sin(),
                        theta.cos(),
                    ];
                    best = best.max(objective.ratio(&combine(&dir)));
                }
            }
            best
        }
    };
    Ok(best)
}

/// Smallest nonzero eigenvalue of `L x = λ M x`, where `L` is the
/// combinatorial Laplacian and `M = diag(μ)`, by power iteration.
///
/// `1/√λ` bounds the ℓ² ratio for the squared-difference form
/// `Σ_{edges} (f(a) − f(b))²`, which is a different quadratic form from
/// `‖|∇f|‖_2²`; the two are only loosely related.
pub fn dirichlet_spectral_gap(g: &WeightedGraph, iters: usize, seed: u64) -> Result<f64> {
    let n = g.len();
    if n < 2 {
        return Err(invalid("spectral gap needs at least two vertices"));
    }
    let sqrt_mu: Vec<f64> = g.weights().iter().map(|w| w.sqrt()).collect();
    let apply_a = |y: &[f64]| -> Vec<f64> {
        // A = M^{-1/2} L M^{-1/2}
        let x: Vec<f64> = y.iter().zip(&sqrt_mu).map(|(v, s)| v / s).collect();
        (0..n)
            .map(|t| {
                let lx: f64 = g.neighbors(t).iter().map(|&s| x[t] - x[s]).sum();
                lx / sqrt_mu[t]
            })
            .collect()
    };
    let shift = (0..n)
        .map(|t| {
            let off: f64 = g
                .neighbors(t)
                .iter()
                .map(|&s| 1.0 / (sqrt_mu[t] * sqrt_mu[s]))
                .sum();
            g.degree(t) as f64 / g.weight(t) + off
        })
        .fold(0.0, f64::max);
    let null_norm = g.total_measure().sqrt();
    let deflate = |y: &mut [f64]| {
        let dot: f64 = y.iter().zip(&sqrt_mu).map(|(a, b)| a * b).sum::<f64>() / null_norm;
        y.iter_mut()
            .zip(&sqrt_mu)
            .for_each(|(a, b)| *a -= dot * b / null_norm);
        let len = y.iter().map(|v| v * v).sum::<f64>().sqrt();
        y.iter_mut().for_each(|v| *v /= len);
    };
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut y: Vec<f64> = (0..n).map(|_| rng.sample(StandardNormal)).collect();
    deflate(&mut y);
    let mut top = 0.0;
    for _ in 0..iters.max(1) {
        let ay = apply_a(&y);
        let mut next: Vec<f64> = y.iter().zip(&ay).map(|(v, a)| shift * v - a).collect();
        top = next.iter().zip(&y).map(|(a, b)| a * b).sum();
        deflate(&mut next);
        y = next;
    }
    Ok(shift - top)
}
