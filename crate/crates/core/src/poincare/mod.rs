//! Local and global ℓᵖ Poincaré inequalities with explicit constants.
//!
//! For zero-mean `f` and a rooted spanning tree with John constant `c` and
//! maximum tree degree `M`:
//! `‖f‖_p <= C_P ‖|∇f|‖_p` with `C_P = 2c` for `p = 1` and
//! `C_P = 2 c M p^{1−1/p}` for `p > 1`. The bound already holds with the
//! gradient taken over tree edges only, which is the stronger statement.

mod sharp;

use crate::error::{invalid, Error, Result};
use crate::graph::{
    check_exponent, check_zero_mean, gradient_length, lp_norm, lp_norm_slice, EdgeSet,
    VertexFunction, WeightedGraph,
};
use crate::tree::{RootedTree, ShadowSummary};

pub use sharp::{
    brute_force_sharp_constant, dirichlet_spectral_gap, estimate_sharp_constant, AscentConfig,
    SharpEstimate,
};

/// Relative tolerance for the zero-mean precondition on inputs.
pub const ZERO_MEAN_TOLERANCE: f64 = 1e-10;

/// Relative slack allowed when comparing a ratio to its bound.
pub const RATIO_TOLERANCE: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum GradientMode {
    Full,
    TreeRestricted,
}

impl GradientMode {
    pub fn name(&self) -> &'static str {
        match self {
            GradientMode::Full => "full",
            GradientMode::TreeRestricted => "tree",
        }
    }

    pub fn edge_set<'a>(&self, tree: &'a RootedTree) -> EdgeSet<'a> {
        match self {
            GradientMode::Full => EdgeSet::Full,
            GradientMode::TreeRestricted => EdgeSet::Tree(tree),
        }
    }
}

/// Outcome of a local or global Poincaré check.
#[derive(Debug, Clone, PartialEq)]
pub struct PoincareReport {
    pub p: f64,
    /// `‖f‖_p / ‖|∇f|‖_p`.
    pub ratio: f64,
    pub theoretical_cp: f64,
    /// Absent for the single-segment check, whose constant is 1.
    pub john_constant_c: Option<f64>,
    pub degree_bound_m: Option<usize>,
    pub gradient_mode: GradientMode,
    pub passes: bool,
}

/// Upper bound on the Poincaré constant: `2c` for `p = 1`,
/// `2 c M p^{1−1/p}` for `p > 1`.
pub fn theoretical_constant(c: f64, m: usize, p: f64) -> Result<f64> {
    if !(c >= 1.0 && c.is_finite()) {
        return Err(invalid(format!(
            "John constant must be finite and >= 1, got {c}"
        )));
    }
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    if p == 1.0 {
        return Ok(2.0 * c);
    }
    if m == 0 {
        return Err(invalid("degree bound M must be >= 1"));
    }
    Ok(c * m as f64 * 2.0 * p.powf(1.0 - 1.0 / p))
}

fn finite_exponent(p: f64) -> Result<()> {
    check_exponent(p)?;
    if p.is_infinite() {
        return Err(Error::InvalidExponent(p));
    }
    Ok(())
}

/// Poincaré inequality with constant 1 on the segment `{t, t_p}`.
///
/// `f` must sum to zero against μ on the segment. The gradient is that of
/// `f` restricted to the segment, so `|f(t) − f(t_p)|` at both ends. An
/// identically zero segment reports ratio 0.
pub fn local_edge_check(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
    t: usize,
    p: f64,
) -> Result<PoincareReport> {
    finite_exponent(p)?;
    g.check_function(f)?;
    tree.check_spans(g)?;
    g.check_vertex(t)?;
    let parent = tree
        .parent(t)
        .ok_or_else(|| invalid(format!("vertex {t} is the root and has no segment")))?;
    let (a, b) = (f[t], f[parent]);
    let (wa, wb) = (g.weight(t), g.weight(parent));
    let sum = a * wa + b * wb;
    let tolerance = ZERO_MEAN_TOLERANCE * a.abs().max(b.abs()) * (wa + wb);
    if sum.abs() > tolerance {
        return Err(Error::NotZeroMean { sum, tolerance });
    }
    let weights = [wa, wb];
    let numerator = lp_norm_slice(&[a, b], p, &weights);
    let jump = (a - b).abs();
    let denominator = lp_norm_slice(&[jump, jump], p, &weights);
    let ratio = if numerator == 0.0 {
        0.0
    } else {
        numerator / denominator
    };
    Ok(PoincareReport {
        p,
        ratio,
        theoretical_cp: 1.0,
        john_constant_c: None,
        degree_bound_m: None,
        gradient_mode: GradientMode::TreeRestricted,
        passes: ratio <= 1.0 + RATIO_TOLERANCE,
    })
}

/// `‖f‖_p / ‖|∇f|‖_p` for zero-mean nonzero `f`, compared against
/// [`theoretical_constant`] for the tree's `c` and `M`.
pub fn global_ratio(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
    p: f64,
    mode: GradientMode,
) -> Result<PoincareReport> {
    finite_exponent(p)?;
    g.check_function(f)?;
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    check_zero_mean(f, g, ZERO_MEAN_TOLERANCE)?;
    let grad = gradient_length(f, g, mode.edge_set(tree))?;
    let ratio = lp_norm(f, p, g, None)? / lp_norm(&grad, p, g, None)?;
    let c = summary.john_constant;
    let m = summary.tree_degree_bound;
    let theoretical_cp = theoretical_constant(c, m, p)?;
    Ok(PoincareReport {
        p,
        ratio,
        theoretical_cp,
        john_constant_c: Some(c),
        degree_bound_m: Some(m),
        gradient_mode: mode,
        passes: ratio <= theoretical_cp * (1.0 + RATIO_TOLERANCE),
    })
}
