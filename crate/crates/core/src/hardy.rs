//! The Hardy-type averaging operator over shadows and checks of its
//! continuity bounds.
//!
//! `Tf(t) = (1/μ(S_t)) Σ_{s ⪰ t} |f(s)| μ(s)`. It is bounded on ℓ^∞ with
//! constant 1, weak (1,1) with constant 1, and on ℓ^q (1 < q < ∞) with
//! constant `(2^q q/(q−1))^{1/q} = 2 (q/(q−1))^{1/q}`.

use crate::error::{invalid, Error, Result};
use crate::graph::{lp_norm, VertexFunction, WeightedGraph};
use crate::tree::{RootedTree, ShadowSummary};

/// Which continuity bound a report checks.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum BoundKind {
    StrongInfinity,
    Weak11,
    StrongQq,
}

impl BoundKind {
    pub fn name(&self) -> &'static str {
        match self {
            BoundKind::StrongInfinity => "strong-infinity",
            BoundKind::Weak11 => "weak-1-1",
            BoundKind::StrongQq => "strong-qq",
        }
    }
}

/// Outcome of one bound check on one function.
#[derive(Debug, Clone, PartialEq)]
pub struct HardyBoundReport {
    pub bound_kind: BoundKind,
    /// `q` for the strong (q,q) bound, `λ` for weak (1,1), `None` otherwise.
    pub parameter: Option<f64>,
    pub measured: f64,
    pub theoretical: f64,
    pub margin: f64,
    pub passed: bool,
    pub trial_seed: Option<u64>,
}

impl HardyBoundReport {
    fn new(
        bound_kind: BoundKind,
        parameter: Option<f64>,
        measured: f64,
        theoretical: f64,
        passed: bool,
    ) -> Self {
        Self {
            bound_kind,
            parameter,
            measured,
            theoretical,
            margin: theoretical - measured,
            passed,
            trial_seed: None,
        }
    }

    pub fn with_seed(mut self, seed: u64) -> Self {
        self.trial_seed = Some(seed);
        self
    }
}

fn check_inputs(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
) -> Result<()> {
    g.check_function(f)?;
    if tree.len() != g.len() || summary.shadow_measure.len() != g.len() {
        return Err(Error::DimensionMismatch {
            expected: g.len(),
            got: tree.len().min(summary.shadow_measure.len()),
        });
    }
    Ok(())
}

/// Applies T with one reverse-topological accumulation of |f|μ.
pub fn apply_hardy(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
) -> Result<VertexFunction> {
    check_inputs(f, g, tree, summary)?;
    let mut mass: Vec<f64> = f
        .iter()
        .zip(g.weights())
        .map(|(v, w)| v.abs() * w)
        .collect();
    tree.subtree_sums(&mut mass);
    for (m, s) in mass.iter_mut().zip(&summary.shadow_measure) {
        *m /= s;
    }
    Ok(VertexFunction::from_finite(mass))
}

/// μ({t : |f(t)| > λ}).
pub fn distribution_measure(f: &VertexFunction, lambda: f64, g: &WeightedGraph) -> Result<f64> {
    if !(lambda > 0.0) {
        return Err(invalid(format!("level must be positive, got {lambda}")));
    }
    g.check_function(f)?;
    Ok(f.iter()
        .zip(g.weights())
        .filter(|(v, _)| v.abs() > lambda)
        .map(|(_, w)| w)
        .sum())
}

/// `‖Tf‖_∞ <= ‖f‖_∞`, allowing `1e−12 ‖f‖_∞` of rounding.
pub fn verify_strong_infinity(
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
    f: &VertexFunction,
) -> Result<HardyBoundReport> {
    let tf = apply_hardy(f, g, tree, summary)?;
    let measured = tf.sup_abs();
    let theoretical = f.sup_abs();
    let passed = measured <= theoretical + 1e-12 * theoretical;
    Ok(HardyBoundReport::new(
        BoundKind::StrongInfinity,
        None,
        measured,
        theoretical,
        passed,
    ))
}

/// `μ(V_{Tf}(λ)) < ‖f‖_1 / λ` for each level, strictly.
///
/// The zero function is rejected: both sides vanish and the strict
/// inequality cannot hold.
pub fn verify_weak_11(
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
    f: &VertexFunction,
    levels: &[f64],
) -> Result<Vec<HardyBoundReport>> {
    if f.is_zero() {
        return Err(Error::ZeroFunction);
    }
    let tf = apply_hardy(f, g, tree, summary)?;
    let l1 = lp_norm(f, 1.0, g, None)?;
    levels
        .iter()
        .map(|&lambda| {
            let measured = distribution_measure(&tf, lambda, g)?;
            let theoretical = l1 / lambda;
            Ok(HardyBoundReport::new(
                BoundKind::Weak11,
                Some(lambda),
                measured,
                theoretical,
                measured < theoretical,
            ))
        })
        .collect()
}

/// `2 (q/(q−1))^{1/q}`, the ℓ^q operator-norm bound for T.
pub fn strong_qq_constant(q: f64) -> Result<f64> {
    if !(q > 1.0 && q.is_finite()) {
        return Err(invalid(format!("q must lie in (1, inf), got {q}")));
    }
    Ok(2.0 * (q / (q - 1.0)).powf(1.0 / q))
}

/// `‖Tf‖_q <= 2 (q/(q−1))^{1/q} ‖f‖_q`.
pub fn verify_strong_qq(
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
    f: &VertexFunction,
    q: f64,
) -> Result<HardyBoundReport> {
    let constant = strong_qq_constant(q)?;
    let tf = apply_hardy(f, g, tree, summary)?;
    let measured = lp_norm(&tf, q, g, None)?;
    let theoretical = constant * lp_norm(f, q, g, None)?;
    Ok(HardyBoundReport::new(
        BoundKind::StrongQq,
        Some(q),
        measured,
        theoretical,
        measured <= theoretical,
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_connected, WeightLaw};
    use crate::tree::{build_spanning_tree, random_spanning_tree, shadow_summary, Strategy};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn setup(
        weights: Vec<f64>,
        edges: &[(usize, usize)],
    ) -> (WeightedGraph, RootedTree, ShadowSummary) {
        let g = WeightedGraph::new(weights, edges).unwrap();
        let t = build_spanning_tree(&g, 0, Strategy::BreadthFirst).unwrap();
        let s = shadow_summary(&g, &t).unwrap();
        (g, t, s)
    }

    fn vf(v: &[f64]) -> VertexFunction {
        VertexFunction::new(v.to_vec()).unwrap()
    }

    /// Quadratic-time T using explicit descendant queries.
    fn hardy_brute_force(f: &VertexFunction, g: &WeightedGraph, tree: &RootedTree) -> Vec<f64> {
        (0..g.len())
            .map(|t| {
                let (mut num, mut den) = (0.0, 0.0);
                for s in 0..g.len() {
                    if tree.is_descendant(s, t).unwrap() {
                        num += f[s].abs() * g.weight(s);
                        den += g.weight(s);
                    }
                }
                num / den
            })
            .collect()
    }

    fn random_case(seed: u64) -> (WeightedGraph, RootedTree, ShadowSummary, VertexFunction) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=50);
        let g = random_connected(
            n,
            0.1,
            WeightLaw::Uniform {
                low: 0.1,
                high: 5.0,
            },
            seed,
        )
        .unwrap();
        let t = random_spanning_tree(&g, &mut rng).unwrap();
        let s = shadow_summary(&g, &t).unwrap();
        let f = VertexFunction::new((0..n).map(|_| rng.random_range(-3.0..3.0)).collect()).unwrap();
        (g, t, s, f)
    }

    #[test]
    fn constants_are_fixed() {
        let (g, t, s) = setup(vec![1.0, 2.0, 0.5], &[(0, 1), (1, 2)]);
        let tf = apply_hardy(&VertexFunction::constant(3, -2.5), &g, &t, &s).unwrap();
        for v in tf.iter() {
            assert_relative_eq!(*v, 2.5, max_relative = 1e-15);
        }
    }

    #[test]
    fn single_edge_example() {
        let (g, t, s) = setup(vec![1.0, 1.0], &[(0, 1)]);
        assert_eq!(
            apply_hardy(&vf(&[2.0, 4.0]), &g, &t, &s).unwrap(),
            vf(&[3.0, 4.0])
        );
    }

    #[test]
    fn leaf_spike() {
        // path 0-1-2-3 rooted at 0 plus a side leaf 4 on vertex 1
        let (g, t, s) = setup(vec![1.0; 5], &[(0, 1), (1, 2), (2, 3), (1, 4)]);
        let tf = apply_hardy(&vf(&[0.0, 0.0, 0.0, 1.0, 0.0]), &g, &t, &s).unwrap();
        assert_eq!(tf, vf(&[1.0 / 5.0, 1.0 / 4.0, 1.0 / 2.0, 1.0, 0.0]));
    }

    #[test]
    fn distribution_examples() {
        let g = WeightedGraph::new(vec![1.0, 1.0], &[(0, 1)]).unwrap();
        let f = vf(&[0.5, 1.0]);
        assert_eq!(distribution_measure(&f, 0.6, &g).unwrap(), 1.0);
        assert_eq!(distribution_measure(&f, 1.0, &g).unwrap(), 0.0);
        assert_eq!(distribution_measure(&f, 1e-9, &g).unwrap(), 2.0);
        assert!(distribution_measure(&f, 0.0, &g).is_err());
    }

    #[test]
    fn strong_infinity_examples() {
        let (g, t, s) = setup(vec![1.0, 3.0, 2.0], &[(0, 1), (0, 2)]);
        let r = verify_strong_infinity(&g, &t, &s, &VertexFunction::constant(3, 1.0)).unwrap();
        assert_relative_eq!(r.measured, 1.0, max_relative = 1e-15);
        assert_eq!(r.theoretical, 1.0);
        assert!(r.passed);
        let r = verify_strong_infinity(&g, &t, &s, &VertexFunction::zeros(3)).unwrap();
        assert_eq!((r.measured, r.theoretical, r.passed), (0.0, 0.0, true));
    }

    #[test]
    fn weak_examples() {
        let (g, t, s) = setup(vec![1.0, 1.0], &[(0, 1)]);
        let f = vf(&[0.0, 1.0]);
        let reports = verify_weak_11(&g, &t, &s, &f, &[0.6, 2.0]).unwrap();
        assert_eq!(reports[0].measured, 1.0);
        assert_relative_eq!(reports[0].theoretical, 1.0 / 0.6, max_relative = 1e-15);
        assert!(reports.iter().all(|r| r.passed));
        assert_eq!(reports[1].measured, 0.0);
        assert!(matches!(
            verify_weak_11(&g, &t, &s, &VertexFunction::zeros(2), &[1.0]),
            Err(Error::ZeroFunction)
        ));
        assert!(verify_weak_11(&g, &t, &s, &f, &[-1.0]).is_err());
    }

    #[test]
    fn strong_qq_constant_at_two() {
        assert_relative_eq!(
            strong_qq_constant(2.0).unwrap(),
            2.0 * 2f64.sqrt(),
            max_relative = 1e-15
        );
        assert!((strong_qq_constant(2.0).unwrap() - 2.8284).abs() < 5e-5);
        assert!(strong_qq_constant(1.0).is_err());
        assert!(strong_qq_constant(f64::INFINITY).is_err());
    }

    #[test]
    fn strong_qq_on_constant() {
        let (g, t, s) = setup(vec![1.0, 2.0, 4.0], &[(0, 1), (1, 2)]);
        let r = verify_strong_qq(&g, &t, &s, &VertexFunction::constant(3, 1.0), 3.0).unwrap();
        assert_relative_eq!(r.measured, 7f64.powf(1.0 / 3.0), max_relative = 1e-14);
        assert!(r.passed);
    }

    #[test]
    fn matches_brute_force() {
        for seed in 0..50 {
            let (g, t, s, f) = random_case(seed);
            let fast = apply_hardy(&f, &g, &t, &s).unwrap();
            for (a, b) in fast.iter().zip(hardy_brute_force(&f, &g, &t)) {
                assert!((a - b).abs() <= 1e-12 * b.abs().max(1e-300));
            }
        }
    }

    #[test]
    fn structural_properties() {
        for seed in 100..150 {
            let (g, t, s, f) = random_case(seed);
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let h =
                VertexFunction::new((0..g.len()).map(|_| rng.random_range(-3.0..3.0)).collect())
                    .unwrap();
            let tf = apply_hardy(&f, &g, &t, &s).unwrap();
            let th = apply_hardy(&h, &g, &t, &s).unwrap();
            // depends only on |f|
            assert_eq!(apply_hardy(&f.abs(), &g, &t, &s).unwrap(), tf);
            // sublinear
            let tsum = apply_hardy(&f.combine(1.0, &h, 1.0), &g, &t, &s).unwrap();
            for v in 0..g.len() {
                assert!(tsum[v] <= (tf[v] + th[v]) * (1.0 + 1e-12));
                assert!(tf[v] >= 0.0);
            }
            // monotone on nonnegative functions
            let bigger = f.abs().combine(1.0, &h.abs(), 1.0);
            let tb = apply_hardy(&bigger, &g, &t, &s).unwrap();
            for v in 0..g.len() {
                assert!(tf[v] <= tb[v] * (1.0 + 1e-12));
            }
            // root value is the global average of |f|
            let l1 = lp_norm(&f, 1.0, &g, None).unwrap();
            assert!(
                (tf[t.root()] - l1 / g.total_measure()).abs() <= 1e-12 * tf[t.root()].max(1e-300)
            );
        }
    }
}
