//! Decomposition of a function into zero-sum pieces on tree edges.
//!
//! For each non-root `t` the piece `f_t` lives on the segment `{t, t_p}`:
//! `f_t(t) = (1/μ(t)) Σ_{k⪰t} f(k)μ(k)` and
//! `f_t(t_p) = −(1/μ(t_p)) Σ_{k⪰t} f(k)μ(k)`.
//! Every piece sums to zero against μ, and the pieces add back up to `f`
//! whenever `f` itself sums to zero.

use crate::error::Result;
use crate::graph::{VertexFunction, WeightedGraph};
use crate::hardy::strong_qq_constant;
use crate::tree::{RootedTree, ShadowSummary};

/// One piece `f_t`, supported on `{vertex, parent}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct EdgePiece {
    pub vertex: usize,
    pub parent: usize,
    pub at_vertex: f64,
    pub at_parent: f64,
}

/// Sparse family `{f_t}` over the non-root vertices, ordered by vertex id.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeDecomposition {
    vertex_count: usize,
    pieces: Vec<EdgePiece>,
}

impl EdgeDecomposition {
    pub fn pieces(&self) -> &[EdgePiece] {
        &self.pieces
    }

    pub fn vertex_count(&self) -> usize {
        self.vertex_count
    }

    /// The piece indexed by non-root vertex `t`.
    pub fn piece(&self, t: usize) -> Option<&EdgePiece> {
        self.pieces
            .binary_search_by_key(&t, |p| p.vertex)
            .ok()
            .map(|i| &self.pieces[i])
    }

    /// `f_t` expanded to a dense vertex function.
    pub fn dense_piece(&self, t: usize) -> Option<VertexFunction> {
        self.piece(t).map(|p| {
            let mut values = vec![0.0; self.vertex_count];
            values[p.vertex] = p.at_vertex;
            values[p.parent] = p.at_parent;
            VertexFunction::from_finite(values)
        })
    }
}

/// Computes `{f_t}` from one signed subtree-sum pass.
pub fn decompose(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
) -> Result<EdgeDecomposition> {
    g.check_function(f)?;
    tree.check_spans(g)?;
    // signed: no absolute values here, unlike the Hardy accumulator
    let mut mass: Vec<f64> = f.iter().zip(g.weights()).map(|(v, w)| v * w).collect();
    tree.subtree_sums(&mut mass);
    let pieces = tree
        .edges()
        .map(|(t, p)| EdgePiece {
            vertex: t,
            parent: p,
            at_vertex: mass[t] / g.weight(t),
            at_parent: -mass[t] / g.weight(p),
        })
        .collect();
    Ok(EdgeDecomposition {
        vertex_count: g.len(),
        pieces,
    })
}

/// `s ↦ Σ_t f_t(s)`.
///
/// Equals the source function when it sums to zero. Otherwise the result
/// differs only at the root, by `−(Σ_V f μ)/μ(root)`.
pub fn reconstruct(d: &EdgeDecomposition) -> VertexFunction {
    let mut out = vec![0.0; d.vertex_count];
    for p in &d.pieces {
        out[p.vertex] += p.at_vertex;
        out[p.parent] += p.at_parent;
    }
    VertexFunction::from_finite(out)
}

/// `Σ_t ‖f_t‖_q^q = Σ_t (|f_t(t)|^q μ(t) + |f_t(t_p)|^q μ(t_p))`.
pub fn q_energy(d: &EdgeDecomposition, g: &WeightedGraph, q: f64) -> Result<f64> {
    strong_qq_constant(q)?;
    Ok(d.pieces
        .iter()
        .map(|p| {
            p.at_vertex.abs().powf(q) * g.weight(p.vertex)
                + p.at_parent.abs().powf(q) * g.weight(p.parent)
        })
        .sum())
}

/// Outcome of the energy bound check.
#[derive(Debug, Clone, PartialEq)]
pub struct EnergyReport {
    pub q: f64,
    pub measured: f64,
    pub theoretical: f64,
    pub margin: f64,
    pub passed: bool,
}

/// `Σ_t ‖f_t‖_q^q <= c^q M (2^q q/(q−1)) ‖f‖_q^q`.
pub fn verify_energy_bound(
    f: &VertexFunction,
    g: &WeightedGraph,
    tree: &RootedTree,
    summary: &ShadowSummary,
    q: f64,
) -> Result<EnergyReport> {
    let hardy_q = strong_qq_constant(q)?.powf(q);
    let d = decompose(f, g, tree)?;
    let measured = q_energy(&d, g, q)?;
    let norm_q: f64 = f
        .iter()
        .zip(g.weights())
        .map(|(v, w)| v.abs().powf(q) * w)
        .sum();
    let theoretical =
        summary.john_constant.powf(q) * summary.tree_degree_bound as f64 * hardy_q * norm_q;
    Ok(EnergyReport {
        q,
        measured,
        theoretical,
        margin: theoretical - measured,
        passed: measured <= theoretical,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::{random_connected, WeightLaw};
    use crate::graph::{project_zero_mean, weighted_sum};
    use crate::hardy::apply_hardy;
    use crate::tree::{build_spanning_tree, random_spanning_tree, shadow_summary, Strategy};
    use approx::assert_relative_eq;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn vf(v: &[f64]) -> VertexFunction {
        VertexFunction::new(v.to_vec()).unwrap()
    }

    fn bfs(weights: Vec<f64>, edges: &[(usize, usize)]) -> (WeightedGraph, RootedTree) {
        let g = WeightedGraph::new(weights, edges).unwrap();
        let t = build_spanning_tree(&g, 0, Strategy::BreadthFirst).unwrap();
        (g, t)
    }

    /// Evaluates each piece straight from its defining sums, enumerating
    /// strict descendants with `is_descendant`.
    fn decompose_brute_force(
        f: &VertexFunction,
        g: &WeightedGraph,
        tree: &RootedTree,
    ) -> Vec<(f64, f64)> {
        (0..g.len())
            .filter_map(|t| tree.parent(t).map(|p| (t, p)))
            .map(|(t, p)| {
                let strict: f64 = (0..g.len())
                    .filter(|&k| k != t && tree.is_descendant(k, t).unwrap())
                    .map(|k| f[k] * g.weight(k))
                    .sum();
                let at_t = f[t] + strict / g.weight(t);
                let at_p = -(strict + f[t] * g.weight(t)) / g.weight(p);
                (at_t, at_p)
            })
            .collect()
    }

    fn random_case(
        seed: u64,
        max_n: usize,
    ) -> (WeightedGraph, RootedTree, VertexFunction, ChaCha8Rng) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let n = rng.random_range(1..=max_n);
        let g = random_connected(
            n,
            0.08,
            WeightLaw::Uniform {
                low: 0.1,
                high: 4.0,
            },
            seed,
        )
        .unwrap();
        let t = random_spanning_tree(&g, &mut rng).unwrap();
        let f = VertexFunction::new((0..n).map(|_| rng.random_range(-5.0..5.0)).collect()).unwrap();
        (g, t, f, rng)
    }

    #[test]
    fn single_edge_is_its_own_piece() {
        let (g, t) = bfs(vec![1.0, 1.0], &[(0, 1)]);
        let f = vf(&[1.0, -1.0]);
        let d = decompose(&f, &g, &t).unwrap();
        assert_eq!(
            d.pieces(),
            &[EdgePiece {
                vertex: 1,
                parent: 0,
                at_vertex: -1.0,
                at_parent: 1.0
            }]
        );
        assert_eq!(d.dense_piece(1).unwrap(), f);
        assert!(d.piece(0).is_none());
    }

    #[test]
    fn path_example() {
        let (g, t) = bfs(vec![1.0; 3], &[(0, 1), (1, 2)]);
        let f = vf(&[1.0, 0.0, -1.0]);
        let d = decompose(&f, &g, &t).unwrap();
        assert_eq!(d.dense_piece(1).unwrap(), vf(&[1.0, -1.0, 0.0]));
        assert_eq!(d.dense_piece(2).unwrap(), vf(&[0.0, 1.0, -1.0]));
        assert_eq!(reconstruct(&d), f);
        assert_eq!(q_energy(&d, &g, 2.0).unwrap(), 4.0);
    }

    #[test]
    fn zero_function() {
        let (g, t) = bfs(vec![1.0; 3], &[(0, 1), (1, 2)]);
        let d = decompose(&VertexFunction::zeros(3), &g, &t).unwrap();
        assert!(d
            .pieces()
            .iter()
            .all(|p| p.at_vertex == 0.0 && p.at_parent == 0.0));
        assert_eq!(q_energy(&d, &g, 1.5).unwrap(), 0.0);
    }

    #[test]
    fn single_vertex_has_no_pieces() {
        let (g, t) = bfs(vec![2.0], &[]);
        let d = decompose(&vf(&[0.0]), &g, &t).unwrap();
        assert!(d.pieces().is_empty());
        assert_eq!(reconstruct(&d), vf(&[0.0]));
    }

    #[test]
    fn non_zero_mean_defect_sits_at_root() {
        let (g, t) = bfs(vec![1.0, 1.0], &[(0, 1)]);
        let d = decompose(&vf(&[1.0, 0.0]), &g, &t).unwrap();
        assert_eq!(reconstruct(&d), vf(&[0.0, 0.0]));

        for seed in 0..20 {
            let (g, t, f, _) = random_case(seed, 40);
            let r = reconstruct(&decompose(&f, &g, &t).unwrap());
            let defect = weighted_sum(&f, &g) / g.weight(t.root());
            for s in 0..g.len() {
                let expected = if s == t.root() { f[s] - defect } else { f[s] };
                assert!((r[s] - expected).abs() <= 1e-10 * f.sup_abs() * g.total_measure());
            }
        }
    }

    #[test]
    fn energy_bound_single_edge() {
        let (g, t) = bfs(vec![1.0, 1.0], &[(0, 1)]);
        let s = shadow_summary(&g, &t).unwrap();
        let r = verify_energy_bound(&vf(&[1.0, -1.0]), &g, &t, &s, 2.0).unwrap();
        assert_eq!(r.measured, 2.0);
        assert_relative_eq!(r.theoretical, 64.0, max_relative = 1e-14);
        assert!(r.passed);
        let r = verify_energy_bound(&VertexFunction::zeros(2), &g, &t, &s, 2.0).unwrap();
        assert_eq!((r.measured, r.theoretical, r.passed), (0.0, 0.0, true));
        assert!(verify_energy_bound(&vf(&[1.0, -1.0]), &g, &t, &s, 1.0).is_err());
    }

    #[test]
    fn reconstruction_and_piece_sums() {
        for seed in 0..100 {
            let (g, t, f, _) = random_case(seed, 200);
            let tol = 1e-10 * f.sup_abs() * g.total_measure();
            let f = project_zero_mean(&f, &g).unwrap();
            let d = decompose(&f, &g, &t).unwrap();
            for p in d.pieces() {
                assert!(
                    (p.at_vertex * g.weight(p.vertex) + p.at_parent * g.weight(p.parent)).abs()
                        <= tol
                );
            }
            let r = reconstruct(&d);
            for s in 0..g.len() {
                assert!((r[s] - f[s]).abs() <= tol, "{} {} {tol}", r[s], f[s]);
            }
        }
    }

    #[test]
    fn agrees_with_brute_force() {
        for seed in 200..250 {
            let (g, t, f, _) = random_case(seed, 50);
            let d = decompose(&f, &g, &t).unwrap();
            for (p, (bt, bp)) in d.pieces().iter().zip(decompose_brute_force(&f, &g, &t)) {
                let scale = f.sup_abs() * g.total_measure() / g.min_weight();
                assert!((p.at_vertex - bt).abs() <= 1e-12 * scale);
                assert!((p.at_parent - bp).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn linear_in_f() {
        for seed in 300..330 {
            let (g, t, f, mut rng) = random_case(seed, 60);
            let h =
                VertexFunction::new((0..g.len()).map(|_| rng.random_range(-5.0..5.0)).collect())
                    .unwrap();
            let (a, b) = (rng.random_range(-3.0..3.0), rng.random_range(-3.0..3.0));
            let lhs = decompose(&f.combine(a, &h, b), &g, &t).unwrap();
            let df = decompose(&f, &g, &t).unwrap();
            let dh = decompose(&h, &g, &t).unwrap();
            // rounding scale of a signed subtree sum divided by a vertex weight
            let scale = (a.abs() + b.abs()) * f.sup_abs().max(h.sup_abs()) * g.total_measure()
                / g.min_weight();
            for ((l, x), y) in lhs.pieces().iter().zip(df.pieces()).zip(dh.pieces()) {
                assert!((l.at_vertex - (a * x.at_vertex + b * y.at_vertex)).abs() <= 1e-12 * scale);
                assert!((l.at_parent - (a * x.at_parent + b * y.at_parent)).abs() <= 1e-12 * scale);
            }
        }
    }

    #[test]
    fn pieces_dominated_by_hardy() {
        for seed in 400..450 {
            let (g, t, f, _) = random_case(seed, 80);
            let s = shadow_summary(&g, &t).unwrap();
            let tf = apply_hardy(&f, &g, &t, &s).unwrap();
            let c = s.john_constant;
            for p in decompose(&f, &g, &t).unwrap().pieces() {
                assert!(p.at_vertex.abs() <= c * tf[p.vertex] * (1.0 + 1e-12));
                assert!(p.at_parent.abs() <= c * tf[p.parent] * (1.0 + 1e-12));
            }
        }
    }
}
