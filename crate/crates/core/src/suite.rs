//! Randomized verification suites.
//!
//! Each suite runs seeded trials over one or more `(graph, tree)` cases and
//! folds them into one [`VerificationReport`] per check. A report carries the
//! trial with the largest `measured / theoretical`, the number of trials and
//! the number of violations; it passes iff there were no violations.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;
use serde_json::Value;

use crate::decomp::{decompose, reconstruct, verify_energy_bound};
use crate::error::{invalid, Result};
use crate::generators::{random_connected, WeightLaw};
use crate::graph::{project_zero_mean, VertexFunction, WeightedGraph};
use crate::hardy::{apply_hardy, verify_strong_infinity, verify_strong_qq, verify_weak_11};
use crate::io::VerificationReport;
use crate::poincare::{global_ratio, local_edge_check, GradientMode};
use crate::tree::{random_spanning_tree, shadow_summary, RootedTree, ShadowSummary};

/// Relative tolerance for reconstruction and per-piece sums, in units of
/// `‖f‖_∞ μ(V)`.
pub const RECONSTRUCTION_TOLERANCE: f64 = 1e-10;

pub const DEFAULT_HARDY_Q: [f64; 4] = [1.5, 2.0, 3.0, 10.0];
pub const DEFAULT_POINCARE_P: [f64; 3] = [1.0, 2.0, 3.0];
pub const DEFAULT_LOCAL_P: [f64; 5] = [1.0, 1.5, 2.0, 3.0, 10.0];
pub const WEAK_LEVELS: usize = 20;

/// A graph with a rooted spanning tree and its shadow summary.
#[derive(Debug, Clone)]
pub struct Case {
    pub graph: WeightedGraph,
    pub tree: RootedTree,
    pub summary: ShadowSummary,
}

impl Case {
    pub fn new(graph: WeightedGraph, tree: RootedTree) -> Result<Self> {
        let summary = shadow_summary(&graph, &tree)?;
        Ok(Self {
            graph,
            tree,
            summary,
        })
    }
}

/// Seeded random connected graphs with `2 <= n <= max_n`, mixed weight laws
/// and uniformly shuffled spanning trees.
pub fn random_corpus(count: usize, max_n: usize, seed: u64) -> Result<Vec<Case>> {
    if max_n < 2 {
        return Err(invalid("corpus graphs need at least two vertices"));
    }
    (0..count)
        .map(|i| {
            let mut rng = trial_rng(seed, i as u64);
            let n = rng.random_range(2..=max_n);
            let density = rng.random_range(0.0..(4.0 / n as f64).min(1.0));
            let law = if rng.random_bool(0.75) {
                let low = 10f64.powf(rng.random_range(-3.0..0.0));
                WeightLaw::Uniform {
                    low,
                    high: low * 10f64.powf(rng.random_range(0.0..3.0)),
                }
            } else {
                WeightLaw::ExponentialOfDepth {
                    rate: rng.random_range(0.0..1.5),
                }
            };
            let g = random_connected(n, density, law, rng.random())?;
            let tree = random_spanning_tree(&g, &mut rng)?;
            Case::new(g, tree)
        })
        .collect()
}

/// Independent generator for trial `index` under `seed`.
pub fn trial_rng(seed: u64, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(index);
    rng
}

/// Shapes of random test functions.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    /// Independent signed Gaussians.
    Gaussian,
    /// A few large values on random vertices, zero elsewhere.
    Spikes,
    /// Scaled indicator of a random shadow.
    SubtreeIndicator,
}

impl Family {
    pub const ALL: [Family; 3] = [Family::Gaussian, Family::Spikes, Family::SubtreeIndicator];

    /// Nonzero sample for the given case.
    pub fn sample(&self, case: &Case, rng: &mut impl Rng) -> VertexFunction {
        let n = case.graph.len();
        let scale = 10f64.powf(rng.random_range(-3.0..3.0));
        let values = match self {
            Family::Gaussian => (0..n)
                .map(|_| scale * rng.sample::<f64, _>(StandardNormal))
                .collect(),
            Family::Spikes => {
                let mut v = vec![0.0; n];
                for _ in 0..rng.random_range(1..=3.min(n)) {
                    v[rng.random_range(0..n)] = scale * rng.random_range(-1.0..1.0);
                }
                if v.iter().all(|x| *x == 0.0) {
                    v[0] = scale;
                }
                v
            }
            Family::SubtreeIndicator => {
                let t = rng.random_range(0..n);
                (0..n)
                    .map(|s| {
                        if case.tree.is_descendant(s, t).unwrap_or(false) {
                            scale
                        } else {
                            0.0
                        }
                    })
                    .collect()
            }
        };
        VertexFunction::new(values).expect("finite samples")
    }

    /// Nonzero zero-mean sample; the shadow indicator avoids the root so the
    /// projection does not vanish.
    pub fn sample_zero_mean(&self, case: &Case, rng: &mut impl Rng) -> VertexFunction {
        loop {
            let f = match self {
                Family::SubtreeIndicator if case.graph.len() > 1 => {
                    let scale = 10f64.powf(rng.random_range(-3.0..3.0));
                    let mut t = rng.random_range(0..case.graph.len());
                    if t == case.tree.root() {
                        t = case.tree.children(t)[0];
                    }
                    let values = (0..case.graph.len())
                        .map(|s| {
                            if case.tree.is_descendant(s, t).unwrap_or(false) {
                                scale
                            } else {
                                0.0
                            }
                        })
                        .collect();
                    VertexFunction::new(values).expect("finite samples")
                }
                _ => self.sample(case, rng),
            };
            let projected = project_zero_mean(&f, &case.graph).expect("finite samples");
            if projected.sup_abs() > 1e-8 * f.sup_abs() {
                return projected;
            }
        }
    }
}

/// Running worst case and violation count for one check.
struct Tally {
    name: &'static str,
    parameters: BTreeMap<String, Value>,
    trials: u64,
    violations: u64,
    worst: Option<(f64, f64, f64, u64)>,
}

impl Tally {
    fn new(name: &'static str) -> Self {
        Self {
            name,
            parameters: BTreeMap::new(),
            trials: 0,
            violations: 0,
            worst: None,
        }
    }

    fn param(mut self, key: &str, value: impl Into<Value>) -> Self {
        self.parameters.insert(key.to_string(), value.into());
        self
    }

    fn record(&mut self, measured: f64, theoretical: f64, passed: bool, trial: u64) {
        self.trials += 1;
        if !passed {
            self.violations += 1;
        }
        let score = if theoretical > 0.0 {
            measured / theoretical
        } else if measured > 0.0 {
            f64::INFINITY
        } else {
            0.0
        };
        if self.worst.is_none_or(|w| score > w.0) {
            self.worst = Some((score, measured, theoretical, trial));
        }
    }

    fn finish(self, seed: u64) -> VerificationReport {
        let mut parameters = self.parameters;
        let (_, measured, theoretical, worst_trial) = self.worst.unwrap_or((0.0, 0.0, 0.0, 0));
        parameters.insert("trials".into(), self.trials.into());
        parameters.insert("violations".into(), self.violations.into());
        parameters.insert("worst_trial".into(), worst_trial.into());
        VerificationReport {
            check_name: self.name.to_string(),
            parameters,
            measured,
            theoretical,
            passed: self.violations == 0,
            seed,
            runtime_ms: 0,
        }
    }
}

fn check_cases(cases: &[Case]) -> Result<()> {
    if cases.is_empty() {
        return Err(invalid("no cases to verify"));
    }
    Ok(())
}

fn pick(cases: &[Case], trial: u64) -> &Case {
    &cases[trial as usize % cases.len()]
}

fn family(rng: &mut impl Rng) -> Family {
    Family::ALL[rng.random_range(0..Family::ALL.len())]
}

/// Hardy operator bounds: strong (∞,∞), weak (1,1) at log-spaced levels,
/// and strong (q,q) for each `q`.
pub fn hardy_suite(
    cases: &[Case],
    trials: u64,
    seed: u64,
    qs: &[f64],
) -> Result<Vec<VerificationReport>> {
    check_cases(cases)?;
    let mut strong_inf = Tally::new("hardy-strong-infinity");
    let mut weak = Tally::new("hardy-weak-1-1").param("levels", WEAK_LEVELS as u64);
    let mut strong_q: Vec<Tally> = qs
        .iter()
        .map(|&q| Tally::new("hardy-strong-qq").param("q", q))
        .collect();
    for trial in 0..trials {
        let case = pick(cases, trial);
        let (g, tree, s) = (&case.graph, &case.tree, &case.summary);
        let mut rng = trial_rng(seed, trial);
        let f = family(&mut rng).sample(case, &mut rng);

        let r = verify_strong_infinity(g, tree, s, &f)?;
        strong_inf.record(r.measured, r.theoretical, r.passed, trial);

        let top = apply_hardy(&f, g, tree, s)?.sup_abs();
        let levels = log_levels(top * 1e-4, top * 1.5, WEAK_LEVELS);
        for r in verify_weak_11(g, tree, s, &f, &levels)? {
            weak.record(r.measured, r.theoretical, r.passed, trial);
        }
        for (tally, &q) in strong_q.iter_mut().zip(qs) {
            let r = verify_strong_qq(g, tree, s, &f, q)?;
            tally.record(r.measured, r.theoretical, r.passed, trial);
        }
    }
    let mut out = vec![strong_inf.finish(seed), weak.finish(seed)];
    out.extend(strong_q.into_iter().map(|t| t.finish(seed)));
    Ok(out)
}

/// `count` levels spaced geometrically from `low` to `high`.
pub fn log_levels(low: f64, high: f64, count: usize) -> Vec<f64> {
    if count == 1 {
        return vec![low];
    }
    let ratio = (high / low).ln() / (count - 1) as f64;
    (0..count).map(|i| low * (ratio * i as f64).exp()).collect()
}

/// Edge decomposition: reconstruction, per-piece zero sums, and the
/// `q`-energy bound for each `q`.
pub fn decomp_suite(
    cases: &[Case],
    trials: u64,
    seed: u64,
    qs: &[f64],
) -> Result<Vec<VerificationReport>> {
    check_cases(cases)?;
    let tol = RECONSTRUCTION_TOLERANCE;
    let mut recon = Tally::new("decomp-reconstruction").param("tolerance", tol);
    let mut piece_sum = Tally::new("decomp-piece-sum").param("tolerance", tol);
    let mut energy: Vec<Tally> = qs
        .iter()
        .map(|&q| Tally::new("decomp-energy").param("q", q))
        .collect();
    for trial in 0..trials {
        let case = pick(cases, trial);
        let (g, tree, s) = (&case.graph, &case.tree, &case.summary);
        let mut rng = trial_rng(seed, trial);
        let f = family(&mut rng).sample_zero_mean(case, &mut rng);
        let scale = f.sup_abs() * g.total_measure();

        let d = decompose(&f, g, tree)?;
        let r = reconstruct(&d);
        let err = r
            .iter()
            .zip(f.iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
            / scale;
        recon.record(err, tol, err <= tol, trial);
        let worst_sum = d
            .pieces()
            .iter()
            .map(|p| (p.at_vertex * g.weight(p.vertex) + p.at_parent * g.weight(p.parent)).abs())
            .fold(0.0, f64::max)
            / scale;
        piece_sum.record(worst_sum, tol, worst_sum <= tol, trial);
        for (tally, &q) in energy.iter_mut().zip(qs) {
            let r = verify_energy_bound(&f, g, tree, s, q)?;
            tally.record(r.measured, r.theoretical, r.passed, trial);
        }
    }
    let mut out = vec![recon.finish(seed), piece_sum.finish(seed)];
    out.extend(energy.into_iter().map(|t| t.finish(seed)));
    Ok(out)
}

/// One trial of the global Poincaré check, kept for CSV export.
#[derive(Debug, Clone, PartialEq)]
pub struct RatioSample {
    pub trial: u64,
    pub vertices: usize,
    pub p: f64,
    pub mode: GradientMode,
    pub ratio: f64,
    pub theoretical: f64,
}

pub const RATIO_CSV_HEADER: [&str; 6] = ["trial", "vertices", "p", "mode", "ratio", "theoretical"];

impl RatioSample {
    pub fn csv_row(&self) -> Vec<String> {
        vec![
            self.trial.to_string(),
            self.vertices.to_string(),
            self.p.to_string(),
            self.mode.name().to_string(),
            self.ratio.to_string(),
            self.theoretical.to_string(),
        ]
    }
}

/// Global Poincaré ratio against the tree constant, in both gradient modes.
pub fn poincare_suite(
    cases: &[Case],
    trials: u64,
    seed: u64,
    ps: &[f64],
) -> Result<(Vec<VerificationReport>, Vec<RatioSample>)> {
    check_cases(cases)?;
    let modes = [GradientMode::Full, GradientMode::TreeRestricted];
    let mut tallies: Vec<Tally> = ps
        .iter()
        .flat_map(|&p| {
            modes.iter().map(move |m| {
                Tally::new("poincare-global")
                    .param("p", p)
                    .param("mode", m.name())
            })
        })
        .collect();
    let mut samples = Vec::new();
    for trial in 0..trials {
        let case = pick(cases, trial);
        let mut rng = trial_rng(seed, trial);
        let f = family(&mut rng).sample_zero_mean(case, &mut rng);
        let mut k = 0;
        for &p in ps {
            for mode in modes {
                let r = global_ratio(&f, &case.graph, &case.tree, &case.summary, p, mode)?;
                tallies[k].record(r.ratio, r.theoretical_cp, r.passes, trial);
                k += 1;
                samples.push(RatioSample {
                    trial,
                    vertices: case.graph.len(),
                    p,
                    mode,
                    ratio: r.ratio,
                    theoretical: r.theoretical_cp,
                });
            }
        }
    }
    Ok((
        tallies.into_iter().map(|t| t.finish(seed)).collect(),
        samples,
    ))
}

/// Segment Poincaré check with constant 1 on random tree edges.
pub fn local_suite(
    cases: &[Case],
    trials: u64,
    seed: u64,
    ps: &[f64],
) -> Result<Vec<VerificationReport>> {
    check_cases(cases)?;
    let mut tallies: Vec<Tally> = ps
        .iter()
        .map(|&p| Tally::new("poincare-local").param("p", p))
        .collect();
    for trial in 0..trials {
        let case = pick(cases, trial);
        let (g, tree) = (&case.graph, &case.tree);
        let mut rng = trial_rng(seed, trial);
        let mut t = rng.random_range(0..g.len());
        if t == tree.root() {
            t = tree.children(t)[0];
        }
        let parent = tree.parent(t).expect("non-root");
        let a =
            10f64.powf(rng.random_range(-3.0..3.0)) * if rng.random_bool(0.5) { 1.0 } else { -1.0 };
        let b = -a * g.weight(t) / g.weight(parent);
        let mut values = vec![0.0; g.len()];
        values[t] = a;
        values[parent] = b;
        let f = VertexFunction::new(values)?;
        for (tally, &p) in tallies.iter_mut().zip(ps) {
            let r = local_edge_check(&f, g, tree, t, p)?;
            tally.record(r.ratio, r.theoretical_cp, r.passes, trial);
        }
    }
    Ok(tallies.into_iter().map(|t| t.finish(seed)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::generators::kary_tree;

    fn corpus() -> Vec<Case> {
        random_corpus(12, 40, 3).unwrap()
    }

    #[test]
    fn corpus_is_deterministic_and_valid() {
        let a = corpus();
        let b = corpus();
        for (x, y) in a.iter().zip(&b) {
            assert_eq!(x.graph.weights(), y.graph.weights());
            assert_eq!(x.tree.parents(), y.tree.parents());
            x.tree.check_spans(&x.graph).unwrap();
            assert!(x.graph.len() >= 2 && x.graph.len() <= 40);
        }
    }

    #[test]
    fn zero_mean_samples_are_nonzero() {
        let cases = corpus();
        let mut rng = trial_rng(1, 0);
        for case in &cases {
            for fam in Family::ALL {
                for _ in 0..20 {
                    let f = fam.sample_zero_mean(case, &mut rng);
                    assert!(!f.is_zero());
                    crate::graph::check_zero_mean(&f, &case.graph, 1e-10).unwrap();
                }
            }
        }
    }

    #[test]
    fn all_suites_pass_on_corpus() {
        let cases = corpus();
        for r in hardy_suite(&cases, 300, 9, &DEFAULT_HARDY_Q).unwrap() {
            assert!(r.passed, "{r:?}");
            assert_eq!(
                r.parameters["trials"],
                if r.check_name == "hardy-weak-1-1" {
                    6000
                } else {
                    300
                }
            );
        }
        for r in decomp_suite(&cases, 300, 9, &[1.5, 2.0]).unwrap() {
            assert!(r.passed, "{r:?}");
        }
        let (reports, samples) = poincare_suite(&cases, 100, 9, &DEFAULT_POINCARE_P).unwrap();
        assert_eq!(reports.len(), 6);
        assert_eq!(samples.len(), 600);
        assert!(reports.iter().all(|r| r.passed));
        for r in local_suite(&cases, 300, 9, &DEFAULT_LOCAL_P).unwrap() {
            assert!(r.passed, "{r:?}");
            assert!(r.measured <= 1.0 + 1e-12);
        }
    }

    #[test]
    fn reports_are_reproducible() {
        let (g, t) = kary_tree(2, 3, 0.25).unwrap();
        let cases = vec![Case::new(g, t).unwrap()];
        let a = hardy_suite(&cases, 50, 4, &[2.0]).unwrap();
        let b = hardy_suite(&cases, 50, 4, &[2.0]).unwrap();
        assert_eq!(a, b);
        let c = hardy_suite(&cases, 50, 5, &[2.0]).unwrap();
        assert_ne!(a, c);
    }

    #[test]
    fn tally_tracks_worst_and_violations() {
        let mut t = Tally::new("x");
        t.record(1.0, 2.0, true, 0);
        t.record(3.0, 2.0, false, 1);
        t.record(0.5, 2.0, true, 2);
        let r = t.finish(11);
        assert!(!r.passed);
        assert_eq!((r.measured, r.theoretical, r.seed), (3.0, 2.0, 11));
        assert_eq!(r.parameters["violations"], 1);
        assert_eq!(r.parameters["worst_trial"], 1);
    }

    #[test]
    fn levels_are_geometric() {
        let l = log_levels(1e-2, 1e2, 5);
        for (a, b) in l.iter().zip([1e-2, 1e-1, 1.0, 1e1, 1e2]) {
            assert!((a - b).abs() <= 1e-12 * b);
        }
    }
}
