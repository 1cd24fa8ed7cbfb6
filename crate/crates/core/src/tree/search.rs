//! Searching for a spanning tree and root with a small John constant.

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::{
    build_spanning_tree, john_constants_all_roots, shadow_summary, RootedTree, ShadowSummary,
    Strategy,
};
use crate::error::{invalid, Error, Result};
use crate::graph::WeightedGraph;

/// Default limit on spanning trees × roots for exhaustive search.
pub const DEFAULT_EXHAUSTIVE_CAP: u64 = 1_000_000;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SearchMode {
    /// Every spanning tree under every root. Optimal, small graphs only.
    Exhaustive,
    /// Edge-swap local search from the breadth-first trees.
    GreedyLocal,
}

#[derive(Debug, Clone, Copy)]
pub struct TreeSearch {
    pub mode: SearchMode,
    /// Maximum number of candidate trees evaluated by local search.
    pub budget: usize,
    pub seed: u64,
    pub exhaustive_cap: u64,
}

impl Default for TreeSearch {
    fn default() -> Self {
        Self {
            mode: SearchMode::GreedyLocal,
            budget: 10_000,
            seed: 0,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }
}

/// Minimum John constant over roots for one undirected tree, with the root
/// attaining it (lowest id on ties).
fn best_root(g: &WeightedGraph, tree: &RootedTree) -> Result<(f64, usize)> {
    let all = john_constants_all_roots(g, tree)?;
    Ok(all
        .iter()
        .copied()
        .enumerate()
        .fold(
            (f64::INFINITY, 0),
            |best, (r, c)| if c < best.0 { (c, r) } else { best },
        ))
}

/// Finds a rooted spanning tree of `g` with small John constant.
pub fn optimize_tree(
    g: &WeightedGraph,
    search: &TreeSearch,
) -> Result<(RootedTree, ShadowSummary)> {
    if search.budget == 0 {
        return Err(invalid("search budget must be positive"));
    }
    let (edges, root) = match search.mode {
        SearchMode::Exhaustive => exhaustive(g, search.exhaustive_cap)?,
        SearchMode::GreedyLocal => greedy_local(g, search.budget, search.seed)?,
    };
    let tree = RootedTree::from_edges(g.len(), &edges, root)?;
    let summary = shadow_summary(g, &tree)?;
    Ok((tree, summary))
}

/// John constant, root and edge list of a rooted tree.
type Candidate = (f64, usize, Vec<(usize, usize)>);

fn exhaustive(g: &WeightedGraph, cap: u64) -> Result<(Vec<(usize, usize)>, usize)> {
    let needed = count_spanning_trees(g) * g.len() as f64;
    if !(needed <= cap as f64) {
        return Err(Error::SearchCapExceeded { needed, cap });
    }
    let mut best: Option<Candidate> = None;
    let mut failure = None;
    enumerate_spanning_trees(g, |edges| {
        let tree = match RootedTree::from_edges(g.len(), edges, 0) {
            Ok(tree) => tree,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        let (c, root) = match best_root(g, &tree) {
            Ok(found) => found,
            Err(e) => {
                failure = Some(e);
                return;
            }
        };
        if best.as_ref().is_none_or(|b| c < b.0) {
            best = Some((c, root, edges.to_vec()));
        }
    });
    if let Some(e) = failure {
        return Err(e);
    }
    let (_, root, edges) = best.expect("a connected graph has a spanning tree");
    Ok((edges, root))
}

fn greedy_local(
    g: &WeightedGraph,
    budget: usize,
    seed: u64,
) -> Result<(Vec<(usize, usize)>, usize)> {
    let n = g.len();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);

    let mut starts = Vec::with_capacity(n);
    for root in 0..n {
        let tree = build_spanning_tree(g, root, Strategy::BreadthFirst)?;
        let (c, best) = best_root(g, &tree)?;
        starts.push((c, root, best, tree));
    }
    starts.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));

    let mut spent = 0;
    let mut overall: Option<Candidate> = None;
    for (c, _, root, tree) in starts {
        let mut current = (c, root, tree);
        'improve: while spent < budget {
            let (cur_c, _, ref cur_tree) = current;
            let in_tree: Vec<(usize, usize)> = cur_tree
                .edges()
                .map(|(a, b)| (a.min(b), a.max(b)))
                .collect();
            let mut outside: Vec<(usize, usize)> = g
                .edges()
                .filter(|e| in_tree.binary_search(e).is_err())
                .collect();
            outside.shuffle(&mut rng);
            let mut sorted_in = in_tree.clone();
            sorted_in.sort_unstable();
            for (u, v) in outside {
                for cut in tree_path_edges(cur_tree, u, v) {
                    if spent >= budget {
                        break 'improve;
                    }
                    spent += 1;
                    let mut edges: Vec<_> =
                        sorted_in.iter().copied().filter(|&e| e != cut).collect();
                    edges.push((u, v));
                    let candidate = RootedTree::from_edges(n, &edges, 0)?;
                    let (cand_c, cand_root) = best_root(g, &candidate)?;
                    if cand_c < cur_c {
                        current = (cand_c, cand_root, candidate);
                        continue 'improve;
                    }
                }
            }
            break;
        }
        let (c, root, tree) = current;
        if overall
            .as_ref()
            .is_none_or(|b| c < b.0 || (c == b.0 && root < b.1))
        {
            overall = Some((c, root, tree.edges().collect()));
        }
        if spent >= budget {
            break;
        }
    }
    let (_, root, edges) = overall.expect("at least one start tree");
    Ok((edges, root))
}

/// Edges `(min, max)` on the tree path between `u` and `v`.
fn tree_path_edges(tree: &RootedTree, u: usize, v: usize) -> Vec<(usize, usize)> {
    let depth = |mut t: usize| {
        let mut d = 0;
        while let Some(p) = tree.parent(t) {
            d += 1;
            t = p;
        }
        d
    };
    let (mut a, mut b) = (u, v);
    let (mut da, mut db) = (depth(a), depth(b));
    let mut path = Vec::new();
    let step = |t: usize, path: &mut Vec<(usize, usize)>| {
        let p = tree.parent(t).expect("non-root on path");
        path.push((t.min(p), t.max(p)));
        p
    };
    while da > db {
        a = step(a, &mut path);
        da -= 1;
    }
    while db > da {
        b = step(b, &mut path);
        db -= 1;
    }
    while a != b {
        a = step(a, &mut path);
        b = step(b, &mut path);
    }
    path
}

/// Number of spanning trees by the matrix-tree theorem (floating point;
/// exact for small graphs, an estimate beyond 2^53).
pub fn count_spanning_trees(g: &WeightedGraph) -> f64 {
    let n = g.len();
    if n == 1 {
        return 1.0;
    }
    let m = n - 1;
    let mut lap = vec![vec![0.0; m]; m];
    for t in 0..m {
        lap[t][t] = g.degree(t) as f64;
        for &s in g.neighbors(t) {
            if s < m {
                lap[t][s] -= 1.0;
            }
        }
    }
    let mut det = 1.0;
    for col in 0..m {
        let pivot = (col..m)
            .max_by(|&a, &b| lap[a][col].abs().total_cmp(&lap[b][col].abs()))
            .expect("nonempty range");
        if lap[pivot][col] == 0.0 {
            return 0.0;
        }
        if pivot != col {
            lap.swap(pivot, col);
            det = -det;
        }
        det *= lap[col][col];
        for row in col + 1..m {
            let factor = lap[row][col] / lap[col][col];
            if factor != 0.0 {
                for k in col..m {
                    lap[row][k] -= factor * lap[col][k];
                }
            }
        }
    }
    det.abs().round()
}

/// Calls `visit` with the edge list of every spanning tree of `g`.
///
/// Branches that can no longer reach a spanning tree are pruned, so the
/// work is O(trees × edges²).
pub fn enumerate_spanning_trees(g: &WeightedGraph, mut visit: impl FnMut(&[(usize, usize)])) {
    let edges: Vec<_> = g.edges().collect();
    let n = g.len();
    let mut chosen = Vec::with_capacity(n.saturating_sub(1));
    recurse(n, &edges, 0, &mut chosen, &mut visit);
}

fn recurse(
    n: usize,
    edges: &[(usize, usize)],
    next: usize,
    chosen: &mut Vec<(usize, usize)>,
    visit: &mut impl FnMut(&[(usize, usize)]),
) {
    if chosen.len() + 1 == n {
        visit(chosen);
        return;
    }
    if edges.len() - next < n - 1 - chosen.len() {
        return;
    }
    let (a, b) = edges[next];
    if !joined(n, chosen, a, b) {
        chosen.push((a, b));
        recurse(n, edges, next + 1, chosen, visit);
        chosen.pop();
    }
    if still_spans(n, chosen, &edges[next + 1..]) {
        recurse(n, edges, next + 1, chosen, visit);
    }
}

fn joined(n: usize, chosen: &[(usize, usize)], a: usize, b: usize) -> bool {
    let mut sets = super::DisjointSets::new(n);
    for &(x, y) in chosen {
        sets.union(x, y);
    }
    sets.find(a) == sets.find(b)
}

fn still_spans(n: usize, chosen: &[(usize, usize)], rest: &[(usize, usize)]) -> bool {
    let mut sets = super::DisjointSets::new(n);
    let mut merges = 0;
    for &(x, y) in chosen.iter().chain(rest) {
        if sets.union(x, y) {
            merges += 1;
        }
    }
    merges + 1 == n
}

#[cfg(test)]
mod tests {
    use super::*;

    fn unit(n: usize, edges: &[(usize, usize)]) -> WeightedGraph {
        WeightedGraph::new(vec![1.0; n], edges).unwrap()
    }

    fn config(mode: SearchMode) -> TreeSearch {
        TreeSearch {
            mode,
            budget: 1000,
            seed: 1,
            exhaustive_cap: DEFAULT_EXHAUSTIVE_CAP,
        }
    }

    #[test]
    fn counts_match_known_values() {
        assert_eq!(count_spanning_trees(&unit(1, &[])), 1.0);
        assert_eq!(
            count_spanning_trees(&unit(3, &[(0, 1), (1, 2), (0, 2)])),
            3.0
        );
        let k4: Vec<_> = (0..4)
            .flat_map(|a| (a + 1..4).map(move |b| (a, b)))
            .collect();
        assert_eq!(count_spanning_trees(&unit(4, &k4)), 16.0);
        let grid =
            crate::generators::grid(3, 3, crate::generators::GridWeights::Constant(1.0)).unwrap();
        assert_eq!(count_spanning_trees(&grid), 192.0);
    }

    #[test]
    fn enumeration_agrees_with_count() {
        let k5: Vec<_> = (0..5)
            .flat_map(|a| (a + 1..5).map(move |b| (a, b)))
            .collect();
        let g = unit(5, &k5);
        let mut seen = std::collections::BTreeSet::new();
        enumerate_spanning_trees(&g, |edges| {
            assert!(RootedTree::from_edges(5, edges, 0).is_ok());
            let mut e = edges.to_vec();
            e.sort();
            seen.insert(e);
        });
        assert_eq!(seen.len() as f64, count_spanning_trees(&g));
        assert_eq!(seen.len(), 125);
    }

    #[test]
    fn path_of_three() {
        let g = unit(3, &[(0, 1), (1, 2)]);
        for mode in [SearchMode::Exhaustive, SearchMode::GreedyLocal] {
            let (tree, summary) = optimize_tree(&g, &config(mode)).unwrap();
            assert_eq!(summary.john_constant, 3.0);
            assert_eq!(tree.root(), 0);
        }
    }

    #[test]
    fn triangle_exhaustive() {
        let g = unit(3, &[(0, 1), (1, 2), (0, 2)]);
        let (_, summary) = optimize_tree(&g, &config(SearchMode::Exhaustive)).unwrap();
        assert_eq!(summary.john_constant, 3.0);
        assert_eq!(summary.tree_degree_bound, 2);
    }

    #[test]
    fn tree_shaped_graph_optimizes_over_roots_only() {
        // star weighted so that the heavy centre is the best root
        let g = WeightedGraph::new(vec![5.0, 1.0, 1.0, 1.0], &[(0, 1), (0, 2), (0, 3)]).unwrap();
        let (tree, summary) = optimize_tree(&g, &config(SearchMode::Exhaustive)).unwrap();
        assert_eq!(tree.root(), 0);
        assert_eq!(summary.john_constant, 8.0 / 5.0);
    }

    #[test]
    fn exhaustive_beats_every_enumerated_tree() {
        let g = crate::generators::random_connected(
            6,
            0.5,
            crate::generators::WeightLaw::Uniform {
                low: 0.2,
                high: 4.0,
            },
            17,
        )
        .unwrap();
        let (_, best) = optimize_tree(&g, &config(SearchMode::Exhaustive)).unwrap();
        enumerate_spanning_trees(&g, |edges| {
            for root in 0..g.len() {
                let t = RootedTree::from_edges(g.len(), edges, root).unwrap();
                let c = shadow_summary(&g, &t).unwrap().john_constant;
                assert!(best.john_constant <= c * (1.0 + 1e-12));
            }
        });
        let (_, greedy) = optimize_tree(&g, &config(SearchMode::GreedyLocal)).unwrap();
        assert!(greedy.john_constant >= best.john_constant * (1.0 - 1e-12));
    }

    #[test]
    fn greedy_never_worse_than_bfs_start() {
        for seed in 0..10 {
            let g = crate::generators::random_connected(
                30,
                0.15,
                crate::generators::WeightLaw::Uniform {
                    low: 0.1,
                    high: 5.0,
                },
                seed,
            )
            .unwrap();
            let start = (0..g.len())
                .map(|r| {
                    let t = build_spanning_tree(&g, r, Strategy::BreadthFirst).unwrap();
                    john_constants_all_roots(&g, &t)
                        .unwrap()
                        .into_iter()
                        .fold(f64::INFINITY, f64::min)
                })
                .fold(f64::INFINITY, f64::min);
            let (tree, summary) = optimize_tree(
                &g,
                &TreeSearch {
                    seed,
                    ..config(SearchMode::GreedyLocal)
                },
            )
            .unwrap();
            assert!(
                summary.john_constant <= start * (1.0 + 1e-12),
                "{} > {start}",
                summary.john_constant
            );
            tree.check_spans(&g).unwrap();
        }
    }

    #[test]
    fn errors() {
        let g = unit(2, &[(0, 1)]);
        assert!(optimize_tree(
            &g,
            &TreeSearch {
                budget: 0,
                ..config(SearchMode::GreedyLocal)
            }
        )
        .is_err());
        let grid =
            crate::generators::grid(6, 6, crate::generators::GridWeights::Constant(1.0)).unwrap();
        assert!(matches!(
            optimize_tree(&grid, &config(SearchMode::Exhaustive)),
            Err(Error::SearchCapExceeded { .. })
        ));
    }
}
