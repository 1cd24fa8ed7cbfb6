//! Rooted spanning trees, the shadow order they induce, and John constants.
//!
//! The shadow of `t` is `S_t = {s : s ⪰ t}`, the set of vertices whose tree
//! path to the root passes through `t`. A rooted spanning tree certifies the
//! John condition with constant `c` when `μ(S_t) <= c μ(t)` for every `t`.

mod search;

use std::collections::VecDeque;

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;

pub use search::{
    count_spanning_trees, enumerate_spanning_trees, optimize_tree, SearchMode, TreeSearch,
};

/// A spanning tree with a distinguished root.
///
/// `order` lists vertices so that every parent precedes its children, and
/// `entry`/`exit` are DFS interval stamps used for O(1) ancestry queries.
#[derive(Debug, Clone, PartialEq)]
pub struct RootedTree {
    root: usize,
    parent: Vec<Option<usize>>,
    children: Vec<Vec<usize>>,
    order: Vec<usize>,
    entry: Vec<usize>,
    exit: Vec<usize>,
}

impl RootedTree {
    /// Builds a tree from parent links. The root must map to `None` and no
    /// other vertex may.
    pub fn from_parents(root: usize, parent: Vec<Option<usize>>) -> Result<Self> {
        let n = parent.len();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        if root >= n {
            return Err(Error::InvalidVertex { id: root, n });
        }
        let mut children = vec![Vec::new(); n];
        for (t, p) in parent.iter().enumerate() {
            match *p {
                None if t != root => {
                    return Err(Error::InvalidTree(format!(
                        "vertex {t} has no parent but is not the root"
                    )))
                }
                Some(_) if t == root => {
                    return Err(Error::InvalidTree(format!("root {root} has a parent")))
                }
                Some(p) if p >= n => return Err(Error::InvalidVertex { id: p, n }),
                Some(p) if p == t => {
                    return Err(Error::InvalidTree(format!("vertex {t} is its own parent")))
                }
                Some(p) => children[p].push(t),
                None => {}
            }
        }
        // children are pushed in ascending t, so each list is already sorted
        let mut order = Vec::with_capacity(n);
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            order.push(t);
            queue.extend(children[t].iter().copied());
        }
        if order.len() != n {
            return Err(Error::InvalidTree(format!(
                "{} vertices do not reach the root (cycle in parent links)",
                n - order.len()
            )));
        }
        let (entry, exit) = dfs_intervals(root, &children);
        Ok(Self {
            root,
            parent,
            children,
            order,
            entry,
            exit,
        })
    }

    /// Builds a rooted tree from an undirected edge list with `n - 1` edges.
    pub fn from_edges(n: usize, edges: &[(usize, usize)], root: usize) -> Result<Self> {
        if edges.len() + 1 != n {
            return Err(Error::InvalidTree(format!(
                "{} edges for {n} vertices",
                edges.len()
            )));
        }
        if root >= n {
            return Err(Error::InvalidVertex { id: root, n });
        }
        let mut adjacency = vec![Vec::new(); n];
        for &(a, b) in edges {
            if a >= n || b >= n {
                return Err(Error::InvalidVertex { id: a.max(b), n });
            }
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        let mut parent = vec![None; n];
        let mut seen = vec![false; n];
        seen[root] = true;
        let mut queue = VecDeque::from([root]);
        while let Some(t) = queue.pop_front() {
            for &s in &adjacency[t] {
                if !seen[s] {
                    seen[s] = true;
                    parent[s] = Some(t);
                    queue.push_back(s);
                }
            }
        }
        if seen.iter().any(|&s| !s) {
            return Err(Error::InvalidTree(
                "edge list does not connect every vertex".into(),
            ));
        }
        Self::from_parents(root, parent)
    }

    pub fn root(&self) -> usize {
        self.root
    }

    pub fn len(&self) -> usize {
        self.parent.len()
    }

    pub fn is_empty(&self) -> bool {
        self.parent.is_empty()
    }

    /// `t_p`, or `None` for the root.
    pub fn parent(&self, t: usize) -> Option<usize> {
        self.parent[t]
    }

    pub fn parents(&self) -> &[Option<usize>] {
        &self.parent
    }

    pub fn children(&self, t: usize) -> &[usize] {
        &self.children[t]
    }

    /// Vertices with every parent before its children (breadth-first).
    pub fn topo_order(&self) -> &[usize] {
        &self.order
    }

    /// Degree of `t` within the tree, counting the parent edge.
    pub fn degree(&self, t: usize) -> usize {
        self.children[t].len() + usize::from(self.parent[t].is_some())
    }

    pub fn max_degree(&self) -> usize {
        (0..self.len()).map(|t| self.degree(t)).max().unwrap_or(0)
    }

    /// Tree edges as `(child, parent)` pairs, by ascending child id.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.parent
            .iter()
            .enumerate()
            .filter_map(|(t, p)| p.map(|p| (t, p)))
    }

    /// The same undirected tree hung from another root.
    pub fn rerooted(&self, root: usize) -> Result<Self> {
        let edges: Vec<_> = self.edges().collect();
        Self::from_edges(self.len(), &edges, root)
    }

    /// `s ⪰ t`: the tree path from `s` to the root contains `t`.
    pub fn is_descendant(&self, s: usize, t: usize) -> Result<bool> {
        let n = self.len();
        for id in [s, t] {
            if id >= n {
                return Err(Error::InvalidVertex { id, n });
            }
        }
        Ok(self.entry[t] <= self.entry[s] && self.exit[s] <= self.exit[t])
    }

    /// Checks that the tree has the graph's vertex set and only graph edges.
    pub fn check_spans(&self, g: &WeightedGraph) -> Result<()> {
        if self.len() != g.len() {
            return Err(Error::DimensionMismatch {
                expected: g.len(),
                got: self.len(),
            });
        }
        for (t, p) in self.edges() {
            if !g.has_edge(t, p) {
                return Err(Error::TreeEdgeNotInGraph(t, p));
            }
        }
        Ok(())
    }

    /// Bottom-up subtree sums: `out[t] = Σ_{s ⪰ t} values[s]`.
    pub(crate) fn subtree_sums(&self, values: &mut [f64]) {
        for &t in self.order.iter().rev() {
            if let Some(p) = self.parent[t] {
                values[p] += values[t];
            }
        }
    }
}

fn dfs_intervals(root: usize, children: &[Vec<usize>]) -> (Vec<usize>, Vec<usize>) {
    let n = children.len();
    let mut entry = vec![0; n];
    let mut exit = vec![0; n];
    let mut clock = 0;
    let mut stack = vec![(root, 0usize)];
    entry[root] = clock;
    while let Some(&mut (t, ref mut next)) = stack.last_mut() {
        if let Some(&c) = children[t].get(*next) {
            *next += 1;
            clock += 1;
            entry[c] = clock;
            stack.push((c, 0));
        } else {
            exit[t] = clock;
            stack.pop();
        }
    }
    (entry, exit)
}

/// Traversal used to grow a spanning tree.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Strategy {
    BreadthFirst,
    DepthFirst,
}

/// Grows a spanning tree from `root`, visiting neighbors in ascending id order.
pub fn build_spanning_tree(
    g: &WeightedGraph,
    root: usize,
    strategy: Strategy,
) -> Result<RootedTree> {
    g.check_vertex(root)?;
    let n = g.len();
    let mut parent = vec![None; n];
    let mut seen = vec![false; n];
    seen[root] = true;
    match strategy {
        Strategy::BreadthFirst => {
            let mut queue = VecDeque::from([root]);
            while let Some(t) = queue.pop_front() {
                for &s in g.neighbors(t) {
                    if !seen[s] {
                        seen[s] = true;
                        parent[s] = Some(t);
                        queue.push_back(s);
                    }
                }
            }
        }
        Strategy::DepthFirst => {
            let mut stack = vec![(root, 0usize)];
            while let Some(&mut (t, ref mut next)) = stack.last_mut() {
                let neighbors = g.neighbors(t);
                while *next < neighbors.len() && seen[neighbors[*next]] {
                    *next += 1;
                }
                match neighbors.get(*next) {
                    Some(&s) => {
                        seen[s] = true;
                        parent[s] = Some(t);
                        stack.push((s, 0));
                    }
                    None => {
                        stack.pop();
                    }
                }
            }
        }
    }
    if let Some(missing) = seen.iter().position(|&s| !s) {
        return Err(Error::InvalidTree(format!(
            "vertex {missing} unreachable from root {root}"
        )));
    }
    RootedTree::from_parents(root, parent)
}

/// A uniformly shuffled Kruskal spanning tree hung from a random root.
pub fn random_spanning_tree<R: Rng + ?Sized>(g: &WeightedGraph, rng: &mut R) -> Result<RootedTree> {
    let mut edges: Vec<_> = g.edges().collect();
    edges.shuffle(rng);
    let mut components = DisjointSets::new(g.len());
    let chosen: Vec<_> = edges
        .into_iter()
        .filter(|&(a, b)| components.union(a, b))
        .collect();
    let root = rng.random_range(0..g.len());
    RootedTree::from_edges(g.len(), &chosen, root)
}

pub(crate) struct DisjointSets {
    parent: Vec<usize>,
    size: Vec<usize>,
}

impl DisjointSets {
    pub(crate) fn new(n: usize) -> Self {
        Self {
            parent: (0..n).collect(),
            size: vec![1; n],
        }
    }

    pub(crate) fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    /// Merges the sets of `a` and `b`; false if they were already joined.
    pub(crate) fn union(&mut self, a: usize, b: usize) -> bool {
        let (mut a, mut b) = (self.find(a), self.find(b));
        if a == b {
            return false;
        }
        if self.size[a] < self.size[b] {
            std::mem::swap(&mut a, &mut b);
        }
        self.parent[b] = a;
        self.size[a] += self.size[b];
        true
    }
}

/// Shadow measures of a rooted spanning tree and the John constant they give.
#[derive(Debug, Clone, PartialEq)]
pub struct ShadowSummary {
    /// μ(S_t) per vertex.
    pub shadow_measure: Vec<f64>,
    /// μ(S_t) / μ(t) per vertex.
    pub ratio: Vec<f64>,
    /// `c = max_t μ(S_t)/μ(t)`.
    pub john_constant: f64,
    /// Vertex attaining `c` (lowest id on ties).
    pub worst_vertex: usize,
    /// `M`, the maximum degree within the tree.
    pub tree_degree_bound: usize,
}

/// Shadow measures by one reverse-topological pass.
pub fn shadow_summary(g: &WeightedGraph, tree: &RootedTree) -> Result<ShadowSummary> {
    tree.check_spans(g)?;
    let mut shadow_measure = g.weights().to_vec();
    tree.subtree_sums(&mut shadow_measure);
    let ratio: Vec<f64> = shadow_measure
        .iter()
        .zip(g.weights())
        .map(|(s, w)| s / w)
        .collect();
    let (worst_vertex, john_constant) = argmax(&ratio);
    Ok(ShadowSummary {
        shadow_measure,
        ratio,
        john_constant,
        worst_vertex,
        tree_degree_bound: tree.max_degree(),
    })
}

fn argmax(values: &[f64]) -> (usize, f64) {
    values
        .iter()
        .copied()
        .enumerate()
        .fold((0, f64::NEG_INFINITY), |best, (i, v)| {
            if v > best.1 {
                (i, v)
            } else {
                best
            }
        })
}

/// The John constant the same undirected tree would have under every choice
/// of root, in O(n) total by rerooting.
///
/// Rooted at `r`, the shadow of a vertex `t` off the path from `r` to the
/// current root is unchanged; for a strict ancestor `t` of `r` it becomes the
/// complement of the subtree of the child of `t` toward `r`.
pub fn john_constants_all_roots(g: &WeightedGraph, tree: &RootedTree) -> Result<Vec<f64>> {
    tree.check_spans(g)?;
    let n = g.len();
    let total = g.total_measure();
    let mut sub = g.weights().to_vec();
    tree.subtree_sums(&mut sub);
    let down: Vec<f64> = (0..n).map(|t| sub[t] / g.weight(t)).collect();

    let mut best_below = down.clone();
    for &t in tree.topo_order().iter().rev() {
        if let Some(p) = tree.parent(t) {
            best_below[p] = best_below[p].max(best_below[t]);
        }
    }

    // above[v]: max unchanged ratio over subtrees hanging off the path to v.
    // flipped[v]: max complement ratio over strict ancestors of v.
    let mut above = vec![f64::NEG_INFINITY; n];
    let mut flipped = vec![f64::NEG_INFINITY; n];
    for &u in tree.topo_order() {
        let kids = tree.children(u);
        let mut suffix = vec![f64::NEG_INFINITY; kids.len() + 1];
        for (i, &c) in kids.iter().enumerate().rev() {
            suffix[i] = suffix[i + 1].max(best_below[c]);
        }
        let mut prefix = f64::NEG_INFINITY;
        for (i, &v) in kids.iter().enumerate() {
            above[v] = above[u].max(prefix).max(suffix[i + 1]);
            flipped[v] = flipped[u].max((total - sub[v]) / g.weight(u));
            prefix = prefix.max(best_below[v]);
        }
    }

    Ok((0..n)
        .map(|r| {
            let below = tree
                .children(r)
                .iter()
                .fold(f64::NEG_INFINITY, |m, &c| m.max(best_below[c]));
            (total / g.weight(r))
                .max(above[r])
                .max(flipped[r])
                .max(below)
        })
        .collect())
}

/// How two shadows relate: they either nest or are disjoint.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ShadowRelation {
    Nested,
    Disjoint,
}

/// Classifies `S_{t1}` and `S_{t2}`. Shadows meet exactly when one vertex
/// lies below the other.
pub fn shadow_relation(tree: &RootedTree, t1: usize, t2: usize) -> Result<ShadowRelation> {
    if tree.is_descendant(t1, t2)? || tree.is_descendant(t2, t1)? {
        Ok(ShadowRelation::Nested)
    } else {
        Ok(ShadowRelation::Disjoint)
    }
}
