//! JSON graph documents and line-delimited verification reports.
//!
//! Floats are written by `serde_json` in shortest round-trip form, so a
//! saved value parses back to the identical `f64`.

use std::collections::BTreeMap;
use std::fs;
use std::io::Write;
use std::path::Path;

use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::error::{Error, Result};
use crate::graph::WeightedGraph;
use crate::tree::RootedTree;

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct VertexRecord {
    pub id: u64,
    pub mu: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct TreeRecord {
    pub root: u64,
    /// Child id to parent id; the root has no entry.
    pub parent: BTreeMap<u64, u64>,
}

/// On-disk form of a weighted graph with an optional rooted spanning tree.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphDocument {
    pub format_version: u32,
    pub vertices: Vec<VertexRecord>,
    pub edges: Vec<[u64; 2]>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub tree: Option<TreeRecord>,
}

fn parse_error(context: impl Into<String>, err: impl ToString) -> Error {
    Error::Parse {
        context: context.into(),
        message: err.to_string(),
    }
}

impl GraphDocument {
    /// Normalized document: ids `0..n` in vertex order.
    pub fn from_graph(g: &WeightedGraph, tree: Option<&RootedTree>) -> Self {
        let labels = g.labels();
        let vertices = (0..g.len())
            .map(|t| VertexRecord {
                id: t as u64,
                mu: g.weight(t),
                label: labels.map(|l| l[t].clone()),
            })
            .collect();
        let edges = g.edges().map(|(a, b)| [a as u64, b as u64]).collect();
        let tree = tree.map(|tree| TreeRecord {
            root: tree.root() as u64,
            parent: tree.edges().map(|(c, p)| (c as u64, p as u64)).collect(),
        });
        GraphDocument {
            format_version: FORMAT_VERSION,
            vertices,
            edges,
            tree,
        }
    }

    /// Validates the document and maps ids to `0..n` in ascending id order.
    pub fn to_graph(&self) -> Result<(WeightedGraph, Option<RootedTree>)> {
        if self.format_version != FORMAT_VERSION {
            return Err(parse_error(
                "format_version",
                format!(
                    "unsupported version {}, expected {FORMAT_VERSION}",
                    self.format_version
                ),
            ));
        }
        if self.vertices.is_empty() {
            return Err(parse_error("vertices", Error::EmptyGraph));
        }
        let mut order: Vec<usize> = (0..self.vertices.len()).collect();
        order.sort_by_key(|&i| self.vertices[i].id);
        let mut index = BTreeMap::new();
        for (new_id, &i) in order.iter().enumerate() {
            let v = &self.vertices[i];
            if index.insert(v.id, new_id).is_some() {
                return Err(parse_error(
                    format!("vertices[{i}].id"),
                    format!("duplicate id {}", v.id),
                ));
            }
            if !(v.mu > 0.0) || !v.mu.is_finite() {
                return Err(parse_error(
                    format!("vertices[{i}].mu"),
                    Error::NonpositiveWeight {
                        vertex: v.id as usize,
                        weight: v.mu,
                    },
                ));
            }
        }
        let lookup = |id: u64, context: String| {
            index
                .get(&id)
                .copied()
                .ok_or_else(|| parse_error(context, format!("unknown vertex id {id}")))
        };
        let weights = order.iter().map(|&i| self.vertices[i].mu).collect();
        let mut edges = Vec::with_capacity(self.edges.len());
        for (k, [a, b]) in self.edges.iter().enumerate() {
            edges.push((
                lookup(*a, format!("edges[{k}][0]"))?,
                lookup(*b, format!("edges[{k}][1]"))?,
            ));
        }
        let mut g = WeightedGraph::new(weights, &edges).map_err(|e| parse_error("edges", e))?;
        if self.vertices.iter().any(|v| v.label.is_some()) {
            let labels = order
                .iter()
                .map(|&i| {
                    let v = &self.vertices[i];
                    v.label.clone().unwrap_or_else(|| v.id.to_string())
                })
                .collect();
            g = g
                .with_labels(labels)
                .map_err(|e| parse_error("vertices", e))?;
        }
        let tree = match &self.tree {
            None => None,
            Some(rec) => {
                let root = lookup(rec.root, "tree.root".into())?;
                let mut parents = vec![None; g.len()];
                for (child, parent) in &rec.parent {
                    let c = lookup(*child, format!("tree.parent.{child}"))?;
                    let p = lookup(*parent, format!("tree.parent.{child}"))?;
                    parents[c] = Some(p);
                }
                let tree =
                    RootedTree::from_parents(root, parents).map_err(|e| parse_error("tree", e))?;
                tree.check_spans(&g).map_err(|e| parse_error("tree", e))?;
                Some(tree)
            }
        };
        Ok((g, tree))
    }
}

pub fn parse_graph(text: &str) -> Result<(WeightedGraph, Option<RootedTree>)> {
    let doc: GraphDocument = serde_json::from_str(text)
        .map_err(|e| parse_error(format!("line {} column {}", e.line(), e.column()), e))?;
    doc.to_graph()
}

pub fn graph_to_string(g: &WeightedGraph, tree: Option<&RootedTree>) -> String {
    let mut text = serde_json::to_string_pretty(&GraphDocument::from_graph(g, tree))
        .expect("documents serialize");
    text.push('\n');
    text
}

pub fn load_graph(path: impl AsRef<Path>) -> Result<(WeightedGraph, Option<RootedTree>)> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    parse_graph(&text).map_err(|e| match e {
        Error::Parse { context, message } => Error::Parse {
            context: format!("{}: {context}", path.display()),
            message,
        },
        other => other,
    })
}

pub fn save_graph(
    path: impl AsRef<Path>,
    g: &WeightedGraph,
    tree: Option<&RootedTree>,
) -> Result<()> {
    fs::write(path, graph_to_string(g, tree))?;
    Ok(())
}

/// One inequality check. `passed` follows the check's own contract,
/// which is strict for the weak-type bound and non-strict elsewhere.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub check_name: String,
    pub parameters: BTreeMap<String, Value>,
    pub measured: f64,
    pub theoretical: f64,
    pub passed: bool,
    pub seed: u64,
    /// Zero unless timing was requested, keeping output reproducible.
    pub runtime_ms: u64,
}

impl VerificationReport {
    pub fn to_json_line(&self) -> String {
        serde_json::to_string(self).expect("reports serialize")
    }
}

/// Writes reports as JSON lines.
pub fn write_reports<'a, W: Write + ?Sized>(
    out: &mut W,
    reports: impl IntoIterator<Item = &'a VerificationReport>,
) -> Result<()> {
    for r in reports {
        writeln!(out, "{}", r.to_json_line())?;
    }
    Ok(())
}

pub fn read_reports(text: &str) -> Result<Vec<VerificationReport>> {
    text.lines()
        .enumerate()
        .filter(|(_, l)| !l.trim().is_empty())
        .map(|(i, l)| {
            serde_json::from_str(l).map_err(|e| parse_error(format!("line {}", i + 1), e))
        })
        .collect()
}

/// Writes a header and rows as CSV; cells must not contain commas.
pub fn write_csv<W: Write + ?Sized>(
    out: &mut W,
    header: &[&str],
    rows: &[Vec<String>],
) -> Result<()> {
    writeln!(out, "{}", header.join(","))?;
    for row in rows {
        writeln!(out, "{}", row.join(","))?;
    }
    Ok(())
}
