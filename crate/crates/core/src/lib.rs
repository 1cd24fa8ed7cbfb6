//! Shadows, John constants and Poincaré inequalities on weighted graphs.
//!
//! A connected graph with positive vertex weights `μ` and a rooted spanning
//! tree determines, for every vertex `t`, a shadow `S_t` (the subtree below
//! `t`). The John constant `c = max_t μ(S_t)/μ(t)` controls a tree Hardy
//! operator, a decomposition of zero-mean functions into edge pieces, and
//! through them a global ℓᵖ Poincaré inequality.

pub mod cli;
pub mod decomp;
pub mod error;
pub mod generators;
pub mod graph;
pub mod hardy;
pub mod io;
pub mod poincare;
pub mod suite;
pub mod tree;

pub use error::{Error, Result};
pub use graph::{EdgeSet, VertexFunction, WeightedGraph};
pub use tree::{RootedTree, ShadowSummary};
