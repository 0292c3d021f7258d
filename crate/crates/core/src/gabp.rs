//! Gaussian belief propagation on tree-structured scalar models.
//!
//! On a tree the only simple cycles at a vertex are its self-loop and one
//! backtrack per neighbour, so the diagonal path-sum collapses to the
//! message equations
//!
//! ```text
//! Ĵ_α       = J_αα + Σ_{β ∈ N(α)}     ΔJ_{β→α}
//! Ĵ_{β\α}   = J_ββ + Σ_{δ ∈ N(β)\α}   ΔJ_{δ→β}
//! ΔJ_{δ→β}  = -J_βδ Ĵ_{δ\β}^{-1} J_δβ
//! ```
//!
//! and `Σ_αα = 1 / Ĵ_α`. Two sweeps over a rooted orientation compute every
//! message exactly.

use std::collections::BTreeMap;

use crate::error::{Error, Result};
use crate::graph::{build_scalar_graph, ModelGraph, ScalarGraph, VertexSubset};
use crate::model::InformationModel;

#[derive(Debug, Clone, PartialEq)]
pub struct MessageTable {
    /// `ΔJ_{from→to}` keyed by `(from, to)`.
    pub messages: BTreeMap<(usize, usize), f64>,
    /// Marginal precisions `Ĵ_α`.
    pub marginals: Vec<f64>,
}

impl MessageTable {
    pub fn message(&self, from: usize, to: usize) -> Option<f64> {
        self.messages.get(&(from, to)).copied()
    }

    /// Marginal variance `Σ_αα = 1 / Ĵ_α`.
    pub fn variance(&self, v: usize) -> f64 {
        1.0 / self.marginals[v]
    }

    pub fn variances(&self) -> Vec<f64> {
        self.marginals.iter().map(|p| 1.0 / p).collect()
    }
}

/// True when every connected component is acyclic (self-loops ignored).
pub fn is_tree<W>(graph: &ModelGraph<W>) -> bool {
    let n = graph.num_vertices();
    let mut seen = VertexSubset::empty(n);
    let all = graph.all_vertices();
    let mut components = 0;
    for v in 0..n {
        if !seen.contains(v) {
            components += 1;
            for u in graph.component_within(&all, v).iter() {
                seen.insert(u);
            }
        }
    }
    graph.num_edges() + components == n
}

/// Runs the two-pass schedule rooted at the lowest vertex of each component.
pub fn gabp_marginals(model: &InformationModel) -> Result<MessageTable> {
    gabp_marginals_rooted(model, |component| component[0])
}

/// Same as [`gabp_marginals`] with the root of each component picked by
/// `choose_root` from its ascending vertex list.
pub fn gabp_marginals_rooted(
    model: &InformationModel,
    choose_root: impl Fn(&[usize]) -> usize,
) -> Result<MessageTable> {
    let graph = build_scalar_graph(model);
    if !is_tree(&graph) {
        return Err(Error::Topology(format!(
            "{} edges on {} vertices contain a cycle",
            graph.num_edges(),
            graph.num_vertices()
        )));
    }
    let n = graph.num_vertices();
    let mut table = MessageTable {
        messages: BTreeMap::new(),
        marginals: vec![0.0; n],
    };
    let mut done = VertexSubset::empty(n);
    let all = graph.all_vertices();
    for seed in 0..n {
        if done.contains(seed) {
            continue;
        }
        let component = graph.component_within(&all, seed).to_vec();
        let root = choose_root(&component);
        if !component.contains(&root) {
            return Err(Error::Configuration(format!(
                "root {root} is not in the component of vertex {seed}"
            )));
        }
        sweep(&graph, root, &mut table)?;
        for v in component {
            done.insert(v);
        }
    }
    Ok(table)
}

/// Leaves-to-root then root-to-leaves over the component of `root`.
fn sweep(graph: &ScalarGraph, root: usize, table: &mut MessageTable) -> Result<()> {
    let mut order = vec![root];
    let mut parent = vec![usize::MAX; graph.num_vertices()];
    let mut head = 0;
    while head < order.len() {
        let v = order[head];
        head += 1;
        for &u in graph.neighbors(v) {
            if u != parent[v] {
                parent[u] = v;
                order.push(u);
            }
        }
    }

    for &v in order.iter().rev() {
        if v != root {
            send(graph, v, parent[v], table)?;
        }
    }
    for &v in &order {
        for &c in graph.neighbors(v) {
            if c != parent[v] {
                send(graph, v, c, table)?;
            }
        }
        let precision = cavity(graph, v, None, table);
        if precision.is_nan() || precision <= 0.0 {
            return Err(Error::Singular {
                deleted: Vec::new(),
            });
        }
        table.marginals[v] = precision;
    }
    Ok(())
}

/// `J_vv` plus incoming messages from all neighbours except `excluded`,
/// summed in ascending neighbour order.
fn cavity(graph: &ScalarGraph, v: usize, excluded: Option<usize>, table: &MessageTable) -> f64 {
    let mut acc = *graph.self_weight(v);
    for &u in graph.neighbors(v) {
        if Some(u) != excluded {
            acc += table.messages[&(u, v)];
        }
    }
    acc
}

fn send(graph: &ScalarGraph, from: usize, to: usize, table: &mut MessageTable) -> Result<()> {
    let precision = cavity(graph, from, Some(to), table);
    if precision.is_nan() || precision <= 0.0 {
        return Err(Error::Singular { deleted: vec![to] });
    }
    let j_to_from = *graph.block(to, from).expect("tree edge");
    let j_from_to = *graph.block(from, to).expect("tree edge");
    table
        .messages
        .insert((from, to), -j_to_from * (1.0 / precision) * j_from_to);
    Ok(())
}
