//! Superposition-structure graphs over message sets.
//!
//! Messages labelled by transmitter sets sit in a DAG: an edge runs from a
//! cloud center to each of its immediate satellites (the covers of the subset
//! order restricted to the labels present). The encoding graph is the twin of
//! the message graph over codeword variables, with an input node `X_i`
//! inserted for every transmitter whose private message is absent.

use crate::error::{Error, Result};
use crate::net::MessageLabel;
use crate::set::IdxSet;
use std::collections::BTreeMap;

/// Default cap on right-sided enumeration (2^20 candidate subsets).
pub const RIGHT_SIDED_CAP: usize = 20;

/// DAG over messages keyed by transmitter set; receiver sets ride along as
/// annotations.
#[derive(Clone, Debug)]
pub struct MessageGraph {
    /// Sorted by (|tx| descending, tx lexicographic), i.e. column major from
    /// the widest column down.
    pub nodes: Vec<MessageLabel>,
    /// Directed cloud-center -> satellite pairs, as indices into `nodes`.
    pub edges: Vec<(usize, usize)>,
    pub k1: usize,
}

impl MessageGraph {
    /// Nodes bucketed by column (|tx|), widest first.
    pub fn columns(&self) -> BTreeMap<usize, Vec<usize>> {
        let mut cols: BTreeMap<usize, Vec<usize>> = BTreeMap::new();
        for (i, n) in self.nodes.iter().enumerate() {
            cols.entry(n.tx.len()).or_default().push(i);
        }
        cols
    }

    /// True when a directed path (length >= 1) runs from `from` to `to`.
    pub fn has_path(&self, from: usize, to: usize) -> bool {
        let mut stack = vec![from];
        let mut seen = vec![false; self.nodes.len()];
        while let Some(v) = stack.pop() {
            for &(a, b) in &self.edges {
                if a == v && !seen[b] {
                    if b == to {
                        return true;
                    }
                    seen[b] = true;
                    stack.push(b);
                }
            }
        }
        false
    }
}

fn canonical_node_order(a: &MessageLabel, b: &MessageLabel) -> std::cmp::Ordering {
    b.tx
        .len()
        .cmp(&a.tx.len())
        .then_with(|| a.tx.cmp(&b.tx))
        .then_with(|| a.rx.cmp(&b.rx))
}

/// Build the message graph for a label set.
///
/// An edge runs from `M_{Δ1}` to `M_{Δ2}` exactly when `Δ2 ⊊ Δ1` and no third
/// label sits strictly between them. Labels must have pairwise distinct
/// transmitter sets.
pub fn build_message_graph(labels: &[MessageLabel], k1: usize) -> Result<MessageGraph> {
    let mut nodes: Vec<MessageLabel> = labels.to_vec();
    nodes.sort_by(canonical_node_order);
    for w in nodes.windows(2) {
        if w[0].tx == w[1].tx {
            return Err(Error::DuplicateTxSet(w[0].tx.to_string()));
        }
    }
    for n in &nodes {
        if n.tx.upper() > k1 {
            return Err(Error::IndexOutOfRange {
                kind: "transmitter",
                index: n.tx.upper(),
                limit: k1,
            });
        }
    }
    let mut edges = Vec::new();
    for (a, na) in nodes.iter().enumerate() {
        for (b, nb) in nodes.iter().enumerate() {
            if !nb.tx.is_strict_subset(&na.tx) {
                continue;
            }
            let blocked = nodes
                .iter()
                .any(|nc| nb.tx.is_strict_subset(&nc.tx) && nc.tx.is_strict_subset(&na.tx));
            if !blocked {
                edges.push((a, b));
            }
        }
    }
    Ok(MessageGraph { nodes, edges, k1 })
}

/// Satellite test: `a` is a satellite of `b` when `a.tx ⊊ b.tx`
/// (equivalently, `b` is a cloud center for `a`).
pub fn is_satellite(a: &MessageLabel, b: &MessageLabel) -> bool {
    a.tx.is_strict_subset(&b.tx)
}

/// Enumerate every right-sided subset of `labels`: the subsets closed under
/// taking present labels with smaller transmitter sets. Includes the empty
/// set and the full set; returned in increasing bitmask order over the
/// canonical node order.
pub fn enumerate_right_sided(labels: &[MessageLabel]) -> Result<Vec<Vec<MessageLabel>>> {
    enumerate_right_sided_capped(labels, RIGHT_SIDED_CAP)
}

pub fn enumerate_right_sided_capped(
    labels: &[MessageLabel],
    cap: usize,
) -> Result<Vec<Vec<MessageLabel>>> {
    if labels.len() > cap {
        return Err(Error::LabelCapExceeded {
            count: labels.len(),
            cap,
        });
    }
    let mut sorted = labels.to_vec();
    sorted.sort_by(canonical_node_order);
    sorted.dedup();
    let n = sorted.len();
    // required[i] = bitmask of labels whose tx set is contained in label i's.
    let mut required = vec![0u32; n];
    for i in 0..n {
        for j in 0..n {
            if sorted[j].tx.is_subset(&sorted[i].tx) {
                required[i] |= 1 << j;
            }
        }
    }
    let mut out = Vec::new();
    for mask in 0u32..(1u32 << n) {
        let closed = (0..n).all(|i| mask & (1 << i) == 0 || required[i] & !mask == 0);
        if closed {
            out.push(
                (0..n)
                    .filter(|i| mask & (1 << i) != 0)
                    .map(|i| sorted[i].clone())
                    .collect(),
            );
        }
    }
    Ok(out)
}

/// A node of the encoding graph: a codeword variable, or the input symbol of
/// a transmitter whose private message is absent.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CodeNode {
    /// `W_Δ`; rendered as `X_i` when `Δ = {i}`.
    Codeword(IdxSet),
    /// `X_i` inserted for a transmitter with no private message.
    InsertedInput(usize),
}

impl CodeNode {
    pub fn tx(&self) -> IdxSet {
        match self {
            CodeNode::Codeword(d) => d.clone(),
            CodeNode::InsertedInput(i) => IdxSet::singleton(*i),
        }
    }

    pub fn render(&self) -> String {
        let d = self.tx();
        if d.len() == 1 {
            format!("X_{}", d.as_slice()[0])
        } else {
            format!("W_{{{d}}}")
        }
    }
}

/// One factor of the encoding-graph probability law.
#[derive(Clone, Debug)]
pub struct LawFactor {
    pub node: CodeNode,
    /// Cloud centers the codeword is superimposed on (all present proper
    /// supersets), in canonical column order.
    pub given: Vec<CodeNode>,
    /// Time-share variable participates in the conditioning.
    pub with_time_share: bool,
    /// True when the node is a deterministic function of its conditioning.
    pub deterministic: bool,
}

impl LawFactor {
    pub fn render(&self) -> String {
        let mut given: Vec<String> = self.given.iter().map(|g| g.render()).collect();
        if self.with_time_share {
            given.push("Q".into());
        }
        if given.is_empty() {
            format!("P_{{{}}}", self.node.render())
        } else {
            format!("P_{{{}|{}}}", self.node.render(), given.join(","))
        }
    }
}

/// Codeword twin of a message graph.
#[derive(Clone, Debug)]
pub struct EncodingGraph {
    pub nodes: Vec<CodeNode>,
    pub edges: Vec<(usize, usize)>,
    /// Factors ordered from the widest column down to column 1.
    pub factors: Vec<LawFactor>,
    /// False when the full-set message is present, in which case the
    /// time-share variable is redundant.
    pub time_share: bool,
}

/// Translate a message graph into its encoding twin.
pub fn to_encoding_graph(graph: &MessageGraph) -> EncodingGraph {
    let full_set_present = graph.nodes.iter().any(|n| n.tx.len() == graph.k1);
    let time_share = !full_set_present;

    let mut nodes: Vec<CodeNode> = graph
        .nodes
        .iter()
        .map(|n| CodeNode::Codeword(n.tx.clone()))
        .collect();
    let mut deterministic = vec![false; nodes.len()];
    for i in 1..=graph.k1 {
        let singleton = IdxSet::singleton(i);
        if !graph.nodes.iter().any(|n| n.tx == singleton) {
            nodes.push(CodeNode::InsertedInput(i));
            deterministic.push(true);
        }
    }
    // Canonical order: column descending, tx lexicographic.
    let mut idx: Vec<usize> = (0..nodes.len()).collect();
    idx.sort_by(|&a, &b| {
        let (ta, tb) = (nodes[a].tx(), nodes[b].tx());
        tb.len().cmp(&ta.len()).then_with(|| ta.cmp(&tb))
    });
    let nodes: Vec<CodeNode> = idx.iter().map(|&i| nodes[i].clone()).collect();
    let deterministic: Vec<bool> = idx.iter().map(|&i| deterministic[i]).collect();

    let mut edges = Vec::new();
    for (a, na) in nodes.iter().enumerate() {
        for (b, nb) in nodes.iter().enumerate() {
            let (ta, tb) = (na.tx(), nb.tx());
            if !tb.is_strict_subset(&ta) {
                continue;
            }
            let blocked = nodes
                .iter()
                .any(|nc| tb.is_strict_subset(&nc.tx()) && nc.tx().is_strict_subset(&ta));
            if !blocked {
                edges.push((a, b));
            }
        }
    }

    let factors = nodes
        .iter()
        .enumerate()
        .map(|(i, node)| {
            let tx = node.tx();
            // Nearest cloud centers first: column ascending, then lexicographic.
            let mut given: Vec<CodeNode> = nodes
                .iter()
                .filter(|c| tx.is_strict_subset(&c.tx()))
                .cloned()
                .collect();
            given.sort_by(|a, b| {
                let (ta, tb) = (a.tx(), b.tx());
                ta.len().cmp(&tb.len()).then_with(|| ta.cmp(&tb))
            });
            LawFactor {
                node: node.clone(),
                given,
                with_time_share: time_share,
                deterministic: deterministic[i],
            }
        })
        .collect();

    EncodingGraph {
        nodes,
        edges,
        factors,
        time_share,
    }
}

fn dot_escape(s: &str) -> String {
    s.replace('"', "\\\"")
}

/// DOT rendering of a message graph; nodes named `M_{Δ}^{∇}`.
pub fn export_message_dot(graph: &MessageGraph) -> String {
    let mut out = String::from("digraph messages {\n  rankdir=RL;\n");
    for n in &graph.nodes {
        out.push_str(&format!("  \"{}\";\n", dot_escape(&n.render())));
    }
    for &(a, b) in &graph.edges {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            dot_escape(&graph.nodes[a].render()),
            dot_escape(&graph.nodes[b].render())
        ));
    }
    out.push_str("}\n");
    out
}

/// DOT rendering of an encoding graph; nodes named `W_{Δ}` or `X_i`.
pub fn export_encoding_dot(graph: &EncodingGraph) -> String {
    let mut out = String::from("digraph codewords {\n  rankdir=RL;\n");
    for n in &graph.nodes {
        out.push_str(&format!("  \"{}\";\n", dot_escape(&n.render())));
    }
    for &(a, b) in &graph.edges {
        out.push_str(&format!(
            "  \"{}\" -> \"{}\";\n",
            dot_escape(&graph.nodes[a].render()),
            dot_escape(&graph.nodes[b].render())
        ));
    }
    out.push_str("}\n");
    out
}
