//! Self-inverting permutation <-> reducible permutation graph codec.
//!
//! Node `u_i` is identified with element `i` of the permutation. The header
//! `s` is node `n* + 1` and the footer `t` is node `0`. The forward spine
//! `s -> u_(n*) -> ... -> u_1 -> t` is implicit; each interior node also has one
//! back edge, stored densely per element.

use std::fmt::{self, Write as _};

use serde::{Deserialize, Serialize};

use crate::error::{DecodeFailure, GraphError};
use crate::sip::SelfInvertingPermutation;

/// Back-edge target per element, indexed `1..=n*`. Value `n* + 1` is `s`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BackEdgeMap {
    targets: Vec<usize>,
}

impl BackEdgeMap {
    pub fn n_star(&self) -> usize {
        self.targets.len()
    }

    pub fn target(&self, element: usize) -> usize {
        self.targets[element - 1]
    }

    /// Targets in element order `1..=n*`.
    pub fn as_slice(&self) -> &[usize] {
        &self.targets
    }
}

/// For every element, the nearest greater element to its left (`n* + 1` if none).
///
/// `perm` must be a permutation of `1..=perm.len()`.
pub fn dmax_map(perm: &[usize]) -> BackEdgeMap {
    let source = perm.len() + 1;
    let mut targets = vec![source; perm.len()];
    let mut stack: Vec<usize> = Vec::with_capacity(perm.len());
    for &e in perm {
        while stack.last().is_some_and(|&top| top < e) {
            stack.pop();
        }
        targets[e - 1] = stack.last().copied().unwrap_or(source);
        stack.push(e);
    }
    BackEdgeMap { targets }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct ReduciblePermutationGraph {
    back_edges: BackEdgeMap,
}

impl ReduciblePermutationGraph {
    /// Builds a graph from raw back-edge targets. Each target must name an
    /// existing node; orientation (`target > element`) is not enforced here so
    /// that tampered graphs can be represented and then classified.
    pub fn from_back_edges(targets: Vec<usize>) -> Result<Self, GraphError> {
        if targets.is_empty() {
            return Err(GraphError::Empty);
        }
        let max = targets.len() + 1;
        if let Some((idx, &target)) = targets.iter().enumerate().find(|(_, &t)| t > max) {
            return Err(GraphError::TargetOutOfRange {
                element: idx + 1,
                target,
                max,
            });
        }
        Ok(Self {
            back_edges: BackEdgeMap { targets },
        })
    }

    pub fn back_edges(&self) -> &BackEdgeMap {
        &self.back_edges
    }

    pub fn n_star(&self) -> usize {
        self.back_edges.n_star()
    }

    pub fn source(&self) -> usize {
        self.n_star() + 1
    }

    pub fn sink(&self) -> usize {
        0
    }

    pub fn node_count(&self) -> usize {
        self.n_star() + 2
    }

    /// Spine edges `u_i -> u_(i-1)` for `i = n*+1 ..= 1`.
    pub fn forward_edges(&self) -> impl Iterator<Item = (usize, usize)> {
        (1..=self.source()).rev().map(|i| (i, i - 1))
    }

    /// `(element, target)` for every interior node.
    pub fn back_edge_pairs(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.back_edges
            .as_slice()
            .iter()
            .enumerate()
            .map(|(idx, &t)| (idx + 1, t))
    }

    pub fn out_degree(&self, node: usize) -> usize {
        match node {
            0 => 0,
            n if n == self.source() => 1,
            _ => 2,
        }
    }

    pub fn successors(&self, node: usize) -> Vec<usize> {
        match node {
            0 => vec![],
            n if n == self.source() => vec![n - 1],
            n => vec![n - 1, self.back_edges.target(n)],
        }
    }

    /// First element whose back edge does not point strictly upward.
    pub fn first_misoriented(&self) -> Option<(usize, usize)> {
        self.back_edge_pairs().find(|&(i, t)| t <= i)
    }

    pub fn with_back_edges(&self, targets: Vec<usize>) -> Result<Self, GraphError> {
        if targets.len() != self.n_star() {
            return Err(GraphError::SizeMismatch {
                left: self.n_star(),
                right: targets.len(),
            });
        }
        Self::from_back_edges(targets)
    }
}

pub fn encode_sip_to_rpg(sip: &SelfInvertingPermutation) -> ReduciblePermutationGraph {
    ReduciblePermutationGraph {
        back_edges: dmax_map(sip.elements()),
    }
}

/// Preorder of the back-edge forest rooted at `s`, visiting children in
/// ascending order. This inverts [`dmax_map`] for any permutation, not only
/// self-inverting ones. Fails when some back edge does not point upward.
pub fn rebuild_permutation(g: &ReduciblePermutationGraph) -> Result<Vec<usize>, DecodeFailure> {
    if let Some((element, target)) = g.first_misoriented() {
        return Err(DecodeFailure::BackEdgeOrientation { element, target });
    }
    let root = g.source();
    let mut children: Vec<Vec<usize>> = vec![Vec::new(); root + 1];
    for (i, t) in g.back_edge_pairs() {
        children[t].push(i);
    }
    let mut order = Vec::with_capacity(g.n_star());
    let mut stack: Vec<usize> = children[root].iter().rev().copied().collect();
    while let Some(node) = stack.pop() {
        order.push(node);
        stack.extend(children[node].iter().rev());
    }
    Ok(order)
}

pub fn decode_rpg_to_sip(
    g: &ReduciblePermutationGraph,
) -> Result<SelfInvertingPermutation, GraphError> {
    let order = rebuild_permutation(g).map_err(GraphError::FalseIncorrectGraph)?;
    let rebuilt = dmax_map(&order);
    if let Some(element) = (1..=g.n_star()).find(|&i| rebuilt.target(i) != g.back_edges.target(i)) {
        return Err(GraphError::FalseIncorrectGraph(
            DecodeFailure::DominationMismatch { element },
        ));
    }
    SelfInvertingPermutation::new(order)
        .map_err(|e| GraphError::FalseIncorrectGraph(DecodeFailure::Sip(e)))
}

/// Number of interior nodes whose back edge differs between the two graphs.
pub fn graph_distance(
    a: &ReduciblePermutationGraph,
    b: &ReduciblePermutationGraph,
) -> Result<usize, GraphError> {
    if a.n_star() != b.n_star() {
        return Err(GraphError::SizeMismatch {
            left: a.n_star(),
            right: b.n_star(),
        });
    }
    Ok(a.back_edges
        .as_slice()
        .iter()
        .zip(b.back_edges.as_slice())
        .filter(|(x, y)| x != y)
        .count())
}

/// Outcome of the dominator check on every back edge.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ReducibilityReport {
    /// `idom[v]` for every node (the entry maps to itself).
    pub immediate_dominators: Vec<usize>,
    /// `(source, target)` back edges whose target does not dominate the source.
    pub offending: Vec<(usize, usize)>,
}

impl ReducibilityReport {
    pub fn passed(&self) -> bool {
        self.offending.is_empty()
    }
}

/// Computes dominators from `s` and checks that every back edge `u_i -> u_m`
/// has `u_m` dominating `u_i`.
pub fn check_reducibility(g: &ReduciblePermutationGraph) -> ReducibilityReport {
    let idom = immediate_dominators(g);
    let offending = g
        .back_edge_pairs()
        .filter(|&(i, t)| !dominates(&idom, g.source(), t, i))
        .collect();
    ReducibilityReport {
        immediate_dominators: idom,
        offending,
    }
}

fn dominates(idom: &[usize], entry: usize, a: usize, mut b: usize) -> bool {
    loop {
        if a == b {
            return true;
        }
        if b == entry {
            return false;
        }
        b = idom[b];
    }
}

// Iterative dataflow over reverse postorder (Cooper, Harvey, Kennedy).
fn immediate_dominators(g: &ReduciblePermutationGraph) -> Vec<usize> {
    const UNDEF: usize = usize::MAX;
    let entry = g.source();
    let count = g.node_count();

    let mut postorder = Vec::with_capacity(count);
    let mut visited = vec![false; count];
    let mut stack = vec![(entry, 0usize)];
    visited[entry] = true;
    while let Some((node, next)) = stack.pop() {
        let succ = g.successors(node);
        if next < succ.len() {
            stack.push((node, next + 1));
            let s = succ[next];
            if !visited[s] {
                visited[s] = true;
                stack.push((s, 0));
            }
        } else {
            postorder.push(node);
        }
    }
    let mut rank = vec![UNDEF; count];
    for (i, &v) in postorder.iter().enumerate() {
        rank[v] = i;
    }
    let mut preds: Vec<Vec<usize>> = vec![Vec::new(); count];
    for v in 0..count {
        for s in g.successors(v) {
            preds[s].push(v);
        }
    }

    let mut idom = vec![UNDEF; count];
    idom[entry] = entry;
    let mut changed = true;
    while changed {
        changed = false;
        for &v in postorder.iter().rev().filter(|&&v| v != entry) {
            let mut new_idom = UNDEF;
            for &p in preds[v].iter().filter(|&&p| idom[p] != UNDEF) {
                new_idom = if new_idom == UNDEF {
                    p
                } else {
                    intersect(&idom, &rank, p, new_idom)
                };
            }
            if new_idom != idom[v] {
                idom[v] = new_idom;
                changed = true;
            }
        }
    }
    idom
}

fn intersect(idom: &[usize], rank: &[usize], mut a: usize, mut b: usize) -> usize {
    while a != b {
        while rank[a] < rank[b] {
            a = idom[a];
        }
        while rank[b] < rank[a] {
            b = idom[b];
        }
    }
    a
}

/// Canonical on-disk representation, version 1.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GraphFile {
    pub version: u64,
    pub n: usize,
    pub nstar: usize,
    pub back_edges: Vec<usize>,
}

pub const GRAPH_FILE_VERSION: u64 = 1;

impl GraphFile {
    pub fn from_graph(g: &ReduciblePermutationGraph) -> Result<Self, GraphError> {
        if g.n_star().is_multiple_of(2) {
            return Err(GraphError::Format(format!(
                "nstar {} is even and has no bit-length",
                g.n_star()
            )));
        }
        Ok(Self {
            version: GRAPH_FILE_VERSION,
            n: (g.n_star() - 1) / 2,
            nstar: g.n_star(),
            back_edges: g.back_edges.as_slice().to_vec(),
        })
    }

    pub fn into_graph(self) -> Result<ReduciblePermutationGraph, GraphError> {
        if self.version != GRAPH_FILE_VERSION {
            return Err(GraphError::UnsupportedVersion(self.version));
        }
        if self.nstar != 2 * self.n + 1 {
            return Err(GraphError::Format(format!(
                "nstar {} does not equal 2n+1 for n={}",
                self.nstar, self.n
            )));
        }
        if self.back_edges.len() != self.nstar {
            return Err(GraphError::Format(format!(
                "expected {} back edges, found {}",
                self.nstar,
                self.back_edges.len()
            )));
        }
        ReduciblePermutationGraph::from_back_edges(self.back_edges)
    }
}

/// Serializes to the canonical single-line JSON form, newline terminated.
pub fn to_json(g: &ReduciblePermutationGraph) -> Result<String, GraphError> {
    let file = GraphFile::from_graph(g)?;
    let mut out = serde_json::to_string(&file).map_err(|e| GraphError::Format(e.to_string()))?;
    out.push('\n');
    Ok(out)
}

pub fn from_json(text: &str) -> Result<ReduciblePermutationGraph, GraphError> {
    let raw: serde_json::Value =
        serde_json::from_str(text).map_err(|e| GraphError::Format(e.to_string()))?;
    // Reject unknown versions before the rest of the schema.
    match raw.get("version").and_then(|v| v.as_u64()) {
        Some(GRAPH_FILE_VERSION) => {}
        Some(other) => return Err(GraphError::UnsupportedVersion(other)),
        None => return Err(GraphError::Format("missing integer field `version`".into())),
    }
    let file: GraphFile =
        serde_json::from_value(raw).map_err(|e| GraphError::Format(e.to_string()))?;
    file.into_graph()
}

fn node_label(g: &ReduciblePermutationGraph, node: usize) -> String {
    match node {
        0 => "t".to_owned(),
        n if n == g.source() => "s".to_owned(),
        n => format!("u{n}"),
    }
}

/// Graphviz rendering: spine edges solid, back edges dashed.
pub fn to_dot(g: &ReduciblePermutationGraph) -> String {
    let mut out = String::from("digraph rpg {\n");
    for node in (0..=g.source()).rev() {
        let _ = writeln!(out, "    {};", node_label(g, node));
    }
    for (from, to) in g.forward_edges() {
        let _ = writeln!(out, "    {} -> {};", node_label(g, from), node_label(g, to));
    }
    for (from, to) in g.back_edge_pairs().collect::<Vec<_>>().into_iter().rev() {
        let _ = writeln!(
            out,
            "    {} -> {} [style=dashed];",
            node_label(g, from),
            node_label(g, to)
        );
    }
    out.push_str("}\n");
    out
}

impl fmt::Display for BackEdgeMap {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = self.n_star() + 1;
        for (idx, &t) in self.targets.iter().enumerate() {
            if idx > 0 {
                f.write_char(' ')?;
            }
            if t == s {
                write!(f, "{}:s", idx + 1)?;
            } else {
                write!(f, "{}:{}", idx + 1, t)?;
            }
        }
        Ok(())
    }
}
