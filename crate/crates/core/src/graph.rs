//! Simple undirected graphs read from edge-list text.
//!
//! Node names are arbitrary whitespace-free tokens. Internal ids are
//! contiguous `0..n` and assigned in order of first appearance; every
//! report translates ids back to names.

use std::collections::{BTreeSet, HashMap};
use std::fmt::Write as _;

use sha2::{Digest, Sha256};

use crate::error::{Error, Result};

#[derive(Debug, Clone)]
pub struct ParseOptions {
    /// Permit nodes without incident edges (only reachable through a node list).
    pub allow_isolated: bool,
    pub comment_prefix: char,
}

impl Default for ParseOptions {
    fn default() -> Self {
        Self {
            allow_isolated: false,
            comment_prefix: '#',
        }
    }
}

/// What the parser silently tolerated.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ParseDiagnostics {
    pub edge_lines: usize,
    pub duplicate_edges: usize,
    pub isolated_nodes: usize,
}

#[derive(Debug, Clone)]
pub struct Graph {
    adjacency: Vec<Vec<usize>>,
    edge_count: usize,
    names: Vec<String>,
    index: HashMap<String, usize>,
}

/// Two graphs are equal when they carry the same node names and the same
/// edges between those names, whatever internal ids were assigned.
impl PartialEq for Graph {
    fn eq(&self, other: &Self) -> bool {
        self.n() == other.n()
            && self.m() == other.m()
            && self.index.keys().all(|k| other.index.contains_key(k))
            && self.edges().all(|(i, j)| {
                let a = other.index[&self.names[i]];
                let b = other.index[&self.names[j]];
                other.adjacency[a].binary_search(&b).is_ok()
            })
    }
}

impl Eq for Graph {}

#[derive(Debug, Default)]
struct GraphBuilder {
    names: Vec<String>,
    index: HashMap<String, usize>,
    edges: BTreeSet<(usize, usize)>,
}

impl GraphBuilder {
    fn node(&mut self, name: &str) -> usize {
        if let Some(&id) = self.index.get(name) {
            return id;
        }
        let id = self.names.len();
        self.names.push(name.to_string());
        self.index.insert(name.to_string(), id);
        id
    }

    /// Returns false when the edge was already present.
    fn edge(&mut self, a: usize, b: usize) -> bool {
        self.edges.insert((a.min(b), a.max(b)))
    }

    fn build(self) -> Graph {
        let mut adjacency = vec![Vec::new(); self.names.len()];
        for &(a, b) in &self.edges {
            adjacency[a].push(b);
            adjacency[b].push(a);
        }
        for list in &mut adjacency {
            list.sort_unstable();
        }
        Graph {
            adjacency,
            edge_count: self.edges.len(),
            names: self.names,
            index: self.index,
        }
    }
}

fn is_skipped(line: &str, comment_prefix: char) -> bool {
    let trimmed = line.trim();
    trimmed.is_empty() || trimmed.starts_with(comment_prefix)
}

fn parse_into(
    builder: &mut GraphBuilder,
    text: &str,
    options: &ParseOptions,
    diagnostics: &mut ParseDiagnostics,
) -> Result<()> {
    for (lineno, line) in text.lines().enumerate() {
        if is_skipped(line, options.comment_prefix) {
            continue;
        }
        let line_number = lineno + 1;
        let tokens: Vec<&str> = line.split_whitespace().collect();
        if tokens.len() != 2 {
            return Err(Error::TokenCount {
                line: line_number,
                found: tokens.len(),
            });
        }
        if tokens[0] == tokens[1] {
            return Err(Error::SelfLoop {
                line: line_number,
                node: tokens[0].to_string(),
            });
        }
        let a = builder.node(tokens[0]);
        let b = builder.node(tokens[1]);
        diagnostics.edge_lines += 1;
        if !builder.edge(a, b) {
            diagnostics.duplicate_edges += 1;
        }
    }
    Ok(())
}

/// Parses an edge list. Duplicate edges (in either orientation) collapse to one.
pub fn parse_edge_list(text: &str, options: &ParseOptions) -> Result<Graph> {
    parse_edge_list_with_nodes(text, None, options).map(|(g, _)| g)
}

/// Parses an edge list plus an optional node-list sidecar. The first token of
/// each sidecar line names a node; nodes absent from the edge list are
/// appended after all edge-list nodes and are rejected unless
/// `allow_isolated` is set.
pub fn parse_edge_list_with_nodes(
    text: &str,
    node_list: Option<&str>,
    options: &ParseOptions,
) -> Result<(Graph, ParseDiagnostics)> {
    let mut builder = GraphBuilder::default();
    let mut diagnostics = ParseDiagnostics::default();
    parse_into(&mut builder, text, options, &mut diagnostics)?;

    if let Some(nodes) = node_list {
        for (lineno, line) in nodes.lines().enumerate() {
            if is_skipped(line, options.comment_prefix) {
                continue;
            }
            let name = line.split_whitespace().next().unwrap_or_default();
            if builder.index.contains_key(name) {
                continue;
            }
            if !options.allow_isolated {
                return Err(Error::IsolatedNode {
                    line: lineno + 1,
                    node: name.to_string(),
                });
            }
            builder.node(name);
            diagnostics.isolated_nodes += 1;
        }
    }
    Ok((builder.build(), diagnostics))
}

impl Graph {
    /// Builds a graph on nodes `0..n` named by their decimal id.
    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut builder = GraphBuilder::default();
        for i in 0..n {
            builder.node(&i.to_string());
        }
        for (a, b) in edges {
            for id in [a, b] {
                if id >= n {
                    return Err(Error::NodeOutOfRange { id, n });
                }
            }
            if a == b {
                return Err(Error::SelfLoop {
                    line: 0,
                    node: a.to_string(),
                });
            }
            builder.edge(a, b);
        }
        Ok(builder.build())
    }

    pub fn n(&self) -> usize {
        self.adjacency.len()
    }

    pub fn m(&self) -> usize {
        self.edge_count
    }

    pub fn neighbors(&self, i: usize) -> &[usize] {
        &self.adjacency[i]
    }

    pub fn degree(&self, i: usize) -> usize {
        self.adjacency[i].len()
    }

    pub fn degrees(&self) -> Vec<usize> {
        self.adjacency.iter().map(Vec::len).collect()
    }

    pub fn has_edge(&self, i: usize, j: usize) -> Result<bool> {
        let n = self.n();
        for id in [i, j] {
            if id >= n {
                return Err(Error::NodeOutOfRange { id, n });
            }
        }
        Ok(self.adjacency[i].binary_search(&j).is_ok())
    }

    pub fn name(&self, i: usize) -> &str {
        &self.names[i]
    }

    pub fn names(&self) -> &[String] {
        &self.names
    }

    pub fn id_of(&self, name: &str) -> Option<usize> {
        self.index.get(name).copied()
    }

    /// Edges as `(i, j)` with `i < j`, ordered by `i` then `j`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.adjacency
            .iter()
            .enumerate()
            .flat_map(|(i, list)| list.iter().filter(move |&&j| j > i).map(move |&j| (i, j)))
    }

    /// Edge-list text in internal id order.
    pub fn to_edge_list(&self) -> String {
        let mut out = String::new();
        for (i, j) in self.edges() {
            let _ = writeln!(out, "{} {}", self.names[i], self.names[j]);
        }
        out
    }

    /// Id-independent edge-list text: each edge written with its endpoint
    /// names in lexicographic order, lines sorted.
    pub fn canonical_edge_list(&self) -> String {
        let mut lines: Vec<(&str, &str)> = self
            .edges()
            .map(|(i, j)| {
                let (a, b) = (self.names[i].as_str(), self.names[j].as_str());
                if a <= b {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect();
        lines.sort_unstable();
        let mut out = String::new();
        for (a, b) in lines {
            let _ = writeln!(out, "{a} {b}");
        }
        out
    }

    /// Hex SHA-256 of [`Graph::canonical_edge_list`].
    pub fn canonical_hash(&self) -> String {
        hex::encode(Sha256::digest(self.canonical_edge_list().as_bytes()))
    }
}
