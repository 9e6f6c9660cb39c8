//! Weighted graphs `(G⁰, G¹, c)` with a pinned base vertex, axiom validation,
//! the concrete model families, and the line-oriented text format.
//!
//! Vertices are dense indices `0..V`. Each unordered edge is stored once with
//! its conductance; the vertex weight `c(x) = Σ_{y∼x} c(x,y)` is derived, never
//! stored as a self-loop.

use std::collections::{BTreeMap, VecDeque};
use std::fmt::Write as _;
use std::io::BufRead;

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum ModelFamily {
    /// `{0, 1, …, N}` with `c(n-1, n) = Mⁿ`.
    HalfLineGeom,
    /// `{-N, …, N}` with `c(x-1, x) = c(-x, -x+1) = M^|x|`.
    LineGeomSym,
    /// `{-N, …, N}` with `Aⁿ` on the right and `Bⁿ` on the left.
    LineAb,
    /// Binary words of length `≤ N`, constant conductance.
    DyadicTree,
    Custom,
}

impl ModelFamily {
    pub fn name(self) -> &'static str {
        match self {
            ModelFamily::HalfLineGeom => "half-line",
            ModelFamily::LineGeomSym => "sym-line",
            ModelFamily::LineAb => "ab-line",
            ModelFamily::DyadicTree => "dyadic-tree",
            ModelFamily::Custom => "custom",
        }
    }
}

/// How the truncation frontier is treated by solves that care.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum BoundaryPolicy {
    /// The frontier equation simply lacks its outward edges.
    #[default]
    Free,
    /// Frontier values are pinned (Dirichlet).
    Absorbing,
}

/// Parameters of one of the model families plus truncation depth.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    pub family: ModelFamily,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub m: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub a: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub b: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub conductance: Option<f64>,
    pub depth: usize,
}

impl ModelSpec {
    pub fn half_line(m: f64, depth: usize) -> Self {
        ModelSpec {
            family: ModelFamily::HalfLineGeom,
            m: Some(m),
            a: None,
            b: None,
            conductance: None,
            depth,
        }
    }

    pub fn sym_line(m: f64, depth: usize) -> Self {
        ModelSpec {
            family: ModelFamily::LineGeomSym,
            ..ModelSpec::half_line(m, depth)
        }
    }

    pub fn ab_line(a: f64, b: f64, depth: usize) -> Self {
        ModelSpec {
            family: ModelFamily::LineAb,
            m: None,
            a: Some(a),
            b: Some(b),
            conductance: None,
            depth,
        }
    }

    pub fn dyadic_tree(conductance: f64, depth: usize) -> Self {
        ModelSpec {
            family: ModelFamily::DyadicTree,
            m: None,
            a: None,
            b: None,
            conductance: Some(conductance),
            depth,
        }
    }

    fn require(value: Option<f64>, name: &str) -> Result<f64> {
        value.ok_or_else(|| Error::InvalidParameter(format!("missing parameter {name}")))
    }

    /// Builds the truncated graph for this spec.
    pub fn build(&self) -> Result<WeightedGraph> {
        match self.family {
            ModelFamily::HalfLineGeom => build_half_line(Self::require(self.m, "M")?, self.depth),
            ModelFamily::LineGeomSym => build_sym_line(Self::require(self.m, "M")?, self.depth),
            ModelFamily::LineAb => build_ab_line(
                Self::require(self.a, "A")?,
                Self::require(self.b, "B")?,
                self.depth,
            ),
            ModelFamily::DyadicTree => {
                build_dyadic_tree(Self::require(self.conductance, "c")?, self.depth)
            }
            ModelFamily::Custom => Err(Error::UnsupportedFamily(
                "custom graphs have no constructor".into(),
            )),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Truncation {
    pub spec: ModelSpec,
    pub policy: BoundaryPolicy,
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub x: usize,
    pub y: usize,
    pub c: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "axiom", rename_all = "kebab-case")]
pub enum Violation {
    Symmetry { x: usize, y: usize, c_xy: f64, c_yx: f64 },
    SelfLoop { x: usize },
    FiniteNeighborhood { x: usize },
    Connectivity { unreachable: Vec<usize> },
    Positivity { x: usize, y: usize, c: f64 },
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct WeightedGraph {
    labels: Vec<Option<String>>,
    edges: Vec<Edge>,
    adjacency: Vec<Vec<(usize, f64)>>,
    base: usize,
    frontier: Vec<bool>,
    truncation: Option<Truncation>,
    conflicts: Vec<(usize, usize, f64, f64)>,
}

impl WeightedGraph {
    /// Builds a graph from raw `(x, y, c)` entries.
    ///
    /// Indices must be in range (otherwise [`Error::Structure`]). Entries that
    /// name the same unordered pair are merged; disagreeing conductances are
    /// kept as a symmetry violation for [`WeightedGraph::validate`].
    pub fn from_edges<I>(vertex_count: usize, base: usize, raw: I) -> Result<Self>
    where
        I: IntoIterator<Item = (usize, usize, f64)>,
    {
        if vertex_count == 0 {
            return Err(Error::Structure("graph has no vertices".into()));
        }
        if base >= vertex_count {
            return Err(Error::Structure(format!(
                "base vertex {base} out of range 0..{vertex_count}"
            )));
        }
        let mut merged: BTreeMap<(usize, usize), f64> = BTreeMap::new();
        let mut conflicts = Vec::new();
        for (x, y, c) in raw {
            if x >= vertex_count || y >= vertex_count {
                return Err(Error::Structure(format!(
                    "edge ({x}, {y}) out of range 0..{vertex_count}"
                )));
            }
            let key = (x.min(y), x.max(y));
            match merged.get(&key) {
                Some(&prev) if prev.to_bits() != c.to_bits() => conflicts.push((x, y, prev, c)),
                Some(_) => {}
                None => {
                    merged.insert(key, c);
                }
            }
        }
        let edges: Vec<Edge> = merged.into_iter().map(|((x, y), c)| Edge { x, y, c }).collect();
        let mut adjacency = vec![Vec::new(); vertex_count];
        for e in &edges {
            if e.x != e.y {
                adjacency[e.x].push((e.y, e.c));
                adjacency[e.y].push((e.x, e.c));
            }
        }
        for list in &mut adjacency {
            list.sort_by_key(|&(y, _)| y);
        }
        Ok(WeightedGraph {
            labels: vec![None; vertex_count],
            edges,
            adjacency,
            base,
            frontier: vec![false; vertex_count],
            truncation: None,
            conflicts,
        })
    }

    pub fn vertex_count(&self) -> usize {
        self.adjacency.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn base(&self) -> usize {
        self.base
    }

    pub fn neighbors(&self, x: usize) -> &[(usize, f64)] {
        &self.adjacency[x]
    }

    pub fn conductance(&self, x: usize, y: usize) -> Option<f64> {
        self.adjacency[x]
            .binary_search_by_key(&y, |&(z, _)| z)
            .ok()
            .map(|i| self.adjacency[x][i].1)
    }

    /// `c(x) = Σ_{y∼x} c(x, y)` by neighbor scan.
    pub fn vertex_weight(&self, x: usize) -> f64 {
        self.adjacency[x].iter().map(|&(_, c)| c).sum()
    }

    /// All vertex weights by a single scan over the edge list.
    pub fn vertex_weights_by_edges(&self) -> Vec<f64> {
        let mut w = vec![0.0; self.vertex_count()];
        for e in &self.edges {
            if e.x != e.y {
                w[e.x] += e.c;
                w[e.y] += e.c;
            }
        }
        w
    }

    pub fn label(&self, x: usize) -> Option<&str> {
        self.labels[x].as_deref()
    }

    pub fn set_label(&mut self, x: usize, label: impl Into<String>) {
        self.labels[x] = Some(label.into());
    }

    pub fn find_label(&self, label: &str) -> Option<usize> {
        self.labels.iter().position(|l| l.as_deref() == Some(label))
    }

    pub fn truncation(&self) -> Option<&Truncation> {
        self.truncation.as_ref()
    }

    pub fn set_policy(&mut self, policy: BoundaryPolicy) {
        if let Some(t) = self.truncation.as_mut() {
            t.policy = policy;
        }
    }

    pub fn mark_frontier(&mut self, x: usize) {
        self.frontier[x] = true;
    }

    /// Frontier vertices are those whose infinite-graph neighborhood was cut.
    pub fn is_frontier(&self, x: usize) -> bool {
        self.frontier[x]
    }

    pub fn is_interior(&self, x: usize) -> bool {
        !self.frontier[x]
    }

    pub fn interior_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&x| self.is_interior(x))
    }

    pub fn frontier_vertices(&self) -> impl Iterator<Item = usize> + '_ {
        (0..self.vertex_count()).filter(|&x| self.is_frontier(x))
    }

    /// Interior vertices all of whose neighbors are interior as well. Functions
    /// supported here have a Laplacian that the truncation computes correctly.
    pub fn deep_interior(&self, x: usize) -> bool {
        self.is_interior(x) && self.adjacency[x].iter().all(|&(y, _)| self.is_interior(y))
    }

    /// Graph distance from the base vertex (`None` when unreachable).
    pub fn depths(&self) -> Vec<Option<usize>> {
        let mut depth = vec![None; self.vertex_count()];
        let mut queue = VecDeque::new();
        depth[self.base] = Some(0);
        queue.push_back(self.base);
        while let Some(x) = queue.pop_front() {
            let d = depth[x].unwrap_or(0);
            for &(y, _) in &self.adjacency[x] {
                if depth[y].is_none() {
                    depth[y] = Some(d + 1);
                    queue.push_back(y);
                }
            }
        }
        depth
    }

    /// Vertex index of integer position `x` on the line models.
    pub fn line_index(&self, x: i64) -> Option<usize> {
        let t = self.truncation.as_ref()?;
        let n = t.spec.depth as i64;
        let idx = match t.spec.family {
            ModelFamily::HalfLineGeom => x,
            ModelFamily::LineGeomSym | ModelFamily::LineAb => x + n,
            _ => return None,
        };
        (0..self.vertex_count() as i64)
            .contains(&idx)
            .then_some(idx as usize)
    }

    /// Checks the four graph axioms plus strict positivity.
    pub fn validate(&self) -> ValidationReport {
        let mut violations = Vec::new();
        for &(x, y, c_xy, c_yx) in &self.conflicts {
            violations.push(Violation::Symmetry { x, y, c_xy, c_yx });
        }
        for e in &self.edges {
            if e.x == e.y {
                violations.push(Violation::SelfLoop { x: e.x });
            }
            if !(e.c > 0.0) {
                violations.push(Violation::Positivity { x: e.x, y: e.y, c: e.c });
            }
        }
        for x in 0..self.vertex_count() {
            if !self.vertex_weight(x).is_finite() {
                violations.push(Violation::FiniteNeighborhood { x });
            }
        }
        let unreachable: Vec<usize> = self
            .depths()
            .iter()
            .enumerate()
            .filter_map(|(x, d)| d.is_none().then_some(x))
            .collect();
        if !unreachable.is_empty() {
            violations.push(Violation::Connectivity { unreachable });
        }
        ValidationReport { violations }
    }

    /// Induced subgraph on `keep` (indices renumbered in order), base carried over.
    pub fn induced(&self, keep: &[usize]) -> Result<WeightedGraph> {
        let mut index = vec![usize::MAX; self.vertex_count()];
        for (i, &x) in keep.iter().enumerate() {
            index[x] = i;
        }
        if index[self.base] == usize::MAX {
            return Err(Error::Structure("induced subgraph drops the base vertex".into()));
        }
        let edges = self.edges.iter().filter_map(|e| {
            let (a, b) = (index[e.x], index[e.y]);
            (a != usize::MAX && b != usize::MAX).then_some((a, b, e.c))
        });
        let mut g = WeightedGraph::from_edges(keep.len(), index[self.base], edges)?;
        for (i, &x) in keep.iter().enumerate() {
            g.labels[i] = self.labels[x].clone();
        }
        Ok(g)
    }

    /// Serializes to the line format (`graph`, `edge`, `label`, `frontier` lines).
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        let _ = writeln!(out, "graph {} {} {}", self.vertex_count(), self.edge_count(), self.base);
        for e in &self.edges {
            let _ = writeln!(out, "edge {} {} {:?}", e.x, e.y, e.c);
        }
        for (x, label) in self.labels.iter().enumerate() {
            if let Some(l) = label {
                let _ = writeln!(out, "label {x} {l}");
            }
        }
        for x in self.frontier_vertices() {
            let _ = writeln!(out, "frontier {x}");
        }
        out
    }

    pub fn from_text(text: &str) -> Result<WeightedGraph> {
        Self::read(text.as_bytes())
    }

    pub fn read<R: BufRead>(reader: R) -> Result<WeightedGraph> {
        let parse_err = |line: usize, message: String| Error::Parse { line, message };
        let mut header: Option<(usize, usize, usize)> = None;
        let mut edges = Vec::new();
        let mut labels = Vec::new();
        let mut frontier = Vec::new();
        for (i, line) in reader.lines().enumerate() {
            let line = line?;
            let lineno = i + 1;
            let trimmed = line.trim();
            if trimmed.is_empty() || trimmed.starts_with('#') {
                continue;
            }
            let mut parts = trimmed.splitn(2, char::is_whitespace);
            let keyword = parts.next().unwrap_or_default();
            let rest = parts.next().unwrap_or_default().trim();
            let fields: Vec<&str> = rest.split_whitespace().collect();
            let int = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| parse_err(lineno, format!("bad integer {s:?}: {e}")))
            };
            match keyword {
                "graph" => {
                    if fields.len() != 3 {
                        return Err(parse_err(lineno, "expected `graph <V> <E> <base>`".into()));
                    }
                    header = Some((int(fields[0])?, int(fields[1])?, int(fields[2])?));
                }
                "edge" => {
                    if fields.len() != 3 {
                        return Err(parse_err(lineno, "expected `edge <x> <y> <c>`".into()));
                    }
                    let c = fields[2]
                        .parse::<f64>()
                        .map_err(|e| parse_err(lineno, format!("bad conductance: {e}")))?;
                    edges.push((int(fields[0])?, int(fields[1])?, c));
                }
                "label" => {
                    let mut lp = rest.splitn(2, char::is_whitespace);
                    let x = int(lp.next().unwrap_or_default())?;
                    let l = lp.next().unwrap_or_default().trim().to_string();
                    labels.push((x, l));
                }
                "frontier" => {
                    for f in fields {
                        frontier.push(int(f)?);
                    }
                }
                other => return Err(parse_err(lineno, format!("unknown record {other:?}"))),
            }
        }
        let (v, e, base) = header.ok_or_else(|| parse_err(0, "missing `graph` header".into()))?;
        if edges.len() != e {
            return Err(parse_err(0, format!("header declares {e} edges, found {}", edges.len())));
        }
        let mut g = WeightedGraph::from_edges(v, base, edges)?;
        for (x, l) in labels {
            if x >= v {
                return Err(Error::VertexOutOfRange { vertex: x, len: v });
            }
            g.set_label(x, l);
        }
        for x in frontier {
            if x >= v {
                return Err(Error::VertexOutOfRange { vertex: x, len: v });
            }
            g.mark_frontier(x);
        }
        Ok(g)
    }
}

fn check_geometric(name: &str, value: f64) -> Result<()> {
    if !(value > 1.0) || !value.is_finite() {
        return Err(Error::InvalidParameter(format!("{name} must be a finite real > 1, got {value}")));
    }
    Ok(())
}

fn check_depth(depth: usize, min: usize) -> Result<()> {
    if depth < min {
        return Err(Error::InvalidParameter(format!("truncation depth must be >= {min}, got {depth}")));
    }
    Ok(())
}

fn with_truncation(mut g: WeightedGraph, spec: ModelSpec) -> WeightedGraph {
    g.truncation = Some(Truncation {
        spec,
        policy: BoundaryPolicy::Free,
    });
    g
}

/// Half-line `{0..N}` with `c(n-1, n) = Mⁿ`, base 0, frontier `{N}`.
pub fn build_half_line(m: f64, depth: usize) -> Result<WeightedGraph> {
    check_geometric("M", m)?;
    check_depth(depth, 2)?;
    let edges = (1..=depth).map(|n| (n - 1, n, m.powi(n as i32)));
    let mut g = WeightedGraph::from_edges(depth + 1, 0, edges)?;
    for x in 0..=depth {
        g.set_label(x, x.to_string());
    }
    g.mark_frontier(depth);
    Ok(with_truncation(g, ModelSpec::half_line(m, depth)))
}

fn two_sided_line(right: f64, left: f64, depth: usize, spec: ModelSpec) -> Result<WeightedGraph> {
    let idx = |x: i64| (x + depth as i64) as usize;
    let mut edges = Vec::with_capacity(2 * depth);
    for n in 1..=depth as i64 {
        edges.push((idx(n - 1), idx(n), right.powi(n as i32)));
        edges.push((idx(-n), idx(-n + 1), left.powi(n as i32)));
    }
    let mut g = WeightedGraph::from_edges(2 * depth + 1, idx(0), edges)?;
    for x in -(depth as i64)..=depth as i64 {
        g.set_label(idx(x), x.to_string());
    }
    g.mark_frontier(idx(-(depth as i64)));
    g.mark_frontier(idx(depth as i64));
    Ok(with_truncation(g, spec))
}

/// Symmetric geometric line `{-N..N}`; vertex `x` has index `x + N`.
pub fn build_sym_line(m: f64, depth: usize) -> Result<WeightedGraph> {
    check_geometric("M", m)?;
    check_depth(depth, 2)?;
    two_sided_line(m, m, depth, ModelSpec::sym_line(m, depth))
}

/// Line `{-N..N}` with `c(n-1, n) = Aⁿ` and `c(-n, -n+1) = Bⁿ`.
pub fn build_ab_line(a: f64, b: f64, depth: usize) -> Result<WeightedGraph> {
    check_geometric("A", a)?;
    check_geometric("B", b)?;
    check_depth(depth, 2)?;
    two_sided_line(a, b, depth, ModelSpec::ab_line(a, b, depth))
}

/// Bit-word label of heap index `i` (root is the empty word `∅`).
pub fn tree_word(mut i: usize) -> String {
    if i == 0 {
        return "∅".to_string();
    }
    let mut bits = Vec::new();
    while i > 0 {
        bits.push(if i % 2 == 1 { '0' } else { '1' });
        i = (i - 1) / 2;
    }
    bits.iter().rev().collect()
}

/// Depth (word length) of heap index `i`.
pub fn tree_depth(i: usize) -> usize {
    (usize::BITS - 1 - (i + 1).leading_zeros()) as usize
}

/// Dyadic tree of all bit-words of length `≤ N`, stored in heap order:
/// `x0` is `2i+1` and `x1` is `2i+2`.
/// Deepest tree that [`build_dyadic_tree`] will materialize (about 4M vertices).
pub const MAX_TREE_DEPTH: usize = 21;

pub fn build_dyadic_tree(conductance: f64, depth: usize) -> Result<WeightedGraph> {
    if !(conductance > 0.0) || !conductance.is_finite() {
        return Err(Error::InvalidParameter(format!(
            "tree conductance must be a finite real > 0, got {conductance}"
        )));
    }
    check_depth(depth, 1)?;
    if depth > MAX_TREE_DEPTH {
        return Err(Error::InvalidParameter(format!(
            "tree depth {depth} exceeds the supported maximum {MAX_TREE_DEPTH}"
        )));
    }
    let count = (1usize << (depth + 1)) - 1;
    let edges = (1..count).map(|i| ((i - 1) / 2, i, conductance));
    let mut g = WeightedGraph::from_edges(count, 0, edges)?;
    for i in 0..count {
        g.set_label(i, tree_word(i));
        if tree_depth(i) == depth {
            g.mark_frontier(i);
        }
    }
    Ok(with_truncation(g, ModelSpec::dyadic_tree(conductance, depth)))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> WeightedGraph {
        WeightedGraph::from_edges(3, 0, [(0, 1, 1.0), (1, 2, 1.0)]).unwrap()
    }

    #[test]
    fn path_is_valid() {
        assert!(path3().validate().is_valid());
    }

    #[test]
    fn disjoint_edges_violate_connectivity() {
        let g = WeightedGraph::from_edges(4, 0, [(0, 1, 1.0), (2, 3, 1.0)]).unwrap();
        let report = g.validate();
        assert_eq!(
            report.violations,
            vec![Violation::Connectivity { unreachable: vec![2, 3] }]
        );
    }

    #[test]
    fn zero_conductance_violates_positivity() {
        let g = WeightedGraph::from_edges(2, 0, [(0, 1, 0.0)]).unwrap();
        assert!(g
            .validate()
            .violations
            .iter()
            .any(|v| matches!(v, Violation::Positivity { .. })));
    }

    #[test]
    fn self_loop_and_asymmetry_are_reported() {
        let g = WeightedGraph::from_edges(2, 0, [(0, 1, 1.0), (1, 0, 2.0), (1, 1, 1.0)]).unwrap();
        let v = g.validate().violations;
        assert!(v.iter().any(|v| matches!(v, Violation::Symmetry { .. })));
        assert!(v.iter().any(|v| matches!(v, Violation::SelfLoop { x: 1 })));
    }

    #[test]
    fn out_of_range_index_is_structural() {
        assert!(matches!(
            WeightedGraph::from_edges(2, 0, [(0, 5, 1.0)]),
            Err(Error::Structure(_))
        ));
    }

    #[test]
    fn half_line_conductances() {
        let g = build_half_line(2.0, 3).unwrap();
        assert_eq!(g.conductance(0, 1), Some(2.0));
        assert_eq!(g.conductance(1, 2), Some(4.0));
        assert_eq!(g.conductance(2, 3), Some(8.0));
        let g2 = build_half_line(2.0, 2).unwrap();
        assert_eq!(g2.vertex_weight(1), 6.0);
        assert!(build_half_line(1.0, 3).is_err());
        assert!(build_half_line(2.0, 1).is_err());
    }

    #[test]
    fn sym_line_conductances() {
        let g = build_sym_line(2.0, 2).unwrap();
        let i = |x| g.line_index(x).unwrap();
        assert_eq!(g.conductance(i(-1), i(0)), Some(2.0));
        assert_eq!(g.conductance(i(0), i(1)), Some(2.0));
        assert_eq!(g.conductance(i(-2), i(-1)), Some(4.0));
        assert_eq!(g.conductance(i(1), i(2)), Some(4.0));
        let g = build_sym_line(3.0, 4).unwrap();
        assert!(g.validate().is_valid());
        let i = |x| g.line_index(x).unwrap();
        for x in 0..4 {
            assert_eq!(g.conductance(i(-x - 1), i(-x)), g.conductance(i(x), i(x + 1)));
        }
    }

    #[test]
    fn ab_line_conductances_and_degeneration() {
        let g = build_ab_line(2.0, 3.0, 2).unwrap();
        let i = |x| g.line_index(x).unwrap();
        assert_eq!(g.conductance(i(0), i(1)), Some(2.0));
        assert_eq!(g.conductance(i(1), i(2)), Some(4.0));
        assert_eq!(g.conductance(i(-1), i(0)), Some(3.0));
        assert_eq!(g.conductance(i(-2), i(-1)), Some(9.0));
        assert_eq!(
            g.conductance(i(0), i(1)).unwrap() / g.vertex_weight(i(0)),
            2.0 / 5.0
        );
        let ab = build_ab_line(2.5, 2.5, 5).unwrap();
        let sym = build_sym_line(2.5, 5).unwrap();
        assert_eq!(ab.edges(), sym.edges());
        assert!(build_ab_line(2.0, 1.0, 3).is_err());
    }

    #[test]
    fn dyadic_tree_shape() {
        let g = build_dyadic_tree(1.0, 2).unwrap();
        assert_eq!(g.vertex_count(), 7);
        assert_eq!(g.edge_count(), 6);
        let root_nbh: Vec<&str> = g.neighbors(0).iter().map(|&(y, _)| g.label(y).unwrap()).collect();
        assert_eq!(root_nbh, vec!["0", "1"]);
        let words: Vec<String> = (0..7).map(tree_word).collect();
        assert_eq!(words, ["∅", "0", "1", "00", "01", "10", "11"]);
        let g = build_dyadic_tree(1.0, 5).unwrap();
        for x in 1..g.vertex_count() {
            if tree_depth(x) < 5 {
                assert_eq!(g.neighbors(x).len(), 3);
            }
        }
    }

    #[test]
    fn constructed_models_are_valid_with_expected_counts() {
        for n in 2..8 {
            let h = build_half_line(1.7, n).unwrap();
            assert_eq!((h.vertex_count(), h.edge_count()), (n + 1, n));
            let s = build_sym_line(1.7, n).unwrap();
            assert_eq!((s.vertex_count(), s.edge_count()), (2 * n + 1, 2 * n));
            let ab = build_ab_line(1.2, 3.0, n).unwrap();
            let t = build_dyadic_tree(0.5, n).unwrap();
            assert_eq!(t.vertex_count(), (1 << (n + 1)) - 1);
            assert_eq!(t.edge_count(), (1 << (n + 1)) - 2);
            for g in [&h, &s, &ab, &t] {
                assert!(g.validate().is_valid());
                let by_edges = g.vertex_weights_by_edges();
                for (x, w) in by_edges.iter().enumerate() {
                    assert_eq!(*w, g.vertex_weight(x));
                }
            }
        }
    }

    #[test]
    fn half_line_truncation_is_monotone() {
        let small = build_half_line(2.0, 6).unwrap();
        let big = build_half_line(2.0, 7).unwrap();
        let keep: Vec<usize> = (0..=6).collect();
        let induced = big.induced(&keep).unwrap();
        assert_eq!(induced.edges(), small.edges());
    }

    #[test]
    fn text_format_round_trip() {
        let g = build_dyadic_tree(0.3, 3).unwrap();
        let text = g.to_text();
        assert!(text.starts_with("graph 15 14 0\n"));
        let back = WeightedGraph::from_text(&text).unwrap();
        assert_eq!(back.edges(), g.edges());
        assert_eq!(back.label(4), Some("01"));
        assert!(back.is_frontier(14));
        let g = build_half_line(1.1, 30).unwrap();
        let back = WeightedGraph::from_text(&g.to_text()).unwrap();
        for (a, b) in back.edges().iter().zip(g.edges()) {
            assert_eq!(a.c.to_bits(), b.c.to_bits());
        }
    }

    #[test]
    fn text_format_rejects_bad_input() {
        assert!(WeightedGraph::from_text("edge 0 1 1.0\n").is_err());
        assert!(WeightedGraph::from_text("graph 2 2 0\nedge 0 1 1\n").is_err());
        assert!(WeightedGraph::from_text("graph 2 1 0\nedge 0 1 abc\n").is_err());
        assert!(WeightedGraph::from_text("graph 2 1 0\nvertex 0\nedge 0 1 1\n").is_err());
    }
}
