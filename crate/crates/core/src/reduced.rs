//! Reduced graphs on cluster indices, their monochromatic components, and the
//! cluster partitions they summarise.

use std::fmt::Write as _;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{parse_numbers, ColoredGraph, Graph, Layer, VertexSet};
use crate::solver::max_matching;

/// A monochromatic connected component of a reduced graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Component {
    pub color: usize,
    pub vertices: Vec<usize>,
    /// Edges `(i, j)` with `i < j`, lexicographic.
    pub edges: Vec<(usize, usize)>,
}

/// A coloured graph on `[t]` with its monochromatic components and an
/// optional perfect matching `R'`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ReducedGraph {
    graph: ColoredGraph,
    components: Vec<Component>,
    matching: Option<Vec<(usize, usize)>>,
}

impl ReducedGraph {
    pub fn new(graph: ColoredGraph) -> Self {
        let components = monochromatic_components(&graph);
        Self {
            graph,
            components,
            matching: None,
        }
    }

    pub fn with_matching(mut self, matching: Vec<(usize, usize)>) -> Result<Self> {
        self.set_matching(matching)?;
        Ok(self)
    }

    /// Installs `R'`; it must be a perfect matching of edges of `R`.
    pub fn set_matching(&mut self, matching: Vec<(usize, usize)>) -> Result<()> {
        let t = self.t();
        let mut seen = vec![false; t];
        let mut norm = Vec::with_capacity(matching.len());
        for (i, j) in matching {
            let (i, j) = (i.min(j), i.max(j));
            if j >= t || !self.graph.has_edge(i, j) {
                return Err(Error::param(format!("matching edge {i}-{j} is not an edge of R")));
            }
            if seen[i] || seen[j] {
                return Err(Error::param(format!(
                    "matching edges overlap at {}",
                    if seen[i] { i } else { j }
                )));
            }
            seen[i] = true;
            seen[j] = true;
            norm.push((i, j));
        }
        if seen.iter().any(|s| !s) {
            return Err(Error::param("R' is not a perfect matching"));
        }
        norm.sort_unstable();
        self.matching = Some(norm);
        Ok(())
    }

    pub fn t(&self) -> usize {
        self.graph.n()
    }

    pub fn r(&self) -> usize {
        self.graph.r()
    }

    pub fn graph(&self) -> &ColoredGraph {
        &self.graph
    }

    pub fn components(&self) -> &[Component] {
        &self.components
    }

    pub fn matching(&self) -> Option<&[(usize, usize)]> {
        self.matching.as_deref()
    }

    /// Partner of `i` in `R'`.
    pub fn partner(&self, i: usize) -> Option<usize> {
        self.matching.as_ref()?.iter().find_map(|&(a, b)| {
            if a == i {
                Some(b)
            } else if b == i {
                Some(a)
            } else {
                None
            }
        })
    }

    pub fn min_degree(&self) -> usize {
        self.graph.plain().min_degree()
    }

    /// Parses `t r`, then `i j c` edge lines (colours 1-based), then an
    /// optional `matching:` line followed by `i j` lines.
    pub fn parse(text: &str) -> Result<Self> {
        let (edges_part, matching_part) = match text.find("matching:") {
            Some(pos) => (
                &text[..pos],
                Some((&text[pos + "matching:".len()..], text[..pos].lines().count())),
            ),
            None => (text, None),
        };
        let graph = ColoredGraph::parse(edges_part)?;
        let mut rg = ReducedGraph::new(graph);
        if let Some((body, offset)) = matching_part {
            let mut matching = Vec::new();
            for (lineno, raw) in body.lines().enumerate() {
                let line = raw.split('#').next().unwrap_or("").trim();
                if line.is_empty() {
                    continue;
                }
                let nums = parse_numbers(line, offset + lineno)?;
                let [i, j] = nums[..] else {
                    return Err(Error::Parse {
                        line: offset + lineno,
                        message: "matching line must be `i j`".into(),
                    });
                };
                matching.push((i, j));
            }
            rg.set_matching(matching)?;
        }
        Ok(rg)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_text(&self) -> String {
        let mut out = self.graph.to_edge_list();
        if let Some(m) = &self.matching {
            out.push_str("matching:\n");
            for &(i, j) in m {
                let _ = writeln!(out, "{i} {j}");
            }
        }
        out
    }
}

/// Monochromatic components with at least one edge, ordered by colour then
/// smallest vertex.
pub fn monochromatic_components(g: &ColoredGraph) -> Vec<Component> {
    let t = g.n();
    let mut out = Vec::new();
    for c in 0..g.r() {
        let layer = g.layer(Layer::Color(c));
        let mut label = vec![usize::MAX; t];
        for s in 0..t {
            if label[s] != usize::MAX || layer.degree(s) == 0 {
                continue;
            }
            let id = out.len();
            let mut stack = vec![s];
            label[s] = id;
            let mut vertices = Vec::new();
            while let Some(v) = stack.pop() {
                vertices.push(v);
                for w in layer.neighbors(v) {
                    if label[w] == usize::MAX {
                        label[w] = id;
                        stack.push(w);
                    }
                }
            }
            vertices.sort_unstable();
            let edges = layer.edges().filter(|&(u, _)| label[u] == id).collect();
            out.push(Component {
                color: c,
                vertices,
                edges,
            });
        }
    }
    out
}

/// Keeps the monochromatic components with at least `γt/r` vertices. The
/// result has at most `r²/γ` components and minimum degree at least `(δ-γ)t`;
/// both are checked.
pub fn choose_components(g: &ColoredGraph, delta: f64, gamma: f64) -> Result<ReducedGraph> {
    let t = g.n();
    let r = g.r();
    if !(gamma > 0.0 && gamma <= delta) {
        return Err(Error::param(format!("need 0 < γ ≤ δ, got γ = {gamma}, δ = {delta}")));
    }
    let min_deg = g.plain().min_degree();
    if (min_deg as f64) < delta * t as f64 - 1e-9 {
        return Err(Error::pre(format!(
            "minimum degree {min_deg} is below δt = {}",
            delta * t as f64
        )));
    }
    let keep = gamma * t as f64 / r as f64;
    let mut out = ColoredGraph::new(t, r);
    let mut kept = 0;
    for comp in monochromatic_components(g) {
        if comp.vertices.len() as f64 >= keep - 1e-9 {
            kept += 1;
            for &(i, j) in &comp.edges {
                out.add_edge(i, j, comp.color)?;
            }
        }
    }
    let rg = ReducedGraph::new(out);
    let limit = (r * r) as f64 / gamma;
    if kept as f64 > limit + 1e-9 {
        return Err(Error::internal(format!(
            "{kept} components kept, more than r²/γ = {limit}"
        )));
    }
    let new_min = rg.min_degree();
    if (new_min as f64) < (delta - gamma) * t as f64 - 1e-9 {
        return Err(Error::internal(format!(
            "pruned minimum degree {new_min} below (δ-γ)t = {}",
            (delta - gamma) * t as f64
        )));
    }
    Ok(rg)
}

/// A perfect matching of the reduced graph, found by maximum matching.
pub fn perfect_matching(r: &ReducedGraph) -> Result<Vec<(usize, usize)>> {
    perfect_matching_of(r.graph().plain())
}

pub fn perfect_matching_of(g: &Graph) -> Result<Vec<(usize, usize)>> {
    if g.n() % 2 == 1 {
        return Err(Error::param(format!(
            "a perfect matching needs an even vertex count, got {}",
            g.n()
        )));
    }
    let m = max_matching(g, None);
    if 2 * m.len() != g.n() {
        return Err(Error::Infeasible(format!(
            "largest matching has {} edges, a perfect one needs {}",
            m.len(),
            g.n() / 2
        )));
    }
    Ok(m)
}

/// Disjoint clusters `V_1, ..., V_t` of a host graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ClusterPartition {
    pub clusters: Vec<VertexSet>,
}

impl ClusterPartition {
    pub fn new(clusters: Vec<VertexSet>) -> Result<Self> {
        let mut seen = std::collections::HashSet::new();
        for c in &clusters {
            for v in c.iter() {
                if !seen.insert(v) {
                    return Err(Error::param(format!("clusters overlap at vertex {v}")));
                }
            }
        }
        Ok(Self { clusters })
    }

    pub fn t(&self) -> usize {
        self.clusters.len()
    }

    pub fn sizes(&self) -> Vec<usize> {
        self.clusters.iter().map(VertexSet::len).collect()
    }

    /// The smallest `κ` with `m ≤ |V_i| ≤ κm` for `m = min |V_i|`.
    pub fn balance(&self) -> f64 {
        let sizes = self.sizes();
        let lo = sizes.iter().copied().min().unwrap_or(0);
        let hi = sizes.iter().copied().max().unwrap_or(0);
        if lo == 0 {
            f64::INFINITY
        } else {
            hi as f64 / lo as f64
        }
    }

    pub fn is_balanced(&self, kappa: f64) -> bool {
        self.balance() <= kappa + 1e-12
    }
}
