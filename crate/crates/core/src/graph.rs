//! Graphs, vertex sets, `G(n,p)` sampling, edge colourings and the
//! colour-annotated edge-list format.
//!
//! Colours are 0-based indices internally (`0..r`). Files and JSON use
//! 1-based colours.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::path::Path;

use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::rng::{self, Purpose};

pub type Vertex = usize;

/// A sorted set of distinct vertex ids.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(try_from = "Vec<usize>", into = "Vec<usize>")]
pub struct VertexSet {
    ids: Vec<Vertex>,
}

impl VertexSet {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Builds a set from arbitrary ids. Duplicates are an error, as are ids
    /// `>= n`.
    pub fn new(mut ids: Vec<Vertex>, n: usize) -> Result<Self> {
        ids.sort_unstable();
        if let Some(w) = ids.windows(2).find(|w| w[0] == w[1]) {
            return Err(Error::param(format!("duplicate vertex {}", w[0])));
        }
        if let Some(&v) = ids.last() {
            if v >= n {
                return Err(Error::param(format!("vertex {v} out of range for n = {n}")));
            }
        }
        Ok(Self { ids })
    }

    /// Builds a set from ids that may repeat; duplicates are dropped.
    pub fn from_iter_dedup<I: IntoIterator<Item = Vertex>>(it: I) -> Self {
        let mut ids: Vec<Vertex> = it.into_iter().collect();
        ids.sort_unstable();
        ids.dedup();
        Self { ids }
    }

    pub fn range(start: Vertex, end: Vertex) -> Self {
        Self {
            ids: (start..end).collect(),
        }
    }

    pub fn from_bitset(bits: &FixedBitSet) -> Self {
        Self {
            ids: bits.ones().collect(),
        }
    }

    pub fn to_bitset(&self, n: usize) -> FixedBitSet {
        let mut b = FixedBitSet::with_capacity(n);
        for &v in &self.ids {
            b.insert(v);
        }
        b
    }

    pub fn len(&self) -> usize {
        self.ids.len()
    }

    pub fn is_empty(&self) -> bool {
        self.ids.is_empty()
    }

    pub fn contains(&self, v: Vertex) -> bool {
        self.ids.binary_search(&v).is_ok()
    }

    pub fn iter(&self) -> impl Iterator<Item = Vertex> + '_ {
        self.ids.iter().copied()
    }

    pub fn as_slice(&self) -> &[Vertex] {
        &self.ids
    }

    pub fn max(&self) -> Option<Vertex> {
        self.ids.last().copied()
    }

    pub fn is_disjoint(&self, other: &VertexSet) -> bool {
        let (mut i, mut j) = (0, 0);
        while i < self.ids.len() && j < other.ids.len() {
            match self.ids[i].cmp(&other.ids[j]) {
                std::cmp::Ordering::Less => i += 1,
                std::cmp::Ordering::Greater => j += 1,
                std::cmp::Ordering::Equal => return false,
            }
        }
        true
    }

    pub fn is_subset(&self, other: &VertexSet) -> bool {
        self.ids.iter().all(|&v| other.contains(v))
    }

    pub fn union(&self, other: &VertexSet) -> VertexSet {
        Self::from_iter_dedup(self.iter().chain(other.iter()))
    }

    pub fn intersection(&self, other: &VertexSet) -> VertexSet {
        Self {
            ids: self.iter().filter(|&v| other.contains(v)).collect(),
        }
    }

    pub fn difference(&self, other: &VertexSet) -> VertexSet {
        Self {
            ids: self.iter().filter(|&v| !other.contains(v)).collect(),
        }
    }

    /// `[n] \ self`.
    pub fn complement(&self, n: usize) -> VertexSet {
        Self {
            ids: (0..n).filter(|&v| !self.contains(v)).collect(),
        }
    }

    /// Parses whitespace separated vertex ids; `#` starts a comment.
    pub fn parse(text: &str, n: usize) -> Result<Self> {
        let mut ids = Vec::new();
        for (lineno, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("");
            for tok in line.split_whitespace() {
                let v = tok.parse::<usize>().map_err(|e| Error::Parse {
                    line: lineno + 1,
                    message: format!("bad vertex id `{tok}`: {e}"),
                })?;
                ids.push(v);
            }
        }
        Self::new(ids, n)
    }

    pub fn read(path: impl AsRef<Path>, n: usize) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?, n)
    }
}

impl TryFrom<Vec<usize>> for VertexSet {
    type Error = Error;
    fn try_from(ids: Vec<usize>) -> Result<Self> {
        Self::new(ids, usize::MAX)
    }
}

impl From<VertexSet> for Vec<usize> {
    fn from(s: VertexSet) -> Self {
        s.ids
    }
}

impl FromIterator<Vertex> for VertexSet {
    fn from_iter<I: IntoIterator<Item = Vertex>>(it: I) -> Self {
        Self::from_iter_dedup(it)
    }
}

/// A simple undirected graph with bitset adjacency.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Graph {
    adj: Vec<FixedBitSet>,
    m: usize,
}

impl Graph {
    pub fn new(n: usize) -> Self {
        Self {
            adj: vec![FixedBitSet::with_capacity(n); n],
            m: 0,
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::new(n);
        for u in 0..n {
            for v in u + 1..n {
                g.add_edge(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Self {
        let mut g = Self::new(n);
        for v in 0..n {
            g.add_edge(v, (v + 1) % n);
        }
        g
    }

    pub fn from_edges(n: usize, edges: &[(Vertex, Vertex)]) -> Self {
        let mut g = Self::new(n);
        for &(u, v) in edges {
            g.add_edge(u, v);
        }
        g
    }

    /// Adds `uv`; self-loops and repeated edges are ignored.
    pub fn add_edge(&mut self, u: Vertex, v: Vertex) -> bool {
        if u == v || self.adj[u].contains(v) {
            return false;
        }
        self.adj[u].insert(v);
        self.adj[v].insert(u);
        self.m += 1;
        true
    }

    pub fn n(&self) -> usize {
        self.adj.len()
    }

    pub fn edge_count(&self) -> usize {
        self.m
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.adj[u].contains(v)
    }

    pub fn row(&self, v: Vertex) -> &FixedBitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: Vertex) -> usize {
        self.adj[v].count_ones(..)
    }

    pub fn min_degree(&self) -> usize {
        (0..self.n()).map(|v| self.degree(v)).min().unwrap_or(0)
    }

    pub fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.adj[v].ones()
    }

    /// Edges `(u, v)` with `u < v` in lexicographic order.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex)> + '_ {
        (0..self.n()).flat_map(move |u| self.adj[u].ones().filter(move |&v| v > u).map(move |v| (u, v)))
    }

    /// Adjacency lists, sorted.
    pub fn adjacency_lists(&self) -> Vec<Vec<Vertex>> {
        self.adj.iter().map(|row| row.ones().collect()).collect()
    }

    pub fn induced(&self, vertices: &[Vertex]) -> Graph {
        let mut g = Graph::new(vertices.len());
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if self.has_edge(u, v) {
                    g.add_edge(i, j);
                }
            }
        }
        g
    }
}

/// Which edges of a coloured graph to look at.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Layer {
    All,
    Color(usize),
}

/// A simple graph whose every edge carries exactly one colour in `0..r`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColoredGraph {
    r: usize,
    layers: Vec<Graph>,
    union: Graph,
}

impl ColoredGraph {
    pub fn new(n: usize, r: usize) -> Self {
        assert!(r >= 1, "at least one colour");
        Self {
            r,
            layers: vec![Graph::new(n); r],
            union: Graph::new(n),
        }
    }

    /// Colours every edge of `g` with colour `c`.
    pub fn monochromatic(g: &Graph, r: usize, c: usize) -> Self {
        let mut cg = Self::new(g.n(), r);
        for (u, v) in g.edges() {
            cg.add_edge(u, v, c).expect("fresh graph");
        }
        cg
    }

    pub fn from_edges(n: usize, r: usize, edges: &[(Vertex, Vertex, usize)]) -> Result<Self> {
        let mut g = Self::new(n, r);
        for &(u, v, c) in edges {
            g.add_edge(u, v, c)?;
        }
        Ok(g)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, c: usize) -> Result<()> {
        let n = self.n();
        if u >= n || v >= n {
            return Err(Error::param(format!("edge {u}-{v} out of range for n = {n}")));
        }
        if u == v {
            return Err(Error::param(format!("self-loop at {u}")));
        }
        if c >= self.r {
            return Err(Error::param(format!(
                "colour {} out of range for r = {}",
                c + 1,
                self.r
            )));
        }
        if self.union.has_edge(u, v) {
            return Err(Error::param(format!("edge {u}-{v} given twice")));
        }
        self.union.add_edge(u, v);
        self.layers[c].add_edge(u, v);
        Ok(())
    }

    pub fn n(&self) -> usize {
        self.union.n()
    }

    pub fn r(&self) -> usize {
        self.r
    }

    pub fn plain(&self) -> &Graph {
        &self.union
    }

    pub fn layer(&self, layer: Layer) -> &Graph {
        match layer {
            Layer::All => &self.union,
            Layer::Color(c) => &self.layers[c],
        }
    }

    pub fn row(&self, layer: Layer, v: Vertex) -> &FixedBitSet {
        self.layer(layer).row(v)
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex) -> bool {
        self.union.has_edge(u, v)
    }

    pub fn color_of(&self, u: Vertex, v: Vertex) -> Option<usize> {
        if !self.union.has_edge(u, v) {
            return None;
        }
        (0..self.r).find(|&c| self.layers[c].has_edge(u, v))
    }

    pub fn edge_count(&self) -> usize {
        self.union.edge_count()
    }

    pub fn color_edge_count(&self, c: usize) -> usize {
        self.layers[c].edge_count()
    }

    /// `(u, v, colour)` with `u < v`, lexicographic.
    pub fn edges(&self) -> impl Iterator<Item = (Vertex, Vertex, usize)> + '_ {
        self.union
            .edges()
            .map(move |(u, v)| (u, v, self.color_of(u, v).expect("edge has a colour")))
    }

    /// `|N(v) ∩ set|` in the given layer.
    pub fn degree_into(&self, layer: Layer, v: Vertex, set: &FixedBitSet) -> usize {
        self.row(layer, v).intersection_count(set)
    }

    /// `e(A, B)` for disjoint `A`, `B`.
    pub fn edges_between(&self, layer: Layer, a: &VertexSet, b: &FixedBitSet) -> usize {
        a.iter().map(|v| self.degree_into(layer, v, b)).sum()
    }

    /// Subgraph induced on `vertices`, relabelled `0..len` in the given order.
    pub fn induced(&self, vertices: &[Vertex]) -> ColoredGraph {
        let mut g = ColoredGraph::new(vertices.len(), self.r);
        for (i, &u) in vertices.iter().enumerate() {
            for (j, &v) in vertices.iter().enumerate().skip(i + 1) {
                if let Some(c) = self.color_of(u, v) {
                    g.add_edge(i, j, c).expect("induced edge");
                }
            }
        }
        g
    }

    /// Parses the colour-edge-list format: a header `n r`, then `u v c` per
    /// edge with 0-based vertices and 1-based colours. Blank lines and `#`
    /// comments are ignored.
    pub fn parse(text: &str) -> Result<Self> {
        let mut graph: Option<ColoredGraph> = None;
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let lineno = lineno + 1;
            let nums = parse_numbers(line, lineno)?;
            match graph.as_mut() {
                None => {
                    let [n, r] = nums[..] else {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "header must be `n r`".into(),
                        });
                    };
                    if r == 0 {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "r must be at least 1".into(),
                        });
                    }
                    graph = Some(ColoredGraph::new(n, r));
                }
                Some(g) => {
                    let [u, v, c] = nums[..] else {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "edge line must be `u v c`".into(),
                        });
                    };
                    if c == 0 {
                        return Err(Error::Parse {
                            line: lineno,
                            message: "colours are 1-based".into(),
                        });
                    }
                    g.add_edge(u, v, c - 1).map_err(|e| Error::Parse {
                        line: lineno,
                        message: e.to_string(),
                    })?;
                }
            }
        }
        graph.ok_or(Error::Parse {
            line: 0,
            message: "missing `n r` header".into(),
        })
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    pub fn to_edge_list(&self) -> String {
        let mut out = format!("{} {}\n", self.n(), self.r);
        for (u, v, c) in self.edges() {
            let _ = writeln!(out, "{u} {v} {}", c + 1);
        }
        out
    }

    pub fn write(&self, path: impl AsRef<Path>) -> Result<()> {
        std::fs::write(path, self.to_edge_list())?;
        Ok(())
    }
}

pub(crate) fn parse_numbers(line: &str, lineno: usize) -> Result<Vec<usize>> {
    line.split_whitespace()
        .map(|tok| {
            tok.parse::<usize>().map_err(|e| Error::Parse {
                line: lineno,
                message: format!("bad integer `{tok}`: {e}"),
            })
        })
        .collect()
}

/// Samples `G(n, p)`: every pair is an edge independently with probability
/// `p`. Pairs are visited in lexicographic order, so the result depends only
/// on `(n, p, seed)`.
pub fn sample_gnp(n: usize, p: f64, seed: u64) -> Result<Graph> {
    if n == 0 {
        return Err(Error::param("n must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    let mut rng = rng::stream(seed, 0, Purpose::Graph);
    let mut g = Graph::new(n);
    for u in 0..n {
        for v in u + 1..n {
            if rng.gen_bool(p) {
                g.add_edge(u, v);
            }
        }
    }
    Ok(g)
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum ColoringStrategy {
    /// Each edge gets an independent uniform colour.
    UniformRandom,
    /// Edges in lexicographic order get colours `0, 1, ..., r-1, 0, ...`.
    RoundRobin,
    /// Explicit colour per edge; keys are `(min, max)` vertex pairs.
    Fixed(HashMap<(Vertex, Vertex), usize>),
}

pub fn color_edges(g: &Graph, r: usize, strategy: &ColoringStrategy, seed: u64) -> Result<ColoredGraph> {
    if r == 0 {
        return Err(Error::param("r must be at least 1"));
    }
    let mut out = ColoredGraph::new(g.n(), r);
    let mut rng = rng::stream(seed, 0, Purpose::Coloring);
    for (i, (u, v)) in g.edges().enumerate() {
        let c = match strategy {
            ColoringStrategy::UniformRandom => rng.gen_range(0..r),
            ColoringStrategy::RoundRobin => i % r,
            ColoringStrategy::Fixed(map) => *map
                .get(&(u, v))
                .ok_or_else(|| Error::param(format!("no colour given for edge {u}-{v}")))?,
        };
        out.add_edge(u, v, c)?;
    }
    if let ColoringStrategy::Fixed(map) = strategy {
        if let Some(&(u, v)) = map
            .keys()
            .find(|&&(u, v)| u >= g.n() || v >= g.n() || !g.has_edge(u, v))
        {
            return Err(Error::param(format!("colour given for non-edge {u}-{v}")));
        }
    }
    Ok(out)
}

/// `N*(S, X)`: the vertices of `X` adjacent (in any colour) to every vertex of `S`.
pub fn common_neighborhood(g: &ColoredGraph, s: &VertexSet, x: &VertexSet) -> Result<VertexSet> {
    common_neighborhood_in(g, Layer::All, s, x)
}

pub fn common_neighborhood_in(g: &ColoredGraph, layer: Layer, s: &VertexSet, x: &VertexSet) -> Result<VertexSet> {
    if s.is_empty() {
        return Err(Error::param("common neighbourhood of an empty set is undefined"));
    }
    let mut acc = x.to_bitset(g.n());
    for v in s.iter() {
        acc.intersect_with(g.row(layer, v));
    }
    Ok(VertexSet::from_bitset(&acc))
}

/// `deg*(S, X)` with `X` given as a bitset; `S` must be nonempty.
pub(crate) fn common_degree(g: &ColoredGraph, layer: Layer, s: &[Vertex], x: &FixedBitSet) -> usize {
    match s {
        [] => x.count_ones(..),
        [a] => g.row(layer, *a).intersection_count(x),
        [a, b] => {
            let ra = g.row(layer, *a).as_slice();
            let rb = g.row(layer, *b).as_slice();
            ra.iter()
                .zip(rb)
                .zip(x.as_slice())
                .map(|((p, q), r)| (p & q & r).count_ones() as usize)
                .sum()
        }
        _ => {
            let mut acc = x.clone();
            for &v in s {
                acc.intersect_with(g.row(layer, v));
            }
            acc.count_ones(..)
        }
    }
}
