//! Monochromatic cycles, cycle covers and their validation.

use std::path::Path;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Vertex, VertexSet};

/// A monochromatic cycle. Lengths 1 (a vertex) and 2 (an edge) are the
/// degenerate cases; a single vertex has no colour, an edge carries its own.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cycle {
    vertices: Vec<Vertex>,
    color: Option<usize>,
}

impl Cycle {
    pub fn vertex(v: Vertex) -> Self {
        Self {
            vertices: vec![v],
            color: None,
        }
    }

    /// An unchecked cycle; use [`Cycle::check`] or [`verify_cover`] to
    /// validate it against a host graph.
    pub fn new(vertices: Vec<Vertex>, color: Option<usize>) -> Self {
        Self { vertices, color }
    }

    /// Builds a cycle on `vertices` (in cyclic order), taking the colour from
    /// the host. Fails unless the result is a valid monochromatic cycle.
    pub fn from_host(g: &ColoredGraph, vertices: Vec<Vertex>) -> Result<Self> {
        let color = match vertices.len() {
            0 => return Err(Error::param("a cycle needs at least one vertex")),
            1 => None,
            _ => g.color_of(vertices[0], vertices[1]),
        };
        let c = Self { vertices, color };
        c.check(g).map_err(Error::pre)?;
        Ok(c)
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn color(&self) -> Option<usize> {
        self.color
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    /// Rotates and reflects the vertex list so it starts at its minimum and
    /// the second vertex is smaller than the last.
    pub fn canonical(mut self) -> Self {
        let k = self.vertices.len();
        if k >= 2 {
            let pos = (0..k).min_by_key(|&i| self.vertices[i]).unwrap();
            self.vertices.rotate_left(pos);
            if k >= 3 && self.vertices[1] > self.vertices[k - 1] {
                self.vertices[1..].reverse();
            }
        }
        self
    }

    /// Checks the cycle against the host; the error string names the problem.
    pub fn check(&self, g: &ColoredGraph) -> std::result::Result<(), String> {
        let vs = &self.vertices;
        if vs.is_empty() {
            return Err("empty cycle".into());
        }
        if let Some(&v) = vs.iter().find(|&&v| v >= g.n()) {
            return Err(format!("vertex {v} out of range"));
        }
        let mut seen = FixedBitSet::with_capacity(g.n());
        for &v in vs {
            if seen.put(v) {
                return Err(format!("vertex {v} repeated"));
            }
        }
        if vs.len() == 1 {
            return match self.color {
                None => Ok(()),
                Some(_) => Err("a single-vertex cycle has no colour".into()),
            };
        }
        let Some(c) = self.color else {
            return Err(format!("cycle of length {} needs a colour", vs.len()));
        };
        let pairs = if vs.len() == 2 { 1 } else { vs.len() };
        for i in 0..pairs {
            let (u, v) = (vs[i], vs[(i + 1) % vs.len()]);
            match g.color_of(u, v) {
                None => return Err(format!("{u}-{v} is not an edge")),
                Some(e) if e != c => return Err(format!("edge {u}-{v} has colour {} not {}", e + 1, c + 1)),
                _ => {}
            }
        }
        Ok(())
    }
}

#[derive(Serialize, Deserialize)]
struct CycleRepr {
    color: Option<usize>,
    vertices: Vec<Vertex>,
}

impl Serialize for Cycle {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        CycleRepr {
            color: self.color.map(|c| c + 1),
            vertices: self.vertices.clone(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Cycle {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let repr = CycleRepr::deserialize(d)?;
        let color = match repr.color {
            Some(0) => return Err(serde::de::Error::custom("colours are 1-based")),
            c => c.map(|c| c - 1),
        };
        Ok(Cycle {
            vertices: repr.vertices,
            color,
        })
    }
}

/// A collection of cycles, intended to be pairwise vertex-disjoint.
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct CycleCover {
    cycles: Vec<Cycle>,
}

impl CycleCover {
    pub fn new(cycles: Vec<Cycle>) -> Self {
        Self { cycles }
    }

    pub fn singletons<I: IntoIterator<Item = Vertex>>(vs: I) -> Self {
        Self {
            cycles: vs.into_iter().map(Cycle::vertex).collect(),
        }
    }

    pub fn push(&mut self, c: Cycle) {
        self.cycles.push(c);
    }

    pub fn extend(&mut self, other: CycleCover) {
        self.cycles.extend(other.cycles);
    }

    pub fn cycles(&self) -> &[Cycle] {
        &self.cycles
    }

    pub fn into_cycles(self) -> Vec<Cycle> {
        self.cycles
    }

    pub fn len(&self) -> usize {
        self.cycles.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cycles.is_empty()
    }

    /// Union of the cycles' vertex sets.
    pub fn covered(&self) -> VertexSet {
        self.cycles.iter().flat_map(|c| c.vertices.iter().copied()).collect()
    }

    pub fn vertex_count(&self) -> usize {
        self.cycles.iter().map(Cycle::len).sum()
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        Ok(serde_json::from_str(text)?)
    }

    pub fn read(path: impl AsRef<Path>) -> Result<Self> {
        Self::from_json(&std::fs::read_to_string(path)?)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Violation {
    InvalidCycle {
        index: usize,
        reason: String,
    },
    Overlap {
        vertex: Vertex,
        first: usize,
        second: usize,
    },
    MissingRequired {
        vertex: Vertex,
    },
    ForbiddenCovered {
        vertex: Vertex,
    },
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub valid: bool,
    pub cycle_count: usize,
    pub covered: usize,
    pub violations: Vec<Violation>,
}

impl VerificationReport {
    /// Turns a failed report into an internal error.
    pub fn into_result(self) -> Result<Self> {
        if self.valid {
            Ok(self)
        } else {
            Err(Error::internal(format!("invalid cover: {:?}", self.violations)))
        }
    }
}

/// Validates `cover` against `g`: every cycle must be a valid monochromatic
/// cycle, cycles must be disjoint, `required` must be covered and nothing in
/// `forbidden` may be. A partition check is `required = V(g)`, `forbidden = ∅`.
pub fn verify_cover(
    g: &ColoredGraph,
    cover: &CycleCover,
    required: &VertexSet,
    forbidden: &VertexSet,
) -> VerificationReport {
    let n = g.n();
    let mut violations = Vec::new();
    let mut owner: Vec<Option<usize>> = vec![None; n];
    for (index, cycle) in cover.cycles.iter().enumerate() {
        if let Err(reason) = cycle.check(g) {
            violations.push(Violation::InvalidCycle { index, reason });
        }
        for &v in &cycle.vertices {
            if v >= n {
                continue;
            }
            match owner[v] {
                Some(first) if first != index => violations.push(Violation::Overlap {
                    vertex: v,
                    first,
                    second: index,
                }),
                Some(_) => {}
                None => owner[v] = Some(index),
            }
        }
    }
    for v in required.iter() {
        if v >= n || owner[v].is_none() {
            violations.push(Violation::MissingRequired { vertex: v });
        }
    }
    for v in forbidden.iter() {
        if v < n && owner[v].is_some() {
            violations.push(Violation::ForbiddenCovered { vertex: v });
        }
    }
    VerificationReport {
        valid: violations.is_empty(),
        cycle_count: cover.len(),
        covered: owner.iter().filter(|o| o.is_some()).count(),
        violations,
    }
}

/// Partition check: `required = V(g)`, nothing forbidden.
pub fn verify_partition(g: &ColoredGraph, cover: &CycleCover) -> VerificationReport {
    verify_cover(g, cover, &VertexSet::range(0, g.n()), &VertexSet::empty())
}
