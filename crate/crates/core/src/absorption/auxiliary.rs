use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Layer, Vertex, VertexSet};
use crate::solver::{maximum_matching, pairs, ColorMasks};

/// Why an edge of the auxiliary graph exists.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum Witness {
    /// Rule (a): vertices `u` with `v u v'` monochromatic. Holds exactly `2t`.
    Connectors(Vec<Vertex>),
    /// Rule (b): `2t` disjoint edges `(u, u')` oriented so that `v u u' v'` is
    /// monochromatic, `v < v'` being the edge's endpoints.
    Matching(Vec<(Vertex, Vertex)>),
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxEdge {
    pub u: Vertex,
    pub v: Vertex,
    pub color: usize,
    pub witness: Witness,
}

/// The coloured multigraph `H` on `W` whose edges can be expanded into host
/// paths through `U`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AuxiliaryGraph {
    pub w: VertexSet,
    pub t: usize,
    pub edges: Vec<AuxEdge>,
}

impl AuxiliaryGraph {
    /// Edge `(u, v, c)` in either orientation.
    pub fn edge(&self, u: Vertex, v: Vertex, c: usize) -> Option<&AuxEdge> {
        let (a, b) = (u.min(v), u.max(v));
        self.edges.iter().find(|e| e.u == a && e.v == b && e.color == c)
    }

    pub(crate) fn index(&self) -> HashMap<(Vertex, Vertex, usize), usize> {
        self.edges
            .iter()
            .enumerate()
            .map(|(i, e)| ((e.u, e.v, e.color), i))
            .collect()
    }

    fn local(&self, v: Vertex) -> usize {
        self.w.as_slice().binary_search(&v).expect("edge endpoint outside W")
    }

    /// Colour masks on positions `0..|W|`, for the exact solver.
    pub fn masks(&self, r: usize) -> Result<ColorMasks> {
        let mut m = ColorMasks::new(self.w.len(), r)?;
        for e in &self.edges {
            m.add_edge(self.local(e.u), self.local(e.v), e.color);
        }
        Ok(m)
    }

    /// Underlying simple graph on positions `0..|W|`.
    pub fn simple(&self) -> crate::graph::Graph {
        let mut g = crate::graph::Graph::new(self.w.len());
        for e in &self.edges {
            g.add_edge(self.local(e.u), self.local(e.v));
        }
        g
    }

    /// Checks every witness against the host.
    pub fn check(&self, g: &ColoredGraph, u: &VertexSet) -> std::result::Result<(), String> {
        for e in &self.edges {
            let lay = Layer::Color(e.color);
            let has = |a: Vertex, b: Vertex| g.row(lay, a).contains(b);
            match &e.witness {
                Witness::Connectors(cs) => {
                    if cs.len() < 2 * self.t {
                        return Err(format!("edge {}-{} has {} connectors", e.u, e.v, cs.len()));
                    }
                    if let Some(&x) = cs.iter().find(|&&x| !u.contains(x) || !has(e.u, x) || !has(x, e.v)) {
                        return Err(format!("connector {x} of {}-{} is invalid", e.u, e.v));
                    }
                }
                Witness::Matching(ms) => {
                    if ms.len() != 2 * self.t {
                        return Err(format!("edge {}-{} has a matching of {}", e.u, e.v, ms.len()));
                    }
                    let mut seen = std::collections::HashSet::new();
                    for &(a, b) in ms {
                        if !u.contains(a) || !u.contains(b) || !seen.insert(a) || !seen.insert(b) {
                            return Err(format!("matching of {}-{} leaves U or repeats a vertex", e.u, e.v));
                        }
                        if !(has(e.u, a) && has(a, b) && has(b, e.v)) {
                            return Err(format!("{}-{a}-{b}-{} is not a colour-{} path", e.u, e.v, e.color + 1));
                        }
                    }
                }
            }
        }
        Ok(())
    }
}

/// Adds `(v, v', j)` when at least `2t` vertices of `U` join `v` and `v'` in
/// colour `j`, or failing that when `U` holds a matching of `2t` colour-`j`
/// edges each closing a colour-`j` path `v u u' v'`.
pub fn build_auxiliary_graph(g: &ColoredGraph, u: &VertexSet, w: &VertexSet, t: usize) -> Result<AuxiliaryGraph> {
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    if !u.is_disjoint(w) {
        return Err(Error::param("U and W must be disjoint"));
    }
    let n = g.n();
    let ub = u.to_bitset(n);
    let ws = w.as_slice();
    let mut edges = Vec::new();
    for c in 0..g.r() {
        let lay = Layer::Color(c);
        let into_u: Vec<FixedBitSet> = ws
            .iter()
            .map(|&v| {
                let mut b = g.row(lay, v).clone();
                b.intersect_with(&ub);
                b
            })
            .collect();
        for i in 0..ws.len() {
            for j in i + 1..ws.len() {
                let common: Vec<Vertex> = into_u[i].intersection(&into_u[j]).take(2 * t).collect();
                let witness = if common.len() == 2 * t {
                    Witness::Connectors(common)
                } else if let Some(m) = linking_matching(g, lay, &into_u[i], &into_u[j], 2 * t) {
                    Witness::Matching(m)
                } else {
                    continue;
                };
                edges.push(AuxEdge {
                    u: ws[i],
                    v: ws[j],
                    color: c,
                    witness,
                });
            }
        }
    }
    Ok(AuxiliaryGraph { w: w.clone(), t, edges })
}

/// A matching of `size` edges `ab` inside `U` with `a ∈ nv`, `b ∈ nw` (after
/// orientation), all in the given layer; `None` if the maximum is smaller.
fn linking_matching(
    g: &ColoredGraph,
    lay: Layer,
    nv: &FixedBitSet,
    nw: &FixedBitSet,
    size: usize,
) -> Option<Vec<(Vertex, Vertex)>> {
    let mut pool = nv.clone();
    pool.union_with(nw);
    let verts: Vec<Vertex> = pool.ones().collect();
    if verts.len() < 2 * size {
        return None;
    }
    // A greedy pass usually finds enough edges; blossom search only when it
    // falls short.
    let mut used = FixedBitSet::with_capacity(g.n());
    let mut greedy = Vec::with_capacity(size);
    for a in nv.ones() {
        if greedy.len() == size {
            return Some(greedy);
        }
        if used.contains(a) {
            continue;
        }
        if let Some(b) = g.row(lay, a).intersection(nw).find(|&b| !used.contains(b)) {
            used.insert(a);
            used.insert(b);
            greedy.push((a, b));
        }
    }
    if greedy.len() == size {
        return Some(greedy);
    }
    // Each matching edge needs an endpoint on either side with a neighbour
    // across.
    let coverable =
        |from: &FixedBitSet, to: &FixedBitSet| from.ones().filter(|&a| !g.row(lay, a).is_disjoint(to)).count();
    if coverable(nv, nw) < size || coverable(nw, nv) < size {
        return None;
    }
    let pos: HashMap<Vertex, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut adj = vec![Vec::new(); verts.len()];
    for (i, &a) in verts.iter().enumerate() {
        for b in g.row(lay, a).intersection(&pool) {
            if b > a && ((nv.contains(a) && nw.contains(b)) || (nv.contains(b) && nw.contains(a))) {
                let j = pos[&b];
                adj[i].push(j);
                adj[j].push(i);
            }
        }
    }
    let mate = maximum_matching(&adj, None);
    let found = pairs(&mate);
    if found.len() < size {
        return None;
    }
    Some(
        found
            .into_iter()
            .take(size)
            .map(|(i, j)| {
                let (a, b) = (verts[i], verts[j]);
                if nv.contains(a) && nw.contains(b) {
                    (a, b)
                } else {
                    (b, a)
                }
            })
            .collect(),
    )
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rule_a_edge_from_common_neighbours() {
        // W = {0, 1}; U = {2..6}; all W-U edges colour 0.
        let mut edges = Vec::new();
        for x in 2..6 {
            edges.push((0, x, 0));
            edges.push((1, x, 0));
        }
        let g = ColoredGraph::from_edges(6, 2, &edges).unwrap();
        let h = build_auxiliary_graph(&g, &VertexSet::range(2, 6), &VertexSet::range(0, 2), 2).unwrap();
        assert_eq!(h.edges.len(), 1);
        assert_eq!(h.edges[0].color, 0);
        assert_eq!(h.edges[0].witness, Witness::Connectors(vec![2, 3, 4, 5]));
        h.check(&g, &VertexSet::range(2, 6)).unwrap();
    }

    #[test]
    fn empty_host_gives_no_edges() {
        let g = ColoredGraph::new(10, 2);
        let h = build_auxiliary_graph(&g, &VertexSet::range(3, 10), &VertexSet::range(0, 3), 1).unwrap();
        assert!(h.edges.is_empty());
    }

    #[test]
    fn rule_b_edge_from_matching() {
        // v = 0, v' = 1, U = 2..10 holding a colour-1 matching {2-3, 4-5, 6-7, 8-9};
        // v sees the even ends and v' the odd ends, so no common neighbours.
        let mut edges = Vec::new();
        for k in 0..4 {
            let (a, b) = (2 + 2 * k, 3 + 2 * k);
            edges.push((a, b, 1));
            edges.push((0, a, 1));
            edges.push((1, b, 1));
        }
        let g = ColoredGraph::from_edges(10, 2, &edges).unwrap();
        let u = VertexSet::range(2, 10);
        let h = build_auxiliary_graph(&g, &u, &VertexSet::range(0, 2), 2).unwrap();
        assert_eq!(h.edges.len(), 1);
        let e = &h.edges[0];
        assert_eq!(e.color, 1);
        match &e.witness {
            Witness::Matching(m) => {
                assert_eq!(m.len(), 4);
                assert!(m.iter().all(|&(a, b)| a % 2 == 0 && b == a + 1));
            }
            other => panic!("expected a matching, got {other:?}"),
        }
        h.check(&g, &u).unwrap();
        // With t = 3 neither rule holds.
        assert!(build_auxiliary_graph(&g, &u, &VertexSet::range(0, 2), 3)
            .unwrap()
            .edges
            .is_empty());
    }

    #[test]
    fn rejects_overlap() {
        let g = ColoredGraph::new(4, 1);
        assert!(build_auxiliary_graph(&g, &VertexSet::range(0, 3), &VertexSet::range(2, 4), 1).is_err());
    }
}
