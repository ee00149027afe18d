//! Blueprint construction: given a reduced graph `R` split into connected
//! pieces `R_1, ..., R_s`, a perfect matching `R' ⊆ R` and cluster sizes,
//! build a graph `H` of `s` disjoint cycles (plus at most one isolated vertex)
//! partitioned into clusters `X_i` with `|X_i| = x_i`, together with buffer
//! sets whose first and second neighbourhoods stay along `R'`.
//!
//! Cluster `X_i` is the id range `offsets[i] .. offsets[i] + x_i`. Vertices of
//! a cluster are interchangeable, so the construction works on cluster
//! sequences and only assigns concrete ids at the end.

use std::collections::{HashMap, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::reduced::ReducedGraph;
use crate::solver::maximum_matching;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum AllocationMode {
    /// All numeric preconditions are enforced.
    Strict,
    /// Only structural preconditions are enforced; the outcome is still
    /// verified in full. Used at sizes where the numeric bounds cannot hold.
    Relaxed,
}

/// One cycle `C_k` of the blueprint.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocatedCycle {
    /// Index into `ReducedGraph::components()`.
    pub component: usize,
    pub vertices: Vec<usize>,
}

/// The long alternating path `P_ij` of a matching edge `ij ∈ R'`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct MatchingPath {
    pub edge: (usize, usize),
    pub cycle: usize,
    /// Position of the first path vertex inside the cycle.
    pub start: usize,
    pub len: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct AllocationResult {
    pub sizes: Vec<usize>,
    pub offsets: Vec<usize>,
    pub cycles: Vec<AllocatedCycle>,
    pub isolated: Option<usize>,
    /// `X̃_i`, sorted.
    pub buffers: Vec<Vec<usize>>,
    pub paths: Vec<MatchingPath>,
}

impl AllocationResult {
    pub fn vertex_count(&self) -> usize {
        self.sizes.iter().sum()
    }

    pub fn cluster_of(&self, v: usize) -> usize {
        self.offsets.partition_point(|&o| o <= v) - 1
    }

    /// The vertices of path `P_ij` in order.
    pub fn path_vertices(&self, path: &MatchingPath) -> Vec<usize> {
        let cyc = &self.cycles[path.cycle].vertices;
        (0..path.len).map(|q| cyc[(path.start + q) % cyc.len()]).collect()
    }

    /// Edges of `H` as `(u, v)` pairs, cycle by cycle.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.cycles.iter().flat_map(|c| {
            let vs = &c.vertices;
            (0..vs.len()).map(move |q| (vs[q], vs[(q + 1) % vs.len()]))
        })
    }

    /// Neighbours of every vertex of `H`.
    pub fn adjacency(&self) -> Vec<Vec<usize>> {
        let mut adj = vec![Vec::with_capacity(2); self.vertex_count()];
        for (u, v) in self.edges() {
            adj[u].push(v);
            adj[v].push(u);
        }
        adj
    }

    /// Checks every postcondition and returns the violations found.
    pub fn verify(&self, r: &ReducedGraph, x: &[usize], m: usize) -> Vec<String> {
        let mut errs = Vec::new();
        let t = r.t();
        let total: usize = x.iter().sum();
        if self.sizes != x {
            errs.push(format!("cluster sizes {:?} differ from requested {:?}", self.sizes, x));
            return errs;
        }
        let mut seen = vec![0u8; total];
        for c in &self.cycles {
            for &v in &c.vertices {
                if v >= total {
                    errs.push(format!("vertex {v} out of range"));
                    return errs;
                }
                seen[v] += 1;
            }
            if c.vertices.len() < 4 {
                errs.push(format!(
                    "cycle of component {} has only {} vertices",
                    c.component,
                    c.vertices.len()
                ));
            }
        }
        if let Some(v) = self.isolated {
            if v < total {
                seen[v] += 1;
            }
        }
        if let Some(v) = seen.iter().position(|&k| k != 1) {
            errs.push(format!("vertex {v} appears {} times", seen[v]));
            return errs;
        }
        if self.cycles.len() != r.components().len() {
            errs.push(format!(
                "{} cycles for {} components",
                self.cycles.len(),
                r.components().len()
            ));
        }

        let adj = self.adjacency();
        if let Some(v) = adj.iter().position(|a| a.len() > 2) {
            errs.push(format!("vertex {v} has degree {}", adj[v].len()));
        }
        for (v, a) in adj.iter().enumerate() {
            if a.len() == 2 && (a[0] == a[1] || adj[a[0]].contains(&a[1])) {
                errs.push(format!("triangle or repeated edge at {v}"));
                break;
            }
        }

        let comp_edges: Vec<std::collections::HashSet<(usize, usize)>> = r
            .components()
            .iter()
            .map(|c| c.edges.iter().copied().collect())
            .collect();
        for cyc in &self.cycles {
            let mut visited = std::collections::HashSet::new();
            let vs = &cyc.vertices;
            for q in 0..vs.len() {
                let (a, b) = (self.cluster_of(vs[q]), self.cluster_of(vs[(q + 1) % vs.len()]));
                if a == b {
                    errs.push(format!("edge inside cluster {a}"));
                    continue;
                }
                let e = (a.min(b), a.max(b));
                if !comp_edges[cyc.component].contains(&e) {
                    errs.push(format!(
                        "edge between clusters {a},{b} outside component {}",
                        cyc.component
                    ));
                }
                visited.insert(e);
            }
            if visited.len() != comp_edges[cyc.component].len() {
                errs.push(format!("cycle of component {} misses some of its edges", cyc.component));
            }
        }

        let Some(matching) = r.matching() else {
            errs.push("no matching R'".into());
            return errs;
        };
        let in_matching = |a: usize, b: usize| matching.contains(&(a.min(b), a.max(b)));
        for (i, buf) in self.buffers.iter().enumerate() {
            if (buf.len() as f64) < x[i] as f64 / 50.0 {
                errs.push(format!(
                    "buffer of cluster {i} has {} < {}/50 vertices",
                    buf.len(),
                    x[i]
                ));
            }
            for &v in buf {
                if self.cluster_of(v) != i {
                    errs.push(format!("buffer vertex {v} not in cluster {i}"));
                    continue;
                }
                for &y in &adj[v] {
                    let j = self.cluster_of(y);
                    if !in_matching(i, j) {
                        errs.push(format!("buffer vertex {v}: first neighbourhood leaves R'"));
                    }
                    for &z in &adj[y] {
                        if !in_matching(j, self.cluster_of(z)) {
                            errs.push(format!("buffer vertex {v}: second neighbourhood leaves R'"));
                        }
                    }
                }
            }
        }
        if self.buffers.len() != t {
            errs.push("one buffer per cluster expected".into());
        }
        let need = 4.0 * m as f64 / 45.0;
        for &(i, j) in matching {
            match self.paths.iter().find(|p| p.edge == (i, j)) {
                None => errs.push(format!("no long path for matching edge {i}-{j}")),
                Some(p) => {
                    let pv = self.path_vertices(p);
                    if (pv.len() as f64) < need {
                        errs.push(format!("path for {i}-{j} has {} < 4m/45 vertices", pv.len()));
                    }
                    let alternates = pv.windows(2).all(|w| {
                        let (a, b) = (self.cluster_of(w[0]), self.cluster_of(w[1]));
                        (a, b) == (i, j) || (a, b) == (j, i)
                    });
                    if !alternates {
                        errs.push(format!("path for {i}-{j} does not alternate"));
                    }
                }
            }
        }
        errs
    }
}

/// Strict allocation; see [`allocate_cycles_with`].
pub fn allocate_cycles(r: &ReducedGraph, x: &[usize], m: usize) -> Result<AllocationResult> {
    allocate_cycles_with(r, x, m, AllocationMode::Strict)
}

/// Builds the blueprint for `R` (pieces = its monochromatic components), the
/// matching `R'` installed in `R`, cluster sizes `x` and base size `m`.
pub fn allocate_cycles_with(r: &ReducedGraph, x: &[usize], m: usize, mode: AllocationMode) -> Result<AllocationResult> {
    let t = r.t();
    let s = r.components().len();
    if x.len() != t {
        return Err(Error::param(format!("{} sizes for {t} clusters", x.len())));
    }
    if t % 2 == 1 {
        return Err(Error::pre(format!("t = {t} is odd")));
    }
    let matching = r
        .matching()
        .ok_or_else(|| Error::pre("the reduced graph has no perfect matching R'"))?;
    if s == 0 {
        return Err(Error::pre("the reduced graph has no edges"));
    }
    if mode == AllocationMode::Strict {
        if m < 90 * t.pow(3) * s {
            return Err(Error::pre(format!("m = {m} is below 90t³s = {}", 90 * t.pow(3) * s)));
        }
        if 3 * r.min_degree() < 2 * t {
            return Err(Error::pre(format!("δ(R) = {} is below 2t/3", r.min_degree())));
        }
        if let Some(i) = (0..t).find(|&i| x[i] < m || 9 * x[i] > 10 * m) {
            return Err(Error::pre(format!("x_{i} = {} outside [m, 10m/9]", x[i])));
        }
    }

    // Closed walks through every edge of each piece, each step a→b expanded
    // to the segment [a, b, a]; consecutive segments join b→b' adjacency.
    let mut segments: Vec<Vec<Vec<usize>>> = Vec::with_capacity(s);
    // For each R-edge: (piece, segment index) of its first traversal.
    let mut first_step: HashMap<(usize, usize), (usize, usize)> = HashMap::new();
    for (k, comp) in r.components().iter().enumerate() {
        let walk = visiting_walk(t, &comp.edges);
        let mut segs = Vec::with_capacity(walk.len() - 1);
        for (q, w) in walk.windows(2).enumerate() {
            let (a, b) = (w[0], w[1]);
            first_step.entry((a.min(b), a.max(b))).or_insert((k, q));
            segs.push(vec![a, b, a]);
        }
        segments.push(segs);
    }

    // Stretch the first traversal of every matching edge. The stretched
    // segment plus the next segment's first vertex is the path P_ij.
    let need_len = (4.0 * m as f64 / 45.0).ceil() as usize;
    for &(i, j) in matching {
        let &(k, q) = first_step
            .get(&(i, j))
            .ok_or_else(|| Error::internal(format!("matching edge {i}-{j} lies in no piece")))?;
        let buffer_need = 2 * x[i].max(x[j]).div_ceil(50) + 4;
        let mut len = need_len.max(buffer_need).max(4);
        len += len % 2;
        let extra = (len - 4) / 2;
        let seg = &mut segments[k][q];
        let (a, b) = (seg[0], seg[1]);
        let mut stretched = Vec::with_capacity(len - 1);
        stretched.push(a);
        for _ in 0..extra {
            stretched.push(b);
            stretched.push(a);
        }
        stretched.push(b);
        stretched.push(a);
        *seg = stretched;
    }

    let mut used = vec![0usize; t];
    for seg in segments.iter().flatten() {
        for &c in seg {
            used[c] += 1;
        }
    }
    if let Some(i) = (0..t).find(|&i| used[i] > x[i]) {
        return Err(Error::Infeasible(format!(
            "the visiting cycles need {} vertices of cluster {i}, which has {}",
            used[i], x[i]
        )));
    }

    // Match up the remaining vertices along edges of R.
    let residual: Vec<usize> = (0..t).map(|i| x[i] - used[i]).collect();
    let r_edges: Vec<(usize, usize)> = r.graph().plain().edges().collect();
    let y = cluster_matching(t, &residual, &r_edges)?;
    let leftover: usize = {
        let mut left = residual.clone();
        for (e, &(i, j)) in r_edges.iter().enumerate() {
            left[i] -= y[e];
            left[j] -= y[e];
        }
        left.iter().sum()
    };
    if leftover > 1 {
        return Err(Error::Infeasible(format!(
            "the remaining vertices admit no matching missing at most one vertex ({leftover} unmatched)"
        )));
    }
    for (e, &(i, j)) in r_edges.iter().enumerate() {
        if y[e] == 0 {
            continue;
        }
        let (k, q) = first_step[&(i, j)];
        let seg = &mut segments[k][q];
        let (a, b) = (seg[0], seg[1]);
        let mut inserted = Vec::with_capacity(seg.len() + 2 * y[e]);
        inserted.push(a);
        for _ in 0..y[e] {
            inserted.push(b);
            inserted.push(a);
        }
        inserted.extend_from_slice(&seg[1..]);
        *seg = inserted;
    }

    // Concrete vertex ids.
    let mut offsets = Vec::with_capacity(t);
    let mut acc = 0;
    for &xi in x {
        offsets.push(acc);
        acc += xi;
    }
    let mut next = offsets.clone();
    let mut cycles = Vec::with_capacity(s);
    let mut paths = Vec::new();
    for (k, segs) in segments.iter().enumerate() {
        let mut vertices = Vec::with_capacity(segs.iter().map(Vec::len).sum());
        for (q, seg) in segs.iter().enumerate() {
            let (a, b) = (seg[0], seg[1]);
            let edge = (a.min(b), a.max(b));
            if first_step.get(&edge) == Some(&(k, q)) && matching.contains(&edge) {
                paths.push(MatchingPath {
                    edge,
                    cycle: k,
                    start: vertices.len(),
                    len: seg.len() + 1,
                });
            }
            for &c in seg {
                vertices.push(next[c]);
                next[c] += 1;
            }
        }
        cycles.push(AllocatedCycle { component: k, vertices });
    }
    let isolated = (0..t).find(|&i| next[i] < offsets[i] + x[i]).map(|i| next[i]);

    let mut result = AllocationResult {
        sizes: x.to_vec(),
        offsets,
        cycles,
        isolated,
        buffers: vec![Vec::new(); t],
        paths,
    };
    let mut buffers = vec![Vec::new(); t];
    for p in &result.paths {
        let pv = result.path_vertices(p);
        for &v in &pv[2..pv.len() - 2] {
            buffers[result.cluster_of(v)].push(v);
        }
    }
    for b in &mut buffers {
        b.sort_unstable();
    }
    result.buffers = buffers;

    let errs = result.verify(r, x, m);
    if !errs.is_empty() {
        return Err(Error::internal(format!(
            "allocation postconditions failed: {}",
            errs.join("; ")
        )));
    }
    Ok(result)
}

/// Closed walk in the piece with edge list `edges` that traverses every edge.
/// Unvisited edges are taken in lexicographic order, reached by BFS paths.
fn visiting_walk(t: usize, edges: &[(usize, usize)]) -> Vec<usize> {
    let mut adj = vec![Vec::new(); t];
    for &(i, j) in edges {
        adj[i].push(j);
        adj[j].push(i);
    }
    for a in &mut adj {
        a.sort_unstable();
    }
    let start = edges[0].0;
    let mut walk = vec![start];
    let mut visited = std::collections::HashSet::new();
    let mut cur = start;
    let step =
        |walk: &mut Vec<usize>, visited: &mut std::collections::HashSet<(usize, usize)>, to: usize, cur: &mut usize| {
            visited.insert(((*cur).min(to), (*cur).max(to)));
            walk.push(to);
            *cur = to;
        };
    for &(i, j) in edges {
        if visited.contains(&(i, j)) {
            continue;
        }
        let (near, far) = {
            let path_i = bfs_path(&adj, cur, i);
            let path_j = bfs_path(&adj, cur, j);
            if path_j.len() < path_i.len() {
                (path_j, i)
            } else {
                (path_i, j)
            }
        };
        for &v in &near[1..] {
            step(&mut walk, &mut visited, v, &mut cur);
        }
        step(&mut walk, &mut visited, far, &mut cur);
    }
    let back = bfs_path(&adj, cur, start);
    for &v in &back[1..] {
        step(&mut walk, &mut visited, v, &mut cur);
    }
    if walk.len() == 1 {
        walk.push(start);
    }
    walk
}

fn bfs_path(adj: &[Vec<usize>], from: usize, to: usize) -> Vec<usize> {
    let mut prev = vec![usize::MAX; adj.len()];
    let mut queue = VecDeque::from([from]);
    prev[from] = from;
    while let Some(v) = queue.pop_front() {
        if v == to {
            break;
        }
        for &w in &adj[v] {
            if prev[w] == usize::MAX {
                prev[w] = v;
                queue.push_back(w);
            }
        }
    }
    let mut path = vec![to];
    let mut v = to;
    while v != from {
        v = prev[v];
        assert!(v != usize::MAX, "piece is connected");
        path.push(v);
    }
    path.reverse();
    path
}

/// Largest number of disjoint cross-cluster pairs among `residual[i]`
/// interchangeable vertices per cluster, pairs allowed along `edges`.
/// Returns the pair count per edge.
///
/// A maximum flow on the bipartite double cover gives a half-integral
/// optimum; rounding it down loses at most a few vertices per cluster, which
/// are then recovered by exact matching on a small explicit graph.
pub fn cluster_matching(t: usize, residual: &[usize], edges: &[(usize, usize)]) -> Result<Vec<usize>> {
    let z = double_cover_flow(t, residual, edges);
    let mut y: Vec<usize> = z.iter().map(|&v| v / 2).collect();
    let edge_index: HashMap<(usize, usize), usize> = edges.iter().enumerate().map(|(e, &(i, j))| ((i, j), e)).collect();
    let mut r_adj = vec![vec![false; t]; t];
    for &(i, j) in edges {
        r_adj[i][j] = true;
        r_adj[j][i] = true;
    }
    loop {
        let mut free = residual.to_vec();
        for (e, &(i, j)) in edges.iter().enumerate() {
            free[i] -= y[e];
            free[j] -= y[e];
        }
        let total_free: usize = free.iter().sum();
        if total_free <= 1 {
            break;
        }
        // Explicit graph: free copies, plus two matched pairs of each used type.
        let mut cluster = Vec::new();
        for (i, &f) in free.iter().enumerate() {
            for _ in 0..f.min(t + 2) {
                cluster.push(i);
            }
        }
        let mut initial_pairs = Vec::new();
        let mut taken = vec![0usize; edges.len()];
        for (e, &(i, j)) in edges.iter().enumerate() {
            let k = y[e].min(2);
            taken[e] = k;
            for _ in 0..k {
                initial_pairs.push((cluster.len(), cluster.len() + 1));
                cluster.push(i);
                cluster.push(j);
            }
        }
        let nodes = cluster.len();
        let adj: Vec<Vec<usize>> = (0..nodes)
            .map(|u| (0..nodes).filter(|&v| r_adj[cluster[u]][cluster[v]]).collect())
            .collect();
        let mut initial = vec![None; nodes];
        for &(u, v) in &initial_pairs {
            initial[u] = Some(v);
            initial[v] = Some(u);
        }
        let before = initial_pairs.len();
        let mate = maximum_matching(&adj, Some(&initial));
        let after = mate.iter().filter(|m| m.is_some()).count() / 2;
        if after <= before {
            break;
        }
        for (e, k) in taken.iter().enumerate() {
            y[e] -= k;
        }
        for (u, m) in mate.iter().enumerate() {
            if let Some(v) = *m {
                if u < v {
                    let (a, b) = (cluster[u].min(cluster[v]), cluster[u].max(cluster[v]));
                    let e = edge_index[&(a, b)];
                    y[e] += 1;
                }
            }
        }
    }
    Ok(y)
}

/// Max flow from left copies (capacity `residual[i]`) to right copies through
/// the edges of `R` in both directions; returns `f(i→j) + f(j→i)` per edge.
fn double_cover_flow(t: usize, residual: &[usize], edges: &[(usize, usize)]) -> Vec<usize> {
    let source = 2 * t;
    let sink = 2 * t + 1;
    let nodes = 2 * t + 2;
    let mut net = FlowNet::new(nodes);
    for i in 0..t {
        net.add(source, i, residual[i] as i64);
        net.add(t + i, sink, residual[i] as i64);
    }
    let big: i64 = residual.iter().map(|&v| v as i64).sum::<i64>() + 1;
    let mut arcs = Vec::with_capacity(edges.len());
    for &(i, j) in edges {
        let a = net.add(i, t + j, big);
        let b = net.add(j, t + i, big);
        arcs.push((a, b));
    }
    net.max_flow(source, sink);
    arcs.iter()
        .map(|&(a, b)| (net.flow(a) + net.flow(b)) as usize)
        .collect()
}

struct FlowNet {
    head: Vec<Vec<usize>>,
    to: Vec<usize>,
    cap: Vec<i64>,
    orig: Vec<i64>,
}

impl FlowNet {
    fn new(n: usize) -> Self {
        Self {
            head: vec![Vec::new(); n],
            to: Vec::new(),
            cap: Vec::new(),
            orig: Vec::new(),
        }
    }

    fn add(&mut self, u: usize, v: usize, c: i64) -> usize {
        let id = self.to.len();
        self.head[u].push(id);
        self.to.push(v);
        self.cap.push(c);
        self.orig.push(c);
        self.head[v].push(id + 1);
        self.to.push(u);
        self.cap.push(0);
        self.orig.push(0);
        id
    }

    fn flow(&self, arc: usize) -> i64 {
        self.orig[arc] - self.cap[arc]
    }

    /// Edmonds–Karp.
    fn max_flow(&mut self, s: usize, t: usize) -> i64 {
        let n = self.head.len();
        let mut total = 0;
        loop {
            let mut prev_arc = vec![usize::MAX; n];
            let mut queue = VecDeque::from([s]);
            let mut reached = vec![false; n];
            reached[s] = true;
            while let Some(u) = queue.pop_front() {
                for &a in &self.head[u] {
                    let v = self.to[a];
                    if !reached[v] && self.cap[a] > 0 {
                        reached[v] = true;
                        prev_arc[v] = a;
                        queue.push_back(v);
                    }
                }
            }
            if !reached[t] {
                return total;
            }
            let mut push = i64::MAX;
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                push = push.min(self.cap[a]);
                v = self.to[a ^ 1];
            }
            let mut v = t;
            while v != s {
                let a = prev_arc[v];
                self.cap[a] -= push;
                self.cap[a ^ 1] += push;
                v = self.to[a ^ 1];
            }
            total += push;
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{ColoredGraph, Graph};

    fn single_edge() -> ReducedGraph {
        ReducedGraph::new(ColoredGraph::from_edges(2, 1, &[(0, 1, 0)]).unwrap())
            .with_matching(vec![(0, 1)])
            .unwrap()
    }

    #[test]
    fn smallest_instance() {
        // δ(R) = 1 < 4/3, so only the relaxed mode accepts it.
        let r = single_edge();
        let m = 90 * 8;
        assert!(allocate_cycles(&r, &[m, m], m).is_err());
        let res = allocate_cycles_with(&r, &[m, m], m, AllocationMode::Relaxed).unwrap();
        assert_eq!(res.cycles.len(), 1);
        assert_eq!(res.cycles[0].vertices.len(), 2 * m);
        assert!(res.isolated.is_none());
        assert!(res.verify(&r, &[m, m], m).is_empty());
        let res = allocate_cycles_with(&r, &[m, m + 1], m, AllocationMode::Relaxed).unwrap();
        assert_eq!(res.isolated, Some(2 * m));
    }

    #[test]
    fn conservation_and_visiting() {
        // t = 4: red edges 01, 23, 02 and blue edges 13, 03, 12; K_4 has δ = 3 ≥ 8/3.
        let g = ColoredGraph::from_edges(
            4,
            2,
            &[(0, 1, 0), (2, 3, 0), (0, 2, 0), (1, 3, 1), (0, 3, 1), (1, 2, 1)],
        )
        .unwrap();
        let r = ReducedGraph::new(g).with_matching(vec![(0, 1), (2, 3)]).unwrap();
        let s = r.components().len();
        assert_eq!(s, 2);
        let m = 90 * 64 * s;
        let x = vec![m, m + 7, 10 * m / 9, m + 100];
        let res = allocate_cycles(&r, &x, m).unwrap();
        assert_eq!(res.vertex_count(), x.iter().sum::<usize>());
        let covered: usize =
            res.cycles.iter().map(|c| c.vertices.len()).sum::<usize>() + usize::from(res.isolated.is_some());
        assert_eq!(covered, res.vertex_count());
        assert!(res.verify(&r, &x, m).is_empty());
    }

    #[test]
    fn strict_preconditions() {
        let r = ReducedGraph::new(ColoredGraph::monochromatic(&Graph::complete(4), 1, 0))
            .with_matching(vec![(0, 1), (2, 3)])
            .unwrap();
        let m = 90 * 64;
        assert!(allocate_cycles(&r, &[m; 4], m - 1).is_err());
        assert!(allocate_cycles(&r, &[m, m, m, 2 * m], m).is_err());
        assert!(allocate_cycles(&r, &[m; 3], m).is_err());
        assert!(allocate_cycles(&r, &[m; 4], m).is_ok());
        let no_matching = ReducedGraph::new(ColoredGraph::monochromatic(&Graph::complete(4), 1, 0));
        assert!(allocate_cycles(&no_matching, &[m; 4], m).is_err());
    }

    #[test]
    fn cluster_matching_on_a_triangle() {
        // Odd totals on a triangle: one vertex must stay unmatched.
        let edges = [(0, 1), (0, 2), (1, 2)];
        let y = cluster_matching(3, &[3, 3, 3], &edges).unwrap();
        let matched: usize = y.iter().sum::<usize>() * 2;
        assert_eq!(matched, 8);
        let y = cluster_matching(3, &[5, 1, 0], &edges).unwrap();
        assert_eq!(y, vec![1, 0, 0]);
    }

    #[test]
    fn walk_visits_every_edge() {
        let edges = vec![(0, 1), (0, 3), (1, 2), (2, 3), (3, 4)];
        let walk = visiting_walk(5, &edges);
        assert_eq!(walk.first(), walk.last());
        for &(i, j) in &edges {
            assert!(walk
                .windows(2)
                .any(|w| (w[0], w[1]) == (i, j) || (w[0], w[1]) == (j, i)));
        }
        for w in walk.windows(2) {
            assert!(edges.contains(&(w[0].min(w[1]), w[0].max(w[1]))));
        }
    }
}
