//! Embedding a clustered blueprint graph `H` into a host so that cluster `X_i`
//! lands bijectively on cluster `V_i` and every edge of `H` lands on a host
//! edge of the prescribed colour.
//!
//! Small blueprints are embedded by exact backtracking. Larger ones use a
//! min-conflicts local search over within-cluster swaps, which may fail.

use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::allocation::AllocationResult;
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Layer, Vertex, VertexSet};
use crate::rng::{self, Purpose};

/// A graph to embed: every vertex has a cluster, every edge an optional
/// colour (`None` accepts any host edge).
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Blueprint {
    pub cluster: Vec<usize>,
    pub edges: Vec<(usize, usize, Option<usize>)>,
}

impl Blueprint {
    /// Cycle `k` of the allocation gets colour `colors[k]`.
    pub fn from_allocation(alloc: &AllocationResult, colors: &[usize]) -> Self {
        let cluster = (0..alloc.vertex_count()).map(|v| alloc.cluster_of(v)).collect();
        let edges = alloc
            .cycles
            .iter()
            .flat_map(|c| {
                let vs = &c.vertices;
                let color = colors[c.component];
                (0..vs.len()).map(move |q| (vs[q], vs[(q + 1) % vs.len()], Some(color)))
            })
            .collect();
        Self { cluster, edges }
    }

    pub fn n(&self) -> usize {
        self.cluster.len()
    }

    fn adjacency(&self) -> Vec<Vec<(usize, usize)>> {
        let mut adj = vec![Vec::new(); self.n()];
        for (e, &(u, v, _)) in self.edges.iter().enumerate() {
            adj[u].push((v, e));
            adj[v].push((u, e));
        }
        adj
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default)]
pub struct EmbedBudget {
    /// Blueprints up to this size are embedded by exact backtracking.
    pub exact_limit: usize,
    /// Backtracking nodes before giving up.
    pub node_limit: u64,
    /// Local-search moves per restart.
    pub max_steps: usize,
    pub restarts: usize,
    pub seed: u64,
}

impl Default for EmbedBudget {
    fn default() -> Self {
        Self {
            exact_limit: 64,
            node_limit: 5_000_000,
            max_steps: 200_000,
            restarts: 5,
            seed: 0,
        }
    }
}

/// `psi[h]` is the host vertex of blueprint vertex `h`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Embedding {
    pub psi: Vec<Vertex>,
}

fn edge_ok(g: &ColoredGraph, a: Vertex, b: Vertex, color: Option<usize>) -> bool {
    match color {
        None => g.has_edge(a, b),
        Some(c) => g.row(Layer::Color(c), a).contains(b),
    }
}

/// Checks that `psi` maps every `X_i` bijectively onto `V_i` and every edge of
/// the blueprint onto a host edge of its colour.
pub fn verify_embedding(bp: &Blueprint, g: &ColoredGraph, clusters: &[VertexSet], psi: &[Vertex]) -> bool {
    if psi.len() != bp.n() {
        return false;
    }
    let mut hits = vec![0usize; g.n()];
    for (h, &v) in psi.iter().enumerate() {
        if v >= g.n() || !clusters.get(bp.cluster[h]).is_some_and(|c| c.contains(v)) {
            return false;
        }
        hits[v] += 1;
    }
    let per_cluster_ok = clusters.iter().enumerate().all(|(i, c)| {
        let size = bp.cluster.iter().filter(|&&k| k == i).count();
        size == c.len() && c.iter().all(|v| hits[v] == 1)
    });
    per_cluster_ok && bp.edges.iter().all(|&(u, v, c)| edge_ok(g, psi[u], psi[v], c))
}

/// Embeds `bp` into `g` with `X_i ↦ clusters[i]`.
pub fn embed_blueprint(
    bp: &Blueprint,
    g: &ColoredGraph,
    clusters: &[VertexSet],
    budget: &EmbedBudget,
) -> Result<Embedding> {
    let t = clusters.len();
    let mut sizes = vec![0usize; t];
    for &c in &bp.cluster {
        if c >= t {
            return Err(Error::param(format!("blueprint cluster {c} has no host cluster")));
        }
        sizes[c] += 1;
    }
    for i in 0..t {
        if sizes[i] != clusters[i].len() {
            return Err(Error::pre(format!(
                "cluster {i}: blueprint has {} vertices, host has {}",
                sizes[i],
                clusters[i].len()
            )));
        }
    }
    let psi = if bp.n() <= budget.exact_limit {
        backtrack(bp, g, clusters, budget.node_limit)?
    } else {
        local_search(bp, g, clusters, budget)?
    };
    debug_assert!(verify_embedding(bp, g, clusters, &psi));
    Ok(Embedding { psi })
}

fn backtrack(bp: &Blueprint, g: &ColoredGraph, clusters: &[VertexSet], node_limit: u64) -> Result<Vec<Vertex>> {
    let n = bp.n();
    let adj = bp.adjacency();
    // Visit vertices so that each one (after the first of its component) has
    // an already placed neighbour.
    let mut order = Vec::with_capacity(n);
    let mut placed = vec![false; n];
    for s in 0..n {
        if placed[s] {
            continue;
        }
        let mut stack = vec![s];
        placed[s] = true;
        while let Some(v) = stack.pop() {
            order.push(v);
            for &(w, _) in adj[v].iter().rev() {
                if !placed[w] {
                    placed[w] = true;
                    stack.push(w);
                }
            }
        }
    }
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    struct State<'a> {
        bp: &'a Blueprint,
        g: &'a ColoredGraph,
        clusters: &'a [VertexSet],
        adj: Vec<Vec<(usize, usize)>>,
        order: Vec<usize>,
        pos: Vec<usize>,
        psi: Vec<Vertex>,
        used: Vec<bool>,
        nodes: u64,
        limit: u64,
    }
    fn go(st: &mut State, i: usize) -> Result<bool> {
        if i == st.order.len() {
            return Ok(true);
        }
        st.nodes += 1;
        if st.nodes > st.limit {
            return Err(Error::Infeasible(format!(
                "embedding search exceeded {} nodes",
                st.limit
            )));
        }
        let h = st.order[i];
        let cluster = st.bp.cluster[h];
        for v in st.clusters[cluster].iter() {
            if st.used[v] {
                continue;
            }
            let fits = st.adj[h]
                .iter()
                .all(|&(w, e)| st.pos[w] >= i || edge_ok(st.g, v, st.psi[w], st.bp.edges[e].2));
            if !fits {
                continue;
            }
            st.used[v] = true;
            st.psi[h] = v;
            if go(st, i + 1)? {
                return Ok(true);
            }
            st.used[v] = false;
        }
        Ok(false)
    }
    let mut st = State {
        bp,
        g,
        clusters,
        adj,
        order,
        pos,
        psi: vec![usize::MAX; n],
        used: vec![false; g.n()],
        nodes: 0,
        limit: node_limit,
    };
    if go(&mut st, 0)? {
        Ok(st.psi)
    } else {
        Err(Error::Infeasible("no embedding exists".into()))
    }
}

fn local_search(bp: &Blueprint, g: &ColoredGraph, clusters: &[VertexSet], budget: &EmbedBudget) -> Result<Vec<Vertex>> {
    let n = bp.n();
    let adj = bp.adjacency();
    let members: Vec<Vec<usize>> = {
        let mut m = vec![Vec::new(); clusters.len()];
        for (h, &c) in bp.cluster.iter().enumerate() {
            m[c].push(h);
        }
        m
    };
    let ok = |psi: &[Vertex], e: usize| {
        let (u, v, c) = bp.edges[e];
        edge_ok(g, psi[u], psi[v], c)
    };
    for restart in 0..budget.restarts.max(1) {
        let mut rng = rng::stream(budget.seed, restart as u64, Purpose::Embedding);
        let mut psi = vec![0; n];
        for (i, hs) in members.iter().enumerate() {
            let mut vs: Vec<Vertex> = clusters[i].iter().collect();
            vs.shuffle(&mut rng);
            for (&h, v) in hs.iter().zip(vs) {
                psi[h] = v;
            }
        }
        // Indexable set of violated edges.
        let mut bad: Vec<usize> = Vec::new();
        let mut slot = vec![usize::MAX; bp.edges.len()];
        let set_bad = |bad: &mut Vec<usize>, slot: &mut Vec<usize>, e: usize, is_bad: bool| {
            if is_bad && slot[e] == usize::MAX {
                slot[e] = bad.len();
                bad.push(e);
            } else if !is_bad && slot[e] != usize::MAX {
                let i = slot[e];
                let last = *bad.last().unwrap();
                bad.swap_remove(i);
                if last != e {
                    slot[last] = i;
                }
                slot[e] = usize::MAX;
            }
        };
        for e in 0..bp.edges.len() {
            let b = !ok(&psi, e);
            set_bad(&mut bad, &mut slot, e, b);
        }
        let cost_at = |psi: &[Vertex], h: usize| adj[h].iter().filter(|&&(_, e)| !ok(psi, e)).count() as i64;
        for _ in 0..budget.max_steps {
            if bad.is_empty() {
                return Ok(psi);
            }
            let e = bad[rng.gen_range(0..bad.len())];
            let (a, b, _) = bp.edges[e];
            let h = if rng.gen_bool(0.5) { a } else { b };
            let peers = &members[bp.cluster[h]];
            let before_h = cost_at(&psi, h);
            let mut best: Option<(i64, usize)> = None;
            let mut ties = 0u32;
            for &w in peers {
                if w == h {
                    continue;
                }
                let before = before_h + cost_at(&psi, w);
                psi.swap(h, w);
                let after = cost_at(&psi, h) + cost_at(&psi, w);
                psi.swap(h, w);
                let delta = after - before;
                match best {
                    Some((d, _)) if delta > d => {}
                    Some((d, _)) if delta == d => {
                        ties += 1;
                        if rng.gen_range(0..=ties) == 0 {
                            best = Some((delta, w));
                        }
                    }
                    _ => {
                        best = Some((delta, w));
                        ties = 0;
                    }
                }
            }
            let Some((delta, mut w)) = best else { continue };
            if delta > 0 && rng.gen_bool(0.9) {
                continue;
            }
            if delta > 0 {
                w = peers[rng.gen_range(0..peers.len())];
                if w == h {
                    continue;
                }
            }
            psi.swap(h, w);
            for x in [h, w] {
                for &(_, e2) in &adj[x] {
                    let b = !ok(&psi, e2);
                    set_bad(&mut bad, &mut slot, e2, b);
                }
            }
        }
        log::debug!("embedding restart {restart} ended with {} violated edges", bad.len());
    }
    Err(Error::Infeasible(format!(
        "local search found no embedding in {} restarts of {} moves",
        budget.restarts.max(1),
        budget.max_steps
    )))
}
