use std::collections::HashMap;

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use super::auxiliary::{build_auxiliary_graph, AuxiliaryGraph, Witness};
use crate::cover::{verify_cover, Cycle, CycleCover};
use crate::error::{Error, Result};
use crate::graph::{common_degree, ColoredGraph, Layer, Vertex, VertexSet};
use crate::prob::Colex;
use crate::solver::{independence_number, maximum_matching, pairs, solve_masks, SolveBudget, MAX_EXACT_VERTICES};

/// Above this many vertices in `U` the density condition is not enumerated.
pub const DENSITY_EXACT_LIMIT: usize = 24;

/// What to do when a checked precondition fails.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum PreconditionPolicy {
    /// Return an error naming the violation.
    #[default]
    Enforce,
    /// Record the violation in the report and carry on.
    Report,
}

/// Outcome of checking that disjoint `X, Y ⊆ U` with `|X|, |Y| ≥ t` always
/// span an edge.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum DensityCheck {
    /// Enumerated every `t`-set.
    Exact,
    /// Every vertex of `U` misses fewer than `t` others in `U`, which implies it.
    Surrogate,
    /// Neither check applied.
    Unverified,
    Violated {
        x: Vec<Vertex>,
        y: Vec<Vertex>,
    },
}

impl DensityCheck {
    pub fn holds(&self) -> bool {
        matches!(self, DensityCheck::Exact | DensityCheck::Surrogate)
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FineReport {
    pub t: usize,
    pub r: usize,
    /// `6 r^{r+1} t`.
    pub degree_threshold: f64,
    /// Smallest common degree into `U` over the `r`-sets of `W`.
    pub min_common_degree: Option<usize>,
    /// First `r`-set falling short of the threshold.
    pub degree_violation: Option<Vec<Vertex>>,
    pub density: DensityCheck,
    pub aux_edges: usize,
    /// Exact independence number of `H` when `|W| ≤ 64`.
    pub alpha_h: Option<usize>,
    /// Whether `H` was partitioned exactly or greedily.
    pub exact_h: bool,
    pub cycles: usize,
    pub covered: usize,
    /// `400 r⁴ ln r`.
    pub cycle_bound: f64,
}

impl FineReport {
    pub fn preconditions_hold(&self) -> bool {
        self.degree_violation.is_none() && self.density.holds()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct FineOptions {
    pub policy: PreconditionPolicy,
    /// Budget for partitioning `H` exactly; larger `H` is split greedily.
    pub budget: SolveBudget,
}

impl Default for FineOptions {
    fn default() -> Self {
        Self {
            policy: PreconditionPolicy::Enforce,
            budget: SolveBudget::with_max_vertices(MAX_EXACT_VERTICES.min(20)),
        }
    }
}

pub fn cycle_bound(r: usize) -> f64 {
    400.0 * (r as f64).powi(4) * (r as f64).ln()
}

/// Covers `W` by disjoint monochromatic cycles inside `U ∪ W` using at most
/// `3|W|` vertices, refusing inputs whose preconditions fail.
pub fn fine_absorb(g: &ColoredGraph, u: &VertexSet, w: &VertexSet, t: usize, r: usize) -> Result<CycleCover> {
    fine_absorb_with(g, u, w, t, r, &FineOptions::default()).map(|(c, _)| c)
}

pub fn fine_absorb_with(
    g: &ColoredGraph,
    u: &VertexSet,
    w: &VertexSet,
    t: usize,
    r: usize,
    opts: &FineOptions,
) -> Result<(CycleCover, FineReport)> {
    if r == 0 || r > g.r() {
        return Err(Error::param(format!("r = {r} must lie in 1..={}", g.r())));
    }
    if t == 0 {
        return Err(Error::param("t must be at least 1"));
    }
    if w.len() > t {
        return Err(Error::pre(format!("|W| = {} exceeds t = {t}", w.len())));
    }
    if !u.is_disjoint(w) {
        return Err(Error::param("U and W must be disjoint"));
    }
    let n = g.n();
    if w.max().is_some_and(|v| v >= n) || u.max().is_some_and(|v| v >= n) {
        return Err(Error::param("vertex set exceeds the host"));
    }
    let ub = u.to_bitset(n);

    let degree_threshold = 6.0 * (r as f64).powi(r as i32 + 1) * t as f64;
    let mut min_common_degree = None;
    let mut degree_violation = None;
    if w.len() >= r {
        for s in Colex::new(w.len(), r) {
            let set: Vec<Vertex> = s.iter().map(|&i| w.as_slice()[i]).collect();
            let d = common_degree(g, Layer::All, &set, &ub);
            min_common_degree = Some(min_common_degree.map_or(d, |m: usize| m.min(d)));
            if (d as f64) < degree_threshold && degree_violation.is_none() {
                degree_violation = Some(set);
            }
        }
    }
    let density = check_density(g, u, t);
    if opts.policy == PreconditionPolicy::Enforce {
        if let Some(s) = &degree_violation {
            return Err(Error::pre(format!(
                "r-set {s:?} has fewer than {degree_threshold} common neighbours in U"
            )));
        }
        if let DensityCheck::Violated { x, y } = &density {
            return Err(Error::pre(format!("X = {x:?} and Y = {y:?} span no edge")));
        }
    }

    let h = build_auxiliary_graph(g, u, w, t)?;
    let alpha_h = if w.len() <= 64 {
        Some(independence_number(&h.simple())?)
    } else {
        None
    };
    let preconditions = degree_violation.is_none() && density.holds();
    if let Some(a) = alpha_h {
        if preconditions && w.len() >= 2 * r && a > 2 * r - 1 {
            return Err(Error::internal(format!(
                "α(H) = {a} exceeds 2r - 1 although the preconditions hold"
            )));
        }
    }

    let (blocks, exact_h) = partition_h(&h, g.r(), &opts.budget)?;
    let cover = expand(&h, &blocks, w.len())?;

    let mut outside = u.union(w);
    outside = outside.complement(n);
    let report = verify_cover(g, &cover, w, &outside);
    if !report.valid {
        return Err(Error::internal(format!(
            "expanded cover is invalid: {:?}",
            report.violations
        )));
    }
    if cover.vertex_count() > 3 * w.len() {
        return Err(Error::internal("expanded cover uses more than 3|W| vertices"));
    }
    let fine = FineReport {
        t,
        r,
        degree_threshold,
        min_common_degree,
        degree_violation,
        density,
        aux_edges: h.edges.len(),
        alpha_h,
        exact_h,
        cycles: cover.len(),
        covered: cover.vertex_count(),
        cycle_bound: cycle_bound(r),
    };
    Ok((cover, fine))
}

/// Searches for disjoint `X, Y ⊆ U` of size `t` with no edge between them.
pub fn check_density(g: &ColoredGraph, u: &VertexSet, t: usize) -> DensityCheck {
    let us = u.as_slice();
    let m = us.len();
    if 2 * t > m {
        return DensityCheck::Exact;
    }
    if m <= DENSITY_EXACT_LIMIT {
        let nbr: Vec<u32> = us
            .iter()
            .map(|&a| {
                us.iter()
                    .enumerate()
                    .filter(|&(_, &b)| g.has_edge(a, b))
                    .fold(0u32, |acc, (j, _)| acc | 1 << j)
            })
            .collect();
        let full = if m == 32 { u32::MAX } else { (1u32 << m) - 1 };
        for xs in Colex::new(m, t) {
            let xm = xs.iter().fold(0u32, |acc, &i| acc | 1 << i);
            let reach = xs.iter().fold(xm, |acc, &i| acc | nbr[i]);
            let rest = full & !reach;
            if rest.count_ones() as usize >= t {
                let y = (0..m).filter(|&j| rest >> j & 1 == 1).take(t).map(|j| us[j]).collect();
                return DensityCheck::Violated {
                    x: xs.iter().map(|&i| us[i]).collect(),
                    y,
                };
            }
        }
        return DensityCheck::Exact;
    }
    let ub = u.to_bitset(g.n());
    let dense = us.iter().all(|&a| m - 1 - g.degree_into(Layer::All, a, &ub) < t);
    if dense {
        DensityCheck::Surrogate
    } else {
        DensityCheck::Unverified
    }
}

/// Partitions `H` into monochromatic cycles on positions of `W`.
fn partition_h(h: &AuxiliaryGraph, r: usize, budget: &SolveBudget) -> Result<(Vec<Cycle>, bool)> {
    let k = h.w.len();
    if k <= budget.max_vertices.min(MAX_EXACT_VERTICES) {
        match solve_masks(&h.masks(r)?, budget) {
            Ok((_, cycles, _)) => return Ok((cycles, true)),
            Err(Error::ExactnessUnavailable(msg)) => log::debug!("exact partition of H abandoned: {msg}"),
            Err(e) => return Err(e),
        }
    }
    let mut adj = vec![vec![FixedBitSet::with_capacity(k); k]; r];
    for e in &h.edges {
        let (a, b) = (
            h.w.as_slice().binary_search(&e.u).unwrap(),
            h.w.as_slice().binary_search(&e.v).unwrap(),
        );
        adj[e.color][a].insert(b);
        adj[e.color][b].insert(a);
    }
    Ok((greedy_partition(k, &adj), false))
}

/// Repeatedly removes the longest monochromatic cycle found by degree-guided
/// path growth, then pairs what is left by a maximum matching.
fn greedy_partition(k: usize, adj: &[Vec<FixedBitSet>]) -> Vec<Cycle> {
    const STARTS: usize = 8;
    let mut left = FixedBitSet::with_capacity(k);
    left.insert_range(..);
    let mut out = Vec::new();
    loop {
        let mut best: Option<(Vec<usize>, usize)> = None;
        for (c, rows) in adj.iter().enumerate() {
            let deg = |v: usize| rows[v].intersection(&left).count();
            let mut starts: Vec<usize> = left.ones().filter(|&v| deg(v) >= 2).collect();
            starts.sort_by_key(|&v| (deg(v), v));
            for &s in starts.iter().take(STARTS) {
                let mut path = vec![s];
                let mut on = FixedBitSet::with_capacity(k);
                on.insert(s);
                loop {
                    let cur = *path.last().unwrap();
                    let next = rows[cur]
                        .intersection(&left)
                        .filter(|&x| !on.contains(x))
                        .min_by_key(|&x| (rows[x].intersection(&left).filter(|&y| !on.contains(y)).count(), x));
                    match next {
                        Some(x) => {
                            on.insert(x);
                            path.push(x);
                        }
                        None => break,
                    }
                }
                let last = *path.last().unwrap();
                if let Some(i) = (0..path.len().saturating_sub(2)).find(|&i| rows[last].contains(path[i])) {
                    let cyc = path.split_off(i);
                    if best.as_ref().is_none_or(|(b, _)| cyc.len() > b.len()) {
                        best = Some((cyc, c));
                    }
                }
            }
        }
        match best {
            Some((cyc, c)) if cyc.len() >= 3 => {
                for &v in &cyc {
                    left.set(v, false);
                }
                out.push(Cycle::new(cyc, Some(c)));
            }
            _ => break,
        }
    }
    let verts: Vec<usize> = left.ones().collect();
    let pos: HashMap<usize, usize> = verts.iter().enumerate().map(|(i, &v)| (v, i)).collect();
    let mut lists = vec![Vec::new(); verts.len()];
    for (i, &v) in verts.iter().enumerate() {
        for rows in adj {
            for x in rows[v].intersection(&left) {
                if !lists[i].contains(&pos[&x]) {
                    lists[i].push(pos[&x]);
                }
            }
        }
    }
    let mate = maximum_matching(&lists, None);
    for (i, j) in pairs(&mate) {
        let (a, b) = (verts[i], verts[j]);
        let c = adj.iter().position(|rows| rows[a].contains(b)).unwrap();
        left.set(a, false);
        left.set(b, false);
        out.push(Cycle::new(vec![a, b], Some(c)));
    }
    out.extend(left.ones().map(Cycle::vertex));
    out
}

/// Replaces every edge of every cycle of `H` by a fresh path through `U`.
fn expand(h: &AuxiliaryGraph, blocks: &[Cycle], w_len: usize) -> Result<CycleCover> {
    let ws = h.w.as_slice();
    let index = h.index();
    let mut used = std::collections::HashSet::new();
    let mut cover = CycleCover::default();
    for block in blocks {
        let vs: Vec<Vertex> = block.vertices().iter().map(|&i| ws[i]).collect();
        if vs.len() == 1 {
            cover.push(Cycle::vertex(vs[0]));
            continue;
        }
        let c = block
            .color()
            .ok_or_else(|| Error::internal("cycle of H without colour"))?;
        let k = vs.len();
        let mut path = vec![vs[0]];
        for i in 0..k {
            let (a, b) = (vs[i], vs[(i + 1) % k]);
            let e = &h.edges[*index
                .get(&(a.min(b), a.max(b), c))
                .ok_or_else(|| Error::internal(format!("{a}-{b} is not a colour-{c} edge of H")))?];
            match &e.witness {
                Witness::Connectors(cs) => {
                    let &x = cs
                        .iter()
                        .find(|x| !used.contains(*x))
                        .ok_or_else(|| exhausted(w_len, h.t))?;
                    used.insert(x);
                    path.push(x);
                }
                Witness::Matching(ms) => {
                    let &(x, y) = ms
                        .iter()
                        .find(|(x, y)| !used.contains(x) && !used.contains(y))
                        .ok_or_else(|| exhausted(w_len, h.t))?;
                    used.insert(x);
                    used.insert(y);
                    // Stored as `e.u x y e.v`.
                    if a == e.u {
                        path.extend([x, y]);
                    } else {
                        path.extend([y, x]);
                    }
                }
            }
            if i + 1 < k {
                path.push(b);
            }
            if path.len() > 3 * (i + 2).min(k) {
                return Err(Error::internal("expanded path grew beyond 3 vertices per step"));
            }
        }
        cover.push(Cycle::new(path, Some(c)));
    }
    Ok(cover)
}

fn exhausted(w_len: usize, t: usize) -> Error {
    // Each expansion uses at most two vertices of U, so 2t witnesses suffice
    // whenever t ≥ |W|.
    Error::internal(format!("witness exhausted with |W| = {w_len} ≤ t = {t}"))
}
