use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::cover::{Cycle, CycleCover};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Layer, Vertex, VertexSet};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ApproxCover {
    pub cover: CycleCover,
    /// Vertices of `W` left uncovered.
    pub leftover: VertexSet,
    /// `K/p` with `K = 4000 r⁴/β`: the leftover size a typical graph admits.
    /// Recorded for comparison, not guaranteed.
    pub target: f64,
    /// `3r²`.
    pub max_cycles: usize,
}

/// Greedily covers most of `W` by at most `3r²` disjoint monochromatic cycles
/// alternating between `W` and `U`.
///
/// Each cycle grows a colour-`c` path `w₀ u₀ w₁ u₁ …` whose `u`'s are unused
/// common neighbours in `U`, then closes it at the last `wᵢ` sharing an unused
/// colour-`c` neighbour with `w₀`. Colours and starting points are tried in
/// turn and the cycle covering most of `W` is kept.
pub fn approx_cover(
    g: &ColoredGraph,
    u: &VertexSet,
    w: &VertexSet,
    beta: f64,
    p: f64,
    r: usize,
) -> Result<ApproxCover> {
    if !u.is_disjoint(w) {
        return Err(Error::param("U and W must be disjoint"));
    }
    if !(beta > 0.0 && beta < 1.0) || !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!(
            "need β ∈ (0,1) and p ∈ (0,1], got β = {beta}, p = {p}"
        )));
    }
    if r == 0 || r > g.r() {
        return Err(Error::param(format!("r = {r} must lie in 1..={}", g.r())));
    }
    let n = g.n();
    let max_cycles = 3 * r * r;
    let target = 4000.0 * (r as f64).powi(4) / beta / p;
    let mut avail = u.to_bitset(n);
    let mut open = w.to_bitset(n);
    let mut cover = CycleCover::default();
    while cover.len() < max_cycles {
        let mut best: Option<(usize, Vec<Vertex>, usize)> = None;
        for c in 0..r {
            if let Some((hits, cyc)) = grow(g, Layer::Color(c), &avail, &open) {
                if best.as_ref().is_none_or(|b| hits > b.0) {
                    best = Some((hits, cyc, c));
                }
            }
        }
        let Some((_, cyc, c)) = best else { break };
        for &v in &cyc {
            avail.set(v, false);
            open.set(v, false);
        }
        cover.push(Cycle::new(cyc, Some(c)));
    }
    Ok(ApproxCover {
        leftover: VertexSet::from_bitset(&open),
        cover,
        target,
        max_cycles,
    })
}

fn first_common(a: &FixedBitSet, b: &FixedBitSet, c: &FixedBitSet) -> Option<usize> {
    a.as_slice()
        .iter()
        .zip(b.as_slice())
        .zip(c.as_slice())
        .enumerate()
        .find_map(|(i, ((x, y), z))| {
            let m = x & y & z;
            (m != 0).then(|| i * usize::BITS as usize + m.trailing_zeros() as usize)
        })
}

/// Best alternating cycle in one colour; returns `(|cycle ∩ W|, cycle)`.
fn grow(g: &ColoredGraph, lay: Layer, avail: &FixedBitSet, open: &FixedBitSet) -> Option<(usize, Vec<Vertex>)> {
    const STARTS: usize = 3;
    let deg = |v: Vertex| g.row(lay, v).intersection_count(avail);
    let mut starts: Vec<Vertex> = open.ones().filter(|&v| deg(v) >= 2).collect();
    starts.sort_by_key(|&v| (std::cmp::Reverse(deg(v)), v));
    let mut best: Option<(usize, Vec<Vertex>)> = None;
    for &w0 in starts.iter().take(STARTS) {
        let mut free = avail.clone();
        let mut todo = open.clone();
        todo.set(w0, false);
        let mut ws = vec![w0];
        let mut us: Vec<Vertex> = Vec::new();
        loop {
            let cur = *ws.last().unwrap();
            let step = todo
                .ones()
                .filter_map(|x| first_common(g.row(lay, cur), g.row(lay, x), &free).map(|m| (x, m)))
                .max_by_key(|&(x, _)| (deg(x), std::cmp::Reverse(x)));
            let Some((x, m)) = step else { break };
            free.set(m, false);
            todo.set(x, false);
            us.push(m);
            ws.push(x);
        }
        // Close at the last w that still shares a free neighbour with w₀.
        let closed = (1..ws.len())
            .rev()
            .find_map(|i| first_common(g.row(lay, ws[i]), g.row(lay, w0), &free).map(|m| (i, m)));
        if let Some((i, m)) = closed {
            let mut cyc = Vec::with_capacity(2 * i + 2);
            for j in 0..i {
                cyc.push(ws[j]);
                cyc.push(us[j]);
            }
            cyc.push(ws[i]);
            cyc.push(m);
            if best.as_ref().is_none_or(|b| i + 1 > b.0) {
                best = Some((i + 1, cyc));
            }
        }
    }
    best
}
