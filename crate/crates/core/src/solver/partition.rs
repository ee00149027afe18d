//! Exact minimum monochromatic cycle partition for small graphs.
//!
//! For every colour we tabulate, per vertex subset `S`, the endpoints of
//! colour-`c` Hamiltonian paths of `S` starting at `min(S)`. That decides in
//! O(1) whether `S` can be one block of a partition (a vertex, an edge or a
//! Hamiltonian cycle of one colour). The optimum is then a subset DP that
//! always branches on the lowest uncovered vertex, so every partition is
//! generated exactly once.

use std::time::{Duration, Instant};

use crate::cover::{Cycle, CycleCover};
use crate::error::{Error, Result};
use crate::graph::{ColoredGraph, Vertex};

/// Hard cap on the vertex count regardless of budget; the tables are indexed
/// by `u32` masks and grow as `2^n`.
pub const MAX_EXACT_VERTICES: usize = 24;

#[derive(Clone, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(default)]
pub struct SolveBudget {
    pub max_vertices: usize,
    /// Upper bound on DP transitions examined.
    pub node_limit: u64,
    pub time_limit: Duration,
}

impl Default for SolveBudget {
    fn default() -> Self {
        Self {
            max_vertices: 16,
            node_limit: 4_000_000_000,
            time_limit: Duration::from_secs(120),
        }
    }
}

impl SolveBudget {
    pub fn with_max_vertices(max_vertices: usize) -> Self {
        Self {
            max_vertices,
            ..Self::default()
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.max_vertices == 0 || self.node_limit == 0 || self.time_limit.is_zero() {
            return Err(Error::param("solve budget fields must be positive"));
        }
        if self.max_vertices > MAX_EXACT_VERTICES {
            return Err(Error::param(format!(
                "max_vertices {} exceeds the supported {MAX_EXACT_VERTICES}",
                self.max_vertices
            )));
        }
        Ok(())
    }
}

/// Per-colour adjacency masks on at most [`MAX_EXACT_VERTICES`] vertices. A pair
/// may carry several colours, so this also represents edge-coloured multigraphs.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ColorMasks {
    n: usize,
    adj: Vec<Vec<u32>>,
}

impl ColorMasks {
    pub fn new(n: usize, r: usize) -> Result<Self> {
        if n > MAX_EXACT_VERTICES {
            return Err(Error::ExactnessUnavailable(format!(
                "{n} vertices exceed the exact-search limit of {MAX_EXACT_VERTICES}"
            )));
        }
        Ok(Self {
            n,
            adj: vec![vec![0; n]; r],
        })
    }

    pub fn from_colored(g: &ColoredGraph) -> Result<Self> {
        let mut m = Self::new(g.n(), g.r())?;
        for (u, v, c) in g.edges() {
            m.add_edge(u, v, c);
        }
        Ok(m)
    }

    pub fn add_edge(&mut self, u: Vertex, v: Vertex, c: usize) {
        assert!(u != v && u < self.n && v < self.n);
        self.adj[c][u] |= 1 << v;
        self.adj[c][v] |= 1 << u;
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn r(&self) -> usize {
        self.adj.len()
    }

    pub fn has_edge(&self, u: Vertex, v: Vertex, c: usize) -> bool {
        self.adj[c][u] >> v & 1 == 1
    }

    /// Checks a cycle (vertices in cyclic order, colour) against these masks.
    pub fn is_cycle(&self, vertices: &[Vertex], color: Option<usize>) -> bool {
        let mut seen = 0u32;
        for &v in vertices {
            if v >= self.n || seen >> v & 1 == 1 {
                return false;
            }
            seen |= 1 << v;
        }
        match (vertices.len(), color) {
            (0, _) => false,
            (1, c) => c.is_none(),
            (_, None) => false,
            (2, Some(c)) => self.has_edge(vertices[0], vertices[1], c),
            (k, Some(c)) => (0..k).all(|i| self.has_edge(vertices[i], vertices[(i + 1) % k], c)),
        }
    }
}

/// The optimum and one optimal partition. Cycles are in canonical orientation
/// and sorted by their smallest vertex.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Solution {
    pub count: usize,
    pub cover: CycleCover,
    /// DP transitions examined.
    pub nodes: u64,
}

/// Minimum number of monochromatic cycles (vertices and edges included)
/// partitioning `g`. Among optimal partitions the one whose list of sorted
/// blocks is lexicographically smallest is returned.
pub fn min_mono_cycle_partition(g: &ColoredGraph, budget: &SolveBudget) -> Result<Solution> {
    budget.validate()?;
    if g.n() > budget.max_vertices {
        return Err(Error::ExactnessUnavailable(format!(
            "{} vertices exceed the exact budget of {}",
            g.n(),
            budget.max_vertices
        )));
    }
    let masks = ColorMasks::from_colored(g)?;
    let (count, cycles, nodes) = solve_masks(&masks, budget)?;
    Ok(Solution {
        count,
        cover: CycleCover::new(cycles),
        nodes,
    })
}

const NO_BLOCK: u8 = u8::MAX;
const SINGLE: u8 = u8::MAX - 1;

struct Tables {
    n: usize,
    /// `reach[c][S]`: endpoints of colour-`c` Hamiltonian paths of `S` from `min(S)`.
    reach: Vec<Vec<u32>>,
    /// Smallest colour for which `S` is a block, `SINGLE`, or `NO_BLOCK`.
    block: Vec<u8>,
    largest_block: u32,
}

impl Tables {
    fn build(g: &ColorMasks, clock: &mut Clock) -> Result<Self> {
        let n = g.n;
        let size = 1usize << n;
        let r = g.r();
        if r >= SINGLE as usize {
            return Err(Error::param("too many colours for the exact solver"));
        }
        let mut reach = vec![vec![0u32; size]; r];
        for (c, table) in reach.iter_mut().enumerate() {
            let adj = &g.adj[c];
            for v in 0..n {
                table[1 << v] = 1 << v;
            }
            for s in 1..size as u32 {
                let ends = table[s as usize];
                if ends == 0 {
                    continue;
                }
                clock.tick(1)?;
                let m = s.trailing_zeros();
                let above = !((2u32 << m) - 1);
                let mut e = ends;
                while e != 0 {
                    let v = e.trailing_zeros() as usize;
                    e &= e - 1;
                    let mut ext = adj[v] & !s & above;
                    while ext != 0 {
                        let w = ext.trailing_zeros();
                        ext &= ext - 1;
                        table[(s | 1 << w) as usize] |= 1 << w;
                    }
                }
            }
        }
        let mut block = vec![NO_BLOCK; size];
        let mut largest_block = 1;
        for s in 1..size as u32 {
            let k = s.count_ones();
            if k == 1 {
                block[s as usize] = SINGLE;
                continue;
            }
            let m = s.trailing_zeros() as usize;
            for c in 0..r {
                let ends = reach[c][s as usize];
                let ok = if k == 2 { ends != 0 } else { ends & g.adj[c][m] != 0 };
                if ok {
                    block[s as usize] = c as u8;
                    largest_block = largest_block.max(k);
                    break;
                }
            }
        }
        Ok(Self {
            n,
            reach,
            block,
            largest_block,
        })
    }

    /// A colour-`c` Hamiltonian cycle on `s`, read back from the reach table.
    fn cycle(&self, g: &ColorMasks, s: u32, c: usize) -> Vec<Vertex> {
        let m = s.trailing_zeros() as usize;
        let table = &self.reach[c];
        if s.count_ones() == 2 {
            return vec![m, (s & !(1 << m)).trailing_zeros() as usize];
        }
        let mut path = Vec::with_capacity(s.count_ones() as usize);
        let mut cur_set = s;
        // The last vertex must close the cycle back to m.
        let mut want = g.adj[c][m];
        loop {
            let cands = table[cur_set as usize] & want;
            let v = cands.trailing_zeros() as usize;
            debug_assert!(cands != 0, "reach table inconsistent");
            path.push(v);
            if v == m {
                break;
            }
            cur_set &= !(1 << v);
            want = g.adj[c][v];
        }
        path.reverse();
        Cycle::new(path, Some(c)).canonical().vertices().to_vec()
    }
}

struct Clock {
    nodes: u64,
    limit: u64,
    start: Instant,
    time_limit: Duration,
}

impl Clock {
    fn tick(&mut self, k: u64) -> Result<()> {
        let before = self.nodes;
        self.nodes += k;
        if self.nodes > self.limit {
            return Err(Error::ExactnessUnavailable(format!(
                "node limit {} reached",
                self.limit
            )));
        }
        if before >> 16 != self.nodes >> 16 && self.start.elapsed() > self.time_limit {
            return Err(Error::ExactnessUnavailable(format!(
                "time limit of {:?} reached",
                self.time_limit
            )));
        }
        Ok(())
    }
}

/// `true` if the sorted vertex list of `a` is lexicographically below that of `b`.
fn lex_less(mut a: u32, mut b: u32) -> bool {
    loop {
        match (a, b) {
            (0, 0) => return false,
            (0, _) => return true,
            (_, 0) => return false,
            _ => {}
        }
        let (x, y) = (a.trailing_zeros(), b.trailing_zeros());
        if x != y {
            return x < y;
        }
        a &= a - 1;
        b &= b - 1;
    }
}

/// Solves on raw colour masks; returns `(count, cycles, nodes)`.
pub fn solve_masks(g: &ColorMasks, budget: &SolveBudget) -> Result<(usize, Vec<Cycle>, u64)> {
    budget.validate()?;
    if g.n > budget.max_vertices {
        return Err(Error::ExactnessUnavailable(format!(
            "{} vertices exceed the exact budget of {}",
            g.n, budget.max_vertices
        )));
    }
    let mut clock = Clock {
        nodes: 0,
        limit: budget.node_limit,
        start: Instant::now(),
        time_limit: budget.time_limit,
    };
    let t = Tables::build(g, &mut clock)?;
    let n = t.n;
    let full: u32 = if n == 32 { u32::MAX } else { (1u32 << n) - 1 };
    let mut best = vec![0u8; 1usize << n];
    for mask in 1..=full {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let lower = mask.count_ones().div_ceil(t.largest_block) as u8;
        let mut opt = u8::MAX;
        // Larger blocks first: they reach the lower bound sooner.
        let mut sub = rest;
        let mut steps = 0u64;
        loop {
            steps += 1;
            let b = sub | low;
            if t.block[b as usize] != NO_BLOCK {
                let cand = 1 + best[(mask ^ b) as usize];
                if cand < opt {
                    opt = cand;
                    if opt == lower {
                        break;
                    }
                }
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        clock.tick(steps)?;
        best[mask as usize] = opt;
    }

    // Lexicographically smallest optimal partition.
    let mut cycles = Vec::new();
    let mut mask = full;
    while mask != 0 {
        let low = mask & mask.wrapping_neg();
        let rest = mask ^ low;
        let target = best[mask as usize] - 1;
        let mut chosen: Option<u32> = None;
        let mut sub = rest;
        loop {
            let b = sub | low;
            if t.block[b as usize] != NO_BLOCK
                && best[(mask ^ b) as usize] == target
                && chosen.is_none_or(|c| lex_less(b, c))
            {
                chosen = Some(b);
            }
            if sub == 0 {
                break;
            }
            sub = (sub - 1) & rest;
        }
        let b = chosen.ok_or_else(|| Error::internal("partition DP has no optimal block"))?;
        let cycle = match t.block[b as usize] {
            SINGLE => Cycle::vertex(b.trailing_zeros() as usize),
            c => Cycle::new(t.cycle(g, b, c as usize), Some(c as usize)),
        };
        debug_assert!(g.is_cycle(cycle.vertices(), cycle.color()));
        cycles.push(cycle);
        mask ^= b;
    }
    Ok((best[full as usize] as usize, cycles, clock.nodes))
}
