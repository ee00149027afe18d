//! Checks for the density properties a typical `G(n, p)` enjoys, and the
//! constructive extraction of vertices with atypical common neighbourhoods.
//!
//! All logarithms are natural.

use fixedbitset::FixedBitSet;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{common_degree, ColoredGraph, Layer, Vertex, VertexSet};

/// Tolerance `α`, proportion `β` and arity `k`, with the constants derived
/// from them.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DensityParams {
    pub alpha: f64,
    pub beta: f64,
    pub k: usize,
}

impl DensityParams {
    pub fn new(alpha: f64, beta: f64, k: usize) -> Result<Self> {
        let p = Self { alpha, beta, k };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.alpha > 0.0 && self.alpha < 1.0) {
            return Err(Error::param(format!("alpha = {} outside (0, 1)", self.alpha)));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::param(format!("beta = {} outside (0, 1)", self.beta)));
        }
        if self.k == 0 {
            return Err(Error::param("k must be at least 1"));
        }
        Ok(())
    }

    /// `C = 6/(α²β)`: the small side of a pair against a linear-size side.
    pub fn c(&self) -> f64 {
        6.0 / (self.alpha * self.alpha * self.beta)
    }

    /// `D = 9/α²`: pairs with both sides at least `D log n / p` are dense.
    pub fn d(&self) -> f64 {
        9.0 / (self.alpha * self.alpha)
    }

    /// `K = 12k/(α²β)`: the bad set has at most `K/p^k` vertices w.h.p.
    pub fn k_const(&self) -> f64 {
        12.0 * self.k as f64 / (self.alpha * self.alpha * self.beta)
    }
}

/// `2 exp(-α² n p / 3)`, the two-sided tail bound for `Bin(n, p)`.
pub fn chernoff_bound(n: usize, p: f64, alpha: f64) -> Result<f64> {
    if !(alpha > 0.0 && alpha < 1.5) {
        return Err(Error::param(format!("alpha = {alpha} outside (0, 3/2)")));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    Ok(2.0 * (-alpha * alpha * n as f64 * p / 3.0).exp())
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PairDensityReport {
    pub edges: usize,
    pub expected: f64,
    pub ratio: f64,
    pub pass: bool,
}

/// Compares `e(X, Y)` with `p|X||Y|`; passes iff the ratio lies in `[1-α, 1+α]`.
pub fn check_pair_density(
    g: &ColoredGraph,
    x: &VertexSet,
    y: &VertexSet,
    p: f64,
    alpha: f64,
) -> Result<PairDensityReport> {
    if x.is_empty() || y.is_empty() {
        return Err(Error::param("both sets must be nonempty"));
    }
    if !x.is_disjoint(y) {
        return Err(Error::param("X and Y overlap"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    if alpha < 0.0 {
        return Err(Error::param("alpha must be non-negative"));
    }
    let yb = y.to_bitset(g.n());
    let edges = g.edges_between(Layer::All, x, &yb);
    let expected = p * (x.len() * y.len()) as f64;
    let ratio = edges as f64 / expected;
    Ok(PairDensityReport {
        edges,
        expected,
        ratio,
        pass: ratio >= 1.0 - alpha && ratio <= 1.0 + alpha,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TripleReport {
    pub sum: usize,
    pub threshold: f64,
    /// `true` when the `72 ℓ log n` branch applies (`ℓ ≤ 6 log n / p²`).
    pub small_family: bool,
    pub pass: bool,
}

/// The threshold for `ℓ` pairs in an `n`-vertex graph.
pub fn triple_threshold(n: usize, ell: usize, p: f64) -> (f64, bool) {
    let ln = (n as f64).ln();
    let ell_f = ell as f64;
    if ell_f <= 6.0 * ln / (p * p) {
        (72.0 * ell_f * ln, true)
    } else {
        (6.0 * ell_f * ell_f * p * p, false)
    }
}

/// `Σ_{vw ∈ L} deg*({v, w}, Y)` against its threshold.
pub fn check_triple_sums(g: &ColoredGraph, pairs: &[(Vertex, Vertex)], y: &VertexSet, p: f64) -> Result<TripleReport> {
    let n = g.n();
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    if y.len() != 3 * pairs.len() {
        return Err(Error::param(format!("|Y| = {} but 3ℓ = {}", y.len(), 3 * pairs.len())));
    }
    if y.max().is_some_and(|v| v >= n) {
        return Err(Error::param("Y has a vertex out of range"));
    }
    let mut seen = FixedBitSet::with_capacity(n);
    for &(v, w) in pairs {
        if v == w || v >= n || w >= n {
            return Err(Error::param(format!("invalid pair {{{v}, {w}}}")));
        }
        for u in [v, w] {
            if seen.put(u) {
                return Err(Error::param(format!("pairs overlap at {u}")));
            }
            if y.contains(u) {
                return Err(Error::param(format!("pair vertex {u} lies in Y")));
            }
        }
    }
    let yb = y.to_bitset(n);
    let sum = pairs
        .iter()
        .map(|&(v, w)| common_degree(g, Layer::All, &[v, w], &yb))
        .sum();
    let (threshold, small_family) = triple_threshold(n, pairs.len(), p);
    Ok(TripleReport {
        sum,
        threshold,
        small_family,
        pass: sum as f64 <= threshold,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct BadSetReport {
    pub y: VertexSet,
    /// k-sets with too few common neighbours in `X`, pairwise disjoint.
    pub low: Vec<Vec<Vertex>>,
    /// k-sets with too many common neighbours in `X`, pairwise disjoint.
    pub high: Vec<Vec<Vertex>>,
    /// `K/p^k` with `β = |X|/n`; a typical-graph size bound, not enforced.
    pub size_bound: f64,
}

/// Iterates the `k`-subsets of `0..m` in colexicographic order.
pub struct Colex {
    comb: Vec<usize>,
    m: usize,
    done: bool,
}

impl Colex {
    pub fn new(m: usize, k: usize) -> Self {
        Self {
            comb: (0..k).collect(),
            m,
            done: k > m,
        }
    }
}

impl Iterator for Colex {
    type Item = Vec<usize>;

    fn next(&mut self) -> Option<Vec<usize>> {
        if self.done {
            return None;
        }
        let out = self.comb.clone();
        let k = self.comb.len();
        let mut i = 0;
        loop {
            if i == k {
                self.done = true;
                break;
            }
            let limit = if i + 1 < k { self.comb[i + 1] } else { self.m };
            if self.comb[i] + 1 < limit {
                self.comb[i] += 1;
                for (j, c) in self.comb.iter_mut().enumerate().take(i) {
                    *c = j;
                }
                break;
            }
            i += 1;
        }
        Some(out)
    }
}

/// Grows maximal matchings `M⁻`, `M⁺` of the `k`-sets outside `X` whose common
/// neighbourhood in `X` falls below `(1-α) p^k |X|` or above `(1+α) p^k |X|`,
/// and returns `Y = ⋃ M⁻ ∪ ⋃ M⁺`. By maximality every `k`-set outside `X ∪ Y`
/// is within the tolerance, whatever the graph.
pub fn find_bad_set(g: &ColoredGraph, x: &VertexSet, k: usize, alpha: f64, p: f64) -> Result<BadSetReport> {
    let domain = x.complement(g.n());
    if domain.len() < k {
        return Err(Error::param(format!(
            "the complement of X has {} vertices, fewer than k = {k}",
            domain.len()
        )));
    }
    find_bad_set_within(g, x, &domain, k, alpha, p)
}

/// As [`find_bad_set`], restricted to `k`-sets inside `domain \ X`.
pub fn find_bad_set_within(
    g: &ColoredGraph,
    x: &VertexSet,
    domain: &VertexSet,
    k: usize,
    alpha: f64,
    p: f64,
) -> Result<BadSetReport> {
    if x.is_empty() {
        return Err(Error::param("X must be nonempty"));
    }
    if k == 0 {
        return Err(Error::param("k must be at least 1"));
    }
    if !(0.0..=1.0).contains(&p) {
        return Err(Error::param(format!("p = {p} outside [0, 1]")));
    }
    let n = g.n();
    let xb = x.to_bitset(n);
    let outside: Vec<Vertex> = domain.iter().filter(|&v| !x.contains(v)).collect();
    let expected = p.powi(k as i32) * x.len() as f64;
    let (lo, hi) = ((1.0 - alpha) * expected, (1.0 + alpha) * expected);

    let mut used_low = FixedBitSet::with_capacity(n);
    let mut used_high = FixedBitSet::with_capacity(n);
    let mut low = Vec::new();
    let mut high = Vec::new();
    let mut set = vec![0; k];
    for idx in Colex::new(outside.len(), k) {
        for (s, &i) in set.iter_mut().zip(&idx) {
            *s = outside[i];
        }
        let free_low = set.iter().all(|&v| !used_low.contains(v));
        let free_high = set.iter().all(|&v| !used_high.contains(v));
        if !free_low && !free_high {
            continue;
        }
        let deg = common_degree(g, Layer::All, &set, &xb) as f64;
        if deg < lo && free_low {
            set.iter().for_each(|&v| used_low.insert(v));
            low.push(set.clone());
        } else if deg > hi && free_high {
            set.iter().for_each(|&v| used_high.insert(v));
            high.push(set.clone());
        }
    }
    let y = low.iter().chain(&high).flatten().copied().collect();
    let beta = x.len() as f64 / n as f64;
    let size_bound = if alpha > 0.0 && alpha < 1.0 && beta < 1.0 && p > 0.0 {
        DensityParams { alpha, beta, k }.k_const() / p.powi(k as i32)
    } else {
        f64::INFINITY
    };
    Ok(BadSetReport {
        y,
        low,
        high,
        size_bound,
    })
}
