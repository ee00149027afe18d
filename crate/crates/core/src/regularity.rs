//! p-density, lower regularity, super-regularity and one-sided inheritance
//! for pairs of vertex sets.
//!
//! Functions take plain [`Graph`]s; for a coloured host pass a colour layer as
//! `G` and the full graph as the ambient `Γ`.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::graph::{Graph, Vertex, VertexSet};
use crate::rng::{self, Purpose};

/// Largest side for which exhaustive regularity checks are allowed.
pub const EXHAUSTIVE_LIMIT: usize = 14;

/// Numeric knobs of the regularity machinery.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct RegularityParams {
    pub eps: f64,
    pub d: f64,
    pub p: f64,
    /// Upper-uniformity set fraction.
    pub eta: f64,
    /// Upper-uniformity density factor, at least 1.
    pub upper_d: f64,
    /// Component pruning fraction.
    pub gamma: f64,
    pub buffer_fraction: f64,
}

impl Default for RegularityParams {
    fn default() -> Self {
        Self {
            eps: 0.1,
            d: 0.5,
            p: 0.3,
            eta: 0.1,
            upper_d: 2.0,
            gamma: 0.25,
            buffer_fraction: 1.0 / 50.0,
        }
    }
}

impl RegularityParams {
    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("eps", self.eps),
            ("d", self.d),
            ("p", self.p),
            ("eta", self.eta),
            ("gamma", self.gamma),
            ("buffer_fraction", self.buffer_fraction),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(format!("{name} = {v} outside (0, 1)")));
            }
        }
        if self.upper_d < 1.0 {
            return Err(Error::param(format!(
                "upper-uniformity factor {} below 1",
                self.upper_d
            )));
        }
        Ok(())
    }
}

/// `e(A, B) / (p|A||B|)`.
pub fn p_density(g: &Graph, p: f64, a: &VertexSet, b: &VertexSet) -> Result<f64> {
    if a.is_empty() || b.is_empty() {
        return Err(Error::param("p-density needs nonempty sides"));
    }
    if !a.is_disjoint(b) {
        return Err(Error::param("p-density needs disjoint sides"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    let bb = b.to_bitset(g.n());
    let e: usize = a.iter().map(|u| g.row(u).intersection_count(&bb)).sum();
    Ok(e as f64 / (p * a.len() as f64 * b.len() as f64))
}

/// Smallest admissible subset size `⌈ε|X|⌉`, never below one.
pub fn min_subset_size(eps: f64, size: usize) -> usize {
    ((eps * size as f64 - 1e-9).ceil().max(1.0) as usize).min(size.max(1))
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum RegularityMode {
    /// Every admissible subset of the smaller-side choice is examined.
    Exhaustive,
    /// A one-sided search over `samples` candidate subsets per side.
    Sampled { samples: usize, seed: u64 },
}

impl RegularityMode {
    /// Exhaustive when both sides are small enough, sampled otherwise.
    pub fn auto(a: usize, b: usize, samples: usize, seed: u64) -> Self {
        if a <= EXHAUSTIVE_LIMIT && b <= EXHAUSTIVE_LIMIT {
            Self::Exhaustive
        } else {
            Self::Sampled { samples, seed }
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RegularityVerdict {
    /// Exhaustive: the pair is regular. Sampled: no witness was found.
    pub regular: bool,
    pub exhaustive: bool,
    /// Subsets `(A', B')` of admissible size with p-density below `d - ε`.
    pub witness: Option<(VertexSet, VertexSet)>,
    /// Smallest p-density among the subset pairs examined.
    pub min_density: f64,
}

/// The bipartite graph between `A` and `B` with local indices.
struct Bipartite {
    a: Vec<Vertex>,
    b: Vec<Vertex>,
    /// `a_rows[i]` = neighbours of `a[i]` among `b` (local indices).
    a_rows: Vec<FixedBitSet>,
    b_rows: Vec<FixedBitSet>,
}

impl Bipartite {
    fn new(g: &Graph, a: &VertexSet, b: &VertexSet) -> Self {
        let a_rows = a
            .iter()
            .map(|u| {
                let mut row = FixedBitSet::with_capacity(b.len());
                for (j, v) in b.iter().enumerate() {
                    if g.has_edge(u, v) {
                        row.insert(j);
                    }
                }
                row
            })
            .collect::<Vec<_>>();
        let mut b_rows = vec![FixedBitSet::with_capacity(a.len()); b.len()];
        for (i, row) in a_rows.iter().enumerate() {
            for j in row.ones() {
                b_rows[j].insert(i);
            }
        }
        Self {
            a: a.as_slice().to_vec(),
            b: b.as_slice().to_vec(),
            a_rows,
            b_rows,
        }
    }

    fn flipped(&self) -> Self {
        Self {
            a: self.b.clone(),
            b: self.a.clone(),
            a_rows: self.b_rows.clone(),
            b_rows: self.a_rows.clone(),
        }
    }

    /// For a fixed `A'` the sparsest `B'` of size `k` is the `k` vertices of
    /// `B` with fewest neighbours in `A'`. Returns `(edges, B' local ids)`.
    fn sparsest_partner(&self, a_sub: &FixedBitSet, k: usize) -> (usize, Vec<usize>) {
        let mut degs: Vec<(usize, usize)> = self
            .b_rows
            .iter()
            .enumerate()
            .map(|(j, row)| (row.intersection_count(a_sub), j))
            .collect();
        degs.select_nth_unstable(k - 1);
        let mut chosen: Vec<(usize, usize)> = degs[..k].to_vec();
        chosen.sort_unstable_by_key(|&(_, j)| j);
        (
            chosen.iter().map(|&(d, _)| d).sum(),
            chosen.iter().map(|&(_, j)| j).collect(),
        )
    }
}

/// Lower `(ε, d, p)`-regularity of `(A, B)` in `g`: every `A' ⊆ A`,
/// `B' ⊆ B` with `|A'| ≥ ε|A|`, `|B'| ≥ ε|B|` has p-density at least `d - ε`.
pub fn is_regular_pair(
    g: &Graph,
    p: f64,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    d: f64,
    mode: &RegularityMode,
) -> Result<RegularityVerdict> {
    if !a.is_disjoint(b) {
        return Err(Error::param("regular pairs need disjoint sides"));
    }
    if !(p > 0.0 && p <= 1.0) {
        return Err(Error::param(format!("p = {p} outside (0, 1]")));
    }
    if eps <= 0.0 {
        return Err(Error::param("eps must be positive"));
    }
    let threshold = d - eps;
    if a.is_empty() || b.is_empty() {
        // An empty side has density zero.
        let regular = threshold <= 0.0;
        return Ok(RegularityVerdict {
            regular,
            exhaustive: true,
            witness: (!regular).then(|| (a.clone(), b.clone())),
            min_density: 0.0,
        });
    }
    if eps * a.len() as f64 > a.len() as f64 + 1e-9 || eps * b.len() as f64 > b.len() as f64 + 1e-9 {
        // No subset is large enough to be tested.
        return Ok(RegularityVerdict {
            regular: true,
            exhaustive: true,
            witness: None,
            min_density: f64::INFINITY,
        });
    }
    match mode {
        RegularityMode::Exhaustive => {
            if a.len() > EXHAUSTIVE_LIMIT || b.len() > EXHAUSTIVE_LIMIT {
                return Err(Error::param(format!(
                    "exhaustive regularity needs sides of at most {EXHAUSTIVE_LIMIT} vertices (got {} and {}); use sampled mode",
                    a.len(),
                    b.len()
                )));
            }
            Ok(exhaustive(g, p, a, b, eps, threshold))
        }
        RegularityMode::Sampled { samples, seed } => Ok(sampled(g, p, a, b, eps, threshold, *samples, *seed)),
    }
}

fn density(edges: usize, p: f64, x: usize, y: usize) -> f64 {
    edges as f64 / (p * x as f64 * y as f64)
}

fn below(edges: usize, p: f64, x: usize, y: usize, threshold: f64) -> bool {
    (edges as f64) < threshold * p * x as f64 * y as f64 - 1e-9
}

fn exhaustive(g: &Graph, p: f64, a: &VertexSet, b: &VertexSet, eps: f64, threshold: f64) -> RegularityVerdict {
    let view = Bipartite::new(g, a, b);
    let sa = min_subset_size(eps, a.len());
    let sb = min_subset_size(eps, b.len());
    let mut min_density = f64::INFINITY;
    let mut witness = None;
    let mut sub = FixedBitSet::with_capacity(a.len());
    for mask in 1u32..1 << a.len() {
        let size = mask.count_ones() as usize;
        if size < sa {
            continue;
        }
        sub.clear();
        for i in 0..a.len() {
            if mask >> i & 1 == 1 {
                sub.insert(i);
            }
        }
        let (e, part) = view.sparsest_partner(&sub, sb);
        min_density = min_density.min(density(e, p, size, sb));
        if witness.is_none() && below(e, p, size, sb, threshold) {
            witness = Some((
                sub.ones().map(|i| view.a[i]).collect(),
                part.iter().map(|&j| view.b[j]).collect(),
            ));
        }
    }
    RegularityVerdict {
        regular: witness.is_none(),
        exhaustive: true,
        witness,
        min_density,
    }
}

#[allow(clippy::too_many_arguments)]
fn sampled(
    g: &Graph,
    p: f64,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    threshold: f64,
    samples: usize,
    seed: u64,
) -> RegularityVerdict {
    let forward = Bipartite::new(g, a, b);
    let backward = forward.flipped();
    let mut rng = rng::stream(seed, 0, Purpose::Screening);
    let mut min_density = f64::INFINITY;
    let mut witness = None;
    for (flip, view) in [(false, &forward), (true, &backward)] {
        let sa = min_subset_size(eps, view.a.len());
        let sb = min_subset_size(eps, view.b.len());
        let mut candidates: Vec<Vec<usize>> = Vec::new();
        // The sparsest-looking candidate: the lowest-degree vertices.
        let mut by_deg: Vec<usize> = (0..view.a.len()).collect();
        by_deg.sort_by_key(|&i| (view.a_rows[i].count_ones(..), i));
        candidates.push(by_deg[..sa].to_vec());
        let mut ids: Vec<usize> = (0..view.a.len()).collect();
        for _ in 0..samples {
            ids.shuffle(&mut rng);
            candidates.push(ids[..sa].to_vec());
        }
        for cand in candidates {
            let mut sub = FixedBitSet::with_capacity(view.a.len());
            cand.iter().for_each(|&i| sub.insert(i));
            let (e, part) = view.sparsest_partner(&sub, sb);
            min_density = min_density.min(density(e, p, sa, sb));
            if witness.is_none() && below(e, p, sa, sb, threshold) {
                let x: VertexSet = sub.ones().map(|i| view.a[i]).collect();
                let y: VertexSet = part.iter().map(|&j| view.b[j]).collect();
                witness = Some(if flip { (y, x) } else { (x, y) });
            }
        }
    }
    RegularityVerdict {
        regular: witness.is_none(),
        exhaustive: false,
        witness,
        min_density,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SuperRegularReport {
    pub regularity: RegularityVerdict,
    /// Vertices of `A` failing the degree condition into `B`.
    pub offenders_a: Vec<Vertex>,
    pub offenders_b: Vec<Vertex>,
    pub super_regular: bool,
}

/// Vertices `u ∈ A` with `deg_G(u, B) ≤ (d-ε) max{p|B|, deg_Γ(u, B)/2}`.
pub fn degree_offenders(
    g: &Graph,
    gamma: &Graph,
    p: f64,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    d: f64,
) -> Vec<Vertex> {
    let n = g.n();
    let bb = b.to_bitset(n);
    a.iter()
        .filter(|&u| {
            let deg = g.row(u).intersection_count(&bb) as f64;
            let ambient = gamma.row(u).intersection_count(&bb) as f64;
            deg <= (d - eps) * (p * b.len() as f64).max(ambient / 2.0)
        })
        .collect()
}

/// Super-regularity of `(A, B)` in `g ⊆ gamma`.
#[allow(clippy::too_many_arguments)]
pub fn is_super_regular(
    g: &Graph,
    gamma: &Graph,
    p: f64,
    a: &VertexSet,
    b: &VertexSet,
    eps: f64,
    d: f64,
    mode: &RegularityMode,
) -> Result<SuperRegularReport> {
    if g.n() != gamma.n() {
        return Err(Error::param("G and Γ must share a vertex set"));
    }
    let regularity = is_regular_pair(g, p, a, b, eps, d, mode)?;
    let offenders_a = degree_offenders(g, gamma, p, a, b, eps, d);
    let offenders_b = degree_offenders(g, gamma, p, b, a, eps, d);
    let super_regular = regularity.regular && offenders_a.is_empty() && offenders_b.is_empty();
    Ok(SuperRegularReport {
        regularity,
        offenders_a,
        offenders_b,
        super_regular,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct InheritanceReport {
    /// Vertices `z` for which `(N_Γ(z, X), Y)` is not regular in `G`.
    pub bad: VertexSet,
    /// `p⁻¹ log(e n / |X|)`; the bad set is expected to be a constant multiple
    /// of this in a typical random graph.
    pub scale: f64,
    pub exhaustive: bool,
}

/// Scans every vertex `z` of the host for one-sided inheritance of `(X, Y)`.
#[allow(clippy::too_many_arguments)]
pub fn inheritance_scan(
    g: &Graph,
    gamma: &Graph,
    x: &VertexSet,
    y: &VertexSet,
    eps_prime: f64,
    d: f64,
    p: f64,
    samples: usize,
    seed: u64,
) -> Result<InheritanceReport> {
    let pair_mode = RegularityMode::auto(x.len(), y.len(), samples, seed);
    let pair = is_regular_pair(g, p, x, y, eps_prime.min(1.0), d, &pair_mode)?;
    if !pair.regular {
        return Err(Error::pre("(X, Y) is not a regular pair"));
    }
    let xb = x.to_bitset(g.n());
    let mut bad = Vec::new();
    let mut exhaustive = true;
    for z in 0..g.n() {
        let mut nb = gamma.row(z).clone();
        nb.intersect_with(&xb);
        let nx = VertexSet::from_bitset(&nb);
        let mode = RegularityMode::auto(
            nx.len(),
            y.len(),
            samples,
            rng::derive_seed(seed, z as u64, Purpose::Screening),
        );
        exhaustive &= mode == RegularityMode::Exhaustive;
        if !is_regular_pair(g, p, &nx, y, eps_prime, d, &mode)?.regular {
            bad.push(z);
        }
    }
    let n = g.n() as f64;
    Ok(InheritanceReport {
        bad: VertexSet::from_iter_dedup(bad),
        scale: (std::f64::consts::E * n / x.len().max(1) as f64).ln() / p,
        exhaustive,
    })
}
