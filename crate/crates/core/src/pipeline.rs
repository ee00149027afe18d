//! End-to-end partitioning: a robust cycle partition of most of the graph,
//! plus absorption of the exceptional vertices it leaves out.
//!
//! The regularity lemma is replaced by an equitable random partition into a
//! few clusters whose pairs are screened for density and (sampled)
//! regularity in each colour. Every output is verified; failures at desk
//! scale come back as stage errors.

use fixedbitset::FixedBitSet;
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::absorption::{absorb_pipeline_with, AbsorbOptions, AbsorbReport, AbsorptionParams};
use crate::allocation::{allocate_cycles_with, AllocationMode};
use crate::cover::{verify_cover, verify_partition, Cycle, CycleCover};
use crate::embed::{embed_blueprint, Blueprint, EmbedBudget};
use crate::error::{Error, Result, StageExt};
use crate::graph::{ColoredGraph, Layer, Vertex, VertexSet};
use crate::reduced::{choose_components, perfect_matching, ReducedGraph};
use crate::regularity::{inheritance_scan, is_regular_pair, p_density, RegularityMode};
use crate::rng::{self, Purpose};
use crate::solver::{min_mono_cycle_partition, SolveBudget};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct PipelineParams {
    /// Number of clusters `t'` before pruning; by default about one per
    /// hundred vertices, even, between 4 and 16.
    pub clusters: Option<usize>,
    /// Regularity parameter for screening pairs, pruning and `V^exc`.
    pub eps: f64,
    /// Tolerance for `V^deg`.
    pub eps_deg: f64,
    /// Regularity parameter for one-sided inheritance (`V^inh`).
    pub eps_inherit: f64,
    /// Component pruning fraction.
    pub gamma: f64,
    /// Probability of putting a typical vertex into `U`.
    pub u_probability: f64,
    /// Subsets tried per side in sampled regularity checks.
    pub samples: usize,
    /// Edge probability; estimated from the edge count when absent.
    pub p: Option<f64>,
    pub seed: u64,
    pub allocation: AllocationMode,
    pub embed: EmbedBudget,
    /// Graphs up to `budget.max_vertices` vertices are solved exactly.
    pub budget: SolveBudget,
    pub absorb: AbsorbOptions,
}

impl Default for PipelineParams {
    fn default() -> Self {
        Self {
            clusters: None,
            eps: 0.4,
            eps_deg: 0.5,
            eps_inherit: 0.45,
            gamma: 0.25,
            u_probability: 0.25,
            samples: 8,
            p: None,
            seed: 0,
            allocation: AllocationMode::Relaxed,
            embed: EmbedBudget::default(),
            budget: SolveBudget::default(),
            absorb: AbsorbOptions::default(),
        }
    }
}

impl PipelineParams {
    pub fn validate(&self) -> Result<()> {
        if self.clusters.is_some_and(|c| c < 2) {
            return Err(Error::param("at least two clusters are needed"));
        }
        for (name, v) in [
            ("eps", self.eps),
            ("eps_deg", self.eps_deg),
            ("eps_inherit", self.eps_inherit),
            ("gamma", self.gamma),
            ("u_probability", self.u_probability),
        ] {
            if !(v > 0.0 && v < 1.0) {
                return Err(Error::param(format!("{name} = {v} outside (0, 1)")));
            }
        }
        if let Some(p) = self.p {
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::param(format!("p = {p} outside (0, 1]")));
            }
        }
        if self.samples == 0 {
            return Err(Error::param("samples must be positive"));
        }
        self.budget.validate()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct PlanReport {
    pub p: f64,
    pub clusters_before: usize,
    pub clusters_kept: usize,
    /// Colour-pair edges of the reduced multigraph `T` before simplification.
    pub regular_pairs: usize,
    pub components: usize,
    pub dropped: usize,
    pub exceptional: usize,
    pub atypical_degree: usize,
    pub non_inheriting: usize,
    pub w: usize,
    pub u: usize,
}

/// `U`, `W` and everything needed to partition `g - (W ∪ U⁺ ∪ U')` for any
/// later choice of `U' ⊆ U` and small `U⁺`.
#[derive(Clone, Debug)]
pub struct PartitionPlan {
    pub u: VertexSet,
    pub w: VertexSet,
    pub reduced: ReducedGraph,
    /// `V_1, ..., V_t` of the kept clusters.
    pub clusters: Vec<VertexSet>,
    pub report: PlanReport,
    r: usize,
    allocation: AllocationMode,
    embed: EmbedBudget,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ClosureReport {
    pub sizes: Vec<usize>,
    pub cycles: usize,
    /// `4r² + 1`.
    pub bound: usize,
}

/// Builds the plan: random equitable clusters, reduced graph, components,
/// matching, and the exceptional set `W` with reservoir `U`.
pub fn partition_pipeline(g: &ColoredGraph, r: usize, params: &PipelineParams) -> Result<PartitionPlan> {
    params.validate()?;
    if r == 0 || r != g.r() {
        return Err(Error::param(format!(
            "r = {r} does not match the host's {} colours",
            g.r()
        )));
    }
    let n = g.n();
    let tp = params.clusters.unwrap_or_else(|| default_clusters(n));
    if n < 2 * tp {
        return Err(Error::param(format!("{n} vertices cannot fill {tp} clusters")));
    }
    let p = match params.p {
        Some(p) => p,
        None => estimate_p(g)?,
    };
    let d = 1.0 / r as f64;

    // Equitable random clusters.
    let mut order: Vec<Vertex> = (0..n).collect();
    order.shuffle(&mut rng::stream(params.seed, 0, Purpose::Clusters));
    let all: Vec<VertexSet> = (0..tp)
        .map(|i| VertexSet::from_iter_dedup(order[i * n / tp..(i + 1) * n / tp].iter().copied()))
        .collect();

    // Reduced multigraph: colour c on ij when (V_i, V_j) passes the density
    // and sampled regularity screen; keep the densest such colour.
    let mut t_graph = ColoredGraph::new(tp, r);
    let mut regular_pairs = 0;
    for i in 0..tp {
        for j in i + 1..tp {
            let mut best: Option<(f64, usize)> = None;
            for c in 0..r {
                let layer = g.layer(Layer::Color(c));
                let dens = p_density(layer, p, &all[i], &all[j])?;
                if dens < d - params.eps {
                    continue;
                }
                let seed = rng::derive_seed(
                    params.seed,
                    (i * tp + j) as u64 * r as u64 + c as u64,
                    Purpose::Screening,
                );
                let mode = RegularityMode::Sampled {
                    samples: params.samples,
                    seed,
                };
                if is_regular_pair(layer, p, &all[i], &all[j], params.eps, d, &mode)?.regular {
                    regular_pairs += 1;
                    if best.is_none_or(|(b, _)| dens > b) {
                        best = Some((dens, c));
                    }
                }
            }
            if let Some((_, c)) = best {
                t_graph.add_edge(i, j, c)?;
            }
        }
    }

    // Prune low-degree clusters, then one more for an even count.
    let min_keep = (1.0 - params.eps.sqrt()) * tp as f64;
    let mut kept: Vec<usize> = (0..tp)
        .filter(|&i| t_graph.plain().degree(i) as f64 >= min_keep)
        .collect();
    if kept.len() % 2 == 1 {
        let sub = t_graph.induced(&kept);
        let worst = (0..kept.len()).min_by_key(|&a| (sub.plain().degree(a), a)).unwrap();
        kept.remove(worst);
    }
    if kept.len() < 2 {
        return Err(
            Error::Infeasible(format!("only {} clusters survive pruning", kept.len())).in_stage("reduced-graph"),
        );
    }
    let t = kept.len();
    let t_prime = t_graph.induced(&kept);
    let delta = t_prime.plain().min_degree() as f64 / t as f64;
    let mut reduced = choose_components(&t_prime, delta, params.gamma.min(delta)).stage("choose-components")?;
    let matching = perfect_matching(&reduced).stage("perfect-matching")?;
    reduced.set_matching(matching.clone())?;
    let clusters: Vec<VertexSet> = kept.iter().map(|&i| all[i].clone()).collect();
    let dropped = (0..tp)
        .filter(|i| !kept.contains(i))
        .fold(VertexSet::empty(), |acc, i| acc.union(&all[i]));

    // V^exc: too few neighbours in the matched cluster in its colour.
    let partner = |i: usize| reduced.partner(i).expect("perfect matching covers every cluster");
    let pair_color = |i: usize, j: usize| reduced.graph().color_of(i, j).expect("matching edge of R");
    let mut exceptional = Vec::new();
    let mut trimmed = Vec::with_capacity(t);
    for i in 0..t {
        let j = partner(i);
        let c = pair_color(i, j);
        let vj = clusters[j].to_bitset(n);
        let need = (d - params.eps) * p * clusters[j].len() as f64;
        let (bad, good): (Vec<Vertex>, Vec<Vertex>) = clusters[i]
            .iter()
            .partition(|&v| (g.degree_into(Layer::Color(c), v, &vj) as f64) < need);
        exceptional.extend(bad);
        trimmed.push(VertexSet::from_iter_dedup(good));
    }

    // V^deg: atypical degree into some trimmed cluster.
    let mut atypical = FixedBitSet::with_capacity(n);
    for vi in &trimmed {
        let vb = vi.to_bitset(n);
        let mean = p * vi.len() as f64;
        for v in 0..n {
            if vb.contains(v) {
                continue;
            }
            let deg = g.degree_into(Layer::All, v, &vb) as f64;
            if (deg - mean).abs() > params.eps_deg * mean {
                atypical.insert(v);
            }
        }
    }

    // V^inh: neighbourhoods into V_i' that do not stay regular with V_j'.
    let mut non_inheriting = FixedBitSet::with_capacity(n);
    for i in 0..t {
        let j = partner(i);
        let layer = g.layer(Layer::Color(pair_color(i, j)));
        let seed = rng::derive_seed(params.seed, i as u64, Purpose::Sampling);
        let scan = inheritance_scan(
            layer,
            g.plain(),
            &trimmed[i],
            &trimmed[j],
            params.eps_inherit,
            d,
            p,
            params.samples,
            seed,
        )
        .stage("inheritance")?;
        for z in scan.bad.iter() {
            non_inheriting.insert(z);
        }
    }

    let exc = VertexSet::from_iter_dedup(exceptional);
    let deg = VertexSet::from_bitset(&atypical);
    let inh = VertexSet::from_bitset(&non_inheriting);
    let w = dropped.union(&exc).union(&deg).union(&inh);

    // U: a random fraction of the typical clustered vertices.
    let mut pick = rng::stream(params.seed, 0, Purpose::Reservoir);
    let u = VertexSet::from_iter_dedup(
        trimmed
            .iter()
            .flat_map(|c| c.iter())
            .filter(|&v| !w.contains(v))
            .collect::<Vec<_>>()
            .into_iter()
            .filter(|_| pick.gen_bool(params.u_probability)),
    );

    let report = PlanReport {
        p,
        clusters_before: tp,
        clusters_kept: t,
        regular_pairs,
        components: reduced.components().len(),
        dropped: dropped.len(),
        exceptional: exc.len(),
        atypical_degree: deg.len(),
        non_inheriting: inh.len(),
        w: w.len(),
        u: u.len(),
    };
    Ok(PartitionPlan {
        u,
        w,
        reduced,
        clusters,
        report,
        r,
        allocation: params.allocation,
        embed: params.embed.clone(),
    })
}

impl PartitionPlan {
    /// Partitions `g - (W ∪ U⁺ ∪ U')` into at most `4r² + 1` monochromatic
    /// cycles by allocating a blueprint on the reduced graph and embedding it.
    pub fn partition(
        &self,
        g: &ColoredGraph,
        u_prime: &VertexSet,
        u_plus: &VertexSet,
    ) -> Result<(CycleCover, ClosureReport)> {
        if !u_prime.is_subset(&self.u) {
            return Err(Error::param("U' must be a subset of U"));
        }
        let n = g.n();
        let removed = self.w.union(u_prime).union(u_plus);
        let cores: Vec<VertexSet> = self.clusters.iter().map(|c| c.difference(&removed)).collect();
        let sizes: Vec<usize> = cores.iter().map(VertexSet::len).collect();
        if let Some(i) = sizes.iter().position(|&s| s == 0) {
            return Err(Error::Infeasible(format!("cluster {i} is empty after removals")).in_stage("allocation"));
        }
        let m = *sizes.iter().min().unwrap();
        let alloc = allocate_cycles_with(&self.reduced, &sizes, m, self.allocation).stage("allocation")?;
        let problems = alloc.verify(&self.reduced, &sizes, m);
        if self.allocation == AllocationMode::Strict && !problems.is_empty() {
            return Err(Error::internal(problems.join("; ")).in_stage("allocation"));
        }
        let colors: Vec<usize> = self.reduced.components().iter().map(|c| c.color).collect();
        let bp = Blueprint::from_allocation(&alloc, &colors);
        let emb = embed_blueprint(&bp, g, &cores, &self.embed).stage("embedding")?;

        let mut cover = CycleCover::default();
        for cyc in &alloc.cycles {
            let vs = cyc.vertices.iter().map(|&h| emb.psi[h]).collect();
            cover.push(Cycle::new(vs, Some(colors[cyc.component])));
        }
        if let Some(h) = alloc.isolated {
            cover.push(Cycle::vertex(emb.psi[h]));
        }
        let required = removed.complement(n);
        let check = verify_cover(g, &cover, &required, &removed);
        if !check.valid {
            return Err(Error::internal(format!("{:?}", check.violations)).in_stage("verify"));
        }
        let bound = 4 * self.r * self.r + 1;
        let report = ClosureReport {
            sizes,
            cycles: cover.len(),
            bound,
        };
        Ok((cover, report))
    }
}

pub fn default_clusters(n: usize) -> usize {
    (n / 200 * 2).clamp(4, 16)
}

/// Edge density `e(G) / C(n, 2)`.
pub fn estimate_p(g: &ColoredGraph) -> Result<f64> {
    let n = g.n();
    if n < 2 || g.edge_count() == 0 {
        return Err(Error::param("cannot estimate p from a graph without edges"));
    }
    Ok(g.edge_count() as f64 / (n * (n - 1) / 2) as f64)
}

/// How a full partition was obtained.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub enum Route {
    Exact,
    Monochromatic,
    Pipeline {
        plan: PlanReport,
        absorb: AbsorbReport,
        closure: ClosureReport,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FullPartition {
    pub cover: CycleCover,
    pub route: Route,
    /// `1000 r⁴ ln r`.
    pub bound: f64,
}

pub fn count_bound(r: usize) -> f64 {
    let r = r as f64;
    1000.0 * r.powi(4) * r.ln()
}

/// Partitions the whole graph into monochromatic cycles: `W` is absorbed first
/// and the plan's robust partition covers everything else.
pub fn full_partition(g: &ColoredGraph, r: usize, params: &PipelineParams) -> Result<FullPartition> {
    params.validate()?;
    if r == 0 || r != g.r() {
        return Err(Error::param(format!(
            "r = {r} does not match the host's {} colours",
            g.r()
        )));
    }
    let n = g.n();
    let bound = count_bound(r);
    let finish = |cover: CycleCover, route: Route| -> Result<FullPartition> {
        let check = verify_partition(g, &cover);
        if !check.valid {
            return Err(Error::internal(format!("{:?}", check.violations)).in_stage("verify"));
        }
        Ok(FullPartition { cover, route, bound })
    };
    if n <= params.budget.max_vertices {
        let sol = min_mono_cycle_partition(g, &params.budget).stage("exact")?;
        return finish(sol.cover, Route::Exact);
    }
    if let Some(c) = (0..r).find(|&c| g.color_edge_count(c) == n * (n - 1) / 2) {
        return finish(
            CycleCover::new(vec![Cycle::new((0..n).collect(), Some(c))]),
            Route::Monochromatic,
        );
    }

    let plan = partition_pipeline(g, r, params).stage("plan")?;
    let beta = (plan.u.len() as f64 / n as f64).clamp(1e-9, 1.0 - 1e-9);
    let p = plan.report.p;
    let absorb_params = AbsorptionParams::new(r, beta, p)?;
    let opts = AbsorbOptions {
        seed: rng::derive_seed(params.seed, 0, Purpose::Split),
        ..params.absorb.clone()
    };
    let absorbed = absorb_pipeline_with(g, &plan.u, &plan.w, &absorb_params, &opts).stage("absorb")?;
    let used = absorbed.cover.covered();
    let u_prime = used.intersection(&plan.u);
    let u_plus = used.difference(&plan.u.union(&plan.w));
    let (rest, closure) = plan.partition(g, &u_prime, &u_plus).stage("robust-partition")?;
    let mut cover = absorbed.cover;
    cover.extend(rest);
    finish(
        cover,
        Route::Pipeline {
            plan: plan.report,
            absorb: absorbed.report,
            closure,
        },
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{color_edges, sample_gnp, ColoringStrategy, Graph};

    fn random_host(n: usize, p: f64, r: usize, seed: u64) -> ColoredGraph {
        let g = sample_gnp(n, p, seed).unwrap();
        color_edges(&g, r, &ColoringStrategy::UniformRandom, seed).unwrap()
    }

    #[test]
    fn tiny_and_complete_shortcuts() {
        let one = ColoredGraph::new(1, 2);
        let f = full_partition(&one, 2, &PipelineParams::default()).unwrap();
        assert_eq!(f.cover.cycles(), &[Cycle::vertex(0)]);
        let k = ColoredGraph::monochromatic(&Graph::complete(40), 2, 1);
        let f = full_partition(&k, 2, &PipelineParams::default()).unwrap();
        assert_eq!(f.cover.len(), 1);
        assert_eq!(f.route, Route::Monochromatic);
    }

    #[test]
    fn plan_without_removals_partitions_g_minus_w() {
        let g = random_host(400, 0.4, 2, 1);
        let plan = partition_pipeline(&g, 2, &PipelineParams::default()).unwrap();
        assert!(plan.u.is_disjoint(&plan.w));
        let (cover, rep) = plan.partition(&g, &VertexSet::empty(), &VertexSet::empty()).unwrap();
        assert!(cover.len() <= rep.bound);
        let check = verify_cover(&g, &cover, &plan.w.complement(400), &plan.w);
        assert!(check.valid);
    }

    #[test]
    fn monochromatic_dense_host_has_one_component() {
        let g = ColoredGraph::monochromatic(&sample_gnp(300, 0.5, 2).unwrap(), 1, 0);
        let plan = partition_pipeline(&g, 1, &PipelineParams::default()).unwrap();
        assert_eq!(plan.reduced.components().len(), 1);
        let (cover, _) = plan.partition(&g, &VertexSet::empty(), &VertexSet::empty()).unwrap();
        assert!(cover.len() <= 2);
    }

    #[test]
    fn full_partition_is_verified() {
        let g = random_host(500, 0.3, 2, 3);
        match full_partition(&g, 2, &PipelineParams::default()) {
            Ok(f) => {
                assert!(verify_partition(&g, &f.cover).valid);
                assert!((f.cover.len() as f64) <= f.bound);
            }
            Err(e) => assert!(e.stage().is_some(), "unstructured failure: {e}"),
        }
    }
}
