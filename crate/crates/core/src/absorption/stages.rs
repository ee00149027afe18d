use fixedbitset::FixedBitSet;
use rand::Rng;
use serde::{Deserialize, Serialize};

use super::approx::{approx_cover, ApproxCover};
use super::fine::{fine_absorb_with, FineOptions, FineReport, PreconditionPolicy};
use crate::cover::{verify_cover, CycleCover};
use crate::error::{Error, Result, StageExt};
use crate::graph::{common_degree, ColoredGraph, Layer, Vertex, VertexSet};
use crate::prob::{find_bad_set_within, Colex};
use crate::rng::{self, Purpose};
use crate::solver::SolveBudget;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorptionParams {
    pub r: usize,
    pub beta: f64,
    pub p: f64,
}

impl AbsorptionParams {
    pub fn new(r: usize, beta: f64, p: f64) -> Result<Self> {
        let params = Self { r, beta, p };
        params.validate()?;
        Ok(params)
    }

    pub fn validate(&self) -> Result<()> {
        if self.r == 0 {
            return Err(Error::param("r must be at least 1"));
        }
        if !(self.beta > 0.0 && self.beta < 1.0) {
            return Err(Error::param(format!("β = {} outside (0, 1)", self.beta)));
        }
        if !(self.p > 0.0 && self.p <= 1.0) {
            return Err(Error::param(format!("p = {} outside (0, 1]", self.p)));
        }
        Ok(())
    }

    fn rf(&self) -> f64 {
        self.r as f64
    }

    /// `K = 24 r⁹/β`.
    pub fn k(&self) -> f64 {
        24.0 * self.rf().powi(9) / self.beta
    }

    /// `t₁ = K/p^r`.
    pub fn t1(&self) -> f64 {
        self.k() / self.p.powi(self.r as i32)
    }

    /// `t₂ = 16000 r⁴/(βp)`.
    pub fn t2(&self) -> f64 {
        16000.0 * self.rf().powi(4) / (self.beta * self.p)
    }

    /// `900 r⁴ ln r`.
    pub fn count_bound(&self) -> f64 {
        900.0 * self.rf().powi(4) * self.rf().ln()
    }

    /// `48 r⁹/(β p^r)`.
    pub fn spill_bound(&self) -> f64 {
        2.0 * self.t1()
    }
}

/// How `t` is chosen for the two fine-absorption stages.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub enum TPolicy {
    /// `t₁ = K/p^r` and `t₂ = 16000 r⁴/(βp)`, raised to `|W_i|` if smaller.
    Literal,
    /// `t = max(|W_i|, 2)`, the least value the covering step accepts.
    #[default]
    Desk,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct AbsorbOptions {
    pub policy: PreconditionPolicy,
    pub t_policy: TPolicy,
    pub split_retries: usize,
    pub seed: u64,
    pub budget: SolveBudget,
}

impl Default for AbsorbOptions {
    fn default() -> Self {
        Self {
            policy: PreconditionPolicy::Report,
            t_policy: TPolicy::Desk,
            split_retries: 100,
            seed: 0,
            budget: FineOptions::default().budget,
        }
    }
}

impl AbsorbOptions {
    /// Literal constants, failing on any unmet precondition.
    pub fn strict() -> Self {
        Self {
            policy: PreconditionPolicy::Enforce,
            t_policy: TPolicy::Literal,
            ..Self::default()
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SplitReport {
    pub attempts: usize,
    /// Violated (c₁)/(c₂) conditions in the split that was used.
    pub violations: usize,
    pub u2: usize,
    pub u3: usize,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbReport {
    pub w1: VertexSet,
    pub w2: usize,
    pub w3: VertexSet,
    pub stage1: Option<FineReport>,
    pub split: Option<SplitReport>,
    pub stage2_cycles: usize,
    pub stage2_target: Option<f64>,
    pub stage3: Option<FineReport>,
    pub cycles: usize,
    pub count_bound: f64,
    /// `|V(𝒞) \ (U ∪ W)|`.
    pub spill: usize,
    pub spill_bound: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AbsorbOutcome {
    pub cover: CycleCover,
    pub report: AbsorbReport,
}

pub fn absorb_pipeline(
    g: &ColoredGraph,
    u: &VertexSet,
    w: &VertexSet,
    params: &AbsorptionParams,
) -> Result<CycleCover> {
    absorb_pipeline_with(g, u, w, params, &AbsorbOptions::default()).map(|o| o.cover)
}

/// Covers `W` in three stages: the `k`-sets of `W` that see `U` atypically are
/// absorbed using any vertices outside them; most of the rest is covered by
/// long cycles through one half of `U`; the remainder is absorbed into the
/// other half.
pub fn absorb_pipeline_with(
    g: &ColoredGraph,
    u: &VertexSet,
    w: &VertexSet,
    params: &AbsorptionParams,
    opts: &AbsorbOptions,
) -> Result<AbsorbOutcome> {
    params.validate()?;
    let r = params.r;
    if r > g.r() {
        return Err(Error::param(format!("r = {r} exceeds the host's {} colours", g.r())));
    }
    if !u.is_disjoint(w) {
        return Err(Error::param("U and W must be disjoint"));
    }
    let n = g.n();
    let fine_opts = FineOptions {
        policy: opts.policy,
        budget: opts.budget.clone(),
    };
    let pick_t = |literal: f64, size: usize| match opts.t_policy {
        TPolicy::Literal => (literal.ceil() as usize).max(size).max(2),
        TPolicy::Desk => size.max(2),
    };
    let alpha = 1.0 / (r as f64).powi(4);
    let mut report = AbsorbReport {
        w1: VertexSet::empty(),
        w2: 0,
        w3: VertexSet::empty(),
        stage1: None,
        split: None,
        stage2_cycles: 0,
        stage2_target: None,
        stage3: None,
        cycles: 0,
        count_bound: params.count_bound(),
        spill: 0,
        spill_bound: params.spill_bound(),
    };
    let mut cover = CycleCover::default();

    // Stage 1: deviant vertices of W.
    let w1 = if u.is_empty() {
        w.clone()
    } else {
        let mut bad = VertexSet::empty();
        for k in sizes(r) {
            if w.len() >= k {
                let rep = find_bad_set_within(g, u, w, k, alpha, params.p).stage("bad-set")?;
                bad = bad.union(&rep.y.intersection(w));
            }
        }
        bad
    };
    if !w1.is_empty() {
        let host = w1.complement(n);
        let t = pick_t(params.t1(), w1.len());
        let (c1, rep) = fine_absorb_with(g, &host, &w1, t, r, &fine_opts).stage("absorb-deviant")?;
        report.stage1 = Some(rep);
        cover.extend(c1);
    }
    report.w1 = w1.clone();

    // Stage 2: split what is left of U and cover most of W₂ through U₂.
    let used = cover.covered();
    let u_rest = u.difference(&used);
    let w2 = w.difference(&used);
    report.w2 = w2.len();
    let mut w3 = VertexSet::empty();
    let mut u3 = VertexSet::empty();
    if !w2.is_empty() {
        let typical = w.difference(&w1);
        let (u2, u3_, split) = split_reservoir(g, &u_rest, &typical, r, opts).stage("split")?;
        u3 = u3_;
        report.split = Some(split);
        let ApproxCover {
            cover: c2,
            leftover,
            target,
            ..
        } = approx_cover(g, &u2, &w2, params.beta / 4.0, params.p, r).stage("approx-cover")?;
        report.stage2_cycles = c2.len();
        report.stage2_target = Some(target);
        cover.extend(c2);
        w3 = leftover;
    }

    // Stage 3: absorb the remainder into U₃.
    if !w3.is_empty() {
        let t = pick_t(params.t2(), w3.len());
        let (c3, rep) = fine_absorb_with(g, &u3, &w3, t, r, &fine_opts).stage("absorb-remainder")?;
        report.stage3 = Some(rep);
        cover.extend(c3);
    }
    report.w3 = w3;

    let check = verify_cover(g, &cover, w, &VertexSet::empty());
    if !check.valid {
        return Err(Error::internal(format!(
            "absorbing cover is invalid: {:?}",
            check.violations
        )));
    }
    let inside = u.union(w);
    report.spill = cover.covered().difference(&inside).len();
    report.cycles = cover.len();
    Ok(AbsorbOutcome { cover, report })
}

fn sizes(r: usize) -> Vec<usize> {
    if r == 1 {
        vec![1]
    } else {
        vec![1, r]
    }
}

/// Splits `U'` uniformly at random, retrying until both halves keep their
/// share of `U'` and of every common neighbourhood of a `k`-set of
/// `typical`, `k ∈ {1, r}`. Under [`PreconditionPolicy::Report`] the split
/// with fewest violations is used once retries run out.
fn split_reservoir(
    g: &ColoredGraph,
    u_rest: &VertexSet,
    typical: &VertexSet,
    r: usize,
    opts: &AbsorbOptions,
) -> Result<(VertexSet, VertexSet, SplitReport)> {
    let n = g.n();
    let keep = 1.0 - 1.0 / (r as f64).powi(4);
    let ub = u_rest.to_bitset(n);
    let sets: Vec<Vec<Vertex>> = sizes(r)
        .into_iter()
        .filter(|&k| typical.len() >= k)
        .flat_map(|k| {
            Colex::new(typical.len(), k).map(|s| s.iter().map(|&i| typical.as_slice()[i]).collect::<Vec<_>>())
        })
        .collect();
    let whole: Vec<usize> = sets.iter().map(|s| common_degree(g, Layer::All, s, &ub)).collect();
    let attempts = opts.split_retries.max(1);
    let mut best: Option<(usize, FixedBitSet, FixedBitSet)> = None;
    for attempt in 0..attempts {
        let mut rng = rng::stream(opts.seed, attempt as u64, Purpose::Split);
        let mut a = FixedBitSet::with_capacity(n);
        let mut b = FixedBitSet::with_capacity(n);
        for v in u_rest.iter() {
            if rng.gen_bool(0.5) {
                a.insert(v);
            } else {
                b.insert(v);
            }
        }
        let cap = best.as_ref().map_or(usize::MAX, |x| x.0);
        let mut bad = 0;
        let half = keep * u_rest.len() as f64 / 2.0;
        bad += usize::from((a.count_ones(..) as f64) < half) + usize::from((b.count_ones(..) as f64) < half);
        for (s, &d) in sets.iter().zip(&whole) {
            if bad >= cap {
                break;
            }
            let need = keep * d as f64 / 2.0;
            for side in [&a, &b] {
                if (common_degree(g, Layer::All, s, side) as f64) < need {
                    bad += 1;
                }
            }
        }
        if bad < cap {
            best = Some((bad, a, b));
        }
        if bad == 0 {
            let (_, a, b) = best.unwrap();
            let (a, b) = (VertexSet::from_bitset(&a), VertexSet::from_bitset(&b));
            let rep = SplitReport {
                attempts: attempt + 1,
                violations: 0,
                u2: a.len(),
                u3: b.len(),
            };
            return Ok((a, b, rep));
        }
    }
    let (bad, a, b) = best.unwrap();
    if opts.policy == PreconditionPolicy::Enforce {
        return Err(Error::Infeasible(format!(
            "no split met the size and degree conditions in {attempts} attempts (best had {bad} violations)"
        )));
    }
    let (a, b) = (VertexSet::from_bitset(&a), VertexSet::from_bitset(&b));
    let rep = SplitReport {
        attempts,
        violations: bad,
        u2: a.len(),
        u3: b.len(),
    };
    Ok((a, b, rep))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graph::{color_edges, sample_gnp, ColoringStrategy};

    #[test]
    fn derived_constants() {
        let p = AbsorptionParams::new(2, 0.5, 0.5).unwrap();
        assert!((p.k() - 24.0 * 512.0 / 0.5).abs() < 1e-9);
        assert!((p.t1() - p.k() / 0.25).abs() < 1e-9);
        assert!((p.t2() - 16000.0 * 16.0 / 0.25).abs() < 1e-9);
        assert!((p.spill_bound() - 48.0 * 512.0 / (0.5 * 0.25)).abs() < 1e-6);
        assert!(AbsorptionParams::new(2, 1.0, 0.5).is_err());
        assert!(AbsorptionParams::new(2, 0.5, 0.0).is_err());
    }

    #[test]
    fn empty_w() {
        let g = ColoredGraph::new(6, 2);
        let params = AbsorptionParams::new(2, 0.5, 0.5).unwrap();
        let c = absorb_pipeline(&g, &VertexSet::range(0, 6), &VertexSet::empty(), &params).unwrap();
        assert!(c.is_empty());
    }

    #[test]
    fn isolated_w_is_handled_by_the_first_stage() {
        // W = {0..4} has no edges at all; U = 4..40 is a random graph.
        let host = sample_gnp(40, 0.5, 3).unwrap();
        let mut g = ColoredGraph::new(40, 2);
        for (a, b) in host.edges().filter(|&(a, _)| a >= 4) {
            g.add_edge(a, b, (a + b) % 2).unwrap();
        }
        let params = AbsorptionParams::new(2, 0.5, 0.5).unwrap();
        let (u, w) = (VertexSet::range(4, 40), VertexSet::range(0, 4));
        let out = absorb_pipeline_with(&g, &u, &w, &params, &AbsorbOptions::default()).unwrap();
        assert_eq!(out.report.w1, w);
        assert!(out.report.split.is_none());
        assert_eq!(out.cover, CycleCover::singletons(0..4));
    }

    #[test]
    fn covers_w_in_a_random_graph() {
        let host = sample_gnp(400, 0.35, 11).unwrap();
        let g = color_edges(&host, 2, &ColoringStrategy::UniformRandom, 11).unwrap();
        let params = AbsorptionParams::new(2, 0.25, 0.35).unwrap();
        let (w, u) = (VertexSet::range(0, 15), VertexSet::range(15, 215));
        let out = absorb_pipeline_with(&g, &u, &w, &params, &AbsorbOptions::default()).unwrap();
        assert!(verify_cover(&g, &out.cover, &w, &VertexSet::empty()).valid);
        assert_eq!(out.report.cycles, out.cover.len());
        assert!((out.report.cycles as f64) <= out.report.count_bound);
        // Deterministic for a fixed seed.
        let again = absorb_pipeline_with(&g, &u, &w, &params, &AbsorbOptions::default()).unwrap();
        assert_eq!(out, again);
    }

    #[test]
    fn strict_split_failure_is_a_stage_error() {
        let host = sample_gnp(60, 0.3, 5).unwrap();
        let g = color_edges(&host, 2, &ColoringStrategy::UniformRandom, 5).unwrap();
        let params = AbsorptionParams::new(2, 0.5, 0.3).unwrap();
        let opts = AbsorbOptions {
            split_retries: 2,
            ..AbsorbOptions::strict()
        };
        let err =
            absorb_pipeline_with(&g, &VertexSet::range(10, 60), &VertexSet::range(0, 10), &params, &opts).unwrap_err();
        assert!(err.stage().is_some(), "{err}");
    }
}
