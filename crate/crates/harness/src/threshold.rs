use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use monocycle::pipeline::PipelineParams;

use crate::config::Coloring;
use crate::error::{HarnessError, Result};
use crate::stats::{wilson_interval, Z95};
use crate::sweep::{run_trial, trial_seed, TrialSetup};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct ThresholdOptions {
    /// Smallest probability examined; the grid minimum.
    pub lo: f64,
    pub hi: f64,
    /// Bisection steps after the end points.
    pub iterations: usize,
    pub coloring: Coloring,
    pub params: PipelineParams,
}

impl Default for ThresholdOptions {
    fn default() -> Self {
        Self {
            lo: 0.01,
            hi: 1.0,
            iterations: 8,
            coloring: Coloring::UniformRandom,
            params: PipelineParams::default(),
        }
    }
}

/// Success count at one probability.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Evaluation {
    pub p: f64,
    pub successes: usize,
    pub trials: usize,
    pub wilson: (f64, f64),
}

impl Evaluation {
    pub fn rate(&self) -> f64 {
        self.successes as f64 / self.trials as f64
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "result")]
pub enum ThresholdOutcome {
    /// The success rate crosses 1/2 inside `bracket`; `p` is its midpoint and
    /// `wilson` the 95% interval of the success rate at the bracket's upper end.
    Estimate {
        p: f64,
        bracket: (f64, f64),
        wilson: (f64, f64),
    },
    Undetermined {
        reason: String,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ThresholdReport {
    pub n: usize,
    pub r: usize,
    pub target: usize,
    pub trials: usize,
    pub seed: u64,
    pub outcome: ThresholdOutcome,
    pub evaluations: Vec<Evaluation>,
}

/// Bisects on `p` for the point where at least half of the trials partition
/// `G(n, p)` into at most `target` cycles. A failed trial counts as `n`
/// cycles, since singletons always suffice. Trial `i` uses the same seed at
/// every `p`.
pub fn estimate_threshold(
    n: usize,
    r: usize,
    target: usize,
    trials: usize,
    seed: u64,
    opts: &ThresholdOptions,
) -> Result<ThresholdReport> {
    if n == 0 || r == 0 || trials == 0 {
        return Err(HarnessError::config("n, r and trials must be at least 1"));
    }
    if !(0.0 <= opts.lo && opts.lo < opts.hi && opts.hi <= 1.0) {
        return Err(HarnessError::config(format!(
            "need 0 ≤ lo < hi ≤ 1, got lo = {}, hi = {}",
            opts.lo, opts.hi
        )));
    }
    opts.params.validate()?;
    let evaluate = |p: f64| -> Evaluation {
        let successes = (0..trials)
            .into_par_iter()
            .filter(|&trial| {
                let s = trial_seed(seed, 0, trial);
                let setup = TrialSetup {
                    grid_index: 0,
                    trial,
                    n,
                    p,
                    r,
                    coloring: opts.coloring,
                    seed: s,
                    params: PipelineParams {
                        seed: s,
                        ..opts.params.clone()
                    },
                };
                run_trial(&setup).cycles().unwrap_or(n) <= target
            })
            .count();
        log::debug!("threshold: p = {p:.5}: {successes}/{trials}");
        Evaluation {
            p,
            successes,
            trials,
            wilson: wilson_interval(successes, trials, Z95),
        }
    };
    let crosses = |e: &Evaluation| 2 * e.successes >= e.trials;
    let mut evaluations = Vec::new();
    let report = |outcome, evaluations| ThresholdReport {
        n,
        r,
        target,
        trials,
        seed,
        outcome,
        evaluations,
    };

    let low = evaluate(opts.lo);
    evaluations.push(low.clone());
    if crosses(&low) {
        let outcome = ThresholdOutcome::Estimate {
            p: opts.lo,
            bracket: (opts.lo, opts.lo),
            wilson: low.wilson,
        };
        return Ok(report(outcome, evaluations));
    }
    let high = evaluate(opts.hi);
    evaluations.push(high.clone());
    if !crosses(&high) {
        let reason = format!(
            "success rate stays below 1/2 on [{}, {}] (at most {:.2})",
            opts.lo,
            opts.hi,
            low.rate().max(high.rate())
        );
        return Ok(report(ThresholdOutcome::Undetermined { reason }, evaluations));
    }
    let (mut lo, mut hi, mut at_hi) = (opts.lo, opts.hi, high);
    for _ in 0..opts.iterations {
        let mid = (lo + hi) / 2.0;
        let e = evaluate(mid);
        evaluations.push(e.clone());
        if crosses(&e) {
            hi = mid;
            at_hi = e;
        } else {
            lo = mid;
        }
    }
    let outcome = ThresholdOutcome::Estimate {
        p: (lo + hi) / 2.0,
        bracket: (lo, hi),
        wilson: at_hi.wilson,
    };
    Ok(report(outcome, evaluations))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn target_n_succeeds_at_the_grid_minimum() {
        let opts = ThresholdOptions {
            lo: 0.05,
            ..ThresholdOptions::default()
        };
        let rep = estimate_threshold(10, 2, 10, 4, 1, &opts).unwrap();
        assert_eq!(rep.evaluations.len(), 1);
        assert_eq!(rep.evaluations[0].successes, 4);
        match rep.outcome {
            ThresholdOutcome::Estimate { p, .. } => assert_eq!(p, 0.05),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn target_zero_is_undetermined() {
        let rep = estimate_threshold(6, 2, 0, 3, 1, &ThresholdOptions::default()).unwrap();
        assert!(matches!(rep.outcome, ThresholdOutcome::Undetermined { .. }));
        assert!(rep.evaluations.iter().all(|e| e.successes == 0));
    }

    #[test]
    fn bisection_brackets_the_crossing() {
        // Two cycles on 12 vertices need many edges; one vertex never does.
        let opts = ThresholdOptions {
            lo: 0.05,
            hi: 1.0,
            iterations: 4,
            ..ThresholdOptions::default()
        };
        let rep = estimate_threshold(12, 2, 2, 6, 3, &opts).unwrap();
        match rep.outcome {
            ThresholdOutcome::Estimate { p, bracket, wilson } => {
                assert!(bracket.0 < p && p < bracket.1);
                assert!(bracket.1 - bracket.0 <= 0.95 / 16.0 + 1e-12);
                assert!(wilson.1 >= 0.5);
            }
            other => panic!("{other:?}"),
        }
        assert_eq!(rep.evaluations.len(), 6);
    }

    #[test]
    fn rejects_bad_ranges() {
        let opts = ThresholdOptions {
            lo: 0.5,
            hi: 0.4,
            ..ThresholdOptions::default()
        };
        assert!(estimate_threshold(10, 2, 3, 2, 0, &opts).is_err());
        assert!(estimate_threshold(10, 2, 3, 0, 0, &ThresholdOptions::default()).is_err());
    }
}
