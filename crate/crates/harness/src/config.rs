use serde::{Deserialize, Serialize};

use monocycle::pipeline::PipelineParams;
use monocycle::ColoringStrategy;

use crate::error::{HarnessError, Result};

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Coloring {
    #[default]
    UniformRandom,
    RoundRobin,
}

impl Coloring {
    pub fn strategy(self) -> ColoringStrategy {
        match self {
            Coloring::UniformRandom => ColoringStrategy::UniformRandom,
            Coloring::RoundRobin => ColoringStrategy::RoundRobin,
        }
    }
}

/// Edge probabilities to sweep, either literal or as a function of `n`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case", tag = "kind")]
pub enum PSpec {
    Grid {
        values: Vec<f64>,
    },
    /// `p = c · n^(-1/(2r))`, capped at 1.
    Proven {
        c: Vec<f64>,
    },
    /// `p = c · (ln n / n)^(1/r)`, capped at 1.
    Conjectured {
        c: Vec<f64>,
    },
}

impl PSpec {
    fn len(&self) -> usize {
        match self {
            PSpec::Grid { values } => values.len(),
            PSpec::Proven { c } | PSpec::Conjectured { c } => c.len(),
        }
    }

    fn at(&self, k: usize, n: usize, r: usize) -> f64 {
        let (nf, rf) = (n as f64, r as f64);
        match self {
            PSpec::Grid { values } => values[k],
            PSpec::Proven { c } => (c[k] * nf.powf(-1.0 / (2.0 * rf))).min(1.0),
            PSpec::Conjectured { c } => (c[k] * (nf.ln().max(0.0) / nf).powf(1.0 / rf)).min(1.0),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub n: Vec<usize>,
    pub p: PSpec,
    pub r: usize,
    #[serde(default)]
    pub coloring: Coloring,
    pub trials: usize,
    #[serde(default)]
    pub seed: u64,
    /// Stage settings for every trial; each trial replaces `seed`.
    #[serde(default)]
    pub pipeline: PipelineParams,
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct GridPoint {
    pub index: usize,
    pub n: usize,
    pub p: f64,
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n.is_empty() || self.p.len() == 0 {
            return Err(HarnessError::config("the n and p grids must be nonempty"));
        }
        if self.n.contains(&0) {
            return Err(HarnessError::config("n must be at least 1"));
        }
        if self.r == 0 {
            return Err(HarnessError::config("r must be at least 1"));
        }
        if self.trials == 0 {
            return Err(HarnessError::config("trials must be at least 1"));
        }
        match &self.p {
            PSpec::Grid { values } => {
                if let Some(p) = values.iter().find(|p| !(0.0..=1.0).contains(*p)) {
                    return Err(HarnessError::config(format!("p = {p} outside [0, 1]")));
                }
            }
            PSpec::Proven { c } | PSpec::Conjectured { c } => {
                if let Some(c) = c.iter().find(|c| !(c.is_finite() && **c > 0.0)) {
                    return Err(HarnessError::config(format!("scale c = {c} must be positive")));
                }
            }
        }
        self.pipeline.validate()?;
        Ok(())
    }

    /// Grid points in order: `n` outer, `p` inner.
    pub fn grid(&self) -> Vec<GridPoint> {
        let mut out = Vec::new();
        for &n in &self.n {
            for k in 0..self.p.len() {
                out.push(GridPoint {
                    index: out.len(),
                    n,
                    p: self.p.at(k, n, self.r),
                });
            }
        }
        out
    }

    pub fn from_json(text: &str) -> Result<Self> {
        let cfg: Self = serde_json::from_str(text)?;
        cfg.validate()?;
        Ok(cfg)
    }
}
