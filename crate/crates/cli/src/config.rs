//! Experiment configuration. Every field has a default and the resolved
//! config is written back into each summary.

use std::path::{Path, PathBuf};

use rankone::dispersion::{halton, PointSet};
use rankone::families;
use rankone::rng::{self, Purpose};
use rankone::tensor::{MeasureConfig, RankOneTensor, TensorSpec};
use serde::{Deserialize, Serialize};

use crate::output::read_points;
use crate::CliError;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "snake_case")]
pub enum StrategyChoice {
    /// Follow the planner's regime.
    #[default]
    Auto,
    /// One uniform draw.
    Single,
    Subset,
    /// `n1` uniform draws.
    Multi,
    /// Scan of a fixed point set.
    Det,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FamilyKind {
    /// Trig and polynomial factors, redrawn until `‖f‖ >= min_norm`.
    Smooth,
    /// Ramps whose nonzero set has measure exactly `V`; the same tensor every trial.
    SupportVolume,
    /// Narrow scaled ramps away from the center.
    SparseRamp,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct FamilySpec {
    pub kind: FamilyKind,
    pub d: usize,
    pub r: u32,
    #[serde(rename = "M", default)]
    pub m: Option<f64>,
    #[serde(rename = "V", default)]
    pub v: Option<f64>,
    #[serde(default)]
    pub min_norm: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum PointSetSpec {
    /// First `n` Halton points; `n` defaults to the phase-one budget.
    Halton {
        #[serde(default)]
        n: Option<usize>,
    },
    Uniform {
        #[serde(default)]
        n: Option<usize>,
        #[serde(default)]
        seed: u64,
    },
    /// One point per row, `d` columns.
    Csv { path: PathBuf },
}

impl Default for PointSetSpec {
    fn default() -> Self {
        PointSetSpec::Halton { n: None }
    }
}

impl PointSetSpec {
    pub fn build(&self, d: usize, default_n: u64) -> Result<PointSet, CliError> {
        let n = |n: Option<usize>| -> Result<usize, CliError> {
            match n {
                Some(n) => Ok(n),
                None => usize::try_from(default_n)
                    .ok()
                    .filter(|&n| n <= 1 << 28)
                    .ok_or_else(|| CliError::config(format!("point_set.n: {default_n} points is too many"))),
            }
        };
        Ok(match self {
            PointSetSpec::Halton { n: k } => halton(n(*k)?, d)?,
            PointSetSpec::Uniform { n: k, seed } => PointSet::uniform(n(*k)?, d, *seed)?,
            PointSetSpec::Csv { path } => {
                let ps = read_points(path)?;
                if ps.dim() != d {
                    return Err(CliError::config(format!(
                        "point_set.path: points have {} columns, expected d = {d}",
                        ps.dim()
                    )));
                }
                ps
            }
        })
    }
}

fn default_eps() -> f64 {
    0.1
}

fn default_p() -> f64 {
    0.1
}

fn default_trials() -> u64 {
    1
}

fn default_threads() -> usize {
    1
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    /// A fixed tensor, used in every trial.
    #[serde(default)]
    pub tensor: Option<TensorSpec>,
    /// A random family; trial `i` uses member `i`.
    #[serde(default)]
    pub family: Option<FamilySpec>,
    #[serde(default)]
    pub strategy: StrategyChoice,
    #[serde(default = "default_eps")]
    pub eps: f64,
    /// Allowed failure probability of phase one.
    #[serde(default = "default_p")]
    pub p: f64,
    /// Support volume bound; falls back to the tensor's own claim.
    #[serde(rename = "V", default)]
    pub v: Option<f64>,
    /// Overrides the planned phase-one budget.
    #[serde(default)]
    pub n1: Option<u64>,
    /// Overrides the planned phase-two budget.
    #[serde(default)]
    pub n2: Option<u64>,
    #[serde(default)]
    pub point_set: PointSetSpec,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_trials")]
    pub trials: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    #[serde(default)]
    pub measure: MeasureConfig,
    /// Phase-two budgets of the `curves` sweep; empty means `{6,12,24,48,96} d`.
    #[serde(default)]
    pub budgets: Vec<u64>,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        serde_json::from_str("{}").expect("every field has a default")
    }
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |field: &str, msg: String| Err(CliError::config(format!("{field}: {msg}")));
        match (&self.tensor, &self.family) {
            (Some(_), Some(_)) | (None, None) => {
                return bad("tensor/family", "exactly one of the two must be given".into())
            }
            (Some(t), None) => {
                if let Err(e) = t.build() {
                    return bad("tensor", e.to_string());
                }
            }
            (None, Some(f)) => {
                if f.d == 0 {
                    return bad("family.d", "must be at least 1".into());
                }
                if f.r == 0 {
                    return bad("family.r", "must be at least 1".into());
                }
                match f.kind {
                    FamilyKind::SupportVolume => match f.v {
                        Some(v) if v > 0.0 && v <= 1.0 => {}
                        _ => return bad("family.V", "support_volume needs V in (0, 1]".into()),
                    },
                    _ => match f.m {
                        Some(m) if m > 0.0 => {}
                        _ => return bad("family.M", format!("{:?} needs M > 0", f.kind)),
                    },
                }
                if !(f.min_norm >= 0.0 && f.min_norm <= 1.0) {
                    return bad("family.min_norm", format!("{} is outside [0, 1]", f.min_norm));
                }
            }
        }
        if !(self.eps > 0.0 && self.eps < 1.0) {
            return bad("eps", format!("{} is outside (0, 1)", self.eps));
        }
        if !(self.p > 0.0 && self.p < 1.0) {
            return bad("p", format!("{} is outside (0, 1)", self.p));
        }
        if let Some(v) = self.v {
            if !(v > 0.0 && v < 1.0) {
                return bad("V", format!("{v} is outside (0, 1)"));
            }
        }
        if self.n1 == Some(0) {
            return bad("n1", "must be at least 1".into());
        }
        if self.threads == 0 {
            return bad("threads", "must be at least 1".into());
        }
        if self.measure.grid == 0 {
            return bad("measure.grid", "must be at least 1".into());
        }
        if self.budgets.contains(&0) {
            return bad("budgets", "budgets must be positive".into());
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        match (&self.tensor, &self.family) {
            (Some(t), _) => t.d,
            (None, Some(f)) => f.d,
            (None, None) => 0,
        }
    }

    /// The tensor of trial `index`.
    pub fn tensor_for(&self, index: u64) -> Result<RankOneTensor, CliError> {
        if let Some(spec) = &self.tensor {
            return Ok(spec.build()?);
        }
        let f = self
            .family
            .as_ref()
            .ok_or_else(|| CliError::config("tensor/family: neither is given"))?;
        let m = f.m.unwrap_or(1.0);
        Ok(match f.kind {
            FamilyKind::Smooth => families::admissible_tensor(
                self.seed,
                index,
                f.d,
                f.r,
                m,
                f.min_norm,
                self.measure.grid,
            )?,
            FamilyKind::SupportVolume => families::support_volume_tensor(f.d, f.r, f.v.unwrap_or(1.0))?,
            FamilyKind::SparseRamp => {
                let mut g = rng::stream(self.seed, Purpose::Family, index);
                families::sparse_ramp_tensor(&mut g, f.d, f.r, m, f.min_norm)?
            }
        })
    }

    /// Support volume bound used by the planner.
    pub fn volume_bound(&self, t: &RankOneTensor) -> Option<f64> {
        if self.v.is_some() {
            return self.v;
        }
        if let Some(f) = &self.family {
            if f.kind == FamilyKind::SupportVolume {
                // the nonzero set has measure exactly V; any smaller bound is admissible
                return f.v.filter(|&v| v < 1.0);
            }
        }
        t.support().map(|s| s.volume_bound).filter(|&v| v > 0.0 && v < 1.0)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_round_trip() {
        let c = ExperimentConfig::default();
        assert_eq!(c.eps, 0.1);
        assert_eq!(c.trials, 1);
        assert_eq!(c.measure, MeasureConfig::default());
        let text = serde_json::to_string(&c).unwrap();
        assert!(text.contains("\"measure\""));
        assert!(text.contains("\"point_set\":{\"kind\":\"halton\",\"n\":null}"));
        assert_eq!(ExperimentConfig::from_json(&text).unwrap(), c);
    }

    #[test]
    fn field_level_messages() {
        let c = ExperimentConfig::from_json(r#"{"family": {"kind": "smooth", "d": 3, "r": 2, "M": 1.0}, "eps": 2.0}"#)
            .unwrap();
        let e = c.validate().unwrap_err().to_string();
        assert!(e.contains("eps"), "{e}");
        let c = ExperimentConfig::from_json(r#"{"family": {"kind": "smooth", "d": 3, "r": 2}}"#).unwrap();
        assert!(c.validate().unwrap_err().to_string().contains("family.M"));
        assert!(ExperimentConfig::default().validate().is_err());
        assert!(ExperimentConfig::from_json(r#"{"trails": 3}"#).is_err());
    }

    #[test]
    fn family_members_are_reproducible() {
        let c = ExperimentConfig::from_json(
            r#"{"family": {"kind": "sparse_ramp", "d": 4, "r": 1, "M": 1.9, "min_norm": 0.2}, "seed": 5}"#,
        )
        .unwrap();
        c.validate().unwrap();
        assert_eq!(c.tensor_for(3).unwrap(), c.tensor_for(3).unwrap());
        assert_ne!(c.tensor_for(3).unwrap(), c.tensor_for(4).unwrap());
    }
}
