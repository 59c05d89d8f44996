//! Rank-one tensors, class membership, query accounting and error measurement.

mod norms;
mod oracle;
mod spec;

pub use norms::{sup_distance_bound, sup_norm, ErrorBracket, MeasureConfig};
pub use oracle::{Query, QueryOracle};
pub use spec::{FactorShape, FactorSpec, TensorSpec, WitnessSpec};

use serde::{Deserialize, Serialize};

use crate::univariate::{UnivariateFactor, ZeroSet};
use crate::{Error, Result};

/// Slack allowed when comparing computed bounds against class limits.
const BOUND_SLACK: f64 = 1e-12;

/// Axis-parallel box `prod [lower_i, upper_i]` inside the unit cube.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AxisBox {
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl AxisBox {
    pub fn new(lower: Vec<f64>, upper: Vec<f64>) -> Result<Self> {
        if lower.len() != upper.len() || lower.is_empty() {
            return Err(Error::param("box corners must have the same positive dimension"));
        }
        for (i, (&l, &u)) in lower.iter().zip(&upper).enumerate() {
            if !(0.0 <= l && l <= u && u <= 1.0) {
                return Err(Error::param(format!("box side {i} = [{l}, {u}] is not inside [0, 1]")));
            }
        }
        Ok(Self { lower, upper })
    }

    pub fn unit(d: usize) -> Self {
        Self {
            lower: vec![0.0; d],
            upper: vec![1.0; d],
        }
    }

    pub fn dim(&self) -> usize {
        self.lower.len()
    }

    pub fn lower(&self) -> &[f64] {
        &self.lower
    }

    pub fn upper(&self) -> &[f64] {
        &self.upper
    }

    pub fn volume(&self) -> f64 {
        self.lower.iter().zip(&self.upper).map(|(l, u)| u - l).product()
    }

    /// Whether `x` lies in the open box.
    pub fn contains_open(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&l, &u))| l < xi && xi < u)
    }

    pub fn contains_closed(&self, x: &[f64]) -> bool {
        x.iter()
            .zip(self.lower.iter().zip(&self.upper))
            .all(|(&xi, (&l, &u))| l <= xi && xi <= u)
    }
}

/// Claimed membership in the support-volume class: `f` does not vanish on the
/// closed witness box, whose volume exceeds `volume_bound`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SupportClaim {
    pub volume_bound: f64,
    pub witness: AxisBox,
}

/// `f(x) = prod_i f_i(x_i)` with its class parameters.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RankOneTensor {
    factors: Vec<UnivariateFactor>,
    r: u32,
    m: f64,
    support: Option<SupportClaim>,
}

impl RankOneTensor {
    /// Structural checks only; class membership is a separate question (see
    /// [`check_membership`]).
    pub fn new(factors: Vec<UnivariateFactor>, m: f64) -> Result<Self> {
        let r = factors
            .first()
            .ok_or_else(|| Error::param("a tensor needs at least one factor"))?
            .r();
        if factors.iter().any(|f| f.r() != r) {
            return Err(Error::param("all factors must share the smoothness order r"));
        }
        if !(m > 0.0) {
            return Err(Error::param(format!("class bound M = {m} must be positive")));
        }
        Ok(Self {
            factors,
            r,
            m,
            support: None,
        })
    }

    /// The same factor in every coordinate.
    pub fn replicate(factor: UnivariateFactor, d: usize, m: f64) -> Result<Self> {
        Self::new(vec![factor; d], m)
    }

    /// Identically zero function of dimension `d`.
    pub fn zero(d: usize, r: u32, m: f64) -> Result<Self> {
        Self::replicate(UnivariateFactor::constant(0.0, r)?, d, m)
    }

    pub fn with_support(mut self, volume_bound: f64, witness: AxisBox) -> Result<Self> {
        if !(volume_bound > 0.0 && volume_bound < 1.0) {
            return Err(Error::param(format!("V = {volume_bound} must lie in (0, 1)")));
        }
        if witness.dim() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: witness.dim(),
            });
        }
        self.support = Some(SupportClaim {
            volume_bound,
            witness,
        });
        Ok(self)
    }

    pub fn dim(&self) -> usize {
        self.factors.len()
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn m(&self) -> f64 {
        self.m
    }

    pub fn factors(&self) -> &[UnivariateFactor] {
        &self.factors
    }

    pub fn support(&self) -> Option<&SupportClaim> {
        self.support.as_ref()
    }

    /// `-f`, obtained by negating the first factor.
    pub fn negated(&self) -> Self {
        let mut out = self.clone();
        out.factors[0] = out.factors[0].negated();
        out
    }

    /// Evaluation without domain checks or accounting.
    #[inline]
    pub fn eval(&self, x: &[f64]) -> f64 {
        self.factors.iter().zip(x).map(|(f, &t)| f.eval(t)).product()
    }

    /// Lebesgue measure of `{f != 0}`, computed factor-wise.
    pub fn nonzero_measure(&self) -> f64 {
        self.factors.iter().map(UnivariateFactor::nonzero_measure).product()
    }

    pub(crate) fn check_point(&self, x: &[f64]) -> Result<()> {
        if x.len() != self.dim() {
            return Err(Error::DimensionMismatch {
                expected: self.dim(),
                got: x.len(),
            });
        }
        match x.iter().position(|t| !(0.0..=1.0).contains(t)) {
            Some(index) => Err(Error::Domain {
                index,
                value: x[index],
            }),
            None => Ok(()),
        }
    }
}

/// The two function classes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FunctionClass {
    /// `‖f_i‖_∞ <= 1` and `‖f_i^(r)‖_∞ <= M` for every factor.
    Smooth,
    /// Additionally non-vanishing on a box of volume greater than `V`.
    SupportVolume,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Certificate {
    pub max_sup_bound: f64,
    pub max_deriv_bound: f64,
    pub witness_volume: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, thiserror::Error)]
pub enum MembershipFailure {
    #[error("factor {factor}: ‖f_i‖_∞ = {value} > 1")]
    SupBound { factor: usize, value: f64 },
    #[error("factor {factor}: ‖f_i^(r)‖_∞ = {value} > M = {m}")]
    DerivBound { factor: usize, value: f64, m: f64 },
    #[error("no support-volume witness was given")]
    MissingWitness,
    #[error("witness volume {volume} ≤ V = {v}")]
    WitnessVolume { volume: f64, v: f64 },
    #[error("factor {factor} vanishes inside the witness interval")]
    WitnessVanishes { factor: usize },
}

/// Class membership with a certificate, or the first failing condition.
///
/// The witness box is checked factor by factor: the closed box lies in
/// `{f != 0}` exactly when every factor is zero-free on its side of the box.
pub fn check_membership(
    t: &RankOneTensor,
    class: FunctionClass,
) -> std::result::Result<Certificate, MembershipFailure> {
    let mut cert = Certificate {
        max_sup_bound: 0.0,
        max_deriv_bound: 0.0,
        witness_volume: None,
    };
    for (i, f) in t.factors.iter().enumerate() {
        if f.sup_bound() > 1.0 + BOUND_SLACK {
            return Err(MembershipFailure::SupBound {
                factor: i,
                value: f.sup_bound(),
            });
        }
        if f.deriv_bound() > t.m * (1.0 + BOUND_SLACK) {
            return Err(MembershipFailure::DerivBound {
                factor: i,
                value: f.deriv_bound(),
                m: t.m,
            });
        }
        cert.max_sup_bound = cert.max_sup_bound.max(f.sup_bound());
        cert.max_deriv_bound = cert.max_deriv_bound.max(f.deriv_bound());
    }
    if class == FunctionClass::SupportVolume {
        let claim = t.support.as_ref().ok_or(MembershipFailure::MissingWitness)?;
        let volume = claim.witness.volume();
        if volume <= claim.volume_bound {
            return Err(MembershipFailure::WitnessVolume {
                volume,
                v: claim.volume_bound,
            });
        }
        for (i, f) in t.factors.iter().enumerate() {
            let zeros = f.zeros_in(claim.witness.lower[i], claim.witness.upper[i]);
            if zeros != ZeroSet::Finite(Vec::new()) {
                return Err(MembershipFailure::WitnessVanishes { factor: i });
            }
        }
        cert.witness_volume = Some(volume);
    }
    Ok(cert)
}
