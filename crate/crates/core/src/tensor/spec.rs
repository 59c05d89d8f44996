use serde::{Deserialize, Serialize};

use super::{AxisBox, RankOneTensor};
use crate::univariate::{Orientation, UnivariateFactor};
use crate::{Error, Result};

/// Parameters of one factor, tagged by `kind`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorShape {
    Constant {
        value: f64,
    },
    /// Global polynomial, monomial coefficients from degree 0 upwards.
    Polynomial {
        coefficients: Vec<f64>,
    },
    /// Piecewise polynomial; piece `k` is a series in `t - breakpoints[k]`.
    Piecewise {
        breakpoints: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
    },
    /// `leading * prod_j (t - roots[j])`.
    Roots {
        roots: Vec<f64>,
        #[serde(default = "one")]
        leading: f64,
    },
    /// Bump on one half of `interval` (see [`UnivariateFactor::make_bump`]).
    Bump {
        orientation: Orientation,
        #[serde(default = "unit_interval")]
        interval: [f64; 2],
    },
    Ramp {
        orientation: Orientation,
        width: f64,
    },
    Trig {
        amplitude: f64,
        frequency: f64,
        #[serde(default)]
        phase: f64,
    },
    /// Piecewise-linear table; needs a declared `deriv_bound`.
    Table {
        nodes: Vec<f64>,
        values: Vec<f64>,
    },
}

fn one() -> f64 {
    1.0
}

fn unit_interval() -> [f64; 2] {
    [0.0, 1.0]
}

/// A factor shape with an optional multiplier and declared bounds.
///
/// Declared bounds are checked against the exact ones; a declaration smaller
/// than the true value is rejected.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FactorSpec {
    #[serde(flatten)]
    pub shape: FactorShape,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub scale: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sup_bound: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub deriv_bound: Option<f64>,
}

impl FactorSpec {
    pub fn new(shape: FactorShape) -> Self {
        Self {
            shape,
            scale: None,
            sup_bound: None,
            deriv_bound: None,
        }
    }

    pub fn build(&self, r: u32) -> Result<UnivariateFactor> {
        let f = match &self.shape {
            FactorShape::Constant { value } => UnivariateFactor::constant(*value, r)?,
            FactorShape::Polynomial { coefficients } => {
                UnivariateFactor::polynomial(coefficients.clone(), r)?
            }
            FactorShape::Piecewise {
                breakpoints,
                coefficients,
            } => UnivariateFactor::piecewise(breakpoints.clone(), coefficients.clone(), r)?,
            FactorShape::Roots { roots, leading } => {
                UnivariateFactor::from_roots(*leading, roots, r)?
            }
            FactorShape::Bump {
                orientation,
                interval,
            } => UnivariateFactor::make_bump(r, *orientation, interval[0], interval[1])?,
            FactorShape::Ramp { orientation, width } => {
                UnivariateFactor::ramp(r, *orientation, *width)?
            }
            FactorShape::Trig {
                amplitude,
                frequency,
                phase,
            } => UnivariateFactor::trig(*amplitude, *frequency, *phase, r)?,
            FactorShape::Table { nodes, values } => {
                let bound = self
                    .deriv_bound
                    .ok_or_else(|| Error::param("table factors need \"deriv_bound\""))?;
                UnivariateFactor::table(nodes.clone(), values.clone(), r, bound)?
            }
        };
        let f = match self.scale {
            Some(c) if !c.is_finite() => return Err(Error::param("factor scale must be finite")),
            Some(c) => f.scaled(c),
            None => f,
        };
        let tol = |x: f64| 1e-12 * x.abs().max(1.0);
        if let Some(s) = self.sup_bound {
            if f.sup_bound() > s + tol(s) {
                return Err(Error::param(format!(
                    "declared sup bound {s} is below the exact value {}",
                    f.sup_bound()
                )));
            }
        }
        if let Some(m) = self.deriv_bound {
            if f.deriv_bound() > m + tol(m) {
                return Err(Error::param(format!(
                    "declared derivative bound {m} is below the exact value {}",
                    f.deriv_bound()
                )));
            }
        }
        Ok(f)
    }
}

/// Witness box in a tensor spec.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct WitnessSpec {
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
}

/// JSON description of a rank-one tensor. Exactly one of `factors` and
/// `replicate` must be present.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TensorSpec {
    pub d: usize,
    pub r: u32,
    #[serde(rename = "M")]
    pub m: f64,
    #[serde(rename = "V", default, skip_serializing_if = "Option::is_none")]
    pub v: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<WitnessSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub factors: Option<Vec<FactorSpec>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub replicate: Option<FactorSpec>,
}

impl TensorSpec {
    pub fn build(&self) -> Result<RankOneTensor> {
        if self.d == 0 {
            return Err(Error::param("d must be at least 1"));
        }
        let factors = match (&self.factors, &self.replicate) {
            (Some(list), None) => {
                if list.len() != self.d {
                    return Err(Error::DimensionMismatch {
                        expected: self.d,
                        got: list.len(),
                    });
                }
                list.iter().map(|s| s.build(self.r)).collect::<Result<Vec<_>>>()?
            }
            (None, Some(one)) => vec![one.build(self.r)?; self.d],
            _ => {
                return Err(Error::param(
                    "tensor spec needs exactly one of \"factors\" and \"replicate\"",
                ))
            }
        };
        let t = RankOneTensor::new(factors, self.m)?;
        match (self.v, &self.witness) {
            (None, None) => Ok(t),
            (Some(v), Some(w)) => t.with_support(v, AxisBox::new(w.lower.clone(), w.upper.clone())?),
            (Some(v), None) => t.with_support(v, AxisBox::unit(self.d)),
            (None, Some(_)) => Err(Error::param("a witness box needs \"V\"")),
        }
    }
}
