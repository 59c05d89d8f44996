//! Second phase: reconstruction of `f` from its restrictions to the axis lines
//! through a point `z*` with `f(z*) != 0`.
//!
//! For exact line functions `g_i(t) = f(z*_1, .., t, .., z*_d)` one has
//! `prod_i g_i(x_i) = f(z*)^(d-1) f(x)`. The approximant replaces each `g_i` by a
//! piecewise interpolant and divides by the center value.

use serde::{Deserialize, Serialize};

use crate::tensor::QueryOracle;
use crate::univariate::{block_chebyshev_layout, PiecewisePolynomial};
use crate::{Error, Result};

/// Fitted constants `C_r` for the error contract
/// `‖f - A‖_∞ <= C_r M d^(r+1) n2^-r`, indexed by `r - 1`.
///
/// Produced by `cargo run --release -p rankone-core --example calibrate_cr`,
/// which reports the largest observed ratio of measured error to
/// `M d^(r+1) n2^-r`; the stored values add a 25% margin.
pub const CALIBRATED_C_R: [f64; 6] = [0.94, 1.55, 1.55, 1.67, 1.28, 1.51];

/// `C_r` for orders beyond the table: the value for the largest tabulated order.
pub fn calibrated_c_r(r: u32) -> f64 {
    let i = (r.max(1) as usize - 1).min(CALIBRATED_C_R.len() - 1);
    CALIBRATED_C_R[i]
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RecoveryConfig {
    pub r: u32,
    pub budget_n2: u64,
    pub c_r: f64,
    /// Reject centers with `|f(z*)|` below this value.
    pub min_center_value: f64,
}

impl RecoveryConfig {
    pub fn new(r: u32, budget_n2: u64) -> Self {
        Self {
            r,
            budget_n2,
            c_r: calibrated_c_r(r),
            min_center_value: 0.0,
        }
    }

    /// Nodes per axis line, `floor((n2 - 1) / d)`, before block rounding.
    pub fn nodes_per_line(&self, d: usize) -> u64 {
        self.budget_n2.saturating_sub(1) / d as u64
    }

    /// Smallest admissible budget in dimension `d`: `d max{r, 2} + 1`.
    pub fn min_budget(r: u32, d: usize) -> u64 {
        d as u64 * r.max(2) as u64 + 1
    }

    /// `C_r M d^(r+1) n2^-r`.
    pub fn error_contract(&self, d: usize, m: f64) -> f64 {
        self.c_r * m * (d as f64).powi(self.r as i32 + 1) * (self.budget_n2 as f64).powi(-(self.r as i32))
    }
}

/// `A(x) = f(z*)^-(d-1) prod_i g_i(x_i)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RankOneApproximant {
    pub z_star: Vec<f64>,
    pub center_value: f64,
    pub lines: Vec<PiecewisePolynomial>,
}

impl RankOneApproximant {
    pub fn dim(&self) -> usize {
        self.lines.len()
    }

    pub fn eval(&self, x: &[f64]) -> f64 {
        let c = self.center_value;
        c * self
            .lines
            .iter()
            .zip(x)
            .map(|(g, &t)| g.eval(t) / c)
            .product::<f64>()
    }
}

/// Reconstructs `f` from `1 + d k r` queries, `k = floor(m / r)` blocks per line.
///
/// Queries the center first, then every line at the block Chebyshev nodes.
/// A node that coincides with `z*_i` reuses the center value.
pub fn recover(
    oracle: &mut QueryOracle<'_>,
    z_star: &[f64],
    cfg: &RecoveryConfig,
) -> Result<RankOneApproximant> {
    let d = oracle.dim();
    if z_star.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: z_star.len(),
        });
    }
    let r = cfg.r as usize;
    let m = cfg.nodes_per_line(d) as usize;
    if m < r.max(2) {
        return Err(Error::RecoveryBudget {
            budget: cfg.budget_n2,
            needed: RecoveryConfig::min_budget(cfg.r, d),
            d,
        });
    }
    let (edges, nodes) = block_chebyshev_layout(m, r)?;

    let fresh = |i: usize| nodes.iter().flatten().filter(|&&t| t != z_star[i]).count() as u64;
    let needed = 1 + (0..d).map(fresh).sum::<u64>();
    if let Some(left) = oracle.remaining() {
        if left < needed {
            return Err(Error::BudgetExhausted {
                budget: oracle.budget().unwrap_or(0),
            });
        }
    }

    let center = oracle.evaluate(z_star)?;
    if center == 0.0 {
        return Err(Error::ZeroCenter);
    }
    if center.abs() < cfg.min_center_value {
        return Err(Error::CenterTooSmall {
            value: center,
            threshold: cfg.min_center_value,
        });
    }

    let mut lines = Vec::with_capacity(d);
    let mut x = z_star.to_vec();
    for i in 0..d {
        let mut blocks = Vec::with_capacity(nodes.len());
        for block in &nodes {
            let mut samples = Vec::with_capacity(r);
            for &t in block {
                let v = if t == z_star[i] {
                    center
                } else {
                    x[i] = t;
                    oracle.evaluate(&x)?
                };
                samples.push((t, v));
            }
            blocks.push(samples);
        }
        x[i] = z_star[i];
        lines.push(PiecewisePolynomial::from_blocks(edges.clone(), blocks)?);
    }
    Ok(RankOneApproximant {
        z_star: z_star.to_vec(),
        center_value: center,
        lines,
    })
}

/// `ceil(d max{eps^(-1/r) (d C_r M)^(1/r), 2})`: the phase-two budget for
/// error `eps` under the error contract.
pub fn required_n2(d: usize, r: u32, m: f64, eps: f64, c_r: f64) -> Result<u64> {
    if d == 0 || r == 0 || !(m > 0.0) || !(eps > 0.0) || !(c_r > 0.0) {
        return Err(Error::param(format!(
            "required_n2 needs positive inputs, got d={d}, r={r}, M={m}, eps={eps}, C_r={c_r}"
        )));
    }
    let rf = r as f64;
    let first = eps.powf(-1.0 / rf) * (d as f64 * c_r * m).powf(1.0 / rf);
    let n = (d as f64 * first.max(2.0)).ceil();
    if n >= u64::MAX as f64 {
        return Err(Error::TooLarge {
            cost: n,
            limit: u64::MAX as f64,
        });
    }
    Ok(n as u64)
}
