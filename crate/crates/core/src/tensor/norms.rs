use serde::{Deserialize, Serialize};

use super::RankOneTensor;
use crate::rng::{self, Purpose};
use crate::univariate::{grid, PiecewisePolynomial};
use crate::{Error, Result};

/// Resolution of the error measurements.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MeasureConfig {
    /// Intervals of every 1-D grid (the grid has `grid + 1` points).
    pub grid: usize,
    /// Random points behind the sampled lower bound.
    pub samples: usize,
    pub seed: u64,
}

impl Default for MeasureConfig {
    fn default() -> Self {
        Self {
            grid: 10_000,
            samples: 100_000,
            seed: 0,
        }
    }
}

/// Bracket around `‖f - A‖_∞`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorBracket {
    pub upper: f64,
    pub lower: f64,
}

/// `‖f‖_∞ = prod_i max |f_i|`, each maximum taken on a 1-D grid.
pub fn sup_norm(t: &RankOneTensor, resolution: usize) -> f64 {
    t.factors().iter().map(|f| f.grid_sup(resolution)).product()
}

/// Brackets the sup distance between `f` and `scale^-(d-1) prod_i g_i(x_i)`.
///
/// Upper: the telescoping bound
/// `sum_i e_i prod_{j<i} ‖a_j‖ prod_{j>i} ‖f_j‖` with `a_i = k_i g_i`, where the
/// constants `k_i` have product `scale^-(d-1)` and are fitted so that `a_i`
/// tracks `f_i`; all norms are 1-D grid maxima. Lower: the largest observed
/// `|f - A|` over random points plus a few structured probes. The upper value
/// is lifted to the lower one if the grid under-resolves the error.
pub fn sup_distance_bound(
    t: &RankOneTensor,
    approx: &[PiecewisePolynomial],
    scale: f64,
    cfg: &MeasureConfig,
) -> Result<ErrorBracket> {
    let d = t.dim();
    if approx.len() != d {
        return Err(Error::DimensionMismatch {
            expected: d,
            got: approx.len(),
        });
    }
    if scale == 0.0 || !scale.is_finite() {
        return Err(Error::param("approximant scale must be finite and nonzero"));
    }
    let pts: Vec<f64> = grid(cfg.grid).collect();
    let fvals: Vec<Vec<f64>> = t
        .factors()
        .iter()
        .map(|f| pts.iter().map(|&x| f.eval(x)).collect())
        .collect();
    let gvals: Vec<Vec<f64>> = approx
        .iter()
        .map(|g| pts.iter().map(|&x| g.eval(x)).collect())
        .collect();

    let kappa = fit_constants(&fvals, &gvals, scale);
    let maxabs = |v: &[f64]| v.iter().fold(0.0f64, |m, x| m.max(x.abs()));
    let fnorm: Vec<f64> = fvals.iter().map(|v| maxabs(v)).collect();

    let mut upper: f64 = match kappa {
        None => fnorm.iter().product(),
        Some(kappa) => {
            let mut anorm = Vec::with_capacity(d);
            let mut errs = Vec::with_capacity(d);
            for i in 0..d {
                let (mut a_max, mut e_max) = (0.0f64, 0.0f64);
                for (fv, gv) in fvals[i].iter().zip(&gvals[i]) {
                    let a = kappa[i] * gv;
                    a_max = a_max.max(a.abs());
                    e_max = e_max.max((fv - a).abs());
                }
                anorm.push(a_max);
                errs.push(e_max);
            }
            (0..d)
                .map(|i| {
                    errs[i]
                        * anorm[..i].iter().product::<f64>()
                        * fnorm[i + 1..].iter().product::<f64>()
                })
                .sum()
        }
    };

    let approx_at = |x: &[f64]| -> f64 {
        scale
            * approx
                .iter()
                .zip(x)
                .map(|(g, &xi)| g.eval(xi) / scale)
                .product::<f64>()
    };
    let mut lower = 0.0f64;
    let mut probe = |x: &[f64]| {
        lower = lower.max((t.eval(x) - approx_at(x)).abs());
    };
    let argmax = |vals: &[f64]| {
        let mut best = 0;
        for (k, v) in vals.iter().enumerate() {
            if v.abs() > vals[best].abs() {
                best = k;
            }
        }
        pts[best]
    };
    probe(&fvals.iter().map(|v| argmax(v)).collect::<Vec<_>>());
    probe(&gvals.iter().map(|v| argmax(v)).collect::<Vec<_>>());
    for s in 0..cfg.samples {
        probe(&rng::uniform_point(cfg.seed, Purpose::Measurement, s as u64, d));
    }

    upper = upper.max(lower);
    Ok(ErrorBracket { upper, lower })
}

/// Per-axis constants `k_i` with `prod k_i = scale^-(d-1)`, or `None` when some
/// approximant factor vanishes on the whole grid (then `A = 0` there).
fn fit_constants(fvals: &[Vec<f64>], gvals: &[Vec<f64>], scale: f64) -> Option<Vec<f64>> {
    let d = fvals.len();
    if gvals.iter().any(|g| g.iter().all(|&v| v == 0.0)) {
        return None;
    }
    let target = |d: usize| (d as f64 - 1.0) * -scale.abs().ln();
    let fitted: Vec<f64> = fvals[..d - 1]
        .iter()
        .zip(&gvals[..d - 1])
        .map(|(f, g)| {
            let fg: f64 = f.iter().zip(g).map(|(a, b)| a * b).sum();
            let gg: f64 = g.iter().map(|b| b * b).sum();
            fg / gg
        })
        .collect();
    let mut kappa = if fitted.iter().all(|k| k.is_finite() && *k != 0.0) {
        fitted
    } else {
        let each = (target(d) / d as f64).exp();
        vec![each; d - 1]
    };
    // last constant absorbs the rest, including the sign
    let log_rest = target(d) - kappa.iter().map(|k| k.abs().ln()).sum::<f64>();
    let sign_rest = kappa.iter().fold(1.0, |s, k| s * k.signum())
        * if scale < 0.0 && d.is_multiple_of(2) { -1.0 } else { 1.0 };
    kappa.push(sign_rest * log_rest.exp());
    Some(kappa)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::univariate::{interpolate_line, Orientation, UnivariateFactor};

    fn small_cfg() -> MeasureConfig {
        MeasureConfig {
            grid: 2000,
            samples: 2000,
            seed: 9,
        }
    }

    #[test]
    fn sup_norm_examples() {
        let one = RankOneTensor::replicate(UnivariateFactor::constant(1.0, 1).unwrap(), 4, 1.0).unwrap();
        assert_eq!(sup_norm(&one, 10_000), 1.0);
        let b = UnivariateFactor::make_bump(1, Orientation::Left, 0.0, 1.0).unwrap();
        let bumps = RankOneTensor::replicate(b, 10, 2.0).unwrap();
        assert_eq!(sup_norm(&bumps, 10_000), 1.0);
        let id = UnivariateFactor::polynomial(vec![0.0, 1.0], 1).unwrap();
        assert_eq!(sup_norm(&RankOneTensor::replicate(id, 3, 1.0).unwrap(), 10_000), 1.0);
    }

    fn exact_line(f: &UnivariateFactor, r: usize, c: f64) -> PiecewisePolynomial {
        let samples: Vec<_> = (0..r).map(|i| {
            let t = (i as f64 + 0.5) / r as f64;
            (t, c * f.eval(t))
        }).collect();
        interpolate_line(&samples, r).unwrap()
    }

    #[test]
    fn exact_approximants_have_zero_error() {
        // linear factors are reproduced exactly by r = 2 interpolation
        let fs = vec![
            UnivariateFactor::polynomial(vec![1.0, -0.5], 2).unwrap(),
            UnivariateFactor::polynomial(vec![0.5, 0.25], 2).unwrap(),
        ];
        let t = RankOneTensor::new(fs.clone(), 1.0).unwrap();
        let lines: Vec<_> = fs.iter().map(|f| exact_line(f, 2, 1.0)).collect();
        let b = sup_distance_bound(&t, &lines, 1.0, &small_cfg()).unwrap();
        assert!(b.upper <= 1e-15 && b.lower <= 1e-15, "{b:?}");

        // rescaled lines: g_i = c_i f_i with c_1 c_2 = scale
        let scale = 0.3;
        let lines = vec![exact_line(&fs[0], 2, 0.6), exact_line(&fs[1], 2, 0.5)];
        let b = sup_distance_bound(&t, &lines, scale, &small_cfg()).unwrap();
        assert!(b.upper <= 1e-14 && b.lower <= 1e-14, "{b:?}");
    }

    #[test]
    fn one_dimensional_bound_is_grid_error() {
        let f = UnivariateFactor::trig(1.0, 3.0, 0.2, 2).unwrap();
        let t = RankOneTensor::new(vec![f.clone()], 9.0).unwrap();
        let samples: Vec<_> = (0..6).map(|i| {
            let x = (i as f64 + 0.5) / 6.0;
            (x, f.eval(x))
        }).collect();
        let g = interpolate_line(&samples, 2).unwrap();
        let cfg = small_cfg();
        let direct = grid(cfg.grid).map(|x| (f.eval(x) - g.eval(x)).abs()).fold(0.0, f64::max);
        let b = sup_distance_bound(&t, &[g], 1.0, &cfg).unwrap();
        assert!((b.upper - direct).abs() <= 1e-15 || b.upper == b.lower);
        assert!(b.lower <= b.upper);
    }

    #[test]
    fn zero_approximant_gives_sup_norm() {
        let f = UnivariateFactor::trig(0.8, 1.0, 0.0, 1).unwrap();
        let t = RankOneTensor::replicate(f, 2, 1.0).unwrap();
        let zero = interpolate_line(&[(0.5, 0.0)], 1).unwrap();
        let b = sup_distance_bound(&t, &[zero.clone(), zero], 1.0, &small_cfg()).unwrap();
        assert!((b.upper - 0.64).abs() < 1e-12);
        assert!(b.lower <= b.upper);
        assert!(b.lower > 0.6);
    }

    #[test]
    fn rejects_bad_arguments() {
        let f = UnivariateFactor::constant(1.0, 1).unwrap();
        let t = RankOneTensor::replicate(f, 2, 1.0).unwrap();
        let g = interpolate_line(&[(0.5, 1.0)], 1).unwrap();
        assert!(sup_distance_bound(&t, std::slice::from_ref(&g), 1.0, &small_cfg()).is_err());
        assert!(sup_distance_bound(&t, &[g.clone(), g], 0.0, &small_cfg()).is_err());
    }
}
