//! Random generators of admissible factors and tensors used by the experiments.
//!
//! Every generator returns functions whose exact bounds satisfy
//! `‖f_i‖_∞ <= 1` and `‖f_i^(r)‖_∞ <= M`.

use std::f64::consts::PI;

use rand::Rng;

use crate::rng::{self, Purpose};
use crate::tensor::{sup_norm, RankOneTensor};
use crate::univariate::{factorial, Orientation, UnivariateFactor};
use crate::{Error, Result};

const MAX_ATTEMPTS: usize = 10_000;

fn orientation<R: Rng + ?Sized>(rng: &mut R) -> Orientation {
    if rng.gen::<bool>() {
        Orientation::Left
    } else {
        Orientation::Right
    }
}

/// `A cos(w t + phi)` with `A` uniform in `amp` and `A w^r <= M`.
pub fn trig_factor<R: Rng + ?Sized>(
    rng: &mut R,
    r: u32,
    m: f64,
    amp: (f64, f64),
) -> Result<UnivariateFactor> {
    let a = rng.gen_range(amp.0..=amp.1);
    let omega_max = (m / a).powf(1.0 / r as f64);
    let omega = rng.gen_range(0.0..=omega_max);
    UnivariateFactor::trig(a, omega, rng.gen_range(0.0..2.0 * PI), r)
}

/// Degree-`r` polynomial with a dominant constant term and `|c_r| r! <= M`.
pub fn poly_factor<R: Rng + ?Sized>(rng: &mut R, r: u32, m: f64) -> Result<UnivariateFactor> {
    let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
    let mut c = vec![sign * rng.gen_range(0.6..0.95)];
    for _ in 1..r {
        c.push(rng.gen_range(-0.1..0.1));
    }
    let lead = m / factorial(r);
    c.push(rng.gen_range(-lead..=lead));
    let f = UnivariateFactor::polynomial(c, r)?;
    if f.sup_bound() > 1.0 {
        Ok(f.scaled(1.0 / f.sup_bound()))
    } else {
        Ok(f)
    }
}

/// Trig or polynomial factor with equal probability.
pub fn smooth_factor<R: Rng + ?Sized>(rng: &mut R, r: u32, m: f64) -> Result<UnivariateFactor> {
    if rng.gen::<bool>() {
        trig_factor(rng, r, m, (0.8, 1.0))
    } else {
        poly_factor(rng, r, m)
    }
}

/// Random smooth tensor number `index` of the family seeded by `seed`.
pub fn smooth_tensor(seed: u64, index: u64, d: usize, r: u32, m: f64) -> Result<RankOneTensor> {
    let mut g = rng::stream(seed, Purpose::Family, index);
    let factors = (0..d)
        .map(|_| smooth_factor(&mut g, r, m))
        .collect::<Result<Vec<_>>>()?;
    RankOneTensor::new(factors, m)
}

/// Like [`smooth_tensor`], redrawn until `‖f‖_∞ >= min_norm` on a grid of the
/// given resolution.
pub fn admissible_tensor(
    seed: u64,
    index: u64,
    d: usize,
    r: u32,
    m: f64,
    min_norm: f64,
    resolution: usize,
) -> Result<RankOneTensor> {
    let mut g = rng::stream(seed, Purpose::Family, index);
    for _ in 0..MAX_ATTEMPTS {
        let factors = (0..d)
            .map(|_| smooth_factor(&mut g, r, m))
            .collect::<Result<Vec<_>>>()?;
        let t = RankOneTensor::new(factors, m)?;
        if sup_norm(&t, resolution) >= min_norm {
            return Ok(t);
        }
    }
    Err(Error::Precondition(format!(
        "no tensor with norm >= {min_norm} after {MAX_ATTEMPTS} draws"
    )))
}

/// Ramps of width `V^(1/d)` with alternating orientation; `{f != 0}` has
/// measure exactly `V`. The class bound is the ramps' exact `r! / w^r`.
pub fn support_volume_tensor(d: usize, r: u32, v: f64) -> Result<RankOneTensor> {
    if !(v > 0.0 && v <= 1.0) {
        return Err(Error::param(format!("V = {v} must lie in (0, 1]")));
    }
    let w = v.powf(1.0 / d as f64);
    let factors = (0..d)
        .map(|i| {
            let o = if i % 2 == 0 {
                Orientation::Left
            } else {
                Orientation::Right
            };
            UnivariateFactor::ramp(r, o, w)
        })
        .collect::<Result<Vec<_>>>()?;
    let m = factors[0].deriv_bound();
    RankOneTensor::new(factors, m)
}

/// Scaled ramps `c ramp_w` with `c` uniform in `[0.8, 1]` and the narrowest
/// width allowed by `M`, random orientation; redrawn until `‖f‖_∞ >= min_norm`.
/// Their nonzero set is small and avoids the center of the cube.
pub fn sparse_ramp_tensor<R: Rng + ?Sized>(
    rng: &mut R,
    d: usize,
    r: u32,
    m: f64,
    min_norm: f64,
) -> Result<RankOneTensor> {
    for _ in 0..MAX_ATTEMPTS {
        let factors = (0..d)
            .map(|_| {
                let c = rng.gen_range(0.8..=1.0);
                let w = (c * factorial(r) / m).powf(1.0 / r as f64).min(1.0);
                Ok(UnivariateFactor::ramp(r, orientation(rng), w)?.scaled(c))
            })
            .collect::<Result<Vec<_>>>()?;
        let norm: f64 = factors.iter().map(UnivariateFactor::sup_bound).product();
        if norm >= min_norm {
            return RankOneTensor::new(factors, m);
        }
    }
    Err(Error::Precondition(format!(
        "no sparse tensor with norm >= {min_norm} after {MAX_ATTEMPTS} draws"
    )))
}

/// `((t - a)(b - t))^r` on `[a, b]` and zero elsewhere.
fn spline_bump(r: u32, a: f64, b: f64) -> Result<UnivariateFactor> {
    let w = b - a;
    // (s (w - s))^r = sum_k binom(r, k) w^(r-k) (-1)^k s^(r+k), s = t - a
    let mut c = vec![0.0; 2 * r as usize + 1];
    let mut binom = 1.0;
    for k in 0..=r {
        let sign = if k % 2 == 0 { 1.0 } else { -1.0 };
        c[(r + k) as usize] = sign * binom * w.powi((r - k) as i32);
        binom = binom * (r - k) as f64 / (k + 1) as f64;
    }
    let mut breakpoints = vec![0.0];
    let mut coefficients = Vec::new();
    if a > 0.0 {
        breakpoints.push(a);
        coefficients.push(vec![0.0]);
    }
    coefficients.push(c);
    if b < 1.0 {
        breakpoints.push(b);
        coefficients.push(vec![0.0]);
    }
    breakpoints.push(1.0);
    UnivariateFactor::piecewise(breakpoints, coefficients, r)
}

fn fit_bounds<R: Rng + ?Sized>(rng: &mut R, f: UnivariateFactor, m: f64) -> UnivariateFactor {
    let cap = (1.0 / f.sup_bound()).min(m / f.deriv_bound());
    f.scaled(rng.gen_range(0.2..=1.0) * cap)
}

/// Random factor with at least `r` distinct zeros in `[0, 1]`, `r <= 6`.
///
/// Draws from four shapes: polynomials through `r` or `r + 1` random roots,
/// ramps, `C^(r-1)` spline bumps and cosines with at least `r` sign changes.
pub fn factor_with_zeros<R: Rng + ?Sized>(rng: &mut R, r: u32, m: f64) -> Result<UnivariateFactor> {
    let f = match rng.gen_range(0..4) {
        0 => {
            let k = r as usize + rng.gen_range(0..=1);
            let mut roots: Vec<f64> = (0..k).map(|_| rng.gen::<f64>()).collect();
            roots.sort_by(f64::total_cmp);
            roots.dedup();
            if roots.windows(2).any(|w| w[1] - w[0] < 1e-6) {
                return factor_with_zeros(rng, r, m);
            }
            fit_bounds(rng, UnivariateFactor::from_roots(1.0, &roots, r)?, m)
        }
        1 => {
            let w_min = (factorial(r) / m).powf(1.0 / r as f64);
            if w_min >= 1.0 {
                return factor_with_zeros(rng, r, m);
            }
            let w = rng.gen_range(w_min..1.0);
            // the scale keeps the ramp inside the class
            let c_max = (m * w.powi(r as i32) / factorial(r)).min(1.0);
            UnivariateFactor::ramp(r, orientation(rng), w)?.scaled(rng.gen_range(0.2..=1.0) * c_max)
        }
        2 => {
            let a = rng.gen_range(0.0..0.5);
            let b = rng.gen_range(a + 0.1..=1.0);
            fit_bounds(rng, spline_bump(r, a, b)?, m)
        }
        _ => {
            let omega = rng.gen_range(r as f64 * PI..(r as f64 + 2.0) * PI);
            let f = UnivariateFactor::trig(1.0, omega, rng.gen_range(0.0..2.0 * PI), r)?;
            fit_bounds(rng, f, m)
        }
    };
    Ok(f)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::{check_membership, FunctionClass};

    #[test]
    fn generated_tensors_are_members() {
        for i in 0..50 {
            for r in 1..=5 {
                let t = smooth_tensor(7, i, 4, r, 10.0).unwrap();
                assert!(check_membership(&t, FunctionClass::Smooth).is_ok(), "{i} {r}");
            }
        }
        let t = admissible_tensor(1, 0, 10, 5, 10.0, 0.1, 1000).unwrap();
        assert!(sup_norm(&t, 1000) >= 0.1);
    }

    #[test]
    fn support_volume_is_exact() {
        for v in [0.1, 0.3] {
            let t = support_volume_tensor(6, 2, v).unwrap();
            assert!((t.nonzero_measure() - v).abs() < 1e-12);
            assert!(check_membership(&t, FunctionClass::Smooth).is_ok());
        }
    }

    #[test]
    fn sparse_ramps_respect_the_class() {
        let mut g = rng::stream(3, Purpose::Family, 0);
        for _ in 0..100 {
            let t = sparse_ramp_tensor(&mut g, 8, 1, 1.9, 0.2).unwrap();
            assert!(check_membership(&t, FunctionClass::Smooth).is_ok());
            assert!(sup_norm(&t, 1000) >= 0.2 - 1e-12);
            assert!(t.nonzero_measure() < 0.01);
        }
    }

    #[test]
    fn factors_with_zeros_have_enough_zeros() {
        let mut g = rng::stream(5, Purpose::Family, 1);
        for _ in 0..300 {
            let r = g.gen_range(1..=4);
            let m = g.gen_range(1.0..50.0);
            let f = factor_with_zeros(&mut g, r, m).unwrap();
            assert!(f.zeros_in(0.0, 1.0).has_at_least(r as usize), "{f:?}");
            assert!(f.sup_bound() <= 1.0 + 1e-12 && f.deriv_bound() <= m * (1.0 + 1e-12), "{f:?}");
        }
    }

    #[test]
    fn spline_bump_shape() {
        let f = spline_bump(2, 0.2, 0.6).unwrap();
        assert_eq!(f.eval(0.1), 0.0);
        assert_eq!(f.eval(0.7), 0.0);
        assert!((f.eval(0.4) - 0.04f64.powi(2)).abs() < 1e-15);
        assert!((f.nonzero_measure() - 0.4).abs() < 1e-12);
    }
}
