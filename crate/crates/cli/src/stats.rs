use serde::Serialize;

use crate::CliError;

/// Wilson score interval for `k` successes in `n` trials at `z` standard
/// deviations. `None` when `n = 0`.
pub fn wilson(k: u64, n: u64, z: f64) -> Option<(f64, f64)> {
    if n == 0 {
        return None;
    }
    let n = n as f64;
    let p = k as f64 / n;
    let z2 = z * z;
    let denom = 1.0 + z2 / n;
    let center = (p + z2 / (2.0 * n)) / denom;
    let half = z * (p * (1.0 - p) / n + z2 / (4.0 * n * n)).sqrt() / denom;
    Some(((center - half).max(0.0), (center + half).min(1.0)))
}

/// Binomial standard deviation of a frequency with success probability `p`.
pub fn binomial_sigma(p: f64, n: u64) -> f64 {
    (p.clamp(0.0, 1.0) * (1.0 - p.clamp(0.0, 1.0)) / n.max(1) as f64).sqrt()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OrderFit {
    pub slope: f64,
    pub stderr: f64,
    pub intercept: f64,
    /// Pairs that entered the fit.
    pub points: usize,
}

/// Least-squares slope of `ln error` against `ln n`. Pairs with a
/// non-positive error or `n` are dropped with a warning.
pub fn fit_order(pairs: &[(f64, f64)]) -> Result<OrderFit, CliError> {
    let kept: Vec<(f64, f64)> = pairs
        .iter()
        .filter(|&&(n, e)| {
            let ok = n > 0.0 && e > 0.0 && n.is_finite() && e.is_finite();
            if !ok {
                log::warn!("fit_order: dropping pair (n = {n}, error = {e})");
            }
            ok
        })
        .map(|&(n, e)| (n.ln(), e.ln()))
        .collect();
    if kept.len() < 4 {
        return Err(CliError::config(format!(
            "fit_order needs at least 4 positive pairs, {} left",
            kept.len()
        )));
    }
    let k = kept.len() as f64;
    let mx = kept.iter().map(|p| p.0).sum::<f64>() / k;
    let my = kept.iter().map(|p| p.1).sum::<f64>() / k;
    let sxx: f64 = kept.iter().map(|p| (p.0 - mx).powi(2)).sum();
    if sxx == 0.0 {
        return Err(CliError::config("fit_order needs at least two distinct n"));
    }
    let sxy: f64 = kept.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let rss: f64 = kept.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    Ok(OrderFit {
        slope,
        stderr: (rss / (k - 2.0) / sxx).sqrt(),
        intercept,
        points: kept.len(),
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    #[test]
    fn exact_power_law() {
        let pairs: Vec<(f64, f64)> = [4.0, 8.0, 16.0, 32.0, 64.0].iter().map(|&n: &f64| (n, n.powi(-2))).collect();
        let f = fit_order(&pairs).unwrap();
        assert!((f.slope + 2.0).abs() < 1e-12);
        assert!(f.stderr < 1e-12);
    }

    #[test]
    fn noisy_power_law() {
        let mut g = rand::rngs::StdRng::seed_from_u64(9);
        let pairs: Vec<(f64, f64)> = (0..12)
            .map(|i| {
                let n = 10.0 * 1.5f64.powi(i);
                (n, 5.0 * n.powi(-3) * (1.0 + 0.01 * g.gen_range(-1.0..1.0)))
            })
            .collect();
        assert!((fit_order(&pairs).unwrap().slope + 3.0).abs() < 0.05);
    }

    #[test]
    fn filters_and_minimum() {
        let pairs = [(1.0, 1.0), (2.0, 0.5), (3.0, 0.0), (4.0, 0.25), (5.0, -1.0)];
        assert!(fit_order(&pairs).is_err());
        let pairs = [(1.0, 1.0), (2.0, 0.5), (3.0, 0.0), (4.0, 0.25), (8.0, 0.125)];
        let f = fit_order(&pairs).unwrap();
        assert_eq!(f.points, 4);
        assert!((f.slope + 1.0).abs() < 1e-12);
    }

    #[test]
    fn wilson_interval() {
        assert_eq!(wilson(0, 0, 1.96), None);
        let (lo, hi) = wilson(50, 100, 1.96).unwrap();
        assert!((lo - 0.4038).abs() < 1e-4 && (hi - 0.5962).abs() < 1e-4);
        let (lo, hi) = wilson(10, 10, 1.96).unwrap();
        assert!(lo > 0.69 && hi == 1.0);
    }
}
