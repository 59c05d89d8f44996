//! Fits the constant of the recovery error contract
//! `‖f - A‖_∞ <= C_r M d^(r+1) n2^-r`.
//!
//! For each order r the largest ratio of the measured upper error to
//! `M d^(r+1) n2^-r` is reported over smooth and ramp families, several
//! dimensions and budgets from the minimum upwards.

use rankone::families;
use rankone::recovery::{recover, RecoveryConfig};
use rankone::rng::{self, Purpose};
use rankone::tensor::{sup_distance_bound, MeasureConfig, QueryOracle, RankOneTensor};

fn ratio(t: &RankOneTensor, n2: u64, seed: u64) -> Option<f64> {
    let d = t.dim();
    let r = t.r();
    let mut z = None;
    for k in 0..1000 {
        let x = rng::uniform_point(seed, Purpose::UniformSearch, k, d);
        if t.eval(&x) != 0.0 {
            z = Some(x);
            break;
        }
    }
    let z = z?;
    let mut oracle = QueryOracle::new(t);
    let a = recover(&mut oracle, &z, &RecoveryConfig::new(r, n2)).ok()?;
    let cfg = MeasureConfig {
        grid: 10_000,
        samples: 500,
        seed,
    };
    let b = sup_distance_bound(t, &a.lines, a.center_value, &cfg).ok()?;
    let scale = t.m() * (d as f64).powi(r as i32 + 1) * (n2 as f64).powi(-(r as i32));
    Some(b.upper / scale)
}

fn main() {
    for r in 1..=6u32 {
        let mut worst: f64 = 0.0;
        let mut at = (0, 0, 0.0);
        for d in [1usize, 2, 3, 5] {
            let min = RecoveryConfig::min_budget(r, d);
            let budgets: Vec<u64> = (0..12).map(|k| min + k * d as u64 * r as u64 / 2 + k).chain([min * 4, min * 8, min * 16]).collect();
            let fact: f64 = (1..=r).map(f64::from).product();
            for m in [1.0, 10.0, fact * 2f64.powi(r as i32) * 0.9, 100.0] {
                for i in 0..12u64 {
                    let t = families::smooth_tensor(11, i, d, r, m).unwrap();
                    for &n2 in &budgets {
                        if let Some(q) = ratio(&t, n2, i) {
                            if q > worst {
                                worst = q;
                                at = (d, n2, m);
                            }
                        }
                    }
                }
            }
            for v in [0.1, 0.5, 0.9] {
                let t = families::support_volume_tensor(d, r, v).unwrap();
                for &n2 in &budgets {
                    if let Some(q) = ratio(&t, n2, 5) {
                        if q > worst {
                            worst = q;
                            at = (d, n2, t.m());
                        }
                    }
                }
            }
        }
        println!(
            "r={r} max ratio {worst:.4} at (d={}, n2={}, M={:.3}); with 25% margin {:.4}",
            at.0,
            at.1,
            at.2,
            worst * 1.25
        );
    }
}
