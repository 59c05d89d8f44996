use proptest::prelude::*;
use rand::Rng;
use rankone::adversary::fool_deterministic;
use rankone::dispersion::{exact_dispersion, halton, PointSet};
use rankone::families;
use rankone::pipeline::Approximation;
use rankone::recovery::{recover, RecoveryConfig};
use rankone::rng::{self, floyd_subset, Purpose};
use rankone::search::{search_deterministic, subset_point, SubsetSearchParams};
use rankone::tensor::{sup_distance_bound, MeasureConfig, QueryOracle, RankOneTensor};
use rankone::univariate::{Orientation, UnivariateFactor};

fn small_measure(seed: u64) -> MeasureConfig {
    MeasureConfig {
        grid: 2000,
        samples: 500,
        seed,
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn evaluation_is_multiplicative(seed in 0u64..1000, x in prop::collection::vec(0.0f64..=1.0, 5), split in 1usize..5) {
        let t = families::smooth_tensor(seed, 0, 5, 2, 3.0).unwrap();
        let left = RankOneTensor::new(t.factors()[..split].to_vec(), 3.0).unwrap();
        let right = RankOneTensor::new(t.factors()[split..].to_vec(), 3.0).unwrap();
        let whole = QueryOracle::new(&t).evaluate(&x).unwrap();
        let parts = left.eval(&x[..split]) * right.eval(&x[split..]);
        prop_assert!((whole - parts).abs() <= 1e-12 * whole.abs().max(1e-300));
    }

    #[test]
    fn query_count_is_exact(k in 0u64..50, budget in 0u64..50) {
        let t = families::smooth_tensor(1, 1, 2, 1, 1.0).unwrap();
        let mut o = QueryOracle::new(&t).with_budget(budget);
        let mut ok = 0;
        for _ in 0..k {
            if o.evaluate(&[0.5, 0.5]).is_ok() {
                ok += 1;
            }
        }
        prop_assert_eq!(ok, k.min(budget));
        prop_assert_eq!(o.count(), k.min(budget));
    }

    #[test]
    fn error_bracket_is_ordered(seed in 0u64..10_000, r in 1u32..4, d in 1usize..4, n2 in 10u64..60) {
        let t = families::smooth_tensor(seed, 0, d, r, 5.0).unwrap();
        let z = rng::uniform_point(seed, Purpose::UniformSearch, 0, d);
        prop_assume!(t.eval(&z) != 0.0);
        let cfg = RecoveryConfig::new(r, n2);
        prop_assume!(cfg.nodes_per_line(d) >= u64::from(r.max(2)));
        let a = recover(&mut QueryOracle::new(&t), &z, &cfg).unwrap();
        let b = sup_distance_bound(&t, &a.lines, a.center_value, &small_measure(seed)).unwrap();
        prop_assert!(b.lower <= b.upper);
    }

    #[test]
    fn recovery_ignores_the_factorization(seed in 0u64..1000, c in 0.2f64..5.0) {
        let t = families::smooth_tensor(seed, 0, 3, 2, 2.0).unwrap();
        let mut fs = t.factors().to_vec();
        fs[0] = fs[0].scaled(c);
        fs[2] = fs[2].scaled(1.0 / c);
        let u = RankOneTensor::new(fs, 100.0).unwrap();
        let z = [0.3, 0.5, 0.7];
        prop_assume!(t.eval(&z).abs() > 1e-3);
        let cfg = RecoveryConfig::new(2, 40);
        let a = recover(&mut QueryOracle::new(&t), &z, &cfg).unwrap();
        let b = recover(&mut QueryOracle::new(&u), &z, &cfg).unwrap();
        for k in 0..20 {
            let x = rng::uniform_point(seed, Purpose::Measurement, k, 3);
            let (p, q) = (a.eval(&x), b.eval(&x));
            prop_assert!((p - q).abs() <= 1e-9 * p.abs().max(q.abs()).max(1e-3));
        }
    }

    #[test]
    fn polynomial_factors_below_degree_r_are_exact(seed in 0u64..1000, r in 2u32..5) {
        let mut g = rng::stream(seed, Purpose::Family, 7);
        let fs: Vec<_> = (0..3)
            .map(|_| {
                let mut c = vec![g.gen_range(0.5..0.9)];
                for _ in 1..r {
                    c.push(g.gen_range(-0.1..0.1));
                }
                UnivariateFactor::polynomial(c, r).unwrap()
            })
            .collect();
        let t = RankOneTensor::new(fs, 1.0).unwrap();
        let a = recover(&mut QueryOracle::new(&t), &[0.4, 0.4, 0.4], &RecoveryConfig::new(r, 3 * 2 * r as u64 + 1)).unwrap();
        let b = sup_distance_bound(&t, &a.lines, a.center_value, &small_measure(seed)).unwrap();
        prop_assert!(b.upper <= 1e-8, "{:?}", b);
    }
}

#[test]
fn all_left_bumps_product() {
    for r in 1..=3u32 {
        let bump = UnivariateFactor::make_bump(r, Orientation::Left, 0.0, 1.0).unwrap();
        for d in 1..=4usize {
            let t = RankOneTensor::replicate(bump.clone(), d, 64.0).unwrap();
            let n = 6usize;
            let total = (n + 1).pow(d as u32);
            for idx in 0..total {
                let x: Vec<f64> = (0..d).map(|i| (idx / (n + 1).pow(i as u32) % (n + 1)) as f64 / n as f64).collect();
                let inside = x.iter().all(|&t| t < 0.5);
                let expected = if inside {
                    x.iter().map(|&t| 2f64.powi(r as i32) * (0.5 - t).powi(r as i32)).product()
                } else {
                    0.0
                };
                let v = t.eval(&x);
                assert!((v - expected).abs() <= 1e-12, "r={r} x={x:?}: {v} vs {expected}");
            }
        }
    }
}

#[test]
fn recovery_error_decreases_at_rate_r() {
    let f = UnivariateFactor::polynomial(vec![1.0, 0.0, -0.5], 2).unwrap();
    let t = RankOneTensor::replicate(f, 3, 1.0).unwrap();
    let mut pts = Vec::new();
    let mut prev = f64::INFINITY;
    for m in [8u64, 16, 32, 64] {
        let n2 = 3 * m;
        let a = recover(&mut QueryOracle::new(&t), &[0.0, 0.0, 0.0], &RecoveryConfig::new(2, n2)).unwrap();
        let b = sup_distance_bound(&t, &a.lines, a.center_value, &small_measure(1)).unwrap();
        assert!(b.upper < prev);
        prev = b.upper;
        pts.push(((n2 as f64).ln(), b.upper.ln()));
    }
    let n = pts.len() as f64;
    let (mx, my) = (pts.iter().map(|p| p.0).sum::<f64>() / n, pts.iter().map(|p| p.1).sum::<f64>() / n);
    let slope = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum::<f64>()
        / pts.iter().map(|p| (p.0 - mx).powi(2)).sum::<f64>();
    assert!(slope <= -2.0 + 0.3, "slope {slope}");
}

#[test]
fn subsets_are_uniform() {
    // d = 6, d* = 2: 15 subsets, chi-square with 14 degrees of freedom
    let draws = 100_000u64;
    let mut counts = [0u64; 15];
    let index = |s: &[usize]| {
        let (a, b) = (s[0], s[1]);
        (0..a).map(|i| 5 - i).sum::<usize>() + (b - a - 1)
    };
    for i in 0..draws {
        let mut g = rng::stream(3, Purpose::SubsetSearch, i);
        counts[index(&floyd_subset(&mut g, 6, 2))] += 1;
    }
    let expected = draws as f64 / 15.0;
    let chi2: f64 = counts.iter().map(|&c| (c as f64 - expected).powi(2) / expected).sum();
    // the 0.999 quantile of chi-square(14) is 36.12
    assert!(chi2 < 36.12, "chi2 = {chi2}, counts {counts:?}");
}

#[test]
fn subset_points_use_the_drawn_subset() {
    let params = SubsetSearchParams::new(1, 1.0, 0.5).unwrap();
    assert_eq!(params.d_star, 3);
    for i in 0..2000 {
        let (subset, x) = subset_point(&params, 7, 11, i);
        for (j, &xj) in x.iter().enumerate() {
            if !subset.contains(&j) {
                assert!((0.25..=0.75).contains(&xj));
            }
        }
    }
}

#[test]
fn few_factors_vanish_near_the_center() {
    // at most d* factors of an f with ‖f‖ >= eps have r zeros in the central interval
    let mut g = rng::stream(21, Purpose::Family, 0);
    let mut checked = 0;
    while checked < 100 {
        let r = g.gen_range(1..=3u32);
        let top = 2f64.powi(r as i32) * (1..=r).product::<u32>() as f64;
        let m = g.gen_range(0.5..0.99) * top;
        let eps = g.gen_range(0.05..0.6);
        let d = g.gen_range(4..=12);
        let params = SubsetSearchParams::new(r, m, eps).unwrap();
        let factors: Vec<_> = (0..d)
            .map(|_| {
                if g.gen_bool(0.5) {
                    families::factor_with_zeros(&mut g, r, m).unwrap()
                } else {
                    families::smooth_factor(&mut g, r, m).unwrap()
                }
            })
            .collect();
        let norm: f64 = factors.iter().map(|f| f.sup_bound()).product();
        if norm < eps {
            continue;
        }
        checked += 1;
        let (lo, hi) = (0.5 - params.delta_star, 0.5 + params.delta_star);
        let vanishing = factors.iter().filter(|f| f.zeros_in(lo, hi).has_at_least(r as usize)).count();
        assert!(vanishing <= params.d_star, "{vanishing} > {}", params.d_star);
    }
}

#[test]
fn low_dispersion_scan_hits_every_support_box() {
    for seed in 0..20u64 {
        let mut g = rng::stream(seed, Purpose::Family, 3);
        let d = g.gen_range(1..=3usize);
        let v = g.gen_range(0.15..0.5);
        // rejection: random sets until the dispersion is at most V
        let mut k = 0;
        let ps = loop {
            let ps = PointSet::uniform(20 * d, d, seed * 1000 + k).unwrap();
            if exact_dispersion(&ps).unwrap().value <= v {
                break ps;
            }
            k += 1;
        };
        // ramps whose support box has volume just above V
        let w = (v * 1.01).powf(1.0 / d as f64).min(1.0);
        let factors: Vec<_> = (0..d)
            .map(|_| {
                let o = if g.gen_bool(0.5) { Orientation::Left } else { Orientation::Right };
                UnivariateFactor::ramp(1, o, w).unwrap()
            })
            .collect();
        let t = RankOneTensor::new(factors, 1.0 / w).unwrap();
        let out = search_deterministic(&mut QueryOracle::new(&t), &ps).unwrap();
        assert!(out.found(), "seed {seed}");
    }
}

#[test]
fn orthant_avoiding_scan_finds_nothing() {
    let bump = UnivariateFactor::make_bump(2, Orientation::Left, 0.0, 1.0).unwrap();
    let t = RankOneTensor::replicate(bump, 3, 8.0).unwrap();
    let ps = PointSet::new(
        3,
        halton(64, 3).unwrap().points().iter().filter(|p| p.iter().any(|&x| x >= 0.5)).cloned().collect(),
    )
    .unwrap();
    let out = search_deterministic(&mut QueryOracle::new(&t), &ps).unwrap();
    assert!(!out.found());
    assert_eq!(out.queries_used, ps.len() as u64);
}

#[test]
fn halton_scan_is_fooled_in_dimension_four() {
    let ps = halton(15, 4).unwrap();
    let scan = |o: &mut QueryOracle<'_>| {
        let s = search_deterministic(o, &ps)?;
        Ok(if s.found() {
            Approximation::Tensor(o.target().clone())
        } else {
            Approximation::Zero
        })
    };
    let out = fool_deterministic(scan, 15, 4, 1).unwrap();
    assert!(out.error_lower >= 1.0);
}
