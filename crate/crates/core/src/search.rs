//! First phase: locating a point `z*` with `f(z*) != 0`, and the planner that
//! turns `(r, M, d, eps, V, p)` into query budgets.

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::dispersion::{n_disp_upper, DispMethod, PointSet};
use crate::recovery::{calibrated_c_r, required_n2, RecoveryConfig};
use crate::rng::{self, floyd_subset, Purpose};
use crate::tensor::QueryOracle;
use crate::univariate::factorial;
use crate::{Error, Result};

/// One evaluated candidate.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Tried {
    pub point: Vec<f64>,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SearchOutcome {
    /// The first point with a nonzero value, if any.
    pub z_star: Option<Vec<f64>>,
    pub queries_used: u64,
    pub iterations: u64,
    pub trace: Vec<Tried>,
}

impl SearchOutcome {
    pub fn found(&self) -> bool {
        self.z_star.is_some()
    }

    /// The tried point with the largest `|f|`, if any value was nonzero.
    pub fn best_nonzero(&self) -> Option<&Tried> {
        self.trace
            .iter()
            .filter(|t| t.value != 0.0)
            .max_by(|a, b| a.value.abs().total_cmp(&b.value.abs()))
    }
}

/// Evaluates candidates in order until one is nonzero or `n` are spent.
fn scan<I>(oracle: &mut QueryOracle<'_>, candidates: I) -> Result<SearchOutcome>
where
    I: IntoIterator<Item = Vec<f64>>,
{
    let start = oracle.count();
    let mut trace = Vec::new();
    let mut z_star = None;
    for x in candidates {
        let value = oracle.evaluate(&x)?;
        trace.push(Tried {
            point: x.clone(),
            value,
        });
        if value != 0.0 {
            z_star = Some(x);
            break;
        }
    }
    Ok(SearchOutcome {
        z_star,
        queries_used: oracle.count() - start,
        iterations: trace.len() as u64,
        trace,
    })
}

/// A single uniform draw.
pub fn search_uniform_single(oracle: &mut QueryOracle<'_>, seed: u64) -> Result<SearchOutcome> {
    search_uniform_multi(oracle, 1, seed)
}

/// Up to `n1` i.i.d. uniform draws; draw `i` depends only on `(seed, i)`.
pub fn search_uniform_multi(oracle: &mut QueryOracle<'_>, n1: u64, seed: u64) -> Result<SearchOutcome> {
    let d = oracle.dim();
    scan(
        oracle,
        (0..n1).map(|i| rng::uniform_point(seed, Purpose::UniformSearch, i, d)),
    )
}

/// Evaluates the points of `ps` in order.
pub fn search_deterministic(oracle: &mut QueryOracle<'_>, ps: &PointSet) -> Result<SearchOutcome> {
    if ps.dim() != oracle.dim() {
        return Err(Error::DimensionMismatch {
            expected: oracle.dim(),
            got: ps.dim(),
        });
    }
    scan(oracle, ps.points().iter().cloned())
}

/// Constants of the subset search.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SubsetSearchParams {
    pub r: u32,
    pub m: f64,
    pub eps: f64,
    /// Half-width of the central interval.
    pub delta_star: f64,
    /// Number of freely drawn coordinates.
    pub d_star: usize,
    pub alpha: f64,
    /// `ln C_{r,eps,M}`; the constant itself overflows for moderate `alpha`.
    pub ln_c_prob: f64,
}

impl SubsetSearchParams {
    /// Requires `M < 2^r r!` and `0 < eps < 1`.
    pub fn new(r: u32, m: f64, eps: f64) -> Result<Self> {
        if r == 0 || !(m > 0.0) || !(eps > 0.0 && eps < 1.0) {
            return Err(Error::param(format!(
                "subset search needs r >= 1, M > 0 and eps in (0, 1); got r={r}, M={m}, eps={eps}"
            )));
        }
        let rf = r as f64;
        let fact = factorial(r);
        let top = 2f64.powi(r as i32) * fact;
        if m >= top {
            return Err(Error::param(format!("subset search needs M < 2^r r! = {top}, got {m}")));
        }
        let delta_star = (1.0 / 2f64.powi(r as i32 + 1) + fact / (2.0 * m)).powf(1.0 / rf) - 0.5;
        let q = m / (2.0 * top) + 0.5;
        let log_inv_eps = -eps.ln();
        let d_star = ((log_inv_eps / -q.ln()).ceil() as usize).max(1);
        let alpha = 1.0 + 2.0 * top * log_inv_eps / (top - m);
        let ln_c_prob = alpha / rf * (3f64.powi(r as i32) * m / (fact * eps)).ln();
        Ok(Self {
            r,
            m,
            eps,
            delta_star,
            d_star,
            alpha,
            ln_c_prob,
        })
    }

    pub fn c_prob(&self) -> f64 {
        self.ln_c_prob.exp()
    }

    /// Parameters for dimension `d` with `d*` lowered to `d` when it exceeds it.
    /// With `d* = d` every coordinate is drawn uniformly. The printed success
    /// bound remains valid: each iteration then succeeds with probability at
    /// least `(r! eps / M)^(d/r)`, which is no smaller than `d^-alpha / C`.
    pub fn clamped_to(&self, d: usize) -> Self {
        Self {
            d_star: self.d_star.min(d),
            ..*self
        }
    }

    /// `ln(d^-alpha / C)`.
    pub fn ln_iteration_bound(&self, d: usize) -> f64 {
        -self.alpha * (d as f64).ln() - self.ln_c_prob
    }

    /// `1 - (1 - d^-alpha / C)^n1`.
    pub fn printed_bound(&self, d: usize, n1: f64) -> f64 {
        miss_complement(self.ln_iteration_bound(d), n1)
    }

    /// Per-iteration bound `(r! eps / M)^(d*/r) / binom(d, d*)` from the proof.
    pub fn theta_bound(&self, d: usize) -> f64 {
        let ds = self.d_star.min(d);
        let ln_binom: f64 = (0..ds).map(|i| ((d - i) as f64 / (i + 1) as f64).ln()).sum();
        (ds as f64 / self.r as f64 * (factorial(self.r) * self.eps / self.m).ln() - ln_binom).exp()
    }

    /// `1 - (1 - theta)^n1` with the proof's `theta`.
    pub fn theta_success_bound(&self, d: usize, n1: f64) -> f64 {
        miss_complement(self.theta_bound(d).ln(), n1)
    }

    /// `C d^alpha ln(1/p)` before rounding.
    pub fn n1_required(&self, d: usize, p: f64) -> f64 {
        (self.ln_c_prob + self.alpha * (d as f64).ln()).exp() * (-p.ln())
    }
}

/// `1 - (1 - x)^n` for `x = exp(ln_x)`, stable for tiny `x` and huge `n`.
fn miss_complement(ln_x: f64, n: f64) -> f64 {
    if n <= 0.0 {
        return 0.0;
    }
    let log_miss = if ln_x < -30.0 {
        -(ln_x + n.ln()).exp()
    } else {
        n * (-ln_x.exp()).ln_1p()
    };
    -log_miss.exp_m1()
}

/// Draws of the subset search: a uniform `d*`-subset `I` of the coordinates;
/// coordinates in `I` uniform on `[0, 1]`, the others uniform on
/// `[1/2 - delta*, 1/2 + delta*]`.
pub fn subset_point(params: &SubsetSearchParams, d: usize, seed: u64, i: u64) -> (Vec<usize>, Vec<f64>) {
    let mut g = rng::stream(seed, Purpose::SubsetSearch, i);
    let subset = floyd_subset(&mut g, d, params.d_star);
    let mut x = Vec::with_capacity(d);
    let mut k = 0;
    for j in 0..d {
        let z: f64 = g.gen();
        if k < subset.len() && subset[k] == j {
            x.push(z);
            k += 1;
        } else {
            x.push(0.5 + params.delta_star * (2.0 * z - 1.0));
        }
    }
    (subset, x)
}

/// Up to `n1` subset-search draws. Fails when `d < d*`; use
/// [`SubsetSearchParams::clamped_to`] to run the search in low dimension.
pub fn search_subset(
    oracle: &mut QueryOracle<'_>,
    params: &SubsetSearchParams,
    n1: u64,
    seed: u64,
) -> Result<SearchOutcome> {
    let d = oracle.dim();
    if d < params.d_star {
        return Err(Error::param(format!(
            "subset search needs d >= d* = {}, got d = {d}",
            params.d_star
        )));
    }
    scan(oracle, (0..n1).map(|i| subset_point(params, d, seed, i).1))
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Regime {
    #[serde(rename = "trivial_M_small")]
    TrivialMSmall,
    #[serde(rename = "subset_search")]
    SubsetSearch,
    #[serde(rename = "support_class_random")]
    SupportClassRandom,
    #[serde(rename = "support_class_deterministic")]
    SupportClassDeterministic,
    #[serde(rename = "intractable")]
    Intractable,
}

impl Regime {
    pub fn tag(&self) -> &'static str {
        match self {
            Regime::TrivialMSmall => "trivial_M_small",
            Regime::SubsetSearch => "subset_search",
            Regime::SupportClassRandom => "support_class_random",
            Regime::SupportClassDeterministic => "support_class_deterministic",
            Regime::Intractable => "intractable",
        }
    }
}

/// Problem parameters for [`plan`].
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PlanInput {
    pub r: u32,
    #[serde(rename = "M")]
    pub m: f64,
    pub d: usize,
    pub eps: f64,
    #[serde(rename = "V", default)]
    pub v: Option<f64>,
    /// Allowed failure probability.
    pub p: f64,
    /// In the support-volume class, scan a low-dispersion set instead of
    /// drawing random points.
    #[serde(default)]
    pub deterministic: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BudgetPlan {
    pub regime: Regime,
    /// Phase-one budget used for execution (saturates at `u64::MAX`).
    pub n1: u64,
    /// Phase-one budget before rounding and saturation.
    pub n1_required: f64,
    pub n2: u64,
    pub success_prob_lower: f64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub subset: Option<SubsetSearchParams>,
    pub note: String,
}

fn saturate(x: f64) -> u64 {
    if x >= u64::MAX as f64 {
        u64::MAX
    } else {
        x.ceil() as u64
    }
}

/// Chooses the strategy and budgets for an `eps`-approximation with
/// probability at least `1 - p`.
pub fn plan(input: &PlanInput) -> Result<BudgetPlan> {
    let PlanInput {
        r,
        m,
        d,
        eps,
        v,
        p,
        deterministic,
    } = *input;
    if r == 0 || d == 0 || !(m > 0.0) {
        return Err(Error::param("plan needs r >= 1, d >= 1 and M > 0"));
    }
    if !(eps > 0.0 && eps < 1.0) {
        return Err(Error::param(format!("eps = {eps} must lie in (0, 1)")));
    }
    if !(p > 0.0 && p < 1.0) {
        return Err(Error::param(format!("p = {p} must lie in (0, 1)")));
    }
    if let Some(v) = v {
        if !(v > 0.0 && v < 1.0) {
            return Err(Error::param(format!("V = {v} must lie in (0, 1)")));
        }
    }
    let n2 = required_n2(d, r, m, eps, calibrated_c_r(r))?.max(RecoveryConfig::min_budget(r, d));
    let fact = factorial(r);
    let top = 2f64.powi(r as i32) * fact;

    let mut out = BudgetPlan {
        regime: Regime::TrivialMSmall,
        n1: 1,
        n1_required: 1.0,
        n2,
        success_prob_lower: 1.0,
        subset: None,
        note: String::new(),
    };
    if m <= fact * eps {
        out.note = "M <= r! eps: f vanishes only on a null set or ‖f‖ <= eps".into();
    } else if let Some(v) = v {
        if deterministic {
            let n = n_disp_upper(v, d, DispMethod::Behw)?;
            out.regime = Regime::SupportClassDeterministic;
            out.n1 = n;
            out.n1_required = n as f64;
            out.note = "a point set with dispersion <= V hits every admissible support box".into();
        } else {
            let n = (p.ln() / (-v).ln_1p()).ceil().max(1.0);
            out.regime = Regime::SupportClassRandom;
            out.n1 = saturate(n);
            out.n1_required = n;
            out.success_prob_lower = -(n * (-v).ln_1p()).exp_m1();
            out.note = "uniform draws hit {f != 0} with probability at least V each".into();
        }
    } else if m < top {
        let params = SubsetSearchParams::new(r, m, eps)?.clamped_to(d);
        let n = params.n1_required(d, p).ceil().max(1.0);
        out.regime = Regime::SubsetSearch;
        out.n1 = saturate(n);
        out.n1_required = n;
        out.success_prob_lower = params.printed_bound(d, n);
        out.subset = Some(params);
        out.note = if n >= u64::MAX as f64 {
            "execution budget saturated; the search stops at the first nonzero".into()
        } else {
            String::new()
        };
    } else {
        let n = 2f64.powi(d.min(1023) as i32);
        out.regime = Regime::Intractable;
        out.n1 = saturate(n);
        out.n1_required = n;
        out.success_prob_lower = 0.0;
        out.note = "M >= 2^r r!: with fewer than 2^d queries the error can be 1 for any algorithm".into();
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::tensor::RankOneTensor;
    use crate::univariate::UnivariateFactor;

    fn input(r: u32, m: f64, d: usize, eps: f64) -> PlanInput {
        PlanInput {
            r,
            m,
            d,
            eps,
            v: None,
            p: 0.1,
            deterministic: false,
        }
    }

    #[test]
    fn subset_parameter_examples() {
        let s = SubsetSearchParams::new(1, 1.0, 0.5).unwrap();
        assert!((s.delta_star - 0.25).abs() < 1e-15);
        assert_eq!(s.d_star, 3);
        let s = SubsetSearchParams::new(1, 1.0, (-1.0f64).exp()).unwrap();
        assert_eq!(s.alpha, 5.0);
        assert!(SubsetSearchParams::new(1, 2.0, 0.5).is_err());
        assert!(SubsetSearchParams::new(1, 1.0, 1.0).is_err());
    }

    #[test]
    fn d_star_within_alpha() {
        for r in 1..=5 {
            let top = 2f64.powi(r as i32) * factorial(r);
            for k in 1..20 {
                let m = top * k as f64 / 20.0;
                for eps in [0.01, 0.1, 0.5, 0.9] {
                    let s = SubsetSearchParams::new(r, m, eps).unwrap();
                    assert!(s.d_star >= 1 && s.d_star as f64 <= s.alpha, "{s:?}");
                    assert!(s.delta_star > 0.0);
                }
            }
        }
    }

    #[test]
    fn plan_examples() {
        let p = plan(&input(5, 10.0, 10, 0.1)).unwrap();
        assert_eq!(p.regime, Regime::TrivialMSmall);
        assert_eq!(p.n1, 1);
        assert_eq!(plan(&input(5, 3840.0, 10, 0.9)).unwrap().regime, Regime::Intractable);
        let mut v = input(2, 100.0, 4, 0.1);
        v.v = Some(0.2);
        let p = plan(&v).unwrap();
        assert_eq!(p.regime, Regime::SupportClassRandom);
        assert_eq!(p.n1, 11); // ln 0.1 / ln 0.8 = 10.3
        assert!(p.success_prob_lower >= 0.9);
        v.deterministic = true;
        assert_eq!(plan(&v).unwrap().regime, Regime::SupportClassDeterministic);
        v.v = Some(1.0);
        assert!(plan(&v).is_err());
        assert!(plan(&input(1, 1.0, 3, 1.0)).is_err());
    }

    #[test]
    fn plan_boundaries() {
        let e = 0.1;
        for r in 1..=4 {
            let f = factorial(r);
            let top = 2f64.powi(r as i32) * f;
            assert_eq!(plan(&input(r, f * e, 6, e)).unwrap().regime, Regime::TrivialMSmall);
            assert_eq!(plan(&input(r, f * e * (1.0 + 1e-9), 6, e)).unwrap().regime, Regime::SubsetSearch);
            assert_eq!(plan(&input(r, top * (1.0 - 1e-9), 6, e)).unwrap().regime, Regime::SubsetSearch);
            assert_eq!(plan(&input(r, top, 6, e)).unwrap().regime, Regime::Intractable);
        }
    }

    #[test]
    fn subset_plan_meets_its_target() {
        let p = plan(&PlanInput {
            p: 0.5,
            ..input(1, 1.9, 8, 0.2)
        })
        .unwrap();
        assert_eq!(p.regime, Regime::SubsetSearch);
        assert_eq!(p.subset.unwrap().d_star, 8);
        assert_eq!(p.n1, u64::MAX);
        assert!((p.success_prob_lower - 0.5).abs() < 1e-9);
        let q = plan(&PlanInput {
            p: 0.05,
            ..input(2, 3.0, 20, 0.5)
        })
        .unwrap();
        assert!(q.n1 < u64::MAX);
        assert!(q.success_prob_lower >= 0.95 - 1e-12);
    }

    #[test]
    fn subset_points_stay_central() {
        let s = SubsetSearchParams::new(2, 5.0, 0.3).unwrap();
        for i in 0..500 {
            let (subset, x) = subset_point(&s, 12, 4, i);
            assert_eq!(subset.len(), s.d_star);
            for (j, &xj) in x.iter().enumerate() {
                if !subset.contains(&j) {
                    assert!((xj - 0.5).abs() <= s.delta_star);
                }
            }
        }
    }

    #[test]
    fn strategies_count_queries() {
        let one = RankOneTensor::replicate(UnivariateFactor::constant(1.0, 1).unwrap(), 3, 1.0).unwrap();
        let zero = RankOneTensor::zero(3, 1, 1.0).unwrap();
        let mut o = QueryOracle::new(&one);
        let s = search_uniform_single(&mut o, 1).unwrap();
        assert!(s.found());
        assert_eq!((s.queries_used, o.count()), (1, 1));
        let mut o = QueryOracle::new(&zero);
        assert!(!search_uniform_single(&mut o, 1).unwrap().found());
        let s = search_uniform_multi(&mut o, 7, 1).unwrap();
        assert!(!s.found());
        assert_eq!((s.queries_used, o.count()), (7, 8));
        let ps = crate::dispersion::halton(9, 3).unwrap();
        let s = search_deterministic(&mut o, &ps).unwrap();
        assert_eq!(s.queries_used, 9);
        let params = SubsetSearchParams::new(1, 1.0, 0.5).unwrap();
        let mut o = QueryOracle::new(&one);
        let s = search_subset(&mut o, &params, 10, 2).unwrap();
        assert_eq!((s.iterations, s.queries_used), (1, 1));
        let small = RankOneTensor::replicate(UnivariateFactor::constant(1.0, 1).unwrap(), 2, 1.0).unwrap();
        let mut o = QueryOracle::new(&small);
        assert!(search_subset(&mut o, &params, 10, 2).is_err());
        assert!(search_subset(&mut o, &params.clamped_to(2), 10, 2).unwrap().found());
    }

    #[test]
    fn identical_seeds_identical_traces() {
        let f = UnivariateFactor::ramp(1, crate::univariate::Orientation::Left, 0.3).unwrap();
        let t = RankOneTensor::replicate(f, 4, 4.0).unwrap();
        let run = |seed| {
            let mut o = QueryOracle::new(&t);
            search_uniform_multi(&mut o, 200, seed).unwrap()
        };
        assert_eq!(run(5), run(5));
        assert_ne!(run(5).trace, run(6).trace);
    }
}
