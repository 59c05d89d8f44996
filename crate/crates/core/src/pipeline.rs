//! The two-phase scheme: search for a nonzero, then reconstruct from the lines
//! through it, or output zero when the search fails.

use serde::Serialize;

use crate::dispersion::PointSet;
use crate::recovery::{recover, RankOneApproximant, RecoveryConfig};
use crate::search::{
    search_deterministic, search_subset, search_uniform_multi, SearchOutcome, SubsetSearchParams,
};
use crate::tensor::{QueryOracle, RankOneTensor};
use crate::Result;

/// Output of an approximation algorithm.
#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Approximation {
    Zero,
    RankOne(RankOneApproximant),
    /// An exact copy of a tensor (white-box baselines only).
    Tensor(RankOneTensor),
}

impl Approximation {
    pub fn eval(&self, x: &[f64]) -> f64 {
        match self {
            Approximation::Zero => 0.0,
            Approximation::RankOne(a) => a.eval(x),
            Approximation::Tensor(t) => t.eval(x),
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self, Approximation::Zero)
    }
}

/// Phase-one strategy.
#[derive(Debug, Clone, PartialEq)]
pub enum Strategy {
    /// `n1` uniform draws (`n1 = 1` is the single-draw search).
    Uniform,
    Subset(SubsetSearchParams),
    Deterministic(PointSet),
}

impl Strategy {
    pub fn search(&self, oracle: &mut QueryOracle<'_>, n1: u64, seed: u64) -> Result<SearchOutcome> {
        match self {
            Strategy::Uniform => search_uniform_multi(oracle, n1, seed),
            Strategy::Subset(p) => search_subset(oracle, p, n1, seed),
            Strategy::Deterministic(ps) => {
                if (ps.len() as u64) <= n1 {
                    search_deterministic(oracle, ps)
                } else {
                    let head = PointSet::new(ps.dim(), ps.points()[..n1 as usize].to_vec())?;
                    search_deterministic(oracle, &head)
                }
            }
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TwoPhaseOutcome {
    pub search: SearchOutcome,
    pub approximation: Approximation,
    pub queries_phase1: u64,
    pub queries_phase2: u64,
}

/// Runs phase one with budget `n1` and, on success, phase two from the tried
/// point with the largest `|f|`.
pub fn two_phase(
    oracle: &mut QueryOracle<'_>,
    strategy: &Strategy,
    n1: u64,
    recovery: &RecoveryConfig,
    seed: u64,
) -> Result<TwoPhaseOutcome> {
    let search = strategy.search(oracle, n1, seed)?;
    let before = oracle.count();
    let approximation = match search.best_nonzero() {
        Some(best) => {
            let z = best.point.clone();
            Approximation::RankOne(recover(oracle, &z, recovery)?)
        }
        None => Approximation::Zero,
    };
    Ok(TwoPhaseOutcome {
        queries_phase1: search.queries_used,
        queries_phase2: oracle.count() - before,
        search,
        approximation,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dispersion::halton;
    use crate::univariate::UnivariateFactor;

    #[test]
    fn zero_output_on_failure() {
        let zero = RankOneTensor::zero(3, 2, 1.0).unwrap();
        let mut o = QueryOracle::new(&zero);
        let out = two_phase(&mut o, &Strategy::Uniform, 5, &RecoveryConfig::new(2, 20), 0).unwrap();
        assert!(out.approximation.is_zero());
        assert_eq!((out.queries_phase1, out.queries_phase2), (5, 0));
    }

    #[test]
    fn success_recovers() {
        let f = UnivariateFactor::trig(0.9, 1.0, 0.2, 2).unwrap();
        let t = RankOneTensor::replicate(f, 3, 1.0).unwrap();
        let mut o = QueryOracle::new(&t).with_budget(60);
        let ps = Strategy::Deterministic(halton(10, 3).unwrap());
        let out = two_phase(&mut o, &ps, 10, &RecoveryConfig::new(2, 59), 0).unwrap();
        assert_eq!(out.queries_phase1, 1);
        assert!(out.queries_phase2 <= 59);
        let x = [0.3, 0.4, 0.5];
        assert!((out.approximation.eval(&x) - t.eval(&x)).abs() < 1e-2);
    }

    #[test]
    fn deterministic_scan_is_truncated_to_budget() {
        let zero = RankOneTensor::zero(2, 1, 1.0).unwrap();
        let mut o = QueryOracle::new(&zero);
        let s = Strategy::Deterministic(halton(30, 2).unwrap());
        assert_eq!(s.search(&mut o, 7, 0).unwrap().queries_used, 7);
    }
}
