//! Fooling families and harnesses for the lower bounds in the class `F^r_{M,d}`
//! with `M >= 2^r r!`.
//!
//! Member `k` of the family is the product of canonical bumps whose orientation
//! on axis `i` is given by bit `i` of `k` (0 = left, 1 = right). It equals 1 at
//! the corner of its orthant and vanishes outside the orthant, so an algorithm
//! that never queries inside an orthant cannot tell `+h_k`, `-h_k` and `0` apart.

use serde::{Deserialize, Serialize};

use crate::pipeline::Approximation;
use crate::rng::{self, Purpose};
use crate::tensor::{QueryOracle, RankOneTensor};
use crate::univariate::{factorial, Orientation, UnivariateFactor};
use crate::{Error, Result};

/// Largest dimension for which orthants are enumerated explicitly.
pub const MAX_ORTHANT_DIM: usize = 26;

#[derive(Debug, Clone, PartialEq)]
pub struct FoolingFamily {
    d: usize,
    r: u32,
    left: UnivariateFactor,
    right: UnivariateFactor,
}

impl FoolingFamily {
    pub fn new(d: usize, r: u32) -> Result<Self> {
        if d == 0 || d > 63 {
            return Err(Error::param(format!("fooling family needs 1 <= d <= 63, got {d}")));
        }
        Ok(Self {
            d,
            r,
            left: UnivariateFactor::make_bump(r, Orientation::Left, 0.0, 1.0)?,
            right: UnivariateFactor::make_bump(r, Orientation::Right, 0.0, 1.0)?,
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    /// Number of members per sign, `2^d`.
    pub fn size(&self) -> u64 {
        1u64 << self.d
    }

    /// The class bound met with equality by every member, `2^r r!`.
    pub fn class_bound(&self) -> f64 {
        2f64.powi(self.r as i32) * factorial(self.r)
    }

    /// `sign * h_k`.
    pub fn member(&self, k: u64, sign: f64) -> Result<RankOneTensor> {
        if k >= self.size() {
            return Err(Error::param(format!("member index {k} >= 2^d")));
        }
        let mut factors: Vec<_> = (0..self.d)
            .map(|i| {
                if k >> i & 1 == 0 {
                    self.left.clone()
                } else {
                    self.right.clone()
                }
            })
            .collect();
        if sign < 0.0 {
            factors[0] = factors[0].negated();
        }
        RankOneTensor::new(factors, self.class_bound())
    }

    /// Corner of orthant `k`, where `h_k = 1`.
    pub fn corner(&self, k: u64) -> Vec<f64> {
        (0..self.d).map(|i| (k >> i & 1) as f64).collect()
    }

    /// Uniform point of the closed orthant `k`.
    pub fn point_in(&self, k: u64, seed: u64, index: u64) -> Vec<f64> {
        rng::uniform_point(seed, Purpose::Measurement, index, self.d)
            .into_iter()
            .enumerate()
            .map(|(i, u)| 0.5 * u + 0.5 * (k >> i & 1) as f64)
            .collect()
    }
}

/// Marks every orthant whose closure contains one of `points`. A coordinate
/// equal to 1/2 touches both sides.
pub fn touched_orthants(d: usize, points: &[Vec<f64>]) -> Result<Vec<bool>> {
    if d > MAX_ORTHANT_DIM {
        return Err(Error::TooLarge {
            cost: 2f64.powi(d as i32),
            limit: 2f64.powi(MAX_ORTHANT_DIM as i32),
        });
    }
    let mut touched = vec![false; 1 << d];
    for x in points {
        let mut fixed = 0usize;
        let mut free = Vec::new();
        for (i, &t) in x.iter().enumerate() {
            if t > 0.5 {
                fixed |= 1 << i;
            } else if t == 0.5 {
                free.push(i);
            }
        }
        for mask in 0..1usize << free.len() {
            let mut k = fixed;
            for (b, &i) in free.iter().enumerate() {
                if mask >> b & 1 == 1 {
                    k |= 1 << i;
                }
            }
            touched[k] = true;
        }
    }
    Ok(touched)
}

/// Result of [`fool_deterministic`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DeterministicFooling {
    /// `max(|h(c) - A(+h)(c)|, |-h(c) - A(-h)(c)|)` at the orthant corner `c`.
    pub error_lower: f64,
    pub orthant: u64,
    /// The sign of the member attaining `error_lower`.
    pub sign: f64,
    pub queries: u64,
}

/// Certifies error `>= 1` for a deterministic algorithm using at most `n < 2^d`
/// queries.
///
/// The algorithm is run on the zero function; its queries miss some orthant
/// `k`. On `+h_k` and `-h_k` it sees the same zeros, hence produces the same
/// output, which is at distance at least 1 from one of them.
pub fn fool_deterministic<A>(algorithm: A, n: u64, d: usize, r: u32) -> Result<DeterministicFooling>
where
    A: Fn(&mut QueryOracle<'_>) -> Result<Approximation>,
{
    let family = FoolingFamily::new(d, r)?;
    if n >= family.size() {
        return Err(Error::Precondition(format!(
            "n = {n} queries can touch all 2^{d} orthants"
        )));
    }
    let zero = RankOneTensor::zero(d, r, family.class_bound())?;
    let mut o = QueryOracle::new(&zero).with_budget(n).with_log();
    algorithm(&mut o)?;
    let log: Vec<Vec<f64>> = o.log().unwrap().iter().map(|q| q.point.clone()).collect();
    let touched = touched_orthants(d, &log)?;
    let k = touched
        .iter()
        .position(|&t| !t)
        .expect("fewer than 2^d queries leave an orthant untouched") as u64;

    let corner = family.corner(k);
    let mut best = DeterministicFooling {
        error_lower: 0.0,
        orthant: k,
        sign: 1.0,
        queries: o.count(),
    };
    for sign in [1.0, -1.0] {
        let h = family.member(k, sign)?;
        let mut oh = QueryOracle::new(&h).with_budget(n).with_log();
        let out = algorithm(&mut oh)?;
        let replay: Vec<Vec<f64>> = oh.log().unwrap().iter().map(|q| q.point.clone()).collect();
        if replay != log {
            return Err(Error::Precondition(
                "algorithm queried differently on identical answers; it is not deterministic".into(),
            ));
        }
        let err = (h.eval(&corner) - out.eval(&corner)).abs();
        if err > best.error_lower {
            best.error_lower = err;
            best.sign = sign;
        }
    }
    Ok(best)
}

/// Per-trial record of [`fool_randomized`].
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedTrial {
    pub trial: u64,
    pub seed: u64,
    pub orthant: u64,
    pub sign: f64,
    pub queries: u64,
    /// Largest `|h - A|` over the corner and the probe points of the orthant.
    pub error: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RandomizedReport {
    pub trials: Vec<RandomizedTrial>,
    pub rms: f64,
    /// Delta-method standard error of `rms`.
    pub rms_se: f64,
    /// `sqrt(2) / 2`.
    pub floor: f64,
}

/// Average-case harness: every trial draws a uniformly random signed member,
/// runs the seeded algorithm with budget `n <= 2^(d-1)` and measures its error
/// on the member's orthant.
pub fn fool_randomized<A>(
    algorithm: A,
    d: usize,
    r: u32,
    n: u64,
    trials: u64,
    probes: u64,
    seed: u64,
) -> Result<RandomizedReport>
where
    A: Fn(&mut QueryOracle<'_>, u64) -> Result<Approximation>,
{
    let family = FoolingFamily::new(d, r)?;
    if n > family.size() / 2 {
        return Err(Error::Precondition(format!(
            "budget n = {n} exceeds 2^(d-1) = {}",
            family.size() / 2
        )));
    }
    let mut records = Vec::with_capacity(trials as usize);
    for t in 0..trials {
        let s = rng::trial_seed(seed, t);
        let mut g = rng::stream(s, Purpose::Adversary, 0);
        let k = rand::Rng::gen_range(&mut g, 0..family.size());
        let sign = if rand::Rng::gen::<bool>(&mut g) { 1.0 } else { -1.0 };
        let h = family.member(k, sign)?;
        let mut o = QueryOracle::new(&h).with_budget(n);
        let out = algorithm(&mut o, s)?;
        let corner = family.corner(k);
        let mut err = (h.eval(&corner) - out.eval(&corner)).abs();
        for j in 0..probes {
            let x = family.point_in(k, s, j);
            err = err.max((h.eval(&x) - out.eval(&x)).abs());
        }
        records.push(RandomizedTrial {
            trial: t,
            seed: s,
            orthant: k,
            sign,
            queries: o.count(),
            error: err,
        });
    }
    let (rms, rms_se) = rms_with_se(records.iter().map(|t| t.error));
    Ok(RandomizedReport {
        trials: records,
        rms,
        rms_se,
        floor: std::f64::consts::FRAC_1_SQRT_2,
    })
}

/// Root mean square and its delta-method standard error.
pub fn rms_with_se<I: IntoIterator<Item = f64>>(errors: I) -> (f64, f64) {
    let sq: Vec<f64> = errors.into_iter().map(|e| e * e).collect();
    let n = sq.len() as f64;
    if sq.is_empty() {
        return (0.0, 0.0);
    }
    let mean = sq.iter().sum::<f64>() / n;
    let rms = mean.sqrt();
    if sq.len() < 2 || rms == 0.0 {
        return (rms, 0.0);
    }
    let var = sq.iter().map(|s| (s - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (rms, (var / n).sqrt() / (2.0 * rms))
}

/// `max(0, 1 - (e n1/d)^(2d) 2^(-V n1/2))`: lower bound on the probability that
/// one random sequence of `n1` points serves every member of the support class
/// at once.
pub fn uniform_guarantee_bound(n1: u64, d: usize, v: f64) -> f64 {
    crate::dispersion::disp_probability_bound(n1, d, v)
}
