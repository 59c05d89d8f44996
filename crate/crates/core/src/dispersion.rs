//! Point sets, exact dispersion and the point counts that make dispersion small.
//!
//! The dispersion of `x_1, ..., x_n` is the largest volume of an axis-parallel
//! box in `[0,1]^d` containing none of the points. Over closed boxes it is a
//! supremum that is usually not attained; the same value is attained by an open
//! box whose faces lie on point coordinates or on the faces of the cube, which
//! is what [`exact_dispersion`] returns.

use serde::{Deserialize, Serialize};

use crate::rng::{self, Purpose};
use crate::tensor::AxisBox;
use crate::{Error, Result};

/// The first 32 primes, the Halton bases.
pub const PRIMES: [u64; 32] = [
    2, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37, 41, 43, 47, 53, 59, 61, 67, 71, 73, 79, 83, 89,
    97, 101, 103, 107, 109, 113, 127, 131,
];

/// Work limit of [`exact_dispersion`], in elementary steps of the sweep.
pub const EXACT_COST_LIMIT: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Provenance {
    Halton,
    Uniform { seed: u64 },
    Explicit,
}

/// Points of `[0,1]^d` together with where they came from.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PointSet {
    d: usize,
    points: Vec<Vec<f64>>,
    provenance: Provenance,
}

impl PointSet {
    pub fn new(d: usize, points: Vec<Vec<f64>>) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("point dimension must be positive"));
        }
        for p in &points {
            if p.len() != d {
                return Err(Error::DimensionMismatch {
                    expected: d,
                    got: p.len(),
                });
            }
            if let Some(index) = p.iter().position(|t| !(0.0..=1.0).contains(t)) {
                return Err(Error::Domain {
                    index,
                    value: p[index],
                });
            }
        }
        Ok(Self {
            d,
            points,
            provenance: Provenance::Explicit,
        })
    }

    /// `n` i.i.d. uniform points; point `i` depends only on `(seed, i)`.
    pub fn uniform(n: usize, d: usize, seed: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::param("point dimension must be positive"));
        }
        let points = (0..n as u64)
            .map(|i| rng::uniform_point(seed, Purpose::PointSet, i, d))
            .collect();
        Ok(Self {
            d,
            points,
            provenance: Provenance::Uniform { seed },
        })
    }

    pub fn dim(&self) -> usize {
        self.d
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Vec<f64>] {
        &self.points
    }

    pub fn provenance(&self) -> Provenance {
        self.provenance
    }

    /// The set with point `i` removed.
    pub fn without(&self, i: usize) -> Self {
        let mut out = self.clone();
        out.points.remove(i);
        out.provenance = Provenance::Explicit;
        out
    }

    /// The set with `p` appended.
    pub fn with_point(&self, p: Vec<f64>) -> Result<Self> {
        let mut points = self.points.clone();
        points.push(p);
        Self::new(self.d, points)
    }
}

/// Radical inverse of `i` in base `b`, exact up to one final rounding.
pub fn radical_inverse(mut i: u64, b: u64) -> f64 {
    let (mut num, mut den) = (0u128, 1u128);
    while i > 0 {
        num = num * b as u128 + (i % b) as u128;
        den *= b as u128;
        i /= b;
    }
    num as f64 / den as f64
}

/// First `n` Halton points (indices `1..=n`) in bases the first `d` primes.
pub fn halton(n: usize, d: usize) -> Result<PointSet> {
    if d == 0 || d > PRIMES.len() {
        return Err(Error::param(format!(
            "Halton dimension {d} outside 1..={}",
            PRIMES.len()
        )));
    }
    let points = (1..=n as u64)
        .map(|i| PRIMES[..d].iter().map(|&b| radical_inverse(i, b)).collect())
        .collect();
    Ok(PointSet {
        d,
        points,
        provenance: Provenance::Halton,
    })
}

/// Largest empty open box and its volume.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DispersionResult {
    pub value: f64,
    pub witness: AxisBox,
}

/// Step count of the sweep used by [`exact_dispersion`].
pub fn exact_cost(n: usize, d: usize) -> f64 {
    let n = n as f64;
    (n + 1.0).powi(2 * (d as i32 - 1)) * (n + 2.0)
}

/// Exact dispersion with a witness box.
///
/// Sweeps the last axis over all face pairs and solves the lower-dimensional
/// problem for the points strictly between them. Among boxes of equal volume
/// the one with the lexicographically smallest lower corner (then upper corner)
/// is returned.
pub fn exact_dispersion(ps: &PointSet) -> Result<DispersionResult> {
    let cost = exact_cost(ps.len(), ps.dim());
    if cost > EXACT_COST_LIMIT {
        return Err(Error::TooLarge {
            cost,
            limit: EXACT_COST_LIMIT,
        });
    }
    let pts: Vec<&[f64]> = ps.points.iter().map(Vec::as_slice).collect();
    let best = largest_empty(&pts, ps.d);
    Ok(DispersionResult {
        value: best.volume,
        witness: AxisBox::new(best.lower, best.upper)?,
    })
}

#[derive(Debug, Clone)]
struct Candidate {
    volume: f64,
    lower: Vec<f64>,
    upper: Vec<f64>,
}

impl Candidate {
    fn beats(&self, other: &Candidate) -> bool {
        if self.volume != other.volume {
            return self.volume > other.volume;
        }
        match cmp_lex(&self.lower, &other.lower) {
            std::cmp::Ordering::Equal => cmp_lex(&self.upper, &other.upper).is_lt(),
            o => o.is_lt(),
        }
    }
}

fn cmp_lex(a: &[f64], b: &[f64]) -> std::cmp::Ordering {
    for (x, y) in a.iter().zip(b) {
        match x.total_cmp(y) {
            std::cmp::Ordering::Equal => continue,
            o => return o,
        }
    }
    std::cmp::Ordering::Equal
}

/// Largest empty open box in the first `k` coordinates.
fn largest_empty(pts: &[&[f64]], k: usize) -> Candidate {
    match k {
        1 => largest_gap(pts),
        2 => largest_empty_2d(pts),
        _ => largest_empty_sweep(pts, k),
    }
}

fn largest_gap(pts: &[&[f64]]) -> Candidate {
    let mut xs: Vec<f64> = pts.iter().map(|p| p[0]).collect();
    xs.sort_by(f64::total_cmp);
    let (lo, hi) = max_gap(&xs);
    Candidate {
        volume: hi - lo,
        lower: vec![lo],
        upper: vec![hi],
    }
}

/// Widest gap of `{0} ∪ xs ∪ {1}` (xs sorted), leftmost among ties.
fn max_gap(xs: &[f64]) -> (f64, f64) {
    let mut best = (0.0, xs.first().copied().unwrap_or(1.0));
    let mut prev = 0.0;
    for &x in xs.iter().chain(std::iter::once(&1.0)) {
        if x - prev > best.1 - best.0 {
            best = (prev, x);
        }
        prev = x;
    }
    best
}

/// Distinct values of coordinate `axis`, ascending.
fn levels(pts: &[&[f64]], axis: usize) -> Vec<f64> {
    let mut v: Vec<f64> = pts.iter().map(|p| p[axis]).collect();
    v.sort_by(f64::total_cmp);
    v.dedup();
    v
}

fn bottoms(ys: &[f64]) -> Vec<f64> {
    let mut b = vec![0.0];
    b.extend(ys.iter().copied().filter(|&y| y > 0.0));
    b
}

fn largest_empty_2d(pts: &[&[f64]]) -> Candidate {
    let mut by_y: Vec<(f64, f64)> = pts.iter().map(|p| (p[1], p[0])).collect();
    by_y.sort_by(|a, b| a.0.total_cmp(&b.0));
    let ys = levels(pts, 1);

    let mut best = Candidate {
        volume: -1.0,
        lower: vec![0.0, 0.0],
        upper: vec![0.0, 0.0],
    };
    let mut xs: Vec<f64> = Vec::with_capacity(pts.len());
    for lo in bottoms(&ys) {
        if 1.0 - lo < best.volume {
            break;
        }
        xs.clear();
        let mut gap = (0.0, 1.0);
        let mut next = by_y.partition_point(|&(y, _)| y <= lo);
        loop {
            let hi = if next < by_y.len() { by_y[next].0 } else { 1.0 };
            if (1.0 - lo) * (gap.1 - gap.0) < best.volume {
                break;
            }
            let cand = Candidate {
                volume: (gap.1 - gap.0) * (hi - lo),
                lower: vec![gap.0, lo],
                upper: vec![gap.1, hi],
            };
            if cand.beats(&best) {
                best = cand;
            }
            if next >= by_y.len() {
                break;
            }
            while next < by_y.len() && by_y[next].0 == hi {
                let x = by_y[next].1;
                let at = xs.partition_point(|&v| v < x);
                let left = if at == 0 { 0.0 } else { xs[at - 1] };
                let right = xs.get(at).copied().unwrap_or(1.0);
                xs.insert(at, x);
                if left == gap.0 && right == gap.1 && left < x && x < right {
                    gap = max_gap(&xs);
                }
                next += 1;
            }
        }
    }
    best
}

fn largest_empty_sweep(pts: &[&[f64]], k: usize) -> Candidate {
    let axis = k - 1;
    let mut sorted: Vec<&[f64]> = pts.to_vec();
    sorted.sort_by(|a, b| a[axis].total_cmp(&b[axis]));
    let ys = levels(pts, axis);

    let mut best = Candidate {
        volume: -1.0,
        lower: vec![0.0; k],
        upper: vec![0.0; k],
    };
    for lo in bottoms(&ys) {
        if 1.0 - lo < best.volume {
            break;
        }
        let start = sorted.partition_point(|p| p[axis] <= lo);
        let mut end = start;
        loop {
            let hi = if end < sorted.len() { sorted[end][axis] } else { 1.0 };
            let sub = largest_empty(&sorted[start..end], axis);
            if (1.0 - lo) * sub.volume < best.volume {
                break;
            }
            let mut lower = sub.lower;
            let mut upper = sub.upper;
            lower.push(lo);
            upper.push(hi);
            let cand = Candidate {
                volume: sub.volume * (hi - lo),
                lower,
                upper,
            };
            if cand.beats(&best) {
                best = cand;
            }
            if end >= sorted.len() {
                break;
            }
            while end < sorted.len() && sorted[end][axis] == hi {
                end += 1;
            }
        }
    }
    best
}

/// `max(0, 1 - (e n/d)^{2d} 2^{-V n/2})`, a lower bound on the probability
/// that `n` i.i.d. uniform points have dispersion at most `V`.
pub fn disp_probability_bound(n: u64, d: usize, v: f64) -> f64 {
    if n == 0 {
        return 0.0;
    }
    let (n, d) = (n as f64, d as f64);
    let log_term = 2.0 * d * (std::f64::consts::E * n / d).ln() - 0.5 * v * n * std::f64::consts::LN_2;
    if log_term >= 0.0 {
        0.0
    } else {
        -log_term.exp_m1()
    }
}

/// How [`n_disp_upper`] bounds the number of points.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DispMethod {
    /// Random points via the VC-dimension argument: `16 d V^-1 log2(13/V)`.
    Behw,
    /// Halton points: `2^d prod_{i<=d} p_i / V`.
    Halton,
}

/// Number of points sufficient for dispersion at most `V`.
pub fn n_disp_upper(v: f64, d: usize, method: DispMethod) -> Result<u64> {
    if !(v > 0.0 && v < 1.0) {
        return Err(Error::param(format!("V = {v} must lie in (0, 1)")));
    }
    if d == 0 {
        return Err(Error::param("d must be positive"));
    }
    let value = match method {
        DispMethod::Behw => (16.0 * d as f64 / v * (13.0 / v).log2()).ceil(),
        DispMethod::Halton => {
            if d > PRIMES.len() {
                return Err(Error::param(format!(
                    "Halton bound needs d <= {}, got {d}",
                    PRIMES.len()
                )));
            }
            let prod: f64 = PRIMES[..d].iter().map(|&p| 2.0 * p as f64).product();
            (prod / v).ceil()
        }
    };
    if value >= u64::MAX as f64 {
        return Err(Error::TooLarge {
            cost: value,
            limit: u64::MAX as f64,
        });
    }
    Ok(value as u64)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sieve(limit: usize) -> Vec<u64> {
        let mut composite = vec![false; limit + 1];
        let mut out = Vec::new();
        for i in 2..=limit {
            if !composite[i] {
                out.push(i as u64);
                let mut j = i * i;
                while j <= limit {
                    composite[j] = true;
                    j += i;
                }
            }
        }
        out
    }

    #[test]
    fn prime_table_matches_sieve() {
        assert_eq!(&sieve(131)[..], &PRIMES[..]);
    }

    #[test]
    fn halton_examples() {
        assert_eq!(halton(1, 1).unwrap().points(), &[vec![0.5]]);
        assert_eq!(halton(1, 2).unwrap().points(), &[vec![0.5, 1.0 / 3.0]]);
        assert_eq!(
            halton(3, 2).unwrap().points(),
            &[
                vec![0.5, 1.0 / 3.0],
                vec![0.25, 2.0 / 3.0],
                vec![0.75, 1.0 / 9.0]
            ]
        );
        assert!(halton(1, 33).is_err());
        assert_eq!(halton(4, 3).unwrap().provenance(), Provenance::Halton);
    }

    #[test]
    fn dispersion_examples() {
        let empty = PointSet::new(3, vec![]).unwrap();
        let r = exact_dispersion(&empty).unwrap();
        assert_eq!(r.value, 1.0);
        assert_eq!(r.witness, AxisBox::unit(3));

        let one = PointSet::new(2, vec![vec![0.5, 0.5]]).unwrap();
        let r = exact_dispersion(&one).unwrap();
        assert_eq!(r.value, 0.5);
        assert!(!r.witness.contains_open(&[0.5, 0.5]));
        // tie-break: lower corner (0,0) for both halves, smaller upper corner wins
        assert_eq!(r.witness, AxisBox::new(vec![0.0, 0.0], vec![0.5, 1.0]).unwrap());

        let line = PointSet::new(1, vec![vec![0.25], vec![0.75]]).unwrap();
        let r = exact_dispersion(&line).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.witness, AxisBox::new(vec![0.25], vec![0.75]).unwrap());
    }

    #[test]
    fn ties_and_boundary_points() {
        // points on the faces of the cube block nothing
        let ps = PointSet::new(2, vec![vec![0.0, 0.3], vec![1.0, 0.7], vec![0.4, 0.0]]).unwrap();
        assert_eq!(exact_dispersion(&ps).unwrap().value, 1.0);
        // a lattice with repeated coordinates
        let mut pts = Vec::new();
        for i in 1..4 {
            for j in 1..4 {
                pts.push(vec![i as f64 / 4.0, j as f64 / 4.0]);
            }
        }
        let r = exact_dispersion(&PointSet::new(2, pts).unwrap()).unwrap();
        assert_eq!(r.value, 0.25);
        assert_eq!(r.witness, AxisBox::new(vec![0.0, 0.0], vec![0.25, 1.0]).unwrap());
    }

    #[test]
    fn three_dimensional_sweep() {
        let ps = PointSet::new(3, vec![vec![0.5, 0.5, 0.5]]).unwrap();
        let r = exact_dispersion(&ps).unwrap();
        assert_eq!(r.value, 0.5);
        assert_eq!(r.witness, AxisBox::new(vec![0.0, 0.0, 0.0], vec![0.5, 1.0, 1.0]).unwrap());
    }

    #[test]
    fn guard_rejects_huge_instances() {
        let ps = PointSet::uniform(200, 4, 1).unwrap();
        assert!(matches!(exact_dispersion(&ps), Err(Error::TooLarge { .. })));
        assert!(exact_cost(301, 2) <= EXACT_COST_LIMIT);
    }

    #[test]
    fn probability_bound_examples() {
        assert_eq!(disp_probability_bound(10, 2, 0.5), 0.0);
        assert!(disp_probability_bound(301, 2, 0.5) > 0.0);
        assert_eq!(disp_probability_bound(0, 2, 0.5), 0.0);
        // beyond the turning point the bound increases with n
        let mut prev = 0.0;
        for n in (300..3000).step_by(50) {
            let b = disp_probability_bound(n, 2, 0.5);
            assert!(b >= prev);
            prev = b;
        }
    }

    #[test]
    fn point_count_examples() {
        assert_eq!(n_disp_upper(0.5, 2, DispMethod::Behw).unwrap(), 301);
        assert_eq!(n_disp_upper(0.5, 3, DispMethod::Halton).unwrap(), 480);
        assert!(
            n_disp_upper(0.5, 10, DispMethod::Behw).unwrap()
                < n_disp_upper(0.5, 10, DispMethod::Halton).unwrap()
        );
        assert!(n_disp_upper(0.5, 33, DispMethod::Halton).is_err());
        assert!(n_disp_upper(1.0, 2, DispMethod::Behw).is_err());
    }

    #[test]
    fn uniform_sets_are_reproducible() {
        let a = PointSet::uniform(5, 3, 42).unwrap();
        let b = PointSet::uniform(7, 3, 42).unwrap();
        assert_eq!(a.points(), &b.points()[..5]);
        assert_eq!(a.provenance(), Provenance::Uniform { seed: 42 });
    }
}
