use serde::{Deserialize, Serialize};

use super::poly;
use crate::{Error, Result};

/// Which end of the unit interval a bump is attached to.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Orientation {
    Left,
    Right,
}

/// Analytic shape of a univariate factor.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum FactorKind {
    /// Piecewise polynomial; piece `k` is a monomial series in `t - breakpoints[k]`.
    Polynomial {
        breakpoints: Vec<f64>,
        coefficients: Vec<Vec<f64>>,
    },
    /// `(1 - t/width)^r` on `[0, width)` and zero beyond (left), or its mirror image.
    Bump { orientation: Orientation, width: f64 },
    /// `amplitude * cos(omega * t + phase)`.
    Trig {
        amplitude: f64,
        omega: f64,
        phase: f64,
    },
    /// Piecewise-linear interpolation of a value table.
    Table { nodes: Vec<f64>, values: Vec<f64> },
}

/// Zero set of a factor restricted to an interval.
#[derive(Debug, Clone, PartialEq)]
pub enum ZeroSet {
    /// Finitely many zeros, sorted.
    Finite(Vec<f64>),
    /// The factor vanishes on a subinterval of positive length.
    Continuum,
}

impl ZeroSet {
    /// Whether the set holds at least `k` distinct points.
    pub fn has_at_least(&self, k: usize) -> bool {
        match self {
            ZeroSet::Finite(z) => z.len() >= k,
            ZeroSet::Continuum => true,
        }
    }

    pub fn is_empty(&self) -> bool {
        matches!(self, ZeroSet::Finite(z) if z.is_empty())
    }
}

/// A univariate function on `[0, 1]` with its smoothness order `r` and bounds on
/// `‖f‖_∞` and `‖f^(r)‖_∞`.
///
/// For every kind except `Table` both bounds are computed exactly from the
/// analytic form at construction time. Tables carry caller-declared bounds.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct UnivariateFactor {
    kind: FactorKind,
    r: u32,
    scale: f64,
    sup_bound: f64,
    deriv_bound: f64,
}

/// `r!` as a float.
pub fn factorial(r: u32) -> f64 {
    (1..=r).map(f64::from).product()
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::param("smoothness order r must be positive"));
    }
    Ok(())
}

fn check_partition(points: &[f64], what: &str) -> Result<()> {
    if points.len() < 2 || points[0] != 0.0 || *points.last().unwrap() != 1.0 {
        return Err(Error::param(format!("{what} must start at 0 and end at 1")));
    }
    if points.windows(2).any(|w| !(w[0] < w[1])) {
        return Err(Error::param(format!("{what} must be strictly increasing")));
    }
    Ok(())
}

/// Locate the piece of a partition containing `t`.
pub(crate) fn piece_index(breakpoints: &[f64], t: f64) -> usize {
    let pieces = breakpoints.len() - 1;
    breakpoints[1..pieces].partition_point(|&b| b <= t)
}

fn cos_sup(amplitude: f64, omega: f64, phase: f64, lo: f64, hi: f64) -> f64 {
    let (a, b) = (omega * lo + phase, omega * hi + phase);
    let pi = std::f64::consts::PI;
    if (a / pi).ceil() <= b / pi {
        amplitude.abs()
    } else {
        (amplitude * a.cos()).abs().max((amplitude * b.cos()).abs())
    }
}

impl FactorKind {
    fn validate(&self) -> Result<()> {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => {
                check_partition(breakpoints, "polynomial breakpoints")?;
                if coefficients.len() != breakpoints.len() - 1 {
                    return Err(Error::param(format!(
                        "{} coefficient lists for {} pieces",
                        coefficients.len(),
                        breakpoints.len() - 1
                    )));
                }
                if coefficients.iter().any(|c| c.is_empty()) {
                    return Err(Error::param("empty coefficient list"));
                }
            }
            FactorKind::Bump { width, .. } => {
                if !(*width > 0.0 && *width <= 1.0) {
                    return Err(Error::param(format!("bump width {width} outside (0, 1]")));
                }
            }
            FactorKind::Trig { omega, .. } => {
                if !(*omega >= 0.0 && omega.is_finite()) {
                    return Err(Error::param("trig frequency must be finite and non-negative"));
                }
            }
            FactorKind::Table { nodes, values } => {
                check_partition(nodes, "table nodes")?;
                if nodes.len() != values.len() {
                    return Err(Error::param("table nodes and values differ in length"));
                }
            }
        }
        Ok(())
    }

    fn eval(&self, r: u32, t: f64) -> f64 {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => {
                let k = piece_index(breakpoints, t);
                poly::eval(&coefficients[k], t - breakpoints[k])
            }
            FactorKind::Bump { orientation, width } => {
                let dist = match orientation {
                    Orientation::Left => t,
                    Orientation::Right => 1.0 - t,
                };
                if dist < *width {
                    (1.0 - dist / width).powi(r as i32)
                } else {
                    0.0
                }
            }
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => amplitude * (omega * t + phase).cos(),
            FactorKind::Table { nodes, values } => {
                let k = piece_index(nodes, t);
                let w = (t - nodes[k]) / (nodes[k + 1] - nodes[k]);
                values[k] + w * (values[k + 1] - values[k])
            }
        }
    }

    /// `r`-th derivative where it is classically defined (inside pieces).
    fn derivative(&self, r: u32, t: f64) -> Option<f64> {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => {
                let k = piece_index(breakpoints, t);
                let dc = poly::derivative(&coefficients[k], r as usize);
                Some(poly::eval(&dc, t - breakpoints[k]))
            }
            FactorKind::Bump { orientation, width } => {
                let dist = match orientation {
                    Orientation::Left => t,
                    Orientation::Right => 1.0 - t,
                };
                if dist < *width {
                    let sign = match orientation {
                        Orientation::Left if r % 2 == 1 => -1.0,
                        _ => 1.0,
                    };
                    Some(sign * factorial(r) / width.powi(r as i32))
                } else {
                    Some(0.0)
                }
            }
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => {
                let shift = f64::from(r) * std::f64::consts::FRAC_PI_2;
                Some(amplitude * omega.powi(r as i32) * (omega * t + phase + shift).cos())
            }
            FactorKind::Table { .. } => None,
        }
    }

    fn sup(&self) -> f64 {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => coefficients
                .iter()
                .zip(breakpoints.windows(2))
                .map(|(c, w)| poly::sup_abs(c, 0.0, w[1] - w[0]))
                .fold(0.0, f64::max),
            FactorKind::Bump { .. } => 1.0,
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => cos_sup(*amplitude, *omega, *phase, 0.0, 1.0),
            FactorKind::Table { values, .. } => values.iter().fold(0.0, |m, v| m.max(v.abs())),
        }
    }

    fn derivative_sup(&self, r: u32) -> Option<f64> {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => Some(
                coefficients
                    .iter()
                    .zip(breakpoints.windows(2))
                    .map(|(c, w)| poly::sup_abs(&poly::derivative(c, r as usize), 0.0, w[1] - w[0]))
                    .fold(0.0, f64::max),
            ),
            FactorKind::Bump { width, .. } => Some(factorial(r) / width.powi(r as i32)),
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => {
                let shift = f64::from(r) * std::f64::consts::FRAC_PI_2;
                Some(cos_sup(
                    amplitude * omega.powi(r as i32),
                    *omega,
                    phase + shift,
                    0.0,
                    1.0,
                ))
            }
            FactorKind::Table { .. } => None,
        }
    }

    fn zeros_in(&self, lo: f64, hi: f64) -> ZeroSet {
        let mut zeros = Vec::new();
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => {
                for (c, w) in coefficients.iter().zip(breakpoints.windows(2)) {
                    let (a, b) = (w[0].max(lo), w[1].min(hi));
                    if a > b {
                        continue;
                    }
                    match poly::zeros_in(c, a - w[0], b - w[0]) {
                        None if b > a => return ZeroSet::Continuum,
                        None => zeros.push(a),
                        Some(z) => zeros.extend(z.into_iter().map(|s| s + w[0])),
                    }
                }
            }
            FactorKind::Bump { orientation, width } => {
                let (za, zb) = match orientation {
                    Orientation::Left => (*width, 1.0),
                    Orientation::Right => (0.0, 1.0 - width),
                };
                let (a, b) = (za.max(lo), zb.min(hi));
                if b > a {
                    return ZeroSet::Continuum;
                } else if a == b {
                    zeros.push(a);
                }
            }
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => {
                if *amplitude == 0.0 {
                    return if hi > lo {
                        ZeroSet::Continuum
                    } else {
                        ZeroSet::Finite(vec![lo])
                    };
                }
                let pi = std::f64::consts::PI;
                if *omega == 0.0 {
                    if phase.cos().abs() < 1e-15 {
                        return ZeroSet::Continuum;
                    }
                } else {
                    let (a, b) = (omega * lo + phase, omega * hi + phase);
                    let mut k = ((a - pi / 2.0) / pi).ceil();
                    while pi / 2.0 + k * pi <= b {
                        zeros.push((pi / 2.0 + k * pi - phase) / omega);
                        k += 1.0;
                    }
                }
            }
            FactorKind::Table { nodes, values } => {
                for (w, v) in nodes.windows(2).zip(values.windows(2)) {
                    let (a, b) = (w[0].max(lo), w[1].min(hi));
                    if a > b {
                        continue;
                    }
                    if v[0] == 0.0 && v[1] == 0.0 {
                        if b > a {
                            return ZeroSet::Continuum;
                        }
                        zeros.push(a);
                    } else if (v[0] <= 0.0) != (v[1] <= 0.0) || v[0] == 0.0 || v[1] == 0.0 {
                        let t = w[0] + (w[1] - w[0]) * v[0] / (v[0] - v[1]);
                        if t >= a && t <= b {
                            zeros.push(t);
                        }
                    }
                }
            }
        }
        zeros.sort_by(f64::total_cmp);
        zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        ZeroSet::Finite(zeros)
    }

    fn zero_measure(&self) -> f64 {
        match self {
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            } => coefficients
                .iter()
                .zip(breakpoints.windows(2))
                .filter(|(c, _)| poly::is_zero(c))
                .map(|(_, w)| w[1] - w[0])
                .sum(),
            FactorKind::Bump { width, .. } => 1.0 - width,
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            } => {
                if *amplitude == 0.0 || (*omega == 0.0 && phase.cos().abs() < 1e-15) {
                    1.0
                } else {
                    0.0
                }
            }
            FactorKind::Table { nodes, values } => nodes
                .windows(2)
                .zip(values.windows(2))
                .filter(|(_, v)| v[0] == 0.0 && v[1] == 0.0)
                .map(|(w, _)| w[1] - w[0])
                .sum(),
        }
    }
}

impl UnivariateFactor {
    /// Factor of an analytic kind; bounds are computed exactly. Tables need
    /// [`UnivariateFactor::table`] since their derivative bound must be declared.
    pub fn new(kind: FactorKind, r: u32) -> Result<Self> {
        check_r(r)?;
        kind.validate()?;
        let deriv_bound = kind.derivative_sup(r).ok_or_else(|| {
            Error::param("table factors need a declared derivative bound")
        })?;
        Ok(Self {
            sup_bound: kind.sup(),
            deriv_bound,
            kind,
            r,
            scale: 1.0,
        })
    }

    pub fn constant(value: f64, r: u32) -> Result<Self> {
        Self::polynomial(vec![value], r)
    }

    /// Global polynomial in monomial form.
    pub fn polynomial(coefficients: Vec<f64>, r: u32) -> Result<Self> {
        Self::piecewise(vec![0.0, 1.0], vec![coefficients], r)
    }

    /// Piecewise polynomial; piece `k` is a series in `t - breakpoints[k]`.
    pub fn piecewise(breakpoints: Vec<f64>, coefficients: Vec<Vec<f64>>, r: u32) -> Result<Self> {
        Self::new(
            FactorKind::Polynomial {
                breakpoints,
                coefficients,
            },
            r,
        )
    }

    /// `scale * prod_j (t - roots[j])`.
    pub fn from_roots(scale: f64, roots: &[f64], r: u32) -> Result<Self> {
        Self::polynomial(poly::from_roots(scale, roots), r)
    }

    pub fn trig(amplitude: f64, omega: f64, phase: f64, r: u32) -> Result<Self> {
        Self::new(
            FactorKind::Trig {
                amplitude,
                omega,
                phase,
            },
            r,
        )
    }

    /// Bump of support length `width` attached to one end of `[0, 1]`; equals 1
    /// at that end and has `‖f^(r)‖_∞ = r! / width^r`.
    pub fn ramp(r: u32, orientation: Orientation, width: f64) -> Result<Self> {
        Self::new(FactorKind::Bump { orientation, width }, r)
    }

    /// The bump supported on one half of the reference interval `[a, b]`.
    ///
    /// For `[0, 1]` and `Left` this is `2^r max{0, 1/2 - t}^r`. The supported half
    /// must touch the end of the unit interval where the bump peaks (`a = 0` for
    /// `Left`, `b = 1` for `Right`); otherwise no extension to `[0, 1]` keeps both
    /// `‖f‖_∞ = 1` and the exact derivative bound.
    pub fn make_bump(r: u32, orientation: Orientation, a: f64, b: f64) -> Result<Self> {
        if !(a < b) || a < 0.0 || b > 1.0 {
            return Err(Error::param(format!("degenerate bump interval [{a}, {b}]")));
        }
        let anchored = match orientation {
            Orientation::Left => a == 0.0,
            Orientation::Right => b == 1.0,
        };
        if !anchored {
            return Err(Error::param(format!(
                "bump interval [{a}, {b}] does not reach the {orientation:?} end of [0, 1]"
            )));
        }
        Self::ramp(r, orientation, 0.5 * (b - a))
    }

    /// Piecewise-linear table with caller-declared `‖f^(r)‖_∞`.
    pub fn table(nodes: Vec<f64>, values: Vec<f64>, r: u32, deriv_bound: f64) -> Result<Self> {
        check_r(r)?;
        if !(deriv_bound >= 0.0) {
            return Err(Error::param("declared derivative bound must be non-negative"));
        }
        let kind = FactorKind::Table { nodes, values };
        kind.validate()?;
        Ok(Self {
            sup_bound: kind.sup(),
            deriv_bound,
            kind,
            r,
            scale: 1.0,
        })
    }

    /// `c * f`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            scale: self.scale * c,
            sup_bound: self.sup_bound * c.abs(),
            deriv_bound: self.deriv_bound * c.abs(),
            ..self.clone()
        }
    }

    pub fn negated(&self) -> Self {
        self.scaled(-1.0)
    }

    #[inline]
    pub fn eval(&self, t: f64) -> f64 {
        self.scale * self.kind.eval(self.r, t)
    }

    /// `f^(r)(t)` inside smooth pieces; `None` for tables.
    pub fn derivative(&self, t: f64) -> Option<f64> {
        self.kind.derivative(self.r, t).map(|v| self.scale * v)
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn kind(&self) -> &FactorKind {
        &self.kind
    }

    pub fn kind_tag(&self) -> &'static str {
        match self.kind {
            FactorKind::Polynomial { .. } => "polynomial-piecewise",
            FactorKind::Bump { .. } => "bump",
            FactorKind::Trig { .. } => "trig",
            FactorKind::Table { .. } => "explicit-table",
        }
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    /// Bound on `‖f‖_∞`.
    pub fn sup_bound(&self) -> f64 {
        self.sup_bound
    }

    /// Bound on `‖f^(r)‖_∞`.
    pub fn deriv_bound(&self) -> f64 {
        self.deriv_bound
    }

    pub fn zeros_in(&self, lo: f64, hi: f64) -> ZeroSet {
        if self.scale == 0.0 {
            return if hi > lo {
                ZeroSet::Continuum
            } else {
                ZeroSet::Finite(vec![lo])
            };
        }
        self.kind.zeros_in(lo, hi)
    }

    /// Lebesgue measure of `{t in [0,1] : f(t) != 0}`.
    pub fn nonzero_measure(&self) -> f64 {
        if self.scale == 0.0 {
            0.0
        } else {
            1.0 - self.kind.zero_measure()
        }
    }

    /// Maximum of `|f|` over `resolution + 1` equispaced points.
    pub fn grid_sup(&self, resolution: usize) -> f64 {
        grid(resolution).map(|t| self.eval(t).abs()).fold(0.0, f64::max)
    }

    /// Grid point maximizing `|f|` (first one on ties).
    pub fn grid_argmax(&self, resolution: usize) -> f64 {
        let mut best = (0.0, -1.0);
        for t in grid(resolution) {
            let v = self.eval(t).abs();
            if v > best.1 {
                best = (t, v);
            }
        }
        best.0
    }
}

/// `resolution + 1` equispaced points covering `[0, 1]`, endpoints included.
pub fn grid(resolution: usize) -> impl Iterator<Item = f64> + Clone {
    let n = resolution.max(1);
    (0..=n).map(move |i| i as f64 / n as f64)
}
