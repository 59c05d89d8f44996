//! Univariate factors, piecewise interpolation and the one-dimensional bounds
//! that drive the search strategies.

mod factor;
mod interp;
pub mod poly;

pub use factor::{grid, FactorKind, Orientation, UnivariateFactor, ZeroSet};
pub use interp::{
    block_chebyshev_layout, chebyshev_nodes, interpolate_line, LagrangePiece, PiecewisePolynomial,
};

pub use factor::factorial;

use crate::{Error, Result};

/// `M (b - a)^r / r!`: the sup-norm bound for a function on `[a, b]` with `r`
/// distinct zeros and `‖g^(r)‖_∞ <= M`. It is also the Lagrange remainder bound
/// for degree `r - 1` interpolation at `r` nodes inside `[a, b]`.
pub fn interp_error_bound(m: f64, a: f64, b: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::param("smoothness order r must be positive"));
    }
    if !(a < b) {
        return Err(Error::param(format!("empty interval [{a}, {b}]")));
    }
    if !(m >= 0.0) {
        return Err(Error::param("derivative bound must be non-negative"));
    }
    Ok(m * (b - a).powi(r as i32) / factorial(r))
}

/// `(r! eps / M)^(1/r)`: minimal measure of `{g != 0}` for any `g` with
/// `‖g‖_∞ >= eps` and `‖g^(r)‖_∞ <= M`. A value above 1 means no such `g`
/// exists on the unit interval.
pub fn support_lower_bound(eps: f64, m: f64, r: u32) -> Result<f64> {
    if r == 0 {
        return Err(Error::param("smoothness order r must be positive"));
    }
    if !(eps > 0.0) || !(m > 0.0) {
        return Err(Error::param("eps and M must be positive"));
    }
    Ok((factorial(r) * eps / m).powf(1.0 / f64::from(r)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    #[test]
    fn interp_error_bound_examples() {
        assert_eq!(interp_error_bound(1.0, 0.0, 1.0, 1).unwrap(), 1.0);
        assert_eq!(interp_error_bound(120.0, 0.0, 0.5, 5).unwrap(), 0.03125);
        assert_eq!(interp_error_bound(3840.0, 0.0, 0.5, 5).unwrap(), 1.0);
        assert!(interp_error_bound(1.0, 0.5, 0.5, 1).is_err());
        assert!(interp_error_bound(1.0, 0.0, 1.0, 0).is_err());
    }

    #[test]
    fn support_lower_bound_examples() {
        assert_eq!(support_lower_bound(1.0, 1.0, 1).unwrap(), 1.0);
        let v = support_lower_bound(0.1, 10.0, 5).unwrap();
        assert!((v - 1.2f64.powf(0.2)).abs() < 1e-15);
        assert!(v > 1.0);
        assert_eq!(support_lower_bound(0.5, 2.0, 1).unwrap(), 0.25);
        assert!(support_lower_bound(0.0, 1.0, 1).is_err());
        assert!(support_lower_bound(1.0, -1.0, 1).is_err());
    }

    proptest! {
        #[test]
        fn support_bound_monotone(e1 in 1e-3f64..1.0, e2 in 1e-3f64..1.0,
                                  m1 in 1e-2f64..100.0, m2 in 1e-2f64..100.0, r in 1u32..7) {
            let (elo, ehi) = if e1 <= e2 { (e1, e2) } else { (e2, e1) };
            let (mlo, mhi) = if m1 <= m2 { (m1, m2) } else { (m2, m1) };
            prop_assert!(support_lower_bound(elo, m1, r).unwrap() <= support_lower_bound(ehi, m1, r).unwrap());
            prop_assert!(support_lower_bound(e1, mhi, r).unwrap() <= support_lower_bound(e1, mlo, r).unwrap());
        }

        #[test]
        fn interpolation_reproduces_low_degree(r in 1usize..=6, blocks in 1usize..6,
                                               coeffs in prop::collection::vec(-3.0f64..3.0, 6)) {
            let c = &coeffs[..r];
            let (edges, nodes) = block_chebyshev_layout(r * blocks, r).unwrap();
            let samples: Vec<(f64, f64)> = nodes.iter().flatten().map(|&t| (t, poly::eval(c, t))).collect();
            let p = interpolate_line(&samples, r).unwrap();
            prop_assert_eq!(p.breakpoints().len(), edges.len());
            for t in grid(500) {
                prop_assert!((p.eval(t) - poly::eval(c, t)).abs() <= 1e-9);
            }
        }
    }

    #[test]
    fn per_block_error_within_lagrange_bound() {
        // sin(2 pi t), r = 3: ‖g'''‖ = (2 pi)^3
        let g = |t: f64| (std::f64::consts::TAU * t).sin();
        let m = std::f64::consts::TAU.powi(3);
        for blocks in [1usize, 2, 4, 7, 16] {
            let (edges, nodes) = block_chebyshev_layout(3 * blocks, 3).unwrap();
            let samples: Vec<_> = nodes.iter().flatten().map(|&t| (t, g(t))).collect();
            let p = interpolate_line(&samples, 3).unwrap();
            for w in edges.windows(2) {
                let bound = interp_error_bound(m, w[0], w[1], 3).unwrap();
                let err = (0..=2000)
                    .map(|i| w[0] + (w[1] - w[0]) * i as f64 / 2000.0)
                    .map(|t| (p.eval(t) - g(t)).abs())
                    .fold(0.0, f64::max);
                assert!(err <= bound + 1e-10, "blocks={blocks} err={err} bound={bound}");
            }
        }
    }
}
