//! Dense monomial polynomials `c[0] + c[1] s + ... + c[k] s^k` on a bounded interval.

/// Horner evaluation.
pub fn eval(coeffs: &[f64], s: f64) -> f64 {
    coeffs.iter().rev().fold(0.0, |acc, &c| acc * s + c)
}

/// `k`-th derivative coefficients.
pub fn derivative(coeffs: &[f64], k: usize) -> Vec<f64> {
    if k >= coeffs.len() {
        return vec![0.0];
    }
    coeffs
        .iter()
        .enumerate()
        .skip(k)
        .map(|(j, &c)| c * falling_factorial(j, k))
        .collect()
}

fn falling_factorial(j: usize, k: usize) -> f64 {
    (0..k).map(|i| (j - i) as f64).product()
}

/// True when every coefficient is exactly zero.
pub fn is_zero(coeffs: &[f64]) -> bool {
    coeffs.iter().all(|&c| c == 0.0)
}

fn trimmed(coeffs: &[f64]) -> &[f64] {
    let len = coeffs.iter().rposition(|&c| c != 0.0).map_or(0, |i| i + 1);
    &coeffs[..len]
}

/// Points in `[lo, hi]` where the polynomial changes sign, found by isolating
/// monotone pieces between the sign changes of the derivative and bisecting.
fn sign_changes(coeffs: &[f64], lo: f64, hi: f64) -> Vec<f64> {
    let c = trimmed(coeffs);
    if c.len() <= 1 {
        return Vec::new();
    }
    let mut knots = vec![lo];
    knots.extend(sign_changes(&derivative(c, 1), lo, hi));
    knots.push(hi);
    let mut roots = Vec::new();
    for w in knots.windows(2) {
        let (mut a, mut b) = (w[0], w[1]);
        let (fa, fb) = (eval(c, a), eval(c, b));
        if fa == 0.0 || fb == 0.0 || (fa < 0.0) == (fb < 0.0) {
            continue;
        }
        let neg_at_a = fa < 0.0;
        for _ in 0..200 {
            let m = 0.5 * (a + b);
            if m <= a || m >= b {
                break;
            }
            if (eval(c, m) < 0.0) == neg_at_a {
                a = m;
            } else {
                b = m;
            }
        }
        roots.push(0.5 * (a + b));
    }
    roots
}

/// Maximum of `|p|` on `[lo, hi]`, exact up to rounding: the candidates are the
/// interval ends and the sign changes of `p'`.
pub fn sup_abs(coeffs: &[f64], lo: f64, hi: f64) -> f64 {
    let c = trimmed(coeffs);
    let mut best = eval(c, lo).abs().max(eval(c, hi).abs());
    if c.len() > 2 {
        for t in sign_changes(&derivative(c, 1), lo, hi) {
            best = best.max(eval(c, t).abs());
        }
    }
    best
}

/// Distinct real zeros in `[lo, hi]`, including touching zeros. `None` means the
/// polynomial vanishes identically.
///
/// A critical point counts as a zero when `|p|` there is below `1e-12` times the
/// coefficient scale.
pub fn zeros_in(coeffs: &[f64], lo: f64, hi: f64) -> Option<Vec<f64>> {
    let c = trimmed(coeffs);
    if c.is_empty() {
        return None;
    }
    let scale = c.iter().fold(0.0f64, |m, &x| m.max(x.abs()));
    let tol = 1e-12 * scale;
    let mut zeros = sign_changes(c, lo, hi);
    let mut candidates = vec![lo, hi];
    if c.len() > 2 {
        candidates.extend(sign_changes(&derivative(c, 1), lo, hi));
    }
    for t in candidates {
        if eval(c, t).abs() <= tol {
            zeros.push(t);
        }
    }
    zeros.sort_by(f64::total_cmp);
    zeros.dedup_by(|a, b| (*a - *b).abs() <= 1e-9);
    Some(zeros)
}

/// Coefficients of `c * prod_j (s - roots[j])`.
pub fn from_roots(scale: f64, roots: &[f64]) -> Vec<f64> {
    let mut coeffs = vec![scale];
    for &root in roots {
        let mut next = vec![0.0; coeffs.len() + 1];
        for (j, &c) in coeffs.iter().enumerate() {
            next[j + 1] += c;
            next[j] -= root * c;
        }
        coeffs = next;
    }
    coeffs
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn horner_and_derivative() {
        let p = [1.0, -2.0, 0.0, 4.0];
        assert_eq!(eval(&p, 0.5), 1.0 - 1.0 + 0.5);
        assert_eq!(derivative(&p, 1), vec![-2.0, 0.0, 12.0]);
        assert_eq!(derivative(&p, 3), vec![24.0]);
        assert_eq!(derivative(&p, 4), vec![0.0]);
    }

    #[test]
    fn sup_finds_interior_extremum() {
        // 1 - (s - 0.3)^2 peaks at 0.3
        let p = [1.0 - 0.09, 0.6, -1.0];
        assert!((sup_abs(&p, 0.0, 1.0) - 1.0).abs() < 1e-15);
        assert!((sup_abs(&[0.0, 1.0], 0.0, 1.0) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn zeros_of_product_form() {
        let p = from_roots(2.0, &[0.1, 0.5, 0.9]);
        let z = zeros_in(&p, 0.0, 1.0).unwrap();
        assert_eq!(z.len(), 3);
        for (a, b) in z.iter().zip([0.1, 0.5, 0.9]) {
            assert!((a - b).abs() < 1e-12);
        }
        assert_eq!(zeros_in(&p, 0.2, 0.6).unwrap().len(), 1);
        // double root is a touching zero
        let q = from_roots(1.0, &[0.25, 0.25, 0.75]);
        assert_eq!(zeros_in(&q, 0.0, 1.0).unwrap().len(), 2);
        assert!(zeros_in(&[0.0, 0.0], 0.0, 1.0).is_none());
        assert!(zeros_in(&[1.0], 0.0, 1.0).unwrap().is_empty());
    }
}
