//! Piecewise Lagrange interpolation on blocks of `r` nodes, evaluated in
//! barycentric form.

use serde::{Deserialize, Serialize};

use super::factor::piece_index;
use crate::{Error, Result};

/// One polynomial piece: the interpolant through `(nodes[j], values[j])`,
/// of degree `nodes.len() - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LagrangePiece {
    pub nodes: Vec<f64>,
    pub values: Vec<f64>,
    weights: Vec<f64>,
}

impl LagrangePiece {
    fn new(nodes: Vec<f64>, values: Vec<f64>) -> Self {
        let mut weights: Vec<f64> = nodes
            .iter()
            .enumerate()
            .map(|(j, &tj)| {
                let prod: f64 = nodes
                    .iter()
                    .enumerate()
                    .filter(|&(k, _)| k != j)
                    .map(|(_, &tk)| tj - tk)
                    .product();
                1.0 / prod
            })
            .collect();
        // common factors cancel in the barycentric quotient
        let wmax = weights.iter().fold(0.0f64, |m, w| m.max(w.abs()));
        if wmax > 0.0 {
            weights.iter_mut().for_each(|w| *w /= wmax);
        }
        Self {
            nodes,
            values,
            weights,
        }
    }

    pub fn degree(&self) -> usize {
        self.nodes.len() - 1
    }

    fn eval(&self, t: f64) -> f64 {
        if self.nodes.len() == 1 {
            return self.values[0];
        }
        let (mut num, mut den) = (0.0, 0.0);
        for ((&tj, &vj), &wj) in self.nodes.iter().zip(&self.values).zip(&self.weights) {
            let diff = t - tj;
            if diff == 0.0 {
                return vj;
            }
            let q = wj / diff;
            num += q * vj;
            den += q;
        }
        num / den
    }
}

/// Piecewise polynomial on a partition `0 = b_0 < ... < b_K = 1` of the unit
/// interval with local degree `r - 1`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PiecewisePolynomial {
    breakpoints: Vec<f64>,
    pieces: Vec<LagrangePiece>,
}

impl PiecewisePolynomial {
    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    pub fn pieces(&self) -> &[LagrangePiece] {
        &self.pieces
    }

    pub fn eval(&self, t: f64) -> f64 {
        self.pieces[piece_index(&self.breakpoints, t)].eval(t)
    }

    /// Interpolant with explicit block edges; block `k` spans
    /// `[edges[k], edges[k+1]]` and interpolates `blocks[k]`.
    pub fn from_blocks(edges: Vec<f64>, blocks: Vec<Vec<(f64, f64)>>) -> Result<Self> {
        if edges.len() != blocks.len() + 1 || blocks.is_empty() {
            return Err(Error::param("need one more edge than blocks"));
        }
        if edges[0] != 0.0 || *edges.last().unwrap() != 1.0 || edges.windows(2).any(|w| !(w[0] < w[1])) {
            return Err(Error::param("block edges must increase strictly from 0 to 1"));
        }
        let pieces = blocks
            .into_iter()
            .map(|b| {
                if b.is_empty() {
                    return Err(Error::InsufficientNodes { needed: 1, got: 0 });
                }
                let (nodes, values) = b.into_iter().unzip();
                Ok(LagrangePiece::new(nodes, values))
            })
            .collect::<Result<_>>()?;
        Ok(Self {
            breakpoints: edges,
            pieces,
        })
    }
}

/// `r` Chebyshev points of the first kind inside `[lo, hi]`, ascending.
pub fn chebyshev_nodes(lo: f64, hi: f64, r: usize) -> Vec<f64> {
    let (mid, half) = (0.5 * (lo + hi), 0.5 * (hi - lo));
    (0..r)
        .rev()
        .map(|j| {
            let theta = (2 * j + 1) as f64 * std::f64::consts::PI / (2 * r) as f64;
            mid + half * theta.cos()
        })
        .collect()
}

/// Node layout used by the recovery phase: `floor(m / r)` equal blocks of
/// `[0, 1]`, each holding `r` Chebyshev nodes. Returns `(edges, nodes)`.
pub fn block_chebyshev_layout(m: usize, r: usize) -> Result<(Vec<f64>, Vec<Vec<f64>>)> {
    if r == 0 {
        return Err(Error::param("smoothness order r must be positive"));
    }
    let k = m / r;
    if k == 0 {
        return Err(Error::InsufficientNodes { needed: r, got: m });
    }
    let edges: Vec<f64> = (0..=k).map(|i| i as f64 / k as f64).collect();
    let nodes = edges
        .windows(2)
        .map(|w| chebyshev_nodes(w[0], w[1], r))
        .collect();
    Ok((edges, nodes))
}

/// Piecewise interpolation of line samples with local degree `r - 1`.
///
/// Sorted samples are cut into consecutive groups of `r`. When the count is not
/// a multiple of `r`, the trailing samples form a last group together with the
/// samples just before them, so every piece still has exactly `r` nodes. Piece
/// boundaries sit halfway between neighbouring groups.
pub fn interpolate_line(samples: &[(f64, f64)], r: usize) -> Result<PiecewisePolynomial> {
    if r == 0 {
        return Err(Error::param("smoothness order r must be positive"));
    }
    let m = samples.len();
    if m < r {
        return Err(Error::InsufficientNodes { needed: r, got: m });
    }
    if samples.windows(2).any(|w| !(w[0].0 < w[1].0))
        || samples.iter().any(|s| !(0.0..=1.0).contains(&s.0))
    {
        return Err(Error::UnsortedNodes);
    }
    let full = m / r;
    // (first sample of the piece's region, slice of samples it interpolates)
    let mut groups: Vec<(usize, &[(f64, f64)])> =
        (0..full).map(|g| (g * r, &samples[g * r..(g + 1) * r])).collect();
    if !m.is_multiple_of(r) {
        groups.push((full * r, &samples[m - r..]));
    }
    let mut edges = vec![0.0];
    for pair in groups.windows(2) {
        let start = pair[1].0;
        edges.push(0.5 * (samples[start - 1].0 + samples[start].0));
    }
    edges.push(1.0);
    let pieces = groups
        .into_iter()
        .map(|(_, g)| {
            let (nodes, values) = g.iter().copied().unzip();
            LagrangePiece::new(nodes, values)
        })
        .collect();
    Ok(PiecewisePolynomial {
        breakpoints: edges,
        pieces,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn degree_zero_is_constant() {
        let p = interpolate_line(&[(0.5, 2.5)], 1).unwrap();
        for t in [0.0, 0.3, 0.5, 1.0] {
            assert_eq!(p.eval(t), 2.5);
        }
    }

    #[test]
    fn linear_reproduced_from_any_node_count() {
        let g = |t: f64| 3.0 * t - 1.0;
        for m in 2..9 {
            let samples: Vec<_> = (0..m)
                .map(|i| {
                    let t = (i as f64 + 0.3) / m as f64;
                    (t, g(t))
                })
                .collect();
            let p = interpolate_line(&samples, 2).unwrap();
            for i in 0..=100 {
                let t = i as f64 / 100.0;
                assert!((p.eval(t) - g(t)).abs() < 1e-13, "m={m} t={t}");
            }
            // every sample is reproduced by the piece holding it
            for &(t, v) in &samples {
                assert!((p.eval(t) - v).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn rejects_bad_input() {
        assert_eq!(
            interpolate_line(&[(0.1, 0.0)], 2),
            Err(Error::InsufficientNodes { needed: 2, got: 1 })
        );
        assert_eq!(interpolate_line(&[(0.1, 0.0), (0.1, 1.0)], 1), Err(Error::UnsortedNodes));
        assert_eq!(interpolate_line(&[(0.4, 0.0), (0.2, 1.0)], 1), Err(Error::UnsortedNodes));
        assert!(interpolate_line(&[(0.1, 0.0)], 0).is_err());
    }

    #[test]
    fn chebyshev_nodes_are_sorted_and_inside() {
        let nodes = chebyshev_nodes(0.25, 0.5, 4);
        assert!(nodes.windows(2).all(|w| w[0] < w[1]));
        assert!(nodes.iter().all(|&t| t > 0.25 && t < 0.5));
        assert_eq!(chebyshev_nodes(0.0, 1.0, 1), vec![0.5]);
    }

    #[test]
    fn block_layout_counts() {
        let (edges, nodes) = block_chebyshev_layout(11, 3).unwrap();
        assert_eq!(edges.len(), 4);
        assert_eq!(nodes.iter().map(Vec::len).sum::<usize>(), 9);
        assert!(block_chebyshev_layout(2, 3).is_err());
    }
}
