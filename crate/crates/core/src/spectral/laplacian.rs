//! Finite-volume Laplace–Beltrami operators `-Δ_h = W⁻¹ K` with `K` a
//! symmetric stiffness matrix (zero row sums) and `W` lumped node measures.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;

use super::sparse::{CsrMatrix, TripletBuilder};
use crate::error::{LabError, Result};
use crate::quadrature::pairwise_sum;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum MeshKind {
    Circle { radius: f64, nodes: usize },
    ClosedCurve { length: f64, nodes: usize },
    FlatTorus { periods: [f64; 2], nodes: [usize; 2] },
}

#[derive(Debug, Clone)]
pub struct DiscreteLaplacian {
    pub kind: MeshKind,
    pub stiffness: CsrMatrix,
    pub weights: Vec<f64>,
}

impl DiscreteLaplacian {
    /// Uniform grid on a circle of the given radius.
    pub fn circle(radius: f64, nodes: usize) -> Result<Self> {
        if !(radius > 0.0) {
            return Err(LabError::Precondition(format!("circle radius must be positive, got {radius}")));
        }
        let edge = 2.0 * PI * radius / nodes as f64;
        let mut l = Self::closed_curve(&vec![edge; nodes])?;
        l.kind = MeshKind::Circle { radius, nodes };
        Ok(l)
    }

    /// Closed polygon with edge `i` joining nodes `i` and `i + 1` (cyclically).
    pub fn closed_curve(edge_lengths: &[f64]) -> Result<Self> {
        let n = edge_lengths.len();
        if n < 3 {
            return Err(LabError::Precondition(format!("a closed curve needs at least 3 nodes, got {n}")));
        }
        if edge_lengths.iter().any(|l| !(*l > 0.0)) {
            return Err(LabError::Precondition("edge lengths must be positive".into()));
        }
        let mut b = TripletBuilder::new(n);
        let mut weights = vec![0.0; n];
        for (i, l) in edge_lengths.iter().enumerate() {
            let j = (i + 1) % n;
            b.add_edge(i, j, 1.0 / l);
            weights[i] += 0.5 * l;
            weights[j] += 0.5 * l;
        }
        Ok(DiscreteLaplacian {
            kind: MeshKind::ClosedCurve { length: pairwise_sum(edge_lengths), nodes: n },
            stiffness: b.build(),
            weights,
        })
    }

    /// Five-point operator on the flat torus `R²/(L₁Z × L₂Z)`.
    pub fn flat_torus(periods: [f64; 2], nodes: [usize; 2]) -> Result<Self> {
        if periods.iter().any(|p| !(*p > 0.0)) || nodes.iter().any(|n| *n < 3) {
            return Err(LabError::Precondition("torus needs positive periods and at least 3 nodes per axis".into()));
        }
        let [n1, n2] = nodes;
        let (h1, h2) = (periods[0] / n1 as f64, periods[1] / n2 as f64);
        let idx = |i: usize, j: usize| (i % n1) * n2 + (j % n2);
        let mut b = TripletBuilder::new(n1 * n2);
        for i in 0..n1 {
            for j in 0..n2 {
                b.add_edge(idx(i, j), idx(i + 1, j), h2 / h1);
                b.add_edge(idx(i, j), idx(i, j + 1), h1 / h2);
            }
        }
        Ok(DiscreteLaplacian {
            kind: MeshKind::FlatTorus { periods, nodes },
            stiffness: b.build(),
            weights: vec![h1 * h2; n1 * n2],
        })
    }

    pub fn dim(&self) -> usize {
        self.weights.len()
    }

    /// `-Δ_h u = W⁻¹ K u`
    pub fn apply(&self, u: &[f64]) -> Vec<f64> {
        self.stiffness.mul(u).iter().zip(&self.weights).map(|(k, w)| k / w).collect()
    }

    /// `max |K_ij - K_ji|`; the operator is symmetric in the `W` inner product iff `K` is.
    pub fn asymmetry(&self) -> f64 {
        self.stiffness.asymmetry()
    }

    pub fn max_row_sum(&self) -> f64 {
        self.stiffness.max_row_sum()
    }

    /// Discrete Dirichlet energy `uᵀ K u`.
    pub fn energy(&self, u: &[f64]) -> f64 {
        self.stiffness.bilinear(u, u)
    }

    /// `Σ W_i u_i v_i`
    pub fn inner(&self, u: &[f64], v: &[f64]) -> f64 {
        pairwise_sum(&u.iter().zip(v).zip(&self.weights).map(|((a, b), w)| a * b * w).collect::<Vec<_>>())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn operators_are_symmetric_with_zero_row_sums() {
        for l in [
            DiscreteLaplacian::circle(1.5, 64).unwrap(),
            DiscreteLaplacian::closed_curve(&[1.0, 2.0, 0.5, 0.7]).unwrap(),
            DiscreteLaplacian::flat_torus([1.0, 2.0], [8, 12]).unwrap(),
        ] {
            assert!(l.asymmetry() <= 1e-12);
            assert!(l.max_row_sum() <= 1e-12);
        }
    }

    #[test]
    fn circle_cosine_is_an_approximate_eigenfunction() {
        let n = 256;
        let r = 2.0;
        let l = DiscreteLaplacian::circle(r, n).unwrap();
        let u: Vec<f64> = (0..n).map(|i| (2.0 * PI * i as f64 / n as f64).cos()).collect();
        let lu = l.apply(&u);
        for (a, b) in lu.iter().zip(&u) {
            assert!((a - b / (r * r)).abs() < 1e-4);
        }
    }
}
