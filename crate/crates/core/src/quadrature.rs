//! Composite quadrature with a node-doubling Cauchy test.
//!
//! Node values may be computed in parallel; reductions always use the same
//! pairwise summation tree so results are bit-identical across thread counts.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{LabError, Result};
use crate::warp::Domain1D;

pub const MIN_NODES: usize = 16;
/// Doublings allowed to fail the Cauchy test before giving up.
pub const MAX_FAILED_DOUBLINGS: usize = 3;

/// Deterministic pairwise (cascade) summation.
pub fn pairwise_sum(xs: &[f64]) -> f64 {
    if xs.len() <= 16 {
        return xs.iter().sum();
    }
    let mid = xs.len() / 2;
    pairwise_sum(&xs[..mid]) + pairwise_sum(&xs[mid..])
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum RuleKind {
    TrapezoidPeriodic,
    SimpsonInterval,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub kind: RuleKind,
    pub nodes: usize,
}

impl QuadratureRule {
    pub fn new(kind: RuleKind, nodes: usize) -> Result<Self> {
        if nodes < MIN_NODES {
            return Err(LabError::Precondition(format!("quadrature needs at least {MIN_NODES} nodes, got {nodes}")));
        }
        let nodes = if kind == RuleKind::SimpsonInterval && nodes % 2 == 1 { nodes + 1 } else { nodes };
        Ok(QuadratureRule { kind, nodes })
    }

    /// The natural rule for a domain: periodic trapezoid on circles, Simpson on intervals.
    pub fn for_domain(domain: &Domain1D, nodes: usize) -> Result<Self> {
        let kind = if domain.is_circle() { RuleKind::TrapezoidPeriodic } else { RuleKind::SimpsonInterval };
        Self::new(kind, nodes)
    }

    pub fn doubled(&self) -> Self {
        QuadratureRule { kind: self.kind, nodes: self.nodes * 2 }
    }

    /// Nodes and weights on `[start, start + len)`.
    pub fn nodes_and_weights(&self, start: f64, len: f64) -> (Vec<f64>, Vec<f64>) {
        let n = self.nodes;
        let h = len / n as f64;
        match self.kind {
            RuleKind::TrapezoidPeriodic => ((0..n).map(|i| start + h * i as f64).collect(), vec![h; n]),
            RuleKind::SimpsonInterval => {
                let x = (0..=n).map(|i| start + h * i as f64).collect();
                let w = (0..=n)
                    .map(|i| {
                        let c = if i == 0 || i == n {
                            1.0
                        } else if i % 2 == 1 {
                            4.0
                        } else {
                            2.0
                        };
                        c * h / 3.0
                    })
                    .collect();
                (x, w)
            }
        }
    }

    /// One application of the composite rule.
    pub fn apply<F>(&self, field: &F, start: f64, len: f64) -> Result<f64>
    where
        F: Fn(f64) -> Result<f64> + Sync,
    {
        let (x, w) = self.nodes_and_weights(start, len);
        let terms: Vec<f64> = x
            .par_iter()
            .zip(w.par_iter())
            .map(|(x, w)| field(*x).map(|v| v * w))
            .collect::<Result<_>>()?;
        Ok(pairwise_sum(&terms))
    }
}

/// Result of an integration with its refinement history `(nodes, value)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Integration {
    pub value: f64,
    pub nodes: usize,
    pub history: Vec<(usize, f64)>,
}

/// Integrate `field` over `domain`, doubling the node count until two
/// successive values agree to `tol` (relative to `max(1, |value|)`).
pub fn integrate<F>(rule: QuadratureRule, field: F, domain: &Domain1D, tol: f64) -> Result<Integration>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    if rule.nodes < MIN_NODES {
        return Err(LabError::Precondition(format!("quadrature needs at least {MIN_NODES} nodes")));
    }
    let (start, len) = domain.span();
    let mut rule = rule;
    let mut prev = rule.apply(&field, start, len)?;
    let mut history = vec![(rule.nodes, prev)];
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_FAILED_DOUBLINGS {
        rule = rule.doubled();
        let next = rule.apply(&field, start, len)?;
        history.push((rule.nodes, next));
        last_change = (next - prev).abs();
        if last_change <= tol * next.abs().max(1.0) {
            return Ok(Integration { value: next, nodes: rule.nodes, history });
        }
        prev = next;
    }
    Err(LabError::NonConvergence { nodes: rule.nodes, last_change })
}

/// Tensor-product periodic trapezoid over a flat torus with `n` nodes per axis.
pub fn torus_trapezoid<F>(field: &F, periods: &[f64], n: usize) -> Result<f64>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    let m = periods.len();
    let total = n.pow(m as u32);
    let cell: f64 = periods.iter().map(|p| p / n as f64).product();
    let terms: Vec<f64> = (0..total)
        .into_par_iter()
        .map(|mut idx| {
            let point: Vec<f64> = (0..m)
                .map(|k| {
                    let i = idx % n;
                    idx /= n;
                    periods[k] * i as f64 / n as f64
                })
                .collect();
            field(&point).map(|v| v * cell)
        })
        .collect::<Result<_>>()?;
    Ok(pairwise_sum(&terms))
}

/// Torus integration with the same doubling test as [`integrate`].
pub fn integrate_torus<F>(field: F, periods: &[f64], nodes: usize, tol: f64) -> Result<Integration>
where
    F: Fn(&[f64]) -> Result<f64> + Sync,
{
    if nodes < MIN_NODES {
        return Err(LabError::Precondition(format!("quadrature needs at least {MIN_NODES} nodes")));
    }
    let mut n = nodes;
    let mut prev = torus_trapezoid(&field, periods, n)?;
    let mut history = vec![(n, prev)];
    let mut last_change = f64::INFINITY;
    for _ in 0..MAX_FAILED_DOUBLINGS {
        n *= 2;
        let next = torus_trapezoid(&field, periods, n)?;
        history.push((n, next));
        last_change = (next - prev).abs();
        if last_change <= tol * next.abs().max(1.0) {
            return Ok(Integration { value: next, nodes: n, history });
        }
        prev = next;
    }
    Err(LabError::NonConvergence { nodes: n, last_change })
}
