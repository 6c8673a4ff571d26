//! Bounded superharmonic witness `u(x) = (1 + |x|²)^{-(n-2)/2}` on `R^n`,
//! `n ≥ 3`, showing that Euclidean spaces of dimension three and up are not
//! parabolic.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::error::{LabError, Result};

/// Radius of the ball that samples are drawn from.
pub const SAMPLE_RADIUS: f64 = 10.0;

fn check_dim(n: usize) -> Result<()> {
    if n < 3 {
        return Err(LabError::Precondition(format!("the witness needs n >= 3, got {n}")));
    }
    Ok(())
}

/// `u(ρ)`, `u'(ρ)`, `u''(ρ)` of the radial witness.
pub fn witness_radial(n: usize, rho: f64) -> (f64, f64, f64) {
    let a = (n as f64 - 2.0) / 2.0;
    let w = 1.0 + rho * rho;
    let u = w.powf(-a);
    let du = -2.0 * a * rho * w.powf(-a - 1.0);
    let d2u = -2.0 * a * w.powf(-a - 1.0) + 4.0 * a * (a + 1.0) * rho * rho * w.powf(-a - 2.0);
    (u, du, d2u)
}

/// `Δu = u'' + (n-1) u'/ρ`, with the limit `n u''(0)` at the origin.
pub fn witness_laplacian(n: usize, rho: f64) -> Result<f64> {
    check_dim(n)?;
    let (_, du, d2u) = witness_radial(n, rho);
    if rho == 0.0 {
        return Ok(n as f64 * d2u);
    }
    Ok(d2u + (n as f64 - 1.0) * du / rho)
}

/// `max Δu` over `samples` points drawn uniformly from the ball of radius 10.
pub fn parabolicity_witness(n: usize, samples: usize, seed: u64) -> Result<f64> {
    check_dim(n)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut worst = f64::NEG_INFINITY;
    for _ in 0..samples {
        // radius with density ∝ ρ^{n-1}
        let rho = SAMPLE_RADIUS * rng.gen::<f64>().powf(1.0 / n as f64);
        worst = worst.max(witness_laplacian(n, rho)?);
    }
    Ok(worst)
}
