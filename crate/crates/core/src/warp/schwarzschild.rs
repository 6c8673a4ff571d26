//! Radial profile of a Schwarzschild-type metric.
//!
//! With `dt = dr / sqrt(1 - 2m/r^q)` the radius `f(t) = r(t)` solves
//! `f' = sqrt(1 - 2m/f^q)`, `f(0) = r0`. The profile is tabulated by classical
//! RK4 and read back with cubic Hermite interpolation; `f'` and
//! `f'' = m q f^(-q-1)` are then evaluated in closed form from `f`.

use serde::{Deserialize, Serialize};

use super::function::WarpingFunction;
use super::jet::Jet2;
use crate::error::{LabError, Result};

pub const DEFAULT_STEP: f64 = 1e-3;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SchwarzschildParams {
    pub mass: f64,
    /// Exponent in the flux term; equals the fiber dimension.
    pub exponent: u32,
    pub r0: f64,
    pub tmax: f64,
    #[serde(default = "default_step")]
    pub step: f64,
}

fn default_step() -> f64 {
    DEFAULT_STEP
}

#[derive(Debug, Clone)]
pub struct SchwarzschildTable {
    params: SchwarzschildParams,
    h: f64,
    values: Vec<f64>,
    slopes: Vec<f64>,
    /// |f_h(tmax) - f_{h/2}(tmax)| from one halving of the step.
    richardson_gap: f64,
}

fn slope(mass: f64, q: u32, f: f64, t: f64) -> Result<f64> {
    let g = 1.0 - 2.0 * mass / f.powi(q as i32);
    if !(g > 0.0) {
        return Err(LabError::HorizonError { t, value: g });
    }
    Ok(g.sqrt())
}

fn integrate(p: &SchwarzschildParams, steps: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    let h = p.tmax / steps as f64;
    let q = p.exponent;
    let mut values = Vec::with_capacity(steps + 1);
    let mut slopes = Vec::with_capacity(steps + 1);
    let mut f = p.r0;
    values.push(f);
    slopes.push(slope(p.mass, q, f, 0.0)?);
    for i in 0..steps {
        let t = i as f64 * h;
        let k1 = slope(p.mass, q, f, t)?;
        let k2 = slope(p.mass, q, f + 0.5 * h * k1, t + 0.5 * h)?;
        let k3 = slope(p.mass, q, f + 0.5 * h * k2, t + 0.5 * h)?;
        let k4 = slope(p.mass, q, f + h * k3, t + h)?;
        f += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        values.push(f);
        slopes.push(slope(p.mass, q, f, t + h)?);
    }
    Ok((values, slopes))
}

impl SchwarzschildTable {
    pub fn build(params: SchwarzschildParams) -> Result<Self> {
        let SchwarzschildParams { mass, exponent, r0, tmax, step } = params;
        if !(mass > 0.0) {
            return Err(LabError::Precondition(format!("mass must be positive, got {mass}")));
        }
        if exponent == 0 {
            return Err(LabError::Precondition("exponent must be at least 1".into()));
        }
        if !(step > 0.0) || !(tmax > 0.0) {
            return Err(LabError::Precondition(format!("need step > 0 and tmax > 0, got {step}, {tmax}")));
        }
        if !(r0 > 0.0) || r0.powi(exponent as i32) <= 2.0 * mass {
            return Err(LabError::HorizonError { t: 0.0, value: 1.0 - 2.0 * mass / r0.powi(exponent as i32) });
        }
        let steps = (tmax / step).ceil().max(1.0) as usize;
        let (values, slopes) = integrate(&params, steps)?;
        let (fine, _) = integrate(&params, 2 * steps)?;
        let richardson_gap = (values[steps] - fine[2 * steps]).abs();
        Ok(SchwarzschildTable { params, h: tmax / steps as f64, values, slopes, richardson_gap })
    }

    pub fn mass(&self) -> f64 {
        self.params.mass
    }

    pub fn exponent(&self) -> u32 {
        self.params.exponent
    }

    pub fn r0(&self) -> f64 {
        self.params.r0
    }

    pub fn tmax(&self) -> f64 {
        self.params.tmax
    }

    pub fn params(&self) -> SchwarzschildParams {
        self.params
    }

    pub fn richardson_gap(&self) -> f64 {
        self.richardson_gap
    }

    fn interpolate(&self, t: f64) -> f64 {
        let n = self.values.len() - 1;
        let i = ((t / self.h).floor() as usize).min(n - 1);
        let s = (t - i as f64 * self.h) / self.h;
        let (s2, s3) = (s * s, s * s * s);
        let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
        let h10 = s3 - 2.0 * s2 + s;
        let h01 = -2.0 * s3 + 3.0 * s2;
        let h11 = s3 - s2;
        h00 * self.values[i] + h10 * self.h * self.slopes[i] + h01 * self.values[i + 1] + h11 * self.h * self.slopes[i + 1]
    }

    pub(crate) fn jet(&self, t: f64) -> Result<Jet2> {
        let q = self.params.exponent as i32;
        let m = self.params.mass;
        let f = self.interpolate(t);
        let f1 = slope(m, self.params.exponent, f, t)?;
        let f2 = m * q as f64 * f.powi(-q - 1);
        Ok(Jet2::new(f, f1, f2))
    }
}

/// Tabulated Schwarzschild-type warping function on `[0, tmax]`.
pub fn schwarzschild_profile(params: SchwarzschildParams) -> Result<WarpingFunction> {
    WarpingFunction::from_table(SchwarzschildTable::build(params)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn params(mass: f64, q: u32, r0: f64) -> SchwarzschildParams {
        SchwarzschildParams { mass, exponent: q, r0, tmax: 3.0, step: DEFAULT_STEP }
    }

    #[test]
    fn initial_slope() {
        let wf = schwarzschild_profile(params(1.0, 2, 2.0)).unwrap();
        let (f, f1, _) = wf.eval(0.0).unwrap();
        assert_eq!(f, 2.0);
        assert!((f1 - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn flat_limit() {
        let wf = schwarzschild_profile(params(1e-14, 2, 1.0)).unwrap();
        for t in [0.0, 0.7, 2.9] {
            let (f, f1, f2) = wf.eval(t).unwrap();
            assert!((f - (1.0 + t)).abs() < 1e-12, "f({t}) = {f}");
            assert!((f1 - 1.0).abs() < 1e-12 && f2.abs() < 1e-12);
        }
    }

    #[test]
    fn horizon_is_rejected() {
        let err = SchwarzschildTable::build(params(1.0, 2, 1.2)).unwrap_err();
        assert!(matches!(err, LabError::HorizonError { .. }));
    }

    #[test]
    fn closed_form_second_derivative_matches_slope_derivative() {
        let wf = schwarzschild_profile(params(1.0, 2, 2.0)).unwrap();
        let h = 1e-4;
        let t = 1.3;
        let fd = (wf.eval(t + h).unwrap().1 - wf.eval(t - h).unwrap().1) / (2.0 * h);
        assert!((fd - wf.eval(t).unwrap().2).abs() < 1e-7);
    }

    #[test]
    fn rk4_halving_gap_is_small() {
        let table = SchwarzschildTable::build(params(1.0, 2, 2.0)).unwrap();
        assert!(table.richardson_gap() < 1e-10, "{}", table.richardson_gap());
    }
}
