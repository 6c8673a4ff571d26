//! Verification reports and their CSV companions.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::scenario::Suite;

/// One level of a refinement study: the resolution and the error (or residual) there.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RefinementStep {
    pub resolution: f64,
    pub value: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub id: String,
    /// Which statement the check instantiates.
    pub anchor: String,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
    pub tolerance: f64,
    pub verdict: bool,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub refinement_history: Vec<RefinementStep>,
    /// `log₂(e_k / e_{k+1})`; `None` where an error vanished.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub orders: Vec<Option<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

impl CheckRecord {
    /// A record whose verdict is `residual <= tolerance`. Non-finite values
    /// fail the check and are stored as `f64::MAX` so the JSON stays valid.
    pub fn new(id: impl Into<String>, anchor: impl Into<String>, lhs: f64, rhs: f64, residual: f64, tolerance: f64) -> Self {
        let verdict = residual.is_finite() && residual <= tolerance;
        Self::with_verdict(id, anchor, lhs, rhs, residual, tolerance, verdict)
    }

    pub fn with_verdict(
        id: impl Into<String>,
        anchor: impl Into<String>,
        lhs: f64,
        rhs: f64,
        residual: f64,
        tolerance: f64,
        verdict: bool,
    ) -> Self {
        let vals = [lhs, rhs, residual, tolerance];
        let finite = vals.iter().all(|x| x.is_finite());
        let clean = |x: f64| if x.is_finite() { x } else { f64::MAX };
        CheckRecord {
            id: id.into(),
            anchor: anchor.into(),
            lhs: clean(lhs),
            rhs: clean(rhs),
            residual: clean(residual),
            tolerance: clean(tolerance),
            verdict: verdict && finite,
            refinement_history: Vec::new(),
            orders: Vec::new(),
            note: if finite { None } else { Some("non-finite value".into()) },
        }
    }

    /// Attach a refinement history and derive the observed orders from it.
    pub fn history(mut self, steps: Vec<RefinementStep>) -> Self {
        self.orders = observed_orders(&steps.iter().map(|s| s.value).collect::<Vec<_>>());
        self.refinement_history = steps
            .into_iter()
            .map(|s| RefinementStep { resolution: s.resolution, value: if s.value.is_finite() { s.value } else { f64::MAX } })
            .collect();
        self
    }

    pub fn note(mut self, note: impl Into<String>) -> Self {
        let n = note.into();
        self.note = Some(match self.note.take() {
            Some(prev) => format!("{prev}; {n}"),
            None => n,
        });
        self
    }
}

/// `log₂(e_k / e_{k+1})` for consecutive errors under halving of the mesh width.
pub fn observed_orders(errors: &[f64]) -> Vec<Option<f64>> {
    errors
        .windows(2)
        .map(|w| {
            let o = (w[0].abs() / w[1].abs()).log2();
            o.is_finite().then_some(o)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Provenance {
    pub scenario_sha256: String,
    pub seed: u64,
    pub version: String,
}

impl Provenance {
    pub fn new(scenario_text: &str, seed: u64) -> Self {
        Provenance {
            scenario_sha256: hex::encode(Sha256::digest(scenario_text.as_bytes())),
            seed,
            version: env!("CARGO_PKG_VERSION").to_string(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerificationReport {
    pub scenario: String,
    pub suite: Suite,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
    pub provenance: Provenance,
    /// `(t₀, φ, slice second-form norm)` rows from the intersection suite.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub intersection_rows: Vec<[f64; 3]>,
}

impl VerificationReport {
    pub fn new(scenario: String, suite: Suite, checks: Vec<CheckRecord>, provenance: Provenance) -> Self {
        let pass = checks.iter().all(|c| c.verdict);
        VerificationReport { scenario, suite, checks, pass, provenance, intersection_rows: Vec::new() }
    }

    pub fn to_json(&self) -> String {
        let mut s = serde_json::to_string_pretty(self).expect("report fields are plain data");
        s.push('\n');
        s
    }

    pub fn from_json(s: &str) -> serde_json::Result<Self> {
        serde_json::from_str(s)
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.verdict)
    }

    /// `check,step,resolution,value,order` for every check with a history.
    pub fn refinement_csv(&self) -> String {
        let mut out = String::from("check,step,resolution,value,order\n");
        for c in &self.checks {
            for (k, s) in c.refinement_history.iter().enumerate() {
                let order = k
                    .checked_sub(1)
                    .and_then(|i| c.orders.get(i).copied().flatten())
                    .map_or(String::new(), |o| o.to_string());
                let _ = writeln!(out, "{},{},{},{},{}", c.id, k, s.resolution, s.value, order);
            }
        }
        out
    }

    /// `id,lhs,rhs,residual,tolerance,verdict`
    pub fn summary_csv(&self) -> String {
        let mut out = String::from("id,lhs,rhs,residual,tolerance,verdict\n");
        for c in &self.checks {
            let _ = writeln!(out, "{},{},{},{},{},{}", c.id, c.lhs, c.rhs, c.residual, c.tolerance, c.verdict);
        }
        out
    }

    /// `t0,phi,slice_form_norm`
    pub fn intersection_csv(&self) -> String {
        let mut out = String::from("t0,phi,slice_form_norm\n");
        for [t0, phi, norm] in &self.intersection_rows {
            let _ = writeln!(out, "{t0},{phi},{norm}");
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn non_finite_values_fail_and_serialize() {
        let c = CheckRecord::new("x", "a", f64::NAN, 1.0, f64::INFINITY, 1.0);
        assert!(!c.verdict);
        let r = VerificationReport::new("s".into(), Suite::All, vec![c], Provenance::new("{}", 0));
        assert!(!r.pass);
        assert_eq!(VerificationReport::from_json(&r.to_json()).unwrap(), r);
    }

    #[test]
    fn orders_skip_vanishing_errors() {
        assert_eq!(observed_orders(&[4.0, 1.0, 0.0]), vec![Some(2.0), None]);
    }

    #[test]
    fn refinement_csv_lists_orders() {
        let c = CheckRecord::new("c", "a", 0.0, 0.0, 0.0, 1.0).history(vec![
            RefinementStep { resolution: 8.0, value: 0.4 },
            RefinementStep { resolution: 16.0, value: 0.1 },
        ]);
        let r = VerificationReport::new("s".into(), Suite::All, vec![c], Provenance::new("{}", 0));
        assert_eq!(r.refinement_csv(), "check,step,resolution,value,order\nc,0,8,0.4,\nc,1,16,0.1,2\n");
    }
}
