//! Seeded experiments for the expansiveness properties of the geodesic and
//! horocycle flows, and constructors for the two counterexamples.
//!
//! "For all t" is replaced by a finite grid over a window. Pairs that leave
//! the δ-tube somewhere on the grid make no claim; pairs that stay inside
//! go through the orbit recovery of the corresponding proof and must end on
//! a common orbit with the predicted shift.

mod bw;
mod counterexamples;
mod horocycle;
mod reparam;
mod tube;

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;

use serde::{Deserialize, Serialize};

use crate::error::Result;
use crate::sl2::GroupElement;

pub use bw::{bw_delta_for_epsilon, bw_test_geodesic, BwDelta, BwOptions};
pub use counterexamples::{
    counterexample_geodesic_not_separating, counterexample_horocycle_not_bw, counterexample_horocycle_not_bw_with,
    DecayRow, GeodesicSepCertificate, HorocycleBwCertificate, NonOrbitSearch, ResidualRow,
};
pub use horocycle::{
    kh_test_horocycle, kinematic_rho, kinematic_test_time_change, separating_test, Direction, KhOptions, KinematicOptions,
    SeparatingOptions,
};
pub use reparam::Reparametrization;

/// Spacing of the time grid on which closeness is sampled.
pub const DEFAULT_GRID_STEP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Outcome {
    Pass,
    Fail,
    Inconclusive,
}

impl Outcome {
    /// 0 pass, 1 fail, 2 inconclusive.
    pub fn exit_code(self) -> i32 {
        match self {
            Outcome::Pass => 0,
            Outcome::Fail => 1,
            Outcome::Inconclusive => 2,
        }
    }

    /// Fail dominates inconclusive, which dominates pass.
    pub fn combine(self, other: Outcome) -> Outcome {
        use Outcome::*;
        match (self, other) {
            (Fail, _) | (_, Fail) => Fail,
            (Inconclusive, _) | (_, Inconclusive) => Inconclusive,
            _ => Pass,
        }
    }
}

impl fmt::Display for Outcome {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Outcome::Pass => "pass",
            Outcome::Fail => "fail",
            Outcome::Inconclusive => "inconclusive",
        })
    }
}

/// One reproducible experiment record.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    pub label: String,
    pub outcome: Outcome,
    pub x: [f64; 4],
    pub y: [f64; 4],
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub reparametrization: Option<Vec<(f64, f64)>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub gamma: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub k: Option<[f64; 4]>,
    pub values: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "String::is_empty")]
    pub note: String,
}

impl Witness {
    pub fn new(label: impl Into<String>, outcome: Outcome, x: &GroupElement, y: &GroupElement) -> Self {
        Witness {
            label: label.into(),
            outcome,
            x: x.entries(),
            y: y.entries(),
            reparametrization: None,
            gamma: None,
            k: None,
            values: BTreeMap::new(),
            note: String::new(),
        }
    }

    pub fn value(mut self, key: &str, v: f64) -> Self {
        self.values.insert(key.to_string(), v);
        self
    }
}

/// Structured result of an experiment campaign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TestVerdict {
    pub test: String,
    pub outcome: Outcome,
    pub seed: u64,
    pub params: BTreeMap<String, f64>,
    pub counts: BTreeMap<String, usize>,
    pub witnesses: Vec<Witness>,
    pub ball_radii_used: Vec<f64>,
    pub notes: Vec<String>,
    /// Wall-clock information; the only field that varies between replays.
    pub timing: String,
}

impl TestVerdict {
    pub fn new(test: impl Into<String>, seed: u64) -> Self {
        TestVerdict {
            test: test.into(),
            outcome: Outcome::Pass,
            seed,
            params: BTreeMap::new(),
            counts: BTreeMap::new(),
            witnesses: Vec::new(),
            ball_radii_used: Vec::new(),
            notes: Vec::new(),
            timing: String::new(),
        }
    }

    pub fn param(&mut self, key: &str, v: f64) {
        self.params.insert(key.to_string(), v);
    }

    pub fn count(&mut self, key: &str) {
        *self.counts.entry(key.to_string()).or_insert(0) += 1;
    }

    pub fn record(&mut self, outcome: Outcome) {
        self.outcome = self.outcome.combine(outcome);
    }

    pub fn note_radius(&mut self, r: f64) {
        if !self.ball_radii_used.iter().any(|x| (x - r).abs() < 1e-12) {
            self.ball_radii_used.push(r);
            self.ball_radii_used.sort_by(f64::total_cmp);
        }
    }

    /// Pretty JSON; `timing` sits on a line of its own.
    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{}", self.to_json()?)?;
        Ok(())
    }

    /// The JSON text with the timing line removed, for replay comparison.
    pub fn replay_text(json: &str) -> String {
        json.lines()
            .filter(|l| !l.trim_start().starts_with("\"timing\""))
            .collect::<Vec<_>>()
            .join("\n")
    }
}

/// Result of one experiment before aggregation.
#[derive(Debug, Clone)]
pub(crate) struct Experiment {
    /// Counter bumped in the verdict, e.g. `recovered` or `exited`.
    pub class: &'static str,
    pub outcome: Outcome,
    pub witness: Witness,
    pub radius: Option<f64>,
}

/// Folds experiment results into `verdict`: every non-passing experiment
/// contributes its witness, passing ones only the first `examples`.
pub(crate) fn aggregate(verdict: &mut TestVerdict, results: Vec<Experiment>, examples: usize) {
    let mut shown = 0;
    for r in results {
        verdict.count("experiments");
        verdict.count(r.class);
        verdict.record(r.outcome);
        if let Some(radius) = r.radius {
            verdict.note_radius(radius);
        }
        if r.outcome != Outcome::Pass || (r.class != "exited" && shown < examples) {
            if r.outcome == Outcome::Pass {
                shown += 1;
            }
            verdict.witnesses.push(r.witness);
        }
    }
}

pub(crate) fn elapsed(start: std::time::Instant) -> String {
    format!("elapsed_ms={}", start.elapsed().as_millis())
}
