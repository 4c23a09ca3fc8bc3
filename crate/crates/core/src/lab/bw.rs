//! Reparametrized closeness for the geodesic flow.

use std::f64::consts::SQRT_2;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::reparam::Reparametrization;
use super::horocycle::clamp_note;
use super::tube::{self, Stay, Tube, GEODESIC_HORIZON};
use super::{aggregate, elapsed, Experiment, Outcome, TestVerdict, Witness, DEFAULT_GRID_STEP};
use crate::error::{Error, Result};
use crate::flows::FlowKind;
use crate::fuchsian::{CosetVerdict, FuchsianGroup};
use crate::metric::{AlgebraVector, GroupMetric};
use crate::sampling;
use crate::sl2::GroupElement;

/// Distance kept between δ and `σ₀/4`.
pub const DELTA_MARGIN: f64 = 1e-3;
/// Off-diagonal size below which `K` counts as diagonal.
pub const DIAGONAL_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BwDelta {
    pub eps: f64,
    /// `e^{ε/2} − e^{−ε/2}`, the Frobenius gap of `a_ε`.
    pub eps0: f64,
    pub calibrated: f64,
    /// `σ₀/4 − margin`.
    pub cap: f64,
    pub delta: f64,
}

/// δ such that a δ-close reparametrized pair ends on a common geodesic
/// orbit with shift below ε.
pub fn bw_delta_for_epsilon(group: &FuchsianGroup, metric: &GroupMetric, eps: f64) -> Result<BwDelta> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let eps0 = (eps / 2.0).exp() - (-eps / 2.0).exp();
    let calibrated = metric.calibrate_distance_to_gap(eps0)?;
    let cap = group.injectivity_radius()? / 4.0 - DELTA_MARGIN;
    Ok(BwDelta {
        eps,
        eps0,
        calibrated,
        cap,
        delta: calibrated.min(cap),
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct BwOptions {
    pub eps: f64,
    pub window: f64,
    /// On-orbit pairs; the same number of off-orbit pairs is drawn.
    pub pairs: usize,
    pub reparams: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub knot_spacing: f64,
    /// Passing experiments kept as witnesses.
    pub examples: usize,
}

impl Default for BwOptions {
    fn default() -> Self {
        BwOptions {
            eps: 0.5,
            window: 20.0,
            pairs: 50,
            reparams: 10,
            seed: 42,
            grid_step: DEFAULT_GRID_STEP,
            knot_spacing: 2.5,
            examples: 5,
        }
    }
}

struct Case {
    pair: usize,
    label: String,
    x: GroupElement,
    y: GroupElement,
    tau: Option<f64>,
    reparam: Reparametrization,
    /// Whether closeness is guaranteed by construction.
    must_stay: bool,
}

fn cases(group: &FuchsianGroup, o: &BwOptions, delta: f64) -> Vec<Case> {
    let tau_max = 0.9 * o.eps.min(SQRT_2 * delta);
    let letters = group.letters();
    let mut out = Vec::new();
    for pair in 0..2 * o.pairs {
        let mut rng = sampling::rng(o.seed, pair as u64);
        let x = sampling::random_element(&mut rng, 2.0);
        let gamma = match rng.gen_range(0..=letters.len()) {
            0 => GroupElement::IDENTITY,
            k => letters[k - 1],
        };
        let on_orbit = pair < o.pairs;
        let (kind, y, tau, slack) = if on_orbit {
            let tau = rng.gen_range(-tau_max..=tau_max);
            ("shift", gamma.mul(&x).mul(&GroupElement::a(tau)), Some(tau), SQRT_2 * delta - tau.abs())
        } else {
            let u = rng.gen_range(0.2..1.0) * delta * if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let (kind, offset) = match pair % 3 {
                0 => ("stable-offset", GroupElement::b(u)),
                1 => ("unstable-offset", GroupElement::c(u)),
                _ => ("generic-offset", (AlgebraVector::random_unit(&mut rng) * u.abs()).exp()),
            };
            (kind, gamma.mul(&x).mul(&offset), None, SQRT_2 * delta)
        };
        for r in 0..o.reparams {
            let (family, reparam) = match r {
                0 => ("identity", Reparametrization::identity()),
                r if r % 2 == 1 => (
                    "wiggle",
                    Reparametrization::wiggle(&mut rng, o.window, o.knot_spacing, 0.5 * slack),
                ),
                _ => ("random", Reparametrization::random(&mut rng, o.window, o.knot_spacing)),
            };
            out.push(Case {
                pair,
                label: format!("{kind}/{family}"),
                x,
                y,
                tau,
                must_stay: on_orbit && family != "random",
                reparam,
            });
        }
    }
    out
}

fn run_case(group: &FuchsianGroup, metric: &GroupMetric, o: &BwOptions, delta: f64, c: &Case) -> Experiment {
    let grid = tube::time_grid(o.window, o.grid_step, true, true);
    let sweeps: Vec<Vec<tube::GridPoint>> = grid
        .iter()
        .map(|s| s.iter().map(|&t| (t, t, c.reparam.eval(t))).collect())
        .collect();
    let mut w = Witness::new(c.label.clone(), Outcome::Pass, &c.x, &c.y);
    if c.reparam != Reparametrization::identity() {
        w.reparametrization = Some(c.reparam.knots().to_vec());
    }
    if let Some(tau) = c.tau {
        w = w.value("tau", tau);
    }
    let walked = match tube::walk(group, metric, FlowKind::Geodesic, &c.x, &c.y, &sweeps, delta) {
        Ok(t) => t,
        Err(e) => {
            w.outcome = Outcome::Inconclusive;
            w.note = format!("budget: {e}");
            return Experiment {
                class: "inconclusive",
                outcome: Outcome::Inconclusive,
                witness: w,
                radius: None,
            };
        }
    };
    match walked {
        Tube::Exited {
            t,
            lower_bound,
            radius_used,
        } => {
            w = w.value("exit_time", t).value("exit_lower_bound", lower_bound);
            if c.must_stay {
                w.outcome = Outcome::Fail;
                w.note = "pair on a common orbit within the recipe bound left the tube".into();
                Experiment {
                    class: "failed",
                    outcome: Outcome::Fail,
                    witness: w,
                    radius: Some(radius_used),
                }
            } else {
                Experiment {
                    class: "exited",
                    outcome: Outcome::Pass,
                    witness: w,
                    radius: Some(radius_used),
                }
            }
        }
        Tube::Stayed(s) => recover(group, o, delta, c, s, w),
    }
}

fn recover(group: &FuchsianGroup, o: &BwOptions, delta: f64, c: &Case, s: Stay, mut w: Witness) -> Experiment {
    let k = s.k;
    w.gamma = Some(s.gamma0.gamma_word.to_ascii());
    w.k = Some(k.entries());
    w = w
        .value("max_distance", s.max_distance)
        .value("consistency", s.consistency)
        .value("margin", delta - s.max_distance);
    let radius = Some(s.radius_used);
    let done = |w: Witness, class, outcome| Experiment {
        class,
        outcome,
        witness: Witness { outcome, ..w },
        radius,
    };
    if let Some(t) = s.gamma_jump {
        w.note = format!("group element changed at t = {t} while the pair stayed close");
        return done(w.value("gamma_jump", t), "failed", Outcome::Fail);
    }
    if k.a12.abs() > DIAGONAL_TOL || k.a21.abs() > DIAGONAL_TOL {
        w.note = "stayed close on the window without lying on a common orbit; a longer window separates it".into();
        let outcome = if c.tau.is_some() { Outcome::Fail } else { Outcome::Inconclusive };
        let class = if c.tau.is_some() { "failed" } else { "inconclusive" };
        return done(w, class, outcome);
    }
    let tau_rec = 2.0 * k.a11.ln();
    w = w.value("tau_recovered", tau_rec);
    let confirmed = group.same_coset(&c.x.mul(&GroupElement::a(tau_rec)), &c.y);
    let mut problems = Vec::new();
    if !(tau_rec.abs() < o.eps) {
        problems.push("recovered shift is not below eps");
    }
    if !matches!(confirmed, CosetVerdict::Same { .. }) {
        problems.push("coset check does not confirm the recovered orbit");
    }
    match c.tau {
        Some(tau) if (tau_rec - tau).abs() >= 1e-3 => problems.push("recovered shift differs from the constructed one"),
        None => problems.push("pair built off the orbit was recovered onto it"),
        _ => {}
    }
    if problems.is_empty() {
        done(w, "recovered", Outcome::Pass)
    } else {
        w.note = problems.join("; ");
        done(w, "failed", Outcome::Fail)
    }
}

/// Samples on-orbit and off-orbit pairs with several reparametrizations and
/// runs the orbit recovery on every pair that stays δ-close on the window.
pub fn bw_test_geodesic(group: &FuchsianGroup, metric: &GroupMetric, o: &BwOptions) -> Result<TestVerdict> {
    if !(o.window > 0.0) || o.reparams == 0 {
        return Err(Error::InvalidArgument("window must be positive and reparams at least 1".into()));
    }
    let start = Instant::now();
    let requested = o.window;
    let o = &BwOptions {
        window: o.window.min(GEODESIC_HORIZON),
        ..o.clone()
    };
    let d = bw_delta_for_epsilon(group, metric, o.eps)?;
    let cases = cases(group, o, d.delta);
    let results: Vec<Experiment> = cases.par_iter().map(|c| run_case(group, metric, o, d.delta, c)).collect();

    let mut v = TestVerdict::new("bw-geodesic", o.seed);
    for (k, x) in [
        ("eps", d.eps),
        ("eps0", d.eps0),
        ("delta", d.delta),
        ("delta_calibrated", d.calibrated),
        ("delta_cap", d.cap),
        ("window", o.window),
        ("grid_step", o.grid_step),
        ("pairs", o.pairs as f64),
        ("reparams", o.reparams as f64),
    ] {
        v.param(k, x);
    }
    let mut recovered = vec![false; 2 * o.pairs];
    for (c, r) in cases.iter().zip(&results) {
        recovered[c.pair] |= r.class == "recovered";
    }
    v.counts.insert("on_orbit_pairs".into(), o.pairs);
    v.counts
        .insert("on_orbit_pairs_recovered".into(), recovered[..o.pairs].iter().filter(|r| **r).count());
    v.counts.insert("off_orbit_pairs".into(), o.pairs);
    v.counts.insert("false_same_orbit".into(), recovered[o.pairs..].iter().filter(|r| **r).count());
    aggregate(&mut v, results, o.examples);
    if o.window < requested {
        v.notes.push(clamp_note(requested));
    }
    v.notes.push(format!(
        "closeness sampled every {} on [-{w}, {w}]; the conclusion holds at this resolution only",
        o.grid_step,
        w = o.window
    ));
    v.timing = elapsed(start);
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricConfig;

    #[test]
    fn delta_recipe() {
        let g = FuchsianGroup::preset_bolza();
        let m = GroupMetric::new(MetricConfig::default()).unwrap();
        let d1 = bw_delta_for_epsilon(&g, &m, 1.0).unwrap();
        assert!((d1.eps0 - 1.0422).abs() < 1e-4);
        let mut last = 0.0;
        for eps in [0.05, 0.1, 0.25, 0.5, 1.0, 2.0, 8.0] {
            let d = bw_delta_for_epsilon(&g, &m, eps).unwrap();
            assert!(d.delta < g.injectivity_radius().unwrap() / 4.0);
            assert!(d.delta >= last);
            last = d.delta;
        }
        assert!(bw_delta_for_epsilon(&g, &m, 0.0).is_err());
    }

    #[test]
    fn small_campaign_passes() {
        let g = FuchsianGroup::preset_bolza();
        let m = GroupMetric::new(MetricConfig::default()).unwrap();
        let o = BwOptions {
            window: 5.0,
            pairs: 3,
            reparams: 3,
            seed: 3,
            ..BwOptions::default()
        };
        let v = bw_test_geodesic(&g, &m, &o).unwrap();
        assert_eq!(v.outcome, Outcome::Pass, "{}", v.to_json().unwrap());
        assert_eq!(v.counts["on_orbit_pairs_recovered"], 3);
        assert_eq!(v.counts["false_same_orbit"], 0);
    }
}
