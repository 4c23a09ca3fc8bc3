//! Separating, kinematic and KH experiments.
//!
//! A pair that stays close along the horocycle flow has `K = (γx)⁻¹y` with
//! `k21 = 0`; its trace is then below `2 + ε★`, which rules out every
//! non-trivial `γ`, and `K = b_σ` puts `y` on the horocycle through `x`.

use std::f64::consts::SQRT_2;
use std::fmt;
use std::time::Instant;

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::bw::{DELTA_MARGIN, DIAGONAL_TOL};
use super::counterexamples::non_orbit_search;
use super::reparam::Reparametrization;
use super::tube::{self, GridPoint, Stay, Tube, GEODESIC_HORIZON};
use super::{aggregate, elapsed, Experiment, Outcome, TestVerdict, Witness, DEFAULT_GRID_STEP};
use crate::error::{Error, Result};
use crate::flows::{FlowKind, TimeChange};
use crate::fuchsian::{CosetVerdict, FuchsianGroup, QuotientPoint};
use crate::metric::{AlgebraVector, GroupMetric};
use crate::sampling;
use crate::sl2::{GroupElement, Matrix2};

/// Tolerance on `k21` and on `k11 = k22 = 1` for a recovered horocycle shift.
pub const SHIFT_TOL: f64 = 1e-6;
/// Grid of base times on which α is sampled when choosing ρ.
const ALPHA_TIMES: [f64; 6] = [0.02, 0.05, 0.1, 0.2, 0.5, 1.0];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Direction {
    Positive,
    Negative,
}

impl Direction {
    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "positive" | "pos" | "+" => Ok(Direction::Positive),
            "negative" | "neg" | "-" => Ok(Direction::Negative),
            _ => Err(Error::Parse(format!("unknown direction `{s}` (expected positive or negative)"))),
        }
    }

    fn sign(self) -> f64 {
        match self {
            Direction::Positive => 1.0,
            Direction::Negative => -1.0,
        }
    }
}

impl fmt::Display for Direction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Direction::Positive => "positive",
            Direction::Negative => "negative",
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SeparatingOptions {
    pub flow: FlowKind,
    pub delta: f64,
    pub direction: Direction,
    pub window: f64,
    pub pairs: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub examples: usize,
    /// Ball radius for the non-orbit search on close pairs of the geodesic flow.
    pub cert_radius: f64,
}

impl Default for SeparatingOptions {
    fn default() -> Self {
        SeparatingOptions {
            flow: FlowKind::StableHorocycle,
            delta: 0.1,
            direction: Direction::Positive,
            window: 30.0,
            pairs: 50,
            seed: 42,
            grid_step: DEFAULT_GRID_STEP,
            examples: 5,
            cert_radius: 8.0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KinematicOptions {
    pub eps: f64,
    pub direction: Direction,
    pub window: f64,
    pub pairs: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub examples: usize,
    /// Random points at which α is sampled when choosing ρ.
    pub alpha_samples: usize,
}

impl Default for KinematicOptions {
    fn default() -> Self {
        KinematicOptions {
            eps: 0.25,
            direction: Direction::Positive,
            window: 30.0,
            pairs: 50,
            seed: 42,
            grid_step: DEFAULT_GRID_STEP,
            examples: 5,
            alpha_samples: 32,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct KhOptions {
    pub delta: f64,
    pub window: f64,
    pub triples: usize,
    pub seed: u64,
    pub grid_step: f64,
    pub knot_spacing: f64,
    pub examples: usize,
}

impl Default for KhOptions {
    fn default() -> Self {
        KhOptions {
            delta: 0.05,
            window: 20.0,
            triples: 50,
            seed: 42,
            grid_step: DEFAULT_GRID_STEP,
            knot_spacing: 2.5,
            examples: 5,
        }
    }
}

/// Largest δ for which the trace argument and the constancy of `γ` apply.
fn delta_cap(group: &FuchsianGroup, metric: &GroupMetric) -> Result<f64> {
    let eps_star = group.trace_gap()?;
    Ok(metric
        .calibrate_distance_to_gap(eps_star)?
        .min(group.injectivity_radius()? / 4.0 - DELTA_MARGIN))
}

/// ρ with `|α(t, x)| < ε` for `|t| < ρ`: the largest sampled ratio
/// `|α(t, x)|/|t|`, with a safety factor 2.
pub fn kinematic_rho(tc: &TimeChange, eps: f64, samples: usize, seed: u64) -> Result<f64> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(Error::InvalidArgument(format!("eps must be positive, got {eps}")));
    }
    let mut rng = sampling::rng(seed, 0x616c);
    let mut ratio: f64 = 0.0;
    for _ in 0..samples.max(1) {
        let x = QuotientPoint::new(sampling::random_element(&mut rng, 3.0));
        for t in ALPHA_TIMES {
            for s in [t, -t] {
                ratio = ratio.max(tc.alpha(&x, s).abs() / t);
            }
        }
    }
    if !(ratio > 0.0 && ratio.is_finite()) {
        return Err(Error::InvalidArgument(format!("alpha sampling failed (ratio {ratio})")));
    }
    Ok(eps / (2.0 * ratio))
}

pub(crate) fn clamp_note(requested: f64) -> String {
    format!("window {requested} reduced to {GEODESIC_HORIZON}: floating-point rounding grows like e^|t| along the geodesic flow")
}

struct Campaign<'a> {
    flow: FlowKind,
    tc: Option<&'a TimeChange>,
    delta: f64,
    direction: Direction,
    window: f64,
    grid_step: f64,
    cert_radius: f64,
    /// `(ρ, ε)` for the kinematic shift bounds.
    bounds: Option<(f64, f64)>,
}

struct Case {
    label: String,
    x: GroupElement,
    y: GroupElement,
    /// Constructed shift along the flow when the pair shares an orbit.
    shift: Option<f64>,
}

fn separating_cases(group: &FuchsianGroup, c: &Campaign, pairs: usize, seed: u64) -> Vec<Case> {
    let letters = group.letters();
    let slow = c.tc.map_or(1.0, |tc| tc.rho_min / tc.rho_max);
    (0..2 * pairs)
        .map(|i| {
            let mut rng = sampling::rng(seed, i as u64);
            let x = sampling::random_element(&mut rng, 2.0);
            let gamma = match rng.gen_range(0..=letters.len()) {
                0 => GroupElement::IDENTITY,
                k => letters[k - 1],
            };
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            if i < pairs {
                // on the orbit, close enough to stay inside the tube
                let bound = match c.flow {
                    FlowKind::Geodesic => SQRT_2 * c.delta,
                    _ => c.delta * slow,
                };
                let s = 0.9 * bound * rng.gen_range(0.0..1.0) * sign;
                Case {
                    label: "shift".into(),
                    x,
                    y: gamma.mul(&x).mul(&c.flow.element(s)),
                    shift: Some(s),
                }
            } else {
                let u = rng.gen_range(0.5..1.0) * c.delta * sign;
                let others: Vec<FlowKind> = [FlowKind::Geodesic, FlowKind::StableHorocycle, FlowKind::UnstableHorocycle]
                    .into_iter()
                    .filter(|k| *k != c.flow)
                    .collect();
                let (label, offset) = match i % 3 {
                    0 => (format!("{}-offset", others[0]), others[0].element(u)),
                    1 => (format!("{}-offset", others[1]), others[1].element(u)),
                    _ => ("generic-offset".to_string(), (AlgebraVector::random_unit(&mut rng) * u.abs()).exp()),
                };
                Case {
                    label,
                    x,
                    y: gamma.mul(&x).mul(&offset),
                    shift: None,
                }
            }
        })
        .collect()
}

fn base_times(tc: Option<&TimeChange>, x: &GroupElement, grid: &[f64]) -> Vec<f64> {
    match tc {
        Some(tc) => tc.base_times(&QuotientPoint::new(*x), grid),
        None => grid.to_vec(),
    }
}

fn budget(mut w: Witness, e: Error) -> Experiment {
    w.outcome = Outcome::Inconclusive;
    w.note = format!("budget: {e}");
    Experiment {
        class: "inconclusive",
        outcome: Outcome::Inconclusive,
        witness: w,
        radius: None,
    }
}

fn finish(mut w: Witness, class: &'static str, outcome: Outcome, note: String, radius: f64) -> Experiment {
    w.outcome = outcome;
    w.note = note;
    Experiment {
        class,
        outcome,
        witness: w,
        radius: Some(radius),
    }
}

/// Reads `K = b_σ` off a matrix with `k21 = 0` and trace below `2 + ε★`.
fn horocycle_shift(k: &Matrix2, eps_star: f64) -> std::result::Result<f64, String> {
    let mut problems = Vec::new();
    if k.a21.abs() >= SHIFT_TOL {
        problems.push(format!("k21 = {:e} is not zero", k.a21));
    }
    if (k.a11 + k.a22).abs() >= 2.0 + eps_star {
        problems.push(format!("trace {} reaches 2 + eps*", (k.a11 + k.a22).abs()));
    }
    if (k.a11 - 1.0).abs() >= SHIFT_TOL || (k.a22 - 1.0).abs() >= SHIFT_TOL {
        problems.push("diagonal of K is not the identity".into());
    }
    if problems.is_empty() {
        Ok(k.a12)
    } else {
        Err(problems.join("; "))
    }
}

fn run_separating(group: &FuchsianGroup, metric: &GroupMetric, c: &Campaign, case: &Case) -> Experiment {
    let grid = &tube::time_grid(c.window, c.grid_step, c.direction == Direction::Positive, c.direction == Direction::Negative)[0];
    let bx = base_times(c.tc, &case.x, grid);
    let by = base_times(c.tc, &case.y, grid);
    let sweep: Vec<GridPoint> = grid.iter().zip(bx.iter().zip(&by)).map(|(&t, (&p, &q))| (t, p, q)).collect();
    let mut w = Witness::new(case.label.clone(), Outcome::Pass, &case.x, &case.y);
    if let Some(s) = case.shift {
        w = w.value("shift", s);
    }
    let walked = match tube::walk(group, metric, c.flow, &case.x, &case.y, std::slice::from_ref(&sweep), c.delta) {
        Ok(t) => t,
        Err(e) => return budget(w, e),
    };
    let s = match walked {
        Tube::Exited {
            t,
            lower_bound,
            radius_used,
        } => {
            w = w.value("exit_time", t).value("exit_lower_bound", lower_bound);
            return if case.shift.is_some() {
                finish(w, "failed", Outcome::Fail, "pair on a common orbit left the tube".into(), radius_used)
            } else {
                finish(w, "exited", Outcome::Pass, String::new(), radius_used)
            };
        }
        Tube::Stayed(s) => s,
    };
    w.gamma = Some(s.gamma0.gamma_word.to_ascii());
    w.k = Some(s.k.entries());
    w = w
        .value("max_distance", s.max_distance)
        .value("consistency", s.consistency)
        .value("margin", c.delta - s.max_distance);
    if let Some(t) = s.gamma_jump {
        let note = format!("group element changed at t = {t} while the pair stayed close");
        return finish(w.value("gamma_jump", t), "failed", Outcome::Fail, note, s.radius_used);
    }
    match c.flow {
        FlowKind::Geodesic => recover_geodesic(group, c, case, &s, w),
        _ => recover_horocycle(group, c, case, &s, &sweep, w),
    }
}

fn recover_horocycle(
    group: &FuchsianGroup,
    c: &Campaign,
    case: &Case,
    s: &Stay,
    sweep: &[GridPoint],
    mut w: Witness,
) -> Experiment {
    let eps_star = match group.trace_gap() {
        Ok(e) => e,
        Err(e) => return budget(w, e),
    };
    let k = &s.k;
    w = w.value("k21", k.a21).value("trace_k", (k.a11 + k.a22).abs());
    let sigma = match horocycle_shift(k, eps_star) {
        Ok(sigma) => sigma,
        Err(why) => {
            let (class, outcome) = if case.shift.is_some() {
                ("failed", Outcome::Fail)
            } else {
                ("inconclusive", Outcome::Inconclusive)
            };
            let note = format!("stayed close on the window without a recovered shift: {why}");
            return finish(w, class, outcome, note, s.radius_used);
        }
    };
    w = w.value("shift_recovered", sigma);
    let mut problems = Vec::new();
    if !group.same_coset(&case.x.mul(&c.flow.element(sigma)), &case.y).is_same() {
        problems.push("coset check does not confirm the recovered orbit".to_string());
    }
    match case.shift {
        Some(s0) if (sigma - s0).abs() >= SHIFT_TOL => problems.push("recovered shift differs from the constructed one".into()),
        None => problems.push("pair built off the orbit was recovered onto it".into()),
        _ => {}
    }
    if let (Some((rho, eps)), Some(tc)) = (c.bounds, c.tc) {
        // base-time offset between the two orbits along the grid
        let drift = sweep.iter().map(|&(_, p, q)| (q + sigma - p).abs()).fold(0.0, f64::max);
        let r = tc.alpha(&QuotientPoint::new(case.x), sigma);
        w = w.value("base_time_offset", drift).value("r", r);
        if sigma.abs() >= rho {
            problems.push(format!("shift {sigma} is not below rho = {rho}"));
        }
        if drift >= rho {
            problems.push(format!("base-time offset {drift} is not below rho = {rho}"));
        }
        if r.abs() >= eps {
            problems.push(format!("new-time shift {r} is not below eps = {eps}"));
        }
    }
    if problems.is_empty() {
        finish(w, "recovered", Outcome::Pass, String::new(), s.radius_used)
    } else {
        finish(w, "failed", Outcome::Fail, problems.join("; "), s.radius_used)
    }
}

fn recover_geodesic(group: &FuchsianGroup, c: &Campaign, case: &Case, s: &Stay, w: Witness) -> Experiment {
    let k = &s.k;
    if k.a12.abs() <= DIAGONAL_TOL && k.a21.abs() <= DIAGONAL_TOL {
        let tau = 2.0 * k.a11.ln();
        let w = w.value("tau_recovered", tau);
        let confirmed = group.same_coset(&case.x.mul(&GroupElement::a(tau)), &case.y).is_same();
        let truth_ok = case.shift.is_some_and(|s0| (tau - s0).abs() < 1e-3);
        return if confirmed && truth_ok {
            finish(w, "recovered", Outcome::Pass, String::new(), s.radius_used)
        } else {
            finish(w, "failed", Outcome::Fail, "recovered geodesic shift not confirmed".into(), s.radius_used)
        };
    }
    if case.shift.is_some() {
        return finish(w, "failed", Outcome::Fail, "on-orbit pair gave a non-diagonal K".into(), s.radius_used);
    }
    match non_orbit_search(group, &case.x, &case.y, c.cert_radius) {
        Ok(cert) if cert.certified => {
            let note = format!(
                "separation fails: the pair stays within {} for all sampled t in the {} direction, yet no element of the ball of radius {} puts y on the geodesic through x",
                c.delta, c.direction, cert.radius
            );
            let w = w
                .value("cert_radius", cert.radius)
                .value("cert_ball_size", cert.ball_size as f64)
                .value("cert_min_offdiagonal", cert.min_offdiagonal);
            finish(w, "separation-failure", Outcome::Fail, note, s.radius_used.max(cert.radius))
        }
        Ok(cert) => {
            let note = format!("close pair with a diagonal candidate in the ball of radius {}", cert.radius);
            finish(w, "inconclusive", Outcome::Inconclusive, note, s.radius_used)
        }
        Err(e) => budget(w, e),
    }
}

fn campaign_verdict(
    name: &str,
    group: &FuchsianGroup,
    metric: &GroupMetric,
    c: &Campaign,
    pairs: usize,
    seed: u64,
    examples: usize,
) -> Result<TestVerdict> {
    let start = Instant::now();
    let cases = separating_cases(group, c, pairs, seed);
    let results: Vec<Experiment> = cases.par_iter().map(|case| run_separating(group, metric, c, case)).collect();
    let mut v = TestVerdict::new(name, seed);
    v.param("delta", c.delta);
    v.param("window", c.window);
    v.param("grid_step", c.grid_step);
    v.param("pairs", pairs as f64);
    v.param("direction", c.direction.sign());
    v.param("trace_gap", group.trace_gap()?);
    if let Some((rho, eps)) = c.bounds {
        v.param("rho", rho);
        v.param("eps", eps);
    }
    if let Some(tc) = c.tc {
        v.param("rho_min", tc.rho_min);
        v.param("rho_max", tc.rho_max);
        v.notes.push(format!("time change {}", tc.label));
    }
    v.notes.push(format!("flow {}, {} direction", c.flow, c.direction));
    let failures = results.iter().filter(|r| r.class == "separation-failure").count();
    aggregate(&mut v, results, examples);
    if failures > 0 {
        v.notes.push(format!(
            "{failures} pairs stay close in the {} direction without sharing an orbit",
            c.direction
        ));
    }
    v.notes.push(format!(
        "closeness sampled every {} over a window of length {}; the conclusion holds at this resolution only",
        c.grid_step, c.window
    ));
    v.timing = elapsed(start);
    Ok(v)
}

/// Pairs that stay δ-close along `flow` in one time direction must share
/// an orbit. Holds for the horocycle flow; the geodesic flow fails it.
pub fn separating_test(group: &FuchsianGroup, metric: &GroupMetric, o: &SeparatingOptions) -> Result<TestVerdict> {
    let cap = delta_cap(group, metric)?;
    if !(o.delta > 0.0 && o.delta < cap) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, {cap}), got {}", o.delta)));
    }
    if !(o.window > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let window = if o.flow == FlowKind::Geodesic {
        o.window.min(GEODESIC_HORIZON)
    } else {
        o.window
    };
    let c = Campaign {
        flow: o.flow,
        tc: None,
        delta: o.delta,
        direction: o.direction,
        window,
        grid_step: o.grid_step,
        cert_radius: o.cert_radius,
        bounds: None,
    };
    let name = format!("separating-{}-{}", o.flow, o.direction);
    let mut v = campaign_verdict(&name, group, metric, &c, o.pairs, o.seed, o.examples)?;
    if window < o.window {
        v.notes.push(clamp_note(o.window));
    }
    Ok(v)
}

/// Separating recovery for a time change of the horocycle flow, with the
/// shift bounds `|s| < ρ` and `|r| < ε`.
pub fn kinematic_test_time_change(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    tc: &TimeChange,
    o: &KinematicOptions,
) -> Result<TestVerdict> {
    if tc.base != FlowKind::StableHorocycle {
        return Err(Error::InvalidArgument("kinematic test needs a time change of the horocycle flow".into()));
    }
    if !(o.window > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let rho = kinematic_rho(tc, o.eps, o.alpha_samples, o.seed)?;
    let cap = delta_cap(group, metric)?;
    let delta = metric.calibrate_distance_to_gap(rho)?.min(cap);
    let c = Campaign {
        flow: FlowKind::StableHorocycle,
        tc: Some(tc),
        delta,
        direction: o.direction,
        window: o.window,
        grid_step: o.grid_step,
        cert_radius: 0.0,
        bounds: Some((rho, o.eps)),
    };
    campaign_verdict(&format!("kinematic-{}", o.direction), group, metric, &c, o.pairs, o.seed, o.examples)
}

struct Triple {
    label: String,
    x: GroupElement,
    y: GroupElement,
    s: Reparametrization,
    shift: Option<f64>,
    must_qualify: bool,
}

fn kh_cases(group: &FuchsianGroup, o: &KhOptions) -> Vec<Triple> {
    let letters = group.letters();
    (0..o.triples)
        .map(|i| {
            let mut rng = sampling::rng(o.seed, i as u64);
            let x = sampling::random_element(&mut rng, 2.0);
            let gamma = match rng.gen_range(0..=letters.len()) {
                0 => GroupElement::IDENTITY,
                k => letters[k - 1],
            };
            let sign = if rng.gen::<bool>() { 1.0 } else { -1.0 };
            let small = 0.4 * o.delta * rng.gen_range(0.0..1.0) * sign;
            let large = o.delta * rng.gen_range(0.5..1.0) * sign;
            let wiggle = |rng: &mut _| Reparametrization::wiggle(rng, o.window, o.knot_spacing, 0.4 * o.delta);
            let (label, s, offset, shift, must) = match i % 5 {
                0 => ("identity/shift", Reparametrization::identity(), GroupElement::b(small), Some(small), true),
                1 => ("wiggle/shift", wiggle(&mut rng), GroupElement::b(small), Some(small), true),
                2 => ("wiggle/geodesic-offset", wiggle(&mut rng), GroupElement::a(large), None, false),
                3 => (
                    "random/shift",
                    Reparametrization::random(&mut rng, o.window, o.knot_spacing),
                    GroupElement::b(small),
                    Some(small),
                    false,
                ),
                _ => ("wiggle/unstable-offset", wiggle(&mut rng), GroupElement::c(large), None, false),
            };
            Triple {
                label: label.into(),
                x,
                y: gamma.mul(&x).mul(&offset),
                s,
                shift,
                must_qualify: must,
            }
        })
        .collect()
}

fn run_kh(group: &FuchsianGroup, metric: &GroupMetric, o: &KhOptions, tr: &Triple) -> Experiment {
    let grid = tube::time_grid(o.window, o.grid_step, true, true);
    let along = |f: &dyn Fn(f64) -> (f64, f64)| -> Vec<Vec<GridPoint>> {
        grid.iter()
            .map(|sw| sw.iter().map(|&t| {
                let (p, q) = f(t);
                (t, p, q)
            }).collect())
            .collect()
    };
    let s = |t: f64| tr.s.eval(t);
    let mut w = Witness::new(tr.label.clone(), Outcome::Pass, &tr.x, &tr.y);
    if tr.s != Reparametrization::identity() {
        w.reparametrization = Some(tr.s.knots().to_vec());
    }
    if let Some(u) = tr.shift {
        w = w.value("shift", u);
    }
    let m = tr.s.max_deviation(-o.window, o.window);
    w = w.value("max_reparam_deviation", m);
    let flow = FlowKind::StableHorocycle;
    let exited = |w: Witness, which: &str, tube: Tube| -> Option<Experiment> {
        match tube {
            Tube::Exited { t, radius_used, .. } => {
                let w = w.value(&format!("{which}_exit_time"), t);
                Some(if tr.must_qualify {
                    finish(w, "failed", Outcome::Fail, format!("{which} condition failed on a constructed triple"), radius_used)
                } else {
                    finish(w, "exited", Outcome::Pass, String::new(), radius_used)
                })
            }
            Tube::Stayed(_) => None,
        }
    };
    // condition 1: the orbit of x against itself reparametrized
    match tube::walk(group, metric, flow, &tr.x, &tr.x, &along(&|t| (t, s(t))), o.delta) {
        Ok(t) => {
            if let Some(e) = exited(w.clone(), "self", t) {
                return e;
            }
        }
        Err(e) => return budget(w, e),
    }
    // condition 2: x against y reparametrized
    match tube::walk(group, metric, flow, &tr.x, &tr.y, &along(&|t| (t, s(t))), o.delta) {
        Ok(t) => {
            if let Some(e) = exited(w.clone(), "pair", t) {
                return e;
            }
        }
        Err(e) => return budget(w, e),
    }
    // both hold, so x and y at the common time s(t) are 2δ-close
    let combined = match tube::walk(group, metric, flow, &tr.x, &tr.y, &along(&|t| (s(t), s(t))), 2.0 * o.delta) {
        Ok(t) => t,
        Err(e) => return budget(w, e),
    };
    let st = match combined {
        Tube::Stayed(st) => st,
        Tube::Exited { t, lower_bound, radius_used } => {
            let w = w.value("combined_exit_time", t).value("combined_lower_bound", lower_bound);
            return finish(w, "failed", Outcome::Fail, "combined 2δ bound violated on a qualifying triple".into(), radius_used);
        }
    };
    w.gamma = Some(st.gamma0.gamma_word.to_ascii());
    w.k = Some(st.k.entries());
    w = w.value("combined_max_distance", st.max_distance).value("consistency", st.consistency);
    if let Some(t) = st.gamma_jump {
        return finish(w, "failed", Outcome::Fail, format!("group element changed at t = {t}"), st.radius_used);
    }
    let eps_star = match group.trace_gap() {
        Ok(e) => e,
        Err(e) => return budget(w, e),
    };
    let sigma = match horocycle_shift(&st.k, eps_star) {
        Ok(sigma) => sigma,
        Err(why) => {
            let (class, outcome) = if tr.shift.is_some() {
                ("failed", Outcome::Fail)
            } else {
                ("inconclusive", Outcome::Inconclusive)
            };
            return finish(w, class, outcome, format!("qualifying triple without a recovered shift: {why}"), st.radius_used);
        }
    };
    w = w.value("shift_recovered", sigma);
    let confirmed = matches!(
        group.same_coset(&tr.x.mul(&GroupElement::b(sigma)), &tr.y),
        CosetVerdict::Same { .. }
    );
    let truth = tr.shift.is_some_and(|u| (u - sigma).abs() < SHIFT_TOL);
    if confirmed && truth {
        finish(w, "recovered", Outcome::Pass, String::new(), st.radius_used)
    } else {
        finish(w, "failed", Outcome::Fail, "recovered shift not confirmed".into(), st.radius_used)
    }
}

/// Triples `(x, y, s)` with `θ_t x` close to both `θ_{s(t)} x` and
/// `θ_{s(t)} y` on the window must have `y` on the horocycle through `x`.
pub fn kh_test_horocycle(group: &FuchsianGroup, metric: &GroupMetric, o: &KhOptions) -> Result<TestVerdict> {
    let cap = delta_cap(group, metric)?;
    if !(o.delta > 0.0 && 2.0 * o.delta < cap) {
        return Err(Error::InvalidArgument(format!("delta must lie in (0, {}), got {}", cap / 2.0, o.delta)));
    }
    if !(o.window > 0.0) {
        return Err(Error::InvalidArgument("window must be positive".into()));
    }
    let start = Instant::now();
    let cases = kh_cases(group, o);
    let results: Vec<Experiment> = cases.par_iter().map(|t| run_kh(group, metric, o, t)).collect();
    let mut v = TestVerdict::new("kh-horocycle", o.seed);
    v.param("delta", o.delta);
    v.param("window", o.window);
    v.param("grid_step", o.grid_step);
    v.param("triples", o.triples as f64);
    let qualifying: Vec<f64> = results
        .iter()
        .filter(|r| r.class == "recovered" || r.class == "failed")
        .filter_map(|r| r.witness.values.get("max_reparam_deviation").copied())
        .collect();
    v.param("max_reparam_deviation", qualifying.iter().copied().fold(0.0, f64::max));
    aggregate(&mut v, results, o.examples);
    v.notes.push(format!(
        "closeness sampled every {} on [-{w}, {w}]; the conclusion holds at this resolution only",
        o.grid_step,
        w = o.window
    ));
    v.timing = elapsed(start);
    Ok(v)
}
