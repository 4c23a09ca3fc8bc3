//! The geodesic flow `Γg ↦ Γg·a_t`, the stable and unstable horocycle flows
//! `Γg ↦ Γg·b_t`, `Γg ↦ Γg·c_t`, their time changes, trajectory export and
//! the no-periodic-orbit certificate for the horocycle flows.

use std::fmt;
use std::io::Write;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fuchsian::{FuchsianGroup, QuotientPoint, Within};
use crate::metric::GroupMetric;
use crate::sampling;
use crate::sl2::{GroupElement, OneParameter};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FlowKind {
    Geodesic,
    StableHorocycle,
    UnstableHorocycle,
}

impl FlowKind {
    pub fn one_parameter(self) -> OneParameter {
        match self {
            FlowKind::Geodesic => OneParameter::Geodesic,
            FlowKind::StableHorocycle => OneParameter::Stable,
            FlowKind::UnstableHorocycle => OneParameter::Unstable,
        }
    }

    pub fn element(self, t: f64) -> GroupElement {
        GroupElement::one_param(self.one_parameter(), t)
    }

    pub fn parse(s: &str) -> Result<Self> {
        match s {
            "geodesic" => Ok(FlowKind::Geodesic),
            "stable" | "horocycle" | "stable_horocycle" => Ok(FlowKind::StableHorocycle),
            "unstable" | "unstable_horocycle" => Ok(FlowKind::UnstableHorocycle),
            other => Err(Error::Parse(format!("unknown flow `{other}`"))),
        }
    }
}

impl fmt::Display for FlowKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            FlowKind::Geodesic => "geodesic",
            FlowKind::StableHorocycle => "stable_horocycle",
            FlowKind::UnstableHorocycle => "unstable_horocycle",
        })
    }
}

/// Flow by exact right multiplication.
pub fn step(kind: FlowKind, x: &QuotientPoint, t: f64) -> QuotientPoint {
    QuotientPoint::new(x.rep.mul(&kind.element(t)))
}

pub type SpeedField = Arc<dyn Fn(&GroupElement) -> f64 + Send + Sync>;

/// A flow with the orbits of `base`, moving at `speed` times the base speed.
#[derive(Clone)]
pub struct TimeChange {
    pub base: FlowKind,
    pub label: String,
    speed: SpeedField,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Integration step in the new time.
    pub h_tc: f64,
    /// When set, speed evaluations use representatives reduced by this
    /// group so that they stay well conditioned along long orbits.
    reducer: Option<Arc<FuchsianGroup>>,
}

impl fmt::Debug for TimeChange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("TimeChange")
            .field("base", &self.base)
            .field("label", &self.label)
            .field("rho_min", &self.rho_min)
            .field("rho_max", &self.rho_max)
            .field("h_tc", &self.h_tc)
            .finish()
    }
}

/// Number of seeded points at which declared speed bounds are checked.
pub const SPEED_BOUND_SAMPLES: usize = 1000;
/// Support radius of [`TimeChange::orbit_bump`] around the orbit `Γ·i`.
pub const BUMP_RADIUS: f64 = 1.2;

impl TimeChange {
    pub fn new(
        base: FlowKind,
        label: impl Into<String>,
        speed: SpeedField,
        rho_min: f64,
        rho_max: f64,
        reducer: Option<Arc<FuchsianGroup>>,
        seed: u64,
    ) -> Result<Self> {
        if !(rho_min > 0.0 && rho_max >= rho_min && rho_max.is_finite()) {
            return Err(Error::InvalidArgument(format!(
                "speed bounds must satisfy 0 < rho_min <= rho_max (got {rho_min}, {rho_max})"
            )));
        }
        let mut rng = sampling::rng(seed, 0x7463);
        for _ in 0..SPEED_BOUND_SAMPLES {
            let g = sampling::random_element(&mut rng, 6.0);
            let v = speed(&g);
            if !(v >= rho_min && v <= rho_max) {
                return Err(Error::SpeedBounds {
                    value: v,
                    min: rho_min,
                    max: rho_max,
                });
            }
        }
        Ok(TimeChange {
            base,
            label: label.into(),
            speed,
            rho_min,
            rho_max,
            h_tc: 1e-3 * rho_min / rho_max,
            reducer,
        })
    }

    pub fn identity(base: FlowKind) -> Self {
        Self::constant(base, 1.0).expect("unit speed is valid")
    }

    pub fn constant(base: FlowKind, c: f64) -> Result<Self> {
        Self::new(base, format!("constant({c})"), Arc::new(move |_| c), c, c, None, 0)
    }

    /// Speed `1 + A·cos²(πr/2R₀)` for `r < R₀` and `1` otherwise, where `r`
    /// is the hyperbolic distance from the base point to the orbit `Γ·i`.
    pub fn orbit_bump(base: FlowKind, group: Arc<FuchsianGroup>, amplitude: f64) -> Result<Self> {
        if !(amplitude >= 0.0) {
            return Err(Error::InvalidArgument("bump amplitude must be non-negative".into()));
        }
        let g2 = Arc::clone(&group);
        let speed: SpeedField = Arc::new(move |g: &GroupElement| {
            let r = g2.reduce(g).reduced.displacement();
            if r < BUMP_RADIUS {
                let c = (std::f64::consts::FRAC_PI_2 * r / BUMP_RADIUS).cos();
                1.0 + amplitude * c * c
            } else {
                1.0
            }
        });
        Self::new(
            base,
            format!("orbit_bump({amplitude})"),
            speed,
            1.0,
            1.0 + amplitude,
            Some(group),
            0,
        )
    }

    pub fn speed_at(&self, g: &GroupElement) -> f64 {
        (self.speed)(g)
    }

    pub fn with_step(mut self, h: f64) -> Self {
        self.h_tc = h;
        self
    }

    fn is_constant(&self) -> bool {
        self.rho_min == self.rho_max
    }

    fn anchor(&self, g: GroupElement) -> GroupElement {
        match &self.reducer {
            Some(group) => group.reduce(&g).reduced,
            None => g,
        }
    }

    /// Integrates `dβ/dτ = speed(x·u(β))` from `τ = 0` and reports `β` at
    /// each requested time (sorted by absolute value, one sign).
    pub fn base_times(&self, x: &QuotientPoint, taus: &[f64]) -> Vec<f64> {
        if self.is_constant() {
            return taus.iter().map(|t| t * self.rho_min).collect();
        }
        let mut out = Vec::with_capacity(taus.len());
        let mut tau = 0.0f64;
        let mut beta = 0.0f64;
        let mut anchor = self.anchor(x.rep);
        let mut anchor_beta = 0.0f64;
        let base = self.base;
        for &target in taus {
            let dir = if target >= tau { 1.0 } else { -1.0 };
            while (target - tau) * dir > 0.0 {
                let h = dir * self.h_tc.min((target - tau).abs());
                let f = |b: f64| self.speed_at(&anchor.mul(&base.element(b - anchor_beta)));
                let k1 = f(beta);
                let k2 = f(beta + 0.5 * h * k1);
                let k3 = f(beta + 0.5 * h * k2);
                let k4 = f(beta + h * k3);
                beta += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
                tau += h;
                anchor = self.anchor(anchor.mul(&base.element(beta - anchor_beta)));
                anchor_beta = beta;
            }
            out.push(beta);
        }
        out
    }

    /// `ψ_t(x)` and the base time `β(t, x)` it corresponds to.
    pub fn time_change_step(&self, x: &QuotientPoint, t: f64) -> (QuotientPoint, f64) {
        let beta = self.base_times(x, &[t])[0];
        (step(self.base, x, beta), beta)
    }

    /// `α(s, x) = ∫₀ˢ du / speed(x·u(u))`, the new time needed to cover base
    /// time `s`.
    pub fn alpha(&self, x: &QuotientPoint, s: f64) -> f64 {
        if self.is_constant() {
            return s / self.rho_min;
        }
        let n = ((s.abs() / self.h_tc).ceil() as usize).max(1);
        let h = s / n as f64;
        let mut anchor = self.anchor(x.rep);
        let mut anchor_u = 0.0;
        let mut acc = 0.0;
        for k in 0..n {
            let u0 = k as f64 * h;
            let val = |u: f64| 1.0 / self.speed_at(&anchor.mul(&self.base.element(u - anchor_u)));
            // Simpson on each cell
            acc += h / 6.0 * (val(u0) + 4.0 * val(u0 + 0.5 * h) + val(u0 + h));
            anchor = self.anchor(anchor.mul(&self.base.element(u0 + h - anchor_u)));
            anchor_u = u0 + h;
        }
        acc
    }
}

/// Sampled orbit of a flow or a time change.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub points: Vec<QuotientPoint>,
    pub kind: String,
}

impl Trajectory {
    pub fn write_csv<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "t,a11,a12,a21,a22")?;
        for (t, p) in self.times.iter().zip(&self.points) {
            let [a, b, c, d] = p.rep.entries();
            writeln!(w, "{t},{a},{b},{c},{d}")?;
        }
        Ok(())
    }
}

fn grid(t0: f64, t1: f64, n: usize) -> Result<Vec<f64>> {
    if !(t0 < t1) || n < 2 {
        return Err(Error::InvalidArgument(format!(
            "trajectory needs t0 < t1 and n >= 2 (got [{t0}, {t1}], n = {n})"
        )));
    }
    Ok((0..n)
        .map(|k| if k + 1 == n { t1 } else { t0 + (t1 - t0) * k as f64 / (n - 1) as f64 })
        .collect())
}

/// `n` evenly spaced exact flow steps over `[t0, t1]`.
pub fn sample_trajectory(kind: FlowKind, x: &QuotientPoint, t0: f64, t1: f64, n: usize) -> Result<Trajectory> {
    let times = grid(t0, t1, n)?;
    let points = times.iter().map(|&t| step(kind, x, t)).collect();
    Ok(Trajectory {
        times,
        points,
        kind: kind.to_string(),
    })
}

/// Time-changed trajectory over `[0, t1]` (or `[t1, 0]` for `t1 < 0`).
pub fn sample_time_changed(tc: &TimeChange, x: &QuotientPoint, t1: f64, n: usize) -> Result<Trajectory> {
    let times = if t1 > 0.0 { grid(0.0, t1, n)? } else { grid(t1, 0.0, n)?.into_iter().rev().collect() };
    let betas = tc.base_times(x, &times);
    let points = betas.iter().map(|&b| step(tc.base, x, b)).collect();
    let (times, points) = if t1 > 0.0 {
        (times, points)
    } else {
        let mut t = times;
        let mut p: Vec<QuotientPoint> = points;
        t.reverse();
        p.reverse();
        (t, p)
    };
    Ok(Trajectory {
        times,
        points,
        kind: tc.label.clone(),
    })
}

/// Why a horocycle flow has no periodic orbit: a period `T` with
/// `g⁻¹γg = u_T` forces `tr γ = tr u_T = 2 < 2 + ε★`, so `γ = e` and `T = 0`.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicCertificate {
    pub group: String,
    pub kind: FlowKind,
    pub trace_gap: f64,
    /// Largest deviation of `tr(u_T)` from 2 over the sampled periods.
    pub parabolic_trace_deviation: f64,
    /// Largest `|tr(g⁻¹γg) − tr(γ)|` over random pairs.
    pub conjugation_trace_deviation: f64,
    pub conjugation_samples: usize,
    pub argument: String,
}

impl PeriodicCertificate {
    pub fn holds(&self) -> bool {
        self.trace_gap > 0.0 && self.parabolic_trace_deviation == 0.0 && self.conjugation_trace_deviation < 1e-6
    }
}

pub fn periodic_certificate(group: &FuchsianGroup, kind: FlowKind, seed: u64) -> Result<PeriodicCertificate> {
    if kind == FlowKind::Geodesic {
        return Err(Error::InvalidArgument("the geodesic flow has periodic orbits".into()));
    }
    let sys = group.systole()?;
    let parabolic = (1..=200)
        .map(|k| (kind.element(0.1 * k as f64).trace() - 2.0).abs())
        .fold(0.0, f64::max);
    let ball = group.enumerate_ball(sys.certification_radius)?;
    let mut rng = sampling::rng(seed, 0x7065);
    let n = 1000;
    let mut worst: f64 = 0.0;
    for k in 0..n {
        let gamma = ball[1 + k % (ball.len() - 1)];
        let g = sampling::random_element(&mut rng, 3.0);
        let conj = g.inverse().mul(&gamma).mul(&g);
        worst = worst.max((conj.trace() - gamma.trace()).abs() / gamma.trace());
    }
    Ok(PeriodicCertificate {
        group: group.name().to_string(),
        kind,
        trace_gap: sys.trace_gap,
        parabolic_trace_deviation: parabolic,
        conjugation_trace_deviation: worst,
        conjugation_samples: n,
        argument: format!(
            "if Γg·u_T = Γg then γ = g·u_T·g⁻¹ ∈ Γ has tr γ = tr u_T = 2 < 2 + ε★ = {:.6}, so γ = e and T = 0",
            2.0 + sys.trace_gap
        ),
    })
}

/// Seeded check that `d_X(u_T·x, x)` stays above `threshold` for random `x`
/// and integer periods.
#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct PeriodicEmpirical {
    pub samples: usize,
    pub threshold: f64,
    pub min_lower_bound: f64,
    pub violations: usize,
}

pub fn periodic_empirical(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    kind: FlowKind,
    points: usize,
    periods: &[f64],
    threshold: f64,
    seed: u64,
) -> Result<PeriodicEmpirical> {
    let mut rng = sampling::rng(seed, 0x656d);
    let mut min_lb = f64::INFINITY;
    let mut violations = 0;
    let mut samples = 0;
    for _ in 0..points {
        let x = QuotientPoint::new(sampling::random_element(&mut rng, 3.0));
        for &t in periods {
            samples += 1;
            match group.quotient_distance_within(metric, &step(kind, &x, t), &x, threshold)? {
                Within::Outside { lower_bound, .. } => min_lb = min_lb.min(lower_bound),
                Within::Inside(q) => {
                    violations += 1;
                    min_lb = min_lb.min(q.value);
                }
            }
        }
    }
    Ok(PeriodicEmpirical {
        samples,
        threshold,
        min_lower_bound: min_lb,
        violations,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::metric::MetricConfig;
    use approx::assert_abs_diff_eq;

    #[test]
    fn step_examples() {
        let x = QuotientPoint::new(GroupElement::rotation(0.4).mul(&GroupElement::a(1.3)));
        assert_eq!(step(FlowKind::Geodesic, &x, 0.0), x);
        let two = step(FlowKind::Geodesic, &step(FlowKind::Geodesic, &x, 0.7), 1.1);
        assert!(two.rep.approx_eq(&step(FlowKind::Geodesic, &x, 1.8).rep, 1e-12));
        let h = step(FlowKind::StableHorocycle, &QuotientPoint::identity(), 2.0);
        assert_eq!(h.rep, GroupElement::b(2.0));
    }

    #[test]
    fn constant_time_changes() {
        let x = QuotientPoint::new(GroupElement::a(0.4));
        let id = TimeChange::identity(FlowKind::StableHorocycle);
        let (p, beta) = id.time_change_step(&x, 3.0);
        assert_eq!(beta, 3.0);
        assert_eq!(p, step(FlowKind::StableHorocycle, &x, 3.0));
        let two = TimeChange::constant(FlowKind::StableHorocycle, 2.0).unwrap();
        assert_eq!(two.time_change_step(&x, 1.5).1, 3.0);
        assert_eq!(two.alpha(&x, 3.0), 1.5);
    }

    #[test]
    fn speed_bounds_are_checked() {
        let bad: SpeedField = Arc::new(|g: &GroupElement| 1.0 + g.displacement());
        let err = TimeChange::new(FlowKind::Geodesic, "bad", bad, 1.0, 2.0, None, 1).unwrap_err();
        assert!(matches!(err, Error::SpeedBounds { .. }));
        assert!(TimeChange::constant(FlowKind::Geodesic, 0.0).is_err());
    }

    #[test]
    fn bump_alpha_beta_roundtrip() {
        let group = Arc::new(FuchsianGroup::preset_bolza());
        let tc = TimeChange::orbit_bump(FlowKind::StableHorocycle, group, 0.5).unwrap();
        let mut rng = sampling::rng(8, 0);
        for _ in 0..5 {
            let x = QuotientPoint::new(sampling::random_element(&mut rng, 2.0));
            let t = rand::Rng::gen_range(&mut rng, -3.0..3.0);
            let (_, beta) = tc.time_change_step(&x, t);
            assert!(beta.abs() >= t.abs() - 1e-12 && beta.abs() <= 1.5 * t.abs() + 1e-12);
            assert_abs_diff_eq!(tc.alpha(&x, beta), t, epsilon = 1e-6);
        }
    }

    #[test]
    fn trajectories() {
        let e = QuotientPoint::identity();
        let tr = sample_trajectory(FlowKind::Geodesic, &e, 0.0, 1.0, 11).unwrap();
        assert_eq!(tr.points.len(), 11);
        for (k, p) in tr.points.iter().enumerate() {
            assert_abs_diff_eq!(p.rep.rep().a11, (0.05 * k as f64).exp(), epsilon = 1e-12);
        }
        let h = sample_trajectory(FlowKind::StableHorocycle, &e, 0.0, 10.0, 2).unwrap();
        assert_eq!(h.times, vec![0.0, 10.0]);
        for p in &h.points {
            assert_eq!(p.rep.trace(), 2.0);
            assert_eq!(p.rep.rep().a21, 0.0);
        }
        assert!(sample_trajectory(FlowKind::Geodesic, &e, 1.0, 1.0, 3).is_err());
        let mut buf = Vec::new();
        h.write_csv(&mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert_eq!(text.lines().next(), Some("t,a11,a12,a21,a22"));
        assert_eq!(text.lines().count(), 3);
    }

    #[test]
    fn time_changed_points_lie_on_base_orbit() {
        let group = Arc::new(FuchsianGroup::preset_bolza());
        let tc = TimeChange::orbit_bump(FlowKind::StableHorocycle, Arc::clone(&group), 0.5).unwrap();
        let x = QuotientPoint::new(GroupElement::rotation(1.0).mul(&GroupElement::a(0.5)));
        for t1 in [2.0, -2.0] {
            let tr = sample_time_changed(&tc, &x, t1, 5).unwrap();
            assert!(tr.times.windows(2).all(|w| w[0] < w[1]));
            for (t, p) in tr.times.iter().zip(&tr.points) {
                let (q, _) = tc.time_change_step(&x, *t);
                assert!(group.same_coset(&q.rep, &p.rep).is_same());
            }
        }
    }

    #[test]
    fn no_periodic_points() {
        let group = FuchsianGroup::preset_bolza();
        let cert = periodic_certificate(&group, FlowKind::StableHorocycle, 3).unwrap();
        assert!(cert.holds());
        assert_abs_diff_eq!(cert.trace_gap, 2.0 * std::f64::consts::SQRT_2, epsilon = 1e-9);
        assert!(periodic_certificate(&group, FlowKind::Geodesic, 3).is_err());
        let metric = GroupMetric::new(MetricConfig::default()).unwrap();
        let emp = periodic_empirical(&group, &metric, FlowKind::StableHorocycle, 5, &[1.0, 7.0], 0.01, 2).unwrap();
        assert_eq!(emp.violations, 0);
        assert!(emp.min_lower_bound > 0.01 - 1e-12);
    }
}
