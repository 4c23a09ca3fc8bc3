//! The two explicit constructions showing that the horocycle flow is not
//! BW-expansive and that the geodesic flow is not separating.

use serde::{Deserialize, Serialize};

use super::horocycle::Direction;
use super::reparam::Reparametrization;
use crate::error::{Error, Result};
use crate::flows::FlowKind;
use crate::fuchsian::{FuchsianGroup, QuotientPoint, Within};
use crate::metric::GroupMetric;
use crate::sl2::{conj_by_horocycle, GroupElement, Matrix2};

/// Entry size below which a matrix entry counts as zero in orbit searches.
pub const ZERO_ENTRY: f64 = 1e-9;

/// Outcome of looking for `γ` in a ball with `(γx)⁻¹y` diagonal, i.e. `y` on
/// the geodesic orbit of `x` through `γ`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NonOrbitSearch {
    pub radius: f64,
    pub ball_size: usize,
    /// Smallest `max(|k12|, |k21|)` over the ball.
    pub min_offdiagonal: f64,
    /// Words of `γ` that give a diagonal `(γx)⁻¹y`.
    pub diagonal_candidates: Vec<String>,
    /// Non-identity elements with `|γ21| < 1e−9` (they would fix ∞).
    pub upper_triangular: Vec<String>,
    pub certified: bool,
}

pub(crate) fn non_orbit_search(group: &FuchsianGroup, x: &GroupElement, y: &GroupElement, radius: f64) -> Result<NonOrbitSearch> {
    let ball = group.enumerate_ball_words(radius)?;
    let mut min_off = f64::INFINITY;
    let mut diagonal = Vec::new();
    let mut upper = Vec::new();
    for e in &ball {
        let k = *e.element.mul(x).left_divide(y).rep();
        let off = k.a12.abs().max(k.a21.abs());
        min_off = min_off.min(off);
        if off < ZERO_ENTRY {
            diagonal.push(e.word.to_ascii());
        }
        if !e.word.is_empty() && e.element.rep().a21.abs() < ZERO_ENTRY {
            upper.push(e.word.to_ascii());
        }
    }
    Ok(NonOrbitSearch {
        radius,
        ball_size: ball.len(),
        min_offdiagonal: min_off,
        certified: diagonal.is_empty(),
        diagonal_candidates: diagonal,
        upper_triangular: upper,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ResidualRow {
    pub t: f64,
    pub s: f64,
    /// `‖formula − K‖_F` for the closed form of `B_{−t}·K·B_{s(t)}`.
    pub formula_residual: f64,
    /// `‖B_{−t}·K·B_{s(t)} − K‖_F` from literal products.
    pub product_residual: f64,
}

/// A pair on different horocycle orbits that stays δ-close under the
/// reparametrization `s(t) = t/a²` for all time.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct HorocycleBwCertificate {
    pub delta: f64,
    /// Frobenius-gap bound guaranteeing distance below δ.
    pub rho: f64,
    pub a: f64,
    /// `K = h⁻¹g = diag(a, 1/a)`.
    pub k: [f64; 4],
    /// `g`, representing `x`.
    pub x: [f64; 4],
    /// `h`, representing `y`.
    pub y: [f64; 4],
    pub reparametrization: Vec<(f64, f64)>,
    pub slope: f64,
    pub gap_k: f64,
    pub distance_k: f64,
    pub trace_k: f64,
    pub trace_gap: f64,
    pub residuals: Vec<ResidualRow>,
    pub max_residual: f64,
    /// `(t, d_X(θ_{s(t)} x, θ_t y))` at a few times.
    pub quotient_checks: Vec<(f64, f64)>,
    pub argument: String,
    pub holds: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DecayRow {
    pub t: f64,
    pub measured: f64,
    pub bound: f64,
    pub gamma: String,
}

/// A pair on different geodesic orbits that stays δ-close along the
/// geodesic flow for all times of one sign.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeodesicSepCertificate {
    pub delta: f64,
    pub direction: Direction,
    pub s: f64,
    pub x: [f64; 4],
    pub y: [f64; 4],
    pub decay: Vec<DecayRow>,
    pub max_excess: f64,
    pub nonincreasing: bool,
    pub search: NonOrbitSearch,
    /// Offsets tried before one was certified.
    pub tried: Vec<f64>,
    pub trace_gap: f64,
    pub argument: String,
    pub certified: bool,
}

fn frob(m: &Matrix2) -> f64 {
    m.frobenius_norm_sq().sqrt()
}

/// Construction with `a` chosen so that the Frobenius gap of `K` is half
/// the calibrated bound for δ.
pub fn counterexample_horocycle_not_bw(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    delta: f64,
) -> Result<HorocycleBwCertificate> {
    let rho = metric.calibrate_gap_to_distance(delta)?;
    // a − 1/a = ρ/2
    let half = rho / 4.0;
    let a = half + (half * half + 1.0).sqrt();
    counterexample_horocycle_not_bw_with(group, metric, delta, a)
}

pub fn counterexample_horocycle_not_bw_with(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    delta: f64,
    a: f64,
) -> Result<HorocycleBwCertificate> {
    let rho = metric.calibrate_gap_to_distance(delta)?;
    let k_el = GroupElement::from_matrix(Matrix2::raw(a, 0.0, 0.0, 1.0 / a));
    let gap = k_el.frobenius_gap();
    if !(a > 0.0 && a != 1.0 && gap < rho) {
        return Err(Error::InvalidArgument(format!(
            "a = {a} must differ from 1 with gap {gap} below rho = {rho}"
        )));
    }
    let k = Matrix2::raw(a, 0.0, 0.0, 1.0 / a);
    let h = GroupElement::rotation(0.4).mul(&GroupElement::a(0.8)).mul(&GroupElement::rotation(1.1));
    let g = h.mul(&k_el);
    let d = 1.0 / a;
    let slope = d / a;
    let reparam = Reparametrization::linear(slope);
    let mut residuals = Vec::new();
    for e in 0..=6 {
        let mag = 10f64.powf(e as f64 / 2.0);
        for t in [-mag, mag] {
            let s = reparam.eval(t);
            let formula = conj_by_horocycle(&k, s, t);
            let product = GroupElement::b(-t).rep().mul(&k).mul(GroupElement::b(s).rep());
            residuals.push(ResidualRow {
                t,
                s,
                formula_residual: frob(&formula.sub(&k)),
                product_residual: frob(&product.sub(&k)),
            });
        }
    }
    let max_residual = residuals
        .iter()
        .map(|r| r.formula_residual.max(r.product_residual))
        .fold(0.0, f64::max);
    let distance_k = metric.dist_to_identity(&k_el)?.value;
    let mut quotient_checks = Vec::new();
    for t in [0.0, 1.0, -1.0, 10.0, -10.0, 100.0, -100.0] {
        let xs = QuotientPoint::new(g.mul(&GroupElement::b(reparam.eval(t))));
        let yt = QuotientPoint::new(h.mul(&GroupElement::b(t)));
        let d = match group.quotient_distance_within(metric, &xs, &yt, delta)? {
            Within::Inside(q) => q.value,
            Within::Outside { lower_bound, .. } => lower_bound,
        };
        quotient_checks.push((t, d));
    }
    let trace_gap = group.trace_gap()?;
    let trace_k = a + d;
    let distinct = !group.same_coset(&h, &g).is_same();
    let holds = max_residual < 1e-12
        && distance_k < delta
        && trace_k < 2.0 + trace_gap
        && distinct
        && quotient_checks.iter().all(|(_, q)| *q <= distance_k + 1e-9);
    let argument = format!(
        "B(-t) K B(s(t)) = K for every t, so the quotient distance between the reparametrized orbits never exceeds d_G(K, e) = {distance_k:.6} < {delta}. \
If gamma h = g b(tau) for some gamma in the group then trace(gamma) = trace(K b(tau)) = a + 1/a = {trace_k:.12} < 2 + eps* = {:.12}, \
so gamma = e and b(tau) = K^-1. A diagonal b(tau) forces tau = 0 and K = e, which is false since a != 1. The orbits are distinct.",
        2.0 + trace_gap
    );
    Ok(HorocycleBwCertificate {
        delta,
        rho,
        a,
        k: k.entries(),
        x: g.entries(),
        y: h.entries(),
        reparametrization: reparam.knots().to_vec(),
        slope,
        gap_k: gap,
        distance_k,
        trace_k,
        trace_gap,
        residuals,
        max_residual,
        quotient_checks,
        argument,
        holds,
    })
}

/// `x = Γe` and `y = Γb_s` (or `Γc_s` for negative times): the geodesic flow
/// contracts their offset while no group element in the certification ball
/// puts them on a common geodesic orbit.
pub fn counterexample_geodesic_not_separating(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    delta: f64,
    direction: Direction,
    cert_radius: f64,
) -> Result<GeodesicSepCertificate> {
    if !(delta > 0.0 && delta.is_finite()) {
        return Err(Error::InvalidArgument(format!("delta must be positive, got {delta}")));
    }
    let offset = match direction {
        Direction::Positive => FlowKind::StableHorocycle,
        Direction::Negative => FlowKind::UnstableHorocycle,
    };
    let x = GroupElement::IDENTITY;
    let mut tried = Vec::new();
    let mut chosen = None;
    for k in 2..=6 {
        let s = delta / k as f64;
        tried.push(s);
        let y = offset.element(s);
        let search = non_orbit_search(group, &x, &y, cert_radius)?;
        if search.certified {
            chosen = Some((s, y, search));
            break;
        }
        if k == 6 {
            chosen = Some((s, y, search));
        }
    }
    let (s, y, search) = chosen.expect("at least one offset is tried");
    let sign = match direction {
        Direction::Positive => 1.0,
        Direction::Negative => -1.0,
    };
    let mut decay = Vec::new();
    for n in 0..=10 {
        let t = sign * n as f64;
        let xt = QuotientPoint::new(x.mul(&GroupElement::a(t)));
        let yt = QuotientPoint::new(y.mul(&GroupElement::a(t)));
        let bound = s.abs() * (-(n as f64)).exp();
        let (measured, gamma) = match group.quotient_distance_within(metric, &xt, &yt, delta)? {
            Within::Inside(q) => (q.value, q.gamma_word.to_ascii()),
            Within::Outside { lower_bound, .. } => (lower_bound, String::from("none")),
        };
        decay.push(DecayRow { t, measured, bound, gamma });
    }
    let max_excess = decay.iter().map(|r| r.measured - r.bound).fold(f64::NEG_INFINITY, f64::max);
    let nonincreasing = decay.windows(2).all(|w| w[1].measured <= w[0].measured + 1e-9);
    let trace_gap = group.trace_gap()?;
    let certified = search.certified && max_excess <= 1e-6 && decay.iter().all(|r| r.measured < delta);
    let argument = format!(
        "a(-t) {o}(s) a(t) = {o}(s e^(-|t|)) for t in the {direction} direction, so the distance between the orbits is at most |s| e^(-|t|) < {delta}. \
A common geodesic orbit needs gamma with (gamma x)^-1 y diagonal; none of the {} elements of the ball of radius {} gives one \
(smallest off-diagonal entry {:e}). Non-trivial group elements have trace at least 2 + eps* = {:.12}, so none is parabolic.",
        search.ball_size,
        search.radius,
        search.min_offdiagonal,
        2.0 + trace_gap,
        o = if direction == Direction::Positive { "b" } else { "c" },
    );
    Ok(GeodesicSepCertificate {
        delta,
        direction,
        s,
        x: x.entries(),
        y: y.entries(),
        decay,
        max_excess,
        nonincreasing,
        search,
        tried,
        trace_gap,
        argument,
        certified,
    })
}
