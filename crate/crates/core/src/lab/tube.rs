//! Walking two orbits side by side and watching their quotient distance.
//!
//! Both orbits are followed through reduced representatives, advanced step
//! by step, so matrices stay small over long windows. The element `γ` found
//! at time zero gives `K = (γx)⁻¹y`; while the pair stays close the distance
//! of the closed-form conjugate of `K` must match the quotient distance,
//! which is how a change of `γ` along the way would be detected.

use std::f64::consts::SQRT_2;

use crate::error::Result;
use crate::flows::FlowKind;
use crate::fuchsian::{FuchsianGroup, QuotientDistance, QuotientPoint, Within};
use crate::metric::GroupMetric;
use crate::sl2::{conj_by_geodesic, conj_by_horocycle, GroupElement, Matrix2};

/// Slack allowed between the closed-form distance and the quotient distance.
pub const CONSISTENCY_TOL: f64 = 1e-5;

/// Longest window over which the geodesic flow is followed: rounding of
/// order 1e−16 grows like `e^{|t|}`, reaching 5e−8 at this length.
pub const GEODESIC_HORIZON: f64 = 20.0;

/// One grid time: `(t, base time on the x orbit, base time on the y orbit)`.
pub(crate) type GridPoint = (f64, f64, f64);

#[derive(Debug, Clone)]
pub(crate) struct Stay {
    pub gamma0: QuotientDistance,
    pub k: Matrix2,
    pub max_distance: f64,
    /// Largest `|d_G(conj K) − d_X|` seen along the walk.
    pub consistency: f64,
    /// First grid time at which the closed form disagreed with `d_X`.
    pub gamma_jump: Option<f64>,
    pub radius_used: f64,
    pub grid_points: usize,
}

#[derive(Debug, Clone)]
pub(crate) enum Tube {
    Exited {
        t: f64,
        lower_bound: f64,
        radius_used: f64,
    },
    Stayed(Stay),
}

/// `u(−p)·K·u(q)` for the one-parameter group of `kind`.
pub(crate) fn conjugate(kind: FlowKind, k: &Matrix2, p: f64, q: f64) -> Matrix2 {
    match kind {
        FlowKind::Geodesic => conj_by_geodesic(k, p, q),
        FlowKind::StableHorocycle => conj_by_horocycle(k, q, p),
        FlowKind::UnstableHorocycle => {
            let u = |t: f64| *kind.element(t).rep();
            u(-p).mul(k).mul(&u(q))
        }
    }
}

/// `K = (γ·x)⁻¹·y` with the sign fixed by `trace ≥ 0`.
pub(crate) fn k_matrix(gamma: &GroupElement, x: &GroupElement, y: &GroupElement) -> Matrix2 {
    *gamma.mul(x).left_divide(y).rep()
}

pub(crate) fn walk(
    group: &FuchsianGroup,
    metric: &GroupMetric,
    kind: FlowKind,
    x: &GroupElement,
    y: &GroupElement,
    sweeps: &[Vec<GridPoint>],
    radius: f64,
) -> Result<Tube> {
    let start = group.quotient_distance_within(metric, &QuotientPoint::new(*x), &QuotientPoint::new(*y), radius)?;
    let gamma0 = match start {
        Within::Inside(q) => q,
        Within::Outside {
            lower_bound,
            radius_used,
        } => {
            return Ok(Tube::Exited {
                t: 0.0,
                lower_bound,
                radius_used,
            })
        }
    };
    let k = k_matrix(&gamma0.gamma, x, y);
    let rx0 = group.try_reduce(x)?.reduced;
    let ry0 = group.try_reduce(y)?.reduced;
    let mut stay = Stay {
        max_distance: gamma0.value,
        consistency: 0.0,
        gamma_jump: None,
        radius_used: gamma0.radius_used,
        grid_points: 1,
        gamma0,
        k,
    };
    for sweep in sweeps {
        let (mut wx, mut wy) = (rx0, ry0);
        let (mut px, mut py) = (0.0, 0.0);
        for &(t, qx, qy) in sweep {
            if t == 0.0 {
                continue;
            }
            wx = group.try_reduce(&wx.mul(&kind.element(qx - px)))?.reduced;
            wy = group.try_reduce(&wy.mul(&kind.element(qy - py)))?.reduced;
            px = qx;
            py = qy;
            let here = group.quotient_distance_within(metric, &QuotientPoint::new(wx), &QuotientPoint::new(wy), radius)?;
            let d = match here {
                Within::Inside(q) => {
                    stay.radius_used = stay.radius_used.max(q.radius_used);
                    q.value
                }
                Within::Outside {
                    lower_bound,
                    radius_used,
                } => {
                    return Ok(Tube::Exited {
                        t,
                        lower_bound,
                        radius_used,
                    })
                }
            };
            stay.grid_points += 1;
            stay.max_distance = stay.max_distance.max(d);
            let closed = GroupElement::from_matrix_renormalized(conjugate(kind, &k, qx, qy));
            let dk = if closed.displacement() / SQRT_2 > d + CONSISTENCY_TOL {
                f64::INFINITY
            } else {
                metric.dist_to_identity(&closed).map(|r| r.value).unwrap_or(f64::INFINITY)
            };
            let gap = (dk - d).abs();
            stay.consistency = stay.consistency.max(gap);
            if gap > CONSISTENCY_TOL && stay.gamma_jump.is_none() {
                stay.gamma_jump = Some(t);
            }
        }
    }
    Ok(Tube::Stayed(stay))
}

/// Grid `0, ±h, ±2h, …` up to `window` in the requested directions, each
/// sweep starting at zero.
pub(crate) fn time_grid(window: f64, step: f64, forward: bool, backward: bool) -> Vec<Vec<f64>> {
    let n = (window / step).round().max(1.0) as usize;
    let mut out = Vec::new();
    for (on, sign) in [(forward, 1.0), (backward, -1.0)] {
        if on {
            out.push((0..=n).map(|k| sign * (k as f64 * step).min(window)).collect());
        }
    }
    out
}
