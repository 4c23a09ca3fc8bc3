//! Distance to the identity by geodesic shooting.
//!
//! The boundary value problem `exp_geo(v) = target` is solved by damped
//! Newton iteration on the residual `log(exp_geo(v)⁻¹·target)`, starting
//! from the one-parameter logarithm of the target and, when the result is
//! longer than the trust radius, from seeded random starts as well.

use rand::Rng;

use super::{AlgebraVector, GroupMetric};
use crate::error::{Error, Result};
use crate::sampling;
use crate::sl2::GroupElement;

const NEWTON_MAX_ITER: usize = 50;
const NEWTON_RESIDUAL: f64 = 1e-11;
const FD_STEP: f64 = 1e-7;

/// Outcome of a distance computation with its uncertainty bracket.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DistanceReport {
    /// Length of the shortest geodesic found.
    pub value: f64,
    /// Initial body velocity of that geodesic (unit time).
    pub velocity: AlgebraVector,
    /// Frobenius gap between the shot endpoint and the target.
    pub mismatch: f64,
    /// Path-oracle upper bound, when the cross-check ran.
    pub oracle_upper: Option<f64>,
    /// True when the value lies inside the trust radius and was accepted
    /// from the logarithm start alone.
    pub trusted: bool,
    pub starts_tried: usize,
}

fn solve3(j: &[[f64; 3]; 3], r: [f64; 3]) -> Option<[f64; 3]> {
    let det = j[0][0] * (j[1][1] * j[2][2] - j[1][2] * j[2][1])
        - j[0][1] * (j[1][0] * j[2][2] - j[1][2] * j[2][0])
        + j[0][2] * (j[1][0] * j[2][1] - j[1][1] * j[2][0]);
    if !det.is_finite() || det.abs() < 1e-14 {
        return None;
    }
    let mut out = [0.0; 3];
    for (c, o) in out.iter_mut().enumerate() {
        let mut m = *j;
        for row in 0..3 {
            m[row][c] = r[row];
        }
        let d = m[0][0] * (m[1][1] * m[2][2] - m[1][2] * m[2][1])
            - m[0][1] * (m[1][0] * m[2][2] - m[1][2] * m[2][0])
            + m[0][2] * (m[1][0] * m[2][1] - m[1][1] * m[2][0]);
        *o = d / det;
    }
    Some(out)
}

impl GroupMetric {
    fn residual(&self, v: AlgebraVector, steps: usize, target: &GroupElement) -> Result<AlgebraVector> {
        let end = self.exp_geodesic_steps(v, steps)?;
        Ok(AlgebraVector::log(&end.left_divide(target)))
    }

    /// Damped Newton from `v`. Returns the converged velocity.
    fn newton(&self, target: &GroupElement, mut v: AlgebraVector) -> Option<AlgebraVector> {
        for _ in 0..NEWTON_MAX_ITER {
            let steps = self.steps_for(v.norm() * 1.25 + 0.05);
            let r = self.residual(v, steps, target).ok()?;
            let rn = r.norm();
            if rn < NEWTON_RESIDUAL {
                return Some(v);
            }
            let mut jac = [[0.0; 3]; 3];
            for k in 0..3 {
                let mut dv = [0.0; 3];
                dv[k] = FD_STEP;
                let rk = self
                    .residual(v + AlgebraVector::from_array(dv), steps, target)
                    .ok()?;
                let col = ((rk - r) * (1.0 / FD_STEP)).to_array();
                for row in 0..3 {
                    jac[row][k] = col[row];
                }
            }
            let delta = AlgebraVector::from_array(solve3(&jac, (-r).to_array())?);
            let mut lambda = 1.0;
            loop {
                let cand = v + delta * lambda;
                let ok = self
                    .residual(cand, steps, target)
                    .map(|rc| rc.norm() < rn)
                    .unwrap_or(false);
                if ok {
                    v = cand;
                    break;
                }
                lambda *= 0.5;
                if lambda < 1e-4 {
                    // residual floor reached
                    return (rn < 1e3 * NEWTON_RESIDUAL).then_some(v);
                }
            }
        }
        None
    }

    fn report(&self, target: &GroupElement, v: AlgebraVector) -> (f64, f64) {
        let mismatch = self
            .exp_geodesic(v)
            .map(|e| e.left_divide(target).frobenius_gap())
            .unwrap_or(f64::INFINITY);
        (v.norm(), mismatch)
    }

    fn seed_for(&self, target: &GroupElement) -> u64 {
        target
            .entries()
            .iter()
            .fold(self.config.seed, |h, x| h.rotate_left(17) ^ x.to_bits())
    }

    /// Riemannian distance from `e` to `target`.
    pub fn dist_to_identity(&self, target: &GroupElement) -> Result<DistanceReport> {
        let v_log = AlgebraVector::log(target);
        let mut best: Option<AlgebraVector> = self.newton(target, v_log);
        let mut starts = 1;
        if let Some(v) = best {
            if v.norm() < self.config.trust_radius {
                let (value, mismatch) = self.report(target, v);
                return Ok(DistanceReport {
                    value,
                    velocity: v,
                    mismatch,
                    oracle_upper: None,
                    trusted: true,
                    starts_tried: starts,
                });
            }
        }

        let oracle = self.path_energy_upper_bound(target, self.config.oracle_waypoints);
        let mut rng = sampling::rng(self.seed_for(target), 0);
        let scale = v_log.norm().max(0.1);
        let rounds = [self.config.shoot_restarts, 4 * self.config.shoot_restarts];
        for &count in &rounds {
            for _ in 0..count {
                let dir = AlgebraVector::random_unit(&mut rng);
                let radius = scale * rng.gen_range(0.5..1.5);
                starts += 1;
                if let Some(v) = self.newton(target, dir * radius) {
                    if best.map_or(true, |b| v.norm() < b.norm()) {
                        best = Some(v);
                    }
                }
            }
            if let Some(v) = best {
                if v.norm() <= oracle + self.config.xcheck_tol {
                    let (value, mismatch) = self.report(target, v);
                    return Ok(DistanceReport {
                        value,
                        velocity: v,
                        mismatch,
                        oracle_upper: Some(oracle),
                        trusted: false,
                        starts_tried: starts,
                    });
                }
            }
        }
        Err(Error::Nonconvergence {
            best_upper: best.map_or(oracle, |b| b.norm().min(oracle)),
        })
    }
}

#[cfg(test)]
mod tests {
    use super::super::MetricConfig;
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn metric() -> GroupMetric {
        GroupMetric::new(MetricConfig::default()).unwrap()
    }

    #[test]
    fn diagonal_distances() {
        let m = metric();
        for t in [0.1, 0.5, 1.0, 2.0, 3.0, -1.5] {
            let d = m.distance(&GroupElement::a(t), &GroupElement::IDENTITY).unwrap();
            assert_abs_diff_eq!(d, t.abs() / SQRT_2, epsilon = 1e-8);
        }
    }

    #[test]
    fn unipotent_distances() {
        // reference values from an independent integration of the closed-form geodesic
        let m = metric();
        for (t, want) in [(0.5, 0.49006), (1.0, 0.92974), (2.0, 1.60646)] {
            let db = m.distance(&GroupElement::b(t), &GroupElement::IDENTITY).unwrap();
            let dc = m.distance(&GroupElement::c(t), &GroupElement::IDENTITY).unwrap();
            assert_abs_diff_eq!(db, want, epsilon = 1e-4);
            assert_abs_diff_eq!(db, dc, epsilon = 1e-8);
            assert!(dc < t - 1e-3);
        }
    }

    #[test]
    fn identity_distance_is_zero() {
        let m = metric();
        assert_eq!(m.distance(&GroupElement::IDENTITY, &GroupElement::IDENTITY).unwrap(), 0.0);
    }

    #[test]
    fn shooting_beats_the_oracle() {
        let m = metric();
        let mut rng = sampling::rng(5, 1);
        for _ in 0..10 {
            let g = sampling::random_element(&mut rng, 2.5);
            let r = m.dist_to_identity(&g).unwrap();
            assert!(r.mismatch < 1e-9);
            let oracle = m.path_energy_upper_bound(&g, 8);
            assert!(r.value <= oracle + 1e-6, "{} > {}", r.value, oracle);
        }
    }

    #[test]
    fn solve3_inverts() {
        let j = [[2.0, 1.0, 0.0], [0.0, 3.0, 1.0], [1.0, 0.0, 1.0]];
        let x = solve3(&j, [3.0, 4.0, 2.0]).unwrap();
        for row in 0..3 {
            let lhs: f64 = (0..3).map(|c| j[row][c] * x[c]).sum();
            assert_abs_diff_eq!(lhs, [3.0, 4.0, 2.0][row], epsilon = 1e-12);
        }
    }
}
