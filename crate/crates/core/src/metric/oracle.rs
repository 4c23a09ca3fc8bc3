//! Independent upper bound on `d_G(e, target)` from piecewise
//! one-parameter paths, tightened by coordinate descent on the waypoints.

use super::{AlgebraVector, GroupMetric};
use crate::sl2::GroupElement;

const MIN_STEP: f64 = 1e-9;
const MAX_SWEEPS: usize = 4000;

fn piece(p: &GroupElement, q: &GroupElement) -> f64 {
    AlgebraVector::log(&p.left_divide(q)).norm()
}

impl GroupMetric {
    /// Length of a piecewise curve `e = p₀, p₁, …, p_n = target` where each
    /// piece `p_j → p_{j+1}` is the one-parameter curve `p_j·exp(s·X_j)`,
    /// `X_j = log(p_j⁻¹p_{j+1})`, of length `‖X_j‖`. Interior points are
    /// moved by `p_j ← p_j·exp(±h·E_k)` while the length decreases, with `h`
    /// halved on stagnation.
    pub fn path_energy_upper_bound(&self, target: &GroupElement, waypoints: usize) -> f64 {
        let n = waypoints.max(2);
        let x = AlgebraVector::log(target);
        let mut pts: Vec<GroupElement> = (0..=n)
            .map(|j| (x * (j as f64 / n as f64)).exp())
            .collect();
        pts[0] = GroupElement::IDENTITY;
        pts[n] = *target;
        let mut h = (x.norm() / n as f64).clamp(1e-3, 0.25);
        let mut sweeps = 0;
        while h > MIN_STEP && sweeps < MAX_SWEEPS {
            sweeps += 1;
            let mut improved = false;
            for j in 1..n {
                for k in 0..3 {
                    for sign in [1.0, -1.0] {
                        let mut dir = [0.0; 3];
                        dir[k] = sign * h;
                        let cand = pts[j].mul(&AlgebraVector::from_array(dir).exp());
                        let old = piece(&pts[j - 1], &pts[j]) + piece(&pts[j], &pts[j + 1]);
                        let new = piece(&pts[j - 1], &cand) + piece(&cand, &pts[j + 1]);
                        if new < old - 1e-15 {
                            pts[j] = cand;
                            improved = true;
                        }
                    }
                }
            }
            if !improved {
                h *= 0.5;
            }
        }
        pts.windows(2).map(|w| piece(&w[0], &w[1])).sum()
    }
}

#[cfg(test)]
mod tests {
    use super::super::MetricConfig;
    use super::*;
    use std::f64::consts::FRAC_1_SQRT_2;

    fn metric() -> GroupMetric {
        GroupMetric::new(MetricConfig::default()).unwrap()
    }

    #[test]
    fn identity_bound_is_zero() {
        assert_eq!(metric().path_energy_upper_bound(&GroupElement::IDENTITY, 4), 0.0);
    }

    #[test]
    fn diagonal_bound() {
        let b = metric().path_energy_upper_bound(&GroupElement::a(1.0), 8);
        assert!(b <= FRAC_1_SQRT_2 + 1e-3);
        assert!(b >= FRAC_1_SQRT_2 - 1e-9);
    }

    #[test]
    fn unipotent_bound_brackets_distance() {
        let m = metric();
        let b = m.path_energy_upper_bound(&GroupElement::b(1.0), 8);
        let d = m.distance(&GroupElement::IDENTITY, &GroupElement::b(1.0)).unwrap();
        assert!(b > 0.0 && b <= 1.0);
        assert!(d <= b + 1e-9);
        // the descent improves on the straight one-parameter path
        assert!(b < 1.0 - 1e-3);
    }
}
