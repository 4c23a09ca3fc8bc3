//! The left-invariant Riemannian metric on PSL(2,ℝ) generated by the
//! inner product `⟨X, Y⟩ = tr(XᵀY)` on the Lie algebra.
//!
//! Geodesics are integrated in body form: the body velocity `Ω = g⁻¹ġ`
//! obeys the Euler–Arnold equation `Ω̇ = ad*_Ω Ω`, where
//! `⟨ad*_X Y, Z⟩ = ⟨Y, [X, Z]⟩`, and the group point follows `ġ = g·Ω`.
//! Distances are found by shooting and cross-checked against an
//! independent piecewise-path upper bound ([`GroupMetric::path_energy_upper_bound`]).

mod calibration;
mod oracle;
mod shooting;

use std::f64::consts::FRAC_1_SQRT_2;
use std::ops::{Add, Mul, Neg, Sub};
use std::sync::OnceLock;

use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sl2::{GroupElement, Matrix2, Tolerances, DET_RENORMALIZE_LIMIT};

pub use calibration::{CalibrationKind, CalibrationTable};
pub use shooting::DistanceReport;

/// Name written into calibration file headers.
pub const METRIC_NAME: &str = "left-invariant tr(X^T Y)";

/// Orthonormal basis `E1 = diag(1,−1)/√2`, `E2 = [[0,1],[1,0]]/√2`,
/// `E3 = [[0,1],[−1,0]]/√2` of the traceless matrices.
pub const BASIS: [Matrix2; 3] = [
    Matrix2::raw(FRAC_1_SQRT_2, 0.0, 0.0, -FRAC_1_SQRT_2),
    Matrix2::raw(0.0, FRAC_1_SQRT_2, FRAC_1_SQRT_2, 0.0),
    Matrix2::raw(0.0, FRAC_1_SQRT_2, -FRAC_1_SQRT_2, 0.0),
];

/// Lie algebra inner product `tr(XᵀY)`.
pub fn matrix_inner(x: &Matrix2, y: &Matrix2) -> f64 {
    x.a11 * y.a11 + x.a12 * y.a12 + x.a21 * y.a21 + x.a22 * y.a22
}

fn commutator(x: &Matrix2, y: &Matrix2) -> Matrix2 {
    x.mul(y).sub(&y.mul(x))
}

/// A tangent vector at the identity in the basis [`BASIS`].
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct AlgebraVector {
    pub w1: f64,
    pub w2: f64,
    pub w3: f64,
}

impl AlgebraVector {
    pub const ZERO: AlgebraVector = AlgebraVector {
        w1: 0.0,
        w2: 0.0,
        w3: 0.0,
    };

    pub const fn new(w1: f64, w2: f64, w3: f64) -> Self {
        AlgebraVector { w1, w2, w3 }
    }

    pub fn from_array(w: [f64; 3]) -> Self {
        AlgebraVector::new(w[0], w[1], w[2])
    }

    pub fn to_array(self) -> [f64; 3] {
        [self.w1, self.w2, self.w3]
    }

    /// Orthogonal projection of a traceless matrix onto the basis.
    pub fn from_matrix(m: &Matrix2) -> Self {
        AlgebraVector::new(
            matrix_inner(m, &BASIS[0]),
            matrix_inner(m, &BASIS[1]),
            matrix_inner(m, &BASIS[2]),
        )
    }

    pub fn to_matrix(self) -> Matrix2 {
        BASIS[0]
            .scale(self.w1)
            .add(&BASIS[1].scale(self.w2))
            .add(&BASIS[2].scale(self.w3))
    }

    pub fn dot(self, o: AlgebraVector) -> f64 {
        self.w1 * o.w1 + self.w2 * o.w2 + self.w3 * o.w3
    }

    pub fn norm(self) -> f64 {
        self.dot(self).sqrt()
    }

    /// One-parameter subgroup element `exp(X)`.
    pub fn exp(self) -> GroupElement {
        GroupElement::from_matrix(crate::sl2::exp_traceless(&self.to_matrix()))
    }

    /// Logarithm of the canonical representative.
    pub fn log(g: &GroupElement) -> Self {
        AlgebraVector::from_matrix(&crate::sl2::log(g))
    }

    pub fn random_unit<R: Rng>(rng: &mut R) -> Self {
        loop {
            let v = AlgebraVector::new(
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
                rng.gen_range(-1.0..1.0),
            );
            let n = v.norm();
            if n > 1e-3 && n <= 1.0 {
                return v * (1.0 / n);
            }
        }
    }
}

impl Add for AlgebraVector {
    type Output = AlgebraVector;
    fn add(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.w1 + o.w1, self.w2 + o.w2, self.w3 + o.w3)
    }
}

impl Sub for AlgebraVector {
    type Output = AlgebraVector;
    fn sub(self, o: AlgebraVector) -> AlgebraVector {
        AlgebraVector::new(self.w1 - o.w1, self.w2 - o.w2, self.w3 - o.w3)
    }
}

impl Mul<f64> for AlgebraVector {
    type Output = AlgebraVector;
    fn mul(self, k: f64) -> AlgebraVector {
        AlgebraVector::new(self.w1 * k, self.w2 * k, self.w3 * k)
    }
}

impl Neg for AlgebraVector {
    type Output = AlgebraVector;
    fn neg(self) -> AlgebraVector {
        self * -1.0
    }
}

/// `c[i][j][k]` with `[Ei, Ej] = Σ_k c[i][j][k] Ek`.
pub type StructureConstants = [[[f64; 3]; 3]; 3];

pub fn structure_constants() -> StructureConstants {
    let mut c = [[[0.0; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            let br = commutator(&BASIS[i], &BASIS[j]);
            for k in 0..3 {
                c[i][j][k] = matrix_inner(&br, &BASIS[k]);
            }
        }
    }
    c
}

/// `ad*_X Y` defined by `⟨ad*_X Y, Z⟩ = ⟨Y, [X, Z]⟩`.
pub fn coadjoint(c: &StructureConstants, x: AlgebraVector, y: AlgebraVector) -> AlgebraVector {
    let (xa, ya) = (x.to_array(), y.to_array());
    let mut out = [0.0; 3];
    for (k, o) in out.iter_mut().enumerate() {
        let mut acc = 0.0;
        for i in 0..3 {
            for j in 0..3 {
                acc += xa[i] * ya[j] * c[i][k][j];
            }
        }
        *o = acc;
    }
    AlgebraVector::from_array(out)
}

/// Numerical settings for geodesics, shooting, the path oracle and the
/// calibration tables.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MetricConfig {
    /// RK4 steps per unit of arc length.
    pub ode_steps: usize,
    pub min_steps: usize,
    pub shoot_restarts: usize,
    /// Below this length a converged shooting solution is accepted without
    /// restarts or the path oracle.
    pub trust_radius: f64,
    pub oracle_waypoints: usize,
    pub xcheck_tol: f64,
    pub ode_tol: f64,
    /// Multiplier applied to the sampled Lipschitz constant of `g ↦ g·i`.
    pub kappa_safety: f64,
    pub calibration_samples: usize,
    pub seed: u64,
    pub tol: Tolerances,
}

impl Default for MetricConfig {
    fn default() -> Self {
        MetricConfig {
            ode_steps: 256,
            min_steps: 16,
            shoot_restarts: 8,
            trust_radius: 1.0,
            oracle_waypoints: 8,
            xcheck_tol: 1e-6,
            ode_tol: 1e-8,
            kappa_safety: 1.05,
            calibration_samples: 3000,
            seed: 42,
            tol: Tolerances::default(),
        }
    }
}

/// A sampled geodesic with its body velocity history.
#[derive(Debug, Clone)]
pub struct GeodesicArc {
    pub start: GroupElement,
    pub initial_body_velocity: AlgebraVector,
    pub duration: f64,
    pub sampled_points: Vec<(f64, GroupElement)>,
    pub body_velocities: Vec<AlgebraVector>,
}

impl GeodesicArc {
    pub fn endpoint(&self) -> GroupElement {
        self.sampled_points.last().map(|p| p.1).unwrap_or(self.start)
    }

    pub fn arc_length(&self) -> f64 {
        self.duration * self.initial_body_velocity.norm()
    }
}

pub struct GroupMetric {
    config: MetricConfig,
    structure: StructureConstants,
    gap_to_distance: OnceLock<CalibrationTable>,
    distance_to_gap: OnceLock<CalibrationTable>,
    kappa: OnceLock<f64>,
}

impl std::fmt::Debug for GroupMetric {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("GroupMetric")
            .field("config", &self.config)
            .finish()
    }
}

impl GroupMetric {
    /// Builds the metric and checks that the diagonal subgroup generator
    /// `H = diag(1/2, −1/2)` satisfies `ad*_H H = 0`, i.e. `t ↦ a_t` is a
    /// geodesic under the Euler–Arnold convention in use.
    pub fn new(config: MetricConfig) -> Result<Self> {
        if config.ode_steps == 0 || config.min_steps == 0 || config.oracle_waypoints < 2 {
            return Err(Error::InvalidArgument(
                "step counts must be positive and waypoints >= 2".into(),
            ));
        }
        let structure = structure_constants();
        let h = AlgebraVector::from_matrix(&Matrix2::raw(0.5, 0.0, 0.0, -0.5));
        let drift = coadjoint(&structure, h, h).norm();
        if drift > 1e-14 {
            return Err(Error::InvalidArgument(format!(
                "Euler-Arnold convention rejects the diagonal geodesic (|ad*_H H| = {drift:e})"
            )));
        }
        Ok(GroupMetric {
            config,
            structure,
            gap_to_distance: OnceLock::new(),
            distance_to_gap: OnceLock::new(),
            kappa: OnceLock::new(),
        })
    }

    pub fn config(&self) -> &MetricConfig {
        &self.config
    }

    pub fn structure(&self) -> &StructureConstants {
        &self.structure
    }

    fn euler_arnold(&self, omega: AlgebraVector) -> AlgebraVector {
        coadjoint(&self.structure, omega, omega)
    }

    /// Step count for an arc of the given length.
    pub fn steps_for(&self, length: f64) -> usize {
        let n = (length * self.config.ode_steps as f64).ceil() as usize;
        n.max(self.config.min_steps)
    }

    /// One RK4 step of the coupled system `(Ω̇, ġ) = (ad*_Ω Ω, g·Ω)`.
    fn rk4_step(&self, omega: AlgebraVector, g: Matrix2, h: f64) -> (AlgebraVector, Matrix2) {
        let f = |w: AlgebraVector, m: Matrix2| (self.euler_arnold(w), m.mul(&w.to_matrix()));
        let (k1w, k1g) = f(omega, g);
        let (k2w, k2g) = f(omega + k1w * (h / 2.0), g.add(&k1g.scale(h / 2.0)));
        let (k3w, k3g) = f(omega + k2w * (h / 2.0), g.add(&k2g.scale(h / 2.0)));
        let (k4w, k4g) = f(omega + k3w * h, g.add(&k3g.scale(h)));
        let w = omega + (k1w + k2w * 2.0 + k3w * 2.0 + k4w) * (h / 6.0);
        let m = g.add(
            &k1g.add(&k2g.scale(2.0))
                .add(&k3g.scale(2.0))
                .add(&k4g)
                .scale(h / 6.0),
        );
        (w, m)
    }

    fn renormalize(m: Matrix2) -> Result<Matrix2> {
        let det = m.det();
        let drift = (det - 1.0).abs();
        if !det.is_finite() || drift > DET_RENORMALIZE_LIMIT {
            return Err(Error::SolverDivergence { drift });
        }
        Ok(m.scale(1.0 / det.sqrt()))
    }

    /// Integrates the geodesic from `g0` with initial body velocity `v0`
    /// over `[0, duration]` using `steps` fixed RK4 steps.
    pub fn geodesic_shoot(
        &self,
        g0: &GroupElement,
        v0: AlgebraVector,
        duration: f64,
        steps: usize,
    ) -> Result<GeodesicArc> {
        if !(duration >= 0.0) || steps == 0 {
            return Err(Error::InvalidArgument(format!(
                "geodesic_shoot needs duration >= 0 and steps >= 1 (got {duration}, {steps})"
            )));
        }
        let h = duration / steps as f64;
        let mut omega = v0;
        let mut g = *g0.rep();
        let mut sampled_points = Vec::with_capacity(steps + 1);
        let mut body_velocities = Vec::with_capacity(steps + 1);
        sampled_points.push((0.0, *g0));
        body_velocities.push(omega);
        for k in 1..=steps {
            let (w, m) = self.rk4_step(omega, g, h);
            omega = w;
            g = Self::renormalize(m)?;
            sampled_points.push((k as f64 * h, GroupElement::from_matrix(g)));
            body_velocities.push(omega);
        }
        Ok(GeodesicArc {
            start: *g0,
            initial_body_velocity: v0,
            duration,
            sampled_points,
            body_velocities,
        })
    }

    /// Endpoint of the unit-time geodesic from `e` with initial velocity `v`.
    pub fn exp_geodesic(&self, v: AlgebraVector) -> Result<GroupElement> {
        self.exp_geodesic_steps(v, self.steps_for(v.norm()))
    }

    pub(crate) fn exp_geodesic_steps(&self, v: AlgebraVector, steps: usize) -> Result<GroupElement> {
        let h = 1.0 / steps as f64;
        let mut omega = v;
        let mut g = Matrix2::IDENTITY;
        for _ in 0..steps {
            let (w, m) = self.rk4_step(omega, g, h);
            omega = w;
            g = Self::renormalize(m)?;
        }
        Ok(GroupElement::from_matrix(g))
    }

    /// `d_G(x, y) = dist_to_identity(x⁻¹·y)`.
    pub fn distance(&self, x: &GroupElement, y: &GroupElement) -> Result<f64> {
        Ok(self.dist_to_identity(&x.left_divide(y))?.value)
    }

    /// Sampled upper Lipschitz constant `κ` of the base-point projection
    /// `g ↦ g·i` from `d_G` to the hyperbolic metric, times `kappa_safety`.
    pub fn base_lipschitz(&self) -> f64 {
        *self.kappa.get_or_init(|| {
            let mut rng = ChaCha8Rng::seed_from_u64(self.config.seed ^ 0x6b61_7070_61);
            let mut worst: f64 = 0.0;
            for _ in 0..256 {
                let v = AlgebraVector::random_unit(&mut rng);
                let g0 = crate::sampling::random_element(&mut rng, 2.0);
                let steps = 64;
                let arc = match self.geodesic_shoot(&g0, v * 0.5, 1.0, steps) {
                    Ok(a) => a,
                    Err(_) => continue,
                };
                let seg = 0.5 / steps as f64;
                for pair in arc.sampled_points.windows(2) {
                    let (p, q) = (pair[0].1.base_point(), pair[1].1.base_point());
                    worst = worst.max(p.distance(&q) / seg);
                }
            }
            worst * self.config.kappa_safety
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;
    use std::f64::consts::SQRT_2;

    fn metric() -> GroupMetric {
        GroupMetric::new(MetricConfig::default()).unwrap()
    }

    /// Closed-form geodesic through `e` for this metric:
    /// `g(t) = exp(tΩᵀ)·exp(t(Ω − Ωᵀ))`.
    fn closed_form(v: AlgebraVector, t: f64) -> GroupElement {
        let m = v.to_matrix();
        let first = crate::sl2::exp_traceless(&m.transpose().scale(t));
        let second = crate::sl2::exp_traceless(&m.sub(&m.transpose()).scale(t));
        GroupElement::from_matrix(first.mul(&second))
    }

    #[test]
    fn basis_is_orthonormal() {
        for i in 0..3 {
            for j in 0..3 {
                let expected = if i == j { 1.0 } else { 0.0 };
                assert_abs_diff_eq!(matrix_inner(&BASIS[i], &BASIS[j]), expected, epsilon = 1e-15);
            }
        }
    }

    #[test]
    fn structure_constant_values() {
        let c = structure_constants();
        // [E1,E2] = √2 E3, [E1,E3] = √2 E2, [E2,E3] = −√2 E1
        assert_abs_diff_eq!(c[0][1][2], SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(c[0][2][1], SQRT_2, epsilon = 1e-15);
        assert_abs_diff_eq!(c[1][2][0], -SQRT_2, epsilon = 1e-15);
        for i in 0..3 {
            for j in 0..3 {
                for k in 0..3 {
                    assert_abs_diff_eq!(c[i][j][k], -c[j][i][k], epsilon = 1e-15);
                }
            }
        }
        for i in 0..3 {
            assert!(c[i][i].iter().all(|x| *x == 0.0));
        }
    }

    #[test]
    fn coadjoint_matches_transpose_commutator() {
        // for this inner product ad*_Ω Ω = [Ωᵀ, Ω]
        let c = structure_constants();
        let w = AlgebraVector::new(0.3, -1.2, 0.7);
        let m = w.to_matrix();
        let direct = AlgebraVector::from_matrix(&commutator(&m.transpose(), &m));
        let via = coadjoint(&c, w, w);
        assert!((direct - via).norm() < 1e-14);
    }

    #[test]
    fn unipotent_generator_is_not_geodesic() {
        let c = structure_constants();
        let n_plus = AlgebraVector::from_matrix(&Matrix2::raw(0.0, 1.0, 0.0, 0.0));
        assert_abs_diff_eq!(n_plus.norm(), 1.0, epsilon = 1e-15);
        assert!(coadjoint(&c, n_plus, n_plus).norm() > 0.5);
    }

    #[test]
    fn diagonal_geodesic_reaches_a_t() {
        let m = metric();
        let h = AlgebraVector::from_matrix(&Matrix2::raw(0.5, 0.0, 0.0, -0.5));
        assert_abs_diff_eq!(h.norm(), FRAC_1_SQRT_2, epsilon = 1e-15);
        for t in [0.5, 1.0, 2.5] {
            let arc = m
                .geodesic_shoot(&GroupElement::IDENTITY, h, t, m.steps_for(t))
                .unwrap();
            assert!(arc.endpoint().approx_eq(&GroupElement::a(t), 1e-12));
            assert_abs_diff_eq!(arc.arc_length(), t / SQRT_2, epsilon = 1e-15);
        }
    }

    #[test]
    fn zero_velocity_stays_put() {
        let m = metric();
        let arc = m
            .geodesic_shoot(&GroupElement::IDENTITY, AlgebraVector::ZERO, 3.0, 10)
            .unwrap();
        assert_eq!(arc.endpoint(), GroupElement::IDENTITY);
    }

    #[test]
    fn shooting_matches_closed_form_geodesic() {
        let m = metric();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..20 {
            let v = AlgebraVector::random_unit(&mut rng) * rng.gen_range(0.1..2.5);
            let end = m.exp_geodesic(v).unwrap();
            assert!(end.approx_eq(&closed_form(v, 1.0), 1e-9), "{v:?}");
        }
    }

    #[test]
    fn body_speed_is_conserved() {
        let m = metric();
        let v = AlgebraVector::new(0.4, -0.9, 1.3);
        let arc = m
            .geodesic_shoot(&GroupElement::b(0.3), v, 2.0, 800)
            .unwrap();
        let n0 = v.norm();
        for w in &arc.body_velocities {
            assert!((w.norm() - n0).abs() < 1e-8);
        }
    }

    #[test]
    fn halving_the_step_changes_endpoints_below_1e9() {
        let m = metric();
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for _ in 0..20 {
            let v = AlgebraVector::random_unit(&mut rng) * rng.gen_range(0.05..3.0);
            let n = m.steps_for(v.norm());
            let coarse = m.geodesic_shoot(&GroupElement::IDENTITY, v, 1.0, n).unwrap();
            let fine = m
                .geodesic_shoot(&GroupElement::IDENTITY, v, 1.0, 2 * n)
                .unwrap();
            let diff = coarse.endpoint().rep().max_abs_diff(fine.endpoint().rep());
            assert!(diff < 1e-9, "|v| = {}: {diff:e}", v.norm());
        }
    }

    #[test]
    fn invalid_shoot_arguments() {
        let m = metric();
        assert!(m
            .geodesic_shoot(&GroupElement::IDENTITY, AlgebraVector::ZERO, -1.0, 4)
            .is_err());
        assert!(m
            .geodesic_shoot(&GroupElement::IDENTITY, AlgebraVector::ZERO, 1.0, 0)
            .is_err());
    }

    #[test]
    fn base_projection_lipschitz_constant() {
        // the projection scales horizontal speed by exactly √2
        let k = metric().base_lipschitz();
        assert!(k >= SQRT_2 && k < SQRT_2 * 1.06, "kappa = {k}");
    }
}
