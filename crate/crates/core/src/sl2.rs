//! Arithmetic in SL(2,ℝ) and PSL(2,ℝ).
//!
//! A [`GroupElement`] is a point of PSL(2,ℝ) stored as the canonical
//! representative of the pair ±G: trace non-negative, and at trace zero the
//! first nonzero entry among `a11, a12, a21` positive. All comparisons go
//! through explicit tolerances collected in [`Tolerances`].

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Determinant slack beyond which construction refuses to renormalize.
pub const DET_RENORMALIZE_LIMIT: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    /// Entrywise tolerance for element equality.
    pub eq: f64,
    /// Determinant slack accepted without renormalization.
    pub det: f64,
    /// Trace slack used by [`GroupElement::classify`].
    pub classify: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Tolerances {
            eq: 1e-9,
            det: 1e-12,
            classify: 1e-9,
        }
    }
}

/// A real 2×2 matrix. Constructed through [`Matrix2::new`] it has unit
/// determinant; the raw constructor is used for intermediate products.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Matrix2 {
    pub a11: f64,
    pub a12: f64,
    pub a21: f64,
    pub a22: f64,
}

impl Matrix2 {
    pub const IDENTITY: Matrix2 = Matrix2 {
        a11: 1.0,
        a12: 0.0,
        a21: 0.0,
        a22: 1.0,
    };

    /// Builds a unit-determinant matrix, renormalizing by `1/√det` when the
    /// determinant is off by more than `tol_det` but at most 1e-6.
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64, tol_det: f64) -> Result<Self> {
        let m = Matrix2::raw(a11, a12, a21, a22);
        let det = m.det();
        if !det.is_finite() || (det - 1.0).abs() > DET_RENORMALIZE_LIMIT {
            return Err(Error::Determinant { det });
        }
        if (det - 1.0).abs() > tol_det {
            Ok(m.scale(1.0 / det.sqrt()))
        } else {
            Ok(m)
        }
    }

    #[inline]
    pub const fn raw(a11: f64, a12: f64, a21: f64, a22: f64) -> Self {
        Matrix2 { a11, a12, a21, a22 }
    }

    pub fn from_array(e: [f64; 4]) -> Self {
        Matrix2::raw(e[0], e[1], e[2], e[3])
    }

    #[inline]
    pub fn entries(&self) -> [f64; 4] {
        [self.a11, self.a12, self.a21, self.a22]
    }

    #[inline]
    pub fn det(&self) -> f64 {
        self.a11 * self.a22 - self.a12 * self.a21
    }

    /// Signed trace `a11 + a22`.
    #[inline]
    pub fn trace(&self) -> f64 {
        self.a11 + self.a22
    }

    #[inline]
    pub fn mul(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::raw(
            self.a11 * o.a11 + self.a12 * o.a21,
            self.a11 * o.a12 + self.a12 * o.a22,
            self.a21 * o.a11 + self.a22 * o.a21,
            self.a21 * o.a12 + self.a22 * o.a22,
        )
    }

    /// Inverse of a unit-determinant matrix (the adjugate).
    #[inline]
    pub fn inverse_unimodular(&self) -> Matrix2 {
        Matrix2::raw(self.a22, -self.a12, -self.a21, self.a11)
    }

    #[inline]
    pub fn transpose(&self) -> Matrix2 {
        Matrix2::raw(self.a11, self.a21, self.a12, self.a22)
    }

    #[inline]
    pub fn scale(&self, k: f64) -> Matrix2 {
        Matrix2::raw(self.a11 * k, self.a12 * k, self.a21 * k, self.a22 * k)
    }

    #[inline]
    pub fn add(&self, o: &Matrix2) -> Matrix2 {
        Matrix2::raw(
            self.a11 + o.a11,
            self.a12 + o.a12,
            self.a21 + o.a21,
            self.a22 + o.a22,
        )
    }

    #[inline]
    pub fn sub(&self, o: &Matrix2) -> Matrix2 {
        self.add(&o.scale(-1.0))
    }

    #[inline]
    pub fn neg(&self) -> Matrix2 {
        self.scale(-1.0)
    }

    #[inline]
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.a11 * self.a11 + self.a12 * self.a12 + self.a21 * self.a21 + self.a22 * self.a22
    }

    pub fn max_abs_diff(&self, o: &Matrix2) -> f64 {
        self.entries()
            .iter()
            .zip(o.entries().iter())
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }

    /// `|a11−1| + |a12| + |a21| + |a22−1|` for this particular representative.
    pub fn gap_from_identity(&self) -> f64 {
        (self.a11 - 1.0).abs() + self.a12.abs() + self.a21.abs() + (self.a22 - 1.0).abs()
    }
}

impl fmt::Display for Matrix2 {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "[[{}, {}], [{}, {}]]",
            self.a11, self.a12, self.a21, self.a22
        )
    }
}

/// One-parameter subgroups of the matrix model.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum OneParameter {
    /// `A_t = diag(e^{t/2}, e^{−t/2})`.
    Geodesic,
    /// `B_t = [[1, t], [0, 1]]`.
    Stable,
    /// `C_t = [[1, 0], [t, 1]]`.
    Unstable,
}

impl OneParameter {
    pub fn matrix(self, t: f64) -> Matrix2 {
        match self {
            OneParameter::Geodesic => Matrix2::raw((t / 2.0).exp(), 0.0, 0.0, (-t / 2.0).exp()),
            OneParameter::Stable => Matrix2::raw(1.0, t, 0.0, 1.0),
            OneParameter::Unstable => Matrix2::raw(1.0, 0.0, t, 1.0),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Classification {
    Elliptic,
    Parabolic,
    Hyperbolic,
}

/// An element of PSL(2,ℝ) in canonical sign form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GroupElement {
    rep: Matrix2,
}

/// Trace magnitude below which the lexicographic sign rule applies.
const CANON_TRACE_TOL: f64 = 1e-12;

fn canonicalize(m: Matrix2) -> Matrix2 {
    let tr = m.trace();
    if tr > CANON_TRACE_TOL {
        return m;
    }
    if tr < -CANON_TRACE_TOL {
        return m.neg();
    }
    for x in [m.a11, m.a12, m.a21] {
        if x.abs() > CANON_TRACE_TOL {
            return if x > 0.0 { m } else { m.neg() };
        }
    }
    m
}

impl GroupElement {
    pub const IDENTITY: GroupElement = GroupElement {
        rep: Matrix2::IDENTITY,
    };

    pub fn identity() -> Self {
        Self::IDENTITY
    }

    /// Validates the determinant (see [`Matrix2::new`]) and canonicalizes.
    pub fn new(a11: f64, a12: f64, a21: f64, a22: f64, tol: &Tolerances) -> Result<Self> {
        Ok(Self::from_matrix(Matrix2::new(a11, a12, a21, a22, tol.det)?))
    }

    /// Canonicalizes a matrix assumed to be unimodular.
    #[inline]
    pub fn from_matrix(m: Matrix2) -> Self {
        GroupElement {
            rep: canonicalize(m),
        }
    }

    /// Canonicalizes after rescaling to unit determinant. Used to keep long
    /// product chains on the group.
    pub fn from_matrix_renormalized(m: Matrix2) -> Self {
        let det = m.det();
        Self::from_matrix(m.scale(1.0 / det.abs().sqrt()))
    }

    #[inline]
    pub fn rep(&self) -> &Matrix2 {
        &self.rep
    }

    #[inline]
    pub fn entries(&self) -> [f64; 4] {
        self.rep.entries()
    }

    pub fn one_param(kind: OneParameter, t: f64) -> Self {
        Self::from_matrix(kind.matrix(t))
    }

    pub fn a(t: f64) -> Self {
        Self::one_param(OneParameter::Geodesic, t)
    }

    pub fn b(t: f64) -> Self {
        Self::one_param(OneParameter::Stable, t)
    }

    pub fn c(t: f64) -> Self {
        Self::one_param(OneParameter::Unstable, t)
    }

    /// `[[cos θ, sin θ], [−sin θ, cos θ]]`; acts on the upper half-plane as a
    /// rotation about `i` by angle `2θ`.
    pub fn rotation(theta: f64) -> Self {
        let (s, c) = theta.sin_cos();
        Self::from_matrix(Matrix2::raw(c, s, -s, c))
    }

    #[inline]
    pub fn mul(&self, other: &GroupElement) -> GroupElement {
        Self::from_matrix(self.rep.mul(&other.rep))
    }

    #[inline]
    pub fn inverse(&self) -> GroupElement {
        Self::from_matrix(self.rep.inverse_unimodular())
    }

    /// `g⁻¹·h`.
    #[inline]
    pub fn left_divide(&self, h: &GroupElement) -> GroupElement {
        Self::from_matrix(self.rep.inverse_unimodular().mul(&h.rep))
    }

    /// `|a11 + a22|`, independent of the sign representative.
    #[inline]
    pub fn trace(&self) -> f64 {
        self.rep.trace().abs()
    }

    pub fn classify(&self, tol: f64) -> Classification {
        let tr = self.trace();
        if tr < 2.0 - tol {
            Classification::Elliptic
        } else if tr > 2.0 + tol {
            Classification::Hyperbolic
        } else {
            Classification::Parabolic
        }
    }

    /// Minimum over `±G` of `|g11−1| + |g12| + |g21| + |g22−1|`.
    pub fn frobenius_gap(&self) -> f64 {
        self.rep
            .gap_from_identity()
            .min(self.rep.neg().gap_from_identity())
    }

    /// Equality up to `tol` entrywise, comparing against both signs.
    pub fn approx_eq(&self, other: &GroupElement, tol: f64) -> bool {
        self.rep.max_abs_diff(&other.rep) <= tol || self.rep.max_abs_diff(&other.rep.neg()) <= tol
    }

    #[inline]
    pub fn frobenius_norm_sq(&self) -> f64 {
        self.rep.frobenius_norm_sq()
    }

    /// Hyperbolic distance `d_H(i, g·i)`, from `‖G‖²_F = 2 cosh d_H(i, G·i)`.
    #[inline]
    pub fn displacement(&self) -> f64 {
        (self.frobenius_norm_sq() / 2.0).max(1.0).acosh()
    }

    /// Translation length `2 arccosh(tr/2)` of a hyperbolic element, zero otherwise.
    pub fn translation_length(&self) -> f64 {
        let half = self.trace() / 2.0;
        if half > 1.0 {
            2.0 * half.acosh()
        } else {
            0.0
        }
    }

    /// Möbius action on the upper half-plane.
    pub fn act(&self, z: HalfPlanePoint) -> HalfPlanePoint {
        let Matrix2 { a11, a12, a21, a22 } = self.rep;
        // (a z + b)/(c z + d) with z = x + iy
        let (x, y) = (z.x, z.y);
        let den_re = a21 * x + a22;
        let den_im = a21 * y;
        let den = den_re * den_re + den_im * den_im;
        let num_re = a11 * x + a12;
        let num_im = a11 * y;
        HalfPlanePoint {
            x: (num_re * den_re + num_im * den_im) / den,
            y: (num_im * den_re - num_re * den_im) / den,
        }
    }

    /// Base point `g·i`.
    pub fn base_point(&self) -> HalfPlanePoint {
        self.act(HalfPlanePoint::I)
    }
}

impl fmt::Display for GroupElement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        self.rep.fmt(f)
    }
}

/// A point `x + iy` of the upper half-plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HalfPlanePoint {
    pub x: f64,
    pub y: f64,
}

impl HalfPlanePoint {
    pub const I: HalfPlanePoint = HalfPlanePoint { x: 0.0, y: 1.0 };

    /// `cosh d_H(z, w) = 1 + |z − w|² / (2 Im z Im w)`.
    pub fn distance(&self, w: &HalfPlanePoint) -> f64 {
        let dx = self.x - w.x;
        let dy = self.y - w.y;
        (1.0 + (dx * dx + dy * dy) / (2.0 * self.y * w.y)).acosh()
    }
}

/// `A_{−t}·K·A_s` in closed form.
pub fn conj_by_geodesic(k: &Matrix2, t: f64, s: f64) -> Matrix2 {
    Matrix2::raw(
        k.a11 * ((s - t) / 2.0).exp(),
        k.a12 * (-(s + t) / 2.0).exp(),
        k.a21 * ((s + t) / 2.0).exp(),
        k.a22 * ((t - s) / 2.0).exp(),
    )
}

/// `B_{−s2}·K·B_{s1}` in closed form.
pub fn conj_by_horocycle(k: &Matrix2, s1: f64, s2: f64) -> Matrix2 {
    let top = k.a11 - k.a21 * s2;
    Matrix2::raw(
        top,
        top * s1 - k.a22 * s2 + k.a12,
        k.a21,
        k.a21 * s1 + k.a22,
    )
}

/// Exponential of a traceless matrix, using `X² = −det(X)·I`.
pub fn exp_traceless(x: &Matrix2) -> Matrix2 {
    let q = -x.det();
    let (c, s) = if q > 1e-12 {
        let r = q.sqrt();
        (r.cosh(), r.sinh() / r)
    } else if q < -1e-12 {
        let r = (-q).sqrt();
        (r.cos(), r.sin() / r)
    } else {
        // series in q to third order
        (
            1.0 + q / 2.0 + q * q / 24.0,
            1.0 + q / 6.0 + q * q / 120.0,
        )
    };
    Matrix2::raw(c + s * x.a11, s * x.a12, s * x.a21, c + s * x.a22)
}

/// Principal logarithm of the canonical representative (trace ≥ 0), a
/// traceless matrix `X` with `exp(X) = rep`.
pub fn log(g: &GroupElement) -> Matrix2 {
    let m = g.rep();
    let half = m.trace() / 2.0;
    let d = half - 1.0;
    let factor = if d.abs() < 1e-8 {
        // μ/sinh μ (or θ/sin θ) with μ² ≈ 2(half − 1)
        1.0 - d / 3.0 + 2.0 * d * d / 45.0
    } else if half > 1.0 {
        let mu = half.acosh();
        mu / mu.sinh()
    } else {
        let theta = half.clamp(-1.0, 1.0).acos();
        theta / theta.sin()
    };
    Matrix2::raw(
        factor * (m.a11 - half),
        factor * m.a12,
        factor * m.a21,
        factor * (m.a22 - half),
    )
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    fn close(a: &GroupElement, b: &GroupElement) -> bool {
        a.approx_eq(b, 1e-12)
    }

    #[test]
    fn one_parameter_products() {
        assert!(close(&GroupElement::a(1.0).mul(&GroupElement::a(1.0)), &GroupElement::a(2.0)));
        assert!(close(&GroupElement::b(0.7).mul(&GroupElement::IDENTITY), &GroupElement::b(0.7)));
        let t = 4f64.ln();
        let conj = GroupElement::a(t)
            .mul(&GroupElement::b(1.0))
            .mul(&GroupElement::a(-t));
        assert!(conj.approx_eq(&GroupElement::b(4.0), 1e-12));
    }

    #[test]
    fn inverses() {
        assert!(close(&GroupElement::a(0.3).inverse(), &GroupElement::a(-0.3)));
        assert!(close(&GroupElement::b(2.5).inverse(), &GroupElement::b(-2.5)));
        assert_eq!(GroupElement::IDENTITY.inverse(), GroupElement::IDENTITY);
    }

    #[test]
    fn one_param_values() {
        assert_eq!(GroupElement::a(0.0), GroupElement::IDENTITY);
        assert_eq!(GroupElement::b(2.0).rep(), &Matrix2::raw(1.0, 2.0, 0.0, 1.0));
        let e = std::f64::consts::E;
        assert_abs_diff_eq!(GroupElement::a(2.0).trace(), e + 1.0 / e, epsilon = 1e-14);
        assert_abs_diff_eq!(GroupElement::a(2.0).trace(), 3.0862, epsilon = 1e-4);
    }

    #[test]
    fn traces_and_classification() {
        assert_eq!(GroupElement::b(17.0).trace(), 2.0);
        assert_eq!(GroupElement::IDENTITY.trace(), 2.0);
        assert_eq!(GroupElement::b(1.0).classify(1e-9), Classification::Parabolic);
        assert_eq!(GroupElement::a(1.0).classify(1e-9), Classification::Hyperbolic);
        let theta = std::f64::consts::PI / 8.0;
        assert_eq!(GroupElement::rotation(theta).classify(1e-9), Classification::Elliptic);
    }

    #[test]
    fn frobenius_gap_values() {
        assert_eq!(GroupElement::IDENTITY.frobenius_gap(), 0.0);
        assert_abs_diff_eq!(GroupElement::b(-0.37).frobenius_gap(), 0.37, epsilon = 1e-15);
        let t = 0.8f64;
        let expected = ((t / 2.0).exp() - 1.0).abs() + ((-t / 2.0).exp() - 1.0).abs();
        assert_abs_diff_eq!(GroupElement::a(t).frobenius_gap(), expected, epsilon = 1e-15);
        // −E₂ is the identity of PSL(2,ℝ)
        let minus = GroupElement::from_matrix(Matrix2::IDENTITY.neg());
        assert_eq!(minus.frobenius_gap(), 0.0);
    }

    #[test]
    fn canonical_sign_rules() {
        let g = GroupElement::from_matrix(Matrix2::raw(-2.0, 1.0, 1.0, -1.0));
        assert!(g.rep().trace() > 0.0);
        let r = GroupElement::from_matrix(Matrix2::raw(0.0, -1.0, 1.0, 0.0));
        assert_eq!(r.rep(), &Matrix2::raw(0.0, 1.0, -1.0, 0.0));
    }

    #[test]
    fn determinant_validation() {
        let tol = Tolerances::default();
        let g = GroupElement::new(2.0, 0.0, 0.0, 0.5 * (1.0 + 1e-8), &tol).unwrap();
        assert_abs_diff_eq!(g.rep().det(), 1.0, epsilon = 1e-15);
        assert!(matches!(
            GroupElement::new(2.0, 0.0, 0.0, 0.6, &tol),
            Err(Error::Determinant { .. })
        ));
    }

    #[test]
    fn geodesic_conjugation_examples() {
        let k = Matrix2::raw(2.0, 0.0, 0.0, 0.5);
        assert!(conj_by_geodesic(&k, 1.0, 1.0).max_abs_diff(&k) < 1e-15);
        let e = std::f64::consts::E;
        let out = conj_by_geodesic(&Matrix2::raw(1.0, 1.0, 0.0, 1.0), 2.0, 0.0);
        assert!(out.max_abs_diff(&Matrix2::raw(1.0 / e, 1.0 / e, 0.0, e)) < 1e-15);
    }

    #[test]
    fn horocycle_conjugation_examples() {
        let (a, d) = (2.0, 0.5);
        let k = Matrix2::raw(a, 0.0, 0.0, d);
        for t in [-3.0, 0.0, 1.5, 40.0] {
            assert!(conj_by_horocycle(&k, d / a * t, t).max_abs_diff(&k) < 1e-12);
        }
        let id = conj_by_horocycle(&Matrix2::IDENTITY, 1.0, 1.0);
        assert_eq!(id, Matrix2::IDENTITY);
    }

    #[test]
    fn half_plane_distance_matches_frobenius_identity() {
        let g = GroupElement::rotation(0.3)
            .mul(&GroupElement::a(1.7))
            .mul(&GroupElement::rotation(-1.1));
        let lhs = g.frobenius_norm_sq();
        let rhs = 2.0 * HalfPlanePoint::I.distance(&g.base_point()).cosh();
        assert_abs_diff_eq!(lhs, rhs, epsilon = 1e-10);
    }

    #[test]
    fn exp_log_roundtrip() {
        for x in [
            Matrix2::raw(0.3, 0.2, -0.5, -0.3),
            Matrix2::raw(0.0, 1.0, -1.0, 0.0),
            Matrix2::raw(0.0, 2.0, 0.0, 0.0),
            Matrix2::raw(1e-9, 0.0, 2e-9, -1e-9),
        ] {
            let g = GroupElement::from_matrix(exp_traceless(&x));
            let back = log(&g);
            assert!(back.max_abs_diff(&x) < 1e-9, "{x} -> {back}");
        }
    }
}
