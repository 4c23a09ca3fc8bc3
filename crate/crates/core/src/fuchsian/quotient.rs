//! Points of `Γ\PSL(2,ℝ)`, reduction of representatives, the quotient
//! metric, coset equality and the systolic constants.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use super::{FuchsianGroup, Word};
use crate::error::{Error, Result};
use crate::metric::{DistanceReport, GroupMetric};
use crate::sampling;
use crate::sl2::GroupElement;

const MAX_REDUCTION_STEPS: usize = 100_000;
const DOMAIN_SAMPLES: usize = 4000;
/// Relative margin added to the sampled radius of the reduction domain.
const DOMAIN_MARGIN: f64 = 0.05;

/// A coset `Γg` with a chosen representative.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuotientPoint {
    pub rep: GroupElement,
}

impl QuotientPoint {
    pub fn new(rep: GroupElement) -> Self {
        QuotientPoint { rep }
    }

    pub fn identity() -> Self {
        QuotientPoint::new(GroupElement::IDENTITY)
    }
}

/// `reduced = gamma · g` with `gamma = word` and `reduced·i` in the
/// fundamental region around `i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Reduction {
    pub word: Word,
    pub gamma: GroupElement,
    pub reduced: GroupElement,
}

/// Minimum of `d_G(γ·x, y)` over `γ ∈ Γ`.
#[derive(Debug, Clone)]
pub struct QuotientDistance {
    pub value: f64,
    pub gamma_word: Word,
    pub gamma: GroupElement,
    /// Hyperbolic radius of the enumerated candidate ball.
    pub radius_used: f64,
    pub candidates_evaluated: usize,
    pub report: DistanceReport,
}

#[derive(Debug, Clone)]
pub enum Within {
    Inside(QuotientDistance),
    Outside {
        lower_bound: f64,
        radius_used: f64,
    },
}

impl Within {
    pub fn is_inside(&self) -> bool {
        matches!(self, Within::Inside(_))
    }
}

/// Three-valued outcome of a coset comparison.
#[derive(Debug, Clone, PartialEq)]
pub enum CosetVerdict {
    /// `gamma · g = h`.
    Same { word: Word, gamma: GroupElement },
    Different { residual_gap: f64 },
    Exhausted { radius: f64 },
}

impl CosetVerdict {
    pub fn is_same(&self) -> bool {
        matches!(self, CosetVerdict::Same { .. })
    }
}

#[derive(Debug, Clone, Serialize, Deserialize)]
pub struct Systole {
    /// `σ₀ = ℓ_min/√2`.
    pub injectivity_radius: f64,
    /// `ε★ = tr_min − 2`.
    pub trace_gap: f64,
    pub min_trace: f64,
    pub translation_length: f64,
    pub witness_word: Word,
    pub witness: GroupElement,
    pub certification_radius: f64,
    pub ball_size: usize,
}

/// `d_G(e, h) ≤ d_H(i, h·i)/√2 + √2|ψ|` from the polar decomposition
/// `h = P·R(ψ)`: a one-parameter hyperbolic segment followed by a rotation.
pub fn polar_upper_bound(h: &GroupElement) -> f64 {
    let m = h.rep();
    let hht = m.mul(&m.transpose());
    let s = (hht.trace() + 2.0).sqrt();
    let p = crate::sl2::Matrix2::raw((hht.a11 + 1.0) / s, hht.a12 / s, hht.a21 / s, (hht.a22 + 1.0) / s);
    let k = p.inverse_unimodular().mul(m);
    let mut psi = k.a12.atan2(k.a11);
    while psi > PI / 2.0 {
        psi -= PI;
    }
    while psi <= -PI / 2.0 {
        psi += PI;
    }
    h.displacement() / SQRT_2 + SQRT_2 * psi.abs()
}

impl FuchsianGroup {
    /// Greedy reduction: left-multiply by the letter that most decreases
    /// `‖·‖_F` until none does.
    pub fn try_reduce(&self, g: &GroupElement) -> Result<Reduction> {
        let mut cur = *g;
        let mut norm = cur.frobenius_norm_sq();
        let mut letters: Vec<u16> = Vec::new();
        for _ in 0..MAX_REDUCTION_STEPS {
            let mut best: Option<(u16, GroupElement, f64)> = None;
            for (k, l) in self.letters.iter().enumerate() {
                let cand = l.mul(&cur);
                let n = cand.frobenius_norm_sq();
                if n < norm * (1.0 - 1e-12) && best.as_ref().map_or(true, |b| n < b.2) {
                    best = Some((k as u16, cand, n));
                }
            }
            match best {
                Some((k, cand, n)) => {
                    letters.push(k);
                    cur = cand;
                    norm = n;
                }
                None => {
                    letters.reverse();
                    let word = Word::from_letters(letters);
                    let gamma = self.evaluate(&word);
                    return Ok(Reduction {
                        word,
                        gamma,
                        reduced: cur,
                    });
                }
            }
        }
        Err(Error::Budget {
            count: MAX_REDUCTION_STEPS,
            radius: g.displacement(),
        })
    }

    pub fn reduce(&self, g: &GroupElement) -> Reduction {
        self.try_reduce(g).expect("reduction of a finite element terminates")
    }

    /// Upper estimate of `sup d_H(i, r·i)` over reduced representatives `r`,
    /// sampled and enlarged by a relative margin.
    pub fn domain_radius(&self) -> f64 {
        *self.domain_radius.get_or_init(|| {
            let mut rng = sampling::rng(0x646f6d61696e, 0);
            let mut worst: f64 = 0.0;
            for _ in 0..DOMAIN_SAMPLES {
                let g = sampling::random_element(&mut rng, 8.0);
                worst = worst.max(self.reduce(&g).reduced.displacement());
            }
            worst * (1.0 + DOMAIN_MARGIN)
        })
    }

    fn candidates(
        &self,
        x: &GroupElement,
        y: &GroupElement,
        threshold: f64,
        kappa: f64,
    ) -> Result<(Vec<(f64, usize)>, std::sync::Arc<super::Ball>, f64)> {
        let (zx, zy) = (x.base_point(), y.base_point());
        let radius = x.displacement() + y.displacement() + kappa * threshold;
        let ball = self.ball(radius)?;
        let mut cands: Vec<(f64, usize)> = ball
            .within(radius)
            .iter()
            .enumerate()
            .map(|(i, e)| (e.element.act(zx).distance(&zy) / kappa, i))
            .filter(|(lb, _)| *lb < threshold)
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        Ok((cands, ball, radius))
    }

    /// Searches `γ'` with `d_G(γ'·x', y') < threshold` for reduced `x', y'`.
    fn search(
        &self,
        metric: &GroupMetric,
        x: &QuotientPoint,
        y: &QuotientPoint,
        threshold: f64,
    ) -> Result<(Option<QuotientDistance>, f64, f64)> {
        let rx = self.try_reduce(&x.rep)?;
        let ry = self.try_reduce(&y.rep)?;
        let kappa = metric.base_lipschitz();
        let (cands, ball, radius) = self.candidates(&rx.reduced, &ry.reduced, threshold, kappa)?;
        let mut best: Option<(f64, usize, DistanceReport)> = None;
        let mut evaluated = 0;
        let mut lower = threshold;
        for &(lb, idx) in &cands {
            if best.as_ref().is_some_and(|b| lb >= b.0) {
                lower = lower.min(lb);
                break;
            }
            let gx = ball.entries[idx].element.mul(&rx.reduced);
            let rep = metric.dist_to_identity(&gx.left_divide(&ry.reduced))?;
            evaluated += 1;
            lower = lower.min(rep.value);
            if best.as_ref().map_or(true, |b| rep.value < b.0) {
                best = Some((rep.value, idx, rep));
            }
        }
        let found = best.filter(|b| b.0 < threshold).map(|(value, idx, report)| {
            // γ·x = β⁻¹·γ'·α·x with x' = α·x, y' = β·y
            let entry = &ball.entries[idx];
            let word = ry.word.inverse().concat(&entry.word).concat(&rx.word);
            QuotientDistance {
                value,
                gamma: self.evaluate(&word),
                gamma_word: word,
                radius_used: radius,
                candidates_evaluated: evaluated,
                report,
            }
        });
        Ok((found, lower, radius))
    }

    /// `d_X(Γx, Γy) = min_γ d_G(γ·x, y)`, certified over a ball large enough
    /// that no farther `γ` can beat the best candidate.
    pub fn quotient_distance(
        &self,
        metric: &GroupMetric,
        x: &QuotientPoint,
        y: &QuotientPoint,
    ) -> Result<QuotientDistance> {
        let rx = self.try_reduce(&x.rep)?;
        let ry = self.try_reduce(&y.rep)?;
        // cheap upper bound from the identity candidate and the nearest few
        let ball = self.ball(rx.reduced.displacement() + ry.reduced.displacement() + 0.5)?;
        let bound = ball
            .entries
            .iter()
            .map(|e| polar_upper_bound(&e.element.mul(&rx.reduced).left_divide(&ry.reduced)))
            .fold(f64::INFINITY, f64::min);
        let (found, _, _) = self.search(metric, x, y, bound + 1e-9)?;
        found.ok_or(Error::Nonconvergence { best_upper: bound })
    }

    /// Decides whether `d_X(Γx, Γy) < threshold`, computing the distance
    /// only when it is.
    pub fn quotient_distance_within(
        &self,
        metric: &GroupMetric,
        x: &QuotientPoint,
        y: &QuotientPoint,
        threshold: f64,
    ) -> Result<Within> {
        let (found, lower, radius) = self.search(metric, x, y, threshold)?;
        Ok(match found {
            Some(q) => Within::Inside(q),
            None => Within::Outside {
                lower_bound: lower,
                radius_used: radius,
            },
        })
    }

    /// Looks for `γ ∈ Γ` with `γ·g = h`. Reducing `h·g⁻¹` walks through the
    /// tiling and ends at `e` exactly when it lies in `Γ`.
    pub fn same_coset(&self, g: &GroupElement, h: &GroupElement) -> CosetVerdict {
        let target = h.mul(&g.inverse());
        let red = match self.try_reduce(&target) {
            Ok(r) => r,
            Err(_) => {
                return CosetVerdict::Exhausted {
                    radius: target.displacement(),
                }
            }
        };
        let scale = g.frobenius_norm_sq().max(1.0) * h.frobenius_norm_sq().max(1.0);
        let tol = self.tol.eq * scale.sqrt();
        let gamma = red.word.inverse();
        let gamma_el = self.evaluate(&gamma);
        if red.reduced.frobenius_gap() <= tol && gamma_el.mul(g).approx_eq(h, tol) {
            CosetVerdict::Same {
                word: gamma,
                gamma: gamma_el,
            }
        } else {
            CosetVerdict::Different {
                residual_gap: red.reduced.frobenius_gap(),
            }
        }
    }

    /// Minimal-trace element over a ball that contains a conjugate of every
    /// element with no larger translation length, giving `ε★` and `σ₀`.
    pub fn systole(&self) -> Result<Systole> {
        if let Some(s) = self.systole.get() {
            return Ok(s.clone());
        }
        let probe_radius = 2.0 * self.domain_radius() + 0.5;
        let probe = self.ball(probe_radius)?;
        let candidate = probe
            .within(probe_radius)
            .iter()
            .skip(1)
            .map(|e| e.element.translation_length())
            .fold(f64::INFINITY, f64::min);
        if !candidate.is_finite() {
            return Err(Error::InvalidArgument("group has no non-identity element in range".into()));
        }
        // each conjugacy class meets the region, so its axis passes within
        // the domain radius of i
        let cert = candidate + 2.0 * self.domain_radius() + 0.25;
        let ball = self.ball(cert)?;
        let within = ball.within(cert);
        let mut best: Option<&super::BallEntry> = None;
        for e in within.iter().skip(1) {
            if best.map_or(true, |b| e.element.trace() < b.element.trace() - 1e-12) {
                best = Some(e);
            }
        }
        let w = best.expect("candidate found above");
        let min_trace = w.element.trace();
        let ell = w.element.translation_length();
        let s = Systole {
            injectivity_radius: ell / SQRT_2,
            trace_gap: min_trace - 2.0,
            min_trace,
            translation_length: ell,
            witness_word: w.word.clone(),
            witness: w.element,
            certification_radius: cert,
            ball_size: within.len(),
        };
        let _ = self.systole.set(s.clone());
        Ok(s)
    }

    pub fn injectivity_radius(&self) -> Result<f64> {
        Ok(self.systole()?.injectivity_radius)
    }

    pub fn trace_gap(&self) -> Result<f64> {
        Ok(self.systole()?.trace_gap)
    }
}
