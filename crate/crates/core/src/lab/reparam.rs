use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::sampling;

/// Continuous piecewise-linear `s: ℝ → ℝ` with `s(0) = 0`, extended
/// linearly beyond the outer knots.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Reparametrization {
    knots: Vec<(f64, f64)>,
}

impl Reparametrization {
    pub const SLOPE_MIN: f64 = 0.25;
    pub const SLOPE_MAX: f64 = 4.0;

    pub fn new(knots: Vec<(f64, f64)>) -> Result<Self> {
        if knots.len() < 2 {
            return Err(Error::InvalidArgument("a reparametrization needs at least two knots".into()));
        }
        if knots.iter().any(|(t, s)| !t.is_finite() || !s.is_finite()) {
            return Err(Error::InvalidArgument("reparametrization knots must be finite".into()));
        }
        if knots.windows(2).any(|w| w[1].0 <= w[0].0) {
            return Err(Error::InvalidArgument("knot times must be strictly increasing".into()));
        }
        if !knots.iter().any(|&(t, s)| t == 0.0 && s == 0.0) {
            return Err(Error::InvalidArgument("a reparametrization must contain the knot (0, 0)".into()));
        }
        Ok(Reparametrization { knots })
    }

    pub fn identity() -> Self {
        Self::linear(1.0)
    }

    pub fn linear(slope: f64) -> Self {
        Reparametrization {
            knots: vec![(-1.0, -slope), (0.0, 0.0), (1.0, slope)],
        }
    }

    pub fn knots(&self) -> &[(f64, f64)] {
        &self.knots
    }

    pub fn eval(&self, t: f64) -> f64 {
        let k = &self.knots;
        let i = k.partition_point(|p| p.0 <= t).clamp(1, k.len() - 1);
        let (t0, s0) = k[i - 1];
        let (t1, s1) = k[i];
        s0 + (s1 - s0) * (t - t0) / (t1 - t0)
    }

    pub fn slopes(&self) -> impl Iterator<Item = f64> + '_ {
        self.knots.windows(2).map(|w| (w[1].1 - w[0].1) / (w[1].0 - w[0].0))
    }

    /// `max |s(t) − t|` over `[lo, hi]`, attained at a knot or an endpoint.
    pub fn max_deviation(&self, lo: f64, hi: f64) -> f64 {
        self.knots
            .iter()
            .map(|p| p.0)
            .filter(|t| *t > lo && *t < hi)
            .chain([lo, hi])
            .map(|t| (self.eval(t) - t).abs())
            .fold(0.0, f64::max)
    }

    fn from_slopes(window: f64, spacing: f64, mut slope: impl FnMut(usize) -> f64) -> Self {
        let n = (window / spacing).ceil().max(1.0) as usize;
        let mut knots = vec![(0.0, 0.0)];
        for (sign, offset) in [(1.0, 0), (-1.0, n)] {
            let (mut t, mut s) = (0.0, 0.0);
            for k in 0..n {
                t += sign * spacing;
                s += sign * spacing * slope(offset + k);
                knots.push((t, s));
            }
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Reparametrization { knots }
    }

    /// Slopes drawn log-uniformly in `[SLOPE_MIN, SLOPE_MAX]` on cells of
    /// width `spacing` covering `[−window, window]`.
    pub fn random<R: Rng>(rng: &mut R, window: f64, spacing: f64) -> Self {
        let slopes: Vec<f64> = (0..2 * (window / spacing).ceil().max(1.0) as usize)
            .map(|_| sampling::log_uniform(rng, Self::SLOPE_MIN, Self::SLOPE_MAX))
            .collect();
        Self::from_slopes(window, spacing, |k| slopes[k])
    }

    /// `s(t) = t + w(t)` with `w(0) = 0` and `|w| ≤ amplitude` at every knot.
    pub fn wiggle<R: Rng>(rng: &mut R, window: f64, spacing: f64, amplitude: f64) -> Self {
        let n = (window / spacing).ceil().max(1.0) as usize;
        let max_step = (spacing * 0.75).min(2.0 * amplitude);
        let mut knots = vec![(0.0, 0.0)];
        for sign in [1.0, -1.0] {
            let mut w = 0.0f64;
            for k in 1..=n {
                let target = rng.gen_range(-amplitude..=amplitude);
                w += (target - w).clamp(-max_step, max_step);
                let t = sign * spacing * k as f64;
                knots.push((t, t + w));
            }
        }
        knots.sort_by(|a, b| a.0.total_cmp(&b.0));
        Reparametrization { knots }
    }
}
