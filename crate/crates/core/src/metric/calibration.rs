//! Sampled, monotone lookup tables relating the Frobenius gap and the
//! distance to the identity, in both directions, with safety factor 2.

use std::fmt::Write as _;
use std::io::{BufRead, Write};

use rand::Rng;
use rayon::prelude::*;

use super::{AlgebraVector, GroupMetric, METRIC_NAME};
use crate::error::{Error, Result};
use crate::sampling;
use crate::sl2::{GroupElement, Matrix2};

const HEADER: &str = "# horolab calibration v1";
const GRID_LO: f64 = 1e-4;
const GRID_HI: f64 = 2.0;
const GRID_POINTS: usize = 61;
const SAFETY: f64 = 2.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CalibrationKind {
    /// δ ↦ ρ with `gap(g) < ρ ⟹ d_G(g, e) < δ`.
    GapToDistance,
    /// ε ↦ δ with `d_G(g, e) < δ ⟹ gap(g) < ε`.
    DistanceToGap,
}

impl CalibrationKind {
    fn tag(self) -> &'static str {
        match self {
            CalibrationKind::GapToDistance => "gap_to_distance",
            CalibrationKind::DistanceToGap => "distance_to_gap",
        }
    }

    fn from_tag(s: &str) -> Result<Self> {
        match s {
            "gap_to_distance" => Ok(CalibrationKind::GapToDistance),
            "distance_to_gap" => Ok(CalibrationKind::DistanceToGap),
            other => Err(Error::Parse(format!("unknown calibration kind `{other}`"))),
        }
    }
}

/// Nondecreasing step function given by `(input, output)` knots.
#[derive(Debug, Clone, PartialEq)]
pub struct CalibrationTable {
    pub kind: CalibrationKind,
    pub seed: u64,
    pub entries: Vec<(f64, f64)>,
}

impl CalibrationTable {
    /// Output at the largest knot not exceeding `x`; below the first knot the
    /// first output is scaled linearly.
    pub fn lookup(&self, x: f64) -> f64 {
        let Some(&(x0, y0)) = self.entries.first() else {
            return 0.0;
        };
        if x < x0 {
            return y0 * x / x0;
        }
        let idx = self.entries.partition_point(|&(xi, _)| xi <= x);
        self.entries[idx - 1].1
    }

    pub fn write_to<W: Write>(&self, mut w: W) -> Result<()> {
        writeln!(w, "{HEADER}")?;
        writeln!(w, "metric {METRIC_NAME}")?;
        writeln!(w, "seed {}", self.seed)?;
        writeln!(w, "kind {}", self.kind.tag())?;
        for (x, y) in &self.entries {
            writeln!(w, "{x:e} {y:e}")?;
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        let mut buf = Vec::new();
        self.write_to(&mut buf).expect("writing to memory");
        String::from_utf8(buf).expect("ascii output")
    }

    pub fn read_from<R: BufRead>(r: R) -> Result<Self> {
        let mut lines = r.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| Error::Parse("truncated calibration file".into()))?
                .map_err(Error::from)
        };
        if next()?.trim() != HEADER {
            return Err(Error::Parse("missing calibration header".into()));
        }
        let metric = next()?;
        if metric.trim() != format!("metric {METRIC_NAME}") {
            return Err(Error::Parse(format!("calibration is for another metric: {metric}")));
        }
        let seed_line = next()?;
        let seed = seed_line
            .strip_prefix("seed ")
            .and_then(|s| s.trim().parse().ok())
            .ok_or_else(|| Error::Parse(format!("bad seed line `{seed_line}`")))?;
        let kind_line = next()?;
        let kind = CalibrationKind::from_tag(
            kind_line
                .strip_prefix("kind ")
                .ok_or_else(|| Error::Parse(format!("bad kind line `{kind_line}`")))?
                .trim(),
        )?;
        let mut entries = Vec::new();
        for line in lines {
            let line = line?;
            let line = line.trim();
            if line.is_empty() || line.starts_with('#') {
                continue;
            }
            let mut it = line.split_whitespace().map(str::parse::<f64>);
            match (it.next(), it.next(), it.next()) {
                (Some(Ok(x)), Some(Ok(y)), None) => entries.push((x, y)),
                _ => return Err(Error::Parse(format!("bad calibration line `{line}`"))),
            }
        }
        Ok(CalibrationTable { kind, seed, entries })
    }
}

fn grid() -> Vec<f64> {
    let (lo, hi) = (GRID_LO.ln(), GRID_HI.ln());
    (0..GRID_POINTS)
        .map(|k| (lo + (hi - lo) * k as f64 / (GRID_POINTS - 1) as f64).exp())
        .collect()
}

/// For samples `(key, value)`, the largest key `K` such that every sample
/// with key below `K` has value at most `bound`; capped at `coverage`.
fn threshold(sorted: &[(f64, f64)], bound: f64, coverage: f64) -> f64 {
    for &(key, value) in sorted {
        if key >= coverage {
            return coverage;
        }
        if value > bound {
            return key;
        }
    }
    coverage
}

fn build(kind: CalibrationKind, seed: u64, mut samples: Vec<(f64, f64)>, coverage: f64) -> CalibrationTable {
    samples.sort_by(|a, b| a.0.total_cmp(&b.0));
    let mut entries: Vec<(f64, f64)> = grid()
        .into_iter()
        .map(|x| (x, threshold(&samples, x / SAFETY, coverage)))
        .collect();
    let mut run = 0.0f64;
    for e in &mut entries {
        run = run.max(e.1);
        e.1 = run;
    }
    CalibrationTable { kind, seed, entries }
}

impl GroupMetric {
    /// Gap-ball samples paired with their distances to `e`: exponentials of
    /// random algebra vectors and renormalized perturbations `I + E`.
    fn build_gap_to_distance(&self) -> CalibrationTable {
        let seed = self.config.seed;
        let n = self.config.calibration_samples;
        let mut rng = sampling::rng(seed, 101);
        let mut elems = Vec::with_capacity(n);
        for k in 0..n {
            let g = if k % 2 == 0 {
                let v = AlgebraVector::random_unit(&mut rng) * sampling::log_uniform(&mut rng, 1e-5, 0.95);
                (v.exp(), v.norm())
            } else {
                let r = sampling::log_uniform(&mut rng, 1e-5, 0.5);
                let w: [f64; 4] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
                let l1: f64 = w.iter().map(|x| x.abs()).sum();
                let e = Matrix2::from_array(w.map(|x| x * r / l1));
                let m = Matrix2::IDENTITY.add(&e);
                if m.det() <= 0.0 {
                    continue;
                }
                (GroupElement::from_matrix_renormalized(m), 0.0)
            };
            elems.push(g);
        }
        let samples: Vec<(f64, f64)> = elems
            .par_iter()
            .map(|(g, _)| {
                let d = self
                    .dist_to_identity(g)
                    .map(|r| r.value)
                    .unwrap_or(f64::INFINITY);
                (g.frobenius_gap(), d)
            })
            .collect();
        // the exponential samples fill the gap-ball up to the smallest gap
        // reached on the outer shell
        let coverage = elems
            .iter()
            .zip(&samples)
            .filter(|((_, len), _)| *len > 0.9)
            .map(|(_, s)| s.0)
            .fold(f64::INFINITY, f64::min);
        build(CalibrationKind::GapToDistance, seed, samples, coverage.min(0.5))
    }

    /// Geodesic endpoints at random arc length paired with their gaps.
    fn build_distance_to_gap(&self) -> CalibrationTable {
        let seed = self.config.seed;
        let n = self.config.calibration_samples;
        let mut rng = sampling::rng(seed, 202);
        let max_len = 1.2;
        let vs: Vec<AlgebraVector> = (0..n)
            .map(|_| AlgebraVector::random_unit(&mut rng) * sampling::log_uniform(&mut rng, 1e-5, max_len))
            .collect();
        let samples: Vec<(f64, f64)> = vs
            .par_iter()
            .map(|v| {
                let gap = self
                    .exp_geodesic(*v)
                    .map(|g| g.frobenius_gap())
                    .unwrap_or(f64::INFINITY);
                (v.norm(), gap)
            })
            .collect();
        build(CalibrationKind::DistanceToGap, seed, samples, max_len)
    }

    pub fn gap_to_distance_table(&self) -> &CalibrationTable {
        self.gap_to_distance
            .get_or_init(|| self.build_gap_to_distance())
    }

    pub fn distance_to_gap_table(&self) -> &CalibrationTable {
        self.distance_to_gap
            .get_or_init(|| self.build_distance_to_gap())
    }

    /// Installs a previously saved table instead of sampling a new one.
    /// Returns false when a table of that kind is already present.
    pub fn install_calibration(&self, table: CalibrationTable) -> bool {
        match table.kind {
            CalibrationKind::GapToDistance => self.gap_to_distance.set(table).is_ok(),
            CalibrationKind::DistanceToGap => self.distance_to_gap.set(table).is_ok(),
        }
    }

    /// ρ with `frobenius_gap(g) < ρ ⟹ d_G(g, e) < δ`.
    pub fn calibrate_gap_to_distance(&self, delta: f64) -> Result<f64> {
        positive("delta", delta)?;
        Ok(self.gap_to_distance_table().lookup(delta))
    }

    /// δ with `d_G(g, e) < δ ⟹ frobenius_gap(g) < ε`.
    pub fn calibrate_distance_to_gap(&self, eps: f64) -> Result<f64> {
        positive("eps", eps)?;
        Ok(self.distance_to_gap_table().lookup(eps))
    }
}

fn positive(name: &str, x: f64) -> Result<()> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        let mut msg = String::new();
        let _ = write!(msg, "{name} must be positive, got {x}");
        Err(Error::InvalidArgument(msg))
    }
}

#[cfg(test)]
mod tests {
    use super::super::MetricConfig;
    use super::*;

    fn small_metric() -> GroupMetric {
        GroupMetric::new(MetricConfig {
            calibration_samples: 600,
            ..MetricConfig::default()
        })
        .unwrap()
    }

    #[test]
    fn lookup_is_monotone_step() {
        let t = CalibrationTable {
            kind: CalibrationKind::DistanceToGap,
            seed: 0,
            entries: vec![(0.1, 0.05), (0.2, 0.08), (0.4, 0.2)],
        };
        assert!((t.lookup(0.05) - 0.025).abs() < 1e-15);
        assert_eq!(t.lookup(0.1), 0.05);
        assert_eq!(t.lookup(0.3), 0.08);
        assert_eq!(t.lookup(9.0), 0.2);
    }

    #[test]
    fn table_roundtrip() {
        let m = small_metric();
        let t = m.distance_to_gap_table().clone();
        let back = CalibrationTable::read_from(t.to_text().as_bytes()).unwrap();
        assert_eq!(t, back);
        assert!(t.to_text().starts_with(HEADER));
    }

    #[test]
    fn rejects_foreign_files() {
        assert!(CalibrationTable::read_from("nonsense\n".as_bytes()).is_err());
        let bad = format!("{HEADER}\nmetric other\nseed 1\nkind gap_to_distance\n");
        assert!(CalibrationTable::read_from(bad.as_bytes()).is_err());
    }

    #[test]
    fn calibrations_are_monotone_and_positive() {
        let m = small_metric();
        let mut prev = (0.0, 0.0);
        for k in 1..40 {
            let x = 0.01 * k as f64;
            let rho = m.calibrate_gap_to_distance(x).unwrap();
            let delta = m.calibrate_distance_to_gap(x).unwrap();
            assert!(rho > 0.0 && delta > 0.0);
            assert!(rho >= prev.0 && delta >= prev.1);
            prev = (rho, delta);
        }
        assert!(m.calibrate_gap_to_distance(0.0).is_err());
        assert!(m.calibrate_distance_to_gap(-1.0).is_err());
    }

    #[test]
    fn installed_table_is_used() {
        let m = small_metric();
        let t = CalibrationTable {
            kind: CalibrationKind::GapToDistance,
            seed: 7,
            entries: vec![(1.0, 0.3)],
        };
        assert!(m.install_calibration(t));
        assert_eq!(m.calibrate_gap_to_distance(2.0).unwrap(), 0.3);
    }
}
