//! Cocompact Fuchsian groups: generator presets, words, ball enumeration,
//! reduction into a fundamental region, the quotient metric, the
//! injectivity radius and the trace gap.

mod ball;
mod quotient;
mod word;

use std::fmt::Write as _;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::sl2::{GroupElement, Matrix2, Tolerances};

pub use ball::{Ball, BallEntry};
pub use quotient::{CosetVerdict, QuotientDistance, QuotientPoint, Reduction, Systole, Within};
pub use word::Word;

/// Default cap on the number of elements generated by one enumeration.
pub const DEFAULT_MAX_BALL_SIZE: usize = 1_000_000;

pub struct FuchsianGroup {
    name: String,
    generators: Vec<GroupElement>,
    /// Letter `2k` is generator `k`, letter `2k+1` its inverse.
    letters: Vec<GroupElement>,
    max_ball_size: usize,
    tol: Tolerances,
    ball: Mutex<Option<Arc<Ball>>>,
    domain_radius: OnceLock<f64>,
    systole: OnceLock<Systole>,
}

impl std::fmt::Debug for FuchsianGroup {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("FuchsianGroup")
            .field("name", &self.name)
            .field("generators", &self.generators)
            .field("max_ball_size", &self.max_ball_size)
            .finish()
    }
}

/// `[[1+√2, √(2+2√2)], [√(2+2√2), 1+√2]]`, a side pairing of the regular
/// octagon centred at `i` with interior angles π/4.
pub fn bolza_base_generator() -> Matrix2 {
    let d = 1.0 + std::f64::consts::SQRT_2;
    let o = (2.0 + 2.0 * std::f64::consts::SQRT_2).sqrt();
    Matrix2::raw(d, o, o, d)
}

impl FuchsianGroup {
    pub fn new(name: impl Into<String>, generators: Vec<GroupElement>, tol: Tolerances) -> Result<Self> {
        if generators.is_empty() {
            return Err(Error::InvalidArgument("a group needs at least one generator".into()));
        }
        let cls_tol = tol.classify;
        if let Some((k, g)) = generators
            .iter()
            .enumerate()
            .find(|(_, g)| g.trace() <= 2.0 + cls_tol)
        {
            return Err(Error::InvalidArgument(format!(
                "generator g{k} is not hyperbolic (trace {})",
                g.trace()
            )));
        }
        let letters = generators
            .iter()
            .flat_map(|g| [*g, g.inverse()])
            .collect();
        Ok(FuchsianGroup {
            name: name.into(),
            generators,
            letters,
            max_ball_size: DEFAULT_MAX_BALL_SIZE,
            tol,
            ball: Mutex::new(None),
            domain_radius: OnceLock::new(),
            systole: OnceLock::new(),
        })
    }

    /// The genus-2 regular octagon group. Its four generators are the side
    /// pairing `g₀` conjugated by `R(kπ/8)`, `k = 0..3`; since `R(θ)` rotates
    /// the half-plane by `2θ` about `i`, this turns the pairing by `kπ/4`.
    pub fn preset_bolza() -> Self {
        let g0 = GroupElement::from_matrix(bolza_base_generator());
        let generators = (0..4)
            .map(|k| {
                let r = GroupElement::rotation(k as f64 * std::f64::consts::PI / 8.0);
                r.mul(&g0).mul(&r.inverse())
            })
            .collect();
        Self::new("bolza", generators, Tolerances::default()).expect("bolza generators are hyperbolic")
    }

    pub fn preset(name: &str) -> Result<Self> {
        match name {
            "bolza" => Ok(Self::preset_bolza()),
            other => Err(Error::InvalidArgument(format!("unknown group preset `{other}`"))),
        }
    }

    pub fn with_max_ball_size(mut self, max: usize) -> Self {
        self.max_ball_size = max;
        self
    }

    pub fn with_tolerances(mut self, tol: Tolerances) -> Self {
        self.tol = tol;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn generators(&self) -> &[GroupElement] {
        &self.generators
    }

    pub fn letters(&self) -> &[GroupElement] {
        &self.letters
    }

    pub fn tolerances(&self) -> &Tolerances {
        &self.tol
    }

    pub fn max_ball_size(&self) -> usize {
        self.max_ball_size
    }

    pub fn evaluate(&self, w: &Word) -> GroupElement {
        w.letters()
            .iter()
            .fold(GroupElement::IDENTITY, |acc, &l| acc.mul(&self.letters[l as usize]))
    }

    /// Parses the plain-text group format: a `name <name>` line followed by
    /// one generator per line as four reals `a11 a12 a21 a22`. Blank lines
    /// and `#` comments are ignored.
    pub fn from_text(text: &str, tol: Tolerances) -> Result<Self> {
        let mut name = None;
        let mut gens = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            if let Some(rest) = line.strip_prefix("name") {
                name = Some(rest.trim().to_string());
                continue;
            }
            let vals: Vec<f64> = line
                .split_whitespace()
                .map(|t| {
                    t.parse::<f64>()
                        .map_err(|_| Error::Parse(format!("line {}: bad number `{t}`", lineno + 1)))
                })
                .collect::<Result<_>>()?;
            if vals.len() != 4 {
                return Err(Error::Parse(format!(
                    "line {}: expected 4 entries, found {}",
                    lineno + 1,
                    vals.len()
                )));
            }
            gens.push(GroupElement::new(vals[0], vals[1], vals[2], vals[3], &tol)?);
        }
        let name = name.ok_or_else(|| Error::Parse("missing `name` header".into()))?;
        Self::new(name, gens, tol)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("name {}\n", self.name);
        for g in &self.generators {
            let [a, b, c, d] = g.entries();
            let _ = writeln!(out, "{a:e} {b:e} {c:e} {d:e}");
        }
        out
    }
}
