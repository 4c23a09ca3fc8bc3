//! Enumeration of the group elements moving `i` by at most a given
//! hyperbolic distance.
//!
//! Words are grown breadth-first by right multiplication. For side-pairing
//! generators every element with `d_H(i, γ·i) ≤ R` has a word whose prefixes
//! stay within `R` plus the circumradius of the fundamental polygon, which
//! is below the largest single-letter displacement; prefixes beyond that
//! bound are pruned. Elements are merged through a grid hash of their
//! canonical entries with a tolerance check.

use std::collections::HashMap;
use std::fmt::Write as _;
use std::sync::Arc;

use super::{FuchsianGroup, Word};
use crate::error::{Error, Result};
use crate::sl2::GroupElement;

const GRID: f64 = 1e-6;

#[derive(Debug, Clone, PartialEq)]
pub struct BallEntry {
    pub word: Word,
    pub element: GroupElement,
    /// `d_H(i, γ·i)`.
    pub displacement: f64,
}

/// Elements with displacement at most `radius`, sorted by displacement and
/// then by word.
#[derive(Debug, Clone)]
pub struct Ball {
    pub radius: f64,
    pub entries: Vec<BallEntry>,
    /// Elements generated during the search, including pruned margins.
    pub generated: usize,
}

impl Ball {
    pub fn within(&self, radius: f64) -> &[BallEntry] {
        let n = self.entries.partition_point(|e| e.displacement <= radius);
        &self.entries[..n]
    }

    /// Plain-text form: a header, then `word a11 a12 a21 a22` per element.
    pub fn to_text(&self, group: &str) -> String {
        let mut out = format!("# horolab ball v1\ngroup {group}\nradius {:e}\n", self.radius);
        for e in &self.entries {
            let [a, b, c, d] = e.element.entries();
            let _ = writeln!(out, "{} {a:e} {b:e} {c:e} {d:e}", e.word.to_ascii());
        }
        out
    }
}

fn keys(g: &GroupElement) -> [[i64; 2]; 4] {
    let e = g.entries();
    std::array::from_fn(|k| {
        let c = e[k] / GRID;
        let base = c.floor();
        let other = if c - base < 0.5 { base - 1.0 } else { base + 1.0 };
        [base as i64, other as i64]
    })
}

struct Dedup {
    map: HashMap<[i64; 4], Vec<usize>>,
    tol: f64,
}

impl Dedup {
    fn find(&self, g: &GroupElement, pool: &[GroupElement]) -> Option<usize> {
        let k = keys(g);
        let scale = g.entries().iter().fold(1.0f64, |m, x| m.max(x.abs()));
        for mask in 0..16u32 {
            let key: [i64; 4] = std::array::from_fn(|i| k[i][((mask >> i) & 1) as usize]);
            if let Some(ids) = self.map.get(&key) {
                for &id in ids {
                    if pool[id].rep().max_abs_diff(g.rep()) <= self.tol * scale {
                        return Some(id);
                    }
                }
            }
        }
        None
    }

    fn insert(&mut self, g: &GroupElement, id: usize) {
        let k = keys(g);
        self.map
            .entry(std::array::from_fn(|i| k[i][0]))
            .or_default()
            .push(id);
    }
}

impl FuchsianGroup {
    pub fn max_letter_displacement(&self) -> f64 {
        self.letters
            .iter()
            .map(|l| l.displacement())
            .fold(0.0, f64::max)
    }

    fn build_ball(&self, radius: f64) -> Result<Ball> {
        let prune = radius + self.max_letter_displacement();
        let mut pool = vec![GroupElement::IDENTITY];
        let mut dedup = Dedup {
            map: HashMap::new(),
            tol: self.tol.eq.max(1e-9),
        };
        dedup.insert(&GroupElement::IDENTITY, 0);
        let mut frontier = vec![0usize];
        while !frontier.is_empty() {
            let mut next = Vec::new();
            for &id in &frontier {
                let base = pool[id];
                for letter in &self.letters {
                    let g = base.mul(letter);
                    if g.displacement() > prune || dedup.find(&g, &pool).is_some() {
                        continue;
                    }
                    let nid = pool.len();
                    pool.push(g);
                    dedup.insert(&g, nid);
                    next.push(nid);
                    if pool.len() > self.max_ball_size {
                        return Err(Error::Budget {
                            count: pool.len(),
                            radius,
                        });
                    }
                }
            }
            frontier = next;
        }
        let generated = pool.len();
        let mut entries: Vec<BallEntry> = pool
            .into_iter()
            .filter(|g| g.displacement() <= radius)
            .map(|g| {
                // evaluating the canonical word makes the stored matrix
                // independent of the search path that found it
                let word = self.reduce(&g).word.inverse();
                let element = self.evaluate(&word);
                BallEntry {
                    displacement: element.displacement(),
                    word,
                    element,
                }
            })
            .collect();
        entries.sort_by(|a, b| {
            a.displacement
                .total_cmp(&b.displacement)
                .then_with(|| a.word.len().cmp(&b.word.len()))
                .then_with(|| a.word.cmp(&b.word))
        });
        Ok(Ball {
            radius,
            entries,
            generated,
        })
    }

    /// The cached ball, grown to at least `radius` (rounded up to an
    /// integer) when needed.
    pub fn ball(&self, radius: f64) -> Result<Arc<Ball>> {
        if !(radius > 0.0) || !radius.is_finite() {
            return Err(Error::InvalidArgument(format!("ball radius must be positive, got {radius}")));
        }
        let mut guard = self.ball.lock().expect("ball cache poisoned");
        if let Some(b) = guard.as_ref() {
            if b.radius >= radius {
                return Ok(Arc::clone(b));
            }
        }
        let b = Arc::new(self.build_ball(radius.ceil())?);
        *guard = Some(Arc::clone(&b));
        Ok(b)
    }

    /// Distinct elements `γ` with `d_H(i, γ·i) ≤ radius`, i.e.
    /// `‖γ‖²_F ≤ 2 cosh(radius)`.
    pub fn enumerate_ball(&self, radius: f64) -> Result<Vec<GroupElement>> {
        Ok(self.ball(radius)?.within(radius).iter().map(|e| e.element).collect())
    }

    pub fn enumerate_ball_words(&self, radius: f64) -> Result<Vec<BallEntry>> {
        Ok(self.ball(radius)?.within(radius).to_vec())
    }

    /// Installs a ball read from [`Ball::to_text`] after checking each word
    /// against its stored element.
    pub fn load_ball(&self, text: &str) -> Result<()> {
        let mut lines = text.lines();
        if lines.next().map(str::trim) != Some("# horolab ball v1") {
            return Err(Error::Parse("missing ball header".into()));
        }
        let group = lines
            .next()
            .and_then(|l| l.strip_prefix("group "))
            .ok_or_else(|| Error::Parse("missing group line".into()))?;
        if group.trim() != self.name {
            return Err(Error::Parse(format!("ball belongs to group `{group}`")));
        }
        let radius: f64 = lines
            .next()
            .and_then(|l| l.strip_prefix("radius "))
            .and_then(|r| r.trim().parse().ok())
            .ok_or_else(|| Error::Parse("missing radius line".into()))?;
        let mut entries = Vec::new();
        for line in lines.filter(|l| !l.trim().is_empty()) {
            let mut it = line.split_whitespace();
            let word = Word::parse_ascii(it.next().unwrap_or(""))?;
            let vals: Vec<f64> = it
                .map(|t| t.parse().map_err(|_| Error::Parse(format!("bad entry `{t}`"))))
                .collect::<Result<_>>()?;
            if vals.len() != 4 {
                return Err(Error::Parse(format!("bad ball line `{line}`")));
            }
            let element = GroupElement::new(vals[0], vals[1], vals[2], vals[3], &self.tol)?;
            let scale = element.entries().iter().fold(1.0f64, |m, x| m.max(x.abs()));
            if word.letters().iter().any(|&l| l as usize >= self.letters.len())
                || !self.evaluate(&word).approx_eq(&element, 1e-9 * scale)
            {
                return Err(Error::Parse(format!("word {word} does not match its matrix")));
            }
            entries.push(BallEntry {
                word,
                displacement: element.displacement(),
                element,
            });
        }
        let generated = entries.len();
        *self.ball.lock().expect("ball cache poisoned") = Some(Arc::new(Ball {
            radius,
            entries,
            generated,
        }));
        Ok(())
    }
}
