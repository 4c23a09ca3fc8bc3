use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A word in the generators, in multiplication order. Letter `2k` stands
/// for `g_k` and `2k+1` for `g_k⁻¹`.
#[derive(Debug, Clone, Default, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Word(Vec<u16>);

impl Word {
    pub fn identity() -> Self {
        Word(Vec::new())
    }

    /// Builds a word and cancels adjacent inverse pairs.
    pub fn from_letters(letters: Vec<u16>) -> Self {
        let mut out: Vec<u16> = Vec::with_capacity(letters.len());
        for l in letters {
            if out.last() == Some(&(l ^ 1)) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    pub fn letter(l: u16) -> Self {
        Word(vec![l])
    }

    pub fn letters(&self) -> &[u16] {
        &self.0
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l ^ 1).collect())
    }

    /// Free product `self · other`.
    pub fn concat(&self, other: &Word) -> Word {
        Word::from_letters(self.0.iter().chain(&other.0).copied().collect())
    }

    /// ASCII form `g0^-1*g3`, `e` for the empty word.
    pub fn to_ascii(&self) -> String {
        if self.0.is_empty() {
            return "e".into();
        }
        self.0
            .iter()
            .map(|l| {
                if l & 1 == 0 {
                    format!("g{}", l / 2)
                } else {
                    format!("g{}^-1", l / 2)
                }
            })
            .collect::<Vec<_>>()
            .join("*")
    }

    pub fn parse_ascii(s: &str) -> Result<Word> {
        let s = s.trim();
        if s == "e" {
            return Ok(Word::identity());
        }
        let mut letters = Vec::new();
        for tok in s.split('*') {
            let (body, inv) = match tok.strip_suffix("^-1") {
                Some(b) => (b, true),
                None => (tok, false),
            };
            let k: u16 = body
                .strip_prefix('g')
                .and_then(|n| n.parse().ok())
                .filter(|k: &u16| *k < u16::MAX / 2)
                .ok_or_else(|| Error::Parse(format!("bad word letter `{tok}`")))?;
            letters.push(2 * k + inv as u16);
        }
        Ok(Word(letters))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return write!(f, "e");
        }
        for (i, l) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, "·")?;
            }
            write!(f, "g{}", l / 2)?;
            if l & 1 == 1 {
                write!(f, "⁻¹")?;
            }
        }
        Ok(())
    }
}
