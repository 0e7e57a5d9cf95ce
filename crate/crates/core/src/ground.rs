//! Colored domains: the interval `[n]`, a subset of `[n]`, or the cyclic group `Z_n`.

use std::fmt;
use std::path::Path;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GroundKind {
    Interval,
    Subset,
    Cyclic,
}

/// A finite ground set with its elements in ascending order.
///
/// Interval and subset elements are 1-based values in `[1, n]`; cyclic
/// elements are the residues `0..n`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct GroundSet {
    kind: GroundKind,
    n: u32,
    elements: Vec<i64>,
}

impl GroundSet {
    /// Builds a canonical ground set. Subset input is deduplicated and sorted;
    /// for intervals and cyclic groups `elements`, when given, must be the
    /// canonical element list.
    pub fn new(kind: GroundKind, n: u32, elements: Option<&[i64]>) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("ground set size n must be at least 1"));
        }
        let canonical: Vec<i64> = match kind {
            GroundKind::Interval => (1..=n as i64).collect(),
            GroundKind::Cyclic => (0..n as i64).collect(),
            GroundKind::Subset => {
                let given = elements
                    .ok_or_else(|| Error::invalid("a subset ground set needs an element list"))?;
                let mut v = given.to_vec();
                v.sort_unstable();
                v.dedup();
                if v.is_empty() {
                    return Err(Error::invalid("subset element list is empty"));
                }
                if let Some(bad) = v.iter().find(|&&x| x < 1 || x > n as i64) {
                    return Err(Error::invalid(format!("element {bad} is outside [1, {n}]")));
                }
                return Ok(GroundSet { kind, n, elements: v });
            }
        };
        if let Some(given) = elements {
            let mut v = given.to_vec();
            v.sort_unstable();
            v.dedup();
            if v != canonical {
                return Err(Error::invalid(format!(
                    "elements do not match the canonical {kind:?} ground set of size {n}"
                )));
            }
        }
        Ok(GroundSet { kind, n, elements: canonical })
    }

    pub fn interval(n: u32) -> Result<Self> {
        Self::new(GroundKind::Interval, n, None)
    }

    pub fn subset(n: u32, elements: &[i64]) -> Result<Self> {
        Self::new(GroundKind::Subset, n, Some(elements))
    }

    pub fn cyclic(n: u32) -> Result<Self> {
        Self::new(GroundKind::Cyclic, n, None)
    }

    pub fn kind(&self) -> GroundKind {
        self.kind
    }

    pub fn is_cyclic(&self) -> bool {
        self.kind == GroundKind::Cyclic
    }

    /// Ambient size (interval length or modulus).
    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn elements(&self) -> &[i64] {
        &self.elements
    }

    pub fn len(&self) -> usize {
        self.elements.len()
    }

    pub fn is_empty(&self) -> bool {
        self.elements.is_empty()
    }

    /// Membership test; cyclic ground sets reduce `x` modulo `n` first.
    pub fn contains(&self, x: i64) -> bool {
        self.position(x).is_some()
    }

    /// Index of `x` in the ascending element list.
    pub fn position(&self, x: i64) -> Option<usize> {
        let n = self.n as i64;
        match self.kind {
            GroundKind::Interval => (1..=n).contains(&x).then(|| (x - 1) as usize),
            GroundKind::Cyclic => Some(x.rem_euclid(n) as usize),
            GroundKind::Subset => self.elements.binary_search(&x).ok(),
        }
    }

    /// Membership bitmap over `0..=n`, indexed by value.
    pub(crate) fn membership(&self) -> Vec<bool> {
        let mut m = vec![false; self.n as usize + 1];
        for &x in &self.elements {
            m[x as usize] = true;
        }
        m
    }

    /// Stable textual descriptor, e.g. `interval:5`, `subset:6:2,4`, `cyclic:4`.
    pub fn descriptor(&self) -> String {
        match self.kind {
            GroundKind::Interval => format!("interval:{}", self.n),
            GroundKind::Cyclic => format!("cyclic:{}", self.n),
            GroundKind::Subset => format!("subset:{}:{}", self.n, join(&self.elements)),
        }
    }

    /// Inverse of [`GroundSet::descriptor`].
    pub fn from_descriptor(s: &str) -> Result<Self> {
        let mut parts = s.splitn(3, ':');
        let kind = parts.next().unwrap_or_default();
        let n: u32 = parts
            .next()
            .ok_or_else(|| Error::parse(format!("missing size in descriptor {s:?}")))?
            .parse()
            .map_err(|_| Error::parse(format!("bad size in descriptor {s:?}")))?;
        match kind {
            "interval" => Self::interval(n),
            "cyclic" => Self::cyclic(n),
            "subset" => {
                let lit = parts
                    .next()
                    .ok_or_else(|| Error::parse(format!("missing elements in {s:?}")))?;
                Self::subset(n, &parse_integer_list(lit)?)
            }
            other => Err(Error::parse(format!("unknown ground kind {other:?}"))),
        }
    }

    /// Parses a subset literal: comma-separated integers (`"1,2,5,9"`) or
    /// `@path` naming a file of integers separated by whitespace or commas.
    pub fn parse_subset_literal(literal: &str) -> Result<Vec<i64>> {
        match literal.strip_prefix('@') {
            Some(path) => {
                let text = std::fs::read_to_string(Path::new(path))?;
                text.split(|c: char| c.is_whitespace() || c == ',')
                    .filter(|l| !l.is_empty())
                    .map(|l| {
                        l.parse::<i64>()
                            .map_err(|_| Error::parse(format!("bad integer {l:?} in {path}")))
                    })
                    .collect()
            }
            None => parse_integer_list(literal),
        }
    }
}

impl fmt::Display for GroundSet {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.descriptor())
    }
}

pub(crate) fn join(xs: &[i64]) -> String {
    xs.iter().map(i64::to_string).collect::<Vec<_>>().join(",")
}

fn parse_integer_list(s: &str) -> Result<Vec<i64>> {
    s.split(',')
        .map(str::trim)
        .filter(|t| !t.is_empty())
        .map(|t| t.parse::<i64>().map_err(|_| Error::parse(format!("bad integer {t:?}"))))
        .collect()
}
