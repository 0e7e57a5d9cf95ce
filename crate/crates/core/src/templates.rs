//! Colorings, templates (per-element palettes) and rainbow-progression statistics.

use std::fmt;

use num_bigint::BigUint;
use num_traits::Pow;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::progressions::{enumerate_k_aps, Progression};

/// Largest palette universe a [`Template`] supports (palettes are `u64` masks).
pub const MAX_TEMPLATE_COLORS: u32 = 64;

/// An `r`-coloring of a ground set. `colors[i]` is the color (in `1..=r`) of
/// the `i`-th element in ascending order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Coloring {
    ground: GroundSet,
    r: u32,
    colors: Vec<u32>,
}

impl Coloring {
    pub fn new(ground: GroundSet, r: u32, colors: Vec<u32>) -> Result<Self> {
        if colors.len() != ground.len() {
            return Err(Error::invalid(format!(
                "coloring has {} colors for {} elements",
                colors.len(),
                ground.len()
            )));
        }
        if let Some(c) = colors.iter().find(|&&c| c == 0 || c > r) {
            return Err(Error::invalid(format!("color {c} is outside [1, {r}]")));
        }
        Ok(Coloring { ground, r, colors })
    }

    /// Builds a coloring from `(element, color)` pairs covering the ground set exactly.
    pub fn from_pairs(ground: GroundSet, r: u32, pairs: &[(i64, u32)]) -> Result<Self> {
        let mut colors = vec![0; ground.len()];
        for &(x, c) in pairs {
            let pos = ground
                .elements()
                .binary_search(&x)
                .ok()
                .ok_or_else(|| Error::invalid(format!("{x} is not an element of {ground}")))?;
            if colors[pos] != 0 {
                return Err(Error::invalid(format!("element {x} colored twice")));
            }
            colors[pos] = c;
        }
        if let Some(i) = colors.iter().position(|&c| c == 0) {
            return Err(Error::invalid(format!("element {} has no color", ground.elements()[i])));
        }
        Self::new(ground, r, colors)
    }

    /// Parses `"e:c"` pairs separated by commas, e.g. `"1:1,2:2,3:2,4:3"`.
    pub fn parse_pairs(literal: &str) -> Result<Vec<(i64, u32)>> {
        literal
            .split(',')
            .map(str::trim)
            .filter(|t| !t.is_empty())
            .map(|pair| {
                let (e, c) = pair
                    .split_once(':')
                    .ok_or_else(|| Error::parse(format!("expected e:c, got {pair:?}")))?;
                let e = e.trim().parse().map_err(|_| Error::parse(format!("bad element {e:?}")))?;
                let c = c.trim().parse().map_err(|_| Error::parse(format!("bad color {c:?}")))?;
                Ok((e, c))
            })
            .collect()
    }

    pub fn ground(&self) -> &GroundSet {
        &self.ground
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    pub fn colors(&self) -> &[u32] {
        &self.colors
    }

    pub fn color_of(&self, x: i64) -> Option<u32> {
        self.ground.elements().binary_search(&x).ok().map(|p| self.colors[p])
    }

    pub fn colors_used(&self) -> usize {
        let mut seen: Vec<u32> = self.colors.clone();
        seen.sort_unstable();
        seen.dedup();
        seen.len()
    }

    /// True iff every color in `[r]` appears.
    pub fn is_exact(&self) -> bool {
        self.colors_used() == self.r as usize
    }

    /// Literal in the `"e:c"` pair format.
    pub fn to_literal(&self) -> String {
        self.ground
            .elements()
            .iter()
            .zip(&self.colors)
            .map(|(e, c)| format!("{e}:{c}"))
            .collect::<Vec<_>>()
            .join(",")
    }
}

impl fmt::Display for Coloring {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.to_literal())
    }
}

/// An `r`-template of order `n`: a palette `P(x)` of allowed colors for every
/// `x` in `[n]`.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Template {
    order: u32,
    r: u32,
    palettes: Vec<u64>,
}

impl Template {
    /// All-empty template.
    pub fn empty(order: u32, r: u32) -> Result<Self> {
        if r == 0 || r > MAX_TEMPLATE_COLORS {
            return Err(Error::invalid(format!(
                "template colors must be in [1, {MAX_TEMPLATE_COLORS}], got {r}"
            )));
        }
        Ok(Template { order, r, palettes: vec![0; order as usize] })
    }

    /// Every element gets the full palette `[r]`.
    pub fn full(order: u32, r: u32) -> Result<Self> {
        let mut t = Self::empty(order, r)?;
        let all = if r == 64 { u64::MAX } else { (1u64 << r) - 1 };
        t.palettes.iter_mut().for_each(|p| *p = all);
        Ok(t)
    }

    pub fn order(&self) -> u32 {
        self.order
    }

    pub fn r(&self) -> u32 {
        self.r
    }

    /// Palette of `x` as an ascending color list (empty outside `[n]`).
    pub fn palette(&self, x: i64) -> Vec<u32> {
        let mask = self.mask(x);
        (1..=self.r).filter(|c| mask >> (c - 1) & 1 == 1).collect()
    }

    fn mask(&self, x: i64) -> u64 {
        if x < 1 || x > self.order as i64 {
            0
        } else {
            self.palettes[(x - 1) as usize]
        }
    }

    pub fn set_palette(&mut self, x: i64, colors: &[u32]) -> Result<()> {
        if x < 1 || x > self.order as i64 {
            return Err(Error::invalid(format!("{x} is outside [1, {}]", self.order)));
        }
        let mut mask = 0u64;
        for &c in colors {
            if c == 0 || c > self.r {
                return Err(Error::invalid(format!("color {c} is outside [1, {}]", self.r)));
            }
            mask |= 1 << (c - 1);
        }
        self.palettes[(x - 1) as usize] = mask;
        Ok(())
    }

    /// Parses one line per element, `x: c1 c2 ...` (an empty list is allowed).
    /// The order is `order` when given, else the largest listed element.
    pub fn parse(text: &str, order: Option<u32>, r: u32) -> Result<Self> {
        let mut entries = Vec::new();
        for line in text.lines().map(str::trim).filter(|l| !l.is_empty()) {
            let (x, rest) = line
                .split_once(':')
                .ok_or_else(|| Error::parse(format!("expected \"x: colors\", got {line:?}")))?;
            let x: i64 = x.trim().parse().map_err(|_| Error::parse(format!("bad element {x:?}")))?;
            let colors: Vec<u32> = rest
                .split_whitespace()
                .map(|c| c.parse().map_err(|_| Error::parse(format!("bad color {c:?}"))))
                .collect::<Result<_>>()?;
            entries.push((x, colors));
        }
        let max = entries.iter().map(|(x, _)| *x).max().unwrap_or(0).max(0) as u32;
        let mut t = Self::empty(order.unwrap_or(max), r)?;
        for (x, colors) in entries {
            t.set_palette(x, &colors)?;
        }
        Ok(t)
    }

    pub fn to_text(&self) -> String {
        let mut s = String::new();
        for x in 1..=self.order as i64 {
            let p: Vec<String> = self.palette(x).iter().map(u32::to_string).collect();
            s.push_str(&format!("{x}: {}\n", p.join(" ")));
        }
        s
    }
}

/// Views a coloring as a template of order `n` with singleton palettes on
/// its support and empty palettes elsewhere.
pub fn coloring_to_template(coloring: &Coloring, n: u32) -> Result<Template> {
    let mut t = Template::empty(n, coloring.r())?;
    for (&x, &c) in coloring.ground().elements().iter().zip(coloring.colors()) {
        if x < 1 || x > n as i64 {
            return Err(Error::invalid(format!("colored element {x} is outside [1, {n}]")));
        }
        t.set_palette(x, &[c])?;
    }
    Ok(t)
}

/// Pointwise palette inclusion `P1(x) ⊆ P2(x)`.
pub fn is_subtemplate(p1: &Template, p2: &Template) -> Result<bool> {
    if p1.order != p2.order || p1.r != p2.r {
        return Err(Error::invalid("templates differ in order or number of colors"));
    }
    Ok(p1.palettes.iter().zip(&p2.palettes).all(|(a, b)| a & !b == 0))
}

/// Whether the colors are pairwise distinct.
pub(crate) fn all_distinct(colors: impl IntoIterator<Item = u32>) -> bool {
    let mut seen = 0u128;
    let mut spill: Vec<u32> = Vec::new();
    for c in colors {
        if c < 128 {
            let bit = 1u128 << c;
            if seen & bit != 0 {
                return false;
            }
            seen |= bit;
        } else if spill.contains(&c) {
            return false;
        } else {
            spill.push(c);
        }
    }
    true
}

fn colors_on<'a>(c: &'a Coloring, p: &'a Progression) -> impl Iterator<Item = u32> + 'a {
    p.members.iter().map(move |&x| c.colors[c.ground.position(x).expect("member of ground")])
}

/// First `k`-AP (in canonical order) whose elements get pairwise-distinct
/// colors, or `None` when the coloring is rainbow `k`-AP-free.
pub fn rainbow_witness(coloring: &Coloring, k: usize) -> Result<Option<Progression>> {
    Ok(enumerate_k_aps(coloring.ground(), k)?
        .into_iter()
        .find(|p| all_distinct(colors_on(coloring, p))))
}

/// Number of `k`-APs of the coloring's ground set that are rainbow.
pub fn count_rainbow_aps_of_coloring(coloring: &Coloring, k: usize) -> Result<u64> {
    Ok(enumerate_k_aps(coloring.ground(), k)?
        .iter()
        .filter(|p| all_distinct(colors_on(coloring, p)))
        .count() as u64)
}

/// Ways to pick one color per palette with all picks distinct.
fn injective_selections(palettes: &[u64], used: u64) -> u128 {
    match palettes.split_first() {
        None => 1,
        Some((&first, rest)) => {
            let mut free = first & !used;
            let mut total = 0;
            while free != 0 {
                let bit = free & free.wrapping_neg();
                total += injective_selections(rest, used | bit);
                free &= free - 1;
            }
            total
        }
    }
}

/// `R_k(P)`: the number of rainbow `k`-AP subtemplates of `P`, i.e. the sum
/// over `k`-APs of `[n]` of the ways to pick pairwise-distinct colors from
/// the members' palettes.
pub fn count_rainbow_subtemplates(template: &Template, k: usize) -> Result<u128> {
    if template.order == 0 {
        return Ok(0);
    }
    let aps = enumerate_k_aps(&GroundSet::interval(template.order)?, k)?;
    let mut total: u128 = 0;
    let mut palettes = Vec::with_capacity(k);
    for ap in &aps {
        palettes.clear();
        palettes.extend(ap.members.iter().map(|&x| template.mask(x)));
        if palettes.contains(&0) {
            continue;
        }
        total = total
            .checked_add(injective_selections(&palettes, 0))
            .ok_or(Error::Overflow("rainbow subtemplate count"))?;
    }
    Ok(total)
}

/// `R_k(P)` next to the container bound `n^{2-1/k} / k`.
#[derive(Clone, Debug, PartialEq)]
pub struct ContainerStatistic {
    pub rk: u128,
    /// Floating-point value of `n^{2-1/k} / k` (irrational in general).
    pub bound: f64,
    /// Exact test of `R_k(P) < n^{2-1/k} / k`, i.e. `(k R_k)^k < n^{2k-1}`.
    pub satisfies: bool,
}

pub fn container_statistic(template: &Template, k: usize) -> Result<ContainerStatistic> {
    let rk = count_rainbow_subtemplates(template, k)?;
    let n = template.order as f64;
    let bound = n.powf(2.0 - 1.0 / k as f64) / k as f64;
    let lhs: BigUint = Pow::pow(BigUint::from(k as u128 * rk), k as u32);
    let rhs: BigUint = Pow::pow(BigUint::from(template.order), (2 * k - 1) as u32);
    Ok(ContainerStatistic { rk, bound, satisfies: lhs < rhs })
}
