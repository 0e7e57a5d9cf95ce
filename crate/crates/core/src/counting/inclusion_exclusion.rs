//! Inclusion–exclusion over families of constraint sets.
//!
//! `g = sum over families F of (-1)^|F| N(F)`, where `N(F)` counts colorings
//! that are rainbow on every member of `F`. Being rainbow on each set of `F`
//! means being a proper coloring of the graph whose cliques are the sets of
//! `F`, so `N(F)` is that graph's chromatic polynomial at `r` times `r` for
//! every untouched position. The chromatic value is evaluated by summing the
//! falling factorial `(r)_b` over partitions of the touched vertices into
//! `b` independent blocks.

use std::collections::HashMap;

use super::search::{map_shards, Meter, Tracker};
use super::system::ConstraintSystem;
use super::CountOptions;
use crate::error::{Error, Result};

/// Largest number of positions touched by constraint sets (adjacency is a `u64` mask).
const MAX_COVERED: usize = 64;
const SHARD_BITS: usize = 4;

struct Families<'a> {
    cliques: Vec<Vec<(usize, u64)>>,
    covered: usize,
    len: usize,
    r: u128,
    tracker: &'a Tracker,
}

#[derive(Default)]
struct Sums {
    positive: u128,
    negative: u128,
    overflow: bool,
}

impl Families<'_> {
    fn walk(
        &self,
        i: usize,
        adj: &mut Vec<u64>,
        odd: bool,
        sums: &mut Sums,
        memo: &mut HashMap<Vec<u64>, Option<u128>>,
        meter: &mut Meter,
    ) {
        if !meter.tick() || sums.overflow {
            return;
        }
        if i == self.cliques.len() {
            let value = match memo.get(adj) {
                Some(&v) => v,
                None => {
                    let v = self.family_value(adj, meter);
                    memo.insert(adj.clone(), v);
                    v
                }
            };
            let slot = if odd { &mut sums.negative } else { &mut sums.positive };
            match value.and_then(|v| slot.checked_add(v)) {
                Some(s) => *slot = s,
                None => sums.overflow = true,
            }
            return;
        }
        self.walk(i + 1, adj, odd, sums, memo, meter);
        let saved = adj.clone();
        for &(v, mask) in &self.cliques[i] {
            adj[v] |= mask;
        }
        self.walk(i + 1, adj, !odd, sums, memo, meter);
        *adj = saved;
    }

    /// `N(F)` for the graph with adjacency `adj` over the covered vertices.
    fn family_value(&self, adj: &[u64], meter: &mut Meter) -> Option<u128> {
        let touched: Vec<usize> = (0..self.covered).filter(|&v| adj[v] != 0).collect();
        let free = (self.len - touched.len()) as u32;
        let mut blocks = Vec::new();
        let proper = proper_colorings(adj, &touched, self.r, &mut blocks, meter)?;
        self.r.checked_pow(free)?.checked_mul(proper)
    }
}

fn proper_colorings(
    adj: &[u64],
    verts: &[usize],
    r: u128,
    blocks: &mut Vec<u64>,
    meter: &mut Meter,
) -> Option<u128> {
    let Some((&v, rest)) = verts.split_first() else {
        return Some(1);
    };
    if !meter.tick() {
        return Some(0);
    }
    let bit = 1u64 << v;
    let mut total: u128 = 0;
    for b in 0..blocks.len() {
        if adj[v] & blocks[b] == 0 {
            blocks[b] |= bit;
            let sub = proper_colorings(adj, rest, r, blocks, meter);
            blocks[b] &= !bit;
            total = total.checked_add(sub?)?;
        }
    }
    let opened = blocks.len() as u128;
    if opened < r {
        blocks.push(bit);
        let sub = proper_colorings(adj, rest, r, blocks, meter);
        blocks.pop();
        total = total.checked_add(sub?.checked_mul(r - opened)?)?;
    }
    Some(total)
}

/// Returns `(positive, negative)` sums; the count is their difference.
pub(crate) fn ie_sums(
    sys: &ConstraintSystem,
    r: u32,
    opts: &CountOptions,
    tracker: &Tracker,
) -> Result<(u128, u128)> {
    if sys.edges().len() > opts.ie_limit {
        return Err(Error::Unsupported(format!(
            "inclusion-exclusion over {} constraint sets exceeds the limit of {}",
            sys.edges().len(),
            opts.ie_limit
        )));
    }
    let mut index = vec![usize::MAX; sys.len()];
    let mut covered = 0;
    for e in sys.edges() {
        for &p in e {
            if index[p as usize] == usize::MAX {
                index[p as usize] = covered;
                covered += 1;
            }
        }
    }
    if covered > MAX_COVERED {
        return Err(Error::Unsupported(format!(
            "inclusion-exclusion handles at most {MAX_COVERED} constrained positions"
        )));
    }
    let cliques: Vec<Vec<(usize, u64)>> = sys
        .edges()
        .iter()
        .map(|e| {
            let all: u64 = e.iter().fold(0, |m, &p| m | 1 << index[p as usize]);
            e.iter()
                .map(|&p| {
                    let v = index[p as usize];
                    (v, all & !(1 << v))
                })
                .collect()
        })
        .collect();
    let families = Families { cliques, covered, len: sys.len(), r: r as u128, tracker };

    // shard on the include/exclude decisions of the first few sets
    let bits = SHARD_BITS.min(families.cliques.len());
    let shards: Vec<u32> = (0..1u32 << bits).collect();
    let parts = map_shards(opts.workers, shards, |code| {
        let mut adj = vec![0u64; covered];
        let mut odd = false;
        for i in 0..bits {
            if code >> i & 1 == 1 {
                odd = !odd;
                for &(v, mask) in &families.cliques[i] {
                    adj[v] |= mask;
                }
            }
        }
        let mut sums = Sums::default();
        let mut memo = HashMap::new();
        let mut meter = Meter::new(families.tracker);
        families.walk(bits, &mut adj, odd, &mut sums, &mut memo, &mut meter);
        sums
    })?;
    let mut positive: u128 = 0;
    let mut negative: u128 = 0;
    for s in parts {
        if s.overflow {
            return Err(Error::Overflow("inclusion-exclusion sum"));
        }
        positive = positive.checked_add(s.positive).ok_or(Error::Overflow("inclusion-exclusion sum"))?;
        negative = negative.checked_add(s.negative).ok_or(Error::Overflow("inclusion-exclusion sum"))?;
    }
    Ok((positive, negative))
}
