use std::collections::BTreeSet;

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::progressions::{enumerate_k_aps, pattern_element_sets, LinearPattern};

/// Positions `0..len` (ground elements in ascending order) together with the
/// constraint sets that must not be rainbow.
///
/// Edges are kept in insertion order, which for progressions is the
/// canonical `(first, diff)` order; `ending_at[p]` indexes the edges whose
/// largest position is `p`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    len: usize,
    edges: Vec<Vec<u32>>,
    ending_at: Vec<Vec<u32>>,
}

impl ConstraintSystem {
    pub fn new(len: usize, edges: Vec<Vec<u32>>) -> Result<Self> {
        let mut seen = BTreeSet::new();
        let mut kept = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.len() < 2 {
                return Err(Error::invalid("constraint sets need at least two elements"));
            }
            if *e.last().unwrap() as usize >= len {
                return Err(Error::invalid("constraint set refers to a missing position"));
            }
            if seen.insert(e.clone()) {
                kept.push(e);
            }
        }
        let mut ending_at = vec![Vec::new(); len];
        for (i, e) in kept.iter().enumerate() {
            ending_at[*e.last().unwrap() as usize].push(i as u32);
        }
        Ok(ConstraintSystem { len, edges: kept, ending_at })
    }

    /// Constraint sets given as ground-set values.
    pub fn from_value_sets(ground: &GroundSet, sets: &[Vec<i64>]) -> Result<Self> {
        let edges = sets
            .iter()
            .map(|s| {
                s.iter()
                    .map(|&x| {
                        ground
                            .elements()
                            .binary_search(&x)
                            .map(|p| p as u32)
                            .map_err(|_| Error::invalid(format!("{x} is not an element of {ground}")))
                    })
                    .collect::<Result<Vec<u32>>>()
            })
            .collect::<Result<_>>()?;
        Self::new(ground.len(), edges)
    }

    /// The `k`-APs of `ground`.
    pub fn for_progressions(ground: &GroundSet, k: usize) -> Result<Self> {
        let sets: Vec<Vec<i64>> =
            enumerate_k_aps(ground, k)?.into_iter().map(|p| p.members).collect();
        Self::from_value_sets(ground, &sets)
    }

    /// The distinct element sets of the pattern's solutions in `ground`.
    pub fn for_pattern(ground: &GroundSet, pattern: &LinearPattern) -> Result<Self> {
        Self::from_value_sets(ground, &pattern_element_sets(pattern, ground)?)
    }

    pub fn len(&self) -> usize {
        self.len
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn edges(&self) -> &[Vec<u32>] {
        &self.edges
    }

    #[cfg(test)]
    fn ending_at(&self, pos: usize) -> &[u32] {
        &self.ending_at[pos]
    }

    /// Sub-system on the kept positions: edges entirely inside are retained
    /// and positions are renumbered in order.
    pub fn restrict(&self, keep: &[bool]) -> Self {
        let mut index = vec![u32::MAX; self.len];
        let mut next = 0;
        for (p, &k) in keep.iter().enumerate().take(self.len) {
            if k {
                index[p] = next;
                next += 1;
            }
        }
        let edges = self
            .edges
            .iter()
            .filter(|e| e.iter().all(|&p| keep[p as usize]))
            .map(|e| e.iter().map(|&p| index[p as usize]).collect())
            .collect();
        Self::new(next as usize, edges).expect("restriction of a valid system")
    }

    /// Drops edges with more than `r` elements (they can never be rainbow
    /// under `r` colors).
    pub(crate) fn drop_edges_larger_than(&self, r: u32) -> Self {
        let edges = self.edges.iter().filter(|e| e.len() <= r as usize).cloned().collect();
        Self::new(self.len, edges).expect("sub-system of a valid system")
    }

    /// Restricts to positions covered by some edge; returns the compact
    /// system and the number of free (uncovered) positions.
    pub(crate) fn covered_part(&self) -> (Self, usize) {
        let mut keep = vec![false; self.len];
        for e in &self.edges {
            for &p in e {
                keep[p as usize] = true;
            }
        }
        let covered = keep.iter().filter(|&&k| k).count();
        (self.restrict(&keep), self.len - covered)
    }

    /// Index of the first edge (in stored order) on which the colors are
    /// pairwise distinct.
    pub fn first_rainbow(&self, colors: &[u8]) -> Option<usize> {
        self.edges.iter().position(|e| is_rainbow(e, colors))
    }

    pub fn is_rainbow_free(&self, colors: &[u8]) -> bool {
        self.first_rainbow(colors).is_none()
    }

    /// True when some edge ending at `pos` is rainbow.
    #[inline]
    pub(crate) fn completes_rainbow(&self, pos: usize, colors: &[u8]) -> bool {
        self.ending_at[pos].iter().any(|&i| is_rainbow(&self.edges[i as usize], colors))
    }
}

#[inline]
pub(crate) fn is_rainbow(edge: &[u32], colors: &[u8]) -> bool {
    let mut seen = 0u128;
    for &p in edge {
        let bit = 1u128 << colors[p as usize];
        if seen & bit != 0 {
            return false;
        }
        seen |= bit;
    }
    true
}
