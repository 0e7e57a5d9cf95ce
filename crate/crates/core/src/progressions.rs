//! Arithmetic progressions and linear-pattern solutions on a ground set.

use std::collections::{BTreeSet, HashSet};
use std::fmt;

use crate::error::{Error, Result};
use crate::ground::GroundSet;

/// A `k`-term arithmetic progression identified by its element set.
///
/// `first` and `diff` describe the canonical traversal: for intervals and
/// subsets `first` is the smallest member; for cyclic ground sets it is the
/// traversal that comes first in `(first, diff)` order.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct Progression {
    pub first: i64,
    pub diff: i64,
    /// Members in ascending order.
    pub members: Vec<i64>,
}

impl Progression {
    pub fn len(&self) -> usize {
        self.members.len()
    }

    pub fn is_empty(&self) -> bool {
        self.members.is_empty()
    }
}

impl fmt::Display for Progression {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{{{}}}", crate::ground::join(&self.members))
    }
}

fn check_k(k: usize) -> Result<()> {
    if k < 2 {
        return Err(Error::invalid(format!("progression length k must be at least 2, got {k}")));
    }
    Ok(())
}

/// Cyclic traversal `a, a+d, ...` as a sorted residue set, or `None` when
/// residues repeat.
fn cyclic_members(a: i64, d: i64, k: usize, n: i64) -> Option<Vec<i64>> {
    let mut members: Vec<i64> = (0..k as i64).map(|i| (a + i * d).rem_euclid(n)).collect();
    members.sort_unstable();
    members.dedup();
    (members.len() == k).then_some(members)
}

/// Every `k`-AP of `ground`, each element set once, in `(first, diff)` order.
pub fn enumerate_k_aps(ground: &GroundSet, k: usize) -> Result<Vec<Progression>> {
    check_k(k)?;
    let mut out = Vec::new();
    if ground.is_cyclic() {
        let n = ground.n() as i64;
        if k as i64 > n {
            return Ok(out);
        }
        let mut seen = HashSet::new();
        for a in 0..n {
            for d in 1..n {
                if let Some(members) = cyclic_members(a, d, k, n) {
                    if seen.insert(members.clone()) {
                        out.push(Progression { first: a, diff: d, members });
                    }
                }
            }
        }
        return Ok(out);
    }
    let member = ground.membership();
    let max = ground.n() as i64;
    let span = (k - 1) as i64;
    for &a in ground.elements() {
        let mut d = 1;
        while a + span * d <= max {
            if (1..=span).all(|i| member[(a + i * d) as usize]) {
                out.push(Progression {
                    first: a,
                    diff: d,
                    members: (0..=span).map(|i| a + i * d).collect(),
                });
            }
            d += 1;
        }
    }
    Ok(out)
}

/// Number of `k`-APs in `ground`, counted per difference without building
/// the list (cyclic ground sets deduplicate element sets).
pub fn gamma_k(ground: &GroundSet, k: usize) -> Result<u64> {
    check_k(k)?;
    let span = (k - 1) as i64;
    let n = ground.n() as i64;
    match ground.kind() {
        crate::GroundKind::Interval => {
            Ok((1..).map(|d| n - span * d).take_while(|&c| c > 0).map(|c| c as u64).sum())
        }
        crate::GroundKind::Subset => {
            let member = ground.membership();
            let mut count = 0;
            for &a in ground.elements() {
                let mut d = 1;
                while a + span * d <= n {
                    if (1..=span).all(|i| member[(a + i * d) as usize]) {
                        count += 1;
                    }
                    d += 1;
                }
            }
            Ok(count)
        }
        crate::GroundKind::Cyclic => {
            if k as i64 > n {
                return Ok(0);
            }
            let mut seen = HashSet::new();
            for a in 0..n {
                for d in 1..n {
                    if let Some(m) = cyclic_members(a, d, k, n) {
                        seen.insert(m);
                    }
                }
            }
            Ok(seen.len() as u64)
        }
    }
}

/// Closed form for the number of `k`-APs in `[n]`:
/// `n^2/(2(k-1)) - n/2 + k'(k-1-k')/(2(k-1))` with `n = k' (mod k-1)`.
pub fn gamma_closed_form(n: u64, k: u64) -> Result<u128> {
    if k < 2 || n < k {
        return Err(Error::invalid(format!("closed form needs n >= k >= 2, got n={n}, k={k}")));
    }
    let (n, m) = (n as u128, (k - 1) as u128);
    let rem = n % m;
    let numerator = n * n - m * n + rem * (m - rem);
    debug_assert_eq!(numerator % (2 * m), 0);
    Ok(numerator / (2 * m))
}

/// Number of `k`-APs of `ground` whose canonical first term is `a`.
pub fn gamma_first_term(a: i64, ground: &GroundSet, k: usize) -> Result<u64> {
    check_k(k)?;
    if !ground.contains(a) {
        return Err(Error::invalid(format!("{a} is not an element of {ground}")));
    }
    if ground.is_cyclic() {
        let a = a.rem_euclid(ground.n() as i64);
        return Ok(enumerate_k_aps(ground, k)?.iter().filter(|p| p.first == a).count() as u64);
    }
    let span = (k - 1) as i64;
    let n = ground.n() as i64;
    Ok((1..)
        .take_while(|d| a + span * d <= n)
        .filter(|d| (1..=span).all(|i| ground.contains(a + i * d)))
        .count() as u64)
}

/// Iterative difference refinement: starting from `diffs`, round `i` (for
/// `i = 1..k-1`) keeps the differences `d` with `a + i*d` in `base`.
pub fn refine_difference_set(
    a: i64,
    diffs: &BTreeSet<i64>,
    base: &BTreeSet<i64>,
    k: usize,
) -> BTreeSet<i64> {
    let mut current = diffs.clone();
    for i in 1..k.max(1) as i64 {
        current.retain(|&d| base.contains(&(a + i * d)));
    }
    current
}

/// An `l x k` integer matrix whose distinct-valued kernel solutions are the
/// constrained tuples.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct LinearPattern {
    rows: Vec<Vec<i64>>,
    cols: usize,
}

impl LinearPattern {
    pub fn new(rows: Vec<Vec<i64>>) -> Result<Self> {
        let cols = rows.first().map_or(0, Vec::len);
        if rows.is_empty() {
            return Err(Error::invalid("a linear pattern needs at least one row"));
        }
        if cols < 2 {
            return Err(Error::invalid("a linear pattern needs at least two columns"));
        }
        if rows.iter().any(|r| r.len() != cols) {
            return Err(Error::invalid("pattern rows have different lengths"));
        }
        if rows.iter().any(|r| r.iter().all(|&c| c == 0)) {
            return Err(Error::invalid("pattern row with no nonzero entry"));
        }
        Ok(LinearPattern { rows, cols })
    }

    /// The `(k-2) x k` second-difference matrix whose solutions are the
    /// `k`-APs read in either direction.
    pub fn ap_matrix(k: usize) -> Result<Self> {
        if k < 3 {
            return Err(Error::invalid("the progression matrix needs k >= 3"));
        }
        let rows = (0..k - 2)
            .map(|i| {
                let mut row = vec![0; k];
                row[i] = 1;
                row[i + 1] = -2;
                row[i + 2] = 1;
                row
            })
            .collect();
        Self::new(rows)
    }

    /// Single row `[1, -1, 1, -1]`: `x1 + x3 = x2 + x4`.
    pub fn sidon() -> Self {
        LinearPattern { rows: vec![vec![1, -1, 1, -1]], cols: 4 }
    }

    pub fn rows(&self) -> &[Vec<i64>] {
        &self.rows
    }

    pub fn num_rows(&self) -> usize {
        self.rows.len()
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    /// Stable id such as `pattern:1,-1,1,-1` (rows joined by `;`).
    pub fn id(&self) -> String {
        let rows: Vec<String> = self.rows.iter().map(|r| crate::ground::join(r)).collect();
        format!("pattern:{}", rows.join(";"))
    }

    /// Parses the text format: first line `l k`, then `l` lines of `k`
    /// whitespace-separated integers.
    pub fn parse(text: &str) -> Result<Self> {
        let mut lines = text.lines().map(str::trim).filter(|l| !l.is_empty());
        let header = lines.next().ok_or_else(|| Error::parse("empty pattern file"))?;
        let dims: Vec<usize> = header
            .split_whitespace()
            .map(|t| t.parse().map_err(|_| Error::parse(format!("bad pattern header {header:?}"))))
            .collect::<Result<_>>()?;
        let [l, k] = dims[..] else {
            return Err(Error::parse(format!("pattern header must be \"l k\", got {header:?}")));
        };
        let rows: Vec<Vec<i64>> = lines
            .map(|line| {
                line.split_whitespace()
                    .map(|t| t.parse().map_err(|_| Error::parse(format!("bad entry {t:?}"))))
                    .collect::<Result<Vec<i64>>>()
            })
            .collect::<Result<_>>()?;
        if rows.len() != l || rows.iter().any(|r| r.len() != k) {
            return Err(Error::parse(format!("pattern body does not match header {l}x{k}")));
        }
        Self::new(rows)
    }

    pub fn to_text(&self) -> String {
        let mut s = format!("{} {}\n", self.rows.len(), self.cols);
        for r in &self.rows {
            let cells: Vec<String> = r.iter().map(i64::to_string).collect();
            s.push_str(&cells.join(" "));
            s.push('\n');
        }
        s
    }
}

/// Ordered tuples in `ground^k` with pairwise-distinct coordinates solving
/// `M x = 0`, in lexicographic order.
pub fn enumerate_pattern_solutions(
    pattern: &LinearPattern,
    ground: &GroundSet,
) -> Result<Vec<Vec<i64>>> {
    if ground.is_cyclic() {
        return Err(Error::Unsupported("linear patterns are defined on [n] and its subsets".into()));
    }
    let k = pattern.cols();
    let lo_val = ground.elements()[0];
    let hi_val = *ground.elements().last().unwrap();
    // suffix_range[row][j]: reachable range of sum_{i >= j} M[row][i] * x_i
    let suffix_range: Vec<Vec<(i64, i64)>> = pattern
        .rows()
        .iter()
        .map(|row| {
            let mut acc = vec![(0, 0); k + 1];
            for j in (0..k).rev() {
                let (a, b) = (row[j] * lo_val, row[j] * hi_val);
                acc[j] = (acc[j + 1].0 + a.min(b), acc[j + 1].1 + a.max(b));
            }
            acc
        })
        .collect();

    let mut out = Vec::new();
    let mut tuple = Vec::with_capacity(k);
    let mut partial = vec![0i64; pattern.num_rows()];
    extend_solution(pattern, ground, &suffix_range, &mut tuple, &mut partial, &mut out);
    Ok(out)
}

fn extend_solution(
    pattern: &LinearPattern,
    ground: &GroundSet,
    suffix_range: &[Vec<(i64, i64)>],
    tuple: &mut Vec<i64>,
    partial: &mut [i64],
    out: &mut Vec<Vec<i64>>,
) {
    let j = tuple.len();
    if j == pattern.cols() {
        if partial.iter().all(|&s| s == 0) {
            out.push(tuple.clone());
        }
        return;
    }
    for &x in ground.elements() {
        if tuple.contains(&x) {
            continue;
        }
        let feasible = pattern.rows().iter().zip(partial.iter()).zip(suffix_range).all(
            |((row, &s), range)| {
                let s = s + row[j] * x;
                let (lo, hi) = range[j + 1];
                (lo..=hi).contains(&-s)
            },
        );
        if !feasible {
            continue;
        }
        for (s, row) in partial.iter_mut().zip(pattern.rows()) {
            *s += row[j] * x;
        }
        tuple.push(x);
        extend_solution(pattern, ground, suffix_range, tuple, partial, out);
        tuple.pop();
        for (s, row) in partial.iter_mut().zip(pattern.rows()) {
            *s -= row[j] * x;
        }
    }
}

/// Distinct element sets underlying the pattern solutions, each sorted, in
/// ascending lexicographic order.
pub fn pattern_element_sets(pattern: &LinearPattern, ground: &GroundSet) -> Result<Vec<Vec<i64>>> {
    let sets: BTreeSet<Vec<i64>> = enumerate_pattern_solutions(pattern, ground)?
        .into_iter()
        .map(|mut t| {
            t.sort_unstable();
            t
        })
        .collect();
    Ok(sets.into_iter().collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn interval(n: u32) -> GroundSet {
        GroundSet::interval(n).unwrap()
    }

    fn sets(aps: &[Progression]) -> BTreeSet<Vec<i64>> {
        aps.iter().map(|p| p.members.clone()).collect()
    }

    #[test]
    fn listing_on_interval() {
        let aps = enumerate_k_aps(&interval(5), 3).unwrap();
        let expected: BTreeSet<Vec<i64>> =
            [vec![1, 2, 3], vec![2, 3, 4], vec![3, 4, 5], vec![1, 3, 5]].into_iter().collect();
        assert_eq!(aps.len(), 4);
        assert_eq!(sets(&aps), expected);
        let order: Vec<(i64, i64)> = aps.iter().map(|p| (p.first, p.diff)).collect();
        assert_eq!(order, vec![(1, 1), (1, 2), (2, 1), (3, 1)]);
        for k in 2..8 {
            assert_eq!(enumerate_k_aps(&interval(k as u32), k).unwrap().len(), 1);
        }
    }

    #[test]
    fn listing_on_cyclic() {
        let aps = enumerate_k_aps(&GroundSet::cyclic(4).unwrap(), 3).unwrap();
        let expected: BTreeSet<Vec<i64>> =
            [vec![0, 1, 2], vec![1, 2, 3], vec![0, 2, 3], vec![0, 1, 3]].into_iter().collect();
        assert_eq!(aps.len(), 4);
        assert_eq!(sets(&aps), expected);
        // {0,2,4} in Z_6 arises from six traversals but is listed once
        let z6 = enumerate_k_aps(&GroundSet::cyclic(6).unwrap(), 3).unwrap();
        assert_eq!(z6.iter().filter(|p| p.members == vec![0, 2, 4]).count(), 1);
        assert!(enumerate_k_aps(&GroundSet::cyclic(2).unwrap(), 3).unwrap().is_empty());
    }

    #[test]
    fn k_below_two_is_rejected() {
        assert!(enumerate_k_aps(&interval(5), 1).is_err());
        assert!(gamma_k(&interval(5), 0).is_err());
    }

    #[test]
    fn gamma_values() {
        assert_eq!(gamma_k(&interval(5), 3).unwrap(), 4);
        assert_eq!(gamma_k(&interval(10), 4).unwrap(), 12);
        assert_eq!(gamma_k(&GroundSet::subset(4, &[1, 2, 4]).unwrap(), 3).unwrap(), 0);
        assert_eq!(gamma_k(&GroundSet::cyclic(4).unwrap(), 3).unwrap(), 4);
    }

    #[test]
    fn closed_form_values() {
        assert_eq!(gamma_closed_form(5, 3).unwrap(), 4);
        assert_eq!(gamma_closed_form(10, 4).unwrap(), 12);
        for n in 2..50u64 {
            assert_eq!(gamma_closed_form(n, 2).unwrap(), (n * (n - 1) / 2) as u128);
        }
        assert!(gamma_closed_form(3, 4).is_err());
    }

    #[test]
    fn first_term_counts() {
        assert_eq!(gamma_first_term(1, &interval(5), 3).unwrap(), 2);
        assert_eq!(gamma_first_term(1, &interval(9), 3).unwrap(), 4);
        for k in 2..6 {
            assert_eq!(gamma_first_term(9, &interval(9), k).unwrap(), 0);
        }
        assert!(gamma_first_term(3, &GroundSet::subset(6, &[2, 4]).unwrap(), 3).is_err());
    }

    #[test]
    fn first_terms_sum_to_gamma() {
        for n in 2..40u32 {
            for k in 2..7usize {
                let g = interval(n);
                let total: u64 =
                    g.elements().iter().map(|&a| gamma_first_term(a, &g, k).unwrap()).sum();
                assert_eq!(total, gamma_k(&g, k).unwrap());
            }
        }
    }

    #[test]
    fn refinement_examples() {
        let b: BTreeSet<i64> = (1..=10).filter(|&x| x != 4).collect();
        let d: BTreeSet<i64> = (1..=4).collect();
        assert_eq!(refine_difference_set(1, &d, &b, 3), [1, 2, 4].into_iter().collect());

        let b: BTreeSet<i64> = (1..=20).collect();
        let d: BTreeSet<i64> = (1..=6).collect();
        assert_eq!(refine_difference_set(1, &d, &b, 4), d);

        let b: BTreeSet<i64> = (1..=5).collect();
        let d: BTreeSet<i64> = [-1, -2].into_iter().collect();
        assert_eq!(refine_difference_set(5, &d, &b, 3), d);
    }

    #[test]
    fn pattern_examples() {
        let sidon = enumerate_pattern_solutions(&LinearPattern::sidon(), &interval(4)).unwrap();
        assert_eq!(sidon.len(), 8);
        for t in &sidon {
            let a: BTreeSet<i64> = [t[0], t[2]].into_iter().collect();
            let b: BTreeSet<i64> = [t[1], t[3]].into_iter().collect();
            let (p, q): (BTreeSet<i64>, BTreeSet<i64>) =
                ([1, 4].into_iter().collect(), [2, 3].into_iter().collect());
            assert!((a == p && b == q) || (a == q && b == p));
        }
        let sum = LinearPattern::new(vec![vec![1, 1, -1]]).unwrap();
        assert_eq!(
            enumerate_pattern_solutions(&sum, &interval(3)).unwrap(),
            vec![vec![1, 2, 3], vec![2, 1, 3]]
        );
        assert!(enumerate_pattern_solutions(&sum, &GroundSet::cyclic(5).unwrap()).is_err());
    }

    #[test]
    fn ap_matrix_counts_both_directions() {
        for k in 3..=5 {
            let m = LinearPattern::ap_matrix(k).unwrap();
            for n in 1..=30u32 {
                let g = interval(n);
                let sols = enumerate_pattern_solutions(&m, &g).unwrap();
                assert_eq!(sols.len() as u64, 2 * gamma_k(&g, k).unwrap(), "n={n} k={k}");
            }
        }
    }

    #[test]
    fn pattern_validation_and_text() {
        assert!(LinearPattern::new(vec![]).is_err());
        assert!(LinearPattern::new(vec![vec![1]]).is_err());
        assert!(LinearPattern::new(vec![vec![0, 0, 0]]).is_err());
        assert!(LinearPattern::new(vec![vec![1, 2], vec![1]]).is_err());
        let m = LinearPattern::ap_matrix(4).unwrap();
        assert_eq!(LinearPattern::parse(&m.to_text()).unwrap(), m);
        assert_eq!(LinearPattern::parse("1 4\n1 -1 1 -1\n").unwrap(), LinearPattern::sidon());
        assert!(LinearPattern::parse("2 4\n1 -1 1 -1\n").is_err());
        assert!(LinearPattern::parse("1 4\n1 -1 1\n").is_err());
    }

    fn brute_pattern(m: &LinearPattern, elems: &[i64]) -> Vec<Vec<i64>> {
        let k = m.cols();
        let mut out = Vec::new();
        let total = elems.len().pow(k as u32);
        for code in 0..total {
            let mut c = code;
            let mut t = vec![0; k];
            for j in (0..k).rev() {
                t[j] = elems[c % elems.len()];
                c /= elems.len();
            }
            let distinct = t.iter().collect::<BTreeSet<_>>().len() == k;
            let solves =
                m.rows().iter().all(|row| row.iter().zip(&t).map(|(a, x)| a * x).sum::<i64>() == 0);
            if distinct && solves {
                out.push(t);
            }
        }
        out
    }

    proptest! {
        #[test]
        fn refinement_matches_set_builder(
            a in -50i64..50,
            d in proptest::collection::btree_set(-30i64..30, 0..20),
            b in proptest::collection::btree_set(-100i64..100, 0..120),
            k in 2usize..7,
        ) {
            let expected: BTreeSet<i64> = d
                .iter()
                .copied()
                .filter(|&x| (1..k as i64).all(|i| b.contains(&(a + i * x))))
                .collect();
            prop_assert_eq!(refine_difference_set(a, &d, &b, k), expected);
        }

        #[test]
        fn subset_gamma_matches_listing_and_is_monotone(n in 2u32..30, mask in any::<u32>(), k in 2usize..6) {
            let elems: Vec<i64> = (1..=n as i64).filter(|x| mask >> (x - 1) & 1 == 1).collect();
            prop_assume!(!elems.is_empty());
            let s = GroundSet::subset(n, &elems).unwrap();
            let g = gamma_k(&s, k).unwrap();
            prop_assert_eq!(g, enumerate_k_aps(&s, k).unwrap().len() as u64);
            prop_assert!(g <= gamma_k(&interval(n), k).unwrap());
            for drop in &elems {
                let smaller: Vec<i64> = elems.iter().copied().filter(|x| x != drop).collect();
                if !smaller.is_empty() {
                    prop_assert!(gamma_k(&GroundSet::subset(n, &smaller).unwrap(), k).unwrap() <= g);
                }
            }
        }

        #[test]
        fn pattern_solver_matches_brute_force(
            row in proptest::collection::vec(-3i64..4, 3),
            n in 3u32..9,
        ) {
            prop_assume!(row.iter().any(|&c| c != 0));
            let m = LinearPattern::new(vec![row]).unwrap();
            let g = interval(n);
            prop_assert_eq!(enumerate_pattern_solutions(&m, &g).unwrap(), brute_pattern(&m, g.elements()));
        }
    }
}
