//! Experiment drivers: subset extremality scans, anti-van der Waerden
//! numbers, interval versus cyclic counts, and the Sidon-pattern experiment.

use std::collections::BTreeSet;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::counting::{count_system, f_below_k, find_exact, ConstraintSystem, CountOptions, Method, Tracker};
use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::num::{binomial, pow};
use crate::progressions::LinearPattern;
use crate::templates::Coloring;

/// Largest `n` for which the all-subsets strategy runs by default.
pub const MAX_ALL_SUBSETS_N: u32 = 14;

#[derive(Clone, Debug, PartialEq)]
pub enum ScanStrategy {
    /// Every nonempty proper subset of `[n]`.
    AllSubsets,
    /// `[n]` minus one element.
    Deletions,
    /// Subsets drawn by keeping each element with probability `density`.
    Random { samples: usize, density: f64, seed: u64 },
}

impl ScanStrategy {
    pub fn name(&self) -> &'static str {
        match self {
            ScanStrategy::AllSubsets => "all_subsets",
            ScanStrategy::Deletions => "deletions",
            ScanStrategy::Random { .. } => "random",
        }
    }

    /// Proper nonempty subsets of `[n]` in scan order, without repeats.
    pub fn subsets(&self, n: u32) -> Result<Vec<Vec<i64>>> {
        match *self {
            ScanStrategy::AllSubsets => {
                if n > MAX_ALL_SUBSETS_N {
                    return Err(Error::BudgetExceeded(format!(
                        "all_subsets scan is limited to n <= {MAX_ALL_SUBSETS_N}, got {n}"
                    )));
                }
                Ok((1u64..(1 << n) - 1).map(|mask| mask_elements(n, mask)).collect())
            }
            ScanStrategy::Deletions => Ok((1..=n as i64)
                .map(|x| (1..=n as i64).filter(|&y| y != x).collect::<Vec<_>>())
                .filter(|s| !s.is_empty())
                .collect()),
            ScanStrategy::Random { samples, density, seed } => {
                if !(0.0..=1.0).contains(&density) {
                    return Err(Error::invalid(format!("density {density} is outside [0, 1]")));
                }
                let mut rng = ChaCha8Rng::seed_from_u64(seed);
                let mut seen = BTreeSet::new();
                let mut out = Vec::new();
                for _ in 0..samples {
                    let s: Vec<i64> = (1..=n as i64).filter(|_| rng.gen_bool(density)).collect();
                    if !s.is_empty() && s.len() < n as usize && seen.insert(s.clone()) {
                        out.push(s);
                    }
                }
                Ok(out)
            }
        }
    }
}

fn mask_elements(n: u32, mask: u64) -> Vec<i64> {
    (1..=n as i64).filter(|x| mask >> (x - 1) & 1 == 1).collect()
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ScanEntry {
    pub subset: Vec<i64>,
    pub count: BigUint,
}

#[derive(Clone, Debug, PartialEq)]
pub struct ScanResult {
    pub n: u32,
    pub r: u32,
    /// Progression length, or the pattern id for pattern scans.
    pub constraint: String,
    pub strategy: String,
    pub full_count: BigUint,
    pub entries: Vec<ScanEntry>,
    /// First scanned subset attaining the maximum count.
    pub max_subset: Option<Vec<i64>>,
    pub max_count: BigUint,
    /// Scanned subsets with `g(S) >= g([n])`; findings, not errors.
    pub violations: Vec<Vec<i64>>,
    /// False when a budget stopped the scan early.
    pub complete: bool,
    pub nodes: u64,
}

impl ScanResult {
    /// Rows `(subset, count, is_max, violation)` for CSV export.
    pub fn rows(&self) -> Vec<(String, String, bool, bool)> {
        self.entries
            .iter()
            .map(|e| {
                let is_max = self.max_subset.as_ref() == Some(&e.subset);
                let violation = e.count >= self.full_count;
                (crate::ground::join(&e.subset), e.count.to_string(), is_max, violation)
            })
            .collect()
    }
}

/// Counts every subset's restriction of `full` with the pruned counter,
/// in parallel over subsets and in scan order.
fn scan_system(
    full: &ConstraintSystem,
    n: u32,
    r: u32,
    constraint: String,
    strategy: &ScanStrategy,
    opts: &CountOptions,
) -> Result<ScanResult> {
    let start = Instant::now();
    let (full_count, full_nodes) = count_system::<BigUint>(full, r, Method::Pruned, opts)?;
    let subsets = strategy.subsets(n)?;
    let deadline = opts.budget.max_seconds.map(|s| (start, s));
    let per_subset = |subset: Vec<i64>| {
        let mut keep = vec![false; full.len()];
        for &x in &subset {
            keep[(x - 1) as usize] = true;
        }
        let mut inner = opts.clone().with_workers(1);
        if let Some((start, secs)) = deadline {
            let left = secs - start.elapsed().as_secs_f64();
            if left <= 0.0 {
                return (subset, Err(Error::BudgetExceeded("time budget exhausted".into())));
            }
            inner.budget.max_seconds = Some(left);
        }
        let result = count_system::<BigUint>(&full.restrict(&keep), r, Method::Pruned, &inner);
        (subset, result)
    };
    let results = crate::counting::map_ordered(opts.workers, subsets, per_subset)?;

    let mut entries = Vec::with_capacity(results.len());
    let mut complete = true;
    let mut nodes = full_nodes;
    for (subset, res) in results {
        match res {
            Ok((count, used)) => {
                nodes += used;
                entries.push(ScanEntry { subset, count });
            }
            Err(Error::BudgetExceeded(_)) => complete = false,
            Err(e) => return Err(e),
        }
    }
    let mut max_subset = None;
    let mut max_count = BigUint::from(0u32);
    for e in &entries {
        if max_subset.is_none() || e.count > max_count {
            max_count = e.count.clone();
            max_subset = Some(e.subset.clone());
        }
    }
    let violations = entries
        .iter()
        .filter(|e| e.count >= full_count)
        .map(|e| e.subset.clone())
        .collect();
    Ok(ScanResult {
        n,
        r,
        constraint,
        strategy: strategy.name().to_string(),
        full_count,
        entries,
        max_subset,
        max_count,
        violations,
        complete,
        nodes,
    })
}

/// Compares `g_{r,k}(S)` on proper subsets of `[n]` against `g_{r,k}([n])`.
pub fn scan_subsets(
    n: u32,
    r: u32,
    k: usize,
    strategy: &ScanStrategy,
    opts: &CountOptions,
) -> Result<ScanResult> {
    let full = ConstraintSystem::for_progressions(&GroundSet::interval(n)?, k)?;
    scan_system(&full, n, r, k.to_string(), strategy, opts)
}

#[derive(Clone, Debug, PartialEq)]
pub struct AwResult {
    pub ground: String,
    pub k: usize,
    pub aw: u32,
    /// Rainbow-free exact `(aw-1)`-coloring.
    pub witness: Coloring,
    /// Whether merging any two color classes of the witness stays rainbow-free.
    pub merge_check: bool,
    pub nodes: u64,
}

/// True when merging any two color classes of `coloring` gives a
/// rainbow `k`-AP-free coloring with one color fewer.
pub fn merge_preserves_freeness(coloring: &Coloring, k: usize) -> Result<bool> {
    let sys = ConstraintSystem::for_progressions(coloring.ground(), k)?;
    let t = coloring.r();
    for a in 1..=t {
        for b in a + 1..=t {
            // b joins a; labels above b shift down to keep [t-1]
            let merged: Vec<u8> = coloring
                .colors()
                .iter()
                .map(|&c| {
                    let c = if c == b { a } else { c };
                    (if c > b { c - 1 } else { c } - 1) as u8
                })
                .collect();
            let used: BTreeSet<u8> = merged.iter().copied().collect();
            if used.len() != (t - 1) as usize || !sys.is_rainbow_free(&merged) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// `aw(S, k)`: the least `r` such that every exact `r`-coloring of `S` has a
/// rainbow `k`-AP, found as one more than the largest `t` admitting a
/// rainbow-free exact `t`-coloring. Feasibility is probed for increasing `t`
/// and stops at the first infeasible `t`, which is sound because merging two
/// classes of a rainbow-free coloring keeps it rainbow-free.
pub fn anti_vdw(ground: &GroundSet, k: usize, opts: &CountOptions) -> Result<AwResult> {
    let sys = ConstraintSystem::for_progressions(ground, k)?;
    if sys.edges().is_empty() {
        return Err(Error::invalid(format!("aw({ground}, {k}) is undefined: no {k}-AP in the set")));
    }
    let tracker = Tracker::new(&opts.budget);
    let mut witness = vec![0u8; sys.len()];
    let mut best = 1u32;
    for t in 2..=sys.len() as u32 {
        match find_exact(&sys, t, &tracker)? {
            Some(colors) => {
                witness = colors;
                best = t;
            }
            None => break,
        }
    }
    let witness = Coloring::new(ground.clone(), best, witness.iter().map(|&c| c as u32 + 1).collect())?;
    let merge_check = merge_preserves_freeness(&witness, k)?;
    Ok(AwResult {
        ground: ground.descriptor(),
        k,
        aw: best + 1,
        witness,
        merge_check,
        nodes: tracker.finish()?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct CyclicComparison {
    pub n: u32,
    pub r: u32,
    pub k: usize,
    pub g_interval: BigUint,
    pub g_cyclic: BigUint,
    /// `g(Z_n) / (k-1)^n`.
    pub cyclic_ratio: BigRational,
    pub target: BigUint,
}

/// `g_{r,k}` on `[n]` and on `Z_n` with wrap-around progressions.
pub fn cyclic_compare(n: u32, r: u32, k: usize, opts: &CountOptions) -> Result<CyclicComparison> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let interval = ConstraintSystem::for_progressions(&GroundSet::interval(n)?, k)?;
    let cyclic = ConstraintSystem::for_progressions(&GroundSet::cyclic(n)?, k)?;
    let (g_interval, _) = count_system::<BigUint>(&interval, r, Method::Pruned, opts)?;
    let (g_cyclic, _) = count_system::<BigUint>(&cyclic, r, Method::Pruned, opts)?;
    if g_cyclic > g_interval {
        return Err(Error::Invariant(format!(
            "cyclic count {g_cyclic} exceeds interval count {g_interval} for n={n}, r={r}, k={k}"
        )));
    }
    let scale = BigInt::from(pow::<BigUint>(k as u64 - 1, n as u64)?);
    Ok(CyclicComparison {
        n,
        r,
        k,
        cyclic_ratio: BigRational::new(BigInt::from(g_cyclic.clone()), scale),
        g_interval,
        g_cyclic,
        target: binomial(r as u64, k as u64 - 1)?,
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct SidonReport {
    pub n: u32,
    pub r: u32,
    pub scan: ScanResult,
    /// Whether `[n]` beats every scanned proper subset.
    pub full_is_max: bool,
    /// Share of rainbow-free colorings of `[n]` that use at most 3 colors.
    pub fraction_at_most_3: BigRational,
}

/// Rainbow `[1,-1,1,-1]`-free colorings of `[n]` and of scanned subsets.
/// The report is evidence only; nothing about it is asserted.
pub fn sidon_experiment(
    n: u32,
    r: u32,
    strategy: &ScanStrategy,
    opts: &CountOptions,
) -> Result<SidonReport> {
    let pattern = LinearPattern::sidon();
    let full = ConstraintSystem::for_pattern(&GroundSet::interval(n)?, &pattern)?;
    let scan = scan_system(&full, n, r, pattern.id(), strategy, opts)?;
    let few: BigUint = if r >= 4 { f_below_k(r as u64, 4, n as u64)? } else { pow(r as u64, n as u64)? };
    let fraction_at_most_3 =
        BigRational::new(BigInt::from(few), BigInt::from(scan.full_count.clone()));
    Ok(SidonReport { n, r, full_is_max: scan.violations.is_empty(), fraction_at_most_3, scan })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::counting::count_bruteforce;

    fn seq() -> CountOptions {
        CountOptions::sequential()
    }

    #[test]
    fn deletion_scan_at_four() {
        let res = scan_subsets(4, 3, 3, &ScanStrategy::Deletions, &seq()).unwrap();
        assert_eq!(res.full_count, BigUint::from(51u32));
        let get = |s: &[i64]| res.entries.iter().find(|e| e.subset == s).unwrap().count.clone();
        assert_eq!(get(&[1, 2, 3]), BigUint::from(21u32));
        assert_eq!(get(&[1, 2, 4]), BigUint::from(27u32));
        assert!(res.violations.is_empty());
        assert!(res.complete);
        assert_eq!(res.max_count, BigUint::from(27u32));
    }

    #[test]
    fn trivial_regime_scan_is_strict() {
        for strategy in [ScanStrategy::AllSubsets, ScanStrategy::Deletions] {
            let res = scan_subsets(6, 2, 3, &strategy, &seq()).unwrap();
            assert_eq!(res.full_count, BigUint::from(64u32));
            for e in &res.entries {
                assert_eq!(e.count, BigUint::from(2u32).pow(e.subset.len() as u32));
            }
            assert!(res.violations.is_empty());
        }
    }

    #[test]
    fn scan_matches_brute_force() {
        let res = scan_subsets(7, 3, 3, &ScanStrategy::AllSubsets, &seq()).unwrap();
        assert_eq!(res.entries.len(), 126);
        for e in res.entries.iter().step_by(5) {
            let g = GroundSet::subset(7, &e.subset).unwrap();
            assert_eq!(count_bruteforce::<BigUint>(&g, 3, 3, &seq()).unwrap().count, e.count);
        }
        assert_eq!(res.rows().iter().filter(|r| r.2).count(), 1);
    }

    #[test]
    fn random_scan_is_reproducible() {
        let s = ScanStrategy::Random { samples: 30, density: 0.6, seed: 7 };
        assert_eq!(s.subsets(12).unwrap(), s.subsets(12).unwrap());
        assert!(ScanStrategy::Random { samples: 1, density: 1.5, seed: 0 }.subsets(5).is_err());
        assert!(ScanStrategy::AllSubsets.subsets(MAX_ALL_SUBSETS_N + 1).is_err());
    }

    #[test]
    fn anti_vdw_anchors() {
        let aw3 = anti_vdw(&GroundSet::interval(3).unwrap(), 3, &seq()).unwrap();
        assert_eq!(aw3.aw, 3);
        let aw4 = anti_vdw(&GroundSet::interval(4).unwrap(), 3, &seq()).unwrap();
        assert_eq!(aw4.aw, 4);
        assert_eq!(aw4.witness.colors_used(), 3);
        assert!(aw4.witness.is_exact());
        assert!(crate::templates::rainbow_witness(&aw4.witness, 3).unwrap().is_none());
        assert!(aw4.merge_check);
        // the coloring (1,2,2,3) is one such witness
        let c = Coloring::new(GroundSet::interval(4).unwrap(), 3, vec![1, 2, 2, 3]).unwrap();
        assert!(crate::templates::rainbow_witness(&c, 3).unwrap().is_none());
        assert!(anti_vdw(&GroundSet::subset(4, &[1, 2, 4]).unwrap(), 3, &seq()).is_err());
    }

    #[test]
    fn cyclic_small() {
        let c = cyclic_compare(4, 3, 3, &seq()).unwrap();
        assert_eq!(c.g_interval, BigUint::from(51u32));
        assert!(c.g_cyclic <= c.g_interval);
        let z4 = GroundSet::cyclic(4).unwrap();
        assert_eq!(count_bruteforce::<BigUint>(&z4, 3, 3, &seq()).unwrap().count, c.g_cyclic);
        let t = cyclic_compare(6, 2, 3, &seq()).unwrap();
        assert_eq!(t.g_cyclic, BigUint::from(64u32));
        assert_eq!(t.g_interval, BigUint::from(64u32));
    }

    #[test]
    fn sidon_small() {
        let rep = sidon_experiment(4, 4, &ScanStrategy::AllSubsets, &seq()).unwrap();
        assert_eq!(rep.scan.full_count, BigUint::from(232u32));
        assert!(rep.fraction_at_most_3 <= BigRational::from_integer(1.into()));
        let rep = sidon_experiment(3, 5, &ScanStrategy::Deletions, &seq()).unwrap();
        assert_eq!(rep.scan.full_count, BigUint::from(125u32));
        assert_eq!(rep.fraction_at_most_3, BigRational::from_integer(1.into()));
    }
}
