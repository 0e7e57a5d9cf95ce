//! Exact counts of rainbow-free colorings.
//!
//! Four independent routes produce the same number `g_{r,k}(S)`:
//!
//! * [`count_bruteforce`] tests every one of the `r^|S|` colorings;
//! * [`count_pruned`] backtracks in ascending element order and cuts a branch
//!   as soon as a rainbow progression is completed;
//! * [`count_symmetry`] enumerates colorings up to relabeling of colors and
//!   recombines them as `sum_t C(r,t) e_t`, where `e_t` counts rainbow-free
//!   colorings onto exactly the colors `[t]`;
//! * [`count_inclusion_exclusion`] sums signed chromatic counts over families
//!   of progressions.

mod formulas;
mod inclusion_exclusion;
mod search;
mod system;

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use num_bigint::{BigInt, BigUint};
use num_rational::BigRational;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub use formulas::{f_below_k, f_below_k_by_exact, f_exact, SurjectiveCountTable};
pub use system::ConstraintSystem;

pub(crate) use search::{find_exact, map_shards as map_ordered, Tracker};

use crate::error::{Error, Result};
use crate::ground::GroundSet;
use crate::num::{binomial, factorial, falling, pow, Count};
use crate::progressions::LinearPattern;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Method {
    Bruteforce,
    Pruned,
    Symmetry,
    InclusionExclusion,
    Formula,
}

impl Method {
    pub fn as_str(&self) -> &'static str {
        match self {
            Method::Bruteforce => "bruteforce",
            Method::Pruned => "pruned",
            Method::Symmetry => "symmetry",
            Method::InclusionExclusion => "inclusion_exclusion",
            Method::Formula => "formula",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Method {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "bruteforce" => Method::Bruteforce,
            "pruned" | "auto" => Method::Pruned,
            "symmetry" => Method::Symmetry,
            "ie" | "inclusion_exclusion" => Method::InclusionExclusion,
            "formula" => Method::Formula,
            other => return Err(Error::parse(format!("unknown method {other:?}"))),
        })
    }
}

/// Resource limits. Exhausting one is an error, never a silent partial count.
#[derive(Clone, Debug, PartialEq)]
pub struct Budget {
    pub max_nodes: Option<u64>,
    pub max_seconds: Option<f64>,
    /// Largest `r^|S|` the brute-force counter will attempt.
    pub bruteforce_ceiling: u128,
}

impl Default for Budget {
    fn default() -> Self {
        Budget { max_nodes: None, max_seconds: None, bruteforce_ceiling: 1_000_000_000 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct CountOptions {
    pub workers: usize,
    pub budget: Budget,
    /// Number of leading elements whose colors define a parallel shard.
    pub shard_depth: usize,
    /// Largest number of constraint sets inclusion–exclusion accepts.
    pub ie_limit: usize,
}

impl Default for CountOptions {
    fn default() -> Self {
        CountOptions {
            workers: std::thread::available_parallelism().map_or(1, usize::from),
            budget: Budget::default(),
            shard_depth: 3,
            ie_limit: 20,
        }
    }
}

impl CountOptions {
    pub fn with_workers(mut self, workers: usize) -> Self {
        self.workers = workers.max(1);
        self
    }

    pub fn sequential() -> Self {
        Self::default().with_workers(1)
    }
}

/// The outcome of one count, serialized as a single JSON object with the
/// count as a decimal string.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(bound(serialize = "C: fmt::Display", deserialize = "C: FromStr"))]
pub struct CountReport<C> {
    pub ground: String,
    pub r: u32,
    pub k_or_pattern: String,
    pub method: Method,
    #[serde(serialize_with = "display_string", deserialize_with = "parse_string")]
    pub count: C,
    /// Absent in `--stable` output, read back as 0.
    #[serde(default)]
    pub elapsed_ms: u64,
    pub nodes: u64,
}

fn display_string<C: fmt::Display, S: Serializer>(v: &C, s: S) -> Result<S::Ok, S::Error> {
    s.collect_str(v)
}

fn parse_string<'de, C: FromStr, D: Deserializer<'de>>(d: D) -> Result<C, D::Error> {
    let s = String::deserialize(d)?;
    s.parse().map_err(|_| serde::de::Error::custom(format!("invalid count {s:?}")))
}

impl<C: Count> CountReport<C> {
    pub fn to_json(&self) -> String {
        serde_json::to_string(self).expect("report serializes")
    }

    pub fn from_json(line: &str) -> Result<Self> {
        serde_json::from_str(line).map_err(|e| Error::parse(e.to_string()))
    }
}

fn check_r(r: u32) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("the number of colors r must be at least 1"));
    }
    Ok(())
}

/// Counts rainbow-free `r`-colorings of a constraint system with `method`.
/// Returns the count and the number of search nodes visited.
pub fn count_system<C: Count>(
    sys: &ConstraintSystem,
    r: u32,
    method: Method,
    opts: &CountOptions,
) -> Result<(C, u64)> {
    check_r(r)?;
    let tracker = Tracker::new(&opts.budget);
    let count = match method {
        Method::Bruteforce => {
            let within = (r as u128)
                .checked_pow(sys.len() as u32)
                .is_some_and(|t| t <= opts.budget.bruteforce_ceiling);
            if !within {
                return Err(Error::BudgetExceeded(format!(
                    "{r}^{} colorings exceed the brute-force ceiling of {}",
                    sys.len(),
                    opts.budget.bruteforce_ceiling
                )));
            }
            search::check_search_colors(r, sys)?;
            C::lift(search::brute_force_count(sys, r, opts, &tracker)?)?
        }
        Method::Pruned => {
            let relevant = sys.drop_edges_larger_than(r);
            let (covered, free) = relevant.covered_part();
            search::check_search_colors(r, &covered)?;
            let core = if covered.edges().is_empty() {
                1
            } else {
                search::pruned_count(&covered, r, opts, &tracker)?
            };
            pow::<C>(r as u64, free as u64)?.mul_c(&C::lift(core)?)?
        }
        Method::Symmetry => {
            search::check_search_colors(r.min(sys.len() as u32).max(1), sys)?;
            let by_labels = search::canonical_counts(sys, r, opts, &tracker)?;
            by_labels.iter().enumerate().try_fold(C::zero(), |acc, (t, &p)| {
                acc.add_c(&falling::<C>(r as u64, t as u64)?.mul_c(&C::lift(p)?)?)
            })?
        }
        Method::InclusionExclusion => {
            let relevant = sys.drop_edges_larger_than(r);
            let (pos, neg) = inclusion_exclusion::ie_sums(&relevant, r, opts, &tracker)?;
            let diff = pos
                .checked_sub(neg)
                .ok_or_else(|| Error::Invariant("negative inclusion-exclusion total".into()))?;
            C::lift(diff)?
        }
        Method::Formula => {
            if !sys.drop_edges_larger_than(r).edges().is_empty() {
                return Err(Error::Unsupported(
                    "no closed formula applies while rainbow constraints are possible".into(),
                ));
            }
            pow::<C>(r as u64, sys.len() as u64)?
        }
    };
    let nodes = tracker.finish()?;
    Ok((count, nodes))
}

/// `e_t` for `t = 0..=max_t`: rainbow-free colorings whose color set is
/// exactly `[t]`. Also returns the nodes visited.
pub fn exact_color_counts<C: Count>(
    sys: &ConstraintSystem,
    max_t: u32,
    opts: &CountOptions,
) -> Result<(Vec<C>, u64)> {
    let tracker = Tracker::new(&opts.budget);
    search::check_search_colors(max_t.min(sys.len() as u32).max(1), sys)?;
    let by_labels = search::canonical_counts(sys, max_t, opts, &tracker)?;
    let nodes = tracker.finish()?;
    let mut out = Vec::with_capacity(max_t as usize + 1);
    for t in 0..=max_t as usize {
        let p = by_labels.get(t).copied().unwrap_or(0);
        out.push(factorial::<C>(t as u64)?.mul_c(&C::lift(p)?)?);
    }
    Ok((out, nodes))
}

fn report<C: Count>(
    ground: &GroundSet,
    r: u32,
    label: String,
    method: Method,
    opts: &CountOptions,
    sys: impl FnOnce() -> Result<ConstraintSystem>,
) -> Result<CountReport<C>> {
    let start = Instant::now();
    let sys = sys()?;
    let (count, nodes) = count_system::<C>(&sys, r, method, opts)?;
    Ok(CountReport {
        ground: ground.descriptor(),
        r,
        k_or_pattern: label,
        method,
        count,
        elapsed_ms: start.elapsed().as_millis() as u64,
        nodes,
    })
}

/// `g_{r,k}(S)` with the chosen method.
pub fn count_with<C: Count>(
    ground: &GroundSet,
    r: u32,
    k: usize,
    method: Method,
    opts: &CountOptions,
) -> Result<CountReport<C>> {
    check_r(r)?;
    report(ground, r, k.to_string(), method, opts, || ConstraintSystem::for_progressions(ground, k))
}

pub fn count_bruteforce<C: Count>(ground: &GroundSet, r: u32, k: usize, opts: &CountOptions) -> Result<CountReport<C>> {
    count_with(ground, r, k, Method::Bruteforce, opts)
}

pub fn count_pruned<C: Count>(ground: &GroundSet, r: u32, k: usize, opts: &CountOptions) -> Result<CountReport<C>> {
    count_with(ground, r, k, Method::Pruned, opts)
}

pub fn count_symmetry<C: Count>(ground: &GroundSet, r: u32, k: usize, opts: &CountOptions) -> Result<CountReport<C>> {
    count_with(ground, r, k, Method::Symmetry, opts)
}

pub fn count_inclusion_exclusion<C: Count>(
    ground: &GroundSet,
    r: u32,
    k: usize,
    opts: &CountOptions,
) -> Result<CountReport<C>> {
    count_with(ground, r, k, Method::InclusionExclusion, opts)
}

/// Rainbow `M`-free `r`-colorings: no element set of a distinct-valued
/// solution of `M x = 0` receives pairwise-distinct colors.
pub fn count_pattern_free<C: Count>(
    ground: &GroundSet,
    r: u32,
    pattern: &LinearPattern,
    method: Method,
    opts: &CountOptions,
) -> Result<CountReport<C>> {
    check_r(r)?;
    if ground.is_cyclic() {
        return Err(Error::Unsupported("linear patterns are defined on [n] and its subsets".into()));
    }
    report(ground, r, pattern.id(), method, opts, || ConstraintSystem::for_pattern(ground, pattern))
}

/// `g_{r,k}([n])` against `(k-1)^n`, next to the few-colors lower bound and
/// the limiting value `C(r, k-1)`.
#[derive(Clone, Debug, PartialEq)]
pub struct RatioReport {
    pub n: u32,
    pub r: u32,
    pub k: usize,
    pub g: BigUint,
    /// `g / (k-1)^n`.
    pub ratio: BigRational,
    /// `f^{<k}(r, n) / (k-1)^n` (or `r^n / (k-1)^n` when `r < k`).
    pub lower: BigRational,
    pub target: BigUint,
    /// `(k-1)^{-(1 - log(k-2)/log(k-1)) n / (8 k^3 log n)}`, the asymptotic
    /// error scale; `None` where it is undefined (`k < 3` or `n < 2`).
    pub error_term: Option<f64>,
}

pub fn ratio_report(n: u32, r: u32, k: usize, opts: &CountOptions) -> Result<RatioReport> {
    if k < 2 {
        return Err(Error::invalid("k must be at least 2"));
    }
    let ground = GroundSet::interval(n)?;
    let g = count_pruned::<BigUint>(&ground, r, k, opts)?.count;
    let lower_count: BigUint = if (r as usize) < k {
        pow(r as u64, n as u64)?
    } else {
        f_below_k(r as u64, k as u64, n as u64)?
    };
    let scale = BigInt::from(pow::<BigUint>(k as u64 - 1, n as u64)?);
    let ratio = BigRational::new(BigInt::from(g.clone()), scale.clone());
    let lower = BigRational::new(BigInt::from(lower_count), scale);
    let error_term = (k >= 3 && n >= 2).then(|| {
        let (k, n) = (k as f64, n as f64);
        let exponent = (1.0 - (k - 2.0).log2() / (k - 1.0).log2()) * n / (8.0 * k.powi(3) * n.log2());
        (k - 1.0).powf(-exponent)
    });
    Ok(RatioReport {
        n,
        r,
        k,
        g,
        ratio,
        lower,
        target: binomial(r as u64, k as u64 - 1)?,
        error_term,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::ToPrimitive;

    fn seq() -> CountOptions {
        CountOptions::sequential()
    }

    fn all_methods(g: &GroundSet, r: u32, k: usize) -> Vec<u64> {
        [Method::Bruteforce, Method::Pruned, Method::Symmetry, Method::InclusionExclusion]
            .into_iter()
            .map(|m| count_with::<u64>(g, r, k, m, &seq()).unwrap().count)
            .collect()
    }

    #[test]
    fn anchor_values() {
        assert_eq!(all_methods(&GroundSet::interval(3).unwrap(), 3, 3), vec![21; 4]);
        assert_eq!(all_methods(&GroundSet::interval(4).unwrap(), 3, 3), vec![51; 4]);
        assert_eq!(all_methods(&GroundSet::subset(4, &[1, 2, 4]).unwrap(), 3, 3), vec![27; 4]);
    }

    #[test]
    fn trivial_regime_every_method() {
        for n in 1..=7 {
            let g = GroundSet::interval(n).unwrap();
            for k in 3..=5usize {
                for r in 1..k as u32 {
                    let expect = (r as u64).pow(n);
                    assert_eq!(all_methods(&g, r, k), vec![expect; 4]);
                }
            }
        }
        // r <= k-1 never searches in the pruned counter
        let big = GroundSet::interval(200).unwrap();
        let rep = count_pruned::<BigUint>(&big, 2, 3, &seq()).unwrap();
        assert_eq!(rep.count, BigUint::from(2u32).pow(200));
        assert_eq!(rep.nodes, 0);
    }

    #[test]
    fn exact_counts_recombine() {
        let g = GroundSet::interval(3).unwrap();
        let sys = ConstraintSystem::for_progressions(&g, 3).unwrap();
        let (e, _) = exact_color_counts::<u64>(&sys, 3, &seq()).unwrap();
        assert_eq!(e, vec![0, 1, 6, 0]);
        let total: u64 = (0..=3).map(|t| binomial::<u64>(3, t).unwrap() * e[t as usize]).sum();
        assert_eq!(total, 21);
        let (e, _) = exact_color_counts::<u64>(&sys, 6, &seq()).unwrap();
        assert_eq!(&e[4..], &[0, 0, 0]);
    }

    #[test]
    fn brute_force_ceiling() {
        let g = GroundSet::interval(20).unwrap();
        let err = count_bruteforce::<u64>(&g, 3, 3, &seq()).unwrap_err();
        assert!(matches!(err, Error::BudgetExceeded(_)));
    }

    #[test]
    fn node_budget_is_reported() {
        let g = GroundSet::interval(14).unwrap();
        let mut opts = seq();
        opts.budget.max_nodes = Some(1000);
        for m in [Method::Pruned, Method::Symmetry] {
            let err = count_with::<u64>(&g, 4, 3, m, &opts).unwrap_err();
            assert!(matches!(err, Error::BudgetExceeded(_)), "{m}: {err}");
        }
    }

    #[test]
    fn ie_limit() {
        let g = GroundSet::interval(11).unwrap();
        assert!(matches!(
            count_inclusion_exclusion::<u64>(&g, 3, 3, &seq()),
            Err(Error::Unsupported(_))
        ));
    }

    #[test]
    fn pattern_counts() {
        let g4 = GroundSet::interval(4).unwrap();
        let sidon = LinearPattern::sidon();
        for m in [Method::Bruteforce, Method::Pruned, Method::Symmetry, Method::InclusionExclusion] {
            assert_eq!(count_pattern_free::<u64>(&g4, 4, &sidon, m, &seq()).unwrap().count, 232);
        }
        let g3 = GroundSet::interval(3).unwrap();
        assert_eq!(count_pattern_free::<u64>(&g3, 5, &sidon, Method::Pruned, &seq()).unwrap().count, 125);
        let ap3 = LinearPattern::ap_matrix(3).unwrap();
        assert_eq!(count_pattern_free::<u64>(&g4, 3, &ap3, Method::Pruned, &seq()).unwrap().count, 51);
        assert!(count_pattern_free::<u64>(&GroundSet::cyclic(4).unwrap(), 3, &ap3, Method::Pruned, &seq()).is_err());
    }

    #[test]
    fn report_json_round_trip() {
        let rep = count_pruned::<BigUint>(&GroundSet::interval(4).unwrap(), 3, 3, &seq()).unwrap();
        let line = rep.to_json();
        assert!(line.contains("\"count\":\"51\""));
        assert!(line.contains("\"method\":\"pruned\""));
        assert_eq!(CountReport::<BigUint>::from_json(&line).unwrap(), rep);
        assert!(CountReport::<BigUint>::from_json(&line.replace("\"51\"", "\"x\"")).is_err());
    }

    #[test]
    fn method_names() {
        for m in [Method::Bruteforce, Method::Pruned, Method::Symmetry, Method::InclusionExclusion, Method::Formula] {
            assert_eq!(m.as_str().parse::<Method>().unwrap(), m);
        }
        assert_eq!("ie".parse::<Method>().unwrap(), Method::InclusionExclusion);
        assert_eq!("auto".parse::<Method>().unwrap(), Method::Pruned);
        assert!("fast".parse::<Method>().is_err());
    }

    #[test]
    fn ratio_values() {
        let rep = ratio_report(3, 3, 3, &seq()).unwrap();
        assert_eq!(rep.ratio, BigRational::new(21.into(), 8.into()));
        assert_eq!(rep.lower, BigRational::new(21.into(), 8.into()));
        assert_eq!(rep.target, BigUint::from(3u32));
        let rep = ratio_report(4, 3, 3, &seq()).unwrap();
        assert_eq!(rep.ratio.to_f64().unwrap(), 3.1875);
        assert_eq!(rep.lower, BigRational::new(45.into(), 16.into()));
        assert!(rep.error_term.is_some());
    }

    #[test]
    fn counts_are_monotone_in_r() {
        for n in 1..=8 {
            let g = GroundSet::interval(n).unwrap();
            for k in 3..=4 {
                let counts: Vec<u64> =
                    (1..=6).map(|r| count_pruned::<u64>(&g, r, k, &seq()).unwrap().count).collect();
                assert!(counts.windows(2).all(|w| w[0] <= w[1]), "{counts:?}");
            }
        }
    }
}
