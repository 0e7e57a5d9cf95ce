//! Exact combinatorics for rainbow arithmetic-progression-free colorings.
//!
//! The crate counts and searches `r`-colorings of integer sets (intervals
//! `[n]`, arbitrary subsets of `[n]`, and cyclic groups `Z_n`) that contain no
//! `k`-term arithmetic progression whose elements all receive distinct colors.
//!
//! Counting code is generic over the [`Count`] type so the same routines run
//! on `u64`, `u128` or arbitrary-precision [`BigCount`]. Fixed-width counts
//! report overflow instead of wrapping.

pub mod counting;
pub mod error;
pub mod extremal;
pub mod ground;
pub mod num;
pub mod progressions;
pub mod templates;

pub use counting::{
    count_bruteforce, count_inclusion_exclusion, count_pattern_free, count_pruned,
    count_symmetry, count_system, count_with, exact_color_counts, f_below_k, f_below_k_by_exact, f_exact,
    ratio_report, Budget, ConstraintSystem, CountOptions, CountReport, Method, RatioReport,
    SurjectiveCountTable,
};
pub use error::{Error, Result};
pub use extremal::{
    anti_vdw, cyclic_compare, merge_preserves_freeness, scan_subsets, sidon_experiment, AwResult, CyclicComparison,
    ScanEntry, ScanResult, ScanStrategy, SidonReport,
};
pub use ground::{GroundKind, GroundSet};
pub use num::Count;
pub use progressions::{
    enumerate_k_aps, enumerate_pattern_solutions, gamma_closed_form, gamma_first_term, gamma_k,
    refine_difference_set, LinearPattern, Progression,
};
pub use templates::{
    coloring_to_template, container_statistic, count_rainbow_aps_of_coloring,
    count_rainbow_subtemplates, is_subtemplate, rainbow_witness, Coloring, ContainerStatistic,
    Template,
};

/// Arbitrary-precision natural used for every count the CLI reports.
pub type BigCount = num_bigint::BigUint;
/// Exact rational used by ratio reports.
pub type BigRatio = num_rational::BigRational;
/// Count report with an arbitrary-precision count.
pub type BigCountReport = CountReport<BigCount>;
