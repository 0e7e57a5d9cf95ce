//! Backtracking kernels over a [`ConstraintSystem`].
//!
//! Positions are colored in ascending order. After position `p` is colored
//! only the edges whose largest position is `p` are checked, so every edge
//! is tested exactly once per branch. Parallel runs split the tree at a fixed
//! prefix depth and add the per-shard totals, which makes results
//! independent of the schedule.

use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};
use std::sync::Mutex;
use std::time::Instant;

use rayon::prelude::*;

use super::system::ConstraintSystem;
use super::{Budget, CountOptions};
use crate::error::{Error, Result};

/// Largest number of colors the search kernels handle (colors live in a `u128` mask).
pub(crate) const MAX_SEARCH_COLORS: u32 = 128;

const FLUSH_EVERY: u64 = 1 << 14;

/// Shared node accounting and budget enforcement.
pub(crate) struct Tracker {
    nodes: AtomicU64,
    abort: AtomicBool,
    max_nodes: Option<u64>,
    deadline: Option<Instant>,
    reason: Mutex<Option<String>>,
}

impl Tracker {
    pub(crate) fn new(budget: &Budget) -> Self {
        Tracker {
            nodes: AtomicU64::new(0),
            abort: AtomicBool::new(false),
            max_nodes: budget.max_nodes,
            deadline: budget
                .max_seconds
                .map(|s| Instant::now() + std::time::Duration::from_secs_f64(s.max(0.0))),
            reason: Mutex::new(None),
        }
    }

    /// Adds `n` nodes; returns false once the search must stop.
    pub(crate) fn charge(&self, n: u64) -> bool {
        let total = self.nodes.fetch_add(n, Ordering::Relaxed) + n;
        if let Some(max) = self.max_nodes {
            if total > max {
                self.stop(format!("node budget of {max} exhausted"));
            }
        }
        if let Some(deadline) = self.deadline {
            if Instant::now() > deadline {
                self.stop("time budget exhausted".to_string());
            }
        }
        !self.aborted()
    }

    fn stop(&self, why: String) {
        let mut reason = self.reason.lock().unwrap();
        reason.get_or_insert(why);
        self.abort.store(true, Ordering::Relaxed);
    }

    pub(crate) fn aborted(&self) -> bool {
        self.abort.load(Ordering::Relaxed)
    }

    pub(crate) fn nodes(&self) -> u64 {
        self.nodes.load(Ordering::Relaxed)
    }

    pub(crate) fn finish(&self) -> Result<u64> {
        if self.aborted() {
            let reason = self.reason.lock().unwrap().clone().unwrap_or_default();
            return Err(Error::BudgetExceeded(reason));
        }
        Ok(self.nodes())
    }
}

/// Per-thread node counter that flushes to the tracker in batches.
pub(crate) struct Meter<'a> {
    tracker: &'a Tracker,
    pending: u64,
    stopped: bool,
}

impl<'a> Meter<'a> {
    pub(crate) fn new(tracker: &'a Tracker) -> Self {
        Meter { tracker, pending: 0, stopped: tracker.aborted() }
    }

    /// Counts one node; returns false when the search must unwind.
    #[inline]
    pub(crate) fn tick(&mut self) -> bool {
        self.pending += 1;
        if self.pending >= FLUSH_EVERY {
            self.stopped = !self.tracker.charge(self.pending);
            self.pending = 0;
        }
        !self.stopped
    }
}

impl Drop for Meter<'_> {
    fn drop(&mut self) {
        if self.pending > 0 {
            self.tracker.charge(self.pending);
        }
    }
}

/// Runs `f` over `items` with the requested number of workers and returns the
/// results in item order.
pub(crate) fn map_shards<T, R, F>(workers: usize, items: Vec<T>, f: F) -> Result<Vec<R>>
where
    T: Send,
    R: Send,
    F: Fn(T) -> R + Send + Sync,
{
    if workers <= 1 || items.len() <= 1 {
        return Ok(items.into_iter().map(f).collect());
    }
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(workers)
        .build()
        .map_err(|e| Error::Unsupported(format!("cannot start worker pool: {e}")))?;
    Ok(pool.install(|| items.into_par_iter().map(f).collect()))
}

pub(crate) fn check_search_colors(r: u32, sys: &ConstraintSystem) -> Result<()> {
    if r == 0 {
        return Err(Error::invalid("the number of colors r must be at least 1"));
    }
    if r > MAX_SEARCH_COLORS && !sys.edges().is_empty() {
        return Err(Error::Unsupported(format!(
            "search counters handle at most {MAX_SEARCH_COLORS} colors, got {r}"
        )));
    }
    Ok(())
}

/// Prefix colorings of the first `depth` positions with no completed rainbow
/// edge. With `canonical`, color labels appear in first-use order; the
/// second tuple field is the number of labels used.
fn prefixes(sys: &ConstraintSystem, r: u8, depth: usize, canonical: bool) -> Vec<(Vec<u8>, u8)> {
    let mut out = vec![(Vec::new(), 0u8)];
    for pos in 0..depth {
        let mut next = Vec::new();
        for (prefix, used) in out {
            let top = if canonical { used.saturating_add(1).min(r) } else { r };
            for c in 0..top {
                let mut p = prefix.clone();
                p.push(c);
                let used = used.max(c + 1);
                let mut colors = p.clone();
                colors.resize(sys.len(), 0);
                if !sys.completes_rainbow(pos, &colors) {
                    next.push((p, used));
                }
            }
        }
        out = next;
    }
    out
}

fn pruned_dfs(sys: &ConstraintSystem, r: u8, pos: usize, colors: &mut [u8], meter: &mut Meter) -> u128 {
    if !meter.tick() {
        return 0;
    }
    if pos == sys.len() {
        return 1;
    }
    let mut total = 0;
    for c in 0..r {
        colors[pos] = c;
        if !sys.completes_rainbow(pos, colors) {
            total += pruned_dfs(sys, r, pos + 1, colors, meter);
        }
    }
    total
}

/// Number of rainbow-free colorings of `sys` with `r` colors (`r <= 128`).
pub(crate) fn pruned_count(sys: &ConstraintSystem, r: u32, opts: &CountOptions, tracker: &Tracker) -> Result<u128> {
    let r = r as u8;
    let depth = opts.shard_depth.min(sys.len());
    let shards = prefixes(sys, r, depth, false);
    let totals = map_shards(opts.workers, shards, |(prefix, _)| {
        let mut colors = prefix;
        colors.resize(sys.len(), 0);
        let mut meter = Meter::new(tracker);
        pruned_dfs(sys, r, depth, &mut colors, &mut meter)
    })?;
    totals
        .into_iter()
        .try_fold(0u128, |a, b| a.checked_add(b))
        .ok_or(Error::Overflow("pruned count"))
}

fn canonical_dfs(
    sys: &ConstraintSystem,
    max_labels: u8,
    pos: usize,
    used: u8,
    colors: &mut [u8],
    by_labels: &mut [u128],
    meter: &mut Meter,
) {
    if !meter.tick() {
        return;
    }
    if pos == sys.len() {
        by_labels[used as usize] += 1;
        return;
    }
    let top = used.saturating_add(1).min(max_labels);
    for c in 0..top {
        colors[pos] = c;
        if !sys.completes_rainbow(pos, colors) {
            canonical_dfs(sys, max_labels, pos + 1, used.max(c + 1), colors, by_labels, meter);
        }
    }
}

/// Rainbow-free colorings in canonical first-use labeling, bucketed by the
/// number of labels used (index `t` for `0..=max_labels`).
pub(crate) fn canonical_counts(
    sys: &ConstraintSystem,
    max_labels: u32,
    opts: &CountOptions,
    tracker: &Tracker,
) -> Result<Vec<u128>> {
    let max_labels = max_labels.min(sys.len() as u32);
    if max_labels > MAX_SEARCH_COLORS {
        return Err(Error::Unsupported(format!(
            "canonical search handles at most {MAX_SEARCH_COLORS} labels"
        )));
    }
    let max_labels = max_labels as u8;
    let buckets = max_labels as usize + 1;
    if sys.is_empty() {
        let mut v = vec![0; buckets];
        v[0] = 1;
        return Ok(v);
    }
    let depth = opts.shard_depth.min(sys.len());
    let shards = prefixes(sys, max_labels, depth, true);
    let parts = map_shards(opts.workers, shards, |(prefix, used)| {
        let mut colors = prefix;
        colors.resize(sys.len(), 0);
        let mut by_labels = vec![0u128; buckets];
        let mut meter = Meter::new(tracker);
        canonical_dfs(sys, max_labels, depth, used, &mut colors, &mut by_labels, &mut meter);
        by_labels
    })?;
    let mut total = vec![0u128; buckets];
    for part in parts {
        for (t, v) in part.into_iter().enumerate() {
            total[t] = total[t].checked_add(v).ok_or(Error::Overflow("canonical count"))?;
        }
    }
    Ok(total)
}

fn exact_dfs(
    sys: &ConstraintSystem,
    target: u8,
    pos: usize,
    used: u8,
    colors: &mut [u8],
    meter: &mut Meter,
) -> bool {
    if !meter.tick() {
        return false;
    }
    let remaining = sys.len() - pos;
    if (used as usize) + remaining < target as usize {
        return false;
    }
    if pos == sys.len() {
        return used == target;
    }
    let top = used.saturating_add(1).min(target);
    for c in 0..top {
        colors[pos] = c;
        if !sys.completes_rainbow(pos, colors) && exact_dfs(sys, target, pos + 1, used.max(c + 1), colors, meter) {
            return true;
        }
    }
    false
}

/// Some rainbow-free coloring using exactly `target` labels (first-use
/// order, labels `0..target`), if one exists.
pub(crate) fn find_exact(sys: &ConstraintSystem, target: u32, tracker: &Tracker) -> Result<Option<Vec<u8>>> {
    if target as usize > sys.len() || target > MAX_SEARCH_COLORS {
        return Ok(None);
    }
    let mut colors = vec![0u8; sys.len()];
    let mut meter = Meter::new(tracker);
    let found = exact_dfs(sys, target as u8, 0, 0, &mut colors, &mut meter);
    drop(meter);
    tracker.finish()?;
    Ok(found.then_some(colors))
}

/// Tests all `r^len` colorings one by one.
pub(crate) fn brute_force_count(sys: &ConstraintSystem, r: u32, opts: &CountOptions, tracker: &Tracker) -> Result<u128> {
    let r = r as u8;
    let len = sys.len();
    let depth = opts.shard_depth.min(len);
    // every prefix, unfiltered
    let mut shards: Vec<Vec<u8>> = vec![Vec::new()];
    for _ in 0..depth {
        shards = shards
            .into_iter()
            .flat_map(|p| {
                (0..r).map(move |c| {
                    let mut q = p.clone();
                    q.push(c);
                    q
                })
            })
            .collect();
    }
    let totals = map_shards(opts.workers, shards, |prefix| {
        let mut colors = prefix;
        colors.resize(len, 0);
        let mut meter = Meter::new(tracker);
        let mut count = 0u128;
        loop {
            if !meter.tick() {
                return 0;
            }
            if sys.is_rainbow_free(&colors) {
                count += 1;
            }
            // odometer over the suffix
            let mut i = len;
            loop {
                if i == depth {
                    return count;
                }
                i -= 1;
                colors[i] += 1;
                if colors[i] < r {
                    break;
                }
                colors[i] = 0;
            }
        }
    })?;
    totals
        .into_iter()
        .try_fold(0u128, |a, b| a.checked_add(b))
        .ok_or(Error::Overflow("brute-force count"))
}
