//! Closed formulas for exact colorings and colorings with few colors.

use crate::error::{Error, Result};
use crate::num::{binomial, pow, signed_total, Count};

/// Number of exact (surjective) `t`-colorings of an `s`-element set:
/// `sum_{i=0}^{t-1} (-1)^i C(t,i) (t-i)^s`.
pub fn f_exact<C: Count>(t: u64, s: u64) -> Result<C> {
    if t == 0 {
        return Err(Error::invalid("exact colorings need t >= 1"));
    }
    if s == 0 {
        // the alternating sum omits the 0^0 term, so handle the empty set directly
        return Ok(C::zero());
    }
    let mut pos = C::zero();
    let mut neg = C::zero();
    for i in 0..t {
        let term = binomial::<C>(t, i)?.mul_c(&pow::<C>(t - i, s)?)?;
        if i % 2 == 0 {
            pos = pos.add_c(&term)?;
        } else {
            neg = neg.add_c(&term)?;
        }
    }
    signed_total(pos, neg, "exact coloring count")
}

fn check_below_k(r: u64, k: u64, s: u64) -> Result<()> {
    if s == 0 {
        return Err(Error::invalid("the few-colors count needs a nonempty set"));
    }
    if k < 2 {
        return Err(Error::invalid(format!("k must be at least 2, got {k}")));
    }
    if r < k {
        return Err(Error::invalid(format!("the few-colors count needs r >= k, got r={r}, k={k}")));
    }
    Ok(())
}

/// Number of `r`-colorings of an `s`-set using at most `k-1` colors, by the
/// double sum `sum_{t=1}^{k-1} t^s sum_{j=t}^{k-1} C(r,j) C(j,j-t) (-1)^{j-t}`.
pub fn f_below_k<C: Count>(r: u64, k: u64, s: u64) -> Result<C> {
    check_below_k(r, k, s)?;
    let mut pos = C::zero();
    let mut neg = C::zero();
    for t in 1..k {
        let power = pow::<C>(t, s)?;
        for j in t..k {
            let term = power.mul_c(&binomial::<C>(r, j)?)?.mul_c(&binomial::<C>(j, j - t)?)?;
            if (j - t) % 2 == 0 {
                pos = pos.add_c(&term)?;
            } else {
                neg = neg.add_c(&term)?;
            }
        }
    }
    signed_total(pos, neg, "few-colors count")
}

/// Same quantity as [`f_below_k`], as `sum_{j=1}^{k-1} C(r,j) f(j,s)`.
pub fn f_below_k_by_exact<C: Count>(r: u64, k: u64, s: u64) -> Result<C> {
    check_below_k(r, k, s)?;
    (1..k).try_fold(C::zero(), |acc, j| {
        acc.add_c(&binomial::<C>(r, j)?.mul_c(&f_exact::<C>(j, s)?)?)
    })
}

/// Table of surjection counts `f(t, s)` for `1 <= t <= max_t`, `0 <= s <= max_s`,
/// filled by the recurrence `f(t,s) = t (f(t,s-1) + f(t-1,s-1))`.
#[derive(Clone, Debug)]
pub struct SurjectiveCountTable<C> {
    max_t: usize,
    max_s: usize,
    entries: Vec<C>,
}

impl<C: Count> SurjectiveCountTable<C> {
    pub fn new(max_t: usize, max_s: usize) -> Result<Self> {
        let width = max_s + 1;
        // row t = 0 is the sentinel f(0, s) = [s == 0]
        let mut entries = vec![C::zero(); (max_t + 1) * width];
        entries[0] = C::one();
        for t in 1..=max_t {
            let tc = C::lift(t as u128)?;
            for s in 1..width {
                let prev = entries[t * width + s - 1].add_c(&entries[(t - 1) * width + s - 1])?;
                entries[t * width + s] = tc.mul_c(&prev)?;
            }
        }
        Ok(SurjectiveCountTable { max_t, max_s, entries })
    }

    pub fn get(&self, t: usize, s: usize) -> Option<&C> {
        (t >= 1 && t <= self.max_t && s <= self.max_s).then(|| &self.entries[t * (self.max_s + 1) + s])
    }
}
