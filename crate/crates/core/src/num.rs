//! Scalar abstraction for exact counts.

use std::fmt::{Debug, Display};
use std::str::FromStr;

use num_bigint::BigUint;
use num_traits::{CheckedAdd, CheckedMul, CheckedSub, FromPrimitive, Num};

use crate::error::{Error, Result};

/// An exact natural-number type that counts can be accumulated in.
///
/// Implemented for `u64`, `u128` and [`BigUint`]. All arithmetic goes through
/// the checked operations so fixed-width types surface overflow as
/// [`Error::Overflow`].
pub trait Count:
    Num
    + Clone
    + Ord
    + Debug
    + Display
    + FromStr
    + FromPrimitive
    + CheckedAdd
    + CheckedMul
    + CheckedSub
    + Into<BigUint>
    + Send
    + Sync
    + 'static
{
    fn lift(v: u128) -> Result<Self> {
        Self::from_u128(v).ok_or(Error::Overflow("count conversion"))
    }

    fn add_c(&self, other: &Self) -> Result<Self> {
        self.checked_add(other).ok_or(Error::Overflow("count addition"))
    }

    fn mul_c(&self, other: &Self) -> Result<Self> {
        self.checked_mul(other).ok_or(Error::Overflow("count multiplication"))
    }

    fn sub_c(&self, other: &Self) -> Result<Self> {
        self.checked_sub(other).ok_or(Error::Overflow("count subtraction"))
    }
}

impl Count for u64 {}
impl Count for u128 {}
impl Count for BigUint {}

pub fn pow<C: Count>(base: u64, exp: u64) -> Result<C> {
    let b = C::lift(base as u128)?;
    let mut acc = C::one();
    for _ in 0..exp {
        acc = acc.mul_c(&b)?;
    }
    Ok(acc)
}

/// Binomial coefficient; zero when `k > n`.
pub fn binomial<C: Count>(n: u64, k: u64) -> Result<C> {
    if k > n {
        return Ok(C::zero());
    }
    let k = k.min(n - k);
    let mut acc = C::one();
    for i in 0..k {
        // acc * (n - i) is divisible by (i + 1) at every step
        acc = acc.mul_c(&C::lift((n - i) as u128)?)? / C::lift((i + 1) as u128)?;
    }
    Ok(acc)
}

/// Falling factorial `n (n-1) ... (n-k+1)`.
pub fn falling<C: Count>(n: u64, k: u64) -> Result<C> {
    if k > n {
        return Ok(C::zero());
    }
    let mut acc = C::one();
    for i in 0..k {
        acc = acc.mul_c(&C::lift((n - i) as u128)?)?;
    }
    Ok(acc)
}

pub fn factorial<C: Count>(n: u64) -> Result<C> {
    falling(n, n)
}

/// Difference of two accumulators that is known to be non-negative.
pub(crate) fn signed_total<C: Count>(pos: C, neg: C, what: &'static str) -> Result<C> {
    pos.checked_sub(&neg).ok_or(Error::Overflow(what))
}
