//! Binary-support arithmetic.
//!
//! A positive natural is read as the finite set of positions of its nonzero
//! binary digits. [`lambda`] and [`mu`] are the least and greatest such
//! positions; [`block`] builds the number whose support is a contiguous run of
//! positions. Apartness and separation are the block-sequence conditions
//! phrased through these two functions.

use crate::error::{Error, Result};

/// Set of bit positions (counted from the least significant bit) of a
/// positive natural, in ascending order.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BitSupport {
    positions: Vec<u32>,
}

impl BitSupport {
    pub fn of(x: u64) -> Result<Self> {
        if x == 0 {
            return Err(Error::Zero { op: "bit support" });
        }
        let positions = (0..u64::BITS).filter(|p| x >> p & 1 == 1).collect();
        Ok(Self { positions })
    }

    pub fn positions(&self) -> &[u32] {
        &self.positions
    }

    pub fn min(&self) -> u32 {
        self.positions[0]
    }

    pub fn max(&self) -> u32 {
        self.positions[self.positions.len() - 1]
    }

    pub fn value(&self) -> u64 {
        self.positions.iter().map(|p| 1u64 << p).sum()
    }

    pub fn union(&self, other: &Self) -> Self {
        let mut positions: Vec<u32> = self
            .positions
            .iter()
            .chain(&other.positions)
            .copied()
            .collect();
        positions.sort_unstable();
        positions.dedup();
        Self { positions }
    }
}

/// Position of the least significant nonzero bit: the unique `n` with
/// `2^n | x` and `2^(n+1) ∤ x`.
pub fn lambda(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::Zero { op: "lambda" });
    }
    Ok(x.trailing_zeros())
}

/// Position of the most significant nonzero bit, `floor(log2 x)`.
pub fn mu(x: u64) -> Result<u32> {
    if x == 0 {
        return Err(Error::Zero { op: "mu" });
    }
    Ok(u64::BITS - 1 - x.leading_zeros())
}

/// `2^lo + 2^(lo+1) + ... + 2^hi`.
pub fn block(lo: u64, hi: u64) -> Result<u64> {
    if lo > hi {
        return Err(Error::InvalidRange { lo, hi });
    }
    if hi >= u64::from(u64::BITS) {
        return Err(Error::Overflow { op: "block" });
    }
    Ok((u64::MAX >> (63 - hi)) >> lo << lo)
}

/// `mu(earlier) < lambda(later)` for every consecutive pair.
pub fn is_apart(seq: &[u64]) -> Result<bool> {
    if seq.contains(&0) {
        return Err(Error::Zero { op: "apartness" });
    }
    Ok(seq.windows(2).all(|w| w[0].ilog2() < w[1].trailing_zeros()))
}

/// Apartness of the successive differences of a strictly increasing
/// sequence.
pub fn is_separated(xs: &[u64]) -> Result<bool> {
    is_apart(&differences(xs)?)
}

/// Successive differences `x[i+1] - x[i]` of a strictly increasing sequence.
pub fn differences(xs: &[u64]) -> Result<Vec<u64>> {
    check_increasing(xs)?;
    Ok(xs.windows(2).map(|w| w[1] - w[0]).collect())
}

pub(crate) fn check_increasing(xs: &[u64]) -> Result<()> {
    match xs.windows(2).position(|w| w[0] >= w[1]) {
        Some(i) => Err(Error::NotIncreasing { index: i + 1 }),
        None => Ok(()),
    }
}
