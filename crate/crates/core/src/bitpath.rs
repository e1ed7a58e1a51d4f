//! Root-to-node paths in a complete binary tree.
//!
//! Bits are stored top-down: the first bit picks the root's child, the last
//! bit is adjacent to the node at the end of the path. `0` goes left, `1`
//! goes right.

use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum PathError {
    #[error("bit {0} is not 0 or 1")]
    InvalidBit(u8),
    #[error("path of all ones has no successor")]
    NoSuccessor,
    #[error("index {index} does not fit in {height} bits")]
    IndexOutOfRange { index: u64, height: u32 },
    #[error("path of {0} bits does not fit in a 64-bit index")]
    TooWide(usize),
}

#[derive(Clone, PartialEq, Eq, Hash, Default)]
pub struct BitPath(Vec<bool>);

impl BitPath {
    pub fn new() -> Self {
        BitPath(Vec::new())
    }

    /// Builds a path from `0`/`1` bytes, top-down.
    pub fn from_bits(bits: &[u8]) -> Result<Self, PathError> {
        bits.iter()
            .map(|&b| match b {
                0 => Ok(false),
                1 => Ok(true),
                other => Err(PathError::InvalidBit(other)),
            })
            .collect::<Result<Vec<_>, _>>()
            .map(BitPath)
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    /// Bit at depth `i` (0 is the root's child).
    pub fn bit(&self, i: usize) -> bool {
        self.0[i]
    }

    pub fn bits(&self) -> &[bool] {
        &self.0
    }

    pub fn to_bits(&self) -> Vec<u8> {
        self.0.iter().map(|&b| b as u8).collect()
    }

    pub fn last(&self) -> Option<bool> {
        self.0.last().copied()
    }

    /// The first `n` bits.
    pub fn prefix(&self, n: usize) -> BitPath {
        BitPath(self.0[..n].to_vec())
    }

    pub fn push(&mut self, bit: bool) {
        self.0.push(bit);
    }

    /// The path to the sibling of the node at the end of this path.
    pub fn flip_last(&self) -> Option<BitPath> {
        let mut out = self.clone();
        let last = out.0.last_mut()?;
        *last = !*last;
        Some(out)
    }

    pub fn is_all_ones(&self) -> bool {
        self.0.iter().all(|&b| b)
    }
}

impl From<Vec<bool>> for BitPath {
    fn from(bits: Vec<bool>) -> Self {
        BitPath(bits)
    }
}

impl fmt::Display for BitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.0.is_empty() {
            return f.write_str("ε");
        }
        for (i, &b) in self.0.iter().enumerate() {
            if i > 0 {
                f.write_str(".")?;
            }
            f.write_str(if b { "1" } else { "0" })?;
        }
        Ok(())
    }
}

impl fmt::Debug for BitPath {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "BitPath({self})")
    }
}

/// The successor path at fixed width: `w.0.1^k` becomes `w.1.0^k`.
pub fn next_path(p: &BitPath) -> Result<BitPath, PathError> {
    let lowest_zero =
        p.0.iter()
            .rposition(|&b| !b)
            .ok_or(PathError::NoSuccessor)?;
    let mut bits = p.0.clone();
    bits[lowest_zero] = true;
    for b in &mut bits[lowest_zero + 1..] {
        *b = false;
    }
    Ok(BitPath(bits))
}

/// `2^h`, or `None` when it does not fit in a `u64`.
pub(crate) fn pow2(h: u32) -> Option<u64> {
    1u64.checked_shl(h)
}

/// Big-endian `h`-bit encoding of `k`.
pub fn nat_to_bits(k: u64, h: u32) -> Result<BitPath, PathError> {
    if pow2(h).is_some_and(|cap| k >= cap) {
        return Err(PathError::IndexOutOfRange {
            index: k,
            height: h,
        });
    }
    Ok(BitPath(
        (0..h).rev().map(|i| i < 64 && (k >> i) & 1 == 1).collect(),
    ))
}

/// Big-endian value of a path. Leading zeros beyond 64 bits are accepted.
pub fn bits_to_nat(p: &BitPath) -> Result<u64, PathError> {
    p.0.iter().try_fold(0u64, |acc, &b| {
        acc.checked_mul(2)
            .map(|v| v + b as u64)
            .ok_or(PathError::TooWide(p.len()))
    })
}
