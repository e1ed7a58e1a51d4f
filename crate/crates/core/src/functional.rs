//! Pure root and left-sibling algorithms.
//!
//! Given the values of the siblings along a root-to-leaf path and the value
//! at its end, the root is obtained by climbing the path and combining with
//! one sibling per level. When a value is inserted at the end of the path to
//! leaf `k`, only one entry of the left-sibling vector changes for the path to
//! leaf `k + 1`: the level of the lowest left turn, which receives the value
//! synthesized while climbing the trailing right turns.
//!
//! Each algorithm comes in two forms: driven by a [`BitPath`], and driven by a
//! leaf index `k` with a height `h`. Sibling vectors are always top-down.

use thiserror::Error;

use crate::bitpath::BitPath;
use crate::hash::Combiner;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CoreError {
    #[error("length mismatch: path {path}, left {left}, right {right}")]
    LengthMismatch {
        path: usize,
        left: usize,
        right: usize,
    },
    #[error("path must not be empty")]
    EmptyPath,
    #[error("index {index} out of range for height {height}")]
    IndexOutOfRange { index: u64, height: u32 },
    #[error("zero-hash table needs height >= 1")]
    ZeroHeight,
}

/// Left and right sibling values along a path, top-down.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SiblingVectors<V> {
    pub left: Vec<V>,
    pub right: Vec<V>,
}

impl<V> SiblingVectors<V> {
    pub fn new(left: Vec<V>, right: Vec<V>) -> Result<Self, CoreError> {
        if left.len() != right.len() {
            return Err(CoreError::LengthMismatch {
                path: left.len(),
                left: left.len(),
                right: right.len(),
            });
        }
        Ok(SiblingVectors { left, right })
    }

    pub fn len(&self) -> usize {
        self.left.len()
    }

    pub fn is_empty(&self) -> bool {
        self.left.is_empty()
    }

    fn check(&self, path_len: usize) -> Result<(), CoreError> {
        if self.left.len() != path_len || self.right.len() != path_len {
            return Err(CoreError::LengthMismatch {
                path: path_len,
                left: self.left.len(),
                right: self.right.len(),
            });
        }
        Ok(())
    }
}

/// Roots of all-default subtrees, indexed by level (0 = leaf).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ZeroHashTable<V> {
    levels: Vec<V>,
}

impl<V: Clone> ZeroHashTable<V> {
    pub fn levels(&self) -> &[V] {
        &self.levels
    }

    pub fn level(&self, l: usize) -> &V {
        &self.levels[l]
    }

    pub fn len(&self) -> usize {
        self.levels.len()
    }

    pub fn is_empty(&self) -> bool {
        self.levels.is_empty()
    }

    /// Root of an all-default tree whose height equals the table length.
    pub fn empty_root<C: Combiner<Value = V>>(&self, combiner: &C) -> V {
        match self.levels.last() {
            Some(top) => combiner.combine(top, top),
            None => combiner.default_leaf(),
        }
    }
}

/// `levels[0] = default`, `levels[l] = combine(levels[l-1], levels[l-1])`, for
/// `l` in `0..h`.
pub fn build_zero_hashes<C: Combiner>(
    h: u32,
    combiner: &C,
) -> Result<ZeroHashTable<C::Value>, CoreError> {
    if h == 0 {
        return Err(CoreError::ZeroHeight);
    }
    let mut levels = Vec::with_capacity(h as usize);
    levels.push(combiner.default_leaf());
    for l in 1..h as usize {
        let prev = &levels[l - 1];
        levels.push(combiner.combine(prev, prev));
    }
    Ok(ZeroHashTable { levels })
}

/// Root value of any tree in which `sib` are the siblings of `p` and `seed`
/// is the value at the end of `p`.
///
/// Only `left[i]` where `p[i] = 1` and `right[i]` where `p[i] = 0` are read.
pub fn compute_root_up<C: Combiner>(
    p: &BitPath,
    sib: &SiblingVectors<C::Value>,
    seed: C::Value,
    combiner: &C,
) -> Result<C::Value, CoreError> {
    sib.check(p.len())?;
    let mut acc = seed;
    for i in (0..p.len()).rev() {
        acc = if p.bit(i) {
            combiner.combine(&sib.left[i], &acc)
        } else {
            combiner.combine(&acc, &sib.right[i])
        };
    }
    Ok(acc)
}

/// Left siblings (top-down) of the successor of `p` once `seed` is placed at
/// the end of `p`.
///
/// Entries other than the lowest left turn of `p` are copied from `left`. For
/// the all-ones path, which has no successor, `left` is returned unchanged.
pub fn insert_value<C: Combiner>(
    p: &BitPath,
    sib: &SiblingVectors<C::Value>,
    seed: C::Value,
    combiner: &C,
) -> Result<Vec<C::Value>, CoreError> {
    if p.is_empty() {
        return Err(CoreError::EmptyPath);
    }
    sib.check(p.len())?;
    let mut out = sib.left.clone();
    let mut acc = seed;
    for i in (0..p.len()).rev() {
        if !p.bit(i) {
            out[i] = acc;
            return Ok(out);
        }
        if i == 0 {
            // all ones: unreachable under the "not the last leaf" contract
            break;
        }
        acc = combiner.combine(&sib.left[i], &acc);
    }
    Ok(out)
}

/// Requires `k + reserved < 2^h`.
fn check_index(h: u32, k: u64, reserved: u64) -> Result<(), CoreError> {
    let cap = 1u128.checked_shl(h).unwrap_or(u128::MAX);
    if k as u128 + reserved as u128 >= cap {
        return Err(CoreError::IndexOutOfRange {
            index: k,
            height: h,
        });
    }
    Ok(())
}

/// [`compute_root_up`] driven by the leaf index `k` of a tree of height `h`.
pub fn compute_root_up_indexed<C: Combiner>(
    h: u32,
    k: u64,
    sib: &SiblingVectors<C::Value>,
    seed: C::Value,
    combiner: &C,
) -> Result<C::Value, CoreError> {
    sib.check(h as usize)?;
    check_index(h, k, 0)?;
    let mut acc = seed;
    let mut size = k;
    for idx in (0..h as usize).rev() {
        acc = if size.is_multiple_of(2) {
            combiner.combine(&acc, &sib.right[idx])
        } else {
            combiner.combine(&sib.left[idx], &acc)
        };
        size /= 2;
    }
    Ok(acc)
}

/// [`insert_value`] driven by the leaf index `k`; requires `k < 2^h - 1`.
pub fn insert_value_indexed<C: Combiner>(
    h: u32,
    k: u64,
    sib: &SiblingVectors<C::Value>,
    seed: C::Value,
    combiner: &C,
) -> Result<Vec<C::Value>, CoreError> {
    sib.check(h as usize)?;
    check_index(h, k, 1)?;
    let mut out = sib.left.clone();
    let mut acc = seed;
    let mut size = k;
    for idx in (0..h as usize).rev() {
        if size.is_multiple_of(2) {
            out[idx] = acc;
            return Ok(out);
        }
        acc = combiner.combine(&sib.left[idx], &acc);
        size /= 2;
    }
    // k < 2^h - 1 always has a zero bit
    Err(CoreError::IndexOutOfRange {
        index: k,
        height: h,
    })
}
