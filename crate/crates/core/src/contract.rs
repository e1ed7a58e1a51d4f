//! The deposit accumulator state machine.
//!
//! State is O(height): a deposit counter, the `branch` vector of left-sibling
//! values along the path to the next free leaf, and the table of zero hashes
//! for the right siblings. `branch` and the zero hashes are indexed by level,
//! `0` being the leaf level, which is the reverse of the top-down sibling
//! vectors used by [`crate::functional`].

use thiserror::Error;

use crate::functional::{build_zero_hashes, SiblingVectors, ZeroHashTable};
use crate::hash::Combiner;

pub const MAX_HEIGHT: u32 = 32;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ContractError {
    #[error("height {0} outside [1, {MAX_HEIGHT}]")]
    InvalidHeight(u32),
    #[error("tree is full: {count} deposits, capacity {capacity}")]
    Full { count: u64, capacity: u64 },
    #[error("branch has {got} entries, expected {expected}")]
    BranchLength { got: usize, expected: usize },
    #[error("count {count} out of range for height {height}")]
    CountOutOfRange { count: u64, height: u32 },
    #[error("audit log has {got} values but count is {count}")]
    AuditLength { got: usize, count: u64 },
    #[error("branch write index {index} out of bounds for height {height}")]
    WriteIndexOutOfBounds { index: usize, height: u32 },
    #[error("guarded deposit loop fell through to its unreachable marker")]
    UnreachableReached,
}

/// Which shape of the deposit loop to run.
#[derive(
    Debug, Clone, Copy, PartialEq, Eq, Hash, Default, serde::Serialize, serde::Deserialize,
)]
#[serde(rename_all = "snake_case")]
pub enum DepositVariant {
    /// `while size is odd { climb }` then write.
    #[default]
    Optimized,
    /// Loop over every level with an early exit once `size` is even, followed
    /// by an unreachable marker.
    OriginalGuarded,
}

/// What a single deposit did.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DepositOutcome {
    /// Level of `branch` that received the new value.
    pub write_index: usize,
    pub combines: u32,
    /// `true` when the guarded loop left through its early exit.
    pub early_exit: bool,
}

#[derive(Debug, Clone)]
pub struct DepositContract<C: Combiner> {
    height: u32,
    count: u64,
    branch: Vec<C::Value>,
    zero_hashes: ZeroHashTable<C::Value>,
    combiner: C,
    audit: Option<Vec<C::Value>>,
    unreachable_hit: bool,
    max_write_index: Option<usize>,
}

fn check_height(height: u32) -> Result<(), ContractError> {
    if !(1..=MAX_HEIGHT).contains(&height) {
        return Err(ContractError::InvalidHeight(height));
    }
    Ok(())
}

impl<C: Combiner> DepositContract<C> {
    /// Fresh contract with every branch entry set to the default leaf.
    pub fn new(height: u32, combiner: C, audit: bool) -> Result<Self, ContractError> {
        check_height(height)?;
        let branch = vec![combiner.default_leaf(); height as usize];
        Self::with_branch(height, combiner, audit, branch)
    }

    /// Fresh contract with caller-chosen initial branch contents. Any contents
    /// give the same roots.
    pub fn with_branch(
        height: u32,
        combiner: C,
        audit: bool,
        branch: Vec<C::Value>,
    ) -> Result<Self, ContractError> {
        let audit = audit.then(Vec::new);
        Self::from_parts(height, 0, branch, audit, combiner)
    }

    /// Rebuilds a contract from persisted fields. Zero hashes are recomputed.
    pub fn from_parts(
        height: u32,
        count: u64,
        branch: Vec<C::Value>,
        audit: Option<Vec<C::Value>>,
        combiner: C,
    ) -> Result<Self, ContractError> {
        check_height(height)?;
        if branch.len() != height as usize {
            return Err(ContractError::BranchLength {
                got: branch.len(),
                expected: height as usize,
            });
        }
        if count >= 1u64 << height {
            return Err(ContractError::CountOutOfRange { count, height });
        }
        if let Some(values) = &audit {
            if values.len() as u64 != count {
                return Err(ContractError::AuditLength {
                    got: values.len(),
                    count,
                });
            }
        }
        let zero_hashes =
            build_zero_hashes(height, &combiner).expect("height validated to be at least 1");
        Ok(DepositContract {
            height,
            count,
            branch,
            zero_hashes,
            combiner,
            audit,
            unreachable_hit: false,
            max_write_index: None,
        })
    }

    pub fn height(&self) -> u32 {
        self.height
    }

    pub fn count(&self) -> u64 {
        self.count
    }

    /// Maximum number of deposits: `2^height - 1`.
    pub fn capacity(&self) -> u64 {
        (1u64 << self.height) - 1
    }

    pub fn remaining(&self) -> u64 {
        self.capacity() - self.count
    }

    pub fn branch(&self) -> &[C::Value] {
        &self.branch
    }

    pub fn zero_hashes(&self) -> &ZeroHashTable<C::Value> {
        &self.zero_hashes
    }

    pub fn combiner(&self) -> &C {
        &self.combiner
    }

    pub fn audit_values(&self) -> Option<&[C::Value]> {
        self.audit.as_deref()
    }

    pub fn unreachable_hit(&self) -> bool {
        self.unreachable_hit
    }

    /// Highest branch level written by any deposit so far.
    pub fn max_write_index(&self) -> Option<usize> {
        self.max_write_index
    }

    /// Sibling vectors (top-down) of the path to leaf `count`, as consumed by
    /// the functional algorithms.
    pub fn sibling_vectors(&self) -> SiblingVectors<C::Value> {
        SiblingVectors {
            left: self.branch.iter().rev().cloned().collect(),
            right: self.zero_hashes.levels().iter().rev().cloned().collect(),
        }
    }

    pub fn deposit(
        &mut self,
        value: C::Value,
        variant: DepositVariant,
    ) -> Result<DepositOutcome, ContractError> {
        if self.count >= self.capacity() {
            return Err(ContractError::Full {
                count: self.count,
                capacity: self.capacity(),
            });
        }
        let outcome = match variant {
            DepositVariant::Optimized => self.climb_optimized(value.clone())?,
            DepositVariant::OriginalGuarded => self.climb_guarded(value.clone())?,
        };
        self.count += 1;
        if let Some(values) = &mut self.audit {
            values.push(value);
        }
        self.max_write_index = self.max_write_index.max(Some(outcome.write_index));
        Ok(outcome)
    }

    fn climb_optimized(&mut self, value: C::Value) -> Result<DepositOutcome, ContractError> {
        let mut node = value;
        let mut size = self.count;
        let mut level = 0usize;
        let mut combines = 0;
        while size % 2 == 1 {
            let sibling = self
                .branch
                .get(level)
                .ok_or(ContractError::WriteIndexOutOfBounds {
                    index: level,
                    height: self.height,
                })?;
            node = self.combiner.combine(sibling, &node);
            combines += 1;
            size /= 2;
            level += 1;
        }
        let slot = self
            .branch
            .get_mut(level)
            .ok_or(ContractError::WriteIndexOutOfBounds {
                index: level,
                height: self.height,
            })?;
        *slot = node;
        Ok(DepositOutcome {
            write_index: level,
            combines,
            early_exit: false,
        })
    }

    fn climb_guarded(&mut self, value: C::Value) -> Result<DepositOutcome, ContractError> {
        let mut node = value;
        let mut size = self.count;
        let mut level = 0usize;
        let mut combines = 0;
        while level < self.height as usize {
            if size.is_multiple_of(2) {
                self.branch[level] = node;
                return Ok(DepositOutcome {
                    write_index: level,
                    combines,
                    early_exit: true,
                });
            }
            node = self.combiner.combine(&self.branch[level], &node);
            combines += 1;
            size /= 2;
            level += 1;
        }
        self.unreachable_hit = true;
        Err(ContractError::UnreachableReached)
    }

    /// Root of the tree holding every deposit so far, right-padded with the
    /// default leaf. Always starts from the default leaf, never from a seed.
    pub fn get_deposit_root(&self) -> C::Value {
        let mut node = self.combiner.default_leaf();
        let mut size = self.count;
        for level in 0..self.height as usize {
            node = if size % 2 == 1 {
                self.combiner.combine(&self.branch[level], &node)
            } else {
                self.combiner.combine(&node, self.zero_hashes.level(level))
            };
            size /= 2;
        }
        node
    }
}
