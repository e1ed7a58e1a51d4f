//! Explicit full-tree construction.
//!
//! This is the reference every incremental algorithm is checked against. It
//! materializes all `2^(h+1) - 1` nodes, so it is exponential in the height
//! and refuses heights above [`MAX_ORACLE_HEIGHT`].

use thiserror::Error;

use crate::bitpath::BitPath;
use crate::functional::SiblingVectors;
use crate::hash::Combiner;
use crate::par::{self, Execution};

pub const MAX_ORACLE_HEIGHT: u32 = 16;

/// Subtrees at or above this height are built with `par::join`.
const PAR_SPLIT_HEIGHT: u32 = 10;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("{len} values do not fit in a tree of height {height}")]
    TooManyValues { len: usize, height: u32 },
    #[error("oracle height {0} exceeds the limit of {MAX_ORACLE_HEIGHT}")]
    HeightTooLarge(u32),
    #[error("path of length {len} is longer than the tree height {height}")]
    PathTooLong { len: usize, height: u32 },
    #[error("expected a path of length {expected}, got {len}")]
    PathLength { len: usize, expected: u32 },
    #[error("the root has no sibling")]
    RootHasNoSibling,
}

/// A complete binary tree decorated with a synthesized attribute.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum MerkleTree<V> {
    Leaf {
        value: V,
        index: u64,
    },
    Node {
        value: V,
        left: Box<MerkleTree<V>>,
        right: Box<MerkleTree<V>>,
    },
}

/// Builds the complete tree of `height` over `values` right-padded with the
/// combiner's default leaf.
pub fn build_merkle<C: Combiner>(
    values: &[C::Value],
    height: u32,
    combiner: &C,
) -> Result<MerkleTree<C::Value>, OracleError> {
    build_merkle_with(Execution::default(), values, height, combiner)
}

pub fn build_merkle_with<C: Combiner>(
    exec: Execution,
    values: &[C::Value],
    height: u32,
    combiner: &C,
) -> Result<MerkleTree<C::Value>, OracleError> {
    if height > MAX_ORACLE_HEIGHT {
        return Err(OracleError::HeightTooLarge(height));
    }
    if values.len() as u64 > 1u64 << height {
        return Err(OracleError::TooManyValues {
            len: values.len(),
            height,
        });
    }
    let default = combiner.default_leaf();
    Ok(build_subtree(exec, values, &default, 0, height, combiner))
}

fn build_subtree<C: Combiner>(
    exec: Execution,
    values: &[C::Value],
    default: &C::Value,
    first_leaf: u64,
    height: u32,
    combiner: &C,
) -> MerkleTree<C::Value> {
    if height == 0 {
        let value = values.get(first_leaf as usize).unwrap_or(default).clone();
        return MerkleTree::Leaf {
            value,
            index: first_leaf,
        };
    }
    let half = 1u64 << (height - 1);
    let build_left = || build_subtree(exec, values, default, first_leaf, height - 1, combiner);
    let build_right = || {
        build_subtree(
            exec,
            values,
            default,
            first_leaf + half,
            height - 1,
            combiner,
        )
    };
    let (left, right) = if height >= PAR_SPLIT_HEIGHT {
        par::join(exec, build_left, build_right)
    } else {
        (build_left(), build_right())
    };
    MerkleTree::Node {
        value: combiner.combine(left.value(), right.value()),
        left: Box::new(left),
        right: Box::new(right),
    }
}

impl<V: Clone> MerkleTree<V> {
    pub fn value(&self) -> &V {
        match self {
            MerkleTree::Leaf { value, .. } | MerkleTree::Node { value, .. } => value,
        }
    }

    pub fn root_value(&self) -> &V {
        self.value()
    }

    /// Height along the leftmost spine.
    pub fn height(&self) -> u32 {
        match self {
            MerkleTree::Leaf { .. } => 0,
            MerkleTree::Node { left, .. } => 1 + left.height(),
        }
    }

    /// Both children of every node have equal height.
    pub fn is_complete(&self) -> bool {
        fn check<V>(t: &MerkleTree<V>) -> Option<u32> {
            match t {
                MerkleTree::Leaf { .. } => Some(0),
                MerkleTree::Node { left, right, .. } => {
                    let (l, r) = (check(left)?, check(right)?);
                    (l == r).then_some(l + 1)
                }
            }
        }
        check(self).is_some()
    }

    /// Every internal node equals `combine(left, right)`.
    pub fn is_decorated_with<C: Combiner<Value = V>>(&self, combiner: &C) -> bool
    where
        V: Eq,
    {
        match self {
            MerkleTree::Leaf { .. } => true,
            MerkleTree::Node { value, left, right } => {
                *value == combiner.combine(left.value(), right.value())
                    && left.is_decorated_with(combiner)
                    && right.is_decorated_with(combiner)
            }
        }
    }

    /// Leaves left to right with their indices.
    pub fn leaves(&self) -> Vec<(u64, &V)> {
        let mut out = Vec::new();
        let mut stack = vec![self];
        while let Some(t) = stack.pop() {
            match t {
                MerkleTree::Leaf { value, index } => out.push((*index, value)),
                MerkleTree::Node { left, right, .. } => {
                    stack.push(right);
                    stack.push(left);
                }
            }
        }
        out
    }

    pub fn node_count(&self) -> u64 {
        match self {
            MerkleTree::Leaf { .. } => 1,
            MerkleTree::Node { left, right, .. } => 1 + left.node_count() + right.node_count(),
        }
    }

    fn subtree_at(&self, path: &BitPath) -> Result<&MerkleTree<V>, OracleError> {
        let mut node = self;
        for &bit in path.bits() {
            node = match node {
                MerkleTree::Node { left, right, .. } => {
                    if bit {
                        right
                    } else {
                        left
                    }
                }
                MerkleTree::Leaf { .. } => {
                    return Err(OracleError::PathTooLong {
                        len: path.len(),
                        height: self.height(),
                    })
                }
            };
        }
        Ok(node)
    }

    /// Decoration of the node reached by following `path` from the root.
    pub fn node_at(&self, path: &BitPath) -> Result<&V, OracleError> {
        self.subtree_at(path).map(|t| t.value())
    }

    /// Decoration of the sibling of the node at the end of `path`.
    pub fn sibling_at(&self, path: &BitPath) -> Result<&V, OracleError> {
        let sibling = path.flip_last().ok_or(OracleError::RootHasNoSibling)?;
        self.node_at(&sibling)
    }

    /// Top-down left and right sibling values along a root-to-leaf path.
    ///
    /// At depth `i` the sibling of `path[..=i]` goes to `right[i]` when the
    /// path turns left and to `left[i]` when it turns right. The other slot
    /// holds `filler` and carries no meaning.
    pub fn siblings_of_path(
        &self,
        path: &BitPath,
        filler: &V,
    ) -> Result<SiblingVectors<V>, OracleError> {
        let height = self.height();
        if path.len() != height as usize {
            return Err(OracleError::PathLength {
                len: path.len(),
                expected: height,
            });
        }
        let mut left = Vec::with_capacity(path.len());
        let mut right = Vec::with_capacity(path.len());
        for i in 0..path.len() {
            let sibling = self.sibling_at(&path.prefix(i + 1))?.clone();
            if path.bit(i) {
                left.push(sibling);
                right.push(filler.clone());
            } else {
                left.push(filler.clone());
                right.push(sibling);
            }
        }
        Ok(SiblingVectors { left, right })
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bitpath::nat_to_bits;
    use crate::hash::{toy_combiner, Counting, NodeValue};
    use num_bigint::BigInt;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn ints(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    fn path(bits: &[u8]) -> BitPath {
        BitPath::from_bits(bits).unwrap()
    }

    fn height3_tree() -> MerkleTree<BigInt> {
        build_merkle(&ints(&[3, 6, 2, -2, 4]), 3, &toy_combiner()).unwrap()
    }

    #[test]
    fn build_examples() {
        assert_eq!(*height3_tree().root_value(), BigInt::from(-12));
        let empty = build_merkle(&[], 2, &toy_combiner()).unwrap();
        assert_eq!(*empty.root_value(), BigInt::from(-1));
        let single = build_merkle(&ints(&[17]), 0, &toy_combiner()).unwrap();
        assert_eq!(*single.root_value(), BigInt::from(17));
        assert_eq!(
            build_merkle(&ints(&[1, 2, 3]), 1, &toy_combiner()),
            Err(OracleError::TooManyValues { len: 3, height: 1 })
        );
        assert_eq!(
            build_merkle(&[], MAX_ORACLE_HEIGHT + 1, &toy_combiner()),
            Err(OracleError::HeightTooLarge(MAX_ORACLE_HEIGHT + 1))
        );
    }

    #[test]
    fn node_and_sibling_queries() {
        let t = height3_tree();
        assert_eq!(*t.node_at(&path(&[0])).unwrap(), BigInt::from(-8));
        assert_eq!(*t.node_at(&BitPath::new()).unwrap(), BigInt::from(-12));
        assert_eq!(*t.node_at(&path(&[1, 0, 0])).unwrap(), BigInt::from(4));
        assert!(matches!(
            t.node_at(&path(&[1, 0, 0, 0])),
            Err(OracleError::PathTooLong { .. })
        ));

        assert_eq!(*t.sibling_at(&path(&[1])).unwrap(), BigInt::from(-8));
        assert_eq!(*t.sibling_at(&path(&[1, 0])).unwrap(), BigInt::from(-1));
        assert_eq!(*t.sibling_at(&path(&[1, 0, 0])).unwrap(), BigInt::from(0));
        assert_eq!(
            t.sibling_at(&BitPath::new()),
            Err(OracleError::RootHasNoSibling)
        );
    }

    #[test]
    fn siblings_of_height3_paths() {
        let t = height3_tree();
        let d = BigInt::from(555);
        let s = t.siblings_of_path(&path(&[1, 0, 0]), &d).unwrap();
        assert_eq!(s.left, vec![BigInt::from(-8), d.clone(), d.clone()]);
        assert_eq!(s.right, vec![d.clone(), BigInt::from(-1), BigInt::from(0)]);
        let s = t.siblings_of_path(&path(&[1, 0, 1]), &d).unwrap();
        assert_eq!(s.left, vec![BigInt::from(-8), d.clone(), BigInt::from(4)]);
        assert_eq!(s.right, vec![d.clone(), BigInt::from(-1), d.clone()]);
        assert!(t.siblings_of_path(&path(&[1, 0]), &d).is_err());

        let h1 = build_merkle(&ints(&[10, 20]), 1, &toy_combiner()).unwrap();
        let s = h1.siblings_of_path(&path(&[0]), &d).unwrap();
        assert_eq!(s.left, vec![d]);
        assert_eq!(s.right, vec![BigInt::from(20)]);
    }

    #[test]
    fn random_trees_are_well_formed() {
        let c = toy_combiner();
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for h in 0..=5u32 {
            for _ in 0..20 {
                let n = rng.random_range(0..=(1usize << h));
                let values: Vec<BigInt> = (0..n).map(|_| BigInt::sample(&mut rng)).collect();
                let t = build_merkle(&values, h, &c).unwrap();
                assert!(t.is_complete());
                assert!(t.is_decorated_with(&c));
                assert_eq!(t.height(), h);
                let leaves = t.leaves();
                assert_eq!(leaves.len(), 1 << h);
                for (i, (idx, v)) in leaves.iter().enumerate() {
                    assert_eq!(*idx, i as u64);
                    let expected = values.get(i).cloned().unwrap_or_default();
                    assert_eq!(**v, expected);
                    let p = nat_to_bits(i as u64, h).unwrap();
                    assert_eq!(*t.node_at(&p).unwrap(), expected);
                }
                for k in 0..(1u64 << h) {
                    let p = nat_to_bits(k, h).unwrap();
                    for depth in 1..=h as usize {
                        let q = p.prefix(depth);
                        assert_eq!(
                            t.sibling_at(&q).unwrap(),
                            t.node_at(&q.flip_last().unwrap()).unwrap()
                        );
                    }
                }
            }
        }
    }

    #[test]
    fn parallel_and_sequential_builds_agree() {
        let c = Counting::new(toy_combiner());
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let values: Vec<BigInt> = (0..3000).map(|_| BigInt::sample(&mut rng)).collect();
        let a = build_merkle_with(Execution::Sequential, &values, 12, &c).unwrap();
        assert_eq!(c.reset(), (1 << 12) - 1);
        let b = build_merkle_with(Execution::Parallel, &values, 12, &c).unwrap();
        assert_eq!(c.reset(), (1 << 12) - 1);
        assert_eq!(a, b);
        assert_eq!(a.node_count(), (1 << 13) - 1);
    }
}
