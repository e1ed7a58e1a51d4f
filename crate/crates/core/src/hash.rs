//! Binary combiners over node values.
//!
//! A [`Combiner`] is the synthesized attribute of the tree: every internal
//! node carries `combine(left, right)`, and every padding leaf carries
//! [`Combiner::default_leaf`]. Two concrete instances are provided: an
//! integer toy combiner `x - y - 1` that makes hand-checked traces easy to
//! read, and SHA-256 over 32-byte digests.

use std::fmt;
use std::str::FromStr;
use std::sync::atomic::{AtomicU64, Ordering};

use num_bigint::BigInt;
use rand::Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest as _, Sha256};
use thiserror::Error;

/// Magnitude bound for randomly sampled toy values.
pub const TOY_SAMPLE_BOUND: i64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValueParseError {
    #[error("invalid integer value {0:?}")]
    Int(String),
    #[error("invalid digest {0:?}: expected exactly 64 hex characters")]
    Digest(String),
}

/// A value that can decorate a tree node.
///
/// The text encoding is the one used by the CLI and the state file: decimal
/// with optional leading minus for integers, 64 lowercase hex characters for
/// digests.
pub trait NodeValue: Clone + Eq + fmt::Debug + fmt::Display + Send + Sync + 'static {
    fn parse_value(s: &str) -> Result<Self, ValueParseError>;

    /// Draws a random value. Used for test traces and for arbitrary branch
    /// initialization.
    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self;
}

impl NodeValue for BigInt {
    fn parse_value(s: &str) -> Result<Self, ValueParseError> {
        let t = s.trim();
        let digits = t.strip_prefix('-').unwrap_or(t);
        if digits.is_empty() || !digits.bytes().all(|b| b.is_ascii_digit()) {
            return Err(ValueParseError::Int(s.to_string()));
        }
        BigInt::from_str(t).map_err(|_| ValueParseError::Int(s.to_string()))
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        BigInt::from(rng.random_range(-TOY_SAMPLE_BOUND..=TOY_SAMPLE_BOUND))
    }
}

/// A 32-byte digest.
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Digest(pub [u8; 32]);

impl Digest {
    pub const ZERO: Digest = Digest([0u8; 32]);

    pub fn as_bytes(&self) -> &[u8; 32] {
        &self.0
    }
}

impl fmt::Display for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&hex::encode(self.0))
    }
}

impl fmt::Debug for Digest {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Digest({self})")
    }
}

impl FromStr for Digest {
    type Err = ValueParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let t = s.trim();
        if t.len() != 64 {
            return Err(ValueParseError::Digest(s.to_string()));
        }
        let mut out = [0u8; 32];
        hex::decode_to_slice(t, &mut out).map_err(|_| ValueParseError::Digest(s.to_string()))?;
        Ok(Digest(out))
    }
}

impl NodeValue for Digest {
    fn parse_value(s: &str) -> Result<Self, ValueParseError> {
        s.parse()
    }

    fn sample<R: Rng + ?Sized>(rng: &mut R) -> Self {
        let mut out = [0u8; 32];
        rng.fill(&mut out[..]);
        Digest(out)
    }
}

/// The binary attribute combiner of a Merkle tree.
///
/// Implementations must be deterministic and total.
pub trait Combiner: Send + Sync {
    type Value: NodeValue;

    fn combine(&self, left: &Self::Value, right: &Self::Value) -> Self::Value;

    /// The padding value for unused leaves.
    fn default_leaf(&self) -> Self::Value;
}

impl<C: Combiner + ?Sized> Combiner for &C {
    type Value = C::Value;

    fn combine(&self, left: &Self::Value, right: &Self::Value) -> Self::Value {
        (**self).combine(left, right)
    }

    fn default_leaf(&self) -> Self::Value {
        (**self).default_leaf()
    }
}

/// `combine(x, y) = x - y - 1` over arbitrary-precision integers, padding 0.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct ToyCombiner;

impl Combiner for ToyCombiner {
    type Value = BigInt;

    fn combine(&self, left: &BigInt, right: &BigInt) -> BigInt {
        left - right - 1
    }

    fn default_leaf(&self) -> BigInt {
        BigInt::from(0)
    }
}

/// SHA-256 over `left || right`, padding with the all-zero digest.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct Sha256Combiner;

impl Combiner for Sha256Combiner {
    type Value = Digest;

    fn combine(&self, left: &Digest, right: &Digest) -> Digest {
        let mut hasher = Sha256::new();
        hasher.update(left.0);
        hasher.update(right.0);
        Digest(hasher.finalize().into())
    }

    fn default_leaf(&self) -> Digest {
        Digest::ZERO
    }
}

pub fn toy_combiner() -> ToyCombiner {
    ToyCombiner
}

pub fn digest_combiner() -> Sha256Combiner {
    Sha256Combiner
}

/// Identifies which concrete combiner an accumulator uses.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum CombinerId {
    Toy,
    Sha256,
}

impl CombinerId {
    pub fn as_str(self) -> &'static str {
        match self {
            CombinerId::Toy => "toy",
            CombinerId::Sha256 => "sha256",
        }
    }
}

impl fmt::Display for CombinerId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CombinerId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "toy" => Ok(CombinerId::Toy),
            "sha256" | "digest" => Ok(CombinerId::Sha256),
            other => Err(format!(
                "unknown combiner {other:?} (expected toy or sha256)"
            )),
        }
    }
}

/// Wraps a combiner and counts every call to `combine`.
///
/// The counter is atomic so a counting combiner can be shared by parallel
/// oracle builds.
#[derive(Debug, Default)]
pub struct Counting<C> {
    inner: C,
    calls: AtomicU64,
}

impl<C> Counting<C> {
    pub fn new(inner: C) -> Self {
        Counting {
            inner,
            calls: AtomicU64::new(0),
        }
    }

    pub fn calls(&self) -> u64 {
        self.calls.load(Ordering::Relaxed)
    }

    pub fn reset(&self) -> u64 {
        self.calls.swap(0, Ordering::Relaxed)
    }

    pub fn inner(&self) -> &C {
        &self.inner
    }
}

impl<C: Combiner> Combiner for Counting<C> {
    type Value = C::Value;

    fn combine(&self, left: &Self::Value, right: &Self::Value) -> Self::Value {
        self.calls.fetch_add(1, Ordering::Relaxed);
        self.inner.combine(left, right)
    }

    fn default_leaf(&self) -> Self::Value {
        self.inner.default_leaf()
    }
}
