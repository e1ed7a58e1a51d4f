//! Append-only incremental Merkle tree accumulator.
//!
//! The crate keeps the O(height) state of a deposit-style accumulator
//! ([`contract::DepositContract`]), the pure algorithms it refines
//! ([`functional`]), an exponential full-tree reference ([`oracle`]), and a
//! differential harness that checks them against each other ([`harness`]).

pub mod bitpath;
pub mod contract;
pub mod functional;
pub mod harness;
pub mod hash;
pub mod oracle;
pub mod par;
pub mod persist;

pub use bitpath::{bits_to_nat, nat_to_bits, next_path, BitPath, PathError};
pub use contract::{ContractError, DepositContract, DepositOutcome, DepositVariant, MAX_HEIGHT};
pub use functional::{
    build_zero_hashes, compute_root_up, compute_root_up_indexed, insert_value,
    insert_value_indexed, CoreError, SiblingVectors, ZeroHashTable,
};
pub use harness::{
    run_all, run_property, shrink, shrink_verdict, Failure, Fault, HarnessConfig, HarnessError,
    TraceSpec, Verdict,
};
pub use hash::{
    digest_combiner, toy_combiner, Combiner, CombinerId, Counting, Digest, NodeValue,
    Sha256Combiner, ToyCombiner, ValueParseError,
};
pub use oracle::{build_merkle, MerkleTree, OracleError, MAX_ORACLE_HEIGHT};
pub use par::Execution;
pub use persist::{AnyContract, PersistError, StateLock};
