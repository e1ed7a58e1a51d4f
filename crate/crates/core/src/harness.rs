//! Differential and property-based checks.
//!
//! Each registered property wires the oracle, the functional algorithms and
//! the contract state machine against each other and returns a [`Verdict`].
//! Runs are deterministic in [`HarnessConfig::rng_seed`]: every case draws
//! from its own ChaCha stream keyed by the property name and case index, so
//! parallel and sequential execution produce identical verdicts.
//!
//! Exhaustive sweeps cover every tree height up to five; larger heights are
//! sampled.

use num_bigint::BigInt;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::bitpath::{nat_to_bits, next_path, BitPath};
use crate::contract::{DepositContract, DepositVariant, MAX_HEIGHT};
use crate::functional::{
    build_zero_hashes, compute_root_up, compute_root_up_indexed, insert_value,
    insert_value_indexed, SiblingVectors,
};
use crate::hash::{Combiner, CombinerId, Counting, Digest, NodeValue, Sha256Combiner, ToyCombiner};
use crate::oracle::{build_merkle_with, MAX_ORACLE_HEIGHT};
use crate::par::{self, Execution};
use crate::persist::{self, AnyContract};

/// Heights up to this bound are swept exhaustively over list lengths.
pub const EXHAUSTIVE_HEIGHT: u32 = 5;
/// Index/bit-path equivalence is exhaustive up to this height.
pub const INDEX_EQUIVALENCE_HEIGHT: u32 = 6;
/// Irrelevance is sampled at every height from 1 to this bound.
pub const IRRELEVANCE_HEIGHT: u32 = 8;
/// Zero-hash tables are compared with the oracle for levels `0..=ZERO_TABLE_LEVEL`.
pub const ZERO_TABLE_LEVEL: u32 = 8;
/// Heights at which branch initialization is varied.
pub const BRANCH_INIT_HEIGHTS: [u32; 3] = [3, 8, 32];
/// Height of the combiner call-count comparison.
pub const COST_HEIGHT: u32 = 16;

// SHA-256 zero-subtree roots, computed with an independent implementation.
pub const SHA256_ZERO_LEVEL_1: &str =
    "f5a5fd42d16a20302798ef6ed309979b43003d2320d9f0e8ea9831a92759fb4b";
pub const SHA256_ZERO_LEVEL_2: &str =
    "db56114e00fdd4c1f85c892bf35ac9a89289aaecb1ebd0a96cde606a748b5d71";
pub const SHA256_ZERO_LEVEL_8: &str =
    "26846476fd5fc54a5d43385167c95144f2643f533cc85bb9d16b782f8d7db193";
pub const SHA256_ZERO_LEVEL_32: &str =
    "c6f67e02e6e4e1bdefb994c6098953f34636ba2b6ca20a4721d2b26a886722ff";

const HEIGHT3_VALUES: [i64; 5] = [3, 6, 2, -2, 4];
const HEIGHT3_PREFIX_ROOTS: [i64; 6] = [-1, 2, -4, -6, -8, -12];

pub const PROPERTIES: &[&str] = &[
    "worked_examples",
    "height3_trace",
    "oracle_root_agreement",
    "sibling_update_agreement",
    "index_equivalence",
    "irrelevance",
    "default_seed_root",
    "zero_table_soundness",
    "digest_self_consistency",
    "branch_init_irrelevance",
    "variant_equivalence",
    "incremental_cost",
    "persistence_roundtrip",
];

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HarnessError {
    #[error("unknown property {0:?}")]
    UnknownProperty(String),
    #[error("verdict for {0} passed; nothing to shrink")]
    NothingToShrink(String),
    #[error("property {0} does not replay traces")]
    NotReplayable(String),
    #[error("failure carries no trace")]
    NoTrace,
    #[error("trace does not reproduce the failure")]
    DidNotReproduce,
    #[error("bad trace: {0}")]
    BadTrace(String),
}

/// Defects injected into the implementation under test. The oracle always
/// uses the reference combiner.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Fault {
    /// `x - y` in place of `x - y - 1`.
    MutatedCombiner,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct HarnessConfig {
    /// Upper bound on oracle-backed sweep heights.
    pub max_height: u32,
    /// Random cases per sampled sub-range.
    pub num_random_cases: usize,
    /// Value draws per enumerated (height, length) pair.
    pub value_draws: usize,
    pub rng_seed: u64,
    pub fault: Option<Fault>,
    pub execution: Execution,
}

impl Default for HarnessConfig {
    fn default() -> Self {
        HarnessConfig {
            max_height: EXHAUSTIVE_HEIGHT,
            num_random_cases: 1000,
            value_draws: 20,
            rng_seed: 0x1d5c_0de5,
            fault: None,
            execution: Execution::default(),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum BranchInit {
    Zeros,
    Random { seed: u64 },
}

/// A replayable deposit trace. Values use the CLI text encoding.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct TraceSpec {
    pub height: u32,
    pub values: Vec<String>,
    pub combiner_id: CombinerId,
    pub branch_init: BranchInit,
    pub variant: DepositVariant,
}

impl TraceSpec {
    pub fn toy(height: u32, values: &[BigInt]) -> Self {
        TraceSpec {
            height,
            values: values.iter().map(|v| v.to_string()).collect(),
            combiner_id: CombinerId::Toy,
            branch_init: BranchInit::Zeros,
            variant: DepositVariant::Optimized,
        }
    }

    fn toy_values(&self) -> Result<Vec<BigInt>, HarnessError> {
        if self.combiner_id != CombinerId::Toy {
            return Err(HarnessError::BadTrace("only toy traces replay".into()));
        }
        self.values
            .iter()
            .map(|v| BigInt::parse_value(v).map_err(|e| HarnessError::BadTrace(e.to_string())))
            .collect()
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Failure {
    pub trace: Option<TraceSpec>,
    pub step: u64,
    pub expected: String,
    pub actual: String,
    pub detail: String,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Verdict {
    pub property: String,
    pub cases_run: u64,
    pub failures: Vec<Failure>,
}

impl Verdict {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// One JSON record; at most `max_failures` failures are listed.
    pub fn to_json_line(&self, max_failures: usize) -> String {
        #[derive(Serialize)]
        struct Line<'a> {
            property: &'a str,
            passed: bool,
            cases_run: u64,
            failure_count: usize,
            failures: &'a [Failure],
        }
        let shown = self.failures.len().min(max_failures);
        serde_json::to_string(&Line {
            property: &self.property,
            passed: self.passed(),
            cases_run: self.cases_run,
            failure_count: self.failures.len(),
            failures: &self.failures[..shown],
        })
        .expect("verdicts serialize")
    }
}

/// The integer combiner used by the implementation under test.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct SutCombiner(Option<Fault>);

impl Combiner for SutCombiner {
    type Value = BigInt;

    fn combine(&self, left: &BigInt, right: &BigInt) -> BigInt {
        match self.0 {
            None => left - right - 1,
            Some(Fault::MutatedCombiner) => left - right,
        }
    }

    fn default_leaf(&self) -> BigInt {
        BigInt::from(0)
    }
}

fn property_tag(name: &str) -> u64 {
    // FNV-1a
    name.bytes().fold(0xcbf2_9ce4_8422_2325u64, |h, b| {
        (h ^ b as u64).wrapping_mul(0x0000_0100_0000_01b3)
    })
}

fn case_rng(config: &HarnessConfig, property: &str, index: u64) -> ChaCha8Rng {
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed ^ property_tag(property));
    rng.set_stream(index);
    rng
}

fn sample_toy(rng: &mut ChaCha8Rng, n: usize) -> Vec<BigInt> {
    (0..n).map(|_| BigInt::sample(rng)).collect()
}

fn capacity(h: u32) -> u64 {
    (1u64 << h) - 1
}

struct Collected {
    cases: u64,
    failures: Vec<Failure>,
}

/// Runs every case through `check`, in parallel when configured.
fn run_cases<T, F>(config: &HarnessConfig, cases: Vec<T>, check: F) -> Collected
where
    T: Send,
    F: Fn(T) -> Vec<Failure> + Send + Sync,
{
    let n = cases.len() as u64;
    let failures = par::map_cases(config.execution, cases, check)
        .into_iter()
        .flatten()
        .collect();
    Collected { cases: n, failures }
}

fn mismatch<E: ToString + ?Sized, A: ToString + ?Sized>(
    trace: Option<&TraceSpec>,
    step: u64,
    expected: &E,
    actual: &A,
    detail: impl Into<String>,
) -> Failure {
    Failure {
        trace: trace.cloned(),
        step,
        expected: expected.to_string(),
        actual: actual.to_string(),
        detail: detail.into(),
    }
}

fn oracle_root(values: &[BigInt], h: u32) -> BigInt {
    build_merkle_with(Execution::Sequential, values, h, &ToyCombiner)
        .expect("oracle inputs are in range")
        .root_value()
        .clone()
}

fn initial_branch(init: BranchInit, h: u32) -> Vec<BigInt> {
    match init {
        BranchInit::Zeros => vec![BigInt::from(0); h as usize],
        BranchInit::Random { seed } => {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            sample_toy(&mut rng, h as usize)
        }
    }
}

fn sut_contract(
    trace: &TraceSpec,
    fault: Option<Fault>,
) -> Result<DepositContract<SutCombiner>, HarnessError> {
    DepositContract::with_branch(
        trace.height,
        SutCombiner(fault),
        false,
        initial_branch(trace.branch_init, trace.height),
    )
    .map_err(|e| HarnessError::BadTrace(e.to_string()))
}

fn check_trace_shape(trace: &TraceSpec) -> Result<(), HarnessError> {
    if trace.height == 0 || trace.height > MAX_HEIGHT {
        return Err(HarnessError::BadTrace(format!("height {}", trace.height)));
    }
    if trace.values.len() as u64 > capacity(trace.height) {
        return Err(HarnessError::BadTrace("more values than capacity".into()));
    }
    Ok(())
}

// ---------------------------------------------------------------------------
// Trace replays. Each returns the failures a single trace produces.

/// Deposit everything, compare the final root with the oracle, and check the
/// path-based root computation for the last inserted leaf.
fn replay_root_agreement(
    trace: &TraceSpec,
    fault: Option<Fault>,
) -> Result<Vec<Failure>, HarnessError> {
    check_trace_shape(trace)?;
    if trace.height > MAX_ORACLE_HEIGHT {
        return Err(HarnessError::BadTrace("height beyond oracle limit".into()));
    }
    let values = trace.toy_values()?;
    let h = trace.height;
    let n = values.len();
    let mut failures = Vec::new();
    let mut contract = sut_contract(trace, fault)?;
    for v in &values {
        contract
            .deposit(v.clone(), trace.variant)
            .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
    }
    let tree = build_merkle_with(Execution::Sequential, &values, h, &ToyCombiner)
        .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
    let expected = tree.root_value();
    let actual = contract.get_deposit_root();
    if &actual != expected {
        failures.push(mismatch(
            Some(trace),
            n as u64,
            expected,
            &actual,
            "get_deposit_root",
        ));
    }
    if n > 0 {
        let k = n as u64 - 1;
        let p = nat_to_bits(k, h).expect("k < 2^h");
        let sib = tree
            .siblings_of_path(&p, &BigInt::from(0))
            .expect("full-length path");
        let got = compute_root_up(&p, &sib, values[n - 1].clone(), &SutCombiner(fault))
            .expect("lengths agree");
        if &got != expected {
            failures.push(mismatch(Some(trace), k, expected, &got, "compute_root_up"));
        }
    }
    Ok(failures)
}

/// Root after every prefix equals the oracle root of that prefix.
fn replay_root_sequence(
    trace: &TraceSpec,
    fault: Option<Fault>,
) -> Result<Vec<Failure>, HarnessError> {
    check_trace_shape(trace)?;
    let values = trace.toy_values()?;
    let mut contract = sut_contract(trace, fault)?;
    let mut failures = Vec::new();
    for n in 0..=values.len() {
        if n > 0 {
            contract
                .deposit(values[n - 1].clone(), trace.variant)
                .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
        }
        let expected = oracle_root(&values[..n], trace.height);
        let actual = contract.get_deposit_root();
        if actual != expected {
            failures.push(mismatch(
                Some(trace),
                n as u64,
                &expected,
                &actual,
                "prefix root",
            ));
        }
    }
    Ok(failures)
}

/// The left siblings produced for the successor path equal the oracle's.
fn replay_sibling_update(
    trace: &TraceSpec,
    fault: Option<Fault>,
    filler: &BigInt,
) -> Result<Vec<Failure>, HarnessError> {
    check_trace_shape(trace)?;
    if trace.height > MAX_ORACLE_HEIGHT {
        return Err(HarnessError::BadTrace("height beyond oracle limit".into()));
    }
    let values = trace.toy_values()?;
    let h = trace.height;
    let Some(k) = values.len().checked_sub(1) else {
        return Ok(Vec::new());
    };
    let k = k as u64;
    let sut = SutCombiner(fault);
    let p = nat_to_bits(k, h).expect("k < 2^h");
    let next = next_path(&p).expect("k < 2^h - 1");
    let before = build_merkle_with(
        Execution::Sequential,
        &values[..k as usize],
        h,
        &ToyCombiner,
    )
    .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
    let after = build_merkle_with(Execution::Sequential, &values, h, &ToyCombiner)
        .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
    let sib = before
        .siblings_of_path(&p, filler)
        .expect("full-length path");
    let seed = values[k as usize].clone();
    let by_path = insert_value(&p, &sib, seed.clone(), &sut).expect("non-empty path");
    let by_index = insert_value_indexed(h, k, &sib, seed.clone(), &sut).expect("k in range");

    let mut contract = sut_contract(trace, fault)?;
    for v in &values {
        contract
            .deposit(v.clone(), trace.variant)
            .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
    }
    let branch_top_down: Vec<BigInt> = contract.branch().iter().rev().cloned().collect();

    let mut failures = Vec::new();
    for i in (0..h as usize).filter(|&i| next.bit(i)) {
        let expected = after.sibling_at(&next.prefix(i + 1)).expect("valid prefix");
        for (label, got) in [
            ("insert_value", &by_path[i]),
            ("insert_value_indexed", &by_index[i]),
            ("contract branch", &branch_top_down[i]),
        ] {
            if got != expected {
                failures.push(mismatch(
                    Some(trace),
                    i as u64,
                    expected,
                    got,
                    format!("{label} at depth {i}"),
                ));
            }
        }
    }
    Ok(failures)
}

/// Random and zeroed initial branches give the same root after every deposit.
fn replay_branch_init(
    trace: &TraceSpec,
    fault: Option<Fault>,
) -> Result<Vec<Failure>, HarnessError> {
    check_trace_shape(trace)?;
    let values = trace.toy_values()?;
    let zeroed = TraceSpec {
        branch_init: BranchInit::Zeros,
        ..trace.clone()
    };
    let mut a = sut_contract(&zeroed, fault)?;
    let mut b = sut_contract(trace, fault)?;
    let mut failures = Vec::new();
    for n in 0..=values.len() {
        if n > 0 {
            for c in [&mut a, &mut b] {
                c.deposit(values[n - 1].clone(), trace.variant)
                    .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
            }
        }
        let (ra, rb) = (a.get_deposit_root(), b.get_deposit_root());
        if ra != rb {
            failures.push(mismatch(
                Some(trace),
                n as u64,
                &ra,
                &rb,
                "root with randomized branch",
            ));
        }
    }
    if trace.height <= IRRELEVANCE_HEIGHT {
        let expected = oracle_root(&values, trace.height);
        let actual = b.get_deposit_root();
        if actual != expected {
            failures.push(mismatch(
                Some(trace),
                values.len() as u64,
                &expected,
                &actual,
                "final root vs oracle",
            ));
        }
    }
    Ok(failures)
}

/// Both deposit variants, run in lockstep from the same state.
fn lockstep_variants<C: Combiner + Clone>(
    mut opt: DepositContract<C>,
    values: &[C::Value],
    trace: Option<&TraceSpec>,
    context: &str,
) -> Vec<Failure> {
    let mut guarded = opt.clone();
    let h = opt.height() as usize;
    let mut failures = Vec::new();
    for (step, v) in values.iter().enumerate() {
        let step = step as u64;
        let a = opt.deposit(v.clone(), DepositVariant::Optimized);
        let b = guarded.deposit(v.clone(), DepositVariant::OriginalGuarded);
        match (a, b) {
            (Ok(a), Ok(b)) => {
                if !b.early_exit {
                    failures.push(mismatch(trace, step, &"early exit", &"loop bound", context));
                }
                if a.write_index != b.write_index || a.write_index >= h {
                    failures.push(mismatch(
                        trace,
                        step,
                        &a.write_index,
                        &b.write_index,
                        format!("{context}: write index (height {h})"),
                    ));
                }
            }
            (a, b) => {
                failures.push(mismatch(
                    trace,
                    step,
                    &format!("{a:?}"),
                    &format!("{b:?}"),
                    format!("{context}: deposit result"),
                ));
                break;
            }
        }
        if guarded.unreachable_hit() {
            failures.push(mismatch(
                trace,
                step,
                &false,
                &true,
                format!("{context}: unreachable marker"),
            ));
        }
        if opt.count() != guarded.count() || opt.branch() != guarded.branch() {
            failures.push(mismatch(
                trace,
                step,
                &format!("{:?}", opt.branch()),
                &format!("{:?}", guarded.branch()),
                format!("{context}: state"),
            ));
        }
        let (ra, rb) = (opt.get_deposit_root(), guarded.get_deposit_root());
        if ra != rb {
            failures.push(mismatch(trace, step, &ra, &rb, format!("{context}: root")));
        }
    }
    failures
}

fn replay_variants(trace: &TraceSpec, fault: Option<Fault>) -> Result<Vec<Failure>, HarnessError> {
    check_trace_shape(trace)?;
    let values = trace.toy_values()?;
    let start = sut_contract(trace, fault)?;
    Ok(lockstep_variants(start, &values, Some(trace), "variants"))
}

/// Re-runs a single trace of a replayable property.
pub fn replay(
    property: &str,
    trace: &TraceSpec,
    config: &HarnessConfig,
) -> Result<Vec<Failure>, HarnessError> {
    match property {
        "oracle_root_agreement" => replay_root_agreement(trace, config.fault),
        "height3_trace" => replay_root_sequence(trace, config.fault),
        "sibling_update_agreement" => replay_sibling_update(trace, config.fault, &BigInt::from(0)),
        "branch_init_irrelevance" => replay_branch_init(trace, config.fault),
        "variant_equivalence" => replay_variants(trace, config.fault),
        other if PROPERTIES.contains(&other) => Err(HarnessError::NotReplayable(other.to_string())),
        other => Err(HarnessError::UnknownProperty(other.to_string())),
    }
}

// ---------------------------------------------------------------------------
// Properties.

fn prop_worked_examples(config: &HarnessConfig) -> Collected {
    let sut = SutCombiner(config.fault);
    let int = |v: i64| BigInt::from(v);
    let ints = |v: &[i64]| v.iter().map(|&x| BigInt::from(x)).collect::<Vec<_>>();
    let path = |b: &[u8]| BitPath::from_bits(b).expect("literal bits");
    let mut checks: Vec<(&str, String, String)> = Vec::new();
    let mut eq = |name: &'static str, expected: String, actual: String| {
        checks.push((name, expected, actual))
    };

    eq(
        "combine(3, 6)",
        "-4".into(),
        sut.combine(&int(3), &int(6)).to_string(),
    );
    eq(
        "combine(0, 0)",
        "-1".into(),
        sut.combine(&int(0), &int(0)).to_string(),
    );
    eq(
        "combine(-8, 3)",
        "-12".into(),
        sut.combine(&int(-8), &int(3)).to_string(),
    );

    let tree =
        build_merkle_with(Execution::Sequential, &ints(&HEIGHT3_VALUES), 3, &sut).expect("fits");
    eq(
        "height-3 oracle root",
        "-12".into(),
        tree.root_value().to_string(),
    );
    eq(
        "node_at 0",
        "-8".into(),
        tree.node_at(&path(&[0])).expect("valid").to_string(),
    );
    eq(
        "node_at 1.0.0",
        "4".into(),
        tree.node_at(&path(&[1, 0, 0])).expect("valid").to_string(),
    );
    eq(
        "sibling_at 1",
        "-8".into(),
        tree.sibling_at(&path(&[1])).expect("valid").to_string(),
    );
    eq(
        "sibling_at 1.0",
        "-1".into(),
        tree.sibling_at(&path(&[1, 0])).expect("valid").to_string(),
    );
    eq(
        "sibling_at 1.0.0",
        "0".into(),
        tree.sibling_at(&path(&[1, 0, 0]))
            .expect("valid")
            .to_string(),
    );
    let s = tree
        .siblings_of_path(&path(&[1, 0, 1]), &int(0))
        .expect("valid");
    eq(
        "siblings of 1.0.1: left[0]",
        "-8".into(),
        s.left[0].to_string(),
    );
    eq(
        "siblings of 1.0.1: left[2]",
        "4".into(),
        s.left[2].to_string(),
    );

    eq(
        "next_path 1.0.0",
        "1.0.1".into(),
        next_path(&path(&[1, 0, 0])).expect("has zero").to_string(),
    );
    eq(
        "nat_to_bits(4, 3)",
        "1.0.0".into(),
        nat_to_bits(4, 3).expect("in range").to_string(),
    );

    let sib = SiblingVectors {
        left: ints(&[-8, 99, 42]),
        right: ints(&[-1, -1, 0]),
    };
    eq(
        "compute_root_up height-3",
        "-12".into(),
        compute_root_up(&path(&[1, 0, 0]), &sib, int(4), &sut)
            .expect("ok")
            .to_string(),
    );
    eq(
        "compute_root_up_indexed height-3",
        "-12".into(),
        compute_root_up_indexed(3, 4, &sib, int(4), &sut)
            .expect("ok")
            .to_string(),
    );
    let sib2 = SiblingVectors {
        left: ints(&[-8, 99, 4]),
        right: ints(&[-1, -1, 0]),
    };
    eq(
        "compute_root_up default seed",
        "-12".into(),
        compute_root_up(&path(&[1, 0, 1]), &sib2, int(0), &sut)
            .expect("ok")
            .to_string(),
    );
    let ins = insert_value(&path(&[1, 0, 0]), &sib, int(4), &sut).expect("ok");
    eq(
        "insert_value height-3",
        "[-8, 99, 4]".into(),
        format!("{ins:?}"),
    );

    let zeros = build_zero_hashes(2, &sut).expect("h >= 1");
    eq("zero^0", "0".into(), zeros.level(0).to_string());
    eq("zero^1", "-1".into(), zeros.level(1).to_string());

    if let Ok(c) = DepositContract::from_parts(3, 5, ints(&[4, -4, -8]), None, sut) {
        eq(
            "get_deposit_root from branch",
            "-12".into(),
            c.get_deposit_root().to_string(),
        );
    }

    let failures = checks
        .iter()
        .enumerate()
        .filter(|(_, (_, e, a))| e != a)
        .map(|(i, (name, e, a))| Failure {
            trace: None,
            step: i as u64,
            expected: e.clone(),
            actual: a.clone(),
            detail: name.to_string(),
        })
        .collect();
    Collected {
        cases: checks.len() as u64,
        failures,
    }
}

fn prop_height3_trace(config: &HarnessConfig) -> Collected {
    let values: Vec<BigInt> = HEIGHT3_VALUES.iter().map(|&v| BigInt::from(v)).collect();
    let mut failures = Vec::new();
    let mut cases = 0;
    for variant in [DepositVariant::Optimized, DepositVariant::OriginalGuarded] {
        let trace = TraceSpec {
            variant,
            ..TraceSpec::toy(3, &values)
        };
        failures.extend(replay_root_sequence(&trace, config.fault).expect("valid trace"));
        let mut c = sut_contract(&trace, config.fault).expect("valid trace");
        for (n, v) in values.iter().enumerate() {
            c.deposit(v.clone(), variant).expect("capacity 7");
            let expected = BigInt::from(HEIGHT3_PREFIX_ROOTS[n + 1]);
            let actual = c.get_deposit_root();
            if actual != expected {
                failures.push(mismatch(
                    Some(&trace),
                    n as u64 + 1,
                    &expected,
                    &actual,
                    "frozen prefix root",
                ));
            }
        }
        let branch: Vec<BigInt> = [4, -4, -8].iter().map(|&v| BigInt::from(v)).collect();
        if c.branch() != branch.as_slice() {
            failures.push(mismatch(
                Some(&trace),
                5,
                &"[4, -4, -8]",
                &format!("{:?}", c.branch()).as_str(),
                "final branch",
            ));
        }
        cases += 1;
    }
    Collected { cases, failures }
}

/// `(height, length, draw)` for every length up to capacity at exhaustive
/// heights, plus `value_draws` random lengths at each sampled height.
fn length_sweep(config: &HarnessConfig, property: &str, min_len: u64) -> Vec<(u32, u64, u64)> {
    let mut cases = Vec::new();
    let top = config.max_height.min(MAX_ORACLE_HEIGHT);
    for h in 1..=top.min(EXHAUSTIVE_HEIGHT) {
        for n in min_len..=capacity(h) {
            for d in 0..config.value_draws as u64 {
                cases.push((h, n, d));
            }
        }
    }
    for h in EXHAUSTIVE_HEIGHT + 1..=top {
        for d in 0..config.value_draws as u64 {
            let mut rng = case_rng(config, property, (h as u64) << 32 | d);
            cases.push((h, rng.random_range(min_len..=capacity(h)), d));
        }
    }
    cases
}

fn case_index(h: u32, n: u64, d: u64) -> u64 {
    (h as u64) << 56 ^ n << 16 ^ d
}

fn prop_oracle_root_agreement(config: &HarnessConfig) -> Collected {
    let name = "oracle_root_agreement";
    run_cases(config, length_sweep(config, name, 0), |(h, n, d)| {
        let mut rng = case_rng(config, name, case_index(h, n, d));
        let trace = TraceSpec::toy(h, &sample_toy(&mut rng, n as usize));
        replay_root_agreement(&trace, config.fault).expect("generated traces are valid")
    })
}

fn prop_sibling_update(config: &HarnessConfig) -> Collected {
    let name = "sibling_update_agreement";
    run_cases(config, length_sweep(config, name, 1), |(h, n, d)| {
        let mut rng = case_rng(config, name, case_index(h, n, d));
        let trace = TraceSpec::toy(h, &sample_toy(&mut rng, n as usize));
        let filler = BigInt::sample(&mut rng);
        replay_sibling_update(&trace, config.fault, &filler).expect("generated traces are valid")
    })
}

fn random_siblings(rng: &mut ChaCha8Rng, h: u32) -> SiblingVectors<BigInt> {
    SiblingVectors {
        left: sample_toy(rng, h as usize),
        right: sample_toy(rng, h as usize),
    }
}

fn prop_index_equivalence(config: &HarnessConfig) -> Collected {
    let name = "index_equivalence";
    let sut = SutCombiner(config.fault);
    let mut cases = Vec::new();
    for h in 0..=INDEX_EQUIVALENCE_HEIGHT {
        for k in 0..1u64 << h {
            for d in 0..config.value_draws as u64 {
                cases.push((h, k, d));
            }
        }
    }
    run_cases(config, cases, |(h, k, d)| {
        let mut rng = case_rng(config, name, case_index(h, k, d));
        let sib = random_siblings(&mut rng, h);
        let seed = BigInt::sample(&mut rng);
        let p = nat_to_bits(k, h).expect("k < 2^h");
        let mut failures = Vec::new();
        let detail = |what: &str| {
            format!(
                "{what}: h={h} k={k} left={:?} right={:?} seed={seed}",
                sib.left, sib.right
            )
        };
        let a = compute_root_up_indexed(h, k, &sib, seed.clone(), &sut).expect("valid");
        let b = compute_root_up(&p, &sib, seed.clone(), &sut).expect("valid");
        if a != b {
            failures.push(mismatch(None, k, &b, &a, detail("compute_root_up_indexed")));
        }
        if h >= 1 && k < capacity(h) {
            let a = insert_value_indexed(h, k, &sib, seed.clone(), &sut).expect("valid");
            let b = insert_value(&p, &sib, seed.clone(), &sut).expect("valid");
            if a != b {
                failures.push(mismatch(
                    None,
                    k,
                    &format!("{b:?}"),
                    &format!("{a:?}"),
                    detail("insert_value_indexed"),
                ));
            }
        }
        failures
    })
}

fn prop_irrelevance(config: &HarnessConfig) -> Collected {
    let name = "irrelevance";
    let sut = SutCombiner(config.fault);
    let cases: Vec<(u32, u64)> = (1..=IRRELEVANCE_HEIGHT)
        .flat_map(|h| (0..config.num_random_cases as u64).map(move |i| (h, i)))
        .collect();
    run_cases(config, cases, |(h, i)| {
        let mut rng = case_rng(config, name, (h as u64) << 40 | i);
        let p = BitPath::from((0..h).map(|_| rng.random::<bool>()).collect::<Vec<_>>());
        let sib = random_siblings(&mut rng, h);
        let seed = BigInt::sample(&mut rng);
        let mut perturbed = sib.clone();
        for d in 0..h as usize {
            if p.bit(d) {
                perturbed.right[d] = BigInt::sample(&mut rng);
            } else {
                perturbed.left[d] = BigInt::sample(&mut rng);
            }
        }
        let a = compute_root_up(&p, &sib, seed.clone(), &sut).expect("valid");
        let b = compute_root_up(&p, &perturbed, seed, &sut).expect("valid");
        if a != b {
            vec![mismatch(
                None,
                i,
                &a,
                &b,
                format!("perturbed irrelevant siblings on path {p}"),
            )]
        } else {
            Vec::new()
        }
    })
}

fn prop_default_seed_root(config: &HarnessConfig) -> Collected {
    let name = "default_seed_root";
    let sut = SutCombiner(config.fault);
    let mut cases = Vec::new();
    for h in 1..=config.max_height.min(EXHAUSTIVE_HEIGHT) {
        for n in 0..1u64 << h {
            for d in 0..config.value_draws as u64 {
                cases.push((h, n, d));
            }
        }
    }
    run_cases(config, cases, |(h, n, d)| {
        let mut rng = case_rng(config, name, case_index(h, n, d));
        let values = sample_toy(&mut rng, n as usize);
        let trace = TraceSpec::toy(h, &values);
        let tree =
            build_merkle_with(Execution::Sequential, &values, h, &ToyCombiner).expect("fits");
        let p = nat_to_bits(n, h).expect("n < 2^h");
        let filler = BigInt::sample(&mut rng);
        let sib = tree.siblings_of_path(&p, &filler).expect("full path");
        let zeros = build_zero_hashes(h, &ToyCombiner).expect("h >= 1");
        let mut failures = Vec::new();
        for i in (0..h as usize).filter(|&i| !p.bit(i)) {
            let level = h as usize - 1 - i;
            if &sib.right[i] != zeros.level(level) {
                failures.push(mismatch(
                    Some(&trace),
                    i as u64,
                    zeros.level(level),
                    &sib.right[i],
                    "right sibling is a zero hash",
                ));
            }
        }
        let got = compute_root_up(&p, &sib, BigInt::from(0), &sut).expect("valid");
        if &got != tree.root_value() {
            failures.push(mismatch(
                Some(&trace),
                n,
                tree.root_value(),
                &got,
                "compute_root_up with default seed",
            ));
        }
        failures
    })
}

fn zero_table_checks<C: Combiner, R: Combiner<Value = C::Value>>(
    combiner: &C,
    reference: &R,
    label: &str,
) -> Collected {
    let table = build_zero_hashes(ZERO_TABLE_LEVEL + 1, combiner).expect("h >= 1");
    let mut failures = Vec::new();
    if *table.level(0) != combiner.default_leaf() {
        failures.push(mismatch(
            None,
            0,
            &combiner.default_leaf(),
            table.level(0),
            format!("{label}: level 0"),
        ));
    }
    for l in 0..=ZERO_TABLE_LEVEL as usize {
        if l > 0 {
            let prev = table.level(l - 1);
            let expected = combiner.combine(prev, prev);
            if *table.level(l) != expected {
                failures.push(mismatch(
                    None,
                    l as u64,
                    &expected,
                    table.level(l),
                    format!("{label}: recurrence"),
                ));
            }
        }
        let oracle =
            build_merkle_with(Execution::Sequential, &[], l as u32, reference).expect("small");
        if oracle.root_value() != table.level(l) {
            failures.push(mismatch(
                None,
                l as u64,
                oracle.root_value(),
                table.level(l),
                format!("{label}: oracle empty root"),
            ));
        }
    }
    Collected {
        cases: ZERO_TABLE_LEVEL as u64 + 1,
        failures,
    }
}

fn prop_zero_table(config: &HarnessConfig) -> Collected {
    zero_table_checks(&SutCombiner(config.fault), &ToyCombiner, "toy")
}

fn prop_digest_self_consistency(_config: &HarnessConfig) -> Collected {
    let mut out = zero_table_checks(&Sha256Combiner, &Sha256Combiner, "sha256");
    let table = build_zero_hashes(ZERO_TABLE_LEVEL + 1, &Sha256Combiner).expect("h >= 1");
    for (level, golden) in [
        (1usize, SHA256_ZERO_LEVEL_1),
        (2, SHA256_ZERO_LEVEL_2),
        (8, SHA256_ZERO_LEVEL_8),
    ] {
        let actual = table.level(level).to_string();
        if actual != golden {
            out.failures.push(mismatch(
                None,
                level as u64,
                &golden,
                &actual.as_str(),
                "sha256 golden zero hash",
            ));
        }
        out.cases += 1;
    }
    let empty = DepositContract::new(MAX_HEIGHT, Sha256Combiner, false).expect("valid height");
    let root = empty.get_deposit_root().to_string();
    if root != SHA256_ZERO_LEVEL_32 {
        out.failures.push(mismatch(
            None,
            32,
            &SHA256_ZERO_LEVEL_32,
            &root.as_str(),
            "empty height-32 root",
        ));
    }
    out.cases += 1;
    out
}

fn prop_branch_init(config: &HarnessConfig) -> Collected {
    let name = "branch_init_irrelevance";
    let cases: Vec<(u32, u64)> = BRANCH_INIT_HEIGHTS
        .iter()
        .flat_map(|&h| (0..config.num_random_cases as u64).map(move |i| (h, i)))
        .collect();
    run_cases(config, cases, |(h, i)| {
        let mut rng = case_rng(config, name, (h as u64) << 40 | i);
        let n = rng.random_range(0..=capacity(h).min(64)) as usize;
        let trace = TraceSpec {
            branch_init: BranchInit::Random { seed: rng.random() },
            variant: if rng.random() {
                DepositVariant::Optimized
            } else {
                DepositVariant::OriginalGuarded
            },
            ..TraceSpec::toy(h, &sample_toy(&mut rng, n))
        };
        replay_branch_init(&trace, config.fault).expect("generated traces are valid")
    })
}

/// Start counts for height-32 traces, biased towards long runs of trailing
/// ones so deep climbs are exercised.
fn random_start_count(rng: &mut ChaCha8Rng, h: u32, room: u64) -> u64 {
    let limit = capacity(h) - room;
    match rng.random_range(0..3) {
        0 => rng.random_range(0..=limit),
        1 => {
            let ones = rng.random_range(0..h);
            ((1u64 << ones) - 1).min(limit)
        }
        _ => limit - rng.random_range(0..=limit.min(64)),
    }
}

fn prop_variant_equivalence(config: &HarnessConfig) -> Collected {
    let name = "variant_equivalence";
    let mut exhaustive = Vec::new();
    for h in 1..=config.max_height.min(EXHAUSTIVE_HEIGHT) {
        for n in 0..=capacity(h) {
            for d in 0..config.value_draws as u64 {
                exhaustive.push((h, n, d));
            }
        }
    }
    let mut out = run_cases(config, exhaustive, |(h, n, d)| {
        let mut rng = case_rng(config, name, case_index(h, n, d));
        let trace = TraceSpec {
            branch_init: BranchInit::Random { seed: rng.random() },
            ..TraceSpec::toy(h, &sample_toy(&mut rng, n as usize))
        };
        replay_variants(&trace, config.fault).expect("generated traces are valid")
    });

    let deep: Vec<u64> = (0..config.num_random_cases as u64).collect();
    let deep_out = run_cases(config, deep, |i| {
        let mut rng = case_rng(config, name, 1u64 << 63 | i);
        let h = MAX_HEIGHT;
        let n = rng.random_range(1..=16u64);
        let count = random_start_count(&mut rng, h, n);
        let branch = sample_toy(&mut rng, h as usize);
        let values = sample_toy(&mut rng, n as usize);
        let start = DepositContract::from_parts(h, count, branch, None, SutCombiner(config.fault))
            .expect("count below capacity");
        lockstep_variants(
            start,
            &values,
            None,
            &format!("height {h} from count {count}"),
        )
    });
    out.cases += deep_out.cases;
    out.failures.extend(deep_out.failures);
    out
}

fn prop_incremental_cost(config: &HarnessConfig) -> Collected {
    let name = "incremental_cost";
    let h = COST_HEIGHT;
    let mut rng = case_rng(config, name, 0);
    let counter = Counting::new(SutCombiner(config.fault));
    let mut contract = DepositContract::new(h, &counter, false).expect("valid height");
    counter.reset();
    let values = sample_toy(&mut rng, capacity(h) as usize);
    let mut failures = Vec::new();
    for (step, v) in values.iter().enumerate() {
        let outcome = contract
            .deposit(v.clone(), DepositVariant::Optimized)
            .expect("within capacity");
        let calls = counter.reset();
        if calls > h as u64 || calls != outcome.combines as u64 {
            failures.push(mismatch(
                None,
                step as u64,
                &format!("<= {h}"),
                &calls,
                "combiner calls per deposit",
            ));
        }
    }
    let root = contract.get_deposit_root();
    let root_calls = counter.reset();
    if root_calls != h as u64 {
        failures.push(mismatch(
            None,
            values.len() as u64,
            &h,
            &(root_calls as u32),
            "combiner calls per root query",
        ));
    }
    let reference = Counting::new(ToyCombiner);
    let oracle =
        build_merkle_with(config.execution, &values, h, &reference).expect("h within oracle limit");
    let oracle_calls = reference.reset();
    if oracle_calls != capacity(h) {
        failures.push(mismatch(
            None,
            values.len() as u64,
            &capacity(h),
            &oracle_calls,
            "combiner calls per oracle rebuild",
        ));
    }
    if *oracle.root_value() != root {
        failures.push(mismatch(
            None,
            values.len() as u64,
            oracle.root_value(),
            &root,
            "final root vs oracle",
        ));
    }
    Collected {
        cases: values.len() as u64 + 2,
        failures,
    }
}

fn prop_persistence(config: &HarnessConfig) -> Collected {
    let name = "persistence_roundtrip";
    let cases: Vec<u64> = (0..config.num_random_cases as u64).collect();
    run_cases(config, cases, |i| {
        let mut rng = case_rng(config, name, i);
        let id = if rng.random() {
            CombinerId::Toy
        } else {
            CombinerId::Sha256
        };
        let h = if rng.random_range(0..8) == 0 {
            MAX_HEIGHT
        } else {
            rng.random_range(1..=8)
        };
        let audit = rng.random();
        let n = rng.random_range(0..=capacity(h).min(40)) as usize;
        let split = rng.random_range(0..=n);
        let values: Vec<String> = match id {
            CombinerId::Toy => sample_toy(&mut rng, n)
                .iter()
                .map(|v| v.to_string())
                .collect(),
            CombinerId::Sha256 => (0..n)
                .map(|_| Digest::sample(&mut rng).to_string())
                .collect(),
        };
        let detail = format!("{id} height {h} audit {audit}, reload after {split} of {n}");
        let mut direct = AnyContract::new(id, h, audit).expect("valid height");
        let mut staged = direct.clone();
        let roots = direct
            .deposit_batch(&values, DepositVariant::Optimized)
            .expect("fits");
        staged
            .deposit_batch(&values[..split], DepositVariant::Optimized)
            .expect("fits");
        let mut reloaded = match persist::decode(&staged.encode()) {
            Ok(c) => c,
            Err(e) => {
                return vec![mismatch(
                    None,
                    split as u64,
                    &"decoded state",
                    &e.to_string().as_str(),
                    detail,
                )]
            }
        };
        let mut failures = Vec::new();
        let tail = reloaded
            .deposit_batch(&values[split..], DepositVariant::Optimized)
            .expect("fits");
        for (j, (a, b)) in roots[split..].iter().zip(&tail).enumerate() {
            if a != b {
                failures.push(mismatch(None, (split + j) as u64, a, b, detail.clone()));
            }
        }
        if direct.encode() != reloaded.encode() {
            failures.push(mismatch(
                None,
                n as u64,
                &direct.encode(),
                &reloaded.encode(),
                detail,
            ));
        }
        failures
    })
}

fn dispatch(name: &str, config: &HarnessConfig) -> Option<Collected> {
    Some(match name {
        "worked_examples" => prop_worked_examples(config),
        "height3_trace" => prop_height3_trace(config),
        "oracle_root_agreement" => prop_oracle_root_agreement(config),
        "sibling_update_agreement" => prop_sibling_update(config),
        "index_equivalence" => prop_index_equivalence(config),
        "irrelevance" => prop_irrelevance(config),
        "default_seed_root" => prop_default_seed_root(config),
        "zero_table_soundness" => prop_zero_table(config),
        "digest_self_consistency" => prop_digest_self_consistency(config),
        "branch_init_irrelevance" => prop_branch_init(config),
        "variant_equivalence" => prop_variant_equivalence(config),
        "incremental_cost" => prop_incremental_cost(config),
        "persistence_roundtrip" => prop_persistence(config),
        _ => return None,
    })
}

pub fn run_property(name: &str, config: &HarnessConfig) -> Result<Verdict, HarnessError> {
    let collected =
        dispatch(name, config).ok_or_else(|| HarnessError::UnknownProperty(name.to_string()))?;
    Ok(Verdict {
        property: name.to_string(),
        cases_run: collected.cases,
        failures: collected.failures,
    })
}

/// Runs every registered property. Properties run concurrently when the
/// configured execution is parallel.
pub fn run_all(config: &HarnessConfig) -> Vec<Verdict> {
    par::map_cases(config.execution, PROPERTIES.to_vec(), |name| {
        run_property(name, config).expect("registered property")
    })
}

// ---------------------------------------------------------------------------
// Shrinking.

/// Greedily minimizes a failing trace: lowest height first, then fewest
/// values, then smallest toy values.
pub fn shrink(
    property: &str,
    failure: &Failure,
    config: &HarnessConfig,
) -> Result<TraceSpec, HarnessError> {
    let original = failure.trace.as_ref().ok_or(HarnessError::NoTrace)?;
    let fails = |t: &TraceSpec| replay(property, t, config).map(|f| !f.is_empty());
    if !fails(original)? {
        return Err(HarnessError::DidNotReproduce);
    }
    let mut best = original.clone();

    for h in 1..best.height {
        let mut candidate = best.clone();
        candidate.height = h;
        candidate.values.truncate(capacity(h) as usize);
        if fails(&candidate).unwrap_or(false) {
            best = candidate;
            break;
        }
    }

    'outer: loop {
        let len = best.values.len();
        let mut chunk = len.div_ceil(2).max(1);
        while chunk >= 1 && len > 0 {
            let mut start = 0;
            while start < len {
                let mut candidate = best.clone();
                candidate.values.drain(start..(start + chunk).min(len));
                if fails(&candidate).unwrap_or(false) {
                    best = candidate;
                    continue 'outer;
                }
                start += chunk;
            }
            chunk /= 2;
        }
        break;
    }

    if best.combiner_id == CombinerId::Toy {
        for i in 0..best.values.len() {
            loop {
                let current = BigInt::parse_value(&best.values[i])
                    .map_err(|e| HarnessError::BadTrace(e.to_string()))?;
                if current == BigInt::from(0) {
                    break;
                }
                let mut improved = false;
                for smaller in [BigInt::from(0), &current / 2] {
                    let mut candidate = best.clone();
                    candidate.values[i] = smaller.to_string();
                    if smaller != current && fails(&candidate).unwrap_or(false) {
                        best = candidate;
                        improved = true;
                        break;
                    }
                }
                if !improved {
                    break;
                }
            }
        }
    }
    Ok(best)
}

/// Shrinks the first failure of a verdict that carries a trace.
pub fn shrink_verdict(
    verdict: &Verdict,
    config: &HarnessConfig,
) -> Result<TraceSpec, HarnessError> {
    if verdict.passed() {
        return Err(HarnessError::NothingToShrink(verdict.property.clone()));
    }
    let failure = verdict
        .failures
        .iter()
        .find(|f| f.trace.is_some())
        .ok_or(HarnessError::NoTrace)?;
    shrink(&verdict.property, failure, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn quick() -> HarnessConfig {
        HarnessConfig {
            max_height: 3,
            num_random_cases: 20,
            value_draws: 2,
            ..Default::default()
        }
    }

    #[test]
    fn every_property_passes_on_small_config() {
        for name in PROPERTIES {
            let v = run_property(name, &quick()).unwrap();
            assert!(v.passed(), "{name}: {:?}", v.failures.first());
            assert!(v.cases_run > 0, "{name}");
        }
    }

    #[test]
    fn unknown_property() {
        assert_eq!(
            run_property("nope", &quick()),
            Err(HarnessError::UnknownProperty("nope".into()))
        );
        assert!(matches!(
            replay("nope", &TraceSpec::toy(1, &[]), &quick()),
            Err(HarnessError::UnknownProperty(_))
        ));
        assert!(matches!(
            replay("irrelevance", &TraceSpec::toy(1, &[]), &quick()),
            Err(HarnessError::NotReplayable(_))
        ));
    }

    #[test]
    fn oracle_sweep_case_count() {
        let config = HarnessConfig {
            max_height: 4,
            value_draws: 3,
            ..quick()
        };
        let v = run_property("oracle_root_agreement", &config).unwrap();
        assert_eq!(v.cases_run, (2 + 4 + 8 + 16) * 3);
    }

    #[test]
    fn verdicts_are_reproducible_across_execution_modes() {
        let faulty = HarnessConfig {
            fault: Some(Fault::MutatedCombiner),
            ..quick()
        };
        for name in [
            "oracle_root_agreement",
            "sibling_update_agreement",
            "irrelevance",
            "variant_equivalence",
        ] {
            let seq = run_property(
                name,
                &HarnessConfig {
                    execution: Execution::Sequential,
                    ..faulty.clone()
                },
            )
            .unwrap();
            let par = run_property(
                name,
                &HarnessConfig {
                    execution: Execution::Parallel,
                    ..faulty.clone()
                },
            )
            .unwrap();
            assert_eq!(seq, par, "{name}");
            assert_eq!(
                seq,
                run_property(
                    name,
                    &HarnessConfig {
                        execution: Execution::Sequential,
                        ..faulty.clone()
                    }
                )
                .unwrap()
            );
        }
    }

    #[test]
    fn mutated_combiner_is_caught_and_shrunk() {
        let config = HarnessConfig {
            fault: Some(Fault::MutatedCombiner),
            max_height: 5,
            ..quick()
        };
        let v = run_property("oracle_root_agreement", &config).unwrap();
        assert!(!v.passed());
        let longest = v
            .failures
            .iter()
            .max_by_key(|f| f.trace.as_ref().map(|t| (t.height, t.values.len())))
            .unwrap();
        let original = longest.trace.clone().unwrap();
        let shrunk = shrink("oracle_root_agreement", longest, &config).unwrap();
        assert!(shrunk.height <= original.height);
        assert!(shrunk.values.len() <= original.values.len());
        assert!(shrunk.values.len() <= 2, "{shrunk:?}");
        assert!(!replay("oracle_root_agreement", &shrunk, &config)
            .unwrap()
            .is_empty());
        assert_eq!(shrink_verdict(&v, &config).unwrap().height, 1);
    }

    #[test]
    fn shrink_rejects_passing_or_traceless_input() {
        let v = run_property("height3_trace", &quick()).unwrap();
        assert!(matches!(
            shrink_verdict(&v, &quick()),
            Err(HarnessError::NothingToShrink(_))
        ));
        let f = Failure {
            trace: None,
            step: 0,
            expected: String::new(),
            actual: String::new(),
            detail: String::new(),
        };
        assert_eq!(
            shrink("oracle_root_agreement", &f, &quick()),
            Err(HarnessError::NoTrace)
        );
        let ok = Failure {
            trace: Some(TraceSpec::toy(2, &[BigInt::from(1)])),
            ..f
        };
        assert_eq!(
            shrink("oracle_root_agreement", &ok, &quick()),
            Err(HarnessError::DidNotReproduce)
        );
    }

    #[test]
    fn json_line_shape() {
        let v = run_property("height3_trace", &quick()).unwrap();
        let line = v.to_json_line(5);
        let parsed: serde_json::Value = serde_json::from_str(&line).unwrap();
        assert_eq!(parsed["property"], "height3_trace");
        assert_eq!(parsed["passed"], true);
        assert_eq!(parsed["failure_count"], 0);
        assert!(!line.contains('\n'));
    }
}
