//! Acceptance gate. Prints one PASS/FAIL line per criterion and exits
//! nonzero if any criterion fails.

use std::process::ExitCode;
use std::time::{Duration, Instant};

use incmerkle::harness::{self, Fault, HarnessConfig, Verdict};
use incmerkle::persist::{self, AnyContract};
use incmerkle::{CombinerId, DepositVariant};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Criterion = (&'static str, Box<dyn FnOnce() -> Outcome>);

struct Outcome {
    ok: bool,
    note: String,
}

fn verdicts(config: &HarnessConfig, names: &[&str]) -> Outcome {
    let results: Vec<Verdict> = names
        .iter()
        .map(|n| harness::run_property(n, config).expect("registered"))
        .collect();
    let ok = results.iter().all(Verdict::passed);
    let note = results
        .iter()
        .map(|v| match v.failures.first() {
            None => format!("{}: {} cases", v.property, v.cases_run),
            Some(f) => format!(
                "{}: {} of {} failed, first at step {} ({}: expected {}, got {})",
                v.property,
                v.failures.len(),
                v.cases_run,
                f.step,
                f.detail,
                f.expected,
                f.actual
            ),
        })
        .collect::<Vec<_>>()
        .join("; ");
    Outcome { ok, note }
}

fn timed(limit: Option<Duration>, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut out = f();
    let elapsed = start.elapsed();
    out.note = format!("{} [{:.2?}]", out.note, elapsed);
    if let Some(limit) = limit {
        if elapsed >= limit {
            out.ok = false;
            out.note = format!("{} exceeds {:?}", out.note, limit);
        }
    }
    out
}

fn sweep() -> HarnessConfig {
    HarnessConfig {
        max_height: 5,
        value_draws: 20,
        ..HarnessConfig::default()
    }
}

fn file_roundtrips(cases: u64) -> Outcome {
    let dir = tempfile::tempdir().expect("temp dir");
    let mut failures = 0;
    for i in 0..cases {
        let mut rng = ChaCha8Rng::seed_from_u64(0x00ac_ce97 ^ i);
        let id = if rng.random() {
            CombinerId::Toy
        } else {
            CombinerId::Sha256
        };
        let h = rng.random_range(1..=32u32);
        let room = ((1u64 << h) - 1).min(30);
        let n = rng.random_range(0..=room) as usize;
        let split = rng.random_range(0..=n);
        let values: Vec<String> = (0..n)
            .map(|_| match id {
                CombinerId::Toy => rng.random_range(-1_000_000i64..=1_000_000).to_string(),
                CombinerId::Sha256 => hex::encode(rng.random::<[u8; 32]>()),
            })
            .collect();
        let path = dir.path().join(format!("state-{i}"));
        let mut memory = AnyContract::new(id, h, rng.random()).expect("valid height");
        let expected = memory
            .deposit_batch(&values, DepositVariant::Optimized)
            .expect("fits");
        let mut disk = AnyContract::new(id, h, memory.is_audited()).expect("valid height");
        disk.deposit_batch(&values[..split], DepositVariant::Optimized)
            .expect("fits");
        persist::save(&path, &disk).expect("save");
        let mut loaded = persist::load(&path).expect("load");
        let tail = loaded
            .deposit_batch(&values[split..], DepositVariant::Optimized)
            .expect("fits");
        if tail != expected[split..] || loaded.encode() != memory.encode() {
            failures += 1;
        }
    }
    Outcome {
        ok: failures == 0,
        note: format!("{cases} file traces, {failures} diverged"),
    }
}

fn mutation_shrinks() -> Outcome {
    let config = HarnessConfig {
        fault: Some(Fault::MutatedCombiner),
        ..sweep()
    };
    let verdict = harness::run_property("oracle_root_agreement", &config).expect("registered");
    if verdict.passed() {
        return Outcome {
            ok: false,
            note: "mutated combiner went undetected".into(),
        };
    }
    let longest = verdict
        .failures
        .iter()
        .filter(|f| f.trace.is_some())
        .max_by_key(|f| f.trace.as_ref().map(|t| (t.height, t.values.len())))
        .expect("failures carry traces");
    let original = longest.trace.as_ref().expect("filtered");
    match harness::shrink("oracle_root_agreement", longest, &config) {
        Ok(t) => Outcome {
            ok: t.values.len() <= 2,
            note: format!(
                "{} failures; shrunk height {} / {} deposits to height {} / {} deposits {:?}",
                verdict.failures.len(),
                original.height,
                original.values.len(),
                t.height,
                t.values.len(),
                t.values
            ),
        },
        Err(e) => Outcome {
            ok: false,
            note: format!("shrink failed: {e}"),
        },
    }
}

fn main() -> ExitCode {
    let secs = Duration::from_secs;
    let criteria: Vec<Criterion> = vec![
        (
            "1 golden trace",
            Box::new(move || {
                timed(Some(secs(1)), || {
                    verdicts(&sweep(), &["height3_trace", "worked_examples"])
                })
            }),
        ),
        (
            "2 oracle equivalence",
            Box::new(move || {
                timed(Some(secs(60)), || {
                    verdicts(&sweep(), &["oracle_root_agreement"])
                })
            }),
        ),
        (
            "3 sibling update",
            Box::new(move || {
                timed(Some(secs(60)), || {
                    verdicts(&sweep(), &["sibling_update_agreement"])
                })
            }),
        ),
        (
            "4 index equivalence",
            Box::new(|| timed(None, || verdicts(&sweep(), &["index_equivalence"]))),
        ),
        (
            "5 branch init irrelevance",
            Box::new(|| {
                let config = HarnessConfig {
                    num_random_cases: 1000,
                    ..sweep()
                };
                timed(None, || verdicts(&config, &["branch_init_irrelevance"]))
            }),
        ),
        (
            "6 loop guard",
            Box::new(|| {
                let config = HarnessConfig {
                    num_random_cases: 10_000,
                    ..sweep()
                };
                timed(None, || verdicts(&config, &["variant_equivalence"]))
            }),
        ),
        (
            "7 irrelevance",
            Box::new(|| {
                let config = HarnessConfig {
                    num_random_cases: 1000,
                    ..sweep()
                };
                timed(None, || {
                    verdicts(&config, &["irrelevance", "default_seed_root"])
                })
            }),
        ),
        (
            "8 digest self-consistency",
            Box::new(|| {
                timed(None, || {
                    verdicts(
                        &sweep(),
                        &["digest_self_consistency", "zero_table_soundness"],
                    )
                })
            }),
        ),
        (
            "9 persistence and mutation",
            Box::new(|| {
                timed(None, || {
                    let config = HarnessConfig {
                        num_random_cases: 100,
                        ..sweep()
                    };
                    let parts = [
                        verdicts(&config, &["persistence_roundtrip"]),
                        file_roundtrips(100),
                        mutation_shrinks(),
                    ];
                    Outcome {
                        ok: parts.iter().all(|p| p.ok),
                        note: parts
                            .iter()
                            .map(|p| p.note.as_str())
                            .collect::<Vec<_>>()
                            .join("; "),
                    }
                })
            }),
        ),
        (
            "10 combiner call counts",
            Box::new(|| timed(None, || verdicts(&sweep(), &["incremental_cost"]))),
        ),
    ];

    let mut all_ok = true;
    for (name, run) in criteria {
        let out = run();
        all_ok &= out.ok;
        println!(
            "{} criterion {name}: {}",
            if out.ok { "PASS" } else { "FAIL" },
            out.note
        );
    }
    if all_ok {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
