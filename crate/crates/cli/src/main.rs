//! Command-line front end for the incremental Merkle accumulator.
//!
//! Exit codes: 0 success, 1 I/O or existing state file, 2 usage, 3 tree
//! full, 4 malformed value, 5 corrupt state file, 6 failing check, 7 state
//! file locked.

use std::fs;
use std::io::{self, BufRead, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::Instant;

use clap::{Parser, Subcommand, ValueEnum};
use incmerkle::harness::{self, Fault, HarnessConfig, PROPERTIES};
use incmerkle::oracle::build_merkle_with;
use incmerkle::persist::{self, AnyContract, PersistError, StateLock};
use incmerkle::{
    build_zero_hashes, Combiner, CombinerId, ContractError, DepositContract, DepositVariant,
    Execution, NodeValue, Sha256Combiner, ToyCombiner, MAX_HEIGHT, MAX_ORACLE_HEIGHT,
};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[derive(Parser)]
#[command(
    name = "incmerkle",
    version,
    about = "Append-only incremental Merkle tree accumulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, ValueEnum)]
enum Hash {
    Toy,
    Sha256,
}

impl From<Hash> for CombinerId {
    fn from(h: Hash) -> Self {
        match h {
            Hash::Toy => CombinerId::Toy,
            Hash::Sha256 => CombinerId::Sha256,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum Variant {
    Optimized,
    OriginalGuarded,
}

impl From<Variant> for DepositVariant {
    fn from(v: Variant) -> Self {
        match v {
            Variant::Optimized => DepositVariant::Optimized,
            Variant::OriginalGuarded => DepositVariant::OriginalGuarded,
        }
    }
}

#[derive(Clone, Copy, ValueEnum)]
enum InjectFault {
    MutatedCombiner,
}

fn height_arg(s: &str) -> Result<u32, String> {
    let h: u32 = s.parse().map_err(|e| format!("{e}"))?;
    if (1..=MAX_HEIGHT).contains(&h) {
        Ok(h)
    } else {
        Err(format!("height must be between 1 and {MAX_HEIGHT}"))
    }
}

#[derive(Subcommand)]
enum Command {
    /// Create a state file holding an empty tree and print its root.
    Init {
        #[arg(long, value_parser = height_arg)]
        height: u32,
        #[arg(long, value_enum)]
        hash: Hash,
        #[arg(long)]
        state: PathBuf,
        /// Keep every deposited value in the state file.
        #[arg(long)]
        audit: bool,
        /// Overwrite an existing state file.
        #[arg(long)]
        force: bool,
    },
    /// Append values and print the root after each one.
    Deposit {
        #[arg(long)]
        state: PathBuf,
        /// Read values one per line from FILE (`-` for stdin).
        #[arg(long, conflicts_with = "values")]
        input: Option<PathBuf>,
        #[arg(long, value_enum, default_value = "optimized")]
        variant: Variant,
        #[arg(allow_negative_numbers = true, required_unless_present = "input")]
        values: Vec<String>,
    },
    /// Print the current root.
    Root {
        #[arg(long)]
        state: PathBuf,
    },
    /// Print the zero-subtree hash of every level below the root.
    ZeroHashes {
        #[arg(long, value_parser = height_arg)]
        height: u32,
        #[arg(long, value_enum)]
        hash: Hash,
    },
    /// Run the differential harness and print one JSON verdict per property.
    Check {
        #[arg(long, visible_alias = "height", default_value_t = 5)]
        max_height: u32,
        /// Random cases per sampled sub-range.
        #[arg(long, default_value_t = 1000)]
        cases: usize,
        /// Value draws per enumerated (height, length) pair.
        #[arg(long, default_value_t = 20)]
        draws: usize,
        #[arg(long, default_value_t = HarnessConfig::default().rng_seed)]
        seed: u64,
        /// Run only these properties (repeatable).
        #[arg(long = "property", value_parser = clap::builder::PossibleValuesParser::new(PROPERTIES))]
        properties: Vec<String>,
        #[arg(long, value_enum)]
        inject_fault: Option<InjectFault>,
        #[arg(long)]
        sequential: bool,
        /// Failures listed per verdict.
        #[arg(long, default_value_t = 5)]
        max_failures: usize,
    },
    /// Time incremental deposits against a full oracle rebuild.
    Bench {
        #[arg(long, value_parser = height_arg)]
        height: u32,
        #[arg(long)]
        n: u64,
        #[arg(long, value_enum, default_value = "sha256")]
        hash: Hash,
        #[arg(long, default_value_t = 1)]
        seed: u64,
    },
}

#[derive(Debug)]
struct Failure {
    code: u8,
    message: String,
}

impl Failure {
    fn new(code: u8, message: impl Into<String>) -> Self {
        Failure {
            code,
            message: message.into(),
        }
    }
}

impl From<PersistError> for Failure {
    fn from(e: PersistError) -> Self {
        let code = match &e {
            PersistError::Io { .. } | PersistError::Exists(_) => 1,
            PersistError::Capacity { .. } | PersistError::Contract(ContractError::Full { .. }) => 3,
            PersistError::Value(_) => 4,
            PersistError::Corrupt(_)
            | PersistError::Checksum { .. }
            | PersistError::UnsupportedVersion(_)
            | PersistError::Contract(_) => 5,
            PersistError::Locked(_) => 7,
        };
        Failure::new(code, e.to_string())
    }
}

fn io_failure(path: &Path, e: io::Error) -> Failure {
    Failure::new(1, format!("{}: {e}", path.display()))
}

type Out<'a> = &'a mut dyn Write;

fn emit(out: Out, line: impl std::fmt::Display) -> Result<(), Failure> {
    writeln!(out, "{line}").map_err(|e| Failure::new(1, format!("stdout: {e}")))
}

fn init(
    out: Out,
    height: u32,
    hash: Hash,
    state: &Path,
    audit: bool,
    force: bool,
) -> Result<(), Failure> {
    let _lock = StateLock::acquire(state)?;
    if !force && state.exists() {
        return Err(PersistError::Exists(state.to_path_buf()).into());
    }
    let contract = AnyContract::new(hash.into(), height, audit).map_err(PersistError::from)?;
    persist::save(state, &contract)?;
    emit(out, contract.root_string())
}

fn read_values(input: &Path) -> Result<Vec<String>, Failure> {
    let lines: Vec<String> = if input == Path::new("-") {
        io::stdin()
            .lock()
            .lines()
            .collect::<Result<_, _>>()
            .map_err(|e| io_failure(input, e))?
    } else {
        fs::read_to_string(input)
            .map_err(|e| io_failure(input, e))?
            .lines()
            .map(str::to_owned)
            .collect()
    };
    Ok(lines
        .into_iter()
        .map(|l| l.trim().to_owned())
        .filter(|l| !l.is_empty())
        .collect())
}

fn deposit(out: Out, state: &Path, values: Vec<String>, variant: Variant) -> Result<(), Failure> {
    let _lock = StateLock::acquire(state)?;
    let mut contract = persist::load(state)?;
    let roots = contract.deposit_batch(&values, variant.into())?;
    persist::save(state, &contract)?;
    for root in roots {
        emit(out, root)?;
    }
    Ok(())
}

fn zero_hashes<C: Combiner>(out: Out, height: u32, combiner: C) -> Result<(), Failure> {
    let table = build_zero_hashes(height, &combiner).expect("height validated");
    for v in table.levels() {
        emit(out, v)?;
    }
    Ok(())
}

fn check(
    out: Out,
    config: HarnessConfig,
    properties: Vec<String>,
    max_failures: usize,
) -> Result<(), Failure> {
    let verdicts = if properties.is_empty() {
        harness::run_all(&config)
    } else {
        properties
            .iter()
            .map(|p| harness::run_property(p, &config).map_err(|e| Failure::new(2, e.to_string())))
            .collect::<Result<_, _>>()?
    };
    let mut failed = 0;
    for v in &verdicts {
        emit(out, v.to_json_line(max_failures))?;
        if !v.passed() {
            failed += 1;
            if let Ok(t) = harness::shrink_verdict(v, &config) {
                eprintln!(
                    "{}: shrunk counterexample {}",
                    v.property,
                    serde_json::to_string(&t).unwrap_or_default()
                );
            }
        }
    }
    if failed > 0 {
        return Err(Failure::new(
            6,
            format!("{failed} of {} properties failed", verdicts.len()),
        ));
    }
    Ok(())
}

fn bench_with<C: Combiner + Clone>(
    out: Out,
    height: u32,
    n: u64,
    combiner: C,
    seed: u64,
) -> Result<(), Failure> {
    let capacity = (1u64 << height) - 1;
    if n > capacity {
        return Err(Failure::new(
            3,
            format!("{n} deposits exceed capacity {capacity}"),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let values: Vec<C::Value> = (0..n).map(|_| C::Value::sample(&mut rng)).collect();
    let mut contract =
        DepositContract::new(height, combiner.clone(), false).expect("height validated");
    let start = Instant::now();
    for v in &values {
        contract
            .deposit(v.clone(), DepositVariant::Optimized)
            .expect("within capacity");
    }
    let deposits = start.elapsed();
    let start = Instant::now();
    let root = contract.get_deposit_root();
    let root_time = start.elapsed();
    emit(out, format!("height={height} n={n}"))?;
    let per = if n == 0 {
        deposits
    } else {
        deposits / n as u32
    };
    emit(out, format!("incremental_per_deposit={per:?} incremental_total={deposits:?} root_query={root_time:?}"))?;
    if height > MAX_ORACLE_HEIGHT {
        return emit(
            out,
            format!("oracle_rebuild=skipped (height above {MAX_ORACLE_HEIGHT})"),
        );
    }
    let start = Instant::now();
    let tree = build_merkle_with(Execution::default(), &values, height, &combiner)
        .expect("height checked");
    let rebuild = start.elapsed();
    if *tree.root_value() != root {
        return Err(Failure::new(6, "oracle and incremental roots disagree"));
    }
    emit(out, format!("oracle_rebuild={rebuild:?}"))
}

fn run(cli: Cli, out: Out) -> Result<(), Failure> {
    match cli.command {
        Command::Init {
            height,
            hash,
            state,
            audit,
            force,
        } => init(out, height, hash, &state, audit, force),
        Command::Deposit {
            state,
            input,
            variant,
            values,
        } => {
            let values = match input {
                Some(path) => read_values(&path)?,
                None => values,
            };
            deposit(out, &state, values, variant)
        }
        Command::Root { state } => emit(out, persist::load(&state)?.root_string()),
        Command::ZeroHashes {
            height,
            hash: Hash::Toy,
        } => zero_hashes(out, height, ToyCombiner),
        Command::ZeroHashes {
            height,
            hash: Hash::Sha256,
        } => zero_hashes(out, height, Sha256Combiner),
        Command::Check {
            max_height,
            cases,
            draws,
            seed,
            properties,
            inject_fault,
            sequential,
            max_failures,
        } => {
            let config = HarnessConfig {
                max_height,
                num_random_cases: cases,
                value_draws: draws,
                rng_seed: seed,
                fault: inject_fault.map(|InjectFault::MutatedCombiner| Fault::MutatedCombiner),
                execution: if sequential {
                    Execution::Sequential
                } else {
                    Execution::Parallel
                },
            };
            check(out, config, properties, max_failures)
        }
        Command::Bench {
            height,
            n,
            hash: Hash::Toy,
            seed,
        } => bench_with(out, height, n, ToyCombiner, seed),
        Command::Bench {
            height,
            n,
            hash: Hash::Sha256,
            seed,
        } => bench_with(out, height, n, Sha256Combiner, seed),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let stdout = io::stdout();
    let mut out = stdout.lock();
    match run(cli, &mut out) {
        Ok(()) => ExitCode::SUCCESS,
        Err(f) => {
            let _ = out.flush();
            eprintln!("incmerkle: {}", f.message);
            ExitCode::from(f.code)
        }
    }
}
