//! Durable state files for the accumulator.
//!
//! The format is line-oriented text, LF line endings, one `key=value` field
//! per line in a fixed order:
//!
//! ```text
//! version=1
//! combiner_id=toy|sha256
//! height=<1..=32>
//! count=<deposits so far>
//! branch[0]=<value>            one line per level, 0..height-1
//! audit_count=<n>              audit block, present only in audit mode
//! audit[0]=<value>             n lines
//! checksum=<sha256 hex of every preceding byte>
//! ```
//!
//! Zero hashes are never stored; they are recomputed on load. Saves go
//! through a sibling temp file that is renamed over the target, so an
//! interrupted save leaves the previous file intact.

use std::fs::{self, File, OpenOptions};
use std::io::{self, Write};
use std::path::{Path, PathBuf};

use sha2::{Digest as _, Sha256};
use thiserror::Error;

use crate::contract::{ContractError, DepositContract, DepositVariant};
use crate::hash::{Combiner, CombinerId, NodeValue, Sha256Combiner, ToyCombiner, ValueParseError};

pub const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Error)]
pub enum PersistError {
    #[error("i/o error on {path}: {source}")]
    Io { path: PathBuf, source: io::Error },
    #[error("corrupt state file: {0}")]
    Corrupt(String),
    #[error("checksum mismatch: stored {stored}, computed {computed}")]
    Checksum { stored: String, computed: String },
    #[error("unsupported state file version {0}")]
    UnsupportedVersion(String),
    #[error(transparent)]
    Value(#[from] ValueParseError),
    #[error(transparent)]
    Contract(#[from] ContractError),
    #[error("{requested} deposits requested but only {remaining} slots remain")]
    Capacity { requested: usize, remaining: u64 },
    #[error("{0} already exists")]
    Exists(PathBuf),
    #[error("{0} is locked by another process (remove the lock file if stale)")]
    Locked(PathBuf),
}

impl PersistError {
    fn io(path: &Path, source: io::Error) -> Self {
        PersistError::Io {
            path: path.to_path_buf(),
            source,
        }
    }
}

/// A contract over either concrete combiner.
#[derive(Debug, Clone)]
pub enum AnyContract {
    Toy(DepositContract<ToyCombiner>),
    Sha256(DepositContract<Sha256Combiner>),
}

macro_rules! dispatch {
    ($self:expr, $c:ident => $body:expr) => {
        match $self {
            AnyContract::Toy($c) => $body,
            AnyContract::Sha256($c) => $body,
        }
    };
}

fn parse_all<V: NodeValue>(values: &[String]) -> Result<Vec<V>, ValueParseError> {
    values.iter().map(|v| V::parse_value(v)).collect()
}

fn deposit_all<C: Combiner>(
    contract: &mut DepositContract<C>,
    values: &[String],
    variant: DepositVariant,
) -> Result<Vec<String>, PersistError> {
    let parsed = parse_all::<C::Value>(values)?;
    if parsed.len() as u64 > contract.remaining() {
        return Err(PersistError::Capacity {
            requested: parsed.len(),
            remaining: contract.remaining(),
        });
    }
    let mut roots = Vec::with_capacity(parsed.len());
    for v in parsed {
        contract.deposit(v, variant)?;
        roots.push(contract.get_deposit_root().to_string());
    }
    Ok(roots)
}

impl AnyContract {
    pub fn new(id: CombinerId, height: u32, audit: bool) -> Result<Self, ContractError> {
        Ok(match id {
            CombinerId::Toy => AnyContract::Toy(DepositContract::new(height, ToyCombiner, audit)?),
            CombinerId::Sha256 => {
                AnyContract::Sha256(DepositContract::new(height, Sha256Combiner, audit)?)
            }
        })
    }

    pub fn combiner_id(&self) -> CombinerId {
        match self {
            AnyContract::Toy(_) => CombinerId::Toy,
            AnyContract::Sha256(_) => CombinerId::Sha256,
        }
    }

    pub fn height(&self) -> u32 {
        dispatch!(self, c => c.height())
    }

    pub fn count(&self) -> u64 {
        dispatch!(self, c => c.count())
    }

    pub fn remaining(&self) -> u64 {
        dispatch!(self, c => c.remaining())
    }

    pub fn is_audited(&self) -> bool {
        dispatch!(self, c => c.audit_values().is_some())
    }

    pub fn root_string(&self) -> String {
        dispatch!(self, c => c.get_deposit_root().to_string())
    }

    /// Parses every value, checks capacity, then deposits them in order.
    /// Returns the root after each deposit. Nothing is applied if any value
    /// fails to parse or the batch does not fit.
    pub fn deposit_batch(
        &mut self,
        values: &[String],
        variant: DepositVariant,
    ) -> Result<Vec<String>, PersistError> {
        dispatch!(self, c => deposit_all(c, values, variant))
    }

    pub fn encode(&self) -> String {
        dispatch!(self, c => encode_contract(self.combiner_id(), c))
    }
}

fn encode_contract<C: Combiner>(id: CombinerId, c: &DepositContract<C>) -> String {
    let mut out = String::new();
    out.push_str(&format!("version={FORMAT_VERSION}\n"));
    out.push_str(&format!("combiner_id={id}\n"));
    out.push_str(&format!("height={}\n", c.height()));
    out.push_str(&format!("count={}\n", c.count()));
    for (i, v) in c.branch().iter().enumerate() {
        out.push_str(&format!("branch[{i}]={v}\n"));
    }
    if let Some(values) = c.audit_values() {
        out.push_str(&format!("audit_count={}\n", values.len()));
        for (i, v) in values.iter().enumerate() {
            out.push_str(&format!("audit[{i}]={v}\n"));
        }
    }
    let sum = checksum(out.as_bytes());
    out.push_str(&format!("checksum={sum}\n"));
    out
}

fn checksum(bytes: &[u8]) -> String {
    hex::encode(Sha256::digest(bytes))
}

struct Fields<'a> {
    lines: std::iter::Peekable<std::str::Lines<'a>>,
}

impl<'a> Fields<'a> {
    fn next_field(&mut self, key: &str) -> Result<&'a str, PersistError> {
        let line = self
            .lines
            .next()
            .ok_or_else(|| PersistError::Corrupt(format!("missing field {key}")))?;
        line.strip_prefix(key)
            .and_then(|rest| rest.strip_prefix('='))
            .ok_or_else(|| PersistError::Corrupt(format!("expected field {key}, found {line:?}")))
    }

    fn next_number<T: std::str::FromStr>(&mut self, key: &str) -> Result<T, PersistError> {
        let raw = self.next_field(key)?;
        raw.parse()
            .map_err(|_| PersistError::Corrupt(format!("field {key} is not a number: {raw:?}")))
    }

    fn peek_is(&mut self, key: &str) -> bool {
        self.lines
            .peek()
            .is_some_and(|l| l.strip_prefix(key).is_some_and(|r| r.starts_with('=')))
    }
}

fn decode_values<V: NodeValue>(
    fields: &mut Fields<'_>,
    key: &str,
    n: u64,
) -> Result<Vec<V>, PersistError> {
    (0..n)
        .map(|i| {
            let raw = fields.next_field(&format!("{key}[{i}]"))?;
            V::parse_value(raw).map_err(|e| PersistError::Corrupt(format!("{key}[{i}]: {e}")))
        })
        .collect()
}

fn decode_contract<C: Combiner>(
    fields: &mut Fields<'_>,
    combiner: C,
    height: u32,
    count: u64,
) -> Result<DepositContract<C>, PersistError> {
    if height == 0 || height > crate::contract::MAX_HEIGHT {
        return Err(PersistError::Corrupt(format!(
            "height {height} out of range"
        )));
    }
    let branch = decode_values::<C::Value>(fields, "branch", height as u64)?;
    let audit = if fields.peek_is("audit_count") {
        let n: u64 = fields.next_number("audit_count")?;
        if n != count {
            return Err(PersistError::Corrupt(format!(
                "audit_count {n} differs from count {count}"
            )));
        }
        Some(decode_values::<C::Value>(fields, "audit", n)?)
    } else {
        None
    };
    DepositContract::from_parts(height, count, branch, audit, combiner)
        .map_err(|e| PersistError::Corrupt(e.to_string()))
}

/// Parses and verifies a state file.
pub fn decode(text: &str) -> Result<AnyContract, PersistError> {
    if !text.ends_with('\n') {
        return Err(PersistError::Corrupt("missing trailing newline".into()));
    }
    let body_end = text[..text.len() - 1]
        .rfind('\n')
        .map(|i| i + 1)
        .ok_or_else(|| PersistError::Corrupt("file too short".into()))?;
    let (body, last) = text.split_at(body_end);
    let stored = last
        .trim_end_matches('\n')
        .strip_prefix("checksum=")
        .ok_or_else(|| PersistError::Corrupt("last line is not the checksum".into()))?;
    let computed = checksum(body.as_bytes());
    if stored != computed {
        return Err(PersistError::Checksum {
            stored: stored.to_string(),
            computed,
        });
    }

    let mut fields = Fields {
        lines: body.lines().peekable(),
    };
    let version = fields.next_field("version")?;
    if version != FORMAT_VERSION.to_string() {
        return Err(PersistError::UnsupportedVersion(version.to_string()));
    }
    let id: CombinerId = fields
        .next_field("combiner_id")?
        .parse()
        .map_err(PersistError::Corrupt)?;
    let height: u32 = fields.next_number("height")?;
    let count: u64 = fields.next_number("count")?;
    let contract = match id {
        CombinerId::Toy => {
            AnyContract::Toy(decode_contract(&mut fields, ToyCombiner, height, count)?)
        }
        CombinerId::Sha256 => {
            AnyContract::Sha256(decode_contract(&mut fields, Sha256Combiner, height, count)?)
        }
    };
    if let Some(extra) = fields.lines.next() {
        return Err(PersistError::Corrupt(format!("unexpected line {extra:?}")));
    }
    Ok(contract)
}

pub fn load(path: &Path) -> Result<AnyContract, PersistError> {
    let text = fs::read_to_string(path).map_err(|e| PersistError::io(path, e))?;
    decode(&text)
}

pub fn temp_path(path: &Path) -> PathBuf {
    let mut name = path.file_name().unwrap_or_default().to_os_string();
    name.push(".tmp");
    path.with_file_name(name)
}

/// First half of an atomic save: writes and syncs the temp file.
pub fn write_temp(path: &Path, contents: &str) -> Result<PathBuf, PersistError> {
    let tmp = temp_path(path);
    let mut f = File::create(&tmp).map_err(|e| PersistError::io(&tmp, e))?;
    f.write_all(contents.as_bytes())
        .map_err(|e| PersistError::io(&tmp, e))?;
    f.sync_all().map_err(|e| PersistError::io(&tmp, e))?;
    Ok(tmp)
}

/// Second half of an atomic save: renames the temp file over the target.
pub fn commit(tmp: &Path, path: &Path) -> Result<(), PersistError> {
    fs::rename(tmp, path).map_err(|e| PersistError::io(path, e))
}

pub fn save(path: &Path, contract: &AnyContract) -> Result<(), PersistError> {
    let tmp = write_temp(path, &contract.encode())?;
    commit(&tmp, path)
}

/// Advisory lock held as `<state>.lock` for the lifetime of the guard.
#[derive(Debug)]
pub struct StateLock {
    path: PathBuf,
}

impl StateLock {
    pub fn acquire(state: &Path) -> Result<Self, PersistError> {
        let mut name = state.file_name().unwrap_or_default().to_os_string();
        name.push(".lock");
        let path = state.with_file_name(name);
        match OpenOptions::new().write(true).create_new(true).open(&path) {
            Ok(mut f) => {
                let _ = writeln!(f, "{}", std::process::id());
                Ok(StateLock { path })
            }
            Err(e) if e.kind() == io::ErrorKind::AlreadyExists => Err(PersistError::Locked(path)),
            Err(e) => Err(PersistError::io(&path, e)),
        }
    }

    pub fn path(&self) -> &Path {
        &self.path
    }
}

impl Drop for StateLock {
    fn drop(&mut self) {
        let _ = fs::remove_file(&self.path);
    }
}
