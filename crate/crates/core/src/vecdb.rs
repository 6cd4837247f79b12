//! The key database and its oracle synthesis.
//!
//! Every stored key and every query key becomes one controlled-S gate
//! (a key phase of π/2). A key that is both stored and queried collects
//! `i·i = −1`, which is the only sign flip the diffusion step can amplify.

use std::collections::HashSet;
use std::f64::consts::{FRAC_PI_2, PI};

use serde::{Deserialize, Serialize};

use crate::circuit::{key_phase, Circuit};
use crate::engine::Verdict;
use crate::error::{Error, Result};
use crate::key::{BasisKey, MAX_KEY_WIDTH};

/// Largest number of distinct CZ-coded keys that diffusion can still amplify
/// in an `n`-qubit register: `2^(n−1) − 1`.
pub fn max_definitive_solutions(n_qubits: usize) -> u64 {
    assert!(
        (1..=MAX_KEY_WIDTH).contains(&n_qubits),
        "register width must be in 1..={MAX_KEY_WIDTH}"
    );
    (1u64 << (n_qubits - 1)) - 1
}

/// Database size that, together with one matching query, reaches the
/// `N_sol + 2` ideal: `2^(n−1)` entries.
pub fn ideal_database_size(n_qubits: usize) -> usize {
    max_definitive_solutions(n_qubits) as usize + 1
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct Entry {
    pub key: BasisKey,
    #[serde(
        default,
        rename = "padding",
        skip_serializing_if = "std::ops::Not::not"
    )]
    pub is_padding: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub label: Option<String>,
}

impl Entry {
    pub fn new(key: BasisKey) -> Self {
        Self {
            key,
            is_padding: false,
            label: None,
        }
    }

    pub fn padding(key: BasisKey) -> Self {
        Self {
            key,
            is_padding: true,
            label: None,
        }
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = Some(label.into());
        self
    }
}

/// Ordered set of unique keys of one register width.
#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct Database {
    #[serde(rename = "qubits")]
    n_qubits: usize,
    entries: Vec<Entry>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawDatabase {
    qubits: usize,
    #[serde(default)]
    entries: Vec<Entry>,
}

impl Database {
    pub fn new(n_qubits: usize) -> Result<Self> {
        if n_qubits == 0 || n_qubits > MAX_KEY_WIDTH {
            return Err(Error::InvalidArgument(format!(
                "database width must be in 1..={MAX_KEY_WIDTH}, got {n_qubits}"
            )));
        }
        Ok(Self {
            n_qubits,
            entries: Vec::new(),
        })
    }

    pub fn from_entries(n_qubits: usize, entries: impl IntoIterator<Item = Entry>) -> Result<Self> {
        let mut db = Self::new(n_qubits)?;
        for e in entries {
            db.push(e)?;
        }
        Ok(db)
    }

    /// Builds a database of plain entries from MSB-first bit strings.
    pub fn from_bits<S: AsRef<str>>(n_qubits: usize, keys: &[S]) -> Result<Self> {
        let mut db = Self::new(n_qubits)?;
        for k in keys {
            db.push(Entry::new(BasisKey::parse_with_width(
                k.as_ref(),
                n_qubits,
            )?))?;
        }
        Ok(db)
    }

    pub fn push(&mut self, entry: Entry) -> Result<()> {
        entry.key.expect_width(self.n_qubits)?;
        if self.contains(&entry.key) {
            return Err(Error::DuplicateKey(entry.key.bits()));
        }
        self.entries.push(entry);
        Ok(())
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn entries(&self) -> &[Entry] {
        &self.entries
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn keys(&self) -> impl Iterator<Item = &BasisKey> {
        self.entries.iter().map(|e| &e.key)
    }

    pub fn contains(&self, key: &BasisKey) -> bool {
        self.entries.iter().any(|e| &e.key == key)
    }

    pub fn is_padding_key(&self, key: &BasisKey) -> bool {
        self.entries.iter().any(|e| &e.key == key && e.is_padding)
    }

    pub fn padding_count(&self) -> usize {
        self.entries.iter().filter(|e| e.is_padding).count()
    }

    /// Parses the JSON database format, validating widths and uniqueness.
    pub fn from_json(text: &str) -> Result<Self> {
        let raw: RawDatabase = serde_json::from_str(text)
            .map_err(|e| Error::InvalidArgument(format!("malformed database JSON: {e}")))?;
        Self::from_entries(raw.qubits, raw.entries)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("database serializes")
    }
}

/// Non-empty list of distinct query keys.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QuerySet {
    keys: Vec<BasisKey>,
}

impl QuerySet {
    pub fn new(keys: Vec<BasisKey>) -> Result<Self> {
        let first = keys
            .first()
            .ok_or_else(|| Error::InvalidArgument("query set must not be empty".into()))?;
        let width = first.width();
        let mut seen = HashSet::new();
        for k in &keys {
            k.expect_width(width)?;
            if !seen.insert(*k) {
                return Err(Error::DuplicateKey(k.bits()));
            }
        }
        Ok(Self { keys })
    }

    pub fn from_bits<S: AsRef<str>>(keys: &[S]) -> Result<Self> {
        Self::new(
            keys.iter()
                .map(|k| BasisKey::parse(k.as_ref()))
                .collect::<Result<_>>()?,
        )
    }

    pub fn single(key: BasisKey) -> Self {
        Self { keys: vec![key] }
    }

    pub fn keys(&self) -> &[BasisKey] {
        &self.keys
    }

    pub fn width(&self) -> usize {
        self.keys[0].width()
    }

    pub fn contains(&self, key: &BasisKey) -> bool {
        self.keys.contains(key)
    }
}

/// One controlled-S per database entry followed by one per query key.
pub fn build_cs_oracle(db: &Database, queries: &QuerySet) -> Result<Circuit> {
    if queries.width() != db.n_qubits() {
        return Err(Error::WidthMismatch {
            expected: db.n_qubits(),
            found: queries.width(),
        });
    }
    Circuit::from_ops(
        db.n_qubits(),
        db.keys()
            .chain(queries.keys())
            .map(|k| key_phase(*k, FRAC_PI_2)),
    )
}

/// One controlled-Z per key: the textbook marking oracle.
pub fn build_cz_oracle(n_qubits: usize, keys: &[BasisKey]) -> Result<Circuit> {
    let mut seen = HashSet::new();
    for k in keys {
        k.expect_width(n_qubits)?;
        if !seen.insert(*k) {
            return Err(Error::DuplicateKey(k.bits()));
        }
    }
    Circuit::from_ops(n_qubits, keys.iter().map(|k| key_phase(*k, PI)))
}

/// Pads to `2^(n−1)` entries (see [`pad_database_to`]).
pub fn pad_database(db: &Database) -> Database {
    pad_database_to(db, ideal_database_size(db.n_qubits()))
}

/// Appends padding entries with the smallest unused key values, ascending,
/// until the database holds `target` entries. Larger databases are returned
/// unchanged.
pub fn pad_database_to(db: &Database, target: usize) -> Database {
    let mut padded = db.clone();
    let capacity = 1u64 << db.n_qubits();
    let mut candidate = 0u64;
    while padded.len() < target && candidate < capacity {
        let key = BasisKey::new(candidate, db.n_qubits()).expect("candidate fits register");
        if !padded.contains(&key) {
            padded.entries.push(Entry::padding(key));
        }
        candidate += 1;
    }
    padded
}

/// More entries than `N_sol + 1`.
pub fn is_overprovisioned(db: &Database) -> bool {
    db.len() as u64 > max_definitive_solutions(db.n_qubits()) + 1
}

/// Verdicts left after removing those that land on padding entries.
#[derive(Debug, Clone, PartialEq)]
pub struct FilteredVerdicts {
    pub kept: Vec<Verdict>,
    pub excluded_padding: Vec<BasisKey>,
}

/// Drops verdicts whose key is a padding entry, recording them separately.
pub fn strip_padding_hits(verdicts: &[Verdict], db: &Database) -> FilteredVerdicts {
    let (excluded, kept): (Vec<Verdict>, Vec<Verdict>) = verdicts
        .iter()
        .cloned()
        .partition(|v| db.is_padding_key(&v.key));
    FilteredVerdicts {
        kept,
        excluded_padding: excluded.into_iter().map(|v| v.key).collect(),
    }
}
