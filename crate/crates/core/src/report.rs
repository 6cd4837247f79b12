//! JSON and ASCII-histogram views of a [`SearchReport`].

use std::collections::BTreeMap;
use std::fmt::Write;

use serde::{Deserialize, Serialize};

use crate::engine::{OracleKind, Presence, SearchConfig, SearchReport};
use crate::key::bit_label;
use crate::vecdb::{strip_padding_hits, Database};

/// Width of the longest histogram bar.
pub const HISTOGRAM_COLUMNS: usize = 40;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum VerdictJson {
    Present,
    Absent,
}

impl From<Presence> for VerdictJson {
    fn from(p: Presence) -> Self {
        match p {
            Presence::Present => VerdictJson::Present,
            Presence::Absent => VerdictJson::Absent,
        }
    }
}

/// Serialized search outcome. Map keys are MSB-first bit strings, which for
/// a fixed width sort in basis-index order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ReportJson {
    pub qubits: usize,
    pub oracle: String,
    pub iterations: u32,
    pub shots: Option<u64>,
    pub seed: u64,
    pub threshold: f64,
    pub db_size: usize,
    pub padding_count: usize,
    pub probabilities: BTreeMap<String, f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub counts: Option<BTreeMap<String, u64>>,
    pub verdicts: BTreeMap<String, VerdictJson>,
    pub padding_excluded: Vec<String>,
    pub overprovisioned: bool,
}

impl ReportJson {
    /// Builds the JSON view. When `db` is given, verdicts that land on its
    /// padding entries are moved to `padding_excluded`.
    pub fn from_report(
        report: &SearchReport,
        config: &SearchConfig,
        db: Option<&Database>,
    ) -> Self {
        let n = report.n_qubits();
        let probabilities = report
            .distribution
            .as_slice()
            .iter()
            .enumerate()
            .map(|(k, p)| (bit_label(k, n), *p))
            .collect();
        let counts = report.counts.as_ref().map(|c| {
            c.counts()
                .iter()
                .enumerate()
                .map(|(k, n_hits)| (bit_label(k, n), *n_hits))
                .collect()
        });
        let (kept, excluded) = match db {
            Some(db) => {
                let filtered = strip_padding_hits(&report.verdicts, db);
                (filtered.kept, filtered.excluded_padding)
            }
            None => (report.verdicts.clone(), Vec::new()),
        };
        Self {
            qubits: n,
            oracle: match report.metadata.oracle {
                OracleKind::ControlledS => "cs".into(),
                OracleKind::ControlledZ => "cz".into(),
            },
            iterations: report.metadata.iterations,
            shots: report.counts.as_ref().map(|c| c.shots()),
            seed: config.seed,
            threshold: config.threshold,
            db_size: report.metadata.db_size,
            padding_count: report.metadata.padding_count,
            probabilities,
            counts,
            verdicts: kept
                .iter()
                .map(|v| (v.key.bits(), v.presence.into()))
                .collect(),
            padding_excluded: excluded.iter().map(|k| k.bits()).collect(),
            overprovisioned: report.metadata.overprovisioned,
        }
    }
}

/// ASCII histogram, one row per basis state in ascending index order, bars
/// scaled so the largest bin spans [`HISTOGRAM_COLUMNS`].
pub fn render_histogram(report: &ReportJson) -> String {
    let (values, scale): (Vec<(String, f64, Option<u64>)>, f64) = match &report.counts {
        Some(counts) => {
            let shots = report.shots.unwrap_or(1).max(1) as f64;
            let rows = counts
                .iter()
                .map(|(k, c)| (k.clone(), *c as f64 / shots, Some(*c)))
                .collect::<Vec<_>>();
            let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            (rows, max)
        }
        None => {
            let rows = report
                .probabilities
                .iter()
                .map(|(k, p)| (k.clone(), *p, None))
                .collect::<Vec<_>>();
            let max = rows.iter().map(|r| r.1).fold(0.0, f64::max);
            (rows, max)
        }
    };

    let mut out = String::new();
    for (label, p, count) in &values {
        let width = if scale > 0.0 {
            ((p / scale) * HISTOGRAM_COLUMNS as f64).round() as usize
        } else {
            0
        };
        let bar = "#".repeat(width);
        let _ = write!(out, "{label} | {bar:<HISTOGRAM_COLUMNS$} {p:.5}");
        if let Some(c) = count {
            let _ = write!(out, " ({c})");
        }
        out.push('\n');
    }
    for (key, verdict) in &report.verdicts {
        let word = match verdict {
            VerdictJson::Present => "present",
            VerdictJson::Absent => "absent",
        };
        let _ = writeln!(out, "query {key}: {word}");
    }
    for key in &report.padding_excluded {
        let _ = writeln!(out, "query {key}: excluded (padding entry)");
    }
    if report.overprovisioned {
        out.push_str("database is overprovisioned\n");
    }
    out
}
