//! Grover search over controlled-S databases: uniform preparation, oracle,
//! diffusion, exact probabilities, optional shot sampling and a per-query
//! presence decision.

use std::fmt;
use std::str::FromStr;

use crate::circuit::{build_diffusion, Circuit, Gate};
use crate::error::{Error, Result};
use crate::key::BasisKey;
use crate::qstate::{sample_counts, ProbabilityDistribution, ShotCounts, StateVector};
use crate::vecdb::{
    build_cs_oracle, build_cz_oracle, is_overprovisioned, pad_database, Database, QuerySet,
};

pub const DEFAULT_THRESHOLD: f64 = 2.0;
pub const MAX_ITERATIONS: u32 = 100_000;
pub const MAX_SHOTS: u64 = 100_000_000;
/// Shot count used for the sampled hardware-run analogs.
pub const HARDWARE_SHOTS: u64 = 4096;

#[derive(Debug, Clone, PartialEq)]
pub struct SearchConfig {
    /// Oracle + diffusion rounds. Rounds beyond the first keep rotating the
    /// unmatched database states by `i` each time, so they are not plain
    /// Grover iterations.
    pub iterations: u32,
    pub shots: Option<u64>,
    pub seed: u64,
    /// Presence ratio `τ > 1`.
    pub threshold: f64,
}

impl Default for SearchConfig {
    fn default() -> Self {
        Self {
            iterations: 1,
            shots: None,
            seed: 0,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl SearchConfig {
    pub fn validate(&self) -> Result<()> {
        if self.iterations == 0 || self.iterations > MAX_ITERATIONS {
            return Err(Error::InvalidArgument(format!(
                "iterations must be in 1..={MAX_ITERATIONS}, got {}",
                self.iterations
            )));
        }
        if let Some(shots) = self.shots {
            if shots == 0 || shots > MAX_SHOTS {
                return Err(Error::InvalidArgument(format!(
                    "shots must be in 1..={MAX_SHOTS}, got {shots}"
                )));
            }
        }
        if !(self.threshold.is_finite() && self.threshold > 1.0) {
            return Err(Error::InvalidArgument(format!(
                "presence threshold must be > 1, got {}",
                self.threshold
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Presence {
    Present,
    Absent,
}

impl Presence {
    pub fn as_str(&self) -> &'static str {
        match self {
            Presence::Present => "present",
            Presence::Absent => "absent",
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Verdict {
    pub key: BasisKey,
    pub presence: Presence,
    /// Probability (or sampled frequency) the decision was made on.
    pub probability: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OracleKind {
    /// Controlled-S database plus controlled-S queries.
    ControlledS,
    /// Controlled-Z marking of every coded key.
    ControlledZ,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchMetadata {
    pub oracle: OracleKind,
    pub db_size: usize,
    pub padding_count: usize,
    pub overprovisioned: bool,
    pub iterations: u32,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchReport {
    pub distribution: ProbabilityDistribution,
    pub counts: Option<ShotCounts>,
    pub verdicts: Vec<Verdict>,
    pub metadata: SearchMetadata,
}

impl SearchReport {
    pub fn n_qubits(&self) -> usize {
        self.distribution.n_qubits()
    }

    pub fn probability(&self, key: &str) -> f64 {
        let k = BasisKey::parse_with_width(key, self.n_qubits()).expect("valid key");
        self.distribution.get(k.index())
    }

    pub fn verdict(&self, key: &str) -> Option<&Verdict> {
        self.verdicts.iter().find(|v| v.key.bits() == key)
    }
}

/// Decides presence per query: `q` is present iff
/// `p(q) ≥ τ · max{p(k) : k not a query}`.
pub fn classify(
    dist: &ProbabilityDistribution,
    queries: &QuerySet,
    threshold: f64,
) -> Result<Vec<Verdict>> {
    if !(threshold.is_finite() && threshold > 1.0) {
        return Err(Error::InvalidArgument(format!(
            "presence threshold must be > 1, got {threshold}"
        )));
    }
    if queries.width() != dist.n_qubits() {
        return Err(Error::WidthMismatch {
            expected: dist.n_qubits(),
            found: queries.width(),
        });
    }
    let background = dist
        .as_slice()
        .iter()
        .enumerate()
        .filter(|(k, _)| !queries.keys().iter().any(|q| q.index() == *k))
        .map(|(_, p)| *p)
        .fold(0.0, f64::max);
    Ok(queries
        .keys()
        .iter()
        .map(|q| {
            let p = dist.get(q.index());
            Verdict {
                key: *q,
                presence: if p >= threshold * background {
                    Presence::Present
                } else {
                    Presence::Absent
                },
                probability: p,
            }
        })
        .collect())
}

/// `max(1, ⌊(π/4)·√(2^n / M)⌋)`.
pub fn optimal_iterations(n_qubits: usize, solutions: u64) -> Result<u32> {
    if n_qubits == 0 || n_qubits > 63 {
        return Err(Error::InvalidArgument(format!(
            "register width must be in 1..=63, got {n_qubits}"
        )));
    }
    let space = 1u64 << n_qubits;
    if solutions == 0 || solutions > space {
        return Err(Error::InvalidArgument(format!(
            "expected solutions must be in 1..={space}, got {solutions}"
        )));
    }
    let k = (std::f64::consts::FRAC_PI_4 * (space as f64 / solutions as f64).sqrt()).floor();
    Ok((k as u32).max(1))
}

/// The complete gate-level search circuit from `|0…0⟩`: Hadamard layer,
/// then `iterations` rounds of oracle and diffusion.
pub fn build_search_circuit(oracle: &Circuit, iterations: u32) -> Result<Circuit> {
    let n = oracle.n_qubits();
    let diffusion = build_diffusion(n)?;
    let mut c = Circuit::new(n)?;
    c.push_layer(Gate::H);
    for _ in 0..iterations {
        c.extend(oracle)?;
        c.extend(&diffusion)?;
    }
    Ok(c)
}

fn amplify(
    oracle: &Circuit,
    config: &SearchConfig,
) -> Result<(ProbabilityDistribution, Option<ShotCounts>)> {
    config.validate()?;
    if oracle.n_qubits() < 2 {
        return Err(Error::InvalidArgument(
            "search needs a register of at least 2 qubits".into(),
        ));
    }
    let mut state = StateVector::uniform(oracle.n_qubits())?;
    for _ in 0..config.iterations {
        state.apply_circuit(oracle)?;
        state.reflect_about_mean();
    }
    let dist = state.probabilities();
    let counts = config
        .shots
        .map(|shots| sample_counts(&dist, shots, config.seed))
        .transpose()?;
    Ok((dist, counts))
}

/// Runs the controlled-S search for `queries` against `db`.
///
/// Verdicts use sampled frequencies when `config.shots` is set, exact
/// probabilities otherwise.
pub fn grover_search(
    db: &Database,
    queries: &QuerySet,
    config: &SearchConfig,
) -> Result<SearchReport> {
    let oracle = build_cs_oracle(db, queries)?;
    let (distribution, counts) = amplify(&oracle, config)?;
    let verdicts = match &counts {
        Some(c) => classify(
            &ProbabilityDistribution::from_counts(c),
            queries,
            config.threshold,
        )?,
        None => classify(&distribution, queries, config.threshold)?,
    };
    Ok(SearchReport {
        distribution,
        counts,
        verdicts,
        metadata: SearchMetadata {
            oracle: OracleKind::ControlledS,
            db_size: db.len(),
            padding_count: db.padding_count(),
            overprovisioned: is_overprovisioned(db),
            iterations: config.iterations,
        },
    })
}

/// Textbook Grover with every key CZ-marked; no query semantics.
pub fn grover_search_cz(
    n_qubits: usize,
    keys: &[BasisKey],
    config: &SearchConfig,
) -> Result<SearchReport> {
    let oracle = build_cz_oracle(n_qubits, keys)?;
    let (distribution, counts) = amplify(&oracle, config)?;
    Ok(SearchReport {
        distribution,
        counts,
        verdicts: Vec::new(),
        metadata: SearchMetadata {
            oracle: OracleKind::ControlledZ,
            db_size: keys.len(),
            padding_count: 0,
            overprovisioned: keys.len() as u64
                > crate::vecdb::max_definitive_solutions(n_qubits) + 1,
            iterations: config.iterations,
        },
    })
}

/// Preset reproductions of the published circuit figures.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scenario {
    Fig2,
    Fig3,
    Fig4,
    Fig5,
    Fig6,
    Fig7,
    Fig8,
    Fig9,
    Fig10,
    Fig11,
}

/// What a scenario runs.
#[derive(Debug, Clone, PartialEq)]
pub enum ScenarioSetup {
    ControlledZ {
        n_qubits: usize,
        keys: Vec<BasisKey>,
    },
    ControlledS {
        db: Database,
        queries: QuerySet,
    },
}

impl ScenarioSetup {
    pub fn n_qubits(&self) -> usize {
        match self {
            ScenarioSetup::ControlledZ { n_qubits, .. } => *n_qubits,
            ScenarioSetup::ControlledS { db, .. } => db.n_qubits(),
        }
    }

    pub fn oracle(&self) -> Result<Circuit> {
        match self {
            ScenarioSetup::ControlledZ { n_qubits, keys } => build_cz_oracle(*n_qubits, keys),
            ScenarioSetup::ControlledS { db, queries } => build_cs_oracle(db, queries),
        }
    }
}

const FIG2_DB: [&str; 3] = ["111", "101", "110"];
const OVERPROVISIONED_DB: [&str; 5] = ["111", "101", "110", "011", "001"];

impl Scenario {
    pub const ALL: [Scenario; 10] = [
        Scenario::Fig2,
        Scenario::Fig3,
        Scenario::Fig4,
        Scenario::Fig5,
        Scenario::Fig6,
        Scenario::Fig7,
        Scenario::Fig8,
        Scenario::Fig9,
        Scenario::Fig10,
        Scenario::Fig11,
    ];

    pub fn name(&self) -> &'static str {
        match self {
            Scenario::Fig2 => "fig2",
            Scenario::Fig3 => "fig3",
            Scenario::Fig4 => "fig4",
            Scenario::Fig5 => "fig5",
            Scenario::Fig6 => "fig6",
            Scenario::Fig7 => "fig7",
            Scenario::Fig8 => "fig8",
            Scenario::Fig9 => "fig9",
            Scenario::Fig10 => "fig10",
            Scenario::Fig11 => "fig11",
        }
    }

    pub fn description(&self) -> &'static str {
        match self {
            Scenario::Fig2 => "CZ oracle coding N_sol = 3 states {111, 101, 110}",
            Scenario::Fig3 => "CZ oracle coding N_sol + 1 = 4 states {111, 101, 110, 100}",
            Scenario::Fig4 => "CS database {111, 101, 110}, existing query 101",
            Scenario::Fig5 => "CS database {111, 101, 110}, missing query 100",
            Scenario::Fig6 => "CS database {111, 101, 110}, two queries {101, 110}",
            Scenario::Fig7 => "CS database padded to {111, 101, 110, 000}, query 101",
            Scenario::Fig8 => {
                "overprovisioned CS database {111, 101, 110, 011, 001}, existing query 101"
            }
            Scenario::Fig9 => {
                "overprovisioned CS database {111, 101, 110, 011, 001}, missing query 010"
            }
            Scenario::Fig10 => "fig4 with 4096-shot noiseless sampling (hardware-run analog)",
            Scenario::Fig11 => "fig5 with 4096-shot noiseless sampling (hardware-run analog)",
        }
    }

    /// Shot count applied when the caller does not override it.
    pub fn default_shots(&self) -> Option<u64> {
        match self {
            Scenario::Fig10 | Scenario::Fig11 => Some(HARDWARE_SHOTS),
            _ => None,
        }
    }

    pub fn is_sampled_analog(&self) -> bool {
        matches!(self, Scenario::Fig10 | Scenario::Fig11)
    }

    pub fn setup(&self) -> ScenarioSetup {
        let keys = |bits: &[&str]| -> Vec<BasisKey> {
            bits.iter()
                .map(|b| BasisKey::parse(b).expect("preset key"))
                .collect()
        };
        let cs = |db: Database, queries: &[&str]| ScenarioSetup::ControlledS {
            db,
            queries: QuerySet::from_bits(queries).expect("preset queries"),
        };
        let fig2_db = || Database::from_bits(3, &FIG2_DB).expect("preset database");
        match self {
            Scenario::Fig2 => ScenarioSetup::ControlledZ {
                n_qubits: 3,
                keys: keys(&FIG2_DB),
            },
            Scenario::Fig3 => ScenarioSetup::ControlledZ {
                n_qubits: 3,
                keys: keys(&["111", "101", "110", "100"]),
            },
            Scenario::Fig4 | Scenario::Fig10 => cs(fig2_db(), &["101"]),
            Scenario::Fig5 | Scenario::Fig11 => cs(fig2_db(), &["100"]),
            Scenario::Fig6 => cs(fig2_db(), &["101", "110"]),
            Scenario::Fig7 => cs(pad_database(&fig2_db()), &["101"]),
            Scenario::Fig8 => cs(
                Database::from_bits(3, &OVERPROVISIONED_DB).expect("preset database"),
                &["101"],
            ),
            Scenario::Fig9 => cs(
                Database::from_bits(3, &OVERPROVISIONED_DB).expect("preset database"),
                &["010"],
            ),
        }
    }
}

impl fmt::Display for Scenario {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Scenario {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Scenario::ALL
            .into_iter()
            .find(|sc| sc.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::UnknownScenario(s.to_string()))
    }
}

/// Runs a preset with one oracle+diffusion round. `shots` overrides the
/// preset's default sampling.
pub fn run_scenario(scenario: Scenario, shots: Option<u64>, seed: u64) -> Result<SearchReport> {
    let config = SearchConfig {
        shots: shots.or(scenario.default_shots()),
        seed,
        ..SearchConfig::default()
    };
    match scenario.setup() {
        ScenarioSetup::ControlledZ { n_qubits, keys } => grover_search_cz(n_qubits, &keys, &config),
        ScenarioSetup::ControlledS { db, queries } => grover_search(&db, &queries, &config),
    }
}
