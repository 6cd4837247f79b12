//! Statevector simulation of controlled-phase "vector database" oracles
//! searched with Grover amplitude amplification.
//!
//! Stored keys and query keys are each encoded as a controlled-S gate on the
//! basis state they name. A key present in both picks up `i·i = −1`, the
//! sign flip the diffusion step amplifies; every other encoded state only
//! picks up `i` and stays near the background.
//!
//! ```
//! use qvdb_core::{grover_search, Database, QuerySet, SearchConfig};
//!
//! let db = Database::from_bits(3, &["111", "101", "110"]).unwrap();
//! let query = QuerySet::from_bits(&["101"]).unwrap();
//! let report = grover_search(&db, &query, &SearchConfig::default()).unwrap();
//! assert!((report.probability("101") - 17.0 / 32.0).abs() < 1e-12);
//! ```

pub mod circuit;
pub mod engine;
pub mod error;
pub mod key;
pub mod qasm;
pub mod qstate;
pub mod report;
pub mod vecdb;
pub mod verify;

pub use circuit::{
    build_diffusion, decompose_mc_phase, key_phase, lower_key_phase, Circuit, ControlSpec, Gate,
    GateOp, Polarity,
};
pub use engine::{
    build_search_circuit, classify, grover_search, grover_search_cz, optimal_iterations,
    run_scenario, Presence, Scenario, ScenarioSetup, SearchConfig, SearchReport, Verdict,
};
pub use error::{Error, Result};
pub use key::BasisKey;
pub use qasm::export_qasm;
pub use qstate::{
    circuit_unitary, init_uniform, reflect_about_mean, sample_counts,
    state_distance_up_to_global_phase, ProbabilityDistribution, ShotCounts, StateVector,
};
pub use vecdb::{
    build_cs_oracle, build_cz_oracle, is_overprovisioned, max_definitive_solutions, pad_database,
    pad_database_to, strip_padding_hits, Database, Entry, QuerySet,
};
