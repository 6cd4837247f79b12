//! `qvdb`: search, reproduce, export and verify controlled-S vector-database
//! circuits from the command line.

mod record;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use qvdb_core::engine::{build_search_circuit, Scenario};
use qvdb_core::report::{render_histogram, ReportJson};
use qvdb_core::{
    export_qasm, grover_search, grover_search_cz, pad_database, pad_database_to, verify, BasisKey,
    Database, QuerySet, ScenarioSetup, SearchConfig,
};

use crate::record::RunRecord;

#[derive(Parser, Debug)]
#[command(
    name = "qvdb",
    version,
    about = "Controlled-S quantum vector database simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Json,
    Hist,
}

#[derive(clap::Args, Debug)]
struct SearchArgs {
    /// Database JSON file
    #[arg(long)]
    db: PathBuf,

    /// Query key(s), MSB-first bit strings such as 101
    #[arg(required = true)]
    queries: Vec<String>,

    #[arg(long, default_value_t = 1)]
    iterations: u32,

    /// Sample this many measurement shots
    #[arg(long)]
    shots: Option<u64>,

    #[arg(long, default_value_t = 0)]
    seed: u64,

    /// Presence ratio against the strongest non-query state
    #[arg(long, default_value_t = qvdb_core::engine::DEFAULT_THRESHOLD)]
    threshold: f64,

    /// Pad the database with filler keys before searching
    #[arg(long)]
    pad: bool,

    /// Padding target size (default 2^(n-1))
    #[arg(long, requires = "pad")]
    pad_size: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Search a database for one or more keys
    Search {
        #[command(flatten)]
        args: SearchArgs,

        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Run a preset figure reproduction (fig2 .. fig11)
    Scenario {
        name: String,

        /// Override the preset's shot count
        #[arg(long)]
        shots: Option<u64>,

        #[arg(long, default_value_t = 0)]
        seed: u64,

        #[arg(long, value_enum, default_value_t = Format::Json)]
        format: Format,
    },
    /// Write the full search circuit as OpenQASM 2.0
    ExportQasm {
        #[command(flatten)]
        args: SearchArgs,

        /// Output file (standard output when absent)
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Run the brute-force equivalence suites
    Verify {
        /// Largest register width to test
        #[arg(long = "n", default_value_t = 4)]
        max_qubits: usize,

        #[arg(long, default_value_t = 50)]
        trials: usize,

        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Print the padded database as JSON
    Pad {
        #[arg(long)]
        db: PathBuf,

        /// Target size (default 2^(n-1))
        #[arg(long)]
        size: Option<usize>,
    },
}

/// Exit status with a message for standard error.
#[derive(Debug)]
enum Failure {
    Validation(String),
    Io(String),
}

impl From<qvdb_core::Error> for Failure {
    fn from(e: qvdb_core::Error) -> Self {
        Failure::Validation(e.to_string())
    }
}

type CmdResult = Result<(), Failure>;

fn main() -> ExitCode {
    let cli = Cli::parse();
    let argv: Vec<String> = std::env::args().skip(1).collect();
    let outcome = match cli.command {
        Command::Search { args, format } => cmd_search(&args, format, &argv),
        Command::Scenario {
            name,
            shots,
            seed,
            format,
        } => cmd_scenario(&name, shots, seed, format, &argv),
        Command::ExportQasm { args, out } => cmd_export_qasm(&args, out.as_deref()),
        Command::Verify {
            max_qubits,
            trials,
            seed,
        } => cmd_verify(max_qubits, trials, seed),
        Command::Pad { db, size } => cmd_pad(&db, size),
    };
    match outcome {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
        Err(Failure::Io(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(3)
        }
    }
}

fn load_database(path: &Path) -> Result<Database, Failure> {
    let text = fs::read_to_string(path)
        .map_err(|e| Failure::Io(format!("cannot read {}: {e}", path.display())))?;
    Database::from_json(&text).map_err(|e| Failure::Validation(format!("{}: {e}", path.display())))
}

fn prepare(args: &SearchArgs) -> Result<(Database, QuerySet, SearchConfig), Failure> {
    let mut db = load_database(&args.db)?;
    if args.pad {
        db = match args.pad_size {
            Some(size) => pad_database_to(&db, size),
            None => pad_database(&db),
        };
    }
    let keys = args
        .queries
        .iter()
        .map(|q| BasisKey::parse_with_width(q, db.n_qubits()))
        .collect::<Result<Vec<_>, _>>()?;
    let queries = QuerySet::new(keys)?;
    let config = SearchConfig {
        iterations: args.iterations,
        shots: args.shots,
        seed: args.seed,
        threshold: args.threshold,
    };
    config.validate()?;
    Ok((db, queries, config))
}

fn warn_low_resolution(config: &SearchConfig) {
    if let Some(shots) = config.shots {
        let floor = 100.0 / (config.threshold * config.threshold);
        if (shots as f64) < floor {
            eprintln!(
                "warning: {shots} shots is below the resolution floor {floor:.1} for threshold {}",
                config.threshold
            );
        }
    }
}

fn emit(record: &RunRecord, format: Format) {
    match format {
        Format::Json => println!("{}", record.to_json()),
        Format::Hist => {
            if let Some(note) = &record.note {
                println!("# {note}");
            }
            print!("{}", render_histogram(&record.report));
        }
    }
}

fn cmd_search(args: &SearchArgs, format: Format, argv: &[String]) -> CmdResult {
    let (db, queries, config) = prepare(args)?;
    warn_low_resolution(&config);
    let report = grover_search(&db, &queries, &config)?;
    let json = ReportJson::from_report(&report, &config, Some(&db));
    emit(&RunRecord::new(argv, json, None), format);
    Ok(())
}

fn cmd_scenario(
    name: &str,
    shots: Option<u64>,
    seed: u64,
    format: Format,
    argv: &[String],
) -> CmdResult {
    let scenario: Scenario = name.parse()?;
    let config = SearchConfig {
        shots: shots.or(scenario.default_shots()),
        seed,
        ..SearchConfig::default()
    };
    config.validate()?;
    warn_low_resolution(&config);
    let (report, db) = match scenario.setup() {
        ScenarioSetup::ControlledZ { n_qubits, keys } => {
            (grover_search_cz(n_qubits, &keys, &config)?, None)
        }
        ScenarioSetup::ControlledS { db, queries } => {
            (grover_search(&db, &queries, &config)?, Some(db))
        }
    };
    let json = ReportJson::from_report(&report, &config, db.as_ref());
    let mut note = format!("{scenario}: {}", scenario.description());
    if scenario.is_sampled_analog() {
        note.push_str("; noiseless simulation, no device noise model");
    }
    emit(&RunRecord::new(argv, json, Some(note)), format);
    Ok(())
}

fn cmd_export_qasm(args: &SearchArgs, out: Option<&Path>) -> CmdResult {
    let (db, queries, config) = prepare(args)?;
    let oracle = qvdb_core::build_cs_oracle(&db, &queries)?;
    let circuit = build_search_circuit(&oracle, config.iterations)?;
    let text = export_qasm(&circuit)?;
    match out {
        Some(path) => fs::write(path, text)
            .map_err(|e| Failure::Io(format!("cannot write {}: {e}", path.display())))?,
        None => print!("{text}"),
    }
    Ok(())
}

fn cmd_verify(max_qubits: usize, trials: usize, seed: u64) -> CmdResult {
    let summary = verify::run_all(max_qubits, trials, seed)?;
    for suite in &summary.suites {
        println!(
            "{} {:<48} trials={:<5} max_dev={:.3e} tol={:.0e}",
            if suite.passed() { "PASS" } else { "FAIL" },
            suite.name,
            suite.trials,
            suite.max_deviation,
            suite.tolerance
        );
    }
    if summary.passed() {
        Ok(())
    } else {
        Err(Failure::Validation("verification failed".into()))
    }
}

fn cmd_pad(path: &Path, size: Option<usize>) -> CmdResult {
    let db = load_database(path)?;
    let padded = match size {
        Some(size) => pad_database_to(&db, size),
        None => pad_database(&db),
    };
    println!("{}", padded.to_json());
    Ok(())
}
