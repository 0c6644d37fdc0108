//! The `conjpert` command line: `verify`, `condition` and `simulate`.
//!
//! Exit codes: 0 when every check passes, 1 when a check fails, 2 for usage
//! errors (bad arguments, unreadable or invalid config).

use std::collections::BTreeMap;
use std::ffi::OsString;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use serde::{Deserialize, Serialize};

use crate::condition::{run_condition, ConditionSummary, RowKind};
use crate::identities::{epsilon_table, run_suite, DENSE_MAX_N};
use crate::torus::mass::singular_set;
use crate::torus::{run_sweep, svg, Grid, SimConfig, SpectralReport, TorusError};

pub const EXIT_PASS: i32 = 0;
pub const EXIT_FAIL: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

pub const MANIFEST_SCHEMA_VERSION: u32 = 1;

/// Largest `n` accepted by `verify`.
pub const VERIFY_N_MAX: usize = 8;
/// Largest `n` accepted by `condition`.
pub const CONDITION_N_MAX: usize = 7;
/// `condition` needs `--long` from this `n` on.
pub const CONDITION_LONG_FROM: usize = 5;

#[derive(Parser, Debug)]
#[command(
    name = "conjpert",
    version,
    about = "Exact checks and torus simulations for conjugate-linear Dirac perturbations"
)]
pub struct Cli {
    /// Print the JSON report on stdout instead of a summary.
    #[arg(long, global = true)]
    pub json: bool,
    /// Directory for report.json and derived artifacts.
    #[arg(long, global = true, value_name = "DIR")]
    pub out: Option<PathBuf>,
    /// Worker threads for trial suites (results do not depend on it).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the exact identity suites and the phase table.
    Verify(VerifyArgs),
    /// Trials of the concentrating condition, wrong-class controls and
    /// odd-rank determinants.
    Condition(ConditionArgs),
    /// Sweep the deformation on the flat torus from a TOML config.
    Simulate(SimulateArgs),
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 4)]
    pub n_max: usize,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 1)]
    pub seed: u64,
    /// Also run the sparse-input suites for n above 5.
    #[arg(long)]
    pub long: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct ConditionArgs {
    /// Odd complex dimensions, comma separated.
    #[arg(long = "n", value_delimiter = ',', default_value = "1,3")]
    pub n_list: Vec<usize>,
    /// Ranks of E, comma separated.
    #[arg(long = "r", value_delimiter = ',', default_value = "1,2,3,4")]
    pub r_list: Vec<usize>,
    #[arg(long, default_value_t = 50)]
    pub trials: usize,
    #[arg(long, default_value_t = 2)]
    pub seed: u64,
    /// Allow n = 5 and n = 7.
    #[arg(long)]
    pub long: bool,
}

#[derive(Args, Debug, Clone, Serialize)]
pub struct SimulateArgs {
    pub config: PathBuf,
    /// Overrides the seed from the config file.
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct SuiteCounts {
    pub passed: usize,
    pub failed: usize,
    pub skipped: usize,
}

/// Provenance embedded in every report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunManifest {
    pub schema_version: u32,
    pub command: String,
    pub config: serde_json::Value,
    pub version: String,
    pub seed: u64,
    pub threads: usize,
    pub wall_time_secs: f64,
    pub suites: BTreeMap<String, SuiteCounts>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyEntry {
    pub identity: String,
    pub n: usize,
    pub p: usize,
    pub seed: Option<u64>,
    pub trials: usize,
    pub failures: usize,
    pub status: Status,
    pub counterexample: Option<serde_json::Value>,
    pub error: Option<String>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Skip,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub manifest: RunManifest,
    pub entries: Vec<VerifyEntry>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConditionReport {
    pub manifest: RunManifest,
    pub summary: ConditionSummary,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SimulateReport {
    pub manifest: RunManifest,
    pub report: SpectralReport,
}

/// Parses `args` (including the program name) and runs the command,
/// writing human or JSON output to `stdout` and diagnostics to `stderr`.
pub fn run<I, T>(args: I, stdout: &mut dyn Write, stderr: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_PASS };
            let text = e.render().to_string();
            if e.use_stderr() {
                let _ = write!(stderr, "{text}");
            } else {
                let _ = write!(stdout, "{text}");
            }
            return code;
        }
    };
    let outcome = match &cli.command {
        Command::Verify(a) => cmd_verify(&cli, a),
        Command::Condition(a) => cmd_condition(&cli, a),
        Command::Simulate(a) => cmd_simulate(&cli, a),
    };
    match outcome {
        Ok(out) => {
            if let Some(dir) = &cli.out {
                if let Err(e) = write_artifacts(dir, &out.artifacts) {
                    let _ = writeln!(stderr, "error: {e}");
                    return EXIT_USAGE;
                }
            }
            if cli.json {
                let _ = writeln!(stdout, "{}", out.json);
            } else {
                let _ = write!(stdout, "{}", out.summary);
            }
            if out.passed {
                EXIT_PASS
            } else {
                EXIT_FAIL
            }
        }
        Err(CliError::Usage(msg)) => {
            let _ = writeln!(stderr, "usage error: {msg}");
            EXIT_USAGE
        }
    }
}

enum CliError {
    Usage(String),
}

struct Outcome {
    passed: bool,
    json: String,
    summary: String,
    artifacts: Vec<(String, String)>,
}

fn manifest(cli: &Cli, command: &str, config: serde_json::Value, seed: u64, start: Instant) -> RunManifest {
    RunManifest {
        schema_version: MANIFEST_SCHEMA_VERSION,
        command: command.into(),
        config,
        version: env!("CARGO_PKG_VERSION").into(),
        seed,
        threads: cli.threads.max(1),
        wall_time_secs: start.elapsed().as_secs_f64(),
        suites: BTreeMap::new(),
    }
}

fn cmd_verify(cli: &Cli, a: &VerifyArgs) -> Result<Outcome, CliError> {
    if a.n_max == 0 || a.n_max > VERIFY_N_MAX {
        return Err(CliError::Usage(format!(
            "--n-max must lie in 1..={VERIFY_N_MAX}, got {}",
            a.n_max
        )));
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let start = Instant::now();
    let run_n = if a.long { a.n_max } else { a.n_max.min(DENSE_MAX_N) };
    let mut entries: Vec<VerifyEntry> = run_suite(run_n, a.trials, a.seed, cli.threads)
        .into_iter()
        .map(|r| VerifyEntry {
            identity: r.identity.name().into(),
            n: r.n,
            p: r.p,
            seed: Some(r.seed),
            trials: r.trials,
            failures: r.failures,
            status: if r.passed { Status::Pass } else { Status::Fail },
            counterexample: r
                .counterexample
                .map(|c| serde_json::to_value(c).expect("counterexample serializes")),
            error: r.error,
        })
        .collect();
    for id in crate::identities::Identity::ALL {
        for n in run_n + 1..=a.n_max {
            for p in 0..=n {
                entries.push(VerifyEntry {
                    identity: id.name().into(),
                    n,
                    p,
                    seed: None,
                    trials: 0,
                    failures: 0,
                    status: Status::Skip,
                    counterexample: None,
                    error: Some("heavy case; rerun with --long".into()),
                });
            }
        }
    }
    for row in epsilon_table(a.n_max) {
        entries.push(VerifyEntry {
            identity: "epsilon_phase".into(),
            n: row.n,
            p: row.p,
            seed: None,
            trials: 1,
            failures: usize::from(!row.holds),
            status: if row.holds { Status::Pass } else { Status::Fail },
            counterexample: (!row.holds).then(|| serde_json::to_value(&row).expect("row serializes")),
            error: None,
        });
    }

    let mut suites: BTreeMap<String, SuiteCounts> = BTreeMap::new();
    for e in &entries {
        let c = suites.entry(e.identity.clone()).or_default();
        match e.status {
            Status::Pass => c.passed += 1,
            Status::Fail => c.failed += 1,
            Status::Skip => c.skipped += 1,
        }
    }
    let passed = entries.iter().all(|e| e.status != Status::Fail);
    let mut m = manifest(cli, "verify", serde_json::to_value(a).expect("args serialize"), a.seed, start);
    m.suites = suites;
    let report = VerifyReport { manifest: m, entries };

    let mut summary = String::new();
    for (name, c) in &report.manifest.suites {
        summary += &format!(
            "{:<28} pass {:>3}  fail {:>3}  skip {:>3}\n",
            name, c.passed, c.failed, c.skipped
        );
    }
    for e in report.entries.iter().filter(|e| e.status == Status::Fail) {
        summary += &format!(
            "FAIL {} n={} p={} seed={:?}: {}\n",
            e.identity,
            e.n,
            e.p,
            e.seed,
            e.counterexample
                .as_ref()
                .map(|c| c.to_string())
                .or(e.error.clone())
                .unwrap_or_default()
        );
    }
    summary += if passed { "verify: PASS\n" } else { "verify: FAIL\n" };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    Ok(Outcome {
        passed,
        artifacts: vec![("report.json".into(), json.clone())],
        json,
        summary,
    })
}

fn cmd_condition(cli: &Cli, a: &ConditionArgs) -> Result<Outcome, CliError> {
    if a.n_list.is_empty() || a.r_list.is_empty() {
        return Err(CliError::Usage("--n and --r must be nonempty".into()));
    }
    for &n in &a.n_list {
        if n % 2 == 0 {
            return Err(CliError::Usage(format!(
                "n = {n} is even: A_phi exchanges S+ (x) E and S- (x) E only in odd complex \
                 dimension, i.e. real dimension 2 or 6 mod 8, so the condition is not defined here"
            )));
        }
        if n > CONDITION_N_MAX {
            return Err(CliError::Usage(format!(
                "n = {n} exceeds the supported maximum {CONDITION_N_MAX}"
            )));
        }
        if n >= CONDITION_LONG_FROM && !a.long {
            return Err(CliError::Usage(format!("n = {n} is a long exact suite; pass --long")));
        }
    }
    if a.r_list.contains(&0) {
        return Err(CliError::Usage("ranks must be at least 1".into()));
    }
    if a.trials == 0 {
        return Err(CliError::Usage("--trials must be at least 1".into()));
    }
    let start = Instant::now();
    let summary = run_condition(&a.n_list, &a.r_list, a.trials, a.seed, cli.threads);
    let passed = summary.passed();

    let mut suites = BTreeMap::new();
    for (kind, name) in [
        (RowKind::Correct, "correct_class"),
        (RowKind::Wrong, "wrong_class"),
        (RowKind::OddRankDeterminant, "odd_rank_determinant"),
    ] {
        let mut c = SuiteCounts::default();
        for r in summary.rows_of(kind) {
            if r.skipped.is_some() {
                c.skipped += 1;
            } else if kind == RowKind::Wrong {
                // judged by the aggregate rate
                if summary.wrong_class_passed() {
                    c.passed += 1;
                } else {
                    c.failed += 1;
                }
            } else if r.passed {
                c.passed += 1;
            } else {
                c.failed += 1;
            }
        }
        suites.insert(name.to_string(), c);
    }
    let mut m = manifest(cli, "condition", serde_json::to_value(a).expect("args serialize"), a.seed, start);
    m.suites = suites;
    let report = ConditionReport { manifest: m, summary };

    let mut text = String::new();
    for r in &report.summary.rows {
        let kind = match r.kind {
            RowKind::Correct => "correct",
            RowKind::Wrong => "wrong",
            RowKind::OddRankDeterminant => "det",
        };
        if let Some(why) = &r.skipped {
            text += &format!("{kind:<8} n={} r={} {:<13} skipped: {why}\n", r.n, r.r, r.class.name());
            continue;
        }
        text += &format!(
            "{kind:<8} n={} r={} {:<13} trials {:>4}  zero {:>4}  nonzero {:>4}  max {:.3e}{}\n",
            r.n,
            r.r,
            r.class.name(),
            r.trials,
            r.zero,
            r.nonzero,
            r.max_defect,
            if r.error.is_some() || (!r.passed && r.kind != RowKind::Wrong) {
                "  FAIL"
            } else {
                ""
            }
        );
    }
    if let Some(rate) = report.summary.wrong_class_rate {
        text += &format!(
            "wrong-class nonzero rate {:.4} over {} trials (threshold {})\n",
            rate, report.summary.wrong_class_trials, report.summary.wrong_class_threshold
        );
    }
    text += if passed { "condition: PASS\n" } else { "condition: FAIL\n" };
    let json = serde_json::to_string_pretty(&report).expect("report serializes");
    Ok(Outcome {
        passed,
        artifacts: vec![("report.json".into(), json.clone())],
        json,
        summary: text,
    })
}

fn cmd_simulate(cli: &Cli, a: &SimulateArgs) -> Result<Outcome, CliError> {
    let mut config = load_config(&a.config)?;
    if let Some(seed) = a.seed {
        config.seed = seed;
    }
    let start = Instant::now();
    let outcome = run_sweep(&config).map_err(|e| CliError::Usage(e.to_string()))?;
    let report = outcome.report;
    let passed = report.passed();

    let mut counts = SuiteCounts::default();
    for c in &report.contracts {
        if c.passed {
            counts.passed += 1;
        } else {
            counts.failed += 1;
        }
    }
    let mut m = manifest(
        cli,
        "simulate",
        serde_json::to_value(&config).expect("config serializes"),
        config.seed,
        start,
    );
    m.suites.insert("contracts".into(), counts);
    let full = SimulateReport {
        manifest: m,
        report: report.clone(),
    };

    let mut text = format!(
        "preset {} on {}x{} grid, delta {}\n",
        report.preset, report.discretization.grid, report.discretization.grid, report.delta
    );
    for e in &report.entries {
        match (&e.error, e.sigma_min, e.outside_mass) {
            (None, Some(sigma), Some(mass)) => {
                text += &format!(
                    "s = {:>8}  lambda0 = {:.6e}  sigma_min = {:.6e}  outside_mass = {:.6e}  iters = {}\n",
                    e.s, e.eigenvalues[0], sigma, mass, e.iterations
                )
            }
            (err, _, _) => {
                text += &format!("s = {:>8}  FAILED: {}\n", e.s, err.as_deref().unwrap_or("unknown"))
            }
        }
    }
    if let Some(slope) = report.mass_slope {
        text += &format!("log-log slope of outside mass: {slope:.3}\n");
    }
    if let Some(c) = report.c_prime_estimate {
        text += &format!("max s * outside_mass: {c:.4e}\n");
    }
    for c in &report.contracts {
        text += &format!(
            "{} {}: {}\n",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    text += if passed { "simulate: PASS\n" } else { "simulate: FAIL\n" };

    let json = serde_json::to_string_pretty(&full).expect("report serializes");
    let mut artifacts = vec![
        ("report.json".to_string(), json.clone()),
        ("sweep.csv".to_string(), report.to_csv()),
    ];
    let zeros = singular_set(&config.phi, Grid::new(config.grid));
    for (s, field) in &outcome.lowest {
        let title = format!("|zeta|^2, lowest eigenvector, {} preset, s = {s}", report.preset);
        artifacts.push((
            format!("heatmap_s{s}.svg"),
            svg::heatmap(field, &zeros, config.delta, &title),
        ));
    }
    Ok(Outcome {
        passed,
        json,
        summary: text,
        artifacts,
    })
}

fn load_config(path: &Path) -> Result<SimConfig, CliError> {
    SimConfig::from_path(path).map_err(|e| match e {
        TorusError::Io { .. } => CliError::Usage(e.to_string()),
        other => CliError::Usage(format!("{}: {other}", path.display())),
    })
}

fn write_artifacts(dir: &Path, files: &[(String, String)]) -> std::io::Result<()> {
    std::fs::create_dir_all(dir)?;
    for (name, body) in files {
        std::fs::write(dir.join(name), body)?;
    }
    Ok(())
}
