//! Command-line front-end: `barrier`, `symmetrize`, `simulate`, and `report`
//! subcommands writing versioned JSON artifacts.
//!
//! Exit status: 0 on success, 1 on mathematical hypothesis failure (or a
//! runtime/I-O error, reported with path context), 2 on usage errors
//! including unknown configuration keys.

use clap::{Args, Parser, Subcommand};
use nodal::barrier::{self, BarrierConfig, CnsConvention, SConvention, Target};
use nodal::simulate::{self, export, GridSpec};
use nodal::symmetrize::{self, RadiiSchedule, TMode};
use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

#[derive(Parser)]
#[command(
    name = "nodal",
    version,
    about = "Certified mu(0)/mu(1) lower bounds and a nodal-domain simulator for the monochromatic random plane wave"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run the C^1-approximation pipeline and write a certificate.
    Barrier(BarrierArgs),
    /// Run the radial-symmetrization pipeline and write a certificate.
    Symmetrize(SymmetrizeArgs),
    /// Sample the wave, extract nodal statistics, write ensemble stats.
    Simulate(SimulateArgs),
    /// Merge prior artifacts into a summary against the published values.
    Report(ReportArgs),
}

#[derive(Args, Clone)]
struct CommonArgs {
    /// Flat key = value configuration file; flags override file values.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output path for the JSON artifact.
    #[arg(long)]
    out: Option<PathBuf>,
    /// Omit the timestamp so identical runs give byte-identical artifacts.
    #[arg(long)]
    deterministic_output: bool,
}

#[derive(Args, Clone)]
struct BarrierArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// mu0 or mu1
    #[arg(long)]
    target: Option<String>,
    #[arg(long)]
    delta: Option<f64>,
    /// Explicit tolerance; omitted = the largest admissible value.
    #[arg(long)]
    epsilon: Option<f64>,
    /// Series truncation order for S.
    #[arg(long)]
    terms: Option<usize>,
    /// kac-rice or factor-ten
    #[arg(long)]
    cns: Option<String>,
    /// rigorous or published-table (default: the target's published convention)
    #[arg(long)]
    s_convention: Option<String>,
}

#[derive(Args, Clone)]
struct SymmetrizeArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// mu0 or mu1
    #[arg(long)]
    target: Option<String>,
    /// Comma-separated radii r_1 < ... < r_M.
    #[arg(long)]
    radii: Option<String>,
    /// prop, appendix, or explicit
    #[arg(long)]
    t_mode: Option<String>,
    /// Threshold for --t-mode explicit.
    #[arg(long)]
    t_value: Option<f64>,
}

#[derive(Args, Clone)]
struct SimulateArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Points per axis.
    #[arg(long)]
    grid: Option<usize>,
    #[arg(long)]
    half_width: Option<f64>,
    /// Counting disk radius (default 0.9 * half width).
    #[arg(long)]
    counting_radius: Option<f64>,
    /// Series truncation.
    #[arg(long)]
    terms: Option<usize>,
    #[arg(long)]
    samples: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Thread count for the ensemble (results are identical for any value).
    #[arg(long)]
    workers: Option<usize>,
    /// Also export the first sample's field as CSV.
    #[arg(long)]
    export_csv: Option<PathBuf>,
    /// Also export the first sample's field as a portable graymap.
    #[arg(long)]
    export_pgm: Option<PathBuf>,
    /// Also export the first sample's nodal census as JSON.
    #[arg(long)]
    export_census: Option<PathBuf>,
}

#[derive(Args, Clone)]
struct ReportArgs {
    #[command(flatten)]
    common: CommonArgs,
    /// Comma-separated artifact paths to merge.
    #[arg(long)]
    inputs: Option<String>,
}

enum CliError {
    Usage(String),
    Hypothesis(String),
    Runtime(String),
}

impl CliError {
    fn io(path: &Path, err: std::io::Error) -> Self {
        CliError::Runtime(format!("{}: {err}", path.display()))
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Barrier(args) => run_barrier(args),
        Command::Symmetrize(args) => run_symmetrize(args),
        Command::Simulate(args) => run_simulate(args),
        Command::Report(args) => run_report(args),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(CliError::Usage(msg)) => {
            eprintln!("usage error: {msg}");
            ExitCode::from(2)
        }
        Err(CliError::Hypothesis(msg)) => {
            eprintln!("hypothesis failure: {msg}");
            ExitCode::from(1)
        }
        Err(CliError::Runtime(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(1)
        }
    }
}

// --- configuration files ------------------------------------------------------

/// Flat `key = value` file; `#` starts a comment. Returns the key/value map.
fn load_config(path: &Path, allowed: &[&str]) -> Result<BTreeMap<String, String>, CliError> {
    let text = std::fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
    let mut map = BTreeMap::new();
    for (lineno, raw) in text.lines().enumerate() {
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let Some((key, value)) = line.split_once('=') else {
            return Err(CliError::Usage(format!(
                "{}:{}: expected key = value",
                path.display(),
                lineno + 1
            )));
        };
        let key = key.trim().to_string();
        if !allowed.contains(&key.as_str()) {
            return Err(CliError::Usage(format!(
                "{}: unknown configuration key \"{key}\"",
                path.display()
            )));
        }
        map.insert(key, value.trim().to_string());
    }
    Ok(map)
}

fn config_get<T: std::str::FromStr>(
    map: &BTreeMap<String, String>,
    key: &str,
) -> Result<Option<T>, CliError> {
    match map.get(key) {
        None => Ok(None),
        Some(raw) => raw.parse::<T>().map(Some).map_err(|_| {
            CliError::Usage(format!(
                "configuration key \"{key}\": cannot parse \"{raw}\""
            ))
        }),
    }
}

/// Flag value wins; config file fills gaps; then the default.
fn merge<T>(flag: Option<T>, file: Option<T>, default: T) -> T {
    flag.or(file).unwrap_or(default)
}

fn parse_target(s: &str) -> Result<Target, CliError> {
    match s {
        "mu0" => Ok(Target::Mu0),
        "mu1" => Ok(Target::Mu1),
        other => Err(CliError::Usage(format!(
            "target \"{other}\" is neither mu0 nor mu1"
        ))),
    }
}

// --- artifact output ------------------------------------------------------------

fn write_artifact<T: serde::Serialize>(
    payload: &T,
    kind: &str,
    path: &Path,
    deterministic: bool,
) -> Result<(), CliError> {
    let mut value = serde_json::to_value(payload)
        .map_err(|e| CliError::Runtime(format!("serializing {kind}: {e}")))?;
    value["kind"] = serde_json::Value::String(kind.to_string());
    if !deterministic {
        let now = std::time::SystemTime::now()
            .duration_since(std::time::UNIX_EPOCH)
            .map(|d| d.as_secs())
            .unwrap_or(0);
        value["timestamp_unix"] = serde_json::Value::from(now);
    }
    let text = serde_json::to_string_pretty(&value)
        .map_err(|e| CliError::Runtime(format!("serializing {kind}: {e}")))?;
    std::fs::write(path, text + "\n").map_err(|e| CliError::io(path, e))?;
    println!("wrote {kind} to {}", path.display());
    Ok(())
}

// --- subcommands ------------------------------------------------------------------

const BARRIER_KEYS: &[&str] = &[
    "target",
    "delta",
    "epsilon",
    "terms",
    "cns",
    "s-convention",
    "out",
];

fn run_barrier(args: BarrierArgs) -> Result<(), CliError> {
    let file = match &args.common.config {
        Some(p) => load_config(p, BARRIER_KEYS)?,
        None => BTreeMap::new(),
    };
    let target = parse_target(&merge(
        args.target,
        file.get("target").cloned(),
        "mu0".to_string(),
    ))?;
    let delta = merge(args.delta, config_get(&file, "delta")?, 0.5);
    let limit = barrier::delta_limit();
    if !(delta > 0.0 && delta < limit) {
        return Err(CliError::Usage(format!(
            "delta {delta} outside the admissible range (0, {limit:.5}) = (0, j_1,1 - j_0,1)"
        )));
    }
    let epsilon = args.epsilon.or(config_get(&file, "epsilon")?);
    let terms = merge(args.terms, config_get(&file, "terms")?, 100);
    let cns = match merge(args.cns, file.get("cns").cloned(), "kac-rice".to_string()).as_str() {
        "kac-rice" => CnsConvention::KacRiceExact,
        "factor-ten" => CnsConvention::PublishedFactorTen,
        other => {
            return Err(CliError::Usage(format!(
                "cns convention \"{other}\" is neither kac-rice nor factor-ten"
            )))
        }
    };
    let s_convention = match args
        .s_convention
        .or_else(|| file.get("s-convention").cloned())
        .as_deref()
    {
        None => None,
        Some("rigorous") => Some(SConvention::Rigorous),
        Some("published-table") => Some(SConvention::PublishedTable),
        Some(other) => {
            return Err(CliError::Usage(format!(
                "s-convention \"{other}\" is neither rigorous nor published-table"
            )))
        }
    };
    let config = BarrierConfig {
        target,
        delta,
        epsilon,
        truncation_order: terms,
        cns_convention: cns,
        s_convention,
    };
    let cert = barrier::mu_lower_bound(&config).map_err(|e| match e {
        barrier::BarrierError::HypothesisFailure { .. }
        | barrier::BarrierError::DeltaOutOfRange { .. } => CliError::Hypothesis(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let default_name = format!(
        "barrier_{}.json",
        if target == Target::Mu0 { "mu0" } else { "mu1" }
    );
    let out = merge(
        args.common.out,
        config_get(&file, "out")?,
        PathBuf::from(default_name),
    );
    write_artifact(
        &cert,
        "barrier_certificate",
        &out,
        args.common.deterministic_output,
    )
}

const SYMMETRIZE_KEYS: &[&str] = &["target", "radii", "t-mode", "t-value", "out"];

fn run_symmetrize(args: SymmetrizeArgs) -> Result<(), CliError> {
    let file = match &args.common.config {
        Some(p) => load_config(p, SYMMETRIZE_KEYS)?,
        None => BTreeMap::new(),
    };
    let target = parse_target(&merge(
        args.target,
        file.get("target").cloned(),
        "mu0".to_string(),
    ))?;
    let radii_raw = args
        .radii
        .or_else(|| file.get("radii").cloned())
        .ok_or_else(|| CliError::Usage("missing --radii".to_string()))?;
    let radii: Vec<f64> = radii_raw
        .split(',')
        .map(|tok| {
            tok.trim()
                .parse::<f64>()
                .map_err(|_| CliError::Usage(format!("radii entry \"{tok}\" is not a number")))
        })
        .collect::<Result<_, _>>()?;
    let schedule = RadiiSchedule::new(radii)
        .map_err(|e| CliError::Usage(format!("invalid radii schedule: {e}")))?;
    let t_value: Option<f64> = args.t_value.or(config_get(&file, "t-value")?);
    let mode =
        match merge(args.t_mode, file.get("t-mode").cloned(), "prop".to_string()).as_str() {
            "prop" => TMode::PropFormula,
            "appendix" => TMode::AppendixFormula,
            "explicit" => TMode::Explicit(t_value.ok_or_else(|| {
                CliError::Usage("--t-mode explicit requires --t-value".to_string())
            })?),
            other => {
                return Err(CliError::Usage(format!(
                    "t-mode \"{other}\" is not prop, appendix, or explicit"
                )))
            }
        };
    let cert = symmetrize::certify(&schedule, mode, target).map_err(|e| match e {
        symmetrize::SymmetrizeError::RadiiValidation { .. }
        | symmetrize::SymmetrizeError::NoSolution { .. } => CliError::Hypothesis(e.to_string()),
        other => CliError::Runtime(other.to_string()),
    })?;
    let default_name = format!(
        "symmetrize_{}.json",
        if target == Target::Mu0 { "mu0" } else { "mu1" }
    );
    let out = merge(
        args.common.out,
        config_get(&file, "out")?,
        PathBuf::from(default_name),
    );
    write_artifact(
        &cert,
        "symmetrization_certificate",
        &out,
        args.common.deterministic_output,
    )
}

const SIMULATE_KEYS: &[&str] = &[
    "grid",
    "half-width",
    "counting-radius",
    "terms",
    "samples",
    "seed",
    "workers",
    "out",
];

fn run_simulate(args: SimulateArgs) -> Result<(), CliError> {
    let file = match &args.common.config {
        Some(p) => load_config(p, SIMULATE_KEYS)?,
        None => BTreeMap::new(),
    };
    let resolution = merge(args.grid, config_get(&file, "grid")?, 500);
    let half_width = merge(args.half_width, config_get(&file, "half-width")?, 20.0);
    let counting_radius = merge(
        args.counting_radius,
        config_get(&file, "counting-radius")?,
        0.9 * half_width,
    );
    let terms = merge(args.terms, config_get(&file, "terms")?, 100);
    let samples = merge(args.samples, config_get(&file, "samples")?, 8);
    let seed = merge(args.seed, config_get(&file, "seed")?, 1);
    let workers = merge(
        args.workers,
        config_get(&file, "workers")?,
        std::thread::available_parallelism().map_or(1, |n| n.get()),
    );
    let grid = GridSpec::new(half_width, resolution, counting_radius)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let stats = simulate::estimate_mu(&grid, terms, samples, seed, workers)
        .map_err(|e| CliError::Runtime(e.to_string()))?;
    if let Some(csv) = &args.export_csv {
        let field =
            simulate::evaluate_field(&simulate::WaveSample::draw(seed, 0, terms, None), &grid)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        export::write_field_csv(&field, csv).map_err(|e| CliError::io(csv, e))?;
    }
    if let Some(pgm) = &args.export_pgm {
        let field =
            simulate::evaluate_field(&simulate::WaveSample::draw(seed, 0, terms, None), &grid)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        export::write_field_pgm(&field, pgm).map_err(|e| CliError::io(pgm, e))?;
    }
    if let Some(census_path) = &args.export_census {
        let field =
            simulate::evaluate_field(&simulate::WaveSample::draw(seed, 0, terms, None), &grid)
                .map_err(|e| CliError::Runtime(e.to_string()))?;
        let census = simulate::nodal_census(&field);
        #[derive(serde::Serialize)]
        struct CensusArtifact<'a> {
            schema: u32,
            seed: u64,
            sample_index: u64,
            n_terms: usize,
            grid: &'a GridSpec,
            #[serde(flatten)]
            census: &'a simulate::NodalCensus,
        }
        write_artifact(
            &CensusArtifact {
                schema: 1,
                seed,
                sample_index: 0,
                n_terms: terms,
                grid: &grid,
                census: &census,
            },
            "nodal_census",
            census_path,
            args.common.deterministic_output,
        )?;
    }
    let out = merge(
        args.common.out,
        config_get(&file, "out")?,
        PathBuf::from("simulate_stats.json"),
    );
    write_artifact(
        &stats,
        "ensemble_stats",
        &out,
        args.common.deterministic_output,
    )
}

const REPORT_KEYS: &[&str] = &["inputs", "out"];

fn run_report(args: ReportArgs) -> Result<(), CliError> {
    let file = match &args.common.config {
        Some(p) => load_config(p, REPORT_KEYS)?,
        None => BTreeMap::new(),
    };
    let inputs_raw = args
        .inputs
        .or_else(|| file.get("inputs").cloned())
        .ok_or_else(|| CliError::Usage("missing --inputs".to_string()))?;
    let mut lines = Vec::new();
    lines.push(format!(
        "{:<28} {:>24} {:>24}  note",
        "quantity", "computed", "published"
    ));
    for tok in inputs_raw.split(',') {
        let path = PathBuf::from(tok.trim());
        let text = std::fs::read_to_string(&path).map_err(|e| CliError::io(&path, e))?;
        let value: serde_json::Value = serde_json::from_str(&text)
            .map_err(|e| CliError::Runtime(format!("{}: {e}", path.display())))?;
        report_artifact(&value, &path, &mut lines)?;
    }
    let text = lines.join("\n") + "\n";
    match merge(args.common.out, config_get(&file, "out")?, PathBuf::new()) {
        p if p.as_os_str().is_empty() => print!("{text}"),
        p => {
            std::fs::write(&p, &text).map_err(|e| CliError::io(&p, e))?;
            println!("wrote report to {}", p.display());
        }
    }
    Ok(())
}

fn report_artifact(
    value: &serde_json::Value,
    path: &Path,
    lines: &mut Vec<String>,
) -> Result<(), CliError> {
    let kind = value["kind"].as_str().unwrap_or("?");
    let target = value["target"].as_str().unwrap_or("?");
    match kind {
        "barrier_certificate" => {
            let computed = value["log10_mu_bound"]["log10_abs"]
                .as_f64()
                .unwrap_or(f64::NAN);
            let quoted = value["published_log10_mu"].as_f64().unwrap_or(f64::NAN);
            lines.push(format!(
                "{:<28} {:>24} {:>24}  barrier certificate ({})",
                format!(
                    "mu({}) log10 lower bound",
                    if target == "mu0" { 0 } else { 1 }
                ),
                format!("{computed:.2}"),
                format!("{quoted:.0} (10^{quoted:.0})"),
                path.display()
            ));
            let strict = value["strict"]["log10_mu_bound_kac_rice"]["log10_abs"]
                .as_f64()
                .unwrap_or(f64::NAN);
            lines.push(format!(
                "{:<28} {:>24} {:>24}  substitution-derived tail and rigorous S",
                "  strict variant",
                format!("{strict:.2}"),
                "-"
            ));
        }
        "symmetrization_certificate" => {
            let computed_t = value["t"].as_f64().unwrap_or(f64::NAN);
            let computed = value["log10_mu_bound"]["log10_abs"]
                .as_f64()
                .unwrap_or(f64::NAN);
            let sign = value["log10_mu_bound"]["sign"].as_i64().unwrap_or(0);
            let shown = if sign > 0 {
                format!("10^{computed:.4}")
            } else {
                "vacuous (q <= 0)".to_string()
            };
            if target == "mu0" {
                lines.push(format!(
                    "{:<28} {:>24} {:>24}  symmetrization ({})",
                    "mu(0) symmetrization",
                    shown,
                    format!("{:.4e}", symmetrize::QUOTED_SYM_MU0_BOUND),
                    path.display()
                ));
                lines.push(format!(
                    "{:<28} {:>24} {:>24}",
                    "  threshold T",
                    format!("{computed_t:.4}"),
                    format!("{}", symmetrize::QUOTED_SYM_MU0_T)
                ));
            } else {
                lines.push(format!(
                    "{:<28} {:>24} {:>24}  symmetrization ({})",
                    "mu(1) symmetrization",
                    shown,
                    "3.2724e-247",
                    path.display()
                ));
                lines.push(format!(
                    "{:<28} {:>24} {:>24}  published T equals the bracket bound 5/|J0(r_M)|, not the solved root",
                    "  threshold T", format!("{computed_t:.4}"), format!("{}", symmetrize::QUOTED_SYM_MU1_T)
                ));
            }
        }
        "ensemble_stats" => {
            let mu0 = value["mu_hat"][0]["value"].as_f64().unwrap_or(f64::NAN);
            let mu1 = value["mu_hat"][1]["value"].as_f64().unwrap_or(f64::NAN);
            let four_pi = value["four_pi_cns_hat"].as_f64().unwrap_or(f64::NAN);
            let c = &value["centered_in_disk"];
            let c_mu0 = c["mu_hat"][0]["value"].as_f64().unwrap_or(f64::NAN);
            let c_mu1 = c["mu_hat"][1]["value"].as_f64().unwrap_or(f64::NAN);
            let c_four_pi = c["four_pi_cns_hat"].as_f64().unwrap_or(f64::NAN);
            lines.push(format!(
                "{:<28} {:>24} {:>24}  Monte Carlo, strict / center-of-mass rule ({})",
                "mu_hat(0)",
                format!("{mu0:.4} / {c_mu0:.4}"),
                "0.9117",
                path.display()
            ));
            lines.push(format!(
                "{:<28} {:>24} {:>24}",
                "mu_hat(1)",
                format!("{mu1:.4} / {c_mu1:.4}"),
                "0.0514"
            ));
            lines.push(format!(
                "{:<28} {:>24} {:>24}  published value is the large-R limit",
                "4 pi c_NS estimate",
                format!("{four_pi:.4} / {c_four_pi:.4}"),
                "0.0589"
            ));
        }
        other => {
            return Err(CliError::Runtime(format!(
                "{}: unknown artifact kind \"{other}\"",
                path.display()
            )))
        }
    }
    Ok(())
}
