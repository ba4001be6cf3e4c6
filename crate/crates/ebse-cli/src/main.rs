//! Command-line front end: run simulations, certify stability, compute
//! bounds, and replay traces against them.

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use ebse::report::{self, ReportFormat};
use ebse::scenario::{builtin_benchmark, Scenario, SCENARIO_SCHEMA_VERSION};
use ebse::sim;

const VERSION: &str = concat!(
    env!("CARGO_PKG_VERSION"),
    " (scenario schema 1, report schema 1)"
);

#[derive(Parser)]
#[command(
    name = "ebse",
    version = VERSION,
    about = "Distributed event-based state estimation simulator"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Simulate a scenario and export the trace and rate reports.
    Run(RunArgs),
    /// Certify stability and compute error bounds for a scenario.
    Analyze(AnalyzeArgs),
    /// Replay an exported trace CSV against the scenario's bounds.
    Verify(VerifyArgs),
    /// Run the built-in thermo-fluid benchmark.
    Benchmark(BenchmarkArgs),
    /// Print schema versions.
    Schemas,
}

#[derive(Args)]
struct ScenarioSource {
    /// Scenario file (TOML).
    #[arg(long, conflicts_with = "benchmark")]
    scenario: Option<PathBuf>,
    /// Built-in scenario name (thermo-fluid).
    #[arg(long)]
    benchmark: Option<String>,
}

impl ScenarioSource {
    fn load(&self) -> ebse::Result<Scenario> {
        match (&self.scenario, &self.benchmark) {
            (Some(path), None) => Scenario::load(path),
            (None, Some(name)) if name == "thermo-fluid" => Ok(builtin_benchmark()),
            (None, Some(name)) => Err(ebse::Error::InvalidScenario(format!(
                "unknown benchmark {name:?} (available: thermo-fluid)"
            ))),
            (None, None) => Err(ebse::Error::InvalidScenario(
                "either --scenario <path> or --benchmark <name> is required".to_string(),
            )),
            _ => unreachable!("clap enforces exclusivity"),
        }
    }
}

#[derive(Args)]
struct RunArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Master seed; reseeds all random components deterministically.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the scenario's horizon.
    #[arg(long)]
    horizon: Option<usize>,
    /// Output directory for trace/rate/bus-log files.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Output format: csv, json, or both.
    #[arg(long, default_value = "both")]
    format: String,
}

#[derive(Args)]
struct AnalyzeArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Write the JSON report here instead of stdout.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: ScenarioSource,
    /// Trace CSV produced by `run`.
    #[arg(long)]
    trace: PathBuf,
}

#[derive(Args)]
struct BenchmarkArgs {
    /// Master seed; reseeds all random components deterministically.
    #[arg(long)]
    seed: Option<u64>,
    /// Override the benchmark horizon.
    #[arg(long)]
    horizon: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out_dir: PathBuf,
    /// Output format: csv, json, or both.
    #[arg(long, default_value = "both")]
    format: String,
    /// Write the benchmark scenario file here and exit.
    #[arg(long)]
    emit_scenario: Option<PathBuf>,
}

fn apply_overrides(mut scenario: Scenario, seed: Option<u64>, horizon: Option<usize>) -> Scenario {
    if let Some(seed) = seed {
        scenario = scenario.with_master_seed(seed);
    }
    if let Some(horizon) = horizon {
        scenario.run.horizon = horizon;
    }
    scenario
}

fn cmd_run(scenario: Scenario, out_dir: &std::path::Path, format: &str) -> ebse::Result<bool> {
    let format: ReportFormat = format.parse()?;
    let output = sim::run(&scenario)?;
    let written = report::write_run(&output, out_dir, format)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    println!(
        "steps: {}  sensor rate: {:.4}  input rate: {:.4}  reduction: {:.4}",
        output.rates.steps,
        output.rates.sensor_average,
        output.rates.input_average,
        output.rates.reduction
    );
    if !output.bus_log.capacity_violations.is_empty() {
        println!(
            "capacity violations: {}",
            output.bus_log.capacity_violations.len()
        );
    }
    if output.ok() {
        println!("internal checks: ok");
        Ok(true)
    } else {
        for a in output.anomalies.iter().take(10) {
            eprintln!(
                "anomaly at step {}: {} ({:.3e})",
                a.step, a.what, a.magnitude
            );
        }
        eprintln!("internal checks: {} anomalies", output.anomalies.len());
        Ok(false)
    }
}

fn cmd_analyze(scenario: &Scenario, out: Option<&PathBuf>) -> ebse::Result<()> {
    let compiled = scenario.build()?;
    let report = ebse::analysis::bound_report(&compiled)?;
    let json =
        serde_json::to_string_pretty(&report).map_err(|e| ebse::Error::Parse(e.to_string()))?;
    match out {
        Some(path) => {
            std::fs::write(path, &json)?;
            println!("wrote {}", path.display());
        }
        None => println!("{json}"),
    }
    Ok(())
}

fn cmd_verify(scenario: &Scenario, trace_path: &PathBuf) -> ebse::Result<bool> {
    let compiled = scenario.build()?;
    let report = ebse::analysis::bound_report(&compiled)?;
    let text = std::fs::read_to_string(trace_path)?;
    let parsed = report::parse_trace_csv(&text)?;

    let mut pass = true;

    // Difference-to-centralized bound. Applies when either the multi-agent
    // bound is certified or nothing disturbs the estimators (no drops, no
    // injection), in which case the single-link bound is valid.
    let undisturbed =
        compiled.drop_model.drop_prob == 0.0 && compiled.scenario.injection.is_empty();
    let bound = match (report.theorem2_e_max, undisturbed) {
        (Some(b), _) => Some(("certified difference bound", b)),
        (None, true) => Some(("single-link difference bound", report.theorem1_e_max)),
        (None, false) => None,
    };
    match bound {
        Some((name, b)) => {
            let sup = parsed
                .norm_e
                .iter()
                .flat_map(|series| series.iter().copied())
                .fold(0.0f64, f64::max);
            let ok = sup <= b;
            println!(
                "{}: sup ||e_i|| = {:.6e} <= {:.6e}: {}",
                name,
                sup,
                b,
                if ok { "pass" } else { "FAIL" }
            );
            pass &= ok;
        }
        None => println!(
            "difference bound: not certifiable (drops or injections present, no certificate)"
        ),
    }

    // Rates recomputed from the trigger columns must lie in [0, 1].
    for (l, fires) in parsed.sensor_triggers.iter().enumerate() {
        let steps = parsed.steps.saturating_sub(1).max(1);
        let rate = fires.iter().skip(1).filter(|&&b| b).count() as f64 / steps as f64;
        if !(0.0..=1.0).contains(&rate) {
            println!("channel y{l} rate {rate} outside [0, 1]: FAIL");
            pass = false;
        }
    }
    println!("verify: {}", if pass { "pass" } else { "FAIL" });
    Ok(pass)
}

fn real_main() -> ebse::Result<bool> {
    let cli = Cli::parse();
    match cli.command {
        Command::Run(args) => {
            let scenario = apply_overrides(args.source.load()?, args.seed, args.horizon);
            cmd_run(scenario, &args.out_dir, &args.format)
        }
        Command::Analyze(args) => {
            let scenario = args.source.load()?;
            cmd_analyze(&scenario, args.out.as_ref())?;
            Ok(true)
        }
        Command::Verify(args) => {
            let scenario = args.source.load()?;
            cmd_verify(&scenario, &args.trace)
        }
        Command::Benchmark(args) => {
            let scenario = apply_overrides(builtin_benchmark(), args.seed, args.horizon);
            if let Some(path) = args.emit_scenario {
                scenario.save(&path)?;
                println!("wrote {}", path.display());
                return Ok(true);
            }
            cmd_run(scenario, &args.out_dir, &args.format)
        }
        Command::Schemas => {
            println!("scenario schema: {SCENARIO_SCHEMA_VERSION}");
            println!("report schema: {}", report::REPORT_SCHEMA_VERSION);
            Ok(true)
        }
    }
}

fn main() -> ExitCode {
    match real_main() {
        Ok(true) => ExitCode::SUCCESS,
        Ok(false) => ExitCode::FAILURE,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::FAILURE
        }
    }
}
