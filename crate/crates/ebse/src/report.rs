//! Trace, rate, and bus-log export.
//!
//! CSV layouts (fixed column order, one row per step):
//!
//! * `trace.csv`: `step, x<i>.., v<i>.., u<i>.., xc<i>.., xpred<a>_<i>..,
//!   xhat<a>_<i>.., trig_y<l>.., trig_u<g>.., norm_e<a>.., norm_e<i>_<j>..`
//!   where `<a>` ranges over agents, `<l>` over sensor channels, `<g>` over
//!   input groups, `<i>/<j>` over traced pairs. Booleans are 0/1.
//! * `rates.csv`: `step, y<l>.., u<g>..` moving-average rates.
//! * `bus_log.csv`: `step, kind, sender, unit, receiver, fate`.
//!
//! Floats are written with Rust's shortest round-trip formatting, so output
//! is byte-stable for identical runs. JSON reports carry a schema version.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::bus::{BusLog, Fate, FrameKind};
use crate::sim::{CommRateReport, RunOutput, RunTrace};
use crate::{Error, Result};

pub const REPORT_SCHEMA_VERSION: u32 = 1;

/// Output format selection for `write_run`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
    Both,
}

impl std::str::FromStr for ReportFormat {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            "both" => Ok(ReportFormat::Both),
            other => Err(Error::InvalidScenario(format!(
                "unknown format {other:?} (expected csv, json, or both)"
            ))),
        }
    }
}

/// Render the trace as CSV.
pub fn trace_to_csv(trace: &RunTrace) -> String {
    let mut out = String::new();
    let agents = trace.records[0].x_hat.len();

    let mut header = vec!["step".to_string()];
    header.extend((0..trace.state_dim).map(|i| format!("x{i}")));
    header.extend((0..trace.state_dim).map(|i| format!("v{i}")));
    header.extend((0..trace.input_dim).map(|i| format!("u{i}")));
    header.extend((0..trace.state_dim).map(|i| format!("xc{i}")));
    for a in 0..agents {
        header.extend((0..trace.state_dim).map(move |i| format!("xpred{a}_{i}")));
    }
    for a in 0..agents {
        header.extend((0..trace.state_dim).map(move |i| format!("xhat{a}_{i}")));
    }
    header.extend((0..trace.num_sensors).map(|l| format!("trig_y{l}")));
    header.extend((0..trace.num_input_groups).map(|g| format!("trig_u{g}")));
    header.extend((0..agents).map(|a| format!("norm_e{a}")));
    header.extend(
        trace
            .trace_pairs
            .iter()
            .map(|(i, j)| format!("norm_e{i}_{j}")),
    );
    out.push_str(&header.join(","));
    out.push('\n');

    for r in &trace.records {
        let mut row: Vec<String> = vec![r.step.to_string()];
        row.extend(r.x.iter().map(|v| v.to_string()));
        row.extend(r.v_prev.iter().map(|v| v.to_string()));
        row.extend(r.u_applied.iter().map(|v| v.to_string()));
        row.extend(r.x_central.iter().map(|v| v.to_string()));
        for xp in &r.x_pred {
            row.extend(xp.iter().map(|v| v.to_string()));
        }
        for xh in &r.x_hat {
            row.extend(xh.iter().map(|v| v.to_string()));
        }
        row.extend(r.sensor_triggers.iter().map(|&b| (b as u8).to_string()));
        row.extend(r.input_triggers.iter().map(|&b| (b as u8).to_string()));
        row.extend(r.norm_e.iter().map(|v| v.to_string()));
        row.extend(r.norm_e_pairs.iter().map(|v| v.to_string()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Render the per-step moving-average rates as CSV.
pub fn rates_to_csv(rates: &CommRateReport) -> String {
    let mut out = String::new();
    let mut header = vec!["step".to_string()];
    header.extend(rates.sensors.iter().map(|c| c.name.clone()));
    header.extend(rates.inputs.iter().map(|c| c.name.clone()));
    out.push_str(&header.join(","));
    out.push('\n');
    for k in 0..rates.steps {
        let mut row = vec![(k + 1).to_string()];
        row.extend(rates.sensors.iter().map(|c| c.moving_avg[k].to_string()));
        row.extend(rates.inputs.iter().map(|c| c.moving_avg[k].to_string()));
        out.push_str(&row.join(","));
        out.push('\n');
    }
    out
}

/// Render the bus log as CSV.
pub fn bus_log_to_csv(log: &BusLog) -> String {
    let mut out = String::from("step,kind,sender,unit,receiver,fate\n");
    for e in &log.events {
        let kind = match e.kind {
            FrameKind::Measurement => "measurement",
            FrameKind::Input => "input",
            FrameKind::ResetEstimate => "reset_estimate",
        };
        let fate = match e.fate {
            Fate::Delivered => "delivered",
            Fate::Dropped => "dropped",
        };
        let _ = writeln!(
            out,
            "{},{},{},{},{},{}",
            e.step, kind, e.sender, e.unit, e.receiver, fate
        );
    }
    out
}

/// Channel summary for the JSON rate report.
#[derive(Debug, Clone, Serialize)]
struct ChannelSummary {
    name: String,
    average: f64,
}

/// Versioned JSON summary of a run.
#[derive(Debug, Clone, Serialize)]
struct RunSummary<'a> {
    schema_version: u32,
    steps: usize,
    window: usize,
    sensor_channels: Vec<ChannelSummary>,
    input_groups: Vec<ChannelSummary>,
    sensor_average: f64,
    input_average: f64,
    overall_average: f64,
    reduction: f64,
    frames_offered: usize,
    frames_delivered: usize,
    frames_dropped: usize,
    capacity_violations: usize,
    anomalies: &'a [crate::sim::Anomaly],
    max_norm_e: Vec<f64>,
    max_estimation_error: Vec<f64>,
}

/// Render the versioned JSON summary of a run.
pub fn run_summary_json(output: &RunOutput) -> Result<String> {
    let summary = RunSummary {
        schema_version: REPORT_SCHEMA_VERSION,
        steps: output.rates.steps,
        window: output.rates.window,
        sensor_channels: output
            .rates
            .sensors
            .iter()
            .map(|c| ChannelSummary {
                name: c.name.clone(),
                average: c.average,
            })
            .collect(),
        input_groups: output
            .rates
            .inputs
            .iter()
            .map(|c| ChannelSummary {
                name: c.name.clone(),
                average: c.average,
            })
            .collect(),
        sensor_average: output.rates.sensor_average,
        input_average: output.rates.input_average,
        overall_average: output.rates.overall_average,
        reduction: output.rates.reduction,
        frames_offered: output.bus_log.offered,
        frames_delivered: output.bus_log.delivered,
        frames_dropped: output.bus_log.dropped,
        capacity_violations: output.bus_log.capacity_violations.len(),
        anomalies: &output.anomalies,
        max_norm_e: output.trace.max_norm_e(),
        max_estimation_error: output.trace.max_estimation_error(),
    };
    serde_json::to_string_pretty(&summary).map_err(|e| Error::Parse(e.to_string()))
}

/// Write the run artifacts into `out_dir`, returning the written paths.
pub fn write_run(output: &RunOutput, out_dir: &Path, format: ReportFormat) -> Result<Vec<PathBuf>> {
    std::fs::create_dir_all(out_dir)?;
    let mut written = Vec::new();
    if matches!(format, ReportFormat::Csv | ReportFormat::Both) {
        let trace_path = out_dir.join("trace.csv");
        std::fs::write(&trace_path, trace_to_csv(&output.trace))?;
        written.push(trace_path);
        let rates_path = out_dir.join("rates.csv");
        std::fs::write(&rates_path, rates_to_csv(&output.rates))?;
        written.push(rates_path);
        let bus_path = out_dir.join("bus_log.csv");
        std::fs::write(&bus_path, bus_log_to_csv(&output.bus_log))?;
        written.push(bus_path);
    }
    if matches!(format, ReportFormat::Json | ReportFormat::Both) {
        let summary_path = out_dir.join("run_summary.json");
        std::fs::write(&summary_path, run_summary_json(output)?)?;
        written.push(summary_path);
    }
    Ok(written)
}

/// Columns parsed back from a trace CSV, as needed by `verify`.
#[derive(Debug, Clone)]
pub struct ParsedTrace {
    pub steps: usize,
    /// norm_e columns, one series per agent.
    pub norm_e: Vec<Vec<f64>>,
    /// trig_y columns, one series per channel.
    pub sensor_triggers: Vec<Vec<bool>>,
}

/// Parse a trace CSV produced by `trace_to_csv`.
pub fn parse_trace_csv(text: &str) -> Result<ParsedTrace> {
    let mut lines = text.lines();
    let header = lines
        .next()
        .ok_or_else(|| Error::Parse("trace csv is empty".to_string()))?;
    let cols: Vec<&str> = header.split(',').collect();

    let norm_e_idx: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.starts_with("norm_e") && !c[6..].contains('_'))
        .map(|(i, _)| i)
        .collect();
    let trig_idx: Vec<usize> = cols
        .iter()
        .enumerate()
        .filter(|(_, c)| c.starts_with("trig_y"))
        .map(|(i, _)| i)
        .collect();
    if norm_e_idx.is_empty() {
        return Err(Error::Parse("trace csv has no norm_e columns".to_string()));
    }

    let mut norm_e: Vec<Vec<f64>> = vec![Vec::new(); norm_e_idx.len()];
    let mut sensor_triggers: Vec<Vec<bool>> = vec![Vec::new(); trig_idx.len()];
    let mut steps = 0usize;
    for (row_no, line) in lines.enumerate() {
        if line.is_empty() {
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() != cols.len() {
            return Err(Error::Parse(format!(
                "trace csv row {row_no} has {} fields, expected {}",
                fields.len(),
                cols.len()
            )));
        }
        for (slot, &idx) in norm_e_idx.iter().enumerate() {
            let v: f64 = fields[idx]
                .parse()
                .map_err(|_| Error::Parse(format!("bad float at row {row_no}")))?;
            norm_e[slot].push(v);
        }
        for (slot, &idx) in trig_idx.iter().enumerate() {
            sensor_triggers[slot].push(fields[idx] == "1");
        }
        steps += 1;
    }
    Ok(ParsedTrace {
        steps,
        norm_e,
        sensor_triggers,
    })
}
