//! Trace and summary serialization: the per-round trace CSV, the Table-style
//! summary (JSON), and the long-format CSV of cumulative trajectories with
//! confidence bands for external plotting.
//!
//! All writers are bit-stable for fixed inputs: stable column order, floats
//! at 9 significant digits in CSVs, and a schema marker line
//! `# coord-bid-sim schema v1` at the top of every CSV.

use std::fs::File;
use std::io::{BufRead, BufReader, BufWriter, Write};
use std::path::Path;

use serde::Serialize;

use crate::assumption::EstimateWithCI;
use crate::data_ingest::PoolStats;
use crate::error::{Error, Result};
use crate::simulator::{MetricsSeries, RunTotals, SummaryStats, TrajectoryBands};

pub const SCHEMA_LINE: &str = "# coord-bid-sim schema v1";

const TRACE_HEADER: &str =
    "run_id,t,scenario,bidder,value,bid,active,won,payment,utility,lambda,cum_utility,round_value";

/// Format a float with 9 significant digits (stable across platforms).
pub fn fmt_g9(x: f64) -> String {
    format!("{x:.8e}")
}

/// One trace record; mirrors the CSV schema. `t` and `bidder` are 1-based in
/// the export.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRow {
    pub run_id: u64,
    pub t: usize,
    pub scenario: String,
    pub bidder: usize,
    pub value: f64,
    pub bid: f64,
    pub active: bool,
    pub won: bool,
    pub payment: f64,
    pub utility: f64,
    pub lambda: f64,
    pub cum_utility: f64,
    pub round_value: f64,
}

/// Table-style summary row: coalition totals normalized by T for the
/// independent and coordinated scenarios, with 95% CIs over replications.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryRow {
    pub label: String,
    pub setting: String,
    pub n_bidders: usize,
    pub horizon: usize,
    pub replications: usize,
    pub utility_independent: EstimateWithCI,
    pub utility_coordinated: EstimateWithCI,
    pub value_independent: EstimateWithCI,
    pub value_coordinated: EstimateWithCI,
}

impl SummaryRow {
    /// The four cells in table order (utility I, utility C, value I, value C).
    pub fn cells(&self) -> [EstimateWithCI; 4] {
        [
            self.utility_independent,
            self.utility_coordinated,
            self.value_independent,
            self.value_coordinated,
        ]
    }
}

/// Top-level summary JSON document. Every run embeds its resolved
/// configuration and seed for auditability.
#[derive(Debug, Clone, Serialize)]
pub struct SummaryDocument {
    pub schema: String,
    pub label: String,
    pub setting: String,
    pub config: serde_json::Value,
    pub base_seed: u64,
    pub scenarios: Vec<SummaryStats>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub table_row: Option<SummaryRow>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub pool_stats: Option<PoolStats>,
}

fn mean_ci_over_runs(totals: &[RunTotals], horizon: usize, value: bool) -> EstimateWithCI {
    let t_norm = horizon as f64;
    let xs: Vec<f64> = totals
        .iter()
        .map(|r| if value { r.total_value } else { r.total_utility } / t_norm)
        .collect();
    EstimateWithCI::from_samples(&xs)
}

/// Aggregate paired replication totals into a Table-style row.
pub fn summarize_totals(
    label: &str,
    setting: &str,
    n_bidders: usize,
    horizon: usize,
    independent: &[RunTotals],
    coordinated: &[RunTotals],
) -> Result<SummaryRow> {
    if independent.len() < 2 || coordinated.len() < 2 {
        return Err(Error::Precondition(
            "summaries need at least 2 replications per scenario".into(),
        ));
    }
    if independent.len() != coordinated.len() {
        return Err(Error::Precondition(format!(
            "mismatched scenario shapes: {} independent vs {} coordinated replications",
            independent.len(),
            coordinated.len()
        )));
    }
    for r in independent.iter().chain(coordinated) {
        if r.per_bidder_utility.len() != n_bidders {
            return Err(Error::Precondition(
                "mismatched scenario shapes: bidder count differs across runs".into(),
            ));
        }
    }
    Ok(SummaryRow {
        label: label.into(),
        setting: setting.into(),
        n_bidders,
        horizon,
        replications: independent.len(),
        utility_independent: mean_ci_over_runs(independent, horizon, false),
        utility_coordinated: mean_ci_over_runs(coordinated, horizon, false),
        value_independent: mean_ci_over_runs(independent, horizon, true),
        value_coordinated: mean_ci_over_runs(coordinated, horizon, true),
    })
}

/// As [`summarize_totals`], from full series.
pub fn summarize(
    label: &str,
    setting: &str,
    independent: &[MetricsSeries],
    coordinated: &[MetricsSeries],
) -> Result<SummaryRow> {
    let (n, horizon) = match independent.first().or(coordinated.first()) {
        Some(s) => (s.n_bidders, s.horizon),
        None => return Err(Error::Precondition("no series to summarize".into())),
    };
    if independent
        .iter()
        .chain(coordinated)
        .any(|s| s.n_bidders != n || s.horizon != horizon)
    {
        return Err(Error::Precondition("mismatched scenario shapes across series".into()));
    }
    let ind: Vec<RunTotals> = independent.iter().map(|s| s.totals()).collect();
    let coo: Vec<RunTotals> = coordinated.iter().map(|s| s.totals()).collect();
    summarize_totals(label, setting, n, horizon, &ind, &coo)
}

/// Write trace rows for the given runs (one row per run, round, bidder).
/// An empty slice produces a header-only file. `meta` lines (seed, resolved
/// config) are embedded as comments for auditability.
pub fn write_trace_csv(path: &Path, runs: &[&MetricsSeries], meta: &[String]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path.display().to_string(), e);
    writeln!(w, "{SCHEMA_LINE}").map_err(io_err)?;
    writeln!(
        w,
        "# draw order per round: values for bidders 1..N in index order, then outside bid, then scale"
    )
    .map_err(io_err)?;
    for line in meta {
        writeln!(w, "# {line}").map_err(io_err)?;
    }
    writeln!(w, "{TRACE_HEADER}").map_err(io_err)?;
    for series in runs {
        for t in 0..series.horizon {
            for i in 0..series.n_bidders {
                let k = series.idx(t, i);
                writeln!(
                    w,
                    "{},{},{},{},{},{},{},{},{},{},{},{},{}",
                    series.run_index,
                    t + 1,
                    series.scenario,
                    i + 1,
                    fmt_g9(series.values[k]),
                    fmt_g9(series.bids[k]),
                    series.active[k] as u8,
                    series.won[k] as u8,
                    fmt_g9(series.payments[k]),
                    fmt_g9(series.utilities[k]),
                    fmt_g9(series.lambdas[k]),
                    fmt_g9(series.cum_utility[k]),
                    fmt_g9(series.round_value[t]),
                )
                .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}

/// Parse a trace CSV back into rows (round-trip counterpart of
/// [`write_trace_csv`]).
pub fn parse_trace_csv(path: &Path) -> Result<Vec<TraceRow>> {
    let file = File::open(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let reader = BufReader::new(file);
    let mut rows = Vec::new();
    let mut saw_header = false;
    for line in reader.lines() {
        let line = line.map_err(|e| Error::io(path.display().to_string(), e))?;
        if line.starts_with('#') || line.trim().is_empty() {
            continue;
        }
        if !saw_header {
            if line != TRACE_HEADER {
                return Err(Error::Parse(format!("unexpected trace header: {line}")));
            }
            saw_header = true;
            continue;
        }
        let f: Vec<&str> = line.split(',').collect();
        if f.len() != 13 {
            return Err(Error::Parse(format!("trace row has {} fields, expected 13", f.len())));
        }
        let num = |s: &str| -> Result<f64> {
            s.parse::<f64>().map_err(|_| Error::Parse(format!("bad float '{s}'")))
        };
        rows.push(TraceRow {
            run_id: f[0].parse().map_err(|_| Error::Parse(format!("bad run id '{}'", f[0])))?,
            t: f[1].parse().map_err(|_| Error::Parse(format!("bad round '{}'", f[1])))?,
            scenario: f[2].to_string(),
            bidder: f[3].parse().map_err(|_| Error::Parse(format!("bad bidder '{}'", f[3])))?,
            value: num(f[4])?,
            bid: num(f[5])?,
            active: f[6] == "1",
            won: f[7] == "1",
            payment: num(f[8])?,
            utility: num(f[9])?,
            lambda: num(f[10])?,
            cum_utility: num(f[11])?,
            round_value: num(f[12])?,
        });
    }
    Ok(rows)
}

/// Write the summary document as pretty JSON.
pub fn write_summary_json(path: &Path, doc: &SummaryDocument) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    serde_json::to_writer_pretty(&mut w, doc)
        .map_err(|e| Error::Parse(format!("{}: {e}", path.display())))?;
    w.write_all(b"\n").map_err(|e| Error::io(path.display().to_string(), e))?;
    w.flush().map_err(|e| Error::io(path.display().to_string(), e))
}

/// Write long-format trajectory rows `(scenario, metric, t, mean, ci_lo,
/// ci_hi)` for each band set.
pub fn write_long_csv(path: &Path, bands: &[&TrajectoryBands]) -> Result<()> {
    let file = File::create(path).map_err(|e| Error::io(path.display().to_string(), e))?;
    let mut w = BufWriter::new(file);
    let io_err = |e: std::io::Error| Error::io(path.display().to_string(), e);
    writeln!(w, "{SCHEMA_LINE}").map_err(io_err)?;
    writeln!(w, "scenario,metric,t,mean,ci_lo,ci_hi").map_err(io_err)?;
    for b in bands {
        for (mi, metric) in b.metrics.iter().enumerate() {
            for (pi, t) in b.t_points.iter().enumerate() {
                let (mean, hw) = b.at(mi, pi);
                writeln!(
                    w,
                    "{},{},{},{},{},{}",
                    b.scenario,
                    metric,
                    t,
                    fmt_g9(mean),
                    fmt_g9(mean - hw),
                    fmt_g9(mean + hw),
                )
                .map_err(io_err)?;
            }
        }
    }
    w.flush().map_err(io_err)
}
