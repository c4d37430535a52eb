//! CSV and JSON serialization for session records and wage estimates.
//!
//! Readers validate headers and individual fields, reporting the 1-based
//! data-row number and column name on failure. Floats are written with
//! shortest-round-trip formatting, so a write/read cycle reproduces every
//! value bit-for-bit.

use std::collections::BTreeMap;
use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::estimation::WageEstimate;
use crate::schedule::PaymentSchedule;
use crate::sim::SessionRecord;

/// Tolerance for the optional earnings-consistency check on ingest, cents.
const EARNINGS_TOLERANCE: f64 = 1e-6;

const RECORD_HEADERS: [&str; 6] = [
    "worker_id",
    "group",
    "y",
    "t_bar_s",
    "earnings_cents",
    "misses",
];

const ESTIMATE_HEADERS: [&str; 8] = [
    "worker_id",
    "y",
    "t_bar_s",
    "omega_cents_per_s",
    "omega_usd_per_hr",
    "lower_usd_per_hr",
    "upper_usd_per_hr",
    "censored",
];

fn csv_err(row: usize, column: &str, reason: impl Into<String>) -> Error {
    Error::Csv {
        row,
        column: column.to_string(),
        reason: reason.into(),
    }
}

fn check_headers(found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let got: Vec<&str> = found.iter().map(str::trim).collect();
    if got != expected {
        return Err(csv_err(
            0,
            "header",
            format!("expected columns {expected:?}, found {got:?}"),
        ));
    }
    Ok(())
}

fn parse_field<T: std::str::FromStr>(
    record: &csv::StringRecord,
    idx: usize,
    row: usize,
    column: &str,
) -> Result<T>
where
    T::Err: std::fmt::Display,
{
    let raw = record
        .get(idx)
        .ok_or_else(|| csv_err(row, column, "missing field"))?
        .trim();
    raw.parse::<T>()
        .map_err(|e| csv_err(row, column, format!("cannot parse `{raw}`: {e}")))
}

/// Reads session records from CSV. When `schedules` is provided, each
/// record's `y` is checked against its group's cap and its earnings against
/// the schedule's exact payment (a guard against mixing data across
/// schedules); records for groups missing from the map are rejected.
pub fn read_records<R: Read>(
    reader: R,
    schedules: Option<&BTreeMap<String, PaymentSchedule>>,
) -> Result<Vec<SessionRecord>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    check_headers(
        rdr.headers()
            .map_err(|e| csv_err(0, "header", e.to_string()))?,
        &RECORD_HEADERS,
    )?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(row, "row", e.to_string()))?;
        if rec.len() != RECORD_HEADERS.len() {
            return Err(csv_err(
                row,
                "row",
                format!(
                    "expected {} fields, found {}",
                    RECORD_HEADERS.len(),
                    rec.len()
                ),
            ));
        }
        let worker_id: u64 = parse_field(&rec, 0, row, "worker_id")?;
        let group: String = rec.get(1).unwrap_or("").to_string();
        if group.is_empty() {
            return Err(csv_err(row, "group", "must be non-empty"));
        }
        let y: i64 = parse_field(&rec, 2, row, "y")?;
        if y < 0 {
            return Err(csv_err(row, "y", format!("must be non-negative, got {y}")));
        }
        let y = u32::try_from(y).map_err(|_| csv_err(row, "y", format!("out of range: {y}")))?;
        let t_bar: f64 = parse_field(&rec, 3, row, "t_bar_s")?;
        if !t_bar.is_finite() || t_bar <= 0.0 {
            return Err(csv_err(
                row,
                "t_bar_s",
                format!("must be positive, got {t_bar}"),
            ));
        }
        let earnings: f64 = parse_field(&rec, 4, row, "earnings_cents")?;
        if !earnings.is_finite() || earnings < 0.0 {
            return Err(csv_err(
                row,
                "earnings_cents",
                format!("must be non-negative, got {earnings}"),
            ));
        }
        let misses: u32 = parse_field(&rec, 5, row, "misses")?;
        if let Some(schedules) = schedules {
            let sched = schedules.get(&group).ok_or_else(|| {
                csv_err(
                    row,
                    "group",
                    format!("no schedule configured for group `{group}`"),
                )
            })?;
            if y > sched.cap() {
                return Err(csv_err(
                    row,
                    "y",
                    format!("exceeds cap {} for group `{group}`", sched.cap()),
                ));
            }
            let expected = sched.total_payment(y)?;
            if (earnings - expected).abs() > EARNINGS_TOLERANCE {
                return Err(csv_err(
                    row,
                    "earnings_cents",
                    format!("inconsistent with schedule: expected {expected}, got {earnings}"),
                ));
            }
        }
        out.push(SessionRecord {
            worker_id,
            group,
            y,
            t_bar,
            earnings,
            misses,
        });
    }
    Ok(out)
}

/// Writes session records as CSV with the canonical header row.
pub fn write_records<W: Write>(writer: W, records: &[SessionRecord]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in records {
        wtr.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// One row of the wage-estimate CSV.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EstimateRow {
    /// Worker identifier carried over from the session record.
    pub worker_id: u64,
    /// Blocks completed.
    pub y: u32,
    /// Mean block time, seconds.
    pub t_bar_s: f64,
    /// Point estimate of the reservation wage, cents/second.
    pub omega_cents_per_s: f64,
    /// Point estimate, dollars/hour.
    pub omega_usd_per_hr: f64,
    /// Bracket lower bound, dollars/hour.
    pub lower_usd_per_hr: f64,
    /// Bracket upper bound, dollars/hour.
    pub upper_usd_per_hr: f64,
    /// Whether the worker hit the output cap (bracket open below).
    pub censored: bool,
}

impl EstimateRow {
    /// Builds a row from a worker's identity and imputation result.
    pub fn new(worker_id: u64, estimate: &WageEstimate) -> Self {
        EstimateRow {
            worker_id,
            y: estimate.y,
            t_bar_s: estimate.t_bar,
            omega_cents_per_s: estimate.omega_hat,
            omega_usd_per_hr: estimate.omega_usd_per_hour(),
            lower_usd_per_hr: estimate.lower_usd_per_hour(),
            upper_usd_per_hr: estimate.upper_usd_per_hour(),
            censored: estimate.censored,
        }
    }
}

/// Writes wage-estimate rows as CSV.
pub fn write_estimates<W: Write>(writer: W, rows: &[EstimateRow]) -> Result<()> {
    let mut wtr = csv::Writer::from_writer(writer);
    for r in rows {
        wtr.serialize(r).map_err(|e| Error::Config(e.to_string()))?;
    }
    wtr.flush()?;
    Ok(())
}

/// Reads wage-estimate rows from CSV, validating headers and fields.
pub fn read_estimates<R: Read>(reader: R) -> Result<Vec<EstimateRow>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);
    check_headers(
        rdr.headers()
            .map_err(|e| csv_err(0, "header", e.to_string()))?,
        &ESTIMATE_HEADERS,
    )?;
    let mut out = Vec::new();
    for (i, rec) in rdr.records().enumerate() {
        let row = i + 1;
        let rec = rec.map_err(|e| csv_err(row, "row", e.to_string()))?;
        if rec.len() != ESTIMATE_HEADERS.len() {
            return Err(csv_err(
                row,
                "row",
                format!(
                    "expected {} fields, found {}",
                    ESTIMATE_HEADERS.len(),
                    rec.len()
                ),
            ));
        }
        let censored_raw = rec.get(7).unwrap_or("").trim();
        let censored = match censored_raw {
            "true" => true,
            "false" => false,
            other => {
                return Err(csv_err(
                    row,
                    "censored",
                    format!("expected true/false, got `{other}`"),
                ))
            }
        };
        let parsed = EstimateRow {
            worker_id: parse_field(&rec, 0, row, "worker_id")?,
            y: parse_field(&rec, 1, row, "y")?,
            t_bar_s: parse_field(&rec, 2, row, "t_bar_s")?,
            omega_cents_per_s: parse_field(&rec, 3, row, "omega_cents_per_s")?,
            omega_usd_per_hr: parse_field(&rec, 4, row, "omega_usd_per_hr")?,
            lower_usd_per_hr: parse_field(&rec, 5, row, "lower_usd_per_hr")?,
            upper_usd_per_hr: parse_field(&rec, 6, row, "upper_usd_per_hr")?,
            censored,
        };
        for (value, column) in [
            (parsed.t_bar_s, "t_bar_s"),
            (parsed.omega_cents_per_s, "omega_cents_per_s"),
            (parsed.omega_usd_per_hr, "omega_usd_per_hr"),
        ] {
            if !value.is_finite() || value < 0.0 {
                return Err(csv_err(
                    row,
                    column,
                    format!("must be non-negative, got {value}"),
                ));
            }
        }
        out.push(parsed);
    }
    Ok(out)
}

/// Serializes any result type as pretty-printed JSON.
pub fn write_json<W: Write, T: Serialize>(mut writer: W, value: &T) -> Result<()> {
    serde_json::to_writer_pretty(&mut writer, value).map_err(|e| Error::Config(e.to_string()))?;
    writer.write_all(b"\n")?;
    Ok(())
}
