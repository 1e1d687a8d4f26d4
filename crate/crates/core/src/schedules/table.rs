//! Plain-text schedule tables: a `n,log_s,log_t,log_digit` header, then one
//! comma-separated row per position. Lines starting with `#` are comments;
//! `log_digit` may be empty, and extra trailing columns are ignored.

use std::io::{BufRead, Write};

use super::sample::SamplePoint;
use super::DigitSchedule;
use crate::error::{domain, Result};
use crate::report::{format_opt, format_sig};

pub const TABLE_HEADER: &str = "n,log_s,log_t,log_digit";

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScheduleRow {
    pub n: u64,
    pub log_s: f64,
    pub log_t: f64,
    pub log_digit: Option<f64>,
}

/// Rows `1 … depth`, with digits from `point` where it reaches.
pub fn schedule_rows(schedule: &DigitSchedule, point: Option<&SamplePoint>, depth: usize) -> Vec<ScheduleRow> {
    (1..=depth as u64)
        .map(|n| ScheduleRow {
            n,
            log_s: schedule.log_s(n),
            log_t: schedule.log_t(n),
            log_digit: point.and_then(|p| p.log_digits.get(n as usize - 1).copied()),
        })
        .collect()
}

pub fn write_table<W: Write>(mut out: W, rows: &[ScheduleRow]) -> std::io::Result<()> {
    writeln!(out, "{TABLE_HEADER}")?;
    for r in rows {
        writeln!(out, "{},{},{},{}", r.n, format_sig(r.log_s), format_sig(r.log_t), format_opt(r.log_digit))?;
    }
    Ok(())
}

pub fn read_table<R: BufRead>(input: R) -> Result<Vec<ScheduleRow>> {
    let mut rows = Vec::new();
    let mut seen_header = false;
    for (i, line) in input.lines().enumerate() {
        let line = line.map_err(|e| crate::Error::Domain(format!("reading schedule table: {e}")))?;
        let line = line.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if !seen_header {
            if !(line == TABLE_HEADER || line.starts_with(&format!("{TABLE_HEADER},"))) {
                return domain(format!("line {}: expected header `{TABLE_HEADER}`", i + 1));
            }
            seen_header = true;
            continue;
        }
        let fields: Vec<&str> = line.split(',').collect();
        if fields.len() < 4 {
            return domain(format!("line {}: expected at least 4 fields, got {}", i + 1, fields.len()));
        }
        let num = |s: &str| -> Result<f64> {
            s.trim().parse().or_else(|_| domain(format!("line {}: bad number `{s}`", i + 1)))
        };
        let n: u64 = fields[0].trim().parse().or_else(|_| domain(format!("line {}: bad index", i + 1)))?;
        if n != rows.len() as u64 + 1 {
            return domain(format!("line {}: expected n = {}, got {n}", i + 1, rows.len() + 1));
        }
        rows.push(ScheduleRow {
            n,
            log_s: num(fields[1])?,
            log_t: num(fields[2])?,
            log_digit: if fields[3].trim().is_empty() { None } else { Some(num(fields[3])?) },
        });
    }
    if !seen_header {
        return domain("schedule table has no header");
    }
    Ok(rows)
}

/// A table-backed schedule from parsed rows.
pub fn schedule_from_rows(rows: &[ScheduleRow]) -> Result<DigitSchedule> {
    DigitSchedule::from_table(rows.iter().map(|r| r.log_s).collect(), rows.iter().map(|r| r.log_t).collect())
}
