//! Parsing, validation, filtering, and summary statistics for request
//! traces in the canonical CSV format.
//!
//! The canonical format is UTF-8 CSV with `\n` line endings, a mandatory
//! `timestamp,user,size,printer` header, and one event per line:
//!
//! ```text
//! timestamp,user,size,printer
//! 1041379200,alice,524288,chrome
//! 1041379261,bob,1048576,chrome
//! ```
//!
//! Timestamps are integer Unix seconds (1 s resolution), sizes are
//! non-negative integer bytes. The `user` and `printer` fields are opaque
//! labels and must not contain commas or newlines.

use std::collections::HashMap;
use std::io::{BufRead, Write};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Expected header line of the canonical trace format.
pub const HEADER: &str = "timestamp,user,size,printer";

/// A single timestamped, sized, user-attributed request.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PrintEvent {
    /// Seconds since epoch, 1 s resolution.
    pub timestamp: u64,
    /// Opaque user identifier, nonempty.
    pub user: String,
    /// Request size in bytes.
    pub size: u64,
    /// Label of the device or queue the request was sent to.
    pub printer: String,
}

/// A trace of events sorted ascending by timestamp (ties allowed).
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EventLog {
    events: Vec<PrintEvent>,
}

impl EventLog {
    /// Build a log from events, stable-sorting by timestamp so ties keep
    /// their input order.
    pub fn from_events(mut events: Vec<PrintEvent>) -> Self {
        events.sort_by_key(|e| e.timestamp);
        EventLog { events }
    }

    pub fn events(&self) -> &[PrintEvent] {
        &self.events
    }

    pub fn len(&self) -> usize {
        self.events.len()
    }

    pub fn is_empty(&self) -> bool {
        self.events.is_empty()
    }

    /// Time span of the record in seconds: last timestamp minus first.
    /// Zero for logs with fewer than two events.
    pub fn span(&self) -> u64 {
        match (self.events.first(), self.events.last()) {
            (Some(first), Some(last)) => last.timestamp - first.timestamp,
            _ => 0,
        }
    }

    /// Number of events with size strictly greater than `threshold`.
    pub fn count_larger_than(&self, threshold: u64) -> usize {
        self.events.iter().filter(|e| e.size > threshold).count()
    }
}

/// Dataset-level summary of a trace.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SummaryStats {
    /// Number of distinct users.
    pub n_users: usize,
    /// Number of users issuing more than three requests.
    pub n_users_gt3: usize,
    /// Total number of requests.
    pub n_requests: usize,
    /// Arithmetic mean request size in bytes.
    pub mean_size: f64,
    /// Mean time between requests in seconds: span / (n_requests - 1).
    pub mean_interval: f64,
    /// Smallest positive gap between consecutive events, in seconds.
    /// Falls back to 1.0 (the format resolution) when every event shares
    /// one timestamp.
    pub min_resolution: f64,
}

/// Parse a trace from a reader in the canonical CSV format.
///
/// Events are returned sorted by timestamp; ties keep file order. Line
/// numbers in errors count from 1 and include the header.
pub fn parse_log<R: BufRead>(reader: R) -> Result<EventLog> {
    let mut lines = reader.lines();
    let header = match lines.next() {
        Some(line) => line?,
        None => return Err(Error::EmptyLog),
    };
    if trim_newline(&header) != HEADER {
        return Err(Error::Parse {
            line: 1,
            message: format!(
                "expected header `{HEADER}`, found `{}`",
                trim_newline(&header)
            ),
        });
    }

    let mut events = Vec::new();
    for (idx, line) in lines.enumerate() {
        let line_no = idx + 2;
        let line = line?;
        let line = trim_newline(&line);
        if line.is_empty() {
            continue;
        }
        events.push(parse_line(line, line_no)?);
    }
    if events.is_empty() {
        return Err(Error::EmptyLog);
    }
    Ok(EventLog::from_events(events))
}

/// Convenience wrapper over [`parse_log`] for in-memory text.
pub fn parse_log_str(text: &str) -> Result<EventLog> {
    parse_log(text.as_bytes())
}

fn trim_newline(line: &str) -> &str {
    line.strip_suffix('\r').unwrap_or(line)
}

fn parse_line(line: &str, line_no: usize) -> Result<PrintEvent> {
    let fields: Vec<&str> = line.split(',').collect();
    if fields.len() != 4 {
        return Err(Error::Parse {
            line: line_no,
            message: format!("expected 4 fields, found {}", fields.len()),
        });
    }
    let timestamp = parse_unsigned(fields[0], "timestamp", line_no)?;
    let user = fields[1];
    if user.is_empty() {
        return Err(Error::Parse {
            line: line_no,
            message: "empty user".to_string(),
        });
    }
    let size = parse_unsigned(fields[2], "size", line_no)?;
    Ok(PrintEvent {
        timestamp,
        user: user.to_string(),
        size,
        printer: fields[3].to_string(),
    })
}

fn parse_unsigned(field: &str, name: &str, line_no: usize) -> Result<u64> {
    // Parse through i64 first so negative values get their own message.
    match field.parse::<i64>() {
        Ok(v) if v >= 0 => Ok(v as u64),
        Ok(v) => Err(Error::Parse {
            line: line_no,
            message: format!("negative {name} `{v}`"),
        }),
        Err(_) => match field.parse::<u64>() {
            Ok(v) => Ok(v),
            Err(_) => Err(Error::Parse {
                line: line_no,
                message: format!("invalid {name} `{field}`"),
            }),
        },
    }
}

/// Write a log in the canonical CSV format. Inverse of [`parse_log`].
pub fn write_log<W: Write>(log: &EventLog, mut writer: W) -> Result<()> {
    writeln!(writer, "{HEADER}")?;
    for event in log.events() {
        writeln!(
            writer,
            "{},{},{},{}",
            event.timestamp, event.user, event.size, event.printer
        )?;
    }
    Ok(())
}

/// Render a log as a canonical CSV string.
pub fn log_to_string(log: &EventLog) -> String {
    let mut out = Vec::new();
    write_log(log, &mut out).expect("writing to a Vec cannot fail");
    String::from_utf8(out).expect("canonical CSV is UTF-8")
}

/// Predicates for [`filter_events`]. Unset fields match everything.
#[derive(Debug, Clone, Default)]
pub struct EventFilter {
    /// Keep events sent to this printer.
    pub printer: Option<String>,
    /// Keep events with timestamp >= t_min.
    pub t_min: Option<u64>,
    /// Keep events with timestamp <= t_max.
    pub t_max: Option<u64>,
    /// Keep events with size strictly greater than this. The default of 0
    /// drops size-0 events.
    pub min_size: u64,
}

/// Select the events matching every predicate, preserving order.
///
/// The size predicate is strict (`size > min_size`), so the default
/// `min_size = 0` drops size-0 events. An empty result is valid.
pub fn filter_events(log: &EventLog, filter: &EventFilter) -> Result<EventLog> {
    if let (Some(lo), Some(hi)) = (filter.t_min, filter.t_max) {
        if lo > hi {
            return Err(Error::InvalidParameter(format!(
                "t_min {lo} exceeds t_max {hi}"
            )));
        }
    }
    let events = log
        .events()
        .iter()
        .filter(|e| {
            filter.printer.as_deref().is_none_or(|p| e.printer == p)
                && filter.t_min.is_none_or(|lo| e.timestamp >= lo)
                && filter.t_max.is_none_or(|hi| e.timestamp <= hi)
                && e.size > filter.min_size
        })
        .cloned()
        .collect();
    Ok(EventLog { events })
}

/// Compute dataset-level summary statistics. Requires at least 2 events.
pub fn summarize(log: &EventLog) -> Result<SummaryStats> {
    let events = log.events();
    if events.len() < 2 {
        return Err(Error::InsufficientData(format!(
            "summary needs at least 2 events, got {}",
            events.len()
        )));
    }

    let mut per_user: HashMap<&str, usize> = HashMap::new();
    for event in events {
        *per_user.entry(event.user.as_str()).or_insert(0) += 1;
    }
    let n_users = per_user.len();
    let n_users_gt3 = per_user.values().filter(|&&n| n > 3).count();

    let n_requests = events.len();
    let mean_size = events.iter().map(|e| e.size as f64).sum::<f64>() / n_requests as f64;
    let mean_interval = log.span() as f64 / (n_requests - 1) as f64;

    let min_resolution = events
        .windows(2)
        .map(|w| w[1].timestamp - w[0].timestamp)
        .filter(|&gap| gap > 0)
        .min()
        .map_or(1.0, |gap| gap as f64);

    Ok(SummaryStats {
        n_users,
        n_users_gt3,
        n_requests,
        mean_size,
        mean_interval,
        min_resolution,
    })
}
