//! Run artifacts for the evolution loop: a JSON-lines event log (one line per
//! notable step) and a history CSV with one best-so-far row per iteration —
//! the convergence-curve data.

use serde::{Deserialize, Serialize};
use std::fs;
use std::io::Write as _;
use std::path::{Path, PathBuf};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EventKind {
    /// The LLM returned a response for this iteration.
    Generated,
    /// The response had no parseable program.
    ParseReject,
    /// The candidate failed the 125% fast filter.
    FilterReject,
    /// Parameter tuning finished (payload carries θ* and subset cost).
    Tuned,
    /// Full-set evaluation finished (payload carries the cost).
    Evaluated,
    /// The LLM query itself failed after retries.
    LlmError,
}

impl EventKind {
    /// Every kind, in the order of the history CSV's count columns.
    pub const ALL: [EventKind; 6] = [
        EventKind::Generated,
        EventKind::ParseReject,
        EventKind::FilterReject,
        EventKind::Tuned,
        EventKind::Evaluated,
        EventKind::LlmError,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            EventKind::Generated => "generated",
            EventKind::ParseReject => "parse_reject",
            EventKind::FilterReject => "filter_reject",
            EventKind::Tuned => "tuned",
            EventKind::Evaluated => "evaluated",
            EventKind::LlmError => "llm_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Event {
    pub iteration: u64,
    pub event: EventKind,
    pub payload: serde_json::Value,
}

/// Append-only JSONL event sink; also keeps events in memory so a finished
/// run can be inspected without re-reading the file.
#[derive(Debug)]
pub struct EventLog {
    path: Option<PathBuf>,
    events: Vec<Event>,
}

impl EventLog {
    pub fn in_memory() -> Self {
        Self { path: None, events: Vec::new() }
    }

    /// Opens an event log for appending, loading any existing events.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let mut events = Vec::new();
        if path.exists() {
            for line in fs::read_to_string(path)?.lines() {
                if line.trim().is_empty() {
                    continue;
                }
                let event: Event = serde_json::from_str(line).map_err(|e| {
                    std::io::Error::new(std::io::ErrorKind::InvalidData, e.to_string())
                })?;
                events.push(event);
            }
        }
        Ok(Self { path: Some(path.to_path_buf()), events })
    }

    pub fn record(
        &mut self,
        iteration: u64,
        kind: EventKind,
        payload: serde_json::Value,
    ) -> std::io::Result<()> {
        let event = Event { iteration, event: kind, payload };
        if let Some(path) = &self.path {
            let mut f = fs::OpenOptions::new().create(true).append(true).open(path)?;
            let line = serde_json::to_string(&event).expect("event serialization is infallible");
            f.write_all(line.as_bytes())?;
            f.write_all(b"\n")?;
            f.flush()?;
        }
        self.events.push(event);
        Ok(())
    }

    /// Drops events from iterations after `iteration` (a crashed iteration's
    /// partial trail) and rewrites the file.
    pub fn truncate_after_iteration(&mut self, iteration: u64) -> std::io::Result<()> {
        if self.events.iter().all(|e| e.iteration <= iteration) {
            return Ok(());
        }
        self.events.retain(|e| e.iteration <= iteration);
        if let Some(path) = &self.path {
            let mut text = String::new();
            for e in &self.events {
                text.push_str(&serde_json::to_string(e).expect("event serialization"));
                text.push('\n');
            }
            fs::write(path, text)?;
        }
        Ok(())
    }

    pub fn events(&self) -> &[Event] {
        &self.events
    }

    /// Per-kind event counts for one iteration, ordered as [`EventKind::ALL`].
    pub fn counts_for(&self, iteration: u64) -> [u64; 6] {
        let mut counts = [0u64; 6];
        for e in self.events.iter().filter(|e| e.iteration == iteration) {
            let slot = EventKind::ALL
                .iter()
                .position(|k| *k == e.event)
                .expect("ALL covers every kind");
            counts[slot] += 1;
        }
        counts
    }
}

/// One history row: the iteration, the best cost seen so far, and the
/// iteration's event counts in [`EventKind::ALL`] order.
#[derive(Debug, Clone, PartialEq)]
pub struct HistoryRow {
    pub iteration: u64,
    pub best_cost: f64,
    pub event_counts: [u64; 6],
}

pub const HISTORY_CSV_HEADER: &str =
    "iteration,best_cost,generated,parse_reject,filter_reject,tuned,evaluated,llm_error";

/// Append-only history CSV writer/reader.
#[derive(Debug)]
pub struct HistoryLog {
    path: PathBuf,
    rows: Vec<HistoryRow>,
}

impl HistoryLog {
    /// Opens (or creates with a header) the history CSV.
    pub fn open(path: &Path) -> std::io::Result<Self> {
        let rows = if path.exists() {
            read_history(path)?
        } else {
            fs::write(path, format!("{HISTORY_CSV_HEADER}\n"))?;
            Vec::new()
        };
        Ok(Self { path: path.to_path_buf(), rows })
    }

    pub fn append(&mut self, row: HistoryRow) -> std::io::Result<()> {
        let mut f = fs::OpenOptions::new().append(true).open(&self.path)?;
        let counts = row
            .event_counts
            .iter()
            .map(|c| c.to_string())
            .collect::<Vec<_>>()
            .join(",");
        writeln!(f, "{},{},{counts}", row.iteration, row.best_cost)?;
        f.flush()?;
        self.rows.push(row);
        Ok(())
    }

    pub fn rows(&self) -> &[HistoryRow] {
        &self.rows
    }

    /// Iteration of the last committed row; 0 when no iteration finished.
    pub fn last_iteration(&self) -> u64 {
        self.rows.last().map_or(0, |r| r.iteration)
    }
}

fn read_history(path: &Path) -> std::io::Result<Vec<HistoryRow>> {
    let bad = |msg: String| std::io::Error::new(std::io::ErrorKind::InvalidData, msg);
    let text = fs::read_to_string(path)?;
    let mut lines = text.lines();
    match lines.next() {
        Some(HISTORY_CSV_HEADER) => {}
        other => return Err(bad(format!("history header was {other:?}"))),
    }
    let mut rows = Vec::new();
    for (i, line) in lines.enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let parts: Vec<&str> = line.split(',').collect();
        let row = (|| -> Option<HistoryRow> {
            if parts.len() != 8 {
                return None;
            }
            let mut event_counts = [0u64; 6];
            for (slot, field) in event_counts.iter_mut().zip(&parts[2..]) {
                *slot = field.parse().ok()?;
            }
            Some(HistoryRow {
                iteration: parts[0].parse().ok()?,
                best_cost: parts[1].parse().ok()?,
                event_counts,
            })
        })()
        .ok_or_else(|| bad(format!("history row {} is malformed: {line}", i + 1)))?;
        rows.push(row);
    }
    Ok(rows)
}
