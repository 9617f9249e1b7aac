//! Reading tournament files.
//!
//! Delimited input is two comma-separated files with a header row:
//!
//! ```text
//! event_id,round,k,outcome          (outcome empty while unresolved)
//! forecaster_id,event_id,probs      (probs like 0.5;0.3;0.2; optional 4th column `round`)
//! ```
//!
//! The single-file alternative has one JSON object per line:
//!
//! ```text
//! {"kind":"event","event_id":"m1","round":1,"k":3,"outcome":0}
//! {"kind":"forecast","forecaster_id":"A","event_id":"m1","probs":[0.5,0.3,0.2]}
//! ```
//!
//! Bad rows are collected in the [`IngestReport`]; only unreadable input
//! or a wrong header is fatal.

use std::fs::File;
use std::io::{BufRead, BufReader, Read};
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{EventRecord, ForecastSubmission, Tournament};
use crate::error::{Error, Result};
use crate::rules::Forecast;

pub const EVENTS_HEADER: [&str; 4] = ["event_id", "round", "k", "outcome"];

/// A row that was not loaded, and why.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Rejection {
    pub file: String,
    /// 1-based line number.
    pub line: u64,
    pub reason: String,
}

impl std::fmt::Display for Rejection {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}:{}: {}", self.file, self.line, self.reason)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct IngestReport {
    pub events_accepted: usize,
    pub submissions_accepted: usize,
    pub rejections: Vec<Rejection>,
}

impl IngestReport {
    pub fn is_clean(&self) -> bool {
        self.rejections.is_empty()
    }

    fn reject(&mut self, file: &str, line: u64, reason: impl Into<String>) {
        self.rejections.push(Rejection {
            file: file.to_string(),
            line,
            reason: reason.into(),
        });
    }
}

/// Where to read a tournament from.
#[derive(Debug, Clone, Copy)]
pub enum InputFormat<'a> {
    Delimited { events: &'a Path, forecasts: &'a Path },
    JsonLines(&'a Path),
}

pub fn ingest(input: InputFormat<'_>) -> Result<(Tournament, IngestReport)> {
    match input {
        InputFormat::Delimited { events, forecasts } => ingest_delimited(open(events)?, open(forecasts)?),
        InputFormat::JsonLines(path) => ingest_json_lines(open(path)?),
    }
}

fn open(path: &Path) -> Result<File> {
    File::open(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))
}

fn reader<R: Read>(input: R) -> csv::Reader<R> {
    csv::ReaderBuilder::new()
        .has_headers(false)
        .flexible(true)
        .trim(csv::Trim::All)
        .from_reader(input)
}

fn check_header(file: &str, found: &csv::StringRecord, expected: &[&str]) -> Result<()> {
    let ok = found.len() >= expected.len() && expected.iter().zip(found.iter()).all(|(e, f)| e == &f);
    if ok {
        Ok(())
    } else {
        Err(Error::HeaderMismatch {
            file: file.to_string(),
            expected: expected.join(","),
            found: found.iter().collect::<Vec<_>>().join(","),
        })
    }
}

fn line_of(record: &csv::StringRecord) -> u64 {
    record.position().map_or(0, |p| p.line())
}

pub fn ingest_delimited<E: Read, F: Read>(events: E, forecasts: F) -> Result<(Tournament, IngestReport)> {
    let mut tournament = Tournament::new();
    let mut report = IngestReport::default();

    let mut rows = reader(events).into_records();
    if let Some(header) = rows.next() {
        let header = header.map_err(|e| Error::Io(e.to_string()))?;
        check_header("events", &header, &EVENTS_HEADER)?;
        if header.len() != EVENTS_HEADER.len() {
            return Err(Error::HeaderMismatch {
                file: "events".into(),
                expected: EVENTS_HEADER.join(","),
                found: header.iter().collect::<Vec<_>>().join(","),
            });
        }
    }
    for row in rows {
        let row = row.map_err(|e| Error::Io(e.to_string()))?;
        let line = line_of(&row);
        match parse_event_row(&row) {
            Ok(event) => match tournament.add_event(event) {
                Ok(()) => report.events_accepted += 1,
                Err(e) => report.reject("events", line, e.to_string()),
            },
            Err(reason) => report.reject("events", line, reason),
        }
    }

    let mut rows = reader(forecasts).into_records();
    let mut has_round = false;
    if let Some(header) = rows.next() {
        let header = header.map_err(|e| Error::Io(e.to_string()))?;
        check_header("forecasts", &header, &["forecaster_id", "event_id"])?;
        match header.len() {
            3 => {}
            4 if header.get(3) == Some("round") => has_round = true,
            _ => {
                return Err(Error::HeaderMismatch {
                    file: "forecasts".into(),
                    expected: "forecaster_id,event_id,probs[,round]".into(),
                    found: header.iter().collect::<Vec<_>>().join(","),
                })
            }
        }
    }
    for row in rows {
        let row = row.map_err(|e| Error::Io(e.to_string()))?;
        let line = line_of(&row);
        let expected = if has_round { 4 } else { 3 };
        if row.len() != expected {
            report.reject("forecasts", line, format!("expected {expected} fields, found {}", row.len()));
            continue;
        }
        let probs = match parse_probs(&row[2]) {
            Ok(p) => p,
            Err(reason) => {
                report.reject("forecasts", line, reason);
                continue;
            }
        };
        let round = if has_round {
            match row[3].parse::<u32>() {
                Ok(r) => Some(r),
                Err(_) => {
                    report.reject("forecasts", line, format!("bad round `{}`", &row[3]));
                    continue;
                }
            }
        } else {
            None
        };
        add_forecast(&mut tournament, &mut report, "forecasts", line, &row[0], &row[1], probs, round);
    }
    Ok((tournament, report))
}

fn parse_event_row(row: &csv::StringRecord) -> std::result::Result<EventRecord, String> {
    if row.len() != 4 {
        return Err(format!("expected 4 fields, found {}", row.len()));
    }
    if row[0].is_empty() {
        return Err("empty event id".into());
    }
    let round = row[1].parse::<u32>().map_err(|_| format!("bad round `{}`", &row[1]))?;
    let k = row[2].parse::<usize>().map_err(|_| format!("bad category count `{}`", &row[2]))?;
    let outcome = if row[3].is_empty() {
        None
    } else {
        Some(row[3].parse::<usize>().map_err(|_| format!("bad outcome `{}`", &row[3]))?)
    };
    EventRecord::new(&row[0], round, k, outcome).map_err(|e| e.to_string())
}

fn parse_probs(field: &str) -> std::result::Result<Vec<f64>, String> {
    field
        .split(';')
        .map(|t| {
            let t = t.trim();
            t.parse::<f64>()
                .ok()
                .filter(|v| v.is_finite())
                .ok_or_else(|| format!("bad probability `{t}`"))
        })
        .collect()
}

#[allow(clippy::too_many_arguments)]
fn add_forecast(
    tournament: &mut Tournament,
    report: &mut IngestReport,
    file: &str,
    line: u64,
    forecaster: &str,
    event: &str,
    probs: Vec<f64>,
    round: Option<u32>,
) {
    if forecaster.is_empty() {
        report.reject(file, line, "empty forecaster id");
        return;
    }
    let forecast = match Forecast::new(probs) {
        Ok(f) => f,
        Err(e) => {
            report.reject(file, line, e.to_string());
            return;
        }
    };
    let Some(event_round) = tournament.event(event).map(|e| e.round) else {
        report.reject(file, line, format!("unknown event `{event}`"));
        return;
    };
    let submission = ForecastSubmission {
        forecaster: forecaster.to_string(),
        event: event.to_string(),
        forecast,
        round: round.unwrap_or(event_round),
    };
    match tournament.add_submission(submission) {
        Ok(()) => report.submissions_accepted += 1,
        Err(e) => report.reject(file, line, e.to_string()),
    }
}

#[derive(Deserialize)]
#[serde(tag = "kind", rename_all = "lowercase", deny_unknown_fields)]
enum JsonLine {
    Event {
        event_id: String,
        round: u32,
        k: usize,
        #[serde(default)]
        outcome: Option<usize>,
    },
    Forecast {
        forecaster_id: String,
        event_id: String,
        probs: Vec<f64>,
        #[serde(default)]
        round: Option<u32>,
    },
}

/// Events are loaded before forecasts, so lines may come in any order.
pub fn ingest_json_lines<R: Read>(input: R) -> Result<(Tournament, IngestReport)> {
    let mut tournament = Tournament::new();
    let mut report = IngestReport::default();
    let mut forecasts = Vec::new();
    for (i, line) in BufReader::new(input).lines().enumerate() {
        let line_no = i as u64 + 1;
        let text = line?;
        if text.trim().is_empty() {
            continue;
        }
        match serde_json::from_str::<JsonLine>(&text) {
            Ok(JsonLine::Event { event_id, round, k, outcome }) => {
                match EventRecord::new(event_id, round, k, outcome).and_then(|e| tournament.add_event(e)) {
                    Ok(()) => report.events_accepted += 1,
                    Err(e) => report.reject("input", line_no, e.to_string()),
                }
            }
            Ok(JsonLine::Forecast { forecaster_id, event_id, probs, round }) => {
                forecasts.push((line_no, forecaster_id, event_id, probs, round));
            }
            Err(e) => report.reject("input", line_no, e.to_string()),
        }
    }
    for (line, forecaster, event, probs, round) in forecasts {
        add_forecast(&mut tournament, &mut report, "input", line, &forecaster, &event, probs, round);
    }
    Ok((tournament, report))
}
