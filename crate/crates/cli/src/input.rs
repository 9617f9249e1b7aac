use std::path::Path;

use anyhow::{anyhow, bail, Context, Result};
use probscore::tournament::{ingest, IngestReport, InputFormat, Tournament};
use probscore::verification::BinaryRecord;

use crate::args::TournamentFiles;

fn open_csv(path: &Path) -> Result<csv::Reader<std::fs::File>> {
    csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_path(path)
        .with_context(|| format!("cannot read {}", path.display()))
}

fn expect_header(path: &Path, reader: &mut csv::Reader<std::fs::File>, required: &[&str], optional: &[&str]) -> Result<usize> {
    let header = reader.headers()?.clone();
    let found: Vec<&str> = header.iter().collect();
    let fits = found.len() >= required.len()
        && found.len() <= required.len() + optional.len()
        && found.iter().zip(required.iter().chain(optional)).all(|(f, e)| f == e);
    if !fits {
        bail!(
            "{}: header must be `{}` (optionally followed by `{}`), found `{}`",
            path.display(),
            required.join(","),
            optional.join(","),
            found.join(",")
        );
    }
    Ok(found.len())
}

fn parse_outcome(text: &str) -> Option<bool> {
    match text {
        "1" | "true" => Some(true),
        "0" | "false" => Some(false),
        _ => None,
    }
}

fn parse_prob(text: &str) -> Option<f64> {
    text.parse::<f64>().ok().filter(|p| (0.0..=1.0).contains(p))
}

fn row_error(path: &Path, row: &csv::StringRecord, what: &str) -> anyhow::Error {
    let line = row.position().map_or(0, |p| p.line());
    anyhow!("{}:{line}: {what}", path.display())
}

/// `forecast,outcome` rows.
pub fn read_record(path: &Path) -> Result<BinaryRecord> {
    let mut reader = open_csv(path)?;
    expect_header(path, &mut reader, &["forecast", "outcome"], &[])?;
    let mut pairs = Vec::new();
    for row in reader.records() {
        let row = row?;
        let q = parse_prob(&row[0]).ok_or_else(|| row_error(path, &row, "forecast must be a number in [0, 1]"))?;
        let x = parse_outcome(&row[1]).ok_or_else(|| row_error(path, &row, "outcome must be 1, 0, true or false"))?;
        pairs.push((q, x));
    }
    if pairs.is_empty() {
        bail!("{}: no rows", path.display());
    }
    Ok(BinaryRecord::from_pairs(pairs)?)
}

pub struct Streams {
    pub qs: Vec<f64>,
    pub qs2: Vec<f64>,
    pub outcomes: Vec<bool>,
    pub truths: Option<Vec<f64>>,
}

/// `q,q_prime,outcome[,p]` rows.
pub fn read_streams(path: &Path) -> Result<Streams> {
    let mut reader = open_csv(path)?;
    let width = expect_header(path, &mut reader, &["q", "q_prime", "outcome"], &["p"])?;
    let mut s = Streams { qs: Vec::new(), qs2: Vec::new(), outcomes: Vec::new(), truths: (width == 4).then(Vec::new) };
    for row in reader.records() {
        let row = row?;
        let prob = |i: usize, name: &str| {
            parse_prob(&row[i]).ok_or_else(|| row_error(path, &row, &format!("{name} must be a number in [0, 1]")))
        };
        s.qs.push(prob(0, "q")?);
        s.qs2.push(prob(1, "q_prime")?);
        s.outcomes
            .push(parse_outcome(&row[2]).ok_or_else(|| row_error(path, &row, "outcome must be 1, 0, true or false"))?);
        if let Some(ps) = s.truths.as_mut() {
            ps.push(prob(3, "p")?);
        }
    }
    if s.qs.is_empty() {
        bail!("{}: no rows", path.display());
    }
    Ok(s)
}

pub fn read_tournament(files: &TournamentFiles) -> Result<(Tournament, IngestReport)> {
    let input = match (&files.events, &files.forecasts, &files.input) {
        (Some(events), Some(forecasts), None) => InputFormat::Delimited { events, forecasts },
        (None, None, Some(path)) => InputFormat::JsonLines(path),
        _ => bail!("give either --events and --forecasts, or --input"),
    };
    Ok(ingest(input)?)
}

/// Loads a TOML simulation config.
pub fn read_sim_config(path: &Path) -> Result<probscore::simulate::SimConfig> {
    let text = std::fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    toml::from_str(&text).with_context(|| format!("{}: invalid simulation config", path.display()))
}
