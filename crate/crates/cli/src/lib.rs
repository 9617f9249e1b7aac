//! Command-line front end for `probscore`.
//!
//! Each subcommand builds a report from [`report`], then renders it as an
//! aligned table, comma-separated text or JSON. Infinite scores print as
//! `-inf` in text and as `{"non_finite": "-inf"}` in JSON.

pub mod args;
mod input;
pub mod report;

use std::fs;
use std::path::Path;

use anyhow::{bail, Context, Result};
use probscore::kelly::{expected_log_growth, kelly_fraction, KellyGame};
use probscore::luck_skill::{compare_forecasters, compare_with_truth};
use probscore::num::{display_score, format_score};
use probscore::simulate::{run_simulation, theoretical_beat_probability, ForecasterSpec, SimConfig, TruthGenerator};
use probscore::tournament::{
    margin_significance, rank_confidence, score_tournament, write_leaderboard_csv, write_trajectories_csv,
};
use probscore::verification::{climatology_decompose, murphy_decompose, BinaryRecord};
use probscore::rules::EllipticalParams;
use probscore::{LogZero, ScoringRule};
use serde::Serialize;

use args::{Cli, Command, CompareArgs, DecomposeArgs, Format, KellyArgs, RulesArgs, ScoreArgs, SimulateArgs};
use report::{
    DecomposeReport, Headline, KellyReport, KellySimulation, RuleRow, RulesReport, ScoreReport, SimulateReport,
};

pub fn run(cli: Cli) -> Result<()> {
    let out = cli.out.as_deref();
    match cli.command {
        Command::Score(args) => score(args, cli.format, out),
        Command::Decompose(args) => decompose(args, cli.format, out),
        Command::Compare(args) => compare(args, cli.format, out),
        Command::Simulate(args) => simulate(args, cli.format, out),
        Command::Kelly(args) => kelly(args, cli.format, out),
        Command::Rules(args) => rules(args, cli.format, out),
    }
}

fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => fs::write(path, text).with_context(|| format!("cannot write {}", path.display())),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn json<T: Serialize>(value: &T) -> Result<String> {
    Ok(serde_json::to_string_pretty(value)? + "\n")
}

fn csv_text(header: &[&str], rows: &[Vec<String>]) -> Result<String> {
    let mut w = csv::Writer::from_writer(Vec::new());
    w.write_record(header)?;
    for row in rows {
        w.write_record(row)?;
    }
    Ok(String::from_utf8(w.into_inner()?)?)
}

fn table(header: &[&str], rows: &[Vec<String>]) -> String {
    let mut widths: Vec<usize> = header.iter().map(|h| h.chars().count()).collect();
    for row in rows {
        for (w, cell) in widths.iter_mut().zip(row) {
            *w = (*w).max(cell.chars().count());
        }
    }
    let line = |cells: Vec<&str>| {
        let padded: Vec<String> = cells.iter().zip(&widths).map(|(c, w)| format!("{c:<w$}")).collect();
        padded.join("  ").trim_end().to_string() + "\n"
    };
    let mut text = line(header.to_vec());
    for row in rows {
        text += &line(row.iter().map(String::as_str).collect());
    }
    text
}

fn key_values(pairs: &[(&str, String)]) -> String {
    let width = pairs.iter().map(|(k, _)| k.len()).max().unwrap_or(0);
    pairs.iter().map(|(k, v)| format!("{k:<width$}  {v}\n")).collect()
}

fn opt_display(v: Option<f64>) -> String {
    v.map(display_score).unwrap_or_else(|| "-".into())
}

fn score(args: ScoreArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let rule = args.rule.resolve()?;
    let (tournament, ingest) = input::read_tournament(&args.files)?;
    for r in &ingest.rejections {
        eprintln!("rejected {r}");
    }
    if !ingest.is_clean() && !args.skip_invalid {
        bail!("{} row(s) rejected; fix them or pass --skip-invalid", ingest.rejections.len());
    }
    let leaderboard = score_tournament(&tournament, &rule, args.missing)?;
    let report = ScoreReport {
        rule,
        missing: args.missing,
        ingest,
        margins: margin_significance(&leaderboard).ok(),
        rank_confidence: rank_confidence(&leaderboard).ok(),
        leaderboard,
    };

    let mut board_csv = Vec::new();
    write_leaderboard_csv(&report.leaderboard, &mut board_csv)?;
    let text = match format {
        Format::Human => render_score(&report),
        Format::Delimited => String::from_utf8(board_csv.clone())?,
        Format::Structured => json(&report)?,
    };
    let Some(dir) = out else {
        return emit(None, &text);
    };
    fs::create_dir_all(dir).with_context(|| format!("cannot create {}", dir.display()))?;
    fs::write(dir.join("leaderboard.csv"), &board_csv)?;
    let mut trajectories = Vec::new();
    write_trajectories_csv(&report.leaderboard, &mut trajectories)?;
    fs::write(dir.join("trajectories.csv"), trajectories)?;
    let name = match format {
        Format::Human => "report.txt",
        Format::Delimited => "report.csv",
        Format::Structured => "report.json",
    };
    emit(Some(&dir.join(name)), &text)
}

fn render_score(report: &ScoreReport) -> String {
    let board = &report.leaderboard;
    let mut text = key_values(&[
        ("rule", board.rule.to_string()),
        ("resolved events", board.resolved_events.len().to_string()),
        ("missing forecasts", format!("{:?}", board.missing).to_lowercase()),
    ]);
    text.push('\n');
    let rows: Vec<Vec<String>> = board
        .entries
        .iter()
        .enumerate()
        .map(|(i, e)| {
            let ci = report.rank_confidence.as_ref().map(|c| &c[i]);
            vec![
                e.rank.to_string(),
                e.forecaster.clone(),
                e.events_scored.to_string(),
                e.imputed.to_string(),
                display_score(e.mean_score),
                opt_display(e.margin_to_next),
                opt_display(e.two_sigma_to_next),
                match ci {
                    Some(ci) if ci.best == ci.worst => ci.best.to_string(),
                    Some(ci) => format!("{}-{}", ci.best, ci.worst),
                    None => "-".into(),
                },
            ]
        })
        .collect();
    text += &table(&["rank", "forecaster", "events", "imputed", "mean", "margin", "2σ", "plausible ranks"], &rows);
    if let Some(margins) = &report.margins {
        if !margins.is_empty() {
            text += "\nadjacent pairs (Brier Δ against twice its σ bound):\n";
            for v in margins {
                text += &format!(
                    "  {} vs {}: Δ = {:.4}, 2σ = {:.4} over {} events, {}\n",
                    v.higher,
                    v.lower,
                    v.delta,
                    2.0 * v.sigma_bound,
                    v.n_common,
                    if v.separated { "separated" } else { "not separated" }
                );
            }
        }
    }
    text
}

fn binary_record_from_tournament(args: &DecomposeArgs) -> Result<BinaryRecord> {
    let forecaster = args.forecaster.as_deref().context("--forecaster is required with tournament files")?;
    let (tournament, ingest) = input::read_tournament(&args.files)?;
    for r in &ingest.rejections {
        eprintln!("rejected {r}");
    }
    let mut pairs = Vec::new();
    for event in tournament.resolved_events() {
        if event.categories != 2 {
            bail!(
                "event `{}` has {} categories; the decomposition needs binary events (k = 2). \
                 Use `probscore score` for multicategory tournaments",
                event.id,
                event.categories
            );
        }
        if let Some(sub) = tournament.submission(forecaster, &event.id) {
            // category 0 is the event
            pairs.push((sub.forecast.probs()[0], event.outcome.map(|o| o.0) == Some(0)));
        }
    }
    if pairs.is_empty() {
        bail!("forecaster `{forecaster}` has no forecasts on resolved events");
    }
    Ok(BinaryRecord::from_pairs(pairs)?)
}

fn decompose(args: DecomposeArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let record = match &args.record {
        Some(path) => input::read_record(path)?,
        None => binary_record_from_tournament(&args)?,
    };
    let report = DecomposeReport {
        events: record.len(),
        murphy: murphy_decompose(&record, &args.binning)?,
        climatology: args.base_frequency.map(|f| climatology_decompose(&record, f)).transpose()?,
    };
    let text = match format {
        Format::Structured => json(&report)?,
        Format::Delimited => {
            let rows: Vec<Vec<String>> = decompose_terms(&report)
                .into_iter()
                .map(|(k, v)| vec![k.to_string(), format_score(v)])
                .collect();
            csv_text(&["term", "value"], &rows)?
        }
        Format::Human => {
            let m = &report.murphy;
            let mut pairs: Vec<(&str, String)> =
                decompose_terms(&report).into_iter().map(|(k, v)| (k, format!("{v:.4}"))).collect();
            pairs.insert(0, ("events", report.events.to_string()));
            let mut text = key_values(&pairs);
            let rows: Vec<Vec<String>> = m
                .bins
                .iter()
                .map(|b| {
                    vec![b.label.clone(), format!("{:.3}", b.forecast), b.count.to_string(), b.trues.to_string(), format!("{:.3}", b.frequency)]
                })
                .collect();
            text.push('\n');
            text += &table(&["bin", "forecast", "count", "trues", "frequency"], &rows);
            if report.climatology.as_ref().is_some_and(|c| c.is_anticorrelated()) {
                text += "\nforecast deviations are anticorrelated with outcomes: the optimal backing is negative\n";
            }
            text
        }
    };
    emit(out, &text)
}

fn decompose_terms(report: &DecomposeReport) -> Vec<(&'static str, f64)> {
    let m = &report.murphy;
    let mut terms = vec![
        ("mean_score", m.mean_score),
        ("uncertainty", m.uncertainty),
        ("resolution", m.resolution),
        ("reliability", m.reliability),
        ("residual", m.residual),
        ("base_rate", m.base_rate),
    ];
    if let Some(c) = &report.climatology {
        terms.extend([
            ("base_frequency", c.base_frequency),
            ("climatology_base", c.base),
            ("frequency_mismatch", c.frequency_mismatch),
            ("gain", c.gain),
            ("stake", c.stake),
            ("scale", c.scale),
        ]);
        if let Some(r) = c.optimal_scale {
            terms.push(("optimal_scale", r));
        }
    }
    terms
}

fn compare(args: CompareArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let s = input::read_streams(&args.streams)?;
    let report = match &s.truths {
        Some(ps) => compare_with_truth(&s.qs, &s.qs2, &s.outcomes, ps)?,
        None => compare_forecasters(&s.qs, &s.qs2, &s.outcomes)?,
    };
    let mut terms = vec![
        ("n", report.n as f64),
        ("delta", report.delta),
        ("sigma_bound", report.sigma_bound),
        ("rms_diff", report.rms_diff),
    ];
    if let Some(z) = report.z_bound {
        terms.push(("z_bound", z));
    }
    if let Some(m) = report.exact {
        terms.extend([("exact_mean", m.mean), ("exact_sd", m.sd())]);
    }
    let text = match format {
        Format::Structured => json(&report)?,
        Format::Delimited => {
            let rows: Vec<Vec<String>> = terms.iter().map(|(k, v)| vec![k.to_string(), format_score(*v)]).collect();
            csv_text(&["term", "value"], &rows)?
        }
        Format::Human => {
            let mut pairs: Vec<(&str, String)> = terms.iter().map(|(k, v)| (*k, format!("{v:.4}"))).collect();
            pairs[0].1 = report.n.to_string();
            let verdict = if report.separated() {
                if report.delta > 0.0 { "q beats q_prime by more than 2σ" } else { "q_prime beats q by more than 2σ" }
            } else {
                "not separated at 2σ"
            };
            pairs.push(("verdict", verdict.to_string()));
            key_values(&pairs)
        }
    };
    emit(out, &text)
}

/// Beat probability of an offset forecaster over the savant, when both are
/// present and the truth is constant.
fn headline(config: &SimConfig, result: &probscore::simulate::SimResult) -> Option<Headline> {
    let TruthGenerator::Constant { p } = config.truth else { return None };
    let savant = config.forecasters.iter().position(|f| f.spec == ForecasterSpec::Savant)?;
    let (offset, delta) = config.forecasters.iter().enumerate().find_map(|(i, f)| match f.spec {
        ForecasterSpec::Offset { delta, .. } => Some((i, delta)),
        _ => None,
    })?;
    if !matches!(config.rule, ScoringRule::Brier) {
        return None;
    }
    let theoretical = theoretical_beat_probability(delta, p, config.n_questions).ok()?;
    Some(Headline {
        forecaster: config.forecasters[offset].name.clone(),
        against: config.forecasters[savant].name.clone(),
        beat_probability: result.split_beat_probability(offset, savant),
        strict_beat_probability: result.beat_probability(offset, savant),
        tie_probability: result.tie_probability(offset, savant),
        standard_error: result.standard_error(theoretical),
        theoretical,
    })
}

fn simulate(args: SimulateArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let mut config = match &args.config {
        Some(path) => input::read_sim_config(path)?,
        None => SimConfig::savant_versus_offset(args.p, args.delta, args.n, args.replicates, 0),
    };
    if let Some(seed) = args.seed {
        config.seed = seed;
    }
    if let Some(rule) = args.rule()? {
        config.rule = rule;
    }
    let result = run_simulation(&config)?;
    if let Some(path) = &args.raw {
        let file = fs::File::create(path).with_context(|| format!("cannot write {}", path.display()))?;
        result.write_replicates_csv(std::io::BufWriter::new(file))?;
    }
    let report = SimulateReport { headline: headline(&config, &result), config, result };
    let r = &report.result;
    let summary_rows = |fmt: fn(f64) -> String| -> Vec<Vec<String>> {
        r.forecasters
            .iter()
            .map(|f| {
                vec![f.name.clone(), fmt(f.mean), fmt(f.sd), fmt(f.min), fmt(f.max), fmt(f.exposure_variance), f.clipped.to_string()]
            })
            .collect()
    };
    let header = ["forecaster", "mean", "sd", "min", "max", "exposure_variance", "clipped"];
    let text = match format {
        Format::Structured => json(&report)?,
        Format::Delimited => csv_text(&header, &summary_rows(format_score))?,
        Format::Human => {
            let mut text = key_values(&[
                ("questions", r.n_questions.to_string()),
                ("replicates", r.n_replicates.to_string()),
                ("seed", r.seed.to_string()),
                ("rule", r.rule.to_string()),
            ]);
            text.push('\n');
            text += &table(&header, &summary_rows(|v| format!("{v:.4}")));
            text += "\nP(row beats column), ties split evenly:\n";
            let names: Vec<&str> = r.forecasters.iter().map(|f| f.name.as_str()).collect();
            let mut head = vec![""];
            head.extend(&names);
            let rows: Vec<Vec<String>> = (0..names.len())
                .map(|i| {
                    let mut row = vec![names[i].to_string()];
                    row.extend((0..names.len()).map(|j| {
                        if i == j { "-".to_string() } else { format!("{:.4}", r.split_beat_probability(i, j)) }
                    }));
                    row
                })
                .collect();
            text += &table(&head, &rows);
            if let Some(h) = &report.headline {
                text += &format!(
                    "\n{} beats {} with probability {:.4} ± {:.4} (strict {:.4}, ties {:.4}); normal approximation {:.4}\n",
                    h.forecaster, h.against, h.beat_probability, h.standard_error, h.strict_beat_probability,
                    h.tie_probability, h.theoretical
                );
            }
            text
        }
    };
    emit(out, &text)
}

fn kelly(args: KellyArgs, format: Format, out: Option<&Path>) -> Result<()> {
    let optimum = kelly_fraction(args.p)?;
    let game = match (args.fraction, args.multiple) {
        (Some(f), _) => KellyGame::new(args.p, f)?,
        (None, Some(c)) => KellyGame::fractional_kelly(args.p, c)?,
        (None, None) if optimum >= 1.0 => {
            bail!("at p = 1 the Kelly stake is the whole bank; choose a stake with --fraction or --multiple")
        }
        (None, None) => KellyGame::new(args.p, optimum)?,
    };
    let growth_at_kelly = if optimum < 1.0 { expected_log_growth(args.p, optimum)? } else { f64::INFINITY };
    let mut simulation = None;
    if let Some(plays) = args.plays {
        let trajectory = game.simulate(plays, args.seed)?;
        if let Some(path) = &args.trajectory {
            let rows: Vec<Vec<String>> = trajectory
                .log_multipliers
                .iter()
                .enumerate()
                .map(|(i, l)| vec![(i + 1).to_string(), format_score(*l), format_score(l.exp())])
                .collect();
            fs::write(path, csv_text(&["play", "log_multiplier", "multiplier"], &rows)?)
                .with_context(|| format!("cannot write {}", path.display()))?;
        }
        simulation = Some(KellySimulation {
            plays,
            seed: args.seed,
            final_log_multiplier: trajectory.log_multipliers.last().copied().unwrap_or(0.0),
            mean_log_growth: trajectory.mean_log_growth(),
        });
    }
    let report = KellyReport {
        p: args.p,
        kelly_fraction: optimum,
        fraction: game.fraction(),
        expected_log_growth: game.expected_log_growth(),
        growth_at_kelly,
        simulation,
    };
    let mut terms = vec![
        ("p", report.p),
        ("kelly_fraction", report.kelly_fraction),
        ("fraction", report.fraction),
        ("expected_log_growth", report.expected_log_growth),
        ("growth_at_kelly", report.growth_at_kelly),
    ];
    if let Some(s) = &report.simulation {
        terms.extend([
            ("plays", s.plays as f64),
            ("final_log_multiplier", s.final_log_multiplier),
            ("mean_log_growth", s.mean_log_growth),
        ]);
    }
    let text = match format {
        Format::Structured => {
            if !report.growth_at_kelly.is_finite() {
                bail!("growth at the Kelly stake is unbounded at p = 1; structured output needs finite values");
            }
            json(&report)?
        }
        Format::Delimited => {
            let rows: Vec<Vec<String>> = terms.iter().map(|(k, v)| vec![k.to_string(), format_score(*v)]).collect();
            csv_text(&["term", "value"], &rows)?
        }
        Format::Human => {
            let pairs: Vec<(&str, String)> = terms
                .iter()
                .map(|(k, v)| (*k, if *k == "plays" { format!("{v}") } else { format!("{v:.4}") }))
                .collect();
            key_values(&pairs)
        }
    };
    emit(out, &text)
}

fn rules(args: RulesArgs, format: Format, out: Option<&Path>) -> Result<()> {
    if args.steps < 2 {
        bail!("--steps must be at least 2");
    }
    let selected: Vec<ScoringRule> = match args.rule {
        Some(name) => vec![args::RuleArgs { rule: name, alpha: args.alpha, log_zero: None }.resolve()?],
        None => {
            let mut all = vec![
                ScoringRule::Brier,
                ScoringRule::Log { zero: LogZero::Infinite },
                ScoringRule::Spherical,
                ScoringRule::Poisson,
            ];
            if let Some(alpha) = args.alpha {
                all.push(ScoringRule::Elliptical { alpha: EllipticalParams::new(alpha)? });
            }
            all
        }
    };
    let mut rows = Vec::new();
    for rule in &selected {
        let triple = rule.triple();
        for i in 1..args.steps {
            let p = i as f64 / args.steps as f64;
            rows.push(RuleRow {
                rule: rule.to_string(),
                p,
                entropy: triple.entropy(p),
                exposure: triple.exposure(p),
                penalty: triple.penalty(p),
                score_if_true: rule.binary_score(p, true)?,
                score_if_false: rule.binary_score(p, false)?,
            });
        }
    }
    let report = RulesReport { rows };
    let header = ["rule", "p", "entropy", "exposure", "penalty", "score_if_true", "score_if_false"];
    let cells = |fmt: &dyn Fn(f64) -> String| -> Vec<Vec<String>> {
        report
            .rows
            .iter()
            .map(|r| {
                vec![r.rule.clone(), format_score(r.p), fmt(r.entropy), fmt(r.exposure), fmt(r.penalty), fmt(r.score_if_true), fmt(r.score_if_false)]
            })
            .collect()
    };
    let text = match format {
        Format::Structured => json(&report)?,
        Format::Delimited => csv_text(&header, &cells(&format_score))?,
        Format::Human => table(&header, &cells(&|v| format!("{v:.4}"))),
    };
    emit(out, &text)
}
