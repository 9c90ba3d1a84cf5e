//! Output rendering: versioned JSON envelopes, CSV tables and
//! human-readable text.
//!
//! JSON output wraps every payload in an envelope carrying the schema
//! version, tool version, the effective configuration and the checksum of
//! the dataset analyzed, and keeps full numeric precision. CSV output is a
//! flat, full-precision table of the payload alone. Text tables round
//! p-values and Bayes factors for reading (see the core formatting rules)
//! unless full precision is requested. All three are byte-for-byte
//! deterministic for identical inputs.

use std::fmt::Write as _;
use std::path::Path;

use anyhow::Result;
use clap::ValueEnum;
use serde::Serialize;

use replitool_core::calibration::CalibrationReport;
use replitool_core::criteria::{AnalysisConfig, CriterionRate, PairReport, StudyEvidence};
use replitool_core::evidence::{self, StudyResult};
use replitool_core::format::{format_bf, format_p};
use replitool_core::sensitivity::SensitivityGrid;

/// Version of the JSON envelope layout.
pub const SCHEMA_VERSION: u32 = 1;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Json,
    Csv,
    Table,
}

/// Identity block embedded in every JSON envelope.
#[derive(Debug, Serialize)]
pub struct Tool {
    pub name: &'static str,
    pub version: &'static str,
}

pub fn tool() -> Tool {
    Tool {
        name: env!("CARGO_PKG_NAME"),
        version: env!("CARGO_PKG_VERSION"),
    }
}

/// Where the analyzed dataset came from and what exactly it contained.
#[derive(Debug, Clone, Serialize)]
pub struct DataInfo {
    /// Bundled dataset name or file path.
    pub source: String,
    /// `bundled`, `data-dir` or `file`.
    pub origin: &'static str,
    pub sha256: String,
    pub n_pairs: usize,
    /// Whether the checksum was checked against the pinned value.
    pub verified: bool,
}

/// JSON wrapper around every payload.
#[derive(Serialize)]
pub struct Envelope<'a, T: Serialize> {
    pub schema_version: u32,
    pub tool: Tool,
    pub command: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub data: Option<&'a DataInfo>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub config: Option<&'a AnalysisConfig>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub display_ci_level: Option<f64>,
    pub payload: &'a T,
}

pub fn to_json<T: Serialize>(envelope: &Envelope<'_, T>) -> Result<String> {
    Ok(serde_json::to_string_pretty(envelope)? + "\n")
}

/// Write rendered text to a file or standard output.
pub fn emit(out: Option<&Path>, text: &str) -> Result<()> {
    match out {
        Some(path) => std::fs::write(path, text)?,
        None => print!("{text}"),
    }
    Ok(())
}

/// Number formatting for text tables.
#[derive(Debug, Clone, Copy)]
pub struct Style {
    pub full_precision: bool,
}

impl Style {
    pub fn p(&self, v: f64) -> String {
        if self.full_precision {
            v.to_string()
        } else {
            format_p(v)
        }
    }

    pub fn bf(&self, v: f64) -> String {
        if self.full_precision {
            v.to_string()
        } else {
            format_bf(v)
        }
    }

    pub fn num(&self, v: f64) -> String {
        if self.full_precision {
            v.to_string()
        } else {
            format!("{v:.4}")
        }
    }
}

/// Percentage label for an interval level: 0.9 -> "90%", 0.975 -> "97.5%".
fn pct(level: f64) -> String {
    let x = level * 100.0;
    if (x - x.round()).abs() < 1e-9 {
        format!("{x:.0}%")
    } else {
        format!("{x:.1}%")
    }
}

fn csv_string(build: impl FnOnce(&mut csv::Writer<Vec<u8>>) -> Result<()>) -> Result<String> {
    let mut writer = csv::Writer::from_writer(Vec::new());
    build(&mut writer)?;
    let bytes = writer
        .into_inner()
        .map_err(|e| anyhow::anyhow!("finalizing csv output: {e}"))?;
    Ok(String::from_utf8(bytes)?)
}

fn opt_num<T: ToString>(v: Option<T>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

fn study_line(
    out: &mut String,
    label: &str,
    ev: &StudyEvidence,
    report: &PairReport,
    style: &Style,
    display_ci_level: f64,
) -> Result<()> {
    let study = StudyResult::new(ev.estimate, ev.se, ev.n, report.scale)?;
    let ci = evidence::confidence_interval(study, display_ci_level)?;
    writeln!(
        out,
        "  {label:<13} estimate {:>8}  se {:>7}  n {:>5}  p {:>6}  TOST p {:>6}  BF01 {:>7}  {} CI [{}, {}]",
        style.num(ev.estimate),
        style.num(ev.se),
        ev.n.map(|n| n.to_string()).unwrap_or_else(|| "-".into()),
        style.p(ev.p_used),
        style.p(ev.tost_p),
        style.bf(ev.bf01),
        pct(display_ci_level),
        style.num(ci.lower),
        style.num(ci.upper),
    )?;
    Ok(())
}

pub fn analyze_table(
    reports: &[PairReport],
    style: &Style,
    display_ci_level: f64,
) -> Result<String> {
    let mut out = String::new();
    for (i, report) in reports.iter().enumerate() {
        if i > 0 {
            out.push('\n');
        }
        writeln!(
            out,
            "{} [{}, {} replication{}{}]",
            report.key,
            report.scale,
            report.n_replications,
            if report.n_replications == 1 { "" } else { "s" },
            if report.replication_pooled {
                ", pooled"
            } else {
                ""
            },
        )?;
        study_line(
            &mut out,
            "original:",
            &report.original,
            report,
            style,
            display_ci_level,
        )?;
        study_line(
            &mut out,
            "replication:",
            &report.replication,
            report,
            style,
            display_ci_level,
        )?;
        writeln!(
            out,
            "  {:<13} estimate {:>8}  se {:>7}  p {:>6}   {} prediction interval [{}, {}]",
            "pooled:",
            style.num(report.meta.estimate),
            style.num(report.meta.se),
            style.p(report.meta.p_two_sided.value()),
            pct(report.prediction_interval.level),
            style.num(report.prediction_interval.lower),
            style.num(report.prediction_interval.upper),
        )?;
        let verdicts: Vec<String> = report
            .outcomes
            .iter()
            .map(|o| {
                format!(
                    "{}={}",
                    o.criterion.id(),
                    if o.success { "yes" } else { "no" }
                )
            })
            .collect();
        writeln!(out, "  {:<13} {}", "criteria:", verdicts.join("  "))?;
        for note in &report.notes {
            writeln!(out, "  {:<13} {}", "note:", note.message)?;
        }
    }
    Ok(out)
}

pub fn analyze_csv(reports: &[PairReport]) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "key",
            "project",
            "paper_id",
            "experiment_id",
            "effect_id",
            "scale",
            "n_replications",
            "replication_pooled",
            "original_estimate",
            "original_se",
            "original_n",
            "original_p",
            "original_p_reported",
            "original_tost_p",
            "original_bf01",
            "replication_estimate",
            "replication_se",
            "replication_n",
            "replication_p",
            "replication_p_reported",
            "replication_tost_p",
            "replication_bf01",
            "meta_estimate",
            "meta_se",
            "meta_p",
            "prediction_lower",
            "prediction_upper",
            "non_significance",
            "meta_non_significance",
            "orig_in_repl_ci",
            "repl_in_orig_ci",
            "repl_in_prediction_interval",
            "two_trials",
            "equivalence_tost",
            "bayes_factor_threshold",
        ])?;
        for r in reports {
            let mut record = vec![
                r.key.clone(),
                r.project.clone(),
                r.paper_id.clone(),
                r.experiment_id.clone(),
                r.effect_id.clone(),
                r.scale.to_string(),
                r.n_replications.to_string(),
                r.replication_pooled.to_string(),
                r.original.estimate.to_string(),
                r.original.se.to_string(),
                opt_num(r.original.n),
                r.original.p_used.to_string(),
                opt_num(r.original.p_reported),
                r.original.tost_p.to_string(),
                r.original.bf01.to_string(),
                r.replication.estimate.to_string(),
                r.replication.se.to_string(),
                opt_num(r.replication.n),
                r.replication.p_used.to_string(),
                opt_num(r.replication.p_reported),
                r.replication.tost_p.to_string(),
                r.replication.bf01.to_string(),
                r.meta.estimate.to_string(),
                r.meta.se.to_string(),
                r.meta.p_two_sided.value().to_string(),
                r.prediction_interval.lower.to_string(),
                r.prediction_interval.upper.to_string(),
            ];
            for outcome in &r.outcomes {
                record.push(outcome.success.to_string());
            }
            w.write_record(&record)?;
        }
        Ok(())
    })
}

pub fn rates_table(rates: &[CriterionRate], style: &Style) -> Result<String> {
    let mut out = String::new();
    writeln!(
        out,
        "{:<28} {:>9} {:>6} {:>11}",
        "criterion", "successes", "total", "proportion"
    )?;
    for r in rates {
        writeln!(
            out,
            "{:<28} {:>9} {:>6} {:>11}",
            r.criterion.id(),
            r.successes,
            r.total,
            if style.full_precision {
                r.proportion.to_string()
            } else {
                format!("{:.2}", r.proportion)
            },
        )?;
    }
    Ok(out)
}

pub fn rates_csv(rates: &[CriterionRate]) -> Result<String> {
    csv_string(|w| {
        w.write_record(["criterion", "successes", "total", "proportion"])?;
        for r in rates {
            w.write_record([
                r.criterion.id().to_string(),
                r.successes.to_string(),
                r.total.to_string(),
                r.proportion.to_string(),
            ])?;
        }
        Ok(())
    })
}

pub fn sweep_table(grid: &SensitivityGrid, style: &Style) -> Result<String> {
    let mut out = String::new();
    let mut header = format!("{:<12}", grid.axis.id());
    for t in &grid.thresholds {
        header.push_str(&format!(
            " {:>12}",
            format!("{}={}", grid.axis.threshold_name(), t)
        ));
    }
    writeln!(out, "{header}")?;
    for (value, counts) in grid.grid.iter().zip(&grid.counts) {
        let mut line = format!("{:<12}", style.num(*value));
        for c in counts {
            line.push_str(&format!(" {c:>12}"));
        }
        writeln!(out, "{line}")?;
    }
    writeln!(out, "pairs: {}", grid.n_pairs)?;
    Ok(out)
}

pub fn sweep_csv(grid: &SensitivityGrid) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "axis",
            "axis_value",
            "threshold_name",
            "threshold",
            "successes",
            "n_pairs",
        ])?;
        for (value, counts) in grid.grid.iter().zip(&grid.counts) {
            for (threshold, successes) in grid.thresholds.iter().zip(counts) {
                w.write_record([
                    grid.axis.id().to_string(),
                    value.to_string(),
                    grid.axis.threshold_name().to_string(),
                    threshold.to_string(),
                    successes.to_string(),
                    grid.n_pairs.to_string(),
                ])?;
            }
        }
        Ok(())
    })
}

pub fn calibrate_table(report: &CalibrationReport, style: &Style) -> Result<String> {
    let mut out = String::new();
    let s = &report.scenario;
    writeln!(
        out,
        "scenario: true effect {}, se original {}, se replication {}, sims {}, seed {}",
        s.true_effect, s.se_original, s.se_replication, s.n_sims, s.seed
    )?;
    writeln!(
        out,
        "{:<28} {:>10} {:>11} {:>10}",
        "criterion", "successes", "proportion", "mc_se"
    )?;
    for e in &report.estimates {
        writeln!(
            out,
            "{:<28} {:>10} {:>11} {:>10}",
            e.criterion,
            e.successes,
            if style.full_precision {
                e.proportion.to_string()
            } else {
                format!("{:.4}", e.proportion)
            },
            if style.full_precision {
                e.mc_se.to_string()
            } else {
                format!("{:.5}", e.mc_se)
            },
        )?;
    }
    writeln!(
        out,
        "closed-form non-significance rate: {}",
        if style.full_precision {
            report.analytic_non_significance.to_string()
        } else {
            format!("{:.4}", report.analytic_non_significance)
        },
    )?;
    Ok(out)
}

pub fn calibrate_csv(report: &CalibrationReport) -> Result<String> {
    csv_string(|w| {
        w.write_record(["criterion", "successes", "proportion", "mc_se"])?;
        for e in &report.estimates {
            w.write_record([
                e.criterion.to_string(),
                e.successes.to_string(),
                e.proportion.to_string(),
                e.mc_se.to_string(),
            ])?;
        }
        Ok(())
    })
}

/// Result of an effect-scale conversion.
#[derive(Debug, Serialize)]
pub struct ConversionResult {
    pub from: &'static str,
    pub to: &'static str,
    pub input_estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_se: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub input_n: Option<u64>,
    pub estimate: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub se: Option<f64>,
}

pub fn convert_table(result: &ConversionResult, style: &Style) -> Result<String> {
    let mut out = String::new();
    let mut input = format!("{} {}", result.from, style.num(result.input_estimate));
    if let Some(se) = result.input_se {
        input.push_str(&format!(" (se {})", style.num(se)));
    }
    if let Some(n) = result.input_n {
        input.push_str(&format!(" (n {n})"));
    }
    let mut converted = format!("{} {}", result.to, style.num(result.estimate));
    if let Some(se) = result.se {
        converted.push_str(&format!(" (se {})", style.num(se)));
    }
    writeln!(out, "{input} -> {converted}")?;
    Ok(out)
}

pub fn convert_csv(result: &ConversionResult) -> Result<String> {
    csv_string(|w| {
        w.write_record([
            "from",
            "to",
            "input_estimate",
            "input_se",
            "input_n",
            "estimate",
            "se",
        ])?;
        w.write_record([
            result.from.to_string(),
            result.to.to_string(),
            result.input_estimate.to_string(),
            opt_num(result.input_se),
            opt_num(result.input_n),
            result.estimate.to_string(),
            opt_num(result.se),
        ])?;
        Ok(())
    })
}

/// Outcome of a structural dataset check.
#[derive(Debug, Serialize)]
pub struct ValidationSummary {
    pub source: String,
    pub origin: &'static str,
    pub sha256: String,
    pub verified: bool,
    pub n_pairs: usize,
    pub n_studies: usize,
    pub scales: Vec<String>,
    pub pairs: Vec<PairSummary>,
}

#[derive(Debug, Serialize)]
pub struct PairSummary {
    pub key: String,
    pub scale: String,
    pub n_replications: usize,
    pub has_reported_p: bool,
}

pub fn validate_table(summary: &ValidationSummary) -> Result<String> {
    let mut out = String::new();
    writeln!(out, "source: {} ({})", summary.source, summary.origin)?;
    writeln!(out, "sha256: {}", summary.sha256)?;
    writeln!(
        out,
        "pairs: {}  studies: {}  scales: {}",
        summary.n_pairs,
        summary.n_studies,
        summary.scales.join(", ")
    )?;
    for pair in &summary.pairs {
        writeln!(
            out,
            "  {:<28} {:<9} {} replication{}",
            pair.key,
            pair.scale,
            pair.n_replications,
            if pair.n_replications == 1 { "" } else { "s" },
        )?;
    }
    writeln!(out, "ok")?;
    Ok(out)
}

pub fn validate_csv(summary: &ValidationSummary) -> Result<String> {
    csv_string(|w| {
        w.write_record(["key", "scale", "n_replications", "has_reported_p"])?;
        for pair in &summary.pairs {
            w.write_record([
                pair.key.clone(),
                pair.scale.clone(),
                pair.n_replications.to_string(),
                pair.has_reported_p.to_string(),
            ])?;
        }
        Ok(())
    })
}
