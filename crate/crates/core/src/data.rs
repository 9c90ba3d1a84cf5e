//! Dataset model, CSV input/output and effect-scale conversions.
//!
//! A dataset is a flat CSV with one row per study. Rows are grouped into
//! [`StudyPair`]s by the key `(project, paper_id, experiment_id, effect_id)`;
//! each pair must contain exactly one `original` row and at least one
//! `replication` row (multiple replications of the same original are
//! distinguished by `internal_rep`). Parsing is strict: every malformed cell
//! reports its 1-based line number and field name, and structural problems
//! (duplicate rows, replications without an original, originals without
//! replications, scale disagreement within a pair) are hard errors.
//!
//! Expected columns:
//! `project, paper_id, experiment_id, effect_id, role, internal_rep,
//! estimate, se, n, scale, reported_p, is_null_result`
//! — `n` and `reported_p` may be empty; all other cells are required.

use std::collections::HashMap;
use std::fmt;
use std::io::{Read, Write};
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::criteria::StudyPair;
use crate::error::Error;
use crate::evidence::StudyResult;
use crate::Result;

/// Multiply a log odds ratio by this constant to approximate a standardized
/// mean difference (logistic-to-normal variance matching: sqrt(3)/pi).
pub const LOG_OR_TO_SMD: f64 = 0.551_328_895_421_792_1;

/// The effect-size scale a study is measured on.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum EffectScale {
    /// Standardized mean difference (Cohen's d / Hedges' g).
    Smd,
    /// Natural-log odds ratio.
    LogOr,
    /// Fisher z-transformed correlation.
    FisherZ,
    /// Unstandardized effect in the study's own units.
    Raw,
}

impl EffectScale {
    /// All supported scales, in display order.
    pub const ALL: [EffectScale; 4] = [
        EffectScale::Smd,
        EffectScale::LogOr,
        EffectScale::FisherZ,
        EffectScale::Raw,
    ];

    /// Canonical lower-case name, as used in CSV files.
    pub fn as_str(self) -> &'static str {
        match self {
            EffectScale::Smd => "smd",
            EffectScale::LogOr => "log_or",
            EffectScale::FisherZ => "fisher_z",
            EffectScale::Raw => "raw",
        }
    }
}

impl fmt::Display for EffectScale {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for EffectScale {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "smd" => Ok(EffectScale::Smd),
            "log_or" => Ok(EffectScale::LogOr),
            "fisher_z" => Ok(EffectScale::FisherZ),
            "raw" => Ok(EffectScale::Raw),
            other => Err(format!(
                "unknown effect scale '{other}' (expected smd, log_or, fisher_z or raw)"
            )),
        }
    }
}

/// Whether a row is the original study or one of its replications.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StudyRole {
    Original,
    Replication,
}

impl fmt::Display for StudyRole {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            StudyRole::Original => "original",
            StudyRole::Replication => "replication",
        })
    }
}

/// One CSV row: a single study with its identifying key.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyRecord {
    pub project: String,
    pub paper_id: String,
    pub experiment_id: String,
    pub effect_id: String,
    pub role: StudyRole,
    /// 1-based index distinguishing internal replications of one original.
    pub internal_rep: u32,
    /// Effect estimate on `scale`.
    pub estimate: f64,
    /// Standard error of `estimate`; strictly positive.
    pub se: f64,
    /// Sample size, when known.
    pub n: Option<u64>,
    pub scale: EffectScale,
    /// Two-sided p-value quoted in the source publication, if any.
    pub reported_p: Option<f64>,
    /// Whether the study's authors interpreted it as a null result.
    pub is_null_result: bool,
}

const COLUMNS: [&str; 12] = [
    "project",
    "paper_id",
    "experiment_id",
    "effect_id",
    "role",
    "internal_rep",
    "estimate",
    "se",
    "n",
    "scale",
    "reported_p",
    "is_null_result",
];

/// Parse CSV text into validated study records (no grouping).
pub fn parse_records(csv_text: &str) -> Result<Vec<StudyRecord>> {
    Ok(read_rows(csv_text.as_bytes())?
        .into_iter()
        .map(|(_, r)| r)
        .collect())
}

/// Read and group a dataset from any reader.
pub fn read_pairs<R: Read>(reader: R) -> Result<Vec<StudyPair>> {
    group_rows(read_rows(reader)?)
}

/// Parse CSV text into grouped, validated study pairs.
pub fn parse_pairs(csv_text: &str) -> Result<Vec<StudyPair>> {
    read_pairs(csv_text.as_bytes())
}

/// Load and group a dataset from a file path.
pub fn load_pairs<P: AsRef<Path>>(path: P) -> Result<Vec<StudyPair>> {
    read_pairs(std::fs::File::open(path)?)
}

/// Write records back out in the canonical column order.
///
/// Numeric cells use shortest-round-trip formatting, so
/// `parse_records(write_records(rows)) == rows` exactly.
pub fn write_records<W: Write>(writer: W, records: &[StudyRecord]) -> Result<()> {
    let mut w = csv::Writer::from_writer(writer);
    w.write_record(COLUMNS)?;
    for r in records {
        w.write_record([
            r.project.as_str(),
            r.paper_id.as_str(),
            r.experiment_id.as_str(),
            r.effect_id.as_str(),
            &r.role.to_string(),
            &r.internal_rep.to_string(),
            &r.estimate.to_string(),
            &r.se.to_string(),
            &r.n.map(|n| n.to_string()).unwrap_or_default(),
            r.scale.as_str(),
            &r.reported_p.map(|p| p.to_string()).unwrap_or_default(),
            if r.is_null_result { "true" } else { "false" },
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Scale a log odds ratio to an approximate standardized mean difference.
///
/// Applies to estimates and standard errors alike (the map is linear).
pub fn convert_logor_to_smd(value: f64) -> f64 {
    value * LOG_OR_TO_SMD
}

/// Convert an (estimate, standard error) pair between scales.
///
/// Supported: the identity on every scale, and log odds ratio to
/// standardized mean difference (both values scaled by [`LOG_OR_TO_SMD`]).
pub fn convert_effect(
    estimate: f64,
    se: f64,
    from: EffectScale,
    to: EffectScale,
) -> Result<(f64, f64)> {
    if !estimate.is_finite() {
        return Err(Error::NonFinite {
            quantity: "effect estimate",
            value: estimate,
        });
    }
    if !se.is_finite() {
        return Err(Error::NonFinite {
            quantity: "standard error",
            value: se,
        });
    }
    if se <= 0.0 {
        return Err(Error::NonPositiveStandardError { value: se });
    }
    match (from, to) {
        (a, b) if a == b => Ok((estimate, se)),
        (EffectScale::LogOr, EffectScale::Smd) => {
            Ok((convert_logor_to_smd(estimate), convert_logor_to_smd(se)))
        }
        (from, to) => Err(Error::UnsupportedConversion { from, to }),
    }
}

/// Fisher z-transform of a raw correlation: `atanh(r)`.
pub fn fisher_z_from_correlation(r: f64) -> Result<f64> {
    if !r.is_finite() {
        return Err(Error::NonFinite {
            quantity: "correlation",
            value: r,
        });
    }
    if r.abs() >= 1.0 {
        return Err(Error::CorrelationOutOfRange { value: r });
    }
    Ok(r.atanh())
}

/// Large-sample standard error of a Fisher z value: `1/sqrt(n - 3)`.
pub fn fisher_z_se(n: u64) -> Result<f64> {
    if n < 4 {
        return Err(Error::SampleTooSmall {
            what: "Fisher z standard error",
            min: 4,
            got: n,
        });
    }
    Ok(1.0 / ((n - 3) as f64).sqrt())
}

/// Read rows with their 1-based line numbers, validating each cell.
fn read_rows<R: Read>(reader: R) -> Result<Vec<(u64, StudyRecord)>> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(reader);

    let headers = rdr.headers()?.clone();
    let mut idx = HashMap::new();
    for (i, name) in headers.iter().enumerate() {
        idx.insert(name.to_string(), i);
    }
    let col = |name: &str| -> Result<usize> {
        idx.get(name).copied().ok_or_else(|| Error::MissingColumn {
            name: name.to_string(),
        })
    };
    let cols: Vec<usize> = COLUMNS
        .iter()
        .map(|c| col(c))
        .collect::<Result<Vec<usize>>>()?;

    let mut rows = Vec::new();
    for record in rdr.records() {
        let record = record?;
        let line = record.position().map_or(0, |p| p.line());
        let cell = |slot: usize| record.get(cols[slot]).unwrap_or("");

        let required = |slot: usize, field: &'static str| -> Result<String> {
            let v = cell(slot);
            if v.is_empty() {
                Err(Error::Parse {
                    line,
                    field,
                    message: "value is required".to_string(),
                })
            } else {
                Ok(v.to_string())
            }
        };

        let role = match cell(4) {
            "original" => StudyRole::Original,
            "replication" => StudyRole::Replication,
            other => {
                return Err(Error::Parse {
                    line,
                    field: "role",
                    message: format!("expected 'original' or 'replication', got '{other}'"),
                })
            }
        };

        let internal_rep: u32 = parse_cell(cell(5), line, "internal_rep")?;
        if internal_rep == 0 {
            return Err(Error::Parse {
                line,
                field: "internal_rep",
                message: "must be >= 1".to_string(),
            });
        }

        let estimate: f64 = parse_cell(cell(6), line, "estimate")?;
        if !estimate.is_finite() {
            return Err(Error::Parse {
                line,
                field: "estimate",
                message: format!("must be finite, got {estimate}"),
            });
        }

        let se: f64 = parse_cell(cell(7), line, "se")?;
        if !se.is_finite() || se <= 0.0 {
            return Err(Error::Parse {
                line,
                field: "se",
                message: format!("must be a finite positive number, got {se}"),
            });
        }

        let n = if cell(8).is_empty() {
            None
        } else {
            let n: u64 = parse_cell(cell(8), line, "n")?;
            if n == 0 {
                return Err(Error::Parse {
                    line,
                    field: "n",
                    message: "must be >= 1".to_string(),
                });
            }
            Some(n)
        };

        let scale = EffectScale::from_str(cell(9)).map_err(|message| Error::Parse {
            line,
            field: "scale",
            message,
        })?;

        let reported_p = if cell(10).is_empty() {
            None
        } else {
            let p: f64 = parse_cell(cell(10), line, "reported_p")?;
            if !(p > 0.0 && p <= 1.0) {
                return Err(Error::Parse {
                    line,
                    field: "reported_p",
                    message: format!("must lie in (0, 1], got {p}"),
                });
            }
            Some(p)
        };

        let is_null_result = match cell(11) {
            "true" => true,
            "false" => false,
            other => {
                return Err(Error::Parse {
                    line,
                    field: "is_null_result",
                    message: format!("expected 'true' or 'false', got '{other}'"),
                })
            }
        };

        rows.push((
            line,
            StudyRecord {
                project: required(0, "project")?,
                paper_id: required(1, "paper_id")?,
                experiment_id: required(2, "experiment_id")?,
                effect_id: required(3, "effect_id")?,
                role,
                internal_rep,
                estimate,
                se,
                n,
                scale,
                reported_p,
                is_null_result,
            },
        ));
    }

    if rows.is_empty() {
        return Err(Error::NoRows);
    }
    Ok(rows)
}

fn parse_cell<T: FromStr>(value: &str, line: u64, field: &'static str) -> Result<T>
where
    T::Err: fmt::Display,
{
    if value.is_empty() {
        return Err(Error::Parse {
            line,
            field,
            message: "value is required".to_string(),
        });
    }
    value.parse().map_err(|e: T::Err| Error::Parse {
        line,
        field,
        message: format!("could not parse '{value}': {e}"),
    })
}

/// Group validated rows into pairs, preserving first-appearance order.
///
/// The pair-level published p-value of the replication is kept only when
/// the pair has exactly one replication; pooled internal replications are
/// always scored on recomputed p-values. `is_null_result` is taken from the
/// original row (it classifies the original finding).
fn group_rows(rows: Vec<(u64, StudyRecord)>) -> Result<Vec<StudyPair>> {
    struct Builder {
        key: String,
        scale: EffectScale,
        original: Option<StudyRecord>,
        replications: Vec<StudyRecord>,
    }

    let mut order: Vec<Builder> = Vec::new();
    let mut index: HashMap<String, usize> = HashMap::new();

    for (line, rec) in rows {
        let key = format!(
            "{}:{}:{}:{}",
            rec.project, rec.paper_id, rec.experiment_id, rec.effect_id
        );
        let slot = match index.get(&key) {
            Some(&i) => i,
            None => {
                order.push(Builder {
                    key: key.clone(),
                    scale: rec.scale,
                    original: None,
                    replications: Vec::new(),
                });
                index.insert(key.clone(), order.len() - 1);
                order.len() - 1
            }
        };
        let b = &mut order[slot];

        if rec.scale != b.scale {
            return Err(Error::InconsistentPair {
                line,
                key,
                field: "scale",
            });
        }
        match rec.role {
            StudyRole::Original => {
                if b.original.is_some() {
                    return Err(Error::DuplicateKey {
                        line,
                        key: format!("{key} role=original"),
                    });
                }
                b.original = Some(rec);
            }
            StudyRole::Replication => {
                if b.replications
                    .iter()
                    .any(|r| r.internal_rep == rec.internal_rep)
                {
                    return Err(Error::DuplicateKey {
                        line,
                        key: format!("{key} role=replication internal_rep={}", rec.internal_rep),
                    });
                }
                b.replications.push(rec);
            }
        }
    }

    let mut pairs = Vec::with_capacity(order.len());
    for b in order {
        let orig = b
            .original
            .ok_or(Error::OrphanReplication { key: b.key.clone() })?;
        if b.replications.is_empty() {
            return Err(Error::MissingReplications { key: b.key });
        }
        let mut reps = b.replications;
        reps.sort_by_key(|r| r.internal_rep);
        let replication_p_reported = match reps.as_slice() {
            [only] => only.reported_p,
            _ => None,
        };
        pairs.push(StudyPair {
            project: orig.project.clone(),
            paper_id: orig.paper_id.clone(),
            experiment_id: orig.experiment_id.clone(),
            effect_id: orig.effect_id.clone(),
            original: to_result(&orig)?,
            replications: reps
                .iter()
                .map(to_result)
                .collect::<Result<Vec<StudyResult>>>()?,
            original_p_reported: orig.reported_p,
            replication_p_reported,
            is_null_result: orig.is_null_result,
        });
    }
    Ok(pairs)
}

fn to_result(r: &StudyRecord) -> Result<StudyResult> {
    StudyResult::new(r.estimate, r.se, r.n, r.scale)
}
