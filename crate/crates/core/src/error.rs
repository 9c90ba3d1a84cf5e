//! Error type shared by all modules of the crate.
//!
//! Every fallible operation returns [`Error`]; variants carry enough context
//! (offending value, CSV line, field name) to be actionable without a
//! backtrace.

use crate::data::EffectScale;

/// Crate-wide error type.
#[derive(Debug, thiserror::Error)]
pub enum Error {
    /// A quantity that must be finite was NaN or infinite.
    #[error("{quantity} must be finite, got {value}")]
    NonFinite { quantity: &'static str, value: f64 },

    /// A probability outside [0, 1].
    #[error("probability must lie in [0, 1], got {value}")]
    ProbabilityOutOfRange { value: f64 },

    /// Quantile of p = 0 or p = 1 is not a finite z-score.
    #[error("normal quantile requires 0 < p < 1, got {p}")]
    QuantileDomain { p: f64 },

    /// Standard errors must be strictly positive.
    #[error("standard error must be > 0, got {value}")]
    NonPositiveStandardError { value: f64 },

    /// Equivalence margins must be strictly positive.
    #[error("equivalence margin must be > 0, got {value}")]
    NonPositiveMargin { value: f64 },

    /// Prior standard deviations must be non-negative.
    #[error("prior standard deviation must be >= 0, got {value}")]
    NegativePriorSd { value: f64 },

    /// Interval / confidence levels must lie strictly inside (0, 1).
    #[error("interval level must lie in (0, 1), got {value}")]
    InvalidLevel { value: f64 },

    /// Significance levels must lie in (0, 0.5).
    #[error("significance level alpha must lie in (0, 0.5), got {value}")]
    InvalidAlpha { value: f64 },

    /// Bayes factor thresholds must exceed 1.
    #[error("Bayes factor threshold gamma must be > 1, got {value}")]
    InvalidGamma { value: f64 },

    /// Two studies measured on different scales cannot be combined.
    #[error("effect scales do not match: {left} vs {right}")]
    ScaleMismatch {
        left: EffectScale,
        right: EffectScale,
    },

    /// Meta-analysis needs at least two studies.
    #[error("meta-analysis requires at least 2 studies, got {got}")]
    TooFewStudies { got: usize },

    /// An input collection that must be non-empty was empty.
    #[error("{what} must not be empty")]
    EmptyInput { what: &'static str },

    /// A sweep grid violated its ordering or positivity preconditions.
    #[error("invalid grid: {reason}")]
    InvalidGrid { reason: String },

    /// Correlations must lie strictly inside (-1, 1) for the Fisher transform.
    #[error("correlation must lie in (-1, 1), got {value}")]
    CorrelationOutOfRange { value: f64 },

    /// A sample size below the minimum an operation needs.
    #[error("{what} requires a sample size of at least {min}, got {got}")]
    SampleTooSmall {
        what: &'static str,
        min: u64,
        got: u64,
    },

    /// Only specific directed scale conversions are defined.
    #[error("unsupported scale conversion: {from} -> {to}")]
    UnsupportedConversion { from: EffectScale, to: EffectScale },

    /// Malformed CSV cell; `line` is the 1-based line number in the file.
    #[error("line {line}, field '{field}': {message}")]
    Parse {
        line: u64,
        field: &'static str,
        message: String,
    },

    /// The header row is missing a required column.
    #[error("missing required column '{name}' in header")]
    MissingColumn { name: String },

    /// The same (project, paper, experiment, effect, role, internal_rep) key
    /// appeared twice.
    #[error("line {line}: duplicate row key {key}")]
    DuplicateKey { line: u64, key: String },

    /// Replication rows without a matching original row.
    #[error("replication rows for {key} have no original row")]
    OrphanReplication { key: String },

    /// An original row without any replication rows.
    #[error("original row for {key} has no replication rows")]
    MissingReplications { key: String },

    /// A file with a header but no data rows.
    #[error("dataset contains no data rows")]
    NoRows,

    /// Rows of one pair disagree on a per-pair attribute.
    #[error("line {line}: rows of pair {key} disagree on {field}")]
    InconsistentPair {
        line: u64,
        key: String,
        field: &'static str,
    },

    /// Fixture bytes do not match the pinned checksum.
    #[error("checksum mismatch for {name}: expected {expected}, got {actual} (pass --no-verify to bypass)")]
    ChecksumMismatch {
        name: String,
        expected: String,
        actual: String,
    },

    /// Unknown bundled fixture name.
    #[error("unknown fixture '{name}' (bundled fixtures: rpcb, rpp-eprp)")]
    UnknownFixture { name: String },

    #[error("I/O error: {0}")]
    Io(#[from] std::io::Error),

    #[error("CSV error: {0}")]
    Csv(#[from] csv::Error),
}
