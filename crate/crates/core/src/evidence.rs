//! Per-study evidence measures.
//!
//! All measures treat a study as an effect estimate with a normally
//! distributed error of known standard deviation (the reported standard
//! error). On that footing this module provides:
//!
//! * [`two_sided_p`] — the usual two-sided p-value against a point null;
//! * [`tost_p`] — the equivalence p-value from two one-sided tests against
//!   the bounds `null ± delta`, small when the data *support* absence of an
//!   effect larger than the margin;
//! * [`bayes_factor_01`] — the Bayes factor of the point null against a
//!   normal prior on the effect, large when the data favour the null;
//! * [`confidence_interval`], [`prediction_interval`] and the membership
//!   checks [`ci_inclusion_check`] / [`prediction_interval_check`] behind the
//!   interval-based replication criteria.
//!
//! Decision rules use *closed* comparisons (`p <= alpha`, `BF >= gamma`,
//! interval endpoints included), so the TOST rule at level `alpha` agrees
//! exactly with checking that the `1 - 2*alpha` confidence interval lies
//! inside the equivalence range.
//!
//! Sample sizes are metadata only: every formula uses `(estimate, se)`.

use serde::Serialize;

use crate::data::EffectScale;
use crate::error::Error;
use crate::stats::{self, Probability};
use crate::Result;

/// An effect estimate with its standard error, sample size (optional
/// metadata) and effect scale.
///
/// The constructor enforces a finite estimate and a finite, strictly
/// positive standard error, so downstream formulas never divide by zero.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct StudyResult {
    estimate: f64,
    se: f64,
    n: Option<u64>,
    scale: EffectScale,
}

impl StudyResult {
    pub fn new(estimate: f64, se: f64, n: Option<u64>, scale: EffectScale) -> Result<Self> {
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
        if n == Some(0) {
            return Err(Error::SampleTooSmall {
                what: "study",
                min: 1,
                got: 0,
            });
        }
        Ok(Self {
            estimate,
            se,
            n,
            scale,
        })
    }

    pub fn estimate(self) -> f64 {
        self.estimate
    }

    pub fn se(self) -> f64 {
        self.se
    }

    pub fn n(self) -> Option<u64> {
        self.n
    }

    pub fn scale(self) -> EffectScale {
        self.scale
    }
}

fn check_same_scale(a: StudyResult, b: StudyResult) -> Result<()> {
    if a.scale != b.scale {
        return Err(Error::ScaleMismatch {
            left: a.scale,
            right: b.scale,
        });
    }
    Ok(())
}

/// An equivalence range `[null_value - delta, null_value + delta]` with a
/// strictly positive half-width.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct EquivalenceMargin {
    delta: f64,
    null_value: f64,
}

impl EquivalenceMargin {
    /// Margin around a null value of zero.
    pub fn new(delta: f64) -> Result<Self> {
        Self::with_null(delta, 0.0)
    }

    pub fn with_null(delta: f64, null_value: f64) -> Result<Self> {
        if !delta.is_finite() {
            return Err(Error::NonFinite {
                quantity: "equivalence margin",
                value: delta,
            });
        }
        if delta <= 0.0 {
            return Err(Error::NonPositiveMargin { value: delta });
        }
        if !null_value.is_finite() {
            return Err(Error::NonFinite {
                quantity: "null value",
                value: null_value,
            });
        }
        Ok(Self { delta, null_value })
    }

    pub fn delta(self) -> f64 {
        self.delta
    }

    pub fn null_value(self) -> f64 {
        self.null_value
    }

    pub fn lower(self) -> f64 {
        self.null_value - self.delta
    }

    pub fn upper(self) -> f64 {
        self.null_value + self.delta
    }

    /// Whether the whole interval lies inside the equivalence range
    /// (closed endpoints).
    pub fn contains_interval(self, interval: &Interval) -> bool {
        self.lower() <= interval.lower && interval.upper <= self.upper()
    }
}

/// A closed interval `[lower, upper]` tagged with the level it was built at.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Interval {
    pub lower: f64,
    pub upper: f64,
    pub level: f64,
}

impl Interval {
    pub fn new(lower: f64, upper: f64, level: f64) -> Result<Self> {
        if !lower.is_finite() || !upper.is_finite() {
            return Err(Error::NonFinite {
                quantity: "interval endpoint",
                value: if lower.is_finite() { upper } else { lower },
            });
        }
        if lower > upper {
            return Err(Error::InvalidGrid {
                reason: format!("interval lower bound {lower} exceeds upper bound {upper}"),
            });
        }
        check_level(level)?;
        Ok(Self {
            lower,
            upper,
            level,
        })
    }

    /// Closed-endpoint membership.
    pub fn contains(&self, x: f64) -> bool {
        self.lower <= x && x <= self.upper
    }

    /// Whether `other` lies entirely inside `self` (closed endpoints).
    pub fn contains_interval(&self, other: &Interval) -> bool {
        self.lower <= other.lower && other.upper <= self.upper
    }

    pub fn width(&self) -> f64 {
        self.upper - self.lower
    }
}

/// A normal prior on the effect under the alternative hypothesis.
///
/// `sd == 0` is allowed and degenerates to a point alternative at `mean`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormalPrior {
    mean: f64,
    sd: f64,
}

impl NormalPrior {
    pub fn new(mean: f64, sd: f64) -> Result<Self> {
        if !mean.is_finite() {
            return Err(Error::NonFinite {
                quantity: "prior mean",
                value: mean,
            });
        }
        if !sd.is_finite() {
            return Err(Error::NonFinite {
                quantity: "prior standard deviation",
                value: sd,
            });
        }
        if sd < 0.0 {
            return Err(Error::NegativePriorSd { value: sd });
        }
        Ok(Self { mean, sd })
    }

    pub fn mean(self) -> f64 {
        self.mean
    }

    pub fn sd(self) -> f64 {
        self.sd
    }
}

/// Validate a significance level: must lie strictly inside (0, 0.5).
pub(crate) fn check_alpha(alpha: f64) -> Result<()> {
    if !alpha.is_finite() || alpha <= 0.0 || alpha >= 0.5 {
        return Err(Error::InvalidAlpha { value: alpha });
    }
    Ok(())
}

/// Validate an interval level: must lie strictly inside (0, 1).
pub(crate) fn check_level(level: f64) -> Result<()> {
    if !level.is_finite() || level <= 0.0 || level >= 1.0 {
        return Err(Error::InvalidLevel { value: level });
    }
    Ok(())
}

fn check_null(null_value: f64) -> Result<()> {
    if !null_value.is_finite() {
        return Err(Error::NonFinite {
            quantity: "null value",
            value: null_value,
        });
    }
    Ok(())
}

/// Two-sided p-value for `H0: theta = null_value`.
pub fn two_sided_p(study: StudyResult, null_value: f64) -> Result<Probability> {
    check_null(null_value)?;
    Probability::new(two_sided_p_from(study.estimate - null_value, study.se))
}

/// Equivalence p-value from two one-sided tests against the margin bounds:
/// the larger of the two one-sided p-values. At least 0.5 whenever the
/// estimate falls outside the equivalence range.
pub fn tost_p(study: StudyResult, margin: EquivalenceMargin) -> Result<Probability> {
    Probability::new(tost_p_from(
        study.estimate - margin.null_value,
        study.se,
        margin.delta,
    ))
}

/// The TOST decision at level `alpha`: `true` iff `tost_p <= alpha`.
///
/// Equivalent to the `1 - 2*alpha` confidence interval lying inside the
/// equivalence range — the tie at the boundary is broken identically by
/// both formulations (closed comparisons).
pub fn equivalence_success(
    study: StudyResult,
    margin: EquivalenceMargin,
    alpha: f64,
) -> Result<bool> {
    check_alpha(alpha)?;
    Ok(tost_p(study, margin)?.value() <= alpha)
}

/// Equal-tailed confidence interval at the given level.
pub fn confidence_interval(study: StudyResult, level: f64) -> Result<Interval> {
    check_level(level)?;
    let z = stats::phi_inv(0.5 * (1.0 + level));
    Interval::new(
        study.estimate - z * study.se,
        study.estimate + z * study.se,
        level,
    )
}

/// Whether `target`'s estimate falls inside the confidence interval of
/// `interval_source` (closed endpoints).
pub fn ci_inclusion_check(
    target: StudyResult,
    interval_source: StudyResult,
    level: f64,
) -> Result<bool> {
    check_same_scale(target, interval_source)?;
    Ok(confidence_interval(interval_source, level)?.contains(target.estimate))
}

/// Interval expected to contain a replication estimate: centred on the
/// original estimate, widened by both standard errors.
pub fn prediction_interval(
    original: StudyResult,
    replication_se: f64,
    level: f64,
) -> Result<Interval> {
    check_level(level)?;
    if !replication_se.is_finite() {
        return Err(Error::NonFinite {
            quantity: "replication standard error",
            value: replication_se,
        });
    }
    if replication_se <= 0.0 {
        return Err(Error::NonPositiveStandardError {
            value: replication_se,
        });
    }
    let z = stats::phi_inv(0.5 * (1.0 + level));
    let half = z * (original.se * original.se + replication_se * replication_se).sqrt();
    Interval::new(original.estimate - half, original.estimate + half, level)
}

/// Whether the replication estimate falls inside the prediction interval of
/// the original (closed endpoints).
pub fn prediction_interval_check(
    original: StudyResult,
    replication: StudyResult,
    level: f64,
) -> Result<bool> {
    check_same_scale(original, replication)?;
    Ok(prediction_interval(original, replication.se, level)?.contains(replication.estimate))
}

/// Bayes factor `BF01` of `H0: theta = null_value` against
/// `H1: theta ~ Normal(prior.mean, prior.sd^2)`.
///
/// Values above 1 favour the null; values below 1 favour the alternative.
/// `prior.sd == 0` with `prior.mean == null_value` gives exactly 1.
/// Computed in log space; see [`ln_bayes_factor_01`] for the log version.
pub fn bayes_factor_01(study: StudyResult, null_value: f64, prior: NormalPrior) -> Result<f64> {
    Ok(ln_bayes_factor_01(study, null_value, prior)?.exp())
}

/// Natural log of [`bayes_factor_01`], safe against overflow for extreme
/// inputs.
pub fn ln_bayes_factor_01(study: StudyResult, null_value: f64, prior: NormalPrior) -> Result<f64> {
    check_null(null_value)?;
    let var0 = study.se * study.se;
    let var1 = var0 + prior.sd * prior.sd;
    Ok(ln_bf01_from(
        study.estimate - null_value,
        var0,
        study.estimate - prior.mean,
        var1,
    ))
}

/// Raw two-sided p from the centred estimate `a = estimate - null` and `se`;
/// equals `erfc(|z| / sqrt(2))`, which keeps relative precision in the tails.
#[inline]
pub(crate) fn two_sided_p_from(a: f64, se: f64) -> f64 {
    stats::erfc((a / se).abs() * std::f64::consts::FRAC_1_SQRT_2)
}

/// Raw TOST p from the centred estimate `a`, `se` and margin `delta`.
#[inline]
pub(crate) fn tost_p_from(a: f64, se: f64, delta: f64) -> f64 {
    let upper = stats::phi((a - delta) / se);
    let lower = stats::phi(-(a + delta) / se);
    upper.max(lower)
}

/// Raw log Bayes factor from centred estimates and variances:
/// `d0 = estimate - null`, `d1 = estimate - prior mean`,
/// `var1 = var0 + prior sd^2`.
#[inline]
pub(crate) fn ln_bf01_from(d0: f64, var0: f64, d1: f64, var1: f64) -> f64 {
    0.5 * (var1 / var0).ln() - 0.5 * (d0 * d0 / var0 - d1 * d1 / var1)
}
