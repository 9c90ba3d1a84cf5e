//! Fixed-effect meta-analysis.
//!
//! Pools two or more study results under the assumption of one common true
//! effect, using inverse-variance weights `w_i = 1/se_i^2`:
//!
//! * pooled estimate: `sum(w_i * est_i) / sum(w_i)`
//! * pooled standard error: `1 / sqrt(sum(w_i))`
//!
//! The pooled two-sided p-value (against the configured null value) backs
//! the meta-analytic non-significance criterion: a pair "succeeds" when the
//! combined evidence is still not significant. Note that two individually
//! non-significant studies can combine to a significant pooled result, which
//! is exactly why this criterion differs from requiring non-significance in
//! each study separately.
//!
//! Accumulation runs over a canonically sorted copy of the inputs, so any
//! permutation of the same studies produces bit-identical results.

use serde::Serialize;

use crate::error::Error;
use crate::evidence::{self, StudyResult};
use crate::stats::Probability;
use crate::Result;

/// The pooled result of a fixed-effect meta-analysis of `k >= 2` studies.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MetaResult {
    pub estimate: f64,
    pub se: f64,
    pub p_two_sided: Probability,
    pub k: usize,
    pub scale: crate::data::EffectScale,
}

impl MetaResult {
    /// The pooled result viewed as a study, for further combination or
    /// interval construction. Sample size is not carried over.
    pub fn as_study(&self) -> Result<StudyResult> {
        StudyResult::new(self.estimate, self.se, None, self.scale)
    }
}

/// Inverse-variance weighted pooling of two or more studies on a common
/// scale, with the pooled p-value computed against `null_value`.
pub fn fixed_effect_meta(studies: &[StudyResult], null_value: f64) -> Result<MetaResult> {
    if studies.len() < 2 {
        return Err(Error::TooFewStudies { got: studies.len() });
    }
    let scale = studies[0].scale();
    for s in studies {
        if s.scale() != scale {
            return Err(Error::ScaleMismatch {
                left: scale,
                right: s.scale(),
            });
        }
    }

    // canonical order so that permuted inputs accumulate identically
    let mut sorted: Vec<StudyResult> = studies.to_vec();
    sorted.sort_by_key(|s| (s.estimate().to_bits(), s.se().to_bits()));

    let mut weight_sum = 0.0;
    let mut weighted_estimate_sum = 0.0;
    for s in &sorted {
        let w = 1.0 / (s.se() * s.se());
        weight_sum += w;
        weighted_estimate_sum += w * s.estimate();
    }
    let estimate = weighted_estimate_sum / weight_sum;
    let se = 1.0 / weight_sum.sqrt();
    let p_two_sided =
        evidence::two_sided_p(StudyResult::new(estimate, se, None, scale)?, null_value)?;

    Ok(MetaResult {
        estimate,
        se,
        p_two_sided,
        k: studies.len(),
        scale,
    })
}

/// The meta-analytic non-significance criterion: `true` iff the pooled
/// two-sided p-value is *strictly* greater than `alpha`.
pub fn meta_nonsignificance_success(
    studies: &[StudyResult],
    null_value: f64,
    alpha: f64,
) -> Result<bool> {
    evidence::check_alpha(alpha)?;
    let pooled = fixed_effect_meta(studies, null_value)?;
    Ok(pooled.p_two_sided.value() > alpha)
}
