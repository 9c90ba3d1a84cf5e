//! The eight replication-success criteria and pair-level evaluation.
//!
//! A [`StudyPair`] joins one original study with its replication(s). When a
//! pair has several internal replications they are pooled by fixed-effect
//! meta-analysis *before* any criterion is applied
//! ([`aggregate_replications`]). [`evaluate_pair`] then scores the pair
//! against all eight criteria:
//!
//! 1. **non_significance** — both studies non-significant (`p > alpha`);
//! 2. **meta_non_significance** — the pooled original + replication estimate
//!    is non-significant;
//! 3. **orig_in_repl_ci** — the original estimate lies inside the
//!    replication's confidence interval;
//! 4. **repl_in_orig_ci** — the replication estimate lies inside the
//!    original's confidence interval;
//! 5. **repl_in_prediction_interval** — the replication estimate lies inside
//!    the prediction interval derived from the original;
//! 6. **two_trials** — both studies individually significant with estimates
//!    on the same side of the null;
//! 7. **equivalence_tost** — both studies establish equivalence at the
//!    margin (`p_TOST <= alpha`);
//! 8. **bayes_factor_threshold** — both studies yield `BF01 >= gamma`.
//!
//! Criteria 1–5 measure *consistency* and are easy to satisfy with noisy
//! data; criteria 7–8 demand positive evidence of absence. The report keeps
//! every ingredient (p-values, TOST p-values, Bayes factors, intervals) so
//! the verdicts can be audited.
//!
//! The non-significance criterion scores p-values as published when the
//! dataset quotes them (`use_reported_p`, on by default) and flags rows
//! whose quoted value disagrees with the normal-approximation recomputation
//! by more than 0.01, as well as rows classified as null results despite a
//! significant p-value.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::data::EffectScale;
use crate::error::Error;
use crate::evidence::{self, EquivalenceMargin, Interval, NormalPrior, StudyResult};
use crate::meta::{self, MetaResult};
use crate::stats;
use crate::Result;

/// Default significance level.
pub const DEFAULT_ALPHA: f64 = 0.05;
/// Default Bayes factor threshold.
pub const DEFAULT_GAMMA: f64 = 3.0;
/// Default prior standard deviation (unit-information prior on the
/// standardized mean difference scale).
pub const DEFAULT_PRIOR_SD: f64 = 2.0;
/// Default equivalence margin on the standardized mean difference scale.
pub const DEFAULT_SMD_MARGIN: f64 = 0.74;
/// Default equivalence margin on the Fisher z scale.
pub const DEFAULT_FISHER_Z_MARGIN: f64 = 0.2;

/// The replication-success criteria, in canonical report order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Criterion {
    NonSignificance,
    MetaNonSignificance,
    OrigInReplCi,
    ReplInOrigCi,
    ReplInPredictionInterval,
    TwoTrials,
    EquivalenceTost,
    BayesFactorThreshold,
}

impl Criterion {
    /// All criteria in canonical order.
    pub const ALL: [Criterion; 8] = [
        Criterion::NonSignificance,
        Criterion::MetaNonSignificance,
        Criterion::OrigInReplCi,
        Criterion::ReplInOrigCi,
        Criterion::ReplInPredictionInterval,
        Criterion::TwoTrials,
        Criterion::EquivalenceTost,
        Criterion::BayesFactorThreshold,
    ];

    /// Stable machine-readable identifier.
    pub fn id(self) -> &'static str {
        match self {
            Criterion::NonSignificance => "non_significance",
            Criterion::MetaNonSignificance => "meta_non_significance",
            Criterion::OrigInReplCi => "orig_in_repl_ci",
            Criterion::ReplInOrigCi => "repl_in_orig_ci",
            Criterion::ReplInPredictionInterval => "repl_in_prediction_interval",
            Criterion::TwoTrials => "two_trials",
            Criterion::EquivalenceTost => "equivalence_tost",
            Criterion::BayesFactorThreshold => "bayes_factor_threshold",
        }
    }

    /// Human-readable description.
    pub fn label(self) -> &'static str {
        match self {
            Criterion::NonSignificance => "both studies non-significant",
            Criterion::MetaNonSignificance => "pooled estimate non-significant",
            Criterion::OrigInReplCi => "original estimate in replication CI",
            Criterion::ReplInOrigCi => "replication estimate in original CI",
            Criterion::ReplInPredictionInterval => "replication estimate in prediction interval",
            Criterion::TwoTrials => "both studies significant, same sign",
            Criterion::EquivalenceTost => "equivalence (TOST) in both studies",
            Criterion::BayesFactorThreshold => {
                "Bayes factor for the null above threshold in both studies"
            }
        }
    }
}

impl std::fmt::Display for Criterion {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// An original study joined with its replication(s).
///
/// `replication_p_reported` is only meaningful when there is exactly one
/// replication; pooled internal replications always have their p-value
/// recomputed. `is_null_result` records whether the *original* finding was
/// classified as a null result by the replication project.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyPair {
    pub project: String,
    pub paper_id: String,
    pub experiment_id: String,
    pub effect_id: String,
    pub original: StudyResult,
    pub replications: Vec<StudyResult>,
    pub original_p_reported: Option<f64>,
    pub replication_p_reported: Option<f64>,
    pub is_null_result: bool,
}

impl StudyPair {
    /// Compact `project:paper:experiment:effect` identifier.
    pub fn key(&self) -> String {
        format!(
            "{}:{}:{}:{}",
            self.project, self.paper_id, self.experiment_id, self.effect_id
        )
    }

    /// The common effect scale of all member studies.
    pub fn scale(&self) -> EffectScale {
        self.original.scale()
    }

    /// Check structural invariants: at least one replication, a single
    /// common scale, and reported p-values inside (0, 1].
    pub fn validate(&self) -> Result<()> {
        if self.replications.is_empty() {
            return Err(Error::EmptyInput {
                what: "replication list",
            });
        }
        for r in &self.replications {
            if r.scale() != self.original.scale() {
                return Err(Error::ScaleMismatch {
                    left: self.original.scale(),
                    right: r.scale(),
                });
            }
        }
        for p in [self.original_p_reported, self.replication_p_reported]
            .into_iter()
            .flatten()
        {
            if !p.is_finite() || p <= 0.0 || p > 1.0 {
                return Err(Error::ProbabilityOutOfRange { value: p });
            }
        }
        Ok(())
    }
}

/// All knobs of a criterion evaluation.
///
/// `ci_level` is the level of the confidence intervals behind the
/// CI-inclusion criteria (conventionally 0.95, independent of `alpha`), and
/// `pi_level` the level of the prediction interval. `use_reported_p` makes
/// the non-significance and two-trials criteria use published p-values where
/// the dataset provides them; switch it off to force the
/// normal-approximation recomputation everywhere.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct AnalysisConfig {
    pub null_value: f64,
    pub margin: f64,
    pub prior_mean: f64,
    pub prior_sd: f64,
    pub alpha: f64,
    pub gamma: f64,
    pub ci_level: f64,
    pub pi_level: f64,
    pub use_reported_p: bool,
}

impl AnalysisConfig {
    /// Defaults with the given equivalence margin: null value 0, prior
    /// Normal(0, 2<sup>2</sup>), alpha 0.05, gamma 3, 95% confidence and
    /// prediction intervals, reported p-values honoured.
    pub fn new(margin: f64) -> Result<Self> {
        let config = Self {
            null_value: 0.0,
            margin,
            prior_mean: 0.0,
            prior_sd: DEFAULT_PRIOR_SD,
            alpha: DEFAULT_ALPHA,
            gamma: DEFAULT_GAMMA,
            ci_level: 0.95,
            pi_level: 0.95,
            use_reported_p: true,
        };
        config.validate()?;
        Ok(config)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.null_value.is_finite() {
            return Err(Error::NonFinite {
                quantity: "null value",
                value: self.null_value,
            });
        }
        let _ = EquivalenceMargin::with_null(self.margin, self.null_value)?;
        let _ = NormalPrior::new(self.prior_mean, self.prior_sd)?;
        evidence::check_alpha(self.alpha)?;
        if !self.gamma.is_finite() || self.gamma <= 1.0 {
            return Err(Error::InvalidGamma { value: self.gamma });
        }
        evidence::check_level(self.ci_level)?;
        evidence::check_level(self.pi_level)?;
        Ok(())
    }

    pub(crate) fn margin_spec(&self) -> Result<EquivalenceMargin> {
        EquivalenceMargin::with_null(self.margin, self.null_value)
    }

    pub(crate) fn prior_spec(&self) -> Result<NormalPrior> {
        NormalPrior::new(self.prior_mean, self.prior_sd)
    }
}

/// One criterion's verdict, with the numbers it was decided on.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionOutcome {
    pub criterion: Criterion,
    pub success: bool,
    pub detail: BTreeMap<&'static str, f64>,
}

/// Kinds of advisory notes attached to a [`PairReport`].
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum NoteKind {
    /// A reported p-value differs from the recomputed normal-approximation
    /// p-value by more than 0.01.
    ReportedPMismatch,
    /// A study classified as a null result has a significant p-value.
    NullClaimSignificant,
}

/// An advisory note about a pair (never affects verdicts).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairNote {
    pub kind: NoteKind,
    pub message: String,
}

/// Evidence measures for a single study within a pair report.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StudyEvidence {
    pub estimate: f64,
    pub se: f64,
    pub n: Option<u64>,
    /// Normal-approximation two-sided p-value against the null.
    pub p_recomputed: f64,
    /// Published p-value, when the dataset carries one.
    pub p_reported: Option<f64>,
    /// The p-value the significance-based criteria actually used.
    pub p_used: f64,
    pub tost_p: f64,
    pub bf01: f64,
    pub ci: Interval,
}

/// Everything computed for one pair: per-study evidence, pooled results and
/// one outcome per criterion (in [`Criterion::ALL`] order).
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PairReport {
    pub key: String,
    pub project: String,
    pub paper_id: String,
    pub experiment_id: String,
    pub effect_id: String,
    pub scale: EffectScale,
    pub n_replications: usize,
    /// Whether the effective replication pools several internal replications.
    pub replication_pooled: bool,
    pub original: StudyEvidence,
    /// The effective (possibly pooled) replication.
    pub replication: StudyEvidence,
    /// Fixed-effect meta-analysis of original and effective replication.
    pub meta: MetaResult,
    pub prediction_interval: Interval,
    pub outcomes: Vec<CriterionOutcome>,
    pub notes: Vec<PairNote>,
    pub config: AnalysisConfig,
}

impl PairReport {
    /// Verdict for one criterion.
    pub fn success(&self, criterion: Criterion) -> bool {
        self.outcomes
            .iter()
            .find(|o| o.criterion == criterion)
            .map(|o| o.success)
            .unwrap_or(false)
    }
}

/// Success counts for one criterion across a dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionRate {
    pub criterion: Criterion,
    pub successes: usize,
    pub total: usize,
    pub proportion: f64,
}

/// Pool a pair's replications into one effective replication: the identity
/// for a single replication, otherwise a fixed-effect meta-analysis with
/// sample sizes summed (when all are known).
pub fn aggregate_replications(pair: &StudyPair) -> Result<StudyResult> {
    pair.validate()?;
    if pair.replications.len() == 1 {
        return Ok(pair.replications[0]);
    }
    let pooled = meta::fixed_effect_meta(&pair.replications, 0.0)?;
    let n: Option<u64> = pair.replications.iter().map(|r| r.n()).sum::<Option<u64>>();
    StudyResult::new(pooled.estimate, pooled.se, n, pooled.scale)
}

fn study_evidence(
    study: StudyResult,
    reported_p: Option<f64>,
    config: &AnalysisConfig,
    margin: EquivalenceMargin,
    prior: NormalPrior,
) -> Result<StudyEvidence> {
    let p_recomputed = evidence::two_sided_p(study, config.null_value)?.value();
    let p_used = match reported_p {
        Some(p) if config.use_reported_p => p,
        _ => p_recomputed,
    };
    Ok(StudyEvidence {
        estimate: study.estimate(),
        se: study.se(),
        n: study.n(),
        p_recomputed,
        p_reported: reported_p,
        p_used,
        tost_p: evidence::tost_p(study, margin)?.value(),
        bf01: evidence::bayes_factor_01(study, config.null_value, prior)?,
        ci: evidence::confidence_interval(study, config.ci_level)?,
    })
}

fn push_notes(
    notes: &mut Vec<PairNote>,
    label: &str,
    ev: &StudyEvidence,
    null_claimed: bool,
    alpha: f64,
) {
    if let Some(reported) = ev.p_reported {
        if (reported - ev.p_recomputed).abs() > 0.01 {
            notes.push(PairNote {
                kind: NoteKind::ReportedPMismatch,
                message: format!(
                    "{label}: reported p-value {} differs from recomputed normal-approximation p-value {} by more than 0.01",
                    crate::format::format_p(reported),
                    crate::format::format_p(ev.p_recomputed),
                ),
            });
        }
    }
    if null_claimed && ev.p_used <= alpha {
        notes.push(PairNote {
            kind: NoteKind::NullClaimSignificant,
            message: format!(
                "{label}: classified as a null result although its p-value {} is significant at alpha = {alpha}",
                crate::format::format_p(ev.p_used),
            ),
        });
    }
}

/// Score one pair against all eight criteria.
pub fn evaluate_pair(pair: &StudyPair, config: &AnalysisConfig) -> Result<PairReport> {
    config.validate()?;
    pair.validate()?;
    let margin = config.margin_spec()?;
    let prior = config.prior_spec()?;

    let effective = aggregate_replications(pair)?;
    let pooled = pair.replications.len() > 1;
    let repl_reported = if pooled {
        None
    } else {
        pair.replication_p_reported
    };

    let orig = study_evidence(
        pair.original,
        pair.original_p_reported,
        config,
        margin,
        prior,
    )?;
    let repl = study_evidence(effective, repl_reported, config, margin, prior)?;

    let pooled_pair = meta::fixed_effect_meta(&[pair.original, effective], config.null_value)?;
    let pi = evidence::prediction_interval(pair.original, effective.se(), config.pi_level)?;

    let alpha = config.alpha;
    let mut outcomes = Vec::with_capacity(Criterion::ALL.len());

    let non_significant = orig.p_used > alpha && repl.p_used > alpha;
    outcomes.push(CriterionOutcome {
        criterion: Criterion::NonSignificance,
        success: non_significant,
        detail: BTreeMap::from([
            ("p_original", orig.p_used),
            ("p_replication", repl.p_used),
            ("alpha", alpha),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::MetaNonSignificance,
        success: pooled_pair.p_two_sided.value() > alpha,
        detail: BTreeMap::from([
            ("estimate", pooled_pair.estimate),
            ("se", pooled_pair.se),
            ("p", pooled_pair.p_two_sided.value()),
            ("alpha", alpha),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::OrigInReplCi,
        success: evidence::ci_inclusion_check(pair.original, effective, config.ci_level)?,
        detail: BTreeMap::from([
            ("target_estimate", orig.estimate),
            ("ci_lower", repl.ci.lower),
            ("ci_upper", repl.ci.upper),
            ("level", config.ci_level),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::ReplInOrigCi,
        success: evidence::ci_inclusion_check(effective, pair.original, config.ci_level)?,
        detail: BTreeMap::from([
            ("target_estimate", repl.estimate),
            ("ci_lower", orig.ci.lower),
            ("ci_upper", orig.ci.upper),
            ("level", config.ci_level),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::ReplInPredictionInterval,
        success: evidence::prediction_interval_check(pair.original, effective, config.pi_level)?,
        detail: BTreeMap::from([
            ("replication_estimate", repl.estimate),
            ("pi_lower", pi.lower),
            ("pi_upper", pi.upper),
            ("level", config.pi_level),
        ]),
    });

    let same_sign = (orig.estimate - config.null_value) * (repl.estimate - config.null_value) > 0.0;
    outcomes.push(CriterionOutcome {
        criterion: Criterion::TwoTrials,
        success: orig.p_used <= alpha && repl.p_used <= alpha && same_sign,
        detail: BTreeMap::from([
            ("p_original", orig.p_used),
            ("p_replication", repl.p_used),
            ("alpha", alpha),
            ("same_sign", f64::from(u8::from(same_sign))),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::EquivalenceTost,
        success: orig.tost_p <= alpha && repl.tost_p <= alpha,
        detail: BTreeMap::from([
            ("tost_p_original", orig.tost_p),
            ("tost_p_replication", repl.tost_p),
            ("margin", config.margin),
            ("alpha", alpha),
        ]),
    });

    outcomes.push(CriterionOutcome {
        criterion: Criterion::BayesFactorThreshold,
        success: orig.bf01 >= config.gamma && repl.bf01 >= config.gamma,
        detail: BTreeMap::from([
            ("bf01_original", orig.bf01),
            ("bf01_replication", repl.bf01),
            ("gamma", config.gamma),
        ]),
    });

    let mut notes = Vec::new();
    push_notes(
        &mut notes,
        "original study",
        &orig,
        pair.is_null_result,
        alpha,
    );
    push_notes(
        &mut notes,
        if pooled {
            "pooled replication"
        } else {
            "replication study"
        },
        &repl,
        pair.is_null_result,
        alpha,
    );

    Ok(PairReport {
        key: pair.key(),
        project: pair.project.clone(),
        paper_id: pair.paper_id.clone(),
        experiment_id: pair.experiment_id.clone(),
        effect_id: pair.effect_id.clone(),
        scale: pair.scale(),
        n_replications: pair.replications.len(),
        replication_pooled: pooled,
        original: orig,
        replication: repl,
        meta: pooled_pair,
        prediction_interval: pi,
        outcomes,
        notes,
        config: config.clone(),
    })
}

/// Score every pair in a dataset.
pub fn evaluate_dataset(pairs: &[StudyPair], config: &AnalysisConfig) -> Result<Vec<PairReport>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput { what: "pair list" });
    }
    pairs.iter().map(|p| evaluate_pair(p, config)).collect()
}

/// Success counts per criterion across a dataset.
pub fn success_rates(pairs: &[StudyPair], config: &AnalysisConfig) -> Result<Vec<CriterionRate>> {
    Ok(rates_from_reports(&evaluate_dataset(pairs, config)?))
}

/// Success counts per criterion from already-computed reports.
pub fn rates_from_reports(reports: &[PairReport]) -> Vec<CriterionRate> {
    Criterion::ALL
        .iter()
        .map(|&criterion| {
            let successes = reports.iter().filter(|r| r.success(criterion)).count();
            CriterionRate {
                criterion,
                successes,
                total: reports.len(),
                proportion: successes as f64 / reports.len() as f64,
            }
        })
        .collect()
}

/// Bit positions for [`VerdictKernel::verdict_bits`]: the eight criteria in
/// canonical order, plus the sign-free variant of the two-trials rule used
/// by the calibration report.
pub(crate) mod bits {
    pub const NON_SIGNIFICANCE: u16 = 1 << 0;
    pub const META_NON_SIGNIFICANCE: u16 = 1 << 1;
    pub const ORIG_IN_REPL_CI: u16 = 1 << 2;
    pub const REPL_IN_ORIG_CI: u16 = 1 << 3;
    pub const REPL_IN_PREDICTION_INTERVAL: u16 = 1 << 4;
    pub const TWO_TRIALS: u16 = 1 << 5;
    pub const EQUIVALENCE_TOST: u16 = 1 << 6;
    pub const BAYES_FACTOR_THRESHOLD: u16 = 1 << 7;
    pub const TWO_TRIALS_ANY_SIGN: u16 = 1 << 8;
}

/// Allocation-free criterion evaluation for fixed standard errors, used in
/// the Monte Carlo calibration loop. Reported p-values play no role here
/// (simulated studies have none); everything else follows [`evaluate_pair`]
/// arithmetic exactly.
#[derive(Debug, Clone)]
pub(crate) struct VerdictKernel {
    null: f64,
    alpha: f64,
    gamma: f64,
    delta: f64,
    se_o: f64,
    se_r: f64,
    var0_o: f64,
    var1_o: f64,
    var0_r: f64,
    var1_r: f64,
    prior_mean: f64,
    z_ci: f64,
    pi_half: f64,
    w_o: f64,
    w_r: f64,
    w_sum: f64,
    se_meta: f64,
}

impl VerdictKernel {
    pub(crate) fn new(se_o: f64, se_r: f64, config: &AnalysisConfig) -> Result<Self> {
        config.validate()?;
        for se in [se_o, se_r] {
            if !se.is_finite() {
                return Err(Error::NonFinite {
                    quantity: "standard error",
                    value: se,
                });
            }
            if se <= 0.0 {
                return Err(Error::NonPositiveStandardError { value: se });
            }
        }
        let var0_o = se_o * se_o;
        let var0_r = se_r * se_r;
        let prior_var = config.prior_sd * config.prior_sd;
        let w_o = 1.0 / var0_o;
        let w_r = 1.0 / var0_r;
        let w_sum = w_o + w_r;
        let z_pi = stats::phi_inv(0.5 * (1.0 + config.pi_level));
        Ok(Self {
            null: config.null_value,
            alpha: config.alpha,
            gamma: config.gamma,
            delta: config.margin,
            se_o,
            se_r,
            var0_o,
            var1_o: var0_o + prior_var,
            var0_r,
            var1_r: var0_r + prior_var,
            prior_mean: config.prior_mean,
            z_ci: stats::phi_inv(0.5 * (1.0 + config.ci_level)),
            pi_half: z_pi * (var0_o + var0_r).sqrt(),
            w_o,
            w_r,
            w_sum,
            se_meta: 1.0 / w_sum.sqrt(),
        })
    }

    /// Evaluate every criterion for one simulated (or observed) pair of
    /// estimates, returning a bit set per [`bits`].
    pub(crate) fn verdict_bits(&self, est_o: f64, est_r: f64) -> u16 {
        let a_o = est_o - self.null;
        let a_r = est_r - self.null;
        let p_o = evidence::two_sided_p_from(a_o, self.se_o);
        let p_r = evidence::two_sided_p_from(a_r, self.se_r);

        let mut out = 0u16;
        if p_o > self.alpha && p_r > self.alpha {
            out |= bits::NON_SIGNIFICANCE;
        }

        let est_meta = (self.w_o * est_o + self.w_r * est_r) / self.w_sum;
        if evidence::two_sided_p_from(est_meta - self.null, self.se_meta) > self.alpha {
            out |= bits::META_NON_SIGNIFICANCE;
        }

        if est_r - self.z_ci * self.se_r <= est_o && est_o <= est_r + self.z_ci * self.se_r {
            out |= bits::ORIG_IN_REPL_CI;
        }
        if est_o - self.z_ci * self.se_o <= est_r && est_r <= est_o + self.z_ci * self.se_o {
            out |= bits::REPL_IN_ORIG_CI;
        }
        if est_o - self.pi_half <= est_r && est_r <= est_o + self.pi_half {
            out |= bits::REPL_IN_PREDICTION_INTERVAL;
        }

        let both_significant = p_o <= self.alpha && p_r <= self.alpha;
        if both_significant {
            out |= bits::TWO_TRIALS_ANY_SIGN;
            if a_o * a_r > 0.0 {
                out |= bits::TWO_TRIALS;
            }
        }

        if evidence::tost_p_from(a_o, self.se_o, self.delta) <= self.alpha
            && evidence::tost_p_from(a_r, self.se_r, self.delta) <= self.alpha
        {
            out |= bits::EQUIVALENCE_TOST;
        }

        let bf_o =
            evidence::ln_bf01_from(a_o, self.var0_o, est_o - self.prior_mean, self.var1_o).exp();
        let bf_r =
            evidence::ln_bf01_from(a_r, self.var0_r, est_r - self.prior_mean, self.var1_r).exp();
        if bf_o >= self.gamma && bf_r >= self.gamma {
            out |= bits::BAYES_FACTOR_THRESHOLD;
        }

        out
    }
}
