//! Monte Carlo calibration of the criteria's error rates.
//!
//! Every criterion can be gamed: non-significance rewards underpowered
//! studies, the two-trials rule has error rate alpha^2, and equivalence
//! testing claims success at rate alpha^2 when the true effect sits exactly
//! on the margin. [`simulate_error_rates`] quantifies this by drawing many
//! original/replication pairs from a normal model with a known true effect
//! and counting how often each criterion declares success.
//!
//! Runs are fully deterministic for a given seed. Simulations are processed
//! in fixed-size chunks, each on its own ChaCha stream derived from the
//! seed, so results do not depend on how the loop is batched and chunks
//! could be processed in any order. For the non-significance criterion a
//! closed-form success probability is computed alongside as a cross-check
//! on the simulation machinery.

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};
use serde::Serialize;

use crate::criteria::{bits, AnalysisConfig, VerdictKernel};
use crate::error::Error;
use crate::stats;
use crate::Result;

/// Simulations per RNG stream.
const CHUNK: u64 = 65_536;

/// Criterion identifiers in [`simulate_error_rates`] output order: the
/// eight report criteria plus the sign-agnostic variant of the two-trials
/// rule (which counts success whenever both studies are significant, even
/// with opposite signs — the textbook alpha^2 error rate).
pub const CRITERION_IDS: [&str; 9] = [
    "non_significance",
    "meta_non_significance",
    "orig_in_repl_ci",
    "repl_in_orig_ci",
    "repl_in_prediction_interval",
    "two_trials",
    "equivalence_tost",
    "bayes_factor_threshold",
    "two_trials_any_sign",
];

/// One simulated world: a true effect, the two standard errors, and the
/// evaluation settings.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SimScenario {
    /// True effect both studies estimate.
    pub true_effect: f64,
    pub se_original: f64,
    pub se_replication: f64,
    pub n_sims: u64,
    pub seed: u64,
    pub config: AnalysisConfig,
}

impl SimScenario {
    pub fn validate(&self) -> Result<()> {
        if !self.true_effect.is_finite() {
            return Err(Error::NonFinite {
                quantity: "true effect",
                value: self.true_effect,
            });
        }
        for se in [self.se_original, self.se_replication] {
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
        if self.n_sims == 0 {
            return Err(Error::SampleTooSmall {
                what: "Monte Carlo simulation",
                min: 1,
                got: 0,
            });
        }
        self.config.validate()
    }
}

/// Estimated success probability of one criterion.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CriterionEstimate {
    pub criterion: &'static str,
    pub successes: u64,
    pub proportion: f64,
    /// Binomial Monte Carlo standard error `sqrt(p(1-p)/n)`.
    pub mc_se: f64,
}

/// Simulated error/success rates for every criterion under one scenario.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CalibrationReport {
    pub scenario: SimScenario,
    /// One entry per [`CRITERION_IDS`] element, in order.
    pub estimates: Vec<CriterionEstimate>,
    /// Closed-form non-significance success probability under the normal
    /// model; the simulated estimate must agree within Monte Carlo error.
    pub analytic_non_significance: f64,
}

impl CalibrationReport {
    /// Estimate for one criterion by identifier.
    pub fn estimate(&self, criterion: &str) -> Option<&CriterionEstimate> {
        self.estimates.iter().find(|e| e.criterion == criterion)
    }
}

/// One standard normal draw: 53-bit uniform mapped through the quantile.
fn standard_normal<R: RngCore>(rng: &mut R) -> f64 {
    // (k + 0.5) / 2^53 for k in [0, 2^53): strictly inside (0, 1)
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
    stats::phi_inv(u)
}

/// Closed-form non-significance success probability for a scenario: the
/// product over both studies of `P(|estimate - null| < z * se)` under
/// `estimate ~ Normal(true_effect, se^2)`.
pub fn analytic_non_significance(scenario: &SimScenario) -> Result<f64> {
    scenario.validate()?;
    let cfg = &scenario.config;
    let z = stats::phi_inv(1.0 - cfg.alpha / 2.0);
    let per_study = |se: f64| {
        let hi = (cfg.null_value + z * se - scenario.true_effect) / se;
        let lo = (cfg.null_value - z * se - scenario.true_effect) / se;
        stats::phi(hi) - stats::phi(lo)
    };
    Ok(per_study(scenario.se_original) * per_study(scenario.se_replication))
}

/// Simulate every criterion's success rate under one scenario.
pub fn simulate_error_rates(scenario: &SimScenario) -> Result<CalibrationReport> {
    scenario.validate()?;
    let kernel = VerdictKernel::new(
        scenario.se_original,
        scenario.se_replication,
        &scenario.config,
    )?;

    let mut successes = [0u64; 9];
    let mut remaining = scenario.n_sims;
    let mut stream = 0u64;
    while remaining > 0 {
        let len = remaining.min(CHUNK);
        let mut rng = ChaCha12Rng::seed_from_u64(scenario.seed);
        rng.set_stream(stream);
        for _ in 0..len {
            let est_o = scenario.true_effect + scenario.se_original * standard_normal(&mut rng);
            let est_r = scenario.true_effect + scenario.se_replication * standard_normal(&mut rng);
            let verdicts = kernel.verdict_bits(est_o, est_r);
            for (bit, slot) in successes.iter_mut().enumerate() {
                *slot += u64::from(verdicts & (1 << bit) != 0);
            }
        }
        remaining -= len;
        stream += 1;
    }

    debug_assert_eq!(bits::NON_SIGNIFICANCE, 1 << 0);
    debug_assert_eq!(bits::TWO_TRIALS_ANY_SIGN, 1 << 8);

    let n = scenario.n_sims as f64;
    let estimates = CRITERION_IDS
        .iter()
        .zip(successes)
        .map(|(&criterion, successes)| {
            let proportion = successes as f64 / n;
            CriterionEstimate {
                criterion,
                successes,
                proportion,
                mc_se: (proportion * (1.0 - proportion) / n).sqrt(),
            }
        })
        .collect();

    Ok(CalibrationReport {
        analytic_non_significance: analytic_non_significance(scenario)?,
        scenario: scenario.clone(),
        estimates,
    })
}
