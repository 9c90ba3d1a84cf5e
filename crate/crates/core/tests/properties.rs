//! Randomized property tests for the statistical kernels: decision
//! dualities, oracle comparisons and exact invariances. None of these load
//! any bundled dataset.

use proptest::prelude::*;

use replitool_core::criteria::{self, AnalysisConfig, StudyPair};
use replitool_core::data::EffectScale;
use replitool_core::evidence::{self, EquivalenceMargin, NormalPrior, StudyResult};
use replitool_core::meta;
use replitool_core::stats::{norm_cdf, norm_quantile, Probability};

fn study(est: f64, se: f64) -> StudyResult {
    StudyResult::new(est, se, None, EffectScale::Smd).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(10_000))]

    /// The two one-sided tests succeed at level alpha exactly when the
    /// (1 - 2*alpha) confidence interval lies inside the equivalence range.
    #[test]
    fn tost_decision_equals_confidence_interval_inclusion(
        est in -3.0..3.0f64,
        se in 0.05..3.0f64,
        delta in 0.01..3.0f64,
        alpha in 0.011..0.49f64,
        null in -1.0..1.0f64,
    ) {
        let study = study(est, se);
        let margin = EquivalenceMargin::with_null(delta, null).unwrap();
        let by_p = evidence::equivalence_success(study, margin, alpha).unwrap();
        let ci = evidence::confidence_interval(study, 1.0 - 2.0 * alpha).unwrap();
        prop_assert_eq!(by_p, margin.contains_interval(&ci));
    }

    #[test]
    fn cdf_quantile_round_trip(p in 0.001..0.999f64) {
        let z = norm_quantile(Probability::new(p).unwrap()).unwrap();
        let back = norm_cdf(z).value();
        prop_assert!((back - p).abs() < 1e-9);
    }
}

/// ln of the normal density.
fn ln_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Marginal likelihood of the data under the normal prior, by composite
/// Simpson quadrature in a standardized variable centred on the posterior
/// mode (so the integrand's peak is always well resolved).
fn quadrature_marginal(est: f64, se: f64, prior_mean: f64, prior_sd: f64) -> f64 {
    let var0 = se * se;
    let var_p = prior_sd * prior_sd;
    let centre = (est * var_p + prior_mean * var0) / (var0 + var_p);
    let width = se * prior_sd / (var0 + var_p).sqrt();

    let f = |t: f64| {
        let theta = centre + width * t;
        (ln_pdf(est, theta, se) + ln_pdf(theta, prior_mean, prior_sd)).exp()
    };

    // composite Simpson over +-15 posterior standard deviations
    let (a, b) = (-15.0, 15.0);
    let n = 8192; // even
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        let weight = if i % 2 == 1 { 4.0 } else { 2.0 };
        sum += weight * f(a + h * i as f64);
    }
    width * sum * h / 3.0
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(2_000))]

    /// The closed-form Bayes factor matches direct numerical integration of
    /// the marginal likelihood to high relative accuracy.
    #[test]
    fn bayes_factor_matches_quadrature_oracle(
        est in -5.0..5.0f64,
        se in 0.05..5.0f64,
        prior_mean in -2.0..2.0f64,
        prior_sd in 0.05..5.0f64,
        null in -1.0..1.0f64,
    ) {
        // keep both densities far from floating-point underflow
        prop_assume!(((est - null) / se).abs() <= 25.0);
        let marginal_sd = (se * se + prior_sd * prior_sd).sqrt();
        prop_assume!(((est - prior_mean) / marginal_sd).abs() <= 25.0);

        let prior = NormalPrior::new(prior_mean, prior_sd).unwrap();
        let ln_closed = evidence::ln_bayes_factor_01(study(est, se), null, prior).unwrap();

        let marginal = quadrature_marginal(est, se, prior_mean, prior_sd);
        let ln_quad = ln_pdf(est, null, se) - marginal.ln();

        let relative = ((ln_closed - ln_quad).exp() - 1.0).abs();
        prop_assert!(relative < 1e-6, "relative error {relative:e}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(1_000))]

    /// Fixed-effect pooling gives bit-identical results in any input order.
    #[test]
    fn meta_analysis_invariant_under_permutation(
        (original, shuffled) in prop::collection::vec((-3.0..3.0f64, 0.1..2.0f64), 2..8)
            .prop_flat_map(|v| (Just(v.clone()), Just(v).prop_shuffle())),
        null in -1.0..1.0f64,
    ) {
        let build = |spec: &[(f64, f64)]| {
            spec.iter().map(|&(est, se)| study(est, se)).collect::<Vec<_>>()
        };
        let a = meta::fixed_effect_meta(&build(&original), null).unwrap();
        let b = meta::fixed_effect_meta(&build(&shuffled), null).unwrap();
        prop_assert_eq!(a.estimate.to_bits(), b.estimate.to_bits());
        prop_assert_eq!(a.se.to_bits(), b.se.to_bits());
        prop_assert_eq!(
            a.p_two_sided.value().to_bits(),
            b.p_two_sided.value().to_bits()
        );
    }

    /// Scaling estimates, standard errors, the margin, the prior and the
    /// null together by a power of two flips no criterion verdict: the
    /// whole analysis only sees exponent shifts.
    #[test]
    fn verdicts_invariant_under_joint_binary_rescaling(
        est_o in -2.0..2.0f64,
        est_r in -2.0..2.0f64,
        se_o in 0.05..1.5f64,
        se_r in 0.05..1.5f64,
        delta in 0.05..2.0f64,
        prior_sd in 0.1..4.0f64,
        prior_mean in -1.0..1.0f64,
        null in -1.0..1.0f64,
        alpha in 0.011..0.49f64,
        gamma in 1.5..10.0f64,
        factor_idx in 0..6usize,
    ) {
        let factor = [0.125, 0.25, 0.5, 2.0, 4.0, 8.0][factor_idx];

        let make_pair = |eo: f64, so: f64, er: f64, sr: f64| StudyPair {
            project: "P".into(),
            paper_id: "1".into(),
            experiment_id: "1".into(),
            effect_id: "1".into(),
            original: study(eo, so),
            replications: vec![study(er, sr)],
            original_p_reported: None,
            replication_p_reported: None,
            is_null_result: true,
        };
        let make_config = |scale: f64| {
            let mut cfg = AnalysisConfig::new(delta * scale).unwrap();
            cfg.null_value = null * scale;
            cfg.prior_mean = prior_mean * scale;
            cfg.prior_sd = prior_sd * scale;
            cfg.alpha = alpha;
            cfg.gamma = gamma;
            cfg
        };

        let plain = criteria::evaluate_pair(&make_pair(est_o, se_o, est_r, se_r), &make_config(1.0)).unwrap();
        let scaled = criteria::evaluate_pair(
            &make_pair(est_o * factor, se_o * factor, est_r * factor, se_r * factor),
            &make_config(factor),
        )
        .unwrap();

        for (a, b) in plain.outcomes.iter().zip(&scaled.outcomes) {
            prop_assert_eq!(a.success, b.success, "criterion {} at factor {}", a.criterion, factor);
        }
        // the underlying p-values and Bayes factors are bit-identical too
        prop_assert_eq!(plain.original.p_recomputed.to_bits(), scaled.original.p_recomputed.to_bits());
        prop_assert_eq!(plain.original.tost_p.to_bits(), scaled.original.tost_p.to_bits());
        prop_assert_eq!(plain.original.bf01.to_bits(), scaled.original.bf01.to_bits());
        prop_assert_eq!(plain.replication.tost_p.to_bits(), scaled.replication.tost_p.to_bits());
    }
}
