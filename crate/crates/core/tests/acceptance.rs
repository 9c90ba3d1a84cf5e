//! End-to-end acceptance gate.
//!
//! Each numbered block checks one headline capability against
//! independently derived expected values (success counts on the bundled
//! datasets, displayed evidence values for named pairs, sensitivity
//! thresholds, exact decision dualities, and simulated error rates) and
//! prints a single pass/fail line. The test fails if any block fails, but
//! always reports every line.

use std::time::{Duration, Instant};

use rand_chacha::ChaCha12Rng;
use rand_core::{RngCore, SeedableRng};

use replitool_core::calibration::{simulate_error_rates, SimScenario};
use replitool_core::criteria::{self, AnalysisConfig, Criterion, NoteKind, PairReport, StudyPair};
use replitool_core::data::EffectScale;
use replitool_core::evidence::{self, EquivalenceMargin, NormalPrior, StudyResult};
use replitool_core::fixtures;
use replitool_core::format::{format_bf, format_p};
use replitool_core::meta;
use replitool_core::sensitivity::{self, Axis};
use replitool_core::stats::{norm_cdf, norm_quantile, Probability};

macro_rules! expect {
    ($cond:expr, $($msg:tt)+) => {
        match $cond {
            true => {}
            false => return Err(format!($($msg)+)),
        }
    };
}

type Check = fn() -> Result<(), String>;

fn run<T>(r: replitool_core::Result<T>) -> Result<T, String> {
    r.map_err(|e| e.to_string())
}

fn count(rates: &[criteria::CriterionRate], criterion: Criterion) -> (usize, usize) {
    let r = rates.iter().find(|r| r.criterion == criterion).unwrap();
    (r.successes, r.total)
}

fn report_for<'a>(reports: &'a [PairReport], key: &str) -> Result<&'a PairReport, String> {
    reports
        .iter()
        .find(|r| r.key == key)
        .ok_or_else(|| format!("pair {key} missing from report"))
}

/// 1. Success counts for all eight criteria on the SMD dataset, at the
///    default margin 0.74, alpha 0.05, Normal(0, 2^2) prior and gamma 3.
fn headline_success_counts() -> Result<(), String> {
    let started = Instant::now();
    let pairs = run(fixtures::load_fixture("rpcb", true))?;
    let config = run(AnalysisConfig::new(0.74))?;
    let rates = run(criteria::success_rates(&pairs, &config))?;
    let elapsed = started.elapsed();

    let expected = [
        (Criterion::NonSignificance, 11),
        (Criterion::MetaNonSignificance, 10),
        (Criterion::OrigInReplCi, 11),
        (Criterion::ReplInOrigCi, 12),
        (Criterion::ReplInPredictionInterval, 12),
        (Criterion::TwoTrials, 1),
        (Criterion::EquivalenceTost, 4),
        (Criterion::BayesFactorThreshold, 1),
    ];
    for (criterion, want) in expected {
        let (successes, total) = count(&rates, criterion);
        expect!(total == 15, "{criterion}: expected 15 pairs, got {total}");
        expect!(
            successes == want,
            "{criterion}: expected {want}/15, got {successes}/15"
        );
    }
    expect!(
        elapsed < Duration::from_secs(1),
        "evaluation took {elapsed:?}, budget is 1 s"
    );
    Ok(())
}

/// 2. Displayed TOST p-values and Bayes factors for two named pairs.
fn named_pair_displays() -> Result<(), String> {
    let pairs = run(fixtures::load_fixture("rpcb", true))?;
    let config = run(AnalysisConfig::new(0.74))?;
    let reports = run(criteria::evaluate_dataset(&pairs, &config))?;

    let goetz = report_for(&reports, "RPCB:Goetz2011:1:1")?;
    expect!(
        format_p(goetz.original.tost_p) == "0.06",
        "Goetz original TOST p displays {}, want 0.06",
        format_p(goetz.original.tost_p)
    );
    expect!(
        format_p(goetz.replication.tost_p) == "0.04",
        "Goetz replication TOST p displays {}, want 0.04",
        format_p(goetz.replication.tost_p)
    );
    expect!(
        format_bf(goetz.original.bf01) == "5",
        "Goetz original BF01 displays {}, want 5",
        format_bf(goetz.original.bf01)
    );
    expect!(
        format_bf(goetz.replication.bf01) == "4.1",
        "Goetz replication BF01 displays {}, want 4.1",
        format_bf(goetz.replication.bf01)
    );

    let dawson = report_for(&reports, "RPCB:Dawson2011:2:2")?;
    expect!(
        format_p(dawson.original.tost_p) == "0.75",
        "Dawson original TOST p displays {}, want 0.75",
        format_p(dawson.original.tost_p)
    );
    expect!(
        format_p(dawson.replication.tost_p) == "0.88",
        "Dawson replication TOST p displays {}, want 0.88",
        format_p(dawson.replication.tost_p)
    );
    expect!(
        format_bf(dawson.original.bf01) == "1/1.1",
        "Dawson original BF01 displays {}, want 1/1.1",
        format_bf(dawson.original.bf01)
    );
    expect!(
        format_bf(dawson.replication.bf01) == "1/1.8",
        "Dawson replication BF01 displays {}, want 1/1.8",
        format_bf(dawson.replication.bf01)
    );

    // exactly one reported p-value disagrees with its recomputation by
    // more than the 0.01 flagging threshold across the whole dataset
    let mismatches: Vec<&str> = reports
        .iter()
        .filter(|r| {
            r.notes
                .iter()
                .any(|n| n.kind == NoteKind::ReportedPMismatch)
        })
        .map(|r| r.key.as_str())
        .collect();
    expect!(
        mismatches == ["RPCB:37:1:1"],
        "unexpected reported-p mismatches: {mismatches:?}"
    );
    Ok(())
}

/// 3. Sensitivity sweeps: where the equivalence and Bayes-factor criteria
///    start certifying most of the SMD dataset.
fn sensitivity_thresholds() -> Result<(), String> {
    let pairs = run(fixtures::load_fixture("rpcb", true))?;
    let config = run(AnalysisConfig::new(0.74))?;

    let grid = sensitivity::default_grid(Axis::Margin);
    let sweep = run(sensitivity::margin_sweep(
        &pairs,
        &config,
        &grid,
        &[0.05],
        false,
    ))?;
    let margin_for_11 = grid
        .iter()
        .zip(&sweep.counts)
        .find(|(_, c)| c[0] >= 11)
        .map(|(d, _)| *d);
    let margin_for_11 =
        margin_for_11.ok_or("no margin in the default grid certifies 11/15 pairs")?;
    expect!(
        margin_for_11 > 2.0,
        "margin for 11/15 equivalence successes is {margin_for_11:.3}, expected above 2"
    );
    expect!(
        margin_for_11 <= 4.5,
        "margin for 11/15 equivalence successes is {margin_for_11:.3}, expected within the default grid"
    );
    // at the default margin itself, only 4 of 15 pairs pass
    let at_default = run(sensitivity::margin_sweep(
        &pairs,
        &config,
        &[0.74],
        &[0.05],
        false,
    ))?;
    expect!(
        at_default.counts[0][0] == 4,
        "margin 0.74 certifies {}/15, expected 4",
        at_default.counts[0][0]
    );

    let grid = sensitivity::default_grid(Axis::PriorSd);
    let sweep = run(sensitivity::prior_sd_sweep(
        &pairs,
        &config,
        &grid,
        &[3.0],
        false,
    ))?;
    let sd_for_11 = grid
        .iter()
        .zip(&sweep.counts)
        .find(|(_, c)| c[0] >= 11)
        .map(|(s, _)| *s)
        .ok_or("no prior width in the default grid certifies 11/15 pairs")?;
    expect!(
        (15.0..=25.0).contains(&sd_for_11),
        "prior sd for 11/15 Bayes successes is {sd_for_11:.3}, expected in [15, 25]"
    );

    let at_five = run(sensitivity::prior_sd_sweep(
        &pairs,
        &config,
        &[5.0],
        &[3.0],
        false,
    ))?;
    expect!(
        2 * at_five.counts[0][0] >= at_five.n_pairs,
        "prior sd 5 certifies {}/{} pairs, expected at least half",
        at_five.counts[0][0],
        at_five.n_pairs
    );
    Ok(())
}

/// 4. Verdicts on the correlation-scale dataset at margin 0.2.
fn correlation_dataset_verdicts() -> Result<(), String> {
    let pairs = run(fixtures::load_fixture("rpp-eprp", true))?;
    let config = run(AnalysisConfig::new(0.2))?;
    let reports = run(criteria::evaluate_dataset(&pairs, &config))?;
    expect!(
        reports.len() == 4,
        "expected 4 pairs, got {}",
        reports.len()
    );

    let ranganath_key = "RPP:Ranganath2008:1:1";
    for report in &reports {
        let is_ranganath = report.key == ranganath_key;
        expect!(
            report.success(Criterion::NonSignificance) != is_ranganath,
            "{}: non-significance success should be {}",
            report.key,
            !is_ranganath
        );
        expect!(
            report.success(Criterion::EquivalenceTost) == is_ranganath,
            "{}: equivalence success should be {}",
            report.key,
            is_ranganath
        );
        if is_ranganath {
            expect!(
                report.replication.bf01 < 0.01,
                "{}: replication BF01 is {}, expected far below 1/10",
                report.key,
                report.replication.bf01
            );
            expect!(
                !report.success(Criterion::BayesFactorThreshold),
                "{}: Bayes criterion should fail",
                report.key
            );
        } else {
            expect!(
                report.original.bf01 > 3.0 && report.replication.bf01 > 3.0,
                "{}: both Bayes factors should exceed 3, got {} and {}",
                report.key,
                report.original.bf01,
                report.replication.bf01
            );
        }
    }
    Ok(())
}

fn uniform(rng: &mut ChaCha12Rng, lo: f64, hi: f64) -> f64 {
    let u = ((rng.next_u64() >> 11) as f64 + 0.5) * (1.0 / 9_007_199_254_740_992.0);
    lo + (hi - lo) * u
}

fn ln_pdf(x: f64, mean: f64, sd: f64) -> f64 {
    let z = (x - mean) / sd;
    -0.5 * z * z - sd.ln() - 0.5 * (2.0 * std::f64::consts::PI).ln()
}

/// Marginal likelihood by composite Simpson quadrature in a standardized
/// variable centred on the posterior mode.
fn quadrature_marginal(est: f64, se: f64, prior_mean: f64, prior_sd: f64) -> f64 {
    let var0 = se * se;
    let var_p = prior_sd * prior_sd;
    let centre = (est * var_p + prior_mean * var0) / (var0 + var_p);
    let width = se * prior_sd / (var0 + var_p).sqrt();
    let f = |t: f64| {
        let theta = centre + width * t;
        (ln_pdf(est, theta, se) + ln_pdf(theta, prior_mean, prior_sd)).exp()
    };
    let (a, b) = (-15.0, 15.0);
    let n = 8192;
    let h = (b - a) / n as f64;
    let mut sum = f(a) + f(b);
    for i in 1..n {
        sum += if i % 2 == 1 { 4.0 } else { 2.0 } * f(a + h * i as f64);
    }
    width * sum * h / 3.0
}

/// 5. Exact statistical invariants, checked deterministically here and
///    with randomized search in the separate property suite.
fn property_invariants() -> Result<(), String> {
    // TOST decision == confidence interval inclusion, 10^4 draws
    let mut rng = ChaCha12Rng::seed_from_u64(51);
    for i in 0..10_000 {
        let est = uniform(&mut rng, -3.0, 3.0);
        let se = uniform(&mut rng, 0.05, 3.0);
        let delta = uniform(&mut rng, 0.01, 3.0);
        let alpha = uniform(&mut rng, 0.011, 0.49);
        let study = run(StudyResult::new(est, se, None, EffectScale::Smd))?;
        let margin = run(EquivalenceMargin::new(delta))?;
        let by_p = run(evidence::equivalence_success(study, margin, alpha))?;
        let ci = run(evidence::confidence_interval(study, 1.0 - 2.0 * alpha))?;
        expect!(
            by_p == margin.contains_interval(&ci),
            "duality violated at draw {i}: est {est}, se {se}, delta {delta}, alpha {alpha}"
        );
    }

    // CDF/quantile round trip, 10^4 draws
    for i in 0..10_000 {
        let p = uniform(&mut rng, 0.001, 0.999);
        let z = run(norm_quantile(
            Probability::new(p).map_err(|e| e.to_string())?,
        ))?;
        let back = norm_cdf(z).value();
        expect!(
            (back - p).abs() < 1e-9,
            "round trip off at draw {i}: p {p}, got {back}"
        );
    }

    // closed-form Bayes factor vs quadrature oracle
    let cases = [
        (0.1763, 0.3626, 0.0, 2.0, 0.0),
        (-2.0209, 1.0902, 0.0, 2.0, 0.0),
        (2.66, 1.4, 0.0, 2.0, 0.0),
        (0.13, 0.0885, 0.0, 0.5, 0.0),
        (0.5, 0.5, 0.3, 1.5, 0.1),
        (1.0, 0.1, -0.5, 3.0, 0.2),
        (0.0, 1.0, 0.0, 0.05, 0.0),
        (3.0, 2.0, 1.0, 4.0, -0.5),
        (-0.7, 0.2, 0.4, 0.9, 0.05),
    ];
    for (est, se, prior_mean, prior_sd, null) in cases {
        let study = run(StudyResult::new(est, se, None, EffectScale::Smd))?;
        let prior = run(NormalPrior::new(prior_mean, prior_sd))?;
        let ln_closed = run(evidence::ln_bayes_factor_01(study, null, prior))?;
        let ln_quad =
            ln_pdf(est, null, se) - quadrature_marginal(est, se, prior_mean, prior_sd).ln();
        let relative = ((ln_closed - ln_quad).exp() - 1.0).abs();
        expect!(
            relative < 1e-6,
            "Bayes factor off by {relative:e} at ({est}, {se}, {prior_mean}, {prior_sd}, {null})"
        );
    }

    // meta-analysis order invariance, bit for bit
    let base = [
        (0.3, 0.4),
        (-0.2, 1.1),
        (1.4, 0.25),
        (0.9, 2.0),
        (-1.1, 0.6),
    ];
    let build = |spec: &[(f64, f64)]| -> Result<Vec<StudyResult>, String> {
        spec.iter()
            .map(|&(e, s)| run(StudyResult::new(e, s, None, EffectScale::Smd)))
            .collect()
    };
    let reference = run(meta::fixed_effect_meta(&build(&base)?, 0.0))?;
    for rotation in 1..base.len() {
        let mut reordered = base.to_vec();
        reordered.rotate_left(rotation);
        if rotation % 2 == 0 {
            reordered.reverse();
        }
        let other = run(meta::fixed_effect_meta(&build(&reordered)?, 0.0))?;
        expect!(
            reference.estimate.to_bits() == other.estimate.to_bits()
                && reference.se.to_bits() == other.se.to_bits(),
            "meta-analysis result depends on study order (rotation {rotation})"
        );
    }

    // joint power-of-two rescaling flips no verdict
    let config = run(AnalysisConfig::new(0.74))?;
    for factor in [0.25, 0.5, 2.0, 4.0, 8.0] {
        let mut scaled_config = config.clone();
        scaled_config.margin *= factor;
        scaled_config.prior_sd *= factor;
        for est_o in [-1.2, -0.3, 0.2, 0.8, 1.6] {
            for est_r in [-0.9, 0.05, 0.74, 1.3] {
                let make = |scale: f64| -> Result<StudyPair, String> {
                    Ok(StudyPair {
                        project: "A".into(),
                        paper_id: "1".into(),
                        experiment_id: "1".into(),
                        effect_id: "1".into(),
                        original: run(StudyResult::new(
                            est_o * scale,
                            0.3 * scale,
                            None,
                            EffectScale::Smd,
                        ))?,
                        replications: vec![run(StudyResult::new(
                            est_r * scale,
                            0.45 * scale,
                            None,
                            EffectScale::Smd,
                        ))?],
                        original_p_reported: None,
                        replication_p_reported: None,
                        is_null_result: true,
                    })
                };
                let plain = run(criteria::evaluate_pair(&make(1.0)?, &config))?;
                let scaled = run(criteria::evaluate_pair(&make(factor)?, &scaled_config))?;
                for (a, b) in plain.outcomes.iter().zip(&scaled.outcomes) {
                    expect!(
                        a.success == b.success,
                        "{} verdict changed under rescaling by {factor} at ({est_o}, {est_r})",
                        a.criterion
                    );
                }
            }
        }
    }
    Ok(())
}

/// 6. Monte Carlo error rates at one million simulations per scenario.
fn simulated_error_rates() -> Result<(), String> {
    let config = run(AnalysisConfig::new(0.74))?;

    // no true effect: non-significance rewards noise at 0.95^2, and the
    // two-trials rule errs at most alpha^2
    let null_world = SimScenario {
        true_effect: 0.0,
        se_original: 1.0,
        se_replication: 1.0,
        n_sims: 1_000_000,
        seed: 20_260_824,
        config: config.clone(),
    };
    let started = Instant::now();
    let report = run(simulate_error_rates(&null_world))?;
    let elapsed = started.elapsed();
    expect!(
        elapsed < Duration::from_secs(60),
        "a million simulations took {elapsed:?}, budget is 60 s"
    );

    let ns = report.estimate("non_significance").unwrap();
    expect!(
        (ns.proportion - 0.9025).abs() <= 0.002,
        "non-significance rate {} outside 0.9025 +- 0.002",
        ns.proportion
    );
    expect!(
        (ns.proportion - report.analytic_non_significance).abs() <= 4.0 * ns.mc_se,
        "simulated non-significance rate {} disagrees with closed form {}",
        ns.proportion,
        report.analytic_non_significance
    );
    let two_trials = report.estimate("two_trials").unwrap();
    expect!(
        two_trials.proportion <= 0.0025,
        "two-trials error rate {} exceeds 0.0025",
        two_trials.proportion
    );

    // true effect exactly on the equivalence margin: TOST's worst case,
    // bounded by alpha^2
    let mut boundary_config = run(AnalysisConfig::new(1.0))?;
    boundary_config.use_reported_p = false;
    let boundary = SimScenario {
        true_effect: 1.0,
        se_original: 0.3,
        se_replication: 0.3,
        n_sims: 1_000_000,
        seed: 20_260_825,
        config: boundary_config,
    };
    let started = Instant::now();
    let report = run(simulate_error_rates(&boundary))?;
    let elapsed = started.elapsed();
    expect!(
        elapsed < Duration::from_secs(60),
        "boundary scenario took {elapsed:?}, budget is 60 s"
    );
    let tost = report.estimate("equivalence_tost").unwrap();
    expect!(
        tost.proportion <= 0.0025 + 3.0 * tost.mc_se,
        "equivalence false-success rate {} exceeds 0.0025 + 3 MC se ({})",
        tost.proportion,
        0.0025 + 3.0 * tost.mc_se
    );
    Ok(())
}

#[test]
fn acceptance_gate() {
    let checks: [(&str, Check); 6] = [
        ("headline success counts", headline_success_counts),
        ("named-pair evidence displays", named_pair_displays),
        ("sensitivity thresholds", sensitivity_thresholds),
        (
            "correlation-scale dataset verdicts",
            correlation_dataset_verdicts,
        ),
        ("statistical property invariants", property_invariants),
        ("simulated error rates", simulated_error_rates),
    ];

    let mut failures = Vec::new();
    for (index, (name, check)) in checks.iter().enumerate() {
        match check() {
            Ok(()) => println!("acceptance {}: {name}: PASS", index + 1),
            Err(why) => {
                println!("acceptance {}: {name}: FAIL — {why}", index + 1);
                failures.push(format!("{name}: {why}"));
            }
        }
    }
    assert!(
        failures.is_empty(),
        "acceptance failures:\n{}",
        failures.join("\n")
    );
}
