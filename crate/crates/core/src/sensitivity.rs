//! Sensitivity of the equivalence and Bayes-factor verdicts to their
//! tuning constants.
//!
//! The equivalence criterion depends on the margin Δ and the significance
//! level α; the Bayes-factor criterion on the prior standard deviation s
//! and the threshold γ. None of these has a canonical value, so the honest
//! summary is a curve, not a verdict: [`margin_sweep`] and
//! [`prior_sd_sweep`] count criterion successes over a grid of margins or
//! prior widths, crossed with several thresholds, and
//! [`pair_evidence_curve`] traces one pair's p-values or Bayes factors
//! along the same axis for plotting.
//!
//! Grids are log-spaced by default ([`log_spaced`]) because both axes span
//! orders of magnitude; endpoints are hit exactly.

use serde::Serialize;

use crate::criteria::{self, AnalysisConfig, StudyPair};
use crate::error::Error;
use crate::evidence::{self, EquivalenceMargin, NormalPrior, StudyResult};
use crate::Result;

/// Default margin grid bounds (standardized mean difference scale).
pub const DEFAULT_MARGIN_GRID: (f64, f64) = (0.01, 4.5);
/// Default prior-standard-deviation grid bounds.
pub const DEFAULT_PRIOR_SD_GRID: (f64, f64) = (0.25, 20.0);
/// Default number of grid points.
pub const DEFAULT_GRID_POINTS: usize = 200;

/// The tuning constant a sweep varies.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Axis {
    /// Equivalence margin Δ; thresholds are significance levels α.
    Margin,
    /// Prior standard deviation s; thresholds are Bayes factor bounds γ.
    PriorSd,
}

impl Axis {
    pub fn id(self) -> &'static str {
        match self {
            Axis::Margin => "margin",
            Axis::PriorSd => "prior_sd",
        }
    }

    /// What the threshold dimension means on this axis.
    pub fn threshold_name(self) -> &'static str {
        match self {
            Axis::Margin => "alpha",
            Axis::PriorSd => "gamma",
        }
    }
}

impl std::fmt::Display for Axis {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.id())
    }
}

/// Success counts over a grid of tuning values crossed with thresholds.
///
/// `counts[i][j]` is the number of pairs meeting the criterion at grid
/// value `grid[i]` and threshold `thresholds[j]`. When requested,
/// `per_pair[i][k]` holds the binding evidence value for pair
/// `pair_keys[k]` at `grid[i]`: the larger of the two TOST p-values on the
/// margin axis, the smaller of the two Bayes factors on the prior axis.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SensitivityGrid {
    pub axis: Axis,
    pub grid: Vec<f64>,
    pub thresholds: Vec<f64>,
    pub counts: Vec<Vec<usize>>,
    pub n_pairs: usize,
    pub pair_keys: Vec<String>,
    pub per_pair: Option<Vec<Vec<f64>>>,
}

/// One point of a single pair's evidence curve.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CurvePoint {
    /// Grid value (margin or prior standard deviation).
    pub x: f64,
    /// Evidence value for the original study.
    pub original: f64,
    /// Evidence value for the effective (possibly pooled) replication.
    pub replication: f64,
}

/// `n` log-spaced values from `lo` to `hi` inclusive, endpoints exact.
pub fn log_spaced(lo: f64, hi: f64, n: usize) -> Result<Vec<f64>> {
    if !(lo.is_finite() && hi.is_finite()) || lo <= 0.0 {
        return Err(Error::InvalidGrid {
            reason: format!("log-spaced bounds must be finite and positive, got {lo}:{hi}"),
        });
    }
    if hi <= lo {
        return Err(Error::InvalidGrid {
            reason: format!("upper bound must exceed lower bound, got {lo}:{hi}"),
        });
    }
    if n < 2 {
        return Err(Error::InvalidGrid {
            reason: format!("grid needs at least 2 points, got {n}"),
        });
    }
    let (log_lo, log_hi) = (lo.ln(), hi.ln());
    let step = (log_hi - log_lo) / (n - 1) as f64;
    let mut grid = Vec::with_capacity(n);
    grid.push(lo);
    for i in 1..n - 1 {
        grid.push((log_lo + step * i as f64).exp());
    }
    grid.push(hi);
    Ok(grid)
}

/// The default log-spaced grid for an axis.
pub fn default_grid(axis: Axis) -> Vec<f64> {
    let (lo, hi) = match axis {
        Axis::Margin => DEFAULT_MARGIN_GRID,
        Axis::PriorSd => DEFAULT_PRIOR_SD_GRID,
    };
    log_spaced(lo, hi, DEFAULT_GRID_POINTS).expect("default grid bounds are valid")
}

fn effective_pairs(pairs: &[StudyPair]) -> Result<Vec<(String, StudyResult, StudyResult)>> {
    if pairs.is_empty() {
        return Err(Error::EmptyInput { what: "pair list" });
    }
    pairs
        .iter()
        .map(|p| {
            let effective = criteria::aggregate_replications(p)?;
            Ok((p.key(), p.original, effective))
        })
        .collect()
}

fn check_grid(grid: &[f64], what: &str, allow_zero: bool) -> Result<()> {
    if grid.is_empty() {
        return Err(Error::InvalidGrid {
            reason: format!("{what} grid is empty"),
        });
    }
    for &v in grid {
        let ok = v.is_finite() && (v > 0.0 || (allow_zero && v == 0.0));
        if !ok {
            return Err(Error::InvalidGrid {
                reason: format!("{what} grid contains invalid value {v}"),
            });
        }
    }
    Ok(())
}

/// Count equivalence (TOST) successes per margin and significance level.
///
/// A pair succeeds at `(delta, alpha)` when both the original and the
/// effective replication give `p_TOST <= alpha` for the margin `delta`
/// around `config.null_value`. `config.margin` itself is ignored — the
/// grid replaces it.
pub fn margin_sweep(
    pairs: &[StudyPair],
    config: &AnalysisConfig,
    grid: &[f64],
    alphas: &[f64],
    with_per_pair: bool,
) -> Result<SensitivityGrid> {
    config.validate()?;
    check_grid(grid, "margin", false)?;
    if alphas.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "no significance levels given".to_string(),
        });
    }
    for &a in alphas {
        evidence::check_alpha(a)?;
    }
    let eff = effective_pairs(pairs)?;

    let mut counts = Vec::with_capacity(grid.len());
    let mut per_pair = with_per_pair.then(|| Vec::with_capacity(grid.len()));
    for &delta in grid {
        let margin = EquivalenceMargin::with_null(delta, config.null_value)?;
        let binding: Vec<f64> = eff
            .iter()
            .map(|(_, original, replication)| {
                let p_o = evidence::tost_p(*original, margin)?.value();
                let p_r = evidence::tost_p(*replication, margin)?.value();
                Ok(p_o.max(p_r))
            })
            .collect::<Result<Vec<f64>>>()?;
        counts.push(
            alphas
                .iter()
                .map(|&alpha| binding.iter().filter(|&&p| p <= alpha).count())
                .collect(),
        );
        if let Some(rows) = per_pair.as_mut() {
            rows.push(binding);
        }
    }

    Ok(SensitivityGrid {
        axis: Axis::Margin,
        grid: grid.to_vec(),
        thresholds: alphas.to_vec(),
        counts,
        n_pairs: eff.len(),
        pair_keys: eff.into_iter().map(|(k, _, _)| k).collect(),
        per_pair,
    })
}

/// Count Bayes-factor successes per prior standard deviation and threshold.
///
/// A pair succeeds at `(s, gamma)` when both studies give `BF01 >= gamma`
/// under a `Normal(config.prior_mean, s^2)` prior. `config.prior_sd` is
/// ignored — the grid replaces it. A grid value of zero is allowed (point
/// prior at the prior mean).
pub fn prior_sd_sweep(
    pairs: &[StudyPair],
    config: &AnalysisConfig,
    grid: &[f64],
    gammas: &[f64],
    with_per_pair: bool,
) -> Result<SensitivityGrid> {
    config.validate()?;
    check_grid(grid, "prior standard deviation", true)?;
    if gammas.is_empty() {
        return Err(Error::InvalidGrid {
            reason: "no Bayes factor thresholds given".to_string(),
        });
    }
    for &g in gammas {
        if !g.is_finite() || g <= 1.0 {
            return Err(Error::InvalidGamma { value: g });
        }
    }
    let eff = effective_pairs(pairs)?;

    let mut counts = Vec::with_capacity(grid.len());
    let mut per_pair = with_per_pair.then(|| Vec::with_capacity(grid.len()));
    for &sd in grid {
        let prior = NormalPrior::new(config.prior_mean, sd)?;
        let binding: Vec<f64> = eff
            .iter()
            .map(|(_, original, replication)| {
                let bf_o = evidence::bayes_factor_01(*original, config.null_value, prior)?;
                let bf_r = evidence::bayes_factor_01(*replication, config.null_value, prior)?;
                Ok(bf_o.min(bf_r))
            })
            .collect::<Result<Vec<f64>>>()?;
        counts.push(
            gammas
                .iter()
                .map(|&gamma| binding.iter().filter(|&&bf| bf >= gamma).count())
                .collect(),
        );
        if let Some(rows) = per_pair.as_mut() {
            rows.push(binding);
        }
    }

    Ok(SensitivityGrid {
        axis: Axis::PriorSd,
        grid: grid.to_vec(),
        thresholds: gammas.to_vec(),
        counts,
        n_pairs: eff.len(),
        pair_keys: eff.into_iter().map(|(k, _, _)| k).collect(),
        per_pair,
    })
}

/// Trace one pair's evidence along an axis: TOST p-values on the margin
/// axis, Bayes factors on the prior axis, for the original study and the
/// effective replication.
pub fn pair_evidence_curve(
    pair: &StudyPair,
    config: &AnalysisConfig,
    axis: Axis,
    grid: &[f64],
) -> Result<Vec<CurvePoint>> {
    config.validate()?;
    check_grid(grid, axis.id(), axis == Axis::PriorSd)?;
    let original = pair.original;
    let replication = criteria::aggregate_replications(pair)?;

    grid.iter()
        .map(|&x| {
            let (o, r) = match axis {
                Axis::Margin => {
                    let margin = EquivalenceMargin::with_null(x, config.null_value)?;
                    (
                        evidence::tost_p(original, margin)?.value(),
                        evidence::tost_p(replication, margin)?.value(),
                    )
                }
                Axis::PriorSd => {
                    let prior = NormalPrior::new(config.prior_mean, x)?;
                    (
                        evidence::bayes_factor_01(original, config.null_value, prior)?,
                        evidence::bayes_factor_01(replication, config.null_value, prior)?,
                    )
                }
            };
            Ok(CurvePoint {
                x,
                original: o,
                replication: r,
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::data::EffectScale;

    fn study(est: f64, se: f64) -> StudyResult {
        StudyResult::new(est, se, None, EffectScale::Smd).unwrap()
    }

    fn pair(id: &str, original: StudyResult, replication: StudyResult) -> StudyPair {
        StudyPair {
            project: "T".into(),
            paper_id: id.into(),
            experiment_id: "1".into(),
            effect_id: "1".into(),
            original,
            replications: vec![replication],
            original_p_reported: None,
            replication_p_reported: None,
            is_null_result: true,
        }
    }

    fn pairs() -> Vec<StudyPair> {
        vec![
            pair("narrow", study(0.05, 0.1), study(-0.02, 0.12)),
            pair("wide", study(0.3, 0.5), study(0.1, 0.6)),
            pair("shifted", study(1.4, 0.3), study(1.2, 0.35)),
        ]
    }

    fn config() -> AnalysisConfig {
        AnalysisConfig::new(0.74).unwrap()
    }

    #[test]
    fn log_spacing_hits_endpoints_exactly() {
        let grid = log_spaced(0.01, 4.5, 50).unwrap();
        assert_eq!(grid.len(), 50);
        assert_eq!(grid[0], 0.01);
        assert_eq!(grid[49], 4.5);
        // constant ratio between neighbours
        let ratio = grid[1] / grid[0];
        for w in grid.windows(2) {
            assert!(w[1] > w[0]);
            assert!((w[1] / w[0] - ratio).abs() < 1e-9);
        }

        assert!(matches!(
            log_spaced(0.0, 1.0, 5),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(
            log_spaced(2.0, 1.0, 5),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(
            log_spaced(1.0, 2.0, 1),
            Err(Error::InvalidGrid { .. })
        ));
    }

    #[test]
    fn default_grids_are_well_formed() {
        for axis in [Axis::Margin, Axis::PriorSd] {
            let grid = default_grid(axis);
            assert_eq!(grid.len(), DEFAULT_GRID_POINTS);
            assert!(grid.windows(2).all(|w| w[1] > w[0]));
        }
    }

    #[test]
    fn margin_counts_grow_with_margin_and_shrink_with_alpha() {
        let grid = log_spaced(0.05, 20.0, 40).unwrap();
        let alphas = [0.1, 0.05, 0.01];
        let sweep = margin_sweep(&pairs(), &config(), &grid, &alphas, false).unwrap();
        assert_eq!(sweep.axis, Axis::Margin);
        assert_eq!(sweep.n_pairs, 3);
        assert_eq!(sweep.counts.len(), 40);

        for j in 0..alphas.len() {
            for i in 1..grid.len() {
                assert!(
                    sweep.counts[i][j] >= sweep.counts[i - 1][j],
                    "counts must be non-decreasing in the margin"
                );
            }
        }
        for row in &sweep.counts {
            assert_eq!(row.len(), 3);
            // stricter alpha can only lose successes (alphas are descending)
            assert!(row[0] >= row[1] && row[1] >= row[2]);
        }
        // a huge margin certifies everything, a tiny one nothing
        assert_eq!(sweep.counts[39], vec![3, 3, 3]);
        assert_eq!(sweep.counts[0], vec![0, 0, 0]);
    }

    #[test]
    fn margin_per_pair_values_bind_the_count() {
        let grid = [0.5, 1.0, 2.0];
        let sweep = margin_sweep(&pairs(), &config(), &grid, &[0.05], true).unwrap();
        let per_pair = sweep.per_pair.as_ref().unwrap();
        assert_eq!(per_pair.len(), 3);
        for (row, counts) in per_pair.iter().zip(&sweep.counts) {
            assert_eq!(row.len(), 3);
            assert_eq!(counts[0], row.iter().filter(|&&p| p <= 0.05).count());
        }
        // the shifted pair's evidence must be the weakest at moderate margins
        let shifted = sweep
            .pair_keys
            .iter()
            .position(|k| k.contains("shifted"))
            .unwrap();
        assert!(per_pair[1][shifted] > per_pair[1][0]);
    }

    #[test]
    fn prior_counts_shrink_with_gamma() {
        let grid = log_spaced(0.25, 50.0, 30).unwrap();
        let sweep = prior_sd_sweep(&pairs(), &config(), &grid, &[3.0, 6.0, 10.0], false).unwrap();
        assert_eq!(sweep.axis, Axis::PriorSd);
        for row in &sweep.counts {
            assert!(row[0] >= row[1] && row[1] >= row[2]);
        }
        // very wide priors certify every quiet pair (Occam factor)
        assert!(sweep.counts[29][0] >= 2);
    }

    #[test]
    fn zero_prior_sd_certifies_nothing() {
        // with a point prior at the null, both models coincide: BF = 1 < gamma
        let sweep = prior_sd_sweep(&pairs(), &config(), &[0.0, 2.0], &[3.0], true).unwrap();
        assert_eq!(sweep.counts[0], vec![0]);
        for &bf in &sweep.per_pair.as_ref().unwrap()[0] {
            assert!((bf - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn evidence_curves_track_the_axis() {
        let p = pair("narrow", study(0.05, 0.1), study(-0.02, 0.12));
        let grid = log_spaced(0.1, 3.0, 20).unwrap();
        let curve = pair_evidence_curve(&p, &config(), Axis::Margin, &grid).unwrap();
        assert_eq!(curve.len(), 20);
        // TOST p-values fall strictly as the margin widens
        for w in curve.windows(2) {
            assert!(w[1].original < w[0].original);
            assert!(w[1].replication < w[0].replication);
        }

        let curve = pair_evidence_curve(&p, &config(), Axis::PriorSd, &grid).unwrap();
        // this quiet pair's Bayes factors grow with prior width throughout
        for w in curve.windows(2) {
            assert!(w[1].original > w[0].original);
        }
    }

    #[test]
    fn invalid_inputs_are_rejected() {
        let cfg = config();
        assert!(matches!(
            margin_sweep(&pairs(), &cfg, &[], &[0.05], false),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(
            margin_sweep(&pairs(), &cfg, &[0.5, -1.0], &[0.05], false),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(
            margin_sweep(&pairs(), &cfg, &[0.5], &[], false),
            Err(Error::InvalidGrid { .. })
        ));
        assert!(matches!(
            margin_sweep(&pairs(), &cfg, &[0.5], &[0.6], false),
            Err(Error::InvalidAlpha { .. })
        ));
        assert!(matches!(
            prior_sd_sweep(&pairs(), &cfg, &[1.0], &[1.0], false),
            Err(Error::InvalidGamma { .. })
        ));
        assert!(matches!(
            margin_sweep(&[], &cfg, &[0.5], &[0.05], false),
            Err(Error::EmptyInput { .. })
        ));
    }
}
