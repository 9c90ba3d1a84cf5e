//! Command-line toolkit for quantifying evidence that an effect is absent
//! in original/replication study pairs.
//!
//! Subcommands: `analyze` (per-pair evidence and criterion verdicts),
//! `rates` (success counts per criterion), `sweep` (success counts over a
//! grid of equivalence margins or prior widths), `calibrate` (Monte Carlo
//! error rates under a simulated truth), `convert` (effect-scale
//! conversions) and `validate` (structural dataset checks).
//!
//! `--data` accepts a bundled dataset name (`rpcb`, `rpp-eprp`), a bundled
//! file name (`rpcb.csv`, `rpp_eprp.csv`) or a path to a study CSV file.
//! Bundled datasets are checksum-verified unless `--no-verify` is given,
//! and can be redirected to a directory of replacement files through the
//! `REPLITOOL_DATA_DIR` environment variable. Exit codes: 0 on success, 1
//! on domain or validation errors, 2 on usage errors.

mod render;

use std::path::{Path, PathBuf};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};

use replitool_core::calibration::{self, SimScenario};
use replitool_core::criteria::{self, AnalysisConfig, StudyPair};
use replitool_core::data::{self, EffectScale};
use replitool_core::fixtures;
use replitool_core::sensitivity::{self, Axis};

use render::{
    ConversionResult, DataInfo, Envelope, OutputFormat, PairSummary, Style, ValidationSummary,
    SCHEMA_VERSION,
};

#[derive(Parser)]
#[command(
    name = "replitool",
    version,
    about = "Quantify evidence for the absence of an effect in original/replication study pairs"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Per-pair evidence measures and criterion verdicts
    Analyze {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Success counts per replication criterion across a dataset
    Rates {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
    /// Success counts over a grid of margins or prior standard deviations
    Sweep {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// Quantity the grid varies
        #[arg(long, value_enum, default_value_t = SweepAxis::Margin)]
        axis: SweepAxis,
        /// Log-spaced grid as lo:hi:n (default 0.01:4.5:200 for the margin
        /// axis, 0.25:20:200 for the prior axis)
        #[arg(long, value_parser = parse_grid)]
        grid: Option<GridSpec>,
        /// Significance levels for the margin axis, comma-separated
        #[arg(long, value_delimiter = ',', default_values_t = [0.1, 0.05, 0.01], allow_negative_numbers = true)]
        alphas: Vec<f64>,
        /// Bayes factor thresholds for the prior axis, comma-separated
        #[arg(long, value_delimiter = ',', default_values_t = [3.0, 6.0, 10.0], allow_negative_numbers = true)]
        gammas: Vec<f64>,
    },
    /// Monte Carlo error rates of every criterion under a simulated truth
    Calibrate {
        #[command(flatten)]
        config: ConfigArgs,
        #[command(flatten)]
        output: OutputArgs,
        /// True effect generating both simulated studies
        #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
        true_effect: f64,
        /// Standard error of the simulated original study
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        se_original: f64,
        /// Standard error of the simulated replication study
        #[arg(long, default_value_t = 1.0, allow_negative_numbers = true)]
        se_replication: f64,
        /// Number of simulated study pairs
        #[arg(long, default_value_t = 100_000)]
        sims: u64,
        /// Random seed; identical seeds give identical results
        #[arg(long, default_value_t = 0)]
        seed: u64,
    },
    /// Convert an effect estimate to the scale the toolkit analyzes
    Convert {
        #[command(flatten)]
        output: OutputArgs,
        /// Input scale of the estimate
        #[arg(long, value_enum)]
        from: ConvertFrom,
        /// Effect estimate on the input scale
        #[arg(long, allow_negative_numbers = true)]
        estimate: f64,
        /// Standard error on the input scale (log odds ratios only)
        #[arg(long, allow_negative_numbers = true)]
        se: Option<f64>,
        /// Sample size (correlations only; gives the Fisher z standard error)
        #[arg(long)]
        n: Option<u64>,
    },
    /// Check a dataset for structural problems and summarize it
    Validate {
        #[command(flatten)]
        data: DataArgs,
        #[command(flatten)]
        output: OutputArgs,
    },
}

#[derive(Args)]
struct DataArgs {
    /// Bundled dataset name (rpcb, rpp-eprp) or path to a study CSV file
    #[arg(long, default_value = "rpcb")]
    data: String,
    /// Skip checksum verification of bundled datasets
    #[arg(long)]
    no_verify: bool,
}

#[derive(Args)]
struct ConfigArgs {
    /// Equivalence margin; defaults by scale (0.74 for standardized mean
    /// differences, 0.2 for Fisher z)
    #[arg(long, allow_negative_numbers = true)]
    margin: Option<f64>,
    /// Null value the absence claim refers to
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    null: f64,
    /// Mean of the normal analysis prior
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    prior_mean: f64,
    /// Standard deviation of the normal analysis prior
    #[arg(long, default_value_t = criteria::DEFAULT_PRIOR_SD, allow_negative_numbers = true)]
    prior_sd: f64,
    /// Significance level for non-significance, equivalence and two-trials
    #[arg(long, default_value_t = criteria::DEFAULT_ALPHA, allow_negative_numbers = true)]
    alpha: f64,
    /// Bayes factor threshold declaring evidence of absence
    #[arg(long, default_value_t = criteria::DEFAULT_GAMMA, allow_negative_numbers = true)]
    gamma: f64,
    /// Level of the per-study confidence intervals shown by analyze
    #[arg(long, default_value_t = 0.9, allow_negative_numbers = true)]
    ci_level: f64,
    /// Level of the prediction interval criterion
    #[arg(long, default_value_t = 0.95, allow_negative_numbers = true)]
    pi_level: f64,
}

#[derive(Args)]
struct OutputArgs {
    /// Output format
    #[arg(long, value_enum, default_value_t = OutputFormat::Table)]
    format: OutputFormat,
    /// Write output to this file instead of standard output
    #[arg(long)]
    out: Option<PathBuf>,
    /// Print full numeric precision instead of rounded display values
    #[arg(long)]
    full_precision: bool,
}

impl OutputArgs {
    fn style(&self) -> Style {
        Style {
            full_precision: self.full_precision,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum SweepAxis {
    /// Equivalence margin, scored against --alphas
    Margin,
    /// Prior standard deviation, scored against --gammas
    Prior,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
enum ConvertFrom {
    /// Log odds ratio, converted to a standardized mean difference
    #[value(name = "log_or", alias = "log-or")]
    LogOr,
    /// Raw correlation coefficient, converted to Fisher z
    Correlation,
}

/// A `lo:hi:n` log-spaced grid request.
#[derive(Debug, Clone, Copy)]
struct GridSpec {
    lo: f64,
    hi: f64,
    n: usize,
}

fn parse_grid(s: &str) -> std::result::Result<GridSpec, String> {
    let parts: Vec<&str> = s.split(':').collect();
    let [lo, hi, n] = parts.as_slice() else {
        return Err(format!("expected lo:hi:n, got `{s}`"));
    };
    let lo: f64 = lo
        .parse()
        .map_err(|e| format!("bad lower bound `{lo}`: {e}"))?;
    let hi: f64 = hi
        .parse()
        .map_err(|e| format!("bad upper bound `{hi}`: {e}"))?;
    let n: usize = n
        .parse()
        .map_err(|e| format!("bad point count `{n}`: {e}"))?;
    Ok(GridSpec { lo, hi, n })
}

fn main() -> Result<()> {
    match Cli::parse().command {
        Command::Analyze {
            data,
            config,
            output,
        } => run_analyze(&data, &config, &output),
        Command::Rates {
            data,
            config,
            output,
        } => run_rates(&data, &config, &output),
        Command::Sweep {
            data,
            config,
            output,
            axis,
            grid,
            alphas,
            gammas,
        } => run_sweep(&data, &config, &output, axis, grid, &alphas, &gammas),
        Command::Calibrate {
            config,
            output,
            true_effect,
            se_original,
            se_replication,
            sims,
            seed,
        } => run_calibrate(
            &config,
            &output,
            true_effect,
            se_original,
            se_replication,
            sims,
            seed,
        ),
        Command::Convert {
            output,
            from,
            estimate,
            se,
            n,
        } => run_convert(&output, from, estimate, se, n),
        Command::Validate { data, output } => run_validate(&data, &output),
    }
}

/// Resolve `--data` to parsed study pairs plus provenance for the output.
///
/// Bundled names (and bundled file names) win over filesystem paths so that
/// `--data rpcb.csv` always means the pinned dataset.
fn load_data(args: &DataArgs) -> Result<(Vec<StudyPair>, DataInfo)> {
    let verify = !args.no_verify;
    if let Some(info) = fixtures::FIXTURES
        .iter()
        .find(|f| f.name == args.data || f.file_name == args.data)
    {
        let found = fixtures::read_fixture(info.name, verify)
            .with_context(|| format!("loading bundled dataset `{}`", info.name))?;
        let pairs = data::parse_pairs(&found.csv)
            .with_context(|| format!("parsing bundled dataset `{}`", info.name))?;
        let origin = if found.from_data_dir {
            "data-dir"
        } else {
            "bundled"
        };
        let data_info = DataInfo {
            source: info.name.to_string(),
            origin,
            sha256: found.sha256,
            n_pairs: pairs.len(),
            verified: verify,
        };
        return Ok((pairs, data_info));
    }
    let path = Path::new(&args.data);
    if path.exists() {
        let text =
            std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
        let pairs =
            data::parse_pairs(&text).with_context(|| format!("parsing {}", path.display()))?;
        let data_info = DataInfo {
            source: args.data.clone(),
            origin: "file",
            sha256: fixtures::sha256_hex(text.as_bytes()),
            n_pairs: pairs.len(),
            verified: false,
        };
        return Ok((pairs, data_info));
    }
    bail!(
        "`{}` is neither a bundled dataset (rpcb, rpp-eprp) nor an existing file",
        args.data
    )
}

/// Default margin when `--margin` is omitted: fixed by the dataset's scale.
fn default_margin(pairs: Option<&[StudyPair]>) -> Result<f64> {
    let Some(pairs) = pairs else {
        return Ok(criteria::DEFAULT_SMD_MARGIN);
    };
    if pairs.iter().all(|p| p.scale() == EffectScale::Smd) {
        Ok(criteria::DEFAULT_SMD_MARGIN)
    } else if pairs.iter().all(|p| p.scale() == EffectScale::FisherZ) {
        Ok(criteria::DEFAULT_FISHER_Z_MARGIN)
    } else {
        bail!("no default equivalence margin for this dataset's effect scales; pass --margin")
    }
}

fn build_config(args: &ConfigArgs, pairs: Option<&[StudyPair]>) -> Result<AnalysisConfig> {
    let margin = match args.margin {
        Some(m) => m,
        None => default_margin(pairs)?,
    };
    let config = AnalysisConfig {
        null_value: args.null,
        margin,
        prior_mean: args.prior_mean,
        prior_sd: args.prior_sd,
        alpha: args.alpha,
        gamma: args.gamma,
        ci_level: 0.95,
        pi_level: args.pi_level,
        use_reported_p: true,
    };
    config.validate()?;
    Ok(config)
}

fn check_display_level(level: f64) -> Result<()> {
    if !level.is_finite() || level <= 0.0 || level >= 1.0 {
        bail!("--ci-level must lie strictly between 0 and 1, got {level}");
    }
    Ok(())
}

fn run_analyze(data_args: &DataArgs, config_args: &ConfigArgs, output: &OutputArgs) -> Result<()> {
    check_display_level(config_args.ci_level)?;
    let (pairs, info) = load_data(data_args)?;
    let config = build_config(config_args, Some(&pairs))?;
    let reports = criteria::evaluate_dataset(&pairs, &config)?;
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "analyze",
            data: Some(&info),
            config: Some(&config),
            display_ci_level: Some(config_args.ci_level),
            payload: &reports,
        })?,
        OutputFormat::Csv => render::analyze_csv(&reports)?,
        OutputFormat::Table => {
            render::analyze_table(&reports, &output.style(), config_args.ci_level)?
        }
    };
    render::emit(output.out.as_deref(), &text)
}

fn run_rates(data_args: &DataArgs, config_args: &ConfigArgs, output: &OutputArgs) -> Result<()> {
    let (pairs, info) = load_data(data_args)?;
    let config = build_config(config_args, Some(&pairs))?;
    let rates = criteria::success_rates(&pairs, &config)?;
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "rates",
            data: Some(&info),
            config: Some(&config),
            display_ci_level: None,
            payload: &rates,
        })?,
        OutputFormat::Csv => render::rates_csv(&rates)?,
        OutputFormat::Table => render::rates_table(&rates, &output.style())?,
    };
    render::emit(output.out.as_deref(), &text)
}

#[allow(clippy::too_many_arguments)]
fn run_sweep(
    data_args: &DataArgs,
    config_args: &ConfigArgs,
    output: &OutputArgs,
    axis: SweepAxis,
    grid: Option<GridSpec>,
    alphas: &[f64],
    gammas: &[f64],
) -> Result<()> {
    let (pairs, info) = load_data(data_args)?;
    let config = build_config(config_args, Some(&pairs))?;
    let sweep_axis = match axis {
        SweepAxis::Margin => Axis::Margin,
        SweepAxis::Prior => Axis::PriorSd,
    };
    let mut grid_values = match grid {
        Some(spec) => sensitivity::log_spaced(spec.lo, spec.hi, spec.n)?,
        None => sensitivity::default_grid(sweep_axis),
    };
    // Splice in the configured operating point so its row always appears.
    let anchor = match sweep_axis {
        Axis::Margin => config.margin,
        Axis::PriorSd => config.prior_sd,
    };
    grid_values.push(anchor);
    grid_values.sort_by(f64::total_cmp);
    grid_values.dedup();
    let result = match sweep_axis {
        Axis::Margin => sensitivity::margin_sweep(&pairs, &config, &grid_values, alphas, true)?,
        Axis::PriorSd => sensitivity::prior_sd_sweep(&pairs, &config, &grid_values, gammas, true)?,
    };
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "sweep",
            data: Some(&info),
            config: Some(&config),
            display_ci_level: None,
            payload: &result,
        })?,
        OutputFormat::Csv => render::sweep_csv(&result)?,
        OutputFormat::Table => render::sweep_table(&result, &output.style())?,
    };
    render::emit(output.out.as_deref(), &text)
}

fn run_calibrate(
    config_args: &ConfigArgs,
    output: &OutputArgs,
    true_effect: f64,
    se_original: f64,
    se_replication: f64,
    sims: u64,
    seed: u64,
) -> Result<()> {
    let config = build_config(config_args, None)?;
    let scenario = SimScenario {
        true_effect,
        se_original,
        se_replication,
        n_sims: sims,
        seed,
        config: config.clone(),
    };
    let report = calibration::simulate_error_rates(&scenario)?;
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "calibrate",
            data: None,
            config: Some(&config),
            display_ci_level: None,
            payload: &report,
        })?,
        OutputFormat::Csv => render::calibrate_csv(&report)?,
        OutputFormat::Table => render::calibrate_table(&report, &output.style())?,
    };
    render::emit(output.out.as_deref(), &text)
}

fn run_convert(
    output: &OutputArgs,
    from: ConvertFrom,
    estimate: f64,
    se: Option<f64>,
    n: Option<u64>,
) -> Result<()> {
    let result = match from {
        ConvertFrom::LogOr => {
            if n.is_some() {
                bail!("--n only applies to correlation input");
            }
            let converted = match se {
                Some(se_in) => {
                    let (e, s) = data::convert_effect(
                        estimate,
                        se_in,
                        EffectScale::LogOr,
                        EffectScale::Smd,
                    )?;
                    (e, Some(s))
                }
                None => {
                    if !estimate.is_finite() {
                        bail!("--estimate must be finite, got {estimate}");
                    }
                    (data::convert_logor_to_smd(estimate), None)
                }
            };
            ConversionResult {
                from: "log_or",
                to: "smd",
                input_estimate: estimate,
                input_se: se,
                input_n: None,
                estimate: converted.0,
                se: converted.1,
            }
        }
        ConvertFrom::Correlation => {
            if se.is_some() {
                bail!("--se only applies to log odds ratio input; use --n for correlations");
            }
            let z = data::fisher_z_from_correlation(estimate)?;
            let se_out = n.map(data::fisher_z_se).transpose()?;
            ConversionResult {
                from: "correlation",
                to: "fisher_z",
                input_estimate: estimate,
                input_se: None,
                input_n: n,
                estimate: z,
                se: se_out,
            }
        }
    };
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "convert",
            data: None,
            config: None,
            display_ci_level: None,
            payload: &result,
        })?,
        OutputFormat::Csv => render::convert_csv(&result)?,
        OutputFormat::Table => render::convert_table(&result, &output.style())?,
    };
    render::emit(output.out.as_deref(), &text)
}

fn run_validate(data_args: &DataArgs, output: &OutputArgs) -> Result<()> {
    let (pairs, info) = load_data(data_args)?;
    for pair in &pairs {
        pair.validate()
            .with_context(|| format!("pair {}", pair.key()))?;
    }
    let mut scales: Vec<String> = pairs.iter().map(|p| p.scale().to_string()).collect();
    scales.sort();
    scales.dedup();
    let summary = ValidationSummary {
        source: info.source.clone(),
        origin: info.origin,
        sha256: info.sha256.clone(),
        verified: info.verified,
        n_pairs: pairs.len(),
        n_studies: pairs.iter().map(|p| 1 + p.replications.len()).sum(),
        scales,
        pairs: pairs
            .iter()
            .map(|p| PairSummary {
                key: p.key(),
                scale: p.scale().to_string(),
                n_replications: p.replications.len(),
                has_reported_p: p.original_p_reported.is_some()
                    && p.replication_p_reported.is_some(),
            })
            .collect(),
    };
    let text = match output.format {
        OutputFormat::Json => render::to_json(&Envelope {
            schema_version: SCHEMA_VERSION,
            tool: render::tool(),
            command: "validate",
            data: Some(&info),
            config: None,
            display_ci_level: None,
            payload: &summary,
        })?,
        OutputFormat::Csv => render::validate_csv(&summary)?,
        OutputFormat::Table => render::validate_table(&summary)?,
    };
    render::emit(output.out.as_deref(), &text)
}
