use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use trendcast_core::cli::{cmd_cluster, cmd_driver, cmd_nowcast, cmd_synth, merge_config, CliError};
use trendcast_core::eval::SynthSpec;
use trendcast_core::io::RunConfig;

/// Separate media-driven from disease-driven search signals and nowcast
/// epidemic case counts.
#[derive(Parser)]
#[command(name = "trendcast", version, about)]
struct Cli {
    /// JSON config file; every key can be overridden by the matching flag.
    #[arg(long, global = true)]
    config: Option<PathBuf>,

    /// Seed for all randomized steps; fixed seed means byte-identical output.
    #[arg(long, global = true)]
    seed: Option<u64>,

    /// Output directory (default `out`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a synthetic benchmark dataset with known cluster structure.
    Synth(SynthArgs),
    /// Cluster search terms and export the dendrogram and cluster profiles.
    Cluster(DataArgs),
    /// Correlate cluster centroids with cases and media.
    Correlate(DataArgs),
    /// Correlations plus Granger-precedence tests per cluster.
    Granger(DataArgs),
    /// Fit and evaluate nowcast models over the configured protocol.
    Nowcast(NowcastArgs),
}

#[derive(Args)]
struct DataArgs {
    /// Terms CSV: header `week,<term>,...`, one row per consecutive week.
    #[arg(long)]
    terms: Option<PathBuf>,

    /// Media-mentions CSV with a single value column.
    #[arg(long)]
    media: Option<PathBuf>,

    /// Case-counts CSV with a single value column.
    #[arg(long)]
    cases: Option<PathBuf>,

    /// Week labels: `iso` (YYYY-Www) or `sunday` (YYYY-MM-DD week-start dates).
    #[arg(long)]
    week_format: Option<String>,

    /// Number of clusters to cut the dendrogram into (default 3).
    #[arg(long)]
    cluster_k: Option<usize>,

    /// First week of the clustering window (default: panel start).
    #[arg(long)]
    clustering_start: Option<String>,

    /// Last week of the clustering window (default: panel end).
    #[arg(long)]
    clustering_end: Option<String>,
}

#[derive(Args)]
struct NowcastArgs {
    #[command(flatten)]
    data: DataArgs,

    /// Evaluation protocol: `seasonal` or `wave`.
    #[arg(long)]
    protocol: Option<String>,

    /// Season start weeks (comma-separated YYYY-Www); the last entry closes
    /// the final season.
    #[arg(long, value_delimiter = ',')]
    season_boundaries: Option<Vec<String>>,

    /// First week of the window searched for the between-wave minimum.
    #[arg(long)]
    wave_search_start: Option<String>,

    /// Last week of the window searched for the between-wave minimum.
    #[arg(long)]
    wave_search_end: Option<String>,

    /// Models to evaluate (comma-separated): linreg, rf.
    #[arg(long, value_delimiter = ',')]
    models: Option<Vec<String>>,

    /// Feature sets (comma-separated): all, cluster:<id>, ids:<a>+<b>.
    #[arg(long, value_delimiter = ',')]
    feature_sets: Option<Vec<String>>,

    /// Fixed forest hyperparameters `<n_estimators>,<max_features>,<max_depth>`
    /// (skips the grid search).
    #[arg(long)]
    rf_hyper: Option<String>,

    /// Cross-validation folds for the hyperparameter grid search (default 5).
    #[arg(long)]
    rf_folds: Option<usize>,
}

#[derive(Args)]
struct SynthArgs {
    /// Number of weeks (default 120).
    #[arg(long)]
    weeks: Option<usize>,

    /// First week, as YYYY-Www (default 2020-W01).
    #[arg(long)]
    start: Option<String>,

    /// Per-week noise standard deviation on the 0-100 scale (default 3).
    #[arg(long)]
    noise_sd: Option<f64>,

    /// Terms per cluster as `<n1>,<n2>,<n3>` (default 8,8,8).
    #[arg(long)]
    cluster_sizes: Option<String>,

    /// Case waves as `<week>:<height>:<width>[,...]` (default 30:800:6,85:1000:8).
    #[arg(long)]
    wave_peaks: Option<String>,

    /// Media bump as `<week>:<height>:<width>:<decay>` (default 22:600:3:12).
    #[arg(long)]
    media_peak: Option<String>,
}

fn apply_data_args(cfg: &mut RunConfig, args: &DataArgs) {
    if args.terms.is_some() {
        cfg.terms = args.terms.clone();
    }
    if args.media.is_some() {
        cfg.media = args.media.clone();
    }
    if args.cases.is_some() {
        cfg.cases = args.cases.clone();
    }
    if args.week_format.is_some() {
        cfg.week_format = args.week_format.clone();
    }
    if args.cluster_k.is_some() {
        cfg.cluster_k = args.cluster_k;
    }
    if args.clustering_start.is_some() {
        cfg.clustering_start = args.clustering_start.clone();
    }
    if args.clustering_end.is_some() {
        cfg.clustering_end = args.clustering_end.clone();
    }
}

fn apply_nowcast_args(cfg: &mut RunConfig, args: &NowcastArgs) {
    apply_data_args(cfg, &args.data);
    if args.protocol.is_some() {
        cfg.protocol = args.protocol.clone();
    }
    if args.season_boundaries.is_some() {
        cfg.season_boundaries = args.season_boundaries.clone();
    }
    if args.wave_search_start.is_some() {
        cfg.wave_search_start = args.wave_search_start.clone();
    }
    if args.wave_search_end.is_some() {
        cfg.wave_search_end = args.wave_search_end.clone();
    }
    if args.models.is_some() {
        cfg.models = args.models.clone();
    }
    if args.feature_sets.is_some() {
        cfg.feature_sets = args.feature_sets.clone();
    }
    if args.rf_hyper.is_some() {
        cfg.rf_hyper = args.rf_hyper.clone();
    }
    if args.rf_folds.is_some() {
        cfg.rf_folds = args.rf_folds;
    }
}

fn build_synth_spec(args: &SynthArgs, seed: u64) -> Result<SynthSpec, CliError> {
    let mut spec = SynthSpec {
        seed,
        ..SynthSpec::default()
    };
    if let Some(weeks) = args.weeks {
        spec.weeks = weeks;
    }
    if let Some(start) = &args.start {
        spec.start = start
            .parse()
            .map_err(|_| CliError(format!("bad start week '{start}' (expected YYYY-Www)")))?;
    }
    if let Some(noise) = args.noise_sd {
        spec.noise_sd = noise;
    }
    if let Some(sizes) = &args.cluster_sizes {
        let parts: Vec<usize> = sizes
            .split(',')
            .map(|p| p.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError(format!("bad cluster sizes '{sizes}' (expected n1,n2,n3)")))?;
        if parts.len() != 3 {
            return Err(CliError(format!(
                "bad cluster sizes '{sizes}' (expected exactly three counts)"
            )));
        }
        spec.cluster_sizes = (parts[0], parts[1], parts[2]);
    }
    if let Some(peaks) = &args.wave_peaks {
        spec.wave_peaks = peaks
            .split(',')
            .map(|p| {
                let nums: Vec<f64> = p
                    .split(':')
                    .map(|x| x.trim().parse())
                    .collect::<Result<_, _>>()
                    .map_err(|_| CliError(format!("bad wave peak '{p}'")))?;
                if nums.len() != 3 {
                    return Err(CliError(format!(
                        "wave peak '{p}' must be week:height:width"
                    )));
                }
                Ok((nums[0], nums[1], nums[2]))
            })
            .collect::<Result<_, _>>()?;
    }
    if let Some(peak) = &args.media_peak {
        let nums: Vec<f64> = peak
            .split(':')
            .map(|x| x.trim().parse())
            .collect::<Result<_, _>>()
            .map_err(|_| CliError(format!("bad media peak '{peak}'")))?;
        if nums.len() != 4 {
            return Err(CliError(format!(
                "media peak '{peak}' must be week:height:width:decay"
            )));
        }
        spec.media_peak = (nums[0], nums[1], nums[2], nums[3]);
    }
    Ok(spec)
}

fn run(cli: &Cli) -> Result<u8, CliError> {
    let mut cfg = merge_config(cli.config.as_deref())?;
    if cli.seed.is_some() {
        cfg.seed = cli.seed;
    }
    if cli.out.is_some() {
        cfg.out = cli.out.clone();
    }

    match &cli.command {
        Command::Synth(args) => {
            let spec = build_synth_spec(args, cfg.seed.unwrap_or(0))?;
            let out = cfg.out.clone().unwrap_or_else(|| PathBuf::from("out"));
            cmd_synth(&spec, &out)?;
            Ok(0)
        }
        Command::Cluster(args) => {
            apply_data_args(&mut cfg, args);
            cmd_cluster(&cfg)?;
            Ok(0)
        }
        Command::Correlate(args) => {
            apply_data_args(&mut cfg, args);
            cmd_driver(&cfg, false)?;
            Ok(0)
        }
        Command::Granger(args) => {
            apply_data_args(&mut cfg, args);
            cmd_driver(&cfg, true)?;
            Ok(0)
        }
        Command::Nowcast(args) => {
            apply_nowcast_args(&mut cfg, args);
            let stats = cmd_nowcast(&cfg)?;
            if stats.failed_cells > 0 {
                eprintln!(
                    "warning: {} of {} cells failed (see error rows in eval_report.csv)",
                    stats.failed_cells, stats.total_cells
                );
                Ok(1)
            } else {
                Ok(0)
            }
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(&cli) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(2)
        }
    }
}
