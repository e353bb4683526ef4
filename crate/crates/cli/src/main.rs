//! Command-line front end for the study pipeline.

use std::env;
use std::path::PathBuf;

use chrono::NaiveDate;
use clap::{Args, Parser, Subcommand, ValueEnum};

use voltlab_core::exec::ExecMode;
use voltlab_core::pipeline::{
    cmd_coint, cmd_describe, cmd_fit, cmd_granger, cmd_report, cmd_simulate, write_artifacts,
    CommandOutput, DateWindow, ModelOptions, OutputFormats, SimulateConfig, StudyConfig,
};
use voltlab_core::volatility::VolFamily;

#[derive(Parser)]
#[command(
    name = "voltlab",
    version,
    about = "Volatility, cointegration, and causality toolkit for daily price series"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Descriptive statistics, correlogram, and histogram data
    Describe(StudyArgs),
    /// Pre/post volatility-model comparison for one family
    Fit(StudyArgs),
    /// Engle-Granger, Johansen, and error-correction analysis
    Coint(StudyArgs),
    /// Bidirectional Granger causality scan
    Granger(StudyArgs),
    /// Every analysis block in a single document
    Report(StudyArgs),
    /// Generate a synthetic price file from a volatility model
    Simulate(SimArgs),
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FamilyArg {
    Arch,
    Garch,
    Tgarch,
}

impl From<FamilyArg> for VolFamily {
    fn from(f: FamilyArg) -> VolFamily {
        match f {
            FamilyArg::Arch => VolFamily::Arch,
            FamilyArg::Garch => VolFamily::Garch,
            FamilyArg::Tgarch => VolFamily::Tgarch,
        }
    }
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum FormatArg {
    Md,
    Json,
    Csv,
}

fn parse_iso_date(s: &str) -> Result<NaiveDate, String> {
    NaiveDate::parse_from_str(s, "%Y-%m-%d")
        .map_err(|_| format!("'{s}' is not an ISO date (YYYY-MM-DD)"))
}

fn parse_window(s: &str) -> Result<DateWindow, String> {
    let (a, b) = s
        .split_once(':')
        .ok_or_else(|| format!("'{s}' is not a window; expected START:END ISO dates"))?;
    Ok(DateWindow::new(parse_iso_date(a)?, parse_iso_date(b)?))
}

#[derive(Args)]
struct StudyArgs {
    /// Spot (primary) price file: delimited text with date and close columns
    #[arg(long)]
    spot: PathBuf,

    /// Futures (secondary) price file, required for coint and granger
    #[arg(long)]
    futures: Option<PathBuf>,

    /// Event date splitting the pre and post windows (YYYY-MM-DD)
    #[arg(long, value_parser = parse_iso_date)]
    event_date: Option<NaiveDate>,

    /// Pre-event window as START:END (inclusive ISO dates)
    #[arg(long, value_parser = parse_window)]
    pre: Option<DateWindow>,

    /// Post-event window as START:END
    #[arg(long, value_parser = parse_window)]
    post: Option<DateWindow>,

    /// Full-sample window as START:END
    #[arg(long, value_parser = parse_window)]
    full: Option<DateWindow>,

    /// Causality window as START:END
    #[arg(long, value_parser = parse_window)]
    causality: Option<DateWindow>,

    /// Volatility-model family for fit and report
    #[arg(long, value_enum, default_value = "garch")]
    family: FamilyArg,

    /// Squared-shock order of the variance equation
    #[arg(long, default_value_t = 1)]
    p: usize,

    /// Lagged-variance order of the variance equation
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Comma-separated autoregressive lags for the mean equation
    #[arg(long, value_delimiter = ',')]
    mean_lags: Vec<usize>,

    /// Drop the constant from the mean equation
    #[arg(long)]
    no_mean_constant: bool,

    /// Fit without nonnegativity and stationarity constraints
    #[arg(long)]
    unconstrained: bool,

    /// Largest lag order for the causality scan
    #[arg(long, default_value_t = 10)]
    max_lag: usize,

    /// Seed for any randomized work
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output directory (default: $VOLTLAB_OUT, else current directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Output formats, comma-separated subset of md,json,csv
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["md", "json", "csv"])]
    format: Vec<FormatArg>,

    /// Run independent work items (pre/post fits, scan rows) in parallel
    #[arg(long)]
    parallel: bool,
}

fn resolve_out_dir(flag: Option<PathBuf>) -> PathBuf {
    flag.or_else(|| env::var_os("VOLTLAB_OUT").map(PathBuf::from))
        .unwrap_or_else(|| PathBuf::from("."))
}

impl StudyArgs {
    fn into_config(self) -> StudyConfig {
        let mut config = StudyConfig::new(self.spot);
        config.futures_file = self.futures;
        if let Some(d) = self.event_date {
            config.event_date = d;
        }
        if let Some(w) = self.pre {
            config.pre_window = w;
        }
        if let Some(w) = self.post {
            config.post_window = w;
        }
        if let Some(w) = self.full {
            config.full_window = w;
        }
        if let Some(w) = self.causality {
            config.causality_window = w;
        }
        config.model = ModelOptions {
            family: self.family.into(),
            p: self.p,
            q: self.q,
            mean_lags: self.mean_lags,
            mean_constant: !self.no_mean_constant,
            constrained: !self.unconstrained,
        };
        config.max_lag = self.max_lag;
        config.seed = self.seed;
        config.out_dir = resolve_out_dir(self.out_dir);
        config.formats = OutputFormats {
            markdown: self.format.contains(&FormatArg::Md),
            json: self.format.contains(&FormatArg::Json),
            csv: self.format.contains(&FormatArg::Csv),
        };
        config.exec_mode = if self.parallel {
            ExecMode::Parallel
        } else {
            ExecMode::Sequential
        };
        config
    }
}

#[derive(Args)]
struct SimArgs {
    /// Model family to simulate from
    #[arg(long, value_enum, default_value = "garch")]
    family: FamilyArg,

    /// Squared-shock order
    #[arg(long, default_value_t = 1)]
    p: usize,

    /// Lagged-variance order
    #[arg(long, default_value_t = 1)]
    q: usize,

    /// Flattened parameter vector (mean constant, variance intercept,
    /// shock loads, threshold loads for tgarch, variance loads),
    /// comma-separated; defaults to a stable built-in set
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    params: Option<Vec<f64>>,

    /// Number of returns to simulate
    #[arg(long, default_value_t = 3000)]
    t: usize,

    /// Simulation seed
    #[arg(long, default_value_t = 42)]
    seed: u64,

    /// Output price-file path; joined to the output directory if relative
    #[arg(long, default_value = "simulated.csv")]
    out: PathBuf,

    /// Output directory (default: $VOLTLAB_OUT, else current directory)
    #[arg(long)]
    out_dir: Option<PathBuf>,

    /// Output formats for the run summary, comma-separated
    #[arg(long, value_enum, value_delimiter = ',', default_values = ["md", "json", "csv"])]
    format: Vec<FormatArg>,
}

impl SimArgs {
    fn into_parts(self) -> (SimulateConfig, PathBuf, OutputFormats) {
        let out_dir = resolve_out_dir(self.out_dir);
        let out_file = if self.out.is_absolute() {
            self.out
        } else {
            out_dir.join(self.out)
        };
        let config = SimulateConfig {
            family: self.family.into(),
            p: self.p,
            q: self.q,
            params: self.params,
            t_len: self.t,
            seed: self.seed,
            out_file,
        };
        let formats = OutputFormats {
            markdown: self.format.contains(&FormatArg::Md),
            json: self.format.contains(&FormatArg::Json),
            csv: self.format.contains(&FormatArg::Csv),
        };
        (config, out_dir, formats)
    }
}

fn finish_command(
    out: CommandOutput,
    out_dir: &std::path::Path,
    formats: OutputFormats,
) -> voltlab_core::Result<i32> {
    let written = write_artifacts(&out, out_dir, formats)?;
    for path in &written {
        println!("wrote {}", path.display());
    }
    let failed = out.report.failed_blocks();
    if !failed.is_empty() {
        eprintln!("failed blocks: {}", failed.join(", "));
    }
    Ok(out.exit_code())
}

fn dispatch(cli: Cli) -> voltlab_core::Result<i32> {
    match cli.command {
        Command::Describe(args) => {
            let config = args.into_config();
            finish_command(cmd_describe(&config)?, &config.out_dir, config.formats)
        }
        Command::Fit(args) => {
            let config = args.into_config();
            finish_command(cmd_fit(&config)?, &config.out_dir, config.formats)
        }
        Command::Coint(args) => {
            let config = args.into_config();
            finish_command(cmd_coint(&config)?, &config.out_dir, config.formats)
        }
        Command::Granger(args) => {
            let config = args.into_config();
            finish_command(cmd_granger(&config)?, &config.out_dir, config.formats)
        }
        Command::Report(args) => {
            let config = args.into_config();
            finish_command(cmd_report(&config)?, &config.out_dir, config.formats)
        }
        Command::Simulate(args) => {
            let (config, out_dir, formats) = args.into_parts();
            let out = cmd_simulate(&config)?;
            println!("wrote {}", config.out_file.display());
            finish_command(out, &out_dir, formats)
        }
    }
}

fn main() {
    // Exit contract: 0 = success (skipped blocks included), 2 = at least
    // one analysis block failed, 1 = fatal error. Clap would exit 2 on
    // usage errors, so those are remapped onto the fatal path.
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e)
            if matches!(
                e.kind(),
                clap::error::ErrorKind::DisplayHelp | clap::error::ErrorKind::DisplayVersion
            ) =>
        {
            e.exit()
        }
        Err(e) => {
            let _ = e.print();
            std::process::exit(1);
        }
    };
    let code = match dispatch(cli) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            1
        }
    };
    std::process::exit(code);
}
