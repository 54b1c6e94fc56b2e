//! `altarb` command-line front end.
//!
//! Exit codes: 0 on success, 1 for usage or configuration errors, 2 for data
//! errors (unreadable files, insufficient history, missing Bitcoin row, ...).

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use altarb_core::{
    run_backtest, survivors, tier_liquidity, BacktestConfig, Exclusion, ReturnMode, SignalMode,
    TierSpec, VolSource, WeightingScheme, WindowConfig,
};
use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::ingest::{load_dataset, IngestError};
use crate::report::{
    format_backtest, format_liquidity, write_pnl_csv, BacktestReportDoc, LiquidityDoc,
};

#[derive(Debug, Parser)]
#[command(name = "altarb", version)]
#[command(about = "Backtest the altcoin/Bitcoin mean-reversion arbitrage strategy")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a backtest and write the daily P&L and a metrics report
    Backtest(BacktestArgs),
    /// Market cap / ADV / turnover summaries for a market-cap tier
    Stats(StatsArgs),
    /// Load a data directory and report its shape and filter survivors
    Validate(ValidateArgs),
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Directory holding cr.prc.txt, cr.open.txt, ... cr.name.txt
    #[arg(long)]
    pub data_dir: PathBuf,

    /// Data files start with a header row
    #[arg(long)]
    pub header: bool,
}

#[derive(Debug, Args)]
pub struct UniverseArgs {
    /// Selection period length in days
    #[arg(long, default_value_t = 365)]
    pub days: usize,

    /// Days to skip at the recent end of the selection period
    #[arg(long, default_value_t = 0)]
    pub back: usize,

    /// Backtest length in days (defaults to --days)
    #[arg(long)]
    pub lookback: Option<usize>,

    /// Padding added to the selection period
    #[arg(long = "dr", default_value_t = 20)]
    pub d_r: usize,

    /// av moving-average length
    #[arg(long = "dv", default_value_t = 20)]
    pub d_v: usize,

    /// hlv moving-average length
    #[arg(long = "di", default_value_t = 20)]
    pub d_i: usize,

    /// Highest market-cap rank admitted (1 = largest)
    #[arg(long, default_value_t = 2)]
    pub rank_upper: usize,

    /// Lowest market-cap rank admitted; omit for no lower bound
    #[arg(long)]
    pub rank_lower: Option<usize>,

    /// Exclude an asset by its exact stored name (repeatable)
    #[arg(long = "exclude", value_name = "NAME")]
    pub exclude: Vec<String>,

    /// Drop the built-in exclusion list (COVAL for lookbacks over 365 days)
    #[arg(long)]
    pub no_default_exclusions: bool,

    /// Name of the Bitcoin row
    #[arg(long, default_value = "Bitcoin")]
    pub btc_name: String,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum SignalModeArg {
    MeanReversion,
    Reversed,
    AlwaysOn,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum WeightingArg {
    Equal,
    InverseVol,
    MomOverVar,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum VolSourceArg {
    Hlv,
    RetSd,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
pub enum ReturnModeArg {
    Close,
    OpenClose,
}

#[derive(Debug, Args)]
pub struct BacktestArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub universe: UniverseArgs,

    #[arg(long, value_enum, default_value = "mean-reversion")]
    pub signal_mode: SignalModeArg,

    #[arg(long, value_enum, default_value = "equal")]
    pub weighting: WeightingArg,

    /// Volatility used by inverse-vol and mom-over-var weighting
    #[arg(long, value_enum, default_value = "hlv")]
    pub vol_source: VolSourceArg,

    #[arg(long, value_enum, default_value = "close")]
    pub return_mode: ReturnModeArg,

    /// Charge the short Bitcoin leg on days with no long position
    #[arg(long)]
    pub charge_btc_on_empty: bool,

    /// Daily P&L CSV output
    #[arg(long, default_value = "pnl.csv")]
    pub pnl_out: PathBuf,

    /// JSON metrics report output
    #[arg(long, default_value = "report.json")]
    pub report_out: PathBuf,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub universe: UniverseArgs,

    /// Average daily volume window in days
    #[arg(long, default_value_t = 20)]
    pub adv_window: usize,

    /// Include the Bitcoin row whatever the tier
    #[arg(long)]
    pub with_btc: bool,

    /// Row label suffix in the printed table (defaults to the rank range)
    #[arg(long)]
    pub label: Option<String>,

    /// Optional JSON output
    #[arg(long)]
    pub report_out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[command(flatten)]
    pub data: DataArgs,

    #[command(flatten)]
    pub universe: UniverseArgs,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Data(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Data(_) => 2,
        }
    }
}

impl From<altarb_core::Error> for CliError {
    fn from(e: altarb_core::Error) -> Self {
        match e {
            altarb_core::Error::InvalidConfig(_) => CliError::Usage(e.to_string()),
            _ => CliError::Data(e.to_string()),
        }
    }
}

impl From<IngestError> for CliError {
    fn from(e: IngestError) -> Self {
        CliError::Data(e.to_string())
    }
}

fn output_error(path: &Path, e: io::Error) -> CliError {
    CliError::Data(format!("{}: {e}", path.display()))
}

impl UniverseArgs {
    fn config(&self) -> Result<BacktestConfig, CliError> {
        let tier = TierSpec::new(self.rank_upper, self.rank_lower)?;
        let mut exclusions = if self.no_default_exclusions {
            Vec::new()
        } else {
            Exclusion::defaults()
        };
        exclusions.extend(self.exclude.iter().cloned().map(Exclusion::always));
        Ok(BacktestConfig {
            window: WindowConfig {
                days: self.days,
                d_r: self.d_r,
                d_v: self.d_v,
                d_i: self.d_i,
            },
            back: self.back,
            lookback: self.lookback.unwrap_or(self.days),
            tier,
            btc_name: self.btc_name.clone(),
            exclusions,
            ..BacktestConfig::default()
        })
    }
}

impl BacktestArgs {
    pub fn config(&self) -> Result<BacktestConfig, CliError> {
        let mut c = self.universe.config()?;
        c.signal_mode = match self.signal_mode {
            SignalModeArg::MeanReversion => SignalMode::MeanReversion,
            SignalModeArg::Reversed => SignalMode::Reversed,
            SignalModeArg::AlwaysOn => SignalMode::AlwaysOn,
        };
        c.weighting = match self.weighting {
            WeightingArg::Equal => WeightingScheme::Equal,
            WeightingArg::InverseVol => WeightingScheme::InverseVol,
            WeightingArg::MomOverVar => WeightingScheme::MomOverVar,
        };
        c.vol_source = match self.vol_source {
            VolSourceArg::Hlv => VolSource::Hlv,
            VolSourceArg::RetSd => VolSource::ReturnSd,
        };
        c.return_mode = match self.return_mode {
            ReturnModeArg::Close => ReturnMode::CloseToClose,
            ReturnModeArg::OpenClose => ReturnMode::OpenToClose,
        };
        c.charge_btc_on_empty = self.charge_btc_on_empty;
        c.validate()?;
        Ok(c)
    }
}

pub fn cmd_backtest(args: &BacktestArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = args.config()?;
    let (ds, ingest) = load_dataset(&args.data.data_dir, args.data.header)?;
    for w in &ingest.warnings {
        eprintln!("warning: {w}");
    }
    let result = run_backtest(&ds, &config)?;
    for w in &result.warnings {
        eprintln!("warning: {w}");
    }

    let file = File::create(&args.pnl_out).map_err(|e| output_error(&args.pnl_out, e))?;
    let mut csv = BufWriter::new(file);
    write_pnl_csv(&mut csv, &result)
        .and_then(|_| csv.flush())
        .map_err(|e| output_error(&args.pnl_out, e))?;

    let doc = BacktestReportDoc::new(&config, &result);
    let json = serde_json::to_string_pretty(&doc).expect("report serializes");
    std::fs::write(&args.report_out, json + "\n").map_err(|e| output_error(&args.report_out, e))?;

    write!(out, "{}", format_backtest(&result)).map_err(|e| CliError::Data(e.to_string()))?;
    Ok(())
}

pub fn cmd_stats(args: &StatsArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = args.universe.config()?;
    config.validate()?;
    let (ds, _) = load_dataset(&args.data.data_dir, args.data.header)?;
    let summary = tier_liquidity(&ds, &config, args.adv_window, args.with_btc)?;
    let label = args.label.clone().unwrap_or_else(|| match config.tier.ix_lower {
        Some(lo) => format!("{}-{lo}", config.tier.ix_upper),
        None => format!("{}-", config.tier.ix_upper),
    });
    if let Some(path) = &args.report_out {
        let doc = LiquidityDoc::new(&label, &config, args.adv_window, &summary);
        let json = serde_json::to_string_pretty(&doc).expect("report serializes");
        std::fs::write(path, json + "\n").map_err(|e| output_error(path, e))?;
    }
    writeln!(out, "assets     {}", summary.n_assets)
        .and_then(|_| write!(out, "{}", format_liquidity(&label, &summary)))
        .map_err(|e| CliError::Data(e.to_string()))?;
    Ok(())
}

pub fn cmd_validate(args: &ValidateArgs, out: &mut dyn Write) -> Result<(), CliError> {
    let config = args.universe.config()?;
    config.validate()?;
    let (ds, report) = load_dataset(&args.data.data_dir, args.data.header)?;
    let mut text = format!(
        "assets     {}\ndates      {}\n",
        report.n_assets, report.n_dates
    );
    for (label, n) in &report.n_missing {
        text += &format!("missing    {label:<7} {n}\n");
    }
    for w in &report.warnings {
        text += &format!("warning    {w}\n");
    }
    let surv = survivors(&ds, &config);
    let surv = match surv {
        Ok(s) => s,
        Err(e) => {
            let _ = out.write_all(text.as_bytes());
            return Err(e.into());
        }
    };
    text += &format!(
        "window     {} columns\nstatic     {} assets pass the missing-data and zero-volume filters\n\
         universe   {} assets pass the stale-price filter\n",
        config.window.padded_len(),
        surv.static_mask.n_kept(),
        surv.rows.len()
    );
    out.write_all(text.as_bytes())
        .map_err(|e| CliError::Data(e.to_string()))
}

pub fn run(cli: &Cli, out: &mut dyn Write) -> Result<(), CliError> {
    match &cli.command {
        Command::Backtest(a) => cmd_backtest(a, out),
        Command::Stats(a) => cmd_stats(a, out),
        Command::Validate(a) => cmd_validate(a, out),
    }
}

/// Parses `args`, runs the command and maps the outcome to an exit code.
pub fn main_with_args<I, T>(args: I) -> ExitCode
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() {
                ExitCode::from(1)
            } else {
                ExitCode::SUCCESS
            };
        }
    };
    let stdout = io::stdout();
    let mut lock = stdout.lock();
    match run(&cli, &mut lock) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
