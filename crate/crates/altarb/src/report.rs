//! Output artifacts: the JSON report, the P&L CSV and console tables.

use std::fmt::Write as _;
use std::io::{self, Write};

use altarb_core::{
    BacktestConfig, BacktestResult, LiquiditySummary, ReturnMode, SignalMode, SixNumberSummary,
    VolSource, WeightingScheme,
};
use serde::Serialize;

pub fn signal_mode_name(m: SignalMode) -> &'static str {
    match m {
        SignalMode::MeanReversion => "mean-reversion",
        SignalMode::Reversed => "reversed",
        SignalMode::AlwaysOn => "always-on",
    }
}

pub fn weighting_name(w: WeightingScheme) -> &'static str {
    match w {
        WeightingScheme::Equal => "equal",
        WeightingScheme::InverseVol => "inverse-vol",
        WeightingScheme::MomOverVar => "mom-over-var",
    }
}

pub fn vol_source_name(v: VolSource) -> &'static str {
    match v {
        VolSource::Hlv => "hlv",
        VolSource::ReturnSd => "ret-sd",
    }
}

pub fn return_mode_name(r: ReturnMode) -> &'static str {
    match r {
        ReturnMode::CloseToClose => "close",
        ReturnMode::OpenToClose => "open-close",
    }
}

#[derive(Debug, Serialize)]
pub struct ConfigDoc {
    pub days: usize,
    pub back: usize,
    pub lookback: usize,
    pub d_r: usize,
    pub d_v: usize,
    pub d_i: usize,
    pub rank_upper: usize,
    pub rank_lower: Option<usize>,
    pub signal_mode: &'static str,
    pub weighting: &'static str,
    pub vol_source: &'static str,
    pub return_mode: &'static str,
    pub btc_name: String,
    /// Names excluded for this lookback.
    pub excluded: Vec<String>,
    pub charge_btc_on_empty: bool,
}

impl ConfigDoc {
    pub fn new(c: &BacktestConfig) -> Self {
        Self {
            days: c.window.days,
            back: c.back,
            lookback: c.lookback,
            d_r: c.window.d_r,
            d_v: c.window.d_v,
            d_i: c.window.d_i,
            rank_upper: c.tier.ix_upper,
            rank_lower: c.tier.ix_lower,
            signal_mode: signal_mode_name(c.signal_mode),
            weighting: weighting_name(c.weighting),
            vol_source: vol_source_name(c.vol_source),
            return_mode: return_mode_name(c.return_mode),
            btc_name: c.btc_name.clone(),
            excluded: altarb_core::Exclusion::active_names(&c.exclusions, c.lookback),
            charge_btc_on_empty: c.charge_btc_on_empty,
        }
    }
}

fn finite(x: f64) -> Option<f64> {
    x.is_finite().then_some(x)
}

#[derive(Debug, Serialize)]
pub struct BacktestReportDoc {
    pub roc_pct: f64,
    /// `null` when the daily P&L has zero variance.
    pub sharpe: Option<f64>,
    pub sharpe_defined: bool,
    pub n_days: usize,
    pub mean_daily_pnl: f64,
    pub sd_daily_pnl: Option<f64>,
    /// Long plus short investment level the ROC is measured against.
    pub capital: f64,
    pub n_static: usize,
    pub n_universe: usize,
    pub n_degenerate_days: usize,
    pub config: ConfigDoc,
    pub warnings: Vec<String>,
}

impl BacktestReportDoc {
    pub fn new(config: &BacktestConfig, r: &BacktestResult) -> Self {
        Self {
            roc_pct: r.report.roc_pct,
            sharpe: r.report.sharpe_defined.then_some(r.report.sharpe),
            sharpe_defined: r.report.sharpe_defined,
            n_days: r.report.n_days,
            mean_daily_pnl: r.report.mean_daily_pnl,
            sd_daily_pnl: finite(r.report.sd_daily_pnl),
            capital: r.report.capital,
            n_static: r.n_static,
            n_universe: r.n_universe,
            n_degenerate_days: r.daily.iter().filter(|d| d.degenerate).count(),
            config: ConfigDoc::new(config),
            warnings: r.warnings.clone(),
        }
    }
}

/// `day_index,daily_pnl,cum_pnl`, day 0 being the oldest day.
pub fn write_pnl_csv<W: Write>(mut w: W, r: &BacktestResult) -> io::Result<()> {
    writeln!(w, "day_index,daily_pnl,cum_pnl")?;
    for (k, (d, c)) in r.daily.iter().zip(&r.cum_pnl).enumerate() {
        writeln!(w, "{k},{},{c}", d.pnl)?;
    }
    Ok(())
}

/// Rounds to two decimals and prints without trailing zeros ("174.7").
pub fn round2(x: f64) -> String {
    if !x.is_finite() {
        return "NaN".to_owned();
    }
    let r = (x * 100.0).round() / 100.0;
    // avoid "-0"
    format!("{}", if r == 0.0 { 0.0 } else { r })
}

pub fn format_backtest(r: &BacktestResult) -> String {
    let mut s = String::new();
    let _ = writeln!(s, "days       {}", r.report.n_days);
    let _ = writeln!(s, "universe   {} (static filter {})", r.n_universe, r.n_static);
    let _ = writeln!(s, "ROC (%)    {}", round2(r.roc_pct));
    let _ = writeln!(
        s,
        "Sharpe     {}",
        if r.report.sharpe_defined {
            round2(r.sharpe)
        } else {
            "undefined (zero variance)".to_owned()
        }
    );
    s
}

/// Scientific notation with two decimals and a signed two-digit exponent,
/// e.g. `1.19e+08`.
pub fn sci(x: f64) -> String {
    let s = format!("{x:.2e}");
    match s.split_once('e') {
        Some((mant, exp)) => {
            let (sign, digits) = match exp.strip_prefix('-') {
                Some(d) => ('-', d),
                None => ('+', exp),
            };
            format!("{mant}e{sign}{digits:0>2}")
        }
        None => s,
    }
}

#[derive(Debug, Serialize)]
pub struct SummaryDoc {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

impl From<&SixNumberSummary> for SummaryDoc {
    fn from(s: &SixNumberSummary) -> Self {
        Self {
            min: s.min,
            q1: s.q1,
            median: s.median,
            mean: s.mean,
            q3: s.q3,
            max: s.max,
        }
    }
}

#[derive(Debug, Serialize)]
pub struct LiquidityDoc {
    pub label: String,
    pub n_assets: usize,
    pub adv_window: usize,
    pub cap: SummaryDoc,
    pub adv: SummaryDoc,
    pub tvr: SummaryDoc,
    pub config: ConfigDoc,
}

impl LiquidityDoc {
    pub fn new(
        label: &str,
        config: &BacktestConfig,
        adv_window: usize,
        l: &LiquiditySummary,
    ) -> Self {
        Self {
            label: label.to_owned(),
            n_assets: l.n_assets,
            adv_window,
            cap: (&l.cap).into(),
            adv: (&l.adv).into(),
            tvr: (&l.tvr).into(),
            config: ConfigDoc::new(config),
        }
    }
}

pub fn format_liquidity(label: &str, l: &LiquiditySummary) -> String {
    let mut s = String::new();
    let _ = writeln!(
        s,
        "{:<10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
        "Quantity", "Min", "1st Qu", "Median", "Mean", "3rd Qu", "Max"
    );
    for (name, q) in [("Cap", &l.cap), ("ADV", &l.adv), ("Tvr", &l.tvr)] {
        let _ = writeln!(
            s,
            "{:<10} {:>9} {:>9} {:>9} {:>9} {:>9} {:>9}",
            format!("{name}.{label}"),
            sci(q.min),
            sci(q.q1),
            sci(q.median),
            sci(q.mean),
            sci(q.q3),
            sci(q.max)
        );
    }
    s
}
