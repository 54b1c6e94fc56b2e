//! The daily simulation loop.
//!
//! [`PreparedBacktest::new`] runs everything that does not depend on the
//! trading day, in this order:
//!
//! 1. keep the first `days + d_r + 1` date columns;
//! 2. static filter (no missing cells, no zero volume) over that window;
//! 3. returns from the unshifted close panel, then [`shift_one_day`] on every
//!    raw panel;
//! 4. skip `back` columns of every panel, returns included;
//! 5. av / hlv / mom / size over `lookback` days;
//! 6. stale-price filter on hlv;
//! 7. locate Bitcoin and the excluded names among the survivors.
//!
//! Each trading day is then an independent function of the prepared state:
//! tier from that day's size column, signal from its mom column, weights, and
//! the long-minus-Bitcoin return.
//!
//! [`shift_one_day`]: crate::factors::shift_one_day

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::factors::{
    close_returns, open_close_returns, return_sd, shift_dataset, FactorSet, ReturnsPanel,
    WindowConfig,
};
use crate::metrics::{cumulative_pnl, liquidity_stats, LiquiditySummary, PerformanceReport};
use crate::panel::{MarketDataSet, PanelMatrix};
use crate::portfolio::{build_weights, raw_signal, SignalMode, WeightVector, WeightingScheme};
use crate::universe::{
    apply_exclusions, locate_bitcoin, stale_filter, static_filter, tier_mask, DailyUniverse,
    Exclusion, StaticMask, TierSpec,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ReturnMode {
    /// `close[s] / close[s + 1]`; the default, and what the strategy trades on.
    #[default]
    CloseToClose,
    /// `close[s] / open[s]`, for comparison.
    OpenToClose,
}

/// Source of the volatility used by the non-equal weighting schemes.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VolSource {
    /// `exp(hlv)`
    #[default]
    Hlv,
    /// Sample standard deviation of the `d_i` prior daily log returns.
    ReturnSd,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestConfig {
    pub window: WindowConfig,
    /// Days skipped at the recent end of the selection period.
    pub back: usize,
    /// Number of simulated trading days.
    pub lookback: usize,
    pub tier: TierSpec,
    pub signal_mode: SignalMode,
    pub weighting: WeightingScheme,
    pub vol_source: VolSource,
    pub return_mode: ReturnMode,
    pub btc_name: String,
    pub exclusions: Vec<Exclusion>,
    /// Charge the short Bitcoin leg on days without any long position.
    pub charge_btc_on_empty: bool,
}

impl Default for BacktestConfig {
    fn default() -> Self {
        let window = WindowConfig::default();
        Self {
            lookback: window.days,
            window,
            back: 0,
            tier: TierSpec::default(),
            signal_mode: SignalMode::default(),
            weighting: WeightingScheme::default(),
            vol_source: VolSource::default(),
            return_mode: ReturnMode::default(),
            btc_name: "Bitcoin".into(),
            exclusions: Exclusion::defaults(),
            charge_btc_on_empty: false,
        }
    }
}

impl BacktestConfig {
    /// Defaults with the selection period and lookback both set to `days`.
    pub fn with_days(days: usize) -> Self {
        let mut c = Self::default();
        c.window.days = days;
        c.lookback = days;
        c
    }

    /// Date columns left after the shift and the skip.
    fn usable_columns(&self) -> usize {
        (self.window.days + self.window.d_r).saturating_sub(self.back)
    }

    pub fn validate(&self) -> Result<()> {
        self.window.validate()?;
        self.tier.validate()?;
        if self.lookback == 0 {
            return Err(Error::InvalidConfig("lookback must be at least 1".into()));
        }
        if self.lookback > self.window.days {
            return Err(Error::InvalidConfig(format!(
                "lookback {} exceeds selection period {}",
                self.lookback, self.window.days
            )));
        }
        let n = self.usable_columns();
        let w = &self.window;
        let mut need = self.lookback + w.d_v.max(w.d_i) - 1;
        if self.return_mode == ReturnMode::CloseToClose {
            need = need.max(self.lookback + 1);
        }
        if self.vol_source == VolSource::ReturnSd {
            if w.d_i < 2 {
                return Err(Error::InvalidConfig(
                    "return volatility needs d_i of at least 2".into(),
                ));
            }
            need = need.max(self.lookback + w.d_i);
        }
        if need > n {
            return Err(Error::InvalidConfig(format!(
                "windows need {need} columns after skipping {} days, only {n} remain; \
                 increase d_r or reduce back/lookback/d_v/d_i",
                self.back
            )));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DayPnl {
    pub pnl: f64,
    pub degenerate: bool,
}

/// `sum_i w_i * r_i - r_btc`. A day without any long position has zero P&L,
/// Bitcoin leg included, unless `charge_btc_on_empty` asks for `-r_btc`.
pub fn daily_pnl(
    weights: &WeightVector,
    simple_ret_col: &[f64],
    btc_index: usize,
    charge_btc_on_empty: bool,
) -> Result<DayPnl> {
    let btc = simple_ret_col[btc_index];
    let btc_checked = || {
        if btc.is_finite() {
            Ok(btc)
        } else {
            Err(Error::NonFiniteReturn { asset: btc_index })
        }
    };
    if weights.is_empty() {
        let pnl = if charge_btc_on_empty {
            -btc_checked()?
        } else {
            0.0
        };
        return Ok(DayPnl {
            pnl,
            degenerate: true,
        });
    }
    let mut long = 0.0;
    for (i, (&w, &r)) in weights.w.iter().zip(simple_ret_col).enumerate() {
        if w == 0.0 {
            continue;
        }
        if !r.is_finite() {
            return Err(Error::NonFiniteReturn { asset: i });
        }
        long += w * r;
    }
    Ok(DayPnl {
        pnl: long - btc_checked()?,
        degenerate: false,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct DailyResult {
    /// Trading day within the lookback, 0 = most recent.
    pub day_index: usize,
    /// Per unit of long investment.
    pub pnl: f64,
    pub n_eligible: usize,
    pub n_signals: usize,
    pub degenerate: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct BacktestResult {
    /// Oldest day first.
    pub daily: Vec<DailyResult>,
    /// Oldest first; `cum_pnl[k]` sums the `k + 1` oldest days.
    pub cum_pnl: Vec<f64>,
    pub roc_pct: f64,
    /// NaN when undefined; see `report.sharpe_defined`.
    pub sharpe: f64,
    pub report: PerformanceReport,
    /// Assets passing the static filter.
    pub n_static: usize,
    /// Assets passing the static and stale-price filters, Bitcoin included.
    pub n_universe: usize,
    pub warnings: Vec<String>,
}

impl BacktestResult {
    /// Daily P&L, oldest first.
    pub fn pnls(&self) -> Vec<f64> {
        self.daily.iter().map(|d| d.pnl).collect()
    }
}

/// Day-independent state of a backtest. All per-asset vectors are indexed
/// by surviving asset, in dataset row order.
#[derive(Debug, Clone)]
pub struct PreparedBacktest {
    pub config: BacktestConfig,
    /// Dataset row of each surviving asset.
    pub rows: Vec<usize>,
    pub names: Vec<String>,
    pub static_mask: StaticMask,
    /// Factors over `lookback` trading days.
    pub factors: FactorSet,
    /// Returns over `lookback` trading days.
    pub returns: ReturnsPanel,
    /// Volatility used by the non-equal weighting schemes.
    pub vol: PanelMatrix,
    pub btc_index: usize,
    /// Exclusion mask (false = excluded).
    pub allowed: Vec<bool>,
    pub warnings: Vec<String>,
}

impl PreparedBacktest {
    pub fn new(ds: &MarketDataSet, config: &BacktestConfig) -> Result<Self> {
        let Survivors {
            static_mask,
            rows,
            factors,
            returns,
        } = survivors(ds, config)?;
        let lookback = config.lookback;
        let vol = match config.vol_source {
            VolSource::Hlv => factors.hlv.map(libm::exp),
            VolSource::ReturnSd => return_sd(&returns.log_ret, lookback, config.window.d_i)?,
        };
        let returns = returns.columns(0, lookback)?;
        let names: Vec<String> = rows.iter().map(|&i| ds.names[i].clone()).collect();

        let btc_index = match locate_bitcoin(&names, &config.btc_name) {
            Err(Error::BitcoinNotFound { name }) if ds.names.contains(&name) => {
                return Err(Error::BitcoinFiltered { name })
            }
            other => other?,
        };

        let mut warnings = Vec::new();
        let latest = factors.size.column(0);
        let top = latest
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i);
        if top != Some(btc_index) {
            warnings.push(format!(
                "{:?} does not have the largest market cap on the most recent day",
                config.btc_name
            ));
        }

        let excluded = Exclusion::active_names(&config.exclusions, lookback);
        let allowed = apply_exclusions(&names, &excluded, true);

        Ok(Self {
            config: config.clone(),
            rows,
            names,
            static_mask,
            factors,
            returns,
            vol,
            btc_index,
            allowed,
            warnings,
        })
    }

    pub fn n_days(&self) -> usize {
        self.config.lookback
    }

    pub fn n_assets(&self) -> usize {
        self.rows.len()
    }

    /// Long-side eligibility on day `s`.
    pub fn eligible(&self, s: usize) -> Result<Vec<bool>> {
        DailyUniverse::day(
            &self.factors.size,
            s,
            &self.config.tier,
            self.btc_index,
            &self.allowed,
        )
    }

    pub fn universe(&self) -> Result<DailyUniverse> {
        DailyUniverse::build(
            &self.factors.size,
            &self.config.tier,
            self.btc_index,
            &self.allowed,
        )
    }

    fn weights_given(&self, s: usize, eligible: &[bool]) -> Result<WeightVector> {
        let mom = self.factors.mom.column(s);
        let signal = raw_signal(&mom, self.config.signal_mode);
        build_weights(
            &signal,
            eligible,
            &self.vol.column(s),
            &mom,
            self.config.weighting,
            self.btc_index,
        )
    }

    /// Portfolio weights held on day `s`.
    pub fn weights(&self, s: usize) -> Result<WeightVector> {
        self.weights_given(s, &self.eligible(s)?)
    }

    /// Simulates day `s`. Weighting or return pathologies zero the day's P&L
    /// and come back as a warning; tier errors propagate.
    pub fn run_day(&self, s: usize) -> Result<(DailyResult, Option<String>)> {
        let eligible = self.eligible(s)?;
        let n_eligible = eligible.iter().filter(|&&e| e).count();
        let outcome = self.weights_given(s, &eligible).and_then(|w| {
            let day = daily_pnl(
                &w,
                &self.returns.simple_ret.column(s),
                self.btc_index,
                self.config.charge_btc_on_empty,
            )?;
            Ok((w.n_signals, day))
        });
        let (n_signals, day, warning) = match outcome {
            Ok((n, day)) if day.pnl.is_finite() => (n, day, None),
            Ok((n, day)) => (
                n,
                DayPnl { pnl: 0.0, ..day },
                Some(format!("day {s}: non-finite P&L set to 0")),
            ),
            Err(e) => (
                0,
                DayPnl {
                    pnl: 0.0,
                    degenerate: false,
                },
                Some(format!("day {s}: {e}; P&L set to 0")),
            ),
        };
        Ok((
            DailyResult {
                day_index: s,
                pnl: day.pnl,
                n_eligible,
                n_signals,
                degenerate: day.degenerate,
            },
            warning,
        ))
    }

    pub fn run(&self) -> Result<BacktestResult> {
        let mut warnings = self.warnings.clone();
        let mut daily = Vec::with_capacity(self.n_days());
        for s in (0..self.n_days()).rev() {
            let (day, warning) = self.run_day(s)?;
            warnings.extend(warning);
            daily.push(day);
        }
        let pnls: Vec<f64> = daily.iter().map(|d| d.pnl).collect();
        let report = PerformanceReport::from_daily(&pnls)?;
        Ok(BacktestResult {
            cum_pnl: cumulative_pnl(&pnls),
            roc_pct: report.roc_pct,
            sharpe: report.sharpe,
            report,
            daily,
            n_static: self.static_mask.n_kept(),
            n_universe: self.n_assets(),
            warnings,
        })
    }
}

/// Assets left after the static and stale-price filters, with their factors.
#[derive(Debug, Clone)]
pub struct Survivors {
    pub static_mask: StaticMask,
    /// Dataset rows passing both filters.
    pub rows: Vec<usize>,
    /// Factors of the surviving rows over `lookback` days.
    pub factors: FactorSet,
    /// Returns of the surviving rows over every column left after the skip.
    pub returns: ReturnsPanel,
}

/// Steps 1 to 6 of the pipeline: truncation, static filter, returns, the
/// one-day shift, the skip, factors and the stale-price filter.
pub fn survivors(ds: &MarketDataSet, config: &BacktestConfig) -> Result<Survivors> {
    config.validate()?;
    let w = config.window;
    let d = w.padded_len();
    if ds.n_dates() < d {
        return Err(Error::InsufficientHistory {
            required: d,
            available: ds.n_dates(),
        });
    }
    let raw = ds.truncate_dates(d)?;
    let static_mask = static_filter(&raw, d)?;
    let kept = static_mask.kept_rows();
    let sub = select_dataset(&raw, &kept);

    let returns = match config.return_mode {
        ReturnMode::CloseToClose => close_returns(&sub.close, d)?,
        ReturnMode::OpenToClose => open_close_returns(&sub.open, &sub.close, d - 1)?,
    };
    let shifted = shift_dataset(&sub)?;

    let n = d - 1 - config.back;
    let returns = returns.columns(config.back, n)?;
    let shifted = columns_dataset(&shifted, config.back, n)?;

    let factors = FactorSet::compute(
        &shifted,
        config.lookback,
        w.d_v,
        w.d_i,
        config.return_mode == ReturnMode::OpenToClose,
    )?;

    let fresh: Vec<usize> = stale_filter(&factors.hlv)
        .iter()
        .enumerate()
        .filter_map(|(i, &k)| k.then_some(i))
        .collect();
    Ok(Survivors {
        static_mask,
        rows: fresh.iter().map(|&i| kept[i]).collect(),
        factors: factors.select_rows(&fresh),
        returns: returns.select_rows(&fresh),
    })
}

/// Liquidity summaries, as of the most recent date, for the assets of a
/// market-cap tier.
///
/// The pool is the filter survivors of `config` minus active exclusions,
/// ranked by the most recent market cap. `include_btc` adds the Bitcoin row
/// even when the tier starts below rank 1.
pub fn tier_liquidity(
    ds: &MarketDataSet,
    config: &BacktestConfig,
    adv_window: usize,
    include_btc: bool,
) -> Result<LiquiditySummary> {
    let surv = survivors(ds, config)?;
    let names: Vec<String> = surv.rows.iter().map(|&i| ds.names[i].clone()).collect();
    let excluded = Exclusion::active_names(&config.exclusions, config.lookback);
    let allowed = apply_exclusions(&names, &excluded, true);
    let pool: Vec<usize> = surv
        .rows
        .iter()
        .zip(&allowed)
        .filter_map(|(&r, &ok)| ok.then_some(r))
        .collect();
    let size: Vec<f64> = pool.iter().map(|&r| libm::log(ds.cap.value(r, 0))).collect();
    let in_tier = tier_mask(&size, &config.tier)?;
    let mut mask = alloc::vec![false; ds.n_assets()];
    for (&r, &t) in pool.iter().zip(&in_tier) {
        mask[r] = t;
    }
    if include_btc {
        let btc = locate_bitcoin(&names, &config.btc_name)?;
        mask[surv.rows[btc]] = true;
    }
    liquidity_stats(ds, &mask, adv_window)
}

/// Filters, factors and the daily loop in one call.
pub fn run_backtest(ds: &MarketDataSet, config: &BacktestConfig) -> Result<BacktestResult> {
    PreparedBacktest::new(ds, config)?.run()
}

fn select_dataset(ds: &MarketDataSet, rows: &[usize]) -> MarketDataSet {
    MarketDataSet {
        close: ds.close.select_rows(rows),
        open: ds.open.select_rows(rows),
        high: ds.high.select_rows(rows),
        low: ds.low.select_rows(rows),
        volume: ds.volume.select_rows(rows),
        cap: ds.cap.select_rows(rows),
        names: rows.iter().map(|&i| ds.names[i].clone()).collect(),
        minable: ds
            .minable
            .as_ref()
            .map(|m| rows.iter().map(|&i| m[i]).collect()),
    }
}

fn columns_dataset(ds: &MarketDataSet, start: usize, len: usize) -> Result<MarketDataSet> {
    Ok(MarketDataSet {
        close: ds.close.columns(start, len)?,
        open: ds.open.columns(start, len)?,
        high: ds.high.columns(start, len)?,
        low: ds.low.columns(start, len)?,
        volume: ds.volume.columns(start, len)?,
        cap: ds.cap.columns(start, len)?,
        names: ds.names.clone(),
        minable: ds.minable.clone(),
    })
}
