//! Performance and liquidity statistics.
//!
//! P&L is measured per unit of long investment with the short Bitcoin leg of
//! equal size, so the capital base is `I_L + I_S = 2`. Annualization uses 365
//! days since the assets trade every day of the year.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::MarketDataSet;

pub const DAYS_PER_YEAR: f64 = 365.0;

/// Total capital `I_L + I_S` per unit of long investment.
pub const CAPITAL: f64 = 2.0;

/// Arithmetic mean with one correction pass over the residuals, so that a
/// constant series has a mean equal to its value.
pub fn mean(xs: &[f64]) -> Result<f64> {
    if xs.is_empty() {
        return Err(Error::SeriesTooShort { len: 0, min: 1 });
    }
    let n = xs.len() as f64;
    let m = xs.iter().sum::<f64>() / n;
    if !m.is_finite() {
        return Ok(m);
    }
    Ok(m + xs.iter().map(|x| x - m).sum::<f64>() / n)
}

/// Standard deviation with the `n - 1` divisor.
pub fn sample_sd(xs: &[f64]) -> Result<f64> {
    if xs.len() < 2 {
        return Err(Error::SeriesTooShort {
            len: xs.len(),
            min: 2,
        });
    }
    if xs.iter().all(|&x| x == xs[0]) {
        return Ok(0.0);
    }
    let m = mean(xs)?;
    let ss: f64 = xs.iter().map(|x| (x - m) * (x - m)).sum();
    Ok(libm::sqrt(ss / (xs.len() - 1) as f64))
}

/// `365 * mean / 2 * 100`, in percent per year.
pub fn annualized_roc(daily_pnls: &[f64]) -> Result<f64> {
    Ok(mean(daily_pnls)? * DAYS_PER_YEAR / CAPITAL * 100.0)
}

/// `sqrt(365) * mean / sd`. Fails on a zero-variance series.
pub fn annualized_sharpe(daily_pnls: &[f64]) -> Result<f64> {
    let sd = sample_sd(daily_pnls)?;
    if sd == 0.0 {
        return Err(Error::ZeroVariance);
    }
    Ok(mean(daily_pnls)? / sd * libm::sqrt(DAYS_PER_YEAR))
}

/// Running sums of an oldest-first series.
pub fn cumulative_pnl(daily_pnls: &[f64]) -> Vec<f64> {
    daily_pnls
        .iter()
        .scan(0.0, |acc, &x| {
            *acc += x;
            Some(*acc)
        })
        .collect()
}

#[derive(Debug, Clone, PartialEq)]
pub struct PerformanceReport {
    pub roc_pct: f64,
    /// NaN when the daily P&L has zero variance (or a single day).
    pub sharpe: f64,
    pub sharpe_defined: bool,
    pub n_days: usize,
    pub mean_daily_pnl: f64,
    pub sd_daily_pnl: f64,
    pub capital: f64,
}

impl PerformanceReport {
    pub fn from_daily(daily_pnls: &[f64]) -> Result<Self> {
        let roc_pct = annualized_roc(daily_pnls)?;
        let sharpe = annualized_sharpe(daily_pnls).ok();
        Ok(Self {
            roc_pct,
            sharpe: sharpe.unwrap_or(f64::NAN),
            sharpe_defined: sharpe.is_some(),
            n_days: daily_pnls.len(),
            mean_daily_pnl: mean(daily_pnls)?,
            sd_daily_pnl: sample_sd(daily_pnls).unwrap_or(f64::NAN),
            capital: CAPITAL,
        })
    }
}

/// Min, quartiles, mean and max.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SixNumberSummary {
    pub min: f64,
    pub q1: f64,
    pub median: f64,
    pub mean: f64,
    pub q3: f64,
    pub max: f64,
}

/// Quantile of sorted data by linear interpolation between order statistics
/// at 0-based position `(n - 1) * p`.
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let h = (sorted.len() - 1) as f64 * p;
    let lo = libm::floor(h) as usize;
    let frac = h - lo as f64;
    if lo + 1 >= sorted.len() || frac == 0.0 {
        sorted[lo]
    } else {
        sorted[lo] + frac * (sorted[lo + 1] - sorted[lo])
    }
}

pub fn six_number_summary(values: &[f64]) -> Result<SixNumberSummary> {
    if values.is_empty() {
        return Err(Error::SeriesTooShort { len: 0, min: 1 });
    }
    if values.iter().any(|v| v.is_nan()) {
        return Err(Error::InvalidConfig("summary input contains missing values".into()));
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(f64::total_cmp);
    Ok(SixNumberSummary {
        min: sorted[0],
        q1: quantile_sorted(&sorted, 0.25),
        median: quantile_sorted(&sorted, 0.5),
        mean: mean(values)?,
        q3: quantile_sorted(&sorted, 0.75),
        max: sorted[sorted.len() - 1],
    })
}

/// Market cap, average daily dollar volume and turnover (cap / ADV) summaries.
#[derive(Debug, Clone, PartialEq)]
pub struct LiquiditySummary {
    pub n_assets: usize,
    pub cap: SixNumberSummary,
    pub adv: SixNumberSummary,
    pub tvr: SixNumberSummary,
}

/// Summaries over the masked assets as of the most recent date: cap from
/// column 0, ADV as the mean volume of columns `0 .. adv_window`.
pub fn liquidity_stats(
    ds: &MarketDataSet,
    mask: &[bool],
    adv_window: usize,
) -> Result<LiquiditySummary> {
    if adv_window == 0 || adv_window > ds.n_dates() {
        return Err(Error::InsufficientHistory {
            required: adv_window.max(1),
            available: ds.n_dates(),
        });
    }
    let mut caps = Vec::new();
    let mut advs = Vec::new();
    for (i, _) in mask.iter().enumerate().filter(|(_, &m)| m) {
        let cap = ds.cap.value(i, 0);
        if !(cap.is_finite() && cap > 0.0) {
            return Err(Error::NonPositive {
                what: "market cap",
                row: i,
                col: 0,
            });
        }
        let vols = &ds.volume.row(i)[..adv_window];
        let adv = vols.iter().sum::<f64>() / adv_window as f64;
        if !(adv.is_finite() && adv > 0.0) {
            return Err(Error::NonPositive {
                what: "average daily volume",
                row: i,
                col: 0,
            });
        }
        caps.push(cap);
        advs.push(adv);
    }
    if caps.is_empty() {
        return Err(Error::EmptySelection);
    }
    let tvrs: Vec<f64> = caps.iter().zip(&advs).map(|(c, a)| c / a).collect();
    Ok(LiquiditySummary {
        n_assets: caps.len(),
        cap: six_number_summary(&caps)?,
        adv: six_number_summary(&advs)?,
        tvr: six_number_summary(&tvrs)?,
    })
}
