//! Returns and the mom / hlv / av / size factor panels.
//!
//! Alignment is the delicate part. Raw panels have `days + d_r + 1` date
//! columns. Returns for trading day `s` use raw columns `s` and `s + 1`. Before
//! any factor is computed the raw panels are shifted one day into the past
//! with [`shift_one_day`], so that factor column `s` only ever sees raw
//! columns `s + 1` and older:
//!
//! * `mom[s]  = ln(close[s + 1] / close[s + 2])`, the return realized on day `s + 1`
//! * `size[s] = ln(cap[s + 1])`
//! * `av[s]`, `hlv[s]` average raw columns `s + 1 ..= s + span`

use alloc::vec::Vec;

use libm::log;

use crate::error::{Error, Result};
use crate::panel::{MarketDataSet, PanelMatrix};

/// Window lengths of the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct WindowConfig {
    /// Selection period length.
    pub days: usize,
    /// Padding added to the selection period so trailing averages stay
    /// out-of-sample.
    pub d_r: usize,
    /// `av` averaging span.
    pub d_v: usize,
    /// `hlv` averaging span.
    pub d_i: usize,
}

impl Default for WindowConfig {
    fn default() -> Self {
        Self {
            days: 365,
            d_r: 20,
            d_v: 20,
            d_i: 20,
        }
    }
}

impl WindowConfig {
    /// Raw date columns consumed: `days + d_r + 1`.
    pub fn padded_len(&self) -> usize {
        self.days + self.d_r + 1
    }

    pub fn validate(&self) -> Result<()> {
        for (name, v) in [
            ("days", self.days),
            ("d_r", self.d_r),
            ("d_v", self.d_v),
            ("d_i", self.d_i),
        ] {
            if v == 0 {
                return Err(Error::InvalidConfig(alloc::format!("{name} must be at least 1")));
            }
        }
        Ok(())
    }
}

/// Log and simple returns; column `s` is the return realized on day `s`.
#[derive(Debug, Clone, PartialEq)]
pub struct ReturnsPanel {
    pub log_ret: PanelMatrix,
    pub simple_ret: PanelMatrix,
}

impl ReturnsPanel {
    pub fn columns(&self, start: usize, len: usize) -> Result<Self> {
        Ok(Self {
            log_ret: self.log_ret.columns(start, len)?,
            simple_ret: self.simple_ret.columns(start, len)?,
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            log_ret: self.log_ret.select_rows(rows),
            simple_ret: self.simple_ret.select_rows(rows),
        }
    }
}

fn positive(p: &PanelMatrix, i: usize, s: usize, what: &'static str) -> Result<f64> {
    let v = p.value(i, s);
    if v > 0.0 {
        Ok(v)
    } else {
        Err(Error::NonPositive { what, row: i, col: s })
    }
}

/// Close-to-close returns over the first `d` columns of `close`, giving
/// `d - 1` return columns.
pub fn close_returns(close: &PanelMatrix, d: usize) -> Result<ReturnsPanel> {
    if d < 2 || close.n_dates() < d {
        return Err(Error::InsufficientHistory {
            required: d.max(2),
            available: close.n_dates(),
        });
    }
    let n = close.n_assets();
    let cols = d - 1;
    let mut log_ret = Vec::with_capacity(n * cols);
    let mut simple_ret = Vec::with_capacity(n * cols);
    for i in 0..n {
        for s in 0..cols {
            let ratio = positive(close, i, s, "close price")?
                / positive(close, i, s + 1, "close price")?;
            log_ret.push(log(ratio));
            simple_ret.push(ratio - 1.0);
        }
    }
    Ok(ReturnsPanel {
        log_ret: PanelMatrix::new(n, cols, log_ret)?,
        simple_ret: PanelMatrix::new(n, cols, simple_ret)?,
    })
}

/// Open-to-close returns `ln(close / open)` over the first `cols` columns.
pub fn open_close_returns(
    open: &PanelMatrix,
    close: &PanelMatrix,
    cols: usize,
) -> Result<ReturnsPanel> {
    open.check_same_shape(close, "open/close")?;
    if close.n_dates() < cols {
        return Err(Error::InsufficientHistory {
            required: cols,
            available: close.n_dates(),
        });
    }
    let n = close.n_assets();
    let mut log_ret = Vec::with_capacity(n * cols);
    let mut simple_ret = Vec::with_capacity(n * cols);
    for i in 0..n {
        for s in 0..cols {
            let ratio =
                positive(close, i, s, "close price")? / positive(open, i, s, "open price")?;
            log_ret.push(log(ratio));
            simple_ret.push(ratio - 1.0);
        }
    }
    Ok(ReturnsPanel {
        log_ret: PanelMatrix::new(n, cols, log_ret)?,
        simple_ret: PanelMatrix::new(n, cols, simple_ret)?,
    })
}

/// Drops the most recent date column, so column `s` of the result holds raw
/// column `s + 1`. This is the only place the one-day factor lag is applied.
pub fn shift_one_day(p: &PanelMatrix) -> Result<PanelMatrix> {
    if p.n_dates() == 0 {
        return Err(Error::InsufficientHistory {
            required: 1,
            available: 0,
        });
    }
    p.columns(1, p.n_dates() - 1)
}

/// [`shift_one_day`] applied to every panel of a data set.
pub fn shift_dataset(ds: &MarketDataSet) -> Result<MarketDataSet> {
    Ok(MarketDataSet {
        close: shift_one_day(&ds.close)?,
        open: shift_one_day(&ds.open)?,
        high: shift_one_day(&ds.high)?,
        low: shift_one_day(&ds.low)?,
        volume: shift_one_day(&ds.volume)?,
        cap: shift_one_day(&ds.cap)?,
        names: ds.names.clone(),
        minable: ds.minable.clone(),
    })
}

/// `out[i][s]` is the mean of `x[i][s ..= s + span - 1]` for `s < days`,
/// skipping missing (NaN) cells. A window with no values yields NaN.
pub fn trailing_mean(x: &PanelMatrix, days: usize, span: usize) -> Result<PanelMatrix> {
    if span == 0 {
        return Err(Error::InvalidConfig("averaging span must be at least 1".into()));
    }
    let required = days + span - 1;
    if x.n_dates() < required {
        return Err(Error::InsufficientHistory {
            required,
            available: x.n_dates(),
        });
    }
    if span == 1 {
        return x.columns(0, days);
    }
    let mut out = Vec::with_capacity(x.n_assets() * days);
    for row in x.rows() {
        for s in 0..days {
            let (sum, n) = row[s..s + span]
                .iter()
                .filter(|v| !v.is_nan())
                .fold((0.0, 0usize), |(sum, n), &v| (sum + v, n + 1));
            out.push(if n == 0 { f64::NAN } else { sum / n as f64 });
        }
    }
    PanelMatrix::new(x.n_assets(), days, out)
}

/// Momentum from a shifted close panel: `ln(close[s] / close[s + 1])`.
pub fn mom_factor(close_shifted: &PanelMatrix, days: usize) -> Result<PanelMatrix> {
    if close_shifted.n_dates() < days + 1 {
        return Err(Error::InsufficientHistory {
            required: days + 1,
            available: close_shifted.n_dates(),
        });
    }
    let n = close_shifted.n_assets();
    let mut out = Vec::with_capacity(n * days);
    for i in 0..n {
        for s in 0..days {
            let ratio = positive(close_shifted, i, s, "close price")?
                / positive(close_shifted, i, s + 1, "close price")?;
            out.push(log(ratio));
        }
    }
    PanelMatrix::new(n, days, out)
}

/// Momentum as the prior day's open-to-close log return, from shifted panels.
pub fn mom_open_close(
    open_shifted: &PanelMatrix,
    close_shifted: &PanelMatrix,
    days: usize,
) -> Result<PanelMatrix> {
    Ok(open_close_returns(open_shifted, close_shifted, days)?.log_ret)
}

/// `0.5 * ln(mean((high - low)^2 / close^2))` over a trailing `d_i` window of
/// shifted panels. A window where high equals low throughout gives `-inf`.
pub fn hlv_factor(
    high: &PanelMatrix,
    low: &PanelMatrix,
    close: &PanelMatrix,
    days: usize,
    d_i: usize,
) -> Result<PanelMatrix> {
    let range = high.zip_map(low, |h, l| h - l)?;
    let sq = range.zip_map(close, |r, p| r * r / (p * p))?;
    Ok(trailing_mean(&sq, days, d_i)?.map(|m| 0.5 * log(m)))
}

/// Log of the trailing mean dollar volume over `d_v` days.
pub fn av_factor(volume: &PanelMatrix, days: usize, d_v: usize) -> Result<PanelMatrix> {
    Ok(trailing_mean(volume, days, d_v)?.map(log))
}

/// Log market cap of the shifted cap panel.
pub fn size_factor(cap: &PanelMatrix, days: usize) -> Result<PanelMatrix> {
    let window = cap.columns(0, days)?;
    for i in 0..window.n_assets() {
        for s in 0..days {
            positive(&window, i, s, "market cap")?;
        }
    }
    Ok(window.map(log))
}

/// Sample standard deviation of `log_ret[s + 1 ..= s + window]` for `s < days`.
pub fn return_sd(log_ret: &PanelMatrix, days: usize, window: usize) -> Result<PanelMatrix> {
    if window < 2 {
        return Err(Error::InvalidConfig(
            "return volatility window must be at least 2".into(),
        ));
    }
    let required = days + window;
    if log_ret.n_dates() < required {
        return Err(Error::InsufficientHistory {
            required,
            available: log_ret.n_dates(),
        });
    }
    let mut out = Vec::with_capacity(log_ret.n_assets() * days);
    for row in log_ret.rows() {
        for s in 0..days {
            let w = &row[s + 1..=s + window];
            let mean = w.iter().sum::<f64>() / window as f64;
            let ss = w.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>();
            out.push(libm::sqrt(ss / (window - 1) as f64));
        }
    }
    PanelMatrix::new(log_ret.n_assets(), days, out)
}

/// Factor panels aligned to trading days `0 .. n_days`.
#[derive(Debug, Clone, PartialEq)]
pub struct FactorSet {
    pub mom: PanelMatrix,
    pub hlv: PanelMatrix,
    pub av: PanelMatrix,
    pub size: PanelMatrix,
    pub n_days: usize,
}

impl FactorSet {
    /// Computes all four factors from already-shifted panels.
    pub fn compute(
        shifted: &MarketDataSet,
        days: usize,
        d_v: usize,
        d_i: usize,
        open_close_mom: bool,
    ) -> Result<Self> {
        let mom = if open_close_mom {
            mom_open_close(&shifted.open, &shifted.close, days)?
        } else {
            mom_factor(&shifted.close, days)?
        };
        Ok(Self {
            av: av_factor(&shifted.volume, days, d_v)?,
            hlv: hlv_factor(&shifted.high, &shifted.low, &shifted.close, days, d_i)?,
            mom,
            size: size_factor(&shifted.cap, days)?,
            n_days: days,
        })
    }

    pub fn select_rows(&self, rows: &[usize]) -> Self {
        Self {
            mom: self.mom.select_rows(rows),
            hlv: self.hlv.select_rows(rows),
            av: self.av.select_rows(rows),
            size: self.size.select_rows(rows),
            n_days: self.n_days,
        }
    }
}
