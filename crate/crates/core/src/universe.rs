//! Asset eligibility: static data-quality filters, the stale-price filter,
//! per-day market-cap tiers, name exclusions and locating Bitcoin.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::panel::{MarketDataSet, PanelMatrix};

/// Why an asset was dropped by a data filter.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum FilterReason {
    NaData,
    ZeroVolume,
    StalePrice,
}

impl FilterReason {
    pub fn as_str(self) -> &'static str {
        match self {
            FilterReason::NaData => "na_data",
            FilterReason::ZeroVolume => "zero_volume",
            FilterReason::StalePrice => "stale_price",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StaticMask {
    pub keep: Vec<bool>,
    /// `Some` exactly for rejected assets.
    pub reasons: Vec<Option<FilterReason>>,
}

impl StaticMask {
    pub fn kept_rows(&self) -> Vec<usize> {
        self.keep
            .iter()
            .enumerate()
            .filter_map(|(i, &k)| k.then_some(i))
            .collect()
    }

    pub fn n_kept(&self) -> usize {
        self.keep.iter().filter(|&&k| k).count()
    }
}

/// Keeps an asset iff none of the six panels has a missing cell in the first
/// `padded_window` columns and its volume is never zero there.
pub fn static_filter(ds: &MarketDataSet, padded_window: usize) -> Result<StaticMask> {
    if ds.n_dates() < padded_window {
        return Err(Error::InsufficientHistory {
            required: padded_window,
            available: ds.n_dates(),
        });
    }
    let panels = ds.panels();
    let mut keep = Vec::with_capacity(ds.n_assets());
    let mut reasons = Vec::with_capacity(ds.n_assets());
    for i in 0..ds.n_assets() {
        let has_na = panels
            .iter()
            .any(|(_, p)| p.row(i)[..padded_window].iter().any(|v| v.is_nan()));
        let zero_vol = ds.volume.row(i)[..padded_window].contains(&0.0);
        let reason = if has_na {
            Some(FilterReason::NaData)
        } else if zero_vol {
            Some(FilterReason::ZeroVolume)
        } else {
            None
        };
        keep.push(reason.is_none());
        reasons.push(reason);
    }
    Ok(StaticMask { keep, reasons })
}

/// An asset survives iff every entry of its hlv row is finite. One flat
/// averaging window is enough to drop the asset.
pub fn stale_filter(hlv: &PanelMatrix) -> Vec<bool> {
    hlv.rows().map(|r| r.iter().all(|v| v.is_finite())).collect()
}

/// Band of market-cap ranks (1 = largest) admitted on a day.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct TierSpec {
    pub ix_upper: usize,
    /// `None` reaches down to the smallest asset in the universe.
    pub ix_lower: Option<usize>,
}

impl Default for TierSpec {
    fn default() -> Self {
        Self {
            ix_upper: 2,
            ix_lower: None,
        }
    }
}

impl TierSpec {
    pub fn new(ix_upper: usize, ix_lower: Option<usize>) -> Result<Self> {
        let spec = Self { ix_upper, ix_lower };
        spec.validate()?;
        Ok(spec)
    }

    pub fn validate(&self) -> Result<()> {
        if self.ix_upper == 0 {
            return Err(Error::InvalidConfig("rank-upper must be at least 1".into()));
        }
        if let Some(lo) = self.ix_lower {
            if lo < self.ix_upper {
                return Err(Error::InvalidConfig(alloc::format!(
                    "rank-lower {lo} is above rank-upper {}",
                    self.ix_upper
                )));
            }
        }
        Ok(())
    }
}

/// Assets whose log cap lies between the values at ranks `ix_lower` and
/// `ix_upper` of the descending sort, inclusive.
///
/// This is a threshold test, not a slice of the sorted order: assets tied with
/// a boundary value are all admitted. A lower rank beyond the universe size is
/// clamped to the smallest asset. Non-finite sizes are never eligible and do
/// not take part in the ranking.
pub fn tier_mask(size_col: &[f64], spec: &TierSpec) -> Result<Vec<bool>> {
    spec.validate()?;
    let mut sorted: Vec<f64> = size_col.iter().copied().filter(|v| !v.is_nan()).collect();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let n = sorted.len();
    if spec.ix_upper > n {
        return Err(Error::TierOutOfRange {
            rank: spec.ix_upper,
            universe: n,
        });
    }
    let lower_rank = spec.ix_lower.map_or(n, |lo| lo.min(n));
    let hi = sorted[spec.ix_upper - 1];
    let lo = sorted[lower_rank - 1];
    Ok(size_col.iter().map(|&v| v >= lo && v <= hi).collect())
}

/// A name to drop from the long side, optionally only for long backtests.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Exclusion {
    /// Exact stored name (names may be truncated in the data files).
    pub name: String,
    /// Active only when the lookback exceeds this many days.
    pub active_above_lookback: Option<usize>,
}

/// Stored (truncated) name of "Circuit of Value Coin", whose outsized return
/// distorts multi-year backtests.
pub const COVAL_NAME: &str = "Circuits of V...";

impl Exclusion {
    pub fn always(name: impl Into<String>) -> Self {
        Self {
            name: name.into(),
            active_above_lookback: None,
        }
    }

    pub fn is_active(&self, lookback: usize) -> bool {
        self.active_above_lookback.is_none_or(|min| lookback > min)
    }

    /// COVAL, excluded for lookbacks longer than a year.
    pub fn defaults() -> Vec<Self> {
        alloc::vec![Self {
            name: COVAL_NAME.to_string(),
            active_above_lookback: Some(365),
        }]
    }

    /// Names among `list` active for the given lookback.
    pub fn active_names(list: &[Self], lookback: usize) -> Vec<String> {
        list.iter()
            .filter(|e| e.is_active(lookback))
            .map(|e| e.name.clone())
            .collect()
    }
}

/// `true` for assets allowed on the long side. When `active` is false, or
/// the list is empty, every asset is allowed.
pub fn apply_exclusions<S: AsRef<str>>(names: &[String], exclusions: &[S], active: bool) -> Vec<bool> {
    names
        .iter()
        .map(|n| !active || !exclusions.iter().any(|e| e.as_ref() == n))
        .collect()
}

/// Row whose name equals `btc_name` exactly; it must be unique.
pub fn locate_bitcoin(names: &[String], btc_name: &str) -> Result<usize> {
    let mut hits = names.iter().enumerate().filter(|(_, n)| *n == btc_name);
    match (hits.next(), hits.count()) {
        (None, _) => Err(Error::BitcoinNotFound {
            name: btc_name.to_string(),
        }),
        (Some((i, _)), 0) => Ok(i),
        (Some(_), rest) => Err(Error::BitcoinAmbiguous {
            name: btc_name.to_string(),
            count: rest + 1,
        }),
    }
}

/// Per-day long-side eligibility.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DailyUniverse {
    /// `eligible[s][i]`: asset `i` may be held on trading day `s`.
    pub eligible: Vec<Vec<bool>>,
    pub btc_index: usize,
}

impl DailyUniverse {
    /// Tier membership from each day's (prior-day) size column, minus Bitcoin
    /// and disallowed assets. Bitcoin still takes part in the ranking.
    pub fn build(
        size: &PanelMatrix,
        tier: &TierSpec,
        btc_index: usize,
        allowed: &[bool],
    ) -> Result<Self> {
        let eligible = (0..size.n_dates())
            .map(|s| Self::day(size, s, tier, btc_index, allowed))
            .collect::<Result<Vec<_>>>()?;
        Ok(Self {
            eligible,
            btc_index,
        })
    }

    /// Eligibility of a single day.
    pub fn day(
        size: &PanelMatrix,
        s: usize,
        tier: &TierSpec,
        btc_index: usize,
        allowed: &[bool],
    ) -> Result<Vec<bool>> {
        let mut mask = tier_mask(&size.column(s), tier)?;
        for (m, &ok) in mask.iter_mut().zip(allowed) {
            *m &= ok;
        }
        mask[btc_index] = false;
        Ok(mask)
    }

    pub fn n_eligible(&self, s: usize) -> usize {
        self.eligible[s].iter().filter(|&&e| e).count()
    }
}
