//! Asset × date grids and the aligned market data set.

use alloc::string::{String, ToString};
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// Parses one trimmed cell token.
///
/// `"?"`, `"NA"` and the empty string are missing cells. Anything else must be
/// a finite decimal number; `"nan"`/`"inf"` spellings are rejected because a
/// missing cell is stored as NaN.
pub fn parse_cell(raw: &str) -> Result<Option<f64>> {
    match raw {
        "" | "?" | "NA" => Ok(None),
        _ => match raw.parse::<f64>() {
            Ok(v) if v.is_finite() => Ok(Some(v)),
            _ => Err(Error::ParseCell {
                token: raw.to_string(),
            }),
        },
    }
}

/// Row-major grid of reals, rows = assets, columns = dates with column 0 the
/// most recent date.
///
/// Missing cells are stored as NaN. Derived panels (factors) may also hold
/// infinities, which are values, not missing cells.
#[derive(Debug, Clone, PartialEq)]
pub struct PanelMatrix {
    values: Vec<f64>,
    n_assets: usize,
    n_dates: usize,
}

impl PanelMatrix {
    pub fn new(n_assets: usize, n_dates: usize, values: Vec<f64>) -> Result<Self> {
        if values.len() != n_assets * n_dates {
            return Err(Error::DimensionMismatch {
                what: "panel buffer",
                expected_rows: n_assets,
                expected_cols: n_dates,
                rows: values.len(),
                cols: 1,
            });
        }
        Ok(Self {
            values,
            n_assets,
            n_dates,
        })
    }

    pub fn filled(n_assets: usize, n_dates: usize, value: f64) -> Self {
        Self {
            values: alloc::vec![value; n_assets * n_dates],
            n_assets,
            n_dates,
        }
    }

    /// Builds a panel from rows, rejecting ragged input.
    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self> {
        let n_dates = rows.first().map_or(0, |r| r.as_ref().len());
        let mut values = Vec::with_capacity(rows.len() * n_dates);
        for (row, r) in rows.iter().enumerate() {
            let r = r.as_ref();
            if r.len() != n_dates {
                return Err(Error::RaggedRow {
                    row,
                    expected: n_dates,
                    found: r.len(),
                });
            }
            values.extend_from_slice(r);
        }
        Ok(Self {
            values,
            n_assets: rows.len(),
            n_dates,
        })
    }

    /// Like [`from_rows`](Self::from_rows) with `None` marking missing cells.
    pub fn from_optional_rows<R: AsRef<[Option<f64>]>>(rows: &[R]) -> Result<Self> {
        let rows: Vec<Vec<f64>> = rows
            .iter()
            .map(|r| r.as_ref().iter().map(|c| c.unwrap_or(f64::NAN)).collect())
            .collect();
        Self::from_rows(&rows)
    }

    #[inline]
    pub fn n_assets(&self) -> usize {
        self.n_assets
    }

    #[inline]
    pub fn n_dates(&self) -> usize {
        self.n_dates
    }

    /// Raw cell value; NaN for a missing cell.
    #[inline]
    pub fn value(&self, asset: usize, date: usize) -> f64 {
        self.values[asset * self.n_dates + date]
    }

    #[inline]
    pub fn get(&self, asset: usize, date: usize) -> Option<f64> {
        let v = self.value(asset, date);
        (!v.is_nan()).then_some(v)
    }

    #[inline]
    pub fn set(&mut self, asset: usize, date: usize, value: f64) {
        self.values[asset * self.n_dates + date] = value;
    }

    #[inline]
    pub fn row(&self, asset: usize) -> &[f64] {
        &self.values[asset * self.n_dates..(asset + 1) * self.n_dates]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f64]> + '_ {
        (0..self.n_assets).map(move |i| self.row(i))
    }

    /// Values of one date across all assets.
    pub fn column(&self, date: usize) -> Vec<f64> {
        (0..self.n_assets).map(|i| self.value(i, date)).collect()
    }

    pub fn is_missing(&self, asset: usize, date: usize) -> bool {
        self.value(asset, date).is_nan()
    }

    pub fn count_missing(&self) -> usize {
        self.values.iter().filter(|v| v.is_nan()).count()
    }

    /// Column window `[start, start + len)`, keeping every row.
    pub fn columns(&self, start: usize, len: usize) -> Result<Self> {
        if start + len > self.n_dates {
            return Err(Error::InsufficientHistory {
                required: start + len,
                available: self.n_dates,
            });
        }
        let mut values = Vec::with_capacity(self.n_assets * len);
        for r in self.rows() {
            values.extend_from_slice(&r[start..start + len]);
        }
        Ok(Self {
            values,
            n_assets: self.n_assets,
            n_dates: len,
        })
    }

    /// Keeps the listed rows, in the given order.
    pub fn select_rows(&self, rows: &[usize]) -> Self {
        let mut values = Vec::with_capacity(rows.len() * self.n_dates);
        for &i in rows {
            values.extend_from_slice(self.row(i));
        }
        Self {
            values,
            n_assets: rows.len(),
            n_dates: self.n_dates,
        }
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            values: self.values.iter().map(|&v| f(v)).collect(),
            n_assets: self.n_assets,
            n_dates: self.n_dates,
        }
    }

    /// Combines two equally shaped panels cell by cell.
    pub fn zip_map(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        self.check_same_shape(other, "zip_map")?;
        Ok(Self {
            values: self
                .values
                .iter()
                .zip(&other.values)
                .map(|(&a, &b)| f(a, b))
                .collect(),
            n_assets: self.n_assets,
            n_dates: self.n_dates,
        })
    }

    pub(crate) fn check_same_shape(&self, other: &Self, what: &'static str) -> Result<()> {
        if self.n_assets != other.n_assets || self.n_dates != other.n_dates {
            return Err(Error::DimensionMismatch {
                what,
                expected_rows: self.n_assets,
                expected_cols: self.n_dates,
                rows: other.n_assets,
                cols: other.n_dates,
            });
        }
        Ok(())
    }
}

/// The aligned panels of one data snapshot. Row `i` of every panel and
/// `names[i]` describe the same asset.
#[derive(Debug, Clone, PartialEq)]
pub struct MarketDataSet {
    pub close: PanelMatrix,
    pub open: PanelMatrix,
    pub high: PanelMatrix,
    pub low: PanelMatrix,
    /// Daily dollar volume.
    pub volume: PanelMatrix,
    pub cap: PanelMatrix,
    pub names: Vec<String>,
    /// 1 for minable assets, 0 otherwise. Carried for completeness only.
    pub minable: Option<Vec<f64>>,
}

impl MarketDataSet {
    /// Validates that all panels share one shape and `names` (and `minable`,
    /// when present) has one entry per row.
    #[allow(clippy::too_many_arguments)]
    pub fn new(
        close: PanelMatrix,
        open: PanelMatrix,
        high: PanelMatrix,
        low: PanelMatrix,
        volume: PanelMatrix,
        cap: PanelMatrix,
        names: Vec<String>,
        minable: Option<Vec<f64>>,
    ) -> Result<Self> {
        for (what, p) in [
            ("open", &open),
            ("high", &high),
            ("low", &low),
            ("volume", &volume),
            ("cap", &cap),
        ] {
            close.check_same_shape(p, what)?;
        }
        if names.len() != close.n_assets() {
            return Err(Error::DimensionMismatch {
                what: "names",
                expected_rows: close.n_assets(),
                expected_cols: 1,
                rows: names.len(),
                cols: 1,
            });
        }
        if let Some(m) = &minable {
            if m.len() != close.n_assets() {
                return Err(Error::DimensionMismatch {
                    what: "minable",
                    expected_rows: close.n_assets(),
                    expected_cols: 1,
                    rows: m.len(),
                    cols: 1,
                });
            }
        }
        Ok(Self {
            close,
            open,
            high,
            low,
            volume,
            cap,
            names,
            minable,
        })
    }

    pub fn n_assets(&self) -> usize {
        self.close.n_assets()
    }

    pub fn n_dates(&self) -> usize {
        self.close.n_dates()
    }

    /// The six numeric panels with their conventional labels.
    pub fn panels(&self) -> [(&'static str, &PanelMatrix); 6] {
        [
            ("close", &self.close),
            ("open", &self.open),
            ("high", &self.high),
            ("low", &self.low),
            ("volume", &self.volume),
            ("cap", &self.cap),
        ]
    }

    /// Keeps the first `len` date columns of every panel.
    pub fn truncate_dates(&self, len: usize) -> Result<Self> {
        Ok(Self {
            close: self.close.columns(0, len)?,
            open: self.open.columns(0, len)?,
            high: self.high.columns(0, len)?,
            low: self.low.columns(0, len)?,
            volume: self.volume.columns(0, len)?,
            cap: self.cap.columns(0, len)?,
            names: self.names.clone(),
            minable: self.minable.clone(),
        })
    }
}
