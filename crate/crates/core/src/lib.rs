//! Engine for a daily altcoin/Bitcoin statistical arbitrage backtest.
//!
//! The strategy goes long, with equal (or volatility-suppressed) weights, the
//! altcoins whose prior-day return was negative, inside a band of prior-day
//! market-cap ranks, and holds a constant short Bitcoin leg of the same dollar
//! size. Every factor used to trade day `s` is computed from day `s + 1` and
//! older data.
//!
//! Dates follow a most-recent-first convention throughout the crate: column 0
//! of every [`PanelMatrix`] is the newest date and column indices grow into
//! the past.
//!
//! The crate is `no_std` (it needs `alloc`). File formats, the command-line
//! front end and report serialization live in the companion `altarb` crate.

#![cfg_attr(not(test), no_std)]
#![forbid(unsafe_code)]

extern crate alloc;

pub mod backtest;
mod error;
pub mod factors;
pub mod metrics;
pub mod panel;
pub mod portfolio;
pub mod universe;

pub use backtest::{
    daily_pnl, run_backtest, survivors, tier_liquidity, BacktestConfig, BacktestResult,
    DailyResult, DayPnl, PreparedBacktest, ReturnMode, Survivors, VolSource,
};
pub use error::{Error, Result};
pub use factors::{FactorSet, ReturnsPanel, WindowConfig};
pub use metrics::{LiquiditySummary, PerformanceReport, SixNumberSummary};
pub use panel::{parse_cell, MarketDataSet, PanelMatrix};
pub use portfolio::{SignalMode, WeightVector, WeightingScheme};
pub use universe::{DailyUniverse, Exclusion, FilterReason, StaticMask, TierSpec};
