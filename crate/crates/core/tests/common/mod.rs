#![allow(dead_code)]

use altarb_core::{MarketDataSet, PanelMatrix};

/// Builds a clean data set from close paths (rows = assets, most recent
/// date first). Bitcoin is row 0 with the largest cap; high/low bracket the
/// close by `spread`.
pub fn dataset_from_closes(closes: &[Vec<f64>], spread: f64) -> MarketDataSet {
    let n = closes.len();
    let map = |f: &dyn Fn(usize, f64) -> f64| {
        let rows: Vec<Vec<f64>> = closes
            .iter()
            .enumerate()
            .map(|(i, r)| r.iter().map(|&c| f(i, c)).collect())
            .collect();
        PanelMatrix::from_rows(&rows).unwrap()
    };
    let close = map(&|_, c| c);
    let open = map(&|_, c| c);
    let high = map(&|_, c| c * (1.0 + spread));
    let low = map(&|_, c| c * (1.0 - spread));
    let volume = map(&|_, _| 1e6);
    let cap = map(&|i, c| if i == 0 { 1e15 } else { c * 1e6 * (n - i) as f64 });
    let mut names = vec!["Bitcoin".to_owned()];
    names.extend((1..n).map(|i| format!("Alt{i}")));
    MarketDataSet::new(close, open, high, low, volume, cap, names, None).unwrap()
}

/// Close paths from per-day growth factors, oldest date last.
pub fn closes_from_growth(growth: &[Vec<f64>]) -> Vec<Vec<f64>> {
    growth
        .iter()
        .map(|g| {
            let t = g.len();
            let mut out = vec![0.0; t];
            let mut p = 100.0;
            for s in (0..t).rev() {
                p *= g[s];
                out[s] = p;
            }
            out
        })
        .collect()
}
