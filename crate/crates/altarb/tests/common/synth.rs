//! Seeded synthetic market panels. Row 0 is always "Bitcoin", with the
//! largest cap on every date and clean data.

use altarb_core::{MarketDataSet, PanelMatrix};
use rand::Rng;

use super::reference::RefData;

pub const COVAL_NAME: &str = "Circuits of V...";

#[derive(Debug, Clone)]
pub struct SynthOptions {
    pub n_assets: usize,
    pub n_dates: usize,
    /// Chance an altcoin gets one missing cell somewhere.
    pub p_missing_asset: f64,
    /// Chance an altcoin trades zero volume on one day.
    pub p_zero_vol_asset: f64,
    /// Chance a close repeats the previous close (zero momentum next day).
    pub p_repeat_close: f64,
    /// Chance an altcoin has a flat high == low stretch.
    pub p_flat_asset: f64,
    pub flat_span: usize,
    /// Chance row 1 is named after the long-lookback exclusion.
    pub p_coval_name: f64,
}

impl SynthOptions {
    pub fn clean(n_assets: usize, n_dates: usize) -> Self {
        Self {
            n_assets,
            n_dates,
            p_missing_asset: 0.0,
            p_zero_vol_asset: 0.0,
            p_repeat_close: 0.0,
            p_flat_asset: 0.0,
            flat_span: 0,
            p_coval_name: 0.0,
        }
    }

    pub fn messy(n_assets: usize, n_dates: usize) -> Self {
        Self {
            n_assets,
            n_dates,
            p_missing_asset: 0.1,
            p_zero_vol_asset: 0.1,
            p_repeat_close: 0.03,
            p_flat_asset: 0.1,
            flat_span: 25,
            p_coval_name: 0.2,
        }
    }
}

pub fn synth_dataset<R: Rng>(rng: &mut R, o: &SynthOptions) -> MarketDataSet {
    let (n, t) = (o.n_assets, o.n_dates);
    let mut panels: Vec<Vec<Vec<f64>>> = vec![vec![vec![0.0; t]; n]; 6];
    let mut names = Vec::with_capacity(n);

    for i in 0..n {
        let btc = i == 0;
        names.push(if btc {
            "Bitcoin".to_owned()
        } else if i == 1 && rng.gen_bool(o.p_coval_name) {
            COVAL_NAME.to_owned()
        } else {
            format!("Alt{i}")
        });
        let (step, scale): (f64, f64) = if btc {
            (0.04, 1e12)
        } else {
            (0.15, 10f64.powf(rng.gen_range(4.0..10.0)))
        };
        let first = if btc { 5000.0 } else { 10f64.powf(rng.gen_range(-3.0..3.0)) };
        let mut prev = first;
        // oldest date is the last column
        for s in (0..t).rev() {
            let close = if !btc && rng.gen_bool(o.p_repeat_close) {
                prev
            } else {
                prev * rng.gen_range(-step..step).exp()
            };
            let open = prev * rng.gen_range(-0.02..0.02f64).exp();
            let high = open.max(close) * rng.gen_range(0.0..0.05f64).exp();
            let low = open.min(close) * (-rng.gen_range(0.0..0.05f64)).exp();
            panels[0][i][s] = close;
            panels[1][i][s] = open;
            panels[2][i][s] = high;
            panels[3][i][s] = low;
            panels[4][i][s] = 10f64.powf(rng.gen_range(3.0..8.0));
            panels[5][i][s] = scale * close / first;
            prev = close;
        }
        if btc {
            continue;
        }
        if rng.gen_bool(o.p_missing_asset) {
            let k = rng.gen_range(0..6);
            let s = rng.gen_range(0..t);
            panels[k][i][s] = f64::NAN;
        }
        if rng.gen_bool(o.p_zero_vol_asset) {
            let s = rng.gen_range(0..t);
            panels[4][i][s] = 0.0;
        }
        if o.flat_span > 0 && rng.gen_bool(o.p_flat_asset) {
            let span = o.flat_span.min(t);
            let start = rng.gen_range(0..=t - span);
            for s in start..start + span {
                let c = panels[0][i][s];
                panels[2][i][s] = c;
                panels[3][i][s] = c;
            }
        }
    }

    let mut it = panels
        .into_iter()
        .map(|rows| PanelMatrix::from_rows(&rows).expect("rectangular"));
    let mut next = || it.next().unwrap();
    let (close, open, high, low, volume, cap) = (next(), next(), next(), next(), next(), next());
    MarketDataSet::new(close, open, high, low, volume, cap, names, None).expect("consistent shapes")
}

fn to_rows(p: &PanelMatrix) -> Vec<Vec<f64>> {
    p.rows().map(|r| r.to_vec()).collect()
}

pub fn to_ref_data(ds: &MarketDataSet) -> RefData {
    RefData {
        prc: to_rows(&ds.close),
        open: to_rows(&ds.open),
        high: to_rows(&ds.high),
        low: to_rows(&ds.low),
        vol: to_rows(&ds.volume),
        cap: to_rows(&ds.cap),
        name: ds.names.clone(),
    }
}
