//! Direct transcription of the reference backtest loop, written against
//! plain `Vec<Vec<f64>>` matrices (rows = assets, NaN = NA) and sharing no
//! code with the engine. Index conventions follow the reference with 1-based
//! column ranges shifted to 0-based.

/// Signal variants toggled by the commented-out reference lines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefSignal {
    Normal,
    Reverse,
    NoSignal,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefSuppression {
    None,
    /// `x / ss`
    Vol,
    /// `x * abs(mom) / ss^2`
    MomVar,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RefVol {
    /// `ss <- exp(hlv)`
    Hlv,
    /// d.i-day historical volatility of the log returns.
    RetSd,
}

#[derive(Debug, Clone)]
pub struct RefParams {
    pub days: usize,
    pub back: usize,
    pub lookback: usize,
    pub d_r: usize,
    pub d_v: usize,
    pub d_i: usize,
    pub ix_lower: Option<usize>,
    pub ix_upper: usize,
    pub signal: RefSignal,
    pub suppression: RefSuppression,
    pub vol: RefVol,
    pub open_close: bool,
    pub charge_btc_on_empty: bool,
    /// Names removed when `days > 365` after `days <- lookback`.
    pub long_lookback_exclusions: Vec<String>,
    /// Names always removed.
    pub exclusions: Vec<String>,
}

pub struct RefData {
    pub prc: Vec<Vec<f64>>,
    pub open: Vec<Vec<f64>>,
    pub high: Vec<Vec<f64>>,
    pub low: Vec<Vec<f64>>,
    pub vol: Vec<Vec<f64>>,
    pub cap: Vec<Vec<f64>>,
    pub name: Vec<String>,
}

#[derive(Debug, Clone)]
pub struct RefOutput {
    /// `pnl[i]` for trading day `i` (0 = most recent).
    pub pnl: Vec<f64>,
    /// Weights per day over the surviving rows; NaN where the reference
    /// produces NaN.
    pub weights: Vec<Vec<f64>>,
    /// Original row numbers of the survivors.
    pub rows: Vec<usize>,
}

type Mat = Vec<Vec<f64>>;

fn cols(m: &Mat, from: usize, to: usize) -> Mat {
    m.iter().map(|r| r[from..to].to_vec()).collect()
}

fn rows_where(m: &Mat, take: &[bool]) -> Mat {
    m.iter()
        .zip(take)
        .filter(|(_, &t)| t)
        .map(|(r, _)| r.clone())
        .collect()
}

fn calc_mv_avg(x: &Mat, days: usize, d_r: usize) -> Mat {
    if d_r == 1 {
        return cols(x, 0, days);
    }
    x.iter()
        .map(|r| {
            (0..days)
                .map(|i| {
                    let vals: Vec<f64> = r[i..i + d_r].iter().copied().filter(|v| !v.is_nan()).collect();
                    if vals.is_empty() {
                        f64::NAN
                    } else {
                        vals.iter().sum::<f64>() / vals.len() as f64
                    }
                })
                .collect()
        })
        .collect()
}

fn sign(x: f64) -> f64 {
    if x > 0.0 {
        1.0
    } else if x < 0.0 {
        -1.0
    } else {
        0.0
    }
}

fn sd(v: &[f64]) -> f64 {
    let n = v.len() as f64;
    let m = v.iter().sum::<f64>() / n;
    (v.iter().map(|x| (x - m).powi(2)).sum::<f64>() / (n - 1.0)).sqrt()
}

pub fn crypto_arb(data: &RefData, p: &RefParams) -> Result<RefOutput, String> {
    let d = p.days + p.d_r + 1;
    let prc = cols(&data.prc, 0, d);
    let cap = cols(&data.cap, 0, d);
    let high = cols(&data.high, 0, d);
    let low = cols(&data.low, 0, d);
    let vol = cols(&data.vol, 0, d);
    let open = cols(&data.open, 0, d);

    let n = prc.len();
    let take: Vec<bool> = (0..n)
        .map(|i| {
            [&prc, &cap, &high, &low, &vol, &open]
                .iter()
                .all(|m| m[i].iter().all(|v| !v.is_nan()))
                && vol[i].iter().all(|&v| v != 0.0)
        })
        .collect();
    let rows1: Vec<usize> = (0..n).filter(|&i| take[i]).collect();

    let prc_t = rows_where(&prc, &take);
    let open_t = rows_where(&open, &take);
    let (mut ret, mut ret_d): (Mat, Mat) = if p.open_close {
        (
            prc_t.iter().zip(&open_t).map(|(c, o)| (0..d - 1).map(|j| (c[j] / o[j]).ln()).collect()).collect(),
            prc_t.iter().zip(&open_t).map(|(c, o)| (0..d - 1).map(|j| c[j] / o[j] - 1.0).collect()).collect(),
        )
    } else {
        (
            prc_t.iter().map(|r| (0..d - 1).map(|j| (r[j] / r[j + 1]).ln()).collect()).collect(),
            prc_t.iter().map(|r| (0..d - 1).map(|j| r[j] / r[j + 1] - 1.0).collect()).collect(),
        )
    };
    let mut prc = cols(&prc_t, 1, d);
    let mut cap = cols(&rows_where(&cap, &take), 1, d);
    let mut high = cols(&rows_where(&high, &take), 1, d);
    let mut low = cols(&rows_where(&low, &take), 1, d);
    let mut vol = cols(&rows_where(&vol, &take), 1, d);
    let mut open = cols(&open_t, 1, d);
    let name: Vec<String> = rows1.iter().map(|&i| data.name[i].clone()).collect();

    if p.back > 0 {
        let nc = ret[0].len();
        ret = cols(&ret, p.back, nc);
        ret_d = cols(&ret_d, p.back, nc);
        prc = cols(&prc, p.back, nc);
        cap = cols(&cap, p.back, nc);
        high = cols(&high, p.back, nc);
        low = cols(&low, p.back, nc);
        vol = cols(&vol, p.back, nc);
        open = cols(&open, p.back, nc);
    }
    let days = p.lookback;

    let _av: Mat = calc_mv_avg(&vol, days, p.d_v)
        .into_iter()
        .map(|r| r.into_iter().map(f64::ln).collect())
        .collect();
    let hlv0: Mat = (0..prc.len())
        .map(|i| {
            (0..prc[i].len())
                .map(|j| (high[i][j] - low[i][j]).powi(2) / prc[i][j].powi(2))
                .collect()
        })
        .collect();
    let hlv: Mat = calc_mv_avg(&hlv0, days, p.d_i)
        .into_iter()
        .map(|r| r.into_iter().map(|v| 0.5 * v.ln()).collect())
        .collect();
    let take: Vec<bool> = hlv.iter().map(|r| r.iter().all(|v| v.is_finite())).collect();

    let hlv = rows_where(&hlv, &take);
    let prc_k = rows_where(&prc, &take);
    let open_k = rows_where(&open, &take);
    let mom: Mat = if p.open_close {
        prc_k.iter().zip(&open_k).map(|(c, o)| (0..days).map(|j| (c[j] / o[j]).ln()).collect()).collect()
    } else {
        prc_k.iter().map(|r| (0..days).map(|j| (r[j] / r[j + 1]).ln()).collect()).collect()
    };
    let size: Mat = rows_where(&cap, &take)
        .iter()
        .map(|r| (0..days).map(|j| r[j].ln()).collect())
        .collect();
    let ret_full = rows_where(&ret, &take);
    let ret_d = cols(&rows_where(&ret_d, &take), 0, days);
    let name: Vec<String> = name.iter().zip(&take).filter(|(_, &t)| t).map(|(n, _)| n.clone()).collect();
    let rows: Vec<usize> = rows1.iter().zip(&take).filter(|(_, &t)| t).map(|(&r, _)| r).collect();

    let m = name.len();
    let mut pnl = vec![0.0; days];
    let mut weights = vec![Vec::new(); days];
    for i in (0..days).rev() {
        let mut x: Vec<f64> = (0..m).map(|k| -sign(mom[k][i])).collect();
        match p.signal {
            RefSignal::Normal => {}
            RefSignal::NoSignal => x.iter_mut().for_each(|v| *v = 1.0),
            RefSignal::Reverse => x.iter_mut().for_each(|v| *v = -*v),
        }

        let mut sort_size: Vec<f64> = (0..m).map(|k| size[k][i]).collect();
        sort_size.sort_by(|a, b| b.partial_cmp(a).unwrap());
        // an out-of-range rank is an error for the upper bound and clamps
        // to the smallest asset for the lower bound
        if p.ix_upper > sort_size.len() {
            return Err(format!("ix.upper {} > {}", p.ix_upper, sort_size.len()));
        }
        let ix_lower = p.ix_lower.unwrap_or(sort_size.len()).min(sort_size.len());
        let lo = sort_size[ix_lower - 1];
        let hi = sort_size[p.ix_upper - 1];
        for k in 0..m {
            let t = size[k][i] >= lo && size[k][i] <= hi;
            if !t {
                x[k] = 0.0;
            }
        }
        x[0] = 0.0;
        if days > 365 {
            for k in 0..m {
                if p.long_lookback_exclusions.contains(&name[k]) {
                    x[k] = 0.0;
                }
            }
        }
        for k in 0..m {
            if p.exclusions.contains(&name[k]) {
                x[k] = 0.0;
            }
        }
        for v in x.iter_mut() {
            if *v < 0.0 {
                *v = 0.0;
            }
        }
        if p.suppression != RefSuppression::None {
            let ss: Vec<f64> = (0..m)
                .map(|k| match p.vol {
                    RefVol::Hlv => hlv[k][i].exp(),
                    RefVol::RetSd => sd(&ret_full[k][i + 1..=i + p.d_i]),
                })
                .collect();
            for k in 0..m {
                x[k] = match p.suppression {
                    RefSuppression::Vol => x[k] / ss[k],
                    RefSuppression::MomVar => x[k] * mom[k][i].abs() / ss[k].powi(2),
                    RefSuppression::None => unreachable!(),
                };
            }
        }
        let total: f64 = x.iter().map(|v| v.abs()).sum();
        let x: Vec<f64> = x.iter().map(|v| v / total).collect();
        weights[i] = x.clone();
        let mut day: f64 = x.iter().zip(&ret_d).map(|(w, r)| w * r[i]).sum::<f64>() - ret_d[0][i];
        if !day.is_finite() {
            day = if p.charge_btc_on_empty && total == 0.0 {
                -ret_d[0][i]
            } else {
                0.0
            };
        }
        pnl[i] = day;
    }
    Ok(RefOutput { pnl, weights, rows })
}
