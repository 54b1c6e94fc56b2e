//! Daily long-only altcoin weights.

use alloc::vec;
use alloc::vec::Vec;

use crate::error::{Error, Result};

/// How the prior-day momentum turns into a long signal.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum SignalMode {
    /// Long when yesterday's return was negative.
    #[default]
    MeanReversion,
    /// Long when yesterday's return was positive.
    Reversed,
    /// Long every eligible altcoin regardless of momentum.
    AlwaysOn,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum WeightingScheme {
    #[default]
    Equal,
    /// `alpha / sigma`
    InverseVol,
    /// `alpha * |mom| / sigma^2`
    MomOverVar,
}

/// Fractions of the long investment level; sums to one unless empty.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    pub w: Vec<f64>,
    pub n_signals: usize,
}

impl WeightVector {
    pub fn zeros(n: usize) -> Self {
        Self {
            w: vec![0.0; n],
            n_signals: 0,
        }
    }

    pub fn is_empty(&self) -> bool {
        self.n_signals == 0
    }

    /// Indices with a positive weight.
    pub fn support(&self) -> Vec<usize> {
        self.w
            .iter()
            .enumerate()
            .filter_map(|(i, &w)| (w > 0.0).then_some(i))
            .collect()
    }
}

/// `-sign(mom)` clipped at zero, its mirror image, or a constant 1.
///
/// `mom == 0` gives no signal in both directional modes.
pub fn raw_signal(mom_col: &[f64], mode: SignalMode) -> Vec<f64> {
    mom_col
        .iter()
        .map(|&m| match mode {
            SignalMode::MeanReversion => f64::from(u8::from(m < 0.0)),
            SignalMode::Reversed => f64::from(u8::from(m > 0.0)),
            SignalMode::AlwaysOn => 1.0,
        })
        .collect()
}

/// Masks the signal to eligible altcoins, applies the weighting scheme and
/// normalizes to unit sum.
///
/// Returns the all-zero vector with `n_signals == 0` when nothing is left.
pub fn build_weights(
    signal: &[f64],
    eligible: &[bool],
    vol: &[f64],
    mom_col: &[f64],
    scheme: WeightingScheme,
    btc_index: usize,
) -> Result<WeightVector> {
    let n = signal.len();
    let mut x = vec![0.0; n];
    for i in 0..n {
        if i == btc_index || !eligible[i] {
            continue;
        }
        let alpha = signal[i].max(0.0);
        if alpha == 0.0 {
            continue;
        }
        x[i] = match scheme {
            WeightingScheme::Equal => alpha,
            WeightingScheme::InverseVol => alpha / checked_vol(vol[i], i)?,
            WeightingScheme::MomOverVar => {
                let sigma = checked_vol(vol[i], i)?;
                alpha * mom_col[i].abs() / (sigma * sigma)
            }
        };
    }
    let total: f64 = x.iter().map(|v| v.abs()).sum();
    if total == 0.0 {
        return Ok(WeightVector::zeros(n));
    }
    let n_signals = x.iter().filter(|&&v| v > 0.0).count();
    for v in &mut x {
        *v /= total;
    }
    Ok(WeightVector { w: x, n_signals })
}

fn checked_vol(v: f64, asset: usize) -> Result<f64> {
    if v.is_finite() && v > 0.0 {
        Ok(v)
    } else {
        Err(Error::BadVolatility { asset })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn signal_modes() {
        let mom = [-0.05, 0.0, 0.03];
        assert_eq!(raw_signal(&mom, SignalMode::MeanReversion), vec![1.0, 0.0, 0.0]);
        assert_eq!(raw_signal(&mom, SignalMode::Reversed), vec![0.0, 0.0, 1.0]);
        assert_eq!(raw_signal(&mom, SignalMode::AlwaysOn), vec![1.0; 3]);
    }

    #[test]
    fn equal_weights() {
        let sig = [1.0; 5];
        let elig = [true; 5];
        let w = build_weights(&sig, &elig, &[0.0; 5], &[0.0; 5], WeightingScheme::Equal, 0).unwrap();
        assert_eq!(w.w, vec![0.0, 0.25, 0.25, 0.25, 0.25]);
        assert_eq!(w.n_signals, 4);
    }

    #[test]
    fn inverse_vol_weights() {
        let w = build_weights(
            &[0.0, 1.0, 1.0],
            &[true; 3],
            &[1.0, 0.1, 0.3],
            &[0.0, -0.1, -0.2],
            WeightingScheme::InverseVol,
            0,
        )
        .unwrap();
        assert!((w.w[1] - 0.75).abs() < 1e-15);
        assert!((w.w[2] - 0.25).abs() < 1e-15);
    }

    #[test]
    fn mom_over_var_weights() {
        // raw: 0.1/0.01 = 10 and 0.2/0.04 = 5
        let w = build_weights(
            &[0.0, 1.0, 1.0],
            &[true; 3],
            &[1.0, 0.1, 0.2],
            &[0.0, -0.1, -0.2],
            WeightingScheme::MomOverVar,
            0,
        )
        .unwrap();
        assert!((w.w[1] - 2.0 / 3.0).abs() < 1e-15);
        assert!((w.w[2] - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_signal_is_degenerate() {
        let w = build_weights(&[0.0; 3], &[true; 3], &[1.0; 3], &[0.1; 3], WeightingScheme::Equal, 0)
            .unwrap();
        assert!(w.is_empty());
        assert_eq!(w.w, vec![0.0; 3]);
        // a signal on Bitcoin or an ineligible asset does not count
        let w = build_weights(
            &[1.0, 1.0, 0.0],
            &[true, false, true],
            &[1.0; 3],
            &[0.1; 3],
            WeightingScheme::Equal,
            0,
        )
        .unwrap();
        assert!(w.is_empty());
    }

    #[test]
    fn bad_vol_rejected() {
        let err = build_weights(
            &[0.0, 1.0],
            &[true; 2],
            &[1.0, f64::NAN],
            &[0.0, -1.0],
            WeightingScheme::InverseVol,
            0,
        )
        .unwrap_err();
        assert_eq!(err, Error::BadVolatility { asset: 1 });
        // equal weighting ignores volatility
        assert!(build_weights(&[0.0, 1.0], &[true; 2], &[1.0, f64::NAN], &[0.0, -1.0], WeightingScheme::Equal, 0).is_ok());
    }
}
