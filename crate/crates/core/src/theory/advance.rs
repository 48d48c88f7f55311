use serde::{Deserialize, Serialize};

use super::slope_identity::gaussian_pulse;
use crate::attack::predict_advance;
use crate::error::Result;
use crate::sigproc::{cross_correlate, fractional_delay, inner, Signal};

/// Pulse used by the advance-prediction study.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PulseFamily {
    pub sigma: f64,
    pub rate: f64,
    pub n_samples: usize,
}

impl Default for PulseFamily {
    fn default() -> Self {
        Self {
            sigma: 1e-6,
            rate: 20e6,
            n_samples: 1024,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AdvanceRow {
    /// Applied advance, seconds.
    pub delta: f64,
    /// Predicted peak lag (negative for an advance).
    pub predicted: f64,
    /// Measured peak lag of the band-limited correlation.
    pub measured: f64,
    pub rel_err: f64,
}

/// `|<x_tilde, x(. - tau)>|^2` with band-limited interpolation of `x`.
fn lag_power(x: &Signal, x_tilde: &Signal, tau: f64) -> f64 {
    inner(x_tilde.samples(), fractional_delay(x, tau).samples()).norm_sqr()
}

/// Peak lag of the correlation of `x_tilde` against `x`, refined to
/// sub-picosecond resolution by golden-section search around the sampled peak.
pub fn measured_peak_lag(x: &Signal, x_tilde: &Signal) -> Result<f64> {
    let c = cross_correlate(x_tilde, x)?;
    let centre = c.lag_seconds(c.peak_index());
    let (mut a, mut b) = (centre - c.dt, centre + c.dt);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    let mut p = b - g * (b - a);
    let mut q = a + g * (b - a);
    let (mut fp, mut fq) = (lag_power(x, x_tilde, p), lag_power(x, x_tilde, q));
    while b - a > 1e-13 {
        if fp > fq {
            b = q;
            q = p;
            fq = fp;
            p = b - g * (b - a);
            fp = lag_power(x, x_tilde, p);
        } else {
            a = p;
            p = q;
            fp = fq;
            q = a + g * (b - a);
            fq = lag_power(x, x_tilde, q);
        }
    }
    Ok(0.5 * (a + b))
}

/// Compares first-order predictions with measured peak lags for pure advances.
pub fn advance_prediction_study(family: &PulseFamily, deltas: &[f64]) -> Result<Vec<AdvanceRow>> {
    let x = gaussian_pulse(family.rate, family.n_samples, family.sigma);
    deltas
        .iter()
        .map(|&delta| {
            let xt = fractional_delay(&x, -delta);
            let predicted = predict_advance(&x, &xt)?;
            let measured = if delta == 0.0 {
                0.0
            } else {
                measured_peak_lag(&x, &xt)?
            };
            let rel_err = if measured == 0.0 {
                predicted.abs()
            } else {
                ((predicted - measured) / measured).abs()
            };
            Ok(AdvanceRow {
                delta,
                predicted,
                measured,
                rel_err,
            })
        })
        .collect()
}
