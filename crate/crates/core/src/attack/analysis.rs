use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::sigproc::{cis, inner, Signal};

/// Time derivative by central differences (one-sided at the ends), in 1/s.
pub fn signal_derivative(x: &Signal) -> Vec<Complex64> {
    let v = x.samples();
    let r = x.rate();
    let n = v.len();
    if n < 2 {
        return vec![Complex64::new(0.0, 0.0); n];
    }
    (0..n)
        .map(|k| match k {
            0 => (v[1] - v[0]) * r,
            k if k == n - 1 => (v[k] - v[k - 1]) * r,
            k => (v[k + 1] - v[k - 1]) * (0.5 * r),
        })
        .collect()
}

/// Continuous-time inner product approximated by `sum(a conj(b)) / rate`.
pub(crate) fn inner_dt(a: &[Complex64], b: &[Complex64], rate: f64) -> Complex64 {
    inner(a, b) / rate
}

/// `Re<x_tilde, x'>`; positive values meet the first-order advance condition.
pub fn perturbation_projection(x: &Signal, x_tilde: &Signal) -> Result<f64> {
    x.check_aligned(x_tilde)?;
    Ok(inner_dt(x_tilde.samples(), &signal_derivative(x), x.rate()).re)
}

/// `|R(lag)|^2` of the autocorrelation of `x` at an integer lag, `R` scaled by `1/rate`.
fn autocorrelation_power(x: &Signal, lag: i64) -> f64 {
    let v = x.samples();
    let n = v.len() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0.max(lag)..n.min(n + lag) {
        acc += v[k as usize] * v[(k - lag) as usize].conj();
    }
    (acc / x.rate()).norm_sqr()
}

/// Slope of `|R~|^2` at zero lag: `-2 Re{<x~, x>* <x~, x'>}`.
pub fn p_tilde_slope(x: &Signal, x_tilde: &Signal) -> Result<f64> {
    x.check_aligned(x_tilde)?;
    let r = x.rate();
    let dx = signal_derivative(x);
    let cross = inner_dt(x_tilde.samples(), x.samples(), r);
    let proj = inner_dt(x_tilde.samples(), &dx, r);
    Ok(-2.0 * (cross.conj() * proj).re)
}

/// Curvature of `|R|^2` at zero lag from the integer-lag second difference.
pub fn autocorrelation_curvature(x: &Signal) -> f64 {
    let r = x.rate();
    (autocorrelation_power(x, 1) - 2.0 * autocorrelation_power(x, 0) + autocorrelation_power(x, -1))
        * r
        * r
}

/// First-order correlation peak lag of `x_tilde` against `x`, in seconds;
/// negative values are advances.
pub fn predict_advance(x: &Signal, x_tilde: &Signal) -> Result<f64> {
    let slope = p_tilde_slope(x, x_tilde)?;
    let curvature = autocorrelation_curvature(x);
    if !(curvature < 0.0) {
        return Err(Error::DegenerateCurvature(format!(
            "autocorrelation curvature {curvature} is not negative"
        )));
    }
    Ok(-slope / curvature)
}

/// `Re{exp(j phi) <dx, x'>}` for every `phi`.
pub fn phase_offset_sweep(x: &Signal, delta_x: &Signal, phis: &[f64]) -> Result<Vec<f64>> {
    x.check_aligned(delta_x)?;
    let proj = inner_dt(delta_x.samples(), &signal_derivative(x), x.rate());
    Ok(phis.iter().map(|&p| (cis(p) * proj).re).collect())
}
