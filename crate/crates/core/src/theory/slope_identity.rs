use std::f64::consts::PI;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::DerivationReport;
use crate::attack::{apply_mask, inner_dt, signal_derivative, MaskSpec, NgdFilterSpec};
use crate::error::{Error, Result};
use crate::sigproc::{
    apply_filter, cis, fractional_delay, resample, AnalyticResponse, LinearFilter, Signal,
};

/// Upsampling factor of the dense correlation grid.
pub const DENSE_FACTOR: usize = 16;
pub const IDENTITY_TOLERANCE: f64 = 0.01;
/// Absolute floor relative to `|R(0)|^2 * rate`.
pub const IDENTITY_FLOOR: f64 = 1e-9;
/// Zero guard added before dense resampling so circular interpolation cannot wrap.
const GUARD: usize = 32;

fn dense_lag_product(a: &[Complex64], b: &[Complex64], lag: i64) -> Complex64 {
    let n = a.len() as i64;
    let mut acc = Complex64::new(0.0, 0.0);
    for k in 0.max(lag)..n.min(n + lag) {
        acc += a[k as usize] * b[(k - lag) as usize].conj();
    }
    acc
}

/// Checks the zero-lag slope of `|R~(tau)|^2`, `R~(tau) = <x + dx, x(. - tau)>`,
/// against `-2 Re{<dx, x'> <x~, x>*}`.
pub fn verify_p_tilde_derivative(
    x: &Signal,
    delta_x: &Signal,
    fd_step: f64,
) -> Result<DerivationReport> {
    x.check_aligned(delta_x)?;
    let rate = x.rate();
    if !(fd_step > 0.0) || fd_step > 1.0 / (4.0 * rate) {
        return Err(Error::InvalidParameter(format!(
            "finite-difference step {fd_step} s must lie in (0, 1/(4 rate)]"
        )));
    }
    let x_tilde = x.add(delta_x)?;

    let dense_rate = rate * DENSE_FACTOR as f64;
    let lag = (fd_step * dense_rate).round().max(1.0) as i64;
    let h = lag as f64 / dense_rate;
    let up = |s: &Signal| resample(&s.padded(GUARD, GUARD), dense_rate).map(Signal::into_samples);
    let (xd, xtd) = (up(x)?, up(&x_tilde)?);
    let p = |l: i64| (dense_lag_product(&xtd, &xd, l) / dense_rate).norm_sqr();
    let lhs = (p(lag) - p(-lag)) / (2.0 * h);

    let dx = signal_derivative(x);
    let cross = inner_dt(x_tilde.samples(), x.samples(), rate);
    let proj = inner_dt(delta_x.samples(), &dx, rate);
    let rhs = -2.0 * (proj * cross.conj()).re;

    let peak = inner_dt(x.samples(), x.samples(), rate).norm_sqr();
    Ok(DerivationReport::compare(
        lhs,
        rhs,
        IDENTITY_TOLERANCE,
        IDENTITY_FLOOR * peak * rate,
    ))
}

/// A perturbation instance for the identity check.
#[derive(Debug, Clone)]
pub struct PerturbationCase {
    pub label: String,
    pub x: Signal,
    pub delta_x: Signal,
}

/// Gaussian pulse with standard deviation `sigma` centred in `n` samples.
pub fn gaussian_pulse(rate: f64, n: usize, sigma: f64) -> Signal {
    let c = n as f64 / 2.0;
    let v: Vec<f64> = (0..n)
        .map(|k| (-0.5 * ((k as f64 - c) / rate / sigma).powi(2)).exp())
        .collect();
    Signal::from_real(&v, rate).expect("non-empty pulse")
}

/// Amplitude-keyed train of Gaussian-shaped symbols.
pub fn ask_train(rate: f64, symbol: f64, amplitudes: &[f64], sigma: f64) -> Signal {
    let lead = 4.0 * symbol;
    let n = ((lead * 2.0 + symbol * amplitudes.len() as f64) * rate).ceil() as usize;
    let v: Vec<f64> = (0..n)
        .map(|k| {
            let t = k as f64 / rate - lead;
            amplitudes
                .iter()
                .enumerate()
                .map(|(i, a)| a * (-0.5 * ((t - (i as f64 + 0.5) * symbol) / sigma).powi(2)).exp())
                .sum()
        })
        .collect();
    Signal::with_t0(
        v.into_iter().map(|r| Complex64::new(r, 0.0)).collect(),
        rate,
        -lead,
    )
    .expect("non-empty train")
}

/// Seeded mix of masked, shifted and NGD-filtered real pulses, each pair
/// optionally rotated by a common phase.
pub fn perturbation_family(n_pairs: usize, seed: u64) -> Result<Vec<PerturbationCase>> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut out = Vec::with_capacity(n_pairs);
    for i in 0..n_pairs {
        let ask = rng.random::<bool>();
        let x = if ask {
            let amps: Vec<f64> = (0..8).map(|_| rng.random_range(0.2..1.0)).collect();
            ask_train(64e6, 1e-6, &amps, 0.3e-6)
        } else {
            gaussian_pulse(20e6, 1024, 1e-6)
        };
        let (kind, x_tilde) = match i % 3 {
            0 => {
                let period = if ask { 1e-6 } else { x.duration() };
                let duty = rng.random_range(0.3..0.9);
                let offset = rng.random_range(0.0..period);
                let spec = MaskSpec::truncation(duty, 0.0, period).with_offset(offset + x.t0());
                ("mask", apply_mask(&x, &spec)?)
            }
            1 => {
                let shift = rng.random_range(-20e-9..20e-9);
                ("shift", fractional_delay(&x, shift))
            }
            _ => {
                let spec = NgdFilterSpec::new(rng.random_range(10e-9..80e-9), 0.0);
                let h =
                    LinearFilter::Analytic(AnalyticResponse::new("ngd", move |f| spec.response(f)));
                ("ngd", apply_filter(&x, &h)?)
            }
        };
        let rot = if rng.random::<bool>() {
            cis(rng.random_range(0.0..2.0 * PI))
        } else {
            Complex64::new(1.0, 0.0)
        };
        let x_rot = x.scaled(rot);
        let dx = x_tilde.scaled(rot).sub(&x_rot)?;
        out.push(PerturbationCase {
            label: format!("{}-{kind}-{i}", if ask { "ask" } else { "gauss" }),
            x: x_rot,
            delta_x: dx,
        });
    }
    Ok(out)
}
