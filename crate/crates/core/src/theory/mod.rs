//! Numerical checks of the perturbation analysis.

mod advance;
mod slope_identity;
mod fsk;

pub use advance::{advance_prediction_study, measured_peak_lag, AdvanceRow, PulseFamily};
pub use slope_identity::{
    perturbation_family, ask_train, gaussian_pulse, verify_p_tilde_derivative, PerturbationCase,
    DENSE_FACTOR, IDENTITY_FLOOR, IDENTITY_TOLERANCE,
};
pub use fsk::{
    complex_mask_ensemble, verify_fsk_complex_mask_flip, verify_fsk_complex_mask_flip_with,
    verify_fsk_real_mask, verify_fsk_real_mask_with, EnsembleStats, FskBurst, FSK_FLOOR,
};

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::attack::{gaussian_pulse_derivative, MaskKind, MaskSpec};
use crate::error::{Error, Result};

/// Comparison of a numerically measured quantity with its closed form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct DerivationReport {
    pub lhs: f64,
    pub rhs: f64,
    pub abs_err: f64,
    pub rel_err: f64,
    pub tolerance: f64,
    pub floor: f64,
    pub pass: bool,
}

impl DerivationReport {
    /// Passes on relative error within `tolerance`, or absolute error within `floor`.
    pub fn compare(lhs: f64, rhs: f64, tolerance: f64, floor: f64) -> Self {
        let abs_err = (lhs - rhs).abs();
        let rel_err = if rhs != 0.0 {
            abs_err / rhs.abs()
        } else {
            f64::INFINITY
        };
        let pass = rel_err <= tolerance || abs_err <= floor;
        Self {
            lhs,
            rhs,
            abs_err,
            rel_err,
            tolerance,
            floor,
            pass,
        }
    }
}

/// Two-way-ranging time of flight `(t_round - (1 - drift) t_reply) / 2`.
pub fn tof_twr(t_round: f64, t_reply: f64, drift: f64) -> Result<f64> {
    let tof = (t_round - (1.0 - drift) * t_reply) / 2.0;
    if tof < 0.0 || !tof.is_finite() {
        return Err(Error::Protocol(format!(
            "round trip {t_round} s shorter than corrected reply {} s",
            (1.0 - drift) * t_reply
        )));
    }
    Ok(tof)
}

/// One line of the theory suite.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteCheck {
    pub name: String,
    pub passed: usize,
    pub total: usize,
    pub detail: String,
}

impl SuiteCheck {
    pub fn ok(&self) -> bool {
        self.passed == self.total
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub checks: Vec<SuiteCheck>,
    pub advance_study: Vec<AdvanceRow>,
}

impl SuiteReport {
    pub fn all_passed(&self) -> bool {
        self.checks.iter().all(SuiteCheck::ok)
    }

    pub fn table(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(s, "{:<28} {:>9}  {}", "check", "passed", "detail");
        for c in &self.checks {
            let _ = writeln!(
                s,
                "{:<28} {:>4}/{:<4}  {}",
                c.name, c.passed, c.total, c.detail
            );
        }
        let _ = writeln!(
            s,
            "\n{:>10} {:>12} {:>12} {:>9}",
            "delta_ns", "pred_ns", "meas_ns", "rel_err"
        );
        for r in &self.advance_study {
            let _ = writeln!(
                s,
                "{:>10.2} {:>12.4} {:>12.4} {:>9.4}",
                r.delta * 1e9,
                r.predicted * 1e9,
                r.measured * 1e9,
                r.rel_err
            );
        }
        s
    }
}

/// Complex derivative-exponential mask used by the FSK checks.
pub fn reference_complex_mask() -> MaskSpec {
    MaskSpec {
        kind: MaskKind::DerivativeExponential {
            alpha: 0.3,
            alpha_imag: 0.3,
            pulse_derivative: gaussian_pulse_derivative(0.5, 64),
        },
        period: 1e-6,
        offset: 0.0,
        complex_allowed: true,
    }
}

/// Runs every numerical check with fixed seeds.
pub fn run_suite(seed: u64) -> Result<SuiteReport> {
    use rayon::prelude::*;

    let mut checks = Vec::new();

    let family = perturbation_family(100, seed)?;
    let reports = family
        .par_iter()
        .map(|c| {
            verify_p_tilde_derivative(&c.x, &c.delta_x, 1.0 / (DENSE_FACTOR as f64 * c.x.rate()))
        })
        .collect::<Result<Vec<_>>>()?;
    let worst = reports
        .iter()
        .filter(|r| r.abs_err > r.floor)
        .map(|r| r.rel_err)
        .fold(0.0, f64::max);
    checks.push(SuiteCheck {
        name: "slope identity".into(),
        passed: reports.iter().filter(|r| r.pass).count(),
        total: reports.len(),
        detail: format!("worst relative error {worst:.2e}"),
    });

    let masks = [
        MaskSpec::truncation(0.5, 0.0, 1e-6),
        MaskSpec::truncation(0.7, 1e-7, 1e-6).with_offset(0.2e-6),
        MaskSpec::truncation(1.0, 0.0, 1e-6),
    ];
    let real = (0..100u64)
        .into_par_iter()
        .map(|i| {
            verify_fsk_real_mask(
                crate::derive_seed(seed, 4, i),
                &masks[i as usize % masks.len()],
            )
        })
        .collect::<Result<Vec<_>>>()?;
    let largest = real.iter().map(|r| r.lhs.abs()).fold(0.0, f64::max);
    checks.push(SuiteCheck {
        name: "fsk real mask".into(),
        passed: real.iter().filter(|r| r.pass).count(),
        total: real.len(),
        detail: format!("largest |projection| {largest:.2e}"),
    });

    let cmask = reference_complex_mask();
    let flips = (0..100u64)
        .into_par_iter()
        .map(|i| verify_fsk_complex_mask_flip(crate::derive_seed(seed, 5, i), &cmask))
        .collect::<Result<Vec<_>>>()?;
    let antisym = flips
        .iter()
        .filter(|(a, b)| (a + b).abs() <= 1e-9 * a.abs().max(b.abs()).max(1e-300))
        .count();
    checks.push(SuiteCheck {
        name: "fsk conjugate flip".into(),
        passed: antisym,
        total: flips.len(),
        detail: "projection(x) = -projection(conj x)".into(),
    });

    let stats = complex_mask_ensemble(&cmask, 1000, seed)?;
    checks.push(SuiteCheck {
        name: "fsk complex ensemble".into(),
        passed: usize::from(stats.mean.abs() <= 3.0 * stats.std_err),
        total: 1,
        detail: format!("mean {:.3e}, std err {:.3e}", stats.mean, stats.std_err),
    });

    let cases = [
        (1000e-9, 900e-9, 0.0, 50e-9),
        (1000e-9, 900e-9, 1e-5, 50.0045e-9),
        (900e-9, 900e-9, 0.0, 0.0),
    ];
    let tof_ok = cases
        .iter()
        .filter(|(r, p, d, e)| tof_twr(*r, *p, *d).map_or(false, |v| (v - e).abs() < 1e-15))
        .count();
    checks.push(SuiteCheck {
        name: "two-way ranging".into(),
        passed: tof_ok,
        total: cases.len(),
        detail: "direct substitution".into(),
    });

    let advance_study = advance_prediction_study(
        &PulseFamily::default(),
        &[0.0, 1e-9, 5e-9, 10e-9, 20e-9, 50e-9, 100e-9, 200e-9],
    )?;
    let small = advance_study
        .iter()
        .filter(|r| r.delta >= 1e-9 && r.delta <= 20e-9)
        .collect::<Vec<_>>();
    checks.push(SuiteCheck {
        name: "advance prediction".into(),
        passed: small.iter().filter(|r| r.rel_err <= 0.2).count(),
        total: small.len(),
        detail: "1-20 ns shifts within 20%".into(),
    });

    Ok(SuiteReport {
        checks,
        advance_study,
    })
}
