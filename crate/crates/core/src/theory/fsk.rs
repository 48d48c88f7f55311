use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::DerivationReport;
use crate::attack::{build_mask, inner_dt, MaskSpec};
use crate::btcs::{trajectory, GfskParams, PhyMode};
use crate::error::{Error, Result};
use crate::sigproc::cis;
use std::f64::consts::PI;

/// Absolute floor relative to energy per symbol times symbol rate.
pub const FSK_FLOOR: f64 = 1e-9;

/// Random GFSK burst used by the FSK lemma checks.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FskBurst {
    pub phy: PhyMode,
    pub n_bits: usize,
    pub oversampling: usize,
}

impl Default for FskBurst {
    fn default() -> Self {
        Self {
            phy: PhyMode::Le1M,
            n_bits: 64,
            oversampling: 16,
        }
    }
}

struct Burst {
    x: Vec<Complex64>,
    /// `d phi / dt`, rad/s.
    dphi: Vec<f64>,
    rate: f64,
}

fn burst(cfg: &FskBurst, seed: u64) -> Result<Burst> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let bits: Vec<u8> = (0..cfg.n_bits)
        .map(|_| rng.random::<bool>() as u8)
        .collect();
    let tr = trajectory(&bits, cfg.phy, cfg.oversampling, &GfskParams::default())?;
    Ok(Burst {
        x: tr.phase.iter().map(|&p| cis(p)).collect(),
        dphi: tr.inst_freq.iter().map(|f| 2.0 * PI * f).collect(),
        rate: tr.rate,
    })
}

/// `Re<m x, x'>` with the exact derivative `x' = j phi' x`.
fn projection(x: &[Complex64], dphi: &[f64], mask: &[Complex64], rate: f64) -> f64 {
    let masked: Vec<Complex64> = x.iter().zip(mask).map(|(a, m)| a * m).collect();
    let dx: Vec<Complex64> = x
        .iter()
        .zip(dphi)
        .map(|(a, w)| Complex64::new(0.0, *w) * a)
        .collect();
    inner_dt(&masked, &dx, rate).re
}

fn mask_for(spec: &MaskSpec, b: &Burst) -> Result<Vec<Complex64>> {
    Ok(build_mask(spec, b.rate, b.x.len())?.into_samples())
}

/// Real masks leave `Re<x~, x'>` at zero for any phase trajectory.
pub fn verify_fsk_real_mask(phi_seed: u64, mask: &MaskSpec) -> Result<DerivationReport> {
    verify_fsk_real_mask_with(&FskBurst::default(), phi_seed, mask)
}

pub fn verify_fsk_real_mask_with(
    cfg: &FskBurst,
    phi_seed: u64,
    mask: &MaskSpec,
) -> Result<DerivationReport> {
    let b = burst(cfg, phi_seed)?;
    let m = mask_for(mask, &b)?;
    if m.iter().any(|v| v.im != 0.0) {
        return Err(Error::InvalidParameter("mask has an imaginary part".into()));
    }
    let v = projection(&b.x, &b.dphi, &m, b.rate);
    // unit envelope: energy per symbol is one symbol period
    let floor = FSK_FLOOR * cfg.phy.symbol_period() * cfg.phy.symbol_rate();
    Ok(DerivationReport::compare(v, 0.0, 0.0, floor))
}

/// Projections for `x = exp(j phi)` and `x2 = exp(-j phi)` under the same mask.
pub fn verify_fsk_complex_mask_flip(phi_seed: u64, mask: &MaskSpec) -> Result<(f64, f64)> {
    verify_fsk_complex_mask_flip_with(&FskBurst::default(), phi_seed, mask)
}

pub fn verify_fsk_complex_mask_flip_with(
    cfg: &FskBurst,
    phi_seed: u64,
    mask: &MaskSpec,
) -> Result<(f64, f64)> {
    let b = burst(cfg, phi_seed)?;
    let m = mask_for(mask, &b)?;
    let x2: Vec<Complex64> = b.x.iter().map(|v| v.conj()).collect();
    let dphi2: Vec<f64> = b.dphi.iter().map(|w| -w).collect();
    Ok((
        projection(&b.x, &b.dphi, &m, b.rate),
        projection(&x2, &dphi2, &m, b.rate),
    ))
}

/// Sample statistics of the projection over random bit sequences.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EnsembleStats {
    pub n: usize,
    pub mean: f64,
    pub std_dev: f64,
    pub std_err: f64,
}

impl EnsembleStats {
    pub fn from_values(v: &[f64]) -> Self {
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Self {
            n,
            mean,
            std_dev: var.sqrt(),
            std_err: (var / n as f64).sqrt(),
        }
    }
}

/// Projection of a fixed complex mask over `n_sequences` random bursts.
pub fn complex_mask_ensemble(
    mask: &MaskSpec,
    n_sequences: usize,
    seed: u64,
) -> Result<EnsembleStats> {
    let cfg = FskBurst::default();
    let values = (0..n_sequences as u64)
        .map(|i| {
            verify_fsk_complex_mask_flip_with(&cfg, crate::derive_seed(seed, 3, i), mask)
                .map(|p| p.0)
        })
        .collect::<Result<Vec<_>>>()?;
    Ok(EnsembleStats::from_values(&values))
}
