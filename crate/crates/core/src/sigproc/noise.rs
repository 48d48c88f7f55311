use num_complex::Complex64;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

use super::Signal;
use crate::error::Result;

/// Adds circular complex Gaussian noise at `snr_db` relative to the mean
/// power of `s`. `snr_db = +inf` returns the input unchanged.
pub fn add_awgn(s: &Signal, snr_db: f64, seed: u64) -> Result<Signal> {
    add_awgn_with_reference(s, snr_db, seed, s.mean_power())
}

/// Adds noise of per-sample variance `reference_power / 10^(snr_db/10)`.
pub fn add_awgn_with_reference(
    s: &Signal,
    snr_db: f64,
    seed: u64,
    reference_power: f64,
) -> Result<Signal> {
    if snr_db == f64::INFINITY {
        return Ok(s.clone());
    }
    let variance = reference_power / 10f64.powf(snr_db / 10.0);
    let sigma = (variance / 2.0).sqrt();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let noisy = s
        .samples()
        .iter()
        .map(|&x| {
            let re: f64 = StandardNormal.sample(&mut rng);
            let im: f64 = StandardNormal.sample(&mut rng);
            x + Complex64::new(re, im) * sigma
        })
        .collect();
    s.with_samples(noisy)
}
