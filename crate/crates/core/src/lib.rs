//! Simulation and analysis of distance-decreasing attacks on
//! correlation-based time-of-arrival estimation in narrowband ranging.
//!
//! The crate is organised bottom-up:
//!
//! * [`sigproc`] - sampled complex signals, filtering, resampling,
//!   correlation, spectral measures and noise.
//! * [`btcs`] - CS SYNC packet construction and GFSK (de)modulation.
//! * [`attack`] - temporal masking, negative-group-delay filtering and the
//!   analytic advance predictors.
//! * [`receiver`] - differential cross-correlation ToA estimation, bit
//!   checking and the attack detection metrics.
//! * [`theory`] - numerical checks of the perturbation analysis.
//! * [`harness`] - RF chain model, experiments, persistence.

pub mod attack;
pub mod btcs;
pub mod error;
pub mod harness;
pub mod receiver;
pub mod sigproc;
pub mod theory;

pub use error::{Error, Result};
pub use sigproc::Signal;

/// Speed of light used for all time/distance conversions (m/s).
pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;

/// Derives an independent 64-bit seed for `(stream, index)` from a master seed.
///
/// Uses the splitmix64 finaliser so neighbouring indices give unrelated seeds.
pub fn derive_seed(master: u64, stream: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(stream.wrapping_mul(0xD1B5_4A32_D192_ED03))
        .wrapping_add(index.wrapping_mul(0x9E37_79B9_7F4A_7C15));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
