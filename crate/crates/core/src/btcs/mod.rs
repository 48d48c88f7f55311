//! CS SYNC packets and GFSK modulation.

mod gfsk;
mod packet;

pub use gfsk::{
    differential_template, frequency_pulse, gfsk_demodulate, gfsk_modulate, gfsk_modulate_with,
    trajectory, GfskParams, Trajectory,
};
pub use packet::{
    bits_from_text, bits_to_text, build_cs_sync, longest_run, sounding_sequence, CsSyncConfig,
    CsSyncPacket, PacketDescriptor, Payload, SoundingSequence, DEFAULT_MARKERS,
    DEFAULT_SOUNDING_BITS, MAX_RANDOM_BITS,
};

use serde::{Deserialize, Serialize};

/// Bluetooth LE uncoded PHY.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PhyMode {
    #[serde(rename = "LE1M")]
    Le1M,
    #[serde(rename = "LE2M")]
    Le2M,
}

impl PhyMode {
    pub fn name(self) -> &'static str {
        match self {
            PhyMode::Le1M => "LE1M",
            PhyMode::Le2M => "LE2M",
        }
    }

    /// Symbols per second.
    pub fn symbol_rate(self) -> f64 {
        match self {
            PhyMode::Le1M => 1e6,
            PhyMode::Le2M => 2e6,
        }
    }

    pub fn symbol_period(self) -> f64 {
        1.0 / self.symbol_rate()
    }

    pub fn preamble_bits(self) -> usize {
        match self {
            PhyMode::Le1M => 8,
            PhyMode::Le2M => 16,
        }
    }
}

impl std::fmt::Display for PhyMode {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(self.name())
    }
}

impl std::str::FromStr for PhyMode {
    type Err = crate::Error;

    fn from_str(s: &str) -> crate::Result<Self> {
        match s.to_ascii_uppercase().as_str() {
            "LE1M" => Ok(PhyMode::Le1M),
            "LE2M" => Ok(PhyMode::Le2M),
            other => Err(crate::Error::InvalidParameter(format!(
                "unknown PHY {other:?}"
            ))),
        }
    }
}
