use rand::seq::index::sample;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use super::{gfsk_modulate, PhyMode};
use crate::derive_seed;
use crate::error::{Error, Result};
use crate::sigproc::Signal;

pub const MAX_RANDOM_BITS: usize = 128;
pub const DEFAULT_SOUNDING_BITS: usize = 96;
pub const DEFAULT_MARKERS: usize = 2;
const MAX_AA_RUN: usize = 6;
const TRAILER_BITS: usize = 4;
const MARKER_LEN: usize = 4;

const STREAM_ACCESS_ADDRESS: u64 = 0;
const STREAM_PAYLOAD: u64 = 1;
const STREAM_MARKERS: u64 = 2;

/// Optional sequence carried after the trailer.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Payload {
    None,
    Random {
        n_bits: usize,
    },
    Sounding {
        #[serde(default = "default_sounding_bits")]
        n_bits: usize,
        #[serde(default = "default_markers")]
        n_markers: usize,
    },
}

fn default_sounding_bits() -> usize {
    DEFAULT_SOUNDING_BITS
}

fn default_markers() -> usize {
    DEFAULT_MARKERS
}

impl Payload {
    pub fn name(&self) -> &'static str {
        match self {
            Payload::None => "none",
            Payload::Random { .. } => "random",
            Payload::Sounding { .. } => "sounding",
        }
    }

    pub fn n_bits(&self) -> usize {
        match *self {
            Payload::None => 0,
            Payload::Random { n_bits } | Payload::Sounding { n_bits, .. } => n_bits,
        }
    }

    pub fn sounding() -> Self {
        Payload::Sounding {
            n_bits: DEFAULT_SOUNDING_BITS,
            n_markers: DEFAULT_MARKERS,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CsSyncConfig {
    pub phy: PhyMode,
    /// Drawn from `seed` when absent.
    #[serde(default)]
    pub access_address: Option<u32>,
    pub payload: Payload,
    pub seed: u64,
    /// Samples per symbol; defaults to 8 MSa/s worth.
    #[serde(default)]
    pub oversampling: Option<usize>,
}

impl CsSyncConfig {
    pub fn new(phy: PhyMode, payload: Payload, seed: u64) -> Self {
        Self {
            phy,
            access_address: None,
            payload,
            seed,
            oversampling: None,
        }
    }

    pub fn oversampling(&self) -> usize {
        self.oversampling
            .unwrap_or((8e6 / self.phy.symbol_rate()).round() as usize)
    }

    /// The configured access address, or the seeded draw.
    pub fn resolved_access_address(&self) -> Result<u32> {
        match self.access_address {
            Some(aa) => {
                if longest_run(&aa_bits(aa)) > MAX_AA_RUN {
                    return Err(Error::InvalidPacket(format!(
                        "access address {aa:#010x} has a run longer than {MAX_AA_RUN} bits"
                    )));
                }
                Ok(aa)
            }
            None => {
                let mut rng =
                    ChaCha8Rng::seed_from_u64(derive_seed(self.seed, STREAM_ACCESS_ADDRESS, 0));
                loop {
                    let aa = rng.next_u32();
                    if longest_run(&aa_bits(aa)) <= MAX_AA_RUN {
                        return Ok(aa);
                    }
                }
            }
        }
    }
}

fn aa_bits(aa: u32) -> Vec<u8> {
    (0..32).map(|i| ((aa >> i) & 1) as u8).collect()
}

fn alternating(first: u8, n: usize) -> impl Iterator<Item = u8> {
    (0..n).map(move |i| first ^ (i % 2) as u8)
}

/// Length of the longest run of identical bits.
pub fn longest_run(bits: &[u8]) -> usize {
    let mut best = 0;
    let mut run = 0;
    for (i, b) in bits.iter().enumerate() {
        run = if i > 0 && bits[i - 1] == *b {
            run + 1
        } else {
            1
        };
        best = best.max(run);
    }
    best
}

/// A sounding sequence and the start index of each marker block.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SoundingSequence {
    pub bits: Vec<u8>,
    pub marker_positions: Vec<usize>,
}

/// `1010...` with `n_markers` non-overlapping `0110`/`1001` blocks at
/// uniformly drawn positions.
pub fn sounding_sequence(n_bits: usize, n_markers: usize, seed: u64) -> Result<SoundingSequence> {
    if n_bits < 16 {
        return Err(Error::InvalidPacket(format!(
            "sounding sequence needs >= 16 bits, got {n_bits}"
        )));
    }
    if n_markers * MARKER_LEN > n_bits {
        return Err(Error::InvalidPacket(format!(
            "{n_markers} markers do not fit in {n_bits} bits"
        )));
    }
    let mut bits: Vec<u8> = alternating(1, n_bits).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    // k distinct slots in [0, n - 3k) spread by 3 per preceding marker
    let free = n_bits - (MARKER_LEN - 1) * n_markers;
    let mut slots = sample(&mut rng, free, n_markers).into_vec();
    slots.sort_unstable();
    let positions: Vec<usize> = slots
        .iter()
        .enumerate()
        .map(|(i, v)| v + (MARKER_LEN - 1) * i)
        .collect();
    for &p in &positions {
        let block: [u8; 4] = if rng.random::<bool>() {
            [0, 1, 1, 0]
        } else {
            [1, 0, 0, 1]
        };
        bits[p..p + MARKER_LEN].copy_from_slice(&block);
    }
    Ok(SoundingSequence {
        bits,
        marker_positions: positions,
    })
}

/// On-air bits: preamble, access address (LSB first), trailer, optional sequence.
pub fn build_cs_sync(config: &CsSyncConfig) -> Result<Vec<u8>> {
    Ok(assemble(config)?.0)
}

fn assemble(config: &CsSyncConfig) -> Result<(Vec<u8>, Vec<usize>)> {
    let aa = aa_bits(config.resolved_access_address()?);
    let mut bits: Vec<u8> = alternating(1 - aa[0], config.phy.preamble_bits()).collect();
    bits.extend_from_slice(&aa);
    bits.extend(alternating(1 - aa[31], TRAILER_BITS));
    let mut markers = Vec::new();
    match config.payload {
        Payload::None => {}
        Payload::Random { n_bits } => {
            if n_bits == 0 || n_bits > MAX_RANDOM_BITS {
                return Err(Error::InvalidPacket(format!(
                    "random sequence must hold 1..={MAX_RANDOM_BITS} bits, got {n_bits}"
                )));
            }
            let mut rng = ChaCha8Rng::seed_from_u64(derive_seed(config.seed, STREAM_PAYLOAD, 0));
            bits.extend((0..n_bits).map(|_| rng.random::<bool>() as u8));
        }
        Payload::Sounding { n_bits, n_markers } => {
            let seq = sounding_sequence(
                n_bits,
                n_markers,
                derive_seed(config.seed, STREAM_MARKERS, 0),
            )?;
            let start = bits.len();
            markers = seq.marker_positions.iter().map(|p| p + start).collect();
            bits.extend(seq.bits);
        }
    }
    Ok((bits, markers))
}

/// A modulated CS SYNC packet.
#[derive(Debug, Clone)]
pub struct CsSyncPacket {
    pub bits: Vec<u8>,
    pub config: CsSyncConfig,
    pub access_address: u32,
    pub waveform: Signal,
    pub oversampling: usize,
    /// Marker start indices within `bits` (sounding payloads only).
    pub marker_positions: Vec<usize>,
}

impl CsSyncPacket {
    pub fn generate(config: &CsSyncConfig) -> Result<Self> {
        let (bits, marker_positions) = assemble(config)?;
        let oversampling = config.oversampling();
        let waveform = gfsk_modulate(&bits, config.phy, oversampling)?;
        Ok(Self {
            bits,
            config: config.clone(),
            access_address: config.resolved_access_address()?,
            waveform,
            oversampling,
            marker_positions,
        })
    }

    pub fn rate(&self) -> f64 {
        self.waveform.rate()
    }

    pub fn descriptor(&self) -> PacketDescriptor {
        PacketDescriptor {
            phy: self.config.phy,
            access_address_hex: format!("{:08x}", self.access_address),
            payload_kind: self.config.payload.name().to_string(),
            n_bits: self.bits.len(),
            seed: self.config.seed,
            oversampling: self.oversampling,
        }
    }
}

/// JSON description written next to exported packets.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PacketDescriptor {
    pub phy: PhyMode,
    pub access_address_hex: String,
    pub payload_kind: String,
    pub n_bits: usize,
    pub seed: u64,
    pub oversampling: usize,
}

pub fn bits_to_text(bits: &[u8]) -> String {
    bits.iter()
        .map(|b| if *b == 1 { '1' } else { '0' })
        .collect()
}

pub fn bits_from_text(text: &str) -> Result<Vec<u8>> {
    text.chars()
        .filter(|c| !c.is_whitespace())
        .map(|c| match c {
            '0' => Ok(0),
            '1' => Ok(1),
            other => Err(Error::InvalidPacket(format!(
                "unexpected character {other:?} in bit text"
            ))),
        })
        .collect()
}
