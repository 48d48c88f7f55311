use std::path::Path;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::chain::{run_chain, RfChainConfig};
use crate::attack::AttackSpec;
use crate::btcs::{CsSyncConfig, CsSyncPacket, Payload, PhyMode};
use crate::error::{Error, Result};
use crate::receiver::{process_packet, PacketRecord};
use crate::sigproc::Correlation;
use crate::{derive_seed, SPEED_OF_LIGHT};

const STREAM_PACKET: u64 = 10;
const STREAM_NOISE: u64 = 11;

/// Input SNR: one value for every packet, or a range spread evenly over packets.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum SnrSpec {
    Fixed(f64),
    Range([f64; 2]),
}

impl SnrSpec {
    /// SNR for packet `i` of `n`.
    pub fn for_packet(&self, i: usize, n: usize) -> f64 {
        match *self {
            SnrSpec::Fixed(v) => v,
            SnrSpec::Range([lo, hi]) => {
                if n <= 1 {
                    lo
                } else {
                    lo + (hi - lo) * i as f64 / (n - 1) as f64
                }
            }
        }
    }
}

/// Pass/fail thresholds evaluated by `experiment --check`.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CheckSpec {
    /// Bounds on the magnitude of the mean advance, metres.
    pub mean_advance_m: Option<[f64; 2]>,
    /// Upper bound on the advance standard deviation, metres.
    pub max_std_m: Option<f64>,
    /// Smallest acceptable fraction of packets passing the bit check.
    pub min_valid_fraction: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub id: String,
    pub n_packets: usize,
    pub phy: PhyMode,
    pub payload: Payload,
    #[serde(default = "no_attack")]
    pub attack: AttackSpec,
    #[serde(default)]
    pub snr_db: Option<SnrSpec>,
    pub master_seed: u64,
    #[serde(default)]
    pub rf: RfChainConfig,
    #[serde(default)]
    pub check: Option<CheckSpec>,
}

fn no_attack() -> AttackSpec {
    AttackSpec::None
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_packets == 0 {
            return Err(Error::Config("n_packets must be at least 1".into()));
        }
        if self.id.is_empty() {
            return Err(Error::Config("experiment id must not be empty".into()));
        }
        self.rf.validate()
    }

    pub fn from_toml(text: &str) -> Result<Self> {
        let cfg: Self = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::from_toml(&text)
    }

    pub fn to_toml(&self) -> Result<String> {
        toml::to_string(self).map_err(|e| Error::Serde(e.to_string()))
    }

    /// Packet configuration for packet `i`.
    pub fn packet_config(&self, i: usize) -> CsSyncConfig {
        let mut c = CsSyncConfig::new(
            self.phy,
            self.payload,
            derive_seed(self.master_seed, STREAM_PACKET, i as u64),
        );
        c.oversampling = Some((self.rf.adc_rate / self.phy.symbol_rate()).round() as usize);
        c
    }

    pub fn snr_for(&self, i: usize) -> Option<f64> {
        self.snr_db.map(|s| s.for_packet(i, self.n_packets))
    }
}

/// Location and spread of one quantity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Distribution {
    pub n: usize,
    pub min: f64,
    pub max: f64,
    pub mean: f64,
    /// Sample standard deviation (n - 1).
    pub std: f64,
}

impl Distribution {
    pub fn from_values(v: &[f64]) -> Option<Self> {
        if v.is_empty() {
            return None;
        }
        let n = v.len();
        let mean = v.iter().sum::<f64>() / n as f64;
        let var = if n > 1 {
            v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64
        } else {
            0.0
        };
        Some(Self {
            n,
            min: v.iter().cloned().fold(f64::INFINITY, f64::min),
            max: v.iter().cloned().fold(f64::NEG_INFINITY, f64::max),
            mean,
            std: var.sqrt(),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentSummary {
    pub id: String,
    pub n_packets: usize,
    pub n_bits_ok: usize,
    pub advance_ns: Option<Distribution>,
    pub advance_m: Option<Distribution>,
    pub ncc: Option<Distribution>,
    pub pmse: Option<Distribution>,
    pub dft: Option<Distribution>,
}

impl ExperimentSummary {
    pub fn from_records(id: &str, records: &[PacketRecord]) -> Self {
        let adv_m: Vec<f64> = records.iter().filter_map(|r| r.toa_advance_m).collect();
        let adv_ns: Vec<f64> = adv_m.iter().map(|m| m / SPEED_OF_LIGHT * 1e9).collect();
        let pick = |f: fn(&PacketRecord) -> Option<f64>| {
            Distribution::from_values(&records.iter().filter_map(f).collect::<Vec<_>>())
        };
        Self {
            id: id.to_string(),
            n_packets: records.len(),
            n_bits_ok: records.iter().filter(|r| r.bits_ok).count(),
            advance_ns: Distribution::from_values(&adv_ns),
            advance_m: Distribution::from_values(&adv_m),
            ncc: pick(|r| Some(r.ncc)),
            pmse: pick(|r| r.pmse),
            dft: pick(|r| Some(r.dft)),
        }
    }

    /// Failed checks, described; empty when everything holds.
    pub fn check(&self, spec: &CheckSpec) -> Vec<String> {
        let mut failures = Vec::new();
        if let Some([lo, hi]) = spec.mean_advance_m {
            match self.advance_m {
                Some(d) if (lo..=hi).contains(&d.mean.abs()) => {}
                Some(d) => failures.push(format!(
                    "|mean advance| {:.3} m outside [{lo}, {hi}]",
                    d.mean.abs()
                )),
                None => failures.push("no advance values".into()),
            }
        }
        if let Some(max) = spec.max_std_m {
            match self.advance_m {
                Some(d) if d.std < max => {}
                Some(d) => failures.push(format!("advance std {:.4} m not below {max}", d.std)),
                None => failures.push("no advance values".into()),
            }
        }
        if let Some(min) = spec.min_valid_fraction {
            let frac = self.n_bits_ok as f64 / self.n_packets.max(1) as f64;
            if frac < min {
                failures.push(format!("bit-check pass fraction {frac:.3} below {min}"));
            }
        }
        failures
    }
}

/// Correlation traces of both paths for one packet.
#[derive(Debug, Clone)]
pub struct ExemplarTrace {
    pub packet_id: u64,
    pub ground_truth: Correlation,
    pub attacked: Correlation,
}

#[derive(Debug, Clone)]
pub struct ExperimentResult {
    pub config: ExperimentConfig,
    pub records: Vec<PacketRecord>,
    pub summary: ExperimentSummary,
    pub exemplar: Option<ExemplarTrace>,
}

struct PacketOutcome {
    record: PacketRecord,
    traces: Option<(Correlation, Correlation)>,
}

fn run_packet(cfg: &ExperimentConfig, i: usize) -> Result<PacketOutcome> {
    let packet = CsSyncPacket::generate(&cfg.packet_config(i))?;
    let snr = cfg.snr_for(i);
    let out = run_chain(
        &packet,
        &cfg.rf,
        &cfg.attack,
        snr,
        derive_seed(cfg.master_seed, STREAM_NOISE, i as u64),
    )?;
    let gt = process_packet(&out.ground_truth, &packet.waveform, &packet.bits, cfg.phy)?;
    let at = process_packet(&out.attacked, &packet.waveform, &packet.bits, cfg.phy)?;
    let advance_s = at.toa.toa_seconds - gt.toa.toa_seconds;
    let record = PacketRecord {
        packet_id: i as u64,
        config: serde_json::json!({
            "experiment": cfg.id,
            "phy": cfg.phy,
            "payload": cfg.payload,
            "attack": cfg.attack.name(),
            "snr_db": snr,
            "access_address": format!("{:08x}", packet.access_address),
        }),
        toa_s: at.toa.toa_seconds,
        toa_advance_m: Some(advance_s * SPEED_OF_LIGHT),
        ncc: at.nadm.ncc,
        pmse: at.nadm.pmse,
        dft: at.nadm.dft,
        bits_ok: at.toa.valid,
    };
    Ok(PacketOutcome {
        record,
        traces: (i == 0).then_some((gt.correlation, at.correlation)),
    })
}

/// Runs every packet (in parallel) and summarises; records are sorted by id.
pub fn run_experiment(cfg: &ExperimentConfig) -> Result<ExperimentResult> {
    cfg.validate()?;
    let mut outcomes = (0..cfg.n_packets)
        .into_par_iter()
        .map(|i| run_packet(cfg, i))
        .collect::<Result<Vec<_>>>()?;
    outcomes.sort_by_key(|o| o.record.packet_id);
    let exemplar = outcomes.first_mut().and_then(|o| {
        o.traces.take().map(|(g, a)| ExemplarTrace {
            packet_id: o.record.packet_id,
            ground_truth: g,
            attacked: a,
        })
    });
    let records: Vec<PacketRecord> = outcomes.into_iter().map(|o| o.record).collect();
    Ok(ExperimentResult {
        summary: ExperimentSummary::from_records(&cfg.id, &records),
        config: cfg.clone(),
        records,
        exemplar,
    })
}
