use super::chain::RfChainConfig;
use super::experiment::{CheckSpec, ExperimentConfig, SnrSpec};
use crate::attack::{AttackSpec, MaskSpec, NgdFilterSpec};
use crate::btcs::{Payload, PhyMode};

/// NGD advance of the reference attack circuit, seconds.
pub const REFERENCE_NGD_DELTA_T: f64 = 62e-9;

pub const PRESET_NAMES: [&str; 8] = [
    "exp1",
    "exp2-random",
    "exp2-sounding",
    "exp2-le2m",
    "exp2-noisy",
    "exp3-legit",
    "exp3-ngd",
    "exp3-mask",
];

fn ngd(rf: &RfChainConfig) -> AttackSpec {
    AttackSpec::Ngd(NgdFilterSpec::new(REFERENCE_NGD_DELTA_T, rf.if_freq))
}

fn base(
    id: &str,
    n_packets: usize,
    phy: PhyMode,
    payload: Payload,
    attack: AttackSpec,
) -> ExperimentConfig {
    ExperimentConfig {
        id: id.to_string(),
        n_packets,
        phy,
        payload,
        attack,
        snr_db: None,
        master_seed: 20_240_601,
        rf: RfChainConfig::default(),
        check: None,
    }
}

/// Named experiment configurations.
pub fn preset(name: &str) -> Option<ExperimentConfig> {
    let rf = RfChainConfig::default();
    let random = Payload::Random { n_bits: 128 };
    let cfg = match name {
        "exp1" => base(name, 1, PhyMode::Le1M, random, ngd(&rf)),
        "exp2-random" => ExperimentConfig {
            check: Some(CheckSpec {
                mean_advance_m: Some([15.0, 22.0]),
                max_std_m: Some(0.25),
                min_valid_fraction: None,
            }),
            ..base(name, 100, PhyMode::Le1M, random, ngd(&rf))
        },
        "exp2-sounding" => base(name, 100, PhyMode::Le1M, Payload::sounding(), ngd(&rf)),
        "exp2-le2m" => base(name, 100, PhyMode::Le2M, random, ngd(&rf)),
        "exp2-noisy" => ExperimentConfig {
            snr_db: Some(SnrSpec::Fixed(10.0)),
            check: Some(CheckSpec {
                mean_advance_m: Some([15.0, 22.0]),
                max_std_m: Some(0.5),
                min_valid_fraction: None,
            }),
            ..base(name, 100, PhyMode::Le1M, random, ngd(&rf))
        },
        "exp3-legit" => ExperimentConfig {
            snr_db: Some(SnrSpec::Range([10.0, 30.0])),
            master_seed: 7,
            ..base(name, 100, PhyMode::Le1M, random, AttackSpec::None)
        },
        "exp3-ngd" => ExperimentConfig {
            master_seed: 8,
            ..base(name, 100, PhyMode::Le1M, random, ngd(&rf))
        },
        "exp3-mask" => ExperimentConfig {
            master_seed: 9,
            ..base(
                name,
                100,
                PhyMode::Le1M,
                random,
                AttackSpec::Mask(MaskSpec::truncation(
                    0.5,
                    0.0,
                    PhyMode::Le1M.symbol_period(),
                )),
            )
        },
        _ => return None,
    };
    Some(cfg)
}
