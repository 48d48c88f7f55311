//! Attacker-side transforms and first-order advance analysis.

mod analysis;
mod mask;
mod ngd;

pub(crate) use analysis::inner_dt;
pub use analysis::{
    autocorrelation_curvature, p_tilde_slope, perturbation_projection, phase_offset_sweep,
    predict_advance, signal_derivative,
};
pub use mask::{apply_mask, build_mask, gaussian_pulse_derivative, MaskKind, MaskSpec};
pub use ngd::{apply_ngd, ngd_filter, ngd_response, NgdFilterSpec, NgdRealization};

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::sigproc::Signal;

/// Attack configuration as stored in experiment files.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum AttackSpec {
    None,
    Mask(MaskSpec),
    Ngd(NgdFilterSpec),
}

impl AttackSpec {
    /// Reads an attack file; `.toml` files are parsed as TOML, anything else as JSON.
    pub fn load(path: &Path) -> Result<Self> {
        let text = fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        let spec: Self = if path.extension().is_some_and(|e| e == "toml") {
            toml::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        } else {
            serde_json::from_str(&text).map_err(|e| Error::Config(e.to_string()))?
        };
        match &spec {
            AttackSpec::None => {}
            AttackSpec::Mask(m) => m.validate()?,
            AttackSpec::Ngd(n) => n.validate()?,
        }
        Ok(spec)
    }

    pub fn name(&self) -> &'static str {
        match self {
            AttackSpec::None => "none",
            AttackSpec::Mask(_) => "mask",
            AttackSpec::Ngd(_) => "ngd",
        }
    }
}

pub fn apply_attack(s: &Signal, attack: &AttackSpec) -> Result<Signal> {
    match attack {
        AttackSpec::None => Ok(s.clone()),
        AttackSpec::Mask(m) => apply_mask(s, m),
        AttackSpec::Ngd(n) => apply_ngd(s, n),
    }
}

/// SHA-256 over rate, time origin and samples (little-endian `f64`).
pub fn signal_hash(s: &Signal) -> String {
    let mut h = Sha256::new();
    h.update(s.rate().to_le_bytes());
    h.update(s.t0().to_le_bytes());
    for x in s.samples() {
        h.update(x.re.to_le_bytes());
        h.update(x.im.to_le_bytes());
    }
    hex::encode(h.finalize())
}

/// Provenance of one applied transform.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AttackRecord {
    pub input_hash: String,
    pub output_hash: String,
    pub parameters: AttackSpec,
}

/// Applies `attack` and records input/output hashes.
pub fn apply_attack_logged(s: &Signal, attack: &AttackSpec) -> Result<(Signal, AttackRecord)> {
    let out = apply_attack(s, attack)?;
    let record = AttackRecord {
        input_hash: signal_hash(s),
        output_hash: signal_hash(&out),
        parameters: attack.clone(),
    };
    Ok((out, record))
}
