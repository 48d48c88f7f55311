use serde::{Deserialize, Serialize};

use crate::attack::{apply_attack, AttackSpec};
use crate::btcs::CsSyncPacket;
use crate::error::{Error, Result};
use crate::sigproc::{
    add_awgn_with_reference, apply_filter, butterworth_bandpass, frequency_shift, resample,
    LinearFilter, Signal,
};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct BandpassConfig {
    /// Total filter order (even).
    #[serde(default = "default_order")]
    pub order: usize,
    /// Distance of each band edge from the IF, Hz.
    #[serde(default = "default_half_width")]
    pub half_width: f64,
}

fn default_order() -> usize {
    4
}

fn default_half_width() -> f64 {
    1.5e6
}

impl Default for BandpassConfig {
    fn default() -> Self {
        Self {
            order: default_order(),
            half_width: default_half_width(),
        }
    }
}

/// Transmit/receive model around the attacker.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct RfChainConfig {
    pub if_freq: f64,
    pub analog_rate: f64,
    /// `None` disables the IF bandpass.
    pub bandpass: Option<BandpassConfig>,
    pub adc_rate: f64,
    /// Zero symbols added on each side of the packet.
    pub pad_symbols: usize,
}

impl Default for RfChainConfig {
    fn default() -> Self {
        Self {
            if_freq: 4.77e6,
            analog_rate: 80e6,
            bandpass: Some(BandpassConfig::default()),
            adc_rate: 8e6,
            pad_symbols: 64,
        }
    }
}

impl RfChainConfig {
    pub fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(Error::Config(m));
        if !(self.adc_rate > 0.0 && self.adc_rate < self.analog_rate) {
            return bad(format!(
                "adc_rate {} must be positive and below analog_rate {}",
                self.adc_rate, self.analog_rate
            ));
        }
        let ratio = self.analog_rate / self.adc_rate;
        if (ratio - ratio.round()).abs() > 1e-9 {
            return bad(format!(
                "analog_rate / adc_rate = {ratio} is not an integer"
            ));
        }
        if !(self.if_freq >= 0.0 && self.if_freq < self.analog_rate / 2.0) {
            return bad(format!(
                "IF {} outside the analog Nyquist band",
                self.if_freq
            ));
        }
        if let Some(bp) = self.bandpass {
            let (lo, hi) = (self.if_freq - bp.half_width, self.if_freq + bp.half_width);
            if !(lo > 0.0 && hi < self.analog_rate / 2.0) {
                return bad(format!(
                    "bandpass [{lo}, {hi}] Hz outside the analog Nyquist band"
                ));
            }
        }
        Ok(())
    }

    pub fn bandpass_filter(&self) -> Result<Option<LinearFilter>> {
        self.bandpass
            .map(|bp| {
                butterworth_bandpass(
                    bp.order,
                    self.if_freq - bp.half_width,
                    self.if_freq + bp.half_width,
                    self.analog_rate,
                )
            })
            .transpose()
    }
}

/// Outputs of the two receive paths at the ADC rate.
#[derive(Debug, Clone)]
pub struct ChainOutput {
    pub attacked: Signal,
    pub ground_truth: Signal,
}

fn receive_path(s: &Signal, rf: &RfChainConfig, bandpass: Option<&LinearFilter>) -> Result<Signal> {
    let filtered = match bandpass {
        Some(h) => apply_filter(s, h)?,
        None => s.clone(),
    };
    resample(&frequency_shift(&filtered, -rf.if_freq)?, rf.adc_rate)
}

/// Runs a packet through both paths. Noise (if any) is injected at the
/// analog rate before the split, referenced to the packet's mean power, so
/// both paths see the same realization and differ only by the attack.
pub fn run_chain(
    packet: &CsSyncPacket,
    rf: &RfChainConfig,
    attack: &AttackSpec,
    snr_db: Option<f64>,
    seed: u64,
) -> Result<ChainOutput> {
    rf.validate()?;
    let x = &packet.waveform;
    if (x.rate() - rf.adc_rate).abs() > 1e-9 * rf.adc_rate {
        return Err(Error::Config(format!(
            "packet rate {} Hz differs from adc_rate {} Hz",
            x.rate(),
            rf.adc_rate
        )));
    }
    let pad = rf.pad_symbols * packet.oversampling;
    let up = resample(&x.padded(pad, pad), rf.analog_rate)?;
    let ratio = (rf.analog_rate / rf.adc_rate).round() as usize;
    let noisy = match snr_db {
        Some(snr) => {
            let extent = up.slice(pad * ratio, (pad + x.len()) * ratio)?;
            add_awgn_with_reference(&up, snr, seed, extent.mean_power())?
        }
        None => up,
    };
    let at_if = frequency_shift(&noisy, rf.if_freq)?;
    let bandpass = rf.bandpass_filter()?;
    let ground_truth = receive_path(&at_if, rf, bandpass.as_ref())?;
    let attacked = match attack {
        AttackSpec::None => ground_truth.clone(),
        other => receive_path(&apply_attack(&at_if, other)?, rf, bandpass.as_ref())?,
    };
    Ok(ChainOutput {
        attacked,
        ground_truth,
    })
}
