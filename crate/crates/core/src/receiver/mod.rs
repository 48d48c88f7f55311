//! Differential-correlation ToA receiver and detection metrics.

mod metrics;
mod toa;

pub use metrics::{
    align_template, nadm_dft, nadm_ncc, nadm_pmse, nadm_report, AlignedTemplate, NadmReport,
};
pub use toa::{
    check_bits, differential_xcorr, estimate_toa, parabolic_offset, symbol_lag, ToaEstimate,
};

use serde::{Deserialize, Serialize};

use crate::btcs::PhyMode;
use crate::error::Result;
use crate::sigproc::{Correlation, Signal};

/// Receiver outcome for one packet.
#[derive(Debug, Clone)]
pub struct Reception {
    pub toa: ToaEstimate,
    pub nadm: NadmReport,
    pub correlation: Correlation,
}

/// Correlate, refine, check bits and compute metrics.
pub fn process_packet(
    received: &Signal,
    template: &Signal,
    expected_bits: &[u8],
    phy: PhyMode,
) -> Result<Reception> {
    let correlation = differential_xcorr(received, template, phy.symbol_period())?;
    let mut toa = estimate_toa(&correlation)?;
    toa.valid = check_bits(received, expected_bits, phy, &toa);
    let nadm = nadm_report(received, template, &toa, phy.symbol_rate())?;
    Ok(Reception {
        toa,
        nadm,
        correlation,
    })
}

/// One line of a per-packet results file.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PacketRecord {
    pub packet_id: u64,
    pub config: serde_json::Value,
    pub toa_s: f64,
    /// Distance change implied by `toa(attacked) - toa(ground truth)`; negative is closer.
    pub toa_advance_m: Option<f64>,
    pub ncc: f64,
    pub pmse: Option<f64>,
    pub dft: f64,
    pub bits_ok: bool,
}
