use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use super::experiment::ExperimentResult;
use crate::error::{Error, Result};
use crate::SPEED_OF_LIGHT;

pub const HISTOGRAM_BINS: usize = 20;
/// Half-width of the exported correlation trace, in symbols.
const TRACE_SYMBOLS: f64 = 3.0;

fn write(path: &Path, text: &str) -> Result<PathBuf> {
    fs::write(path, text).map_err(|e| Error::io(path, e))?;
    Ok(path.to_path_buf())
}

fn ensure_dir(dir: &Path) -> Result<()> {
    fs::create_dir_all(dir).map_err(|e| Error::io(dir, e))
}

/// Writes `records.jsonl`, `summary.json` and `config.toml` into `dir`.
pub fn write_results(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    ensure_dir(dir)?;
    let mut lines = String::new();
    for r in &result.records {
        lines.push_str(&serde_json::to_string(r)?);
        lines.push('\n');
    }
    let mut files = vec![write(&dir.join("records.jsonl"), &lines)?];
    files.push(write(
        &dir.join("summary.json"),
        &serde_json::to_string_pretty(&result.summary)?,
    )?);
    files.push(write(&dir.join("config.toml"), &result.config.to_toml()?)?);
    Ok(files)
}

/// Plot-ready CSVs: advance histogram, per-packet metrics, and the exemplar
/// correlation traces.
pub fn emit_plots(result: &ExperimentResult, dir: &Path) -> Result<Vec<PathBuf>> {
    if result.records.is_empty() {
        return Err(Error::EmptyResult);
    }
    ensure_dir(dir)?;
    let mut files = Vec::new();

    let adv_ns: Vec<f64> = result
        .records
        .iter()
        .filter_map(|r| r.toa_advance_m)
        .map(|m| m / SPEED_OF_LIGHT * 1e9)
        .collect();
    let mut hist = String::from("bin_lo_ns,bin_hi_ns,count\n");
    if !adv_ns.is_empty() {
        let lo = adv_ns.iter().cloned().fold(f64::INFINITY, f64::min);
        let hi = adv_ns.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
        let width = if hi > lo {
            (hi - lo) / HISTOGRAM_BINS as f64
        } else {
            1e-3
        };
        let mut counts = [0usize; HISTOGRAM_BINS];
        for v in &adv_ns {
            let b = (((v - lo) / width) as usize).min(HISTOGRAM_BINS - 1);
            counts[b] += 1;
        }
        for (b, c) in counts.iter().enumerate() {
            let a = lo + b as f64 * width;
            let _ = writeln!(hist, "{:.6},{:.6},{c}", a, a + width);
        }
    }
    files.push(write(&dir.join("advance_histogram.csv"), &hist)?);

    let mut scatter = String::from("packet_id,snr_db,advance_ns,ncc,pmse,dft,bits_ok\n");
    for r in &result.records {
        let snr = r.config.get("snr_db").and_then(|v| v.as_f64());
        let _ = writeln!(
            scatter,
            "{},{},{},{:.12e},{},{:.12e},{}",
            r.packet_id,
            snr.map_or(String::new(), |v| format!("{v:.4}")),
            r.toa_advance_m.map_or(String::new(), |m| format!(
                "{:.6}",
                m / SPEED_OF_LIGHT * 1e9
            )),
            r.ncc,
            r.pmse.map_or(String::new(), |v| format!("{v:.12e}")),
            r.dft,
            u8::from(r.bits_ok)
        );
    }
    files.push(write(&dir.join("metrics.csv"), &scatter)?);

    if let Some(ex) = &result.exemplar {
        let gt = &ex.ground_truth;
        let at = &ex.attacked;
        let peak = gt.peak_index();
        let norm = gt.values[peak].norm();
        let span = (TRACE_SYMBOLS * result.config.phy.symbol_period() / gt.dt).round() as usize;
        let mut trace = String::from("lag_ns,ground_truth,attacked\n");
        for i in peak.saturating_sub(span)..(peak + span + 1).min(gt.len()).min(at.len()) {
            let _ = writeln!(
                trace,
                "{:.4},{:.9},{:.9}",
                gt.lag_seconds(i) * 1e9,
                gt.values[i].norm() / norm,
                at.values[i].norm() / norm
            );
        }
        files.push(write(&dir.join("correlation_trace.csv"), &trace)?);
    }
    Ok(files)
}
