//! Signal files: raw little-endian interleaved `f64` pairs plus a JSON sidecar.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use num_complex::Complex64;
use serde::{Deserialize, Serialize};

use super::Signal;
use crate::error::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Sidecar {
    pub rate_hz: f64,
    pub t0_s: f64,
    pub n_samples: usize,
}

/// Sidecar path for a `.bin` signal file (`x.bin` -> `x.json`).
pub fn sidecar_path(bin: &Path) -> PathBuf {
    bin.with_extension("json")
}

pub fn write_signal(path: &Path, s: &Signal) -> Result<()> {
    let mut bytes = Vec::with_capacity(16 * s.len());
    for x in s.samples() {
        bytes.extend_from_slice(&x.re.to_le_bytes());
        bytes.extend_from_slice(&x.im.to_le_bytes());
    }
    fs::write(path, bytes).map_err(|e| Error::io(path, e))?;
    let meta = Sidecar {
        rate_hz: s.rate(),
        t0_s: s.t0(),
        n_samples: s.len(),
    };
    let side = sidecar_path(path);
    fs::write(&side, serde_json::to_string_pretty(&meta)?).map_err(|e| Error::io(&side, e))
}

pub fn read_signal(path: &Path) -> Result<Signal> {
    let side = sidecar_path(path);
    let text = fs::read_to_string(&side).map_err(|e| Error::io(&side, e))?;
    let meta: Sidecar = serde_json::from_str(&text)?;
    let bytes = fs::read(path).map_err(|e| Error::io(path, e))?;
    if bytes.len() != 16 * meta.n_samples {
        return Err(Error::InvalidSignal(format!(
            "{} holds {} bytes, sidecar declares {} samples",
            path.display(),
            bytes.len(),
            meta.n_samples
        )));
    }
    let samples = bytes
        .chunks_exact(16)
        .map(|c| {
            let re = f64::from_le_bytes(c[..8].try_into().unwrap());
            let im = f64::from_le_bytes(c[8..].try_into().unwrap());
            Complex64::new(re, im)
        })
        .collect();
    Signal::with_t0(samples, meta.rate_hz, meta.t0_s)
}

/// Debug dump with `index,re,im` rows.
pub fn write_csv(path: &Path, s: &Signal) -> Result<()> {
    let mut out = String::from("index,re,im\n");
    for (k, x) in s.samples().iter().enumerate() {
        out.push_str(&format!("{k},{:e},{:e}\n", x.re, x.im));
    }
    let mut f = fs::File::create(path).map_err(|e| Error::io(path, e))?;
    f.write_all(out.as_bytes()).map_err(|e| Error::io(path, e))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn binary_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.bin");
        let s = Signal::with_t0(
            vec![
                Complex64::new(1.5, -2.0),
                Complex64::new(f64::MIN_POSITIVE, 3.25),
            ],
            8e6,
            -1.25e-6,
        )
        .unwrap();
        write_signal(&path, &s).unwrap();
        assert_eq!(read_signal(&path).unwrap(), s);
        assert!(sidecar_path(&path).exists());
    }

    #[test]
    fn truncated_file_is_rejected() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.bin");
        let s = Signal::from_real(&[1.0, 2.0], 1.0).unwrap();
        write_signal(&path, &s).unwrap();
        fs::write(&path, [0u8; 8]).unwrap();
        assert!(read_signal(&path).is_err());
    }

    #[test]
    fn csv_has_header_and_rows() {
        let dir = tempfile::tempdir().unwrap();
        let path = dir.path().join("sig.csv");
        write_csv(&path, &Signal::from_real(&[1.0, 2.0], 1.0).unwrap()).unwrap();
        let text = fs::read_to_string(&path).unwrap();
        assert_eq!(text.lines().count(), 3);
        assert!(text.starts_with("index,re,im"));
    }
}
