use std::io::{Read, Write};
use std::path::Path;

use thiserror::Error;

use super::CtcError;
use crate::logmath::log_sum_exp_f32;

/// `CTCE`
pub const CTCE_MAGIC: [u8; 4] = *b"CTCE";
pub const CTCE_VERSION: u16 = 1;
const HEADER_LEN: usize = 4 + 2 + 4 + 4;

/// Tolerance on row normalization and on positive log-probabilities.
pub const ROW_TOLERANCE: f64 = 1e-4;

/// T×V natural-log label posteriors, row-major.
#[derive(Debug, Clone, PartialEq)]
pub struct EmissionMatrix {
    frames: usize,
    labels: usize,
    values: Vec<f32>,
    /// Seconds per frame; not stored in CTCE files.
    pub frame_duration: f32,
}

impl EmissionMatrix {
    pub fn new(frames: usize, labels: usize, values: Vec<f32>) -> Result<Self, CtcError> {
        let invalid = |msg: String| Err(CtcError::InvalidEmissions(msg));
        if frames == 0 || labels == 0 {
            return invalid(format!("empty matrix ({frames}×{labels})"));
        }
        if values.len() != frames * labels {
            return invalid(format!("{} values for a {frames}×{labels} matrix", values.len()));
        }
        for (t, row) in values.chunks_exact(labels).enumerate() {
            if let Some(v) = row.iter().find(|v| v.is_nan() || **v as f64 > ROW_TOLERANCE) {
                return invalid(format!("frame {t}: value {v} is not a log-probability"));
            }
            let norm = log_sum_exp_f32(row);
            if norm.is_nan() || norm.abs() > ROW_TOLERANCE {
                return invalid(format!("frame {t}: row log-sum-exp is {norm}"));
            }
        }
        Ok(EmissionMatrix { frames, labels, values, frame_duration: 0.02 })
    }

    pub fn from_rows<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, CtcError> {
        let labels = rows.first().map_or(0, |r| r.as_ref().len());
        if let Some(r) = rows.iter().find(|r| r.as_ref().len() != labels) {
            return Err(CtcError::InvalidEmissions(format!(
                "ragged rows: {} vs {labels} labels",
                r.as_ref().len()
            )));
        }
        let values = rows.iter().flat_map(|r| r.as_ref().iter().map(|&v| v as f32)).collect();
        Self::new(rows.len(), labels, values)
    }

    /// Rows given as probabilities rather than log-probabilities.
    pub fn from_probabilities<R: AsRef<[f64]>>(rows: &[R]) -> Result<Self, CtcError> {
        let logs: Vec<Vec<f64>> = rows.iter().map(|r| r.as_ref().iter().map(|p| p.ln()).collect()).collect();
        Self::from_rows(&logs)
    }

    pub fn frames(&self) -> usize {
        self.frames
    }

    pub fn labels(&self) -> usize {
        self.labels
    }

    pub fn row(&self, t: usize) -> &[f32] {
        &self.values[t * self.labels..(t + 1) * self.labels]
    }

    pub fn rows(&self) -> impl Iterator<Item = &[f32]> {
        self.values.chunks_exact(self.labels)
    }

    pub fn values(&self) -> &[f32] {
        &self.values
    }

    pub fn duration_s(&self) -> f64 {
        self.frames as f64 * self.frame_duration as f64
    }

    pub fn to_ctce_bytes(&self) -> Vec<u8> {
        let mut out = Vec::with_capacity(HEADER_LEN + 4 * self.values.len());
        out.extend_from_slice(&CTCE_MAGIC);
        out.extend_from_slice(&CTCE_VERSION.to_le_bytes());
        out.extend_from_slice(&(self.frames as u32).to_le_bytes());
        out.extend_from_slice(&(self.labels as u32).to_le_bytes());
        for v in &self.values {
            out.extend_from_slice(&v.to_le_bytes());
        }
        out
    }

    pub fn from_ctce_bytes(bytes: &[u8]) -> Result<Self, CtceError> {
        if bytes.len() < 4 || bytes[..4] != CTCE_MAGIC {
            return Err(CtceError::BadMagic);
        }
        if bytes.len() < HEADER_LEN {
            return Err(CtceError::Truncated { expected: HEADER_LEN, found: bytes.len() });
        }
        let version = u16::from_le_bytes([bytes[4], bytes[5]]);
        if version != CTCE_VERSION {
            return Err(CtceError::UnsupportedVersion(version));
        }
        let frames = u32::from_le_bytes(bytes[6..10].try_into().unwrap()) as usize;
        let labels = u32::from_le_bytes(bytes[10..14].try_into().unwrap()) as usize;
        let expected = frames
            .checked_mul(labels)
            .and_then(|n| n.checked_mul(4))
            .and_then(|n| n.checked_add(HEADER_LEN))
            .ok_or(CtceError::Truncated { expected: usize::MAX, found: bytes.len() })?;
        if bytes.len() < expected {
            return Err(CtceError::Truncated { expected, found: bytes.len() });
        }
        if bytes.len() > expected {
            return Err(CtceError::TrailingBytes(bytes.len() - expected));
        }
        let values =
            bytes[HEADER_LEN..].chunks_exact(4).map(|c| f32::from_le_bytes(c.try_into().unwrap())).collect();
        Ok(EmissionMatrix::new(frames, labels, values)?)
    }
}

#[derive(Debug, Error, PartialEq)]
pub enum CtceError {
    #[error("not a CTCE file (bad magic)")]
    BadMagic,
    #[error("unsupported CTCE version {0}")]
    UnsupportedVersion(u16),
    #[error("truncated CTCE file: expected {expected} bytes, found {found}")]
    Truncated { expected: usize, found: usize },
    #[error("{0} unexpected bytes after the CTCE payload")]
    TrailingBytes(usize),
    #[error(transparent)]
    Invalid(#[from] CtcError),
    #[error("io: {0}")]
    Io(String),
}

pub fn read_ctce(path: impl AsRef<Path>) -> Result<EmissionMatrix, CtceError> {
    let mut bytes = Vec::new();
    std::fs::File::open(path)
        .and_then(|mut f| f.read_to_end(&mut bytes))
        .map_err(|e| CtceError::Io(e.to_string()))?;
    EmissionMatrix::from_ctce_bytes(&bytes)
}

pub fn write_ctce(path: impl AsRef<Path>, emissions: &EmissionMatrix) -> Result<(), CtceError> {
    std::fs::File::create(path)
        .and_then(|mut f| f.write_all(&emissions.to_ctce_bytes()))
        .map_err(|e| CtceError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> EmissionMatrix {
        EmissionMatrix::from_probabilities(&[[0.5, 0.25, 0.25], [0.1, 0.1, 0.8]]).unwrap()
    }

    #[test]
    fn header_layout() {
        let bytes = sample().to_ctce_bytes();
        assert_eq!(&bytes[..4], &[0x43, 0x54, 0x43, 0x45]);
        assert_eq!(&bytes[4..6], &[1, 0]);
        assert_eq!(&bytes[6..10], &[2, 0, 0, 0]);
        assert_eq!(&bytes[10..14], &[3, 0, 0, 0]);
        assert_eq!(bytes.len(), 14 + 2 * 3 * 4);
        assert_eq!(&bytes[14..18], &0.5f32.ln().to_le_bytes());
    }

    #[test]
    fn roundtrip() {
        let m = sample();
        assert_eq!(EmissionMatrix::from_ctce_bytes(&m.to_ctce_bytes()).unwrap(), m);
    }

    #[test]
    fn rejects_unnormalized_rows() {
        assert!(matches!(
            EmissionMatrix::from_probabilities(&[[0.5, 0.6]]),
            Err(CtcError::InvalidEmissions(_))
        ));
        assert!(matches!(EmissionMatrix::new(1, 2, vec![0.5, -10.0]), Err(CtcError::InvalidEmissions(_))));
        assert!(EmissionMatrix::new(0, 2, vec![]).is_err());
    }
}
