//! CTC decoding of frame-level emission lattices.

mod beam;
mod collapse;
mod emissions;
mod greedy;
mod oracle;

use thiserror::Error;

use crate::alphabet::AlphabetError;
use crate::logmath::LN_10;

pub use beam::{beam_search_decode, BeamSearchDecoder};
pub use collapse::{collapse, collapse_with_frames};
pub use emissions::{read_ctce, write_ctce, CtceError, EmissionMatrix, CTCE_MAGIC, CTCE_VERSION};
pub use greedy::greedy_decode;
pub use oracle::{oracle_decode, oracle_decode_all, ORACLE_MAX_PATHS};

#[derive(Debug, Error, PartialEq)]
pub enum CtcError {
    #[error("emission matrix has {found} labels, label set has {expected}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid beam configuration: {0}")]
    InvalidConfig(String),
    #[error("invalid emission matrix: {0}")]
    InvalidEmissions(String),
    #[error("{paths} paths exceed the exhaustive decoding limit of {limit}")]
    InstanceTooLarge { paths: f64, limit: u64 },
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BeamConfig {
    pub beam_width: usize,
    /// Weight α on the LM log-probability.
    pub lm_weight: f64,
    /// Bonus β added per completed word (natural log).
    pub word_bonus: f64,
    /// Labels below this per-frame log-probability are not expanded (the
    /// frame's best label always is). Use `f64::NEG_INFINITY` to disable.
    pub token_min_logp: f64,
    pub n_best: usize,
}

impl Default for BeamConfig {
    fn default() -> Self {
        BeamConfig { beam_width: 100, lm_weight: 0.5, word_bonus: 1.5, token_min_logp: -5.0, n_best: 1 }
    }
}

impl BeamConfig {
    /// Pure acoustic search: no fusion weights, no label pruning.
    pub fn acoustic_only(beam_width: usize) -> Self {
        BeamConfig {
            beam_width,
            lm_weight: 0.0,
            word_bonus: 0.0,
            token_min_logp: f64::NEG_INFINITY,
            n_best: 1,
        }
    }

    pub fn validate(&self) -> Result<(), CtcError> {
        let bad = |msg: String| Err(CtcError::InvalidConfig(msg));
        if self.beam_width < 1 {
            return bad("beam_width must be at least 1".into());
        }
        if self.n_best < 1 {
            return bad("n_best must be at least 1".into());
        }
        if self.n_best > self.beam_width {
            return bad(format!("n_best ({}) exceeds beam_width ({})", self.n_best, self.beam_width));
        }
        if !(self.lm_weight >= 0.0 && self.lm_weight.is_finite()) {
            return bad(format!("lm_weight must be finite and ≥ 0, got {}", self.lm_weight));
        }
        if !self.word_bonus.is_finite() {
            return bad("word_bonus must be finite".into());
        }
        if self.token_min_logp.is_nan() {
            return bad("token_min_logp is NaN".into());
        }
        Ok(())
    }

    /// Fused score in natural log:
    /// `acoustic + α · ln(10) · lm_log10 + β · words`.
    pub fn combined_score(&self, acoustic_logp: f64, lm_log10p: f64, words: usize) -> f64 {
        acoustic_logp + self.lm_weight * LN_10 * lm_log10p + self.word_bonus * words as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DecodeResult {
    pub transcript: String,
    /// Natural-log acoustic probability (summed over paths for beam search).
    pub acoustic_logp: f64,
    /// log10 LM probability of the words and the sentence end; 0 without an LM.
    pub lm_log10p: f64,
    pub combined_score: f64,
    /// Frame index at which each grapheme of the transcript was first emitted.
    pub token_frames: Vec<usize>,
}

impl DecodeResult {
    pub fn word_count(&self) -> usize {
        self.transcript.split_whitespace().count()
    }
}

/// Ranking used everywhere: score descending, then transcript ascending.
pub(crate) fn rank(a: &DecodeResult, b: &DecodeResult) -> std::cmp::Ordering {
    b.combined_score.total_cmp(&a.combined_score).then_with(|| a.transcript.cmp(&b.transcript))
}
