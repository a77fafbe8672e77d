use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};
use thiserror::Error;

use crate::alphabet::{Alphabet, AlphabetError, Labels};
use crate::ctc::EmissionMatrix;
use crate::logmath::log_softmax;

/// Log-odds of the intended label over each competitor before noise.
const SHARPNESS: f64 = 8.0;

#[derive(Debug, Error, PartialEq)]
pub enum SynthesisError {
    #[error(transparent)]
    Alphabet(#[from] AlphabetError),
    #[error("invalid synthesis config: {0}")]
    InvalidConfig(String),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SynthesisConfig {
    pub frames_per_grapheme: usize,
    /// Probability of blank on grapheme frames.
    pub blank_prob: f64,
    /// Scale of the label noise. 0 is the noiseless limit.
    pub confusion_temp: f64,
    pub rng_seed: u64,
    /// Insert one blank-dominant frame after every grapheme. Repeated
    /// graphemes are always separated by one regardless.
    pub interleave_blanks: bool,
}

impl Default for SynthesisConfig {
    fn default() -> Self {
        SynthesisConfig {
            frames_per_grapheme: 2,
            blank_prob: 0.1,
            confusion_temp: 0.0,
            rng_seed: 0,
            interleave_blanks: true,
        }
    }
}

impl SynthesisConfig {
    pub fn validate(&self) -> Result<(), SynthesisError> {
        let bad = |m: String| Err(SynthesisError::InvalidConfig(m));
        if self.frames_per_grapheme == 0 {
            return bad("frames_per_grapheme must be at least 1".into());
        }
        if !(0.0..1.0).contains(&self.blank_prob) {
            return bad(format!("blank_prob must be in [0, 1), got {}", self.blank_prob));
        }
        if !(self.confusion_temp >= 0.0 && self.confusion_temp.is_finite()) {
            return bad(format!("confusion_temp must be ≥ 0, got {}", self.confusion_temp));
        }
        Ok(())
    }
}

/// Per-utterance seed derived from a corpus seed.
pub fn utterance_seed(seed: u64, index: usize) -> u64 {
    seed ^ (index as u64 + 1).wrapping_mul(0x9E37_79B9_7F4A_7C15)
}

/// Build an emission matrix that spells `reference`.
///
/// Each grapheme occupies `frames_per_grapheme` frames. On those frames the
/// blank gets `blank_prob`; the rest is a softmax over the other labels with
/// logits `SHARPNESS · (1[c = target] + confusion_temp · z_c)`, `z_c` standard
/// normal and drawn once per grapheme, so a confusion persists across the
/// grapheme's frames. Blank frames use the same construction with the blank
/// as target. With `confusion_temp = 0` and `blank_prob < 0.49` every
/// frame's argmax is its target label, so greedy decoding recovers the
/// reference.
pub fn synth_emissions(
    reference: &str,
    alphabet: &Alphabet,
    config: &SynthesisConfig,
) -> Result<EmissionMatrix, SynthesisError> {
    config.validate()?;
    let tokens = alphabet.tokenize(reference)?;
    let v = alphabet.len();
    let blank = alphabet.blank();
    let mut rng = ChaCha8Rng::seed_from_u64(config.rng_seed);
    let mut values: Vec<f32> = Vec::new();

    let push_blank_frame = |values: &mut Vec<f32>, rng: &mut ChaCha8Rng| {
        let row = log_softmax(&noisy_logits(v, blank, None, config.confusion_temp, rng));
        values.extend(row.iter().map(|&x| x as f32));
    };

    for (i, &label) in tokens.iter().enumerate() {
        if i > 0 && tokens[i - 1] == label && !config.interleave_blanks {
            push_blank_frame(&mut values, &mut rng);
        }
        let rest = log_softmax(&noisy_logits(v, label, Some(blank), config.confusion_temp, &mut rng));
        let row: Vec<f32> = rest
            .iter()
            .enumerate()
            .map(|(c, &lp)| {
                if c == blank {
                    config.blank_prob.ln() as f32
                } else {
                    ((1.0 - config.blank_prob).ln() + lp) as f32
                }
            })
            .collect();
        for _ in 0..config.frames_per_grapheme {
            values.extend_from_slice(&row);
        }
        if config.interleave_blanks {
            push_blank_frame(&mut values, &mut rng);
        }
    }
    if values.is_empty() {
        push_blank_frame(&mut values, &mut rng);
    }
    EmissionMatrix::new(values.len() / v, v, values).map_err(|e| SynthesisError::InvalidConfig(e.to_string()))
}

/// `SHARPNESS · (1[c = target] + temp · z_c)`, with `excluded` forced to -∞.
fn noisy_logits(
    v: usize,
    target: usize,
    excluded: Option<usize>,
    temp: f64,
    rng: &mut ChaCha8Rng,
) -> Vec<f64> {
    (0..v)
        .map(|c| {
            let z: f64 = StandardNormal.sample(rng);
            if Some(c) == excluded {
                f64::NEG_INFINITY
            } else {
                SHARPNESS * (f64::from(c == target) + temp * z)
            }
        })
        .collect()
}
