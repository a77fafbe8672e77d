use super::collapse::{canonical_tokens, collapse_with_frames};
use super::{CtcError, DecodeResult, EmissionMatrix};
use crate::alphabet::Labels;

/// Best-path decoding: per-frame argmax (lowest index wins ties), collapse,
/// render. The LM is not involved, so `combined_score == acoustic_logp`.
pub fn greedy_decode<L: Labels + ?Sized>(
    emissions: &EmissionMatrix,
    labels: &L,
) -> Result<DecodeResult, CtcError> {
    if emissions.labels() != labels.len() {
        return Err(CtcError::DimensionMismatch { expected: labels.len(), found: emissions.labels() });
    }
    let mut path = Vec::with_capacity(emissions.frames());
    let mut acoustic = 0.0f64;
    for row in emissions.rows() {
        let (best, &lp) =
            row.iter().enumerate().fold((0, &row[0]), |acc, (i, v)| if *v > *acc.1 { (i, v) } else { acc });
        path.push(best);
        acoustic += lp as f64;
    }
    let tokens = canonical_tokens(&collapse_with_frames(&path, labels), labels.space());
    let indices: Vec<usize> = tokens.iter().map(|&(l, _)| l).collect();
    Ok(DecodeResult {
        transcript: labels.render(&indices)?,
        acoustic_logp: acoustic,
        lm_log10p: 0.0,
        combined_score: acoustic,
        token_frames: tokens.into_iter().map(|(_, f)| f).collect(),
    })
}
