//! Exhaustive decoding over all `V^T` frame paths. Exact, exponential,
//! and only meant as a reference for small problems.

use std::collections::HashMap;

use super::collapse::{canonical_tokens, collapse_with_frames};
use super::{rank, BeamConfig, CtcError, DecodeResult, EmissionMatrix};
use crate::alphabet::Labels;
use crate::lm::{NGramModel, BOS, EOS};
use crate::logmath::log_add;

pub const ORACLE_MAX_PATHS: u64 = 1_000_000;

/// Best transcript by summed path probability and the fused score. Only the
/// weights of `config` are used.
pub fn oracle_decode<L: Labels + ?Sized>(
    emissions: &EmissionMatrix,
    labels: &L,
    lm: Option<&NGramModel>,
    config: &BeamConfig,
) -> Result<DecodeResult, CtcError> {
    Ok(oracle_decode_all(emissions, labels, lm, config)?.remove(0))
}

/// Every reachable transcript, ranked.
pub fn oracle_decode_all<L: Labels + ?Sized>(
    emissions: &EmissionMatrix,
    labels: &L,
    lm: Option<&NGramModel>,
    config: &BeamConfig,
) -> Result<Vec<DecodeResult>, CtcError> {
    let v = emissions.labels();
    let t = emissions.frames();
    if v != labels.len() {
        return Err(CtcError::DimensionMismatch { expected: labels.len(), found: v });
    }
    let paths = (v as f64).powi(t as i32);
    if paths > ORACLE_MAX_PATHS as f64 {
        return Err(CtcError::InstanceTooLarge { paths, limit: ORACLE_MAX_PATHS });
    }

    // transcript -> (summed log-prob, best path log-prob, best path frames)
    let mut groups: HashMap<String, (f64, f64, Vec<usize>)> = HashMap::new();
    let mut path = vec![0usize; t];
    loop {
        let lp: f64 = path.iter().enumerate().map(|(frame, &l)| emissions.row(frame)[l] as f64).sum();
        let tokens = canonical_tokens(&collapse_with_frames(&path, labels), labels.space());
        let indices: Vec<usize> = tokens.iter().map(|&(l, _)| l).collect();
        let transcript = labels.render(&indices)?;
        let group = groups.entry(transcript).or_insert((f64::NEG_INFINITY, f64::NEG_INFINITY, Vec::new()));
        group.0 = log_add(group.0, lp);
        if lp > group.1 {
            group.1 = lp;
            group.2 = tokens.iter().map(|&(_, f)| f).collect();
        }

        // Odometer increment, last frame fastest.
        let mut i = t;
        loop {
            if i == 0 {
                let mut results: Vec<DecodeResult> = groups
                    .into_iter()
                    .map(|(transcript, (acoustic, _, token_frames))| {
                        let words = transcript.split_whitespace().count();
                        let lm_log10p = lm.map_or(0.0, |m| sentence_score(m, &transcript));
                        DecodeResult {
                            combined_score: config.combined_score(acoustic, lm_log10p, words),
                            transcript,
                            acoustic_logp: acoustic,
                            lm_log10p,
                            token_frames,
                        }
                    })
                    .collect();
                results.sort_by(rank);
                return Ok(results);
            }
            i -= 1;
            path[i] += 1;
            if path[i] < v {
                break;
            }
            path[i] = 0;
        }
    }
}

/// log10 P of the whole sentence plus `</s>`, via word-string lookups.
fn sentence_score(lm: &NGramModel, transcript: &str) -> f64 {
    let mut history: Vec<&str> = vec![BOS];
    let mut total = 0.0;
    for w in transcript.split_whitespace().chain(std::iter::once(EOS)) {
        let start = history.len().saturating_sub(lm.order() - 1);
        total += lm.score(&history[start..], w);
        history.push(w);
    }
    total
}
