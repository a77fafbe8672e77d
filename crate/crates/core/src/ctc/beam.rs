//! CTC prefix beam search with word-level shallow fusion.
//!
//! Prefixes live in a trie. Each beam entry keeps the probability mass of
//! all frame paths that collapse to its prefix, split into paths ending in
//! blank (`p_blank`) and paths ending in the prefix's last label
//! (`p_label`). Word separators are canonical: a separator at the start of
//! the utterance or right after another separator does not extend the
//! prefix, so every prefix renders with single interior spaces.
//!
//! The LM is consulted when a separator closes a word and once more at the
//! end of the utterance (the trailing word, then `</s>`).

use rayon::prelude::*;
use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::{rank, BeamConfig, CtcError, DecodeResult, EmissionMatrix};
use crate::alphabet::Labels;
use crate::lm::{NGramModel, WordId, BOS_ID, EOS_ID};
use crate::logmath::{log_add, LN_10, LOG_ZERO};

type History = SmallVec<[WordId; 4]>;

const ROOT: u32 = 0;
const NO_LABEL: u32 = u32::MAX;

#[derive(Debug, Clone)]
struct Node {
    parent: u32,
    label: u32,
    frame: u32,
    /// Root, or last label is the separator.
    at_boundary: bool,
    lm_log10: f64,
    words: u32,
    history: History,
}

#[derive(Debug, Clone, Copy)]
struct Entry {
    node: u32,
    p_blank: f64,
    p_label: f64,
}

#[derive(Debug, Clone)]
struct Candidate {
    /// Existing node, or `(parent, label)` for a prefix not yet in the trie.
    node: u32,
    label: u32,
    p_blank: f64,
    p_label: f64,
    lm_log10: f64,
    words: u32,
    history: Option<History>,
}

/// Immutable decoder: label set, optional LM and configuration. Safe to
/// share between threads; each call to [`decode`](Self::decode) owns its
/// search state.
pub struct BeamSearchDecoder<'a, L: Labels + ?Sized> {
    labels: &'a L,
    lm: Option<&'a NGramModel>,
    config: BeamConfig,
    /// LM id per label, used to spell words; `None` for blank and separator.
    symbols: Vec<Option<&'a str>>,
}

impl<'a, L: Labels + Sync + ?Sized> BeamSearchDecoder<'a, L> {
    pub fn new(labels: &'a L, lm: Option<&'a NGramModel>, config: BeamConfig) -> Result<Self, CtcError> {
        config.validate()?;
        let symbols = (0..labels.len())
            .map(|i| (i != labels.blank() && Some(i) != labels.space()).then(|| labels.symbol(i)))
            .collect();
        Ok(BeamSearchDecoder { labels, lm, config, symbols })
    }

    pub fn config(&self) -> &BeamConfig {
        &self.config
    }

    /// Decode many utterances in parallel. The output order matches the
    /// input and every result is identical to a sequential [`decode`](Self::decode).
    pub fn decode_batch(&self, batch: &[EmissionMatrix]) -> Vec<Result<Vec<DecodeResult>, CtcError>> {
        batch.par_iter().map(|m| self.decode(m)).collect()
    }

    /// Return up to `n_best` hypotheses, best first.
    pub fn decode(&self, emissions: &EmissionMatrix) -> Result<Vec<DecodeResult>, CtcError> {
        if emissions.labels() != self.labels.len() {
            return Err(CtcError::DimensionMismatch {
                expected: self.labels.len(),
                found: emissions.labels(),
            });
        }
        let cfg = &self.config;
        let blank = self.labels.blank();
        let space = self.labels.space();
        let fusion = |lm_log10: f64, words: u32| -> f64 {
            cfg.lm_weight * LN_10 * lm_log10 + cfg.word_bonus * words as f64
        };

        let mut nodes = vec![Node {
            parent: ROOT,
            label: NO_LABEL,
            frame: 0,
            at_boundary: true,
            lm_log10: 0.0,
            words: 0,
            history: History::from_slice(&[BOS_ID]),
        }];
        let mut children: FxHashMap<(u32, u32), u32> = FxHashMap::default();
        let mut beam = vec![Entry { node: ROOT, p_blank: 0.0, p_label: LOG_ZERO }];

        let mut candidates: Vec<Candidate> = Vec::new();
        let mut index: FxHashMap<(u32, u32), usize> = FxHashMap::default();
        let mut expand: Vec<(usize, f64)> = Vec::with_capacity(self.labels.len());
        let mut word_buf = String::new();
        let mut order: Vec<(f64, usize)> = Vec::new();

        for (t, row) in emissions.rows().enumerate() {
            expand.clear();
            let best = row.iter().enumerate().fold(0, |b, (i, &v)| if v > row[b] { i } else { b });
            for (i, &v) in row.iter().enumerate() {
                if v as f64 >= cfg.token_min_logp || i == best {
                    expand.push((i, v as f64));
                }
            }

            candidates.clear();
            index.clear();

            for entry in &beam {
                let n = entry.node as usize;
                let total = log_add(entry.p_blank, entry.p_label);
                let node = &nodes[n];
                for &(label, lp) in &expand {
                    if label == blank {
                        self.add(
                            &mut candidates,
                            &mut index,
                            &nodes,
                            entry.node,
                            NO_LABEL,
                            total + lp,
                            LOG_ZERO,
                        );
                        continue;
                    }
                    let is_space = Some(label) == space;
                    if is_space && node.at_boundary {
                        // Redundant separator: the prefix is unchanged.
                        self.add(
                            &mut candidates,
                            &mut index,
                            &nodes,
                            entry.node,
                            NO_LABEL,
                            LOG_ZERO,
                            total + lp,
                        );
                        continue;
                    }
                    let (to_self, to_child) = if node.label == label as u32 {
                        (entry.p_label + lp, entry.p_blank + lp)
                    } else {
                        (LOG_ZERO, total + lp)
                    };
                    if to_self != LOG_ZERO {
                        self.add(
                            &mut candidates,
                            &mut index,
                            &nodes,
                            entry.node,
                            NO_LABEL,
                            LOG_ZERO,
                            to_self,
                        );
                    }
                    if to_child == LOG_ZERO {
                        continue;
                    }
                    match children.get(&(entry.node, label as u32)) {
                        Some(&child) => {
                            self.add(
                                &mut candidates,
                                &mut index,
                                &nodes,
                                child,
                                NO_LABEL,
                                LOG_ZERO,
                                to_child,
                            );
                        }
                        None => {
                            let key = (entry.node, label as u32);
                            if let Some(&i) = index.get(&key) {
                                let c = &mut candidates[i];
                                c.p_label = log_add(c.p_label, to_child);
                                continue;
                            }
                            let (lm_log10, words, history) = if is_space {
                                let (gain, history) = self.close_word(&nodes, entry.node, &mut word_buf);
                                (node.lm_log10 + gain, node.words + 1, Some(history))
                            } else {
                                (node.lm_log10, node.words, None)
                            };
                            index.insert(key, candidates.len());
                            candidates.push(Candidate {
                                node: entry.node,
                                label: label as u32,
                                p_blank: LOG_ZERO,
                                p_label: to_child,
                                lm_log10,
                                words,
                                history,
                            });
                        }
                    }
                }
            }

            order.clear();
            order.extend(candidates.iter().enumerate().filter_map(|(i, c)| {
                let mass = log_add(c.p_blank, c.p_label);
                (mass != LOG_ZERO).then(|| (mass + fusion(c.lm_log10, c.words), i))
            }));
            let by_score = |a: &(f64, usize), b: &(f64, usize)| b.0.total_cmp(&a.0).then(a.1.cmp(&b.1));
            if order.len() > cfg.beam_width {
                order.select_nth_unstable_by(cfg.beam_width - 1, by_score);
                order.truncate(cfg.beam_width);
            }
            order.sort_unstable_by(by_score);

            beam.clear();
            for &(_, i) in &order {
                let c = &mut candidates[i];
                let node = if c.label == NO_LABEL {
                    c.node
                } else {
                    let parent = &nodes[c.node as usize];
                    let is_space = Some(c.label as usize) == space;
                    let history = c.history.take().unwrap_or_else(|| parent.history.clone());
                    let id = nodes.len() as u32;
                    nodes.push(Node {
                        parent: c.node,
                        label: c.label,
                        frame: t as u32,
                        at_boundary: is_space,
                        lm_log10: c.lm_log10,
                        words: c.words,
                        history,
                    });
                    children.insert((c.node, c.label), id);
                    id
                };
                beam.push(Entry { node, p_blank: c.p_blank, p_label: c.p_label });
            }
        }

        // Close the utterance and merge prefixes that render identically
        // (a trailing separator, or digraph vs. letter pair).
        let mut merged: FxHashMap<String, (f64, f64, usize, f64, Vec<usize>)> = FxHashMap::default();
        for entry in &beam {
            let node = &nodes[entry.node as usize];
            let mut lm_log10 = node.lm_log10;
            let mut words = node.words as usize;
            let mut history = node.history.clone();
            if !node.at_boundary {
                let (gain, h) = self.close_word(&nodes, entry.node, &mut word_buf);
                lm_log10 += gain;
                words += 1;
                history = h;
            }
            if let Some(lm) = self.lm {
                lm_log10 += lm.score_ids(&history, EOS_ID);
            }
            let (transcript, frames) = self.spell(&nodes, entry.node);
            let mass = log_add(entry.p_blank, entry.p_label);
            match merged.get_mut(&transcript) {
                Some(slot) => {
                    if mass > slot.3 {
                        slot.3 = mass;
                        slot.4 = frames;
                    }
                    slot.0 = log_add(slot.0, mass);
                }
                None => {
                    merged.insert(transcript, (mass, lm_log10, words, mass, frames));
                }
            }
        }

        let mut results: Vec<DecodeResult> = merged
            .into_iter()
            .map(|(transcript, (acoustic, lm_log10, words, _, token_frames))| DecodeResult {
                combined_score: cfg.combined_score(acoustic, lm_log10, words),
                transcript,
                acoustic_logp: acoustic,
                lm_log10p: lm_log10,
                token_frames,
            })
            .collect();
        results.sort_by(rank);
        results.truncate(cfg.n_best);
        Ok(results)
    }

    #[allow(clippy::too_many_arguments)]
    fn add(
        &self,
        candidates: &mut Vec<Candidate>,
        index: &mut FxHashMap<(u32, u32), usize>,
        nodes: &[Node],
        node: u32,
        label: u32,
        p_blank: f64,
        p_label: f64,
    ) {
        let key = (node, label);
        if let Some(&i) = index.get(&key) {
            let c = &mut candidates[i];
            c.p_blank = log_add(c.p_blank, p_blank);
            c.p_label = log_add(c.p_label, p_label);
            return;
        }
        let n = &nodes[node as usize];
        index.insert(key, candidates.len());
        candidates.push(Candidate {
            node,
            label,
            p_blank,
            p_label,
            lm_log10: n.lm_log10,
            words: n.words,
            history: None,
        });
    }

    /// LM gain (log10) for the word ending at `node` and the extended history.
    fn close_word(&self, nodes: &[Node], node: u32, buf: &mut String) -> (f64, History) {
        let current = &nodes[node as usize];
        let Some(lm) = self.lm else {
            return (0.0, current.history.clone());
        };
        let mut labels: SmallVec<[u32; 32]> = SmallVec::new();
        let mut n = node;
        while !nodes[n as usize].at_boundary {
            labels.push(nodes[n as usize].label);
            n = nodes[n as usize].parent;
        }
        buf.clear();
        for &l in labels.iter().rev() {
            buf.push_str(self.symbols[l as usize].unwrap_or_default());
        }
        let word = lm.word_id(buf);
        let gain = lm.score_ids(&current.history, word);
        let mut history = current.history.clone();
        history.push(word);
        let keep = lm.order().saturating_sub(1);
        if history.len() > keep {
            history.drain(..history.len() - keep);
        }
        (gain, history)
    }

    /// Transcript without a trailing separator, and the first-emission
    /// frame of each of its graphemes.
    fn spell(&self, nodes: &[Node], node: u32) -> (String, Vec<usize>) {
        let mut path = Vec::new();
        let mut n = node;
        while n != ROOT {
            path.push(n);
            n = nodes[n as usize].parent;
        }
        if path.first().is_some_and(|&n| nodes[n as usize].at_boundary) {
            path.remove(0);
        }
        path.reverse();
        let mut text = String::new();
        let mut frames = Vec::with_capacity(path.len());
        for n in path {
            let node = &nodes[n as usize];
            text.push_str(self.labels.symbol(node.label as usize));
            frames.push(node.frame as usize);
        }
        (text, frames)
    }
}

/// Convenience wrapper around [`BeamSearchDecoder`].
pub fn beam_search_decode<L: Labels + Sync + ?Sized>(
    emissions: &EmissionMatrix,
    labels: &L,
    lm: Option<&NGramModel>,
    config: &BeamConfig,
) -> Result<Vec<DecodeResult>, CtcError> {
    BeamSearchDecoder::new(labels, lm, *config)?.decode(emissions)
}
