//! Grapheme-level CTC decoding and evaluation for Czech and Slovak speech
//! recognition.
//!
//! * [`alphabet`]: letter inventories, digraph-aware tokenization, label
//!   transfer between the two languages.
//! * [`normalize`]: transcript cleanup shared by LM training and scoring.
//! * [`lm`]: pruned Kneser–Ney n-gram models in ARPA format.
//! * [`ctc`]: greedy and LM-fused prefix beam search decoding, plus an
//!   exhaustive reference decoder.
//! * [`eval`]: word error rate and corpus statistics.
//! * [`testkit`]: synthetic emission lattices and sentences.

pub mod alphabet;
pub mod ctc;
pub mod eval;
pub mod lm;
pub mod logmath;
pub mod normalize;
pub mod testkit;
