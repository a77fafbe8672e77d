//! Word error rate and corpus statistics.

mod stats;
mod wer;

use thiserror::Error;

pub use stats::{corpus_stats, read_manifest, read_manifest_file, CorpusStats, ManifestEntry};
pub use wer::{align_words, corpus_wer, wer, wer_with_rules, EditCounts, WerReport};

#[derive(Debug, Error, PartialEq)]
pub enum EvalError {
    #[error("reference has no words after normalization")]
    EmptyReference,
    #[error("manifest line {line}: {reason}")]
    MalformedManifest { line: usize, reason: String },
    #[error("io: {0}")]
    Io(String),
}
