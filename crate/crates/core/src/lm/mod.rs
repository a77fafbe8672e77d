//! Word n-gram language models: counting, pruning, Kneser–Ney estimation,
//! backoff scoring and ARPA I/O.

mod arpa;
mod counts;
mod estimate;
mod model;
mod vocab;

use thiserror::Error;

pub use arpa::{read_arpa, read_arpa_str, write_arpa, write_arpa_string};
pub use counts::{count_ngrams, prune_counts, NGram, NGramCounts};
pub use estimate::estimate;
pub use model::{Entry, ModelMetadata, NGramModel, Smoothing, LOG10_ZERO};
pub use vocab::{Vocab, WordId, BOS, BOS_ID, EOS, EOS_ID, UNK, UNK_ID};

#[derive(Debug, Error)]
pub enum LmError {
    #[error("corpus has no non-empty lines")]
    EmptyCorpus,
    #[error("invalid model order {0}")]
    InvalidOrder(usize),
    #[error("expected {order} pruning thresholds, got {found}")]
    ThresholdCount { order: usize, found: usize },
    #[error("malformed ARPA at line {line}: {reason}")]
    MalformedArpa { line: usize, reason: String },
    #[error("ARPA header declares {declared} {order}-grams but the section has {found}")]
    CountMismatch { order: usize, declared: usize, found: usize },
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Count, prune and estimate in one step.
pub fn train<I, S>(lines: I, order: usize, thresholds: &[u64]) -> Result<NGramModel, LmError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let counts = count_ngrams(lines, order)?;
    let pruned = prune_counts(&counts, thresholds)?;
    estimate(&pruned)
}
