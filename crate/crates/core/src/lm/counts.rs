use rustc_hash::FxHashMap;
use smallvec::SmallVec;

use super::vocab::{Vocab, WordId, BOS_ID, EOS_ID};
use super::LmError;

/// An n-gram as word ids, oldest word first.
pub type NGram = SmallVec<[WordId; 4]>;

/// Raw n-gram counts for orders `1..=order`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct NGramCounts {
    order: usize,
    vocab: Vocab,
    /// `tables[k - 1]` holds the k-grams.
    tables: Vec<FxHashMap<NGram, u64>>,
    total_tokens: u64,
}

impl NGramCounts {
    pub fn new(order: usize) -> Result<Self, LmError> {
        if order == 0 {
            return Err(LmError::InvalidOrder(order));
        }
        Ok(NGramCounts {
            order,
            vocab: Vocab::new(),
            tables: vec![FxHashMap::default(); order],
            total_tokens: 0,
        })
    }

    /// Count one normalized line, padded as `<s> w1 .. wn </s>`.
    /// Blank lines are skipped; returns whether the line was counted.
    pub fn add_line(&mut self, line: &str) -> bool {
        let mut ids: Vec<WordId> = vec![BOS_ID];
        ids.extend(line.split_whitespace().map(|w| self.vocab.intern(w)));
        if ids.len() == 1 {
            return false;
        }
        ids.push(EOS_ID);
        self.total_tokens += ids.len() as u64 - 1;
        for start in 0..ids.len() {
            for k in 1..=self.order.min(ids.len() - start) {
                let gram: NGram = ids[start..start + k].iter().copied().collect();
                *self.tables[k - 1].entry(gram).or_insert(0) += 1;
            }
        }
        true
    }

    /// Pointwise sum with counts from another shard.
    pub fn merge(&mut self, other: &NGramCounts) {
        assert_eq!(self.order, other.order, "cannot merge counts of different order");
        let remap: Vec<WordId> = other.vocab.words().map(|w| self.vocab.intern(w)).collect();
        for (mine, theirs) in self.tables.iter_mut().zip(&other.tables) {
            for (gram, &count) in theirs {
                let g: NGram = gram.iter().map(|&w| remap[w as usize]).collect();
                *mine.entry(g).or_insert(0) += count;
            }
        }
        self.total_tokens += other.total_tokens;
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    /// Word tokens counted, including one `</s>` per line.
    pub fn total_tokens(&self) -> u64 {
        self.total_tokens
    }

    pub fn table(&self, k: usize) -> &FxHashMap<NGram, u64> {
        &self.tables[k - 1]
    }

    pub(crate) fn tables(&self) -> &[FxHashMap<NGram, u64>] {
        &self.tables
    }

    pub fn len(&self, k: usize) -> usize {
        self.tables[k - 1].len()
    }

    /// Count of an n-gram given as words; 0 when absent.
    pub fn get(&self, words: &[&str]) -> u64 {
        if words.is_empty() || words.len() > self.order {
            return 0;
        }
        let mut gram = NGram::new();
        for w in words {
            match self.vocab.get(w) {
                Some(id) => gram.push(id),
                None => return 0,
            }
        }
        self.tables[words.len() - 1].get(&gram).copied().unwrap_or(0)
    }

    /// Iterate k-grams as word strings.
    pub fn iter_words(&self, k: usize) -> impl Iterator<Item = (Vec<&str>, u64)> {
        self.tables[k - 1].iter().map(|(g, &c)| (g.iter().map(|&w| self.vocab.word(w)).collect(), c))
    }
}

/// Count all k-grams (k ≤ order) of the given normalized lines.
pub fn count_ngrams<I, S>(lines: I, order: usize) -> Result<NGramCounts, LmError>
where
    I: IntoIterator<Item = S>,
    S: AsRef<str>,
{
    let mut counts = NGramCounts::new(order)?;
    let mut any = false;
    for line in lines {
        any |= counts.add_line(line.as_ref());
    }
    if !any {
        return Err(LmError::EmptyCorpus);
    }
    Ok(counts)
}

/// Drop every k-gram whose count is below `thresholds[k - 1]`.
///
/// The sentence markers `<s>` and `</s>` are never pruned from the unigram
/// table: a model without them cannot score a sentence.
pub fn prune_counts(counts: &NGramCounts, thresholds: &[u64]) -> Result<NGramCounts, LmError> {
    if thresholds.len() != counts.order {
        return Err(LmError::ThresholdCount { order: counts.order, found: thresholds.len() });
    }
    let tables = counts
        .tables
        .iter()
        .zip(thresholds)
        .enumerate()
        .map(|(k, (table, &min))| {
            table
                .iter()
                .filter(|(g, &c)| c >= min || (k == 0 && (g[0] == BOS_ID || g[0] == EOS_ID)))
                .map(|(g, &c)| (g.clone(), c))
                .collect()
        })
        .collect();
    Ok(NGramCounts {
        order: counts.order,
        vocab: counts.vocab.clone(),
        tables,
        total_tokens: counts.total_tokens,
    })
}
