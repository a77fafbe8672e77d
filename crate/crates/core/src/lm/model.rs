use rustc_hash::FxHashMap;

use super::counts::NGram;
use super::vocab::{Vocab, WordId, BOS, BOS_ID, EOS_ID, UNK_ID};
use super::LmError;

/// ARPA convention for a probability of zero (used for `<s>` as a predicted word).
pub const LOG10_ZERO: f32 = -99.0;

/// One stored n-gram: log10 probability and log10 backoff weight.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Entry {
    pub prob: f32,
    pub backoff: f32,
}

impl Entry {
    pub fn new(prob: f32) -> Self {
        Entry { prob, backoff: 0.0 }
    }
}

/// Smoothing applied to one order during estimation.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Smoothing {
    KneserNey {
        discount: f64,
    },
    /// Used when the counts-of-counts leave the discount undefined.
    WittenBell,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct ModelMetadata {
    /// Per order, lowest first. Empty for models read from ARPA.
    pub smoothing: Vec<Smoothing>,
    /// Order requested before empty tables forced a reduction.
    pub requested_order: Option<usize>,
}

/// Backoff n-gram model in log10 space. Immutable once built.
#[derive(Debug, Clone, PartialEq)]
pub struct NGramModel {
    pub(crate) order: usize,
    pub(crate) vocab: Vocab,
    /// Indexed by word id; every vocabulary word has a unigram.
    pub(crate) unigrams: Vec<Entry>,
    /// `higher[k - 2]` stores the k-grams for k ≥ 2.
    pub(crate) higher: Vec<FxHashMap<NGram, Entry>>,
    pub(crate) metadata: ModelMetadata,
}

impl NGramModel {
    pub(crate) fn empty(order: usize, vocab: Vocab) -> Self {
        let unigrams = vec![Entry::new(LOG10_ZERO); vocab.len()];
        NGramModel {
            order,
            vocab,
            unigrams,
            higher: vec![FxHashMap::default(); order.saturating_sub(1)],
            metadata: ModelMetadata::default(),
        }
    }

    /// Build a model from explicit entries, given per order as
    /// `(words, log10 prob, log10 backoff)`. Unigrams define the vocabulary;
    /// `<unk>`, `<s>` and `</s>` are added if missing.
    pub fn from_entries(entries: Vec<Vec<(Vec<String>, f32, f32)>>) -> Result<Self, LmError> {
        let order = entries.len();
        if order == 0 {
            return Err(LmError::InvalidOrder(0));
        }
        let mut vocab = Vocab::new();
        let mut seen = [false; 3];
        for (words, _, _) in &entries[0] {
            let id = vocab.intern(&words[0]);
            if (id as usize) < seen.len() {
                seen[id as usize] = true;
            }
        }
        let mut model = NGramModel::empty(order, vocab);
        // Reserved tokens absent from the source get the conventional values.
        if !seen[UNK_ID as usize] {
            log::warn!("model has no <unk>; assigning log10 probability -100");
            model.unigrams[UNK_ID as usize] = Entry::new(-100.0);
        }
        for (k, table) in entries.into_iter().enumerate() {
            for (words, prob, backoff) in table {
                if words.len() != k + 1 {
                    return Err(LmError::MalformedArpa {
                        line: 0,
                        reason: format!("{}-gram listed under order {}", words.len(), k + 1),
                    });
                }
                let mut gram = NGram::new();
                for w in &words {
                    match model.vocab.get(w) {
                        Some(id) => gram.push(id),
                        None => {
                            return Err(LmError::MalformedArpa {
                                line: 0,
                                reason: format!("word {w:?} has no unigram"),
                            })
                        }
                    }
                }
                model.insert(&gram, Entry { prob, backoff });
            }
        }
        Ok(model)
    }

    pub(crate) fn insert(&mut self, gram: &[WordId], entry: Entry) {
        if gram.len() == 1 {
            self.unigrams[gram[0] as usize] = entry;
        } else {
            self.higher[gram.len() - 2].insert(gram.iter().copied().collect(), entry);
        }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn vocab(&self) -> &Vocab {
        &self.vocab
    }

    pub fn metadata(&self) -> &ModelMetadata {
        &self.metadata
    }

    pub fn word_id(&self, word: &str) -> WordId {
        self.vocab.id_or_unk(word)
    }

    /// Number of stored k-grams.
    pub fn len(&self, k: usize) -> usize {
        match k {
            1 => self.unigrams.len(),
            _ => self.higher[k - 2].len(),
        }
    }

    pub fn total_entries(&self) -> usize {
        (1..=self.order).map(|k| self.len(k)).sum()
    }

    pub fn entry(&self, gram: &[WordId]) -> Option<&Entry> {
        match gram.len() {
            0 => None,
            1 => self.unigrams.get(gram[0] as usize),
            k if k <= self.order => self.higher[k - 2].get(gram),
            _ => None,
        }
    }

    /// Look up by words; `None` if any word is out of vocabulary.
    pub fn entry_words(&self, words: &[&str]) -> Option<&Entry> {
        let gram: Option<NGram> = words.iter().map(|w| self.vocab.get(w)).collect();
        self.entry(&gram?)
    }

    /// All k-grams as `(ids, entry)`, in no particular order.
    pub fn entries(&self, k: usize) -> Box<dyn Iterator<Item = (NGram, Entry)> + '_> {
        if k == 1 {
            Box::new(self.unigrams.iter().enumerate().map(|(i, e)| (NGram::from_slice(&[i as WordId]), *e)))
        } else {
            Box::new(self.higher[k - 2].iter().map(|(g, e)| (g.clone(), *e)))
        }
    }

    /// log10 P(word | context) by the backoff recursion. `context` is oldest
    /// word first; only the last `order - 1` ids are used.
    pub fn score_ids(&self, context: &[WordId], word: WordId) -> f64 {
        let max_ctx = context.len().min(self.order - 1);
        let mut key: NGram = context[context.len() - max_ctx..].iter().copied().collect();
        key.push(word);
        let mut backoff = 0.0f64;
        for n in (1..=max_ctx).rev() {
            let start = max_ctx - n;
            if let Some(e) = self.higher[n - 1].get(&key[start..]) {
                return backoff + e.prob as f64;
            }
            if let Some(e) = self.entry(&key[start..max_ctx]) {
                backoff += e.backoff as f64;
            }
        }
        backoff + self.unigrams[word as usize].prob as f64
    }

    /// log10 P(word | context) with string inputs; unknown words go through `<unk>`.
    pub fn score(&self, context: &[&str], word: &str) -> f64 {
        let ctx: Vec<WordId> = context.iter().map(|w| self.word_id(w)).collect();
        self.score_ids(&ctx, self.word_id(word))
    }

    /// log10 probability of a sentence including `</s>`, and the number of
    /// scored tokens.
    pub fn sentence_log10(&self, line: &str) -> (f64, usize) {
        let mut history: Vec<WordId> = vec![BOS_ID];
        let mut total = 0.0;
        for w in line.split_whitespace() {
            let id = self.word_id(w);
            total += self.score_ids(&history, id);
            history.push(id);
        }
        total += self.score_ids(&history, EOS_ID);
        (total, history.len())
    }

    /// `10^(-Σ log10 P / N)` over all words and sentence ends.
    pub fn perplexity<I, S>(&self, lines: I) -> Result<f64, LmError>
    where
        I: IntoIterator<Item = S>,
        S: AsRef<str>,
    {
        let mut sum = 0.0;
        let mut n = 0usize;
        for line in lines {
            let line = line.as_ref();
            if line.trim().is_empty() {
                continue;
            }
            let (lp, tokens) = self.sentence_log10(line);
            sum += lp;
            n += tokens;
        }
        if n == 0 {
            return Err(LmError::EmptyCorpus);
        }
        Ok(10f64.powf(-sum / n as f64))
    }

    /// Predictable words (everything but `<s>`).
    pub fn predictable_words(&self) -> impl Iterator<Item = WordId> + '_ {
        (0..self.vocab.len() as WordId).filter(|&w| self.vocab.word(w) != BOS)
    }

    /// Σ_w P(w | context) over the predictable vocabulary.
    pub fn context_mass(&self, context: &[WordId]) -> f64 {
        self.predictable_words().map(|w| 10f64.powf(self.score_ids(context, w))).sum()
    }

    /// Every stored n-gram of order < `order` usable as a context.
    pub fn contexts(&self) -> Vec<NGram> {
        let mut out = Vec::new();
        for k in 1..self.order {
            for (g, _) in self.entries(k) {
                if k == 1 && g[0] == EOS_ID {
                    continue;
                }
                out.push(g);
            }
        }
        out.sort();
        out
    }
}
