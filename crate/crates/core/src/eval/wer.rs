use super::EvalError;
use crate::normalize::{normalize_transcript, NormalizationRules};

/// Alignment counts between a reference and a hypothesis word sequence.
#[derive(Debug, Clone, Copy, Default, PartialEq, Eq)]
pub struct EditCounts {
    pub hits: usize,
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
}

impl EditCounts {
    pub fn errors(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }

    pub fn ref_words(&self) -> usize {
        self.hits + self.substitutions + self.deletions
    }

    fn add(mut self, other: EditCounts) -> Self {
        self.hits += other.hits;
        self.substitutions += other.substitutions;
        self.insertions += other.insertions;
        self.deletions += other.deletions;
        self
    }

    /// Lower is better: fewest errors, then most hits, then fewest substitutions.
    fn key(&self) -> (usize, std::cmp::Reverse<usize>, usize) {
        (self.errors(), std::cmp::Reverse(self.hits), self.substitutions)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct WerReport {
    pub substitutions: usize,
    pub insertions: usize,
    pub deletions: usize,
    pub hits: usize,
    pub ref_words: usize,
    /// `(S + I + D) / ref_words`; may exceed 1.
    pub wer: f64,
}

impl WerReport {
    fn from_counts(c: EditCounts) -> Result<Self, EvalError> {
        let ref_words = c.ref_words();
        if ref_words == 0 {
            return Err(EvalError::EmptyReference);
        }
        Ok(WerReport {
            substitutions: c.substitutions,
            insertions: c.insertions,
            deletions: c.deletions,
            hits: c.hits,
            ref_words,
            wer: c.errors() as f64 / ref_words as f64,
        })
    }

    pub fn errors(&self) -> usize {
        self.substitutions + self.insertions + self.deletions
    }
}

/// Unit-cost word Levenshtein alignment.
///
/// Among the minimal-cost alignments the one with the most hits, then the
/// fewest substitutions, is reported. That order is compatible with
/// addition, so the lexicographic optimum is found cell by cell.
pub fn align_words<S: AsRef<str>>(reference: &[S], hypothesis: &[S]) -> EditCounts {
    let del = EditCounts { deletions: 1, ..Default::default() };
    let ins = EditCounts { insertions: 1, ..Default::default() };
    let mut prev: Vec<EditCounts> =
        (0..=hypothesis.len()).map(|j| EditCounts { insertions: j, ..Default::default() }).collect();
    let mut cur = vec![EditCounts::default(); hypothesis.len() + 1];
    for r in reference {
        cur[0] = prev[0].add(del);
        for (j, h) in hypothesis.iter().enumerate() {
            let diag = if r.as_ref() == h.as_ref() {
                prev[j].add(EditCounts { hits: 1, ..Default::default() })
            } else {
                prev[j].add(EditCounts { substitutions: 1, ..Default::default() })
            };
            let up = prev[j + 1].add(del);
            let left = cur[j].add(ins);
            cur[j + 1] = [diag, up, left].into_iter().min_by_key(EditCounts::key).unwrap();
        }
        std::mem::swap(&mut prev, &mut cur);
    }
    prev[hypothesis.len()]
}

fn normalized_counts(reference: &str, hypothesis: &str, rules: &NormalizationRules) -> EditCounts {
    let r = normalize_transcript(reference, rules);
    let h = normalize_transcript(hypothesis, rules);
    let r: Vec<&str> = r.split(' ').filter(|w| !w.is_empty()).collect();
    let h: Vec<&str> = h.split(' ').filter(|w| !w.is_empty()).collect();
    align_words(&r, &h)
}

/// WER after normalizing both sides, so casing and punctuation never count
/// as errors.
pub fn wer(reference: &str, hypothesis: &str) -> Result<WerReport, EvalError> {
    wer_with_rules(reference, hypothesis, &NormalizationRules::default())
}

pub fn wer_with_rules(
    reference: &str,
    hypothesis: &str,
    rules: &NormalizationRules,
) -> Result<WerReport, EvalError> {
    WerReport::from_counts(normalized_counts(reference, hypothesis, rules))
}

/// Pooled WER: total errors over total reference words. Pairs whose
/// reference normalizes to nothing still contribute their insertions.
pub fn corpus_wer<I, R, H>(pairs: I) -> Result<WerReport, EvalError>
where
    I: IntoIterator<Item = (R, H)>,
    R: AsRef<str>,
    H: AsRef<str>,
{
    let rules = NormalizationRules::default();
    let total = pairs
        .into_iter()
        .map(|(r, h)| normalized_counts(r.as_ref(), h.as_ref(), &rules))
        .fold(EditCounts::default(), EditCounts::add);
    WerReport::from_counts(total)
}
