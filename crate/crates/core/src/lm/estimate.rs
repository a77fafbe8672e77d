//! Interpolated Kneser–Ney estimation with a Witten–Bell fallback.
//!
//! Lower orders use continuation counts (the number of distinct words seen
//! to the left). An n-gram starting with `<s>` has no left context and
//! keeps its raw count. After count pruning a surviving n-gram may have lost
//! all of its left extensions; its continuation count is floored at one.
//!
//! For a context `h` with adjusted counts `a(h·)` summing to `S` over `n`
//! distinct followers, an order smoothed with discount `D` yields
//!
//! ```text
//! P(w | h) = (a(hw) - D) / S + γ(h) · P(w | h'),   γ(h) = D · n / S
//! ```
//!
//! and the Witten–Bell form replaces the first term by `a(hw) / (S + n)`
//! with `γ(h) = n / (S + n)`. The interpolated probabilities are stored
//! directly, so `γ(h)` becomes the ARPA backoff weight of `h`. At the
//! unigram level `γ` is the probability of `<unk>`.

use rustc_hash::FxHashMap;

use super::counts::{NGram, NGramCounts};
use super::model::{Entry, ModelMetadata, NGramModel, Smoothing, LOG10_ZERO};
use super::vocab::{Vocab, WordId, BOS_ID, UNK_ID};
use super::LmError;

/// Estimate a backoff model from (possibly pruned) counts.
pub fn estimate(counts: &NGramCounts) -> Result<NGramModel, LmError> {
    let requested = counts.order();
    let tables = filtered_tables(counts);

    let mut order = requested;
    while order > 1 && tables[order - 1].is_empty() {
        log::warn!("no {order}-grams survive pruning, reducing model order");
        order -= 1;
    }
    let has_words = tables[0].keys().any(|g| g[0] != BOS_ID);
    if !has_words {
        return Err(LmError::EmptyCorpus);
    }

    let adjusted = adjusted_counts(&tables[..order]);
    let smoothing: Vec<Smoothing> =
        adjusted.iter().enumerate().map(|(k, table)| choose_smoothing(k + 1, table)).collect();

    // Vocabulary: reserved tokens plus every surviving unigram.
    let mut vocab = Vocab::new();
    let mut remap = vec![None; counts.vocab().len()];
    for (id, word) in counts.vocab().words().enumerate() {
        if id < 3 || tables[0].contains_key(&NGram::from_slice(&[id as WordId])) {
            remap[id] = Some(vocab.intern(word));
        }
    }
    let remap_gram = |g: &NGram| -> NGram { g.iter().map(|&w| remap[w as usize].unwrap()).collect() };

    let mut model = NGramModel::empty(order, vocab);

    for k in 1..=order {
        // Context statistics: Σ a and number of followers.
        let mut stats: FxHashMap<NGram, (u64, u64)> = FxHashMap::default();
        for (gram, &a) in &adjusted[k - 1] {
            if k == 1 && gram[0] == BOS_ID {
                continue;
            }
            let s = stats.entry(NGram::from_slice(&gram[..k - 1])).or_insert((0, 0));
            s.0 += a;
            s.1 += 1;
        }
        let gamma = |sum: u64, followers: u64| -> f64 {
            match smoothing[k - 1] {
                Smoothing::KneserNey { discount } => discount * followers as f64 / sum as f64,
                Smoothing::WittenBell => followers as f64 / (sum + followers) as f64,
            }
        };

        let mut grams: Vec<(&NGram, u64)> = adjusted[k - 1].iter().map(|(g, &a)| (g, a)).collect();
        grams.sort_unstable();
        let mut new_entries = Vec::with_capacity(grams.len());
        for (gram, a) in grams {
            let target = remap_gram(gram);
            if k == 1 && gram[0] == BOS_ID {
                new_entries.push((target, LOG10_ZERO as f64));
                continue;
            }
            let (sum, followers) = stats[&gram[..k - 1]];
            let own = match smoothing[k - 1] {
                Smoothing::KneserNey { discount } => (a as f64 - discount) / sum as f64,
                Smoothing::WittenBell => a as f64 / (sum + followers) as f64,
            };
            let p = if k == 1 {
                own
            } else {
                let lower = 10f64.powf(model.score_ids(&target[1..k - 1], target[k - 1]));
                own + gamma(sum, followers) * lower
            };
            new_entries.push((target, p.log10()));
        }
        // A literal <unk> in the corpus is stored here; the reserved mass is added below.
        for (gram, lp) in new_entries {
            model.insert(&gram, Entry::new(lp as f32));
        }

        for (ctx, (sum, followers)) in stats {
            let g = gamma(sum, followers);
            if k == 1 {
                let prior = match model.entry(&[UNK_ID]) {
                    Some(e) if e.prob > LOG10_ZERO => 10f64.powf(e.prob as f64),
                    _ => 0.0,
                };
                model.unigrams[UNK_ID as usize].prob = (prior + g).log10() as f32;
            } else {
                let ctx = remap_gram(&ctx);
                let entry = model.entry(&ctx).copied().expect("context survives filtering");
                model.insert(&ctx, Entry { prob: entry.prob, backoff: g.log10() as f32 });
            }
        }
    }

    model.metadata = ModelMetadata { smoothing, requested_order: (order != requested).then_some(requested) };
    Ok(model)
}

/// Remove n-grams that reference a pruned word or whose context was pruned.
fn filtered_tables(counts: &NGramCounts) -> Vec<FxHashMap<NGram, u64>> {
    let mut out: Vec<FxHashMap<NGram, u64>> = Vec::with_capacity(counts.order());
    for (k, table) in counts.tables().iter().enumerate() {
        let kept = if k == 0 {
            table.clone()
        } else {
            let lower = &out[k - 1];
            let unigrams = &out[0];
            table
                .iter()
                .filter(|(g, _)| lower.contains_key(&g[..k]) && unigrams.contains_key(&g[k..]))
                .map(|(g, &c)| (g.clone(), c))
                .collect()
        };
        out.push(kept);
    }
    out
}

fn adjusted_counts(tables: &[FxHashMap<NGram, u64>]) -> Vec<FxHashMap<NGram, u64>> {
    let order = tables.len();
    let mut out = Vec::with_capacity(order);
    for k in 1..=order {
        if k == order {
            out.push(tables[k - 1].clone());
            continue;
        }
        let mut left: FxHashMap<&[WordId], u64> = FxHashMap::default();
        for g in tables[k].keys() {
            *left.entry(&g[1..]).or_insert(0) += 1;
        }
        let adjusted = tables[k - 1]
            .iter()
            .map(|(g, &raw)| {
                let a = if g[0] == BOS_ID { raw } else { left.get(&g[..]).copied().unwrap_or(0).max(1) };
                (g.clone(), a)
            })
            .collect();
        out.push(adjusted);
    }
    out
}

/// `D = n1 / (n1 + 2 n2)`; Witten–Bell unless `0 < D < 1`.
fn choose_smoothing(k: usize, table: &FxHashMap<NGram, u64>) -> Smoothing {
    let (mut n1, mut n2) = (0u64, 0u64);
    for (g, &a) in table {
        if k == 1 && g[0] == BOS_ID {
            continue;
        }
        match a {
            1 => n1 += 1,
            2 => n2 += 1,
            _ => {}
        }
    }
    if n1 == 0 || n2 == 0 {
        log::warn!("degenerate counts-of-counts at order {k} (n1={n1}, n2={n2}); using Witten-Bell");
        return Smoothing::WittenBell;
    }
    Smoothing::KneserNey { discount: n1 as f64 / (n1 + 2 * n2) as f64 }
}
