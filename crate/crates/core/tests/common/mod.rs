//! Reference implementations used only by the tests. Each one is written
//! directly from the definition, without sharing code with the library.
#![allow(dead_code)]

use std::collections::{BTreeMap, HashMap};

use czsk_asr::ctc::EmissionMatrix;
use rand::Rng;

pub type Gram = Vec<String>;

/// Merge runs, then drop blanks, as two separate passes.
pub fn naive_collapse(path: &[usize], blank: usize) -> Vec<usize> {
    let mut merged: Vec<usize> = Vec::new();
    for &l in path {
        if merged.last() != Some(&l) {
            merged.push(l);
        }
    }
    merged.into_iter().filter(|&l| l != blank).collect()
}

pub fn argmax_path(m: &EmissionMatrix) -> Vec<usize> {
    (0..m.frames())
        .map(|t| {
            let row = m.row(t);
            let mut best = 0;
            for i in 1..row.len() {
                if row[i] > row[best] {
                    best = i;
                }
            }
            best
        })
        .collect()
}

/// Random normalized log-probability matrix. Rows are built from random
/// logits, with an occasional spike so that some rows are peaked.
pub fn random_matrix<R: Rng>(rng: &mut R, frames: usize, labels: usize) -> EmissionMatrix {
    let rows: Vec<Vec<f64>> = (0..frames)
        .map(|_| {
            let scale = if rng.random_bool(0.3) { 6.0 } else { 2.0 };
            let logits: Vec<f64> = (0..labels).map(|_| rng.random::<f64>() * scale).collect();
            let max = logits.iter().cloned().fold(f64::MIN, f64::max);
            let z: f64 = logits.iter().map(|l| (l - max).exp()).sum();
            logits.iter().map(|l| l - max - z.ln()).collect()
        })
        .collect();
    EmissionMatrix::from_rows(&rows).unwrap()
}

/// Full-table word edit alignment. Each cell keeps the best
/// (errors, -hits, subs) tuple together with its I and D counts.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Cell {
    pub errors: usize,
    pub neg_hits: isize,
    pub subs: usize,
    pub ins: usize,
    pub dels: usize,
}

pub fn dp_table_align(r: &[&str], h: &[&str]) -> Cell {
    let mut table = vec![vec![None::<Cell>; h.len() + 1]; r.len() + 1];
    for i in 0..=r.len() {
        for j in 0..=h.len() {
            let mut options = Vec::new();
            if i == 0 && j == 0 {
                options.push(Cell { errors: 0, neg_hits: 0, subs: 0, ins: 0, dels: 0 });
            }
            if i > 0 {
                let c = table[i - 1][j].unwrap();
                options.push(Cell { errors: c.errors + 1, dels: c.dels + 1, ..c });
            }
            if j > 0 {
                let c = table[i][j - 1].unwrap();
                options.push(Cell { errors: c.errors + 1, ins: c.ins + 1, ..c });
            }
            if i > 0 && j > 0 {
                let c = table[i - 1][j - 1].unwrap();
                if r[i - 1] == h[j - 1] {
                    options.push(Cell { neg_hits: c.neg_hits - 1, ..c });
                } else {
                    options.push(Cell { errors: c.errors + 1, subs: c.subs + 1, ..c });
                }
            }
            table[i][j] = options.into_iter().min();
        }
    }
    table[r.len()][h.len()].unwrap()
}

/// Plain recursive Levenshtein distance with memoization.
pub fn levenshtein(a: &[&str], b: &[&str]) -> usize {
    fn go(a: &[&str], b: &[&str], memo: &mut HashMap<(usize, usize), usize>) -> usize {
        if a.is_empty() {
            return b.len();
        }
        if b.is_empty() {
            return a.len();
        }
        if let Some(&d) = memo.get(&(a.len(), b.len())) {
            return d;
        }
        let sub = go(&a[1..], &b[1..], memo) + usize::from(a[0] != b[0]);
        let del = go(&a[1..], b, memo) + 1;
        let ins = go(a, &b[1..], memo) + 1;
        let d = sub.min(del).min(ins);
        memo.insert((a.len(), b.len()), d);
        d
    }
    go(a, b, &mut HashMap::new())
}

/// Count every k-gram of every padded line, k = 1..=order.
pub fn recount(lines: &[String], order: usize) -> Vec<BTreeMap<Gram, u64>> {
    let mut tables = vec![BTreeMap::new(); order];
    for line in lines {
        let words: Vec<&str> = line.split_whitespace().collect();
        if words.is_empty() {
            continue;
        }
        let mut padded = vec!["<s>".to_string()];
        padded.extend(words.iter().map(|w| w.to_string()));
        padded.push("</s>".to_string());
        for k in 1..=order {
            for start in 0..padded.len() {
                if start + k > padded.len() {
                    break;
                }
                *tables[k - 1].entry(padded[start..start + k].to_vec()).or_insert(0) += 1;
            }
        }
    }
    tables
}

/// Interpolated Kneser–Ney (Witten–Bell where counts-of-counts lack
/// singletons or doubletons), evaluated directly from raw counts.
pub struct ReferenceLm {
    order: usize,
    adjusted: Vec<BTreeMap<Gram, u64>>,
    /// Per order, context -> (sum of adjusted counts, number of followers).
    stats: Vec<HashMap<Gram, (u64, u64)>>,
    discounts: Vec<Option<f64>>,
}

impl ReferenceLm {
    pub fn new(raw: &[BTreeMap<Gram, u64>]) -> Self {
        let order = raw.len();
        let mut adjusted = Vec::new();
        for k in 0..order {
            if k + 1 == order {
                adjusted.push(raw[k].clone());
                continue;
            }
            let mut table = BTreeMap::new();
            for (gram, &count) in &raw[k] {
                let value = if gram[0] == "<s>" {
                    count
                } else {
                    raw[k + 1].keys().filter(|g| g[1..] == gram[..]).count() as u64
                };
                table.insert(gram.clone(), value);
            }
            adjusted.push(table);
        }
        let mut stats = Vec::new();
        let mut discounts = Vec::new();
        for table in &adjusted {
            let mut s: HashMap<Gram, (u64, u64)> = HashMap::new();
            let (mut n1, mut n2) = (0, 0);
            for (gram, &a) in table {
                if gram.len() == 1 && gram[0] == "<s>" {
                    continue;
                }
                let e = s.entry(gram[..gram.len() - 1].to_vec()).or_default();
                e.0 += a;
                e.1 += 1;
                n1 += u64::from(a == 1);
                n2 += u64::from(a == 2);
            }
            stats.push(s);
            discounts.push((n1 > 0 && n2 > 0).then(|| n1 as f64 / (n1 + 2 * n2) as f64));
        }
        ReferenceLm { order, adjusted, stats, discounts }
    }

    pub fn discounts(&self) -> &[Option<f64>] {
        &self.discounts
    }

    pub fn vocabulary(&self) -> Vec<String> {
        let mut v: Vec<String> = self.adjusted[0].keys().map(|g| g[0].clone()).collect();
        if !v.iter().any(|w| w == "<unk>") {
            v.push("<unk>".into());
        }
        v
    }

    /// Every context of order 1..order-1 seen in the counts, plus the empty one.
    pub fn contexts(&self) -> Vec<Gram> {
        let mut out = vec![vec![]];
        for k in 1..self.order {
            out.extend(self.stats[k].keys().cloned());
        }
        out
    }

    /// P(word | context), context given oldest first.
    pub fn prob(&self, context: &[String], word: &str) -> f64 {
        let known = self.adjusted[0].contains_key(&vec![word.to_string()]);
        let word = if known { word } else { "<unk>" };
        let tail = context.len().min(self.order - 1);
        self.interpolated(&context[context.len() - tail..], word)
    }

    fn interpolated(&self, h: &[String], w: &str) -> f64 {
        let k = h.len();
        if k == 0 {
            let (sum, followers) = self.stats[0][&vec![]];
            let a = self.adjusted[0].get(&vec![w.to_string()]).copied().unwrap_or(0);
            let (own, gamma) = self.own_and_gamma(0, a, sum, followers);
            return own + if w == "<unk>" { gamma } else { 0.0 };
        }
        let lower = self.interpolated(&h[1..], w);
        match self.stats[k].get(h) {
            None => lower,
            Some(&(sum, followers)) => {
                let mut gram = h.to_vec();
                gram.push(w.to_string());
                let a = self.adjusted[k].get(&gram).copied().unwrap_or(0);
                let (own, gamma) = self.own_and_gamma(k, a, sum, followers);
                own + gamma * lower
            }
        }
    }

    fn own_and_gamma(&self, k: usize, a: u64, sum: u64, followers: u64) -> (f64, f64) {
        let (sum, n) = (sum as f64, followers as f64);
        match self.discounts[k] {
            Some(d) => (if a > 0 { (a as f64 - d) / sum } else { 0.0 }, d * n / sum),
            None => (a as f64 / (sum + n), n / (sum + n)),
        }
    }
}

pub fn grams_to_strings(words: &[&str]) -> Gram {
    words.iter().map(|w| w.to_string()).collect()
}

/// A frame path that must collapse to `tokens`: every token repeated one or
/// more times, blanks sprinkled in, and at least one blank between equal
/// neighbours.
pub fn random_expansion<R: Rng>(rng: &mut R, tokens: &[usize], blank: usize) -> Vec<usize> {
    let mut path = Vec::new();
    let blanks = |rng: &mut R, path: &mut Vec<usize>, min: usize| {
        for _ in 0..min + rng.random_range(0..3usize) {
            path.push(blank);
        }
    };
    blanks(rng, &mut path, 0);
    for (i, &t) in tokens.iter().enumerate() {
        for _ in 0..rng.random_range(1..4usize) {
            path.push(t);
        }
        let min = usize::from(tokens.get(i + 1) == Some(&t));
        blanks(rng, &mut path, min);
    }
    path
}
