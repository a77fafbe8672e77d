//! ARPA text format.

use std::collections::HashSet;
use std::io::{BufRead, Write};

use super::model::NGramModel;
use super::LmError;

/// Write the model with n-grams sorted lexicographically by words.
/// Backoff weights are written for every order below the highest.
pub fn write_arpa<W: Write>(model: &NGramModel, mut sink: W) -> std::io::Result<()> {
    writeln!(sink, "\\data\\")?;
    for k in 1..=model.order() {
        writeln!(sink, "ngram {}={}", k, model.len(k))?;
    }
    for k in 1..=model.order() {
        writeln!(sink)?;
        writeln!(sink, "\\{k}-grams:")?;
        let mut rows: Vec<(Vec<&str>, f32, f32)> = model
            .entries(k)
            .map(|(g, e)| {
                let words = g.iter().map(|&w| model.vocab().word(w)).collect();
                (words, e.prob, e.backoff)
            })
            .collect();
        rows.sort_by(|a, b| a.0.cmp(&b.0));
        for (words, prob, backoff) in rows {
            if k < model.order() {
                writeln!(sink, "{}\t{}\t{}", prob, words.join(" "), backoff)?;
            } else {
                writeln!(sink, "{}\t{}", prob, words.join(" "))?;
            }
        }
    }
    writeln!(sink)?;
    writeln!(sink, "\\end\\")?;
    Ok(())
}

pub fn write_arpa_string(model: &NGramModel) -> String {
    let mut buf = Vec::new();
    write_arpa(model, &mut buf).expect("writing to memory");
    String::from_utf8(buf).expect("ARPA output is UTF-8")
}

#[derive(PartialEq)]
enum Section {
    Preamble,
    Header,
    Grams(usize),
    End,
}

/// Parse ARPA text. Anything before `\data\` is ignored.
pub fn read_arpa<R: BufRead>(source: R) -> Result<NGramModel, LmError> {
    let malformed = |line: usize, reason: String| LmError::MalformedArpa { line, reason };
    let mut declared: Vec<usize> = Vec::new();
    let mut entries: Vec<Vec<(Vec<String>, f32, f32)>> = Vec::new();
    let mut section = Section::Preamble;
    let mut last_line = 0;
    let mut unigram_words: HashSet<String> = HashSet::new();

    for (n, line) in source.lines().enumerate() {
        let line_no = n + 1;
        last_line = line_no;
        let line = line.map_err(|e| malformed(line_no, e.to_string()))?;
        let line = line.trim();
        if section == Section::Preamble {
            if line == "\\data\\" {
                section = Section::Header;
            }
            continue;
        }
        if line.is_empty() {
            continue;
        }
        if section == Section::End {
            return Err(malformed(line_no, "content after \\end\\".into()));
        }
        if line == "\\end\\" {
            section = Section::End;
            continue;
        }
        if let Some(k) = line.strip_prefix('\\').and_then(|s| s.strip_suffix("-grams:")) {
            let k: usize =
                k.parse().map_err(|_| malformed(line_no, format!("bad section header {line:?}")))?;
            let expected = match section {
                Section::Header => 1,
                Section::Grams(prev) => prev + 1,
                _ => unreachable!(),
            };
            if k != expected || k > declared.len() {
                return Err(malformed(line_no, format!("unexpected section \\{k}-grams:")));
            }
            entries.push(Vec::new());
            section = Section::Grams(k);
            continue;
        }
        match section {
            Section::Header => {
                let rest = line
                    .strip_prefix("ngram ")
                    .ok_or_else(|| malformed(line_no, format!("expected `ngram k=n`, got {line:?}")))?;
                let (k, count) =
                    rest.split_once('=').ok_or_else(|| malformed(line_no, "missing `=`".into()))?;
                let k: usize = k.trim().parse().map_err(|_| malformed(line_no, "bad order".into()))?;
                let count: usize =
                    count.trim().parse().map_err(|_| malformed(line_no, "bad count".into()))?;
                if k != declared.len() + 1 {
                    return Err(malformed(line_no, format!("order {k} out of sequence")));
                }
                declared.push(count);
            }
            Section::Grams(k) => {
                let fields: Vec<&str> = line.split_whitespace().collect();
                let has_backoff = match fields.len() {
                    n if n == k + 1 => false,
                    n if n == k + 2 => true,
                    _ => {
                        return Err(malformed(
                            line_no,
                            format!("expected {} or {} fields for a {k}-gram", k + 1, k + 2),
                        ))
                    }
                };
                let parse = |s: &str| -> Result<f32, LmError> {
                    let v: f32 = s.parse().map_err(|_| malformed(line_no, format!("bad number {s:?}")))?;
                    if !v.is_finite() {
                        return Err(malformed(line_no, format!("non-finite value {s:?}")));
                    }
                    Ok(v)
                };
                let prob = parse(fields[0])?;
                if prob > 0.0 {
                    return Err(malformed(line_no, format!("positive log probability {prob}")));
                }
                let backoff = if has_backoff { parse(fields[k + 1])? } else { 0.0 };
                let words: Vec<String> = fields[1..=k].iter().map(|s| s.to_string()).collect();
                if k > 1 {
                    if let Some(w) = words.iter().find(|w| !unigram_words.contains(w.as_str())) {
                        return Err(malformed(line_no, format!("word {w:?} has no unigram")));
                    }
                } else {
                    unigram_words.insert(words[0].clone());
                }
                entries[k - 1].push((words, prob, backoff));
            }
            _ => unreachable!(),
        }
    }

    if section != Section::End {
        return Err(malformed(last_line + 1, "missing \\end\\".into()));
    }
    if declared.is_empty() {
        return Err(malformed(last_line, "no ngram counts in header".into()));
    }
    if entries.len() != declared.len() {
        return Err(malformed(
            last_line,
            format!("header declares {} orders, found {}", declared.len(), entries.len()),
        ));
    }
    for (k, (table, &count)) in entries.iter().zip(&declared).enumerate() {
        if table.len() != count {
            return Err(LmError::CountMismatch { order: k + 1, declared: count, found: table.len() });
        }
    }
    NGramModel::from_entries(entries)
}

pub fn read_arpa_str(text: &str) -> Result<NGramModel, LmError> {
    read_arpa(text.as_bytes())
}
