use std::io::BufRead;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::normalize::normalize;

/// One manifest line.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ManifestEntry {
    pub id: String,
    /// CTCE file, relative to the manifest's directory.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub emissions: Option<String>,
    pub duration_s: f64,
    pub text: String,
}

/// Read a JSON-lines manifest. Blank lines are skipped.
pub fn read_manifest<R: BufRead>(reader: R) -> Result<Vec<ManifestEntry>, EvalError> {
    let mut out = Vec::new();
    for (n, line) in reader.lines().enumerate() {
        let line_no = n + 1;
        let line = line.map_err(|e| EvalError::Io(e.to_string()))?;
        if line.trim().is_empty() {
            continue;
        }
        let entry: ManifestEntry = serde_json::from_str(&line)
            .map_err(|e| EvalError::MalformedManifest { line: line_no, reason: e.to_string() })?;
        if !(entry.duration_s >= 0.0 && entry.duration_s.is_finite()) {
            return Err(EvalError::MalformedManifest {
                line: line_no,
                reason: format!("duration_s must be a non-negative number, got {}", entry.duration_s),
            });
        }
        out.push(entry);
    }
    Ok(out)
}

pub fn read_manifest_file(path: impl AsRef<Path>) -> Result<Vec<ManifestEntry>, EvalError> {
    let file = std::fs::File::open(path).map_err(|e| EvalError::Io(e.to_string()))?;
    read_manifest(std::io::BufReader::new(file))
}

/// Corpus size in the shape of a dataset statistics table.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CorpusStats {
    pub hours: f64,
    pub utterances: usize,
    /// Words of the normalized transcripts.
    pub words: usize,
}

impl CorpusStats {
    /// Hours to one decimal, utterances with space-grouped thousands,
    /// words in thousands to one decimal.
    pub fn table_cells(&self) -> [String; 3] {
        let digits = self.utterances.to_string();
        let mut grouped = String::new();
        for (i, c) in digits.chars().enumerate() {
            if i > 0 && (digits.len() - i).is_multiple_of(3) {
                grouped.push(' ');
            }
            grouped.push(c);
        }
        [format!("{:.1}", self.hours), grouped, format!("{:.1}", self.words as f64 / 1000.0)]
    }
}

impl std::fmt::Display for CorpusStats {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let [hours, utterances, words] = self.table_cells();
        write!(f, "hours\t{hours}\nutterances\t{utterances}\nwords (k)\t{words}")
    }
}

pub fn corpus_stats(entries: &[ManifestEntry]) -> CorpusStats {
    CorpusStats {
        hours: entries.iter().map(|e| e.duration_s).sum::<f64>() / 3600.0,
        utterances: entries.len(),
        words: entries.iter().map(|e| normalize(&e.text).split_whitespace().count()).sum(),
    }
}
