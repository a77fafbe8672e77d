//! Transcript normalization: lowercase, no punctuation, no non-speech
//! events, single spaces.

use std::collections::BTreeSet;
use std::path::Path;

use serde::{Deserialize, Serialize};
use thiserror::Error;
use unicode_normalization::UnicodeNormalization;

#[derive(Debug, Error)]
pub enum RulesError {
    #[error("letter {0:?} cannot be listed as punctuation or separator")]
    LetterInPunctuation(char),
    #[error("bracket pair ({0:?}, {1:?}) uses the same character twice")]
    DegenerateBrackets(char, char),
    #[error("rules file: {0}")]
    Parse(String),
}

/// Configurable normalization rules.
///
/// Apostrophes are plain punctuation and are deleted without splitting the
/// word (`d'Artagnan` becomes `dartagnan`).
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NormalizationRules {
    /// Deleted outright.
    pub punctuation: BTreeSet<char>,
    /// Replaced by a space (hyphens, dashes, slashes).
    pub separators: BTreeSet<char>,
    /// Bracketed spans removed whole, e.g. `[kašeľ]` or `<noise>`.
    pub nonspeech_brackets: Vec<(char, char)>,
}

impl Default for NormalizationRules {
    fn default() -> Self {
        NormalizationRules {
            punctuation: ".,!?;:\"'`´„“”‚‘’«»‹›…()[]{}<>*_~^|\\@#$%&+=§¡¿".chars().collect(),
            separators: "-‐‑‒–—―/".chars().collect(),
            nonspeech_brackets: vec![('[', ']'), ('<', '>'), ('(', ')')],
        }
    }
}

impl NormalizationRules {
    pub fn validate(&self) -> Result<(), RulesError> {
        if let Some(&c) = self.punctuation.iter().chain(&self.separators).find(|c| c.is_alphabetic()) {
            return Err(RulesError::LetterInPunctuation(c));
        }
        if let Some(&(o, c)) = self.nonspeech_brackets.iter().find(|(o, c)| o == c) {
            return Err(RulesError::DegenerateBrackets(o, c));
        }
        Ok(())
    }

    pub fn from_json(text: &str) -> Result<Self, RulesError> {
        let rules: Self = serde_json::from_str(text).map_err(|e| RulesError::Parse(e.to_string()))?;
        rules.validate()?;
        Ok(rules)
    }

    pub fn from_file(path: impl AsRef<Path>) -> Result<Self, RulesError> {
        let text = std::fs::read_to_string(path).map_err(|e| RulesError::Parse(e.to_string()))?;
        Self::from_json(&text)
    }
}

/// Normalize a raw transcript.
///
/// Steps: lowercase + NFC, drop bracketed non-speech spans, replace
/// separators and whitespace by spaces, delete punctuation, collapse
/// spaces, trim, compose again. The function is idempotent.
pub fn normalize_transcript(raw: &str, rules: &NormalizationRules) -> String {
    let lowered: String = raw.to_lowercase().nfc().collect();
    let chars: Vec<char> = lowered.chars().collect();

    let mut out = String::with_capacity(lowered.len());
    let mut pending_space = false;
    let mut i = 0;
    while i < chars.len() {
        let c = chars[i];
        if let Some(&(_, close)) = rules.nonspeech_brackets.iter().find(|(o, _)| *o == c) {
            if let Some(len) = chars[i + 1..].iter().position(|&x| x == close) {
                i += len + 2;
                pending_space = true;
                continue;
            }
        }
        i += 1;
        if c.is_whitespace() || rules.separators.contains(&c) {
            pending_space = true;
        } else if rules.punctuation.contains(&c) {
            continue;
        } else {
            if pending_space && !out.is_empty() {
                out.push(' ');
            }
            pending_space = false;
            out.push(c);
        }
    }
    // Deleting a character between combining marks can leave them out of
    // canonical order.
    out.nfc().collect()
}

/// Normalize with the default rules.
pub fn normalize(raw: &str) -> String {
    normalize_transcript(raw, &NormalizationRules::default())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn removes_case_punctuation_and_nonspeech() {
        assert_eq!(normalize("Dobrý deň, [kašeľ] ako sa máte?"), "dobrý deň ako sa máte");
        assert_eq!(normalize(""), "");
        assert_eq!(normalize("  <noise>  (smiech) "), "");
    }

    #[test]
    fn hyphens_split_words() {
        assert_eq!(normalize("česko-slovenský"), "česko slovenský");
        assert_eq!(normalize("a - b"), "a b");
    }

    #[test]
    fn apostrophe_joins() {
        assert_eq!(normalize("D'Artagnan"), "dartagnan");
    }

    #[test]
    fn unclosed_bracket_is_punctuation() {
        assert_eq!(normalize("raz [dva"), "raz dva");
    }

    #[test]
    fn digits_pass_through() {
        assert_eq!(normalize("Rok 1993."), "rok 1993");
    }

    #[test]
    fn composes_decomposed_diacritics() {
        // "Ž" as Z + combining caron
        assert_eq!(normalize("Z\u{30c}ena"), "žena");
    }

    #[test]
    fn rules_json_roundtrip_and_validation() {
        let rules = NormalizationRules::default();
        let json = serde_json::to_string(&rules).unwrap();
        assert_eq!(NormalizationRules::from_json(&json).unwrap(), rules);
        assert!(matches!(
            NormalizationRules::from_json(r#"{"punctuation": ["a"]}"#),
            Err(RulesError::LetterInPunctuation('a'))
        ));
        let partial = NormalizationRules::from_json(r#"{"nonspeech_brackets": []}"#).unwrap();
        assert!(partial.nonspeech_brackets.is_empty());
        assert_eq!(partial.punctuation, rules.punctuation);
    }
}
