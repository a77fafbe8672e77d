//! Czech and Slovak grapheme inventories.
//!
//! Every alphabet carries its letters plus two reserved labels: the CTC
//! blank and the word separator (space). Digraphs (`ch`, `dz`, `dž`) are
//! single graphemes and are matched longest-first when tokenizing.

use std::collections::HashSet;
use std::fmt;
use std::path::Path;
use std::str::FromStr;

use rustc_hash::FxHashMap;
use thiserror::Error;

/// Debug rendering of the blank label. Never appears in transcripts.
pub const BLANK_SYMBOL: &str = "⟨b⟩";
pub const SPACE_SYMBOL: &str = " ";

const CS_LETTERS: [&str; 42] = [
    "a", "á", "b", "c", "č", "d", "ď", "e", "é", "ě", "f", "g", "h", "ch", "i", "í", "j", "k", "l", "m", "n",
    "ň", "o", "ó", "p", "q", "r", "ř", "s", "š", "t", "ť", "u", "ú", "ů", "v", "w", "x", "y", "ý", "z", "ž",
];

const SK_LETTERS: [&str; 46] = [
    "a", "á", "ä", "b", "c", "č", "d", "ď", "dz", "dž", "e", "é", "f", "g", "h", "ch", "i", "í", "j", "k",
    "l", "ĺ", "ľ", "m", "n", "ň", "o", "ó", "ô", "p", "q", "r", "ŕ", "s", "š", "t", "ť", "u", "ú", "v", "w",
    "x", "y", "ý", "z", "ž",
];

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum AlphabetError {
    #[error("unknown character {character:?} at position {position}")]
    UnknownCharacter { position: usize, character: char },
    #[error("blank label at position {0} cannot be rendered")]
    BlankInSequence(usize),
    #[error("label index {index} out of range for {len} labels")]
    InvalidIndex { index: usize, len: usize },
    #[error("unknown language {0:?}")]
    UnknownLanguage(String),
    #[error("alphabet file line {line}: {reason}")]
    Malformed { line: usize, reason: String },
    #[error("alphabet file: {0}")]
    Io(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Language {
    Czech,
    Slovak,
}

impl Language {
    pub fn code(self) -> &'static str {
        match self {
            Language::Czech => "cs",
            Language::Slovak => "sk",
        }
    }

    fn letters(self) -> &'static [&'static str] {
        match self {
            Language::Czech => &CS_LETTERS,
            Language::Slovak => &SK_LETTERS,
        }
    }
}

impl fmt::Display for Language {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())
    }
}

impl FromStr for Language {
    type Err = AlphabetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "cs" => Ok(Language::Czech),
            "sk" => Ok(Language::Slovak),
            other => Err(AlphabetError::UnknownLanguage(other.to_string())),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GraphemeKind {
    BasicLatin,
    Diacritic,
    Digraph,
    Space,
    Blank,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Grapheme {
    symbol: String,
    kind: GraphemeKind,
}

impl Grapheme {
    fn letter(symbol: &str) -> Self {
        let kind = match symbol.chars().count() {
            2 => GraphemeKind::Digraph,
            _ if symbol.chars().all(|c| c.is_ascii_lowercase()) => GraphemeKind::BasicLatin,
            _ => GraphemeKind::Diacritic,
        };
        Grapheme { symbol: symbol.to_string(), kind }
    }

    fn blank() -> Self {
        Grapheme { symbol: BLANK_SYMBOL.to_string(), kind: GraphemeKind::Blank }
    }

    fn space() -> Self {
        Grapheme { symbol: SPACE_SYMBOL.to_string(), kind: GraphemeKind::Space }
    }

    pub fn symbol(&self) -> &str {
        &self.symbol
    }

    pub fn kind(&self) -> GraphemeKind {
        self.kind
    }

    pub fn is_letter(&self) -> bool {
        !matches!(self.kind, GraphemeKind::Blank | GraphemeKind::Space)
    }
}

/// A label inventory usable by the CTC decoders.
///
/// Implemented by [`Alphabet`] and by [`SymbolTable`], which allows small
/// ad-hoc label sets for exhaustive testing.
pub trait Labels {
    fn len(&self) -> usize;
    fn blank(&self) -> usize;
    /// Index of the word separator, if the inventory has one.
    fn space(&self) -> Option<usize>;
    fn symbol(&self, index: usize) -> &str;

    fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Concatenate the symbols of a collapsed label sequence.
    fn render(&self, indices: &[usize]) -> Result<String, AlphabetError> {
        let mut out = String::new();
        for (position, &index) in indices.iter().enumerate() {
            if index >= self.len() {
                return Err(AlphabetError::InvalidIndex { index, len: self.len() });
            }
            if index == self.blank() {
                return Err(AlphabetError::BlankInSequence(position));
            }
            out.push_str(self.symbol(index));
        }
        Ok(out)
    }
}

/// Fixed grapheme inventory of one language plus blank and space.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Alphabet {
    language: Language,
    graphemes: Vec<Grapheme>,
    blank_index: usize,
    space_index: usize,
    singles: FxHashMap<char, usize>,
    digraphs: FxHashMap<(char, char), usize>,
}

impl Alphabet {
    /// Built-in inventory: blank at index 0, space at 1, then the letters
    /// in dictionary order.
    pub fn new(language: Language) -> Self {
        let mut graphemes = vec![Grapheme::blank(), Grapheme::space()];
        graphemes.extend(language.letters().iter().map(|s| Grapheme::letter(s)));
        Self::from_parts(language, graphemes, 0, 1)
    }

    fn from_parts(
        language: Language,
        graphemes: Vec<Grapheme>,
        blank_index: usize,
        space_index: usize,
    ) -> Self {
        let mut singles = FxHashMap::default();
        let mut digraphs = FxHashMap::default();
        for (index, g) in graphemes.iter().enumerate() {
            let mut chars = g.symbol.chars();
            match g.kind {
                GraphemeKind::Blank => {}
                GraphemeKind::Space => {
                    singles.insert(' ', index);
                }
                GraphemeKind::Digraph => {
                    let (a, b) = (chars.next().unwrap(), chars.next().unwrap());
                    digraphs.insert((a, b), index);
                }
                _ => {
                    singles.insert(chars.next().unwrap(), index);
                }
            }
        }
        Alphabet { language, graphemes, blank_index, space_index, singles, digraphs }
    }

    pub fn language(&self) -> Language {
        self.language
    }

    pub fn graphemes(&self) -> &[Grapheme] {
        &self.graphemes
    }

    pub fn blank_index(&self) -> usize {
        self.blank_index
    }

    pub fn space_index(&self) -> usize {
        self.space_index
    }

    /// Number of letters, excluding blank and space.
    pub fn letter_count(&self) -> usize {
        self.graphemes.iter().filter(|g| g.is_letter()).count()
    }

    pub fn index_of(&self, symbol: &str) -> Option<usize> {
        self.graphemes.iter().position(|g| g.symbol == symbol)
    }

    pub fn contains(&self, symbol: &str) -> bool {
        self.index_of(symbol).is_some()
    }

    /// Split normalized text into grapheme indices, preferring digraphs.
    pub fn tokenize(&self, text: &str) -> Result<Vec<usize>, AlphabetError> {
        let chars: Vec<char> = text.chars().collect();
        let mut out = Vec::with_capacity(chars.len());
        let mut i = 0;
        while i < chars.len() {
            if let Some(&next) = chars.get(i + 1) {
                if let Some(&index) = self.digraphs.get(&(chars[i], next)) {
                    out.push(index);
                    i += 2;
                    continue;
                }
            }
            match self.singles.get(&chars[i]) {
                Some(&index) => out.push(index),
                None => return Err(AlphabetError::UnknownCharacter { position: i, character: chars[i] }),
            }
            i += 1;
        }
        Ok(out)
    }

    pub fn detokenize(&self, indices: &[usize]) -> Result<String, AlphabetError> {
        self.render(indices)
    }

    /// Serialize as one symbol per line, `#blank` / `#space` marking the
    /// reserved indices. The first line names the language.
    pub fn to_file_string(&self) -> String {
        let mut out = format!("#language {}\n", self.language);
        for g in &self.graphemes {
            match g.kind {
                GraphemeKind::Blank => out.push_str("#blank"),
                GraphemeKind::Space => out.push_str("#space"),
                _ => out.push_str(&g.symbol),
            }
            out.push('\n');
        }
        out
    }

    /// Parse the format produced by [`Alphabet::to_file_string`].
    ///
    /// Only canonical files are accepted, so that writing a parsed file
    /// reproduces it byte for byte. The letter set must equal the built-in
    /// inventory of the declared language; the order is free.
    pub fn from_file_str(text: &str) -> Result<Self, AlphabetError> {
        let malformed =
            |line: usize, reason: &str| AlphabetError::Malformed { line, reason: reason.to_string() };
        if text.contains('\r') {
            return Err(malformed(1, "carriage returns are not allowed"));
        }
        if !text.ends_with('\n') {
            return Err(malformed(text.lines().count().max(1), "missing final newline"));
        }
        let mut lines = text[..text.len() - 1].split('\n').enumerate();
        let language = match lines.next() {
            Some((_, header)) => match header.strip_prefix("#language ") {
                Some(code) => code.parse::<Language>().map_err(|e| malformed(1, &e.to_string()))?,
                None => return Err(malformed(1, "expected `#language <code>` header")),
            },
            None => return Err(malformed(1, "empty file")),
        };

        let mut graphemes = Vec::new();
        let mut blank_index = None;
        let mut space_index = None;
        let mut seen = HashSet::new();
        for (n, line) in lines {
            let line_no = n + 1;
            let g = match line {
                "#blank" => {
                    if blank_index.replace(graphemes.len()).is_some() {
                        return Err(malformed(line_no, "duplicate #blank"));
                    }
                    Grapheme::blank()
                }
                "#space" => {
                    if space_index.replace(graphemes.len()).is_some() {
                        return Err(malformed(line_no, "duplicate #space"));
                    }
                    Grapheme::space()
                }
                "" => return Err(malformed(line_no, "empty line")),
                s if s.starts_with('#') => {
                    return Err(malformed(line_no, "unknown directive"));
                }
                s => {
                    if !language.letters().contains(&s) {
                        return Err(malformed(line_no, &format!("{s:?} is not a {language} letter")));
                    }
                    if !seen.insert(s.to_string()) {
                        return Err(malformed(line_no, &format!("duplicate symbol {s:?}")));
                    }
                    Grapheme::letter(s)
                }
            };
            graphemes.push(g);
        }
        let total = text.lines().count();
        let blank_index = blank_index.ok_or_else(|| malformed(total, "missing #blank"))?;
        let space_index = space_index.ok_or_else(|| malformed(total, "missing #space"))?;
        if seen.len() != language.letters().len() {
            return Err(malformed(
                total,
                &format!(
                    "expected {} letters for {language}, found {}",
                    language.letters().len(),
                    seen.len()
                ),
            ));
        }
        Ok(Self::from_parts(language, graphemes, blank_index, space_index))
    }

    pub fn read_file(path: impl AsRef<Path>) -> Result<Self, AlphabetError> {
        let text = std::fs::read_to_string(path).map_err(|e| AlphabetError::Io(e.to_string()))?;
        Self::from_file_str(&text)
    }

    pub fn write_file(&self, path: impl AsRef<Path>) -> Result<(), AlphabetError> {
        std::fs::write(path, self.to_file_string()).map_err(|e| AlphabetError::Io(e.to_string()))
    }

    /// Debug view of a raw frame path, blanks shown as `⟨b⟩`.
    pub fn debug_path(&self, path: &[usize]) -> String {
        path.iter()
            .map(|&i| self.graphemes.get(i).map_or("?", |g| g.symbol.as_str()))
            .collect::<Vec<_>>()
            .join("|")
    }
}

impl Labels for Alphabet {
    fn len(&self) -> usize {
        self.graphemes.len()
    }

    fn blank(&self) -> usize {
        self.blank_index
    }

    fn space(&self) -> Option<usize> {
        Some(self.space_index)
    }

    fn symbol(&self, index: usize) -> &str {
        &self.graphemes[index].symbol
    }
}

/// An arbitrary label set, mostly for small exhaustive decoding problems.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymbolTable {
    symbols: Vec<String>,
    blank: usize,
    space: Option<usize>,
}

impl SymbolTable {
    /// `symbols[blank]` is ignored for rendering; the space symbol, if any,
    /// must be `" "`.
    pub fn new<S: Into<String>>(
        symbols: impl IntoIterator<Item = S>,
        blank: usize,
        space: Option<usize>,
    ) -> Self {
        let symbols: Vec<String> = symbols.into_iter().map(Into::into).collect();
        assert!(blank < symbols.len(), "blank index out of range");
        if let Some(s) = space {
            assert_ne!(s, blank, "space and blank must differ");
            assert_eq!(symbols[s], SPACE_SYMBOL, "space label must render as a single space");
        }
        SymbolTable { symbols, blank, space }
    }
}

impl Labels for SymbolTable {
    fn len(&self) -> usize {
        self.symbols.len()
    }

    fn blank(&self) -> usize {
        self.blank
    }

    fn space(&self) -> Option<usize> {
        self.space
    }

    fn symbol(&self, index: usize) -> &str {
        &self.symbols[index]
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LabelDisposition {
    /// Reuse the output row of this source label.
    Mapped(usize),
    /// No counterpart in the source; the row must be freshly initialized.
    NewLabel,
}

/// Per-label correspondence between two alphabets, used when an output
/// layer trained on one language is re-targeted at the other.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct LabelTransferMap {
    pub source_language: Language,
    pub target_language: Language,
    /// Indexed by target label.
    pub mapping: Vec<LabelDisposition>,
    /// Source symbols with no target counterpart.
    pub dropped: Vec<String>,
}

impl LabelTransferMap {
    pub fn new_labels<'a>(&'a self, target: &'a Alphabet) -> impl Iterator<Item = &'a str> + 'a {
        self.mapping
            .iter()
            .zip(target.graphemes())
            .filter(|(d, _)| **d == LabelDisposition::NewLabel)
            .map(|(_, g)| g.symbol())
    }

    pub fn shared_count(&self) -> usize {
        self.mapping.iter().filter(|d| matches!(d, LabelDisposition::Mapped(_))).count()
    }
}

pub fn build_transfer_map(source: &Alphabet, target: &Alphabet) -> LabelTransferMap {
    let mapping = target
        .graphemes()
        .iter()
        .map(|g| match g.kind {
            GraphemeKind::Blank => LabelDisposition::Mapped(source.blank_index),
            GraphemeKind::Space => LabelDisposition::Mapped(source.space_index),
            _ => source.index_of(&g.symbol).map_or(LabelDisposition::NewLabel, LabelDisposition::Mapped),
        })
        .collect();
    let dropped = source
        .graphemes()
        .iter()
        .filter(|g| g.is_letter() && !target.contains(&g.symbol))
        .map(|g| g.symbol.clone())
        .collect();
    LabelTransferMap { source_language: source.language, target_language: target.language, mapping, dropped }
}
