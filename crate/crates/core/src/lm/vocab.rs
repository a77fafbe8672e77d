use rustc_hash::FxHashMap;

pub type WordId = u32;

pub const UNK: &str = "<unk>";
pub const BOS: &str = "<s>";
pub const EOS: &str = "</s>";

pub const UNK_ID: WordId = 0;
pub const BOS_ID: WordId = 1;
pub const EOS_ID: WordId = 2;

/// Word interner. Ids 0..3 are reserved for `<unk>`, `<s>`, `</s>`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Vocab {
    words: Vec<String>,
    index: FxHashMap<String, WordId>,
}

impl Default for Vocab {
    fn default() -> Self {
        let mut v = Vocab { words: Vec::new(), index: FxHashMap::default() };
        for w in [UNK, BOS, EOS] {
            v.intern(w);
        }
        v
    }
}

impl Vocab {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn intern(&mut self, word: &str) -> WordId {
        if let Some(&id) = self.index.get(word) {
            return id;
        }
        let id = self.words.len() as WordId;
        self.words.push(word.to_string());
        self.index.insert(word.to_string(), id);
        id
    }

    pub fn get(&self, word: &str) -> Option<WordId> {
        self.index.get(word).copied()
    }

    /// Id of `word`, or `<unk>` when out of vocabulary.
    pub fn id_or_unk(&self, word: &str) -> WordId {
        self.get(word).unwrap_or(UNK_ID)
    }

    pub fn word(&self, id: WordId) -> &str {
        &self.words[id as usize]
    }

    pub fn len(&self) -> usize {
        self.words.len()
    }

    pub fn is_empty(&self) -> bool {
        self.words.is_empty()
    }

    pub fn words(&self) -> impl Iterator<Item = &str> {
        self.words.iter().map(String::as_str)
    }
}
