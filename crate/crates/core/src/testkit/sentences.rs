use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const PEOPLE: &[&str] = &[
    "mamka",
    "otec",
    "brat",
    "sestra",
    "sused",
    "suseda",
    "učiteľka",
    "kuchár",
    "dievča",
    "chlapec",
    "lekárka",
    "predavač",
    "babka",
    "dedko",
];

const VERBS_3SG: &[&str] = &[
    "kupuje",
    "varí",
    "nesie",
    "hľadá",
    "vidí",
    "má",
    "chce",
    "potrebuje",
    "berie",
    "predáva",
    "umýva",
    "pripravuje",
    "ponúka",
    "dáva",
];

const VERBS_1PL: &[&str] = &[
    "kupujeme",
    "varíme",
    "nesieme",
    "hľadáme",
    "vidíme",
    "máme",
    "chceme",
    "potrebujeme",
    "berieme",
    "predávame",
];

const OBJECTS: &[&str] = &[
    "chlieb",
    "mlieko",
    "džús",
    "mäso",
    "syr",
    "jablko",
    "tašku",
    "kľúče",
    "dzbán",
    "kvety",
    "polievku",
    "rožky",
    "čaj",
    "kávu",
    "vajíčka",
    "hrušky",
    "ryžu",
    "zeleninu",
];

const PLACES: &[&str] = &[
    "v obchode",
    "doma",
    "na trhu",
    "v kuchyni",
    "pri dome",
    "v meste",
    "na záhrade",
    "v škole",
    "na chodbe",
    "v pivnici",
    "na dvore",
    "pod stolom",
];

const TIMES: &[&str] =
    &["dnes", "ráno", "večer", "zajtra", "včera", "teraz", "potom", "každý deň", "v nedeľu", "po obede"];

const ADJECTIVES: &[&str] =
    &["starý", "mladý", "veselý", "smutný", "dobrý", "unavený", "múdry", "tichý", "hladný", "šťastný"];

const MANNER: &[&str] = &["rýchlo", "pomaly", "potichu", "rád", "často", "zriedka", "opatrne", "ochotne"];

const TALK: &[&str] = &["spieva", "rozpráva", "číta", "píše", "beží", "pracuje", "odpočíva", "čaká"];

/// Generates short Slovak sentences from a handful of templates. The
/// vocabulary is closed and every word is a valid Slovak spelling, covering
/// the digraphs and most diacritics.
#[derive(Debug, Clone, Default)]
pub struct SentenceGenerator;

impl SentenceGenerator {
    pub fn slovak() -> Self {
        SentenceGenerator
    }

    pub fn sentence<R: Rng + ?Sized>(&self, rng: &mut R) -> String {
        let pick = |list: &[&'static str], rng: &mut R| -> &'static str { list.choose(rng).unwrap() };
        let parts: Vec<&str> = match rng.random_range(0..5) {
            0 => vec![pick(PEOPLE, rng), pick(VERBS_3SG, rng), pick(OBJECTS, rng), pick(PLACES, rng)],
            1 => vec![pick(TIMES, rng), pick(PEOPLE, rng), pick(VERBS_3SG, rng), pick(OBJECTS, rng)],
            2 => vec!["my", pick(VERBS_1PL, rng), pick(OBJECTS, rng), pick(TIMES, rng)],
            3 => vec![pick(ADJECTIVES, rng), pick(PEOPLE, rng), pick(MANNER, rng), pick(TALK, rng)],
            _ => vec![pick(PEOPLE, rng), pick(TALK, rng), pick(PLACES, rng), pick(TIMES, rng)],
        };
        parts.join(" ")
    }

    /// `n` sentences from a seeded generator.
    pub fn corpus(&self, n: usize, seed: u64) -> Vec<String> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n).map(|_| self.sentence(&mut rng)).collect()
    }

    /// Every word the generator can produce, sorted.
    pub fn vocabulary(&self) -> Vec<&'static str> {
        let mut words: Vec<&str> =
            [PEOPLE, VERBS_3SG, VERBS_1PL, OBJECTS, PLACES, TIMES, ADJECTIVES, MANNER, TALK]
                .iter()
                .flat_map(|list| list.iter().flat_map(|p| p.split(' ')))
                .chain(["my"])
                .collect();
        words.sort_unstable();
        words.dedup();
        words
    }
}
