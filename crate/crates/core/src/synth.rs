//! Synthetic corpora with known structure, used by tests, benches and the
//! acceptance suite.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::corpus::{Gender, ProfilingCorpus, ProfilingDocument, TokenRecord, TokenSentence};

pub const AGE_LABELS: [&str; 3] = ["10s", "20s", "30s"];

const MALE_POOL: usize = 30;
const FEMALE_POOL: usize = 100000;
const AGE_POOL: usize = 8;

fn word(prefix: &str, i: usize) -> String {
    format!("{prefix}{i}")
}

/// Profiling corpus whose two genders use disjoint vocabularies.
///
/// Male authors draw from a small shared vocabulary, so their documents
/// overlap heavily; female authors draw from a large one and rarely share
/// terms. Each document also carries a few words from a gender-specific
/// vocabulary of its age group. Genders alternate and age groups cycle, so
/// any `n >= 6` contains every (gender, age) cell. Some raw texts contain
/// mentions, URLs and markup for the cleaner to remove.
pub fn profiling_corpus(n: usize, seed: u64) -> ProfilingCorpus {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut docs = Vec::with_capacity(n);
    for i in 0..n {
        let gender = if i % 2 == 0 { Gender::Male } else { Gender::Female };
        let age = (i / 2) % AGE_LABELS.len();
        let len = rng.gen_range(40..70);
        let (prefix, pool) = match gender {
            Gender::Male => ("ma", MALE_POOL),
            Gender::Female => ("fe", FEMALE_POOL),
        };
        let age_prefix = match gender {
            Gender::Male => format!("mage{age}x"),
            Gender::Female => format!("fage{age}x"),
        };
        let mut words: Vec<String> = (0..len).map(|_| word(prefix, rng.gen_range(0..pool))).collect();
        for _ in 0..rng.gen_range(3..8) {
            words.push(word(&age_prefix, rng.gen_range(0..AGE_POOL)));
        }
        words.shuffle(&mut rng);
        let mut text = words.join(" ");
        match i % 5 {
            0 => text.push_str(" http://example.com/p?id=1"),
            1 => text.insert_str(0, "@someone "),
            2 => text.push_str(" <br/> ."),
            _ => {}
        }
        docs.push(
            ProfilingDocument::new(format!("doc{i:04}"), text, gender, AGE_LABELS[age])
                .expect("synthetic documents are non-empty"),
        );
    }
    ProfilingCorpus::new(docs, AGE_LABELS.iter().map(|s| s.to_string()).collect(), "synthetic")
        .expect("valid synthetic corpus")
}

pub const NAMES: [&str; 24] = [
    "Alice", "Bob", "Carol", "Dave", "Erin", "Frank", "Grace", "Heidi", "Ivan", "Judy", "Mallory",
    "Oscar", "Peggy", "Rupert", "Sybil", "Trent", "Victor", "Walter", "Yusuf", "Zoe", "Priya",
    "Kumar", "Lakshmi", "Arjun",
];

const WORDS: [(&str, &str); 24] = [
    ("the", "DT"), ("a", "DT"), ("met", "VBD"), ("saw", "VBD"), ("likes", "VBZ"), ("with", "IN"),
    ("and", "CC"), ("at", "IN"), ("home", "NN"), ("game", "NN"), ("today", "NN"), ("tweet", "NN"),
    ("great", "JJ"), ("new", "JJ"), ("called", "VBD"), ("from", "IN"), ("match", "NN"),
    ("after", "IN"), ("watching", "VBG"), ("lol", "UH"), ("#win", "HT"), ("2014", "CD"),
    ("fan", "NN"), ("!", "."),
];

/// Sentences where every capitalized token is a single-token `B-PER` and
/// every other token is `O`. Names come from the first `n_names` entries of
/// [`NAMES`], so a test split can include names never seen in training.
pub fn capitalization_corpus(n_sentences: usize, n_names: usize, seed: u64) -> Vec<TokenSentence> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let n_names = n_names.clamp(1, NAMES.len());
    (0..n_sentences)
        .map(|_| {
            let len = rng.gen_range(4..11);
            let tokens = (0..len)
                .map(|_| {
                    if rng.gen_bool(0.3) {
                        let name = NAMES[rng.gen_range(0..n_names)];
                        TokenRecord::new(name, "NNP", "B-NP", &["B-PER"])
                    } else {
                        let (w, pos) = WORDS[rng.gen_range(0..WORDS.len())];
                        TokenRecord::new(w, pos, "O", &["O"])
                    }
                })
                .collect();
            TokenSentence::new(tokens)
        })
        .collect()
}

/// The three-level example sentence: "Chicago Bears Football Fan".
pub fn three_level_fragment() -> TokenSentence {
    TokenSentence::new(vec![
        TokenRecord::new("Chicago", "NNP", "B-NP", &["B-Person", "B-Association", "B-Location"]),
        TokenRecord::new("Bears", "NNPS", "I-NP", &["I-Person", "I-Association", "B-Nonhuman"]),
        TokenRecord::new("Football", "NN", "I-NP", &["I-Person", "I-Association", "B-Sports"]),
        TokenRecord::new("Fan", "NN", "I-NP", &["I-Person", "O", "O"]),
    ])
}

/// A small three-level corpus that a CRF can memorize.
pub fn nested_corpus() -> Vec<TokenSentence> {
    let mut out = vec![three_level_fragment()];
    let rows: [&[(&str, &str, [&str; 3])]; 3] = [
        &[
            ("He", "PRP", ["O", "O", "O"]),
            ("works", "VBZ", ["O", "O", "O"]),
            ("at", "IN", ["O", "O", "O"]),
            ("Government", "NNP", ["B-Organization", "O", "O"]),
            ("of", "IN", ["I-Organization", "O", "O"]),
            ("India", "NNP", ["I-Organization", "B-Location", "O"]),
        ],
        &[
            ("Seeta", "NNP", ["B-Person", "O", "O"]),
            ("visited", "VBD", ["O", "O", "O"]),
            ("Coimbatore", "NNP", ["B-Location", "B-City", "O"]),
            ("today", "NN", ["O", "O", "O"]),
        ],
        &[
            ("Amrita", "NNP", ["B-Organization", "B-Person", "O"]),
            ("University", "NNP", ["I-Organization", "O", "O"]),
            ("is", "VBZ", ["O", "O", "O"]),
            ("in", "IN", ["O", "O", "O"]),
            ("Coimbatore", "NNP", ["B-Location", "B-City", "O"]),
        ],
    ];
    for sent in rows {
        out.push(TokenSentence::new(
            sent.iter()
                .map(|(w, p, t)| TokenRecord::new(w, p, "O", t))
                .collect(),
        ));
    }
    out
}
