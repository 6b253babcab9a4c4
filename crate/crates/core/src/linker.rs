//! Dictionary entity linking by unigram dot-product similarity.
//!
//! Knowledge-base file: `surface<TAB>link_id<TAB>description`, one candidate
//! per row. Surfaces are case-folded; rows sharing a surface become
//! candidates of one entry.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::path::Path;

use crate::corpus::{tokenize, TokenSentence};
use crate::error::{read_to_string, Error, Result};
use crate::eval::entities;

pub type UnigramVector = BTreeMap<String, u32>;

/// Case-folded token counts.
pub fn unigram_vector(text: &str) -> UnigramVector {
    unigram_vector_of(tokenize(text).iter().map(String::as_str))
}

pub fn unigram_vector_of<'a>(tokens: impl IntoIterator<Item = &'a str>) -> UnigramVector {
    let mut v = UnigramVector::new();
    for t in tokens {
        for piece in tokenize(t) {
            *v.entry(piece.to_lowercase()).or_insert(0) += 1;
        }
    }
    v
}

pub fn dot_product(a: &UnigramVector, b: &UnigramVector) -> f64 {
    let (small, large) = if a.len() <= b.len() { (a, b) } else { (b, a) };
    small
        .iter()
        .filter_map(|(k, x)| large.get(k).map(|y| f64::from(*x) * f64::from(*y)))
        .sum()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Candidate {
    pub link_id: String,
    pub description: String,
    pub vector: UnigramVector,
}

#[derive(Debug, Clone, Default, PartialEq)]
pub struct KnowledgeBase {
    entries: BTreeMap<String, Vec<Candidate>>,
}

impl KnowledgeBase {
    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn candidates(&self, surface: &str) -> &[Candidate] {
        self.entries
            .get(&fold(surface))
            .map_or(&[], Vec::as_slice)
    }

    /// Adds a candidate; a repeated (surface, link id) pair is rejected.
    pub fn insert(&mut self, surface: &str, link_id: &str, description: &str) -> Result<()> {
        if link_id.is_empty() {
            return Err(Error::InvalidInput("empty link id".into()));
        }
        let list = self.entries.entry(fold(surface)).or_default();
        if list.iter().any(|c| c.link_id == link_id) {
            return Err(Error::InvalidInput(format!(
                "duplicate candidate {link_id} for {surface:?}"
            )));
        }
        list.push(Candidate {
            link_id: link_id.to_string(),
            description: description.to_string(),
            vector: unigram_vector(description),
        });
        Ok(())
    }
}

fn fold(s: &str) -> String {
    s.trim().to_lowercase()
}

pub fn parse_kb(text: &str, origin: &str) -> Result<KnowledgeBase> {
    let mut kb = KnowledgeBase::default();
    for (idx, line) in text.lines().enumerate() {
        if line.trim().is_empty() {
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() != 3 || cols[0].trim().is_empty() || cols[1].is_empty() {
            return Err(Error::parse(
                origin,
                idx + 1,
                "expected `surface<TAB>link_id<TAB>description`",
            ));
        }
        kb.insert(cols[0], cols[1], cols[2])
            .map_err(|e| Error::parse(origin, idx + 1, e.to_string()))?;
    }
    Ok(kb)
}

pub fn load_kb(path: &Path) -> Result<KnowledgeBase> {
    parse_kb(&read_to_string(path)?, &path.display().to_string())
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct LinkOptions {
    /// Return NIL instead of the tie-break winner when every score is 0.
    pub nil_on_zero: bool,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LinkDecision {
    pub surface: String,
    /// `None` is NIL.
    pub link: Option<String>,
    pub score: f64,
    pub candidates: usize,
}

impl LinkDecision {
    pub fn link_or_nil(&self) -> &str {
        self.link.as_deref().unwrap_or("NIL")
    }
}

/// Picks the candidate whose description vector has the largest dot product
/// with the context's unigram vector; ties go to the smallest link id.
pub fn link_entity(
    kb: &KnowledgeBase,
    surface: &str,
    context: &UnigramVector,
    options: &LinkOptions,
) -> LinkDecision {
    let cands = kb.candidates(surface);
    let mut best: Option<(&Candidate, f64)> = None;
    for c in cands {
        let s = dot_product(context, &c.vector);
        let better = match best {
            None => true,
            Some((b, bs)) => s > bs || (s == bs && c.link_id < b.link_id),
        };
        if better {
            best = Some((c, s));
        }
    }
    let (link, score) = match best {
        Some((_, s)) if s == 0.0 && options.nil_on_zero => (None, 0.0),
        Some((c, s)) => (Some(c.link_id.clone()), s),
        None => (None, 0.0),
    };
    LinkDecision {
        surface: surface.to_string(),
        link,
        score,
        candidates: cands.len(),
    }
}

pub const DEFAULT_PROPER_NOUN_PREFIXES: [&str; 3] = ["NNP", "NP", "PROPN"];

/// Surfaces of tokens whose POS starts with one of `prefixes`.
pub fn proper_nouns<'a>(sentence: &'a TokenSentence, prefixes: &[String]) -> Vec<&'a str> {
    sentence
        .tokens
        .iter()
        .filter(|t| prefixes.iter().any(|p| t.pos.starts_with(p.as_str())))
        .map(|t| t.surface.as_str())
        .collect()
}

/// Links every entity of a sentence. `tags` is the tag sequence to take
/// entity spans from; the context is the sentence's proper nouns.
pub fn link_sentence(
    kb: &KnowledgeBase,
    sentence: &TokenSentence,
    tags: &[String],
    prefixes: &[String],
    options: &LinkOptions,
) -> Vec<LinkDecision> {
    let context = unigram_vector_of(proper_nouns(sentence, prefixes));
    entities(0, tags)
        .into_iter()
        .map(|e| {
            let surface: Vec<&str> = sentence.tokens[e.start..e.end]
                .iter()
                .map(|t| t.surface.as_str())
                .collect();
            link_entity(kb, &surface.join(" "), &context, options)
        })
        .collect()
}

/// `tweet_id<TAB>entity_surface<TAB>link_or_NIL<TAB>score` rows.
pub fn links_tsv(rows: &[(String, LinkDecision)]) -> String {
    let mut out = String::from("tweet_id\tentity_surface\tlink_or_NIL\tscore\n");
    for (id, d) in rows {
        let _ = writeln!(out, "{id}\t{}\t{}\t{}", d.surface, d.link_or_nil(), d.score);
    }
    out
}
