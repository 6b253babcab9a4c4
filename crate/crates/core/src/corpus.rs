#![allow(clippy::tabs_in_doc_comments)]
//! Corpus ingestion: text cleaning, tokenization, profiling manifests and
//! CoNLL-style token files.
//!
//! Profiling manifest (`manifest.tsv`):
//!
//! ```text
//! # labels=10s,20s,30s
//! # language=en
//! doc_id	path	gender	age_group
//! d001	docs/d001.txt	male	20s
//! ```
//!
//! Directive lines start with `#`; the header row is required. Paths are
//! resolved relative to the manifest's directory.
//!
//! CoNLL file: one token per row, tab-separated
//! `surface pos chunk tag1 [tag2 [tag3]] [extra...]`, a single blank line
//! between sentences. Lines that start with `#` and contain no tab are
//! comments; they are attached to the sentence that follows them so that
//! writing a loaded file reproduces it byte for byte.

use std::collections::{BTreeMap, HashSet};
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use crate::error::{read_to_string, write_string, Error, Result};
use crate::par;

/// Emoticons kept whole by the tokenizer.
pub const EMOTICONS: &[&str] = &[
    ":)", ":-)", ":(", ":-(", ";)", ";-)", ":D", ":-D", ":P", ":-P", ":p", ":-p", ";P", ";p",
    ":/", ":-/", ":'(", ":O", ":o", ":|", ":*", "<3", "</3", "^_^", "^^", "-_-", ":]", ":[",
];

pub fn is_emoticon(s: &str) -> bool {
    EMOTICONS.contains(&s)
}

/// Removes URLs, @-mentions, `<...>` spans and control characters, then
/// collapses whitespace. Casing is preserved.
pub fn clean_text(raw: &str) -> String {
    let no_tags = strip_angle_spans(raw);
    let mut kept = Vec::new();
    for word in no_tags.split(|c: char| c.is_whitespace()) {
        if word.is_empty() {
            continue;
        }
        if word.starts_with('@') && word.chars().count() > 1 {
            continue;
        }
        let word = strip_urls(word);
        let word: String = word.chars().filter(|c| !c.is_control()).collect();
        for piece in word.split_whitespace() {
            kept.push(piece.to_string());
        }
    }
    kept.join(" ")
}

fn strip_angle_spans(raw: &str) -> String {
    let mut out = String::with_capacity(raw.len());
    let mut rest = raw;
    while let Some(open) = rest.find('<') {
        match rest[open..].find('>') {
            Some(close) => {
                out.push_str(&rest[..open]);
                out.push(' ');
                rest = &rest[open + close + 1..];
            }
            None => break,
        }
    }
    out.push_str(rest);
    out
}

fn strip_urls(word: &str) -> String {
    const SCHEMES: [&str; 3] = ["http://", "https://", "ftp://"];
    let lower = word.to_ascii_lowercase();
    let start = SCHEMES.iter().filter_map(|s| lower.find(s)).min();
    match start {
        // a URL runs to the end of the whitespace-delimited word
        Some(i) => word[..i].to_string(),
        None => word.to_string(),
    }
}

fn peel_leading(c: char) -> bool {
    !c.is_alphanumeric() && c != '#' && c != '@'
}

fn peel_trailing(c: char) -> bool {
    !c.is_alphanumeric()
}

fn emoticon_suffix(s: &str) -> Option<&'static str> {
    EMOTICONS
        .iter()
        .filter(|e| s.len() > e.len() && s.ends_with(**e))
        .max_by_key(|e| e.len())
        .copied()
}

fn tokenize_chunk(s: &str, out: &mut Vec<String>) {
    if s.is_empty() {
        return;
    }
    if is_emoticon(s) {
        out.push(s.to_string());
        return;
    }
    let first = s.chars().next().unwrap();
    if peel_leading(first) {
        out.push(first.to_string());
        tokenize_chunk(&s[first.len_utf8()..], out);
        return;
    }
    if let Some(e) = emoticon_suffix(s) {
        tokenize_chunk(&s[..s.len() - e.len()], out);
        out.push(e.to_string());
        return;
    }
    let last = s.chars().next_back().unwrap();
    if peel_trailing(last) {
        tokenize_chunk(&s[..s.len() - last.len_utf8()], out);
        out.push(last.to_string());
        return;
    }
    out.push(s.to_string());
}

/// Whitespace split, then punctuation peeled off both ends of each chunk.
/// Emoticons from [`EMOTICONS`] survive as single tokens.
pub fn tokenize(text: &str) -> Vec<String> {
    let mut out = Vec::new();
    for chunk in text.split_whitespace() {
        tokenize_chunk(chunk, &mut out);
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Gender {
    Male,
    Female,
}

impl Gender {
    pub const ALL: [Gender; 2] = [Gender::Male, Gender::Female];

    /// Numeric encoding used when gender is appended as a feature column.
    pub fn as_feature(self) -> f64 {
        match self {
            Gender::Male => 0.0,
            Gender::Female => 1.0,
        }
    }

    pub fn index(self) -> usize {
        match self {
            Gender::Male => 0,
            Gender::Female => 1,
        }
    }

    pub fn from_index(i: usize) -> Option<Gender> {
        Gender::ALL.get(i).copied()
    }
}

impl fmt::Display for Gender {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Gender::Male => "male",
            Gender::Female => "female",
        })
    }
}

impl FromStr for Gender {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.to_ascii_lowercase().as_str() {
            "male" | "m" => Ok(Gender::Male),
            "female" | "f" => Ok(Gender::Female),
            _ => Err(Error::Corpus(format!("unknown gender label {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilingDocument {
    pub doc_id: String,
    pub raw_text: String,
    pub tokens: Vec<String>,
    pub gender: Gender,
    pub age_group: String,
}

impl ProfilingDocument {
    /// Cleans and tokenizes `raw_text`. Fails if nothing survives cleaning.
    pub fn new(
        doc_id: impl Into<String>,
        raw_text: impl Into<String>,
        gender: Gender,
        age_group: impl Into<String>,
    ) -> Result<Self> {
        let doc_id = doc_id.into();
        let raw_text = raw_text.into();
        let tokens = tokenize(&clean_text(&raw_text));
        if tokens.is_empty() {
            return Err(Error::Corpus(format!(
                "document {doc_id} is empty after cleaning"
            )));
        }
        Ok(ProfilingDocument {
            doc_id,
            raw_text,
            tokens,
            gender,
            age_group: age_group.into(),
        })
    }
}

/// Labeled documents plus the declared age-group label set.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilingCorpus {
    pub docs: Vec<ProfilingDocument>,
    pub age_labels: Vec<String>,
    pub language: String,
}

impl ProfilingCorpus {
    pub fn new(
        docs: Vec<ProfilingDocument>,
        age_labels: Vec<String>,
        language: impl Into<String>,
    ) -> Result<Self> {
        let mut seen = HashSet::new();
        for l in &age_labels {
            if !seen.insert(l.as_str()) {
                return Err(Error::Corpus(format!("duplicate age label {l:?}")));
            }
        }
        let mut ids = HashSet::new();
        for d in &docs {
            if !ids.insert(d.doc_id.as_str()) {
                return Err(Error::Corpus(format!("duplicate doc_id {}", d.doc_id)));
            }
            if !seen.contains(d.age_group.as_str()) {
                return Err(Error::Corpus(format!(
                    "document {}: age group {:?} not in label set {:?}",
                    d.doc_id, d.age_group, age_labels
                )));
            }
        }
        Ok(ProfilingCorpus {
            docs,
            age_labels,
            language: language.into(),
        })
    }

    pub fn len(&self) -> usize {
        self.docs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.docs.is_empty()
    }

    pub fn gender_counts(&self) -> BTreeMap<Gender, usize> {
        let mut counts = BTreeMap::new();
        for d in &self.docs {
            *counts.entry(d.gender).or_insert(0) += 1;
        }
        counts
    }

    pub fn age_counts(&self) -> BTreeMap<String, usize> {
        let mut counts = BTreeMap::new();
        for d in &self.docs {
            *counts.entry(d.age_group.clone()).or_insert(0) += 1;
        }
        counts
    }

    /// Index of `label` in the declared label order.
    pub fn age_index(&self, label: &str) -> Option<usize> {
        self.age_labels.iter().position(|l| l == label)
    }

    /// Sub-corpus with the documents at `indices`, in that order.
    pub fn subset(&self, indices: &[usize]) -> ProfilingCorpus {
        ProfilingCorpus {
            docs: indices.iter().map(|&i| self.docs[i].clone()).collect(),
            age_labels: self.age_labels.clone(),
            language: self.language.clone(),
        }
    }

    /// Writes `manifest.tsv` and one `docs/<doc_id>.txt` per document under `dir`.
    pub fn write_to_dir(&self, dir: &Path) -> Result<PathBuf> {
        let docs_dir = dir.join("docs");
        std::fs::create_dir_all(&docs_dir).map_err(|e| Error::io(&docs_dir, e))?;
        let mut manifest = format!(
            "# labels={}\n# language={}\ndoc_id\tpath\tgender\tage_group\n",
            self.age_labels.join(","),
            self.language
        );
        for d in &self.docs {
            let rel = format!("docs/{}.txt", d.doc_id);
            write_string(&dir.join(&rel), &d.raw_text)?;
            manifest.push_str(&format!("{}\t{}\t{}\t{}\n", d.doc_id, rel, d.gender, d.age_group));
        }
        let path = dir.join("manifest.tsv");
        write_string(&path, &manifest)?;
        Ok(path)
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ManifestEntry {
    pub doc_id: String,
    pub path: PathBuf,
    pub gender: Gender,
    pub age_group: String,
    line: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CorpusManifest {
    pub entries: Vec<ManifestEntry>,
    pub age_labels: Vec<String>,
    pub language: String,
}

/// Parses manifest text. `base` is the directory paths are relative to.
pub fn parse_manifest(text: &str, base: &Path, origin: &str) -> Result<CorpusManifest> {
    let mut declared: Option<Vec<String>> = None;
    let mut language = String::from("und");
    let mut entries = Vec::new();
    let mut saw_header = false;
    let mut ids = HashSet::new();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = line.trim_end_matches('\r');
        if line.trim().is_empty() {
            continue;
        }
        if let Some(directive) = line.strip_prefix('#') {
            let directive = directive.trim();
            if let Some(v) = directive.strip_prefix("labels=") {
                declared = Some(
                    v.split(',')
                        .map(|s| s.trim().to_string())
                        .filter(|s| !s.is_empty())
                        .collect(),
                );
            } else if let Some(v) = directive.strip_prefix("language=") {
                language = v.trim().to_string();
            }
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if !saw_header {
            if cols != ["doc_id", "path", "gender", "age_group"] {
                return Err(Error::parse(
                    origin,
                    lineno,
                    "expected header `doc_id\tpath\tgender\tage_group`",
                ));
            }
            saw_header = true;
            continue;
        }
        if cols.len() != 4 {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected 4 columns, found {}", cols.len()),
            ));
        }
        let doc_id = cols[0].to_string();
        if !ids.insert(doc_id.clone()) {
            return Err(Error::parse(origin, lineno, format!("duplicate doc_id {doc_id}")));
        }
        let gender = cols[2]
            .parse::<Gender>()
            .map_err(|e| Error::parse(origin, lineno, format!("{doc_id}: {e}")))?;
        entries.push(ManifestEntry {
            doc_id,
            path: base.join(cols[1]),
            gender,
            age_group: cols[3].to_string(),
            line: lineno,
        });
    }
    if !saw_header {
        return Err(Error::parse(origin, 1, "missing header row"));
    }
    let age_labels = match declared {
        Some(labels) => labels,
        None => {
            let mut labels: Vec<String> = Vec::new();
            for e in &entries {
                if !labels.contains(&e.age_group) {
                    labels.push(e.age_group.clone());
                }
            }
            labels
        }
    };
    for e in &entries {
        if !age_labels.contains(&e.age_group) {
            return Err(Error::parse(
                origin,
                e.line,
                format!(
                    "{}: age group {:?} not in label set {{{}}}",
                    e.doc_id,
                    e.age_group,
                    age_labels.join(",")
                ),
            ));
        }
    }
    Ok(CorpusManifest {
        entries,
        age_labels,
        language,
    })
}

/// Loads every document listed in the manifest. Files are read and cleaned
/// concurrently; document order follows the manifest.
pub fn load_profiling_corpus(manifest_path: &Path) -> Result<ProfilingCorpus> {
    let text = read_to_string(manifest_path)?;
    let base = manifest_path.parent().unwrap_or_else(|| Path::new("."));
    let manifest = parse_manifest(&text, base, &manifest_path.display().to_string())?;
    let docs: Vec<Result<ProfilingDocument>> = par::map(&manifest.entries, |e| {
        let raw = read_to_string(&e.path).map_err(|err| {
            Error::Corpus(format!("entry {} (line {}): {err}", e.doc_id, e.line))
        })?;
        ProfilingDocument::new(e.doc_id.clone(), raw, e.gender, e.age_group.clone())
    });
    let docs = docs.into_iter().collect::<Result<Vec<_>>>()?;
    ProfilingCorpus::new(docs, manifest.age_labels, manifest.language)
}

// ---------------------------------------------------------------------------
// CoNLL-style token corpora

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TokenRecord {
    pub surface: String,
    pub pos: String,
    pub chunk: String,
    /// One BIO tag per declared level.
    pub tags: Vec<String>,
    /// Columns after the tag levels (e.g. predicted tags), kept verbatim.
    pub extra: Vec<String>,
}

impl TokenRecord {
    pub fn new(surface: &str, pos: &str, chunk: &str, tags: &[&str]) -> Self {
        TokenRecord {
            surface: surface.to_string(),
            pos: pos.to_string(),
            chunk: chunk.to_string(),
            tags: tags.iter().map(|t| t.to_string()).collect(),
            extra: Vec::new(),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct TokenSentence {
    /// Comment lines preceding the sentence, without the newline.
    pub comments: Vec<String>,
    pub tokens: Vec<TokenRecord>,
}

impl TokenSentence {
    pub fn new(tokens: Vec<TokenRecord>) -> Self {
        TokenSentence {
            comments: Vec::new(),
            tokens,
        }
    }

    pub fn len(&self) -> usize {
        self.tokens.len()
    }

    pub fn is_empty(&self) -> bool {
        self.tokens.is_empty()
    }

    /// Tag sequence at `level` (0-based).
    pub fn level_tags(&self, level: usize) -> Vec<String> {
        self.tokens.iter().map(|t| t.tags[level].clone()).collect()
    }

    /// Value of a `key=value` or `key: value` comment, if any (e.g. `# tweet_id = 42`).
    pub fn comment_value(&self, key: &str) -> Option<String> {
        self.comments.iter().find_map(|c| {
            let body = c.trim_start_matches('#').trim();
            let rest = body.strip_prefix(key)?.trim_start();
            let rest = rest.strip_prefix('=').or_else(|| rest.strip_prefix(':'))?;
            Some(rest.trim().to_string())
        })
    }
}

/// Kind of a BIO tag.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Bio<'a> {
    Outside,
    Begin(&'a str),
    Inside(&'a str),
}

pub fn parse_bio(tag: &str) -> Option<Bio<'_>> {
    if tag == "O" {
        return Some(Bio::Outside);
    }
    if let Some(t) = tag.strip_prefix("B-") {
        return (!t.is_empty()).then_some(Bio::Begin(t));
    }
    if let Some(t) = tag.strip_prefix("I-") {
        return (!t.is_empty()).then_some(Bio::Inside(t));
    }
    None
}

/// Checks a tag sequence. On failure returns the offending position and a reason.
pub fn validate_bio(tags: &[String]) -> std::result::Result<(), (usize, String)> {
    let mut prev: Option<&str> = None;
    for (i, tag) in tags.iter().enumerate() {
        match parse_bio(tag) {
            None => return Err((i, format!("malformed tag {tag:?}"))),
            Some(Bio::Outside) => prev = None,
            Some(Bio::Begin(t)) => prev = Some(t),
            Some(Bio::Inside(t)) => {
                if prev != Some(t) {
                    return Err((i, format!("{tag} does not continue a B-{t} or I-{t}")));
                }
            }
        }
    }
    Ok(())
}

/// Turns every orphan `I-X` (not preceded by `B-X`/`I-X`) into `B-X`.
/// Tags that are not BIO at all become `O`.
pub fn repair_bio(tags: &[String]) -> Vec<String> {
    let mut out: Vec<String> = Vec::with_capacity(tags.len());
    let mut prev: Option<String> = None;
    for tag in tags {
        let fixed = match parse_bio(tag) {
            None | Some(Bio::Outside) => {
                prev = None;
                "O".to_string()
            }
            Some(Bio::Begin(t)) => {
                prev = Some(t.to_string());
                tag.clone()
            }
            Some(Bio::Inside(t)) => {
                if prev.as_deref() == Some(t) {
                    tag.clone()
                } else {
                    prev = Some(t.to_string());
                    format!("B-{t}")
                }
            }
        };
        out.push(fixed);
    }
    out
}

fn is_comment(line: &str) -> bool {
    line.starts_with('#') && !line.contains('\t')
}

/// Parses CoNLL text with `levels` tag columns (0..=3). With 0 levels every
/// column after the chunk column is kept in `extra`.
pub fn parse_conll(text: &str, levels: usize, origin: &str) -> Result<Vec<TokenSentence>> {
    if levels > 3 {
        return Err(Error::InvalidInput(format!(
            "tag levels must be 0..=3, got {levels}"
        )));
    }
    let mut sentences = Vec::new();
    let mut current = TokenSentence::default();
    let mut first_line = 0usize;
    let flush = |current: &mut TokenSentence, first_line: usize, out: &mut Vec<TokenSentence>| {
        if current.tokens.is_empty() {
            return Ok(());
        }
        for level in 0..levels {
            if let Err((pos, msg)) = validate_bio(&current.level_tags(level)) {
                return Err(Error::parse(
                    origin,
                    first_line + pos,
                    format!("level {} tag: {msg}", level + 1),
                ));
            }
        }
        out.push(std::mem::take(current));
        Ok(())
    };
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        if line.is_empty() {
            flush(&mut current, first_line, &mut sentences)?;
            continue;
        }
        if is_comment(line) {
            if !current.tokens.is_empty() {
                flush(&mut current, first_line, &mut sentences)?;
            }
            current.comments.push(line.to_string());
            continue;
        }
        let cols: Vec<&str> = line.split('\t').collect();
        if cols.len() < 3 + levels {
            return Err(Error::parse(
                origin,
                lineno,
                format!("expected at least {} columns, found {}", 3 + levels, cols.len()),
            ));
        }
        if current.tokens.is_empty() {
            first_line = lineno;
        }
        current.tokens.push(TokenRecord {
            surface: cols[0].to_string(),
            pos: cols[1].to_string(),
            chunk: cols[2].to_string(),
            tags: cols[3..3 + levels].iter().map(|s| s.to_string()).collect(),
            extra: cols[3 + levels..].iter().map(|s| s.to_string()).collect(),
        });
    }
    flush(&mut current, first_line, &mut sentences)?;
    Ok(sentences)
}

pub fn load_conll_corpus(path: &Path, levels: usize) -> Result<Vec<TokenSentence>> {
    let text = read_to_string(path)?;
    parse_conll(&text, levels, &path.display().to_string())
}

/// Renders sentences in the canonical layout accepted by [`parse_conll`].
pub fn write_conll(sentences: &[TokenSentence]) -> String {
    let mut blocks = Vec::with_capacity(sentences.len());
    for s in sentences {
        let mut block = String::new();
        for c in &s.comments {
            block.push_str(c);
            block.push('\n');
        }
        for t in &s.tokens {
            let mut cols = vec![t.surface.as_str(), t.pos.as_str(), t.chunk.as_str()];
            cols.extend(t.tags.iter().map(String::as_str));
            cols.extend(t.extra.iter().map(String::as_str));
            block.push_str(&cols.join("\t"));
            block.push('\n');
        }
        blocks.push(block);
    }
    blocks.join("\n")
}

pub fn save_conll(path: &Path, sentences: &[TokenSentence]) -> Result<()> {
    write_string(path, &write_conll(sentences))
}
