//! Chained per-level models for up to three nested tag levels.
//!
//! Level `k > 1` sees the level `k-1` tag of each token as the extra
//! attribute `prevlevel=<tag>`: gold tags during training, repaired
//! predictions when tagging.

use std::fmt::Write as _;
use std::path::Path;

use super::features::{sentence_observations, DEFAULT_HALF_WIDTH};
use super::model::{parse_model, write_model, CrfDataset, CrfModel};
use super::train::{train_crf, CrfParams};
use crate::corpus::{repair_bio, TokenSentence};
use crate::error::{read_to_string, write_string, Error, Result};
use crate::lines::Lines;

pub const MAGIC: &str = "profner-nested 1";
pub const MAX_LEVELS: usize = 3;

#[derive(Debug, Clone, PartialEq)]
pub struct NestedParams {
    pub crf: CrfParams,
    pub half_width: usize,
}

impl Default for NestedParams {
    fn default() -> Self {
        NestedParams {
            crf: CrfParams::default(),
            half_width: DEFAULT_HALF_WIDTH,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct NestedModel {
    pub half_width: usize,
    pub levels: Vec<CrfModel>,
}

/// Observations of every sentence for `level` (0-based), with gold tags of
/// the level below injected.
pub fn level_observations(sentences: &[TokenSentence], level: usize, half_width: usize) -> Vec<Vec<Vec<String>>> {
    sentences
        .iter()
        .map(|s| {
            let prev = (level > 0).then(|| s.level_tags(level - 1));
            sentence_observations(&s.tokens, half_width, prev.as_deref())
        })
        .collect()
}

pub fn train_nested(sentences: &[TokenSentence], levels: usize, params: &NestedParams) -> Result<NestedModel> {
    if !(1..=MAX_LEVELS).contains(&levels) {
        return Err(Error::InvalidInput(format!("levels must be 1..={MAX_LEVELS}, got {levels}")));
    }
    if let Some((i, s)) = sentences
        .iter()
        .enumerate()
        .find(|(_, s)| s.tokens.iter().any(|t| t.tags.len() < levels))
    {
        let have = s.tokens.iter().map(|t| t.tags.len()).min().unwrap_or(0);
        return Err(Error::InvalidInput(format!(
            "sentence {} has {have} tag columns, {levels} levels requested",
            i + 1
        )));
    }
    let mut models = Vec::with_capacity(levels);
    for level in 0..levels {
        let obs = level_observations(sentences, level, params.half_width);
        let gold: Vec<Vec<String>> = sentences.iter().map(|s| s.level_tags(level)).collect();
        let data = CrfDataset::compile(&obs, &gold, params.crf.min_count)?;
        models.push(train_crf(&data, &params.crf)?);
    }
    Ok(NestedModel {
        half_width: params.half_width,
        levels: models,
    })
}

impl NestedModel {
    pub fn n_levels(&self) -> usize {
        self.levels.len()
    }

    /// Undecorated decoder output, one row per level. Each level after the
    /// first is fed the repaired tags of the level below.
    pub fn decode_raw(&self, sentence: &TokenSentence) -> Result<Vec<Vec<String>>> {
        let mut rows: Vec<Vec<String>> = Vec::with_capacity(self.levels.len());
        let mut prev: Option<Vec<String>> = None;
        for model in &self.levels {
            let raw = if sentence.is_empty() {
                Vec::new()
            } else {
                let obs = sentence_observations(&sentence.tokens, self.half_width, prev.as_deref());
                model.tag(&obs)?
            };
            prev = Some(repair_bio(&raw));
            rows.push(raw);
        }
        Ok(rows)
    }

    pub fn to_text(&self) -> String {
        let mut out = format!("{MAGIC}\nlevels={}\nwindow={}\n", self.levels.len(), self.half_width);
        for (k, m) in self.levels.iter().enumerate() {
            let _ = writeln!(out, "[level {}]", k + 1);
            write_model(&mut out, m);
        }
        out
    }

    pub fn from_text(text: &str, origin: &str) -> Result<Self> {
        let mut l = Lines::new(text, origin);
        l.expect(MAGIC)?;
        let n: usize = l.parsed("levels")?;
        if !(1..=MAX_LEVELS).contains(&n) {
            return Err(l.err(format!("levels must be 1..={MAX_LEVELS}, got {n}")));
        }
        let half_width: usize = l.parsed("window")?;
        let mut levels = Vec::with_capacity(n);
        for k in 1..=n {
            l.expect(&format!("[level {k}]"))?;
            levels.push(parse_model(&mut l)?);
        }
        if let Some(extra) = l.peek() {
            return Err(l.err(format!("trailing content {extra:?}")));
        }
        Ok(NestedModel { half_width, levels })
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_string(path, &self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        Self::from_text(&read_to_string(path)?, &path.display().to_string())
    }
}

/// Per-level tags with orphan `I-X` repaired to `B-X`.
pub fn tag_nested(model: &NestedModel, sentence: &TokenSentence) -> Result<Vec<Vec<String>>> {
    Ok(model.decode_raw(sentence)?.iter().map(|r| repair_bio(r)).collect())
}
