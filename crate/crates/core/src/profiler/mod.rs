//! Author profiling: word-space statistics, KS feature elimination, random
//! forests, hierarchical gender-then-age prediction and batched training.

mod batches;
pub mod forest;
pub mod ks;
pub mod model;
pub mod selection;
pub mod stats;

use std::path::Path;

pub use batches::{make_batches, BatchPlan};
pub use forest::{train_forest, Forest, ForestParams};
pub use ks::ks_statistic;
pub use selection::eliminate_features;
pub use stats::{moments, statistical_features, FeatureMatrix, N_STATS, STAT_NAMES};

use crate::corpus::{Gender, ProfilingCorpus, ProfilingDocument};
use crate::error::{read_to_string, write_string, Error, Result};
use crate::eval::{f1, kfold_split};
use crate::wordspace::{word_space, Vocabulary};
use crate::{derive_seed, par};

pub const DEFAULT_DROP_FRACTION: f64 = 0.05;

#[derive(Debug, Clone, PartialEq)]
pub struct ProfilerParams {
    pub forest: ForestParams,
    pub drop_fraction: f64,
    pub do_elimination: bool,
}

impl Default for ProfilerParams {
    fn default() -> Self {
        ProfilerParams {
            forest: ForestParams::default(),
            drop_fraction: DEFAULT_DROP_FRACTION,
            do_elimination: true,
        }
    }
}

/// Trained gender and age forests plus everything needed to featurize new
/// documents the same way.
#[derive(Debug, Clone, PartialEq)]
pub struct ProfilerModel {
    pub vocab: Vocabulary,
    pub age_labels: Vec<String>,
    pub language: String,
    /// Names of the base statistics, before masking.
    pub feature_names: Vec<String>,
    /// Kept statistics; the age forest sees these plus the gender column.
    pub mask: Vec<bool>,
    pub gender: Forest,
    pub age: Forest,
    pub seed: u64,
    pub params: ProfilerParams,
}

impl ProfilerModel {
    pub fn kept_features(&self) -> usize {
        self.mask.iter().filter(|&&m| m).count()
    }

    pub fn validate(&self) -> Result<()> {
        if self.mask.len() != self.feature_names.len() || self.mask.len() != N_STATS {
            return Err(Error::Model(format!(
                "mask covers {} features, expected {N_STATS}",
                self.mask.len()
            )));
        }
        let kept = self.kept_features();
        if self.gender.n_features != kept {
            return Err(Error::Model(format!(
                "gender forest arity {} does not match {kept} kept features",
                self.gender.n_features
            )));
        }
        if self.age.n_features != kept + 1 {
            return Err(Error::Model(format!(
                "age forest arity {} should be {}",
                self.age.n_features,
                kept + 1
            )));
        }
        if self.gender.labels != ["male", "female"] {
            return Err(Error::Model("gender forest labels must be male, female".into()));
        }
        if self.age.labels != self.age_labels {
            return Err(Error::Model("age forest labels differ from the label set".into()));
        }
        Ok(())
    }

    pub fn to_text(&self) -> String {
        model::write_model(self)
    }

    pub fn from_text(text: &str) -> Result<Self> {
        model::parse_model(text, "<model>")
    }

    pub fn save(&self, path: &Path) -> Result<()> {
        write_string(path, &self.to_text())
    }

    pub fn load(path: &Path) -> Result<Self> {
        model::parse_model(&read_to_string(path)?, &path.display().to_string())
    }
}

fn gender_names() -> Vec<String> {
    Gender::ALL.iter().map(|g| g.to_string()).collect()
}

/// `V -> A -> W -> F` for one batch of documents.
pub fn batch_features(docs: &[ProfilingDocument], vocab: &Vocabulary) -> Result<FeatureMatrix> {
    let ws = word_space(docs, vocab)?;
    statistical_features(&ws, docs.len())
}

/// How batch feature blocks are scheduled.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Schedule {
    Serial,
    Parallel,
}

/// Feature blocks of every batch stacked in plan order. Row `r` belongs to
/// document `plan.row_order()[r]`.
pub fn ltlm_features(
    corpus: &ProfilingCorpus,
    plan: &BatchPlan,
    vocab: &Vocabulary,
    schedule: Schedule,
) -> Result<FeatureMatrix> {
    let docs_of = |batch: &Vec<usize>| -> Vec<ProfilingDocument> {
        batch.iter().map(|&i| corpus.docs[i].clone()).collect()
    };
    let blocks: Vec<Result<FeatureMatrix>> = match schedule {
        Schedule::Serial => plan
            .batches
            .iter()
            .map(|b| batch_features(&docs_of(b), vocab))
            .collect(),
        Schedule::Parallel => par::map(&plan.batches, |b| batch_features(&docs_of(b), vocab)),
    };
    let blocks = blocks.into_iter().collect::<Result<Vec<_>>>()?;
    FeatureMatrix::vstack(&blocks)
}

fn check_trainable(corpus: &ProfilingCorpus) -> Result<()> {
    let genders = corpus.gender_counts();
    if genders.len() < 2 {
        return Err(Error::InvalidInput(
            "training corpus must contain both genders".into(),
        ));
    }
    if corpus.age_counts().len() < 2 {
        return Err(Error::InvalidInput(
            "training corpus must contain at least two age groups".into(),
        ));
    }
    Ok(())
}

fn age_labels_of(corpus: &ProfilingCorpus, rows: &[usize]) -> Vec<usize> {
    rows.iter()
        .map(|&i| corpus.age_index(&corpus.docs[i].age_group).expect("validated label"))
        .collect()
}

/// Elimination plus both forests, given features whose row `r` is document `rows[r]`.
fn fit(
    corpus: &ProfilingCorpus,
    features: &FeatureMatrix,
    rows: &[usize],
    params: &ProfilerParams,
    seed: u64,
) -> Result<(Vec<bool>, Forest, Forest)> {
    let genders: Vec<usize> = rows.iter().map(|&i| corpus.docs[i].gender.index()).collect();
    let (kept, mask) = if params.do_elimination {
        eliminate_features(features, &genders, params.drop_fraction)?
    } else {
        (features.clone(), vec![true; features.n_cols()])
    };
    let gender = train_forest(
        &kept,
        &genders,
        &gender_names(),
        &params.forest,
        derive_seed(seed, 1),
    )?;
    let gender_col: Vec<f64> = rows
        .iter()
        .map(|&i| corpus.docs[i].gender.as_feature())
        .collect();
    let with_gender = kept.append_column("gender", &gender_col)?;
    let age = train_forest(
        &with_gender,
        &age_labels_of(corpus, rows),
        &corpus.age_labels,
        &params.forest,
        derive_seed(seed, 2),
    )?;
    Ok((mask, gender, age))
}

fn assemble(
    corpus: &ProfilingCorpus,
    vocab: Vocabulary,
    fitted: (Vec<bool>, Forest, Forest),
    params: &ProfilerParams,
    seed: u64,
) -> ProfilerModel {
    let (mask, gender, age) = fitted;
    ProfilerModel {
        vocab,
        age_labels: corpus.age_labels.clone(),
        language: corpus.language.clone(),
        feature_names: STAT_NAMES.iter().map(|s| s.to_string()).collect(),
        mask,
        gender,
        age,
        seed,
        params: params.clone(),
    }
}

/// Single-batch training: the whole corpus forms one word space.
pub fn train_profiler(
    corpus: &ProfilingCorpus,
    params: &ProfilerParams,
    seed: u64,
) -> Result<ProfilerModel> {
    check_trainable(corpus)?;
    let vocab = Vocabulary::build(&corpus.docs);
    let features = batch_features(&corpus.docs, &vocab)?;
    let rows: Vec<usize> = (0..corpus.len()).collect();
    let fitted = fit(corpus, &features, &rows, params, seed)?;
    Ok(assemble(corpus, vocab, fitted, params, seed))
}

/// Batched training: stratified batches, one word space per batch, feature
/// blocks stacked, then the same elimination and forests as
/// [`train_profiler`]. With `n_batches == 1` the result is identical to it.
pub fn ltlm_train(
    corpus: &ProfilingCorpus,
    n_batches: usize,
    params: &ProfilerParams,
    seed: u64,
) -> Result<ProfilerModel> {
    check_trainable(corpus)?;
    let plan = make_batches(corpus, n_batches, derive_seed(seed, 0))?;
    let vocab = Vocabulary::build(&corpus.docs);
    let features = ltlm_features(corpus, &plan, &vocab, Schedule::Parallel)?;
    let fitted = fit(corpus, &features, &plan.row_order(), params, seed)?;
    Ok(assemble(corpus, vocab, fitted, params, seed))
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Profile {
    pub gender: Gender,
    pub age_group: String,
}

/// Gender from masked features, then age from masked features plus the
/// predicted gender column.
pub fn predict_rows(model: &ProfilerModel, features: &FeatureMatrix) -> Result<Vec<Profile>> {
    let kept = features.select_columns(&model.mask)?;
    (0..kept.n_rows())
        .map(|i| {
            let x = kept.row(i);
            let g = Gender::from_index(model.gender.predict(x)?).expect("two gender labels");
            let mut with_gender = x.to_vec();
            with_gender.push(g.as_feature());
            let age = model.age.predict(&with_gender)?;
            Ok(Profile {
                gender: g,
                age_group: model.age.labels[age].clone(),
            })
        })
        .collect()
}

/// Featurizes `corpus` as one batch (with the model's vocabulary) and
/// predicts every document.
pub fn predict_profiles(model: &ProfilerModel, corpus: &ProfilingCorpus) -> Result<Vec<Profile>> {
    if corpus.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    model.validate()?;
    let overlap = corpus
        .docs
        .iter()
        .flat_map(|d| &d.tokens)
        .any(|t| model.vocab.get(t).is_some());
    if !overlap {
        return Err(Error::Model(
            "corpus shares no terms with the model vocabulary".into(),
        ));
    }
    let features = batch_features(&corpus.docs, &model.vocab)?;
    predict_rows(model, &features)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub folds: usize,
    /// Predicted profile for every document, in corpus order.
    pub predictions: Vec<Profile>,
    pub gender_accuracy: f64,
    /// Unweighted mean of per-class F1 over the two genders.
    pub gender_macro_f1: f64,
    pub age_accuracy: f64,
    pub age_macro_f1: f64,
}

fn macro_f1(gold: &[usize], pred: &[usize], n_classes: usize) -> f64 {
    let mut total = 0.0;
    for c in 0..n_classes {
        let tp = gold.iter().zip(pred).filter(|(g, p)| **g == c && **p == c).count() as f64;
        let n_pred = pred.iter().filter(|p| **p == c).count() as f64;
        let n_gold = gold.iter().filter(|g| **g == c).count() as f64;
        let p = if n_pred > 0.0 { tp / n_pred } else { 0.0 };
        let r = if n_gold > 0.0 { tp / n_gold } else { 0.0 };
        total += f1(p, r);
    }
    total / n_classes as f64
}

fn accuracy(gold: &[usize], pred: &[usize]) -> f64 {
    gold.iter().zip(pred).filter(|(g, p)| g == p).count() as f64 / gold.len() as f64
}

/// k-fold cross-validation over the corpus.
///
/// Features are extracted once for the whole corpus (stratified into
/// `n_batches` word spaces; extraction uses no labels). Within each fold,
/// elimination and both forests are fit on the training rows only and the
/// held-out rows are predicted hierarchically.
pub fn cross_validate(
    corpus: &ProfilingCorpus,
    k: usize,
    n_batches: usize,
    params: &ProfilerParams,
    seed: u64,
) -> Result<CvReport> {
    check_trainable(corpus)?;
    let plan = make_batches(corpus, n_batches, derive_seed(seed, 0))?;
    let vocab = Vocabulary::build(&corpus.docs);
    let features = ltlm_features(corpus, &plan, &vocab, Schedule::Parallel)?;
    let row_doc = plan.row_order();
    let folds = kfold_split(corpus.len(), k, derive_seed(seed, 3))?;

    let results: Vec<Result<Vec<(usize, Profile)>>> = par::map_range(k, |fi| {
        let test = &folds.folds[fi];
        let train: Vec<usize> = (0..corpus.len()).filter(|r| !test.contains(r)).collect();
        let train_docs: Vec<usize> = train.iter().map(|&r| row_doc[r]).collect();
        let fitted = fit(
            corpus,
            &features.select_rows(&train),
            &train_docs,
            params,
            derive_seed(seed, 100 + fi as u64),
        )?;
        let model = assemble(corpus, vocab.clone(), fitted, params, seed);
        let preds = predict_rows(&model, &features.select_rows(test))?;
        Ok(test.iter().map(|&r| row_doc[r]).zip(preds).collect())
    });

    let mut predictions: Vec<Option<Profile>> = vec![None; corpus.len()];
    for r in results {
        for (doc, p) in r? {
            predictions[doc] = Some(p);
        }
    }
    let predictions: Vec<Profile> = predictions
        .into_iter()
        .map(|p| p.expect("every document is in exactly one fold"))
        .collect();

    let gold_g: Vec<usize> = corpus.docs.iter().map(|d| d.gender.index()).collect();
    let pred_g: Vec<usize> = predictions.iter().map(|p| p.gender.index()).collect();
    let all: Vec<usize> = (0..corpus.len()).collect();
    let gold_a = age_labels_of(corpus, &all);
    let pred_a: Vec<usize> = predictions
        .iter()
        .map(|p| corpus.age_index(&p.age_group).expect("known label"))
        .collect();
    Ok(CvReport {
        folds: k,
        gender_accuracy: accuracy(&gold_g, &pred_g),
        gender_macro_f1: macro_f1(&gold_g, &pred_g, 2),
        age_accuracy: accuracy(&gold_a, &pred_a),
        age_macro_f1: macro_f1(&gold_a, &pred_a, corpus.age_labels.len()),
        predictions,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::synth;

    #[test]
    fn one_gender_is_rejected() {
        let c = synth::profiling_corpus(20, 1);
        let males: Vec<usize> = (0..c.len()).filter(|&i| c.docs[i].gender == Gender::Male).collect();
        let only_male = c.subset(&males);
        assert!(train_profiler(&only_male, &ProfilerParams::default(), 1).is_err());
    }

    #[test]
    fn arity_law() {
        let c = synth::profiling_corpus(20, 2);
        let params = ProfilerParams {
            forest: ForestParams {
                n_trees: 5,
                ..Default::default()
            },
            ..Default::default()
        };
        let m = train_profiler(&c, &params, 7).unwrap();
        assert_eq!(m.age.n_features, m.gender.n_features + 1);
        let back = ProfilerModel::from_text(&m.to_text()).unwrap();
        assert_eq!(back, m);
    }

    #[test]
    fn batches_n1_and_errors() {
        let c = synth::profiling_corpus(12, 3);
        let plan = make_batches(&c, 1, 5).unwrap();
        assert_eq!(plan.batches, vec![(0..12).collect::<Vec<_>>()]);
        assert!(make_batches(&c, 13, 5).is_err());
        assert!(make_batches(&c, 0, 5).is_err());
    }
}
