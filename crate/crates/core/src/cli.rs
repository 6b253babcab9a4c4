//! Command-line front end. [`run`] executes one parsed invocation and
//! returns what to print; the binary only formats and exits.

use std::fmt::Write as _;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};

use crate::corpus::{load_conll_corpus, load_profiling_corpus, repair_bio, save_conll, TokenSentence};
use crate::crf::{tag_nested, train_nested, LbfgsParams, NestedModel, NestedParams};
use crate::crf::train::CrfParams;
use crate::error::{write_string, Error, Result};
use crate::eval::{evaluate_level, kfold_split, reports_table, reports_tsv, LevelReport};
use crate::linker::{link_sentence, links_tsv, load_kb, LinkOptions, DEFAULT_PROPER_NOUN_PREFIXES};
use crate::par;
use crate::profiler::forest::ForestParams;
use crate::profiler::{
    cross_validate, ltlm_train, predict_profiles, train_profiler, ProfilerModel, ProfilerParams,
};

#[derive(Debug, Parser)]
#[command(name = "profner", version, about = "Author profiling and nested named-entity recognition", arg_required_else_help = true)]
pub struct Cli {
    /// Master seed for every random choice.
    #[arg(long, global = true, default_value_t = 42)]
    pub seed: u64,
    /// Worker threads (0 = one per core).
    #[arg(long, global = true, default_value_t = 1)]
    pub threads: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Train a profiler on a whole corpus as one batch.
    ProfileTrain(ProfileTrainArgs),
    /// Predict gender and age group for every document of a corpus.
    ProfilePredict(ProfilePredictArgs),
    /// k-fold cross-validation of the profiler.
    ProfileEval(ProfileEvalArgs),
    /// Train a profiler over stratified batches.
    LtlmTrain(LtlmTrainArgs),
    /// Train nested CRF taggers on a CoNLL corpus.
    NerTrain(NerTrainArgs),
    /// Append predicted tag columns to a CoNLL file.
    NerTag(NerTagArgs),
    /// Score predicted tag columns against gold ones.
    NerEval(NerEvalArgs),
    /// Link tagged entities against a knowledge base.
    Link(LinkArgs),
    /// Split 0..n into k folds.
    Kfold(KfoldArgs),
}

#[derive(Debug, Args)]
pub struct ForestArgs {
    #[arg(long, default_value_t = 100, value_parser = clap::value_parser!(u64).range(1..))]
    pub trees: u64,
    #[arg(long, default_value_t = 16, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_depth: u64,
    #[arg(long, default_value_t = 2, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_leaf: u64,
    /// Features tried per split (default: ceil(sqrt(s))).
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub max_features: Option<u64>,
    /// Fraction of feature columns dropped per elimination pass, in [0, 0.5).
    #[arg(long, default_value_t = 0.05)]
    pub drop_fraction: f64,
    #[arg(long)]
    pub no_elimination: bool,
    #[arg(long)]
    pub no_bootstrap: bool,
}

impl ForestArgs {
    fn params(&self) -> Result<ProfilerParams> {
        if !(0.0..0.5).contains(&self.drop_fraction) {
            return Err(Error::InvalidInput(format!(
                "--drop-fraction must be in [0, 0.5), got {}",
                self.drop_fraction
            )));
        }
        Ok(ProfilerParams {
            forest: ForestParams {
                n_trees: self.trees as usize,
                max_depth: self.max_depth as usize,
                min_leaf: self.min_leaf as usize,
                max_features: self.max_features.map(|k| k as usize),
                bootstrap: !self.no_bootstrap,
            },
            drop_fraction: self.drop_fraction,
            do_elimination: !self.no_elimination,
        })
    }
}

#[derive(Debug, Args)]
pub struct ProfileTrainArgs {
    /// Corpus manifest TSV.
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output model file.
    #[arg(long)]
    pub model: PathBuf,
    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct LtlmTrainArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    /// Number of stratified batches.
    #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
    pub batches: u64,
    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct ProfilePredictArgs {
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long)]
    pub corpus: PathBuf,
    /// Output TSV `doc_id gender age_group`.
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct ProfileEvalArgs {
    #[arg(long)]
    pub corpus: PathBuf,
    #[arg(long, default_value_t = 10, value_parser = clap::value_parser!(u64).range(2..))]
    pub folds: u64,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub batches: u64,
    /// Optional per-document prediction TSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[command(flatten)]
    pub forest: ForestArgs,
}

#[derive(Debug, Args)]
pub struct NerTrainArgs {
    /// Training corpus in CoNLL layout.
    #[arg(long)]
    pub train: PathBuf,
    #[arg(long)]
    pub model: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=3))]
    pub levels: u64,
    /// Gaussian prior width.
    #[arg(long, default_value_t = 1.0)]
    pub sigma: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 1e-4)]
    pub grad_tol: f64,
    /// Drop attributes seen fewer times than this.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub min_count: u64,
    /// Half-width of the context window.
    #[arg(long, default_value_t = 2)]
    pub window: usize,
}

#[derive(Debug, Args)]
pub struct NerTagArgs {
    #[arg(long)]
    pub model: PathBuf,
    /// CoNLL input; columns after the chunk column are kept as they are.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long)]
    pub output: PathBuf,
}

#[derive(Debug, Args)]
pub struct NerEvalArgs {
    /// CoNLL file with `levels` gold columns followed by `levels` predicted ones.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..=3))]
    pub levels: u64,
    /// Optional report TSV.
    #[arg(long)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct LinkArgs {
    /// Knowledge base TSV `surface link_id description`.
    #[arg(long)]
    pub kb: PathBuf,
    /// CoNLL input; entity spans come from tag column `--column`.
    #[arg(long)]
    pub input: PathBuf,
    /// 1-based index of the tag column after the chunk column.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub column: u64,
    #[arg(long)]
    pub output: PathBuf,
    /// Report NIL when every candidate scores 0.
    #[arg(long)]
    pub nil_on_zero: bool,
    /// POS prefixes that mark proper nouns (repeatable).
    #[arg(long = "pos-prefix")]
    pub pos_prefixes: Vec<String>,
}

#[derive(Debug, Args)]
pub struct KfoldArgs {
    /// Number of items.
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = 10)]
    pub k: usize,
    /// Output TSV `index fold`.
    #[arg(long)]
    pub output: PathBuf,
}

/// What a successful run prints: free-form report text, then the
/// `RESULT key=value ...` line.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct Outcome {
    pub report: String,
    pub result: Vec<(String, String)>,
}

impl Outcome {
    fn key(&mut self, k: &str, v: impl ToString) {
        self.result.push((k.to_string(), v.to_string()));
    }

    pub fn result_line(&self) -> String {
        let mut line = String::from("RESULT");
        for (k, v) in &self.result {
            let _ = write!(line, " {k}={v}");
        }
        line
    }
}

fn fmt4(x: f64) -> String {
    format!("{x:.4}")
}

/// Writes the sidecar `<output>.meta` describing the run.
fn write_meta(output: &Path, cli: &Cli) -> Result<()> {
    let mut meta = output.as_os_str().to_owned();
    meta.push(".meta");
    let text = format!(
        "profner {}\nseed={}\nthreads={}\ncommand={:?}\n",
        env!("CARGO_PKG_VERSION"),
        cli.seed,
        cli.threads,
        cli.command
    );
    write_string(Path::new(&meta), &text)
}

pub fn run(cli: &Cli) -> Result<Outcome> {
    par::with_threads(cli.threads, || dispatch(cli))
}

fn dispatch(cli: &Cli) -> Result<Outcome> {
    let mut out = Outcome::default();
    let seed = cli.seed;
    match &cli.command {
        Command::ProfileTrain(a) => {
            let corpus = load_profiling_corpus(&a.corpus)?;
            let model = train_profiler(&corpus, &a.forest.params()?, seed)?;
            model.save(&a.model)?;
            write_meta(&a.model, cli)?;
            profile_summary(&mut out, &model, corpus.len(), 1, seed);
        }
        Command::LtlmTrain(a) => {
            let corpus = load_profiling_corpus(&a.corpus)?;
            let model = ltlm_train(&corpus, a.batches as usize, &a.forest.params()?, seed)?;
            model.save(&a.model)?;
            write_meta(&a.model, cli)?;
            profile_summary(&mut out, &model, corpus.len(), a.batches as usize, seed);
        }
        Command::ProfilePredict(a) => {
            let model = ProfilerModel::load(&a.model)?;
            let corpus = load_profiling_corpus(&a.corpus)?;
            let preds = predict_profiles(&model, &corpus)?;
            let mut tsv = String::from("doc_id\tgender\tage_group\n");
            for (d, p) in corpus.docs.iter().zip(&preds) {
                let _ = writeln!(tsv, "{}\t{}\t{}", d.doc_id, p.gender, p.age_group);
            }
            write_string(&a.output, &tsv)?;
            write_meta(&a.output, cli)?;
            let n = corpus.len() as f64;
            let g = corpus.docs.iter().zip(&preds).filter(|(d, p)| d.gender == p.gender).count();
            let ag = corpus.docs.iter().zip(&preds).filter(|(d, p)| d.age_group == p.age_group).count();
            out.key("docs", corpus.len());
            out.key("gender_accuracy", fmt4(g as f64 / n));
            out.key("age_accuracy", fmt4(ag as f64 / n));
        }
        Command::ProfileEval(a) => {
            let corpus = load_profiling_corpus(&a.corpus)?;
            let r = cross_validate(&corpus, a.folds as usize, a.batches as usize, &a.forest.params()?, seed)?;
            if let Some(path) = &a.output {
                let mut tsv = String::from("doc_id\tgender\tage_group\tpred_gender\tpred_age_group\n");
                for (d, p) in corpus.docs.iter().zip(&r.predictions) {
                    let _ = writeln!(tsv, "{}\t{}\t{}\t{}\t{}", d.doc_id, d.gender, d.age_group, p.gender, p.age_group);
                }
                write_string(path, &tsv)?;
                write_meta(path, cli)?;
            }
            let _ = writeln!(
                out.report,
                "{}-fold CV over {} documents\ngender: accuracy {:.2}%  macro-F1 {:.2}%\nage:    accuracy {:.2}%  macro-F1 {:.2}%",
                r.folds,
                corpus.len(),
                100.0 * r.gender_accuracy,
                100.0 * r.gender_macro_f1,
                100.0 * r.age_accuracy,
                100.0 * r.age_macro_f1
            );
            out.key("folds", r.folds);
            out.key("docs", corpus.len());
            out.key("gender_f1", fmt4(r.gender_macro_f1));
            out.key("gender_accuracy", fmt4(r.gender_accuracy));
            out.key("age_f1", fmt4(r.age_macro_f1));
            out.key("age_accuracy", fmt4(r.age_accuracy));
            out.key("seed", seed);
        }
        Command::NerTrain(a) => {
            let levels = a.levels as usize;
            let sentences = load_conll_corpus(&a.train, levels)?;
            if !(a.sigma > 0.0) {
                return Err(Error::InvalidInput(format!("--sigma must be positive, got {}", a.sigma)));
            }
            let params = NestedParams {
                crf: CrfParams {
                    sigma: a.sigma,
                    lbfgs: LbfgsParams {
                        max_iterations: a.max_iter,
                        grad_tol: a.grad_tol,
                        ..Default::default()
                    },
                    min_count: a.min_count as usize,
                },
                half_width: a.window,
            };
            let model = train_nested(&sentences, levels, &params)?;
            model.save(&a.model)?;
            write_meta(&a.model, cli)?;
            out.key("sentences", sentences.len());
            out.key("levels", levels);
            for (k, m) in model.levels.iter().enumerate() {
                out.key(&format!("features_level{}", k + 1), m.attributes.len());
                out.key(&format!("tags_level{}", k + 1), m.n_tags());
            }
        }
        Command::NerTag(a) => {
            let model = NestedModel::load(&a.model)?;
            let mut sentences = load_conll_corpus(&a.input, 0)?;
            let tagged: Vec<Result<Vec<Vec<String>>>> = par::map(&sentences, |s| tag_nested(&model, s));
            let mut tokens = 0;
            for (s, rows) in sentences.iter_mut().zip(tagged) {
                let rows = rows?;
                for (i, t) in s.tokens.iter_mut().enumerate() {
                    t.extra.extend(rows.iter().map(|r| r[i].clone()));
                }
                tokens += s.len();
            }
            save_conll(&a.output, &sentences)?;
            write_meta(&a.output, cli)?;
            out.key("sentences", sentences.len());
            out.key("tokens", tokens);
            out.key("levels", model.n_levels());
        }
        Command::NerEval(a) => {
            let levels = a.levels as usize;
            let sentences = load_conll_corpus(&a.input, levels)?;
            let reports = evaluate_levels(&sentences, levels, &a.input)?;
            out.report = reports_table(&reports);
            if let Some(path) = &a.output {
                write_string(path, &reports_tsv(&reports))?;
                write_meta(path, cli)?;
            }
            let all = &reports[0];
            out.key("precision", fmt4(all.precision));
            out.key("recall", fmt4(all.recall));
            out.key("f1", fmt4(all.f1));
            out.key("approximate", fmt4(all.approximate));
            for r in &reports[1..] {
                out.key(&format!("f1_level{}", r.level), fmt4(r.f1));
            }
        }
        Command::Link(a) => {
            let kb = load_kb(&a.kb)?;
            let sentences = load_conll_corpus(&a.input, 0)?;
            let col = a.column as usize - 1;
            let prefixes: Vec<String> = if a.pos_prefixes.is_empty() {
                DEFAULT_PROPER_NOUN_PREFIXES.iter().map(|s| s.to_string()).collect()
            } else {
                a.pos_prefixes.clone()
            };
            let options = LinkOptions {
                nil_on_zero: a.nil_on_zero,
            };
            let mut rows = Vec::new();
            for (idx, s) in sentences.iter().enumerate() {
                let tags = column_tags(s, col, idx, &a.input)?;
                let id = s.comment_value("tweet_id").unwrap_or_else(|| (idx + 1).to_string());
                for d in link_sentence(&kb, s, &repair_bio(&tags), &prefixes, &options) {
                    rows.push((id.clone(), d));
                }
            }
            write_string(&a.output, &links_tsv(&rows))?;
            write_meta(&a.output, cli)?;
            let nil = rows.iter().filter(|(_, d)| d.link.is_none()).count();
            out.key("entities", rows.len());
            out.key("linked", rows.len() - nil);
            out.key("nil", nil);
        }
        Command::Kfold(a) => {
            let plan = kfold_split(a.n, a.k, seed)?;
            let mut fold_of = vec![0; a.n];
            for (f, idx) in plan.folds.iter().enumerate() {
                for &i in idx {
                    fold_of[i] = f;
                }
            }
            let mut tsv = String::from("index\tfold\n");
            for (i, f) in fold_of.iter().enumerate() {
                let _ = writeln!(tsv, "{i}\t{f}");
            }
            write_string(&a.output, &tsv)?;
            write_meta(&a.output, cli)?;
            let sizes: Vec<String> = plan.folds.iter().map(|f| f.len().to_string()).collect();
            out.key("n", a.n);
            out.key("k", a.k);
            out.key("sizes", sizes.join(","));
        }
    }
    Ok(out)
}

fn profile_summary(out: &mut Outcome, model: &ProfilerModel, docs: usize, batches: usize, seed: u64) {
    out.key("docs", docs);
    out.key("batches", batches);
    out.key("vocab", model.vocab.len());
    out.key("features_kept", model.kept_features());
    out.key("trees", model.params.forest.n_trees);
    out.key("seed", seed);
}

fn column_tags(s: &TokenSentence, col: usize, idx: usize, origin: &Path) -> Result<Vec<String>> {
    s.tokens
        .iter()
        .map(|t| {
            t.extra.get(col).cloned().ok_or_else(|| {
                Error::InvalidInput(format!(
                    "{}: sentence {} has no tag column {}",
                    origin.display(),
                    idx + 1,
                    col + 1
                ))
            })
        })
        .collect()
}

/// Overall report (level 0) followed by one report per level.
fn evaluate_levels(sentences: &[TokenSentence], levels: usize, origin: &Path) -> Result<Vec<LevelReport>> {
    let mut per_level = Vec::with_capacity(levels);
    let mut all = crate::eval::EntityMatchReport::default();
    for level in 0..levels {
        let gold: Vec<Vec<String>> = sentences.iter().map(|s| s.level_tags(level)).collect();
        let pred = sentences
            .iter()
            .enumerate()
            .map(|(i, s)| column_tags(s, level, i, origin))
            .collect::<Result<Vec<_>>>()?;
        let r = evaluate_level(level + 1, &gold, &pred)?;
        all.merge(&r.counts);
        per_level.push(r);
    }
    let mut out = vec![LevelReport::from_counts(0, all)];
    out.extend(per_level);
    Ok(out)
}
