//! One worker versus every core on the data-parallel hot paths.
//!
//! Build with `--no-default-features` to measure the sequential fallback;
//! both arms then run on the calling thread.

use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};
use profner::crf::{level_observations, nll_and_gradient, CrfDataset};
use profner::par;
use profner::profiler::{batch_features, ltlm_features, make_batches, train_forest, ForestParams, Schedule};
use profner::synth;
use profner::wordspace::Vocabulary;

const ARMS: [(&str, usize); 2] = [("one-thread", 1), ("all-threads", 0)];

fn forest(c: &mut Criterion) {
    let corpus = synth::profiling_corpus(200, 1);
    let vocab = Vocabulary::build(&corpus.docs);
    let features = batch_features(&corpus.docs, &vocab).unwrap();
    let labels: Vec<usize> = corpus.docs.iter().map(|d| d.gender.index()).collect();
    let names = vec!["male".to_string(), "female".to_string()];
    let params = ForestParams::default();
    let mut g = c.benchmark_group("forest_train");
    g.sample_size(10);
    for (name, threads) in ARMS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || train_forest(&features, &labels, &names, &params, 7).unwrap()))
        });
    }
    g.finish();
}

fn crf_gradient(c: &mut Criterion) {
    let sentences = synth::capitalization_corpus(400, synth::NAMES.len(), 2);
    let obs = level_observations(&sentences, 0, 2);
    let gold: Vec<Vec<String>> = sentences.iter().map(|s| s.level_tags(0)).collect();
    let data = CrfDataset::compile(&obs, &gold, 1).unwrap();
    let w: Vec<f64> = (0..data.n_weights()).map(|i| ((i % 13) as f64 - 6.0) / 20.0).collect();
    let mut g = c.benchmark_group("crf_nll_gradient");
    for (name, threads) in ARMS {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || nll_and_gradient(&w, &data, 1.0).unwrap()))
        });
    }
    g.finish();
}

fn ltlm(c: &mut Criterion) {
    let corpus = synth::profiling_corpus(240, 3);
    let vocab = Vocabulary::build(&corpus.docs);
    let plan = make_batches(&corpus, 4, 5).unwrap();
    let mut g = c.benchmark_group("ltlm_features");
    g.sample_size(10);
    for (name, threads, schedule) in [("serial", 1, Schedule::Serial), ("parallel", 0, Schedule::Parallel)] {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| par::with_threads(threads, || ltlm_features(&corpus, &plan, &vocab, schedule).unwrap()))
        });
    }
    g.finish();
}

criterion_group!(benches, forest, crf_gradient, ltlm);
criterion_main!(benches);
