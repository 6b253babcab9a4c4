use std::path::{Path, PathBuf};
use std::process::{Command, Output};

use profner::corpus::save_conll;
use profner::synth;

fn profner(args: &[&str]) -> Output {
    Command::new(env!("CARGO_BIN_EXE_profner"))
        .args(args)
        .output()
        .expect("binary runs")
}

fn p(path: &Path) -> &str {
    path.to_str().unwrap()
}

fn result_value(out: &Output, key: &str) -> String {
    let stdout = String::from_utf8_lossy(&out.stdout);
    let line = stdout
        .lines()
        .find(|l| l.starts_with("RESULT "))
        .unwrap_or_else(|| panic!("no RESULT line in {stdout:?}"));
    line.split_whitespace()
        .find_map(|kv| kv.strip_prefix(&format!("{key}=")))
        .unwrap_or_else(|| panic!("no {key} in {line}"))
        .to_string()
}

fn ok(out: Output) -> Output {
    assert!(
        out.status.success(),
        "exit {:?}: {}",
        out.status.code(),
        String::from_utf8_lossy(&out.stderr)
    );
    out
}

fn write_toy_ner(dir: &Path) -> (PathBuf, PathBuf) {
    let all = synth::capitalization_corpus(70, synth::NAMES.len(), 1);
    let (train, test) = all.split_at(50);
    let train_path = dir.join("train.conll");
    let test_path = dir.join("test.conll");
    save_conll(&train_path, train).unwrap();
    save_conll(&test_path, test).unwrap();
    (train_path, test_path)
}

#[test]
fn no_arguments_prints_usage_and_exits_2() {
    let out = profner(&[]);
    assert_eq!(out.status.code(), Some(2));
    let text = String::from_utf8_lossy(&out.stderr).to_string() + &String::from_utf8_lossy(&out.stdout);
    assert!(text.contains("Usage"), "{text}");
}

#[test]
fn ner_train_tag_eval_pipeline() {
    let dir = tempfile::tempdir().unwrap();
    let (train, test) = write_toy_ner(dir.path());
    let model = dir.path().join("ner.model");
    let tagged = dir.path().join("tagged.conll");
    ok(profner(&["ner-train", "--train", p(&train), "--model", p(&model)]));
    assert!(dir.path().join("ner.model.meta").exists());
    ok(profner(&["ner-tag", "--model", p(&model), "--input", p(&test), "--output", p(&tagged)]));
    let eval = ok(profner(&["ner-eval", "--input", p(&tagged)]));
    let f1: f64 = result_value(&eval, "f1").parse().unwrap();
    assert!(f1 >= 0.99, "f1 {f1}");

    let again = dir.path().join("tagged2.conll");
    ok(profner(&["--threads", "4", "ner-tag", "--model", p(&model), "--input", p(&test), "--output", p(&again)]));
    assert_eq!(std::fs::read(&tagged).unwrap(), std::fs::read(&again).unwrap());
}

#[test]
fn nested_levels_round_trip_through_cli() {
    let dir = tempfile::tempdir().unwrap();
    let corpus = dir.path().join("nested.conll");
    save_conll(&corpus, &synth::nested_corpus()).unwrap();
    let model = dir.path().join("nested.model");
    let tagged = dir.path().join("nested.tagged");
    ok(profner(&["ner-train", "--train", p(&corpus), "--levels", "3", "--model", p(&model)]));
    ok(profner(&["ner-tag", "--model", p(&model), "--input", p(&corpus), "--output", p(&tagged)]));
    let eval = ok(profner(&["ner-eval", "--input", p(&tagged), "--levels", "3"]));
    assert_eq!(result_value(&eval, "f1"), "1.0000");
    assert_eq!(result_value(&eval, "f1_level3"), "1.0000");
}

#[test]
fn ltlm_single_batch_matches_profile_train() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::profiling_corpus(40, 2).write_to_dir(dir.path()).unwrap();
    let a = dir.path().join("a.model");
    let b = dir.path().join("b.model");
    ok(profner(&["profile-train", "--corpus", p(&manifest), "--model", p(&a), "--trees", "10"]));
    ok(profner(&["ltlm-train", "--corpus", p(&manifest), "--model", p(&b), "--trees", "10", "--batches", "1"]));
    assert_eq!(std::fs::read(&a).unwrap(), std::fs::read(&b).unwrap());

    let preds = dir.path().join("preds.tsv");
    let out = ok(profner(&["profile-predict", "--model", p(&a), "--corpus", p(&manifest), "--output", p(&preds)]));
    assert_eq!(result_value(&out, "docs"), "40");
    let text = std::fs::read_to_string(&preds).unwrap();
    assert!(text.starts_with("doc_id\tgender\tage_group\n"));
    assert_eq!(text.lines().count(), 41);
}

#[test]
fn runs_are_byte_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::profiling_corpus(30, 4).write_to_dir(dir.path()).unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        ok(profner(&["--seed", "7", "ltlm-train", "--corpus", p(&manifest), "--model", p(&out), "--trees", "8", "--batches", "3"]));
        std::fs::read(out).unwrap()
    };
    assert_eq!(run("x.model"), run("y.model"));
    let meta = std::fs::read_to_string(dir.path().join("x.model.meta")).unwrap();
    assert!(meta.contains("seed=7"));
}

#[test]
fn profile_eval_reports_f1() {
    let dir = tempfile::tempdir().unwrap();
    let manifest = synth::profiling_corpus(40, 9).write_to_dir(dir.path()).unwrap();
    let out = ok(profner(&["profile-eval", "--corpus", p(&manifest), "--folds", "4", "--trees", "10"]));
    let f1: f64 = result_value(&out, "gender_f1").parse().unwrap();
    assert!((0.0..=1.0).contains(&f1));
}

#[test]
fn link_writes_nil_for_unknown_entities() {
    let dir = tempfile::tempdir().unwrap();
    let kb = dir.path().join("kb.tsv");
    std::fs::write(&kb, "Chicago\tdbr:Chicago\tcity in Illinois\nchicago\tdbr:Chicago_Bears\tBears football team\n").unwrap();
    let input = dir.path().join("in.conll");
    std::fs::write(
        &input,
        "# tweet_id = 99\nChicago\tNNP\tB-NP\tB-LOC\nBears\tNNPS\tI-NP\tO\nwin\tVB\tO\tO\n\nSeeta\tNNP\tB-NP\tB-PER\n",
    )
    .unwrap();
    let out_path = dir.path().join("links.tsv");
    let out = ok(profner(&["link", "--kb", p(&kb), "--input", p(&input), "--output", p(&out_path)]));
    assert_eq!(result_value(&out, "nil"), "1");
    let text = std::fs::read_to_string(&out_path).unwrap();
    assert_eq!(
        text,
        "tweet_id\tentity_surface\tlink_or_NIL\tscore\n99\tChicago\tdbr:Chicago_Bears\t1\n2\tSeeta\tNIL\t0\n"
    );
}

#[test]
fn kfold_writes_every_index_once() {
    let dir = tempfile::tempdir().unwrap();
    let out_path = dir.path().join("folds.tsv");
    let out = ok(profner(&["kfold", "--n", "10", "--k", "3", "--output", p(&out_path)]));
    let mut sizes: Vec<usize> = result_value(&out, "sizes").split(',').map(|s| s.parse().unwrap()).collect();
    sizes.sort_unstable();
    assert_eq!(sizes, vec![3, 3, 4]);
    assert_eq!(std::fs::read_to_string(&out_path).unwrap().lines().count(), 11);
}

#[test]
fn errors_are_one_line_on_stderr() {
    let out = profner(&["ner-eval", "--input", "/nonexistent/file.conll"]);
    assert!(!out.status.success());
    assert!(out.stdout.is_empty());
    let err = String::from_utf8_lossy(&out.stderr);
    assert_eq!(err.trim_end().lines().count(), 1, "{err}");

    let bad = profner(&["kfold", "--n", "3", "--k", "5", "--output", "/tmp/unused.tsv"]);
    assert!(!bad.status.success());
    let unknown = profner(&["kfold", "--bogus"]);
    assert_eq!(unknown.status.code(), Some(2));
}
