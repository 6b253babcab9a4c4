use std::collections::HashSet;

use profner::corpus::repair_bio;
use profner::eval::{approximate_match, entities, evaluate_level, f1, kfold_split, EntityMatchReport};
use profner::linker::{dot_product, link_entity, unigram_vector, KnowledgeBase, LinkOptions, UnigramVector};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

const POOL: [&str; 8] = ["city", "river", "team", "film", "actor", "state", "club", "song"];

fn random_kb(rng: &mut ChaCha8Rng) -> KnowledgeBase {
    let mut kb = KnowledgeBase::default();
    for c in 0..rng.gen_range(1..6) {
        let desc: Vec<&str> = (0..rng.gen_range(0..6)).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect();
        kb.insert("Paris", &format!("dbr:P{}", (c * 7) % 10), &desc.join(" ")).ok();
    }
    kb
}

fn random_context(rng: &mut ChaCha8Rng) -> UnigramVector {
    let words: Vec<&str> = (0..rng.gen_range(0..8)).map(|_| POOL[rng.gen_range(0..POOL.len())]).collect();
    unigram_vector(&words.join(" "))
}

#[test]
fn link_is_exhaustive_argmax() {
    let mut rng = ChaCha8Rng::seed_from_u64(31);
    for _ in 0..500 {
        let kb = random_kb(&mut rng);
        let ctx = random_context(&mut rng);
        let d = link_entity(&kb, "paris", &ctx, &LinkOptions::default());
        let mut best: Option<(f64, &str)> = None;
        for c in kb.candidates("Paris") {
            let s = dot_product(&ctx, &c.vector);
            if best.is_none_or(|(bs, bl)| s > bs || (s == bs && c.link_id.as_str() < bl)) {
                best = Some((s, c.link_id.as_str()));
            }
        }
        let (s, l) = best.unwrap();
        assert_eq!(d.link.as_deref(), Some(l));
        assert_eq!(d.score, s);
    }
}

#[test]
fn unknown_surface_is_nil() {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let kb = random_kb(&mut rng);
    let d = link_entity(&kb, "Lyon", &random_context(&mut rng), &LinkOptions::default());
    assert_eq!((d.link_or_nil(), d.candidates, d.score), ("NIL", 0, 0.0));
}

#[test]
fn worked_metric_examples() {
    let r = EntityMatchReport {
        perfect: 4,
        partial: 5,
        retrieved: 10,
        gold: 10,
    };
    assert_eq!(approximate_match(&r), 0.65);
    assert!((100.0 * f1(0.3370, 0.1736) - 22.92).abs() < 0.01);
}

#[test]
fn perfect_prediction_scores_one() {
    let gold = vec![
        vec!["B-PER".to_string(), "I-PER".into(), "O".into(), "B-LOC".into()],
        vec!["O".to_string(), "B-ORG".into()],
    ];
    let r = evaluate_level(1, &gold, &gold).unwrap();
    assert_eq!((r.precision, r.recall, r.f1, r.approximate), (1.0, 1.0, 1.0, 1.0));
    assert_eq!(r.counts.gold, 3);
}

fn tag_strategy() -> impl Strategy<Value = Vec<String>> {
    prop::collection::vec(
        prop::sample::select(vec!["O", "B-PER", "I-PER", "B-LOC", "I-LOC"]).prop_map(str::to_string),
        0..20,
    )
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(256))]

    #[test]
    fn linking_invariant_under_context_scaling(seed in any::<u64>(), k in 1u32..9) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let kb = random_kb(&mut rng);
        let ctx = random_context(&mut rng);
        let scaled: UnigramVector = ctx.iter().map(|(w, c)| (w.clone(), c * k)).collect();
        let a = link_entity(&kb, "Paris", &ctx, &LinkOptions::default());
        let b = link_entity(&kb, "Paris", &scaled, &LinkOptions::default());
        prop_assert_eq!(&a.link, &b.link);
        prop_assert_eq!(a.score * f64::from(k), b.score);
    }

    #[test]
    fn repaired_tags_keep_spans_and_are_valid(tags in tag_strategy()) {
        let fixed = repair_bio(&tags);
        prop_assert!(profner::corpus::validate_bio(&fixed).is_ok());
        prop_assert_eq!(entities(0, &fixed), entities(0, &tags));
    }

    #[test]
    fn scores_are_bounded(gold in tag_strategy(), pred in tag_strategy()) {
        let n = gold.len().min(pred.len());
        let r = evaluate_level(1, &[gold[..n].to_vec()], &[pred[..n].to_vec()]).unwrap();
        for v in [r.precision, r.recall, r.f1, r.approximate] {
            prop_assert!((0.0..=1.0).contains(&v));
        }
        prop_assert!(r.f1 <= r.precision.max(r.recall) + 1e-12);
        prop_assert!(r.approximate >= r.precision);
    }

    #[test]
    fn kfold_partitions(n in 2usize..200, k in 2usize..12, seed in any::<u64>()) {
        prop_assume!(k <= n);
        let plan = kfold_split(n, k, seed).unwrap();
        prop_assert_eq!(plan.clone(), kfold_split(n, k, seed).unwrap());
        let mut seen = HashSet::new();
        for f in &plan.folds {
            prop_assert!(f.len() == n / k || f.len() == n / k + 1);
            prop_assert!(f.windows(2).all(|w| w[0] < w[1]));
            for &i in f {
                prop_assert!(seen.insert(i));
            }
        }
        prop_assert_eq!(seen.len(), n);
    }
}
