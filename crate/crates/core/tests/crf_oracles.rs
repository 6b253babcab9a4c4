mod common;

use common::{all_paths, brute_force, brute_objective, random_dataset, RandomCrf};
use profner::corpus::TokenRecord;
use profner::crf::{
    extract_token_features, nll_and_gradient, train_crf_report, window_features, CrfParams, Potentials,
};
use proptest::prelude::*;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

#[test]
fn inference_matches_enumeration() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for _ in 0..300 {
        let c = RandomCrf::sample(&mut rng, 4096, 8, 4);
        let m = c.model();
        let bf = brute_force(&c);
        let fb = m.forward_backward(&c.attrs).unwrap();
        assert!((fb.log_z - bf.log_z).abs() < 1e-9, "{} vs {}", fb.log_z, bf.log_z);
        for (a, b) in fb.node.iter().zip(&bf.node) {
            for (x, y) in a.iter().zip(b) {
                assert!((x - y).abs() < 1e-9);
            }
        }
        let (path, score) = m.viterbi(&c.attrs).unwrap();
        assert!((score - bf.best_score).abs() < 1e-9);
        assert!((c.score(&path) - score).abs() < 1e-9);
    }
}

#[test]
fn random_four_by_three_log_z() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..20 {
        let mut c = RandomCrf::sample(&mut rng, 4096, 4, 3);
        while c.attrs.len() != 4 || c.n_tags != 3 {
            c = RandomCrf::sample(&mut rng, 4096, 4, 3);
        }
        assert_eq!(all_paths(4, 3).len(), 81);
        let lz = c.model().forward_backward(&c.attrs).unwrap().log_z;
        assert!((lz - brute_force(&c).log_z).abs() < 1e-9);
    }
}

#[test]
fn dominant_state_weight_decides_tag() {
    use profner::crf::{AttributeIndex, CrfModel};
    let attrs = AttributeIndex::from_names(vec!["w=X".into(), "w=y".into()]).unwrap();
    let mut w = vec![0.0; 2 * 2 + 4];
    w[1] = 5.0;
    let m = CrfModel::new(vec!["O".into(), "B".into()], attrs, w, 1.0).unwrap();
    let tags = m.tag(&[vec!["w=y"], vec!["w=X"], vec!["w=y"]]).unwrap();
    assert_eq!(tags, vec!["O", "B", "O"]);
}

#[test]
fn gradient_matches_central_differences() {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let d = random_dataset(&mut rng, 2, 30, 3);
    assert!(d.n_weights() >= 50);
    let w: Vec<f64> = (0..d.n_weights()).map(|i| ((i * 37 % 11) as f64 - 5.0) / 7.0).collect();
    let sigma = 1.5;
    let (v, g) = nll_and_gradient(&w, &d, sigma).unwrap();
    assert!((v - brute_objective(&w, &d, sigma)).abs() < 1e-9);
    let h = 1e-5;
    let mut num = 0.0;
    let mut den = 0.0;
    for k in 0..w.len() {
        let mut wp = w.clone();
        wp[k] += h;
        let mut wm = w.clone();
        wm[k] -= h;
        let fd = (nll_and_gradient(&wp, &d, sigma).unwrap().0 - nll_and_gradient(&wm, &d, sigma).unwrap().0) / (2.0 * h);
        num += (g[k] - fd).powi(2);
        den += fd.powi(2);
    }
    assert!((num / den).sqrt() < 1e-5, "relative error {}", (num / den).sqrt());
}

#[test]
fn zero_weights_objective_is_length_times_log_tags() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let d = random_dataset(&mut rng, 6, 10, 4);
    let total_len: usize = d.sequences.iter().map(|s| s.len()).sum();
    let (v, _) = nll_and_gradient(&vec![0.0; d.n_weights()], &d, 1.0).unwrap();
    assert!((v - total_len as f64 * 4f64.ln()).abs() < 1e-10);
}

#[test]
fn gradient_at_memorized_optimum_is_dominated_by_prior() {
    use profner::crf::{AttributeIndex, CrfDataset, CrfSequence};
    let d = CrfDataset {
        sequences: vec![CrfSequence {
            attrs: vec![vec![0], vec![1]],
            tags: vec![1, 0],
        }],
        attributes: AttributeIndex::from_names(vec!["a".into(), "b".into()]).unwrap(),
        tags: vec!["O".into(), "B-X".into()],
    };
    let mut w = vec![0.0; d.n_weights()];
    w[1] = 50.0;
    w[2] = 50.0;
    let (_, g) = nll_and_gradient(&w, &d, 1.0).unwrap();
    for (gi, wi) in g.iter().zip(&w) {
        assert!((gi - wi).abs() < 1e-12);
    }
}

#[test]
fn training_objective_never_increases() {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    let d = random_dataset(&mut rng, 12, 20, 3);
    let r = train_crf_report(&d, &CrfParams::default()).unwrap();
    assert!(r.optimizer.history.windows(2).all(|w| w[1] <= w[0]));
    let again = train_crf_report(&d, &CrfParams::default()).unwrap();
    assert_eq!(r.model.weights, again.model.weights);
}

#[test]
fn window_is_concatenation_of_offsets() {
    let s: Vec<TokenRecord> = ["Rain", "in", "Chennai", "2014", "!"]
        .iter()
        .map(|w| TokenRecord::new(w, "NN", "O", &["O"]))
        .collect();
    for i in 0..s.len() {
        let mut want = Vec::new();
        for d in -2isize..=2 {
            let j = i as isize + d;
            if j < 0 || j >= s.len() as isize {
                want.push(format!("w[{d}]:PAD"));
            } else {
                want.extend(extract_token_features(&s, j as usize).into_iter().map(|f| format!("w[{d}]:{f}")));
            }
        }
        let mut got = window_features(&s, i, 2);
        want.sort();
        got.sort();
        assert_eq!(got, want);
    }
}

fn crf_strategy() -> impl Strategy<Value = u64> {
    any::<u64>()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalizer_dominates_every_path(seed in crf_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = RandomCrf::sample(&mut rng, 256, 5, 4);
        let p = Potentials::new(&c.weights, c.n_attrs, c.n_tags, &c.attrs);
        let m = profner::crf::forward_backward(&p).unwrap();
        for path in all_paths(c.attrs.len(), c.n_tags) {
            prop_assert!(m.log_z >= p.score(&path) - 1e-12);
        }
    }

    #[test]
    fn marginals_are_normalized_and_consistent(seed in crf_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = RandomCrf::sample(&mut rng, 4096, 8, 4);
        let m = c.model().forward_backward(&c.attrs).unwrap();
        let t = c.n_tags;
        for row in &m.node {
            prop_assert!((row.iter().sum::<f64>() - 1.0).abs() < 1e-10);
        }
        for (i, e) in m.edge.iter().enumerate() {
            for q in 0..t {
                let out: f64 = (0..t).map(|c2| e[q * t + c2]).sum();
                prop_assert!((out - m.node[i][q]).abs() < 1e-10);
            }
            for c2 in 0..t {
                let inc: f64 = (0..t).map(|q| e[q * t + c2]).sum();
                prop_assert!((inc - m.node[i + 1][c2]).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn viterbi_score_is_its_path_score(seed in crf_strategy()) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let c = RandomCrf::sample(&mut rng, 4096, 12, 4);
        let (path, score) = c.model().viterbi(&c.attrs).unwrap();
        prop_assert_eq!(path.len(), c.attrs.len());
        prop_assert!((c.score(&path) - score).abs() < 1e-9);
    }
}
