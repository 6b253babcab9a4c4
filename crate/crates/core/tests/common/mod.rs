//! Independent reference implementations used by the integration tests.
//! Nothing here calls the library's numerics.

#![allow(dead_code)]

use profner::crf::{AttributeIndex, CrfDataset, CrfModel, CrfSequence};
use rand::Rng;

/// A random CRF over `n_attrs` attributes and one observation sequence.
pub struct RandomCrf {
    pub weights: Vec<f64>,
    pub n_attrs: usize,
    pub n_tags: usize,
    pub attrs: Vec<Vec<u32>>,
}

impl RandomCrf {
    pub fn sample<R: Rng>(rng: &mut R, max_paths: usize, max_len: usize, max_tags: usize) -> Self {
        let n_tags = rng.gen_range(1..=max_tags);
        let mut len_cap = 1;
        while len_cap < max_len && n_tags.pow(len_cap as u32 + 1) <= max_paths {
            len_cap += 1;
        }
        let len = rng.gen_range(1..=len_cap);
        let n_attrs = rng.gen_range(1..=8);
        let n_w = n_attrs * n_tags + n_tags * n_tags;
        let weights = (0..n_w).map(|_| rng.gen_range(-2.0..2.0)).collect();
        let attrs = (0..len)
            .map(|_| {
                let mut a: Vec<u32> = (0..n_attrs as u32).filter(|_| rng.gen_bool(0.4)).collect();
                a.dedup();
                a
            })
            .collect();
        RandomCrf {
            weights,
            n_attrs,
            n_tags,
            attrs,
        }
    }

    pub fn model(&self) -> CrfModel {
        let names = (0..self.n_attrs).map(|i| format!("a{i}")).collect();
        let tags = (0..self.n_tags).map(|i| format!("t{i}")).collect();
        CrfModel::new(tags, AttributeIndex::from_names(names).unwrap(), self.weights.clone(), 1.0).unwrap()
    }

    /// Score straight from the weight layout.
    pub fn score(&self, path: &[usize]) -> f64 {
        brute_score(&self.weights, self.n_attrs, self.n_tags, &self.attrs, path)
    }
}

pub fn brute_score(w: &[f64], n_attrs: usize, t: usize, attrs: &[Vec<u32>], path: &[usize]) -> f64 {
    let mut s = 0.0;
    for (i, &y) in path.iter().enumerate() {
        for &a in &attrs[i] {
            s += w[a as usize * t + y];
        }
        if i > 0 {
            s += w[n_attrs * t + path[i - 1] * t + y];
        }
    }
    s
}

/// Every tag path of length `len` over `t` tags, in lexicographic order.
pub fn all_paths(len: usize, t: usize) -> Vec<Vec<usize>> {
    let total = t.pow(len as u32);
    (0..total)
        .map(|mut k| {
            let mut p = vec![0; len];
            for slot in p.iter_mut().rev() {
                *slot = k % t;
                k /= t;
            }
            p
        })
        .collect()
}

pub struct BruteForce {
    pub log_z: f64,
    pub best_score: f64,
    pub node: Vec<Vec<f64>>,
}

pub fn brute_force(c: &RandomCrf) -> BruteForce {
    let paths = all_paths(c.attrs.len(), c.n_tags);
    let scores: Vec<f64> = paths.iter().map(|p| c.score(p)).collect();
    let best_score = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    let z: f64 = scores.iter().map(|s| (s - best_score).exp()).sum();
    let log_z = best_score + z.ln();
    let mut node = vec![vec![0.0; c.n_tags]; c.attrs.len()];
    for (p, s) in paths.iter().zip(&scores) {
        let prob = (s - log_z).exp();
        for (i, &y) in p.iter().enumerate() {
            node[i][y] += prob;
        }
    }
    BruteForce {
        log_z,
        best_score,
        node,
    }
}

/// Random dataset of `n_seq` sequences over at least `n_attrs` attributes.
pub fn random_dataset<R: Rng>(rng: &mut R, n_seq: usize, n_attrs: usize, n_tags: usize) -> CrfDataset {
    let names: Vec<String> = (0..n_attrs).map(|i| format!("f{i}")).collect();
    let tags: Vec<String> = std::iter::once("O".to_string())
        .chain((1..n_tags).map(|i| format!("B-T{i}")))
        .collect();
    let sequences = (0..n_seq)
        .map(|_| {
            let len = rng.gen_range(3..7);
            CrfSequence {
                attrs: (0..len)
                    .map(|_| {
                        let mut a: Vec<u32> = (0..n_attrs as u32).filter(|_| rng.gen_bool(0.3)).collect();
                        a.dedup();
                        a
                    })
                    .collect(),
                tags: (0..len).map(|_| rng.gen_range(0..n_tags as u32)).collect(),
            }
        })
        .collect();
    CrfDataset {
        sequences,
        attributes: AttributeIndex::from_names(names).unwrap(),
        tags,
    }
}

/// Objective recomputed by enumeration: sum of (log Z - gold score) plus the L2 term.
pub fn brute_objective(w: &[f64], d: &CrfDataset, sigma: f64) -> f64 {
    let (a, t) = (d.attributes.len(), d.tags.len());
    let mut v = w.iter().map(|x| x * x).sum::<f64>() / (2.0 * sigma * sigma);
    for s in &d.sequences {
        let scores: Vec<f64> = all_paths(s.attrs.len(), t)
            .iter()
            .map(|p| brute_score(w, a, t, &s.attrs, p))
            .collect();
        let m = scores.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let log_z = m + scores.iter().map(|x| (x - m).exp()).sum::<f64>().ln();
        let gold: Vec<usize> = s.tags.iter().map(|&y| y as usize).collect();
        v += log_z - brute_score(w, a, t, &s.attrs, &gold);
    }
    v
}

/// `sup_x |F_a(x) - F_b(x)|` scanned over every sample point.
pub fn brute_ks(a: &[f64], b: &[f64]) -> f64 {
    let mut best = 0.0f64;
    for &x in a.iter().chain(b) {
        let fa = a.iter().filter(|&&v| v <= x).count() as f64 / a.len() as f64;
        let fb = b.iter().filter(|&&v| v <= x).count() as f64 / b.len() as f64;
        best = best.max((fa - fb).abs());
    }
    best
}

/// Population moments by the textbook two-pass formulas.
pub fn reference_moments(v: &[f64]) -> [f64; 9] {
    let n = v.len() as f64;
    let mean = v.iter().sum::<f64>() / n;
    let m2 = v.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m3 = v.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
    let m4 = v.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    let (skew, kurt) = if m2 > 0.0 {
        (m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
    } else {
        (0.0, 0.0)
    };
    let mut s = v.to_vec();
    s.sort_by(f64::total_cmp);
    let q = |p: f64| {
        let h = (s.len() - 1) as f64 * p;
        let lo = h.floor() as usize;
        let hi = h.ceil() as usize;
        s[lo] + (h - lo as f64) * (s[hi] - s[lo])
    };
    let total: f64 = v.iter().map(|x| x.abs()).sum();
    let entropy = if total == 0.0 {
        0.0
    } else {
        -v.iter()
            .map(|x| x.abs() / total)
            .filter(|&p| p > 0.0)
            .map(|p| p * p.ln())
            .sum::<f64>()
    };
    [mean, m2, skew, kurt, s[0], s[s.len() - 1], q(0.5), q(0.75) - q(0.25), entropy]
}
