//! Exact inference on a linear chain: log-domain forward-backward and
//! max-product decoding.

use crate::error::{Error, Result};

/// Per-position state scores and the transition matrix of one sequence.
#[derive(Debug, Clone, PartialEq)]
pub struct Potentials {
    pub n_tags: usize,
    /// `state[i][t]`: sum of state weights of position `i`'s attributes for tag `t`.
    pub state: Vec<Vec<f64>>,
    /// `trans[p * n_tags + c]`.
    pub trans: Vec<f64>,
}

impl Potentials {
    pub fn new(weights: &[f64], n_attrs: usize, n_tags: usize, attrs: &[Vec<u32>]) -> Self {
        let state = attrs
            .iter()
            .map(|position| {
                let mut row = vec![0.0; n_tags];
                for &a in position {
                    let base = a as usize * n_tags;
                    for (t, s) in row.iter_mut().enumerate() {
                        *s += weights[base + t];
                    }
                }
                row
            })
            .collect();
        let off = n_attrs * n_tags;
        Potentials {
            n_tags,
            state,
            trans: weights[off..off + n_tags * n_tags].to_vec(),
        }
    }

    pub fn len(&self) -> usize {
        self.state.len()
    }

    pub fn is_empty(&self) -> bool {
        self.state.is_empty()
    }

    pub fn transition(&self, prev: usize, cur: usize) -> f64 {
        self.trans[prev * self.n_tags + cur]
    }

    /// Unnormalized log score of a tag sequence.
    pub fn score(&self, tags: &[usize]) -> f64 {
        let mut s = 0.0;
        for (i, &t) in tags.iter().enumerate() {
            s += self.state[i][t];
            if i > 0 {
                s += self.transition(tags[i - 1], t);
            }
        }
        s
    }
}

pub fn logsumexp(xs: &[f64]) -> f64 {
    let m = xs.iter().copied().fold(f64::NEG_INFINITY, f64::max);
    if m == f64::NEG_INFINITY {
        return m;
    }
    m + xs.iter().map(|x| (x - m).exp()).sum::<f64>().ln()
}

#[derive(Debug, Clone, PartialEq)]
pub struct Marginals {
    pub log_z: f64,
    /// `node[i][t] = P(y_i = t)`.
    pub node: Vec<Vec<f64>>,
    /// `edge[i - 1][p * T + c] = P(y_{i-1} = p, y_i = c)` for `i >= 1`.
    pub edge: Vec<Vec<f64>>,
}

fn non_empty(p: &Potentials) -> Result<()> {
    if p.is_empty() {
        Err(Error::InvalidInput("empty sequence".into()))
    } else {
        Ok(())
    }
}

pub fn forward_backward(p: &Potentials) -> Result<Marginals> {
    non_empty(p)?;
    let (n, t) = (p.len(), p.n_tags);
    let mut alpha = vec![vec![0.0; t]; n];
    let mut beta = vec![vec![0.0; t]; n];
    let mut buf = vec![0.0; t];
    alpha[0].copy_from_slice(&p.state[0]);
    for i in 1..n {
        for c in 0..t {
            for (q, b) in buf.iter_mut().enumerate() {
                *b = alpha[i - 1][q] + p.transition(q, c);
            }
            alpha[i][c] = p.state[i][c] + logsumexp(&buf);
        }
    }
    for i in (0..n - 1).rev() {
        for q in 0..t {
            for (c, b) in buf.iter_mut().enumerate() {
                *b = p.transition(q, c) + p.state[i + 1][c] + beta[i + 1][c];
            }
            beta[i][q] = logsumexp(&buf);
        }
    }
    let log_z = logsumexp(&alpha[n - 1]);
    let node = (0..n)
        .map(|i| (0..t).map(|c| (alpha[i][c] + beta[i][c] - log_z).exp()).collect())
        .collect();
    let edge = (1..n)
        .map(|i| {
            let mut e = vec![0.0; t * t];
            for q in 0..t {
                for c in 0..t {
                    e[q * t + c] = (alpha[i - 1][q] + p.transition(q, c) + p.state[i][c] + beta[i][c]
                        - log_z)
                        .exp();
                }
            }
            e
        })
        .collect();
    Ok(Marginals { log_z, node, edge })
}

/// Highest-scoring tag sequence and its score. Among equal scores the lower
/// tag id wins at every step, so all-zero weights give all zeros.
pub fn viterbi(p: &Potentials) -> Result<(Vec<usize>, f64)> {
    non_empty(p)?;
    let (n, t) = (p.len(), p.n_tags);
    let mut delta = p.state[0].clone();
    let mut back = vec![vec![0usize; t]; n];
    let mut next = vec![0.0; t];
    for i in 1..n {
        for c in 0..t {
            let mut best = 0;
            let mut best_s = delta[0] + p.transition(0, c);
            for q in 1..t {
                let s = delta[q] + p.transition(q, c);
                if s > best_s {
                    best = q;
                    best_s = s;
                }
            }
            back[i][c] = best;
            next[c] = best_s + p.state[i][c];
        }
        std::mem::swap(&mut delta, &mut next);
    }
    let mut last = 0;
    for c in 1..t {
        if delta[c] > delta[last] {
            last = c;
        }
    }
    let mut path = vec![0; n];
    path[n - 1] = last;
    for i in (1..n).rev() {
        path[i - 1] = back[i][path[i]];
    }
    Ok((path, delta[last]))
}
