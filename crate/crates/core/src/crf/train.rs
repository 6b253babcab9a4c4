//! Penalized conditional log-likelihood and its minimization.

use super::inference::{forward_backward, Potentials};
use super::lbfgs::{minimize, LbfgsParams, LbfgsReport};
use super::model::{CrfDataset, CrfModel, CrfSequence};
use crate::error::{Error, Result};
use crate::par;

/// Upper bound on gradient chunks. The split depends only on the dataset
/// size and chunks are summed in index order, so the objective is
/// bit-identical for any thread count.
pub const MAX_CHUNKS: usize = 16;

#[derive(Debug, Clone, PartialEq)]
pub struct CrfParams {
    /// Width of the Gaussian prior; the penalty is `|w|^2 / (2 sigma^2)`.
    pub sigma: f64,
    pub lbfgs: LbfgsParams,
    /// Attributes seen fewer times than this in training are dropped.
    pub min_count: usize,
}

impl Default for CrfParams {
    fn default() -> Self {
        CrfParams {
            sigma: 1.0,
            lbfgs: LbfgsParams::default(),
            min_count: 1,
        }
    }
}

/// Adds `sign` once per feature occurrence on the gold path of `seq`.
fn add_counts(out: &mut [f64], seq: &CrfSequence, n_attrs: usize, n_tags: usize, sign: f64) {
    let off = n_attrs * n_tags;
    for (i, (attrs, &y)) in seq.attrs.iter().zip(&seq.tags).enumerate() {
        for &a in attrs {
            out[a as usize * n_tags + y as usize] += sign;
        }
        if i > 0 {
            out[off + seq.tags[i - 1] as usize * n_tags + y as usize] += sign;
        }
    }
}

fn sequence_term(
    weights: &[f64],
    seq: &CrfSequence,
    n_attrs: usize,
    n_tags: usize,
    grad: &mut [f64],
) -> Result<f64> {
    let pot = Potentials::new(weights, n_attrs, n_tags, &seq.attrs);
    let m = forward_backward(&pot)?;
    let gold: Vec<usize> = seq.tags.iter().map(|&t| t as usize).collect();
    for (attrs, probs) in seq.attrs.iter().zip(&m.node) {
        for &a in attrs {
            let base = a as usize * n_tags;
            for (t, p) in probs.iter().enumerate() {
                grad[base + t] += p;
            }
        }
    }
    let off = n_attrs * n_tags;
    for e in &m.edge {
        for (k, p) in e.iter().enumerate() {
            grad[off + k] += p;
        }
    }
    add_counts(grad, seq, n_attrs, n_tags, -1.0);
    Ok(m.log_z - pot.score(&gold))
}

/// `sum_s [log Z(x_s) - score(x_s, y_s)] + |w|^2 / (2 sigma^2)` and its gradient.
pub fn nll_and_gradient(weights: &[f64], data: &CrfDataset, sigma: f64) -> Result<(f64, Vec<f64>)> {
    if !(sigma > 0.0) {
        return Err(Error::InvalidInput(format!("sigma must be positive, got {sigma}")));
    }
    let (n_attrs, n_tags) = (data.attributes.len(), data.tags.len());
    let n_w = data.n_weights();
    if weights.len() != n_w {
        return Err(Error::Dimension {
            expected: n_w,
            got: weights.len(),
        });
    }
    let n = data.sequences.len();
    let chunk = n.div_ceil(MAX_CHUNKS).max(1);
    let parts = par::map_range(n.div_ceil(chunk), |c| -> Result<(f64, Vec<f64>)> {
        let mut grad = vec![0.0; n_w];
        let mut value = 0.0;
        for seq in &data.sequences[c * chunk..((c + 1) * chunk).min(n)] {
            value += sequence_term(weights, seq, n_attrs, n_tags, &mut grad)?;
        }
        Ok((value, grad))
    });
    let inv_var = 1.0 / (sigma * sigma);
    let mut value = 0.5 * inv_var * weights.iter().map(|w| w * w).sum::<f64>();
    let mut grad: Vec<f64> = weights.iter().map(|w| w * inv_var).collect();
    for part in parts {
        let (v, g) = part?;
        value += v;
        for (a, b) in grad.iter_mut().zip(&g) {
            *a += b;
        }
    }
    Ok((value, grad))
}

#[derive(Debug, Clone, PartialEq)]
pub struct TrainReport {
    pub model: CrfModel,
    pub optimizer: LbfgsReport,
}

/// Fits a model from all-zero weights.
pub fn train_crf(data: &CrfDataset, params: &CrfParams) -> Result<CrfModel> {
    Ok(train_crf_report(data, params)?.model)
}

pub fn train_crf_report(data: &CrfDataset, params: &CrfParams) -> Result<TrainReport> {
    if data.sequences.is_empty() {
        return Err(Error::InvalidInput("empty CRF training set".into()));
    }
    let x0 = vec![0.0; data.n_weights()];
    let report = minimize(|w| nll_and_gradient(w, data, params.sigma), x0, &params.lbfgs)?;
    let model = CrfModel::new(
        data.tags.clone(),
        data.attributes.clone(),
        report.x.clone(),
        params.sigma,
    )?;
    Ok(TrainReport {
        model,
        optimizer: report,
    })
}
