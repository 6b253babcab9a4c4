//! KS-based feature elimination against per-class "entropy distribution"
//! vectors (the column-wise sum of a class's feature rows).

use super::ks::ks_statistic;
use super::stats::FeatureMatrix;
use crate::error::{Error, Result};

/// Number of elimination passes; each removes `ceil(drop_fraction * s)` columns.
pub const PASSES: usize = 2;

/// Column-wise sum of the rows whose label equals `class` (or differs from
/// it when `complement` is set).
fn class_sum(f: &FeatureMatrix, labels: &[usize], class: usize, complement: bool) -> Vec<f64> {
    let mut sum = vec![0.0; f.n_cols()];
    for (i, &l) in labels.iter().enumerate() {
        if (l == class) != complement {
            for (s, x) in sum.iter_mut().zip(f.row(i)) {
                *s += x;
            }
        }
    }
    sum
}

/// Badness of each column, higher is worse.
///
/// For each class `c`, the column restricted to class-`c` rows is compared
/// (two-sample KS) with the entropy vector of `c` and with that of all other
/// classes; the column scores `KS(own) - KS(other)` averaged over classes.
pub fn column_scores(f: &FeatureMatrix, labels: &[usize]) -> Result<Vec<f64>> {
    if labels.len() != f.n_rows() {
        return Err(Error::Dimension {
            expected: f.n_rows(),
            got: labels.len(),
        });
    }
    let mut classes: Vec<usize> = labels.to_vec();
    classes.sort_unstable();
    classes.dedup();
    if classes.len() < 2 {
        return Err(Error::InvalidInput(
            "feature elimination needs at least two classes".into(),
        ));
    }
    let mut scores = vec![0.0; f.n_cols()];
    for &c in &classes {
        let own = class_sum(f, labels, c, false);
        let other = class_sum(f, labels, c, true);
        for (j, score) in scores.iter_mut().enumerate() {
            let col: Vec<f64> = labels
                .iter()
                .enumerate()
                .filter(|&(_, &l)| l == c)
                .map(|(i, _)| f.values[(i, j)])
                .collect();
            *score += ks_statistic(&col, &own)? - ks_statistic(&col, &other)?;
        }
    }
    let k = classes.len() as f64;
    Ok(scores.into_iter().map(|s| s / k).collect())
}

/// Drops the worst-scoring columns: [`PASSES`] passes of
/// `ceil(drop_fraction * s)` columns each, never dropping the last column.
/// Ties drop the lower column index first.
pub fn eliminate_features(
    f: &FeatureMatrix,
    labels: &[usize],
    drop_fraction: f64,
) -> Result<(FeatureMatrix, Vec<bool>)> {
    if !(0.0..0.5).contains(&drop_fraction) {
        return Err(Error::InvalidInput(format!(
            "drop fraction must be in [0, 0.5), got {drop_fraction}"
        )));
    }
    let scores = column_scores(f, labels)?;
    let s = f.n_cols();
    let mut mask = vec![true; s];
    let per_pass = (drop_fraction * s as f64).ceil() as usize;
    let mut ranking: Vec<usize> = (0..s).collect();
    ranking.sort_by(|&a, &b| scores[b].total_cmp(&scores[a]).then(a.cmp(&b)));
    let mut ranking = ranking.into_iter();
    for _pass in 0..PASSES {
        for _ in 0..per_pass {
            if mask.iter().filter(|&&m| m).count() <= 1 {
                break;
            }
            if let Some(j) = ranking.next() {
                mask[j] = false;
            }
        }
    }
    Ok((f.select_columns(&mask)?, mask))
}
