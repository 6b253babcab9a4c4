//! Per-document distribution statistics over word-space coordinates.

use crate::error::{Error, Result};
use crate::linalg::Matrix;
use crate::wordspace::WordSpace;

pub const N_STATS: usize = 9;

pub const STAT_NAMES: [&str; N_STATS] = [
    "mean", "variance", "skewness", "kurtosis", "min", "max", "median", "iqr", "entropy",
];

/// Dense feature matrix with named columns.
#[derive(Debug, Clone, PartialEq)]
pub struct FeatureMatrix {
    pub values: Matrix,
    pub names: Vec<String>,
}

impl FeatureMatrix {
    pub fn new(values: Matrix, names: Vec<String>) -> Result<Self> {
        if values.cols() != names.len() {
            return Err(Error::Dimension {
                expected: values.cols(),
                got: names.len(),
            });
        }
        Ok(FeatureMatrix { values, names })
    }

    pub fn n_rows(&self) -> usize {
        self.values.rows()
    }

    pub fn n_cols(&self) -> usize {
        self.values.cols()
    }

    pub fn row(&self, i: usize) -> &[f64] {
        self.values.row(i)
    }

    pub fn column(&self, j: usize) -> Vec<f64> {
        self.values.column(j)
    }

    /// Keeps the columns whose mask entry is true.
    pub fn select_columns(&self, mask: &[bool]) -> Result<FeatureMatrix> {
        if mask.len() != self.n_cols() {
            return Err(Error::Dimension {
                expected: self.n_cols(),
                got: mask.len(),
            });
        }
        let keep: Vec<usize> = (0..mask.len()).filter(|&j| mask[j]).collect();
        let mut values = Matrix::zeros(self.n_rows(), keep.len());
        for i in 0..self.n_rows() {
            for (dst, &src) in keep.iter().enumerate() {
                values[(i, dst)] = self.values[(i, src)];
            }
        }
        let names = keep.iter().map(|&j| self.names[j].clone()).collect();
        Ok(FeatureMatrix { values, names })
    }

    pub fn select_rows(&self, rows: &[usize]) -> FeatureMatrix {
        let mut data = Vec::with_capacity(rows.len() * self.n_cols());
        for &i in rows {
            data.extend_from_slice(self.row(i));
        }
        FeatureMatrix {
            values: Matrix::from_vec(rows.len(), self.n_cols(), data).expect("shape"),
            names: self.names.clone(),
        }
    }

    pub fn append_column(&self, name: &str, column: &[f64]) -> Result<FeatureMatrix> {
        if column.len() != self.n_rows() {
            return Err(Error::Dimension {
                expected: self.n_rows(),
                got: column.len(),
            });
        }
        let cols = self.n_cols() + 1;
        let mut data = Vec::with_capacity(self.n_rows() * cols);
        for (i, &c) in column.iter().enumerate() {
            data.extend_from_slice(self.row(i));
            data.push(c);
        }
        let mut names = self.names.clone();
        names.push(name.to_string());
        Ok(FeatureMatrix {
            values: Matrix::from_vec(self.n_rows(), cols, data)?,
            names,
        })
    }

    /// Stacks blocks vertically; all blocks must share column names.
    pub fn vstack(blocks: &[FeatureMatrix]) -> Result<FeatureMatrix> {
        let first = blocks
            .first()
            .ok_or_else(|| Error::InvalidInput("no feature blocks".into()))?;
        let cols = first.n_cols();
        let mut data = Vec::new();
        let mut rows = 0;
        for b in blocks {
            if b.names != first.names {
                return Err(Error::Dimension {
                    expected: cols,
                    got: b.n_cols(),
                });
            }
            data.extend_from_slice(b.values.as_slice());
            rows += b.n_rows();
        }
        Ok(FeatureMatrix {
            values: Matrix::from_vec(rows, cols, data)?,
            names: first.names.clone(),
        })
    }
}

/// Linear-interpolation quantile of sorted data (`h = (n-1) p`).
pub fn quantile_sorted(sorted: &[f64], p: f64) -> f64 {
    let n = sorted.len();
    if n == 1 {
        return sorted[0];
    }
    let h = (n - 1) as f64 * p;
    let lo = h.floor() as usize;
    let hi = (lo + 1).min(n - 1);
    let frac = h - lo as f64;
    sorted[lo] + frac * (sorted[hi] - sorted[lo])
}

/// The nine statistics of one vector, in [`STAT_NAMES`] order.
///
/// Skewness and excess kurtosis are population moments and are 0 when the
/// vector is constant. Entropy is the Shannon entropy (nats) of
/// `|v| / sum |v|`, and 0 for the zero vector.
pub fn moments(v: &[f64]) -> Result<[f64; N_STATS]> {
    let n = v.len();
    if n == 0 {
        return Err(Error::InvalidInput("statistics of an empty vector".into()));
    }
    let mut sorted = v.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[n - 1];
    let nf = n as f64;

    let (mean, variance, skewness, kurtosis) = if min == max {
        (min, 0.0, 0.0, 0.0)
    } else {
        let mean = v.iter().sum::<f64>() / nf;
        let (mut m2, mut m3, mut m4) = (0.0, 0.0, 0.0);
        for &x in v {
            let d = x - mean;
            let d2 = d * d;
            m2 += d2;
            m3 += d2 * d;
            m4 += d2 * d2;
        }
        m2 /= nf;
        m3 /= nf;
        m4 /= nf;
        if m2 > 0.0 {
            (mean, m2, m3 / m2.powf(1.5), m4 / (m2 * m2) - 3.0)
        } else {
            (mean, 0.0, 0.0, 0.0)
        }
    };

    let median = quantile_sorted(&sorted, 0.5);
    let iqr = quantile_sorted(&sorted, 0.75) - quantile_sorted(&sorted, 0.25);

    let mass: f64 = v.iter().map(|x| x.abs()).sum();
    let entropy = if mass > 0.0 {
        v.iter()
            .map(|x| x.abs() / mass)
            .filter(|&p| p > 0.0)
            .map(|p| -p * p.ln())
            .sum()
    } else {
        0.0
    };

    Ok([
        mean, variance, skewness, kurtosis, min, max, median, iqr, entropy,
    ])
}

/// Row `i` of the result holds the statistics of document `i`'s word-space
/// coordinates (row `i` of the eigenvector matrix).
pub fn statistical_features(ws: &WordSpace, n_docs: usize) -> Result<FeatureMatrix> {
    if n_docs == 0 {
        return Err(Error::InvalidInput("no documents".into()));
    }
    if ws.n() != n_docs {
        return Err(Error::Dimension {
            expected: n_docs,
            got: ws.n(),
        });
    }
    let mut data = Vec::with_capacity(n_docs * N_STATS);
    for i in 0..n_docs {
        data.extend_from_slice(&moments(ws.document_vector(i))?);
    }
    FeatureMatrix::new(
        Matrix::from_vec(n_docs, N_STATS, data)?,
        STAT_NAMES.iter().map(|s| s.to_string()).collect(),
    )
}
