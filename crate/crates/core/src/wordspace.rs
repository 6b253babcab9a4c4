//! Document-term matrix, document Gram matrix and the eigenvector word space.
//!
//! Rows are documents and columns are terms, so the Gram matrix `V V^T` is
//! `n x n` and row `i` of the eigenvector matrix holds document `i`'s
//! coordinates in the latent basis.

use std::collections::HashMap;
use std::fmt::Write as _;

use crate::corpus::ProfilingDocument;
use crate::error::{Error, Result};
use crate::linalg::{jacobi_eigen, Matrix};
use crate::par;

/// Default convergence tolerance for [`eigen_decompose`].
pub const EIGEN_TOL: f64 = 1e-12;

/// Term to column index, in first-occurrence order over the documents.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct Vocabulary {
    terms: Vec<String>,
    index: HashMap<String, usize>,
}

impl Vocabulary {
    pub fn build<'a, I>(docs: I) -> Self
    where
        I: IntoIterator<Item = &'a ProfilingDocument>,
    {
        let mut vocab = Vocabulary::default();
        for d in docs {
            for t in &d.tokens {
                vocab.insert(t);
            }
        }
        vocab
    }

    pub fn from_terms(terms: Vec<String>) -> Result<Self> {
        let mut vocab = Vocabulary::default();
        for t in terms {
            if vocab.index.contains_key(&t) {
                return Err(Error::Model(format!("duplicate vocabulary term {t:?}")));
            }
            vocab.insert(&t);
        }
        Ok(vocab)
    }

    fn insert(&mut self, term: &str) -> usize {
        if let Some(&i) = self.index.get(term) {
            return i;
        }
        let i = self.terms.len();
        self.terms.push(term.to_string());
        self.index.insert(term.to_string(), i);
        i
    }

    pub fn get(&self, term: &str) -> Option<usize> {
        self.index.get(term).copied()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> &[String] {
        &self.terms
    }
}

/// Sparse `n x m` term-frequency matrix; each row is sorted by column.
#[derive(Debug, Clone, PartialEq)]
pub struct DocTermMatrix {
    rows: Vec<Vec<(usize, u32)>>,
    n_terms: usize,
}

impl DocTermMatrix {
    pub fn n_docs(&self) -> usize {
        self.rows.len()
    }

    pub fn n_terms(&self) -> usize {
        self.n_terms
    }

    pub fn row(&self, i: usize) -> &[(usize, u32)] {
        &self.rows[i]
    }

    pub fn get(&self, i: usize, j: usize) -> u32 {
        self.rows[i]
            .binary_search_by_key(&j, |&(c, _)| c)
            .map_or(0, |k| self.rows[i][k].1)
    }

    pub fn to_dense(&self) -> Matrix {
        let mut m = Matrix::zeros(self.n_docs(), self.n_terms);
        for (i, row) in self.rows.iter().enumerate() {
            for &(j, c) in row {
                m[(i, j)] = f64::from(c);
            }
        }
        m
    }

    /// Tab-separated dump: `row_id` then one count per term.
    pub fn to_tsv(&self, row_ids: &[&str]) -> String {
        let mut out = String::new();
        for (i, id) in row_ids.iter().enumerate().take(self.n_docs()) {
            out.push_str(id);
            for j in 0..self.n_terms {
                let _ = write!(out, "\t{}", self.get(i, j));
            }
            out.push('\n');
        }
        out
    }
}

/// Counts vocabulary terms per document; out-of-vocabulary tokens are dropped.
pub fn build_doc_term_matrix(docs: &[ProfilingDocument], vocab: &Vocabulary) -> Result<DocTermMatrix> {
    if docs.is_empty() {
        return Err(Error::InvalidInput("empty corpus".into()));
    }
    let rows = par::map(docs, |d| {
        let mut counts: HashMap<usize, u32> = HashMap::new();
        for t in &d.tokens {
            if let Some(j) = vocab.get(t) {
                *counts.entry(j).or_insert(0) += 1;
            }
        }
        let mut row: Vec<(usize, u32)> = counts.into_iter().collect();
        row.sort_unstable();
        row
    });
    Ok(DocTermMatrix {
        rows,
        n_terms: vocab.len(),
    })
}

fn sparse_dot(a: &[(usize, u32)], b: &[(usize, u32)]) -> f64 {
    let (mut i, mut j) = (0, 0);
    let mut acc: u64 = 0;
    while i < a.len() && j < b.len() {
        match a[i].0.cmp(&b[j].0) {
            std::cmp::Ordering::Less => i += 1,
            std::cmp::Ordering::Greater => j += 1,
            std::cmp::Ordering::Equal => {
                acc += u64::from(a[i].1) * u64::from(b[j].1);
                i += 1;
                j += 1;
            }
        }
    }
    acc as f64
}

/// `A = V V^T`. Entries are integer dot products, so the result is exactly
/// symmetric.
pub fn gram_matrix(v: &DocTermMatrix) -> Matrix {
    let n = v.n_docs();
    let upper = par::map_range(n, |i| {
        (i..n).map(|j| sparse_dot(v.row(i), v.row(j))).collect::<Vec<f64>>()
    });
    let mut a = Matrix::zeros(n, n);
    for (i, row) in upper.into_iter().enumerate() {
        for (off, x) in row.into_iter().enumerate() {
            a[(i, i + off)] = x;
            a[(i + off, i)] = x;
        }
    }
    a
}

/// Eigenvalues (nonincreasing) and orthonormal eigenvectors of a Gram matrix.
#[derive(Debug, Clone, PartialEq)]
pub struct WordSpace {
    pub eigenvalues: Vec<f64>,
    /// `n x n`; column `k` is the eigenvector of `eigenvalues[k]`, row `i`
    /// is document `i`'s representation.
    pub eigenvectors: Matrix,
}

impl WordSpace {
    pub fn n(&self) -> usize {
        self.eigenvalues.len()
    }

    pub fn document_vector(&self, i: usize) -> &[f64] {
        self.eigenvectors.row(i)
    }
}

pub fn eigen_decompose(a: &Matrix, tol: f64) -> Result<WordSpace> {
    let e = jacobi_eigen(a, tol)?;
    Ok(WordSpace {
        eigenvalues: e.values,
        eigenvectors: e.vectors,
    })
}

/// Runs `V -> A -> W` for one batch of documents.
pub fn word_space(docs: &[ProfilingDocument], vocab: &Vocabulary) -> Result<WordSpace> {
    let v = build_doc_term_matrix(docs, vocab)?;
    eigen_decompose(&gram_matrix(&v), EIGEN_TOL)
}
