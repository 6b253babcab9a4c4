use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::corpus::ProfilingCorpus;
use crate::error::{Error, Result};

/// Disjoint batches of document indices. Each batch is sorted ascending so
/// documents keep their corpus order inside a batch.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct BatchPlan {
    pub batches: Vec<Vec<usize>>,
}

impl BatchPlan {
    pub fn len(&self) -> usize {
        self.batches.len()
    }

    pub fn is_empty(&self) -> bool {
        self.batches.is_empty()
    }

    /// Document index of every row when batch blocks are stacked in order.
    pub fn row_order(&self) -> Vec<usize> {
        self.batches.iter().flatten().copied().collect()
    }
}

/// Stratified split into `n` batches.
///
/// Documents are grouped into (gender, age) cells; each cell is shuffled
/// with the seed and dealt round-robin. The dealing position carries over
/// from one cell to the next, so batch sizes differ by at most one and every
/// cell's share differs by at most one between batches.
pub fn make_batches(corpus: &ProfilingCorpus, n: usize, seed: u64) -> Result<BatchPlan> {
    if n == 0 {
        return Err(Error::InvalidInput("number of batches must be at least 1".into()));
    }
    if n > corpus.len() {
        return Err(Error::InvalidInput(format!(
            "{n} batches requested for {} documents",
            corpus.len()
        )));
    }
    let n_ages = corpus.age_labels.len();
    let mut cells: Vec<Vec<usize>> = vec![Vec::new(); 2 * n_ages.max(1)];
    for (i, d) in corpus.docs.iter().enumerate() {
        let age = corpus.age_index(&d.age_group).unwrap_or(0);
        cells[d.gender.index() * n_ages.max(1) + age].push(i);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut batches = vec![Vec::new(); n];
    let mut next = 0usize;
    for cell in &mut cells {
        cell.shuffle(&mut rng);
        for &doc in cell.iter() {
            batches[next].push(doc);
            next = (next + 1) % n;
        }
    }
    for b in &mut batches {
        b.sort_unstable();
    }
    Ok(BatchPlan { batches })
}
