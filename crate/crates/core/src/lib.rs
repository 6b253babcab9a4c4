//! Social-media text analytics: author profiling from latent word-space
//! statistics, and named-entity recognition with nested linear-chain CRFs,
//! dictionary entity linking and entity-level evaluation.
//!
//! The profiling pipeline is
//! `documents -> doc-term matrix -> Gram matrix -> eigenvectors -> row statistics
//! -> KS feature elimination -> gender forest -> age forest`,
//! optionally run over stratified batches (see [`profiler::ltlm_train`]).
//!
//! Data-parallel loops go through [`par`], which uses rayon when the
//! `parallel` feature is enabled and plain iterators otherwise.

pub mod cli;
pub mod corpus;
pub mod crf;
pub mod error;
pub mod eval;
pub mod linalg;
mod lines;
pub mod linker;
pub mod par;
pub mod profiler;
pub mod synth;
pub mod wordspace;

pub use error::{Error, Result};

/// Mixes a master seed with a stream index (splitmix64 finalizer).
///
/// Used wherever independent deterministic RNG streams are needed, e.g. one
/// per tree in a forest.
pub fn derive_seed(master: u64, index: u64) -> u64 {
    let mut z = master
        .wrapping_add(0x9E37_79B9_7F4A_7C15)
        .wrapping_add(index.wrapping_mul(0xBF58_476D_1CE4_E5B9));
    z = (z ^ (z >> 30)).wrapping_mul(0xBF58_476D_1CE4_E5B9);
    z = (z ^ (z >> 27)).wrapping_mul(0x94D0_49BB_1331_11EB);
    z ^ (z >> 31)
}
