//! Linear-chain CRF: feature templates, exact inference, L2-penalized
//! maximum-likelihood training and chained nested tagging.

pub mod features;
pub mod inference;
pub mod lbfgs;
pub mod model;
pub mod nested;
pub mod train;

pub use features::{extract_token_features, sentence_observations, window_features, DEFAULT_HALF_WIDTH, TOKEN_FEATURES};
pub use inference::{forward_backward, viterbi, Marginals, Potentials};
pub use lbfgs::{minimize, LbfgsParams, LbfgsReport};
pub use model::{AttributeIndex, CrfDataset, CrfModel, CrfSequence};
pub use nested::{level_observations, tag_nested, train_nested, NestedModel, NestedParams};
pub use train::{nll_and_gradient, train_crf, train_crf_report, CrfParams, TrainReport};
