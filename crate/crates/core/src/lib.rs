//! Readability-level classification for short texts: segmentation, tagging,
//! surface and lexical features, linear classifiers, cross-validation and
//! feature ranking.

pub mod classifiers;
pub mod corpus;
pub mod dataset;
pub mod evaluation;
pub mod features;
pub mod pos;
pub mod ranking;
pub mod seed;
pub mod text;

pub use classifiers::{ClassifierError, Hyperparams, ModelKind, TrainedModel};
pub use dataset::LabeledDataset;
pub use features::{ExtractOptions, FeatureSet, FEATURE_COUNT, FEATURE_NAMES};
pub use text::{Document, Sentence, Token};
