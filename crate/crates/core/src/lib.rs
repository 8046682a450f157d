//! Hierarchical classification of transposable-element sequences.
//!
//! Sequences are turned into k-mer frequency vectors, one local classifier
//! (RBF SVM or multinomial logistic regression) is trained per parent node
//! of a dot-path taxonomy, and predictions are made top-down either
//! greedily ([`Strategy::Nllcpn`]) or by best mean path probability
//! ([`Strategy::Lcpnb`]).

pub mod classifier;
pub mod cli;
pub mod crossval;
pub mod dataset;
pub mod error;
pub mod folds;
pub mod grid;
pub mod hier;
pub mod kmer;
pub mod label;
pub mod logreg;
pub mod metrics;
pub mod seqio;
pub mod strategy;
pub mod svm;
pub mod synth;
pub mod taxonomy;

pub use classifier::{BaseConfig, BaseKind, MulticlassModel};
pub use crossval::{crossval, crossval_strategies, CvReport};
pub use dataset::Dataset;
pub use error::{Error, Result};
pub use folds::{stratified_kfold, FoldPlan};
pub use grid::{crossval_tuned, grid_search, train_final, Grid, GridResult, TunedCv};
pub use hier::{train_hier, HierModel};
pub use kmer::{featurize, featurize_batch, FeatureVector, KmerConfig, Normalization};
pub use label::{parse_label, HierLabel};
pub use logreg::LogRegConfig;
pub use metrics::{hier_metrics, label_set, levelwise_f, HierMetrics};
pub use seqio::{parse_fasta, write_fasta, Sequence};
pub use strategy::Strategy;
pub use svm::SvmConfig;
pub use synth::{generate, SynthSpec};
pub use taxonomy::{NodeId, Taxonomy};
