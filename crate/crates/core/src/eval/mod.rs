//! Downstream evaluation: cross-validated multi-label function prediction,
//! hierarchy-weighted transfer to unannotated layers, and 2-D projection.

mod classifier;
mod crossval;
mod metrics;
mod project;
mod report;
mod transfer;

pub use classifier::{
    modified_huber, modified_huber_grad, train_classifier, ClassifierConfig, LinearClassifier,
};
pub use crossval::{cross_validate, protein_folds, EvalConfig, Representation};
pub use metrics::{auprc, auroc, Summary};
pub use project::project_2d;
pub use report::{Aggregate, EvalReport, PairScore};
pub use transfer::{transfer_predict, transfer_weights, TransferConfig, Weighting};
