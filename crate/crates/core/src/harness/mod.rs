//! Corpus handling, seeded experiments and report output.

mod corpus;
mod exec;
mod experiments;
mod report;
mod seeds;
mod synthetic;

pub use corpus::{Corpus, DEFAULT_MAX_DIM};
pub use exec::{Executor, THREADS_ENV};
pub use experiments::{
    coexistence_matrix, eval_accuracy, eval_robustness, eval_with_role, psnr_distribution,
    tradeoff_sweep,
};
pub use report::{
    combined_csv, combined_json, fmt_f64, AccuracyReport, CoexCell, CoexistenceMatrix, ImageScore, PsnrDistribution, Report,
    SuiteScore, TradeoffReport, TradeoffRow,
};
pub use seeds::{trial_seed, Role};
pub use synthetic::{synthetic_image, SYNTHETIC_RANGE};

use crate::augment::AugmentError;
use crate::ensemble::EnsembleError;
use crate::imgcore::ImageError;
use crate::watermark::WatermarkError;
use thiserror::Error;

#[derive(Debug, Error)]
pub enum HarnessError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("{0}")]
    Invalid(String),
    #[error("io: {0}")]
    Io(String),
    #[error(transparent)]
    Image(#[from] ImageError),
    #[error(transparent)]
    Watermark(#[from] WatermarkError),
    #[error(transparent)]
    Augment(#[from] AugmentError),
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}
