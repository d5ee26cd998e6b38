//! kgfuse: multi-modal knowledge-graph entity alignment.
//!
//! The pipeline ingests two knowledge graphs with relational, attribute, and
//! visual data, computes per-modality similarity matrices, trains a
//! relation-reflection attention network on seed alignments, fuses the
//! similarity signals, and evaluates ranking metrics (Hits@k, MR, MRR).

pub mod error;
pub mod kg;
pub mod numerics;
pub mod specificity;

pub use error::{CoreError, LoadError, NumericsError, Result};
