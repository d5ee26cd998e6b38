//! Dense matrix kernel, reverse-mode differentiation, and gradient checking.

pub mod gradcheck;
pub mod matrix;
pub mod segment;
pub mod tape;

pub use gradcheck::{finite_difference_check, GradCheckReport};
pub use matrix::{Matrix, SigmaKind};
pub use segment::{segment_softmax, SegmentIndex};
pub use tape::{Gradients, NodeId, Tape};
