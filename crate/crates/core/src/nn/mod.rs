//! A small feed-forward network engine with lifting activations.
//!
//! Layers are fully connected maps, ReLU, maxout and coordinate-wise lifting
//! (standard or scaled). Activations flow as [`Tensor2`] batches, one sample
//! per row. A forward pass through [`Network::forward`] caches layer inputs;
//! [`Network::backward`] consumes that cache and leaves parameter gradients
//! in the layers, ready for [`Sgd::step`].

mod checkpoint;
mod gradcheck;
mod layer;
mod network;
mod train;

pub use checkpoint::{from_checkpoint, to_checkpoint};
pub use gradcheck::{gradient_check, GradCheckReport, KINK_MARGIN, MAX_RETRIES};
pub use layer::{maxout_backward, maxout_forward, Dense, Layer, Lifting, LiftingKind};
pub use network::{evaluate_loss, loss_and_grad, Network};
pub use train::{gather_rows, train_epoch, Sgd};

/// Row-major batch of activations: `rows` samples, `cols` features.
pub use crate::linalg::Matrix as Tensor2;
