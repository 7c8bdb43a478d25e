//! Teacher-student distillation at desk scale.
//!
//! A small trainable encoder ([`Student`]) learns to reproduce a
//! frozen teacher's embeddings of *standard* sentences — for both the
//! standard text and its noisy variant — by minimizing a sum-reduced
//! MSE. The pieces:
//!
//! - [`featurize`]/[`StudentConfig`]: sentences to hashed feature ids
//!   (word-level or character n-gram);
//! - [`Student`]: feature table, max-pool, linear projection; binary
//!   save/load;
//! - [`mse_sum_loss`]/[`validation_loss`]: the training objective and
//!   the two-term development loss;
//! - [`gradients`]: exact backprop through pool and projection;
//! - [`train`]/[`Checkpoint`]/[`select_best_checkpoint`]: Adam with
//!   warm-up, clipping, and periodic snapshots;
//! - [`SyntheticTeacher`]: a deterministic stand-in for a real frozen
//!   encoder.

mod features;
mod grad;
mod loss;
mod model;
mod teacher;
mod train;

pub use features::{featurize, FeatureMode, StudentConfig, NGRAM_ORDERS};
pub use grad::{gradients, Gradients};
pub use loss::{mse_sum_loss, validation_loss};
pub use model::{Student, MODEL_MAGIC, MODEL_VERSION};
pub use teacher::{SyntheticTeacher, TEACHER_BUCKETS};
pub use train::{
    list_checkpoint_steps, read_checkpoint, select_best_checkpoint, train, write_checkpoint,
    Checkpoint, CheckpointMeta, TrainConfig,
};
