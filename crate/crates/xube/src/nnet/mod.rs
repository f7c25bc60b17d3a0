//! Differentiable function approximators and target-network snapshots.
//!
//! The trainable surface is the [`Approximator`] trait (an MLP with
//! backpropagation, plus an exact tabular map used as a convergence test
//! double); the read-only surface is [`Evaluator`], the contract of
//! immutable parameter snapshots handed to search workers. Parameters are
//! stored as 32-bit floats; all forward/backward arithmetic widens to
//! 64-bit, so gradients are exact for the widened function.

use std::path::Path;
use std::sync::Arc;

use ndarray::{Array2, ArrayView2};
use thiserror::Error;

mod checkpoint;
mod mlp;
mod opt;
mod tabular;

pub use checkpoint::{load_checkpoint, save_checkpoint, CheckpointData};
pub use mlp::{Activation, Mlp, MlpSnapshot, MlpSpec};
pub use opt::{AdamParams, AdamState, Optimizer};
pub use tabular::{TabularApprox, TabularSnapshot};

#[derive(Debug, Error)]
pub enum NnetError {
    #[error("dimension mismatch: {0}")]
    DimMismatch(String),
    #[error("bad checkpoint: {0}")]
    BadCheckpoint(String),
    #[error("unsupported checkpoint version {0}")]
    Version(u32),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Read-only batch evaluation over encoded inputs. Snapshot evaluators
/// are immutable and safe to share across worker threads.
pub trait Evaluator: Send + Sync {
    fn out_dim(&self) -> usize;

    /// One output row per input row.
    fn eval(&self, inputs: ArrayView2<f32>) -> Array2<f64>;
}

/// The target network used for the first update checks: zero everywhere.
pub struct ZeroEvaluator {
    pub out_dim: usize,
}

impl Evaluator for ZeroEvaluator {
    fn out_dim(&self) -> usize {
        self.out_dim
    }

    fn eval(&self, inputs: ArrayView2<f32>) -> Array2<f64> {
        Array2::zeros((inputs.nrows(), self.out_dim))
    }
}

/// An MLP bundled with its optimizer and learning rate.
pub struct MlpApprox {
    pub mlp: Mlp,
    pub optimizer: Optimizer,
    pub lr: f64,
}

impl MlpApprox {
    pub fn adam(mlp: Mlp, lr: f64) -> Self {
        let optimizer = Optimizer::adam(mlp.params().len(), AdamParams::default());
        MlpApprox { mlp, optimizer, lr }
    }

    pub fn from_checkpoint(data: CheckpointData) -> Self {
        MlpApprox {
            mlp: data.mlp,
            optimizer: data.optimizer,
            lr: data.lr,
        }
    }
}

impl Approximator for MlpApprox {
    fn in_dim(&self) -> usize {
        self.mlp.in_dim()
    }

    fn out_dim(&self) -> usize {
        self.mlp.out_dim()
    }

    fn forward(&self, inputs: ArrayView2<f32>) -> Result<Array2<f64>, NnetError> {
        self.mlp.forward_batch(inputs)
    }

    fn train_step(
        &mut self,
        inputs: ArrayView2<f32>,
        targets: &[f64],
        actions: Option<&[usize]>,
    ) -> Result<f64, NnetError> {
        let (loss, grad) = self.mlp.mse_loss_and_grad(inputs, targets, actions)?;
        self.optimizer.apply(&mut self.mlp, &grad, self.lr);
        Ok(loss)
    }

    fn snapshot(&self) -> Arc<dyn Evaluator> {
        Arc::new(self.mlp.snapshot())
    }

    fn save(&self, path: &Path, meta: &serde_json::Value) -> Result<(), NnetError> {
        save_checkpoint(path, &self.mlp, &self.optimizer, self.lr, meta)
    }
}

/// A trainable approximator owned by the training coordinator.
pub trait Approximator: Send {
    fn in_dim(&self) -> usize;
    fn out_dim(&self) -> usize;

    fn forward(&self, inputs: ArrayView2<f32>) -> Result<Array2<f64>, NnetError>;

    /// One gradient step on `(inputs, targets)`; for multi-output heads
    /// `actions[i]` selects the trained output of row `i`. Returns the
    /// batch loss before the step.
    fn train_step(
        &mut self,
        inputs: ArrayView2<f32>,
        targets: &[f64],
        actions: Option<&[usize]>,
    ) -> Result<f64, NnetError>;

    /// Immutable deep-copy snapshot, unaffected by later training steps.
    fn snapshot(&self) -> Arc<dyn Evaluator>;

    /// Persist parameters and optimizer state; `meta` carries caller
    /// metadata (head kind, domain, architecture).
    fn save(&self, path: &Path, meta: &serde_json::Value) -> Result<(), NnetError>;
}
