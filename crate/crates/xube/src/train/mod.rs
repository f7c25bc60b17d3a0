//! The learning loop: parallel problem generation, search-driven data
//! collection, value-iteration / Q-learning targets, hindsight
//! relabeling, Bellman tree backups, a block replay buffer, the adaptive
//! walk-length curriculum, and target-network update checks.

use thiserror::Error;

use crate::algspec::{AlgoFamily, AlgoSpec};
use crate::domain::DomainError;
use crate::nnet::NnetError;
use crate::search::SearchError;

mod collect;
mod her;
mod replay;
mod runner;
mod stats;
mod supervised;
mod targets;

pub use collect::{collect_update_check, CollectStats};
pub use her::her_relabel;
pub use replay::ReplayBuffer;
pub use runner::{adapt_k, should_swap, train, TrainReport};
pub use stats::UpdateCheckStats;
pub use supervised::{
    sup_forward_walk, sup_reverse_walk, sup_targets_forward, sup_walk_examples, ReverseWalk,
};
pub use targets::{ql_target, ql_targets, vi_target, vi_targets};

#[derive(Debug, Error)]
pub enum TrainError {
    #[error("training configuration: {0}")]
    Config(String),
    #[error("domain lacks the {0} capability required by {1}")]
    Capability(&'static str, String),
    #[error(transparent)]
    Search(#[from] SearchError),
    #[error(transparent)]
    Domain(#[from] DomainError),
    #[error(transparent)]
    Nnet(#[from] NnetError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Which kind of heuristic function is being trained.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Head {
    V,
    Q,
}

impl Head {
    pub fn name(self) -> &'static str {
        match self {
            Head::V => "v",
            Head::Q => "q",
        }
    }
}

/// Which network guides search during data collection. Live guidance is
/// approximated by refreshing a snapshot of the trained network once per
/// update check, which keeps workers lock-free.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Guidance {
    Target,
    Live,
}

/// When the target network adopts the current parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum TargetUpdate {
    Always,
    LossBelow(f64),
}

#[derive(Debug, Clone)]
pub struct TrainConfig {
    /// N: examples per gradient step.
    pub batch_size: usize,
    /// U: gradient steps per update check.
    pub update_itrs: usize,
    /// I: search iteration cap per problem instance.
    pub search_itrs: usize,
    /// Current maximum random-walk length K.
    pub k_start: usize,
    pub k_max: usize,
    pub adaptive_k: bool,
    /// R: replay-buffer span in update checks (0 trains on the current
    /// block only).
    pub replay_checks: usize,
    pub lr: f64,
    pub workers: usize,
    pub target_update: TargetUpdate,
    pub guidance: Guidance,
    pub her: bool,
    pub lhbl: bool,
    pub algo: AlgoSpec,
    pub head: Head,
    pub seed: u64,
    pub max_update_checks: usize,
    /// Run the test set every this many checks (0 = never).
    pub test_every: usize,
    pub verbose: bool,
}

impl Default for TrainConfig {
    fn default() -> Self {
        TrainConfig {
            batch_size: 100,
            update_itrs: 50,
            search_itrs: 100,
            k_start: 1,
            k_max: 30,
            adaptive_k: false,
            replay_checks: 1,
            lr: 1e-3,
            workers: 1,
            target_update: TargetUpdate::Always,
            guidance: Guidance::Target,
            her: false,
            lhbl: false,
            algo: AlgoSpec::new(AlgoFamily::GraphV),
            head: Head::V,
            seed: 0,
            max_update_checks: 100,
            test_every: 10,
            verbose: false,
        }
    }
}

impl TrainConfig {
    pub fn validate(&self) -> Result<(), TrainError> {
        if self.batch_size < 1 || self.update_itrs < 1 || self.search_itrs < 1 {
            return Err(TrainError::Config(
                "batch size, update iterations, and search iterations must be >= 1".into(),
            ));
        }
        if self.workers < 1 {
            return Err(TrainError::Config("workers must be >= 1".into()));
        }
        if self.k_start > self.k_max {
            return Err(TrainError::Config(format!(
                "k_start {} exceeds k_max {}",
                self.k_start, self.k_max
            )));
        }
        if self.max_update_checks < 1 {
            return Err(TrainError::Config("max_update_checks must be >= 1".into()));
        }
        if !(self.lr > 0.0 && self.lr.is_finite()) {
            return Err(TrainError::Config("learning rate must be positive".into()));
        }
        if self.algo.batch != 1 {
            return Err(TrainError::Config(format!(
                "training search must have batch size 1, got `{}`",
                self.algo.render()
            )));
        }
        if let TargetUpdate::LossBelow(t) = self.target_update {
            if !(t > 0.0 && t.is_finite()) {
                return Err(TrainError::Config(
                    "loss threshold must be positive".into(),
                ));
            }
        }
        match (self.algo.family.q_head(), self.head) {
            (Some(true), Head::V) | (Some(false), Head::Q) => {
                return Err(TrainError::Config(format!(
                    "algorithm `{}` disagrees with head `{}`",
                    self.algo.family,
                    self.head.name()
                )));
            }
            _ => {}
        }
        Ok(())
    }
}

/// One training example: an encoded `(state, goal)` input, its target,
/// the trained output for q heads, and the walk length of the instance it
/// came from.
#[derive(Debug, Clone)]
pub struct TrainExample {
    pub input: Vec<f32>,
    pub target: f64,
    pub action_index: Option<usize>,
    pub k_origin: usize,
}
