//! Heuristic functions backed by approximator snapshots: encode the
//! `(state, goal)` batch, evaluate the snapshot in one forward pass, and
//! hand the values to search.

use std::sync::Arc;

use crate::encode::{encode_rows, Encoder};
use crate::nnet::Evaluator;
use crate::search::{HeuristicQ, HeuristicV};

pub struct NnetHeuristicV<S, G> {
    evaluator: Arc<dyn Evaluator>,
    encoder: Arc<dyn Encoder<S, G>>,
}

impl<S, G> NnetHeuristicV<S, G> {
    pub fn new(evaluator: Arc<dyn Evaluator>, encoder: Arc<dyn Encoder<S, G>>) -> Self {
        NnetHeuristicV { evaluator, encoder }
    }
}

impl<S: Send + Sync, G: Send + Sync> HeuristicV<S, G> for NnetHeuristicV<S, G> {
    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<f64> {
        if pairs.is_empty() {
            return Vec::new();
        }
        let inputs = encode_rows(self.encoder.as_ref(), pairs);
        let out = self.evaluator.eval(inputs.view());
        out.column(0).to_vec()
    }
}

pub struct NnetHeuristicQ<S, G> {
    evaluator: Arc<dyn Evaluator>,
    encoder: Arc<dyn Encoder<S, G>>,
}

impl<S, G> NnetHeuristicQ<S, G> {
    pub fn new(evaluator: Arc<dyn Evaluator>, encoder: Arc<dyn Encoder<S, G>>) -> Self {
        NnetHeuristicQ { evaluator, encoder }
    }
}

impl<S: Send + Sync, G: Send + Sync> HeuristicQ<S, G> for NnetHeuristicQ<S, G> {
    fn n_actions(&self) -> usize {
        self.evaluator.out_dim()
    }

    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<Vec<f64>> {
        if pairs.is_empty() {
            return Vec::new();
        }
        let inputs = encode_rows(self.encoder.as_ref(), pairs);
        let out = self.evaluator.eval(inputs.view());
        out.rows().into_iter().map(|r| r.to_vec()).collect()
    }
}
