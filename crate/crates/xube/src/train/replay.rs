//! Block replay buffer: a ring of the most recent update checks' example
//! blocks, sampled uniformly with replacement across all retained
//! examples.

use std::collections::VecDeque;

use rand::{Rng, RngCore};

use super::TrainExample;

pub struct ReplayBuffer {
    capacity: usize,
    blocks: VecDeque<Vec<TrainExample>>,
    total: usize,
}

impl ReplayBuffer {
    /// `span` is the number of update checks retained; 0 behaves like 1
    /// (the current block only).
    pub fn new(span: usize) -> Self {
        ReplayBuffer {
            capacity: span.max(1),
            blocks: VecDeque::new(),
            total: 0,
        }
    }

    pub fn push_block(&mut self, block: Vec<TrainExample>) {
        self.total += block.len();
        self.blocks.push_back(block);
        while self.blocks.len() > self.capacity {
            let evicted = self.blocks.pop_front().expect("nonempty ring");
            self.total -= evicted.len();
        }
    }

    pub fn n_blocks(&self) -> usize {
        self.blocks.len()
    }

    pub fn n_examples(&self) -> usize {
        self.total
    }

    /// The most recently pushed block.
    pub fn latest_block(&self) -> Option<&[TrainExample]> {
        self.blocks.back().map(Vec::as_slice)
    }

    /// Uniform-with-replacement sample of `n` examples.
    pub fn sample(&self, n: usize, rng: &mut dyn RngCore) -> Vec<&TrainExample> {
        assert!(self.total > 0, "sampling from an empty replay buffer");
        let mut out = Vec::with_capacity(n);
        for _ in 0..n {
            let mut idx = rng.random_range(0..self.total);
            for block in &self.blocks {
                if idx < block.len() {
                    out.push(&block[idx]);
                    break;
                }
                idx -= block.len();
            }
        }
        out
    }
}
