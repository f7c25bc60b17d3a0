//! Heuristic function contracts.
//!
//! A heuristic-v function estimates the cost-to-go of `(state, goal)`
//! pairs; a heuristic-q function estimates, for every action in a fixed
//! action set, the transition cost plus the cost-to-go of the successor.
//! Both are batch contracts so implementations can amortize evaluation,
//! and both must be safe for concurrent evaluation from many searches.

use std::marker::PhantomData;

pub trait HeuristicV<S, G>: Send + Sync {
    /// One estimate per input pair.
    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<f64>;
}

pub trait HeuristicQ<S, G>: Send + Sync {
    /// Width of every output row (the fixed action count).
    fn n_actions(&self) -> usize;

    /// One row of per-action estimates per input pair.
    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<Vec<f64>>;
}

/// The zero heuristic: turns best-first search into uniform cost search.
pub struct ZeroHeuristicV;

impl<S, G> HeuristicV<S, G> for ZeroHeuristicV {
    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<f64> {
        vec![0.0; pairs.len()]
    }
}

/// The zero heuristic-q function: a zero vector for every input.
pub struct ZeroHeuristicQ {
    pub n_actions: usize,
}

impl<S, G> HeuristicQ<S, G> for ZeroHeuristicQ {
    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<Vec<f64>> {
        vec![vec![0.0; self.n_actions]; pairs.len()]
    }
}

/// Wrap a plain function as a heuristic-v function.
pub struct FnHeuristicV<S, G, F> {
    f: F,
    _marker: PhantomData<fn(&S, &G)>,
}

impl<S, G, F: Fn(&S, &G) -> f64> FnHeuristicV<S, G, F> {
    pub fn new(f: F) -> Self {
        FnHeuristicV {
            f,
            _marker: PhantomData,
        }
    }
}

impl<S, G, F> HeuristicV<S, G> for FnHeuristicV<S, G, F>
where
    F: Fn(&S, &G) -> f64 + Send + Sync,
{
    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<f64> {
        pairs.iter().map(|(s, g)| (self.f)(s, g)).collect()
    }
}

/// Wrap a plain per-pair row function as a heuristic-q function.
pub struct FnHeuristicQ<S, G, F> {
    f: F,
    n_actions: usize,
    _marker: PhantomData<fn(&S, &G)>,
}

impl<S, G, F: Fn(&S, &G) -> Vec<f64>> FnHeuristicQ<S, G, F> {
    pub fn new(n_actions: usize, f: F) -> Self {
        FnHeuristicQ {
            f,
            n_actions,
            _marker: PhantomData,
        }
    }
}

impl<S, G, F> HeuristicQ<S, G> for FnHeuristicQ<S, G, F>
where
    F: Fn(&S, &G) -> Vec<f64> + Send + Sync,
{
    fn n_actions(&self) -> usize {
        self.n_actions
    }

    fn eval_batch(&self, pairs: &[(&S, &G)]) -> Vec<Vec<f64>> {
        pairs.iter().map(|(s, g)| (self.f)(s, g)).collect()
    }
}
