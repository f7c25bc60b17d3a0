//! Pathfinding algorithms: batch weighted A* (nodes), batch weighted Q*
//! (edges), beam search over v- or q-scores, and random rollouts. Every
//! search returns a [`SearchResult`] whose tree record feeds
//! reinforcement-learning target computation.
//!
//! Each search runs in a single thread of control; many searches may run
//! concurrently over a shared immutable heuristic snapshot.

use rand::{Rng, RngCore};
use thiserror::Error;

use crate::domain::{Domain, DomainError, ProblemInstance};

mod beam;
mod bwas;
mod bwqs;
mod frontier;
mod heur;
mod lhbl;
mod rollout;
mod tree;

pub use beam::{beam_search_q, beam_search_v};
pub use bwas::bwas;
pub use bwqs::bwqs;
pub use heur::{FnHeuristicQ, FnHeuristicV, HeuristicQ, HeuristicV, ZeroHeuristicQ, ZeroHeuristicV};
pub use lhbl::{lhbl_backup, LhblMode};
pub use rollout::random_rollout;
pub use tree::{SearchResult, SearchTree, TreeNode};

pub(crate) use frontier::Frontier;

#[derive(Debug, Error)]
pub enum SearchError {
    #[error("search configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Domain(#[from] DomainError),
}

/// Parameters of the graph searches (BWAS and BWQS).
#[derive(Debug, Clone)]
pub struct GraphSearchParams {
    /// Path-cost weight in `f = weight * g + h`, in `[0, 1]`.
    pub weight: f64,
    /// Nodes (or edges) popped per iteration.
    pub batch_size: usize,
    /// Per-pop probability of a uniform-random pop instead of the minimum.
    pub eps: f64,
    pub max_itrs: usize,
    pub verbose: bool,
}

impl Default for GraphSearchParams {
    fn default() -> Self {
        GraphSearchParams {
            weight: 1.0,
            batch_size: 1,
            eps: 0.0,
            max_itrs: 10_000,
            verbose: false,
        }
    }
}

impl GraphSearchParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        if !(0.0..=1.0).contains(&self.weight) {
            return Err(SearchError::Config(format!(
                "weight {} outside [0, 1]",
                self.weight
            )));
        }
        if self.batch_size < 1 {
            return Err(SearchError::Config("batch size must be >= 1".into()));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(SearchError::Config(format!(
                "eps {} outside [0, 1]",
                self.eps
            )));
        }
        if self.max_itrs < 1 {
            return Err(SearchError::Config("max_itrs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Parameters of beam search.
#[derive(Debug, Clone)]
pub struct BeamParams {
    /// Maximum beam width.
    pub width: usize,
    /// Boltzmann temperature; 0 selects greedily.
    pub temp: f64,
    /// Per-selection probability of a uniform-random edge.
    pub eps: f64,
    pub max_itrs: usize,
    pub verbose: bool,
}

impl Default for BeamParams {
    fn default() -> Self {
        BeamParams {
            width: 1,
            temp: 0.0,
            eps: 0.0,
            max_itrs: 10_000,
            verbose: false,
        }
    }
}

impl BeamParams {
    pub fn validate(&self) -> Result<(), SearchError> {
        if self.width < 1 {
            return Err(SearchError::Config("beam width must be >= 1".into()));
        }
        if !(self.temp >= 0.0 && self.temp.is_finite()) {
            return Err(SearchError::Config(format!(
                "temperature {} must be finite and >= 0",
                self.temp
            )));
        }
        if !(0.0..=1.0).contains(&self.eps) {
            return Err(SearchError::Config(format!(
                "eps {} outside [0, 1]",
                self.eps
            )));
        }
        if self.max_itrs < 1 {
            return Err(SearchError::Config("max_itrs must be >= 1".into()));
        }
        Ok(())
    }
}

/// Pop up to `batch_size` fresh entries; each pop is independently a
/// uniform-random pop with probability `eps`, otherwise the minimum-f pop.
/// Entries rejected by `fresh` are discarded without consuming batch slots.
pub(crate) fn pop_batch<T>(
    frontier: &mut Frontier<T>,
    params: &GraphSearchParams,
    rng: &mut dyn RngCore,
    mut fresh: impl FnMut(&T) -> bool,
) -> Vec<(T, f64)> {
    let mut popped = Vec::with_capacity(params.batch_size);
    while popped.len() < params.batch_size {
        let use_random = params.eps > 0.0 && rng.random::<f64>() < params.eps;
        let entry = if use_random {
            frontier.pop_random(rng)
        } else {
            frontier.pop_min()
        };
        let Some((payload, f)) = entry else { break };
        if !fresh(&payload) {
            continue;
        }
        popped.push((payload, f));
    }
    popped
}

pub(crate) fn verbose_line(itr: usize, frontier: usize, fs: &[f64], hs: &[f64], generated: usize) {
    let stats = |vals: &[f64]| -> (f64, f64, f64) {
        if vals.is_empty() {
            return (f64::NAN, f64::NAN, f64::NAN);
        }
        let min = vals.iter().copied().fold(f64::INFINITY, f64::min);
        let max = vals.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mean = vals.iter().sum::<f64>() / vals.len() as f64;
        (min, mean, max)
    };
    let (fmin, fmean, fmax) = stats(fs);
    let (hmin, hmean, hmax) = stats(hs);
    eprintln!(
        "itr {itr}: frontier {frontier}, f {fmin:.3}/{fmean:.3}/{fmax:.3}, \
         h {hmin:.3}/{hmean:.3}/{hmax:.3}, generated {generated}"
    );
}

/// Replay `path` from the instance's start state; returns the accumulated
/// cost and whether the terminal state satisfies the goal.
pub fn replay_path<D: Domain + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    path: &[D::Action],
) -> Result<(f64, bool), DomainError> {
    let mut cur = inst.start.clone();
    let mut cost = 0.0;
    for action in path {
        let tr = domain.next_state(&cur, action)?;
        cost += tr.cost;
        cur = tr.next_state;
    }
    Ok((cost, domain.is_solved(&cur, &inst.goal)))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::testdom::{GraphDomain, OneWayChain};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;
    use std::collections::HashMap;

    fn rng() -> ChaCha12Rng {
        ChaCha12Rng::seed_from_u64(0)
    }

    /// Hand graph:
    ///   0 -1-> 1, 0 -4-> 2, 1 -2-> 3, 2 -1-> 3, 3 -1-> 4
    /// Dijkstra pop order from 0: 0 (g=0), 1 (1), 3 (3), 2 (4)*, 4 (4).
    /// State 2's cheapest copy pops at g=4 alongside goal handling.
    fn hand_graph() -> GraphDomain {
        GraphDomain {
            adj: vec![
                vec![(1, 1.0), (2, 4.0)],
                vec![(3, 2.0)],
                vec![(3, 1.0)],
                vec![(4, 1.0)],
                vec![],
            ],
        }
    }

    #[test]
    fn bwas_zero_heuristic_pops_in_dijkstra_order() {
        let d = hand_graph();
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 4usize,
            gen_steps: 0,
        };
        let res = bwas(&d, &inst, &ZeroHeuristicV, &GraphSearchParams::default(), &mut rng())
            .unwrap();
        assert!(res.solved);
        assert_eq!(res.path_cost, 4.0);
        // Expansion order follows cheapest path cost first.
        let states: Vec<usize> = res
            .tree
            .expanded
            .iter()
            .map(|&id| res.tree.nodes[id].state)
            .collect();
        assert_eq!(states, vec![0, 1, 3, 2, 4]);
    }

    #[test]
    fn bwas_immediate_goal_pops_in_one_iteration() {
        let d = hand_graph();
        let inst = crate::domain::ProblemInstance {
            start: 2usize,
            goal: 2usize,
            gen_steps: 0,
        };
        let res = bwas(&d, &inst, &ZeroHeuristicV, &GraphSearchParams::default(), &mut rng())
            .unwrap();
        assert!(res.solved);
        assert!(res.path.is_empty());
        assert_eq!(res.path_cost, 0.0);
        assert_eq!(res.iterations, 1);
    }

    #[test]
    fn bwas_unsolvable_exhausts_frontier_without_error() {
        let d = OneWayChain { len: 3 };
        let inst = crate::domain::ProblemInstance {
            start: 1usize,
            goal: 0usize,
            gen_steps: 0,
        };
        let res = bwas(&d, &inst, &ZeroHeuristicV, &GraphSearchParams::default(), &mut rng())
            .unwrap();
        assert!(!res.solved);
        assert!(res.iterations < 10);
    }

    #[test]
    fn bwas_rejects_bad_params() {
        let d = hand_graph();
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 4usize,
            gen_steps: 0,
        };
        for params in [
            GraphSearchParams {
                weight: 1.5,
                ..Default::default()
            },
            GraphSearchParams {
                batch_size: 0,
                ..Default::default()
            },
            GraphSearchParams {
                eps: -0.1,
                ..Default::default()
            },
        ] {
            assert!(bwas(&d, &inst, &ZeroHeuristicV, &params, &mut rng()).is_err());
        }
    }

    #[test]
    fn bwqs_zero_q_layers_like_breadth_first_on_unit_graph() {
        // Unit-cost diamond: 0 -> {1, 2} -> 3. With a zero q function the
        // edge cost is g(parent), so edges pop in breadth-first layers:
        // nodes 1 and 2 are generated at f = 0, then 3 at f = 1.
        let d = GraphDomain {
            adj: vec![
                vec![(1, 1.0), (2, 1.0)],
                vec![(3, 1.0)],
                vec![(3, 1.0)],
                vec![],
            ],
        };
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 3usize,
            gen_steps: 0,
        };
        let q = ZeroHeuristicQ { n_actions: 2 };
        let res = bwqs(&d, &inst, &q, &GraphSearchParams::default(), &mut rng()).unwrap();
        assert!(res.solved);
        assert_eq!(res.path_cost, 2.0);
        let generated: Vec<usize> = res.tree.nodes[1..].iter().map(|n| n.state).collect();
        assert_eq!(generated, vec![1, 2, 3]);
        assert_eq!(res.iterations, 3);
    }

    #[test]
    fn bwqs_generates_at_most_batch_size_nodes_per_iteration() {
        let d = GraphDomain {
            adj: vec![
                vec![(1, 1.0), (2, 1.0)],
                vec![(3, 1.0), (0, 1.0)],
                vec![(3, 1.0), (1, 1.0)],
                vec![(4, 1.0), (2, 1.0)],
                vec![],
            ],
        };
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 4usize,
            gen_steps: 0,
        };
        for batch_size in [1usize, 3, 10] {
            let params = GraphSearchParams {
                batch_size,
                ..Default::default()
            };
            let q = ZeroHeuristicQ { n_actions: 2 };
            let res = bwqs(&d, &inst, &q, &params, &mut rng()).unwrap();
            assert!(res.solved);
            assert!(res.nodes_generated <= batch_size * res.iterations);
        }
    }

    #[test]
    fn rollout_solves_trivial_and_replays() {
        let d = OneWayChain { len: 6 };
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 5usize,
            gen_steps: 0,
        };
        let res = random_rollout(&d, &inst, 100, &mut rng()).unwrap();
        assert!(res.solved);
        assert_eq!(res.path_cost, 5.0);
        let (cost, ok) = replay_path(&d, &inst, &res.path).unwrap();
        assert!(ok);
        assert_eq!(cost, res.path_cost);

        let solved_inst = crate::domain::ProblemInstance {
            start: 5usize,
            goal: 5usize,
            gen_steps: 0,
        };
        let res = random_rollout(&d, &solved_inst, 100, &mut rng()).unwrap();
        assert!(res.solved);
        assert_eq!(res.iterations, 0);
    }

    #[test]
    fn lhbl_single_node_tree_takes_leaf_value() {
        let d = hand_graph();
        let tree = SearchTree::<usize, usize>::new(0, 0.0);
        let leaf_values = HashMap::from([(0usize, 4.2)]);
        let vals = lhbl_backup(&d, &tree, &9usize, &leaf_values, LhblMode::TreeOnly);
        assert_eq!(vals, vec![4.2]);
    }

    #[test]
    fn lhbl_two_children_takes_min_cost_plus_value() {
        let d = hand_graph();
        let mut tree = SearchTree::<usize, usize>::new(0, 0.0);
        let a = tree.add_child(0, 0, 1.0, 1, 0.0);
        let b = tree.add_child(0, 1, 1.0, 2, 0.0);
        let leaf_values = HashMap::from([(a, 5.0), (b, 2.0)]);
        let vals = lhbl_backup(&d, &tree, &9usize, &leaf_values, LhblMode::TreeOnly);
        assert_eq!(vals[0], 3.0);
    }

    #[test]
    fn lhbl_solved_nodes_are_zero() {
        let d = hand_graph();
        let mut tree = SearchTree::<usize, usize>::new(0, 0.0);
        let a = tree.add_child(0, 0, 1.0, 4, 0.0); // goal state below
        let leaf_values = HashMap::from([(a, 7.0)]);
        let vals = lhbl_backup(&d, &tree, &4usize, &leaf_values, LhblMode::TreeOnly);
        assert_eq!(vals, vec![1.0, 0.0]);
    }

    #[test]
    fn beam_width_one_greedy_descends_perfect_scores() {
        // Perfect heuristic on the one-way chain: h = distance to goal.
        let d = OneWayChain { len: 10 };
        let inst = crate::domain::ProblemInstance {
            start: 0usize,
            goal: 9usize,
            gen_steps: 0,
        };
        let h = FnHeuristicV::new(|s: &usize, g: &usize| (*g as f64) - (*s as f64));
        let res = beam_search_v(&d, &inst, &h, &BeamParams::default(), &mut rng()).unwrap();
        assert!(res.solved);
        assert_eq!(res.iterations, 9);
        assert_eq!(res.path_cost, 9.0);
    }
}
