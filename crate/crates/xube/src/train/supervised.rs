//! Supervised learning from random-walk path costs: targets are walk
//! costs, so no function approximator is needed to compute them.
//!
//! Forward walks sample a goal from the terminal state; the target of
//! each visited state is the remaining walk cost to the terminal. Reverse
//! walks start from a sampled goal state; the target of the state reached
//! after `j` reverse steps is the cost of the `j`-step return path, and
//! for q heads each reverse step also donates the goal-ward action (the
//! reversal of that step).

use rand::RngCore;

use crate::domain::{
    random_walk, Domain, DomainError, GoalSampleableFromState, ReverseWalkable, WalkRecord,
};
use crate::encode::Encoder;

use super::{Head, TrainError, TrainExample};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WalkDirection {
    Forward,
    Reverse,
}

/// A reverse walk: `states[0]` is the sampled goal state, `states[j]` is
/// the state after `j` reverse steps, and `actions[j]` applied to
/// `states[j + 1]` leads back to `states[j]` at `costs[j]`.
#[derive(Debug, Clone)]
pub struct ReverseWalk<S, A> {
    pub states: Vec<S>,
    pub actions: Vec<A>,
    pub costs: Vec<f64>,
}

impl<S, A> ReverseWalk<S, A> {
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    /// Return-path cost from `states[j]` back to the goal state.
    pub fn return_cost(&self, j: usize) -> f64 {
        self.costs[..j].iter().sum()
    }
}

/// Forward walk of `k` steps plus a goal sampled from its terminal state.
pub fn sup_forward_walk<D>(
    domain: &D,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<(WalkRecord<D::State, D::Action>, D::Goal), DomainError>
where
    D: GoalSampleableFromState + ?Sized,
{
    let start = domain.samp_start_state(rng);
    let walk = random_walk(domain, &start, k, rng)?;
    let goal = domain.samp_goal_from_state(walk.terminal(), rng);
    Ok((walk, goal))
}

/// Reverse walk of `k` steps from a sampled goal state, plus its goal.
pub fn sup_reverse_walk<D>(
    domain: &D,
    k: usize,
    rng: &mut dyn RngCore,
) -> Result<(ReverseWalk<D::State, D::Action>, D::Goal), DomainError>
where
    D: ReverseWalkable + ?Sized,
{
    let (goal_state, goal) = domain.samp_goal_state_and_goal(rng);
    let mut states = vec![goal_state];
    let mut actions = Vec::with_capacity(k);
    let mut costs = Vec::with_capacity(k);
    for _ in 0..k {
        let cur = states.last().expect("nonempty");
        match domain.reverse_step(cur, rng) {
            Ok(step) => {
                states.push(step.pred);
                actions.push(step.action);
                costs.push(step.cost);
            }
            Err(DomainError::DeadEnd) => break,
            Err(e) => return Err(e),
        }
    }
    Ok((
        ReverseWalk {
            states,
            actions,
            costs,
        },
        goal,
    ))
}

/// Suffix path costs of a forward walk: `out[i]` is the cost from
/// `states[i]` to the terminal; `out[len]` is 0.
pub fn sup_targets_forward(costs: &[f64]) -> Vec<f64> {
    let mut out = vec![0.0; costs.len() + 1];
    for i in (0..costs.len()).rev() {
        out[i] = costs[i] + out[i + 1];
    }
    out
}

/// Walk once and turn it into training examples for the given head.
/// Returns the examples plus `(steps, total cost)` for statistics.
pub fn sup_walk_examples<D: Domain + ?Sized>(
    domain: &D,
    direction: WalkDirection,
    head: Head,
    k: usize,
    encoder: &dyn Encoder<D::State, D::Goal>,
    rng: &mut dyn RngCore,
) -> Result<(Vec<TrainExample>, usize, f64), TrainError> {
    let action_index = |a: &D::Action| -> Result<usize, TrainError> {
        let fixed = domain.fixed_acts_enum().ok_or(TrainError::Capability(
            "FixedActsEnum",
            "supervised q-head training".into(),
        ))?;
        fixed
            .all_actions()
            .iter()
            .position(|x| x == a)
            .ok_or_else(|| TrainError::Config("walk action outside the fixed action set".into()))
    };

    match direction {
        WalkDirection::Forward => {
            let sampler = domain.goal_sampleable().ok_or(TrainError::Capability(
                "GoalSampleableFromState",
                "forward supervised walks".into(),
            ))?;
            let (walk, goal) = sup_forward_walk(sampler, k, rng)?;
            let targets = sup_targets_forward(&walk.costs);
            let mut examples = Vec::new();
            match head {
                Head::V => {
                    for (i, s) in walk.states.iter().enumerate() {
                        examples.push(TrainExample {
                            input: encoder.encode(s, &goal),
                            target: targets[i],
                            action_index: None,
                            k_origin: k,
                        });
                    }
                }
                Head::Q => {
                    for i in 0..walk.len() {
                        examples.push(TrainExample {
                            input: encoder.encode(&walk.states[i], &goal),
                            target: targets[i],
                            action_index: Some(action_index(&walk.actions[i])?),
                            k_origin: k,
                        });
                    }
                }
            }
            Ok((examples, walk.len(), walk.total_cost()))
        }
        WalkDirection::Reverse => {
            let walker = domain.reverse_walkable().ok_or(TrainError::Capability(
                "ReverseWalkable",
                "reverse supervised walks".into(),
            ))?;
            let (walk, goal) = sup_reverse_walk(walker, k, rng)?;
            let mut examples = Vec::new();
            match head {
                Head::V => {
                    for (j, s) in walk.states.iter().enumerate() {
                        examples.push(TrainExample {
                            input: encoder.encode(s, &goal),
                            target: walk.return_cost(j),
                            action_index: None,
                            k_origin: k,
                        });
                    }
                }
                Head::Q => {
                    for j in 1..=walk.len() {
                        examples.push(TrainExample {
                            input: encoder.encode(&walk.states[j], &goal),
                            target: walk.return_cost(j),
                            action_index: Some(action_index(&walk.actions[j - 1])?),
                            k_origin: k,
                        });
                    }
                }
            }
            let total = walk.return_cost(walk.len());
            let steps = walk.len();
            Ok((examples, steps, total))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::domain::Domain;
    use crate::domains::{SlidingTileDomain, StpOneHotEncoder};
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn suffix_targets_on_unit_costs() {
        assert_eq!(
            sup_targets_forward(&[1.0; 5]),
            vec![5.0, 4.0, 3.0, 2.0, 1.0, 0.0]
        );
    }

    #[test]
    fn suffix_targets_on_weighted_costs() {
        assert_eq!(sup_targets_forward(&[2.0, 3.0]), vec![5.0, 3.0, 0.0]);
        assert_eq!(sup_targets_forward(&[]), vec![0.0]);
    }

    #[test]
    fn reverse_q_examples_replay_toward_the_goal() {
        let d = SlidingTileDomain::new(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(5);
        for _ in 0..50 {
            let (walk, goal) = sup_reverse_walk(&d, 1, &mut rng).unwrap();
            assert_eq!(walk.len(), 1);
            // The action of the single reverse step leads the start state
            // back to the goal state.
            let back = d.next_state(&walk.states[1], &walk.actions[0]).unwrap();
            assert_eq!(back.next_state, walk.states[0]);
            assert!(d.is_solved(&walk.states[0], &goal));
        }
    }

    #[test]
    fn reverse_walk_adjacency_holds_at_every_step() {
        let d = SlidingTileDomain::new(3).unwrap();
        let mut rng = ChaCha12Rng::seed_from_u64(9);
        let (walk, _goal) = sup_reverse_walk(&d, 20, &mut rng).unwrap();
        for j in 0..walk.len() {
            let tr = d.next_state(&walk.states[j + 1], &walk.actions[j]).unwrap();
            assert_eq!(tr.next_state, walk.states[j]);
            assert_eq!(tr.cost, walk.costs[j]);
        }
    }

    #[test]
    fn forward_examples_have_zero_terminal_target() {
        let d = SlidingTileDomain::new(3).unwrap();
        let enc = StpOneHotEncoder::new(&d);
        let mut rng = ChaCha12Rng::seed_from_u64(1);
        let (examples, steps, cost) =
            sup_walk_examples(&d, WalkDirection::Forward, Head::V, 5, &enc, &mut rng).unwrap();
        assert_eq!(steps, 5);
        assert_eq!(cost, 5.0);
        assert_eq!(examples.len(), 6);
        assert_eq!(examples[0].target, 5.0);
        assert_eq!(examples[5].target, 0.0);
    }
}
