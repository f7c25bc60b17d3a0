//! The pathfinding-domain contract.
//!
//! A domain is a weighted directed graph given as a black box: states are
//! nodes, actions are edges, and every transition carries a nonnegative
//! cost. Implementations provide the four core operations (instance
//! sampling, action sampling, state transition, goal test) and opt into
//! extra capabilities (action enumeration, goal sampling, reverse walks,
//! text codecs, batched stepping) by implementing the capability traits
//! and overriding the matching discovery accessor.

use std::fmt;
use std::hash::Hash;

use rand::{Rng, RngCore};
use thiserror::Error;

mod walks;

pub use walks::{
    gen_prob_insts_forward, gen_prob_insts_reverse, random_walk, sample_ks, WalkRecord,
};

/// Errors raised by domain implementations.
#[derive(Debug, Error)]
pub enum DomainError {
    #[error("invalid action `{action}` in state {state}")]
    InvalidAction { action: String, state: String },
    /// The state has no legal action to sample.
    #[error("dead-end state: no legal action")]
    DeadEnd,
    #[error("parse error: {0}")]
    Parse(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
}

/// Result of applying an action: successor state plus transition cost.
#[derive(Debug, Clone, PartialEq)]
pub struct Transition<S> {
    pub next_state: S,
    pub cost: f64,
}

/// A unit of work for search and training: start state, goal, and the
/// random-walk length used to generate it (0 when generated by other means).
#[derive(Debug, Clone, PartialEq)]
pub struct ProblemInstance<S, G> {
    pub start: S,
    pub goal: G,
    pub gen_steps: usize,
}

/// Predecessor sample produced by a reverse walk: `action` applied to
/// `pred` leads back to the state the step was taken from, at `cost`.
#[derive(Debug, Clone)]
pub struct ReverseStep<S, A> {
    pub pred: S,
    pub action: A,
    pub cost: f64,
}

/// States encoded as rows of a flat integer matrix for batched stepping.
#[derive(Debug, Clone, PartialEq)]
pub struct FlatStates {
    pub data: Vec<i64>,
    pub width: usize,
}

impl FlatStates {
    pub fn rows(&self) -> usize {
        if self.width == 0 {
            0
        } else {
            self.data.len() / self.width
        }
    }

    pub fn row(&self, i: usize) -> &[i64] {
        &self.data[i * self.width..(i + 1) * self.width]
    }

    pub fn row_mut(&mut self, i: usize) -> &mut [i64] {
        &mut self.data[i * self.width..(i + 1) * self.width]
    }
}

/// The core pathfinding-domain contract.
///
/// All operations are pure functions of their inputs plus the passed RNG;
/// implementations hold no mutable shared state, so a single domain value
/// may be used concurrently from many workers.
pub trait Domain: Send + Sync {
    type State: Clone + Eq + Hash + Send + Sync + 'static;
    type Action: Clone + PartialEq + fmt::Display + Send + Sync + 'static;
    type Goal: Clone + Send + Sync + 'static;

    /// Sample a start state for forward instance generation and tooling.
    fn samp_start_state(&self, rng: &mut dyn RngCore) -> Self::State;

    /// Sample problem instances, one per entry of `ks`, where `ks[i]` is the
    /// random-walk length to use for instance `i`. Each domain picks its
    /// preferred generation scheme.
    fn samp_prob_insts(
        &self,
        ks: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<ProblemInstance<Self::State, Self::Goal>>, DomainError>;

    /// Sample a valid action in `s`. A dead-end state is an error
    /// ([`DomainError::DeadEnd`]); walks treat it as early termination.
    fn samp_state_act(
        &self,
        s: &Self::State,
        rng: &mut dyn RngCore,
    ) -> Result<Self::Action, DomainError>;

    /// Apply `a` in `s`. Deterministic; cost is nonnegative.
    fn next_state(
        &self,
        s: &Self::State,
        a: &Self::Action,
    ) -> Result<Transition<Self::State>, DomainError>;

    /// Goal membership test. Deterministic for fixed `(s, g)`.
    fn is_solved(&self, s: &Self::State, g: &Self::Goal) -> bool;

    // Capability discovery. Implementations that provide a capability
    // override the accessor to return `Some(self)`.

    fn acts_enum(&self) -> Option<DynActsEnum<'_, Self>> {
        None
    }

    fn fixed_acts_enum(&self) -> Option<DynFixedActsEnum<'_, Self>> {
        None
    }

    fn goal_sampleable(&self) -> Option<DynGoalSampleable<'_, Self>> {
        None
    }

    fn reverse_walkable(&self) -> Option<DynReverseWalkable<'_, Self>> {
        None
    }

    fn string_to_act(&self) -> Option<DynStringToAct<'_, Self>> {
        None
    }

    fn renderable(&self) -> Option<DynRenderable<'_, Self>> {
        None
    }

    fn batched_transition(&self) -> Option<DynBatchedTransition<'_, Self>> {
        None
    }
}

pub type DynActsEnum<'a, D> = &'a dyn ActsEnum<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynFixedActsEnum<'a, D> = &'a dyn FixedActsEnum<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynGoalSampleable<'a, D> = &'a dyn GoalSampleableFromState<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynReverseWalkable<'a, D> = &'a dyn ReverseWalkable<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynStringToAct<'a, D> = &'a dyn StringToAct<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynRenderable<'a, D> = &'a dyn Renderable<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;
pub type DynBatchedTransition<'a, D> = &'a dyn BatchedTransition<
    State = <D as Domain>::State,
    Action = <D as Domain>::Action,
    Goal = <D as Domain>::Goal,
>;

/// Enumerable action spaces: all legal actions of a state can be listed.
pub trait ActsEnum: Domain {
    /// Legal actions in `s`, in a deterministic order.
    fn actions(&self, s: &Self::State) -> Vec<Self::Action>;

    /// One `(action, transition)` entry per element of `actions(s)`,
    /// in the same order.
    fn expand(
        &self,
        s: &Self::State,
    ) -> Result<Vec<(Self::Action, Transition<Self::State>)>, DomainError> {
        self.actions(s)
            .into_iter()
            .map(|a| {
                let tr = self.next_state(s, &a)?;
                Ok((a, tr))
            })
            .collect()
    }
}

/// Enumerable action spaces whose action set is the same in every state.
/// `actions(s)` is always a subset of `all_actions()`.
pub trait FixedActsEnum: ActsEnum {
    /// The full fixed action set; heuristic-q outputs are indexed by it.
    fn all_actions(&self) -> Vec<Self::Action>;
}

/// Domains that can sample a goal satisfied by a given state.
pub trait GoalSampleableFromState: Domain {
    /// Sample a goal with `is_solved(s, goal) == true`.
    fn samp_goal_from_state(&self, s: &Self::State, rng: &mut dyn RngCore) -> Self::Goal;
}

/// Domains that can walk backwards from a sampled goal state.
pub trait ReverseWalkable: Domain {
    /// Sample a goal state together with a goal it satisfies.
    fn samp_goal_state_and_goal(&self, rng: &mut dyn RngCore) -> (Self::State, Self::Goal);

    /// Sample a predecessor of `s`: applying the returned action to the
    /// returned state leads back to `s` at the returned cost.
    fn reverse_step(
        &self,
        s: &Self::State,
        rng: &mut dyn RngCore,
    ) -> Result<ReverseStep<Self::State, Self::Action>, DomainError>;
}

/// Actions parseable from text; parsing the rendering of an action yields
/// an equal action.
pub trait StringToAct: Domain {
    fn parse_action(&self, text: &str) -> Result<Self::Action, DomainError>;
}

/// Text codecs and terminal rendering for states and goals.
pub trait Renderable: Domain {
    /// Canonical single-line encoding, stable for a given state.
    fn state_to_text(&self, s: &Self::State) -> String;
    fn text_to_state(&self, text: &str) -> Result<Self::State, DomainError>;
    fn goal_to_text(&self, g: &Self::Goal) -> String;
    fn text_to_goal(&self, text: &str) -> Result<Self::Goal, DomainError>;

    /// Multi-line diagram for terminals.
    fn render_state(&self, s: &Self::State) -> String;
    fn render_goal(&self, g: &Self::Goal) -> String;
}

/// Batched transitions over flat integer arrays, so tight loops convert
/// states once instead of per step.
pub trait BatchedTransition: Domain {
    fn encode_states(&self, states: &[Self::State]) -> FlatStates;
    fn decode_states(&self, flat: &FlatStates) -> Vec<Self::State>;

    /// Apply `actions[i]` to row `i` in place, returning per-row costs.
    fn step_batch(
        &self,
        flat: &mut FlatStates,
        actions: &[Self::Action],
    ) -> Result<Vec<f64>, DomainError>;
}

/// Uniform action sampling for enumerable action spaces; the usual body
/// of `samp_state_act` for [`ActsEnum`] domains.
pub fn samp_act_uniform<D: ActsEnum + ?Sized>(
    domain: &D,
    s: &D::State,
    rng: &mut dyn RngCore,
) -> Result<D::Action, DomainError> {
    let acts = domain.actions(s);
    if acts.is_empty() {
        return Err(DomainError::DeadEnd);
    }
    let idx = rng.random_range(0..acts.len());
    Ok(acts.into_iter().nth(idx).expect("index in range"))
}
