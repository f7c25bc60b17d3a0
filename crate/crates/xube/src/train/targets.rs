//! One-step reinforcement-learning targets.
//!
//! The value-iteration target of `(s, g)` is 0 when `s` satisfies `g` and
//! otherwise the minimum over legal actions of the transition cost plus
//! the target network's estimate of the successor. The Q-learning target
//! of `(s, g, a)` is 0 when `s` satisfies `g` and otherwise the
//! transition cost plus the minimum target-q estimate over the
//! successor's legal actions. A dead-end successor yields `None`; such
//! examples are discarded by the collector.

use crate::domain::{ActsEnum, DomainError, FixedActsEnum};
use crate::search::{HeuristicQ, HeuristicV};

/// Batched value-iteration targets for `states` against one goal. All
/// children of all states are evaluated with a single heuristic batch.
pub fn vi_targets<D: ActsEnum + ?Sized>(
    domain: &D,
    states: &[&D::State],
    goal: &D::Goal,
    target_v: &dyn HeuristicV<D::State, D::Goal>,
) -> Result<Vec<Option<f64>>, DomainError> {
    // Expansion per unsolved state, flattened for one evaluator call.
    let mut solved = vec![false; states.len()];
    let mut child_states: Vec<D::State> = Vec::new();
    let mut child_costs: Vec<f64> = Vec::new();
    let mut spans: Vec<(usize, usize)> = Vec::with_capacity(states.len());
    for (i, s) in states.iter().enumerate() {
        if domain.is_solved(s, goal) {
            solved[i] = true;
            spans.push((child_states.len(), 0));
            continue;
        }
        let start = child_states.len();
        for (_a, tr) in domain.expand(s)? {
            child_costs.push(tr.cost);
            child_states.push(tr.next_state);
        }
        spans.push((start, child_states.len() - start));
    }

    let pairs: Vec<(&D::State, &D::Goal)> = child_states.iter().map(|c| (c, goal)).collect();
    let values = target_v.eval_batch(&pairs);

    Ok((0..states.len())
        .map(|i| {
            if solved[i] {
                return Some(0.0);
            }
            let (start, len) = spans[i];
            if len == 0 {
                return None; // unsolved dead end
            }
            let mut best = f64::INFINITY;
            for j in start..start + len {
                best = best.min(child_costs[j] + values[j]);
            }
            Some(best)
        })
        .collect())
}

/// Value-iteration target for one state.
pub fn vi_target<D: ActsEnum + ?Sized>(
    domain: &D,
    s: &D::State,
    goal: &D::Goal,
    target_v: &dyn HeuristicV<D::State, D::Goal>,
) -> Result<Option<f64>, DomainError> {
    Ok(vi_targets(domain, &[s], goal, target_v)?[0])
}

/// Batched Q-learning targets for `(state, action)` edges against one
/// goal. All successors are evaluated with a single heuristic-q batch.
pub fn ql_targets<D: FixedActsEnum + ?Sized>(
    domain: &D,
    edges: &[(&D::State, &D::Action)],
    goal: &D::Goal,
    target_q: &dyn HeuristicQ<D::State, D::Goal>,
) -> Result<Vec<Option<f64>>, DomainError> {
    let all_actions = domain.all_actions();
    let mut solved = vec![false; edges.len()];
    let mut succ_states: Vec<D::State> = Vec::new();
    let mut succ_costs: Vec<f64> = Vec::new();
    let mut succ_of: Vec<usize> = Vec::new(); // edge index per successor
    for (i, (s, a)) in edges.iter().enumerate() {
        if domain.is_solved(s, goal) {
            solved[i] = true;
            continue;
        }
        let tr = domain.next_state(s, a)?;
        succ_costs.push(tr.cost);
        succ_states.push(tr.next_state);
        succ_of.push(i);
    }

    let pairs: Vec<(&D::State, &D::Goal)> = succ_states.iter().map(|c| (c, goal)).collect();
    let rows = target_q.eval_batch(&pairs);

    let mut out = vec![Some(0.0); edges.len()];
    for (j, &i) in succ_of.iter().enumerate() {
        let legal = domain.actions(&succ_states[j]);
        if legal.is_empty() {
            out[i] = None; // dead-end successor
            continue;
        }
        let mut best = f64::INFINITY;
        for a in &legal {
            let idx = all_actions
                .iter()
                .position(|x| x == a)
                .expect("legal action is in the fixed action set");
            best = best.min(rows[j][idx]);
        }
        out[i] = Some(succ_costs[j] + best);
    }
    debug_assert!(solved.iter().zip(&out).all(|(s, o)| !s || *o == Some(0.0)));
    Ok(out)
}

/// Q-learning target for one edge.
pub fn ql_target<D: FixedActsEnum + ?Sized>(
    domain: &D,
    s: &D::State,
    goal: &D::Goal,
    a: &D::Action,
    target_q: &dyn HeuristicQ<D::State, D::Goal>,
) -> Result<Option<f64>, DomainError> {
    Ok(ql_targets(domain, &[(s, a)], goal, target_q)?[0])
}
