//! Beam search over heuristic-v or heuristic-q scores.
//!
//! No closed map and no priority queue: the beam holds at most `B` nodes,
//! and each iteration scores every outgoing edge of the beam, selects up
//! to `B` of them, and transitions along the selected edges. At
//! temperature 0 selection is greedy (ties by insertion order); at
//! temperature > 0 edges are drawn without replacement from a Boltzmann
//! distribution over scores; independently, each selection is replaced by
//! a uniform-random edge with probability epsilon.

use std::time::Instant;

use rand::{Rng, RngCore};

use crate::domain::{ActsEnum, FixedActsEnum, ProblemInstance};

use super::heur::{HeuristicQ, HeuristicV};
use super::tree::{SearchResult, SearchTree};
use super::{BeamParams, SearchError};

/// Beam search scored by a heuristic-v function:
/// `score(s, a) = -(c(s, a) + h(T(s, a), g))`.
pub fn beam_search_v<D: ActsEnum + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    heuristic: &dyn HeuristicV<D::State, D::Goal>,
    params: &BeamParams,
    rng: &mut dyn RngCore,
) -> Result<SearchResult<D::State, D::Action>, SearchError> {
    params.validate()?;
    let start_time = Instant::now();
    let mut tree = SearchTree::new(inst.start.clone(), 0.0);
    if domain.is_solved(&inst.start, &inst.goal) {
        return Ok(SearchResult::solved_at(
            tree,
            0,
            0,
            start_time.elapsed().as_secs_f64(),
        ));
    }

    let mut beam = vec![0usize];
    let mut itr = 0;
    while itr < params.max_itrs {
        itr += 1;

        // Scoring with a heuristic-v function requires generating every
        // child up front; all of them are recorded in the tree.
        let mut cand: Vec<usize> = Vec::new();
        for &id in &beam {
            tree.mark_expanded(id);
            let state = tree.nodes[id].state.clone();
            for (action, tr) in domain.expand(&state)? {
                cand.push(tree.add_child(id, action, tr.cost, tr.next_state, 0.0));
            }
        }
        if cand.is_empty() {
            break;
        }

        let pairs: Vec<(&D::State, &D::Goal)> = cand
            .iter()
            .map(|&c| (&tree.nodes[c].state, &inst.goal))
            .collect();
        let hs = heuristic.eval_batch(&pairs);
        drop(pairs);
        for (i, &c) in cand.iter().enumerate() {
            tree.nodes[c].h = hs[i];
        }

        let scores: Vec<f64> = cand
            .iter()
            .map(|&c| -(tree.nodes[c].cost_from_parent + tree.nodes[c].h))
            .collect();
        let picks = select_edges(&scores, params.width, params.temp, params.eps, rng);
        beam = picks.iter().map(|&p| cand[p]).collect();

        if let Some(best) = solved_in(domain, &tree, &beam, &inst.goal) {
            return Ok(SearchResult::solved_at(
                tree,
                best,
                itr,
                start_time.elapsed().as_secs_f64(),
            ));
        }

        if params.verbose {
            let fs: Vec<f64> = beam.iter().map(|&id| tree.nodes[id].g).collect();
            let hs: Vec<f64> = beam.iter().map(|&id| tree.nodes[id].h).collect();
            super::verbose_line(itr, beam.len(), &fs, &hs, cand.len());
        }
    }

    Ok(SearchResult::unsolved(
        tree,
        itr,
        start_time.elapsed().as_secs_f64(),
    ))
}

/// Beam search scored by a heuristic-q function: `score(s, a) = -q(s, g, a)`.
/// Only selected edges generate nodes.
pub fn beam_search_q<D: FixedActsEnum + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    q: &dyn HeuristicQ<D::State, D::Goal>,
    params: &BeamParams,
    rng: &mut dyn RngCore,
) -> Result<SearchResult<D::State, D::Action>, SearchError> {
    params.validate()?;
    let start_time = Instant::now();
    let all_actions = domain.all_actions();
    if q.n_actions() != all_actions.len() {
        return Err(SearchError::Config(format!(
            "heuristic-q outputs {} actions, domain has {}",
            q.n_actions(),
            all_actions.len()
        )));
    }

    let mut tree = SearchTree::new(inst.start.clone(), 0.0);
    if domain.is_solved(&inst.start, &inst.goal) {
        return Ok(SearchResult::solved_at(
            tree,
            0,
            0,
            start_time.elapsed().as_secs_f64(),
        ));
    }

    let mut beam = vec![0usize];
    let mut itr = 0;
    while itr < params.max_itrs {
        itr += 1;

        let pairs: Vec<(&D::State, &D::Goal)> = beam
            .iter()
            .map(|&id| (&tree.nodes[id].state, &inst.goal))
            .collect();
        let rows = q.eval_batch(&pairs);
        drop(pairs);

        let mut cand: Vec<(usize, usize, f64)> = Vec::new();
        for (i, &id) in beam.iter().enumerate() {
            tree.mark_expanded(id);
            for action in domain.actions(&tree.nodes[id].state) {
                let action_idx = all_actions
                    .iter()
                    .position(|a| *a == action)
                    .expect("legal action is in the fixed action set");
                cand.push((id, action_idx, rows[i][action_idx]));
            }
        }
        if cand.is_empty() {
            break;
        }

        let scores: Vec<f64> = cand.iter().map(|&(_, _, qv)| -qv).collect();
        let picks = select_edges(&scores, params.width, params.temp, params.eps, rng);

        let mut next_beam = Vec::with_capacity(picks.len());
        for &p in &picks {
            let (parent, action_idx, q_val) = cand[p];
            let parent_state = tree.nodes[parent].state.clone();
            let action = all_actions[action_idx].clone();
            let tr = domain.next_state(&parent_state, &action)?;
            next_beam.push(tree.add_child(parent, action, tr.cost, tr.next_state, q_val));
        }
        beam = next_beam;

        if let Some(best) = solved_in(domain, &tree, &beam, &inst.goal) {
            return Ok(SearchResult::solved_at(
                tree,
                best,
                itr,
                start_time.elapsed().as_secs_f64(),
            ));
        }

        if params.verbose {
            let fs: Vec<f64> = beam.iter().map(|&id| tree.nodes[id].g).collect();
            let hs: Vec<f64> = beam.iter().map(|&id| tree.nodes[id].h).collect();
            super::verbose_line(itr, beam.len(), &fs, &hs, beam.len());
        }
    }

    Ok(SearchResult::unsolved(
        tree,
        itr,
        start_time.elapsed().as_secs_f64(),
    ))
}

fn solved_in<D: crate::domain::Domain + ?Sized>(
    domain: &D,
    tree: &SearchTree<D::State, D::Action>,
    beam: &[usize],
    goal: &D::Goal,
) -> Option<usize> {
    beam.iter()
        .copied()
        .filter(|&id| domain.is_solved(&tree.nodes[id].state, goal))
        .min_by(|&a, &b| tree.nodes[a].g.total_cmp(&tree.nodes[b].g).then(a.cmp(&b)))
}

/// Pick up to `count` distinct candidate indices. Greedy at temperature 0
/// (ties by candidate order), Boltzmann draws without replacement
/// otherwise; each pick is independently replaced by a uniform-random
/// remaining candidate with probability `eps`.
pub(crate) fn select_edges(
    scores: &[f64],
    count: usize,
    temp: f64,
    eps: f64,
    rng: &mut dyn RngCore,
) -> Vec<usize> {
    let mut remaining: Vec<usize> = (0..scores.len()).collect();
    let mut picks = Vec::with_capacity(count.min(scores.len()));
    for _ in 0..count {
        if remaining.is_empty() {
            break;
        }
        let replace = eps > 0.0 && rng.random::<f64>() < eps;
        let pos = if replace {
            rng.random_range(0..remaining.len())
        } else if temp == 0.0 {
            let mut best = 0;
            for p in 1..remaining.len() {
                if scores[remaining[p]] > scores[remaining[best]] {
                    best = p;
                }
            }
            best
        } else {
            boltzmann_draw(scores, &remaining, temp, rng)
        };
        picks.push(remaining.remove(pos));
    }
    picks
}

fn boltzmann_draw(
    scores: &[f64],
    remaining: &[usize],
    temp: f64,
    rng: &mut dyn RngCore,
) -> usize {
    let max = remaining
        .iter()
        .map(|&i| scores[i])
        .fold(f64::NEG_INFINITY, f64::max);
    let weights: Vec<f64> = remaining
        .iter()
        .map(|&i| ((scores[i] - max) / temp).exp())
        .collect();
    let total: f64 = weights.iter().sum();
    let target = rng.random::<f64>() * total;
    let mut acc = 0.0;
    for (pos, w) in weights.iter().enumerate() {
        acc += w;
        if target < acc {
            return pos;
        }
    }
    remaining.len() - 1
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha12Rng;

    #[test]
    fn greedy_selection_takes_top_scores_with_fifo_ties() {
        let mut rng = ChaCha12Rng::seed_from_u64(0);
        let scores = [1.0, 3.0, 3.0, 2.0];
        assert_eq!(select_edges(&scores, 3, 0.0, 0.0, &mut rng), vec![1, 2, 3]);
    }

    #[test]
    fn boltzmann_selection_matches_softmax_frequencies() {
        // Scores (0, -ln 3) at temperature 1: probabilities (3/4, 1/4).
        let mut rng = ChaCha12Rng::seed_from_u64(42);
        let scores = [0.0, -(3.0f64.ln())];
        let trials = 10_000;
        let mut counts = [0usize; 2];
        for _ in 0..trials {
            let picks = select_edges(&scores, 1, 1.0, 0.0, &mut rng);
            counts[picks[0]] += 1;
        }
        let expected = [0.75 * trials as f64, 0.25 * trials as f64];
        let chi2: f64 = (0..2)
            .map(|i| {
                let d = counts[i] as f64 - expected[i];
                d * d / expected[i]
            })
            .sum();
        // Chi-square critical value, 1 degree of freedom, alpha = 0.001.
        assert!(chi2 < 10.828, "chi2 = {chi2}, counts = {counts:?}");
    }
}
