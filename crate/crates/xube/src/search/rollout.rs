//! Random rollout: a single walk sampling actions uniformly, used as the
//! no-heuristic baseline policy and as a dead-simple training algorithm.

use std::time::Instant;

use rand::RngCore;

use crate::domain::{Domain, DomainError, ProblemInstance};

use super::tree::{SearchResult, SearchTree};
use super::SearchError;

pub fn random_rollout<D: Domain + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    max_itrs: usize,
    rng: &mut dyn RngCore,
) -> Result<SearchResult<D::State, D::Action>, SearchError> {
    if max_itrs < 1 {
        return Err(SearchError::Config("rollout needs max_itrs >= 1".into()));
    }
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

    let mut cur = 0usize;
    let mut itr = 0;
    while itr < max_itrs {
        itr += 1;
        let state = tree.nodes[cur].state.clone();
        let action = match domain.samp_state_act(&state, rng) {
            Ok(a) => a,
            Err(DomainError::DeadEnd) => break,
            Err(e) => return Err(e.into()),
        };
        let tr = domain.next_state(&state, &action)?;
        tree.mark_expanded(cur);
        cur = tree.add_child(cur, action, tr.cost, tr.next_state, 0.0);
        if domain.is_solved(&tree.nodes[cur].state, &inst.goal) {
            return Ok(SearchResult::solved_at(
                tree,
                cur,
                itr,
                start_time.elapsed().as_secs_f64(),
            ));
        }
    }

    Ok(SearchResult::unsolved(
        tree,
        itr,
        start_time.elapsed().as_secs_f64(),
    ))
}
