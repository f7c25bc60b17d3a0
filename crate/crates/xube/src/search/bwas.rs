//! Batch weighted A* search over nodes.

use std::collections::HashMap;
use std::time::Instant;

use rand::RngCore;

use crate::domain::{ActsEnum, ProblemInstance};

use super::frontier::Frontier;
use super::heur::HeuristicV;
use super::tree::{SearchResult, SearchTree};
use super::{pop_batch, GraphSearchParams, SearchError};

/// Batch weighted A*: pops up to `B` nodes per iteration from a priority
/// queue keyed by `f = weight * g + h`, goal-tests them, expands the rest,
/// and evaluates all children with one heuristic batch. Terminates when a
/// popped node satisfies the goal (returning the cheapest such node in the
/// batch) or when the iteration cap or the frontier is exhausted.
pub fn bwas<D: ActsEnum + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    heuristic: &dyn HeuristicV<D::State, D::Goal>,
    params: &GraphSearchParams,
    rng: &mut dyn RngCore,
) -> Result<SearchResult<D::State, D::Action>, SearchError> {
    params.validate()?;
    let start_time = Instant::now();

    let root_h = heuristic.eval_batch(&[(&inst.start, &inst.goal)])[0];
    let mut tree = SearchTree::new(inst.start.clone(), root_h);
    let mut frontier: Frontier<usize> = Frontier::new();
    frontier.push(root_h, 0); // f = weight * 0 + h at the root
    let mut closed: HashMap<D::State, f64> = HashMap::new();
    closed.insert(inst.start.clone(), 0.0);

    let mut itr = 0;
    while itr < params.max_itrs && !frontier.is_empty() {
        itr += 1;

        let popped = pop_batch(&mut frontier, params, rng, |&node| {
            // Skip stale queue entries superseded by a cheaper path.
            tree.nodes[node].g
                <= closed
                    .get(&tree.nodes[node].state)
                    .copied()
                    .unwrap_or(f64::INFINITY)
        });
        if popped.is_empty() {
            break;
        }

        // Duplicate states within one batch: goal status is identical, so
        // keep only the cheapest copy for expansion.
        let mut chosen: Vec<usize> = Vec::with_capacity(popped.len());
        for &(id, _f) in &popped {
            match chosen
                .iter_mut()
                .find(|c| tree.nodes[**c].state == tree.nodes[id].state)
            {
                Some(c) => {
                    if tree.nodes[id].g < tree.nodes[*c].g {
                        *c = id;
                    }
                }
                None => chosen.push(id),
            }
        }

        for &id in &chosen {
            tree.mark_expanded(id);
        }

        let solved = chosen
            .iter()
            .copied()
            .filter(|&id| domain.is_solved(&tree.nodes[id].state, &inst.goal))
            .min_by(|&a, &b| tree.nodes[a].g.total_cmp(&tree.nodes[b].g).then(a.cmp(&b)));
        if let Some(best) = solved {
            return Ok(SearchResult::solved_at(
                tree,
                best,
                itr,
                start_time.elapsed().as_secs_f64(),
            ));
        }

        let mut children: Vec<usize> = Vec::new();
        for &id in &chosen {
            let state = tree.nodes[id].state.clone();
            for (action, tr) in domain.expand(&state)? {
                children.push(tree.add_child(id, action, tr.cost, tr.next_state, 0.0));
            }
        }

        let pairs: Vec<(&D::State, &D::Goal)> = children
            .iter()
            .map(|&c| (&tree.nodes[c].state, &inst.goal))
            .collect();
        let hs = heuristic.eval_batch(&pairs);
        drop(pairs);
        for (i, &c) in children.iter().enumerate() {
            tree.nodes[c].h = hs[i];
        }

        for &c in &children {
            let g = tree.nodes[c].g;
            let keep = match closed.get(&tree.nodes[c].state) {
                None => true,
                Some(&best_g) => g < best_g,
            };
            if keep {
                closed.insert(tree.nodes[c].state.clone(), g);
                frontier.push(params.weight * g + tree.nodes[c].h, c);
            }
        }

        if params.verbose {
            let fs: Vec<f64> = popped.iter().map(|&(_, f)| f).collect();
            let hs: Vec<f64> = popped.iter().map(|&(id, _)| tree.nodes[id].h).collect();
            super::verbose_line(itr, frontier.len(), &fs, &hs, children.len());
        }
    }

    Ok(SearchResult::unsolved(
        tree,
        itr,
        start_time.elapsed().as_secs_f64(),
    ))
}
