//! Batch weighted Q* search over edges.

use std::collections::HashMap;
use std::time::Instant;

use rand::RngCore;

use crate::domain::{FixedActsEnum, ProblemInstance};

use super::frontier::Frontier;
use super::heur::HeuristicQ;
use super::tree::{SearchResult, SearchTree};
use super::{pop_batch, GraphSearchParams, SearchError};

#[derive(Clone, Copy)]
struct Edge {
    parent: usize,
    action_idx: usize,
    q: f64,
}

/// Batch weighted Q*: the priority queue holds edges keyed by
/// `f = weight * g(parent) + q(s, g, a)`, and popping an edge generates
/// exactly one child node, so nodes generated per iteration never exceed
/// the batch size regardless of the action count. Generated states are
/// goal-tested; only states absent from the closed map (or reached
/// strictly cheaper) get their outgoing edges scored and enqueued.
pub fn bwqs<D: FixedActsEnum + ?Sized>(
    domain: &D,
    inst: &ProblemInstance<D::State, D::Goal>,
    q: &dyn HeuristicQ<D::State, D::Goal>,
    params: &GraphSearchParams,
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

    let mut closed: HashMap<D::State, f64> = HashMap::new();
    closed.insert(inst.start.clone(), 0.0);
    let mut frontier: Frontier<Edge> = Frontier::new();

    // Score the root's outgoing edges.
    push_edges(domain, q, &mut tree, &mut frontier, &[0], inst, params)?;

    let mut itr = 0;
    while itr < params.max_itrs && !frontier.is_empty() {
        itr += 1;

        let popped = pop_batch(&mut frontier, params, rng, |_| true);
        if popped.is_empty() {
            break;
        }

        // Each popped edge generates one child node (a traversed edge in
        // the record, whether or not it survives the closed-map filter).
        let mut generated: Vec<usize> = Vec::with_capacity(popped.len());
        for &(edge, _f) in &popped {
            let parent_state = tree.nodes[edge.parent].state.clone();
            let action = all_actions[edge.action_idx].clone();
            let tr = domain.next_state(&parent_state, &action)?;
            generated.push(tree.add_child(edge.parent, action, tr.cost, tr.next_state, edge.q));
        }

        let solved = generated
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

        let mut open_children: Vec<usize> = Vec::new();
        for &id in &generated {
            let g = tree.nodes[id].g;
            let keep = match closed.get(&tree.nodes[id].state) {
                None => true,
                Some(&best_g) => g < best_g,
            };
            if keep {
                closed.insert(tree.nodes[id].state.clone(), g);
                open_children.push(id);
            }
        }
        push_edges(domain, q, &mut tree, &mut frontier, &open_children, inst, params)?;

        if params.verbose {
            let fs: Vec<f64> = popped.iter().map(|&(_, f)| f).collect();
            let qs: Vec<f64> = popped.iter().map(|&(e, _)| e.q).collect();
            super::verbose_line(itr, frontier.len(), &fs, &qs, generated.len());
        }
    }

    Ok(SearchResult::unsolved(
        tree,
        itr,
        start_time.elapsed().as_secs_f64(),
    ))
}

/// Evaluate q rows for `nodes` in one batch and enqueue their legal edges.
fn push_edges<D: FixedActsEnum + ?Sized>(
    domain: &D,
    q: &dyn HeuristicQ<D::State, D::Goal>,
    tree: &mut SearchTree<D::State, D::Action>,
    frontier: &mut Frontier<Edge>,
    nodes: &[usize],
    inst: &ProblemInstance<D::State, D::Goal>,
    params: &GraphSearchParams,
) -> Result<(), SearchError> {
    if nodes.is_empty() {
        return Ok(());
    }
    let all_actions = domain.all_actions();
    let pairs: Vec<(&D::State, &D::Goal)> = nodes
        .iter()
        .map(|&id| (&tree.nodes[id].state, &inst.goal))
        .collect();
    let rows = q.eval_batch(&pairs);
    drop(pairs);
    for (i, &id) in nodes.iter().enumerate() {
        tree.mark_expanded(id);
        let g = tree.nodes[id].g;
        for action in domain.actions(&tree.nodes[id].state) {
            let action_idx = all_actions
                .iter()
                .position(|a| *a == action)
                .expect("legal action is in the fixed action set");
            let q_val = rows[i][action_idx];
            frontier.push(
                params.weight * g + q_val,
                Edge {
                    parent: id,
                    action_idx,
                    q: q_val,
                },
            );
        }
    }
    Ok(())
}
