//! Hindsight relabeling of failed searches: a deepest node of the search
//! tree donates a substitute goal, so every search yields an example of a
//! reached goal.

use rand::RngCore;

use crate::domain::{Domain, DynGoalSampleable};
use crate::search::SearchTree;

/// Pick a deepest node (ties by insertion order), sample a goal from its
/// state, and return the root-to-node path ids with the new goal. The
/// selected node's state satisfies the returned goal by construction.
pub fn her_relabel<D: Domain + ?Sized>(
    tree: &SearchTree<D::State, D::Action>,
    goal_sampler: DynGoalSampleable<'_, D>,
    rng: &mut dyn RngCore,
) -> (Vec<usize>, D::Goal) {
    let deepest = tree.deepest_node();
    let goal = goal_sampler.samp_goal_from_state(&tree.nodes[deepest].state, rng);
    (tree.path_node_ids(deepest), goal)
}
