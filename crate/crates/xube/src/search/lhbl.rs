//! Limited-horizon Bellman backup over a whole search tree.

use std::collections::HashMap;

use crate::domain::Domain;

use super::tree::SearchTree;

/// How internal nodes combine tree backups with direct estimates.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LhblMode {
    /// Pure tree backup: internal values come only from children.
    TreeOnly,
    /// Internal nodes additionally take the minimum with their own direct
    /// estimate from `leaf_values` (which must then cover every node).
    MinWithEstimate,
}

/// Back up the entire search tree bottom-up:
///
/// - a node whose state satisfies the goal has value 0;
/// - an unsolved leaf takes its entry from `leaf_values`;
/// - an unsolved internal node takes `min` over its tree children of
///   `transition cost + child value`.
///
/// Returns one value per node id. Cycles are impossible by construction
/// (children always have larger ids than their parent).
pub fn lhbl_backup<D: Domain + ?Sized>(
    domain: &D,
    tree: &SearchTree<D::State, D::Action>,
    goal: &D::Goal,
    leaf_values: &HashMap<usize, f64>,
    mode: LhblMode,
) -> Vec<f64> {
    let children = tree.children_map();
    let mut values = vec![0.0; tree.len()];
    for id in (0..tree.len()).rev() {
        let node = &tree.nodes[id];
        values[id] = if domain.is_solved(&node.state, goal) {
            0.0
        } else if children[id].is_empty() {
            *leaf_values
                .get(&id)
                .expect("leaf_values covers every unsolved leaf")
        } else {
            let mut best = f64::INFINITY;
            for &c in &children[id] {
                best = best.min(tree.nodes[c].cost_from_parent + values[c]);
            }
            if mode == LhblMode::MinWithEstimate {
                if let Some(&est) = leaf_values.get(&id) {
                    best = best.min(est);
                }
            }
            best
        };
    }
    values
}
