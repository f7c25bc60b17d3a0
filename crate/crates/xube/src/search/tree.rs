//! Search-tree arena shared by all pathfinding algorithms.
//!
//! Nodes are appended in generation order, so a node's index doubles as
//! its insertion id and every child has a larger index than its parent
//! (which rules out cycles by construction). The record keeps everything
//! reinforcement-learning target computation needs: states, path costs,
//! parent links with transition costs, heuristic values, and which nodes
//! were selected for expansion.

#[derive(Debug, Clone, PartialEq)]
pub struct TreeNode<S, A> {
    pub state: S,
    pub parent: Option<usize>,
    pub action_from_parent: Option<A>,
    pub cost_from_parent: f64,
    /// Path cost from the root (sum of transition costs).
    pub g: f64,
    /// Heuristic value assigned when the node was generated.
    pub h: f64,
    pub depth: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SearchTree<S, A> {
    pub nodes: Vec<TreeNode<S, A>>,
    /// Ids of nodes selected for expansion, in selection order.
    pub expanded: Vec<usize>,
}

impl<S, A: Clone> SearchTree<S, A> {
    pub fn new(root_state: S, root_h: f64) -> Self {
        SearchTree {
            nodes: vec![TreeNode {
                state: root_state,
                parent: None,
                action_from_parent: None,
                cost_from_parent: 0.0,
                g: 0.0,
                h: root_h,
                depth: 0,
            }],
            expanded: Vec::new(),
        }
    }

    pub fn add_child(&mut self, parent: usize, action: A, cost: f64, state: S, h: f64) -> usize {
        let (g, depth) = {
            let p = &self.nodes[parent];
            (p.g + cost, p.depth + 1)
        };
        self.nodes.push(TreeNode {
            state,
            parent: Some(parent),
            action_from_parent: Some(action),
            cost_from_parent: cost,
            g,
            h,
            depth,
        });
        self.nodes.len() - 1
    }

    pub fn mark_expanded(&mut self, id: usize) {
        self.expanded.push(id);
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Number of nodes generated by expansion (everything but the root).
    pub fn generated(&self) -> usize {
        self.nodes.len() - 1
    }

    /// Actions along the root-to-`id` path.
    pub fn path_to(&self, id: usize) -> Vec<A> {
        let mut actions = Vec::new();
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            actions.push(
                self.nodes[cur]
                    .action_from_parent
                    .clone()
                    .expect("non-root node has an incoming action"),
            );
            cur = parent;
        }
        actions.reverse();
        actions
    }

    /// Node ids along the root-to-`id` path, root first.
    pub fn path_node_ids(&self, id: usize) -> Vec<usize> {
        let mut ids = vec![id];
        let mut cur = id;
        while let Some(parent) = self.nodes[cur].parent {
            ids.push(parent);
            cur = parent;
        }
        ids.reverse();
        ids
    }

    /// A node of maximal depth; ties broken by insertion order.
    pub fn deepest_node(&self) -> usize {
        let mut best = 0;
        for (id, node) in self.nodes.iter().enumerate() {
            if node.depth > self.nodes[best].depth {
                best = id;
            }
        }
        best
    }

    /// Child ids per node id.
    pub fn children_map(&self) -> Vec<Vec<usize>> {
        let mut children = vec![Vec::new(); self.nodes.len()];
        for (id, node) in self.nodes.iter().enumerate() {
            if let Some(parent) = node.parent {
                children[parent].push(id);
            }
        }
        children
    }
}

/// Outcome of a single search.
#[derive(Debug, Clone)]
pub struct SearchResult<S, A> {
    pub solved: bool,
    pub path: Vec<A>,
    pub path_cost: f64,
    pub iterations: usize,
    pub nodes_generated: usize,
    pub wall_time_secs: f64,
    pub tree: SearchTree<S, A>,
}

impl<S, A: Clone> SearchResult<S, A> {
    pub(crate) fn solved_at(
        tree: SearchTree<S, A>,
        node: usize,
        iterations: usize,
        wall_time_secs: f64,
    ) -> Self {
        let path = tree.path_to(node);
        let path_cost = tree.nodes[node].g;
        let nodes_generated = tree.generated();
        SearchResult {
            solved: true,
            path,
            path_cost,
            iterations,
            nodes_generated,
            wall_time_secs,
            tree,
        }
    }

    pub(crate) fn unsolved(
        tree: SearchTree<S, A>,
        iterations: usize,
        wall_time_secs: f64,
    ) -> Self {
        let nodes_generated = tree.generated();
        SearchResult {
            solved: false,
            path: Vec::new(),
            path_cost: f64::INFINITY,
            iterations,
            nodes_generated,
            wall_time_secs,
            tree,
        }
    }
}
