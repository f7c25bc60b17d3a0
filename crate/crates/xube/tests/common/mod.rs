//! Shared test oracles, written independently of the library's search and
//! network code paths: a full breadth-first enumeration of the 8-puzzle,
//! textbook Dijkstra over grid domains, a scalar MLP forward pass for
//! finite-difference gradient checks, and a naive recursive tree backup.

#![allow(dead_code)]

use std::collections::{BinaryHeap, HashMap, VecDeque};
use std::sync::OnceLock;

use xube::domain::{ActsEnum, Domain};
use xube::domains::{GridDomain, GridState, SlidingTileDomain, StpGoal, StpState};
use xube::search::SearchTree;

/// Distance (in moves) from the canonical solved 8-puzzle state to every
/// reachable state: the whole 181,440-state component.
pub fn stp3_bfs_oracle() -> &'static HashMap<Vec<u8>, u32> {
    static ORACLE: OnceLock<HashMap<Vec<u8>, u32>> = OnceLock::new();
    ORACLE.get_or_init(|| {
        let solved: Vec<u8> = (0..9).collect();
        let mut dist: HashMap<Vec<u8>, u32> = HashMap::with_capacity(181_440);
        dist.insert(solved.clone(), 0);
        let mut queue = VecDeque::new();
        queue.push_back(solved);
        while let Some(tiles) = queue.pop_front() {
            let d = dist[&tiles];
            let blank = tiles.iter().position(|&t| t == 0).unwrap();
            let (r, c) = (blank / 3, blank % 3);
            let mut push = |dest: usize| {
                let mut next = tiles.clone();
                next.swap(blank, dest);
                if !dist.contains_key(&next) {
                    dist.insert(next.clone(), d + 1);
                    queue.push_back(next);
                }
            };
            if r > 0 {
                push(blank - 3);
            }
            if r < 2 {
                push(blank + 3);
            }
            if c > 0 {
                push(blank - 1);
            }
            if c < 2 {
                push(blank + 1);
            }
        }
        assert_eq!(dist.len(), 181_440);
        dist
    })
}

/// Oracle distance of a state from the canonical solved configuration.
pub fn stp3_oracle_dist(state: &StpState) -> u32 {
    stp3_bfs_oracle()[&state.tiles]
}

/// Manhattan-distance heuristic for the sliding-tile puzzle: the sum over
/// non-blank tiles of the taxicab distance from each tile's position to
/// its position in the goal. Consistent and admissible for unit costs.
pub fn stp_manhattan(n: usize, s: &StpState, g: &StpGoal) -> f64 {
    let mut goal_pos = vec![0usize; n * n];
    for (cell, &t) in g.target.iter().enumerate() {
        goal_pos[t as usize] = cell;
    }
    let mut total = 0usize;
    for (cell, &t) in s.tiles.iter().enumerate() {
        if t == 0 {
            continue;
        }
        let want = goal_pos[t as usize];
        total += (cell / n).abs_diff(want / n) + (cell % n).abs_diff(want % n);
    }
    total as f64
}

/// Textbook Dijkstra from `start` over a grid domain; returns the cheapest
/// path cost to every reachable cell.
pub fn grid_dijkstra(domain: &GridDomain, start: GridState) -> HashMap<GridState, f64> {
    #[derive(PartialEq)]
    struct Entry(f64, GridState);
    impl Eq for Entry {}
    impl PartialOrd for Entry {
        fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
            Some(self.cmp(other))
        }
    }
    impl Ord for Entry {
        fn cmp(&self, other: &Self) -> std::cmp::Ordering {
            other.0.total_cmp(&self.0)
        }
    }

    let mut dist: HashMap<GridState, f64> = HashMap::new();
    dist.insert(start, 0.0);
    let mut heap = BinaryHeap::new();
    heap.push(Entry(0.0, start));
    while let Some(Entry(d, cell)) = heap.pop() {
        if d > dist[&cell] {
            continue;
        }
        for action in domain.actions(&cell) {
            let tr = domain.next_state(&cell, &action).unwrap();
            let nd = d + tr.cost;
            if dist
                .get(&tr.next_state)
                .is_none_or(|&best| nd < best)
            {
                dist.insert(tr.next_state, nd);
                heap.push(Entry(nd, tr.next_state));
            }
        }
    }
    dist
}

/// Independent scalar MLP forward pass (rectifier hidden layers, linear
/// output) over the flat layer-major parameter layout, all in f64.
pub fn scalar_mlp_forward(sizes: &[usize], params: &[f64], input: &[f64]) -> Vec<f64> {
    let mut activations: Vec<f64> = input.to_vec();
    let mut off = 0;
    for (layer, w) in sizes.windows(2).enumerate() {
        let (fan_in, fan_out) = (w[0], w[1]);
        let weights = &params[off..off + fan_in * fan_out];
        off += fan_in * fan_out;
        let biases = &params[off..off + fan_out];
        off += fan_out;
        let mut next = vec![0.0; fan_out];
        for (o, out) in next.iter_mut().enumerate() {
            let mut z = biases[o];
            for (i, &a) in activations.iter().enumerate() {
                z += weights[o * fan_in + i] * a;
            }
            *out = if layer + 2 < sizes.len() { z.max(0.0) } else { z };
        }
        activations = next;
    }
    activations
}

/// Batch mean-squared-error loss of the scalar forward pass.
pub fn scalar_mlp_loss(
    sizes: &[usize],
    params: &[f64],
    inputs: &[Vec<f64>],
    targets: &[f64],
    actions: Option<&[usize]>,
) -> f64 {
    let mut loss = 0.0;
    for (i, x) in inputs.iter().enumerate() {
        let out = scalar_mlp_forward(sizes, params, x);
        let col = actions.map_or(0, |a| a[i]);
        let r = out[col] - targets[i];
        loss += r * r;
    }
    loss / inputs.len() as f64
}

/// Central-difference gradient of `scalar_mlp_loss` with respect to every
/// parameter.
pub fn fd_gradient(
    sizes: &[usize],
    params: &[f64],
    inputs: &[Vec<f64>],
    targets: &[f64],
    actions: Option<&[usize]>,
    step: f64,
) -> Vec<f64> {
    let mut grad = vec![0.0; params.len()];
    let mut work = params.to_vec();
    for i in 0..params.len() {
        work[i] = params[i] + step;
        let plus = scalar_mlp_loss(sizes, &work, inputs, targets, actions);
        work[i] = params[i] - step;
        let minus = scalar_mlp_loss(sizes, &work, inputs, targets, actions);
        work[i] = params[i];
        grad[i] = (plus - minus) / (2.0 * step);
    }
    grad
}

/// Finite differences are only a valid derivative oracle when no hidden
/// pre-activation sits within the perturbation's reach of the rectifier
/// kink at zero. Returns the smallest hidden-layer `|z|` over all samples
/// and the largest absolute activation (which bounds how far a parameter
/// step of `h` can move any `z`).
pub fn relu_kink_margin(sizes: &[usize], params: &[f64], inputs: &[Vec<f64>]) -> (f64, f64) {
    let mut min_z: f64 = f64::INFINITY;
    let mut max_act: f64 = 1.0;
    for input in inputs {
        let mut activations: Vec<f64> = input.clone();
        max_act = activations.iter().fold(max_act, |m, &a| m.max(a.abs()));
        let mut off = 0;
        for (layer, w) in sizes.windows(2).enumerate() {
            let (fan_in, fan_out) = (w[0], w[1]);
            let weights = &params[off..off + fan_in * fan_out];
            off += fan_in * fan_out;
            let biases = &params[off..off + fan_out];
            off += fan_out;
            let mut next = vec![0.0; fan_out];
            for (o, out) in next.iter_mut().enumerate() {
                let mut z = biases[o];
                for (i, &a) in activations.iter().enumerate() {
                    z += weights[o * fan_in + i] * a;
                }
                if layer + 2 < sizes.len() {
                    min_z = min_z.min(z.abs());
                    *out = z.max(0.0);
                } else {
                    *out = z;
                }
            }
            activations = next;
            max_act = activations.iter().fold(max_act, |m, &a| m.max(a.abs()));
        }
    }
    (min_z, max_act)
}

/// Norm-wise relative error between two gradients.
pub fn grad_relative_error(a: &[f64], b: &[f64]) -> f64 {
    let diff: f64 = a
        .iter()
        .zip(b)
        .map(|(x, y)| (x - y) * (x - y))
        .sum::<f64>()
        .sqrt();
    let na: f64 = a.iter().map(|x| x * x).sum::<f64>().sqrt();
    let nb: f64 = b.iter().map(|x| x * x).sum::<f64>().sqrt();
    diff / na.max(nb).max(1e-12)
}

/// Naive recursive Bellman backup over a search tree: the independent
/// oracle for the iterative implementation.
pub fn naive_tree_backup<D: Domain + ?Sized>(
    domain: &D,
    tree: &SearchTree<D::State, D::Action>,
    goal: &D::Goal,
    leaf_values: &HashMap<usize, f64>,
) -> Vec<f64> {
    fn value<D: Domain + ?Sized>(
        domain: &D,
        tree: &SearchTree<D::State, D::Action>,
        goal: &D::Goal,
        leaf_values: &HashMap<usize, f64>,
        children: &[Vec<usize>],
        id: usize,
    ) -> f64 {
        if domain.is_solved(&tree.nodes[id].state, goal) {
            return 0.0;
        }
        if children[id].is_empty() {
            return leaf_values[&id];
        }
        children[id]
            .iter()
            .map(|&c| {
                tree.nodes[c].cost_from_parent
                    + value(domain, tree, goal, leaf_values, children, c)
            })
            .fold(f64::INFINITY, f64::min)
    }
    let children = tree.children_map();
    (0..tree.len())
        .map(|id| value(domain, tree, goal, leaf_values, &children, id))
        .collect()
}

/// Gradient check over `count` random kink-safe networks: returns the
/// worst norm-wise relative error between backpropagation and central
/// finite differences. Configurations where a parameter step of `step`
/// could move a hidden pre-activation across the rectifier kink are
/// skipped, since finite differences are not a valid derivative oracle
/// there.
pub fn gradcheck_random_nets(count: usize, step: f64) -> f64 {
    use rand::{Rng, SeedableRng};
    let mut worst: f64 = 0.0;
    let mut accepted = 0usize;
    let mut seed = 0u64;
    while accepted < count {
        seed += 1;
        let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
        let n_hidden = rng.random_range(1..=2);
        let mut sizes = vec![rng.random_range(2..8)];
        for _ in 0..n_hidden {
            sizes.push(rng.random_range(2..16));
        }
        let q_head = rng.random_bool(0.5);
        let out_dim = if q_head { rng.random_range(2..5) } else { 1 };
        sizes.push(out_dim);

        let spec = xube::nnet::MlpSpec::new(sizes.clone()).unwrap();
        let mlp = xube::nnet::Mlp::new(spec, seed.wrapping_mul(77).wrapping_add(5));
        let n = rng.random_range(1..12);
        let inputs: Vec<Vec<f64>> = (0..n)
            .map(|_| {
                (0..sizes[0])
                    .map(|_| f64::from(rng.random_range(-1.0f32..1.0)))
                    .collect()
            })
            .collect();
        let targets: Vec<f64> = (0..n).map(|_| rng.random_range(-3.0..3.0)).collect();
        let actions: Option<Vec<usize>> = if q_head {
            Some((0..n).map(|_| rng.random_range(0..out_dim)).collect())
        } else {
            None
        };

        let params: Vec<f64> = mlp.params().iter().map(|&p| f64::from(p)).collect();
        let (min_z, max_act) = relu_kink_margin(&sizes, &params, &inputs);
        if min_z <= 4.0 * step * max_act.max(1.0) {
            continue;
        }

        let mut matrix = ndarray::Array2::<f32>::zeros((n, sizes[0]));
        for (i, row) in inputs.iter().enumerate() {
            for (j, &v) in row.iter().enumerate() {
                matrix[[i, j]] = v as f32;
            }
        }
        let (_, grad) = mlp
            .mse_loss_and_grad(matrix.view(), &targets, actions.as_deref())
            .unwrap();
        let grad: Vec<f64> = grad.iter().map(|&g| f64::from(g)).collect();
        let fd = fd_gradient(&sizes, &params, &inputs, &targets, actions.as_deref(), step);
        worst = worst.max(grad_relative_error(&grad, &fd));
        accepted += 1;
    }
    worst
}

/// A minimal one-way chain domain with no optional capabilities beyond
/// action enumeration; used to exercise capability-error paths.
pub struct BareChain {
    pub len: usize,
}

impl Domain for BareChain {
    type State = usize;
    type Action = usize;
    type Goal = usize;

    fn samp_start_state(&self, _rng: &mut dyn rand::RngCore) -> usize {
        0
    }

    fn samp_prob_insts(
        &self,
        ks: &[usize],
        _rng: &mut dyn rand::RngCore,
    ) -> Result<Vec<xube::domain::ProblemInstance<usize, usize>>, xube::domain::DomainError> {
        Ok(ks
            .iter()
            .map(|&k| xube::domain::ProblemInstance {
                start: 0,
                goal: k.min(self.len - 1),
                gen_steps: k,
            })
            .collect())
    }

    fn samp_state_act(
        &self,
        s: &usize,
        rng: &mut dyn rand::RngCore,
    ) -> Result<usize, xube::domain::DomainError> {
        xube::domain::samp_act_uniform(self, s, rng)
    }

    fn next_state(
        &self,
        s: &usize,
        a: &usize,
    ) -> Result<xube::domain::Transition<usize>, xube::domain::DomainError> {
        if *a == 0 && s + 1 < self.len {
            Ok(xube::domain::Transition {
                next_state: s + 1,
                cost: 1.0,
            })
        } else {
            Err(xube::domain::DomainError::InvalidAction {
                action: a.to_string(),
                state: s.to_string(),
            })
        }
    }

    fn is_solved(&self, s: &usize, g: &usize) -> bool {
        s == g
    }

    fn acts_enum(&self) -> Option<xube::domain::DynActsEnum<'_, Self>> {
        Some(self)
    }
}

impl ActsEnum for BareChain {
    fn actions(&self, s: &usize) -> Vec<usize> {
        if s + 1 < self.len {
            vec![0]
        } else {
            Vec::new()
        }
    }
}

/// Seeded 8-puzzle instances from reverse walks with lengths uniform in
/// `1..=k_cap`.
pub fn stp3_instances(
    domain: &SlidingTileDomain,
    count: usize,
    k_cap: usize,
    seed: u64,
) -> Vec<xube::domain::ProblemInstance<StpState, StpGoal>> {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha12Rng::seed_from_u64(seed);
    let ks: Vec<usize> = xube::domain::sample_ks(k_cap - 1, count, &mut rng)
        .into_iter()
        .map(|k| k + 1)
        .collect();
    xube::domain::gen_prob_insts_reverse(domain, &ks, &mut rng).unwrap()
}
