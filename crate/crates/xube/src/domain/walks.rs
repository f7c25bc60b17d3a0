//! Random walks and walk-based problem-instance generation.

use rand::{Rng, RngCore};

use super::{
    Domain, DomainError, GoalSampleableFromState, ProblemInstance, ReverseWalkable,
};

/// A recorded random walk: `states` has one more entry than `actions`,
/// and `costs[i]` is the cost of the step `states[i] -> states[i + 1]`.
#[derive(Debug, Clone)]
pub struct WalkRecord<S, A> {
    pub states: Vec<S>,
    pub actions: Vec<A>,
    pub costs: Vec<f64>,
}

impl<S, A> WalkRecord<S, A> {
    /// Number of steps actually taken.
    pub fn len(&self) -> usize {
        self.actions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.actions.is_empty()
    }

    pub fn total_cost(&self) -> f64 {
        self.costs.iter().sum()
    }

    pub fn terminal(&self) -> &S {
        self.states.last().expect("walk has at least the start state")
    }
}

/// Take a random walk of up to `steps` steps from `s`, sampling actions
/// with `samp_state_act`. A dead-end state terminates the walk early; the
/// record carries the actual length.
pub fn random_walk<D: Domain + ?Sized>(
    domain: &D,
    s: &D::State,
    steps: usize,
    rng: &mut dyn RngCore,
) -> Result<WalkRecord<D::State, D::Action>, DomainError> {
    let mut states = Vec::with_capacity(steps + 1);
    let mut actions = Vec::with_capacity(steps);
    let mut costs = Vec::with_capacity(steps);
    states.push(s.clone());
    for _ in 0..steps {
        let cur = states.last().expect("nonempty");
        let act = match domain.samp_state_act(cur, rng) {
            Ok(a) => a,
            Err(DomainError::DeadEnd) => break,
            Err(e) => return Err(e),
        };
        let tr = domain.next_state(cur, &act)?;
        states.push(tr.next_state);
        costs.push(tr.cost);
        actions.push(act);
    }
    Ok(WalkRecord {
        states,
        actions,
        costs,
    })
}

/// Generate problem instances by sampling a start state, walking `ks[i]`
/// steps, and sampling a goal from the terminal state.
pub fn gen_prob_insts_forward<D>(
    domain: &D,
    ks: &[usize],
    rng: &mut dyn RngCore,
) -> Result<Vec<ProblemInstance<D::State, D::Goal>>, DomainError>
where
    D: GoalSampleableFromState + ?Sized,
{
    let mut insts = Vec::with_capacity(ks.len());
    for &k in ks {
        let start = domain.samp_start_state(rng);
        let walk = random_walk(domain, &start, k, rng)?;
        let goal = domain.samp_goal_from_state(walk.terminal(), rng);
        insts.push(ProblemInstance {
            start,
            goal,
            gen_steps: walk.len(),
        });
    }
    Ok(insts)
}

/// Generate problem instances by sampling a goal state plus goal and
/// walking `ks[i]` steps in reverse; the terminal state becomes the start.
pub fn gen_prob_insts_reverse<D>(
    domain: &D,
    ks: &[usize],
    rng: &mut dyn RngCore,
) -> Result<Vec<ProblemInstance<D::State, D::Goal>>, DomainError>
where
    D: ReverseWalkable + ?Sized,
{
    let mut insts = Vec::with_capacity(ks.len());
    for &k in ks {
        let (goal_state, goal) = domain.samp_goal_state_and_goal(rng);
        let mut cur = goal_state;
        let mut taken = 0;
        for _ in 0..k {
            match domain.reverse_step(&cur, rng) {
                Ok(step) => {
                    cur = step.pred;
                    taken += 1;
                }
                Err(DomainError::DeadEnd) => break,
                Err(e) => return Err(e),
            }
        }
        insts.push(ProblemInstance {
            start: cur,
            goal,
            gen_steps: taken,
        });
    }
    Ok(insts)
}

/// Draw `count` walk lengths uniformly from `{0, 1, ..., k_max}` inclusive.
pub fn sample_ks(k_max: usize, count: usize, rng: &mut dyn RngCore) -> Vec<usize> {
    (0..count).map(|_| rng.random_range(0..=k_max)).collect()
}
