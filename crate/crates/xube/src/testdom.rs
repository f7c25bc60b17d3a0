//! Tiny hand-built domains for unit tests.

use rand::RngCore;

use crate::domain::{
    samp_act_uniform, ActsEnum, Domain, DomainError, DynActsEnum, DynFixedActsEnum,
    DynGoalSampleable, FixedActsEnum, GoalSampleableFromState, ProblemInstance, Transition,
};

/// An explicit weighted digraph: states are node indices, actions are
/// outgoing-edge indices, the goal is a target node.
pub struct GraphDomain {
    pub adj: Vec<Vec<(usize, f64)>>,
}

impl Domain for GraphDomain {
    type State = usize;
    type Action = usize;
    type Goal = usize;

    fn samp_start_state(&self, _rng: &mut dyn RngCore) -> usize {
        0
    }

    fn samp_prob_insts(
        &self,
        ks: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<ProblemInstance<usize, usize>>, DomainError> {
        Ok(ks
            .iter()
            .map(|&k| ProblemInstance {
                start: 0,
                goal: self.adj.len() - 1,
                gen_steps: k,
            })
            .collect())
    }

    fn samp_state_act(&self, s: &usize, rng: &mut dyn RngCore) -> Result<usize, DomainError> {
        samp_act_uniform(self, s, rng)
    }

    fn next_state(&self, s: &usize, a: &usize) -> Result<Transition<usize>, DomainError> {
        let (next, cost) = *self
            .adj
            .get(*s)
            .and_then(|edges| edges.get(*a))
            .ok_or_else(|| DomainError::InvalidAction {
                action: a.to_string(),
                state: s.to_string(),
            })?;
        Ok(Transition {
            next_state: next,
            cost,
        })
    }

    fn is_solved(&self, s: &usize, g: &usize) -> bool {
        s == g
    }

    fn acts_enum(&self) -> Option<DynActsEnum<'_, Self>> {
        Some(self)
    }

    fn fixed_acts_enum(&self) -> Option<DynFixedActsEnum<'_, Self>> {
        Some(self)
    }

    fn goal_sampleable(&self) -> Option<DynGoalSampleable<'_, Self>> {
        Some(self)
    }
}

impl ActsEnum for GraphDomain {
    fn actions(&self, s: &usize) -> Vec<usize> {
        (0..self.adj[*s].len()).collect()
    }
}

impl FixedActsEnum for GraphDomain {
    fn all_actions(&self) -> Vec<usize> {
        let max_degree = self.adj.iter().map(Vec::len).max().unwrap_or(0);
        (0..max_degree).collect()
    }
}

impl GoalSampleableFromState for GraphDomain {
    fn samp_goal_from_state(&self, s: &usize, _rng: &mut dyn RngCore) -> usize {
        *s
    }
}

/// A one-way chain `0 -> 1 -> ... -> len - 1`; the last state is a dead end.
pub struct OneWayChain {
    pub len: usize,
}

impl Domain for OneWayChain {
    type State = usize;
    type Action = usize;
    type Goal = usize;

    fn samp_start_state(&self, _rng: &mut dyn RngCore) -> usize {
        0
    }

    fn samp_prob_insts(
        &self,
        ks: &[usize],
        _rng: &mut dyn RngCore,
    ) -> Result<Vec<ProblemInstance<usize, usize>>, DomainError> {
        Ok(ks
            .iter()
            .map(|&k| ProblemInstance {
                start: 0,
                goal: k.min(self.len - 1),
                gen_steps: k,
            })
            .collect())
    }

    fn samp_state_act(&self, s: &usize, _rng: &mut dyn RngCore) -> Result<usize, DomainError> {
        if s + 1 < self.len {
            Ok(0)
        } else {
            Err(DomainError::DeadEnd)
        }
    }

    fn next_state(&self, s: &usize, a: &usize) -> Result<Transition<usize>, DomainError> {
        if *a == 0 && s + 1 < self.len {
            Ok(Transition {
                next_state: s + 1,
                cost: 1.0,
            })
        } else {
            Err(DomainError::InvalidAction {
                action: a.to_string(),
                state: s.to_string(),
            })
        }
    }

    fn is_solved(&self, s: &usize, g: &usize) -> bool {
        s == g
    }

    fn acts_enum(&self) -> Option<DynActsEnum<'_, Self>> {
        Some(self)
    }
}

impl ActsEnum for OneWayChain {
    fn actions(&self, s: &usize) -> Vec<usize> {
        if s + 1 < self.len {
            vec![0]
        } else {
            Vec::new()
        }
    }
}
