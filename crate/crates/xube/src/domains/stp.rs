//! The n x n sliding-tile puzzle (8-puzzle, 15-puzzle).
//!
//! Tiles are a permutation of `{0 .. n^2 - 1}` stored row-major, with 0 as
//! the blank. Actions move the blank; every transition costs 1. Problem
//! instances are generated with reverse walks from the canonical solved
//! permutation `[0, 1, ..., n^2 - 1]`.

use std::fmt;

use rand::seq::SliceRandom;
use rand::RngCore;

use crate::domain::{
    gen_prob_insts_reverse, samp_act_uniform, ActsEnum, BatchedTransition, Domain, DomainError,
    DynActsEnum, DynBatchedTransition, DynFixedActsEnum, DynGoalSampleable, DynRenderable,
    DynReverseWalkable, DynStringToAct, FixedActsEnum, FlatStates, GoalSampleableFromState,
    ProblemInstance, Renderable, ReverseStep, ReverseWalkable, StringToAct, Transition,
};
use crate::encode::Encoder;

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StpState {
    pub tiles: Vec<u8>,
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StpGoal {
    pub target: Vec<u8>,
}

/// Directions move the blank: `Up` swaps the blank with the tile above it.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum StpAction {
    Up,
    Down,
    Left,
    Right,
}

impl StpAction {
    pub const ALL: [StpAction; 4] = [
        StpAction::Up,
        StpAction::Down,
        StpAction::Left,
        StpAction::Right,
    ];

    pub fn inverse(self) -> StpAction {
        match self {
            StpAction::Up => StpAction::Down,
            StpAction::Down => StpAction::Up,
            StpAction::Left => StpAction::Right,
            StpAction::Right => StpAction::Left,
        }
    }
}

impl fmt::Display for StpAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            StpAction::Up => "U",
            StpAction::Down => "D",
            StpAction::Left => "L",
            StpAction::Right => "R",
        };
        f.write_str(c)
    }
}

pub struct SlidingTileDomain {
    n: usize,
}

impl SlidingTileDomain {
    /// Side lengths 3 and 4 are supported.
    pub fn new(n: usize) -> Result<Self, DomainError> {
        if n != 3 && n != 4 {
            return Err(DomainError::Unsupported(format!(
                "sliding-tile side length {n} (expected 3 or 4)"
            )));
        }
        Ok(SlidingTileDomain { n })
    }

    pub fn side(&self) -> usize {
        self.n
    }

    pub fn cells(&self) -> usize {
        self.n * self.n
    }

    /// The canonical solved permutation `[0, 1, ..., n^2 - 1]`.
    pub fn solved_state(&self) -> StpState {
        StpState {
            tiles: (0..self.cells() as u8).collect(),
        }
    }

    fn blank_pos(&self, tiles: &[u8]) -> usize {
        tiles.iter().position(|&t| t == 0).expect("one blank tile")
    }

    fn blank_dest(&self, blank: usize, act: StpAction) -> Option<usize> {
        let n = self.n;
        let (r, c) = (blank / n, blank % n);
        match act {
            StpAction::Up if r > 0 => Some(blank - n),
            StpAction::Down if r + 1 < n => Some(blank + n),
            StpAction::Left if c > 0 => Some(blank - 1),
            StpAction::Right if c + 1 < n => Some(blank + 1),
            _ => None,
        }
    }

    /// Reachability from the canonical solved state: permutation parity
    /// must match the parity of the blank's taxicab offset from cell 0.
    pub fn is_solvable(&self, s: &StpState) -> bool {
        let tiles = &s.tiles;
        let mut inversions = 0usize;
        for i in 0..tiles.len() {
            for j in (i + 1)..tiles.len() {
                if tiles[i] > tiles[j] {
                    inversions += 1;
                }
            }
        }
        let blank = self.blank_pos(tiles);
        let (r, c) = (blank / self.n, blank % self.n);
        inversions % 2 == (r + c) % 2
    }
}

impl Domain for SlidingTileDomain {
    type State = StpState;
    type Action = StpAction;
    type Goal = StpGoal;

    fn samp_start_state(&self, rng: &mut dyn RngCore) -> StpState {
        let mut tiles: Vec<u8> = (0..self.cells() as u8).collect();
        tiles.shuffle(rng);
        let mut state = StpState { tiles };
        if !self.is_solvable(&state) {
            // Swapping two non-blank tiles flips permutation parity.
            let (i, j) = {
                let mut it = (0..state.tiles.len()).filter(|&i| state.tiles[i] != 0);
                (it.next().unwrap(), it.next().unwrap())
            };
            state.tiles.swap(i, j);
        }
        state
    }

    fn samp_prob_insts(
        &self,
        ks: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<ProblemInstance<StpState, StpGoal>>, DomainError> {
        gen_prob_insts_reverse(self, ks, rng)
    }

    fn samp_state_act(
        &self,
        s: &StpState,
        rng: &mut dyn RngCore,
    ) -> Result<StpAction, DomainError> {
        samp_act_uniform(self, s, rng)
    }

    fn next_state(
        &self,
        s: &StpState,
        a: &StpAction,
    ) -> Result<Transition<StpState>, DomainError> {
        let blank = self.blank_pos(&s.tiles);
        let dest = self
            .blank_dest(blank, *a)
            .ok_or_else(|| DomainError::InvalidAction {
                action: a.to_string(),
                state: self.state_to_text(s),
            })?;
        let mut tiles = s.tiles.clone();
        tiles.swap(blank, dest);
        Ok(Transition {
            next_state: StpState { tiles },
            cost: 1.0,
        })
    }

    fn is_solved(&self, s: &StpState, g: &StpGoal) -> bool {
        s.tiles == g.target
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

    fn reverse_walkable(&self) -> Option<DynReverseWalkable<'_, Self>> {
        Some(self)
    }

    fn string_to_act(&self) -> Option<DynStringToAct<'_, Self>> {
        Some(self)
    }

    fn renderable(&self) -> Option<DynRenderable<'_, Self>> {
        Some(self)
    }

    fn batched_transition(&self) -> Option<DynBatchedTransition<'_, Self>> {
        Some(self)
    }
}

impl ActsEnum for SlidingTileDomain {
    fn actions(&self, s: &StpState) -> Vec<StpAction> {
        let blank = self.blank_pos(&s.tiles);
        StpAction::ALL
            .into_iter()
            .filter(|&a| self.blank_dest(blank, a).is_some())
            .collect()
    }
}

impl FixedActsEnum for SlidingTileDomain {
    fn all_actions(&self) -> Vec<StpAction> {
        StpAction::ALL.to_vec()
    }
}

impl GoalSampleableFromState for SlidingTileDomain {
    fn samp_goal_from_state(&self, s: &StpState, _rng: &mut dyn RngCore) -> StpGoal {
        StpGoal {
            target: s.tiles.clone(),
        }
    }
}

impl ReverseWalkable for SlidingTileDomain {
    fn samp_goal_state_and_goal(&self, _rng: &mut dyn RngCore) -> (StpState, StpGoal) {
        let solved = self.solved_state();
        let goal = StpGoal {
            target: solved.tiles.clone(),
        };
        (solved, goal)
    }

    fn reverse_step(
        &self,
        s: &StpState,
        rng: &mut dyn RngCore,
    ) -> Result<ReverseStep<StpState, StpAction>, DomainError> {
        // Moves are self-inverse pairs, so a predecessor is any forward
        // neighbor, reached back via the inverse action.
        let act = self.samp_state_act(s, rng)?;
        let tr = self.next_state(s, &act)?;
        Ok(ReverseStep {
            pred: tr.next_state,
            action: act.inverse(),
            cost: 1.0,
        })
    }
}

impl StringToAct for SlidingTileDomain {
    fn parse_action(&self, text: &str) -> Result<StpAction, DomainError> {
        match text.trim().to_ascii_uppercase().as_str() {
            "U" | "UP" => Ok(StpAction::Up),
            "D" | "DOWN" => Ok(StpAction::Down),
            "L" | "LEFT" => Ok(StpAction::Left),
            "R" | "RIGHT" => Ok(StpAction::Right),
            other => Err(DomainError::Parse(format!("unknown action `{other}`"))),
        }
    }
}

impl Renderable for SlidingTileDomain {
    fn state_to_text(&self, s: &StpState) -> String {
        let parts: Vec<String> = s.tiles.iter().map(|t| t.to_string()).collect();
        parts.join(" ")
    }

    fn text_to_state(&self, text: &str) -> Result<StpState, DomainError> {
        let tiles = parse_tiles(text, self.cells())?;
        Ok(StpState { tiles })
    }

    fn goal_to_text(&self, g: &StpGoal) -> String {
        let parts: Vec<String> = g.target.iter().map(|t| t.to_string()).collect();
        parts.join(" ")
    }

    fn text_to_goal(&self, text: &str) -> Result<StpGoal, DomainError> {
        let target = parse_tiles(text, self.cells())?;
        Ok(StpGoal { target })
    }

    fn render_state(&self, s: &StpState) -> String {
        render_board(&s.tiles, self.n)
    }

    fn render_goal(&self, g: &StpGoal) -> String {
        render_board(&g.target, self.n)
    }
}

impl BatchedTransition for SlidingTileDomain {
    fn encode_states(&self, states: &[StpState]) -> FlatStates {
        let width = self.cells();
        let mut data = Vec::with_capacity(states.len() * width);
        for s in states {
            data.extend(s.tiles.iter().map(|&t| t as i64));
        }
        FlatStates { data, width }
    }

    fn decode_states(&self, flat: &FlatStates) -> Vec<StpState> {
        (0..flat.rows())
            .map(|i| StpState {
                tiles: flat.row(i).iter().map(|&t| t as u8).collect(),
            })
            .collect()
    }

    fn step_batch(
        &self,
        flat: &mut FlatStates,
        actions: &[StpAction],
    ) -> Result<Vec<f64>, DomainError> {
        let mut costs = Vec::with_capacity(actions.len());
        for (i, &act) in actions.iter().enumerate() {
            let row = flat.row_mut(i);
            let blank = row.iter().position(|&t| t == 0).expect("one blank tile");
            let dest = self
                .blank_dest(blank, act)
                .ok_or_else(|| DomainError::InvalidAction {
                    action: act.to_string(),
                    state: format!("row {i}"),
                })?;
            row.swap(blank, dest);
            costs.push(1.0);
        }
        Ok(costs)
    }
}

fn parse_tiles(text: &str, cells: usize) -> Result<Vec<u8>, DomainError> {
    let tiles: Vec<u8> = text
        .split_whitespace()
        .map(|tok| {
            tok.parse::<u8>()
                .map_err(|_| DomainError::Parse(format!("bad tile `{tok}`")))
        })
        .collect::<Result<_, _>>()?;
    if tiles.len() != cells {
        return Err(DomainError::Parse(format!(
            "expected {cells} tiles, got {}",
            tiles.len()
        )));
    }
    let mut seen = vec![false; cells];
    for &t in &tiles {
        if (t as usize) >= cells || seen[t as usize] {
            return Err(DomainError::Parse("tiles are not a permutation".to_string()));
        }
        seen[t as usize] = true;
    }
    Ok(tiles)
}

fn render_board(tiles: &[u8], n: usize) -> String {
    let mut out = String::new();
    for r in 0..n {
        for c in 0..n {
            let t = tiles[r * n + c];
            if t == 0 {
                out.push_str("  .");
            } else {
                out.push_str(&format!("{t:>3}"));
            }
        }
        out.push('\n');
    }
    out
}

/// One-hot tile identity per cell for state and goal concatenated:
/// width `2 * n^4` (n^2 cells x n^2 tile ids, twice).
pub struct StpOneHotEncoder {
    cells: usize,
}

impl StpOneHotEncoder {
    pub fn new(domain: &SlidingTileDomain) -> Self {
        StpOneHotEncoder {
            cells: domain.cells(),
        }
    }
}

impl Encoder<StpState, StpGoal> for StpOneHotEncoder {
    fn dim(&self) -> usize {
        2 * self.cells * self.cells
    }

    fn encode_into(&self, s: &StpState, g: &StpGoal, out: &mut [f32]) {
        debug_assert_eq!(out.len(), self.dim());
        out.fill(0.0);
        let half = self.cells * self.cells;
        for (cell, &t) in s.tiles.iter().enumerate() {
            out[cell * self.cells + t as usize] = 1.0;
        }
        for (cell, &t) in g.target.iter().enumerate() {
            out[half + cell * self.cells + t as usize] = 1.0;
        }
    }
}
