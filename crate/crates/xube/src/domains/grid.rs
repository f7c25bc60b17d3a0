//! Weighted-grid navigation: 4-connected moves on a W x H grid with an
//! obstacle mask and per-cell terrain weights >= 1. The cost of a move is
//! the terrain weight of the destination cell, so the domain exercises
//! non-unit transition costs. Instances are generated with forward walks.

use std::fmt;

use rand::seq::IndexedRandom;
use rand::{Rng, RngCore, SeedableRng};
use rand_chacha::ChaCha12Rng;

use crate::domain::{
    gen_prob_insts_forward, samp_act_uniform, ActsEnum, Domain, DomainError, DynActsEnum,
    DynFixedActsEnum, DynGoalSampleable, DynRenderable, DynStringToAct, FixedActsEnum,
    GoalSampleableFromState, ProblemInstance, Renderable, StringToAct, Transition,
};
use crate::encode::Encoder;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridState {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct GridGoal {
    pub row: usize,
    pub col: usize,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum GridAction {
    Up,
    Down,
    Left,
    Right,
}

impl GridAction {
    pub const ALL: [GridAction; 4] = [
        GridAction::Up,
        GridAction::Down,
        GridAction::Left,
        GridAction::Right,
    ];
}

impl fmt::Display for GridAction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let c = match self {
            GridAction::Up => "U",
            GridAction::Down => "D",
            GridAction::Left => "L",
            GridAction::Right => "R",
        };
        f.write_str(c)
    }
}

pub struct GridDomain {
    width: usize,
    height: usize,
    obstacles: Vec<bool>,
    weights: Vec<u32>,
    free_cells: Vec<GridState>,
    max_weight: u32,
}

impl GridDomain {
    /// Build a random grid. Obstacles are drawn per cell with probability
    /// `obstacle_density` and terrain weights uniformly from
    /// `1..=max_terrain_weight`, all from a generator seeded with `seed`,
    /// so a `(dimensions, density, max weight, seed)` tuple names one
    /// concrete map.
    pub fn new(
        width: usize,
        height: usize,
        obstacle_density: f64,
        max_terrain_weight: u32,
        seed: u64,
    ) -> Result<Self, DomainError> {
        if width < 2 || height < 2 {
            return Err(DomainError::Unsupported(format!(
                "grid dimensions {width}x{height} (both sides must be >= 2)"
            )));
        }
        if !(0.0..=0.4).contains(&obstacle_density) {
            return Err(DomainError::Unsupported(format!(
                "obstacle density {obstacle_density} outside [0, 0.4]"
            )));
        }
        if max_terrain_weight < 1 {
            return Err(DomainError::Unsupported(
                "max terrain weight must be >= 1".to_string(),
            ));
        }
        let mut rng = ChaCha12Rng::seed_from_u64(seed);
        let cells = width * height;
        let obstacles: Vec<bool> = (0..cells)
            .map(|_| rng.random::<f64>() < obstacle_density)
            .collect();
        let weights: Vec<u32> = (0..cells)
            .map(|_| rng.random_range(1..=max_terrain_weight))
            .collect();
        let free_cells: Vec<GridState> = (0..cells)
            .filter(|&i| !obstacles[i])
            .map(|i| GridState {
                row: i / width,
                col: i % width,
            })
            .collect();
        if free_cells.is_empty() {
            return Err(DomainError::Unsupported(
                "degenerate grid: no free cells".to_string(),
            ));
        }
        Ok(GridDomain {
            width,
            height,
            obstacles,
            weights,
            free_cells,
            max_weight: max_terrain_weight,
        })
    }

    pub fn width(&self) -> usize {
        self.width
    }

    pub fn height(&self) -> usize {
        self.height
    }

    pub fn free_cells(&self) -> &[GridState] {
        &self.free_cells
    }

    fn idx(&self, row: usize, col: usize) -> usize {
        row * self.width + col
    }

    pub fn is_free(&self, row: usize, col: usize) -> bool {
        row < self.height && col < self.width && !self.obstacles[self.idx(row, col)]
    }

    pub fn weight(&self, row: usize, col: usize) -> u32 {
        self.weights[self.idx(row, col)]
    }

    fn dest(&self, s: &GridState, a: GridAction) -> Option<GridState> {
        let (r, c) = (s.row, s.col);
        let (nr, nc) = match a {
            GridAction::Up => (r.checked_sub(1)?, c),
            GridAction::Down => (r + 1, c),
            GridAction::Left => (r, c.checked_sub(1)?),
            GridAction::Right => (r, c + 1),
        };
        if self.is_free(nr, nc) {
            Some(GridState { row: nr, col: nc })
        } else {
            None
        }
    }

    fn parse_cell(&self, text: &str) -> Result<(usize, usize), DomainError> {
        let (r, c) = text
            .trim()
            .split_once(',')
            .ok_or_else(|| DomainError::Parse(format!("expected `row,col`, got `{text}`")))?;
        let row: usize = r
            .trim()
            .parse()
            .map_err(|_| DomainError::Parse(format!("bad row `{r}`")))?;
        let col: usize = c
            .trim()
            .parse()
            .map_err(|_| DomainError::Parse(format!("bad col `{c}`")))?;
        if !self.is_free(row, col) {
            return Err(DomainError::Parse(format!(
                "cell {row},{col} is out of bounds or an obstacle"
            )));
        }
        Ok((row, col))
    }

    fn render_map(&self, mark_s: Option<GridState>, mark_g: Option<(usize, usize)>) -> String {
        let mut out = String::new();
        for r in 0..self.height {
            for c in 0..self.width {
                if mark_s.is_some_and(|s| s.row == r && s.col == c) {
                    out.push('S');
                } else if mark_g.is_some_and(|(gr, gc)| gr == r && gc == c) {
                    out.push('G');
                } else if self.obstacles[self.idx(r, c)] {
                    out.push('#');
                } else {
                    out.push(
                        char::from_digit(self.weights[self.idx(r, c)].min(9), 10).unwrap(),
                    );
                }
            }
            out.push('\n');
        }
        out
    }
}

impl Domain for GridDomain {
    type State = GridState;
    type Action = GridAction;
    type Goal = GridGoal;

    fn samp_start_state(&self, rng: &mut dyn RngCore) -> GridState {
        *self.free_cells.choose(rng).expect("grid has free cells")
    }

    fn samp_prob_insts(
        &self,
        ks: &[usize],
        rng: &mut dyn RngCore,
    ) -> Result<Vec<ProblemInstance<GridState, GridGoal>>, DomainError> {
        gen_prob_insts_forward(self, ks, rng)
    }

    fn samp_state_act(
        &self,
        s: &GridState,
        rng: &mut dyn RngCore,
    ) -> Result<GridAction, DomainError> {
        samp_act_uniform(self, s, rng)
    }

    fn next_state(
        &self,
        s: &GridState,
        a: &GridAction,
    ) -> Result<Transition<GridState>, DomainError> {
        let dest = self.dest(s, *a).ok_or_else(|| DomainError::InvalidAction {
            action: a.to_string(),
            state: self.state_to_text(s),
        })?;
        Ok(Transition {
            cost: f64::from(self.weight(dest.row, dest.col)),
            next_state: dest,
        })
    }

    fn is_solved(&self, s: &GridState, g: &GridGoal) -> bool {
        s.row == g.row && s.col == g.col
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

    fn string_to_act(&self) -> Option<DynStringToAct<'_, Self>> {
        Some(self)
    }

    fn renderable(&self) -> Option<DynRenderable<'_, Self>> {
        Some(self)
    }
}

impl ActsEnum for GridDomain {
    fn actions(&self, s: &GridState) -> Vec<GridAction> {
        GridAction::ALL
            .into_iter()
            .filter(|&a| self.dest(s, a).is_some())
            .collect()
    }
}

impl FixedActsEnum for GridDomain {
    fn all_actions(&self) -> Vec<GridAction> {
        GridAction::ALL.to_vec()
    }
}

impl GoalSampleableFromState for GridDomain {
    fn samp_goal_from_state(&self, s: &GridState, _rng: &mut dyn RngCore) -> GridGoal {
        GridGoal {
            row: s.row,
            col: s.col,
        }
    }
}

impl StringToAct for GridDomain {
    fn parse_action(&self, text: &str) -> Result<GridAction, DomainError> {
        match text.trim().to_ascii_uppercase().as_str() {
            "U" | "UP" => Ok(GridAction::Up),
            "D" | "DOWN" => Ok(GridAction::Down),
            "L" | "LEFT" => Ok(GridAction::Left),
            "R" | "RIGHT" => Ok(GridAction::Right),
            other => Err(DomainError::Parse(format!("unknown action `{other}`"))),
        }
    }
}

impl Renderable for GridDomain {
    fn state_to_text(&self, s: &GridState) -> String {
        format!("{},{}", s.row, s.col)
    }

    fn text_to_state(&self, text: &str) -> Result<GridState, DomainError> {
        let (row, col) = self.parse_cell(text)?;
        Ok(GridState { row, col })
    }

    fn goal_to_text(&self, g: &GridGoal) -> String {
        format!("{},{}", g.row, g.col)
    }

    fn text_to_goal(&self, text: &str) -> Result<GridGoal, DomainError> {
        let (row, col) = self.parse_cell(text)?;
        Ok(GridGoal { row, col })
    }

    fn render_state(&self, s: &GridState) -> String {
        self.render_map(Some(*s), None)
    }

    fn render_goal(&self, g: &GridGoal) -> String {
        self.render_map(None, Some((g.row, g.col)))
    }
}

/// Normalized position and target coordinates followed by the flattened
/// terrain and obstacle maps: width `4 + 2 * W * H`.
pub struct GridCoordsEncoder {
    width: usize,
    height: usize,
    terrain: Vec<f32>,
    obstacles: Vec<f32>,
}

impl GridCoordsEncoder {
    pub fn new(domain: &GridDomain) -> Self {
        let cells = domain.width * domain.height;
        let terrain = (0..cells)
            .map(|i| domain.weights[i] as f32 / domain.max_weight as f32)
            .collect();
        let obstacles = (0..cells)
            .map(|i| if domain.obstacles[i] { 1.0 } else { 0.0 })
            .collect();
        GridCoordsEncoder {
            width: domain.width,
            height: domain.height,
            terrain,
            obstacles,
        }
    }
}

impl Encoder<GridState, GridGoal> for GridCoordsEncoder {
    fn dim(&self) -> usize {
        4 + 2 * self.width * self.height
    }

    fn encode_into(&self, s: &GridState, g: &GridGoal, out: &mut [f32]) {
        debug_assert_eq!(out.len(), self.dim());
        out[0] = s.row as f32 / self.height as f32;
        out[1] = s.col as f32 / self.width as f32;
        out[2] = g.row as f32 / self.height as f32;
        out[3] = g.col as f32 / self.width as f32;
        let cells = self.width * self.height;
        out[4..4 + cells].copy_from_slice(&self.terrain);
        out[4 + cells..].copy_from_slice(&self.obstacles);
    }
}
