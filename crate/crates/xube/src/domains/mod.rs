//! Built-in reference domains: the n x n sliding-tile puzzle (reverse-walk
//! generation, unit costs) and weighted-grid navigation (forward-walk
//! generation, non-unit costs).

pub mod grid;
pub mod stp;

pub use grid::{GridAction, GridCoordsEncoder, GridDomain, GridGoal, GridState};
pub use stp::{SlidingTileDomain, StpAction, StpGoal, StpOneHotEncoder, StpState};
