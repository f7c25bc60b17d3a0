//! Learned heuristic functions for user-defined pathfinding domains.
//!
//! xube learns cost-to-go estimates with approximate value iteration or
//! Q-learning and uses them with batched, weighted graph search and beam
//! search to solve pathfinding problem instances. Domains are black boxes
//! behind the [`domain::Domain`] contract; two reference domains (the
//! sliding-tile puzzle and weighted-grid navigation) ship in
//! [`domains`], and the `xube` binary exposes generation, training,
//! solving, and inspection over a domain/architecture registry.

pub mod algspec;
pub mod cli;
pub mod domain;
pub mod domains;
pub mod encode;
pub mod heur_nnet;
pub mod io;
pub mod nnet;
pub mod registry;
pub mod search;
pub mod train;

#[cfg(test)]
pub(crate) mod testdom;
