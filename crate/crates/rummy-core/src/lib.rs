//! Exact evaluation and simulation workbench for 13-card Indian Rummy.
//!
//! The crate is layered bottom-up:
//!
//! * [`cards`]: cards, decks, wildcard selection, values, parsing.
//! * [`meld`]: meld classification and exhaustive meld enumeration.
//! * [`solver`]: exact minimum deadwood score and minimum replacement
//!   distance over all disjoint meld groupings, with discard analysis.
//! * [`game`]: a deterministic two-player round engine.
//! * [`agents`]: decision policies built on the solvers.
//! * [`tournament`]: parallel match running and significance tests.

pub mod agents;
pub mod cards;
pub mod game;
pub mod meld;
pub mod solver;
pub mod tournament;
