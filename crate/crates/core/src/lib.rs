//! Finite-depth combinatorics of Cantor-space level graphs, frames, ideals on
//! `ω` and the inductive embedding schemes built from them, each paired with a
//! checker that re-verifies its output.

pub mod checks;
pub mod constructors;
pub mod frames;
pub mod ideals;
pub mod levelgraphs;
pub mod sparse;
pub mod words;
