//! Downset-based solver for the backward realizability problem on Büchi
//! automata over partitioned input/output alphabets.

pub mod actions;
pub mod automaton;
pub mod bdd;
pub mod downset;
pub mod gen;
pub mod oracle;
pub mod solver;
pub mod unreal;
pub mod valuation;
