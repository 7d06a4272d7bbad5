//! Büchi automata with formula-labelled transitions.

mod analysis;
mod hoa;

pub use analysis::{bounded_states, buchi_unreachable_states, preprocess, sccs, split_boolean, BoolSplitMode, Scc, StateSplit};
pub use hoa::{parse_hoa, print_hoa, print_hoa_annotated, HoaError, ParsedHoa};

use thiserror::Error;

use crate::bdd::{BddManager, BoolFn, VarId, VarKind};

pub type StateId = usize;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum AutomatonError {
    #[error("state {state} out of range (automaton has {count} states)")]
    StateOutOfRange { state: StateId, count: usize },
    #[error("automaton needs at least one state")]
    NoStates,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Transition {
    pub src: StateId,
    pub label: BoolFn,
    pub dst: StateId,
}

/// A Büchi automaton `(Q, q0, δ, B)` whose labels are boolean functions
/// over the input and output variables declared in `bdd`.
///
/// States are dense indices `0..num_states()`. Transitions labelled ⊥ are
/// never stored.
#[derive(Debug, Clone)]
pub struct Automaton {
    pub bdd: BddManager,
    initial: StateId,
    buchi: Vec<bool>,
    transitions: Vec<Transition>,
}

impl Automaton {
    pub fn new(bdd: BddManager, num_states: usize, initial: StateId) -> Result<Self, AutomatonError> {
        if num_states == 0 {
            return Err(AutomatonError::NoStates);
        }
        if initial >= num_states {
            return Err(AutomatonError::StateOutOfRange {
                state: initial,
                count: num_states,
            });
        }
        Ok(Automaton {
            bdd,
            initial,
            buchi: vec![false; num_states],
            transitions: Vec::new(),
        })
    }

    fn check_state(&self, q: StateId) -> Result<(), AutomatonError> {
        if q < self.num_states() {
            Ok(())
        } else {
            Err(AutomatonError::StateOutOfRange {
                state: q,
                count: self.num_states(),
            })
        }
    }

    pub fn add_state(&mut self) -> StateId {
        self.buchi.push(false);
        self.buchi.len() - 1
    }

    /// Adds a transition; returns `false` (and stores nothing) if the label
    /// is ⊥.
    pub fn add_transition(&mut self, src: StateId, label: BoolFn, dst: StateId) -> Result<bool, AutomatonError> {
        self.check_state(src)?;
        self.check_state(dst)?;
        if label.is_false() {
            return Ok(false);
        }
        self.transitions.push(Transition { src, label, dst });
        Ok(true)
    }

    pub fn set_buchi(&mut self, q: StateId, accepting: bool) -> Result<(), AutomatonError> {
        self.check_state(q)?;
        self.buchi[q] = accepting;
        Ok(())
    }

    pub fn num_states(&self) -> usize {
        self.buchi.len()
    }

    pub fn initial(&self) -> StateId {
        self.initial
    }

    pub fn is_buchi(&self, q: StateId) -> bool {
        self.buchi[q]
    }

    pub fn buchi_states(&self) -> impl Iterator<Item = StateId> + '_ {
        self.buchi.iter().enumerate().filter(|(_, b)| **b).map(|(q, _)| q)
    }

    pub fn transitions(&self) -> &[Transition] {
        &self.transitions
    }

    pub fn inputs(&self) -> Vec<VarId> {
        self.bdd.vars_of(VarKind::Input)
    }

    pub fn outputs(&self) -> Vec<VarId> {
        self.bdd.vars_of(VarKind::Output)
    }

    /// Distinct transition labels in order of first appearance.
    pub fn labels(&self) -> Vec<BoolFn> {
        let mut seen = std::collections::HashSet::new();
        self.transitions
            .iter()
            .filter(|t| seen.insert(t.label))
            .map(|t| t.label)
            .collect()
    }

    /// Successor lists, ignoring labels.
    pub fn successors(&self) -> Vec<Vec<StateId>> {
        let mut succ = vec![Vec::new(); self.num_states()];
        for t in &self.transitions {
            if !succ[t.src].contains(&t.dst) {
                succ[t.src].push(t.dst);
            }
        }
        succ
    }
}
