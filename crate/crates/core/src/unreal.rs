//! The dual check. Outputs are delayed by one step and the players swap
//! roles, so that a positive answer on the shifted automaton means the
//! environment can force the original specification to fail.

use std::collections::{HashMap, VecDeque};

use crate::automaton::{print_hoa_annotated, Automaton, StateId};
use crate::bdd::{BoolFn, VarId};
use crate::solver::{solve_with, RunControl, SolveConfig, SolveError};

/// A state of the shifted automaton: a source state together with the
/// output still owed from the previous step.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct ShiftedState {
    pub base: StateId,
    pub pending: BoolFn,
}

/// One iteration of the slicing loop for a source transition.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct ShiftSlice {
    pub from: usize,
    pub transition: usize,
    /// The remaining part of the label when the slice was taken.
    pub rest: BoolFn,
    pub input: BoolFn,
}

#[derive(Debug, Clone)]
pub struct Shifted {
    pub automaton: Automaton,
    /// `states[s]` describes state `s` of `automaton`.
    pub states: Vec<ShiftedState>,
    pub slices: Vec<ShiftSlice>,
}

impl Shifted {
    pub fn state_name(&self, s: usize) -> String {
        let st = self.states[s];
        format!("{}/{}", st.base, self.automaton.bdd.format(st.pending))
    }

    /// HOA text with each state named after its base state and pending
    /// output.
    pub fn to_hoa(&self) -> String {
        let names: Vec<String> = (0..self.states.len()).map(|s| self.state_name(s)).collect();
        let comments = vec![
            "outputs shifted one step; roles swapped".to_string(),
            "state names read base/pending-output".to_string(),
        ];
        print_hoa_annotated(&self.automaton, &comments, &names)
    }
}

/// Builds the shifted automaton by a worklist over `(state, pending)`.
///
/// Each source edge `(p, x, q)` is cut into slices. A slice picks a pure
/// output `o'` compatible with what is left of `x`, takes the inputs `i`
/// that go with `o'`, and records the outputs `o''` those inputs allow;
/// the new edge `((p, o), o ∧ i, (q, o''))` makes the pending output `o`
/// visible only now. The slice `i` is then removed from the label.
pub fn shift_outputs(aut: &Automaton) -> Shifted {
    let mut bdd = aut.bdd.clone();
    let inputs: Vec<VarId> = aut.inputs();
    let outputs: Vec<VarId> = aut.outputs();
    let mut states = vec![ShiftedState {
        base: aut.initial(),
        pending: BoolFn::TRUE,
    }];
    let mut index: HashMap<ShiftedState, usize> = HashMap::from([(states[0], 0)]);
    let mut queue = VecDeque::from([0usize]);
    let mut edges: Vec<(usize, BoolFn, usize)> = Vec::new();
    let mut slices = Vec::new();
    let mut out_edges: Vec<Vec<usize>> = vec![Vec::new(); aut.num_states()];
    for (t, tr) in aut.transitions().iter().enumerate() {
        out_edges[tr.src].push(t);
    }

    while let Some(s) = queue.pop_front() {
        let ShiftedState { base: p, pending: o } = states[s];
        for &t in &out_edges[p] {
            let tr = aut.transitions()[t];
            let mut y = tr.label;
            while !y.is_false() {
                let cube = bdd.some_pure(y, &outputs).expect("y is satisfiable");
                let o1 = bdd.cube(&cube);
                let y_o1 = bdd.and(y, o1);
                let i = bdd.exists(y_o1, &outputs);
                let i_y = bdd.and(i, y);
                let o2 = bdd.exists(i_y, &inputs);
                let target = ShiftedState {
                    base: tr.dst,
                    pending: o2,
                };
                let d = *index.entry(target).or_insert_with(|| {
                    states.push(target);
                    queue.push_back(states.len() - 1);
                    states.len() - 1
                });
                let label = bdd.and(o, i);
                edges.push((s, label, d));
                slices.push(ShiftSlice {
                    from: s,
                    transition: t,
                    rest: y,
                    input: i,
                });
                y = bdd.and_not(y, i);
            }
        }
    }

    bdd.swap_roles();
    let mut shifted = Automaton::new(bdd, states.len(), 0).expect("at least one state");
    for (s, st) in states.iter().enumerate() {
        shifted.set_buchi(s, aut.is_buchi(st.base)).expect("state in range");
    }
    for (s, label, d) in edges {
        shifted.add_transition(s, label, d).expect("state in range");
    }
    Shifted {
        automaton: shifted,
        states,
        slices,
    }
}

/// Whether the environment wins: the fixed point on the shifted automaton
/// of `neg`, an automaton for the negated specification.
pub fn check_unreal(neg: &Automaton, cfg: &SolveConfig) -> Result<bool, SolveError> {
    check_unreal_with(neg, cfg, &mut RunControl::default())
}

pub fn check_unreal_with(neg: &Automaton, cfg: &SolveConfig, ctl: &mut RunControl<'_>) -> Result<bool, SolveError> {
    let shifted = shift_outputs(neg);
    solve_with(&shifted.automaton, cfg, ctl).map(|r| r.realizable)
}
