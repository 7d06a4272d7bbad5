//! io-actions and input-actions.
//!
//! The io-action of an IO `x` is the set of state pairs `(p, q)` joined by
//! a transition whose label is compatible with `x`; the input-action of an
//! input `i` is the set of io-actions of the IOs compatible with `i`. These
//! carry everything the backward step needs from the automaton.

use std::cell::OnceCell;
use std::collections::HashSet;

use thiserror::Error;

use crate::automaton::{Automaton, StateId};
use crate::bdd::{BddManager, BoolFn};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ActionError {
    #[error("io-action of the false IO is undefined")]
    FalseIo,
}

/// A pair `(src, dst)` with `dec` set when `dst` is a Büchi state.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Pair {
    pub src: u32,
    pub dst: u32,
    pub dec: bool,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IoAction {
    pub label: BoolFn,
    /// Sorted by `(src, dst)`, duplicate-free.
    pub pairs: Vec<Pair>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InputAction {
    pub input: BoolFn,
    pub ioactions: Vec<IoAction>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum InputSelection {
    /// Every pure input with every pure IO.
    Pure,
    /// Terminal IOs and terminal inputs from partition refinement.
    #[default]
    Refined,
}

fn pairs_of(aut: &Automaton, transitions: impl IntoIterator<Item = usize>) -> Vec<Pair> {
    let ts = aut.transitions();
    let mut pairs: Vec<Pair> = transitions
        .into_iter()
        .map(|t| Pair {
            src: ts[t].src as u32,
            dst: ts[t].dst as u32,
            dec: aut.is_buchi(ts[t].dst),
        })
        .collect();
    pairs.sort_unstable();
    pairs.dedup();
    pairs
}

fn compatible_transitions(aut: &Automaton, x: BoolFn) -> Vec<usize> {
    aut.transitions()
        .iter()
        .enumerate()
        .filter(|(_, t)| aut.bdd.compatible(x, t.label))
        .map(|(i, _)| i)
        .collect()
}

/// The io-action of `x`.
pub fn ioact(aut: &Automaton, x: BoolFn) -> Result<IoAction, ActionError> {
    if x.is_false() {
        return Err(ActionError::FalseIo);
    }
    Ok(IoAction {
        label: x,
        pairs: pairs_of(aut, compatible_transitions(aut, x)),
    })
}

/// Partition refinement of ⊤ by `labels`: each label splits every part it
/// meets into the part inside it and the part outside. The parts are
/// terminal IOs and together cover every io-action of a pure IO.
///
/// Parts keep their position when refined; the outside piece is appended.
pub fn sufficient_terminal_ios(bdd: &mut BddManager, labels: &[BoolFn]) -> Vec<BoolFn> {
    let mut parts = vec![BoolFn::TRUE];
    for &x in labels {
        let n = parts.len();
        for idx in 0..n {
            let y = parts[idx];
            if !bdd.compatible(x, y) {
                continue;
            }
            parts[idx] = bdd.and(x, y);
            let rest = bdd.and_not(y, x);
            if !rest.is_false() {
                parts.push(rest);
            }
        }
    }
    parts
}

/// Same refinement driven by the transitions themselves, recording for each
/// part the transitions compatible with it.
fn refine_with_transitions(aut: &mut Automaton) -> Vec<(BoolFn, Vec<usize>)> {
    let labels: Vec<BoolFn> = aut.transitions().iter().map(|t| t.label).collect();
    let bdd = &mut aut.bdd;
    let mut parts: Vec<(BoolFn, Vec<usize>)> = vec![(BoolFn::TRUE, Vec::new())];
    for (t, &x) in labels.iter().enumerate() {
        let n = parts.len();
        for idx in 0..n {
            let y = parts[idx].0;
            if !bdd.compatible(x, y) {
                continue;
            }
            let inside = bdd.and(x, y);
            let rest = bdd.and_not(y, x);
            if !rest.is_false() {
                let ts = parts[idx].1.clone();
                parts.push((rest, ts));
            }
            parts[idx].0 = inside;
            parts[idx].1.push(t);
        }
    }
    parts
}

fn dedup_by_pairs(actions: Vec<IoAction>) -> Vec<IoAction> {
    let mut seen = HashSet::new();
    actions.into_iter().filter(|a| seen.insert(a.pairs.clone())).collect()
}

struct Entry {
    input: BoolFn,
    ios: Vec<BoolFn>,
    dedup: bool,
    resolved: OnceCell<Vec<IoAction>>,
}

/// The input-actions the main loop picks from.
///
/// When built with `precompute`, every pair list is materialized while the
/// IOs are being selected. Otherwise pair lists are computed from the
/// automaton the first time an input-action is requested.
pub struct ActionTable {
    entries: Vec<Entry>,
}

impl ActionTable {
    pub fn build(aut: &mut Automaton, mode: InputSelection, precompute: bool) -> Self {
        let inputs = aut.inputs();
        let outputs = aut.outputs();
        let entries = match mode {
            InputSelection::Pure => {
                let pure_inputs = aut.bdd.enumerate_pure(BoolFn::TRUE, &inputs);
                let pure_outputs = aut.bdd.enumerate_pure(BoolFn::TRUE, &outputs);
                pure_inputs
                    .iter()
                    .map(|ic| {
                        let i = aut.bdd.cube(ic);
                        let ios: Vec<BoolFn> = pure_outputs
                            .iter()
                            .map(|oc| {
                                let o = aut.bdd.cube(oc);
                                aut.bdd.and(i, o)
                            })
                            .collect();
                        Entry {
                            input: i,
                            ios,
                            dedup: false,
                            resolved: OnceCell::new(),
                        }
                    })
                    .collect()
            }
            InputSelection::Refined => {
                let (terminal, tracked): (Vec<BoolFn>, Option<Vec<Vec<usize>>>) = if precompute {
                    let parts = refine_with_transitions(aut);
                    let (fs, ts) = parts.into_iter().unzip();
                    (fs, Some(ts))
                } else {
                    let labels = aut.labels();
                    (sufficient_terminal_ios(&mut aut.bdd, &labels), None)
                };
                let projections: Vec<BoolFn> = terminal.iter().map(|&x| aut.bdd.exists(x, &outputs)).collect();
                let mut distinct = Vec::new();
                for p in projections {
                    if !distinct.contains(&p) {
                        distinct.push(p);
                    }
                }
                let terminal_inputs = sufficient_terminal_ios(&mut aut.bdd, &distinct);
                terminal_inputs
                    .into_iter()
                    .map(|i| {
                        let members: Vec<usize> = (0..terminal.len())
                            .filter(|&t| aut.bdd.compatible(i, terminal[t]))
                            .collect();
                        let resolved = OnceCell::new();
                        if let Some(tracked) = &tracked {
                            let actions = members
                                .iter()
                                .map(|&t| IoAction {
                                    label: terminal[t],
                                    pairs: pairs_of(aut, tracked[t].iter().copied()),
                                })
                                .collect();
                            let _ = resolved.set(dedup_by_pairs(actions));
                        }
                        Entry {
                            input: i,
                            ios: members.iter().map(|&t| terminal[t]).collect(),
                            dedup: true,
                            resolved,
                        }
                    })
                    .collect()
            }
        };
        let table = ActionTable { entries };
        if precompute {
            for idx in 0..table.len() {
                table.get(aut, idx);
            }
        }
        table
    }

    pub fn len(&self) -> usize {
        self.entries.len()
    }

    pub fn is_empty(&self) -> bool {
        self.entries.is_empty()
    }

    pub fn input(&self, idx: usize) -> BoolFn {
        self.entries[idx].input
    }

    /// The IOs grouped under input-action `idx`.
    pub fn ios(&self, idx: usize) -> &[BoolFn] {
        &self.entries[idx].ios
    }

    /// The io-actions of input-action `idx`, computing them on first use.
    pub fn get(&self, aut: &Automaton, idx: usize) -> &[IoAction] {
        let e = &self.entries[idx];
        e.resolved.get_or_init(|| {
            let actions: Vec<IoAction> = e
                .ios
                .iter()
                .map(|&x| ioact(aut, x).expect("selected IOs are satisfiable"))
                .collect();
            if e.dedup {
                dedup_by_pairs(actions)
            } else {
                actions
            }
        })
    }

    pub fn materialize(&self, aut: &Automaton) -> Vec<InputAction> {
        (0..self.len())
            .map(|idx| InputAction {
                input: self.input(idx),
                ioactions: self.get(aut, idx).to_vec(),
            })
            .collect()
    }

    /// Human-readable list of inputs and their IOs.
    pub fn describe(&self, aut: &Automaton) -> String {
        let mut s = String::new();
        for e in &self.entries {
            s.push_str(&format!("input {}\n", aut.bdd.format(e.input)));
            for &x in &e.ios {
                s.push_str(&format!("  io {}\n", aut.bdd.format(x)));
            }
        }
        s
    }
}

/// All input-actions for `aut` under `mode`, materialized.
pub fn sufficient_inputs(aut: &mut Automaton, mode: InputSelection) -> Vec<InputAction> {
    let table = ActionTable::build(aut, mode, true);
    table.materialize(aut)
}

/// States `p` with an outgoing pair in `a`.
pub fn sources(a: &IoAction) -> impl Iterator<Item = StateId> + '_ {
    a.pairs.iter().map(|p| p.src as StateId)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::VarKind;

    struct Fx {
        aut: Automaton,
        i: BoolFn,
        o: BoolFn,
    }

    fn one_io(edges: &[(usize, &str, usize)], n: usize, buchi: &[usize]) -> Fx {
        let mut bdd = BddManager::new();
        let iv = bdd.declare("i", VarKind::Input).unwrap();
        let ov = bdd.declare("o", VarKind::Output).unwrap();
        let i = bdd.var(iv).unwrap();
        let o = bdd.var(ov).unwrap();
        let mut aut = Automaton::new(bdd, n, 0).unwrap();
        for &(s, l, d) in edges {
            let label = match l {
                "t" => BoolFn::TRUE,
                "i&o" => aut.bdd.and(i, o),
                "!i" => aut.bdd.not(i),
                "i&!o" => aut.bdd.and_not(i, o),
                _ => unreachable!(),
            };
            aut.add_transition(s, label, d).unwrap();
        }
        for &q in buchi {
            aut.set_buchi(q, true).unwrap();
        }
        Fx { aut, i, o }
    }

    #[test]
    fn ioact_examples() {
        let fx = one_io(&[(0, "t", 0)], 1, &[0]);
        let a = ioact(&fx.aut, BoolFn::TRUE).unwrap();
        assert_eq!(a.pairs, vec![Pair { src: 0, dst: 0, dec: true }]);

        let mut fx = one_io(&[(0, "i&o", 1), (0, "!i", 0)], 2, &[]);
        let x = fx.aut.bdd.and_not(fx.i, fx.o);
        assert!(ioact(&fx.aut, x).unwrap().pairs.is_empty());
        let ni = fx.aut.bdd.not(fx.i);
        let x = fx.aut.bdd.and(ni, fx.o);
        assert_eq!(ioact(&fx.aut, x).unwrap().pairs, vec![Pair { src: 0, dst: 0, dec: false }]);
        assert_eq!(ioact(&fx.aut, BoolFn::FALSE), Err(ActionError::FalseIo));
    }

    #[test]
    fn refinement_hand_trace() {
        let mut fx = one_io(&[(0, "i&o", 0), (0, "i&!o", 0), (0, "!i", 0)], 1, &[]);
        let labels = fx.aut.labels();
        let p = sufficient_terminal_ios(&mut fx.aut.bdd, &labels);
        let want = labels.clone();
        assert_eq!(p, want);
        assert_eq!(sufficient_terminal_ios(&mut fx.aut.bdd, &[BoolFn::TRUE]), vec![BoolFn::TRUE]);
        assert_eq!(sufficient_terminal_ios(&mut fx.aut.bdd, &[]), vec![BoolFn::TRUE]);
    }

    #[test]
    fn refinement_skips_irrelevant_outputs() {
        let mut bdd = BddManager::new();
        let iv = bdd.declare("i", VarKind::Input).unwrap();
        let o1v = bdd.declare("o1", VarKind::Output).unwrap();
        bdd.declare("o2", VarKind::Output).unwrap();
        let i = bdd.var(iv).unwrap();
        let o1 = bdd.var(o1v).unwrap();
        let a = bdd.and(i, o1);
        let b = bdd.and_not(i, o1);
        let ni = bdd.not(i);
        let mut aut = Automaton::new(bdd, 2, 0).unwrap();
        aut.add_transition(0, a, 0).unwrap();
        aut.add_transition(0, b, 1).unwrap();
        let labels = aut.labels();
        let ios = sufficient_terminal_ios(&mut aut.bdd, &labels);
        assert_eq!(ios, vec![a, b, ni]);
        let refined = sufficient_inputs(&mut aut, InputSelection::Refined);
        assert_eq!(refined.len(), 2);
        let sizes: Vec<usize> = refined.iter().map(|ia| ia.ioactions.len()).collect();
        assert_eq!(sizes, vec![2, 1]);
    }

    #[test]
    fn pure_versus_refined_on_a_single_true_edge() {
        let mut fx = one_io(&[(0, "t", 0)], 1, &[0]);
        let pure = sufficient_inputs(&mut fx.aut, InputSelection::Pure);
        assert_eq!(pure.len(), 2);
        assert!(pure.iter().all(|ia| ia.ioactions.len() == 2));
        let refined = sufficient_inputs(&mut fx.aut, InputSelection::Refined);
        assert_eq!(refined.len(), 1);
        assert_eq!(refined[0].input, BoolFn::TRUE);
        assert_eq!(refined[0].ioactions.len(), 1);
    }

    #[test]
    fn lazy_matches_materialized() {
        for precompute in [false, true] {
            let mut fx = one_io(&[(0, "i&o", 1), (0, "!i", 0), (1, "t", 1)], 2, &[1]);
            let lazy = ActionTable::build(&mut fx.aut, InputSelection::Refined, false).materialize(&fx.aut);
            let eager = ActionTable::build(&mut fx.aut, InputSelection::Refined, precompute).materialize(&fx.aut);
            assert_eq!(lazy, eager);
        }
    }
}
