use super::{Automaton, StateId};

/// A strongly connected component. It is nontrivial when it has at least
/// two states or a self-loop.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Scc {
    pub states: Vec<StateId>,
    pub nontrivial: bool,
}

/// Tarjan's algorithm, iterative. Components come out in reverse
/// topological order.
pub fn sccs(aut: &Automaton) -> Vec<Scc> {
    let succ = aut.successors();
    let n = succ.len();
    const UNVISITED: usize = usize::MAX;
    let mut index = vec![UNVISITED; n];
    let mut low = vec![0; n];
    let mut on_stack = vec![false; n];
    let mut stack = Vec::new();
    let mut out = Vec::new();
    let mut next = 0;
    // (state, position in its successor list)
    let mut call: Vec<(StateId, usize)> = Vec::new();

    for root in 0..n {
        if index[root] != UNVISITED {
            continue;
        }
        call.push((root, 0));
        index[root] = next;
        low[root] = next;
        next += 1;
        stack.push(root);
        on_stack[root] = true;

        while let Some(&mut (v, ref mut pos)) = call.last_mut() {
            if let Some(&w) = succ[v].get(*pos) {
                *pos += 1;
                if index[w] == UNVISITED {
                    index[w] = next;
                    low[w] = next;
                    next += 1;
                    stack.push(w);
                    on_stack[w] = true;
                    call.push((w, 0));
                } else if on_stack[w] {
                    low[v] = low[v].min(index[w]);
                }
                continue;
            }
            call.pop();
            if let Some(&(parent, _)) = call.last() {
                low[parent] = low[parent].min(low[v]);
            }
            if low[v] == index[v] {
                let mut states = Vec::new();
                loop {
                    let w = stack.pop().expect("tarjan stack underflow");
                    on_stack[w] = false;
                    states.push(w);
                    if w == v {
                        break;
                    }
                }
                states.sort_unstable();
                let nontrivial = states.len() > 1 || succ[v].contains(&v);
                out.push(Scc { states, nontrivial });
            }
        }
    }
    out
}

fn forward_reach(aut: &Automaton, seeds: impl IntoIterator<Item = StateId>) -> Vec<bool> {
    let succ = aut.successors();
    let mut seen = vec![false; aut.num_states()];
    let mut stack: Vec<StateId> = Vec::new();
    for s in seeds {
        if !seen[s] {
            seen[s] = true;
            stack.push(s);
        }
    }
    while let Some(v) = stack.pop() {
        for &w in &succ[v] {
            if !seen[w] {
                seen[w] = true;
                stack.push(w);
            }
        }
    }
    seen
}

/// States that no Büchi state lying in a nontrivial SCC can reach
/// (a Büchi state reaches itself).
pub fn bounded_states(aut: &Automaton) -> Vec<StateId> {
    let mut recurrent = Vec::new();
    for scc in sccs(aut) {
        if scc.nontrivial {
            recurrent.extend(scc.states.iter().copied().filter(|&q| aut.is_buchi(q)));
        }
    }
    let reached = forward_reach(aut, recurrent);
    (0..aut.num_states()).filter(|&q| !reached[q]).collect()
}

/// States that no Büchi state reaches at all. A subset of
/// [`bounded_states`], closed under predecessors and free of Büchi states.
pub fn buchi_unreachable_states(aut: &Automaton) -> Vec<StateId> {
    let reached = forward_reach(aut, aut.buchi_states().collect::<Vec<_>>());
    (0..aut.num_states()).filter(|&q| !reached[q]).collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum BoolSplitMode {
    None,
    #[default]
    Bounded,
}

/// Partition of the states into one-bit states and integer-valued states.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct StateSplit {
    boolean: Vec<bool>,
}

impl StateSplit {
    pub fn all_counted(n: usize) -> Self {
        StateSplit {
            boolean: vec![false; n],
        }
    }

    pub fn from_boolean(n: usize, boolean: &[StateId]) -> Self {
        let mut flags = vec![false; n];
        for &q in boolean {
            flags[q] = true;
        }
        StateSplit { boolean: flags }
    }

    pub fn is_boolean(&self, q: StateId) -> bool {
        self.boolean[q]
    }

    pub fn num_states(&self) -> usize {
        self.boolean.len()
    }

    pub fn boolean_states(&self) -> Vec<StateId> {
        (0..self.boolean.len()).filter(|&q| self.boolean[q]).collect()
    }

    pub fn counted_states(&self) -> Vec<StateId> {
        (0..self.boolean.len()).filter(|&q| !self.boolean[q]).collect()
    }
}

/// Chooses which states get a one-bit valuation.
///
/// With [`BoolSplitMode::Bounded`] the boolean states are the bounded states
/// that no Büchi state reaches. Every predecessor of such a state is also
/// boolean and none of them is Büchi, so integer-valued states never read a
/// boolean one and no decrement ever lands on a bit: the one-bit valuation
/// loses nothing at any `k`.
pub fn split_boolean(aut: &Automaton, mode: BoolSplitMode) -> StateSplit {
    match mode {
        BoolSplitMode::None => StateSplit::all_counted(aut.num_states()),
        BoolSplitMode::Bounded => StateSplit::from_boolean(aut.num_states(), &buchi_unreachable_states(aut)),
    }
}

/// Hook for removing useless states before solving. Currently the identity.
pub fn preprocess(aut: &Automaton) -> Automaton {
    aut.clone()
}
