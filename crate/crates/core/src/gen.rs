//! Random automata for tests and benchmarks.

use rand::{Rng, SeedableRng};

use crate::automaton::Automaton;
use crate::bdd::{BddManager, BoolFn, VarId, VarKind};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GenParams {
    pub states: usize,
    pub inputs: usize,
    pub outputs: usize,
    /// Probability that an ordered state pair gets an edge.
    pub density: f64,
    pub buchi: f64,
    /// Probability that an edge label is a disjunction of two cubes.
    pub disjunctive: f64,
}

impl GenParams {
    pub fn small(states: usize, inputs: usize, outputs: usize, density: f64) -> Self {
        GenParams {
            states,
            inputs,
            outputs,
            density,
            buchi: 0.35,
            disjunctive: 0.25,
        }
    }
}

/// A manager with inputs `i0, i1, ...` followed by outputs `o0, o1, ...`.
pub fn manager(inputs: usize, outputs: usize) -> BddManager {
    let mut bdd = BddManager::new();
    for j in 0..inputs {
        bdd.declare(&format!("i{j}"), VarKind::Input).expect("fresh name");
    }
    for j in 0..outputs {
        bdd.declare(&format!("o{j}"), VarKind::Output).expect("fresh name");
    }
    bdd
}

/// A random satisfiable cube: each variable is left free, required or
/// forbidden with equal odds.
pub fn random_cube<R: Rng>(rng: &mut R, bdd: &mut BddManager, vars: &[VarId]) -> BoolFn {
    let mut f = BoolFn::TRUE;
    for &v in vars {
        match rng.gen_range(0..3) {
            0 => {}
            b => {
                let l = bdd.literal(v, b == 1).expect("declared");
                f = bdd.and(f, l);
            }
        }
    }
    f
}

pub fn random_label<R: Rng>(rng: &mut R, bdd: &mut BddManager, disjunctive: f64) -> BoolFn {
    let vars: Vec<VarId> = bdd.vars().map(|(v, _)| v).collect();
    let c = random_cube(rng, bdd, &vars);
    if rng.gen_bool(disjunctive) {
        let d = random_cube(rng, bdd, &vars);
        bdd.or(c, d)
    } else {
        c
    }
}

pub fn random_automaton<R: Rng>(rng: &mut R, p: &GenParams) -> Automaton {
    let bdd = manager(p.inputs, p.outputs);
    let mut aut = Automaton::new(bdd, p.states.max(1), 0).expect("nonempty");
    for q in 0..aut.num_states() {
        if rng.gen_bool(p.buchi) {
            aut.set_buchi(q, true).expect("in range");
        }
    }
    for src in 0..aut.num_states() {
        for dst in 0..aut.num_states() {
            if rng.gen_bool(p.density) {
                let label = random_label(rng, &mut aut.bdd, p.disjunctive);
                aut.add_transition(src, label, dst).expect("in range");
            }
        }
    }
    aut
}

/// Mixed small automata: between 1 and `max_states` states, edge density
/// drawn from `[0.2, 0.8]`.
pub fn small_corpus<R: Rng>(rng: &mut R, count: usize, max_states: usize, max_inputs: usize, max_outputs: usize) -> Vec<Automaton> {
    (0..count)
        .map(|_| {
            let p = GenParams::small(
                rng.gen_range(1..=max_states),
                rng.gen_range(0..=max_inputs),
                rng.gen_range(0..=max_outputs),
                rng.gen_range(0.2..0.8),
            );
            random_automaton(rng, &p)
        })
        .collect()
}

/// Adds edge-free states until `aut` has `total` states. They are
/// unreachable and stay at `k` in every vector, so the fixed point keeps
/// its shape while every vector gets longer.
pub fn widen(aut: &Automaton, total: usize) -> Automaton {
    let mut out = aut.clone();
    while out.num_states() < total {
        out.add_state();
    }
    out
}

/// A random 50-state core with large fixed-point antichains, widened to
/// `total` states. `variant` picks one of a few pinned cores.
pub fn dense_family(variant: usize, total: usize) -> Automaton {
    const SEEDS: [u64; 5] = [1, 23, 29, 7, 14];
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(SEEDS[variant % SEEDS.len()]);
    let p = GenParams {
        states: 50,
        inputs: 2,
        outputs: 2,
        density: 3.0 / 50.0,
        buchi: 0.1,
        disjunctive: 0.2,
    };
    widen(&random_automaton(&mut rng, &p), total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn generation_is_seeded() {
        let a = small_corpus(&mut ChaCha8Rng::seed_from_u64(9), 5, 4, 2, 2);
        let b = small_corpus(&mut ChaCha8Rng::seed_from_u64(9), 5, 4, 2, 2);
        let pa: Vec<String> = a.iter().map(crate::automaton::print_hoa).collect();
        let pb: Vec<String> = b.iter().map(crate::automaton::print_hoa).collect();
        assert_eq!(pa, pb);
    }

    #[test]
    fn widening_keeps_the_answer() {
        for variant in 0..3 {
            let a = dense_family(variant, 50);
            let b = dense_family(variant, 120);
            assert_eq!(b.num_states(), 120);
            let cfg = crate::solver::SolveConfig::with_k(2);
            let ra = crate::solver::solve_with(&a, &cfg, &mut Default::default()).unwrap();
            let rb = crate::solver::solve_with(&b, &cfg, &mut Default::default()).unwrap();
            assert_eq!(ra.realizable, rb.realizable);
            assert_eq!(ra.antichain.len(), rb.antichain.len());
        }
    }
}
