//! Brute-force reference semantics for testing.
//!
//! Nothing here uses the solver, the downsets or the action selection:
//! sets of vectors are explicit bitmaps over the whole grid `[-1, k]^Q`,
//! every pure input and pure IO is enumerated, and labels are evaluated by
//! walking the decision diagram directly.

use std::collections::BTreeSet;

use thiserror::Error;

use crate::automaton::Automaton;
use crate::bdd::{BddManager, BoolFn, VarKind};

pub const MAX_GRID: u64 = 1_000_000;
pub const MAX_VARS: usize = 8;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum OracleError {
    #[error("instance too large for the reference implementation")]
    TooBig,
}

/// Value of `f` under a full assignment indexed by variable id.
pub fn oracle_eval(bdd: &BddManager, mut f: BoolFn, assignment: &[bool]) -> bool {
    while let Some((v, lo, hi)) = bdd.decompose(f) {
        f = if assignment[v.0 as usize] { hi } else { lo };
    }
    f.is_true()
}

/// Each assignment of all variables, grouped by its restriction to the
/// inputs.
fn assignments_by_input(bdd: &BddManager) -> Vec<Vec<Vec<bool>>> {
    let n = bdd.var_count();
    let kinds: Vec<VarKind> = (0..n).map(|v| bdd.var_info(crate::bdd::VarId(v as u32)).kind).collect();
    let ins: Vec<usize> = (0..n).filter(|&v| kinds[v] == VarKind::Input).collect();
    let outs: Vec<usize> = (0..n).filter(|&v| kinds[v] == VarKind::Output).collect();
    (0..1u32 << ins.len())
        .map(|im| {
            (0..1u32 << outs.len())
                .map(|om| {
                    let mut a = vec![false; n];
                    for (b, &v) in ins.iter().enumerate() {
                        a[v] = im >> b & 1 == 1;
                    }
                    for (b, &v) in outs.iter().enumerate() {
                        a[v] = om >> b & 1 == 1;
                    }
                    a
                })
                .collect()
        })
        .collect()
}

/// `(src, dst)` pairs whose label holds under `assignment`.
fn pairs_under(aut: &Automaton, assignment: &[bool]) -> Vec<(usize, usize)> {
    let mut ps: Vec<(usize, usize)> = aut
        .transitions()
        .iter()
        .filter(|t| oracle_eval(&aut.bdd, t.label, assignment))
        .map(|t| (t.src, t.dst))
        .collect();
    ps.sort_unstable();
    ps.dedup();
    ps
}

/// Every pure IO as a full assignment, with its io-action.
pub fn oracle_pure_ios(aut: &Automaton) -> Result<Vec<(Vec<bool>, Vec<(usize, usize)>)>, OracleError> {
    if aut.bdd.var_count() > MAX_VARS {
        return Err(OracleError::TooBig);
    }
    Ok(assignments_by_input(&aut.bdd)
        .into_iter()
        .flatten()
        .map(|a| {
            let pairs = pairs_under(aut, &a);
            (a, pairs)
        })
        .collect())
}

/// The distinct io-actions of all pure IOs.
pub fn oracle_pure_ioacts(aut: &Automaton) -> Result<BTreeSet<Vec<(usize, usize)>>, OracleError> {
    if aut.bdd.var_count() > MAX_VARS {
        return Err(OracleError::TooBig);
    }
    Ok(assignments_by_input(&aut.bdd)
        .iter()
        .flatten()
        .map(|a| pairs_under(aut, a))
        .collect())
}

struct Grid {
    n: usize,
    base: usize,
    size: usize,
}

impl Grid {
    fn decode(&self, mut idx: usize, out: &mut [i32]) {
        for d in 0..self.n {
            out[d] = (idx % self.base) as i32 - 1;
            idx /= self.base;
        }
    }

    fn encode(&self, v: &[i32]) -> usize {
        v.iter().rev().fold(0, |acc, &x| acc * self.base + (x + 1) as usize)
    }

    /// Closes `set` downward one coordinate at a time.
    fn close_down(&self, set: &mut [bool]) {
        let mut stride = 1;
        for _ in 0..self.n {
            for idx in (0..self.size).rev() {
                let digit = (idx / stride) % self.base;
                if digit + 1 < self.base && set[idx + stride] {
                    set[idx] = true;
                }
            }
            stride *= self.base;
        }
    }
}

/// Iterates cpre over every pure input on the explicit grid until stable;
/// returns whether some remaining vector has the initial state at 0 or
/// more.
pub fn oracle_solve(aut: &Automaton, k: i32) -> Result<bool, OracleError> {
    let n = aut.num_states();
    let base = (k + 2) as u64;
    let size = (0..n).try_fold(1u64, |acc, _| acc.checked_mul(base).filter(|&s| s <= MAX_GRID));
    let size = match size {
        Some(s) if k >= 1 && aut.bdd.var_count() <= MAX_VARS => s as usize,
        _ => return Err(OracleError::TooBig),
    };
    let grid = Grid {
        n,
        base: base as usize,
        size,
    };
    let actions: Vec<Vec<Vec<(usize, usize)>>> = assignments_by_input(&aut.bdd)
        .iter()
        .map(|group| group.iter().map(|a| pairs_under(aut, a)).collect())
        .collect();

    let mut s = vec![true; size];
    let mut v = vec![0i32; n];
    let mut img = vec![0i32; n];
    loop {
        let mut changed = false;
        for ios in &actions {
            let mut u = vec![false; size];
            for idx in 0..size {
                if !s[idx] {
                    continue;
                }
                grid.decode(idx, &mut v);
                for pairs in ios {
                    for p in 0..n {
                        img[p] = pairs
                            .iter()
                            .filter(|&&(src, _)| src == p)
                            .map(|&(_, dst)| (v[dst] - aut.is_buchi(dst) as i32).max(-1))
                            .min()
                            .unwrap_or(k);
                    }
                    u[grid.encode(&img)] = true;
                }
            }
            grid.close_down(&mut u);
            for idx in 0..size {
                if s[idx] && !u[idx] {
                    s[idx] = false;
                    changed = true;
                }
            }
        }
        if !changed {
            break;
        }
    }
    let q0 = aut.initial();
    Ok((0..size).any(|idx| {
        grid.decode(idx, &mut v);
        s[idx] && v[q0] >= 0
    }))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bdd::VarKind;

    fn one_io() -> (BddManager, BoolFn, BoolFn) {
        let mut bdd = BddManager::new();
        let i = bdd.declare("i", VarKind::Input).unwrap();
        let o = bdd.declare("o", VarKind::Output).unwrap();
        let (i, o) = (bdd.var(i).unwrap(), bdd.var(o).unwrap());
        (bdd, i, o)
    }

    #[test]
    fn examples() {
        let (bdd, i, o) = one_io();
        let mut a_loop = Automaton::new(bdd.clone(), 1, 0).unwrap();
        a_loop.add_transition(0, BoolFn::TRUE, 0).unwrap();
        a_loop.set_buchi(0, true).unwrap();
        assert!(!oracle_solve(&a_loop, 2).unwrap());
        assert_eq!(oracle_pure_ioacts(&a_loop).unwrap(), BTreeSet::from([vec![(0, 0)]]));

        let mut a_real = Automaton::new(bdd.clone(), 1, 0).unwrap();
        let io = a_real.bdd.and(i, o);
        let ni = a_real.bdd.not(i);
        let nino = a_real.bdd.and_not(ni, o);
        a_real.add_transition(0, io, 0).unwrap();
        a_real.add_transition(0, nino, 0).unwrap();
        assert!(oracle_solve(&a_real, 1).unwrap());

        let mut free = Automaton::new(bdd.clone(), 1, 0).unwrap();
        free.add_transition(0, BoolFn::TRUE, 0).unwrap();
        for k in 1..4 {
            assert!(oracle_solve(&free, k).unwrap());
        }

        let empty = Automaton::new(bdd, 2, 0).unwrap();
        assert_eq!(oracle_pure_ioacts(&empty).unwrap(), BTreeSet::from([vec![]]));
    }

    #[test]
    fn grid_guard() {
        let (bdd, _, _) = one_io();
        let aut = Automaton::new(bdd, 12, 0).unwrap();
        assert_eq!(oracle_solve(&aut, 3), Err(OracleError::TooBig));
        assert!(oracle_solve(&aut, 1).is_ok());
    }

    #[test]
    fn closure_is_downward() {
        let g = Grid { n: 2, base: 3, size: 9 };
        let mut set = vec![false; 9];
        set[g.encode(&[1, 0])] = true;
        g.close_down(&mut set);
        let mut v = vec![0; 2];
        let members: Vec<Vec<i32>> = (0..9)
            .filter(|&i| set[i])
            .map(|i| {
                g.decode(i, &mut v);
                v.clone()
            })
            .collect();
        assert_eq!(members.len(), 6);
        assert!(members.contains(&vec![-1, -1]) && !members.contains(&vec![1, 1]));
    }
}
