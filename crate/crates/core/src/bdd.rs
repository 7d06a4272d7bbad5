//! Boolean functions over the input/output variable universe.
//!
//! Functions are reduced ordered decision diagrams stored in a
//! [`BddManager`]. Nodes are hash-consed, so two semantically equal
//! functions built in the same manager are the same [`BoolFn`] handle and
//! equality is a `u32` comparison. Variables are ordered by declaration.

use std::collections::{HashMap, HashSet};
use std::fmt;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BoolError {
    #[error("variable #{0} was never declared")]
    UndeclaredVariable(u32),
    #[error("variable `{0}` declared twice")]
    DuplicateVariable(String),
    #[error("no cube satisfies the false function")]
    NoCube,
}

/// Whether a variable is read from the environment or set by the controller.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum VarKind {
    Input,
    Output,
}

impl VarKind {
    pub fn flipped(self) -> Self {
        match self {
            VarKind::Input => VarKind::Output,
            VarKind::Output => VarKind::Input,
        }
    }
}

/// Index of a declared variable; also its level in the variable order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarId(pub u32);

#[derive(Debug, Clone)]
pub struct VarInfo {
    pub name: String,
    pub kind: VarKind,
}

/// Handle to a function stored in a [`BddManager`].
#[derive(Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct BoolFn(u32);

impl BoolFn {
    pub const FALSE: BoolFn = BoolFn(0);
    pub const TRUE: BoolFn = BoolFn(1);

    pub fn is_false(self) -> bool {
        self == Self::FALSE
    }

    pub fn is_true(self) -> bool {
        self == Self::TRUE
    }

    pub fn is_const(self) -> bool {
        self.0 < 2
    }
}

impl fmt::Debug for BoolFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.0 {
            0 => write!(f, "⊥"),
            1 => write!(f, "⊤"),
            n => write!(f, "bdd#{n}"),
        }
    }
}

const TERMINAL_LEVEL: u32 = u32::MAX;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
struct Node {
    var: u32,
    lo: u32,
    hi: u32,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
enum Op {
    And,
    Or,
}

/// A conjunction of literals over a chosen set of variables.
///
/// A cube over every input and output is a pure IO; over the inputs only, a
/// pure input.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cube {
    pub literals: Vec<(VarId, bool)>,
}

impl Cube {
    pub fn value(&self, var: VarId) -> Option<bool> {
        self.literals
            .iter()
            .find(|(v, _)| *v == var)
            .map(|&(_, b)| b)
    }
}

#[derive(Debug, Clone)]
pub struct BddManager {
    vars: Vec<VarInfo>,
    nodes: Vec<Node>,
    unique: HashMap<Node, u32>,
    apply_cache: HashMap<(Op, u32, u32), u32>,
    not_cache: HashMap<u32, u32>,
}

impl Default for BddManager {
    fn default() -> Self {
        Self::new()
    }
}

impl BddManager {
    pub fn new() -> Self {
        let terminal = |v| Node {
            var: TERMINAL_LEVEL,
            lo: v,
            hi: v,
        };
        BddManager {
            vars: Vec::new(),
            nodes: vec![terminal(0), terminal(1)],
            unique: HashMap::new(),
            apply_cache: HashMap::new(),
            not_cache: HashMap::new(),
        }
    }

    /// Declares a new variable at the bottom of the order.
    pub fn declare(&mut self, name: &str, kind: VarKind) -> Result<VarId, BoolError> {
        if self.vars.iter().any(|v| v.name == name) {
            return Err(BoolError::DuplicateVariable(name.to_string()));
        }
        self.vars.push(VarInfo {
            name: name.to_string(),
            kind,
        });
        Ok(VarId(self.vars.len() as u32 - 1))
    }

    pub fn var_count(&self) -> usize {
        self.vars.len()
    }

    pub fn var_info(&self, var: VarId) -> &VarInfo {
        &self.vars[var.0 as usize]
    }

    pub fn var_by_name(&self, name: &str) -> Option<VarId> {
        self.vars
            .iter()
            .position(|v| v.name == name)
            .map(|i| VarId(i as u32))
    }

    pub fn vars(&self) -> impl Iterator<Item = (VarId, &VarInfo)> + '_ {
        self.vars
            .iter()
            .enumerate()
            .map(|(i, v)| (VarId(i as u32), v))
    }

    /// Variables of the given kind, in the global order.
    pub fn vars_of(&self, kind: VarKind) -> Vec<VarId> {
        self.vars()
            .filter(|(_, info)| info.kind == kind)
            .map(|(v, _)| v)
            .collect()
    }

    pub fn inputs(&self) -> Vec<VarId> {
        self.vars_of(VarKind::Input)
    }

    pub fn outputs(&self) -> Vec<VarId> {
        self.vars_of(VarKind::Output)
    }

    /// Exchanges the roles of inputs and outputs; the order is untouched.
    pub fn swap_roles(&mut self) {
        for v in &mut self.vars {
            v.kind = v.kind.flipped();
        }
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    pub fn constant(&self, b: bool) -> BoolFn {
        if b {
            BoolFn::TRUE
        } else {
            BoolFn::FALSE
        }
    }

    pub fn var(&mut self, var: VarId) -> Result<BoolFn, BoolError> {
        self.check_var(var)?;
        Ok(BoolFn(self.mk(var.0, 0, 1)))
    }

    pub fn nvar(&mut self, var: VarId) -> Result<BoolFn, BoolError> {
        self.check_var(var)?;
        Ok(BoolFn(self.mk(var.0, 1, 0)))
    }

    pub fn literal(&mut self, var: VarId, value: bool) -> Result<BoolFn, BoolError> {
        if value {
            self.var(var)
        } else {
            self.nvar(var)
        }
    }

    fn check_var(&self, var: VarId) -> Result<(), BoolError> {
        if (var.0 as usize) < self.vars.len() {
            Ok(())
        } else {
            Err(BoolError::UndeclaredVariable(var.0))
        }
    }

    fn mk(&mut self, var: u32, lo: u32, hi: u32) -> u32 {
        if lo == hi {
            return lo;
        }
        let node = Node { var, lo, hi };
        if let Some(&id) = self.unique.get(&node) {
            return id;
        }
        let id = self.nodes.len() as u32;
        self.nodes.push(node);
        self.unique.insert(node, id);
        id
    }

    fn level(&self, f: u32) -> u32 {
        self.nodes[f as usize].var
    }

    /// Splits `f` on the variable at `level`.
    fn cofactors(&self, f: u32, level: u32) -> (u32, u32) {
        let n = self.nodes[f as usize];
        if n.var == level {
            (n.lo, n.hi)
        } else {
            (f, f)
        }
    }

    /// The top variable of `f` with its low and high children, or `None`
    /// for a constant.
    pub fn decompose(&self, f: BoolFn) -> Option<(VarId, BoolFn, BoolFn)> {
        let n = self.nodes[f.0 as usize];
        if n.var == TERMINAL_LEVEL {
            None
        } else {
            Some((VarId(n.var), BoolFn(n.lo), BoolFn(n.hi)))
        }
    }

    pub fn not(&mut self, f: BoolFn) -> BoolFn {
        BoolFn(self.not_rec(f.0))
    }

    fn not_rec(&mut self, f: u32) -> u32 {
        if f < 2 {
            return 1 - f;
        }
        if let Some(&r) = self.not_cache.get(&f) {
            return r;
        }
        let n = self.nodes[f as usize];
        let lo = self.not_rec(n.lo);
        let hi = self.not_rec(n.hi);
        let r = self.mk(n.var, lo, hi);
        self.not_cache.insert(f, r);
        r
    }

    pub fn and(&mut self, a: BoolFn, b: BoolFn) -> BoolFn {
        BoolFn(self.apply(Op::And, a.0, b.0))
    }

    pub fn or(&mut self, a: BoolFn, b: BoolFn) -> BoolFn {
        BoolFn(self.apply(Op::Or, a.0, b.0))
    }

    pub fn and_not(&mut self, a: BoolFn, b: BoolFn) -> BoolFn {
        let nb = self.not(b);
        self.and(a, nb)
    }

    pub fn and_all(&mut self, fs: impl IntoIterator<Item = BoolFn>) -> BoolFn {
        fs.into_iter().fold(BoolFn::TRUE, |acc, f| self.and(acc, f))
    }

    pub fn or_all(&mut self, fs: impl IntoIterator<Item = BoolFn>) -> BoolFn {
        fs.into_iter().fold(BoolFn::FALSE, |acc, f| self.or(acc, f))
    }

    fn apply(&mut self, op: Op, a: u32, b: u32) -> u32 {
        match op {
            Op::And => {
                if a == 0 || b == 0 {
                    return 0;
                }
                if a == 1 {
                    return b;
                }
                if b == 1 || a == b {
                    return a;
                }
            }
            Op::Or => {
                if a == 1 || b == 1 {
                    return 1;
                }
                if a == 0 {
                    return b;
                }
                if b == 0 || a == b {
                    return a;
                }
            }
        }
        let key = (op, a.min(b), a.max(b));
        if let Some(&r) = self.apply_cache.get(&key) {
            return r;
        }
        let top = self.level(a).min(self.level(b));
        let (alo, ahi) = self.cofactors(a, top);
        let (blo, bhi) = self.cofactors(b, top);
        let lo = self.apply(op, alo, blo);
        let hi = self.apply(op, ahi, bhi);
        let r = self.mk(top, lo, hi);
        self.apply_cache.insert(key, r);
        r
    }

    /// Whether `a ∧ b` is satisfiable. Builds no nodes.
    pub fn compatible(&self, a: BoolFn, b: BoolFn) -> bool {
        let mut seen = HashSet::new();
        self.intersects(a.0, b.0, &mut seen)
    }

    fn intersects(&self, a: u32, b: u32, seen: &mut HashSet<(u32, u32)>) -> bool {
        if a == 0 || b == 0 {
            return false;
        }
        if a == 1 || b == 1 || a == b {
            return true;
        }
        let key = (a.min(b), a.max(b));
        if !seen.insert(key) {
            // Already explored and found empty.
            return false;
        }
        let top = self.level(a).min(self.level(b));
        let (alo, ahi) = self.cofactors(a, top);
        let (blo, bhi) = self.cofactors(b, top);
        self.intersects(alo, blo, seen) || self.intersects(ahi, bhi, seen)
    }

    /// Whether every model of `a` is a model of `b`.
    pub fn implies(&mut self, a: BoolFn, b: BoolFn) -> bool {
        let nb = self.not(b);
        !self.compatible(a, nb)
    }

    /// Fixes `var` to `value` in `f`.
    pub fn restrict(&mut self, f: BoolFn, var: VarId, value: bool) -> BoolFn {
        let mut memo = HashMap::new();
        BoolFn(self.restrict_rec(f.0, var.0, value, &mut memo))
    }

    fn restrict_rec(&mut self, f: u32, var: u32, value: bool, memo: &mut HashMap<u32, u32>) -> u32 {
        let n = self.nodes[f as usize];
        if n.var == TERMINAL_LEVEL || n.var > var {
            return f;
        }
        if n.var == var {
            return if value { n.hi } else { n.lo };
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.restrict_rec(n.lo, var, value, memo);
        let hi = self.restrict_rec(n.hi, var, value, memo);
        let r = self.mk(n.var, lo, hi);
        memo.insert(f, r);
        r
    }

    /// Existential projection of `vars` out of `f`.
    pub fn exists(&mut self, f: BoolFn, vars: &[VarId]) -> BoolFn {
        if vars.is_empty() || f.is_const() {
            return f;
        }
        let mut quantified = vec![false; self.vars.len()];
        for v in vars {
            if let Some(slot) = quantified.get_mut(v.0 as usize) {
                *slot = true;
            }
        }
        let mut memo = HashMap::new();
        BoolFn(self.exists_rec(f.0, &quantified, &mut memo))
    }

    fn exists_rec(&mut self, f: u32, quantified: &[bool], memo: &mut HashMap<u32, u32>) -> u32 {
        if f < 2 {
            return f;
        }
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let n = self.nodes[f as usize];
        let lo = self.exists_rec(n.lo, quantified, memo);
        let r = if quantified[n.var as usize] {
            if lo == 1 {
                1
            } else {
                let hi = self.exists_rec(n.hi, quantified, memo);
                self.apply(Op::Or, lo, hi)
            }
        } else {
            let hi = self.exists_rec(n.hi, quantified, memo);
            self.mk(n.var, lo, hi)
        };
        memo.insert(f, r);
        r
    }

    /// Variables `f` depends on, in order.
    pub fn support(&self, f: BoolFn) -> Vec<VarId> {
        let mut seen = HashSet::new();
        let mut vars = HashSet::new();
        let mut stack = vec![f.0];
        while let Some(g) = stack.pop() {
            if g < 2 || !seen.insert(g) {
                continue;
            }
            let n = self.nodes[g as usize];
            vars.insert(n.var);
            stack.push(n.lo);
            stack.push(n.hi);
        }
        let mut out: Vec<VarId> = vars.into_iter().map(VarId).collect();
        out.sort();
        out
    }

    /// Evaluates `f` under a total assignment.
    pub fn eval(&self, f: BoolFn, assignment: impl Fn(VarId) -> bool) -> bool {
        let mut g = f.0;
        while g >= 2 {
            let n = self.nodes[g as usize];
            g = if assignment(VarId(n.var)) { n.hi } else { n.lo };
        }
        g == 1
    }

    pub fn cube(&mut self, cube: &Cube) -> BoolFn {
        // Build bottom-up so no intermediate nodes are wasted.
        let mut lits = cube.literals.clone();
        lits.sort_by(|a, b| b.0.cmp(&a.0));
        let mut acc = 1;
        for (v, b) in lits {
            acc = if b {
                self.mk(v.0, 0, acc)
            } else {
                self.mk(v.0, acc, 0)
            };
        }
        BoolFn(acc)
    }

    fn sorted_vars(vars: &[VarId]) -> Vec<VarId> {
        let mut vs = vars.to_vec();
        vs.sort();
        vs.dedup();
        vs
    }

    fn project_onto(&mut self, f: BoolFn, vars: &[VarId]) -> BoolFn {
        let others: Vec<VarId> = (0..self.vars.len() as u32)
            .map(VarId)
            .filter(|v| !vars.contains(v))
            .collect();
        self.exists(f, &others)
    }

    /// The lexicographically least cube over `vars` compatible with `f`,
    /// with `false < true` and variables in the global order.
    pub fn some_pure(&mut self, f: BoolFn, vars: &[VarId]) -> Result<Cube, BoolError> {
        if f.is_false() {
            return Err(BoolError::NoCube);
        }
        let vars = Self::sorted_vars(vars);
        let mut g = self.project_onto(f, &vars);
        let mut literals = Vec::with_capacity(vars.len());
        for &v in &vars {
            let lo = self.restrict(g, v, false);
            if lo.is_false() {
                g = self.restrict(g, v, true);
                literals.push((v, true));
            } else {
                g = lo;
                literals.push((v, false));
            }
        }
        Ok(Cube { literals })
    }

    /// All cubes over `vars` compatible with `f`, in lexicographic order.
    pub fn enumerate_pure(&mut self, f: BoolFn, vars: &[VarId]) -> Vec<Cube> {
        let vars = Self::sorted_vars(vars);
        let g = self.project_onto(f, &vars);
        let mut out = Vec::new();
        let mut prefix = Vec::with_capacity(vars.len());
        self.enumerate_rec(g, &vars, &mut prefix, &mut out);
        out
    }

    fn enumerate_rec(
        &mut self,
        g: BoolFn,
        vars: &[VarId],
        prefix: &mut Vec<(VarId, bool)>,
        out: &mut Vec<Cube>,
    ) {
        if g.is_false() {
            return;
        }
        let Some((&v, rest)) = vars.split_first() else {
            out.push(Cube {
                literals: prefix.clone(),
            });
            return;
        };
        for value in [false, true] {
            let sub = self.restrict(g, v, value);
            prefix.push((v, value));
            self.enumerate_rec(sub, rest, prefix, out);
            prefix.pop();
        }
    }

    /// Number of satisfying assignments over `vars` of the projection of
    /// `f` onto `vars`.
    pub fn count_pure(&mut self, f: BoolFn, vars: &[VarId]) -> u64 {
        self.enumerate_pure(f, vars).len() as u64
    }

    /// Renders `f` as a disjunction of the paths to ⊤, using `name` for
    /// variables. Constants print as `t` and `f`.
    pub fn format_with(&self, f: BoolFn, name: &dyn Fn(VarId) -> String) -> String {
        if f.is_false() {
            return "f".into();
        }
        if f.is_true() {
            return "t".into();
        }
        let mut terms = Vec::new();
        let mut path = Vec::new();
        self.paths(f.0, &mut path, &mut terms);
        let mut rendered: Vec<String> = terms
            .iter()
            .map(|lits| {
                lits.iter()
                    .map(|&(v, b)| {
                        if b {
                            name(v)
                        } else {
                            format!("!{}", name(v))
                        }
                    })
                    .collect::<Vec<_>>()
                    .join("&")
            })
            .collect();
        if rendered.len() > 1 {
            for t in &mut rendered {
                if t.contains('&') {
                    *t = format!("({t})");
                }
            }
        }
        rendered.join(" | ")
    }

    fn paths(&self, f: u32, path: &mut Vec<(VarId, bool)>, out: &mut Vec<Vec<(VarId, bool)>>) {
        if f == 0 {
            return;
        }
        if f == 1 {
            out.push(path.clone());
            return;
        }
        let n = self.nodes[f as usize];
        path.push((VarId(n.var), false));
        self.paths(n.lo, path, out);
        path.pop();
        path.push((VarId(n.var), true));
        self.paths(n.hi, path, out);
        path.pop();
    }

    /// [`format_with`](Self::format_with) using declared variable names.
    pub fn format(&self, f: BoolFn) -> String {
        self.format_with(f, &|v| self.vars[v.0 as usize].name.clone())
    }

    /// Copies `f` from another manager, mapping variables by `map`.
    pub fn import(&mut self, src: &BddManager, f: BoolFn, map: &dyn Fn(VarId) -> VarId) -> BoolFn {
        let mut memo = HashMap::new();
        self.import_rec(src, f, map, &mut memo)
    }

    fn import_rec(
        &mut self,
        src: &BddManager,
        f: BoolFn,
        map: &dyn Fn(VarId) -> VarId,
        memo: &mut HashMap<BoolFn, BoolFn>,
    ) -> BoolFn {
        let Some((v, lo, hi)) = src.decompose(f) else {
            return f;
        };
        if let Some(&r) = memo.get(&f) {
            return r;
        }
        let lo = self.import_rec(src, lo, map, memo);
        let hi = self.import_rec(src, hi, map, memo);
        // The variable map may reorder, so rebuild with ite instead of mk.
        let x = BoolFn(self.mk(map(v).0, 0, 1));
        let a = self.and(x, hi);
        let nx = self.not(x);
        let b = self.and(nx, lo);
        let r = self.or(a, b);
        memo.insert(f, r);
        r
    }
}
