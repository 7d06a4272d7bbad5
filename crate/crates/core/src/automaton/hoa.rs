//! Reading and writing the HOA v1 subset used for Büchi automata with a
//! `controllable-AP:` header.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Automaton, AutomatonError, StateId};
use crate::bdd::{BddManager, BoolFn, VarId, VarKind};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum HoaError {
    #[error("{line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported automaton: {0}")]
    Unsupported(String),
    #[error("no `controllable-AP:` header; pass the output propositions explicitly (e.g. `--outs a,b`)")]
    MissingControllable,
    #[error("unknown atomic proposition `{0}` in output list")]
    UnknownOutput(String),
    #[error(transparent)]
    Automaton(#[from] AutomatonError),
}

/// A parsed automaton together with the non-fatal diagnostics collected on
/// the way (dropped ⊥ edges, split states).
#[derive(Debug, Clone)]
pub struct ParsedHoa {
    pub automaton: Automaton,
    pub warnings: Vec<String>,
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Header(String),
    Ident(String),
    Str(String),
    Int(usize),
    Punct(char),
    Body,
    End,
}

#[derive(Debug, Clone)]
struct Spanned {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Spanned>, HoaError> {
    let chars: Vec<char> = text.chars().collect();
    let mut out = Vec::new();
    let (mut i, mut line, mut col) = (0, 1, 1);
    let err = |line, col, msg: &str| HoaError::Syntax {
        line,
        col,
        msg: msg.to_string(),
    };
    while i < chars.len() {
        let c = chars[i];
        let (l0, c0) = (line, col);
        let mut advance = |n: usize, i: &mut usize| {
            for _ in 0..n {
                if chars[*i] == '\n' {
                    line += 1;
                    col = 1;
                } else {
                    col += 1;
                }
                *i += 1;
            }
        };
        if c.is_whitespace() {
            advance(1, &mut i);
            continue;
        }
        if c == '/' && chars.get(i + 1) == Some(&'*') {
            advance(2, &mut i);
            loop {
                if i + 1 >= chars.len() {
                    return Err(err(l0, c0, "unterminated comment"));
                }
                if chars[i] == '*' && chars[i + 1] == '/' {
                    advance(2, &mut i);
                    break;
                }
                advance(1, &mut i);
            }
            continue;
        }
        if c == '"' {
            let mut s = String::new();
            advance(1, &mut i);
            loop {
                match chars.get(i) {
                    None => return Err(err(l0, c0, "unterminated string")),
                    Some('"') => {
                        advance(1, &mut i);
                        break;
                    }
                    Some('\\') => {
                        if let Some(&n) = chars.get(i + 1) {
                            s.push(n);
                        }
                        advance(2, &mut i);
                    }
                    Some(&ch) => {
                        s.push(ch);
                        advance(1, &mut i);
                    }
                }
            }
            out.push(Spanned {
                tok: Tok::Str(s),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < chars.len() && chars[j].is_ascii_digit() {
                j += 1;
            }
            let s: String = chars[i..j].iter().collect();
            let n = s.parse().map_err(|_| err(l0, c0, "integer too large"))?;
            advance(j - i, &mut i);
            out.push(Spanned {
                tok: Tok::Int(n),
                line: l0,
                col: c0,
            });
            continue;
        }
        if c == '-' && chars.get(i + 1) == Some(&'-') {
            let mut j = i + 2;
            while j < chars.len() && chars[j] != '-' {
                j += 1;
            }
            let word: String = chars[i + 2..j].iter().collect();
            if chars.get(j + 1) != Some(&'-') {
                return Err(err(l0, c0, "malformed `--` marker"));
            }
            let tok = match word.as_str() {
                "BODY" => Tok::Body,
                "END" => Tok::End,
                "ABORT" => return Err(err(l0, c0, "automaton aborted (--ABORT--)")),
                _ => return Err(err(l0, c0, "unknown `--` marker")),
            };
            advance(j + 2 - i, &mut i);
            out.push(Spanned { tok, line: l0, col: c0 });
            continue;
        }
        if c.is_ascii_alphabetic() || c == '_' || c == '@' {
            let mut j = i + 1;
            while j < chars.len() && (chars[j].is_ascii_alphanumeric() || chars[j] == '_' || chars[j] == '-') {
                j += 1;
            }
            let word: String = chars[i..j].iter().collect();
            let header = chars.get(j) == Some(&':');
            advance(j - i + usize::from(header), &mut i);
            out.push(Spanned {
                tok: if header { Tok::Header(word) } else { Tok::Ident(word) },
                line: l0,
                col: c0,
            });
            continue;
        }
        if "[]{}()&|!".contains(c) {
            advance(1, &mut i);
            out.push(Spanned {
                tok: Tok::Punct(c),
                line: l0,
                col: c0,
            });
            continue;
        }
        return Err(err(l0, c0, &format!("unexpected character `{c}`")));
    }
    Ok(out)
}

/// Label syntax tree; APs are indices into the `AP:` list.
#[derive(Debug, Clone)]
enum Label {
    Const(bool),
    Ap(usize),
    Not(Box<Label>),
    And(Box<Label>, Box<Label>),
    Or(Box<Label>, Box<Label>),
}

struct Parser {
    toks: Vec<Spanned>,
    pos: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.pos).map(|s| &s.tok)
    }

    fn error(&self, msg: impl Into<String>) -> HoaError {
        let (line, col) = self
            .toks
            .get(self.pos)
            .or(self.toks.last())
            .map(|s| (s.line, s.col))
            .unwrap_or((1, 1));
        HoaError::Syntax {
            line,
            col,
            msg: msg.into(),
        }
    }

    fn next(&mut self) -> Option<Tok> {
        let t = self.toks.get(self.pos).map(|s| s.tok.clone());
        self.pos += 1;
        t
    }

    fn expect_int(&mut self, what: &str) -> Result<usize, HoaError> {
        match self.peek() {
            Some(Tok::Int(n)) => {
                let n = *n;
                self.pos += 1;
                Ok(n)
            }
            _ => Err(self.error(format!("expected {what}"))),
        }
    }

    fn eat_punct(&mut self, c: char) -> bool {
        if self.peek() == Some(&Tok::Punct(c)) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_punct(&mut self, c: char) -> Result<(), HoaError> {
        if self.eat_punct(c) {
            Ok(())
        } else {
            Err(self.error(format!("expected `{c}`")))
        }
    }

    fn label_or(&mut self) -> Result<Label, HoaError> {
        let mut l = self.label_and()?;
        while self.eat_punct('|') {
            let r = self.label_and()?;
            l = Label::Or(Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn label_and(&mut self) -> Result<Label, HoaError> {
        let mut l = self.label_not()?;
        while self.eat_punct('&') {
            let r = self.label_not()?;
            l = Label::And(Box::new(l), Box::new(r));
        }
        Ok(l)
    }

    fn label_not(&mut self) -> Result<Label, HoaError> {
        if self.eat_punct('!') {
            return Ok(Label::Not(Box::new(self.label_not()?)));
        }
        match self.peek().cloned() {
            Some(Tok::Int(n)) => {
                self.pos += 1;
                Ok(Label::Ap(n))
            }
            Some(Tok::Ident(w)) if w == "t" => {
                self.pos += 1;
                Ok(Label::Const(true))
            }
            Some(Tok::Ident(w)) if w == "f" => {
                self.pos += 1;
                Ok(Label::Const(false))
            }
            Some(Tok::Ident(w)) if w.starts_with('@') => Err(HoaError::Unsupported(format!("alias `{w}` in label"))),
            Some(Tok::Punct('(')) => {
                self.pos += 1;
                let l = self.label_or()?;
                self.expect_punct(')')?;
                Ok(l)
            }
            _ => Err(self.error("expected label expression")),
        }
    }

    /// Optional `{n m ...}` acceptance set list.
    fn acc_sets(&mut self) -> Result<Vec<usize>, HoaError> {
        let mut sets = Vec::new();
        if self.eat_punct('{') {
            while !self.eat_punct('}') {
                sets.push(self.expect_int("acceptance set index")?);
            }
        }
        Ok(sets)
    }

    /// Skips the arguments of a header we do not interpret.
    fn skip_header_args(&mut self) {
        while let Some(t) = self.peek() {
            if matches!(t, Tok::Header(_) | Tok::Body) {
                break;
            }
            self.pos += 1;
        }
    }
}

struct RawEdge {
    src: StateId,
    label: Label,
    dst: StateId,
    marked: bool,
}

/// Parses one automaton. `outs`, when given, names the output propositions
/// and overrides any `controllable-AP:` header.
pub fn parse_hoa(text: &str, outs: Option<&[String]>) -> Result<ParsedHoa, HoaError> {
    let mut p = Parser { toks: lex(text)?, pos: 0 };
    let mut warnings = Vec::new();

    match (p.next(), p.next()) {
        (Some(Tok::Header(h)), Some(Tok::Ident(v))) if h == "HOA" && v == "v1" => {}
        _ => {
            p.pos = 0;
            return Err(p.error("expected `HOA: v1`"));
        }
    }

    let mut num_states: Option<usize> = None;
    let mut start: Option<usize> = None;
    let mut aps: Vec<String> = Vec::new();
    let mut controllable: Option<Vec<usize>> = None;
    let mut acceptance_ok = false;

    loop {
        let Some(tok) = p.peek().cloned() else {
            return Err(p.error("missing `--BODY--`"));
        };
        match tok {
            Tok::Body => {
                p.pos += 1;
                break;
            }
            Tok::Header(h) => {
                p.pos += 1;
                match h.as_str() {
                    "States" => num_states = Some(p.expect_int("state count")?),
                    "Start" => {
                        if start.is_some() {
                            return Err(HoaError::Unsupported("multiple initial states".into()));
                        }
                        start = Some(p.expect_int("initial state")?);
                        if p.peek() == Some(&Tok::Punct('&')) {
                            return Err(HoaError::Unsupported("alternating initial state".into()));
                        }
                    }
                    "AP" => {
                        let n = p.expect_int("AP count")?;
                        for _ in 0..n {
                            match p.next() {
                                Some(Tok::Str(s)) => aps.push(s),
                                _ => {
                                    p.pos -= 1;
                                    return Err(p.error("expected quoted AP name"));
                                }
                            }
                        }
                    }
                    "Acceptance" => {
                        let n = p.expect_int("acceptance set count")?;
                        let inf = matches!(p.next(), Some(Tok::Ident(w)) if w == "Inf");
                        let ok = n == 1
                            && inf
                            && p.eat_punct('(')
                            && matches!(p.next(), Some(Tok::Int(0)))
                            && p.eat_punct(')');
                        if !ok {
                            return Err(HoaError::Unsupported("acceptance condition is not `1 Inf(0)`".into()));
                        }
                        acceptance_ok = true;
                    }
                    "acc-name" => {
                        match p.next() {
                            Some(Tok::Ident(w)) if w == "Buchi" => {}
                            Some(Tok::Ident(w)) => {
                                return Err(HoaError::Unsupported(format!("acceptance `{w}`")));
                            }
                            _ => return Err(p.error("expected acceptance name")),
                        }
                        p.skip_header_args();
                    }
                    "controllable-AP" => {
                        let mut idx = Vec::new();
                        while let Some(Tok::Int(n)) = p.peek() {
                            idx.push(*n);
                            p.pos += 1;
                        }
                        controllable = Some(idx);
                    }
                    _ => p.skip_header_args(),
                }
            }
            _ => return Err(p.error("expected a header")),
        }
    }
    if !acceptance_ok {
        return Err(HoaError::Unsupported("missing `Acceptance: 1 Inf(0)`".into()));
    }

    // Body.
    let mut edges: Vec<RawEdge> = Vec::new();
    let mut state_buchi: Vec<StateId> = Vec::new();
    let mut current: Option<StateId> = None;
    let mut max_state = 0usize;
    loop {
        match p.peek().cloned() {
            None => return Err(p.error("missing `--END--`")),
            Some(Tok::End) => {
                p.pos += 1;
                break;
            }
            Some(Tok::Header(h)) if h == "State" => {
                p.pos += 1;
                if p.peek() == Some(&Tok::Punct('[')) {
                    return Err(HoaError::Unsupported("state labels".into()));
                }
                let q = p.expect_int("state number")?;
                if let Some(Tok::Str(_)) = p.peek() {
                    p.pos += 1;
                }
                let sets = p.acc_sets()?;
                check_sets(&sets)?;
                if !sets.is_empty() {
                    state_buchi.push(q);
                }
                max_state = max_state.max(q);
                current = Some(q);
            }
            Some(Tok::Punct('[')) => {
                let Some(src) = current else {
                    return Err(p.error("edge outside of a state"));
                };
                p.pos += 1;
                let label = p.label_or()?;
                p.expect_punct(']')?;
                let dst = p.expect_int("destination state")?;
                if p.peek() == Some(&Tok::Punct('&')) {
                    return Err(HoaError::Unsupported("universal branching".into()));
                }
                let sets = p.acc_sets()?;
                check_sets(&sets)?;
                max_state = max_state.max(dst);
                edges.push(RawEdge {
                    src,
                    label,
                    dst,
                    marked: !sets.is_empty(),
                });
            }
            Some(Tok::Int(_)) => return Err(HoaError::Unsupported("implicit edge labels".into())),
            _ => return Err(p.error("unexpected token in body")),
        }
    }

    let num_states = match num_states {
        Some(n) => {
            if n == 0 || max_state >= n || start.is_some_and(|s| s >= n) {
                return Err(HoaError::Syntax {
                    line: 1,
                    col: 1,
                    msg: format!("state index out of range for `States: {n}`"),
                });
            }
            n
        }
        None => max_state.max(start.unwrap_or(0)) + 1,
    };
    let initial = start.ok_or_else(|| HoaError::Unsupported("no initial state".into()))?;

    // Variables: inputs first, then outputs, each in AP order.
    let is_output: Vec<bool> = match outs {
        Some(names) => {
            for n in names {
                if !aps.contains(n) {
                    return Err(HoaError::UnknownOutput(n.clone()));
                }
            }
            aps.iter().map(|a| names.contains(a)).collect()
        }
        None => {
            let ctl = controllable.ok_or(HoaError::MissingControllable)?;
            let mut flags = vec![false; aps.len()];
            for i in ctl {
                *flags.get_mut(i).ok_or_else(|| HoaError::Syntax {
                    line: 1,
                    col: 1,
                    msg: format!("controllable AP {i} out of range"),
                })? = true;
            }
            flags
        }
    };
    let mut bdd = BddManager::new();
    let mut ap_var = vec![VarId(0); aps.len()];
    for want_output in [false, true] {
        for (i, name) in aps.iter().enumerate() {
            if is_output[i] == want_output {
                let kind = if want_output { VarKind::Output } else { VarKind::Input };
                ap_var[i] = bdd
                    .declare(name, kind)
                    .map_err(|e| HoaError::Unsupported(e.to_string()))?;
            }
        }
    }

    let mut built = Vec::with_capacity(edges.len());
    for e in &edges {
        let label = build_label(&mut bdd, &e.label, &ap_var)?;
        if label.is_false() {
            warnings.push(format!("dropped edge {} -> {} labelled false", e.src, e.dst));
            log::warn!("dropping edge {} -> {} with an unsatisfiable label", e.src, e.dst);
            continue;
        }
        built.push((e, label));
    }

    // Turn acceptance marks on edges into Büchi states, copying a state when
    // it is entered both through marked and unmarked edges.
    let mut marked_in = vec![false; num_states];
    let mut unmarked_in = vec![false; num_states];
    for (e, _) in &built {
        if e.marked {
            marked_in[e.dst] = true;
        } else {
            unmarked_in[e.dst] = true;
        }
    }
    let mut buchi = vec![false; num_states];
    for q in state_buchi {
        buchi[q] = true;
    }
    let mut copy_of: Vec<Option<StateId>> = vec![None; num_states];
    let mut total = num_states;
    for q in 0..num_states {
        if buchi[q] || !marked_in[q] {
            continue;
        }
        if unmarked_in[q] {
            copy_of[q] = Some(total);
            total += 1;
            warnings.push(format!("state {q} split into a Büchi copy {}", total - 1));
        } else {
            buchi[q] = true;
        }
    }

    let mut aut = Automaton::new(bdd, total, initial)?;
    for q in 0..num_states {
        if buchi[q] {
            aut.set_buchi(q, true)?;
        }
        if let Some(c) = copy_of[q] {
            aut.set_buchi(c, true)?;
        }
    }
    for (e, label) in built {
        let dst = match (e.marked, copy_of[e.dst]) {
            (true, Some(c)) => c,
            _ => e.dst,
        };
        aut.add_transition(e.src, label, dst)?;
        if let Some(c) = copy_of[e.src] {
            aut.add_transition(c, label, dst)?;
        }
    }
    Ok(ParsedHoa {
        automaton: aut,
        warnings,
    })
}

fn check_sets(sets: &[usize]) -> Result<(), HoaError> {
    if sets.iter().any(|&s| s != 0) {
        return Err(HoaError::Unsupported("acceptance set other than 0".into()));
    }
    Ok(())
}

fn build_label(bdd: &mut BddManager, l: &Label, ap_var: &[VarId]) -> Result<BoolFn, HoaError> {
    Ok(match l {
        Label::Const(b) => bdd.constant(*b),
        Label::Ap(i) => {
            let v = *ap_var
                .get(*i)
                .ok_or_else(|| HoaError::Unsupported(format!("AP index {i} not declared")))?;
            bdd.var(v).expect("declared above")
        }
        Label::Not(a) => {
            let a = build_label(bdd, a, ap_var)?;
            bdd.not(a)
        }
        Label::And(a, b) => {
            let a = build_label(bdd, a, ap_var)?;
            let b = build_label(bdd, b, ap_var)?;
            bdd.and(a, b)
        }
        Label::Or(a, b) => {
            let a = build_label(bdd, a, ap_var)?;
            let b = build_label(bdd, b, ap_var)?;
            bdd.or(a, b)
        }
    })
}

/// Writes the automaton in the same HOA subset, with state-based
/// acceptance and APs in variable order.
pub fn print_hoa(aut: &Automaton) -> String {
    print_hoa_annotated(aut, &[], &[])
}

/// Like [`print_hoa`], with header comment lines and optional per-state
/// names.
pub fn print_hoa_annotated(aut: &Automaton, comments: &[String], state_names: &[String]) -> String {
    let mut s = String::new();
    let bdd = &aut.bdd;
    writeln!(s, "HOA: v1").unwrap();
    for c in comments {
        writeln!(s, "/* {} */", c.replace("*/", "* /")).unwrap();
    }
    writeln!(s, "States: {}", aut.num_states()).unwrap();
    writeln!(s, "Start: {}", aut.initial()).unwrap();
    let names: Vec<String> = bdd.vars().map(|(_, v)| format!("\"{}\"", v.name)).collect();
    writeln!(s, "AP: {} {}", names.len(), names.join(" ")).unwrap();
    writeln!(s, "acc-name: Buchi").unwrap();
    writeln!(s, "Acceptance: 1 Inf(0)").unwrap();
    let ctl: Vec<String> = bdd
        .vars()
        .filter(|(_, v)| v.kind == VarKind::Output)
        .map(|(id, _)| id.0.to_string())
        .collect();
    writeln!(s, "controllable-AP: {}", ctl.join(" ")).unwrap();
    writeln!(s, "properties: trans-labels explicit-labels state-acc").unwrap();
    writeln!(s, "--BODY--").unwrap();
    for q in 0..aut.num_states() {
        write!(s, "State: {q}").unwrap();
        if let Some(n) = state_names.get(q) {
            write!(s, " \"{}\"", n.replace('"', "'")).unwrap();
        }
        if aut.is_buchi(q) {
            write!(s, " {{0}}").unwrap();
        }
        writeln!(s).unwrap();
        for t in aut.transitions().iter().filter(|t| t.src == q) {
            let label = bdd.format_with(t.label, &|v| v.0.to_string());
            writeln!(s, "[{label}] {}", t.dst).unwrap();
        }
    }
    writeln!(s, "--END--").unwrap();
    s
}
