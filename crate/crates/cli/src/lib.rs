//! Orchestration for the `bonsai-real` command: loading automata, walking
//! the k schedule and racing the realizability check against the dual
//! check.

use std::fmt;
use std::fs;
use std::io::Write;
use std::path::PathBuf;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::{mpsc, Arc};
use std::thread;
use std::time::Duration;

use anyhow::{bail, Context, Result};
use bonsai_core::automaton::{parse_hoa, Automaton};
use bonsai_core::solver::{solve_with, RunControl, SolveConfig, SolveError, TraceLine};
use bonsai_core::unreal::shift_outputs;

/// `initial, ⌈initial·growth⌉, ...` up to and including `max`.
///
/// Each step grows by at least one so the schedule is strictly increasing.
pub fn k_schedule(initial: i32, growth: f64, max: i32) -> Vec<i32> {
    let mut out = Vec::new();
    let mut k = initial;
    while k < max {
        out.push(k);
        let next = (k as f64 * growth).ceil() as i32;
        k = next.max(k + 1);
    }
    if initial <= max {
        out.push(max.min(k));
    }
    out
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CheckMode {
    Real,
    Unreal,
    Both,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Verdict {
    Realizable,
    Unrealizable,
    Unknown,
}

impl Verdict {
    pub fn exit_code(self) -> i32 {
        match self {
            Verdict::Realizable => 10,
            Verdict::Unrealizable => 20,
            Verdict::Unknown => 0,
        }
    }
}

impl fmt::Display for Verdict {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Verdict::Realizable => "REALIZABLE",
            Verdict::Unrealizable => "UNREALIZABLE",
            Verdict::Unknown => "UNKNOWN",
        })
    }
}

#[derive(Debug, Clone)]
pub struct RunPlan {
    /// Automaton whose accepting states the system must visit only
    /// finitely often.
    pub aut: PathBuf,
    /// Automaton for the complement language, used by the dual check.
    pub neg_aut: Option<PathBuf>,
    /// An automaton already shifted for the dual check; solved as is.
    pub pre_shifted: Option<PathBuf>,
    pub k_initial: i32,
    pub k_growth: f64,
    pub k_max: i32,
    pub check: CheckMode,
    pub config: SolveConfig,
    pub timeout: Option<Duration>,
    pub outs: Option<Vec<String>>,
    pub trace: bool,
}

impl RunPlan {
    pub fn new(aut: PathBuf) -> Self {
        RunPlan {
            aut,
            neg_aut: None,
            pre_shifted: None,
            k_initial: 1,
            k_growth: 2.0,
            k_max: 64,
            check: CheckMode::Real,
            config: SolveConfig::default(),
            timeout: None,
            outs: None,
            trace: false,
        }
    }

    pub fn validate(&self) -> Result<()> {
        if self.k_initial < 1 {
            bail!("initial k must be at least 1");
        }
        if !(self.k_growth > 1.0) {
            bail!("k growth must exceed 1");
        }
        if self.k_max < self.k_initial {
            bail!("--kmax must be at least the initial k");
        }
        if self.timeout.is_some_and(|t| t.is_zero()) {
            bail!("timeout must be positive");
        }
        if self.check != CheckMode::Real && self.neg_aut.is_none() && self.pre_shifted.is_none() {
            bail!("--check unreal and --check both need --neg-aut or --pre-shifted");
        }
        Ok(())
    }

    pub fn schedule(&self) -> Vec<i32> {
        k_schedule(self.k_initial, self.k_growth, self.k_max)
    }
}

pub fn load(path: &PathBuf, outs: Option<&[String]>) -> Result<Automaton> {
    let text = fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let parsed = parse_hoa(&text, outs).with_context(|| format!("parsing {}", path.display()))?;
    for w in &parsed.warnings {
        log::warn!("{}: {w}", path.display());
    }
    Ok(parsed.automaton)
}

struct Side {
    name: &'static str,
    aut: Automaton,
    win: Verdict,
}

enum Outcome {
    Won(Verdict),
    GaveUp,
}

fn walk(side: &Side, schedule: &[i32], base: &SolveConfig, trace: bool, cancel: &AtomicBool) -> Outcome {
    for &k in schedule {
        let cfg = SolveConfig { k, ..base.clone() };
        let mut sink = |l: &TraceLine| {
            let _ = writeln!(std::io::stderr().lock(), "{l}");
        };
        let mut ctl = RunControl {
            cancel: Some(cancel),
            trace: if trace { Some(&mut sink) } else { None },
        };
        if trace {
            eprintln!("# side={} k={k}", side.name);
        }
        match solve_with(&side.aut, &cfg, &mut ctl) {
            Ok(r) if r.realizable => {
                log::info!("{}: positive at k={k} after {} steps", side.name, r.cpre_steps);
                return Outcome::Won(side.win);
            }
            Ok(r) => log::info!("{}: negative at k={k} after {} steps", side.name, r.cpre_steps),
            Err(SolveError::Cancelled) => return Outcome::GaveUp,
            Err(e) => {
                log::warn!("{}: {e} at k={k}", side.name);
                return Outcome::GaveUp;
            }
        }
    }
    Outcome::GaveUp
}

/// Runs every enabled check concurrently, each over the whole schedule.
/// The first positive answer decides and cancels the rest.
pub fn run(plan: &RunPlan) -> Result<Verdict> {
    plan.validate()?;
    let outs = plan.outs.as_deref();
    let mut sides = Vec::new();
    if plan.check != CheckMode::Unreal {
        sides.push(Side {
            name: "real",
            aut: load(&plan.aut, outs)?,
            win: Verdict::Realizable,
        });
    }
    if plan.check != CheckMode::Real {
        if let Some(p) = &plan.neg_aut {
            sides.push(Side {
                name: "unreal",
                aut: shift_outputs(&load(p, outs)?).automaton,
                win: Verdict::Unrealizable,
            });
        }
        if let Some(p) = &plan.pre_shifted {
            sides.push(Side {
                name: "pre-shifted",
                aut: load(p, None)?,
                win: Verdict::Unrealizable,
            });
        }
    }

    let schedule = plan.schedule();
    let cancel = Arc::new(AtomicBool::new(false));
    let (tx, rx) = mpsc::channel();
    let n = sides.len();
    let mut handles = Vec::new();
    for side in sides {
        let (tx, cancel, schedule, cfg) = (tx.clone(), cancel.clone(), schedule.clone(), plan.config.clone());
        let trace = plan.trace;
        handles.push(thread::spawn(move || {
            let _ = tx.send(walk(&side, &schedule, &cfg, trace, &cancel));
        }));
    }
    drop(tx);

    let deadline = plan.timeout.map(|t| std::time::Instant::now() + t);
    let mut verdict = Verdict::Unknown;
    for _ in 0..n {
        let got = match deadline {
            Some(d) => rx.recv_timeout(d.saturating_duration_since(std::time::Instant::now())).ok(),
            None => rx.recv().ok(),
        };
        match got {
            Some(Outcome::Won(v)) => {
                verdict = v;
                break;
            }
            Some(Outcome::GaveUp) => {}
            None => {
                log::info!("timeout");
                break;
            }
        }
    }
    cancel.store(true, Ordering::Relaxed);
    if deadline.is_none() || verdict != Verdict::Unknown {
        for h in handles {
            let _ = h.join();
        }
    }
    Ok(verdict)
}
