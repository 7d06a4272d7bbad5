//! The backward fixed point: starting from the downward closure of the
//! all-`k` vector, apply controllable predecessors until no input-action
//! changes the set, then check whether the initial state can be
//! nonnegative.

mod picker;

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use thiserror::Error;

pub use picker::{PickerState, PickerStrategy};

use crate::actions::{ActionTable, InputSelection, IoAction};
use crate::automaton::{preprocess, split_boolean, Automaton, BoolSplitMode};
use crate::downset::{AntichainDownset, BinnedDownset, Downset, DownsetBackend, FullSetDownset, KdTreeDownset};
use crate::valuation::{LaneWidth, Lanes16, Lanes8, Layout, PlainVector, Valuation, ValuationError, VectorBackend};

pub const DEFAULT_STEP_BUDGET: u64 = 1_000_000;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SolveError {
    #[error("step budget of {0} cpre applications exhausted")]
    Aborted(u64),
    #[error("cancelled")]
    Cancelled,
    #[error(transparent)]
    Valuation(#[from] ValuationError),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveConfig {
    pub k: i32,
    pub vector: VectorBackend,
    pub downset: DownsetBackend,
    pub bool_split: BoolSplitMode,
    pub inputs: InputSelection,
    pub precompute: bool,
    pub picker: PickerStrategy,
    pub seed: u64,
    pub step_budget: u64,
}

impl Default for SolveConfig {
    fn default() -> Self {
        SolveConfig {
            k: 1,
            vector: VectorBackend::Lanes,
            downset: DownsetBackend::KdTree,
            bool_split: BoolSplitMode::Bounded,
            inputs: InputSelection::Refined,
            precompute: true,
            picker: PickerStrategy::Critical,
            seed: 0,
            step_budget: DEFAULT_STEP_BUDGET,
        }
    }
}

impl SolveConfig {
    pub fn with_k(k: i32) -> Self {
        SolveConfig { k, ..Self::default() }
    }
}

impl fmt::Display for SolveConfig {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "k={} vector={} downset={} bool-states={} inputs={} precompute={} picker={} seed={}",
            self.k,
            self.vector,
            self.downset,
            if self.bool_split == BoolSplitMode::None { "off" } else { "on" },
            if self.inputs == InputSelection::Pure { "pure" } else { "refined" },
            if self.precompute { "on" } else { "off" },
            self.picker,
            self.seed
        )
    }
}

/// One cpre application, as reported to a trace sink.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct TraceLine {
    pub iter: u64,
    pub input: String,
    pub antichain: usize,
    pub changed: bool,
}

impl fmt::Display for TraceLine {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "iter={} input={} antichain={} changed={}",
            self.iter, self.input, self.antichain, self.changed as u8
        )
    }
}

/// Optional cancellation and tracing for a run.
#[derive(Default)]
pub struct RunControl<'a> {
    pub cancel: Option<&'a AtomicBool>,
    pub trace: Option<&'a mut dyn FnMut(&TraceLine)>,
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SolveReport {
    pub realizable: bool,
    pub cpre_steps: u64,
    /// Maximal elements of the fixed point, one value per state (boolean
    /// states read as 0 or -1), sorted.
    pub antichain: Vec<Vec<i32>>,
}

/// Writes `bwd(vals, a)` into `out`: for each state the minimum over the
/// pairs leaving it of the saturated successor value, or `k` without pairs.
fn image_into(pairs: &[crate::actions::Pair], vals: &[i32], k: i32, out: &mut [i32]) {
    out.fill(k);
    for p in pairs {
        let v = (vals[p.dst as usize] - p.dec as i32).max(-1);
        let slot = &mut out[p.src as usize];
        if v < *slot {
            *slot = v;
        }
    }
}

fn ge(a: &[i32], b: &[i32]) -> bool {
    a.iter().zip(b).all(|(x, y)| x >= y)
}

/// One backward step of every maximal element of `s`, closed downward.
pub fn bwd<V: Valuation, D: Downset<V>>(layout: &Layout, s: &D, a: &IoAction) -> D {
    let n = layout.num_states();
    let (mut vals, mut img) = (Vec::with_capacity(n), vec![0; n]);
    let images = s
        .max_elements()
        .iter()
        .map(|v| {
            layout.values(v, &mut vals);
            image_into(&a.pairs, &vals, layout.k(), &mut img);
            layout.vector_unchecked(&img)
        })
        .collect();
    D::from_vectors(images)
}

/// `s` intersected with the union of `bwd(s, a)` over the io-actions of one
/// input-action.
pub fn cpre<V: Valuation, D: Downset<V>>(layout: &Layout, s: &D, ios: &[IoAction]) -> D {
    let mut u = D::empty();
    for a in ios {
        for v in bwd(layout, s, a).max_elements() {
            u.insert(v);
        }
    }
    s.intersect(&u)
}

struct Run<V, D> {
    layout: Arc<Layout>,
    s: D,
    elems: Vec<(V, Vec<i32>)>,
    img: Vec<i32>,
}

impl<V: Valuation, D: Downset<V>> Run<V, D> {
    fn new(layout: Arc<Layout>) -> Self {
        let s = D::from_vector(layout.top());
        let img = vec![0; layout.num_states()];
        let mut r = Run {
            layout,
            s,
            elems: Vec::new(),
            img,
        };
        r.refresh();
        r
    }

    fn refresh(&mut self) {
        let layout = &self.layout;
        self.elems = self
            .s
            .max_elements()
            .into_iter()
            .map(|v| {
                let mut vals = Vec::new();
                layout.values(&v, &mut vals);
                (v, vals)
            })
            .collect();
    }

    /// Applies cpre for one input-action; returns whether the set shrank.
    fn apply(&mut self, ios: &[IoAction]) -> bool {
        let k = self.layout.k();
        let img = &mut self.img;
        // Cheap test first: if every maximal element is reproduced by the
        // image of itself under some io-action, nothing can be removed.
        let kept = self.elems.iter().all(|(_, sv)| {
            ios.iter().any(|a| {
                image_into(&a.pairs, sv, k, img);
                ge(img, sv)
            })
        });
        if kept {
            return false;
        }
        let mut images = Vec::with_capacity(ios.len() * self.elems.len());
        for a in ios {
            for (_, sv) in &self.elems {
                image_into(&a.pairs, sv, k, img);
                images.push(self.layout.vector_unchecked(img));
            }
        }
        let u = D::from_vectors(images);
        if self.elems.iter().all(|(v, _)| u.contains(v)) {
            return false;
        }
        self.s = self.s.intersect(&u);
        self.refresh();
        true
    }
}

fn fixed_point<V: Valuation, D: Downset<V>>(
    aut: &Automaton,
    table: &ActionTable,
    layout: Arc<Layout>,
    cfg: &SolveConfig,
    ctl: &mut RunControl<'_>,
) -> Result<SolveReport, SolveError> {
    let mut run: Run<V, D> = Run::new(layout.clone());
    let mut picker = PickerState::new(cfg.picker, table.len(), cfg.seed);
    let mut steps = 0u64;
    loop {
        let mut progressed = false;
        for idx in picker.scan() {
            if ctl.cancel.is_some_and(|c| c.load(Ordering::Relaxed)) {
                return Err(SolveError::Cancelled);
            }
            if steps >= cfg.step_budget {
                return Err(SolveError::Aborted(cfg.step_budget));
            }
            steps += 1;
            let changed = run.apply(table.get(aut, idx));
            if let Some(trace) = ctl.trace.as_mut() {
                trace(&TraceLine {
                    iter: steps,
                    input: aut.bdd.format(table.input(idx)),
                    antichain: run.elems.len(),
                    changed,
                });
            }
            if changed {
                picker.success(idx);
                progressed = true;
                break;
            }
        }
        if !progressed {
            break;
        }
    }
    let realizable = run.s.contains(&layout.witness(aut.initial()));
    let mut antichain: Vec<Vec<i32>> = run.elems.into_iter().map(|(_, vals)| vals).collect();
    antichain.sort();
    Ok(SolveReport {
        realizable,
        cpre_steps: steps,
        antichain,
    })
}

fn with_downset<V: Valuation>(
    aut: &Automaton,
    table: &ActionTable,
    layout: Arc<Layout>,
    cfg: &SolveConfig,
    ctl: &mut RunControl<'_>,
) -> Result<SolveReport, SolveError> {
    match cfg.downset {
        DownsetBackend::Antichain => fixed_point::<V, AntichainDownset<V>>(aut, table, layout, cfg, ctl),
        DownsetBackend::Full => fixed_point::<V, FullSetDownset<V>>(aut, table, layout, cfg, ctl),
        DownsetBackend::KdTree => fixed_point::<V, KdTreeDownset<V>>(aut, table, layout, cfg, ctl),
        DownsetBackend::Bins => fixed_point::<V, BinnedDownset<V>>(aut, table, layout, cfg, ctl),
    }
}

/// Runs the fixed point and reports the answer with run statistics.
pub fn solve_with(aut: &Automaton, cfg: &SolveConfig, ctl: &mut RunControl<'_>) -> Result<SolveReport, SolveError> {
    let mut aut = preprocess(aut);
    let split = split_boolean(&aut, cfg.bool_split);
    let layout = Layout::new(cfg.k, &split)?;
    let table = ActionTable::build(&mut aut, cfg.inputs, cfg.precompute);
    let aut = &aut;
    match (cfg.vector, layout.lane_width()) {
        (VectorBackend::Plain, LaneWidth::I8) => with_downset::<PlainVector<i8>>(aut, &table, layout, cfg, ctl),
        (VectorBackend::Plain, LaneWidth::I16) => with_downset::<PlainVector<i16>>(aut, &table, layout, cfg, ctl),
        (VectorBackend::Lanes, LaneWidth::I8) => with_downset::<Lanes8>(aut, &table, layout, cfg, ctl),
        (VectorBackend::Lanes, LaneWidth::I16) => with_downset::<Lanes16>(aut, &table, layout, cfg, ctl),
    }
}

/// Whether the fixed point contains a vector with the initial state
/// nonnegative.
pub fn solve(aut: &Automaton, cfg: &SolveConfig) -> Result<bool, SolveError> {
    solve_with(aut, cfg, &mut RunControl::default()).map(|r| r.realizable)
}
