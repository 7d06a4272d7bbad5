//! Python bindings for the realizability solver.

use bonsai_core::actions::InputSelection;
use bonsai_core::automaton::{self, BoolSplitMode};
use bonsai_core::downset::{DownsetBackend, DynDownset};
use bonsai_core::oracle;
use bonsai_core::solver::{self, PickerStrategy, RunControl, SolveConfig, DEFAULT_STEP_BUDGET};
use bonsai_core::unreal;
use bonsai_core::valuation::{Layout, PlainVector, Valuation, VectorBackend};
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;

fn value_err(e: impl std::fmt::Display) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn downset_backend(name: &str) -> PyResult<DownsetBackend> {
    DownsetBackend::ALL
        .into_iter()
        .find(|b| b.to_string() == name)
        .ok_or_else(|| value_err(format!("unknown downset backend {name:?}")))
}

/// A Büchi automaton with a BDD-labelled transition relation.
#[pyclass(module = "bonsai", skip_from_py_object)]
#[derive(Clone)]
struct Automaton {
    inner: automaton::Automaton,
}

#[pymethods]
impl Automaton {
    /// Parses HOA text. `outs` overrides the controllable propositions.
    #[staticmethod]
    #[pyo3(signature = (text, outs=None))]
    fn parse(text: &str, outs: Option<Vec<String>>) -> PyResult<Self> {
        let parsed = automaton::parse_hoa(text, outs.as_deref()).map_err(value_err)?;
        Ok(Automaton { inner: parsed.automaton })
    }

    #[getter]
    fn num_states(&self) -> usize {
        self.inner.num_states()
    }

    #[getter]
    fn initial(&self) -> usize {
        self.inner.initial()
    }

    #[getter]
    fn buchi_states(&self) -> Vec<usize> {
        self.inner.buchi_states().collect()
    }

    #[getter]
    fn num_transitions(&self) -> usize {
        self.inner.transitions().len()
    }

    /// States visited at most once along any run.
    fn bounded_states(&self) -> Vec<usize> {
        automaton::bounded_states(&self.inner)
    }

    fn to_hoa(&self) -> String {
        automaton::print_hoa(&self.inner)
    }

    fn __repr__(&self) -> String {
        format!(
            "Automaton(states={}, transitions={}, buchi={:?})",
            self.inner.num_states(),
            self.inner.transitions().len(),
            self.buchi_states()
        )
    }
}

#[allow(clippy::too_many_arguments)]
fn config(
    k: i32,
    vector: &str,
    downset: &str,
    bool_states: bool,
    inputs: &str,
    precompute: bool,
    picker: &str,
    seed: u64,
    step_budget: u64,
) -> PyResult<SolveConfig> {
    Ok(SolveConfig {
        k,
        vector: match vector {
            "plain" => VectorBackend::Plain,
            "lanes" => VectorBackend::Lanes,
            _ => return Err(value_err(format!("unknown vector backend {vector:?}"))),
        },
        downset: downset_backend(downset)?,
        bool_split: if bool_states { BoolSplitMode::Bounded } else { BoolSplitMode::None },
        inputs: match inputs {
            "pure" => InputSelection::Pure,
            "refined" => InputSelection::Refined,
            _ => return Err(value_err(format!("unknown input mode {inputs:?}"))),
        },
        precompute,
        picker: picker.parse::<PickerStrategy>().map_err(value_err)?,
        seed,
        step_budget,
    })
}

/// Result of a fixed-point computation.
#[pyclass(module = "bonsai", get_all)]
struct Report {
    realizable: bool,
    cpre_steps: u64,
    antichain: Vec<Vec<i32>>,
}

#[pymethods]
impl Report {
    fn __repr__(&self) -> String {
        format!(
            "Report(realizable={}, cpre_steps={}, antichain={})",
            self.realizable,
            self.cpre_steps,
            self.antichain.len()
        )
    }
}

/// Solves the bounded game on `aut` and returns the full report.
#[pyfunction]
#[pyo3(signature = (aut, k=1, *, vector="lanes", downset="kdtree", bool_states=true, inputs="refined",
    precompute=true, picker="critical", seed=0, step_budget=DEFAULT_STEP_BUDGET))]
#[allow(clippy::too_many_arguments)]
fn solve(
    py: Python<'_>,
    aut: &Automaton,
    k: i32,
    vector: &str,
    downset: &str,
    bool_states: bool,
    inputs: &str,
    precompute: bool,
    picker: &str,
    seed: u64,
    step_budget: u64,
) -> PyResult<Report> {
    let cfg = config(k, vector, downset, bool_states, inputs, precompute, picker, seed, step_budget)?;
    let aut = &aut.inner;
    let r = py
        .detach(|| solver::solve_with(aut, &cfg, &mut RunControl::default()))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    Ok(Report {
        realizable: r.realizable,
        cpre_steps: r.cpre_steps,
        antichain: r.antichain,
    })
}

/// True if the environment wins the shifted game on `neg` at bound `k`.
#[pyfunction]
#[pyo3(signature = (neg, k=1))]
fn check_unreal(py: Python<'_>, neg: &Automaton, k: i32) -> PyResult<bool> {
    let neg = &neg.inner;
    py.detach(|| unreal::check_unreal(neg, &SolveConfig::with_k(k)))
        .map_err(|e| PyRuntimeError::new_err(e.to_string()))
}

/// The output-shifted automaton as annotated HOA text.
#[pyfunction]
fn shift_outputs(aut: &Automaton) -> String {
    unreal::shift_outputs(&aut.inner).to_hoa()
}

/// Brute-force reference answer; only for tiny automata.
#[pyfunction]
fn oracle_solve(aut: &Automaton, k: i32) -> PyResult<bool> {
    oracle::oracle_solve(&aut.inner, k).map_err(value_err)
}

/// A downward-closed set of integer vectors over `[-1, k]^n`.
#[pyclass(module = "bonsai", skip_from_py_object)]
#[derive(Clone)]
struct Downset {
    layout: std::sync::Arc<Layout>,
    inner: DynDownset<PlainVector<i16>>,
}

impl Downset {
    fn vector(&self, v: Vec<i32>) -> PyResult<PlainVector<i16>> {
        if v.len() != self.layout.num_states() {
            return Err(value_err(format!("expected {} entries", self.layout.num_states())));
        }
        self.layout.vector(&v).map_err(value_err)
    }

    fn check_shape(&self, other: &Downset) -> PyResult<()> {
        if self.layout.k() != other.layout.k() || self.layout.num_states() != other.layout.num_states() {
            return Err(value_err("downsets have different shapes"));
        }
        Ok(())
    }

    fn with(&self, inner: DynDownset<PlainVector<i16>>) -> Downset {
        Downset {
            layout: self.layout.clone(),
            inner,
        }
    }
}

#[pymethods]
impl Downset {
    #[new]
    #[pyo3(signature = (k, n, backend="antichain"))]
    fn new(k: i32, n: usize, backend: &str) -> PyResult<Self> {
        Ok(Downset {
            layout: Layout::counted_only(k, n).map_err(value_err)?,
            inner: DynDownset::empty(downset_backend(backend)?),
        })
    }

    /// Adds the closure of `v`; returns whether the set grew.
    fn insert(&mut self, v: Vec<i32>) -> PyResult<bool> {
        let v = self.vector(v)?;
        Ok(self.inner.insert(v))
    }

    fn __contains__(&self, v: Vec<i32>) -> PyResult<bool> {
        Ok(self.inner.contains(&self.vector(v)?))
    }

    fn union(&self, other: &Downset) -> PyResult<Downset> {
        self.check_shape(other)?;
        Ok(self.with(self.inner.union(&other.inner)))
    }

    fn intersect(&self, other: &Downset) -> PyResult<Downset> {
        self.check_shape(other)?;
        Ok(self.with(self.inner.intersect(&other.inner)))
    }

    /// Maximal elements, sorted.
    fn max_elements(&self) -> Vec<Vec<i32>> {
        let mut out: Vec<Vec<i32>> = self
            .inner
            .max_elements()
            .iter()
            .map(|v| (0..v.counted_len()).map(|i| v.counted(i)).collect())
            .collect();
        out.sort();
        out
    }

    fn __len__(&self) -> usize {
        self.inner.max_elements().len()
    }

    fn __eq__(&self, other: &Downset) -> bool {
        self.check_shape(other).is_ok() && self.inner.equal(&other.inner)
    }

    fn __repr__(&self) -> String {
        format!("Downset(k={}, n={}, {})", self.layout.k(), self.layout.num_states(), self.inner.dump())
    }
}

#[pymodule]
fn bonsai(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<Automaton>()?;
    m.add_class::<Report>()?;
    m.add_class::<Downset>()?;
    m.add_function(wrap_pyfunction!(solve, m)?)?;
    m.add_function(wrap_pyfunction!(check_unreal, m)?)?;
    m.add_function(wrap_pyfunction!(shift_outputs, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_solve, m)?)?;
    Ok(())
}
