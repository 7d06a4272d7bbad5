use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Duration;

use anyhow::{bail, Result};
use bonsai_cli::{run, CheckMode, RunPlan};
use bonsai_core::actions::InputSelection;
use bonsai_core::automaton::BoolSplitMode;
use bonsai_core::downset::DownsetBackend;
use bonsai_core::solver::{PickerStrategy, SolveConfig, DEFAULT_STEP_BUDGET};
use bonsai_core::valuation::VectorBackend;
use clap::{Parser, ValueEnum};

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Check {
    Real,
    Unreal,
    Both,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum OnOff {
    On,
    Off,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum DownsetArg {
    Antichain,
    Full,
    Kdtree,
    Bins,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum VectorArg {
    Plain,
    Lanes,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum InputsArg {
    Pure,
    Refined,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum PickerArg {
    Rr,
    Critical,
    CriticalPq,
    CriticalRandp,
    CriticalRandf,
}

/// Decides realizability of a specification given as a Büchi automaton in
/// HOA format. Prints REALIZABLE (exit 10), UNREALIZABLE (exit 20) or
/// UNKNOWN (exit 0).
#[derive(Debug, Parser)]
#[command(name = "bonsai-real", version)]
struct Args {
    /// Automaton whose accepting states the system must avoid visiting
    /// infinitely often.
    #[arg(long, required_unless_present = "ltl")]
    aut: Option<PathBuf>,
    /// Automaton for the complement language, used by the dual check.
    #[arg(long)]
    neg_aut: Option<PathBuf>,
    /// Automaton already prepared for the dual check; solved without
    /// further transformation.
    #[arg(long)]
    pre_shifted: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "real")]
    check: Check,
    /// Initial k.
    #[arg(short = 'k', long = "k", default_value_t = 1)]
    k: i32,
    #[arg(long, default_value_t = 2.0)]
    kgrowth: f64,
    #[arg(long, default_value_t = 64)]
    kmax: i32,
    /// Wall-clock limit in seconds.
    #[arg(long)]
    timeout: Option<f64>,
    /// Comma-separated controllable atomic propositions.
    #[arg(long, value_delimiter = ',')]
    outs: Option<Vec<String>>,
    #[arg(long, value_enum, default_value = "kdtree")]
    downset: DownsetArg,
    #[arg(long, value_enum, default_value = "lanes")]
    vector: VectorArg,
    #[arg(long, value_enum, default_value = "on")]
    bool_states: OnOff,
    #[arg(long, value_enum, default_value = "refined")]
    inputs: InputsArg,
    #[arg(long, value_enum, default_value = "on")]
    precompute: OnOff,
    #[arg(long, value_enum, default_value = "critical")]
    picker: PickerArg,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Print one line per cpre application to stderr.
    #[arg(long)]
    trace: bool,
    /// Maximum cpre applications per run.
    #[arg(long, default_value_t = DEFAULT_STEP_BUDGET)]
    step_budget: u64,
    /// Reserved; LTL input is not supported.
    #[arg(long)]
    ltl: Option<String>,
}

fn plan(args: Args) -> Result<RunPlan> {
    if args.ltl.is_some() {
        bail!("LTL input is not supported; translate the formula to a Büchi automaton in HOA format with an external tool (e.g. ltl2tgba) and pass it with --aut");
    }
    let aut = args.aut.expect("required by clap");
    let timeout = match args.timeout {
        Some(t) if !(t > 0.0) || !t.is_finite() => bail!("--timeout must be a positive number of seconds"),
        Some(t) => Some(Duration::from_secs_f64(t)),
        None => None,
    };
    let config = SolveConfig {
        k: args.k,
        vector: match args.vector {
            VectorArg::Plain => VectorBackend::Plain,
            VectorArg::Lanes => VectorBackend::Lanes,
        },
        downset: match args.downset {
            DownsetArg::Antichain => DownsetBackend::Antichain,
            DownsetArg::Full => DownsetBackend::Full,
            DownsetArg::Kdtree => DownsetBackend::KdTree,
            DownsetArg::Bins => DownsetBackend::Bins,
        },
        bool_split: match args.bool_states {
            OnOff::On => BoolSplitMode::Bounded,
            OnOff::Off => BoolSplitMode::None,
        },
        inputs: match args.inputs {
            InputsArg::Pure => InputSelection::Pure,
            InputsArg::Refined => InputSelection::Refined,
        },
        precompute: matches!(args.precompute, OnOff::On),
        picker: match args.picker {
            PickerArg::Rr => PickerStrategy::RoundRobin,
            PickerArg::Critical => PickerStrategy::Critical,
            PickerArg::CriticalPq => PickerStrategy::CriticalPq,
            PickerArg::CriticalRandp => PickerStrategy::CriticalRandPartial,
            PickerArg::CriticalRandf => PickerStrategy::CriticalRandFull,
        },
        seed: args.seed,
        step_budget: args.step_budget,
    };
    Ok(RunPlan {
        aut,
        neg_aut: args.neg_aut,
        pre_shifted: args.pre_shifted,
        k_initial: args.k,
        k_growth: args.kgrowth,
        k_max: args.kmax,
        check: match args.check {
            Check::Real => CheckMode::Real,
            Check::Unreal => CheckMode::Unreal,
            Check::Both => CheckMode::Both,
        },
        config,
        timeout,
        outs: args.outs,
        trace: args.trace,
    })
}

fn main() -> ExitCode {
    env_logger::Builder::from_env(env_logger::Env::default().default_filter_or("warn")).init();
    let args = Args::parse();
    match plan(args).and_then(|p| run(&p)) {
        Ok(v) => {
            println!("{v}");
            ExitCode::from(v.exit_code() as u8)
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
