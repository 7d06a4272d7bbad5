use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Order in which input-actions are tried.
///
/// Every strategy examines actions one by one and applies the first one
/// that changes the downset. A scan in which no action changes anything
/// has applied every action once without effect, which certifies the fixed
/// point.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum PickerStrategy {
    /// Cycle through the actions, resuming after the last one applied.
    RoundRobin,
    /// Always rescan from the first action.
    #[default]
    Critical,
    /// Rescan with the most recently successful actions first.
    CriticalPq,
    /// Rescan with a random window of the order shuffled.
    CriticalRandPartial,
    /// Rescan in a fresh random order.
    CriticalRandFull,
}

impl PickerStrategy {
    pub const ALL: [PickerStrategy; 5] = [
        PickerStrategy::RoundRobin,
        PickerStrategy::Critical,
        PickerStrategy::CriticalPq,
        PickerStrategy::CriticalRandPartial,
        PickerStrategy::CriticalRandFull,
    ];
}

impl fmt::Display for PickerStrategy {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            PickerStrategy::RoundRobin => "rr",
            PickerStrategy::Critical => "critical",
            PickerStrategy::CriticalPq => "critical-pq",
            PickerStrategy::CriticalRandPartial => "critical-randp",
            PickerStrategy::CriticalRandFull => "critical-randf",
        })
    }
}

impl FromStr for PickerStrategy {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Ok(match s {
            "rr" | "round-robin" => PickerStrategy::RoundRobin,
            "critical" => PickerStrategy::Critical,
            "critical-pq" => PickerStrategy::CriticalPq,
            "critical-randp" | "critical-rand-partial" => PickerStrategy::CriticalRandPartial,
            "critical-randf" | "critical-rand-full" => PickerStrategy::CriticalRandFull,
            other => return Err(format!("unknown picker '{other}'")),
        })
    }
}

#[derive(Debug, Clone)]
pub struct PickerState {
    strategy: PickerStrategy,
    order: Vec<usize>,
    cursor: usize,
    last_success: Vec<u64>,
    clock: u64,
    rng: ChaCha8Rng,
}

impl PickerState {
    pub fn new(strategy: PickerStrategy, n: usize, seed: u64) -> Self {
        PickerState {
            strategy,
            order: (0..n).collect(),
            cursor: 0,
            last_success: vec![0; n],
            clock: 0,
            rng: ChaCha8Rng::seed_from_u64(seed),
        }
    }

    pub fn strategy(&self) -> PickerStrategy {
        self.strategy
    }

    /// The order for the next scan; each action appears exactly once.
    pub fn scan(&mut self) -> Vec<usize> {
        let n = self.order.len();
        match self.strategy {
            PickerStrategy::RoundRobin => (0..n).map(|j| (self.cursor + j) % n).collect(),
            PickerStrategy::Critical => (0..n).collect(),
            PickerStrategy::CriticalPq => {
                let mut order: Vec<usize> = (0..n).collect();
                order.sort_by_key(|&i| std::cmp::Reverse(self.last_success[i]));
                order
            }
            PickerStrategy::CriticalRandPartial => {
                if n > 1 {
                    let width = (n / 2).max(2);
                    let start = self.rng.gen_range(0..=n - width);
                    self.order[start..start + width].shuffle(&mut self.rng);
                }
                self.order.clone()
            }
            PickerStrategy::CriticalRandFull => {
                self.order.shuffle(&mut self.rng);
                self.order.clone()
            }
        }
    }

    /// Records that action `idx` changed the downset.
    pub fn success(&mut self, idx: usize) {
        self.clock += 1;
        self.last_success[idx] = self.clock;
        if !self.order.is_empty() {
            self.cursor = (idx + 1) % self.order.len();
        }
    }
}
