//! State valuations: vectors over the automaton states with entries in
//! `[-1, k]`, plus one bit per boolean state meaning "value ≥ 0".
//!
//! Two layouts are provided. [`PlainVector`] stores one lane per counted
//! state and compares them one by one. [`Lanes8`] and [`Lanes16`] pack the
//! counted entries into fixed 256-bit blocks so that comparison and minimum
//! run block-wise; small vectors keep their blocks inline.

use std::fmt;
use std::hash::Hash;
use std::sync::Arc;

use smallvec::SmallVec;
use thiserror::Error;

use crate::automaton::{StateId, StateSplit};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValuationError {
    #[error("vector shapes differ")]
    ShapeMismatch,
    #[error("bound k = {0} is out of range (must be in 1..={max})", max = i16::MAX - 2)]
    BoundOutOfRange(i32),
    #[error("value {value} outside [-1, {k}]")]
    ValueOutOfRange { value: i32, k: i32 },
}

/// Width of a counted entry.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LaneWidth {
    I8,
    I16,
}

impl LaneWidth {
    /// Narrowest width holding every value in `[-1, k]` with headroom.
    pub fn for_bound(k: i32) -> Result<Self, ValuationError> {
        if k < 1 || k + 2 > i16::MAX as i32 {
            Err(ValuationError::BoundOutOfRange(k))
        } else if k + 2 <= i8::MAX as i32 {
            Ok(LaneWidth::I8)
        } else {
            Ok(LaneWidth::I16)
        }
    }
}

/// Where each state's value lives inside a vector.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Slot {
    Counted(u32),
    Bool(u32),
}

/// The shape shared by all vectors of one solver run.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Layout {
    k: i32,
    slots: Vec<Slot>,
    counted: usize,
    bools: usize,
}

impl Layout {
    pub fn new(k: i32, split: &StateSplit) -> Result<Arc<Self>, ValuationError> {
        LaneWidth::for_bound(k)?;
        let mut slots = Vec::with_capacity(split.num_states());
        let (mut counted, mut bools) = (0u32, 0u32);
        for q in 0..split.num_states() {
            if split.is_boolean(q) {
                slots.push(Slot::Bool(bools));
                bools += 1;
            } else {
                slots.push(Slot::Counted(counted));
                counted += 1;
            }
        }
        Ok(Arc::new(Layout {
            k,
            slots,
            counted: counted as usize,
            bools: bools as usize,
        }))
    }

    /// All states counted.
    pub fn counted_only(k: i32, n: usize) -> Result<Arc<Self>, ValuationError> {
        Self::new(k, &StateSplit::all_counted(n))
    }

    pub fn k(&self) -> i32 {
        self.k
    }

    pub fn num_states(&self) -> usize {
        self.slots.len()
    }

    pub fn slot(&self, q: StateId) -> Slot {
        self.slots[q]
    }

    pub fn counted_len(&self) -> usize {
        self.counted
    }

    pub fn bool_len(&self) -> usize {
        self.bools
    }

    pub fn lane_width(&self) -> LaneWidth {
        LaneWidth::for_bound(self.k).expect("checked at construction")
    }

    /// Builds a vector from one value per state. Boolean states keep only
    /// the sign.
    pub fn vector<V: Valuation>(&self, values: &[i32]) -> Result<V, ValuationError> {
        if values.len() != self.slots.len() {
            return Err(ValuationError::ShapeMismatch);
        }
        if let Some(&value) = values.iter().find(|&&v| v < -1 || v > self.k) {
            return Err(ValuationError::ValueOutOfRange { value, k: self.k });
        }
        Ok(self.vector_unchecked(values))
    }

    pub(crate) fn vector_unchecked<V: Valuation>(&self, values: &[i32]) -> V {
        let mut counted = Vec::with_capacity(self.counted);
        let mut bits = Bits::zeros(self.bools);
        for (q, &v) in values.iter().enumerate() {
            match self.slots[q] {
                Slot::Counted(_) => counted.push(v),
                Slot::Bool(b) => {
                    if v >= 0 {
                        bits.set(b as usize);
                    }
                }
            }
        }
        V::from_parts(&counted, bits)
    }

    /// One value per state; a set bit reads as 0 and a cleared bit as -1.
    pub fn values<V: Valuation>(&self, v: &V, out: &mut Vec<i32>) {
        out.clear();
        out.extend(self.slots.iter().map(|s| match *s {
            Slot::Counted(i) => v.counted(i as usize),
            Slot::Bool(b) => {
                if v.bit(b as usize) {
                    0
                } else {
                    -1
                }
            }
        }));
    }

    pub fn top<V: Valuation>(&self) -> V {
        self.vector_unchecked(&vec![self.k; self.slots.len()])
    }

    pub fn bottom<V: Valuation>(&self) -> V {
        self.vector_unchecked(&vec![-1; self.slots.len()])
    }

    /// The least vector mapping `q` to a nonnegative value.
    pub fn witness<V: Valuation>(&self, q: StateId) -> V {
        let mut vals = vec![-1; self.slots.len()];
        vals[q] = 0;
        self.vector_unchecked(&vals)
    }

    /// Debug form `(v0,v1,...|b0b1...)`.
    pub fn format<V: Valuation>(&self, v: &V) -> String {
        format_parts(v)
    }
}

/// Renders counted entries and bits as `(v0,v1,...|b0b1...)`.
pub fn format_parts<V: Valuation>(v: &V) -> String {
    let counted: Vec<String> = (0..v.counted_len()).map(|i| v.counted(i).to_string()).collect();
    let bits: String = (0..v.bool_len()).map(|i| if v.bit(i) { '1' } else { '0' }).collect();
    format!("({}|{})", counted.join(","), bits)
}

/// Packed bits for the boolean states.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Bits {
    len: u32,
    words: SmallVec<[u64; 1]>,
}

impl Bits {
    pub fn zeros(len: usize) -> Self {
        Bits {
            len: len as u32,
            words: SmallVec::from_elem(0, len.div_ceil(64)),
        }
    }

    pub fn from_bools(bits: &[bool]) -> Self {
        let mut b = Self::zeros(bits.len());
        for (i, &x) in bits.iter().enumerate() {
            if x {
                b.set(i);
            }
        }
        b
    }

    pub fn len(&self) -> usize {
        self.len as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len == 0
    }

    pub fn get(&self, i: usize) -> bool {
        self.words[i / 64] >> (i % 64) & 1 == 1
    }

    pub fn set(&mut self, i: usize) {
        self.words[i / 64] |= 1 << (i % 64);
    }

    pub fn clear(&mut self, i: usize) {
        self.words[i / 64] &= !(1 << (i % 64));
    }

    fn covers(&self, other: &Bits) -> bool {
        self.words.iter().zip(&other.words).all(|(a, b)| b & !a == 0)
    }

    fn and(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a & b).collect(),
        }
    }

    fn or(&self, other: &Bits) -> Bits {
        Bits {
            len: self.len,
            words: self.words.iter().zip(&other.words).map(|(a, b)| a | b).collect(),
        }
    }

    fn count(&self) -> i64 {
        self.words.iter().map(|w| w.count_ones() as i64).sum()
    }
}

/// A vector over the automaton states.
///
/// Implementations must agree exactly on every operation; they differ only
/// in storage.
pub trait Valuation: Clone + Eq + Ord + Hash + fmt::Debug + Send + Sync + 'static {
    const NAME: &'static str;

    /// `counted` entries must lie in `[-1, i16::MAX - 2]`.
    fn from_parts(counted: &[i32], bits: Bits) -> Self;

    fn counted_len(&self) -> usize;
    fn bool_len(&self) -> usize;
    fn counted(&self, i: usize) -> i32;
    fn bit(&self, i: usize) -> bool;

    /// Componentwise `self ≥ other` (bit implication on the boolean part).
    fn dominates(&self, other: &Self) -> bool;

    /// Componentwise minimum (bitwise and).
    fn meet(&self, other: &Self) -> Self;

    /// Componentwise maximum (bitwise or).
    fn join(&self, other: &Self) -> Self;

    /// Sum of counted entries plus number of set bits. Monotone with
    /// respect to [`dominates`](Self::dominates).
    fn score(&self) -> i64;

    fn same_shape(&self, other: &Self) -> bool {
        self.counted_len() == other.counted_len() && self.bool_len() == other.bool_len()
    }

    fn try_dominates(&self, other: &Self) -> Result<bool, ValuationError> {
        if self.same_shape(other) {
            Ok(self.dominates(other))
        } else {
            Err(ValuationError::ShapeMismatch)
        }
    }

    fn try_meet(&self, other: &Self) -> Result<Self, ValuationError> {
        if self.same_shape(other) {
            Ok(self.meet(other))
        } else {
            Err(ValuationError::ShapeMismatch)
        }
    }

    /// Saturating decrement of the counted entries selected by
    /// `counted_mask`, floored at -1. A set bit selected by `bit_mask` is
    /// cleared: a boolean state only knows it is nonnegative, so after a
    /// decrement it may be -1.
    fn dec_if(&self, counted_mask: &[bool], bit_mask: &[bool]) -> Self {
        let counted: Vec<i32> = (0..self.counted_len())
            .map(|i| {
                let v = self.counted(i);
                if counted_mask.get(i).copied().unwrap_or(false) {
                    (v - 1).max(-1)
                } else {
                    v
                }
            })
            .collect();
        let mut bits = Bits::zeros(self.bool_len());
        for i in 0..self.bool_len() {
            if self.bit(i) && !bit_mask.get(i).copied().unwrap_or(false) {
                bits.set(i);
            }
        }
        Self::from_parts(&counted, bits)
    }
}

/// Integer lane type for counted entries.
pub trait Lane: Copy + Ord + Default + Hash + fmt::Debug + Send + Sync + 'static {
    fn from_i32(v: i32) -> Self;
    fn to_i32(self) -> i32;
}

impl Lane for i8 {
    fn from_i32(v: i32) -> Self {
        debug_assert!(v >= i8::MIN as i32 && v <= i8::MAX as i32);
        v as i8
    }
    fn to_i32(self) -> i32 {
        self as i32
    }
}

impl Lane for i16 {
    fn from_i32(v: i32) -> Self {
        debug_assert!(v >= i16::MIN as i32 && v <= i16::MAX as i32);
        v as i16
    }
    fn to_i32(self) -> i32 {
        self as i32
    }
}

/// One lane per counted state, compared element by element.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct PlainVector<L: Lane> {
    vals: Box<[L]>,
    bits: Bits,
    score: i32,
}

impl<L: Lane> Valuation for PlainVector<L> {
    const NAME: &'static str = "plain";

    fn from_parts(counted: &[i32], bits: Bits) -> Self {
        let score = counted.iter().sum::<i32>() + bits.count() as i32;
        PlainVector {
            vals: counted.iter().map(|&v| L::from_i32(v)).collect(),
            bits,
            score,
        }
    }

    fn counted_len(&self) -> usize {
        self.vals.len()
    }

    fn bool_len(&self) -> usize {
        self.bits.len()
    }

    fn counted(&self, i: usize) -> i32 {
        self.vals[i].to_i32()
    }

    fn bit(&self, i: usize) -> bool {
        self.bits.get(i)
    }

    fn dominates(&self, other: &Self) -> bool {
        debug_assert!(self.same_shape(other));
        self.score >= other.score
            && self.vals.iter().zip(other.vals.iter()).all(|(a, b)| a >= b)
            && self.bits.covers(&other.bits)
    }

    fn meet(&self, other: &Self) -> Self {
        let vals: Box<[L]> = self.vals.iter().zip(other.vals.iter()).map(|(&a, &b)| a.min(b)).collect();
        let bits = self.bits.and(&other.bits);
        let score = vals.iter().map(|v| v.to_i32()).sum::<i32>() + bits.count() as i32;
        PlainVector { vals, bits, score }
    }

    fn join(&self, other: &Self) -> Self {
        let vals: Box<[L]> = self.vals.iter().zip(other.vals.iter()).map(|(&a, &b)| a.max(b)).collect();
        let bits = self.bits.or(&other.bits);
        let score = vals.iter().map(|v| v.to_i32()).sum::<i32>() + bits.count() as i32;
        PlainVector { vals, bits, score }
    }

    fn score(&self) -> i64 {
        self.score as i64
    }
}

macro_rules! lane_vector {
    ($(#[$doc:meta])* $name:ident, $lane:ty, $width:expr, $label:expr) => {
        $(#[$doc])*
        #[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name {
            blocks: SmallVec<[[$lane; $width]; 4]>,
            len: u32,
            bits: Bits,
            score: i32,
        }

        impl $name {
            fn block_ge(a: &[$lane; $width], b: &[$lane; $width]) -> bool {
                let mut ok = true;
                for i in 0..$width {
                    ok &= a[i] >= b[i];
                }
                ok
            }

            fn block_min(a: &[$lane; $width], b: &[$lane; $width]) -> [$lane; $width] {
                let mut out = [0; $width];
                for i in 0..$width {
                    out[i] = a[i].min(b[i]);
                }
                out
            }

            fn block_max(a: &[$lane; $width], b: &[$lane; $width]) -> [$lane; $width] {
                let mut out = [0; $width];
                for i in 0..$width {
                    out[i] = a[i].max(b[i]);
                }
                out
            }

            fn block_sum(a: &[$lane; $width]) -> i32 {
                a.iter().map(|&v| v as i32).sum()
            }
        }

        impl Valuation for $name {
            const NAME: &'static str = $label;

            fn from_parts(counted: &[i32], bits: Bits) -> Self {
                // Padding lanes stay 0 in every vector, so they never affect
                // comparisons or the score.
                let mut blocks: SmallVec<[[$lane; $width]; 4]> = SmallVec::from_elem([0; $width], counted.len().div_ceil($width));
                for (i, &v) in counted.iter().enumerate() {
                    blocks[i / $width][i % $width] = <$lane as Lane>::from_i32(v);
                }
                let score = counted.iter().sum::<i32>() + bits.count() as i32;
                $name {
                    blocks,
                    len: counted.len() as u32,
                    bits,
                    score,
                }
            }

            fn counted_len(&self) -> usize {
                self.len as usize
            }

            fn bool_len(&self) -> usize {
                self.bits.len()
            }

            fn counted(&self, i: usize) -> i32 {
                self.blocks[i / $width][i % $width] as i32
            }

            fn bit(&self, i: usize) -> bool {
                self.bits.get(i)
            }

            fn dominates(&self, other: &Self) -> bool {
                debug_assert!(self.same_shape(other));
                self.score >= other.score
                    && self
                        .blocks
                        .iter()
                        .zip(other.blocks.iter())
                        .all(|(a, b)| Self::block_ge(a, b))
                    && self.bits.covers(&other.bits)
            }

            fn meet(&self, other: &Self) -> Self {
                let blocks: SmallVec<_> = self
                    .blocks
                    .iter()
                    .zip(other.blocks.iter())
                    .map(|(a, b)| Self::block_min(a, b))
                    .collect();
                let bits = self.bits.and(&other.bits);
                let score = blocks.iter().map(Self::block_sum).sum::<i32>() + bits.count() as i32;
                $name {
                    blocks,
                    len: self.len,
                    bits,
                    score,
                }
            }

            fn join(&self, other: &Self) -> Self {
                let blocks: SmallVec<_> = self
                    .blocks
                    .iter()
                    .zip(other.blocks.iter())
                    .map(|(a, b)| Self::block_max(a, b))
                    .collect();
                let bits = self.bits.or(&other.bits);
                let score = blocks.iter().map(Self::block_sum).sum::<i32>() + bits.count() as i32;
                $name {
                    blocks,
                    len: self.len,
                    bits,
                    score,
                }
            }

            fn score(&self) -> i64 {
                self.score as i64
            }
        }
    };
}

lane_vector!(
    /// Counted entries in blocks of 32 `i8` lanes.
    Lanes8,
    i8,
    32,
    "lanes8"
);
lane_vector!(
    /// Counted entries in blocks of 16 `i16` lanes.
    Lanes16,
    i16,
    16,
    "lanes16"
);

/// Vector storage selected at run time.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum VectorBackend {
    Plain,
    #[default]
    Lanes,
}

impl fmt::Display for VectorBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            VectorBackend::Plain => "plain",
            VectorBackend::Lanes => "lanes",
        })
    }
}
