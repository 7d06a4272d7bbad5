//! Downward-closed sets of valuations, represented by their maximal
//! elements.

mod antichain;
mod binned;
mod full;
mod kdtree;

use std::fmt;

pub use antichain::AntichainDownset;
pub use binned::BinnedDownset;
pub use full::FullSetDownset;
pub use kdtree::KdTreeDownset;

use crate::valuation::{format_parts, Valuation};

/// Storage strategy for a downset.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default)]
pub enum DownsetBackend {
    Antichain,
    Full,
    #[default]
    KdTree,
    Bins,
}

impl DownsetBackend {
    pub const ALL: [DownsetBackend; 4] = [
        DownsetBackend::Antichain,
        DownsetBackend::Full,
        DownsetBackend::KdTree,
        DownsetBackend::Bins,
    ];
}

impl fmt::Display for DownsetBackend {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            DownsetBackend::Antichain => "antichain",
            DownsetBackend::Full => "full",
            DownsetBackend::KdTree => "kdtree",
            DownsetBackend::Bins => "bins",
        })
    }
}

/// A downward-closed set of vectors.
///
/// `contains(v)` holds iff some stored element dominates `v`. All
/// implementations must be semantically identical after the same sequence
/// of operations.
pub trait Downset<V: Valuation>: Clone + fmt::Debug + Send {
    const BACKEND: DownsetBackend;

    fn empty() -> Self;

    fn from_vector(v: V) -> Self {
        let mut s = Self::empty();
        s.insert(v);
        s
    }

    /// Downward closure of `vs`.
    fn from_vectors(vs: Vec<V>) -> Self {
        let mut s = Self::empty();
        for v in by_score(vs) {
            if !s.contains(&v) {
                s.push_maximal(v);
            }
        }
        s
    }

    /// Adds the closure of `v`; returns whether the set changed.
    fn insert(&mut self, v: V) -> bool;

    fn contains(&self, v: &V) -> bool;

    /// Stores `v` without any domination checks. The caller guarantees
    /// that `v` and the stored elements are pairwise incomparable.
    fn push_maximal(&mut self, v: V);

    /// The maximal elements: a pairwise incomparable set.
    fn max_elements(&self) -> Vec<V>;

    /// Number of stored vectors (may exceed the antichain size for
    /// backends that defer domination).
    fn stored(&self) -> usize;

    fn is_empty(&self) -> bool {
        self.stored() == 0
    }

    fn union(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for v in other.max_elements() {
            out.insert(v);
        }
        out
    }

    /// The closure of the pairwise meets of maximal elements. An element
    /// already inside the other set covers all of its meets, so only
    /// elements outside the other set are combined.
    fn intersect(&self, other: &Self) -> Self {
        let (inside_other, outside_other): (Vec<V>, Vec<V>) =
            self.max_elements().into_iter().partition(|v| other.contains(v));
        let (inside_self, outside_self): (Vec<V>, Vec<V>) =
            other.max_elements().into_iter().partition(|v| self.contains(v));
        let mut candidates = inside_other;
        candidates.extend(inside_self);
        for a in &outside_other {
            candidates.extend(outside_self.iter().map(|b| a.meet(b)));
        }
        Self::from_vectors(candidates)
    }

    /// Semantic equality: mutual containment of the maximal elements.
    fn equal(&self, other: &Self) -> bool {
        other.max_elements().iter().all(|v| self.contains(v)) && self.max_elements().iter().all(|v| other.contains(v))
    }

    /// One vector per line, sorted, identical across backends.
    fn dump(&self) -> String {
        let mut lines: Vec<(V, String)> = self.max_elements().into_iter().map(|v| {
            let s = format_parts(&v);
            (v, s)
        }).collect();
        lines.sort_by(|a, b| lex_key(&a.0).cmp(&lex_key(&b.0)));
        lines.into_iter().map(|(_, s)| s + "\n").collect()
    }
}

fn lex_key<V: Valuation>(v: &V) -> (Vec<i32>, Vec<bool>) {
    (
        (0..v.counted_len()).map(|i| v.counted(i)).collect(),
        (0..v.bool_len()).map(|i| v.bit(i)).collect(),
    )
}

/// Coordinate `d` of `v`, counted entries first, then bits as 0/1.
pub(crate) fn coord<V: Valuation>(v: &V, d: usize) -> i32 {
    if d < v.counted_len() {
        v.counted(d)
    } else {
        v.bit(d - v.counted_len()) as i32
    }
}

pub(crate) fn dims<V: Valuation>(v: &V) -> usize {
    v.counted_len() + v.bool_len()
}

/// `vs` without duplicates, by decreasing score. No element can strictly
/// dominate an element listed before it.
pub(crate) fn by_score<V: Valuation>(mut vs: Vec<V>) -> Vec<V> {
    vs.sort_unstable_by(|a, b| b.score().cmp(&a.score()).then_with(|| a.cmp(b)));
    vs.dedup();
    vs
}

/// Maximal elements of `vs`, without duplicates, by decreasing score.
pub fn maximal<V: Valuation>(vs: Vec<V>) -> Vec<V> {
    let mut keep: Vec<V> = Vec::new();
    for v in by_score(vs) {
        if !keep.iter().any(|k| k.dominates(&v)) {
            keep.push(v);
        }
    }
    keep
}

/// A downset whose backend is chosen at run time.
#[derive(Debug, Clone)]
pub enum DynDownset<V: Valuation> {
    Antichain(AntichainDownset<V>),
    Full(FullSetDownset<V>),
    KdTree(KdTreeDownset<V>),
    Bins(BinnedDownset<V>),
}

macro_rules! dispatch {
    ($self:expr, $s:ident => $e:expr) => {
        match $self {
            DynDownset::Antichain($s) => $e,
            DynDownset::Full($s) => $e,
            DynDownset::KdTree($s) => $e,
            DynDownset::Bins($s) => $e,
        }
    };
}

impl<V: Valuation> DynDownset<V> {
    pub fn empty(backend: DownsetBackend) -> Self {
        match backend {
            DownsetBackend::Antichain => DynDownset::Antichain(Downset::empty()),
            DownsetBackend::Full => DynDownset::Full(Downset::empty()),
            DownsetBackend::KdTree => DynDownset::KdTree(Downset::empty()),
            DownsetBackend::Bins => DynDownset::Bins(Downset::empty()),
        }
    }

    pub fn from_vector(backend: DownsetBackend, v: V) -> Self {
        let mut s = Self::empty(backend);
        s.insert(v);
        s
    }

    pub fn backend(&self) -> DownsetBackend {
        match self {
            DynDownset::Antichain(_) => DownsetBackend::Antichain,
            DynDownset::Full(_) => DownsetBackend::Full,
            DynDownset::KdTree(_) => DownsetBackend::KdTree,
            DynDownset::Bins(_) => DownsetBackend::Bins,
        }
    }

    pub fn insert(&mut self, v: V) -> bool {
        dispatch!(self, s => s.insert(v))
    }

    pub fn contains(&self, v: &V) -> bool {
        dispatch!(self, s => s.contains(v))
    }

    pub fn max_elements(&self) -> Vec<V> {
        dispatch!(self, s => s.max_elements())
    }

    pub fn stored(&self) -> usize {
        dispatch!(self, s => s.stored())
    }

    pub fn dump(&self) -> String {
        dispatch!(self, s => s.dump())
    }

    /// Union with a set of the same backend; mixing backends goes through
    /// the maximal elements.
    pub fn union(&self, other: &Self) -> Self {
        match (self, other) {
            (DynDownset::Antichain(a), DynDownset::Antichain(b)) => DynDownset::Antichain(a.union(b)),
            (DynDownset::Full(a), DynDownset::Full(b)) => DynDownset::Full(a.union(b)),
            (DynDownset::KdTree(a), DynDownset::KdTree(b)) => DynDownset::KdTree(a.union(b)),
            (DynDownset::Bins(a), DynDownset::Bins(b)) => DynDownset::Bins(a.union(b)),
            _ => {
                let mut out = self.clone();
                for v in other.max_elements() {
                    out.insert(v);
                }
                out
            }
        }
    }

    pub fn intersect(&self, other: &Self) -> Self {
        match (self, other) {
            (DynDownset::Antichain(a), DynDownset::Antichain(b)) => DynDownset::Antichain(a.intersect(b)),
            (DynDownset::Full(a), DynDownset::Full(b)) => DynDownset::Full(a.intersect(b)),
            (DynDownset::KdTree(a), DynDownset::KdTree(b)) => DynDownset::KdTree(a.intersect(b)),
            (DynDownset::Bins(a), DynDownset::Bins(b)) => DynDownset::Bins(a.intersect(b)),
            _ => {
                let converted = Self::from_elements(self.backend(), other.max_elements());
                self.intersect(&converted)
            }
        }
    }

    pub fn from_elements(backend: DownsetBackend, vs: Vec<V>) -> Self {
        match backend {
            DownsetBackend::Antichain => DynDownset::Antichain(Downset::from_vectors(vs)),
            DownsetBackend::Full => DynDownset::Full(Downset::from_vectors(vs)),
            DownsetBackend::KdTree => DynDownset::KdTree(Downset::from_vectors(vs)),
            DownsetBackend::Bins => DynDownset::Bins(Downset::from_vectors(vs)),
        }
    }

    pub fn equal(&self, other: &Self) -> bool {
        other.max_elements().iter().all(|v| self.contains(v)) && self.max_elements().iter().all(|v| other.contains(v))
    }
}
