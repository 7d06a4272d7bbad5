use std::collections::BTreeMap;

use super::Downset;
use crate::valuation::Valuation;

/// Maximal elements bucketed by score. A vector can only be dominated by
/// vectors of equal or larger score, so membership probes bins from
/// `score(v)` upwards and eviction probes bins from `score(v)` downwards.
#[derive(Debug, Clone)]
pub struct BinnedDownset<V> {
    bins: BTreeMap<i64, Vec<V>>,
    count: usize,
}

impl<V: Valuation> Downset<V> for BinnedDownset<V> {
    const BACKEND: super::DownsetBackend = super::DownsetBackend::Bins;

    fn empty() -> Self {
        BinnedDownset {
            bins: BTreeMap::new(),
            count: 0,
        }
    }

    fn insert(&mut self, v: V) -> bool {
        if self.contains(&v) {
            return false;
        }
        let s = v.score();
        let mut removed = 0;
        for (_, bin) in self.bins.range_mut(..=s) {
            let before = bin.len();
            bin.retain(|e| !v.dominates(e));
            removed += before - bin.len();
        }
        self.bins.retain(|_, b| !b.is_empty());
        self.count = self.count - removed + 1;
        self.bins.entry(s).or_default().push(v);
        true
    }

    fn contains(&self, v: &V) -> bool {
        self.bins
            .range(v.score()..)
            .any(|(_, bin)| bin.iter().any(|e| e.dominates(v)))
    }

    fn push_maximal(&mut self, v: V) {
        self.count += 1;
        self.bins.entry(v.score()).or_default().push(v);
    }

    fn max_elements(&self) -> Vec<V> {
        self.bins.values().rev().flatten().cloned().collect()
    }

    fn stored(&self) -> usize {
        self.count
    }
}
