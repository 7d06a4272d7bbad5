use super::Downset;
use crate::valuation::Valuation;

/// Keeps every inserted vector that was not already covered, without
/// evicting the ones a newcomer dominates. The store is compacted to its
/// maximal elements once it grows past four times the last known antichain.
#[derive(Debug, Clone)]
pub struct FullSetDownset<V> {
    all: Vec<V>,
    last_antichain: usize,
}

impl<V: Valuation> FullSetDownset<V> {
    fn compact(&mut self) {
        self.all = super::maximal(std::mem::take(&mut self.all));
        self.last_antichain = self.all.len();
    }
}

impl<V: Valuation> Downset<V> for FullSetDownset<V> {
    const BACKEND: super::DownsetBackend = super::DownsetBackend::Full;

    fn empty() -> Self {
        FullSetDownset {
            all: Vec::new(),
            last_antichain: 0,
        }
    }

    fn from_vectors(vs: Vec<V>) -> Self {
        let mut all = vs;
        all.sort();
        all.dedup();
        let mut s = FullSetDownset { all, last_antichain: 0 };
        if s.all.len() > 4 * s.last_antichain.max(1) {
            s.compact();
        }
        s
    }

    fn insert(&mut self, v: V) -> bool {
        if self.contains(&v) {
            return false;
        }
        self.all.push(v);
        if self.all.len() > 4 * self.last_antichain.max(1) {
            self.compact();
        }
        true
    }

    fn contains(&self, v: &V) -> bool {
        self.all.iter().any(|e| e.dominates(v))
    }

    fn push_maximal(&mut self, v: V) {
        self.all.push(v);
        self.last_antichain = self.last_antichain.max(self.all.len());
    }

    fn max_elements(&self) -> Vec<V> {
        super::maximal(self.all.clone())
    }

    fn stored(&self) -> usize {
        self.all.len()
    }
}
