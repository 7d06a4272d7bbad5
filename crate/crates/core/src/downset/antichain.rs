use super::Downset;
use crate::valuation::Valuation;

/// Maximal elements kept in a vector, in insertion order.
#[derive(Debug, Clone)]
pub struct AntichainDownset<V> {
    elems: Vec<V>,
}

impl<V: Valuation> Downset<V> for AntichainDownset<V> {
    const BACKEND: super::DownsetBackend = super::DownsetBackend::Antichain;

    fn empty() -> Self {
        AntichainDownset { elems: Vec::new() }
    }

    fn insert(&mut self, v: V) -> bool {
        if self.contains(&v) {
            return false;
        }
        self.elems.retain(|e| !v.dominates(e));
        self.elems.push(v);
        true
    }

    fn contains(&self, v: &V) -> bool {
        self.elems.iter().any(|e| e.dominates(v))
    }

    fn push_maximal(&mut self, v: V) {
        self.elems.push(v);
    }

    fn max_elements(&self) -> Vec<V> {
        self.elems.clone()
    }

    fn stored(&self) -> usize {
        self.elems.len()
    }
}
