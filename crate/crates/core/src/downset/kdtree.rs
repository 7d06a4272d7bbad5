use super::{coord, dims, Downset};
use crate::valuation::Valuation;

const LEAF_SIZE: usize = 8;

#[derive(Debug, Clone)]
enum Node<V> {
    Leaf {
        items: Vec<u32>,
        max: V,
        min: V,
    },
    Split {
        left: Box<Node<V>>,
        right: Box<Node<V>>,
        max: V,
        min: V,
    },
}

impl<V: Valuation> Node<V> {
    fn bounds(&self) -> (&V, &V) {
        match self {
            Node::Leaf { max, min, .. } | Node::Split { max, min, .. } => (max, min),
        }
    }
}

/// Maximal elements indexed by a k-d tree.
///
/// Every node stores the componentwise maximum and minimum of its subtree.
/// A membership query skips subtrees whose maximum does not dominate the
/// query; an eviction sweep skips subtrees whose minimum is not dominated by
/// the newcomer. Single insertions go to a pending list and deletions
/// leave tombstones; the tree is rebuilt from scratch after bulk
/// construction or when either grows too large.
#[derive(Debug, Clone)]
pub struct KdTreeDownset<V> {
    elems: Vec<V>,
    alive: Vec<bool>,
    live: usize,
    indexed: usize,
    root: Option<Node<V>>,
}

impl<V: Valuation> KdTreeDownset<V> {
    fn rebuild(&mut self) {
        let elems: Vec<V> = std::mem::take(&mut self.elems)
            .into_iter()
            .zip(&self.alive)
            .filter(|(_, a)| **a)
            .map(|(e, _)| e)
            .collect();
        self.alive = vec![true; elems.len()];
        self.live = elems.len();
        self.indexed = elems.len();
        let mut idx: Vec<u32> = (0..elems.len() as u32).collect();
        self.root = if elems.is_empty() {
            None
        } else {
            Some(build(&elems, &mut idx, 0))
        };
        self.elems = elems;
    }

    fn maybe_rebuild(&mut self) {
        let pending = self.elems.len() - self.indexed;
        let dead = self.elems.len() - self.live;
        if pending > LEAF_SIZE.max(self.indexed / 2) || dead > LEAF_SIZE.max(self.elems.len() / 2) {
            self.rebuild();
        }
    }

    fn query(&self, node: &Node<V>, v: &V) -> bool {
        let (max, _) = node.bounds();
        if !max.dominates(v) {
            return false;
        }
        match node {
            Node::Leaf { items, .. } => items
                .iter()
                .any(|&i| self.alive[i as usize] && self.elems[i as usize].dominates(v)),
            Node::Split { left, right, .. } => self.query(left, v) || self.query(right, v),
        }
    }

    fn collect_dominated(&self, node: &Node<V>, v: &V, out: &mut Vec<u32>) {
        let (_, min) = node.bounds();
        if !v.dominates(min) {
            return;
        }
        match node {
            Node::Leaf { items, .. } => out.extend(
                items
                    .iter()
                    .copied()
                    .filter(|&i| self.alive[i as usize] && v.dominates(&self.elems[i as usize])),
            ),
            Node::Split { left, right, .. } => {
                self.collect_dominated(left, v, out);
                self.collect_dominated(right, v, out);
            }
        }
    }
}

fn bounds<V: Valuation>(elems: &[V], idx: &[u32]) -> (V, V) {
    let first = &elems[idx[0] as usize];
    idx[1..].iter().fold((first.clone(), first.clone()), |(mx, mn), &i| {
        let e = &elems[i as usize];
        (mx.join(e), mn.meet(e))
    })
}

/// Median split on dimension `depth mod dims`.
fn build<V: Valuation>(elems: &[V], idx: &mut [u32], depth: usize) -> Node<V> {
    let (max, min) = bounds(elems, idx);
    let d = dims(&elems[idx[0] as usize]);
    if idx.len() <= LEAF_SIZE || d == 0 {
        return Node::Leaf {
            items: idx.to_vec(),
            max,
            min,
        };
    }
    let axis = depth % d;
    let mid = idx.len() / 2;
    idx.select_nth_unstable_by_key(mid, |&i| coord(&elems[i as usize], axis));
    let (lo, hi) = idx.split_at_mut(mid);
    Node::Split {
        left: Box::new(build(elems, lo, depth + 1)),
        right: Box::new(build(elems, hi, depth + 1)),
        max,
        min,
    }
}

impl<V: Valuation> Downset<V> for KdTreeDownset<V> {
    const BACKEND: super::DownsetBackend = super::DownsetBackend::KdTree;

    fn empty() -> Self {
        KdTreeDownset {
            elems: Vec::new(),
            alive: Vec::new(),
            live: 0,
            indexed: 0,
            root: None,
        }
    }

    fn from_vectors(vs: Vec<V>) -> Self {
        let mut s = Self::empty();
        for v in super::by_score(vs) {
            if !s.contains(&v) {
                s.push_maximal(v);
            }
        }
        if s.indexed < s.elems.len() {
            s.rebuild();
        }
        s
    }

    fn insert(&mut self, v: V) -> bool {
        if self.contains(&v) {
            return false;
        }
        let mut dead = Vec::new();
        if let Some(root) = &self.root {
            self.collect_dominated(root, &v, &mut dead);
        }
        for i in self.indexed..self.elems.len() {
            if self.alive[i] && v.dominates(&self.elems[i]) {
                dead.push(i as u32);
            }
        }
        for i in dead {
            self.alive[i as usize] = false;
            self.live -= 1;
        }
        self.elems.push(v);
        self.alive.push(true);
        self.live += 1;
        self.maybe_rebuild();
        true
    }

    fn push_maximal(&mut self, v: V) {
        self.elems.push(v);
        self.alive.push(true);
        self.live += 1;
        self.maybe_rebuild();
    }

    fn contains(&self, v: &V) -> bool {
        if (self.indexed..self.elems.len()).any(|i| self.alive[i] && self.elems[i].dominates(v)) {
            return true;
        }
        match &self.root {
            Some(root) => self.query(root, v),
            None => false,
        }
    }

    fn max_elements(&self) -> Vec<V> {
        self.elems
            .iter()
            .zip(&self.alive)
            .filter(|(_, a)| **a)
            .map(|(e, _)| e.clone())
            .collect()
    }

    fn stored(&self) -> usize {
        self.live
    }
}
