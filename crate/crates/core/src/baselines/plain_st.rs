use crate::incremental::IncrementalPartialOrder;
use crate::sst::{SuffixMinima, INF};

/// The incremental scheme with every array stored as a fully materialized
/// segment tree.
pub type PlainStPO = IncrementalPartialOrder<PlainSegmentTree>;

/// Array-backed min segment tree over `[0, span)`. Every node exists from
/// construction on, whatever the density.
#[derive(Clone, Debug)]
pub struct PlainSegmentTree {
    capacity: u32,
    span: usize,
    tree: Vec<u32>,
    density: usize,
}

impl PlainSegmentTree {
    pub fn new(capacity: u32) -> Self {
        let span = capacity.max(1).next_power_of_two() as usize;
        PlainSegmentTree {
            capacity: capacity.max(1),
            span,
            tree: vec![INF; 2 * span],
            density: 0,
        }
    }

    pub fn get(&self, i: u32) -> Option<u32> {
        let v = self.tree[self.span + i as usize];
        (v != INF).then_some(v)
    }

    fn argleq_from(&self, node: usize, v: u32) -> Option<u32> {
        if self.tree[node] > v {
            return None;
        }
        if node >= self.span {
            return Some((node - self.span) as u32);
        }
        self.argleq_from(2 * node + 1, v)
            .or_else(|| self.argleq_from(2 * node, v))
    }
}

impl SuffixMinima for PlainSegmentTree {
    fn with_capacity(capacity: u32, _block_threshold: u32) -> Self {
        PlainSegmentTree::new(capacity)
    }

    fn capacity(&self) -> u32 {
        self.capacity
    }

    fn suffix_min(&self, i: u32) -> Option<u32> {
        let (mut lo, mut hi) = (self.span + i as usize, 2 * self.span);
        let mut best = INF;
        while lo < hi {
            if lo & 1 == 1 {
                best = best.min(self.tree[lo]);
                lo += 1;
            }
            if hi & 1 == 1 {
                hi -= 1;
                best = best.min(self.tree[hi]);
            }
            lo /= 2;
            hi /= 2;
        }
        (best != INF).then_some(best)
    }

    fn arg_leq(&self, v: u32) -> Option<u32> {
        self.argleq_from(1, v)
    }

    fn assign(&mut self, i: u32, v: Option<u32>) {
        let mut at = self.span + i as usize;
        let old = self.tree[at];
        let new = v.unwrap_or(INF);
        if old == INF && new != INF {
            self.density += 1;
        } else if old != INF && new == INF {
            self.density -= 1;
        }
        self.tree[at] = new;
        while at > 1 {
            at /= 2;
            self.tree[at] = self.tree[2 * at].min(self.tree[2 * at + 1]);
        }
    }

    fn grow_to(&mut self, capacity: u32) {
        let mut grown = PlainSegmentTree::new(capacity.max(self.capacity));
        for i in 0..self.capacity {
            if let Some(v) = self.get(i) {
                grown.assign(i, Some(v));
            }
        }
        *self = grown;
    }

    fn density(&self) -> usize {
        self.density
    }

    fn node_count(&self) -> usize {
        2 * self.span - 1
    }

    fn height(&self) -> u32 {
        self.span.trailing_zeros()
    }

    fn check(&self) -> Result<(), String> {
        for node in 1..self.span {
            if self.tree[node] != self.tree[2 * node].min(self.tree[2 * node + 1]) {
                return Err(format!("segment tree node {node} is stale"));
            }
        }
        let filled = self.tree[self.span..].iter().filter(|&&v| v != INF).count();
        if filled != self.density {
            return Err(format!("density {} but {filled} entries", self.density));
        }
        Ok(())
    }
}
