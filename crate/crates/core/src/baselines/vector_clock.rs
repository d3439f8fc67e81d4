use std::collections::{BTreeMap, HashSet};

use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};

/// Insert-only vector clocks.
///
/// Entry `t'` of the clock of `⟨t,i⟩` is one more than the latest index of
/// chain `t'` reaching `⟨t,i⟩` (0 for none). Clocks are materialized only up
/// to a per-chain watermark just past the last event with an incoming edge;
/// later events share the last row. Propagation stops along a chain as soon
/// as an event already dominates the joined clock.
#[derive(Clone, Debug)]
pub struct VectorClockPO {
    geom: ChainGeometry,
    k: usize,
    rows: Vec<Vec<u32>>,
    watermark: Vec<u32>,
    out: Vec<BTreeMap<u32, Vec<NodeId>>>,
    edges: HashSet<(NodeId, NodeId)>,
    work: Vec<(NodeId, Vec<u32>)>,
    steps: u64,
    last_steps: u64,
}

impl VectorClockPO {
    pub fn new(geom: ChainGeometry) -> Self {
        let k = geom.chains() as usize;
        VectorClockPO {
            geom,
            k,
            rows: vec![Vec::new(); k],
            watermark: vec![0; k],
            out: vec![BTreeMap::new(); k],
            edges: HashSet::new(),
            work: Vec::new(),
            steps: 0,
            last_steps: 0,
        }
    }

    /// Clock rows changed by the most recent insertion.
    pub fn last_propagation_steps(&self) -> u64 {
        self.last_steps
    }

    pub fn total_propagation_steps(&self) -> u64 {
        self.steps
    }

    /// Entry `of` of the clock of `node`, as `latest index + 1`.
    #[inline]
    fn entry(&self, node: NodeId, of: u32) -> u32 {
        if of == node.chain {
            return node.index + 1;
        }
        let t = node.chain as usize;
        let w = self.watermark[t];
        if w == 0 {
            return 0;
        }
        let row = node.index.min(w - 1) as usize;
        self.rows[t][row * self.k + of as usize]
    }

    fn clock(&self, node: NodeId) -> Vec<u32> {
        (0..self.k as u32).map(|t| self.entry(node, t)).collect()
    }

    fn raise_watermark(&mut self, chain: usize, to: u32) {
        let w = self.watermark[chain];
        if to <= w {
            return;
        }
        let k = self.k;
        let last: Vec<u32> = if w == 0 {
            vec![0; k]
        } else {
            self.rows[chain][(w as usize - 1) * k..w as usize * k].to_vec()
        };
        let rows = &mut self.rows[chain];
        rows.reserve((to - w) as usize * k);
        for _ in w..to {
            rows.extend_from_slice(&last);
        }
        self.watermark[chain] = to;
    }

    /// Joins `clock` into `start` and everything after it on its chain,
    /// following cross edges of changed events.
    fn propagate(&mut self, start: NodeId, clock: Vec<u32>) {
        let k = self.k;
        self.work.push((start, clock));
        while let Some((node, clock)) = self.work.pop() {
            let t = node.chain as usize;
            let w = self.watermark[t];
            let mut j = node.index;
            let mut reached_end = false;
            while j < w {
                let row = &mut self.rows[t][j as usize * k..(j as usize + 1) * k];
                let mut changed = false;
                for (c, (slot, &x)) in row.iter_mut().zip(&clock).enumerate() {
                    if c != t && x > *slot {
                        *slot = x;
                        changed = true;
                    }
                }
                if !changed {
                    break;
                }
                self.last_steps += 1;
                if let Some(targets) = self.out[t].get(&j) {
                    let mut full = row.to_vec();
                    full[t] = j + 1;
                    for &v in targets {
                        self.work.push((v, full.clone()));
                    }
                }
                j += 1;
                reached_end = j == w;
            }
            if reached_end {
                // Events past the watermark share the last row.
                let last = self.rows[t][(w as usize - 1) * k..w as usize * k].to_vec();
                for (&i, targets) in self.out[t].range(w..) {
                    let mut full = last.clone();
                    full[t] = i + 1;
                    for &v in targets {
                        self.work.push((v, full.clone()));
                    }
                }
            }
        }
    }
}

impl PartialOrder for VectorClockPO {
    fn geometry(&self) -> &ChainGeometry {
        &self.geom
    }

    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate_edge(from, to)?;
        self.last_steps = 0;
        if !self.edges.insert((from, to)) {
            return Ok(());
        }
        self.out[from.chain as usize]
            .entry(from.index)
            .or_default()
            .push(to);
        let clock = self.clock(from);
        self.raise_watermark(to.chain as usize, to.index + 1);
        self.propagate(to, clock);
        self.steps += self.last_steps;
        Ok(())
    }

    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        Ok(self.entry(to, from.chain) > from.index)
    }

    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        if chain == node.chain {
            return Ok(Some(node.index));
        }
        // Clock entries are monotone along the chain.
        let len = self.geom.len_of(chain);
        let (mut lo, mut hi) = (0u32, len);
        while lo < hi {
            let mid = lo + (hi - lo) / 2;
            if self.entry(NodeId::new(chain, mid), node.chain) > node.index {
                hi = mid;
            } else {
                lo = mid + 1;
            }
        }
        Ok((lo < len).then_some(lo))
    }

    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        Ok(self.entry(node, chain).checked_sub(1))
    }

    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.geom.grow(chain, new_len)
    }

    fn audit(&mut self, _cross_density: usize) -> Result<(), String> {
        let k = self.k;
        for t in 0..k {
            let rows = &self.rows[t];
            for j in 1..self.watermark[t] as usize {
                let (prev, cur) = (&rows[(j - 1) * k..j * k], &rows[j * k..(j + 1) * k]);
                if prev.iter().zip(cur).any(|(a, b)| a > b) {
                    return Err(format!("clock of <{t},{j}> is below its predecessor"));
                }
            }
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn n(c: u32, i: u32) -> NodeId {
        NodeId::new(c, i)
    }

    #[test]
    fn single_edge_propagates_down_the_chain() {
        let mut vc = VectorClockPO::new(ChainGeometry::uniform(2, 3).unwrap());
        vc.insert_edge(n(0, 0), n(1, 0)).unwrap();
        assert_eq!(vc.predecessor(n(1, 2), 0), Ok(Some(0)));
        assert!(vc.reachable(n(0, 0), n(1, 2)).unwrap());
        assert!(!vc.reachable(n(0, 1), n(1, 2)).unwrap());
        assert_eq!(vc.successor(n(0, 0), 1), Ok(Some(0)));
        assert_eq!(vc.successor(n(0, 1), 1), Ok(None));
    }

    #[test]
    fn implied_edge_stops_immediately() {
        let mut vc = VectorClockPO::new(ChainGeometry::uniform(2, 8).unwrap());
        vc.insert_edge(n(0, 3), n(1, 2)).unwrap();
        assert!(vc.last_propagation_steps() > 0);
        vc.insert_edge(n(0, 1), n(1, 5)).unwrap();
        assert_eq!(vc.last_propagation_steps(), 0);
        vc.insert_edge(n(0, 3), n(1, 2)).unwrap();
        assert_eq!(vc.last_propagation_steps(), 0);
    }

    #[test]
    fn propagates_through_events_past_the_watermark() {
        let mut vc = VectorClockPO::new(ChainGeometry::uniform(3, 10).unwrap());
        // <1,7> lies beyond chain 1's watermark when the second edge lands.
        vc.insert_edge(n(1, 7), n(2, 4)).unwrap();
        vc.insert_edge(n(0, 2), n(1, 1)).unwrap();
        assert!(vc.reachable(n(0, 2), n(2, 4)).unwrap());
        assert_eq!(vc.predecessor(n(2, 9), 0), Ok(Some(2)));
        assert_eq!(vc.successor(n(0, 0), 2), Ok(Some(4)));
        vc.audit(0).unwrap();
    }

    #[test]
    fn deletions_are_refused() {
        let mut vc = VectorClockPO::new(ChainGeometry::uniform(2, 3).unwrap());
        vc.insert_edge(n(0, 0), n(1, 0)).unwrap();
        assert_eq!(
            vc.delete_edge(n(0, 0), n(1, 0)).unwrap_err().kind(),
            "DeleteUnsupported"
        );
    }
}
