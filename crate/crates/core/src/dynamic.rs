//! Fully dynamic CSSTs.
//!
//! The arrays hold only direct edges: `A[t1][t2][j1]` is the smallest `j2`
//! with an explicit edge `⟨t1,j1⟩ → ⟨t2,j2⟩`. The full target set of every
//! `(node, target chain)` lives in an ordered set, so deletions can restore
//! the next minimum. Queries close over crossing paths by repeated
//! relaxation between chains.

use std::collections::{BTreeSet, HashMap};

use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};
use crate::sst::{SuffixMinArray, SuffixMinima, DEFAULT_BLOCK_THRESHOLD, INF};

/// Relaxation rounds observed in closure queries.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct RoundStats {
    pub queries: u64,
    pub last: u32,
    pub max: u32,
}

/// Work done by the most recent update.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct UpdateCost {
    pub array_ops: u32,
    pub set_ops: u32,
}

#[derive(Clone, Debug)]
pub struct DynamicPartialOrder {
    geom: ChainGeometry,
    k: usize,
    arrays: Vec<SuffixMinArray>,
    edges: Vec<HashMap<u32, BTreeSet<u32>>>,
    edge_count: usize,
    cycle_guard: bool,
    closure: Vec<u32>,
    closure_back: Vec<Option<u32>>,
    rounds: RoundStats,
    cost: UpdateCost,
    touched: Vec<(usize, u32)>,
}

impl DynamicPartialOrder {
    pub fn new(geom: ChainGeometry) -> Self {
        Self::with_options(geom, DEFAULT_BLOCK_THRESHOLD, false)
    }

    pub fn with_options(geom: ChainGeometry, block_threshold: u32, cycle_guard: bool) -> Self {
        let k = geom.chains() as usize;
        let mut arrays = Vec::with_capacity(k * k);
        for t1 in 0..k {
            for t2 in 0..k {
                let cap = if t1 == t2 { 1 } else { geom.len_of(t1 as u32) };
                arrays.push(SuffixMinArray::with_capacity(cap.max(1), block_threshold));
            }
        }
        DynamicPartialOrder {
            geom,
            k,
            arrays,
            edges: vec![HashMap::new(); k * k],
            edge_count: 0,
            cycle_guard,
            closure: vec![INF; k],
            closure_back: vec![None; k],
            rounds: RoundStats::default(),
            cost: UpdateCost::default(),
            touched: Vec::new(),
        }
    }

    pub fn set_cycle_guard(&mut self, on: bool) {
        self.cycle_guard = on;
    }

    pub fn rounds(&self) -> RoundStats {
        self.rounds
    }

    pub fn last_update_cost(&self) -> UpdateCost {
        self.cost
    }

    pub fn edge_count(&self) -> usize {
        self.edge_count
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        if from.chain == to.chain || self.geom.validate_edge(from, to).is_err() {
            return false;
        }
        self.edges[self.slot(from.chain, to.chain)]
            .get(&from.index)
            .is_some_and(|s| s.contains(&to.index))
    }

    /// Direct targets of `node` in `chain`, ascending.
    pub fn targets(&self, node: NodeId, chain: u32) -> Vec<u32> {
        if node.chain == chain || chain >= self.k as u32 || node.chain >= self.k as u32 {
            return Vec::new();
        }
        self.edges[self.slot(node.chain, chain)]
            .get(&node.index)
            .map(|s| s.iter().copied().collect())
            .unwrap_or_default()
    }

    pub fn array(&self, t1: u32, t2: u32) -> Option<&SuffixMinArray> {
        let k = self.k as u32;
        (t1 < k && t2 < k && t1 != t2).then(|| &self.arrays[self.slot(t1, t2)])
    }

    pub fn max_density(&self) -> usize {
        (0..self.arrays.len())
            .filter(|s| s / self.k != s % self.k)
            .map(|s| self.arrays[s].density())
            .max()
            .unwrap_or(0)
    }

    #[inline]
    fn slot(&self, t1: u32, t2: u32) -> usize {
        t1 as usize * self.k + t2 as usize
    }

    fn note_rounds(&mut self, rounds: u32) {
        self.rounds.queries += 1;
        self.rounds.last = rounds;
        self.rounds.max = self.rounds.max.max(rounds);
    }

    /// Forward closure from `node`; stops early once `stop` is satisfied
    /// for `(chain, index)`.
    fn forward(&mut self, node: NodeId, stop: Option<NodeId>) {
        let src = node.chain as usize;
        let k = self.k;
        for t in 0..k {
            self.closure[t] = if t == src {
                INF
            } else {
                self.arrays[src * k + t]
                    .suffix_min(node.index)
                    .unwrap_or(INF)
            };
        }
        let done = |closure: &[u32]| stop.is_some_and(|s| closure[s.chain as usize] <= s.index);
        let mut rounds = 0;
        if !done(&self.closure) {
            loop {
                rounds += 1;
                let mut changed = false;
                for t1 in (0..k).filter(|&t| t != src) {
                    for t2 in (0..k).filter(|&t| t != src && t != t1) {
                        let from = self.closure[t2];
                        if from == INF {
                            continue;
                        }
                        if let Some(v) = self.arrays[t2 * k + t1].suffix_min(from) {
                            if v < self.closure[t1] {
                                self.closure[t1] = v;
                                changed = true;
                            }
                        }
                    }
                }
                if !changed || done(&self.closure) {
                    break;
                }
            }
        }
        self.note_rounds(rounds);
    }

    fn backward(&mut self, node: NodeId) {
        let dst = node.chain as usize;
        let k = self.k;
        for t in 0..k {
            self.closure_back[t] = if t == dst {
                None
            } else {
                self.arrays[t * k + dst].arg_leq(node.index)
            };
        }
        let mut rounds = 0;
        loop {
            rounds += 1;
            let mut changed = false;
            for t1 in (0..k).filter(|&t| t != dst) {
                for t2 in (0..k).filter(|&t| t != dst && t != t1) {
                    let Some(to) = self.closure_back[t2] else {
                        continue;
                    };
                    if let Some(v) = self.arrays[t1 * k + t2].arg_leq(to) {
                        if self.closure_back[t1].is_none_or(|c| v > c) {
                            self.closure_back[t1] = Some(v);
                            changed = true;
                        }
                    }
                }
            }
            if !changed {
                break;
            }
        }
        self.note_rounds(rounds);
    }
}

impl PartialOrder for DynamicPartialOrder {
    fn geometry(&self) -> &ChainGeometry {
        &self.geom
    }

    fn supports_delete(&self) -> bool {
        true
    }

    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate_edge(from, to)?;
        if self.has_edge(from, to) {
            return Err(PoError::DuplicateEdge { from, to });
        }
        if self.cycle_guard && self.reachable(to, from)? {
            return Err(PoError::CycleDetected { from, to });
        }
        let s = self.slot(from.chain, to.chain);
        let set = self.edges[s].entry(from.index).or_default();
        let mut cost = UpdateCost { array_ops: 0, set_ops: 1 };
        if set.first().is_none_or(|&m| to.index < m) {
            self.arrays[s].assign(from.index, Some(to.index));
            cost.array_ops += 1;
        }
        set.insert(to.index);
        self.edge_count += 1;
        self.cost = cost;
        self.touched.push((s, from.index));
        Ok(())
    }

    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        if !self.has_edge(from, to) {
            return Err(PoError::MissingEdge { from, to });
        }
        let s = self.slot(from.chain, to.chain);
        let set = self.edges[s].get_mut(&from.index).expect("edge present");
        let was_min = set.first() == Some(&to.index);
        set.remove(&to.index);
        let next = set.first().copied();
        if next.is_none() {
            self.edges[s].remove(&from.index);
        }
        let mut cost = UpdateCost { array_ops: 0, set_ops: 1 };
        if was_min {
            self.arrays[s].assign(from.index, next);
            cost.array_ops += 1;
        }
        self.edge_count -= 1;
        self.cost = cost;
        self.touched.push((s, from.index));
        Ok(())
    }

    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        if from.chain == to.chain {
            return Ok(from.index <= to.index);
        }
        self.forward(from, Some(to));
        Ok(self.closure[to.chain as usize] <= to.index)
    }

    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        if chain == node.chain {
            return Ok(Some(node.index));
        }
        self.forward(node, None);
        let c = self.closure[chain as usize];
        Ok((c != INF).then_some(c))
    }

    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        if chain == node.chain {
            return Ok(Some(node.index));
        }
        self.backward(node);
        Ok(self.closure_back[chain as usize])
    }

    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.geom.grow(chain, new_len)?;
        for t2 in 0..self.k as u32 {
            if t2 != chain {
                let s = self.slot(chain, t2);
                self.arrays[s].grow_to(new_len);
            }
        }
        Ok(())
    }

    fn audit(&mut self, cross_density: usize) -> Result<(), String> {
        if self.rounds.max as usize > self.k {
            return Err(format!(
                "closure took {} rounds with {} chains",
                self.rounds.max, self.k
            ));
        }
        if self.cost.array_ops > 1 || self.cost.set_ops > 1 {
            return Err(format!("update cost {:?} above one operation each", self.cost));
        }
        let mut touched = std::mem::take(&mut self.touched);
        touched.sort_unstable();
        touched.dedup();
        let mut last = usize::MAX;
        for &(s, j1) in &touched {
            let (t1, t2) = (s / self.k, s % self.k);
            let a = &self.arrays[s];
            let want = self.edges[s].get(&j1).and_then(|set| set.first().copied());
            let got = a.get(j1).map_err(|e| e.to_string())?;
            if got != want {
                return Err(format!(
                    "array ({t1},{t2}) slot {j1} holds {got:?}, edge set minimum {want:?}"
                ));
            }
            if s == last {
                continue;
            }
            last = s;
            a.check().map_err(|e| format!("array ({t1},{t2}): {e}"))?;
            if a.density() > cross_density {
                return Err(format!(
                    "array ({t1},{t2}) has density {} above cross-chain density {cross_density}",
                    a.density()
                ));
            }
        }
        Ok(())
    }

    fn tree_nodes(&self) -> Option<usize> {
        Some(
            (0..self.arrays.len())
                .filter(|s| s / self.k != s % self.k)
                .map(|s| self.arrays[s].node_count())
                .sum(),
        )
    }

    fn max_closure_rounds(&self) -> Option<u32> {
        Some(self.rounds.max)
    }
}
