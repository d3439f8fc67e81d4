//! Incremental CSSTs: one suffix-minima array per ordered chain pair, holding
//! transitive cross-chain reachability.
//!
//! `A[t1][t2][j1] = j2` records a path `⟨t1,j1⟩ →* ⟨t2,j2⟩`, and every path
//! between the two chains is dominated by some entry at or after `j1`, so
//! `successor` and `predecessor` are single `min`/`argleq` lookups. Each
//! insertion closes the new edge transitively over all `k(k-1)` pairs.

use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};
use crate::sst::{SuffixMinArray, SuffixMinima, DEFAULT_BLOCK_THRESHOLD};

/// Counters for the suffix-minima work done by insertions.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct InsertStats {
    pub inserts: u64,
    /// Array operations performed by the most recent insertion.
    pub last_ops: u64,
    pub max_ops: u64,
    /// Array entries written in total.
    pub writes: u64,
}

#[derive(Clone, Debug)]
pub struct IncrementalPartialOrder<S: SuffixMinima = SuffixMinArray> {
    geom: ChainGeometry,
    k: usize,
    arrays: Vec<S>,
    cycle_guard: bool,
    preds: Vec<Option<u32>>,
    succs: Vec<Option<u32>>,
    dirty: Vec<bool>,
    stats: InsertStats,
}

impl<S: SuffixMinima> IncrementalPartialOrder<S> {
    pub fn new(geom: ChainGeometry) -> Self {
        Self::with_options(geom, DEFAULT_BLOCK_THRESHOLD, false)
    }

    /// `cycle_guard` makes insertions that would close a cycle fail with
    /// [`PoError::CycleDetected`] instead of corrupting the arrays.
    pub fn with_options(geom: ChainGeometry, block_threshold: u32, cycle_guard: bool) -> Self {
        let k = geom.chains() as usize;
        let mut arrays = Vec::with_capacity(k * k);
        for t1 in 0..k {
            for t2 in 0..k {
                // The diagonal is never used; keep it minimal.
                let cap = if t1 == t2 { 1 } else { geom.len_of(t1 as u32) };
                arrays.push(S::with_capacity(cap.max(1), block_threshold));
            }
        }
        IncrementalPartialOrder {
            geom,
            k,
            arrays,
            cycle_guard,
            preds: vec![None; k],
            succs: vec![None; k],
            dirty: vec![false; k * k],
            stats: InsertStats::default(),
        }
    }

    pub fn set_cycle_guard(&mut self, on: bool) {
        self.cycle_guard = on;
    }

    pub fn stats(&self) -> InsertStats {
        self.stats
    }

    /// The array for `(t1, t2)`, `None` on the diagonal or out of range.
    pub fn array(&self, t1: u32, t2: u32) -> Option<&S> {
        let k = self.k as u32;
        (t1 < k && t2 < k && t1 != t2).then(|| &self.arrays[self.slot(t1, t2)])
    }

    /// Largest density over all arrays.
    pub fn max_density(&self) -> usize {
        self.off_diagonal().map(|a| a.density()).max().unwrap_or(0)
    }

    fn off_diagonal(&self) -> impl Iterator<Item = &S> {
        let k = self.k;
        self.arrays
            .iter()
            .enumerate()
            .filter(move |(i, _)| i / k != i % k)
            .map(|(_, a)| a)
    }

    #[inline]
    fn slot(&self, t1: u32, t2: u32) -> usize {
        t1 as usize * self.k + t2 as usize
    }

    #[inline]
    fn succ_raw(&self, node: NodeId, chain: u32) -> Option<u32> {
        if chain == node.chain {
            Some(node.index)
        } else {
            self.arrays[self.slot(node.chain, chain)].suffix_min(node.index)
        }
    }

    #[inline]
    fn pred_raw(&self, node: NodeId, chain: u32) -> Option<u32> {
        if chain == node.chain {
            Some(node.index)
        } else {
            self.arrays[self.slot(chain, node.chain)].arg_leq(node.index)
        }
    }

    fn reach_raw(&self, from: NodeId, to: NodeId) -> bool {
        self.succ_raw(from, to.chain).is_some_and(|j| j <= to.index)
    }
}

impl<S: SuffixMinima> PartialOrder for IncrementalPartialOrder<S> {
    fn geometry(&self) -> &ChainGeometry {
        &self.geom
    }

    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate_edge(from, to)?;
        if self.cycle_guard && self.reach_raw(to, from) {
            return Err(PoError::CycleDetected { from, to });
        }
        // In a DAG none of the updates below changes these bindings, so
        // they are computed once up front.
        let mut ops = 0u64;
        for t in 0..self.k as u32 {
            self.preds[t as usize] = self.pred_raw(from, t);
            self.succs[t as usize] = self.succ_raw(to, t);
            if t != from.chain {
                ops += 1;
            }
            if t != to.chain {
                ops += 1;
            }
        }
        for t1 in 0..self.k as u32 {
            let Some(j1) = self.preds[t1 as usize] else {
                continue;
            };
            for t2 in 0..self.k as u32 {
                if t1 == t2 {
                    continue;
                }
                let Some(j2) = self.succs[t2 as usize] else {
                    continue;
                };
                let s = self.slot(t1, t2);
                ops += 1;
                if self.arrays[s].suffix_min(j1).is_none_or(|m| m > j2) {
                    ops += 1;
                    self.arrays[s].assign(j1, Some(j2));
                    self.dirty[s] = true;
                    self.stats.writes += 1;
                }
            }
        }
        self.stats.inserts += 1;
        self.stats.last_ops = ops;
        self.stats.max_ops = self.stats.max_ops.max(ops);
        Ok(())
    }

    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        Ok(self.reach_raw(from, to))
    }

    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        Ok(self.succ_raw(node, chain))
    }

    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        Ok(self.pred_raw(node, chain))
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
        let max_ops = 3 * (self.k as u64).pow(2);
        if self.stats.last_ops > max_ops {
            return Err(format!(
                "insertion used {} array operations, bound {max_ops}",
                self.stats.last_ops
            ));
        }
        for s in 0..self.arrays.len() {
            if !std::mem::take(&mut self.dirty[s]) {
                continue;
            }
            let (t1, t2) = (s / self.k, s % self.k);
            let a = &self.arrays[s];
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
        Some(self.off_diagonal().map(|a| a.node_count()).sum())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::oracle::OracleGraph;
    use proptest::prelude::*;

    fn n(c: u32, i: u32) -> NodeId {
        NodeId::new(c, i)
    }

    fn fig8() -> IncrementalPartialOrder {
        let mut po = IncrementalPartialOrder::new(ChainGeometry::uniform(4, 3).unwrap());
        po.insert_edge(n(0, 1), n(1, 0)).unwrap();
        po.insert_edge(n(1, 2), n(2, 1)).unwrap();
        po.insert_edge(n(2, 0), n(3, 2)).unwrap();
        po
    }

    fn row(a: &SuffixMinArray) -> Vec<Option<u32>> {
        (0..a.capacity()).map(|i| a.get(i).unwrap()).collect()
    }

    #[test]
    fn transitive_entry_from_new_edge() {
        let mut po = fig8();
        assert_eq!(row(po.array(0, 1).unwrap()), [None, Some(0), None]);
        assert_eq!(row(po.array(2, 3).unwrap()), [Some(2), None, None]);
        assert!(!po.reachable(n(0, 1), n(3, 2)).unwrap());
        po.insert_edge(n(1, 1), n(2, 0)).unwrap();
        assert_eq!(po.array(0, 3).unwrap().get(1), Ok(Some(2)));
        assert_eq!(row(po.array(0, 3).unwrap()), [None, Some(2), None]);
        assert!(po.reachable(n(0, 1), n(3, 2)).unwrap());
        assert!(!po.reachable(n(0, 2), n(3, 2)).unwrap());
    }

    #[test]
    fn duplicate_insert_changes_nothing() {
        let mut po = fig8();
        let writes = po.stats().writes;
        po.insert_edge(n(0, 1), n(1, 0)).unwrap();
        assert_eq!(po.stats().writes, writes);
    }

    #[test]
    fn same_chain_answers() {
        let mut po = fig8();
        assert_eq!(po.successor(n(2, 1), 2), Ok(Some(1)));
        assert_eq!(po.predecessor(n(2, 1), 2), Ok(Some(1)));
        assert!(po.reachable(n(1, 1), n(1, 1)).unwrap());
        assert!(po.reachable(n(1, 0), n(1, 2)).unwrap());
        assert!(!po.reachable(n(1, 2), n(1, 0)).unwrap());
    }

    #[test]
    fn deletion_is_unsupported() {
        let mut po = fig8();
        let err = po.delete_edge(n(0, 1), n(1, 0)).unwrap_err();
        assert_eq!(err.kind(), "DeleteUnsupported");
        assert!(!po.supports_delete());
    }

    #[test]
    fn cycle_guard_rejects_back_edge() {
        let mut po = fig8();
        po.set_cycle_guard(true);
        let before = po.stats();
        let err = po.insert_edge(n(3, 2), n(2, 0)).unwrap_err();
        assert_eq!(err, PoError::CycleDetected { from: n(3, 2), to: n(2, 0) });
        assert_eq!(po.stats(), before);
        po.insert_edge(n(3, 0), n(2, 2)).unwrap();
    }

    #[test]
    fn out_of_range_inputs() {
        let mut po = fig8();
        assert!(po.insert_edge(n(0, 3), n(1, 0)).is_err());
        assert!(po.successor(n(0, 0), 4).is_err());
        assert_eq!(
            po.insert_edge(n(1, 0), n(1, 2)).unwrap_err().kind(),
            "SameChainUpdate"
        );
    }

    #[test]
    fn grow_then_insert() {
        let mut po = fig8();
        po.grow(3, 10).unwrap();
        po.insert_edge(n(3, 9), n(0, 2)).unwrap();
        assert!(po.reachable(n(3, 9), n(0, 2)).unwrap());
        assert!(po.reachable(n(2, 0), n(0, 2)).unwrap());
        assert_eq!(po.predecessor(n(0, 2), 2), Ok(Some(0)));
    }

    fn dag_edges(k: u32, len: u32) -> impl Strategy<Value = Vec<(NodeId, NodeId)>> {
        // Edges only go from an earlier "time" to a later one, so the
        // result is always acyclic.
        prop::collection::vec((0..k, 0..len, 0..k, 0..len), 0..60).prop_map(move |raw| {
            raw.into_iter()
                .filter(|&(t1, j1, t2, j2)| t1 != t2 && j1 < j2)
                .map(|(t1, j1, t2, j2)| (n(t1, j1), n(t2, j2)))
                .collect()
        })
    }

    fn check_against_oracle(
        po: &mut IncrementalPartialOrder,
        oracle: &mut OracleGraph,
        k: u32,
        len: u32,
    ) -> Result<(), TestCaseError> {
        for t1 in 0..k {
            for j1 in 0..len {
                let u = n(t1, j1);
                for t2 in 0..k {
                    prop_assert_eq!(po.successor(u, t2)?, oracle.successor(u, t2)?);
                    prop_assert_eq!(po.predecessor(u, t2)?, oracle.predecessor(u, t2)?);
                    if t1 == t2 {
                        continue;
                    }
                    // Soundness of every stored entry.
                    if let Some(j2) = po.array(t1, t2).unwrap().get(j1).unwrap() {
                        prop_assert!(oracle.reachable(u, n(t2, j2))?);
                    }
                }
            }
        }
        Ok(())
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn agrees_with_oracle(edges in dag_edges(4, 12)) {
            let geom = ChainGeometry::uniform(4, 12).unwrap();
            let mut po = IncrementalPartialOrder::new(geom.clone());
            let mut oracle = OracleGraph::new(geom);
            for (u, v) in edges {
                po.insert_edge(u, v)?;
                if !oracle.has_edge(u, v) {
                    oracle.insert_edge(u, v)?;
                }
                prop_assert!(po.stats().last_ops <= 3 * 16);
                let d = oracle.cross_density();
                po.audit(d).map_err(TestCaseError::fail)?;
            }
            check_against_oracle(&mut po, &mut oracle, 4, 12)?;
        }

        #[test]
        fn insertion_order_is_irrelevant(edges in dag_edges(3, 10), seed in any::<u64>()) {
            use rand::seq::SliceRandom;
            use rand::SeedableRng;
            let geom = ChainGeometry::uniform(3, 10).unwrap();
            let mut a = IncrementalPartialOrder::<SuffixMinArray>::new(geom.clone());
            let mut b = IncrementalPartialOrder::<SuffixMinArray>::new(geom);
            let mut shuffled = edges.clone();
            shuffled.shuffle(&mut rand_chacha::ChaCha8Rng::seed_from_u64(seed));
            for (u, v) in edges {
                a.insert_edge(u, v)?;
            }
            for (u, v) in shuffled {
                b.insert_edge(u, v)?;
            }
            for t1 in 0..3 {
                for j in 0..10 {
                    for t2 in 0..3 {
                        prop_assert_eq!(a.successor(n(t1, j), t2)?, b.successor(n(t1, j), t2)?);
                    }
                }
            }
        }

        #[test]
        fn answers_are_monotone_and_transitive(edges in dag_edges(3, 8)) {
            let geom = ChainGeometry::uniform(3, 8).unwrap();
            let mut po = IncrementalPartialOrder::<SuffixMinArray>::new(geom);
            let nodes: Vec<_> = (0..3).flat_map(|t| (0..8).map(move |i| n(t, i))).collect();
            let mut prev: Vec<Option<u32>> = vec![None; nodes.len() * 3];
            for (u, v) in edges {
                po.insert_edge(u, v)?;
                for (x, &a) in nodes.iter().enumerate() {
                    for t in 0..3 {
                        let s = po.successor(a, t)?;
                        let p = prev[x * 3 + t as usize];
                        if let Some(p) = p {
                            prop_assert!(s.is_some_and(|s| s <= p));
                        }
                        prev[x * 3 + t as usize] = s;
                    }
                }
            }
            for &a in &nodes {
                for &b in &nodes {
                    if !po.reachable(a, b)? {
                        continue;
                    }
                    for &c in &nodes {
                        if po.reachable(b, c)? {
                            prop_assert!(po.reachable(a, c)?);
                        }
                    }
                }
            }
        }
    }
}
