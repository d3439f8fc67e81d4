//! Brute-force ground truth. Keeps the explicit edge set and answers every
//! query with a fresh node-by-node search over chain and cross edges.

use std::collections::{BTreeSet, HashMap};

use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};

#[derive(Clone, Debug)]
pub struct OracleGraph {
    geom: ChainGeometry,
    edges: BTreeSet<(NodeId, NodeId)>,
    out: HashMap<NodeId, Vec<NodeId>>,
    inc: HashMap<NodeId, Vec<NodeId>>,
    offsets: Vec<usize>,
    stamp: Vec<u32>,
    epoch: u32,
    stack: Vec<NodeId>,
}

impl OracleGraph {
    pub fn new(geom: ChainGeometry) -> Self {
        let mut g = OracleGraph {
            geom,
            edges: BTreeSet::new(),
            out: HashMap::new(),
            inc: HashMap::new(),
            offsets: Vec::new(),
            stamp: Vec::new(),
            epoch: 0,
            stack: Vec::new(),
        };
        g.relayout();
        g
    }

    fn relayout(&mut self) {
        self.offsets.clear();
        let mut acc = 0usize;
        for &len in self.geom.lengths() {
            self.offsets.push(acc);
            acc += len as usize;
        }
        self.stamp = vec![0; acc];
        self.epoch = 0;
    }

    pub fn has_edge(&self, from: NodeId, to: NodeId) -> bool {
        self.edges.contains(&(from, to))
    }

    /// Explicit edges in sorted order.
    pub fn edges(&self) -> impl Iterator<Item = (NodeId, NodeId)> + '_ {
        self.edges.iter().copied()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Maximum over chains of the number of nodes with an outgoing cross
    /// edge.
    pub fn cross_density(&self) -> usize {
        let mut per_chain = vec![0usize; self.geom.chains() as usize];
        for (node, targets) in &self.out {
            if !targets.is_empty() {
                per_chain[node.chain as usize] += 1;
            }
        }
        per_chain.into_iter().max().unwrap_or(0)
    }

    fn next_epoch(&mut self) -> u32 {
        self.epoch = self.epoch.wrapping_add(1);
        if self.epoch == 0 {
            self.stamp.fill(0);
            self.epoch = 1;
        }
        self.epoch
    }

    /// Earliest node of every chain reachable from `from`.
    pub fn earliest_from(&mut self, from: NodeId) -> Result<Vec<Option<u32>>, PoError> {
        self.geom.validate(from)?;
        self.search(from, true)
    }

    /// Latest node of every chain that reaches `to`.
    pub fn latest_to(&mut self, to: NodeId) -> Result<Vec<Option<u32>>, PoError> {
        self.geom.validate(to)?;
        self.search(to, false)
    }

    fn search(&mut self, start: NodeId, forward: bool) -> Result<Vec<Option<u32>>, PoError> {
        let mut best: Vec<Option<u32>> = vec![None; self.geom.chains() as usize];
        let epoch = self.next_epoch();
        let OracleGraph {
            geom,
            out,
            inc,
            offsets,
            stamp,
            stack,
            ..
        } = self;
        let adj = if forward { &*out } else { &*inc };
        let mut mark = |node: NodeId| {
            let slot = &mut stamp[offsets[node.chain as usize] + node.index as usize];
            std::mem::replace(slot, epoch) != epoch
        };
        stack.clear();
        mark(start);
        stack.push(start);
        while let Some(x) = stack.pop() {
            let b = &mut best[x.chain as usize];
            *b = Some(match (*b, forward) {
                (None, _) => x.index,
                (Some(y), true) => y.min(x.index),
                (Some(y), false) => y.max(x.index),
            });
            let along = if forward {
                (x.index + 1 < geom.len_of(x.chain)).then(|| NodeId::new(x.chain, x.index + 1))
            } else {
                x.index.checked_sub(1).map(|i| NodeId::new(x.chain, i))
            };
            if let Some(y) = along {
                if mark(y) {
                    stack.push(y);
                }
            }
            for &y in adj.get(&x).map_or(&[][..], |l| l.as_slice()) {
                if mark(y) {
                    stack.push(y);
                }
            }
        }
        Ok(best)
    }
}

impl PartialOrder for OracleGraph {
    fn geometry(&self) -> &ChainGeometry {
        &self.geom
    }

    fn supports_delete(&self) -> bool {
        true
    }

    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate_edge(from, to)?;
        if !self.edges.insert((from, to)) {
            return Err(PoError::DuplicateEdge { from, to });
        }
        self.out.entry(from).or_default().push(to);
        self.inc.entry(to).or_default().push(from);
        Ok(())
    }

    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        if !self.edges.remove(&(from, to)) {
            return Err(PoError::MissingEdge { from, to });
        }
        fn unlink(map: &mut HashMap<NodeId, Vec<NodeId>>, key: NodeId, val: NodeId) {
            let list = map.get_mut(&key).expect("edge lists in sync");
            let at = list.iter().position(|&x| x == val).expect("edge listed");
            list.swap_remove(at);
            if list.is_empty() {
                map.remove(&key);
            }
        }
        unlink(&mut self.out, from, to);
        unlink(&mut self.inc, to, from);
        Ok(())
    }

    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.geom.validate(to)?;
        let best = self.earliest_from(from)?;
        Ok(best[to.chain as usize].is_some_and(|j| j <= to.index))
    }

    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate_chain(chain)?;
        Ok(self.earliest_from(node)?[chain as usize])
    }

    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate_chain(chain)?;
        Ok(self.latest_to(node)?[chain as usize])
    }

    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.geom.grow(chain, new_len)?;
        self.relayout();
        Ok(())
    }
}
