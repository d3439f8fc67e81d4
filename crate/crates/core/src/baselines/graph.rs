use std::collections::{BTreeMap, HashSet};

use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};

/// Explicit cross-chain edges, not transitively closed. Queries search from
/// the source, remembering per chain the earliest (or latest) event reached
/// so far; an event dominated by an earlier visit on its chain is skipped.
#[derive(Clone, Debug)]
pub struct GraphPO {
    geom: ChainGeometry,
    edges: HashSet<(NodeId, NodeId)>,
    out: Vec<BTreeMap<u32, Vec<NodeId>>>,
    inc: Vec<BTreeMap<u32, Vec<NodeId>>>,
    best: Vec<Option<u32>>,
    queue: Vec<NodeId>,
}

impl GraphPO {
    pub fn new(geom: ChainGeometry) -> Self {
        let k = geom.chains() as usize;
        GraphPO {
            geom,
            edges: HashSet::new(),
            out: vec![BTreeMap::new(); k],
            inc: vec![BTreeMap::new(); k],
            best: vec![None; k],
            queue: Vec::new(),
        }
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    /// Earliest index reached per chain; stops once `stop` is reached.
    fn forward(&mut self, from: NodeId, stop: Option<NodeId>) {
        self.best.fill(None);
        self.queue.clear();
        self.best[from.chain as usize] = Some(from.index);
        self.queue.push(NodeId::new(from.chain, from.index));
        // Indices scanned[t].. of chain t have been scanned.
        let mut scanned: Vec<u32> = self.geom.lengths().to_vec();
        while let Some(x) = self.queue.pop() {
            let t = x.chain as usize;
            let hi = scanned[t];
            if x.index >= hi {
                continue;
            }
            scanned[t] = x.index;
            for (_, targets) in self.out[t].range(x.index..hi) {
                for &y in targets {
                    let b = &mut self.best[y.chain as usize];
                    if b.is_none_or(|b| y.index < b) {
                        *b = Some(y.index);
                        self.queue.push(y);
                    }
                }
            }
            if let Some(s) = stop {
                if self.best[s.chain as usize].is_some_and(|b| b <= s.index) {
                    return;
                }
            }
        }
    }

    /// Latest index reaching `to` per chain.
    fn backward(&mut self, to: NodeId) {
        self.best.fill(None);
        self.queue.clear();
        self.best[to.chain as usize] = Some(to.index);
        self.queue.push(to);
        // Indices 0..=scanned[t] of chain t have been scanned.
        let mut scanned: Vec<Option<u32>> = vec![None; self.best.len()];
        while let Some(x) = self.queue.pop() {
            let t = x.chain as usize;
            let lo = scanned[t].map_or(0, |s| s + 1);
            if scanned[t].is_some_and(|s| x.index <= s) {
                continue;
            }
            scanned[t] = Some(x.index);
            for (_, sources) in self.inc[t].range(lo..=x.index) {
                for &y in sources {
                    let b = &mut self.best[y.chain as usize];
                    if b.is_none_or(|b| y.index > b) {
                        *b = Some(y.index);
                        self.queue.push(y);
                    }
                }
            }
        }
    }
}

impl PartialOrder for GraphPO {
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
        self.out[from.chain as usize]
            .entry(from.index)
            .or_default()
            .push(to);
        self.inc[to.chain as usize]
            .entry(to.index)
            .or_default()
            .push(from);
        Ok(())
    }

    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        if !self.edges.remove(&(from, to)) {
            return Err(PoError::MissingEdge { from, to });
        }
        fn unlink(map: &mut BTreeMap<u32, Vec<NodeId>>, key: u32, val: NodeId) {
            let list = map.get_mut(&key).expect("edge listed");
            list.retain(|&x| x != val);
            if list.is_empty() {
                map.remove(&key);
            }
        }
        unlink(&mut self.out[from.chain as usize], from.index, to);
        unlink(&mut self.inc[to.chain as usize], to.index, from);
        Ok(())
    }

    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.geom.validate(from)?;
        self.geom.validate(to)?;
        if from.chain == to.chain && from.index <= to.index {
            return Ok(true);
        }
        self.forward(from, Some(to));
        Ok(self.best[to.chain as usize].is_some_and(|b| b <= to.index))
    }

    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        if chain == node.chain {
            return Ok(Some(node.index));
        }
        self.forward(node, None);
        Ok(self.best[chain as usize])
    }

    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.geom.validate(node)?;
        self.geom.validate_chain(chain)?;
        if chain == node.chain {
            return Ok(Some(node.index));
        }
        self.backward(node);
        Ok(self.best[chain as usize])
    }

    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.geom.grow(chain, new_len)
    }
}
