//! Shared domain model for chain DAGs.
//!
//! A chain DAG consists of `k` totally ordered chains (usually one per
//! thread). Node `⟨t, i⟩` is the `i`-th event of chain `t`; the chain edges
//! `⟨t, i⟩ → ⟨t, i + 1⟩` are implicit and never stored. Every backend in this
//! crate maintains the reachability relation induced by the implicit chain
//! edges plus a set of explicit cross-chain edges, behind the
//! [`PartialOrder`] trait.

use std::fmt;

use thiserror::Error;

/// Identifies one event of a chain DAG.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId {
    pub chain: u32,
    pub index: u32,
}

impl NodeId {
    pub const fn new(chain: u32, index: u32) -> Self {
        NodeId { chain, index }
    }
}

impl fmt::Display for NodeId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "<{},{}>", self.chain, self.index)
    }
}

impl From<(u32, u32)> for NodeId {
    fn from((chain, index): (u32, u32)) -> Self {
        NodeId { chain, index }
    }
}

/// Errors raised by partial-order backends.
#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum PoError {
    /// A node (or a bare chain, when `index` is `None`) lies outside the
    /// declared geometry.
    #[error("node {} is out of range", fmt_maybe_node(*.chain, *.index))]
    OutOfRange { chain: u32, index: Option<u32> },
    #[error("edge {from} -> {to} connects two nodes of the same chain")]
    SameChainUpdate { from: NodeId, to: NodeId },
    #[error("edge {from} -> {to} is already present")]
    DuplicateEdge { from: NodeId, to: NodeId },
    #[error("edge {from} -> {to} is not present")]
    MissingEdge { from: NodeId, to: NodeId },
    #[error("backend does not support deleting {from} -> {to}")]
    DeleteUnsupported { from: NodeId, to: NodeId },
    #[error("edge {from} -> {to} would close a cycle")]
    CycleDetected { from: NodeId, to: NodeId },
}

fn fmt_maybe_node(chain: u32, index: Option<u32>) -> String {
    match index {
        Some(i) => NodeId::new(chain, i).to_string(),
        None => format!("<{chain},_>"),
    }
}

impl PoError {
    /// Short machine-friendly name of the variant.
    pub fn kind(&self) -> &'static str {
        match self {
            PoError::OutOfRange { .. } => "OutOfRange",
            PoError::SameChainUpdate { .. } => "SameChainUpdate",
            PoError::DuplicateEdge { .. } => "DuplicateEdge",
            PoError::MissingEdge { .. } => "MissingEdge",
            PoError::DeleteUnsupported { .. } => "DeleteUnsupported",
            PoError::CycleDetected { .. } => "CycleDetected",
        }
    }
}

/// Number of chains and the length of each chain.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChainGeometry {
    lengths: Vec<u32>,
}

impl ChainGeometry {
    /// Builds a geometry from per-chain lengths. Returns `None` when no chain
    /// is given (`k` must be at least one).
    pub fn new(lengths: Vec<u32>) -> Option<Self> {
        if lengths.is_empty() {
            None
        } else {
            Some(ChainGeometry { lengths })
        }
    }

    /// `k` chains of `len` events each.
    pub fn uniform(k: u32, len: u32) -> Option<Self> {
        Self::new(vec![len; k as usize])
    }

    pub fn chains(&self) -> u32 {
        self.lengths.len() as u32
    }

    pub fn len_of(&self, chain: u32) -> u32 {
        self.lengths[chain as usize]
    }

    pub fn lengths(&self) -> &[u32] {
        &self.lengths
    }

    /// Total number of events.
    pub fn total(&self) -> u64 {
        self.lengths.iter().map(|&l| l as u64).sum()
    }

    pub fn validate(&self, node: NodeId) -> Result<(), PoError> {
        match self.lengths.get(node.chain as usize) {
            Some(&len) if node.index < len => Ok(()),
            _ => Err(PoError::OutOfRange {
                chain: node.chain,
                index: Some(node.index),
            }),
        }
    }

    pub fn validate_chain(&self, chain: u32) -> Result<(), PoError> {
        if chain < self.chains() {
            Ok(())
        } else {
            Err(PoError::OutOfRange { chain, index: None })
        }
    }

    /// Validates both endpoints of a prospective cross-chain edge.
    pub fn validate_edge(&self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.validate(from)?;
        self.validate(to)?;
        if from.chain == to.chain {
            return Err(PoError::SameChainUpdate { from, to });
        }
        Ok(())
    }

    /// Extends `chain` to `new_len` events. Shrinking is rejected.
    pub fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.validate_chain(chain)?;
        let len = &mut self.lengths[chain as usize];
        if new_len < *len {
            return Err(PoError::OutOfRange {
                chain,
                index: Some(new_len),
            });
        }
        *len = new_len;
        Ok(())
    }
}

/// Operation set shared by every partial-order backend.
///
/// Queries take `&mut self` because some backends keep scratch buffers for
/// their traversals. Same-chain queries are answered from program order:
/// `successor(u, u.chain)` and `predecessor(u, u.chain)` both return
/// `u.index`.
pub trait PartialOrder {
    fn geometry(&self) -> &ChainGeometry;

    /// Whether [`PartialOrder::delete_edge`] is implemented.
    fn supports_delete(&self) -> bool {
        false
    }

    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError>;

    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.geometry().validate(from)?;
        self.geometry().validate(to)?;
        Err(PoError::DeleteUnsupported { from, to })
    }

    /// `true` iff `from →* to`.
    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError>;

    /// Earliest index of `chain` reachable from `node`.
    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError>;

    /// Latest index of `chain` that reaches `node`.
    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError>;

    /// Extends a chain. Existing answers are unaffected.
    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError>;

    /// Checks internal invariants touched since the previous audit.
    /// `cross_density` is the cross-chain density of the current edge set.
    fn audit(&mut self, _cross_density: usize) -> Result<(), String> {
        Ok(())
    }

    /// Total number of allocated suffix-minima tree nodes, when meaningful.
    fn tree_nodes(&self) -> Option<usize> {
        None
    }

    /// Most relaxation rounds any closure query has needed so far.
    fn max_closure_rounds(&self) -> Option<u32> {
        None
    }
}

impl<P: PartialOrder + ?Sized> PartialOrder for Box<P> {
    fn geometry(&self) -> &ChainGeometry {
        (**self).geometry()
    }
    fn supports_delete(&self) -> bool {
        (**self).supports_delete()
    }
    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        (**self).insert_edge(from, to)
    }
    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        (**self).delete_edge(from, to)
    }
    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        (**self).reachable(from, to)
    }
    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        (**self).successor(node, chain)
    }
    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        (**self).predecessor(node, chain)
    }
    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        (**self).grow(chain, new_len)
    }
    fn audit(&mut self, cross_density: usize) -> Result<(), String> {
        (**self).audit(cross_density)
    }
    fn tree_nodes(&self) -> Option<usize> {
        (**self).tree_nodes()
    }
    fn max_closure_rounds(&self) -> Option<u32> {
        (**self).max_closure_rounds()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn validate_boundaries() {
        let g = ChainGeometry::new(vec![1]).unwrap();
        assert_eq!(g.validate(NodeId::new(0, 0)), Ok(()));
        assert_eq!(
            g.validate(NodeId::new(1, 0)),
            Err(PoError::OutOfRange {
                chain: 1,
                index: Some(0)
            })
        );
        let g = ChainGeometry::new(vec![3]).unwrap();
        assert!(matches!(
            g.validate(NodeId::new(0, 3)),
            Err(PoError::OutOfRange { .. })
        ));
        assert!(g.validate(NodeId::new(0, 2)).is_ok());
    }

    #[test]
    fn geometry_needs_a_chain() {
        assert!(ChainGeometry::new(vec![]).is_none());
        assert!(ChainGeometry::new(vec![0]).is_some());
    }

    #[test]
    fn same_chain_edges_rejected() {
        let g = ChainGeometry::uniform(2, 4).unwrap();
        let err = g
            .validate_edge(NodeId::new(1, 0), NodeId::new(1, 2))
            .unwrap_err();
        assert_eq!(err.kind(), "SameChainUpdate");
        assert!(err.to_string().contains("<1,0>"));
    }

    #[test]
    fn grow_extends_only() {
        let mut g = ChainGeometry::uniform(2, 4).unwrap();
        g.grow(1, 9).unwrap();
        assert_eq!(g.lengths(), &[4, 9]);
        assert!(g.grow(1, 3).is_err());
        assert!(g.grow(2, 10).is_err());
        assert_eq!(g.total(), 13);
    }
}
