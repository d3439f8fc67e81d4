//! Dynamic reachability over chain DAGs with Collective Sparse Segment Trees.
//!
//! The crate provides two CSST backends ([`DynamicPartialOrder`] for fully
//! dynamic workloads, [`IncrementalPartialOrder`] for insert-only ones), the
//! underlying sparse segment tree ([`SuffixMinArray`]), baseline
//! implementations, a brute-force [`OracleGraph`], and the harness behind the
//! `csst` command-line tool.

pub mod baselines;
pub mod dynamic;
pub mod harness;
pub mod incremental;
pub mod model;
pub mod oracle;
pub mod sst;

pub use baselines::{GraphPO, PlainStPO, VectorClockPO};
pub use dynamic::DynamicPartialOrder;
pub use incremental::IncrementalPartialOrder;
pub use model::{ChainGeometry, NodeId, PartialOrder, PoError};
pub use oracle::OracleGraph;
pub use sst::{SstError, SuffixMinArray, SuffixMinima};
