//! Competitor backends: vector clocks, a plain edge graph, and the
//! incremental scheme over conventional segment trees.

mod graph;
mod plain_st;
mod vector_clock;

pub use graph::GraphPO;
pub use plain_st::{PlainSegmentTree, PlainStPO};
pub use vector_clock::VectorClockPO;
