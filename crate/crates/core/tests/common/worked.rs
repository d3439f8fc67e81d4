//! Worked examples with exact expected values. Each check panics on the
//! first mismatch.

use csst::{
    ChainGeometry, DynamicPartialOrder, IncrementalPartialOrder, OracleGraph, PartialOrder,
    SuffixMinArray,
};

use super::n;

fn layout(a: &SuffixMinArray) -> Vec<(u32, u32, u32, u32, u32)> {
    // (depth, start, end, min, pos) in preorder.
    fn walk(v: &csst::sst::NodeView, depth: u32, out: &mut Vec<(u32, u32, u32, u32, u32)>) {
        out.push((depth, v.start, v.end, v.min, v.pos));
        for c in [&v.left, &v.right].into_iter().flatten() {
            walk(c, depth + 1, out);
        }
    }
    let mut out = Vec::new();
    if let Some(root) = a.snapshot() {
        walk(&root, 0, &mut out);
    }
    out
}

/// Suffix minima and `argleq` on `[6, 9, 8, 10]`, then `A[3] = 7`.
pub fn four_entry_table() {
    for b in [1, 2, 32] {
        let mut a = SuffixMinArray::new(4, b).unwrap();
        for (i, v) in [6, 9, 8, 10].into_iter().enumerate() {
            a.update(i as u32, Some(v)).unwrap();
        }
        let mins: Vec<_> = (0..4).map(|i| a.min_suffix(i).unwrap()).collect();
        assert_eq!(mins, [Some(6), Some(8), Some(8), Some(10)], "b={b}");
        assert_eq!(a.argleq(7), Some(0), "b={b}");
        assert_eq!(a.argleq(9), Some(2), "b={b}");
        assert_eq!(a.argleq(11), Some(3), "b={b}");
        assert_eq!(a.argleq(5), None, "b={b}");
        a.update(3, Some(7)).unwrap();
        assert_eq!(a.min_suffix(2), Ok(Some(7)), "b={b}");
        assert_eq!(a.min_suffix(3), Ok(Some(7)), "b={b}");
        a.check_invariants().unwrap();
    }
}

/// Minima indexing on `[77, 42, 65, 59, 80, 90, 95, 100]`: the root holds
/// `(42, 1)`, its left child `(59, 3)`, and `min(A, 2)` stops at depth 1.
pub fn minima_indexing() {
    let mut a = SuffixMinArray::new(8, 1).unwrap();
    for (i, v) in [77, 42, 65, 59, 80, 90, 95, 100].into_iter().enumerate() {
        a.update(i as u32, Some(v)).unwrap();
    }
    let root = a.snapshot().unwrap();
    assert_eq!((root.start, root.end, root.min, root.pos), (0, 7, 42, 1));
    let left = root.left.as_ref().unwrap();
    assert_eq!((left.start, left.end, left.min, left.pos), (0, 3, 59, 3));
    let (m, trace) = a.min_suffix_traced(0).unwrap();
    assert_eq!((m, trace.max_depth), (Some(42), 0));
    let (m, trace) = a.min_suffix_traced(2).unwrap();
    assert_eq!((m, trace.max_depth), (Some(59), 1));
}

/// Four updates on a capacity-8 array and the exact node layout after each.
pub fn sparse_evolution() {
    let mut a = SuffixMinArray::new(8, 1).unwrap();
    a.update(2, Some(65)).unwrap();
    assert_eq!(layout(&a), [(0, 0, 7, 65, 2)]);
    a.update(3, Some(42)).unwrap();
    assert_eq!(layout(&a), [(0, 0, 7, 42, 3), (1, 2, 2, 65, 2)]);
    a.update(0, Some(59)).unwrap();
    assert_eq!(
        layout(&a),
        [(0, 0, 7, 42, 3), (1, 0, 3, 59, 0), (2, 2, 2, 65, 2)]
    );
    a.update(7, Some(13)).unwrap();
    assert_eq!(
        layout(&a),
        [
            (0, 0, 7, 13, 7),
            (1, 0, 3, 42, 3),
            (2, 0, 0, 59, 0),
            (2, 2, 2, 65, 2),
        ]
    );
    a.check_invariants().unwrap();
    assert_eq!(a.node_count(), 4);
    assert_eq!(a.min_suffix(1), Ok(Some(13)));
    assert_eq!(a.argleq(50), Some(7));
    assert_eq!(a.argleq(12), None);
}

/// A lone entry at index 1 and a dense run over 32..=39 in a 64-slot array
/// with block threshold 8: the run becomes one block node.
pub fn block_formation() {
    let mut a = SuffixMinArray::new(64, 8).unwrap();
    let dense = [(32, 11), (33, 10), (34, 15), (36, 13), (37, 22), (38, 24), (39, 29)];
    a.update(1, Some(50)).unwrap();
    for (i, v) in dense {
        a.update(i, Some(v)).unwrap();
    }
    a.check_invariants().unwrap();
    let root = a.snapshot().unwrap();
    assert_eq!((root.start, root.end, root.min, root.pos), (0, 63, 10, 33));
    let left = root.left.as_ref().unwrap();
    assert_eq!((left.start, left.end, left.min, left.pos), (1, 1, 50, 1));
    let right = root.right.as_ref().unwrap();
    assert!(right.is_block());
    assert_eq!((right.start, right.end), (32, 39));
    // The block keeps every entry except the one promoted to the root.
    assert_eq!(
        right.block,
        [Some(11), None, Some(15), None, Some(13), Some(22), Some(24), Some(29)]
    );
    assert_eq!(a.node_count(), 3);
    assert_eq!(a.min_suffix(34), Ok(Some(13)));
    assert_eq!(a.min_suffix(2), Ok(Some(10)));
    assert_eq!(a.argleq(12), Some(33));
    assert_eq!(a.argleq(13), Some(36));
    assert_eq!(a.argleq(49), Some(39));
}

fn crossing_edges() -> [(csst::NodeId, csst::NodeId); 4] {
    [
        (n(0, 1), n(1, 0)),
        (n(0, 2), n(3, 2)),
        (n(1, 1), n(2, 1)),
        (n(2, 2), n(3, 1)),
    ]
}

/// Four chains of three events; the earliest successor of `⟨0,0⟩` on chain 3
/// goes through chains 1 and 2.
pub fn crossing_successor() {
    let geom = ChainGeometry::uniform(4, 3).unwrap();
    let mut dynamic = DynamicPartialOrder::new(geom.clone());
    let mut incremental: IncrementalPartialOrder = IncrementalPartialOrder::new(geom.clone());
    let mut oracle = OracleGraph::new(geom);
    for (u, v) in crossing_edges() {
        dynamic.insert_edge(u, v).unwrap();
        incremental.insert_edge(u, v).unwrap();
        oracle.insert_edge(u, v).unwrap();
    }
    let backends: [&mut dyn PartialOrder; 3] = [&mut dynamic, &mut incremental, &mut oracle];
    for po in backends {
        assert_eq!(po.successor(n(0, 0), 3), Ok(Some(1)));
        assert_eq!(po.predecessor(n(3, 1), 0), Ok(Some(1)));
        assert_eq!(po.reachable(n(0, 0), n(3, 0)), Ok(false));
    }
    dynamic.delete_edge(n(2, 2), n(3, 1)).unwrap();
    assert_eq!(dynamic.successor(n(0, 0), 3), Ok(Some(2)));
    assert!(dynamic.rounds().max <= 4);
}

/// Inserting `⟨1,1⟩ → ⟨2,0⟩` completes a path from `⟨0,1⟩` to `⟨3,2⟩`, which
/// the incremental update records directly in `A[0][3]`.
pub fn incremental_closure() {
    let mut po: IncrementalPartialOrder = IncrementalPartialOrder::new(ChainGeometry::uniform(4, 3).unwrap());
    for (u, v) in [(n(0, 1), n(1, 0)), (n(1, 2), n(2, 1)), (n(2, 0), n(3, 2))] {
        po.insert_edge(u, v).unwrap();
    }
    assert_eq!(po.array(0, 3).unwrap().get(1), Ok(None));
    assert_eq!(po.reachable(n(0, 1), n(3, 2)), Ok(false));
    po.insert_edge(n(1, 1), n(2, 0)).unwrap();
    assert_eq!(po.array(0, 3).unwrap().get(1), Ok(Some(2)));
    assert_eq!(po.reachable(n(0, 1), n(3, 2)), Ok(true));
    assert!(po.stats().last_ops <= 3 * 4 * 4);
}

/// The three-thread example's ordering: `A[1][0] = [∞, ∞, 1]`.
pub fn write_read_order() {
    let mut po: IncrementalPartialOrder = IncrementalPartialOrder::new(ChainGeometry::new(vec![3, 3, 2]).unwrap());
    for (u, v) in [
        (n(1, 0), n(2, 0)),
        (n(1, 2), n(0, 1)),
        (n(1, 1), n(2, 1)),
        (n(2, 1), n(1, 2)),
    ] {
        po.insert_edge(u, v).unwrap();
    }
    let a = po.array(1, 0).unwrap();
    let row: Vec<_> = (0..3).map(|i| a.get(i).unwrap()).collect();
    assert_eq!(row, [None, None, Some(1)]);
    assert_eq!(po.successor(n(1, 0), 2), Ok(Some(0)));
    assert_eq!(po.predecessor(n(0, 2), 1), Ok(Some(2)));
}

pub const ALL: [(&str, fn()); 7] = [
    ("four-entry table", four_entry_table),
    ("minima indexing", minima_indexing),
    ("sparse evolution", sparse_evolution),
    ("block formation", block_formation),
    ("crossing successor", crossing_successor),
    ("incremental closure", incremental_closure),
    ("write/read order", write_read_order),
];
