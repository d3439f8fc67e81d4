//! Sparse segment trees: dynamic suffix minima over a logical array
//! `A: [n] → ℕ ∪ {∞}`.
//!
//! The tree lays `A` out over the aligned binary ranges of `[0, span)`, where
//! `span` is the smallest power of two covering the capacity. Three ideas keep
//! it small and shallow:
//!
//! * **Minima indexing.** Each node stores one `(min, pos)` pair: the entry
//!   with the smallest value in its range (ties broken towards the larger
//!   index) once every pair stored by an ancestor has been excluded. A suffix
//!   query can stop at the first node whose `pos` falls inside the suffix.
//! * **Sparse layout.** Empty entries are never represented. A node may hang
//!   directly below any ancestor range of the full layout, so a lone entry is
//!   one node no matter how large the array is, and the height never exceeds
//!   the number of stored entries.
//! * **Block nodes.** Ranges of at most `b` slots (default 32) are stored as a
//!   flat array once two entries share one.
//!
//! Nodes and blocks live in arenas addressed by `u32` handles.

use thiserror::Error;

/// Block threshold used unless a constructor overrides it.
pub const DEFAULT_BLOCK_THRESHOLD: u32 = 32;

/// Largest supported capacity (the layout span must fit in a `u32`).
pub const MAX_CAPACITY: u32 = 1 << 31;

pub(crate) const INF: u32 = u32::MAX;
const NIL: u32 = u32::MAX;

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SstError {
    #[error("capacity must be positive")]
    ZeroCapacity,
    #[error("capacity {0} exceeds the supported maximum")]
    CapacityTooLarge(u64),
    #[error("block threshold must be positive")]
    ZeroBlockThreshold,
    #[error("index {index} is out of range for capacity {capacity}")]
    OutOfRange { index: u32, capacity: u32 },
    #[error("value {0} is reserved for the empty entry")]
    ReservedValue(u32),
    #[error("cannot shrink capacity from {current} to {requested}")]
    Shrink { current: u32, requested: u32 },
}

/// Dynamic suffix-minima operations, shared by the sparse tree and the
/// plain segment-tree baseline.
///
/// Indices passed to these methods must be below `capacity()`; implementors
/// may panic otherwise.
pub trait SuffixMinima {
    fn with_capacity(capacity: u32, block_threshold: u32) -> Self
    where
        Self: Sized;
    fn capacity(&self) -> u32;
    /// Minimum of `A[i..]`, `None` standing for ∞.
    fn suffix_min(&self, i: u32) -> Option<u32>;
    /// Largest `i` with `A[i] <= v`.
    fn arg_leq(&self, v: u32) -> Option<u32>;
    /// Sets `A[i]`; `None` clears the entry.
    fn assign(&mut self, i: u32, v: Option<u32>);
    fn grow_to(&mut self, capacity: u32);
    /// Number of non-empty entries.
    fn density(&self) -> usize;
    /// Number of allocated tree nodes (block nodes count once).
    fn node_count(&self) -> usize;
    fn height(&self) -> u32;
    fn check(&self) -> Result<(), String>;
}

#[derive(Clone, Copy, Debug)]
struct Node {
    start: u32,
    end: u32,
    min: u32,
    pos: u32,
    left: u32,
    right: u32,
    /// Offset of the slot array for block nodes, `NIL` otherwise.
    block: u32,
    /// Number of occupied slots (block nodes only).
    fill: u32,
}

impl Node {
    fn pair(start: u32, end: u32, min: u32, pos: u32) -> Self {
        Node {
            start,
            end,
            min,
            pos,
            left: NIL,
            right: NIL,
            block: NIL,
            fill: 0,
        }
    }

    fn is_block(&self) -> bool {
        self.block != NIL
    }

    fn mid(&self) -> u32 {
        self.start + (self.end - self.start) / 2
    }

    fn contains(&self, i: u32) -> bool {
        self.start <= i && i <= self.end
    }
}

/// `(v, p)` precedes `(w, q)` under minima indexing: smaller value first,
/// larger index on ties.
#[inline]
fn better(v: u32, p: u32, w: u32, q: u32) -> bool {
    v < w || (v == w && p > q)
}

#[derive(Clone, Copy, PartialEq, Eq)]
enum Link {
    Root,
    Left(u32),
    Right(u32),
}

/// Node statistics gathered while answering a query.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct QueryTrace {
    /// Nodes whose contents were inspected.
    pub visited: usize,
    /// Deepest inspected node (the root is depth 0).
    pub max_depth: u32,
}

trait Probe {
    fn visit(&mut self, depth: u32);
}

struct NoProbe;

impl Probe for NoProbe {
    #[inline(always)]
    fn visit(&mut self, _depth: u32) {}
}

impl Probe for QueryTrace {
    fn visit(&mut self, depth: u32) {
        self.visited += 1;
        self.max_depth = self.max_depth.max(depth);
    }
}

/// Read-only copy of one tree node, for inspection and tests.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct NodeView {
    pub start: u32,
    pub end: u32,
    pub min: u32,
    pub pos: u32,
    /// Slot contents of a block node; empty for ordinary nodes.
    pub block: Vec<Option<u32>>,
    pub left: Option<Box<NodeView>>,
    pub right: Option<Box<NodeView>>,
}

impl NodeView {
    pub fn is_block(&self) -> bool {
        !self.block.is_empty()
    }
}

/// A sparse segment tree holding a suffix-minima array.
#[derive(Clone, Debug)]
pub struct SuffixMinArray {
    capacity: u32,
    span: u32,
    block_threshold: u32,
    block_len: u32,
    root: u32,
    nodes: Vec<Node>,
    free_nodes: Vec<u32>,
    slots: Vec<u32>,
    free_blocks: Vec<u32>,
    live: usize,
    density: usize,
}

impl SuffixMinArray {
    /// An all-∞ array of `capacity` slots. No memory proportional to the
    /// capacity is allocated.
    pub fn new(capacity: u32, block_threshold: u32) -> Result<Self, SstError> {
        if capacity == 0 {
            return Err(SstError::ZeroCapacity);
        }
        if capacity > MAX_CAPACITY {
            return Err(SstError::CapacityTooLarge(capacity as u64));
        }
        if block_threshold == 0 {
            return Err(SstError::ZeroBlockThreshold);
        }
        // Layout ranges are powers of two, so a range fits in a block iff its
        // length is at most the largest power of two not above the threshold.
        let block_len = 1u32 << (31 - block_threshold.leading_zeros());
        Ok(SuffixMinArray {
            capacity,
            span: capacity.next_power_of_two(),
            block_threshold,
            block_len,
            root: NIL,
            nodes: Vec::new(),
            free_nodes: Vec::new(),
            slots: Vec::new(),
            free_blocks: Vec::new(),
            live: 0,
            density: 0,
        })
    }

    pub fn with_default_blocks(capacity: u32) -> Result<Self, SstError> {
        Self::new(capacity, DEFAULT_BLOCK_THRESHOLD)
    }

    pub fn capacity(&self) -> u32 {
        self.capacity
    }

    pub fn block_threshold(&self) -> u32 {
        self.block_threshold
    }

    pub fn density(&self) -> usize {
        self.density
    }

    pub fn node_count(&self) -> usize {
        self.live
    }

    pub fn is_empty(&self) -> bool {
        self.root == NIL
    }

    /// Approximate heap footprint in bytes.
    pub fn heap_bytes(&self) -> usize {
        self.nodes.capacity() * std::mem::size_of::<Node>()
            + self.slots.capacity() * 4
            + (self.free_nodes.capacity() + self.free_blocks.capacity()) * 4
    }

    /// Number of edges on the longest root-to-leaf path; 0 for an empty tree
    /// or a lone root.
    pub fn height(&self) -> u32 {
        if self.root == NIL {
            0
        } else {
            self.height_of(self.root)
        }
    }

    fn height_of(&self, id: u32) -> u32 {
        let n = &self.nodes[id as usize];
        let mut h = 0;
        for c in [n.left, n.right] {
            if c != NIL {
                h = h.max(1 + self.height_of(c));
            }
        }
        h
    }

    /// Height bound `min(⌈log₂ capacity⌉, density)` that every reachable
    /// state satisfies.
    pub fn height_bound(&self) -> u32 {
        let log = 31 - self.span.leading_zeros();
        log.min(self.density.min(u32::MAX as usize) as u32)
    }

    fn check_index(&self, i: u32) -> Result<(), SstError> {
        if i < self.capacity {
            Ok(())
        } else {
            Err(SstError::OutOfRange {
                index: i,
                capacity: self.capacity,
            })
        }
    }

    /// Sets `A[i] = value`, `None` meaning ∞ (a pure deletion).
    pub fn update(&mut self, i: u32, value: Option<u32>) -> Result<(), SstError> {
        self.check_index(i)?;
        if value == Some(INF) {
            return Err(SstError::ReservedValue(INF));
        }
        self.assign_unchecked(i, value);
        Ok(())
    }

    fn assign_unchecked(&mut self, i: u32, value: Option<u32>) {
        if self.remove(i).is_some() {
            self.density -= 1;
        }
        if let Some(v) = value {
            self.insert(i, v);
            self.density += 1;
        }
    }

    /// Current logical value `A[i]`.
    pub fn get(&self, i: u32) -> Result<Option<u32>, SstError> {
        self.check_index(i)?;
        let mut id = self.root;
        while id != NIL {
            let n = &self.nodes[id as usize];
            if !n.contains(i) {
                return Ok(None);
            }
            if n.is_block() {
                let s = self.slots[(n.block + i - n.start) as usize];
                return Ok((s != INF).then_some(s));
            }
            if n.pos == i {
                return Ok(Some(n.min));
            }
            id = if i <= n.mid() { n.left } else { n.right };
        }
        Ok(None)
    }

    /// Minimum over `A[i..]`, `None` standing for ∞.
    pub fn min_suffix(&self, i: u32) -> Result<Option<u32>, SstError> {
        self.check_index(i)?;
        let m = self.min_rec(self.root, i, 0, &mut NoProbe);
        Ok((m != INF).then_some(m))
    }

    /// Like [`SuffixMinArray::min_suffix`], also reporting which nodes the
    /// traversal touched.
    pub fn min_suffix_traced(&self, i: u32) -> Result<(Option<u32>, QueryTrace), SstError> {
        self.check_index(i)?;
        let mut trace = QueryTrace::default();
        let m = self.min_rec(self.root, i, 0, &mut trace);
        Ok(((m != INF).then_some(m), trace))
    }

    /// Largest index `i` with `A[i] <= v`.
    pub fn argleq(&self, v: u32) -> Option<u32> {
        self.argleq_rec(self.root, v, 0, &mut NoProbe)
    }

    pub fn argleq_traced(&self, v: u32) -> (Option<u32>, QueryTrace) {
        let mut trace = QueryTrace::default();
        let r = self.argleq_rec(self.root, v, 0, &mut trace);
        (r, trace)
    }

    /// Raises the capacity. Stored entries are kept.
    pub fn grow(&mut self, capacity: u32) -> Result<(), SstError> {
        if capacity < self.capacity {
            return Err(SstError::Shrink {
                current: self.capacity,
                requested: capacity,
            });
        }
        if capacity > MAX_CAPACITY {
            return Err(SstError::CapacityTooLarge(capacity as u64));
        }
        self.capacity = capacity;
        // The old root range stays an aligned sub-range of the wider layout,
        // so no node has to move.
        self.span = self.span.max(capacity.next_power_of_two());
        Ok(())
    }

    /// All non-empty entries as `(index, value)`, by index.
    pub fn entries(&self) -> Vec<(u32, u32)> {
        let mut out = Vec::with_capacity(self.density);
        if self.root != NIL {
            self.collect(self.root, &mut out);
        }
        out.sort_unstable();
        out
    }

    /// Copy of the tree structure.
    pub fn snapshot(&self) -> Option<NodeView> {
        (self.root != NIL).then(|| self.view(self.root))
    }

    fn view(&self, id: u32) -> NodeView {
        let n = &self.nodes[id as usize];
        let block = if n.is_block() {
            let len = n.end - n.start + 1;
            self.slots[n.block as usize..(n.block + len) as usize]
                .iter()
                .map(|&s| (s != INF).then_some(s))
                .collect()
        } else {
            Vec::new()
        };
        let child = |c: u32| (c != NIL).then(|| Box::new(self.view(c)));
        NodeView {
            start: n.start,
            end: n.end,
            min: n.min,
            pos: n.pos,
            block,
            left: child(n.left),
            right: child(n.right),
        }
    }

    // ---- arena -----------------------------------------------------------

    fn alloc(&mut self, node: Node) -> u32 {
        self.live += 1;
        match self.free_nodes.pop() {
            Some(id) => {
                self.nodes[id as usize] = node;
                id
            }
            None => {
                self.nodes.push(node);
                (self.nodes.len() - 1) as u32
            }
        }
    }

    fn release(&mut self, id: u32) {
        let n = self.nodes[id as usize];
        if n.is_block() {
            let len = self.block_len as usize;
            self.slots[n.block as usize..n.block as usize + len].fill(INF);
            self.free_blocks.push(n.block);
        }
        self.live -= 1;
        self.free_nodes.push(id);
    }

    fn new_block(&mut self, start: u32, len: u32) -> u32 {
        let offset = match self.free_blocks.pop() {
            Some(o) => o,
            None => {
                let o = self.slots.len() as u32;
                self.slots
                    .resize(self.slots.len() + self.block_len as usize, INF);
                o
            }
        };
        let mut node = Node::pair(start, start + len - 1, INF, NIL);
        node.block = offset;
        self.alloc(node)
    }

    fn link_get(&self, link: Link) -> u32 {
        match link {
            Link::Root => self.root,
            Link::Left(p) => self.nodes[p as usize].left,
            Link::Right(p) => self.nodes[p as usize].right,
        }
    }

    fn link_set(&mut self, link: Link, id: u32) {
        match link {
            Link::Root => self.root = id,
            Link::Left(p) => self.nodes[p as usize].left = id,
            Link::Right(p) => self.nodes[p as usize].right = id,
        }
    }

    // ---- blocks ----------------------------------------------------------

    fn block_put(&mut self, id: u32, pos: u32, val: u32) {
        let n = &mut self.nodes[id as usize];
        let slot = &mut self.slots[(n.block + pos - n.start) as usize];
        debug_assert_eq!(*slot, INF);
        *slot = val;
        n.fill += 1;
        if better(val, pos, n.min, n.pos) || n.fill == 1 {
            n.min = val;
            n.pos = pos;
        }
    }

    /// Clears a block slot; returns `false` once the block is empty.
    fn block_clear(&mut self, id: u32, pos: u32) -> bool {
        let n = self.nodes[id as usize];
        self.slots[(n.block + pos - n.start) as usize] = INF;
        let fill = n.fill - 1;
        self.nodes[id as usize].fill = fill;
        if fill == 0 {
            return false;
        }
        if n.pos == pos {
            let (min, at) = self.block_best(&n);
            let node = &mut self.nodes[id as usize];
            node.min = min;
            node.pos = at;
        }
        true
    }

    fn block_best(&self, n: &Node) -> (u32, u32) {
        let len = n.end - n.start + 1;
        let slice = &self.slots[n.block as usize..(n.block + len) as usize];
        let mut best = (INF, NIL);
        for (k, &s) in slice.iter().enumerate() {
            // `<=` over ascending indices keeps the largest index on ties.
            if s != INF && s <= best.0 {
                best = (s, n.start + k as u32);
            }
        }
        best
    }

    // ---- update ----------------------------------------------------------

    fn insert(&mut self, pos: u32, val: u32) {
        let (mut pos, mut val) = (pos, val);
        let mut link = Link::Root;
        loop {
            let id = self.link_get(link);
            if id == NIL {
                let fresh = if link == Link::Root {
                    self.new_root(pos, val)
                } else {
                    self.alloc(Node::pair(pos, pos, val, pos))
                };
                self.link_set(link, fresh);
                return;
            }
            let n = self.nodes[id as usize];
            if !n.contains(pos) {
                let fresh = self.split_above(id, pos, val);
                self.link_set(link, fresh);
                return;
            }
            if n.is_block() {
                self.block_put(id, pos, val);
                return;
            }
            debug_assert_ne!(n.pos, pos, "entry must be removed before reinsertion");
            if better(val, pos, n.min, n.pos) {
                let node = &mut self.nodes[id as usize];
                node.min = val;
                node.pos = pos;
                val = n.min;
                pos = n.pos;
            }
            link = if pos <= n.mid() {
                Link::Left(id)
            } else {
                Link::Right(id)
            };
        }
    }

    fn new_root(&mut self, pos: u32, val: u32) -> u32 {
        if self.span <= self.block_len {
            let id = self.new_block(0, self.span);
            self.block_put(id, pos, val);
            id
        } else {
            self.alloc(Node::pair(0, self.span - 1, val, pos))
        }
    }

    /// Places `(val, pos)` next to the subtree `child`, whose range does not
    /// contain `pos`, under a node covering the lowest common layout range of
    /// both. Returns the handle that replaces `child` in its parent.
    fn split_above(&mut self, child: u32, pos: u32, val: u32) -> u32 {
        let c = self.nodes[child as usize];
        let high = 31 - (pos ^ c.start).leading_zeros();
        let size = 2u32 << high;
        if size <= self.block_len {
            let len = self.block_len.min(self.span);
            let id = self.new_block(pos & !(len - 1), len);
            let mut moved = Vec::new();
            self.drain(child, &mut moved);
            for (p, v) in moved {
                self.block_put(id, p, v);
            }
            self.block_put(id, pos, val);
            return id;
        }
        let start = pos & !(size - 1);
        let id = self.alloc(Node::pair(start, start + size - 1, val, pos));
        let child_left = c.start < start + size / 2;
        if better(c.min, c.pos, val, pos) {
            // The child's top pair dominates: it moves up, the new entry
            // becomes a leaf on the other side.
            let rest = self.pop_top(child);
            let leaf = self.alloc(Node::pair(pos, pos, val, pos));
            let node = &mut self.nodes[id as usize];
            node.min = c.min;
            node.pos = c.pos;
            if child_left {
                node.left = rest;
                node.right = leaf;
            } else {
                node.left = leaf;
                node.right = rest;
            }
        } else {
            let node = &mut self.nodes[id as usize];
            if child_left {
                node.left = child;
            } else {
                node.right = child;
            }
        }
        id
    }

    /// Removes the pair stored at `id` itself. Returns the handle replacing
    /// `id` (`NIL` once the subtree is empty).
    fn pop_top(&mut self, id: u32) -> u32 {
        let n = self.nodes[id as usize];
        if n.is_block() {
            if self.block_clear(id, n.pos) {
                id
            } else {
                self.release(id);
                NIL
            }
        } else {
            self.refill(id)
        }
    }

    /// Refills a node whose pair was removed by promoting the best pair of
    /// its children.
    fn refill(&mut self, id: u32) -> u32 {
        let n = self.nodes[id as usize];
        let pick_left = match (n.left, n.right) {
            (NIL, NIL) => {
                self.release(id);
                return NIL;
            }
            (_, NIL) => true,
            (NIL, _) => false,
            (l, r) => {
                let (a, b) = (&self.nodes[l as usize], &self.nodes[r as usize]);
                better(a.min, a.pos, b.min, b.pos)
            }
        };
        let child = if pick_left { n.left } else { n.right };
        let c = self.nodes[child as usize];
        let rest = self.pop_top(child);
        let node = &mut self.nodes[id as usize];
        node.min = c.min;
        node.pos = c.pos;
        if pick_left {
            node.left = rest;
        } else {
            node.right = rest;
        }
        id
    }

    /// Removes the entry at `pos`, returning its value.
    fn remove(&mut self, pos: u32) -> Option<u32> {
        let mut link = Link::Root;
        loop {
            let id = self.link_get(link);
            if id == NIL {
                return None;
            }
            let n = self.nodes[id as usize];
            if !n.contains(pos) {
                return None;
            }
            if n.is_block() {
                let s = self.slots[(n.block + pos - n.start) as usize];
                if s == INF {
                    return None;
                }
                if !self.block_clear(id, pos) {
                    self.release(id);
                    self.link_set(link, NIL);
                }
                return Some(s);
            }
            if n.pos == pos {
                let rest = self.refill(id);
                self.link_set(link, rest);
                return Some(n.min);
            }
            link = if pos <= n.mid() {
                Link::Left(id)
            } else {
                Link::Right(id)
            };
        }
    }

    /// Moves every entry of a subtree into `out` and frees its nodes.
    fn drain(&mut self, id: u32, out: &mut Vec<(u32, u32)>) {
        let n = self.nodes[id as usize];
        if n.is_block() {
            let len = n.end - n.start + 1;
            for k in 0..len {
                let s = self.slots[(n.block + k) as usize];
                if s != INF {
                    out.push((n.start + k, s));
                }
            }
        } else {
            out.push((n.pos, n.min));
            for c in [n.left, n.right] {
                if c != NIL {
                    self.drain(c, out);
                }
            }
        }
        self.release(id);
    }

    fn collect(&self, id: u32, out: &mut Vec<(u32, u32)>) {
        let n = &self.nodes[id as usize];
        if n.is_block() {
            let len = n.end - n.start + 1;
            for k in 0..len {
                let s = self.slots[(n.block + k) as usize];
                if s != INF {
                    out.push((n.start + k, s));
                }
            }
        } else {
            out.push((n.pos, n.min));
            for c in [n.left, n.right] {
                if c != NIL {
                    self.collect(c, out);
                }
            }
        }
    }

    // ---- queries ---------------------------------------------------------

    fn min_rec<P: Probe>(&self, id: u32, i: u32, depth: u32, probe: &mut P) -> u32 {
        if id == NIL {
            return INF;
        }
        let n = &self.nodes[id as usize];
        if i > n.end {
            return INF;
        }
        probe.visit(depth);
        if n.pos >= i {
            // For blocks the cached pair is the best slot of the whole block.
            return n.min;
        }
        if n.is_block() {
            let from = (n.block + i - n.start) as usize;
            let to = (n.block + n.end - n.start) as usize;
            return self.slots[from..=to].iter().copied().min().unwrap_or(INF);
        }
        let l = self.min_rec(n.left, i, depth + 1, probe);
        let r = self.min_rec(n.right, i, depth + 1, probe);
        l.min(r)
    }

    fn argleq_rec<P: Probe>(&self, id: u32, v: u32, depth: u32, probe: &mut P) -> Option<u32> {
        if id == NIL {
            return None;
        }
        let n = &self.nodes[id as usize];
        if n.min > v {
            return None;
        }
        probe.visit(depth);
        if n.is_block() {
            let len = n.end - n.start + 1;
            let slice = &self.slots[n.block as usize..(n.block + len) as usize];
            return slice.iter().rposition(|&s| s <= v).map(|k| n.start + k as u32);
        }
        // An absent child cannot hold a larger index.
        let end_of = |c: u32| (c != NIL).then(|| self.nodes[c as usize].end);
        let dominated = |e: Option<u32>| e.is_none_or(|e| n.pos >= e);
        if dominated(end_of(n.left)) && dominated(end_of(n.right)) {
            return Some(n.pos);
        }
        let below = if n.right != NIL && self.nodes[n.right as usize].min <= v {
            self.argleq_rec(n.right, v, depth + 1, probe)
        } else {
            self.argleq_rec(n.left, v, depth + 1, probe)
        };
        Some(below.map_or(n.pos, |b| b.max(n.pos)))
    }

    // ---- invariants ------------------------------------------------------

    /// Verifies the structural invariants: aligned nested ranges, the
    /// minima-indexing order between every node and its children, block
    /// bookkeeping, one stored pair per entry, and the density and node
    /// counters.
    pub fn check_invariants(&self) -> Result<(), String> {
        let mut seen = Vec::new();
        let mut count = 0usize;
        if self.root != NIL {
            self.check_node(self.root, 0, self.span - 1, &mut seen, &mut count)?;
        }
        if count != self.live {
            return Err(format!("{count} reachable nodes, {} live", self.live));
        }
        if seen.len() != self.density {
            return Err(format!(
                "{} stored entries but density {}",
                seen.len(),
                self.density
            ));
        }
        seen.sort_unstable();
        if seen.windows(2).any(|w| w[0] == w[1]) {
            return Err("an index is stored twice".into());
        }
        if seen.last().is_some_and(|&p| p >= self.capacity) {
            return Err("entry beyond capacity".into());
        }
        Ok(())
    }

    fn check_node(
        &self,
        id: u32,
        lo: u32,
        hi: u32,
        seen: &mut Vec<u32>,
        count: &mut usize,
    ) -> Result<(), String> {
        *count += 1;
        let n = &self.nodes[id as usize];
        let len = n.end.wrapping_sub(n.start).wrapping_add(1);
        if n.start < lo || n.end > hi || n.end < n.start {
            return Err(format!("node [{}, {}] escapes [{lo}, {hi}]", n.start, n.end));
        }
        if !len.is_power_of_two() || !n.start.is_multiple_of(len) {
            return Err(format!("node [{}, {}] is not a layout range", n.start, n.end));
        }
        if n.is_block() {
            if len > self.block_len {
                return Err(format!("block [{}, {}] too large", n.start, n.end));
            }
            if n.left != NIL || n.right != NIL {
                return Err("block node with children".into());
            }
            let slice = &self.slots[n.block as usize..(n.block + len) as usize];
            let fill = slice.iter().filter(|&&s| s != INF).count() as u32;
            if fill != n.fill || fill == 0 {
                return Err(format!("block fill {} but {} occupied", n.fill, fill));
            }
            if self.block_best(n) != (n.min, n.pos) {
                return Err("stale block minimum".into());
            }
            seen.extend(
                slice
                    .iter()
                    .enumerate()
                    .filter(|(_, &s)| s != INF)
                    .map(|(k, _)| n.start + k as u32),
            );
            return Ok(());
        }
        if len != 1 && len <= self.block_len {
            return Err(format!("range [{}, {}] should be a block", n.start, n.end));
        }
        if !n.contains(n.pos) || n.min == INF {
            return Err(format!("node [{}, {}] holds no valid pair", n.start, n.end));
        }
        seen.push(n.pos);
        let mid = n.mid();
        for (c, clo, chi) in [(n.left, n.start, mid), (n.right, mid + 1, n.end)] {
            if c == NIL {
                continue;
            }
            let ch = &self.nodes[c as usize];
            if !better(n.min, n.pos, ch.min, ch.pos) {
                return Err(format!(
                    "child ({}, {}) outranks parent ({}, {})",
                    ch.min, ch.pos, n.min, n.pos
                ));
            }
            self.check_node(c, clo, chi, seen, count)?;
        }
        Ok(())
    }
}

impl SuffixMinima for SuffixMinArray {
    fn with_capacity(capacity: u32, block_threshold: u32) -> Self {
        SuffixMinArray::new(capacity.max(1), block_threshold).expect("valid capacity")
    }

    fn capacity(&self) -> u32 {
        self.capacity
    }

    #[inline]
    fn suffix_min(&self, i: u32) -> Option<u32> {
        debug_assert!(i < self.capacity);
        let m = self.min_rec(self.root, i, 0, &mut NoProbe);
        (m != INF).then_some(m)
    }

    #[inline]
    fn arg_leq(&self, v: u32) -> Option<u32> {
        self.argleq(v)
    }

    fn assign(&mut self, i: u32, v: Option<u32>) {
        debug_assert!(i < self.capacity && v != Some(INF));
        self.assign_unchecked(i, v);
    }

    fn grow_to(&mut self, capacity: u32) {
        self.grow(capacity.max(1)).expect("capacity only grows");
    }

    fn density(&self) -> usize {
        self.density
    }

    fn node_count(&self) -> usize {
        self.live
    }

    fn height(&self) -> u32 {
        SuffixMinArray::height(self)
    }

    fn check(&self) -> Result<(), String> {
        self.check_invariants()?;
        if self.height() > self.height_bound() {
            return Err(format!(
                "height {} above bound {} (density {})",
                self.height(),
                self.height_bound(),
                self.density
            ));
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn filled(capacity: u32, b: u32, entries: &[(u32, u32)]) -> SuffixMinArray {
        let mut a = SuffixMinArray::new(capacity, b).unwrap();
        for &(i, v) in entries {
            a.update(i, Some(v)).unwrap();
        }
        a
    }

    #[test]
    fn empty_array() {
        let a = SuffixMinArray::new(8, 32).unwrap();
        assert_eq!(a.min_suffix(0), Ok(None));
        assert_eq!(a.argleq(5), None);
        assert_eq!((a.density(), a.height(), a.node_count()), (0, 0, 0));
        let one = SuffixMinArray::new(1, 32).unwrap();
        assert_eq!(one.capacity(), 1);
        assert_eq!(one.min_suffix(0), Ok(None));
    }

    #[test]
    fn constructor_errors() {
        assert_eq!(SuffixMinArray::new(0, 32).unwrap_err(), SstError::ZeroCapacity);
        assert_eq!(
            SuffixMinArray::new(4, 0).unwrap_err(),
            SstError::ZeroBlockThreshold
        );
        assert!(SuffixMinArray::new(MAX_CAPACITY + 1, 1).is_err());
    }

    #[test]
    fn large_capacity_allocates_nothing() {
        let a = SuffixMinArray::new(1_000_000, 32).unwrap();
        assert_eq!(a.node_count(), 0);
        assert_eq!(a.heap_bytes(), 0);
    }

    #[test]
    fn out_of_range_is_reported() {
        let mut a = SuffixMinArray::new(4, 32).unwrap();
        assert_eq!(
            a.update(4, Some(1)),
            Err(SstError::OutOfRange {
                index: 4,
                capacity: 4
            })
        );
        assert!(a.min_suffix(9).is_err());
        assert!(a.get(4).is_err());
        assert_eq!(a.update(0, Some(INF)), Err(SstError::ReservedValue(INF)));
    }

    #[test]
    fn four_entry_example() {
        // A = [6, 9, 8, 10]
        for b in [1, 2, 32] {
            let a = filled(4, b, &[(0, 6), (1, 9), (2, 8), (3, 10)]);
            let mins: Vec<_> = (0..4).map(|i| a.min_suffix(i).unwrap()).collect();
            assert_eq!(mins, [Some(6), Some(8), Some(8), Some(10)]);
            assert_eq!(a.argleq(7), Some(0));
            assert_eq!(a.argleq(9), Some(2));
            assert_eq!(a.argleq(11), Some(3));
            assert_eq!(a.argleq(5), None);
        }
    }

    #[test]
    fn delete_to_empty() {
        let mut a = filled(16, 1, &[(5, 3)]);
        a.update(5, None).unwrap();
        assert_eq!(a.min_suffix(0), Ok(None));
        assert_eq!(a.node_count(), 0);
        assert!(a.is_empty());
        // Deleting an absent entry is a no-op.
        a.update(7, None).unwrap();
        assert_eq!(a.density(), 0);
    }

    #[test]
    fn overwrite_replaces_entry() {
        let mut a = filled(8, 1, &[(2, 5), (6, 1)]);
        a.update(2, Some(0)).unwrap();
        assert_eq!(a.density(), 2);
        assert_eq!(a.get(2), Ok(Some(0)));
        assert_eq!(a.min_suffix(0), Ok(Some(0)));
        a.update(2, Some(9)).unwrap();
        assert_eq!(a.min_suffix(0), Ok(Some(1)));
        assert_eq!(a.min_suffix(3), Ok(Some(1)));
        a.check_invariants().unwrap();
    }

    #[test]
    fn lone_entry_is_one_node() {
        let a = filled(1 << 20, 32, &[(777_777, 4)]);
        assert_eq!(a.node_count(), 1);
        assert_eq!(a.height(), 0);
        assert_eq!(a.min_suffix(777_777), Ok(Some(4)));
        assert_eq!(a.min_suffix(777_778), Ok(None));
    }

    #[test]
    fn dense_neighbours_share_a_block() {
        let entries: Vec<_> = (64..96).map(|i| (i, 1000 - i)).collect();
        let a = filled(1024, 32, &entries);
        a.check_invariants().unwrap();
        // The root keeps the minimum; the other 31 live in one block.
        let root = a.snapshot().unwrap();
        assert_eq!((root.min, root.pos), (1000 - 95, 95));
        assert_eq!(a.node_count(), 2);
        let block = root.left.or(root.right).unwrap();
        assert!(block.is_block());
        assert_eq!((block.start, block.end), (64, 95));
    }

    #[test]
    fn grow_keeps_entries() {
        let mut a = filled(6, 2, &[(0, 4), (5, 2), (3, 3)]);
        a.grow(100).unwrap();
        a.update(99, Some(1)).unwrap();
        a.update(40, Some(0)).unwrap();
        a.check_invariants().unwrap();
        assert_eq!(a.min_suffix(1), Ok(Some(0)));
        assert_eq!(a.min_suffix(41), Ok(Some(1)));
        assert_eq!(a.argleq(3), Some(99));
        assert_eq!(a.argleq(0), Some(40));
        assert!(a.grow(50).is_err());
    }

    #[test]
    fn grow_from_a_root_block() {
        let mut a = filled(4, 32, &[(1, 7), (2, 3)]);
        a.grow(200).unwrap();
        a.update(150, Some(5)).unwrap();
        a.update(3, Some(9)).unwrap();
        a.check_invariants().unwrap();
        assert_eq!(a.entries(), vec![(1, 7), (2, 3), (3, 9), (150, 5)]);
        assert_eq!(a.min_suffix(3), Ok(Some(5)));
    }

    fn scan_min(mirror: &[Option<u32>], i: usize) -> Option<u32> {
        mirror[i..].iter().flatten().copied().min()
    }

    fn scan_argleq(mirror: &[Option<u32>], v: u32) -> Option<u32> {
        mirror
            .iter()
            .rposition(|e| e.is_some_and(|x| x <= v))
            .map(|p| p as u32)
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(200))]

        #[test]
        fn mirror_equivalence(
            capacity in 1u32..300,
            b in prop_oneof![Just(1u32), Just(4), Just(32)],
            ops in prop::collection::vec((0u32..300, prop::option::weighted(0.7, 0u32..40)), 0..150),
        ) {
            let mut a = SuffixMinArray::new(capacity, b).unwrap();
            let mut mirror = vec![None; capacity as usize];
            for (i, v) in ops {
                let i = i % capacity;
                a.update(i, v).unwrap();
                mirror[i as usize] = v;
                prop_assert!(a.height() <= a.height_bound());
                prop_assert_eq!(a.density(), mirror.iter().flatten().count());
            }
            a.check_invariants().map_err(TestCaseError::fail)?;
            for i in 0..capacity {
                prop_assert_eq!(a.min_suffix(i).unwrap(), scan_min(&mirror, i as usize));
                prop_assert_eq!(a.get(i).unwrap(), mirror[i as usize]);
            }
            for v in 0..42 {
                prop_assert_eq!(a.argleq(v), scan_argleq(&mirror, v));
            }
        }

        #[test]
        fn set_then_clear_restores_answers(
            base in prop::collection::vec((0u32..64, 0u32..20), 0..40),
            i in 0u32..64,
            v in 0u32..20,
        ) {
            let mut a = SuffixMinArray::new(64, 4).unwrap();
            for (p, x) in base {
                if p != i {
                    a.update(p, Some(x)).unwrap();
                }
            }
            let before: Vec<_> = (0..64).map(|q| a.min_suffix(q).unwrap()).collect();
            let before_arg: Vec<_> = (0..21).map(|x| a.argleq(x)).collect();
            a.update(i, Some(v)).unwrap();
            a.update(i, None).unwrap();
            let after: Vec<_> = (0..64).map(|q| a.min_suffix(q).unwrap()).collect();
            let after_arg: Vec<_> = (0..21).map(|x| a.argleq(x)).collect();
            prop_assert_eq!(before, after);
            prop_assert_eq!(before_arg, after_arg);
            a.check_invariants().map_err(TestCaseError::fail)?;
        }
    }
}
