//! Consistency checking of read/write traces by reads-from search with
//! saturation.
//!
//! Trace format, one record per line (`#` starts a comment):
//!
//! ```text
//! e <thread> <index> <w|r> <var> <value>
//! o <t1> <j1> <t2> <j2>
//! ```
//!
//! `e` declares an event; indices of a thread must be dense from 0. `o`
//! fixes an ordering between two events that every interleaving must respect.
//! Reads are resolved in the order they appear in the file, and candidate
//! writes are tried in file order as well.

use std::collections::HashMap;
use std::fmt;

use thiserror::Error;

use crate::dynamic::DynamicPartialOrder;
use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Access {
    Write,
    Read,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct TraceEvent {
    pub thread: u32,
    pub index: u32,
    pub op: Access,
    pub var: String,
    pub value: i64,
}

impl TraceEvent {
    pub fn id(&self) -> NodeId {
        NodeId::new(self.thread, self.index)
    }
}

impl fmt::Display for TraceEvent {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let op = match self.op {
            Access::Write => 'w',
            Access::Read => 'r',
        };
        write!(f, "e {} {} {op} {} {}", self.thread, self.index, self.var, self.value)
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Trace {
    /// Events in file order.
    pub events: Vec<TraceEvent>,
    /// Fixed orderings `from -> to`.
    pub orderings: Vec<(NodeId, NodeId)>,
}

#[derive(Clone, Debug, PartialEq, Eq, Error)]
pub enum SatError {
    #[error("line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("read {0} has no write of the same value to its variable")]
    NoMatchingWrite(NodeId),
}

impl Trace {
    pub fn parse(text: &str) -> Result<Trace, SatError> {
        let mut trace = Trace::default();
        let mut lines = Vec::new();
        for (n, raw) in text.lines().enumerate() {
            let line = n + 1;
            let body = raw.split('#').next().unwrap_or("").trim();
            if body.is_empty() {
                continue;
            }
            let err = |message: String| SatError::Parse { line, message };
            let f: Vec<&str> = body.split_whitespace().collect();
            let num = |s: &str| s.parse::<u32>().map_err(|_| err(format!("expected an index, got {s:?}")));
            match f[0] {
                "e" if f.len() == 6 => {
                    let op = match f[3] {
                        "w" => Access::Write,
                        "r" => Access::Read,
                        other => return Err(err(format!("expected w or r, got {other:?}"))),
                    };
                    let value = f[5]
                        .parse()
                        .map_err(|_| err(format!("expected an integer value, got {:?}", f[5])))?;
                    trace.events.push(TraceEvent {
                        thread: num(f[1])?,
                        index: num(f[2])?,
                        op,
                        var: f[4].to_string(),
                        value,
                    });
                    lines.push(line);
                }
                "o" if f.len() == 5 => {
                    let u = NodeId::new(num(f[1])?, num(f[2])?);
                    let v = NodeId::new(num(f[3])?, num(f[4])?);
                    trace.orderings.push((u, v));
                }
                "e" | "o" => return Err(err(format!("wrong number of fields for {:?}", f[0]))),
                other => return Err(err(format!("unknown record {other:?}"))),
            }
        }
        // Per-thread indices must be dense from 0.
        let mut seen: HashMap<u32, Vec<(u32, usize)>> = HashMap::new();
        for (e, &line) in trace.events.iter().zip(&lines) {
            seen.entry(e.thread).or_default().push((e.index, line));
        }
        for (t, mut idx) in seen {
            idx.sort();
            for (want, &(got, line)) in idx.iter().enumerate() {
                if got != want as u32 {
                    return Err(SatError::Parse {
                        line,
                        message: format!("thread {t}: index {got} breaks the dense numbering"),
                    });
                }
            }
        }
        let geom = trace.geometry();
        for &(u, v) in &trace.orderings {
            if geom.as_ref().is_none_or(|g| g.validate(u).is_err() || g.validate(v).is_err()) {
                return Err(SatError::Parse {
                    line: 0,
                    message: format!("ordering {u} -> {v} names an undeclared event"),
                });
            }
        }
        Ok(trace)
    }

    /// One chain per thread, sized to its events.
    pub fn geometry(&self) -> Option<ChainGeometry> {
        let k = self.events.iter().map(|e| e.thread + 1).max()?;
        let mut lens = vec![0; k as usize];
        for e in &self.events {
            let l = &mut lens[e.thread as usize];
            *l = (*l).max(e.index + 1);
        }
        ChainGeometry::new(lens)
    }
}

impl fmt::Display for Trace {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for e in &self.events {
            writeln!(f, "{e}")?;
        }
        for (u, v) in &self.orderings {
            writeln!(f, "o {} {} {} {}", u.chain, u.index, v.chain, v.index)?;
        }
        Ok(())
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    /// `(read, write)` pairs in read order.
    Consistent(Vec<(NodeId, NodeId)>),
    Inconsistent,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SatReport {
    pub verdict: Verdict,
    /// `(read, write)` candidates rejected because saturation closed a cycle.
    pub rejected: Vec<(NodeId, NodeId)>,
    /// Edges removed again while backtracking.
    pub deleted_edges: usize,
}

impl SatReport {
    pub fn is_consistent(&self) -> bool {
        matches!(self.verdict, Verdict::Consistent(_))
    }

    pub fn render(&self) -> String {
        let mut s = String::new();
        for (r, w) in &self.rejected {
            s.push_str(&format!("# rejected {r} <- {w}\n"));
        }
        match &self.verdict {
            Verdict::Consistent(rf) => {
                s.push_str("CONSISTENT\n");
                for (r, w) in rf {
                    s.push_str(&format!("rf {} {} <- {} {}\n", r.chain, r.index, w.chain, w.index));
                }
            }
            Verdict::Inconsistent => s.push_str("INCONSISTENT\n"),
        }
        s
    }
}

struct Search<'a> {
    po: DynamicPartialOrder,
    /// Every edge inserted so far, for rollback.
    log: Vec<(NodeId, NodeId)>,
    /// Writes per variable, in file order.
    writes: HashMap<&'a str, Vec<NodeId>>,
    reads: Vec<(NodeId, &'a str, Vec<NodeId>)>,
    rf: Vec<(NodeId, NodeId)>,
    rejected: Vec<(NodeId, NodeId)>,
    deleted: usize,
}

impl Search<'_> {
    /// Orders `u` before `v`; false if that would close a cycle.
    fn order(&mut self, u: NodeId, v: NodeId) -> bool {
        if self.po.reachable(u, v).expect("declared events") {
            return true;
        }
        if u.chain == v.chain {
            return false;
        }
        match self.po.insert_edge(u, v) {
            Ok(()) => {
                self.log.push((u, v));
                true
            }
            Err(PoError::CycleDetected { .. }) => false,
            Err(e) => panic!("unexpected backend error: {e}"),
        }
    }

    fn rollback(&mut self, mark: usize) {
        while self.log.len() > mark {
            let (u, v) = self.log.pop().expect("non-empty log");
            self.po.delete_edge(u, v).expect("logged edge");
            self.deleted += 1;
        }
    }

    /// Applies the saturation rules to every resolved read until nothing
    /// changes. False on a cycle.
    fn saturate(&mut self) -> bool {
        loop {
            let before = self.log.len();
            for n in 0..self.rf.len() {
                let (r, w) = self.rf[n];
                let var = self.reads.iter().find(|x| x.0 == r).expect("resolved read").1;
                for &w2 in &self.writes[var].clone() {
                    if w2 == w {
                        continue;
                    }
                    if self.po.reachable(w, w2).expect("declared") {
                        if !self.order(r, w2) {
                            return false;
                        }
                    } else if self.po.reachable(w2, r).expect("declared") && !self.order(w2, w) {
                        return false;
                    }
                }
            }
            if self.log.len() == before {
                return true;
            }
        }
    }

    fn resolve(&mut self, n: usize) -> bool {
        if n == self.reads.len() {
            return self.complete();
        }
        let (r, _, candidates) = self.reads[n].clone();
        for w in candidates {
            let mark = self.log.len();
            self.rf.push((r, w));
            if self.order(w, r) && self.saturate() {
                if self.resolve(n + 1) {
                    return true;
                }
            } else {
                self.rejected.push((r, w));
            }
            self.rf.pop();
            self.rollback(mark);
        }
        false
    }

    /// Orders every remaining write `w2` either before the write a read sees
    /// or after the read.
    fn complete(&mut self) -> bool {
        let mut open = None;
        'find: for &(r, w) in &self.rf {
            let var = self.reads.iter().find(|x| x.0 == r).expect("resolved read").1;
            for &w2 in &self.writes[var] {
                if w2 != w
                    && !self.po.reachable(w2, w).expect("declared")
                    && !self.po.reachable(r, w2).expect("declared")
                {
                    open = Some((r, w, w2));
                    break 'find;
                }
            }
        }
        let Some((r, w, w2)) = open else {
            return true;
        };
        for (u, v) in [(w2, w), (r, w2)] {
            let mark = self.log.len();
            if self.order(u, v) && self.saturate() && self.complete() {
                return true;
            }
            self.rollback(mark);
        }
        false
    }
}

/// Decides whether some interleaving of the trace, respecting program order
/// and the fixed orderings, lets every read see the latest preceding write
/// to its variable.
pub fn satcheck(trace: &Trace) -> Result<SatReport, SatError> {
    let Some(geom) = trace.geometry() else {
        return Ok(SatReport {
            verdict: Verdict::Consistent(Vec::new()),
            rejected: Vec::new(),
            deleted_edges: 0,
        });
    };
    let mut writes: HashMap<&str, Vec<NodeId>> = HashMap::new();
    for e in trace.events.iter().filter(|e| e.op == Access::Write) {
        writes.entry(&e.var).or_default().push(e.id());
    }
    let mut reads = Vec::new();
    for r in trace.events.iter().filter(|e| e.op == Access::Read) {
        let candidates: Vec<NodeId> = trace
            .events
            .iter()
            .filter(|w| w.op == Access::Write && w.var == r.var && w.value == r.value)
            .map(|w| w.id())
            .collect();
        if candidates.is_empty() {
            return Err(SatError::NoMatchingWrite(r.id()));
        }
        writes.entry(&r.var).or_default();
        reads.push((r.id(), r.var.as_str(), candidates));
    }
    let mut s = Search {
        po: DynamicPartialOrder::with_options(geom, crate::sst::DEFAULT_BLOCK_THRESHOLD, true),
        log: Vec::new(),
        writes,
        reads,
        rf: Vec::new(),
        rejected: Vec::new(),
        deleted: 0,
    };
    let fixed = trace.orderings.clone();
    let ok = fixed.into_iter().all(|(u, v)| s.order(u, v)) && s.resolve(0);
    Ok(SatReport {
        verdict: if ok {
            Verdict::Consistent(s.rf.clone())
        } else {
            Verdict::Inconsistent
        },
        rejected: s.rejected,
        deleted_edges: s.deleted,
    })
}
