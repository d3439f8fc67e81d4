#![allow(dead_code)]

pub mod worked;

use std::collections::{HashMap, HashSet};

use csst::harness::satcheck::{Access, Trace, TraceEvent};
use csst::{ChainGeometry, NodeId};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn n(c: u32, i: u32) -> NodeId {
    NodeId::new(c, i)
}

/// Three threads; chain 2 stands in for the long middle chain with two
/// events. Reads appear after the writes they can observe so that the
/// read of `y` on thread 2 is resolved before the two reads on thread 0.
pub const CROSSING_TRACE: &str = "\
# thread 0: e0 e1 e2, thread 1: e3 e4 e5, thread 2: e6 e7
e 0 0 w x 1
e 1 0 w x 3
e 1 1 w y 4
e 2 0 w x 3
e 2 1 r y 4
e 1 2 w y 5
e 0 1 r y 5
e 0 2 r x 3
o 1 0 2 0
";

pub fn crossing_oplog() -> &'static str {
    "init 4 3 3 3 3\nins 0 1 1 0\nins 0 2 3 2\nins 1 1 2 1\nins 2 2 3 1\nsucc 0 0 3\npred 3 1 0\nreach 0 0 3 0\n"
}

/// Exhaustive search for an interleaving that respects program order and
/// the fixed orderings, in which each read sees the latest write to its
/// variable (there are no initial values).
pub fn brute_force(trace: &Trace) -> bool {
    let Some(geom) = trace.geometry() else {
        return true;
    };
    let k = geom.chains() as usize;
    let mut by_id: HashMap<NodeId, &TraceEvent> = HashMap::new();
    for e in &trace.events {
        by_id.insert(e.id(), e);
    }
    let vars: Vec<&str> = {
        let mut v: Vec<&str> = trace.events.iter().map(|e| e.var.as_str()).collect();
        v.sort();
        v.dedup();
        v
    };
    let var_ix: HashMap<&str, usize> = vars.iter().enumerate().map(|(i, v)| (*v, i)).collect();
    let mut seen = HashSet::new();
    let mut pos = vec![0u32; k];
    let mut mem: Vec<Option<i64>> = vec![None; vars.len()];
    dfs(trace, &geom, &by_id, &var_ix, &mut pos, &mut mem, &mut seen)
}

fn dfs(
    trace: &Trace,
    geom: &ChainGeometry,
    by_id: &HashMap<NodeId, &TraceEvent>,
    var_ix: &HashMap<&str, usize>,
    pos: &mut Vec<u32>,
    mem: &mut Vec<Option<i64>>,
    seen: &mut HashSet<(Vec<u32>, Vec<Option<i64>>)>,
) -> bool {
    if pos.iter().enumerate().all(|(t, &p)| p == geom.len_of(t as u32)) {
        return true;
    }
    if !seen.insert((pos.clone(), mem.clone())) {
        return false;
    }
    let done = |pos: &Vec<u32>, x: NodeId| x.index < pos[x.chain as usize];
    for t in 0..pos.len() {
        let p = pos[t];
        if p == geom.len_of(t as u32) {
            continue;
        }
        let id = n(t as u32, p);
        if trace.orderings.iter().any(|&(u, v)| v == id && !done(pos, u)) {
            continue;
        }
        let e = by_id[&id];
        let slot = var_ix[e.var.as_str()];
        let saved = mem[slot];
        match e.op {
            Access::Read if saved != Some(e.value) => continue,
            Access::Read => {}
            Access::Write => mem[slot] = Some(e.value),
        }
        pos[t] += 1;
        let ok = dfs(trace, geom, by_id, var_ix, pos, mem, seen);
        pos[t] -= 1;
        mem[slot] = saved;
        if ok {
            return true;
        }
    }
    false
}

/// A random trace of at most `max_events` events over two variables. Every
/// read has at least one write it could see.
pub fn random_trace(rng: &mut impl Rng, max_events: usize) -> Trace {
    let total = rng.gen_range(1..=max_events);
    let threads = rng.gen_range(1..=3u32);
    let mut lens = vec![0u32; threads as usize];
    let mut events = Vec::new();
    for _ in 0..total {
        let t = rng.gen_range(0..threads);
        let var = ["x", "y"][rng.gen_range(0..2)].to_string();
        events.push(TraceEvent {
            thread: t,
            index: lens[t as usize],
            op: if rng.gen_bool(0.5) { Access::Read } else { Access::Write },
            var,
            value: rng.gen_range(1..=3),
        });
        lens[t as usize] += 1;
    }
    // Reads take a value some write of their variable produces.
    let written: Vec<(String, i64)> = events
        .iter()
        .filter(|e| e.op == Access::Write)
        .map(|e| (e.var.clone(), e.value))
        .collect();
    for e in events.iter_mut().filter(|e| e.op == Access::Read) {
        let options: Vec<i64> = written.iter().filter(|(v, _)| *v == e.var).map(|(_, x)| *x).collect();
        match options.choose(rng) {
            Some(&x) => e.value = x,
            None => e.op = Access::Write,
        }
    }
    events.shuffle(rng);
    let mut orderings = Vec::new();
    if threads > 1 && rng.gen_bool(0.3) {
        let a = events[rng.gen_range(0..events.len())].id();
        let b = events[rng.gen_range(0..events.len())].id();
        if a.chain != b.chain {
            orderings.push((a, b));
        }
    }
    Trace { events, orderings }
}
