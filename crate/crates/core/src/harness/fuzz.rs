//! Randomized differential testing against the oracle, with shrinking of
//! failing operation sequences.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oplog::{self, OpRecord};
use super::replay::{apply, Answer};
use super::{Backend, DynBackend};
use crate::model::{ChainGeometry, NodeId, PartialOrder, PoError};
use crate::oracle::OracleGraph;

#[derive(Clone, Debug)]
pub struct FuzzConfig {
    pub k: u32,
    pub max_len: u32,
    pub n_ops: usize,
    pub seed: u64,
    /// Mix deletions of live edges into the workload.
    pub decremental: bool,
    /// Largest `|i - j|` between the endpoints of a generated edge.
    pub window: u32,
    /// Share of updates that are deletions when `decremental` is set.
    pub delete_share: f64,
    /// Share of operations that are queries.
    pub query_share: f64,
}

impl FuzzConfig {
    pub fn new(k: u32, max_len: u32, n_ops: usize, seed: u64, decremental: bool) -> Self {
        FuzzConfig {
            k,
            max_len,
            n_ops,
            seed,
            decremental,
            window: (max_len / 4).max(2),
            delete_share: 0.3,
            query_share: 0.6,
        }
    }
}

/// A named backend constructor.
pub struct Subject<'a> {
    pub name: String,
    pub make: Box<dyn Fn(ChainGeometry) -> DynBackend + 'a>,
}

impl<'a> Subject<'a> {
    pub fn new(name: impl Into<String>, make: impl Fn(ChainGeometry) -> DynBackend + 'a) -> Self {
        Subject {
            name: name.into(),
            make: Box::new(make),
        }
    }
}

/// The registered backends that support the workload kind.
pub fn default_subjects(decremental: bool) -> Vec<Subject<'static>> {
    Backend::ALL
        .into_iter()
        .filter(|b| !decremental || b.supports_delete())
        .map(|b| Subject::new(b.name(), move |g| b.build(g)))
        .collect()
}

/// Generates a valid operation sequence: every insertion is cross-chain,
/// absent and acyclic; every deletion removes a live edge.
pub fn generate(cfg: &FuzzConfig) -> Vec<OpRecord> {
    let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
    let k = cfg.k.max(1);
    let max_len = cfg.max_len.max(1);
    let lens: Vec<u32> = (0..k).map(|_| rng.gen_range(1..=max_len)).collect();
    let mut ops = vec![OpRecord::Init(lens.clone())];
    let mut oracle = OracleGraph::new(ChainGeometry::new(lens).expect("k >= 1"));
    let mut live: Vec<(NodeId, NodeId)> = Vec::new();
    let node = |rng: &mut ChaCha8Rng, g: &ChainGeometry| loop {
        let t = rng.gen_range(0..g.chains());
        if g.len_of(t) > 0 {
            break NodeId::new(t, rng.gen_range(0..g.len_of(t)));
        }
    };
    while ops.len() <= cfg.n_ops {
        let geom = oracle.geometry().clone();
        if rng.gen_bool(cfg.query_share) {
            let u = node(&mut rng, &geom);
            let t = rng.gen_range(0..k);
            ops.push(match rng.gen_range(0..3) {
                0 => OpRecord::Succ(u, t),
                1 => OpRecord::Pred(u, t),
                _ => OpRecord::Reach(u, node(&mut rng, &geom)),
            });
            continue;
        }
        if cfg.decremental && !live.is_empty() && rng.gen_bool(cfg.delete_share) {
            let (u, v) = live.swap_remove(rng.gen_range(0..live.len()));
            oracle.delete_edge(u, v).expect("live edge");
            ops.push(OpRecord::Del(u, v));
            continue;
        }
        if rng.gen_bool(0.01) {
            let t = rng.gen_range(0..k);
            let len = geom.len_of(t);
            if len < max_len {
                let new_len = rng.gen_range(len + 1..=max_len);
                oracle.grow(t, new_len).expect("growth");
                ops.push(OpRecord::Grow(t, new_len));
                continue;
            }
        }
        let mut inserted = false;
        for _ in 0..8 {
            if k < 2 {
                break;
            }
            let u = node(&mut rng, &geom);
            let t2 = (u.chain + rng.gen_range(1..k)) % k;
            let len2 = geom.len_of(t2);
            if len2 == 0 {
                continue;
            }
            let lo = u.index.saturating_sub(cfg.window).min(len2 - 1);
            let hi = u.index.saturating_add(cfg.window).min(len2 - 1);
            let v = NodeId::new(t2, rng.gen_range(lo..=hi));
            if oracle.has_edge(u, v) || oracle.reachable(v, u).expect("valid") {
                continue;
            }
            // Mostly unordered endpoints, occasionally an implied edge.
            if oracle.reachable(u, v).expect("valid") && !rng.gen_bool(0.1) {
                continue;
            }
            oracle.insert_edge(u, v).expect("fresh edge");
            live.push((u, v));
            ops.push(OpRecord::Ins(u, v));
            inserted = true;
            break;
        }
        if !inserted {
            ops.push(OpRecord::Reach(node(&mut rng, &geom), node(&mut rng, &geom)));
        }
    }
    ops
}

/// Totals gathered while executing a sequence.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct RunStats {
    pub updates: usize,
    pub queries: usize,
    pub audits: usize,
    pub skipped: usize,
    /// Largest closure round count reported by any backend.
    pub max_rounds: u32,
    /// Largest cross-chain density seen after any update.
    pub max_cross_density: usize,
    /// `(backend, allocated tree nodes)` at the end of the run.
    pub tree_nodes: Vec<(String, Option<usize>)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Failure {
    /// Index into the executed sequence of the failing record.
    pub step: usize,
    pub message: String,
    /// Records actually executed, ending with the failing one.
    pub executed: Vec<OpRecord>,
}

/// Runs `ops` against every subject and the oracle. Records the oracle
/// rejects (or that would close a cycle) are skipped, which keeps arbitrary
/// subsequences runnable during shrinking. With `audit`, every backend's
/// invariants are checked after each update.
pub fn execute(ops: &[OpRecord], subjects: &[Subject<'_>], audit: bool) -> Result<RunStats, Failure> {
    let Some(OpRecord::Init(lens)) = ops.first() else {
        return Err(Failure {
            step: 0,
            message: "sequence must start with init".into(),
            executed: Vec::new(),
        });
    };
    let geom = ChainGeometry::new(lens.clone()).expect("init has chains");
    let mut oracle = OracleGraph::new(geom.clone());
    let mut pos: Vec<DynBackend> = subjects.iter().map(|s| (s.make)(geom.clone())).collect();
    let mut stats = RunStats::default();
    let mut executed = vec![ops[0].clone()];
    let fail = |executed: &Vec<OpRecord>, message: String| Failure {
        step: executed.len() - 1,
        message,
        executed: executed.clone(),
    };
    for op in &ops[1..] {
        let admissible = match *op {
            OpRecord::Ins(u, v) => {
                oracle.geometry().validate_edge(u, v).is_ok()
                    && !oracle.has_edge(u, v)
                    && !oracle.reachable(v, u).unwrap_or(true)
            }
            OpRecord::Del(u, v) => oracle.has_edge(u, v),
            _ => true,
        };
        if !admissible {
            stats.skipped += 1;
            continue;
        }
        let want = match apply(&mut oracle, op) {
            Ok(w) => w,
            Err(_) => {
                stats.skipped += 1;
                continue;
            }
        };
        executed.push(op.clone());
        let d = oracle.cross_density();
        for (s, po) in subjects.iter().zip(pos.iter_mut()) {
            let got = apply(&mut **po, op)
                .map_err(|e| fail(&executed, format!("{}: `{op}` failed: {e}", s.name)))?;
            if got != want {
                let show = |a: Option<Answer>| a.map_or("ok".into(), |a| a.to_string());
                return Err(fail(
                    &executed,
                    format!("{}: `{op}` gave `{}`, oracle `{}`", s.name, show(got), show(want)),
                ));
            }
            if audit && !op.is_query() {
                po.audit(d)
                    .map_err(|e| fail(&executed, format!("{}: invariant after `{op}`: {e}", s.name)))?;
            }
            if let Some(r) = po.max_closure_rounds() {
                stats.max_rounds = stats.max_rounds.max(r);
                if r > oracle.geometry().chains() {
                    return Err(fail(
                        &executed,
                        format!("{}: closure needed {r} rounds", s.name),
                    ));
                }
            }
        }
        if op.is_query() {
            stats.queries += 1;
        } else {
            stats.updates += 1;
            stats.max_cross_density = stats.max_cross_density.max(d);
            if audit {
                stats.audits += pos.len();
            }
        }
    }
    stats.tree_nodes = subjects
        .iter()
        .zip(&pos)
        .map(|(s, po)| (s.name.clone(), po.tree_nodes()))
        .collect();
    Ok(stats)
}

/// Reduces a failing sequence: cut everything after the failure, then
/// repeatedly drop chunks of records while the run still fails.
pub fn shrink(failure: Failure, subjects: &[Subject<'_>], audit: bool) -> Failure {
    let mut best = failure;
    let mut chunk = (best.executed.len() / 2).max(1);
    loop {
        let mut progress = false;
        let mut start = 1;
        while start < best.executed.len() {
            let end = (start + chunk).min(best.executed.len());
            let mut candidate = best.executed[..start].to_vec();
            candidate.extend_from_slice(&best.executed[end..]);
            if let Err(f) = execute(&candidate, subjects, audit) {
                best = f;
                progress = true;
            } else {
                start = end;
            }
        }
        if !progress {
            if chunk == 1 {
                return best;
            }
            chunk /= 2;
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Verdict {
    Pass(RunStats),
    Fail {
        seed: u64,
        message: String,
        /// Shrunk op-log that still fails.
        reproducer: String,
    },
}

impl Verdict {
    pub fn passed(&self) -> bool {
        matches!(self, Verdict::Pass(_))
    }
}

/// Generates a workload from `cfg`, runs it against `subjects` with
/// auditing, and shrinks any failure.
pub fn fuzz(cfg: &FuzzConfig, subjects: &[Subject<'_>]) -> Verdict {
    let ops = generate(cfg);
    match execute(&ops, subjects, true) {
        Ok(stats) => Verdict::Pass(stats),
        Err(f) => {
            let f = shrink(f, subjects, true);
            Verdict::Fail {
                seed: cfg.seed,
                message: f.message,
                reproducer: oplog::render(&f.executed),
            }
        }
    }
}

/// Wraps a backend and corrupts its successor answers for one chain pair.
/// Used to check that the fuzzer notices faults.
pub struct Faulty<P> {
    pub inner: P,
    pub chain: u32,
}

impl<P: PartialOrder> PartialOrder for Faulty<P> {
    fn geometry(&self) -> &ChainGeometry {
        self.inner.geometry()
    }
    fn supports_delete(&self) -> bool {
        self.inner.supports_delete()
    }
    fn insert_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.inner.insert_edge(from, to)
    }
    fn delete_edge(&mut self, from: NodeId, to: NodeId) -> Result<(), PoError> {
        self.inner.delete_edge(from, to)
    }
    fn reachable(&mut self, from: NodeId, to: NodeId) -> Result<bool, PoError> {
        self.inner.reachable(from, to)
    }
    fn successor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        let s = self.inner.successor(node, chain)?;
        Ok(if chain == self.chain && node.chain != chain {
            s.map(|j| j + 1)
        } else {
            s
        })
    }
    fn predecessor(&mut self, node: NodeId, chain: u32) -> Result<Option<u32>, PoError> {
        self.inner.predecessor(node, chain)
    }
    fn grow(&mut self, chain: u32, new_len: u32) -> Result<(), PoError> {
        self.inner.grow(chain, new_len)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamic::DynamicPartialOrder;

    #[test]
    fn generation_is_deterministic() {
        let cfg = FuzzConfig::new(3, 20, 300, 9, true);
        assert_eq!(generate(&cfg), generate(&cfg));
        let other = FuzzConfig { seed: 10, ..cfg.clone() };
        assert_ne!(generate(&cfg), generate(&other));
    }

    #[test]
    fn zero_ops_pass() {
        let cfg = FuzzConfig::new(3, 8, 0, 1, true);
        assert_eq!(generate(&cfg).len(), 1);
        assert!(fuzz(&cfg, &default_subjects(true)).passed());
    }

    #[test]
    fn small_runs_pass() {
        for seed in 0..4 {
            let inc = FuzzConfig::new(3, 24, 400, seed, false);
            assert!(fuzz(&inc, &default_subjects(false)).passed(), "seed {seed}");
            let dec = FuzzConfig::new(3, 24, 400, seed, true);
            assert!(fuzz(&dec, &default_subjects(true)).passed(), "seed {seed}");
        }
    }

    #[test]
    fn injected_fault_is_caught_and_shrunk() {
        let subjects = vec![Subject::new("faulty", |g| {
            Box::new(Faulty {
                inner: DynamicPartialOrder::new(g),
                chain: 1,
            }) as DynBackend
        })];
        let cfg = FuzzConfig::new(3, 16, 500, 3, true);
        match fuzz(&cfg, &subjects) {
            Verdict::Pass(_) => panic!("fault not detected"),
            Verdict::Fail { reproducer, message, .. } => {
                assert!(message.contains("faulty"));
                let ops = oplog::parse(&reproducer).unwrap();
                // A single edge into chain 1 and one successor query suffice.
                assert!(ops.len() <= 3, "{reproducer}");
                assert!(execute(&ops.into_iter().map(|(_, o)| o).collect::<Vec<_>>(), &subjects, true).is_err());
            }
        }
    }
}
