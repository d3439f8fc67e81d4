//! Scalability benchmark: random insertions between unordered endpoints on
//! `k` chains of length `ell`, followed by random reachability queries.

use std::hint::black_box;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::oplog::OpRecord;
use super::{Backend, DynBackend};
use crate::incremental::IncrementalPartialOrder;
use crate::model::{ChainGeometry, NodeId, PartialOrder};

pub const CSV_HEADER: &str = "backend,k,ell,window,mean_insert_ns,mean_query_ns,inserted_edges,density_max";

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BenchConfig {
    pub k: u32,
    pub ell: u32,
    pub window: u32,
    pub insert_factor: u32,
    pub queries: usize,
    pub seed: u64,
    /// Run the workload once untimed before measuring.
    pub warmup: bool,
}

impl BenchConfig {
    pub fn new(k: u32, ell: u32, seed: u64) -> Self {
        BenchConfig {
            k,
            ell,
            window: 10_000,
            insert_factor: 20,
            queries: 1_000_000,
            seed,
            warmup: true,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        if self.k < 2 {
            return Err("k must be at least 2".into());
        }
        if self.ell == 0 || self.window == 0 || self.insert_factor == 0 {
            return Err("ell, window and insert_factor must be positive".into());
        }
        Ok(())
    }
}

/// A generated workload. It depends only on the shape fields and the seed.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Workload {
    pub geometry: ChainGeometry,
    pub inserts: Vec<(NodeId, NodeId)>,
    pub queries: Vec<(NodeId, NodeId)>,
    /// Largest number of events on one chain with an outgoing edge.
    pub density_max: usize,
    /// Insertion attempts, including those rejected as already ordered.
    pub attempts: u64,
}

impl Workload {
    pub fn generate(cfg: &BenchConfig) -> Workload {
        let mut rng = ChaCha8Rng::seed_from_u64(cfg.seed);
        let (k, ell) = (cfg.k.max(2), cfg.ell.max(1));
        let geometry = ChainGeometry::uniform(k, ell).expect("k >= 2");
        let mut po: IncrementalPartialOrder = IncrementalPartialOrder::new(geometry.clone());
        let mut sources = vec![std::collections::HashSet::new(); k as usize];
        let mut inserts = Vec::new();
        let attempts = cfg.insert_factor as u64 * ell as u64;
        for _ in 0..attempts {
            let t1 = rng.gen_range(0..k);
            let t2 = (t1 + rng.gen_range(1..k)) % k;
            let i = rng.gen_range(0..ell);
            let lo = i.saturating_sub(cfg.window);
            let hi = i.saturating_add(cfg.window).min(ell - 1);
            let j = rng.gen_range(lo..=hi);
            let (u, v) = (NodeId::new(t1, i), NodeId::new(t2, j));
            if po.reachable(u, v).expect("in range") || po.reachable(v, u).expect("in range") {
                continue;
            }
            po.insert_edge(u, v).expect("unordered endpoints");
            sources[t1 as usize].insert(i);
            inserts.push((u, v));
        }
        let node = |rng: &mut ChaCha8Rng| NodeId::new(rng.gen_range(0..k), rng.gen_range(0..ell));
        let queries = (0..cfg.queries).map(|_| (node(&mut rng), node(&mut rng))).collect();
        Workload {
            geometry,
            inserts,
            queries,
            density_max: sources.iter().map(|s| s.len()).max().unwrap_or(0),
            attempts,
        }
    }

    /// The workload as an op-log: insertions followed by reach queries.
    pub fn to_ops(&self) -> Vec<OpRecord> {
        let mut ops = Vec::with_capacity(1 + self.inserts.len() + self.queries.len());
        ops.push(OpRecord::Init(self.geometry.lengths().to_vec()));
        ops.extend(self.inserts.iter().map(|&(u, v)| OpRecord::Ins(u, v)));
        ops.extend(self.queries.iter().map(|&(u, v)| OpRecord::Reach(u, v)));
        ops
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct BenchRow {
    pub backend: String,
    pub k: u32,
    pub ell: u32,
    pub window: u32,
    pub mean_insert_ns: f64,
    pub mean_query_ns: f64,
    pub inserted_edges: usize,
    pub density_max: usize,
    /// Number of queries answered `true`; doubles as a consistency check.
    pub reachable_answers: usize,
}

impl BenchRow {
    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.1},{:.1},{},{}",
            self.backend,
            self.k,
            self.ell,
            self.window,
            self.mean_insert_ns,
            self.mean_query_ns,
            self.inserted_edges,
            self.density_max
        )
    }

    /// The CSV fields that do not depend on timing.
    pub fn stable_fields(&self) -> String {
        format!(
            "{},{},{},{},{},{}",
            self.backend, self.k, self.ell, self.window, self.inserted_edges, self.density_max
        )
    }
}

struct Timing {
    insert_ns: f64,
    query_ns: f64,
    yes: usize,
}

fn run_once(po: &mut dyn PartialOrder, w: &Workload) -> Timing {
    let start = Instant::now();
    for &(u, v) in &w.inserts {
        po.insert_edge(u, v).expect("workload edge");
    }
    let insert_ns = start.elapsed().as_nanos() as f64;
    let mut yes = 0;
    let start = Instant::now();
    for &(u, v) in &w.queries {
        yes += black_box(po.reachable(u, v).expect("workload query")) as usize;
    }
    let query_ns = start.elapsed().as_nanos() as f64;
    Timing {
        insert_ns,
        query_ns,
        yes,
    }
}

/// Replays `w` on a fresh backend built by `make` and reports means.
pub fn measure(
    name: &str,
    make: &dyn Fn(ChainGeometry) -> DynBackend,
    cfg: &BenchConfig,
    w: &Workload,
) -> BenchRow {
    if cfg.warmup {
        let mut po = make(w.geometry.clone());
        black_box(run_once(&mut *po, w).yes);
    }
    let mut po = make(w.geometry.clone());
    let t = run_once(&mut *po, w);
    let mean = |total: f64, n: usize| if n == 0 { 0.0 } else { total / n as f64 };
    BenchRow {
        backend: name.to_string(),
        k: w.geometry.chains(),
        ell: cfg.ell,
        window: cfg.window,
        mean_insert_ns: mean(t.insert_ns, w.inserts.len()),
        mean_query_ns: mean(t.query_ns, w.queries.len()),
        inserted_edges: w.inserts.len(),
        density_max: w.density_max,
        reachable_answers: t.yes,
    }
}

pub fn bench(cfg: &BenchConfig, backends: &[Backend]) -> Result<(Workload, Vec<BenchRow>), String> {
    cfg.validate()?;
    let w = Workload::generate(cfg);
    let rows = backends
        .iter()
        .map(|&b| measure(b.name(), &|g| b.build(g), cfg, &w))
        .collect();
    Ok((w, rows))
}
